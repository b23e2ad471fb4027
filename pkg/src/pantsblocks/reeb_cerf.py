"""Reeb-complex models, Cerf diagrams and the six induced moves.

A Reeb complex is modeled as a P-complex plus a list of local gadgets,
each a small piece of CW structure that a P-complex does not allow:

* Eye: a bigon D glued to a 2-cell along an arc.  The glued side is an
  indefinite (index 3) fold edge, the free side a definite (index 1) one,
  and the two corners are cusps.
* Swallowtail: a triangle D' glued at a vertex.  Two index-3 sides meet
  at a crossing; the third side is definite and ends in two cusps.
* CrossingPair: the fold of an eye crossing a base edge twice.
* CuspCrossing: a cusp of an eye sitting on a base edge.
* TripleCrossing: three fold edges crossing pairwise.

The moves remove gadgets (forward) or create them (backward); simplifying
runs them greedily until only the P-complex is left.

Cerf diagram text format::

    strands 3
    t=1 cross 0 1 @X
    t=2 cross 0 2 unentangled @none
    t=5/2 birth 3 4

Events are ``cross i j``, ``birth i j``, ``death i j``, ``stail i`` and
``cuspfold i j``.  A crossing may be flagged ``unentangled`` and
annotated with the support of the move it induces, ``@none`` marking a
crossing that induces no move.
"""

import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .core_model import S11, PantsError, SurfaceType, SupportId
from .move_calculus import MoveLetter, MoveWord, NoMatch, ParseError
from .pgraph_pcomplex import InvalidComplex, PComplex, validate_disk_cells


class Stuck(PantsError):
    def __init__(self, message, residual=()):
        super().__init__(message)
        self.residual = tuple(residual)


class InvalidSite(PantsError):
    pass


class UnannotatedCrossing(PantsError):
    pass


class OutOfRange(PantsError):
    pass


# crossing classification

def classify_crossing_moves(s):
    """Pants moves between the decompositions on either side of a crossing.

    Only surfaces with Euler characteristic at least -2 are covered.  On a
    pants there is no curve to move; on S(1,1) and S(0,4) the single curve
    changes once; on S(2,0) the two saddles trade one curve; on S(1,2) the
    crossing runs across half of the mixed hexagon.
    """
    table = {SurfaceType(0, 3): 0, SurfaceType(1, 1): 1, SurfaceType(0, 4): 1,
             SurfaceType(1, 2): 3, SurfaceType(2, 0): 1}
    if s not in table:
        raise OutOfRange(f"{s} is outside the classified range")
    return table[s]


# Reeb-complex models

@dataclass(frozen=True)
class Eye:
    id: str
    cell: str


@dataclass(frozen=True)
class Swallowtail:
    id: str
    vertex: str
    cell: str


@dataclass(frozen=True)
class CrossingPair:
    id: str
    eye: str
    edge: str


@dataclass(frozen=True)
class CuspCrossing:
    id: str
    eye: str
    end: int
    edge: str


@dataclass(frozen=True)
class TripleCrossing:
    id: str
    edges: tuple
    unentangled: bool = False


@dataclass(frozen=True)
class CWData:
    cells: tuple
    edges: tuple      # (id, "index3" | "index1", cells, (end, end))
    vertices: tuple   # (id, kind)


@dataclass(frozen=True)
class ReebComplexModel:
    base: PComplex
    gadgets: tuple = ()

    def gadget(self, gid):
        for g in self.gadgets:
            if g.id == gid:
                return g
        raise NoMatch(f"no gadget {gid}")

    def of_type(self, cls):
        return [g for g in self.gadgets if isinstance(g, cls)]

    def cw(self):
        pc = self.base
        cells = list(pc.cells)
        edges = [(e.id, "index3", e.cells, (e.below, e.above)) for e in pc.edges]
        verts = [(v.id, v.kind) for v in pc.vertices]
        for g in self.gadgets:
            if isinstance(g, Eye):
                d = f"{g.id}.D"
                c0, c1 = f"{g.id}.c0", f"{g.id}.c1"
                cells.append(d)
                edges.append((f"{g.id}.alpha", "index3", (g.cell, g.cell, d), (c0, c1)))
                edges.append((f"{g.id}.tau", "index1", (d,), (c0, c1)))
                verts += [(c0, "Cusp"), (c1, "Cusp")]
            elif isinstance(g, Swallowtail):
                d = f"{g.id}.D"
                c0, c1, x = f"{g.id}.c0", f"{g.id}.c1", f"{g.id}.x"
                cells.append(d)
                edges.append((f"{g.id}.f1", "index3", (g.cell, g.cell, d), (x, c0)))
                edges.append((f"{g.id}.f2", "index3", (g.cell, g.cell, d), (x, c1)))
                edges.append((f"{g.id}.tau", "index1", (d,), (c0, c1)))
                verts += [(c0, "Cusp"), (c1, "Cusp"), (x, "CrossingEntangled")]
            elif isinstance(g, CrossingPair):
                verts += [(f"{g.id}.x0", "CrossingEntangled"), (f"{g.id}.x1", "CrossingEntangled")]
            elif isinstance(g, CuspCrossing):
                verts.append((f"{g.id}.x", "CrossingEntangled"))
            elif isinstance(g, TripleCrossing):
                verts += [(f"{g.id}.x12", "CrossingEntangled"),
                          (f"{g.id}.x13", "CrossingUnentangled" if g.unentangled else "CrossingEntangled"),
                          (f"{g.id}.x23", "CrossingEntangled")]
        return CWData(tuple(cells), tuple(edges), tuple(verts))

    def counts(self):
        """(index1 edges, cusps, crossings) of the materialized model."""
        cw = self.cw()
        index1 = sum(1 for e in cw.edges if e[1] == "index1")
        cusps = sum(1 for v in cw.vertices if v[1] == "Cusp")
        crossings = sum(1 for v in cw.vertices if v[1].startswith("Crossing"))
        return index1, cusps, crossings

    def is_valid(self):
        cw = self.cw()
        for vid, kind in cw.vertices:
            if kind != "Cusp":
                continue
            at = [e[1] for e in cw.edges if vid in e[3]]
            if sorted(at) != ["index1", "index3"]:
                return False
        return True

    def fresh_id(self):
        used = {g.id for g in self.gadgets}
        k = 0
        while f"g{k}" in used:
            k += 1
        return f"g{k}"

    def without(self, *gids):
        return ReebComplexModel(self.base, tuple(g for g in self.gadgets if g.id not in gids))

    def adding(self, g):
        return ReebComplexModel(self.base, self.gadgets + (g,))


def _cell_edges(pc, cell):
    return [e.id for e in pc.edges if cell in e.cells]


def _vertex_cells(pc, vid):
    out = set()
    for e in pc.edges:
        if vid in (e.below, e.above):
            out.update(e.cells)
    return out


def _crossings_on(rc, eye_id):
    return [g for g in rc.gadgets if isinstance(g, (CrossingPair, CuspCrossing)) and g.eye == eye_id]


def _need(rc, gid, cls):
    g = rc.gadget(gid)
    if not isinstance(g, cls):
        raise NoMatch(f"{gid} is not a {cls.__name__}")
    return g


def _rc_move(rc, which, location, forward):
    loc = dict(location or {})
    pc = rc.base
    if which == 1:
        if forward:
            g = _need(rc, loc["gadget"], CrossingPair)
            return rc.without(g.id), [], []
        eye = _need(rc, loc["eye"], Eye)
        if loc["edge"] not in _cell_edges(pc, eye.cell):
            raise NoMatch(f"edge {loc['edge']} does not run along cell {eye.cell}")
        return rc.adding(CrossingPair(rc.fresh_id(), eye.id, loc["edge"])), [], []
    if which == 2:
        g = _need(rc, loc["gadget"], TripleCrossing)
        if g.unentangled == forward:
            raise NoMatch("the fold has already been swiped this way")
        flipped = TripleCrossing(g.id, tuple(reversed(g.edges)), forward)
        return ReebComplexModel(pc, tuple(flipped if x.id == g.id else x for x in rc.gadgets)), [], []
    if which == 3:
        if forward:
            g = _need(rc, loc["gadget"], CuspCrossing)
            return rc.without(g.id), [], []
        eye = _need(rc, loc["eye"], Eye)
        if loc["edge"] not in _cell_edges(pc, eye.cell) or int(loc.get("end", 0)) not in (0, 1):
            raise NoMatch("cusp crossing site is not next to the eye")
        return rc.adding(CuspCrossing(rc.fresh_id(), eye.id, int(loc.get("end", 0)), loc["edge"])), [], []
    if which == 4:
        if forward:
            g = _need(rc, loc["gadget"], Eye)
            if _crossings_on(rc, g.id):
                raise NoMatch(f"eye {g.id} still crosses other fold edges")
            return rc.without(g.id), [f"{g.id}.D"], [g.cell]
        if loc["cell"] not in pc.cells:
            raise NoMatch(f"no cell {loc['cell']}")
        g = Eye(rc.fresh_id(), loc["cell"])
        return rc.adding(g), [], [g.cell]
    if which == 5:
        if forward:
            a, b = (_need(rc, x, Eye) for x in loc["gadgets"])
            if a.id == b.id or a.cell != b.cell:
                raise NoMatch("the two eyes do not face each other in one cell")
            if _crossings_on(rc, a.id) or _crossings_on(rc, b.id):
                raise NoMatch("an eye to be merged still crosses a fold edge")
            return rc.without(b.id), [f"{b.id}.D"], [a.cell]
        a = _need(rc, loc["gadget"], Eye)
        return rc.adding(Eye(rc.fresh_id(), a.cell)), [], [a.cell]
    if which == 6:
        if forward:
            g = _need(rc, loc["gadget"], Swallowtail)
            return rc.without(g.id), [f"{g.id}.D"], [g.cell]
        v, c = loc["vertex"], loc["cell"]
        if c not in _vertex_cells(pc, v):
            raise NoMatch(f"cell {c} does not meet vertex {v}")
        return rc.adding(Swallowtail(rc.fresh_id(), v, c)), [], [c]
    raise NoMatch(f"there is no induced move {which}")


def _next_move(rc):
    """First applicable elimination in the greedy order, or None."""
    for g in rc.of_type(CrossingPair):
        return 1, {"gadget": g.id}
    for g in rc.of_type(CuspCrossing):
        return 3, {"gadget": g.id}
    by_cell = {}
    for g in rc.of_type(Eye):
        if not _crossings_on(rc, g.id):
            by_cell.setdefault(g.cell, []).append(g.id)
    for cell, ids in by_cell.items():
        if len(ids) >= 2:
            return 5, {"gadgets": ids[:2]}
    for ids in by_cell.values():
        return 4, {"gadget": ids[0]}
    for g in rc.of_type(Swallowtail):
        return 6, {"gadget": g.id}
    return None


def simplify_to_pcomplex(rc):
    """Remove every gadget by induced moves; return (P-complex, trace)."""
    trace = []
    while rc.gadgets:
        step = _next_move(rc)
        if step is None:
            raise Stuck("no induced move applies", rc.gadgets)
        which, loc = step
        before = rc.counts()
        rc, removed, merged = _rc_move(rc, which, loc, True)
        if not rc.counts() < before:
            raise Stuck(f"move {which} did not simplify the model", rc.gadgets)
        trace.append({"move": which, "location": loc, "removed_cells": removed, "merged_cells": merged})
    return rc.base, trace


def inflate_virtual_edges(pc, decoration):
    """Glue a bigon per pattern-b site and a triangle per pattern-c site.

    A site is ("b", cell) or ("c", vertex, cell), or the same as a dict
    with keys pattern, cell and vertex.
    """
    rc = ReebComplexModel(pc)
    for site in decoration:
        if isinstance(site, dict):
            site = (site["pattern"], site["vertex"], site["cell"]) if site["pattern"] == "c" \
                else (site["pattern"], site["cell"])
        if site[0] == "b":
            if site[1] not in pc.cells:
                raise InvalidSite(f"no cell {site[1]}")
            rc = rc.adding(Eye(rc.fresh_id(), site[1]))
        elif site[0] == "c":
            _, v, c = site
            if v not in {x.id for x in pc.vertices}:
                raise InvalidSite(f"no vertex {v}")
            if c not in _vertex_cells(pc, v):
                raise InvalidSite(f"cell {c} does not meet vertex {v}")
            rc = rc.adding(Swallowtail(rc.fresh_id(), v, c))
        else:
            raise InvalidSite(f"unknown pattern {site[0]!r}")
    return rc


# Cerf diagrams

EVENT_ARITY = {"cross": 2, "birth": 2, "death": 2, "stail": 1, "cuspfold": 2}


@dataclass(frozen=True)
class CerfEvent:
    t: Fraction
    kind: str
    args: tuple
    unentangled: bool = False
    support: str = None

    def __str__(self):
        s = f"t={self.t} {self.kind} " + " ".join(map(str, self.args))
        if self.unentangled:
            s += " unentangled"
        if self.support is not None:
            s += f" @{self.support}"
        return s


@dataclass(frozen=True)
class CerfDiagram:
    strands: int
    events: tuple = ()

    def to_text(self):
        return "\n".join([f"strands {self.strands}"] + [str(e) for e in self.events]) + "\n"

    def crossings(self):
        return [e for e in self.events if e.kind == "cross"]


_EVENT = re.compile(r"t=(-?\d+(?:/\d+)?)\s+(cross|birth|death|stail|cuspfold)((?:\s+\d+)+)"
                    r"(\s+unentangled)?(?:\s+@(\S+))?\s*$")


def parse_cerf(text):
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ParseError("empty diagram", 1, 1)
    i, head = lines[0]
    m = re.fullmatch(r"\s*strands\s+(\d+)\s*", head)
    if not m:
        raise ParseError("first line must be 'strands n'", i, 1)
    n = int(m.group(1))
    events = []
    for i, ln in lines[1:]:
        m = _EVENT.match(ln.strip())
        if not m:
            raise ParseError(f"malformed event {ln.strip()!r}", i, 1)
        t, kind, args, unent, sup = m.groups()
        args = tuple(int(x) for x in args.split())
        if len(args) != EVENT_ARITY[kind]:
            raise ParseError(f"{kind} takes {EVENT_ARITY[kind]} strands", i, 1)
        if any(a >= n for a in args):
            raise ParseError(f"strand out of range in {ln.strip()!r}", i, 1)
        events.append(CerfEvent(Fraction(t), kind, args, bool(unent), sup))
    return CerfDiagram(n, tuple(events))


def _alive_at_start(d):
    first = {}
    for e in d.events:
        for a in e.args:
            first.setdefault(a, e.kind)
    return {s for s in range(d.strands) if first.get(s) != "birth"}


def validate_generic(d):
    """Distinct increasing event times and consistent strand lifetimes."""
    ts = [e.t for e in d.events]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        return False
    alive = _alive_at_start(d)
    for e in d.events:
        if any(not 0 <= a < d.strands for a in e.args):
            return False
        if len(e.args) == 2 and e.args[0] == e.args[1]:
            return False
        if e.kind == "birth":
            if any(a in alive for a in e.args):
                return False
            alive.update(e.args)
        elif e.kind == "death":
            if any(a not in alive for a in e.args):
                return False
            alive.difference_update(e.args)
        elif any(a not in alive for a in e.args):
            return False
    return True


def _times_between(d, k, count):
    before = d.events[k - 1].t if k > 0 else None
    after = d.events[k].t if k < len(d.events) else None
    if before is None and after is None:
        return [Fraction(j + 1) for j in range(count)]
    if before is None:
        return [after - count + j for j in range(count)]
    if after is None:
        return [before + j + 1 for j in range(count)]
    step = (after - before) / (count + 1)
    return [before + step * (j + 1) for j in range(count)]


def _insert(d, k, specs):
    if not 0 <= k <= len(d.events):
        raise NoMatch(f"no gap {k}")
    ts = _times_between(d, k, len(specs))
    new = [CerfEvent(t, kind, tuple(args), False, sup) for t, (kind, args, sup) in zip(ts, specs)]
    return CerfDiagram(d.strands, d.events[:k] + tuple(new) + d.events[k:])


def _drop(d, *ks):
    return CerfDiagram(d.strands, tuple(e for i, e in enumerate(d.events) if i not in ks))


def _event(d, k, kind):
    if not 0 <= k < len(d.events) or d.events[k].kind != kind:
        raise NoMatch(f"event {k} is not a {kind}")
    return d.events[k]


def _cerf_move(d, which, location, forward):
    loc = dict(location or {})
    k = int(loc.get("index", 0))
    pair = tuple(loc.get("strands", ()))
    sup = loc.get("support")
    if which == 1:
        if forward:
            a, b = _event(d, k, "cross"), _event(d, k + 1, "cross")
            if set(a.args) != set(b.args):
                raise NoMatch("adjacent crossings involve different folds")
            out = _drop(d, k, k + 1)
        else:
            out = _insert(d, k, [("cross", pair, sup), ("cross", pair, sup)])
    elif which == 2:
        es = [_event(d, k + j, "cross") for j in range(3)]
        pairs = [frozenset(e.args) for e in es]
        strands = set().union(*pairs)
        if len(set(pairs)) != 3 or len(strands) != 3:
            raise NoMatch("three crossings do not form a triangle of folds")
        mid = es[1]
        if mid.unentangled == forward:
            raise NoMatch("the middle crossing is already in the target state")
        rev = list(reversed(es))
        rev[1] = replace(rev[1], unentangled=forward)
        new = [replace(e, t=es[j].t) for j, e in enumerate(rev)]
        out = CerfDiagram(d.strands, d.events[:k] + tuple(new) + d.events[k + 3:])
    elif which == 3:
        if forward:
            _event(d, k, "cuspfold")
            out = _drop(d, k)
        else:
            out = _insert(d, k, [("cuspfold", pair, None)])
    elif which == 4:
        if forward:
            a, b = _event(d, k, "birth"), _event(d, k + 1, "death")
            if set(a.args) != set(b.args):
                raise NoMatch("birth and death involve different folds")
            out = _drop(d, k, k + 1)
        else:
            out = _insert(d, k, [("birth", pair, None), ("death", pair, None)])
    elif which == 5:
        if forward:
            a, b = _event(d, k, "death"), _event(d, k + 1, "birth")
            if set(a.args) != set(b.args):
                raise NoMatch("death and birth involve different folds")
            out = _drop(d, k, k + 1)
        else:
            out = _insert(d, k, [("death", pair, None), ("birth", pair, None)])
    elif which == 6:
        if forward:
            _event(d, k, "stail")
            out = _drop(d, k)
        else:
            out = _insert(d, k, [("stail", pair[:1], None)])
    else:
        raise NoMatch(f"there is no induced move {which}")
    if not validate_generic(out):
        raise NoMatch(f"move {which} at {k} leaves a non-generic diagram")
    return out


def induced_move(model, which, location=None, forward=True):
    """Apply induced move 1..6 to a Cerf diagram or a Reeb-complex model."""
    if isinstance(model, CerfDiagram):
        return _cerf_move(model, which, location, forward)
    if isinstance(model, ReebComplexModel):
        return _rc_move(model, which, location, forward)[0]
    raise TypeError(model)


def word_from_cerf(d, supports):
    """One letter per essential crossing, in time order.

    ``supports`` maps support ids to SupportId.  Crossings marked
    ``@none`` or flagged unentangled induce no move and are skipped.
    """
    if not validate_generic(d):
        raise NoMatch("the diagram is not generic")
    letters, counter = [], {"S": 0, "A": 0}
    for e in d.crossings():
        if e.unentangled or e.support == "none":
            continue
        if e.support is None:
            raise UnannotatedCrossing(f"crossing at t={e.t} carries no support")
        sup = supports.get(e.support) if supports else None
        if sup is None:
            raise UnannotatedCrossing(f"crossing at t={e.t} names unknown support {e.support}")
        if not isinstance(sup, SupportId):
            raise TypeError(sup)
        kind = "S" if sup.kind == S11 else "A"
        counter[kind] += 1
        letters.append(MoveLetter(kind, counter[kind], False, sup))
    return MoveWord(letters)


def pcomplex_of(rc):
    """The P-complex underneath a model with no gadgets left."""
    if rc.gadgets:
        raise InvalidComplex("model still carries gadgets")
    if not validate_disk_cells(rc.base):
        raise InvalidComplex("a 2-cell of the complex is not a disk")
    return rc.base
