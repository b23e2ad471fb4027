"""From an edge path of pants decompositions to a pants-block decomposition.

A path is a list of decompositions, each a multiset of pants (label
triples), consecutive ones differing by at most one elementary move.  The
curve removed by a move and the curve it adds pick out the pants that
change; those bound one fundamental block and every other pants spans a
trivial block, a pants times an interval.  Collapsing the trivial blocks
vertically leaves one pants record per maximal run of an unchanged pants.

Every curve sweeps out annuli along the levels where it is present; a
maximal run is a track and becomes one component of the link.  A curve
that comes back after disappearing gets a fresh track named ``label#k``.

Serialized shape (keys in this order)::

    {"link": [...], "pants": [[t1, t2, t3], ...],
     "blocks": [{"kind", "loops", "bottom", "top"}, ...],
     "adjacency": [[pants_idx, block_idx, "bottom" | "top"], ...],
     "source": {...} | null}

Adjacency side "bottom" means the pants lies on the bottom face of the
block, "top" on its top face.
"""

import hashlib
import json
from collections import Counter
from dataclasses import dataclass

import networkx as nx

from .core_model import S04, S05, S11, S12, PantsError, Slope, farey_neighbors_between
from .move_calculus import MoveLetter, NoMatch, RelationPattern, matches_relation, pmove_rules, rule_by_name
from .surface_states import (AmbientDecomposition, IllegalMove, SlopeState, edge_kind,
                             make_move, parse_state)


class NotAPath(PantsError):
    pass


class NotAdjacent(PantsError):
    pass


class NotABijection(PantsError):
    pass


class InvalidDecomposition(PantsError):
    pass


TRIVIAL, KIND_S11, KIND_S04 = "Trivial", "S11", "S04"
LOOP_COUNT = {KIND_S11: 3, KIND_S04: 6}


def base_label(name):
    return name.split("#", 1)[0]


def _levels(path):
    out = []
    for st in path:
        if isinstance(st, AmbientDecomposition):
            out.append(st.pants())
        else:
            out.append(tuple(sorted(tuple(sorted(p)) for p in st)))
    return out


def _curves(level):
    return {c for p in level for c in p}


def level_diff(a, b):
    """(removed, added) curve of one elementary move, or None if a == b."""
    ca, cb = _curves(a), _curves(b)
    gone, new = ca - cb, cb - ca
    if not gone and not new:
        if Counter(a) != Counter(b):
            raise NotAPath("pants change without any curve changing")
        return None
    if len(gone) != 1 or len(new) != 1:
        raise NotAPath(f"{len(gone)} curves removed and {len(new)} added in one step")
    (o,), (n,) = gone, new
    keep_a = Counter(p for p in a if o not in p)
    keep_b = Counter(p for p in b if n not in p)
    if keep_a != keep_b:
        raise NotAPath(f"replacing {o} by {n} disturbs pants away from the move")
    bottom = [p for p in a if o in p]
    top = [p for p in b if n in p]
    if len(bottom) not in (1, 2) or len(bottom) != len(top):
        raise NotAPath(f"replacing {o} by {n} is not an elementary move")
    return o, n


@dataclass(frozen=True)
class Track:
    label: str
    start: int
    end: int
    name: str
    boundary: bool = False

    def spans(self, n):
        return self.start == 0 and self.end == n


@dataclass(frozen=True)
class AnnulusSet:
    tracks: tuple
    levels: int

    def track_at(self, label, i):
        for t in self.tracks:
            if t.label == label and t.start <= i <= t.end:
                return t
        raise KeyError((label, i))

    def names(self):
        return [t.name for t in self.tracks]


def _slot_counts(level):
    return Counter(c for p in level for c in p)


def _boundary_of(levels):
    if not levels:
        return frozenset()
    return frozenset(c for c, k in _slot_counts(levels[0]).items() if k == 1)


def build_annuli(path, boundary=None):
    levels = _levels(path)
    if not levels:
        raise NotAPath("a path needs at least one decomposition")
    for a, b in zip(levels, levels[1:]):
        level_diff(a, b)
    if boundary is None:
        boundary = _boundary_of(levels)
    runs = {}
    for i, lev in enumerate(levels):
        for c in sorted(_curves(lev)):
            rs = runs.setdefault(c, [])
            if rs and rs[-1][1] == i - 1:
                rs[-1][1] = i
            else:
                rs.append([i, i])
    tracks = []
    for c in sorted(runs):
        rs = runs[c]
        for k, (i, j) in enumerate(rs, 1):
            name = c if len(rs) == 1 else f"{c}#{k}"
            tracks.append(Track(c, i, j, name, c in boundary))
    return AnnulusSet(tuple(tracks), len(levels) - 1)


def find_maximum_annuli(x, n=None):
    """Interior curves whose track runs from the bottom level to the top."""
    n = x.levels if n is None else n
    return [t.label for t in x.tracks if not t.boundary and t.spans(n)]


@dataclass(frozen=True)
class SubPath:
    """A path on a subsurface: levels of pants plus its boundary curves."""
    levels: tuple
    boundary: frozenset

    def interior_curves(self):
        return set().union(*(_curves(l) for l in self.levels)) - self.boundary


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self, items):
        out = {}
        for x in items:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def _occurrence_links(levels):
    """Pairs of pants occurrences joined across each step (persisting or moved)."""
    links = []
    for i, (a, b) in enumerate(zip(levels, levels[1:])):
        d = level_diff(a, b)
        o, n = d if d else (None, None)
        used = set()
        for ia, p in enumerate(a):
            if o is not None and o in p:
                continue
            for ib, q in enumerate(b):
                if ib not in used and q == p:
                    used.add(ib)
                    links.append(((i, ia), (i + 1, ib), "persist"))
                    break
        if d:
            bottom = [(i, ia) for ia, p in enumerate(a) if o in p]
            top = [(i + 1, ib) for ib, q in enumerate(b) if n in q]
            for x in bottom + top[1:]:
                links.append((top[0], x, "move"))
    return links


def _components(sub):
    uf = _UnionFind()
    nodes = [(i, j) for i, lev in enumerate(sub.levels) for j in range(len(lev))]
    for x in nodes:
        uf.find(x)
    for i, lev in enumerate(sub.levels):
        owner = {}
        for j, p in enumerate(lev):
            for c in p:
                if c in sub.boundary:
                    continue
                if c in owner:
                    uf.union(owner[c], (i, j))
                else:
                    owner[c] = (i, j)
    for a, b, _ in _occurrence_links(sub.levels):
        uf.union(a, b)
    out = []
    for group in sorted(uf.groups(nodes), key=min):
        per = [[] for _ in sub.levels]
        for i, j in group:
            per[i].append(sub.levels[i][j])
        out.append(SubPath(tuple(tuple(sorted(p)) for p in per), sub.boundary))
    return out


def split_at_maximum_annuli(path):
    """Cut along persistent interior curves until none is left.

    One curve is cut at a time; it becomes boundary and the path falls
    apart into the pieces of the cut surface.
    """
    if isinstance(path, SubPath):
        start = path
    else:
        levels = _levels(path)
        start = SubPath(tuple(levels), _boundary_of(levels))
    done = []
    todo = [start]
    while todo:
        sub = todo.pop(0)
        x = build_annuli(sub.levels, sub.boundary)
        spanning = sorted(set(find_maximum_annuli(x)))
        if not spanning:
            done.append(sub)
            continue
        cut = SubPath(sub.levels, sub.boundary | {spanning[0]})
        todo = _components(cut) + todo
    return done


def reassemble(pieces):
    """Per-level multiset union of the pieces' pants."""
    if not pieces:
        return []
    n = len(pieces[0].levels)
    return [tuple(sorted(p for piece in pieces for p in piece.levels[i])) for i in range(n)]


@dataclass(frozen=True)
class PantsBlock:
    kind: str
    bottom_level: int
    top_level: int
    loops: tuple

    def __post_init__(self):
        object.__setattr__(self, "loops", tuple(sorted(self.loops)))
        want = LOOP_COUNT.get(self.kind)
        if want is not None and len(self.loops) != want:
            raise InvalidDecomposition(f"{self.kind} block needs {want} loops, got {len(self.loops)}")

    def to_json(self):
        return {"kind": self.kind, "loops": list(self.loops),
                "bottom": self.bottom_level, "top": self.top_level}


@dataclass(frozen=True)
class Slice:
    block: PantsBlock
    bottom: tuple   # pants occurrences (level, index) on the bottom face
    top: tuple


def slice_blocks(path, annuli=None):
    """Cut S x [0, n] into unit-height blocks, trivial ones included."""
    levels = _levels(path)
    x = annuli or build_annuli(levels)

    def name(c, i):
        return x.track_at(c, i).name

    out = []
    for i, (a, b) in enumerate(zip(levels, levels[1:])):
        d = level_diff(a, b)
        o, n = d if d else (None, None)
        for (la, ia), (lb, ib), how in _occurrence_links(levels[i:i + 2]):
            if how == "persist":
                p = a[ia]
                out.append(Slice(PantsBlock(TRIVIAL, i, i + 1, [name(c, i) for c in p]),
                                 ((i, ia),), ((i + 1, ib),)))
        if d:
            bottom = [ia for ia, p in enumerate(a) if o in p]
            top = [ib for ib, q in enumerate(b) if n in q]
            bot_names = Counter(name(c, i) for ia in bottom for c in a[ia])
            top_names = Counter(name(c, i + 1) for ib in top for c in b[ib])
            loops = list((bot_names & top_names).elements()) + [name(o, i), name(n, i + 1)]
            kind = KIND_S11 if len(bottom) == 1 else KIND_S04
            out.append(Slice(PantsBlock(kind, i, i + 1, loops),
                             tuple((i, ia) for ia in bottom), tuple((i + 1, ib) for ib in top)))
    return out


def collapse(path, source=None):
    """Collapse the trivial blocks of the sliced path; keep the fundamental ones."""
    levels = _levels(path)
    x = build_annuli(levels)
    slices = slice_blocks(levels, x)
    uf = _UnionFind()
    nodes = [(i, j) for i, lev in enumerate(levels) for j in range(len(lev))]
    for v in nodes:
        uf.find(v)
    for s in slices:
        if s.block.kind == TRIVIAL:
            uf.union(s.bottom[0], s.top[0])
    groups = sorted(uf.groups(nodes), key=lambda g: (min(g)[0], levels[min(g)[0]][min(g)[1]], min(g)))
    cls = {}
    pants = []
    for k, g in enumerate(groups):
        i, j = min(g)
        pants.append(tuple(sorted(x.track_at(c, i).name for c in levels[i][j])))
        for v in g:
            cls[v] = k
    blocks, adjacency = [], []
    for s in slices:
        if s.block.kind == TRIVIAL:
            continue
        b = len(blocks)
        blocks.append(s.block)
        for v in s.bottom:
            adjacency.append((cls[v], b, "bottom"))
        for v in s.top:
            adjacency.append((cls[v], b, "top"))
    return BlockDecomposition(tuple(x.names()), tuple(pants), tuple(blocks),
                              tuple(sorted(adjacency)), source)


@dataclass(frozen=True)
class PathSource:
    """Where a decomposition came from: a start state and the moves taken.

    ``moves`` is a tuple of (support id, state reached).
    """
    ambient: AmbientDecomposition
    moves: tuple

    def walks(self):
        out = {s.support.id: [s.state] for s in self.ambient.active_supports}
        for sid, st in self.moves:
            out[sid].append(st)
        return out

    def path(self):
        amb = [self.ambient]
        for sid, st in self.moves:
            try:
                amb.append(amb[-1].move_to(sid, st))
            except IllegalMove as e:
                raise NotAPath(str(e)) from None
        return amb

    def letters(self):
        """The concrete move word, labels numbered by first use of an edge."""
        walks = {s.support.id: [s.state] for s in self.ambient.active_supports}
        labels, out = {}, []
        for sid, st in self.moves:
            slot = self.ambient.slot(sid)
            a = walks[sid][-1]
            walks[sid].append(st)
            m = make_move(a, st, slot.support)
            key = (sid, m.source, m.target)
            if key not in labels:
                labels[key] = 1 + sum(1 for k in labels if k[0] == sid)
            out.append(MoveLetter(m.kind, labels[key], m.inverted, m.support, m.source, m.target))
        return out

    def to_json(self):
        d = self.ambient.to_json()
        d["moves"] = [{"support": sid, "to": str(st)} for sid, st in self.moves]
        return d

    @classmethod
    def from_json(cls, data):
        amb = AmbientDecomposition.from_json(data)
        moves = tuple((m["support"], parse_state(m["to"])) for m in data.get("moves", ()))
        return cls(amb, moves)


def build_from_moves(ambient, moves):
    src = PathSource(ambient, tuple(moves))
    return collapse(src.path(), src)


def build_from_walks(ambient, walks):
    """Decomposition of the per-support walks run one support after another."""
    moves = []
    for slot in ambient.active_supports:
        w = walks.get(slot.support.id, [slot.state])
        if w[0] != slot.state:
            raise NotAPath(f"walk on {slot.support.id} does not start at {slot.state}")
        moves.extend((slot.support.id, st) for st in w[1:])
    return build_from_moves(ambient, moves)


@dataclass(frozen=True)
class BlockDecomposition:
    link: tuple
    pants: tuple
    blocks: tuple
    adjacency: tuple
    source: PathSource = None

    def __post_init__(self):
        links = set(self.link)
        for p in self.pants:
            if len(p) != 3:
                raise InvalidDecomposition(f"pants {p} does not have three cuffs")
            if not set(p) <= links:
                raise InvalidDecomposition(f"pants {p} uses curves outside the link")
        for b in self.blocks:
            if not set(b.loops) <= links:
                raise InvalidDecomposition("block loops outside the link")
        sides = Counter()
        for pi, bi, side in self.adjacency:
            if not (0 <= pi < len(self.pants) and 0 <= bi < len(self.blocks)) or side not in ("bottom", "top"):
                raise InvalidDecomposition(f"bad adjacency entry {(pi, bi, side)}")
            sides[(pi, side)] += 1
        if any(k > 1 for k in sides.values()):
            raise InvalidDecomposition("a pants bounds two blocks from the same side")
        for bi, b in enumerate(self.blocks):
            face = {s: [self.pants[pi] for pi, bj, s2 in self.adjacency if bj == bi and s2 == s]
                    for s in ("bottom", "top")}
            want = {KIND_S11: 1, KIND_S04: 2}[b.kind]
            if len(face["bottom"]) != want or len(face["top"]) != want:
                raise InvalidDecomposition(f"block {bi} of kind {b.kind} has the wrong number of faces")

    def face(self, bi, side):
        return [pi for pi, bj, s in self.adjacency if bj == bi and s == side]

    def kinds(self):
        return Counter(b.kind for b in self.blocks)

    def bottom_pants(self):
        """Pants with no block below them."""
        below = {pi for pi, _, s in self.adjacency if s == "top"}
        return [i for i in range(len(self.pants)) if i not in below]

    def top_pants(self):
        above = {pi for pi, _, s in self.adjacency if s == "bottom"}
        return [i for i in range(len(self.pants)) if i not in above]

    def boundary_curves(self):
        out = set()
        for i in set(self.bottom_pants()) | set(self.top_pants()):
            out.update(self.pants[i])
        return out

    def to_json(self):
        return {
            "link": list(self.link),
            "pants": [list(p) for p in self.pants],
            "blocks": [b.to_json() for b in self.blocks],
            "adjacency": [list(a) for a in self.adjacency],
            "source": self.source.to_json() if self.source else None,
        }

    @classmethod
    def from_json(cls, data):
        try:
            blocks = tuple(PantsBlock(b["kind"], b.get("bottom", 0), b.get("top", 0), b["loops"])
                           for b in data["blocks"])
            src = data.get("source")
            return cls(tuple(data["link"]), tuple(tuple(sorted(p)) for p in data["pants"]), blocks,
                       tuple(sorted((int(a), int(b), s) for a, b, s in data["adjacency"])),
                       PathSource.from_json(src) if src else None)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidDecomposition):
                raise
            raise InvalidDecomposition(f"malformed decomposition: {e}") from None

    def canonical(self):
        """Label-exact form with levels and list order forgotten."""
        pants_keys = sorted(range(len(self.pants)), key=lambda i: self.pants[i])
        rank = {i: r for r, i in enumerate(pants_keys)}
        blocks = []
        for bi, b in enumerate(self.blocks):
            blocks.append({"kind": b.kind, "loops": list(b.loops),
                           "bottom": sorted(rank[i] for i in self.face(bi, "bottom")),
                           "top": sorted(rank[i] for i in self.face(bi, "top"))})
        blocks.sort(key=lambda b: json.dumps(b, sort_keys=True))
        return {"link": sorted(self.link), "pants": [list(self.pants[i]) for i in pants_keys],
                "blocks": blocks}

    def fingerprint(self):
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:20]


def incidence_graph(bd):
    """Pants, blocks and curves as a labeled multigraph.

    Curves on the top or bottom surface keep their base label; every other
    curve is anonymous, so isomorphism is free on interior labels.
    """
    g = nx.MultiGraph()
    keep = bd.boundary_curves()
    for i, p in enumerate(bd.pants):
        g.add_node(("p", i), tag="pants")
        for c in p:
            g.add_edge(("p", i), ("c", c), tag="cuff")
    for c in bd.link:
        g.add_node(("c", c), tag="curve:" + (base_label(c) if c in keep else "*"))
    for bi, b in enumerate(bd.blocks):
        g.add_node(("b", bi), tag="block:" + b.kind)
        for c in b.loops:
            g.add_edge(("b", bi), ("c", c), tag="loop")
    for pi, bi, side in bd.adjacency:
        g.add_edge(("p", pi), ("b", bi), tag=side)
    return g


def _edge_match(a, b):
    return Counter(d["tag"] for d in a.values()) == Counter(d["tag"] for d in b.values())


def is_isomorphic(bd1, bd2):
    if bd1.fingerprint() == bd2.fingerprint():
        return True
    g1, g2 = incidence_graph(bd1), incidence_graph(bd2)
    if g1.number_of_nodes() != g2.number_of_nodes() or g1.number_of_edges() != g2.number_of_edges():
        return False
    return nx.is_isomorphic(g1, g2, node_match=lambda a, b: a["tag"] == b["tag"],
                            edge_match=_edge_match)


def _block_index(bd, b):
    if isinstance(b, int):
        return b
    for i, x in enumerate(bd.blocks):
        if x is b:
            return i
    return bd.blocks.index(b)


def is_invertible_pair(b1, b2, context):
    """Two stacked blocks of one kind whose outer faces carry the same curves."""
    bd = context
    i, j = _block_index(bd, b1), _block_index(bd, b2)
    up = set(bd.face(i, "top")) & set(bd.face(j, "bottom"))
    down = set(bd.face(j, "top")) & set(bd.face(i, "bottom"))
    if not up and not down:
        raise NotAdjacent(f"blocks {i} and {j} share no pants")
    if not up:
        i, j = j, i
    lower, upper = bd.blocks[i], bd.blocks[j]
    if lower.kind != upper.kind:
        return False
    if set(bd.face(i, "top")) != set(bd.face(j, "bottom")):
        return False

    def outer(bi, side):
        return sorted(tuple(sorted(base_label(c) for c in bd.pants[pi])) for pi in bd.face(bi, side))

    return outer(i, "bottom") == outer(j, "top")


# P-moves on block decompositions

def _expected_relation(rule, support):
    if rule.family == "cancelling":
        return RelationPattern.CancellingPair
    if rule.family == "triangle":
        return RelationPattern.STriangle if support.kind == S11 else RelationPattern.ATriangle
    if rule.family == "pentagon":
        return RelationPattern.APentagon
    if rule.family == "hexagon":
        return RelationPattern.MixedHexagon
    raise NoMatch(f"{rule.name} is not a P-move")


def _walk_letters(support, states):
    out = []
    for a, b in zip(states, states[1:]):
        try:
            out.append(make_move(a, b, support))
        except IllegalMove as e:
            raise NoMatch(str(e)) from None
    return out


def _fits(pattern, letters):
    """Kinds agree, one schematic label per edge, orientations consistent."""
    if len(pattern) != len(letters):
        return False
    edge_of, label_of = {}, {}
    for pat, x in zip(pattern, letters):
        if pat.kind != x.kind:
            return False
        key = (pat.kind, pat.label)
        edge = (x.source, x.target)
        rel = pat.inverted != x.inverted
        if key in edge_of:
            if edge_of[key] != (edge, rel):
                return False
        else:
            if edge in label_of:
                return False
            edge_of[key] = (edge, rel)
            label_of[edge] = key
    return True


def _cycle_letters(support, states):
    labels, out = {}, []
    for m in _walk_letters(support, states):
        key = (m.source, m.target)
        labels.setdefault(key, len(labels) + 1)
        out.append(MoveLetter(m.kind, labels[key], m.inverted, support, m.source, m.target))
    return out


def check_instance(rule, support, old, new, forward=True):
    """Raise NoMatch unless old -> new is a concrete instance of the rule."""
    old_side = rule.lhs if forward else rule.rhs
    new_side = rule.rhs if forward else rule.lhs
    if len(old) != len(old_side) + 1 or len(new) != len(new_side) + 1:
        raise NoMatch("side length mismatch")
    if old[0] != new[0] or old[-1] != new[-1]:
        raise NoMatch("the two sides do not share their endpoints")
    ol, nl = _walk_letters(support, old), _walk_letters(support, new)
    if not _fits(old_side, ol):
        raise NoMatch(f"moves do not match {old_side}")
    if not _fits(new_side, nl):
        raise NoMatch(f"replacement does not match {new_side}")
    cycle = list(old) + list(reversed(new))[1:]
    if len(cycle) == 1:
        raise NoMatch("empty cycle")
    got = matches_relation(_cycle_letters(support, cycle))
    want = _expected_relation(rule, support)
    if got != want:
        raise NoMatch(f"the closed loop is {got.name if got else 'no relation'}, not {want.name}")


def _rule(rule):
    return rule_by_name(rule) if isinstance(rule, str) else rule


def location_states(location):
    return [parse_state(s) if isinstance(s, str) else s for s in location.get("via", ())]


def apply_pmove_blocks(bd, rule, location, forward=True):
    """Apply a P-move to the blocks of one support.

    ``location`` is {"support": id, "index": i, "via": [states]}: the
    rule side starts after the i-th move on that support, and ``via`` lists
    the intermediate states of the replacement side.  The blocks outside
    the located collection are left as they were.
    """
    rule = _rule(rule)
    if bd.source is None:
        raise NoMatch("decomposition carries no path; P-moves need one")
    src = bd.source
    sid = location["support"]
    try:
        slot = src.ambient.slot(sid)
    except KeyError:
        raise NoMatch(f"no support {sid}") from None
    walks = src.walks()
    walk = walks[sid]
    i = int(location["index"])
    old_side = rule.lhs if forward else rule.rhs
    new_side = rule.rhs if forward else rule.lhs
    L = len(old_side)
    if i < 0 or i + L >= len(walk):
        raise NoMatch(f"rule side of length {L} does not fit at {i}")
    old = walk[i:i + L + 1]
    via = location_states(location)
    new = [old[0]] + via + ([old[-1]] if len(new_side) else [])
    if not new_side and via:
        raise NoMatch("a deletion takes no intermediate states")
    check_instance(rule, slot.support, old, new, forward)
    new_walks = dict(walks)
    new_walks[sid] = walk[:i] + new + walk[i + L + 1:]
    out = build_from_walks(src.ambient, new_walks)
    after = out.source.walks()
    if any(after[k] != walks[k] for k in walks if k != sid):
        raise NoMatch("the move disturbed blocks outside its support")
    return out


def _adjacent_slopes(x, pool):
    return sorted(y for y in pool if abs(x.slope.determinant(y.slope)) == 1)


BASE_POOL = tuple(SlopeState(s) for s in (Slope(0, 1), Slope(1, 0), Slope(1, 1), Slope(-1, 1)))


def _paths(slot, x, z, m, pool):
    if isinstance(x, SlopeState):
        if m == 0:
            if x == z:
                yield [x]
        elif m == 1:
            if x != z and abs(x.slope.determinant(z.slope)) == 1:
                yield [x, z]
        elif m == 2:
            if x == z:
                for y in _adjacent_slopes(x, pool):
                    yield [x, y, x]
            elif abs(x.slope.determinant(z.slope)) == 1:
                for y in farey_neighbors_between(x.slope, z.slope):
                    yield [x, SlopeState(y), z]
        return
    if m == 2 and x == z:
        for d in (1, -1):
            yield [x, type(x)(x.index + d), x]
        return
    seen = set()
    for d in (1, -1):
        p = [type(x)(x.index + d * k) for k in range(m + 1)]
        if p[-1] == z and tuple(p) not in seen:
            seen.add(tuple(p))
            yield p


def _rule_applies(rule, support):
    if rule.family == "triangle":
        return support.kind in (S11, S04) and rule.lhs[0].kind == ("S" if support.kind == S11 else "A")
    if rule.family == "pentagon":
        return support.kind == S05
    if rule.family == "hexagon":
        return support.kind == S12
    return True


def pmove_sites(bd, pool=()):
    """Every concrete P-move applicable to bd, in a fixed order.

    Yields (rule, location, forward).  Slope supports get inserted pairs
    towards slopes in BASE_POOL or the extra ``pool``.
    """
    if bd.source is None:
        return
    src = bd.source
    walks = src.walks()
    full_pool = set(BASE_POOL) | {s for s in pool if isinstance(s, SlopeState)}
    for w in walks.values():
        full_pool.update(s for s in w if isinstance(s, SlopeState))
    for slot in src.ambient.active_supports:
        sid, sup = slot.support.id, slot.support
        walk = walks[sid]
        for rule in pmove_rules():
            if not _rule_applies(rule, sup):
                continue
            for forward in (True, False):
                old_side = rule.lhs if forward else rule.rhs
                new_side = rule.rhs if forward else rule.lhs
                L, M = len(old_side), len(new_side)
                for i in range(len(walk) - L):
                    old = walk[i:i + L + 1]
                    try:
                        if not _fits(old_side, _walk_letters(sup, old)):
                            continue
                    except NoMatch:
                        continue
                    for new in _paths(slot, old[0], old[-1], M, full_pool):
                        try:
                            check_instance(rule, sup, old, new, forward)
                        except NoMatch:
                            continue
                        via = new[1:-1] if M else []
                        yield rule, {"support": sid, "index": i, "via": [str(s) for s in via]}, forward


def inverse_location(bd, rule, location, forward=True):
    """Location of the move that undoes the given one on its result."""
    rule = _rule(rule)
    walk = bd.source.walks()[location["support"]]
    i = int(location["index"])
    L = len(rule.lhs if forward else rule.rhs)
    old = walk[i:i + L + 1]
    via = old[1:-1] if L else []
    return {"support": location["support"], "index": i, "via": [str(s) for s in via]}


def glue_monodromy(bd, phi):
    """Close S x I up by gluing the top to the bottom along phi.

    phi maps each top-surface curve to a bottom-surface curve; it must be a
    bijection carrying the top pants onto the bottom pants.
    """
    top_idx, bot_idx = bd.top_pants(), bd.bottom_pants()
    top_curves = {c for i in top_idx for c in bd.pants[i]}
    bot_curves = {c for i in bot_idx for c in bd.pants[i]}
    if set(phi) != top_curves:
        raise NotABijection("phi is not defined on exactly the top curves")
    if set(phi.values()) != bot_curves or len(set(phi.values())) != len(phi):
        raise NotABijection("phi is not a bijection onto the bottom curves")
    images = {}
    for i in top_idx:
        images.setdefault(tuple(sorted(phi[c] for c in bd.pants[i])), []).append(i)
    bottoms = {}
    for i in bot_idx:
        bottoms.setdefault(bd.pants[i], []).append(i)
    if {k: len(v) for k, v in images.items()} != {k: len(v) for k, v in bottoms.items()}:
        raise NotABijection("phi does not carry the top pants onto the bottom pants")
    cu, pu = _UnionFind(), _UnionFind()
    for c in bd.link:
        cu.find(c)
    for c, d in phi.items():
        cu.union(c, d)
    for i in range(len(bd.pants)):
        pu.find(i)
    for key, tops in images.items():
        for t, b in zip(tops, bottoms[key]):
            pu.union(t, b)
    rep = {c: cu.find(c) for c in bd.link}
    classes = sorted({pu.find(i) for i in range(len(bd.pants))})
    new_index = {r: k for k, r in enumerate(classes)}
    pants = tuple(tuple(sorted(rep[c] for c in bd.pants[r])) for r in classes)
    blocks = tuple(PantsBlock(b.kind, b.bottom_level, b.top_level, [rep[c] for c in b.loops])
                   for b in bd.blocks)
    adjacency = tuple(sorted((new_index[pu.find(pi)], bi, s) for pi, bi, s in bd.adjacency))
    link = tuple(sorted(set(rep.values())))
    return BlockDecomposition(link, pants, blocks, adjacency, None)


def fundamental_kind(support, a, b):
    """Block kind produced by the move a -> b on support."""
    k = edge_kind(a, b, support)
    if k is None:
        raise NotAPath(f"{a} -> {b} is not a move")
    if support.kind == S11 or (support.kind == S12 and k == "S"):
        return KIND_S11
    return KIND_S04

