"""P-graphs, stacks of P-graphs and P-complexes.

A P-graph has one trivalent vertex per pair of pants, one edge per
interior curve (a loop when a pants is glued to itself) and one leaf per
boundary curve.  An A-move is an H-I move on the P-graph and an S-move an
hourglass move on a vertex carrying a loop.

A P-complex is stored as

* cells: the 2-cells, one per link component,
* edges: index-3 edges with their three incident cells (with
  multiplicity) and the type-III vertex at each end, ``None`` where the
  edge runs into the boundary,
* vertices: type-III vertices of kind IIIS (valence 2) or IIIA
  (valence 4).

JSON shape: {"cells", "edges", "vertices", "incidences", "source"} where
each incidence is [edge_id, vertex_id, "below" | "above"] and "below"
means the vertex sits below the edge.
"""

from collections import Counter
from dataclasses import dataclass, field

import networkx as nx

from .core_model import NotDecomposable, PantsError, euler_characteristic
from .block_builder import (KIND_S04, KIND_S11, BlockDecomposition, InvalidDecomposition,
                            PantsBlock, PathSource, apply_pmove_blocks)
from .surface_states import IllegalMove


class InvalidIncidence(PantsError):
    pass


class InvalidTags(PantsError):
    pass


class NotEligible(PantsError):
    pass


class InvalidComplex(PantsError):
    pass


@dataclass(frozen=True)
class PGraph:
    """Vertices (ids in order) and edges (edge_id, u, v) in order."""
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise InvalidIncidence("repeated vertex id")
        ids = [e[0] for e in self.edges]
        if len(set(ids)) != len(ids):
            raise InvalidIncidence("repeated edge id")
        for eid, u, v in self.edges:
            if u not in vs or v not in vs:
                raise InvalidIncidence(f"edge {eid} has an unknown endpoint")

    def valence(self, v):
        return sum((u == v) + (w == v) for _, u, w in self.edges)

    def incident(self, v):
        """Edges at v in edge order; a loop appears once."""
        return [e for e in self.edges if v in (e[1], e[2])]

    def edge(self, eid):
        for e in self.edges:
            if e[0] == eid:
                return e
        raise KeyError(eid)

    def leaves(self):
        return [v for v in self.vertices if self.valence(v) == 1]

    def trivalent(self):
        return [v for v in self.vertices if self.valence(v) == 3]

    def betti(self):
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((u, v) for _, u, v in self.edges)
        return len(self.edges) - len(self.vertices) + nx.number_connected_components(g)

    def is_valid(self):
        return all(self.valence(v) in (1, 3) for v in self.vertices)

    def to_networkx(self):
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for eid, u, v in self.edges:
            g.add_edge(u, v, key=eid, id=eid)
        return g

    def to_json(self):
        return {"vertices": [{"id": v, "valence": self.valence(v)} for v in self.vertices],
                "edges": [{"id": e, "ends": [u, v]} for e, u, v in self.edges]}

    def to_dot(self, name="pgraph"):
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            shape = "point" if self.valence(v) == 1 else "circle"
            lines.append(f'  "{v}" [shape={shape}];')
        for e, u, v in self.edges:
            lines.append(f'  "{u}" -- "{v}" [label="{e}"];')
        lines.append("}")
        return "\n".join(lines)


def pgraph_isomorphic(g1, g2):
    return nx.is_isomorphic(g1.to_networkx(), g2.to_networkx())


def pgraph_from_decomposition(s, pants):
    """P-graph of a decomposition of s given as a list of cuff-label triples."""
    pants = [tuple(p) for p in pants]
    if any(len(p) != 3 for p in pants):
        raise InvalidIncidence("every pants needs three cuffs")
    where = {}
    for i, p in enumerate(pants):
        for c in p:
            where.setdefault(c, []).append(i)
    if len(pants) != -euler_characteristic(s):
        raise InvalidIncidence(f"{s} needs {-euler_characteristic(s)} pants, got {len(pants)}")
    vertices = [f"v{i}" for i in range(len(pants))]
    edges = []
    for c in sorted(where):
        occ = where[c]
        if len(occ) > 2:
            raise InvalidIncidence(f"curve {c} bounds {len(occ)} pants cuffs")
        if len(occ) == 2:
            edges.append((c, f"v{occ[0]}", f"v{occ[1]}"))
        else:
            leaf = f"d:{c}"
            vertices.append(leaf)
            edges.append((c, f"v{occ[0]}", leaf))
    g = PGraph(tuple(vertices), tuple(edges))
    if len(g.leaves()) != s.boundaries:
        raise InvalidIncidence(f"{s} has {s.boundaries} boundary curves, decomposition has {len(g.leaves())}")
    if nx.number_connected_components(g.to_networkx()) != 1:
        raise InvalidIncidence("decomposition is not connected")
    if g.betti() != s.genus:
        raise InvalidIncidence(f"decomposition has genus {g.betti()}, expected {s.genus}")
    return g


@dataclass(frozen=True)
class ReebGraph:
    """Vertices map id -> tag; edges are (edge_id, u, v)."""
    tags: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    def tag(self, v):
        return dict(self.tags)[v]

    def vertices(self):
        return [v for v, _ in self.tags]

    def valence(self, v):
        return sum((u == v) + (w == v) for _, u, w in self.edges)


LEAF_TAGS = ("boundary", "extremal")
SADDLE_TAGS = ("trivial_saddle", "inner")


def _check_tags(g):
    for v, t in g.tags:
        k = g.valence(v)
        if k == 1 and t not in LEAF_TAGS:
            raise InvalidTags(f"valence-one vertex {v} is tagged {t}")
        if k == 3 and t not in SADDLE_TAGS:
            raise InvalidTags(f"valence-three vertex {v} is tagged {t}")
        if k not in (1, 3):
            raise InvalidTags(f"vertex {v} has valence {k}")


def reeb_to_pgraph(g):
    """Drop extremal leaves and smooth the trivial saddles they hung from."""
    _check_tags(g)
    tags = dict(g.tags)
    edges = [e for e in g.edges if tags[e[1]] != "extremal" and tags[e[2]] != "extremal"]
    for v in [v for v in g.vertices() if tags[v] == "trivial_saddle"]:
        at = [e for e in edges if v in (e[1], e[2])]
        k = sum((e[1] == v) + (e[2] == v) for e in at)
        if k != 2:
            raise InvalidTags(f"trivial saddle {v} is not next to exactly one extremal vertex")
        if len(at) == 1:
            raise InvalidTags(f"trivial saddle {v} closes up a circle on its own")
        (e1, a1, b1), (e2, a2, b2) = at
        x = b1 if a1 == v else a1
        y = b2 if a2 == v else a2
        edges = [e for e in edges if e[0] not in (e1, e2)]
        edges.append((f"{e1}.{e2}", x, y))
    keep = [v for v in g.vertices() if tags[v] in ("boundary", "inner")]
    if not keep:
        raise NotDecomposable("nothing is left once the extrema are removed")
    out = PGraph(tuple(keep), tuple(edges))
    for v in keep:
        want = 1 if tags[v] == "boundary" else 3
        if out.valence(v) != want:
            raise InvalidTags(f"{tags[v]} vertex {v} ends with valence {out.valence(v)}")
    return out


def _other_end(e, v):
    return e[2] if e[1] == v else e[1]


def hi_move(g, e, pairing=None):
    """Replace the H around edge e by the I.

    The branches at the two ends are (b1, b2) at u and (b3, b4) at v, in
    edge order.  By default u ends up with b1 and b3 and v with b2 and b4;
    ``pairing`` names the two branches that should end at u instead.
    Vertex and edge ids are kept.
    """
    eid, u, v = g.edge(e)
    if u == v:
        raise NotEligible(f"{e} is a loop")
    if g.valence(u) != 3 or g.valence(v) != 3:
        raise NotEligible(f"{e} ends at a leaf")
    bu = [x for x in g.incident(u) if x[0] != eid]
    bv = [x for x in g.incident(v) if x[0] != eid]
    if any(x[1] == x[2] for x in bu + bv):
        raise NotEligible(f"an end of {e} carries a loop")
    if any(_other_end(x, u) == v for x in bu):
        raise NotEligible(f"{e} has a parallel edge")
    branches = [x[0] for x in bu + bv]
    if pairing is None:
        at_u = {bu[0][0], bv[0][0]}
    else:
        at_u = set(pairing)
        if len(at_u) != 2 or not at_u <= set(branches):
            raise NotEligible("pairing must name two branches of the H")
    far = {x[0]: (_other_end(x, u) if x in bu else _other_end(x, v)) for x in bu + bv}
    edges = []
    for x in g.edges:
        if x[0] in far:
            edges.append((x[0], u if x[0] in at_u else v, far[x[0]]))
        else:
            edges.append(x)
    return PGraph(g.vertices, tuple(edges))


def _toggle(eid):
    return eid[:-1] if eid.endswith("'") else eid + "'"


def hourglass_move(g, v):
    """Swap the loop at v for the other curve of the one-holed torus.

    Only the edge identity changes: the new loop gets the old id with a
    trailing ' toggled.
    """
    loops = [x for x in g.incident(v) if x[1] == x[2] == v]
    if not loops:
        raise NotEligible(f"vertex {v} carries no loop")
    eid = loops[0][0]
    return PGraph(g.vertices, tuple((_toggle(x[0]), x[1], x[2]) if x[0] == eid else x
                                   for x in g.edges))


@dataclass(frozen=True)
class AlmostPGraph:
    """A P-graph whose one stack vertex has valence 2 or 4."""
    graph: PGraph
    stack_vertex: str
    valence: int


@dataclass(frozen=True)
class LocalPModel:
    levels: tuple
    stack_vertices: tuple   # (level index, valence)


def hi_sites(g):
    out = []
    for eid, u, v in g.edges:
        try:
            hi_move(g, eid)
        except NotEligible:
            continue
        out.append(eid)
    return out


def hourglass_sites(g):
    return [v for v in g.vertices if any(x[1] == x[2] == v for x in g.incident(v))]


def _contract(g, e):
    eid, u, v = g.edge(e)
    w = f"{u}+{v}"
    verts = tuple(w if x == u else x for x in g.vertices if x != v)
    edges = tuple((x[0], w if x[1] in (u, v) else x[1], w if x[2] in (u, v) else x[2])
                  for x in g.edges if x[0] != eid)
    return AlmostPGraph(PGraph(verts, edges), w, 4)


def _pinch(g, v):
    eid = [x for x in g.incident(v) if x[1] == x[2] == v][0][0]
    return AlmostPGraph(PGraph(g.vertices, tuple(x for x in g.edges if x[0] != eid)), v, 2)


def stack_from_word(w, g0, sites=None):
    """Stack of P-graphs realizing the letters of w one after another."""
    levels = [g0]
    stack = []
    g = g0
    for i, m in enumerate(w):
        site = sites[i] if sites is not None else None
        if m.kind == "A":
            ok = hi_sites(g)
            if site is None:
                if not ok:
                    raise IllegalMove("no edge carries an H-I move", i)
                site = ok[0]
            if site not in ok:
                raise IllegalMove(f"edge {site} does not carry an H-I move", i)
            crit, nxt = _contract(g, site), hi_move(g, site)
        else:
            ok = hourglass_sites(g)
            if site is None:
                if not ok:
                    raise IllegalMove("no vertex carries an hourglass move", i)
                site = ok[0]
            if site not in ok:
                raise IllegalMove(f"vertex {site} carries no loop", i)
            crit, nxt = _pinch(g, site), hourglass_move(g, site)
        stack.append((len(levels), crit.valence))
        levels += [crit, nxt]
        g = nxt
    return LocalPModel(tuple(levels), tuple(stack))


# P-complexes

@dataclass(frozen=True)
class PEdge:
    id: str
    cells: tuple
    below: str = None
    above: str = None


@dataclass(frozen=True)
class PVertex:
    id: str
    kind: str
    level: int = 0


VALENCE = {"IIIS": 2, "IIIA": 4}


@dataclass(frozen=True)
class PComplex:
    cells: tuple
    edges: tuple
    vertices: tuple
    source: PathSource = field(default=None, compare=False)

    def __post_init__(self):
        cells = set(self.cells)
        ids = {v.id for v in self.vertices}
        for e in self.edges:
            if len(e.cells) != 3:
                raise InvalidComplex(f"edge {e.id} meets {len(e.cells)} cells, not three")
            if not set(e.cells) <= cells:
                raise InvalidComplex(f"edge {e.id} meets unknown cells")
            for end in (e.below, e.above):
                if end is not None and end not in ids:
                    raise InvalidComplex(f"edge {e.id} ends at unknown vertex {end}")
        for v in self.vertices:
            if v.kind not in VALENCE:
                raise InvalidComplex(f"vertex {v.id} has kind {v.kind}")
            if self.valence(v.id) != VALENCE[v.kind]:
                raise InvalidComplex(f"{v.kind} vertex {v.id} has valence {self.valence(v.id)}")

    def valence(self, vid):
        return sum((e.below == vid) + (e.above == vid) for e in self.edges)

    def incidences(self):
        out = []
        for e in self.edges:
            if e.below is not None:
                out.append((e.id, e.below, "below"))
            if e.above is not None:
                out.append((e.id, e.above, "above"))
        return out

    def vertex_kinds(self):
        return Counter(v.kind for v in self.vertices)

    def to_json(self):
        return {
            "cells": list(self.cells),
            "edges": [{"id": e.id, "cells": list(e.cells), "ends": [e.below, e.above]} for e in self.edges],
            "vertices": [{"id": v.id, "kind": v.kind, "level": v.level} for v in self.vertices],
            "incidences": [list(x) for x in self.incidences()],
            "source": self.source.to_json() if self.source else None,
        }

    @classmethod
    def from_json(cls, data):
        try:
            edges = tuple(PEdge(e["id"], tuple(e["cells"]), e["ends"][0], e["ends"][1]) for e in data["edges"])
            verts = tuple(PVertex(v["id"], v["kind"], v.get("level", 0)) for v in data["vertices"])
            src = data.get("source")
            return cls(tuple(data["cells"]), edges, verts, PathSource.from_json(src) if src else None)
        except (KeyError, TypeError, IndexError) as e:
            raise InvalidComplex(f"malformed complex: {e}") from None

    def to_dot(self, name="pcomplex"):
        lines = [f"graph {name} {{", '  "d" [label="boundary", shape=plaintext];']
        for v in self.vertices:
            lines.append(f'  "{v.id}" [label="{v.id} {v.kind}"];')
        for e in self.edges:
            a = e.below if e.below is not None else "d"
            b = e.above if e.above is not None else "d"
            lines.append(f'  "{a}" -- "{b}" [label="{e.id}: {" ".join(e.cells)}"];')
        lines.append("}")
        return "\n".join(lines)


def pcomplex_from_blocks(bd):
    """One type-III vertex per block, one index-3 edge per pants."""
    below, above = {}, {}
    for pi, bi, side in bd.adjacency:
        if side == "top":
            below[pi] = f"B{bi}"
        else:
            above[pi] = f"B{bi}"
    edges = tuple(PEdge(f"E{i}", tuple(p), below.get(i), above.get(i)) for i, p in enumerate(bd.pants))
    verts = tuple(PVertex(f"B{i}", "IIIS" if b.kind == KIND_S11 else "IIIA", b.bottom_level)
                  for i, b in enumerate(bd.blocks))
    return PComplex(tuple(bd.link), edges, verts, bd.source)


def _block_loops(bottom, top):
    bot = Counter(c for p in bottom for c in p)
    tp = Counter(c for p in top for c in p)
    inter = bot & tp
    return list(inter.elements()) + sorted(set((bot - inter).elements())) + sorted(set((tp - inter).elements()))


def blocks_from_pcomplex(pc):
    """One block per vertex, one pants per edge, one link component per cell."""
    index = {v.id: i for i, v in enumerate(pc.vertices)}
    adjacency = []
    for pi, e in enumerate(pc.edges):
        if e.below is not None:
            adjacency.append((pi, index[e.below], "top"))
        if e.above is not None:
            adjacency.append((pi, index[e.above], "bottom"))
    blocks = []
    for bi, v in enumerate(pc.vertices):
        bottom = [pc.edges[pi].cells for pi, b, s in adjacency if b == bi and s == "bottom"]
        top = [pc.edges[pi].cells for pi, b, s in adjacency if b == bi and s == "top"]
        kind = KIND_S11 if v.kind == "IIIS" else KIND_S04
        try:
            blocks.append(PantsBlock(kind, v.level, v.level + 1, _block_loops(bottom, top)))
        except InvalidDecomposition as err:
            raise InvalidComplex(str(err)) from None
    try:
        return BlockDecomposition(tuple(pc.cells), tuple(tuple(sorted(e.cells)) for e in pc.edges),
                                  tuple(blocks), tuple(sorted(adjacency)), pc.source)
    except InvalidDecomposition as err:
        raise InvalidComplex(str(err)) from None


BOUNDARY = "d"


def cell_graph(pc, cell):
    """Multigraph of the cell: an arc for each time an edge runs along it."""
    g = nx.MultiGraph()
    for e in pc.edges:
        for c in e.cells:
            if c == cell:
                a = e.below if e.below is not None else BOUNDARY
                b = e.above if e.above is not None else BOUNDARY
                g.add_edge(a, b, key=(e.id, len(g.edges)))
    return g


def cell_is_disk(pc, cell):
    g = cell_graph(pc, cell)
    if g.number_of_edges() == 0:
        return False
    return nx.is_connected(g) and all(d % 2 == 0 for _, d in g.degree())


def validate_disk_cells(pc):
    """True iff every 2-cell closes up into a single disk."""
    return all(cell_is_disk(pc, c) for c in pc.cells)


def apply_pmove_pcomplex(pc, rule, location, forward=True):
    bd = blocks_from_pcomplex(pc)
    return pcomplex_from_blocks(apply_pmove_blocks(bd, rule, location, forward))


def _pc_graph(pc):
    g = nx.MultiGraph()
    for v in pc.vertices:
        g.add_node(("v", v.id), tag=v.kind)
    g.add_node(("d",), tag="boundary")
    for c in pc.cells:
        g.add_node(("c", c), tag="cell")
    for e in pc.edges:
        g.add_node(("e", e.id), tag="edge")
        g.add_edge(("e", e.id), ("v", e.below) if e.below is not None else ("d",), tag="below")
        g.add_edge(("e", e.id), ("v", e.above) if e.above is not None else ("d",), tag="above")
        for c in e.cells:
            g.add_edge(("e", e.id), ("c", c), tag="cell")
    return g


def pcomplex_isomorphic(a, b):
    if a == b:
        return True
    ga, gb = _pc_graph(a), _pc_graph(b)
    if ga.number_of_nodes() != gb.number_of_nodes() or ga.number_of_edges() != gb.number_of_edges():
        return False
    return nx.is_isomorphic(
        ga, gb, node_match=lambda x, y: x["tag"] == y["tag"],
        edge_match=lambda x, y: Counter(d["tag"] for d in x.values()) == Counter(d["tag"] for d in y.values()))
