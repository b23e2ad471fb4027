"""Concrete pants decompositions of the four support surfaces.

S(1,1) and S(0,4) states are slopes.  S(0,5) has five decompositions in a
cycle, S(1,2) six; on those two surfaces a state is just a cyclic index.

Pentagon: cuffs b0..b4, curve P_i encloses b_i and b_{i+1}.  State k uses
the curves P_{2k} and P_{2k+2}, so every step forward trades one curve.

Hexagon: cuffs b1, b2 and curves h0..h5, state k uses h_k and h_{k+1}.  h0
and h3 are separating.  Edge k joins state k to state k+1; the edges read
a1 a2 s1 a3 a4 s2 starting from state 0, so the two S-edges (2 and 5) sit
opposite each other.  State 0 is the decomposition where s2 ends and a1
starts.
"""

import re
from dataclasses import dataclass

from .core_model import (S04, S05, S11, S12, PantsError, Slope, SupportId,
                         is_elementary_move, slope_intersection)
from .move_calculus import MoveLetter, MoveWord


class IllegalMove(PantsError):
    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"letter {index}: {message}")
        self.index = index


@dataclass(frozen=True, order=True)
class SlopeState:
    slope: Slope

    def __str__(self):
        return f"slope:{self.slope}"


@dataclass(frozen=True, order=True)
class PentagonState:
    index: int

    def __post_init__(self):
        object.__setattr__(self, "index", self.index % 5)

    def __str__(self):
        return f"pent:{self.index}"


@dataclass(frozen=True, order=True)
class HexagonState:
    index: int

    def __post_init__(self):
        object.__setattr__(self, "index", self.index % 6)

    def __str__(self):
        return f"hex:{self.index}"


HEX_EDGE_KINDS = ("A", "A", "S", "A", "A", "S")
HEX_EDGE_NAMES = ("a1", "a2", "s1", "a3", "a4", "s2")
HEX_SEPARATING = (0, 3)


def parse_state(text):
    m = re.fullmatch(r"\s*(slope|pent|hex):(\S+)\s*", text)
    if not m:
        raise ValueError(f"bad state literal {text!r}")
    tag, val = m.groups()
    if tag == "slope":
        return SlopeState(Slope.parse(val))
    k = int(val)
    return PentagonState(k) if tag == "pent" else HexagonState(k)


def state_kind(state):
    """The support kinds a state can live on."""
    if isinstance(state, SlopeState):
        return (S11, S04)
    if isinstance(state, PentagonState):
        return (S05,)
    if isinstance(state, HexagonState):
        return (S12,)
    raise TypeError(state)


def _cyclic_size(state):
    return 5 if isinstance(state, PentagonState) else 6


def edge_kind(a, b, support=None):
    """Letter kind of the move a -> b, or None if a and b are not adjacent."""
    if isinstance(a, SlopeState) and isinstance(b, SlopeState):
        if abs(a.slope.determinant(b.slope)) != 1:
            return None
        if support is None:
            return None
        return "S" if support.kind == S11 else "A"
    if type(a) is not type(b):
        return None
    n = _cyclic_size(a)
    if (a.index + 1) % n == b.index:
        k = a.index
    elif (b.index + 1) % n == a.index:
        k = b.index
    else:
        return None
    return "A" if n == 5 else HEX_EDGE_KINDS[k]


def canonical_orientation(a, b):
    """(source, target, inverted) with the edge stored in a fixed direction."""
    if isinstance(a, SlopeState):
        return (a, b, False) if a < b else (b, a, True)
    n = _cyclic_size(a)
    if (a.index + 1) % n == b.index:
        return a, b, False
    return b, a, True


def make_move(a, b, support=None, label=1):
    """The concrete letter taking state a to state b."""
    kind = edge_kind(a, b, support)
    if kind is None:
        raise IllegalMove(f"{a} and {b} are not joined by an elementary move")
    src, tgt, inv = canonical_orientation(a, b)
    return MoveLetter(kind, label, inv, support, src, tgt)


def _check_support(state, m):
    if m.support is not None and m.support.kind not in state_kind(state):
        raise IllegalMove(f"{m} has a {m.support.kind} support but acts on {state}")


def apply_letter(state, m):
    _check_support(state, m)
    if isinstance(state, SlopeState):
        if m.target is None:
            raise IllegalMove(f"{m} carries no target slope")
        if m.source is None:
            new = m.target
        else:
            if m.start_state() != state:
                raise IllegalMove(f"{m} starts at {m.start_state()}, not {state}")
            new = m.end_state()
        if not isinstance(new, SlopeState):
            raise IllegalMove(f"{m} does not move between slopes")
        surf = m.support.kind if m.support is not None else (S11 if m.kind == "S" else S04)
        if (m.kind == "S") != (surf == S11):
            raise IllegalMove(f"{m.kind} letter on {surf}")
        if not is_elementary_move(surf, state.slope, new.slope):
            raise IllegalMove(f"{state} -> {new} meets {slope_intersection(surf, state.slope, new.slope)} times")
        return new
    if m.source is not None:
        if m.start_state() != state:
            raise IllegalMove(f"{m} starts at {m.start_state()}, not {state}")
        new = m.end_state()
        if type(new) is not type(state):
            raise IllegalMove(f"{m} leaves the state set of {state}")
    else:
        new = type(state)(state.index + (-1 if m.inverted else 1))
    kind = edge_kind(state, new)
    if kind is None:
        raise IllegalMove(f"{state} -> {new} is not an edge")
    if kind != m.kind:
        raise IllegalMove(f"{m.kind} letter on the {kind}-edge between {state} and {new}")
    return new


def run_word(start, w):
    state = start
    for i, m in enumerate(w):
        try:
            state = apply_letter(state, m)
        except IllegalMove as e:
            raise IllegalMove(str(e), i) from None
    return state


def walk_states(start, w):
    """Every state visited by w, start included."""
    out = [start]
    for i, m in enumerate(w):
        try:
            out.append(apply_letter(out[-1], m))
        except IllegalMove as e:
            raise IllegalMove(str(e), i) from None
    return out


def endpoints_preserved(w1, w2, start):
    return run_word(start, w1) == run_word(start, w2)


def states_of(kind):
    """All cyclic states of S(0,5) or S(1,2)."""
    if kind == S05:
        return [PentagonState(k) for k in range(5)]
    if kind == S12:
        return [HexagonState(k) for k in range(6)]
    raise ValueError(f"{kind} has infinitely many states")


def mirror_word(w):
    """Flip every inversion flag; reflects a cyclic support."""
    return MoveWord(MoveLetter(x.kind, x.label, not x.inverted, x.support) for x in w)


# curves and pants inside a support

def interior_curves(sid, state):
    if isinstance(state, SlopeState):
        return (f"{sid}:{state.slope}",)
    if isinstance(state, PentagonState):
        k = state.index
        return tuple(sorted((f"{sid}:p{(2 * k) % 5}", f"{sid}:p{(2 * k + 2) % 5}")))
    k = state.index
    return (f"{sid}:h{k}", f"{sid}:h{(k + 1) % 6}")


def _triple(*xs):
    return tuple(sorted(xs))


def support_pants(support, cuffs, state):
    """Pants of the support in the given state, as sorted label triples."""
    sid = support.id
    kind = support.kind
    if len(cuffs) != kind.boundaries:
        raise ValueError(f"{support} needs {kind.boundaries} cuffs, got {len(cuffs)}")
    if kind == S11:
        (x,) = interior_curves(sid, state)
        return [_triple(x, x, cuffs[0])]
    if kind == S04:
        (x,) = interior_curves(sid, state)
        b = cuffs
        pairing = {(0, 1): ((0, 1), (2, 3)), (1, 0): ((0, 3), (1, 2)), (1, 1): ((0, 2), (1, 3))}
        (i, j), (k, l) = pairing[state.slope.parity()]
        return sorted([_triple(x, b[i], b[j]), _triple(x, b[k], b[l])])
    if kind == S05:
        i = (2 * state.index) % 5
        b = cuffs
        p = lambda j: f"{sid}:p{j % 5}"
        return sorted([_triple(p(i), b[i], b[(i + 1) % 5]),
                       _triple(p(i + 2), b[(i + 2) % 5], b[(i + 3) % 5]),
                       _triple(p(i), p(i + 2), b[(i + 4) % 5])])
    k = state.index
    h = lambda j: f"{sid}:h{j % 6}"
    b1, b2 = cuffs
    pair = (k, (k + 1) % 6)
    sep = [j for j in pair if j in HEX_SEPARATING]
    if sep:
        z = sep[0]
        w = pair[1] if z == pair[0] else pair[0]
        return sorted([_triple(h(z), b1, b2), _triple(h(w), h(w), h(z))])
    x, y = h(pair[0]), h(pair[1])
    return sorted([_triple(x, y, b1), _triple(x, y, b2)])


@dataclass(frozen=True)
class SupportSlot:
    support: SupportId
    cuffs: tuple
    state: object

    def __post_init__(self):
        object.__setattr__(self, "cuffs", tuple(self.cuffs))
        if self.support.kind not in state_kind(self.state):
            raise ValueError(f"state {self.state} cannot live on {self.support}")
        if len(self.cuffs) != self.support.kind.boundaries:
            raise ValueError(f"{self.support} needs {self.support.kind.boundaries} cuffs")

    def curves(self):
        return interior_curves(self.support.id, self.state)

    def pants(self):
        return support_pants(self.support, self.cuffs, self.state)

    def with_state(self, state):
        return SupportSlot(self.support, self.cuffs, state)


@dataclass(frozen=True)
class AmbientDecomposition:
    """A pants decomposition made of active supports and a fixed remainder.

    ``shared_curves`` are the curves outside every support (support cuffs
    included), ``outer_pants`` the pants outside every support and
    ``disjointness`` the declared-disjoint support pairs.
    """
    shared_curves: frozenset
    active_supports: tuple
    disjointness: frozenset = frozenset()
    outer_pants: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "shared_curves", frozenset(self.shared_curves))
        object.__setattr__(self, "active_supports", tuple(self.active_supports))
        object.__setattr__(self, "disjointness",
                           frozenset(frozenset(p) for p in self.disjointness))
        object.__setattr__(self, "outer_pants", tuple(_triple(*p) for p in self.outer_pants))
        ids = [s.support.id for s in self.active_supports]
        if len(set(ids)) != len(ids):
            raise ValueError("support ids must be distinct")
        for pair in self.disjointness:
            if len(pair) != 2 or not pair <= set(ids):
                raise ValueError(f"disjointness names unknown supports {sorted(pair)}")
            a, b = (self.slot(i) for i in sorted(pair))
            if (set(a.cuffs) | set(a.curves())) & (set(b.cuffs) | set(b.curves())):
                raise ValueError(f"supports {a.support.id} and {b.support.id} are declared disjoint but share curves")
        for s in self.active_supports:
            missing = set(s.cuffs) - self.shared_curves
            if missing:
                raise ValueError(f"cuffs {sorted(missing)} of {s.support.id} are not shared curves")

    def slot(self, sid):
        for s in self.active_supports:
            if s.support.id == sid:
                return s
        raise KeyError(sid)

    def supports(self):
        return [s.support for s in self.active_supports]

    def curves(self):
        out = set(self.shared_curves)
        for s in self.active_supports:
            out.update(s.curves())
        return out

    def pants(self):
        out = list(self.outer_pants)
        for s in self.active_supports:
            out.extend(s.pants())
        return tuple(sorted(out))

    def with_state(self, sid, state):
        slots = tuple(s.with_state(state) if s.support.id == sid else s
                      for s in self.active_supports)
        return AmbientDecomposition(self.shared_curves, slots, self.disjointness, self.outer_pants)

    def apply(self, m):
        if m.support is None:
            raise IllegalMove(f"{m} names no support")
        slot = self.slot(m.support.id)
        return self.with_state(m.support.id, apply_letter(slot.state, m))

    def move_to(self, sid, state):
        """Apply the elementary move on sid that ends at state."""
        slot = self.slot(sid)
        m = make_move(slot.state, state, slot.support)
        return self.apply(m)

    def to_json(self):
        return {
            "supports": [{"id": s.support.id,
                          "kind": f"{s.support.kind.genus},{s.support.kind.boundaries}",
                          "cuffs": list(s.cuffs), "state": str(s.state)}
                         for s in self.active_supports],
            "shared_curves": sorted(self.shared_curves),
            "outer_pants": [list(p) for p in self.outer_pants],
            "disjoint": sorted(sorted(p) for p in self.disjointness),
        }

    @classmethod
    def from_json(cls, data):
        slots = []
        for s in data["supports"]:
            sup = SupportId.parse(f"{s['id']}:{s['kind']}")
            cuffs = s.get("cuffs")
            if cuffs is None:
                cuffs = default_cuffs(sup)
            slots.append(SupportSlot(sup, cuffs, parse_state(s["state"])))
        shared = set(data.get("shared_curves", ()))
        for s in slots:
            shared.update(s.cuffs)
        return cls(frozenset(shared), tuple(slots),
                   frozenset(frozenset(p) for p in data.get("disjoint", ())),
                   tuple(tuple(p) for p in data.get("outer_pants", ())))


def default_cuffs(support):
    if support.kind == S12:
        return (f"{support.id}:b1", f"{support.id}:b2")
    if support.kind == S11:
        return (f"{support.id}:b",)
    return tuple(f"{support.id}:b{i}" for i in range(support.kind.boundaries))


def single_support(support, state, cuffs=None):
    """An ambient decomposition consisting of one support and nothing else."""
    cuffs = tuple(cuffs) if cuffs is not None else default_cuffs(support)
    return AmbientDecomposition(frozenset(cuffs), (SupportSlot(support, cuffs, state),))
