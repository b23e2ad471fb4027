"""Random paths and decompositions shared by the tests."""

import random

from pantsblocks.block_builder import build_from_moves, build_annuli, find_maximum_annuli
from pantsblocks.core_model import S04, S05, S11, S12, Slope, SupportId, farey_neighbors
from pantsblocks.surface_states import (
    AmbientDecomposition, HexagonState, PentagonState, SlopeState, SupportSlot, single_support,
)

SUPPORTS = {
    "T": SupportId("T", S11),
    "F": SupportId("F", S04),
    "P": SupportId("P", S05),
    "H": SupportId("H", S12),
}

START = {
    S11: SlopeState(Slope(0, 1)),
    S04: SlopeState(Slope(0, 1)),
    S05: PentagonState(0),
    S12: HexagonState(0),
}


def neighbors(state, bound=3):
    if isinstance(state, SlopeState):
        return [SlopeState(y) for y in farey_neighbors(state.slope, bound)]
    return [type(state)(state.index + 1), type(state)(state.index - 1)]


def random_walk(support, length, rng, start=None, bound=3):
    w = [start or START[support.kind]]
    for _ in range(length):
        w.append(rng.choice(neighbors(w[-1], bound)))
    return w


def moves_of(sid, walk):
    return [(sid, s) for s in walk[1:]]


def bd_from_walk(support, walk):
    amb = single_support(support, walk[0])
    return build_from_moves(amb, moves_of(support.id, walk))


def is_max_annulus_free(support, walk):
    amb = single_support(support, walk[0])
    path = [amb]
    for st in walk[1:]:
        path.append(path[-1].move_to(support.id, st))
    return not find_maximum_annuli(build_annuli(path))


def two_support_ambient(state_x, state_y, kx=S04, ky=S11):
    """Two supports declared disjoint inside one ambient decomposition."""
    x = SupportId("X", kx)
    y = SupportId("Y", ky)
    cx = tuple(f"X:b{i}" for i in range(kx.boundaries))
    cy = tuple(f"Y:b{i}" for i in range(ky.boundaries))
    amb = AmbientDecomposition(frozenset(cx + cy),
                               (SupportSlot(x, cx, state_x), SupportSlot(y, cy, state_y)),
                               frozenset({frozenset(("X", "Y"))}))
    return amb, x, y


def rng(seed=0):
    return random.Random(seed)
