import pytest
from hypothesis import given, settings, strategies as st

from helpers import SUPPORTS, bd_from_walk, random_walk, two_support_ambient
from pantsblocks.block_builder import (
    KIND_S04, KIND_S11, BlockDecomposition, NotABijection, NotAdjacent, NotAPath, PantsBlock,
    InvalidDecomposition, apply_pmove_blocks, build_annuli, build_from_moves, find_maximum_annuli,
    glue_monodromy, inverse_location, is_invertible_pair, is_isomorphic, pmove_sites,
    reassemble, split_at_maximum_annuli,
)
from pantsblocks.core_model import S04, Slope, SupportId
from pantsblocks.move_calculus import NoMatch
from pantsblocks.surface_states import (
    AmbientDecomposition, HexagonState, PentagonState, SlopeState, SupportSlot, single_support,
)

SL = lambda p, q: SlopeState(Slope(p, q))
P = PentagonState
H = HexagonState


def genus_two_ambient(state=SL(0, 1)):
    """A four-holed sphere with its cuffs glued in pairs: a closed genus-2 surface."""
    f = SupportId("F", S04)
    return AmbientDecomposition(frozenset({"u", "v"}), (SupportSlot(f, ("u", "u", "v", "v"), state),))


def path_of(amb, moves):
    out = [amb]
    for sid, s in moves:
        out.append(out[-1].move_to(sid, s))
    return out


def test_annuli_of_one_a_move_in_genus_two():
    path = path_of(genus_two_ambient(), [("F", SL(1, 0))])
    x = build_annuli(path)
    full = sorted(t.label for t in x.tracks if t.spans(1))
    assert full == ["u", "v"]
    assert find_maximum_annuli(x) == ["u", "v"]
    moving = sorted((t.label, t.start, t.end) for t in x.tracks if not t.spans(1))
    assert moving == [("F:0/1", 0, 0), ("F:inf", 1, 1)]


def test_annuli_of_constant_and_single_paths():
    amb = single_support(SUPPORTS["P"], P(0))
    x = build_annuli([amb] * 4)
    assert all(t.start == 0 and t.end == 3 for t in x.tracks)
    one = build_annuli([amb])
    assert one.levels == 0 and all(t.start == t.end == 0 for t in one.tracks)


def test_annuli_reject_non_paths():
    amb = single_support(SUPPORTS["P"], P(0))
    with pytest.raises(NotAPath):
        build_annuli([amb, amb.with_state("P", P(2))])
    with pytest.raises(NotAPath):
        build_annuli([])


def test_tracks_split_when_a_curve_comes_back():
    amb = single_support(SUPPORTS["T"], SL(0, 1))
    x = build_annuli(path_of(amb, [("T", SL(1, 0)), ("T", SL(0, 1))]))
    names = sorted(t.name for t in x.tracks if t.label == "T:0/1")
    assert names == ["T:0/1#1", "T:0/1#2"]


def test_maximum_annuli():
    amb = single_support(SUPPORTS["P"], P(0))
    none = build_annuli(path_of(amb, [("P", P(1)), ("P", P(2))]))
    assert find_maximum_annuli(none) == []
    one = build_annuli(path_of(amb, [("P", P(1))]))
    assert find_maximum_annuli(one) == ["P:p2"]
    constant = build_annuli([amb, amb])
    assert sorted(find_maximum_annuli(constant)) == ["P:p0", "P:p2"]


def test_split_along_one_persisting_curve():
    amb = single_support(SUPPORTS["P"], P(0))
    path = path_of(amb, [("P", P(1))])
    pieces = split_at_maximum_annuli(path)
    assert len(pieces) == 2
    assert reassemble(pieces) == [tuple(sorted(a.pants())) for a in path]


def test_split_without_maximum_annulus():
    amb = single_support(SUPPORTS["P"], P(0))
    path = path_of(amb, [("P", P(1)), ("P", P(2))])
    assert len(split_at_maximum_annuli(path)) == 1


def test_split_constant_path_into_pants():
    amb = single_support(SUPPORTS["H"], H(1))
    pieces = split_at_maximum_annuli([amb, amb, amb])
    assert len(pieces) == 2
    assert all(len(lv) == 1 for p in pieces for lv in p.levels)


def test_collapse_single_moves():
    bd = bd_from_walk(SUPPORTS["F"], [SL(0, 1), SL(1, 0)])
    assert [b.kind for b in bd.blocks] == [KIND_S04] and len(bd.blocks[0].loops) == 6
    bd = bd_from_walk(SUPPORTS["T"], [SL(0, 1), SL(1, 0)])
    assert [b.kind for b in bd.blocks] == [KIND_S11] and len(bd.blocks[0].loops) == 3


def test_collapse_pentagon_cycle_gives_five_blocks():
    bd = bd_from_walk(SUPPORTS["P"], [P(0), P(1), P(2), P(3), P(4), P(0)])
    assert len(bd.blocks) == 5 and set(bd.kinds()) == {KIND_S04}


def test_empty_word_gives_a_product():
    bd = bd_from_walk(SUPPORTS["P"], [P(0)])
    assert bd.blocks == () and len(bd.pants) == 3


def test_hexagon_blocks_have_the_letter_kinds():
    walk = [H(k) for k in range(7)]
    bd = bd_from_walk(SUPPORTS["H"], walk)
    assert [b.kind for b in bd.blocks] == [KIND_S04, KIND_S04, KIND_S11, KIND_S04, KIND_S04, KIND_S11]


def test_block_loop_counts_enforced():
    with pytest.raises(InvalidDecomposition):
        PantsBlock(KIND_S11, 0, 1, ["a", "b"])


def test_decomposition_validation():
    with pytest.raises(InvalidDecomposition):
        BlockDecomposition(("a", "b"), (("a", "b", "c"),), (), ())


def test_invertible_pairs():
    bd = bd_from_walk(SUPPORTS["T"], [SL(0, 1), SL(1, 0), SL(0, 1)])
    assert is_invertible_pair(0, 1, bd)
    bd = bd_from_walk(SUPPORTS["P"], [P(0), P(1), P(2)])
    assert not is_invertible_pair(0, 1, bd)
    amb, x, y = two_support_ambient(SL(0, 1), SL(0, 1))
    bd = build_from_moves(amb, [("X", SL(1, 0)), ("Y", SL(1, 0))])
    with pytest.raises(NotAdjacent):
        is_invertible_pair(0, 1, bd)


def test_delete_invertible_pair():
    walk = [SL(0, 1), SL(1, 1), SL(1, 0), SL(1, 1), SL(2, 1)]
    bd = bd_from_walk(SUPPORTS["T"], walk)
    out = apply_pmove_blocks(bd, "cancelling s", {"support": "T", "index": 1, "via": []})
    assert len(out.blocks) == len(bd.blocks) - 2
    assert out.source.walks()["T"] == [SL(0, 1), SL(1, 1), SL(2, 1)]


def test_pentagon_three_blocks_to_two():
    bd = bd_from_walk(SUPPORTS["P"], [P(0), P(1), P(2), P(3)])
    out = apply_pmove_blocks(bd, "pentagon 2-3", {"support": "P", "index": 0, "via": ["pent:4"]}, False)
    assert len(bd.blocks) == 3 and len(out.blocks) == 2
    assert is_isomorphic(out, bd_from_walk(SUPPORTS["P"], [P(0), P(4), P(3)]))


def test_hexagon_three_blocks_to_three():
    bd = bd_from_walk(SUPPORTS["H"], [H(1), H(0), H(5), H(4)])
    out = apply_pmove_blocks(bd, "hexagon 3-3 (ii)", {"support": "H", "index": 0,
                                                       "via": ["hex:2", "hex:3"]})
    assert sorted(b.kind for b in out.blocks) == sorted(b.kind for b in bd.blocks)
    assert set(out.link) != set(bd.link)


def test_pmove_rejects_wrong_locations():
    bd = bd_from_walk(SUPPORTS["P"], [P(0), P(1), P(2)])
    with pytest.raises(NoMatch):
        apply_pmove_blocks(bd, "pentagon 2-3", {"support": "P", "index": 0, "via": ["pent:4"]})
    with pytest.raises(NoMatch):
        apply_pmove_blocks(bd, "cancelling a", {"support": "Q", "index": 0, "via": []})
    with pytest.raises(NoMatch):
        apply_pmove_blocks(bd, "S-triangle 1-2", {"support": "P", "index": 0, "via": ["pent:1"]})


def test_pmove_leaves_other_supports_alone():
    amb, x, y = two_support_ambient(SL(0, 1), SL(0, 1))
    bd = build_from_moves(amb, [("X", SL(1, 0)), ("Y", SL(1, 1)), ("X", SL(1, 1))])
    sites = list(pmove_sites(bd))
    assert sites
    for rule, loc, fwd in sites[:20]:
        out = apply_pmove_blocks(bd, rule, loc, fwd)
        other = "Y" if loc["support"] == "X" else "X"
        assert out.source.walks()[other] == bd.source.walks()[other]


BLOCK_DELTA = {"cancelling": 2, "triangle": 1, "pentagon": 1, "hexagon": 0}


@settings(max_examples=40)
@given(st.sampled_from("TFPH"), st.integers(1, 4), st.integers(0, 10 ** 6))
def test_pmove_forward_backward_and_block_delta(name, length, seed):
    import random
    r = random.Random(seed)
    sup = SUPPORTS[name]
    bd = bd_from_walk(sup, random_walk(sup, length, r, bound=2))
    sites = list(pmove_sites(bd))
    assert sites
    rule, loc, fwd = r.choice(sites)
    out = apply_pmove_blocks(bd, rule, loc, fwd)
    grow = len(rule.rhs if fwd else rule.lhs) - len(rule.lhs if fwd else rule.rhs)
    assert len(out.blocks) - len(bd.blocks) == grow
    assert abs(grow) == BLOCK_DELTA[rule.family]
    back = apply_pmove_blocks(out, rule, inverse_location(bd, rule, loc, fwd), not fwd)
    assert is_isomorphic(back, bd)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_disjoint_moves_commute(seed):
    import random
    r = random.Random(seed)
    amb, x, y = two_support_ambient(SL(0, 1), SL(1, 1))
    a = r.choice([SL(1, 0), SL(1, 2), SL(-1, 1)])
    s = r.choice([SL(0, 1), SL(1, 0), SL(2, 1)])
    assert is_isomorphic(build_from_moves(amb, [("X", a), ("Y", s)]),
                         build_from_moves(amb, [("Y", s), ("X", a)]))


def test_isomorphism_detects_different_decompositions():
    a = bd_from_walk(SUPPORTS["P"], [P(0), P(1), P(2)])
    b = bd_from_walk(SUPPORTS["P"], [P(0), P(1)])
    assert not is_isomorphic(a, b)


def test_json_round_trip_and_fingerprint():
    bd = bd_from_walk(SUPPORTS["H"], [H(0), H(1), H(2), H(3)])
    data = bd.to_json()
    assert list(data)[:4] == ["link", "pants", "blocks", "adjacency"]
    back = BlockDecomposition.from_json(data)
    assert back.fingerprint() == bd.fingerprint()
    assert is_isomorphic(back, bd)


def _returning_genus_two():
    amb = genus_two_ambient()
    return build_from_moves(amb, [("F", SL(1, 0)), ("F", SL(0, 1))])


def test_glue_identity_monodromy():
    bd = _returning_genus_two()
    phi = {"F:0/1#2": "F:0/1#1", "u": "u", "v": "v"}
    out = glue_monodromy(bd, phi)
    assert len(out.blocks) == len(bd.blocks)
    assert len(out.pants) == len(bd.pants) - 2
    assert len(out.link) == len(bd.link) - 1


def test_glue_permuting_monodromy():
    bd = _returning_genus_two()
    same = glue_monodromy(bd, {"F:0/1#2": "F:0/1#1", "u": "u", "v": "v"})
    swap = glue_monodromy(bd, {"F:0/1#2": "F:0/1#1", "u": "v", "v": "u"})
    assert len(swap.blocks) == len(same.blocks)
    assert len(swap.link) == len(same.link) - 1


def test_glue_rejects_non_bijections():
    bd = _returning_genus_two()
    with pytest.raises(NotABijection):
        glue_monodromy(bd, {"F:0/1#2": "u", "u": "F:0/1#1", "v": "v"})
    with pytest.raises(NotABijection):
        glue_monodromy(bd, {"u": "u"})
