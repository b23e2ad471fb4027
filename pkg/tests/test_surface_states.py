import pytest
from hypothesis import given, strategies as st

from pantsblocks.core_model import S04, S05, S11, S12, Slope, SupportId, farey_neighbors, farey_slopes
from pantsblocks.move_calculus import MoveLetter, MoveWord, free_reduce, invert_word, parse_word, rule_by_name
from pantsblocks.surface_states import (
    AmbientDecomposition, HexagonState, IllegalMove, PentagonState, SlopeState, SupportSlot,
    apply_letter, default_cuffs, edge_kind, endpoints_preserved, make_move, parse_state,
    run_word, single_support, states_of, walk_states,
)

T = SupportId("t", S11)
F = SupportId("f", S04)
P = SupportId("p", S05)
H = SupportId("h", S12)


def test_slope_s_move():
    m = make_move(SlopeState(Slope(0, 1)), SlopeState(Slope(1, 0)), T)
    assert apply_letter(SlopeState(Slope(0, 1)), m) == SlopeState(Slope(1, 0))


def test_slope_move_needs_determinant_one():
    bad = MoveLetter("S", 1, False, T, None, SlopeState(Slope(2, 1)))
    with pytest.raises(IllegalMove):
        apply_letter(SlopeState(Slope(0, 1)), bad)
    with pytest.raises(IllegalMove):
        make_move(SlopeState(Slope(0, 1)), SlopeState(Slope(2, 1)), T)


def test_pentagon_forward_step():
    assert apply_letter(PentagonState(3), MoveLetter("A", 1, False, P)) == PentagonState(4)
    assert apply_letter(PentagonState(0), MoveLetter("A", 1, True, P)) == PentagonState(4)


def test_hexagon_rejects_s_on_a_edge():
    with pytest.raises(IllegalMove):
        apply_letter(HexagonState(0), MoveLetter("S", 1, False, H))
    assert apply_letter(HexagonState(2), MoveLetter("S", 1, False, H)) == HexagonState(3)


def test_support_kind_checked():
    with pytest.raises(IllegalMove):
        apply_letter(PentagonState(0), MoveLetter("A", 1, False, F))


def test_run_word_cycles():
    assert run_word(PentagonState(2), parse_word("a1 a2 a3 a4 a5 @p", {"p": P})) == PentagonState(2)
    hexagon = parse_word("a1 a2 s1 a3 a4 s2 @h", {"h": H})
    assert run_word(HexagonState(0), hexagon) == HexagonState(0)
    assert run_word(HexagonState(4), MoveWord()) == HexagonState(4)


def test_run_word_reports_failing_index():
    with pytest.raises(IllegalMove) as e:
        run_word(HexagonState(0), parse_word("a1 a2 a3 @h", {"h": H}))
    assert e.value.index == 2


def test_endpoints_preserved():
    r = rule_by_name("pentagon 2-3")
    for st_ in states_of(S05):
        assert endpoints_preserved(r.lhs, r.rhs, st_)
    x = parse_word("a1 a2 a2' a1' a3 @p", {"p": P})
    assert endpoints_preserved(x, free_reduce(x), PentagonState(0))
    two = parse_word("a1 a2 @p", {"p": P})
    three = parse_word("a1 a2 a3 @p", {"p": P})
    assert not endpoints_preserved(two, three, PentagonState(0))


@given(st.integers(0, 5), st.lists(st.booleans(), max_size=12))
def test_word_and_inverse_return_to_start(k, flips):
    state = HexagonState(k)
    letters = []
    for f in flips:
        nxt = HexagonState(state.index + (1 if f else -1))
        letters.append(make_move(state, nxt, H))
        state = nxt
    w = MoveWord(letters)
    assert run_word(HexagonState(k), w + invert_word(w)) == HexagonState(k)


@given(st.sampled_from(farey_slopes(6)), st.data())
def test_letter_then_inverse_is_identity(x, data):
    y = data.draw(st.sampled_from(farey_neighbors(x, 6)))
    for sup in (T, F):
        m = make_move(SlopeState(x), SlopeState(y), sup)
        assert apply_letter(apply_letter(SlopeState(x), m), m.inverse()) == SlopeState(x)


def test_hexagon_edge_kinds():
    kinds = [edge_kind(HexagonState(k), HexagonState(k + 1)) for k in range(6)]
    assert kinds == ["A", "A", "S", "A", "A", "S"]
    assert edge_kind(PentagonState(0), PentagonState(2)) is None


def test_state_literals():
    assert parse_state("slope:inf") == SlopeState(Slope(1, 0))
    assert parse_state("pent:7") == PentagonState(2)
    assert str(HexagonState(9)) == "hex:3"
    with pytest.raises(ValueError):
        parse_state("torus:1")


def test_walk_states():
    assert walk_states(PentagonState(0), parse_word("a1 a2 @p", {"p": P})) == \
        [PentagonState(0), PentagonState(1), PentagonState(2)]


def test_supports_have_the_census_pants():
    from pantsblocks.core_model import decomposition_census
    for sup, states in ((T, [SlopeState(Slope(0, 1))]), (F, [SlopeState(s) for s in farey_slopes(2)]),
                        (P, states_of(S05)), (H, states_of(S12))):
        for st_ in states:
            slot = SupportSlot(sup, default_cuffs(sup), st_)
            curves, pants = decomposition_census(sup.kind)
            assert len(slot.pants()) == pants
            assert len(set(slot.curves())) == curves


def test_ambient_rejects_disjoint_supports_sharing_curves():
    with pytest.raises(ValueError):
        AmbientDecomposition(frozenset({"c"}), (SupportSlot(T, ("c",), SlopeState(Slope(0, 1))),
                                                SupportSlot(SupportId("u", S11), ("c",), SlopeState(Slope(0, 1)))),
                             frozenset({frozenset(("t", "u"))}))


def test_ambient_json_round_trip():
    amb = single_support(P, PentagonState(3))
    back = AmbientDecomposition.from_json(amb.to_json())
    assert back == amb
    assert amb.move_to("p", PentagonState(4)).slot("p").state == PentagonState(4)
