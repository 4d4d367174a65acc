"""Team data model and team-forming operations."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptsem.errors import DegenerateTeamError, DomainError, InputError
from ptsem.team import (LocalDistribution, ProbabilisticTeam, compact,
                        default_structure, duplicate, extend, load_team,
                        marginal_weight, normalize, plain_union, restrict,
                        scaled_union, support, team_from_json, team_to_json)

F = Fraction


def fig1_team() -> ProbabilisticTeam:
    """Two rows (a,b,c) and (b,c,b), each of weight 1/2, over (x, y, z)."""
    return ProbabilisticTeam.make(
        ("x", "y", "z"),
        [(("a", "b", "c"), F(1, 2)), (("b", "c", "b"), F(1, 2))])


class TestMarginalWeight:
    def test_single_variable(self):
        assert marginal_weight(fig1_team(), ("x",), ("a",)) == F(1, 2)

    def test_pair(self):
        assert marginal_weight(fig1_team(), ("y", "z"), ("b", "c")) == F(1, 2)

    def test_empty_condition_matches_everything(self):
        team = fig1_team()
        assert marginal_weight(team, (), ()) == team.total_weight

    def test_no_match_is_zero(self):
        assert marginal_weight(fig1_team(), ("x",), ("c",)) == 0

    def test_unknown_variable(self):
        with pytest.raises(DomainError):
            marginal_weight(fig1_team(), ("w",), ("a",))

    def test_arity_mismatch(self):
        with pytest.raises(InputError):
            marginal_weight(fig1_team(), ("x", "y"), ("a",))


class TestRestrict:
    def test_single_column(self):
        restricted = restrict(fig1_team(), {"y"})
        assert restricted == ProbabilisticTeam.make(
            ("y",), [(("b",), F(1, 2)), (("c",), F(1, 2))])

    def test_full_domain_is_identity(self):
        team = fig1_team()
        assert restrict(team, set(team.domain)) == team

    def test_empty_keep_gives_total_weight_row(self):
        restricted = restrict(fig1_team(), set())
        assert restricted == ProbabilisticTeam.make((), [((), F(1))])

    def test_merges_rows(self):
        team = ProbabilisticTeam.make(
            ("x", "y"), [(("a", "b"), F(1, 3)), (("a", "c"), F(1, 6))])
        assert restrict(team, {"x"}) == ProbabilisticTeam.make(
            ("x",), [(("a",), F(1, 2))])

    def test_unknown_variable(self):
        with pytest.raises(DomainError):
            restrict(fig1_team(), {"nope"})


class TestUnions:
    def test_scaled_union_fixpoint(self):
        team = fig1_team()
        for k in (F(0), F(1, 3), F(1)):
            assert scaled_union(team, team, k) == team

    def test_scaled_union_k_one_is_left(self):
        # The union keeps the other side's rows at weight zero; they are
        # semantically inert and vanish under compaction.
        other = ProbabilisticTeam.make(("x", "y", "z"), [(("c", "c", "c"), F(1))])
        assert compact(scaled_union(fig1_team(), other, 1)) == fig1_team()

    def test_scaled_union_mixes(self):
        y = ProbabilisticTeam.make(("p",), [(("1",), F(1))])
        z = ProbabilisticTeam.make(("p",), [(("0",), F(1))])
        assert scaled_union(y, z, F(1, 3)) == ProbabilisticTeam.make(
            ("p",), [(("1",), F(1, 3)), (("0",), F(2, 3))])

    def test_scaled_union_bad_k(self):
        with pytest.raises(InputError):
            scaled_union(fig1_team(), fig1_team(), F(3, 2))

    def test_domain_mismatch(self):
        other = ProbabilisticTeam.make(("x", "y"), [(("a", "b"), F(1))])
        with pytest.raises(InputError):
            plain_union(fig1_team(), other)

    def test_plain_union_identity(self):
        empty = ProbabilisticTeam.make(("x", "y", "z"), [])
        assert plain_union(fig1_team(), empty) == fig1_team()

    def test_plain_union_doubles(self):
        doubled = plain_union(fig1_team(), fig1_team())
        assert doubled == ProbabilisticTeam.make(
            ("x", "y", "z"), [(("a", "b", "c"), F(1)), (("b", "c", "b"), F(1))])

    def test_plain_union_disjoint_rows_concatenate(self):
        y = ProbabilisticTeam.make(("p",), [(("0",), F(1, 4))])
        z = ProbabilisticTeam.make(("p",), [(("1",), F(3, 4))])
        assert plain_union(y, z) == ProbabilisticTeam.make(
            ("p",), [(("0",), F(1, 4)), (("1",), F(3, 4))])


class TestDuplicate:
    def test_single_row_binary_universe(self):
        team = ProbabilisticTeam.make(("p",), [(("0",), F(1))])
        result = duplicate(team, {"0", "1"}, "q")
        assert result == ProbabilisticTeam.make(
            ("p", "q"), [(("0", "0"), F(1, 2)), (("0", "1"), F(1, 2))])

    def test_singleton_universe_adds_constant_column(self):
        team = fig1_team()
        result = duplicate(team, {"u"}, "w")
        assert result.domain == ("x", "y", "z", "w")
        assert result.total_weight == team.total_weight
        assert all(a[-1] == "u" for a, _ in result.rows)
        assert sorted(w for _, w in result.rows) == sorted(w for _, w in team.rows)

    def test_fig1_three_values_gives_six_rows(self):
        result = duplicate(fig1_team(), {"a", "b", "c"}, "u")
        assert len(result.rows) == 6
        assert all(w == F(1, 6) for _, w in result.rows)
        assert result.total_weight == 1

    def test_requantifying_merges(self):
        # Redistributing x uniformly forgets its old value but keeps the
        # mass grouped by the remaining columns.
        team = ProbabilisticTeam.make(
            ("x", "y"), [(("0", "0"), F(1, 4)), (("1", "0"), F(3, 4))])
        result = duplicate(team, {"0", "1"}, "x")
        assert result == ProbabilisticTeam.make(
            ("y", "x"), [(("0", "0"), F(1, 2)), (("0", "1"), F(1, 2))])

    def test_empty_universe(self):
        with pytest.raises(InputError):
            duplicate(fig1_team(), set(), "u")


class TestExtend:
    def test_dirac_choice_carries_weights(self):
        team = fig1_team()
        choice = {a: LocalDistribution.dirac(a[0]) for a, _ in team.rows}
        result = extend(team, choice, "u")
        assert compact(result) == ProbabilisticTeam.make(
            ("x", "y", "z", "u"),
            [(("a", "b", "c", "a"), F(1, 2)), (("b", "c", "b", "b"), F(1, 2))])

    def test_uniform_choice_equals_duplicate(self):
        team = fig1_team()
        universe = ("a", "b", "c")
        choice = {a: LocalDistribution.uniform(universe) for a, _ in team.rows}
        assert extend(team, choice, "u") == duplicate(team, universe, "u")

    def test_hand_computed_mixture(self):
        # Defining sum, worked by hand: row (0) keeps all mass at u=0;
        # row (1) splits evenly, so the extension weighs 1/2, 1/4, 1/4.
        team = ProbabilisticTeam.make(("p",), [(("0",), F(1, 2)), (("1",), F(1, 2))])
        choice = {
            ("0",): LocalDistribution.dirac("0"),
            ("1",): LocalDistribution.make({"0": F(1, 2), "1": F(1, 2)}),
        }
        result = extend(team, choice, "u")
        assert compact(result) == ProbabilisticTeam.make(
            ("p", "u"),
            [(("0", "0"), F(1, 2)), (("1", "0"), F(1, 4)), (("1", "1"), F(1, 4))])

    def test_missing_row_rejected(self):
        team = fig1_team()
        choice = {team.rows[0][0]: LocalDistribution.dirac("a")}
        with pytest.raises(InputError):
            extend(team, choice, "u")


class TestNormalize:
    def test_already_normalized(self):
        assert normalize(fig1_team()) == fig1_team()

    def test_equal_weights(self):
        team = ProbabilisticTeam.make(("p",), [(("0",), F(1)), (("1",), F(1))])
        assert normalize(team) == ProbabilisticTeam.make(
            ("p",), [(("0",), F(1, 2)), (("1",), F(1, 2))])

    def test_exact_rational_scaling(self):
        team = ProbabilisticTeam.make(("p",), [(("0",), F(1, 3)), (("1",), F(1, 6))])
        assert normalize(team) == ProbabilisticTeam.make(
            ("p",), [(("0",), F(2, 3)), (("1",), F(1, 3))])

    def test_zero_total_weight(self):
        team = ProbabilisticTeam.make(("p",), [(("0",), F(0))])
        with pytest.raises(DegenerateTeamError):
            normalize(team)


class TestSupport:
    def test_fig1_both_rows(self):
        assert support(fig1_team()) == {("a", "b", "c"), ("b", "c", "b")}

    def test_zero_weight_row_excluded(self):
        team = ProbabilisticTeam.make(
            ("p",), [(("0",), F(0)), (("1",), F(1))])
        assert support(team) == {("1",)}

    def test_empty_team(self):
        assert support(ProbabilisticTeam.make(("p",), [])) == set()


class TestValidation:
    def test_duplicate_assignment_rejected(self):
        with pytest.raises(InputError):
            ProbabilisticTeam.make(("p",), [(("0",), F(1)), (("0",), F(1))])

    def test_negative_weight_rejected(self):
        with pytest.raises(InputError):
            ProbabilisticTeam.make(("p",), [(("0",), F(-1))])

    def test_float_weight_rejected(self):
        with pytest.raises(InputError):
            ProbabilisticTeam.make(("p",), [(("0",), 0.5)])

    def test_row_arity_must_match_domain(self):
        with pytest.raises(InputError):
            ProbabilisticTeam.make(("p", "q"), [(("0",), F(1))])

    def test_rows_canonically_sorted(self):
        team = ProbabilisticTeam.make(
            ("p",), [(("1",), F(1, 2)), (("0",), F(1, 2))])
        assert [a for a, _ in team.rows] == [("0",), ("1",)]


# -- algebraic laws over randomly generated teams ---------------------------

values = st.sampled_from(["a", "b", "c"])
weights = st.builds(Fraction, st.integers(0, 12), st.integers(1, 12))


@st.composite
def teams(draw, vars=("x", "y", "z")):
    n_rows = draw(st.integers(0, 4))
    assignments = draw(st.lists(
        st.tuples(*[values for _ in vars]), min_size=n_rows, max_size=n_rows,
        unique=True))
    return ProbabilisticTeam.make(
        vars, [(a, draw(weights)) for a in assignments])


@settings(max_examples=60, deadline=None)
@given(teams())
def test_restrict_preserves_total_weight(team):
    assert restrict(team, {"x", "z"}).total_weight == team.total_weight


@settings(max_examples=60, deadline=None)
@given(teams())
def test_duplicate_preserves_total_weight(team):
    assert duplicate(team, {"a", "b"}, "u").total_weight == team.total_weight


@settings(max_examples=60, deadline=None)
@given(teams(), teams())
def test_plain_union_adds_totals(y, z):
    assert plain_union(y, z).total_weight == y.total_weight + z.total_weight


@settings(max_examples=60, deadline=None)
@given(teams(), teams(), st.builds(Fraction, st.integers(0, 7), st.just(7)))
def test_scaled_union_total(y, z, k):
    expected = k * y.total_weight + (1 - k) * z.total_weight
    assert scaled_union(y, z, k).total_weight == expected


@settings(max_examples=60, deadline=None)
@given(teams())
def test_marginal_commutes_with_restrict(team):
    for vals in [("a", "b"), ("b", "b"), ("c", "a")]:
        direct = marginal_weight(team, ("x", "y"), vals)
        via_restrict = marginal_weight(restrict(team, {"x", "y"}), ("x", "y"), vals)
        assert direct == via_restrict


@settings(max_examples=60, deadline=None)
@given(teams())
def test_duplicate_is_uniform_extend(team):
    universe = ("a", "b", "c")
    choice = {a: LocalDistribution.uniform(universe) for a, _ in team.rows}
    assert extend(team, choice, "u") == duplicate(team, universe, "u")


# -- serialization -----------------------------------------------------------

def test_json_round_trip():
    team = fig1_team()
    assert team_from_json(team_to_json(team)) == team


def test_json_accepts_decimal_and_slash_weights(tmp_path):
    path = tmp_path / "team.json"
    path.write_text(
        '{"vars": ["x"], "rows": ['
        '{"values": ["a"], "weight": "0.25"},'
        '{"values": ["b"], "weight": "3/4"}]}',
        encoding="utf-8")
    team = load_team(str(path))
    assert team.weight_of(("a",)) == F(1, 4)
    assert team.weight_of(("b",)) == F(3, 4)


def test_default_structure_covers_tokens_and_zero():
    structure = default_structure(fig1_team())
    assert structure.universe == ("a", "b", "c")
    assert structure.constant("a") == "a"
    assert structure.constant("zero") == "a"
