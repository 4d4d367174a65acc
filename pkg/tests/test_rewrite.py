"""Inter-logic rewrite passes: shapes, freshness, and soundness."""

import random
from fractions import Fraction

import pytest

from ptsem.checker import check
from ptsem.errors import ConfigurationError, NoPathError
from ptsem.harness import random_team
from ptsem.rewrite import (FreshNameSource, TargetLogic, ci_to_marg_indep,
                           dep_to_ci, dep_to_equiv, equiv_to_identity_dep,
                           identity_to_equiv, identity_to_marg_indep, lower,
                           parse_target)
from ptsem.parser import parse_fo
from ptsem.syntax import (CondIndep, Dep, Exists, Forall, MarginalEquiv,
                          MarginalIdentity, Or, Var, free_vars, has_sugar,
                          node_count, subformulas, unparse)
from ptsem.team import BINARY_STRUCTURE, ProbabilisticTeam, Structure

V = Var
F = Fraction


def fresh_for(f):
    return FreshNameSource.for_formula(f)


def atom_kinds(f):
    return {type(g).__name__ for g in subformulas(f)
            if isinstance(g, (MarginalIdentity, MarginalEquiv, CondIndep, Dep))}


class TestDepToCi:
    def test_basic(self):
        assert dep_to_ci(parse_fo("dep(x ; y)")) == parse_fo("ci(x ; y ; y)")

    def test_constancy(self):
        assert dep_to_ci(parse_fo("const(x)")) == parse_fo("ci(; x ; x)")

    def test_tuple_determinants(self):
        assert dep_to_ci(parse_fo("dep(x, y ; z)")) == parse_fo("ci(x, y ; z ; z)")


class TestDepToEquiv:
    def test_single_dependent(self):
        assert dep_to_equiv(parse_fo("dep(x ; y)")) == parse_fo("(x, y) =~* (x)")

    def test_constancy_rejected(self):
        with pytest.raises(NoPathError):
            dep_to_equiv(parse_fo("const(y)"))

    def test_multi_dependent_chains(self):
        out = dep_to_equiv(parse_fo("dep(x ; y, z)"))
        assert out == parse_fo("(x, y) =~* (x) & (x, y, z) =~* (x, y)")

    def test_chain_matches_direct_semantics(self):
        # dep(x; y,z) and its chain agree on all supports over a binary
        # domain with up to three rows (dependence ignores weights).
        import itertools
        space = list(itertools.product("01", repeat=3))
        source = parse_fo("dep(x ; y, z)")
        chain = parse_fo("dep(x ; y) & dep(x, y ; z)")
        structure = Structure(("0", "1"))
        for size in range(4):
            for rows in itertools.combinations(space, size):
                team = ProbabilisticTeam.make(
                    ("x", "y", "z"), [(r, F(1)) for r in rows])
                assert (check(structure, team, source).value
                        == check(structure, team, chain).value)


class TestEquivToIdentityDep:
    def test_shape(self):
        out = equiv_to_identity_dep(parse_fo("(x) =~* (y)"), fresh_for(parse_fo("(x) =~* (y)")))
        assert isinstance(out, Exists)
        assert atom_kinds(out) == {"Dep", "MarginalIdentity"}
        assert free_vars(out) == {"x", "y"}

    def test_fresh_tuple_sized_by_left(self):
        atom = MarginalEquiv((V("x"), V("y")), (V("z"),))
        out = equiv_to_identity_dep(atom, fresh_for(atom))
        quantified = 0
        while isinstance(out, Exists):
            quantified += 1
            out = out.body
        assert quantified == 2


class TestIdentityToEquiv:
    def test_single_variable_shape(self):
        atom = MarginalIdentity((V("x"),), (V("y"),))
        out = identity_to_equiv(atom, fresh_for(atom))
        assert isinstance(out, Forall)
        body = out.body
        assert isinstance(body, Or)
        assert atom_kinds(out) == {"MarginalEquiv"}
        assert not has_sugar(out)
        assert free_vars(out) == {"x", "y"}

    def test_linear_size(self):
        # both directions of the identity/equivalence translation stay
        # within a fixed constant factor of the input
        for m in (1, 2, 3):
            left = tuple(V(f"x{i}") for i in range(m))
            right = tuple(V(f"y{i}") for i in range(m))
            atom = MarginalIdentity(left, right)
            out = identity_to_equiv(atom, fresh_for(atom))
            assert node_count(out) <= 30 * node_count(atom)
            atom2 = MarginalEquiv(left, right)
            out2 = equiv_to_identity_dep(atom2, fresh_for(atom2))
            assert node_count(out2) <= 10 * node_count(atom2)


class TestIdentityToMargIndep:
    def test_output_vocabulary(self):
        atom = MarginalIdentity((V("x"),), (V("y"),))
        out = identity_to_marg_indep(atom, fresh_for(atom))
        assert atom_kinds(out) == {"CondIndep"}
        for g in subformulas(out):
            if isinstance(g, CondIndep):
                assert g.cond == ()  # marginal independence only
        assert not has_sugar(out)
        assert free_vars(out) == {"x", "y"}


class TestCiToMargIndep:
    def test_tuple_sizes(self):
        atom = CondIndep((V("x"),), (V("y"),), (V("z"),))
        out = ci_to_marg_indep(atom, BINARY_STRUCTURE, fresh_for(atom))
        exists_chain = []
        node = out
        foralls = 0
        while isinstance(node, Forall):
            foralls += 1
            node = node.body
        while isinstance(node, Exists):
            exists_chain.append(node.var)
            node = node.body
        # 3 mirror variables, then 1 + 2 + 2 + 3 auxiliaries plus two flags
        assert foralls == 3
        assert len(exists_chain) == 1 + 2 + 2 + 3 + 2
        assert atom_kinds(out) <= {"CondIndep", "MarginalIdentity"}
        for g in subformulas(out):
            if isinstance(g, CondIndep):
                assert g.cond == ()
        assert free_vars(out) == {"x", "y", "z"}

    def test_requires_zero_constant(self):
        atom = CondIndep((), (V("x"),), (V("y"),))
        bare = Structure(("0", "1"))
        with pytest.raises(ConfigurationError):
            ci_to_marg_indep(atom, bare, fresh_for(atom))


class TestFreshNames:
    def test_no_capture_against_adversarial_input(self):
        # the input already uses names the generator would produce
        atom = MarginalIdentity((V("$z1"),), (V("$z2"),))
        out = identity_to_equiv(atom, fresh_for(atom))
        bound = {g.var.name for g in subformulas(out) if isinstance(g, Forall)}
        assert bound.isdisjoint({"$z1", "$z2"})
        assert free_vars(out) == {"$z1", "$z2"}

    @pytest.mark.parametrize("text,builder", [
        ("(x) =~* (y)", equiv_to_identity_dep),
        ("(x) =~ (y)", identity_to_equiv),
        ("(x) =~ (y)", identity_to_marg_indep),
    ])
    def test_free_vars_preserved(self, text, builder):
        atom = parse_fo(text)
        out = builder(atom, fresh_for(atom))
        assert free_vars(out) == free_vars(atom)


class TestLower:
    def test_dep_to_equivalence_target(self):
        out = lower(parse_fo("dep(x ; y)"), TargetLogic.MARGINAL_EQUIVALENCE)
        assert unparse(out) == "(x, y) =~* (x)"

    def test_identity_to_indep_target(self):
        out = lower(parse_fo("(x) =~ (y)"), TargetLogic.MARGINAL_INDEPENDENCE)
        assert atom_kinds(out) == {"CondIndep"}

    def test_no_path_to_identity_only(self):
        with pytest.raises(NoPathError):
            lower(parse_fo("const(x)"), TargetLogic.MARGINAL_IDENTITY)

    def test_ci_has_no_path_into_identity_dep(self):
        with pytest.raises(NoPathError):
            lower(parse_fo("ci(; x ; y)"), TargetLogic.IDENTITY_WITH_DEP)

    def test_composed_lowering_terminates_in_target(self):
        formula = parse_fo("E u. dep(u ; x) & (x, u) =~* (x) | (x) =~ (u)")
        out = lower(formula, TargetLogic.CONDITIONAL_INDEPENDENCE)
        assert atom_kinds(out) <= {"CondIndep"}

    def test_idempotent_on_own_output(self):
        formula = parse_fo("dep(x ; y) | (x) =~ (y)")
        once = lower(formula, TargetLogic.MARGINAL_INDEPENDENCE)
        assert lower(once, TargetLogic.MARGINAL_INDEPENDENCE) == once

    def test_compilable_target_removes_equivalence_only(self):
        out = lower(parse_fo("(x, y) =~* (y) & dep(x ; y)"), TargetLogic.COMPILABLE)
        kinds = atom_kinds(out)
        assert "MarginalEquiv" not in kinds
        assert "Dep" in kinds

    def test_parse_target_aliases(self):
        assert parse_target("FO(~*)") is TargetLogic.MARGINAL_EQUIVALENCE
        assert parse_target("fo(indep)") is TargetLogic.MARGINAL_INDEPENDENCE
        with pytest.raises(ConfigurationError):
            parse_target("FO(whatever)")


class TestSoundnessLinearPasses:
    """Verdicts agree before and after rewriting (solver-free subset).

    The acceptance suite runs the full 200-trial version; these smaller
    runs keep the unit cycle fast.
    """

    @pytest.mark.parametrize("text,rewrite", [
        ("dep(x ; y)", lambda f, s: dep_to_ci(f)),
        ("dep(x, y ; z)", lambda f, s: dep_to_ci(f)),
        ("dep(x ; y)", lambda f, s: dep_to_equiv(f)),
        ("(x) =~* (y)", equiv_to_identity_dep),
        ("(x, y) =~* (y)", equiv_to_identity_dep),
        ("(x) =~ (y)", identity_to_equiv),
    ])
    def test_verdicts_agree(self, text, rewrite):
        source = parse_fo(text)
        rng = random.Random(hash(text) % (2 ** 31))
        structure = Structure(("0", "1", "2"),
                              constants={"zero": "0"})
        for _ in range(40):
            rewritten = rewrite(source, fresh_for(source))
            team = random_team(structure.universe,
                               sorted(free_vars(source)), 4, rng)
            before = check(structure, team, source)
            after = check(structure, team, rewritten)
            assert not before.is_unknown and not after.is_unknown
            assert before.value == after.value, f"{text} on {team.rows}"
