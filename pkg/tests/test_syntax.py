"""Parser, printer, free variables, and sugar expansion."""

import pytest

from ptsem.errors import FormulaSyntaxError, UnsupportedSugarError
from ptsem.parser import Mode, parse, parse_fo, parse_qpl
from ptsem.syntax import (And, BoundedExists, CondIndep, Const, ConstExists,
                          Dep, Exists, Forall, Implies, MarginalEquiv,
                          MarginalIdentity, NegRel, Or, PropLit, Rel,
                          ClassicalNeg, TupleNeq, Var, VarEq, VarNeq, conj,
                          disj, expand_sugar, free_vars, has_sugar,
                          node_count, subformulas, unparse)

V = Var


class TestParse:
    def test_marginal_identity_tuples(self):
        assert parse_fo("(x, y) =~ (u, v)") == MarginalIdentity(
            (V("x"), V("y")), (V("u"), V("v")))

    def test_marginal_identity_arity_error(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("(x, y) =~ (u)")

    def test_quantified_conjunction(self):
        formula = parse_qpl("E q. ci(; p ; q) & dep(x ; y)")
        assert formula == Exists(
            V("q"),
            And(CondIndep((), (V("p"),), (V("q"),)),
                Dep((V("x"),), (V("y"),))))

    def test_marginal_equivalence_mixed_arity(self):
        assert parse_fo("(x, y) =~* (y)") == MarginalEquiv(
            (V("x"), V("y")), (V("y"),))

    def test_empty_tuple_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("(x) =~* ()")

    def test_constancy(self):
        assert parse_fo("const(x, y)") == Dep((), (V("x"), V("y")))
        assert parse_fo("dep(; x, y)") == Dep((), (V("x"), V("y")))

    def test_precedence_or_under_quantifier(self):
        formula = parse_fo("A z. x = y | dep(z ; x) & z != x")
        assert formula == Forall(
            V("z"),
            Or(VarEq(V("x"), V("y")),
               And(Dep((V("z"),), (V("x"),)), VarNeq(V("z"), V("x")))))

    def test_grouping_parens(self):
        formula = parse_fo("(x = y | x = z) & dep(x ; y)")
        assert isinstance(formula, And)
        assert isinstance(formula.left, Or)

    def test_relation_and_negation(self):
        assert parse_fo("!R(x, y)") == NegRel("R", (V("x"), V("y")))
        assert parse_fo("R(x)") == Rel("R", (V("x"),))

    def test_constants(self):
        assert parse_fo("t = @T | t = @F & ci(; g ; c)") == Or(
            VarEq(V("t"), Const("T")),
            And(VarEq(V("t"), Const("F")),
                CondIndep((), (V("g"),), (V("c"),))))

    def test_bounded_quantifier(self):
        formula = parse_fo("E b in {c1, c2}. b = c1")
        assert formula == BoundedExists(
            V("b"), (V("c1"), V("c2")), VarEq(V("b"), V("c1")))

    def test_constancy_quantifier(self):
        formula = parse_fo("Ec c1 c2. c1 != c2")
        assert formula == ConstExists(
            (V("c1"), V("c2")), VarNeq(V("c1"), V("c2")))

    def test_guarded_implication(self):
        assert parse_fo("t = @F -> g = @F") == Implies(
            VarEq(V("t"), Const("F")), VarEq(V("g"), Const("F")))

    def test_positioned_error(self):
        with pytest.raises(FormulaSyntaxError) as excinfo:
            parse_fo("x = ")
        assert excinfo.value.line == 1
        assert excinfo.value.column >= 4

    def test_classical_negation_rejected_in_fo(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("~ x = y")

    def test_bang_on_compound_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("!(x = y & x = z)")

    def test_bang_on_dependency_atom_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("!dep(x ; y)")

    def test_qpl_literals(self):
        assert parse_qpl("p & !q") == And(PropLit("p"), PropLit("q", positive=False))
        assert parse_qpl("~(p | !p)") == ClassicalNeg(
            Or(PropLit("p"), PropLit("p", positive=False)))

    def test_qpl_rejects_fo_forms(self):
        for text in ["x = y", "R(x)", "p = @one"]:
            with pytest.raises(FormulaSyntaxError):
                parse_qpl(text)

    def test_fo_rejects_bare_proposition(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("p")

    def test_reserved_words(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo("dep = x")


ROUND_TRIP_CORPUS = [
    "(x, y) =~ (u, v)",
    "(x) =~* (y)",
    "(x, y) =~* (y)",
    "ci(x ; y ; z)",
    "ci(; p ; q)",
    "dep(x ; y)",
    "dep(x, y ; z)",
    "const(x)",
    "x = y",
    "x != y",
    "R(x, y)",
    "!R(x)",
    "t = @T",
    "x = y & y = z & z = x",
    "x = y | y = z | z = x",
    "x = y & (y = z | z = x)",
    "(x = y | y = z) & z = x",
    "E x. A y. x = y",
    "A z. (z != x & z != y) | ((z = x | z = y) & (z) =~* (x) & (z) =~* (y))",
    "E b in {c1, c2}. b = c1",
    "A a in {c1, c2}. E b in {c1, c2}. ci(; a ; b)",
    "Ec c1 c2. A z. E d. ci(; z ; d)",
    "(x, y) = (u, v)",
    "(x, y) != (u, v)",
    "x = @F -> y = @F",
    "(x = @a | y = @b) -> (x, y) = (u, v)",
]

QPL_ROUND_TRIP_CORPUS = [
    "p",
    "!p",
    "p | !p",
    "~(p & ~q)",
    "E q. A p. ci(; p ; q) & (p) =~ (q)",
    "dep(p ; q) | ~dep(q ; p)",
]


@pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
def test_parse_unparse_round_trip_fo(text):
    ast = parse_fo(text)
    assert parse_fo(unparse(ast)) == ast


@pytest.mark.parametrize("text", QPL_ROUND_TRIP_CORPUS)
def test_parse_unparse_round_trip_qpl(text):
    ast = parse_qpl(text)
    assert parse_qpl(unparse(ast)) == ast


@pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
def test_unparse_is_canonical(text):
    # print . parse is a projection: printing a reparsed printout changes nothing
    once = unparse(parse_fo(text))
    assert unparse(parse_fo(once)) == once


class TestFreeVars:
    def test_atom_collects_everything(self):
        formula = parse_fo("(x, y) =~ (y, z)")
        assert free_vars(formula) == {"x", "y", "z"}

    def test_quantifier_binds(self):
        assert free_vars(parse_fo("E x. dep(x ; y)")) == {"y"}

    def test_closed_sentence(self):
        assert free_vars(parse_fo("A x. E y. x = y")) == frozenset()

    def test_bounded_quantifier_choices_stay_free(self):
        formula = parse_fo("E b in {c1, c2}. b = c1")
        assert free_vars(formula) == {"c1", "c2"}

    def test_constants_are_not_variables(self):
        assert free_vars(parse_fo("t = @T")) == {"t"}


class TestExpandSugar:
    def test_tuple_disequality(self):
        expanded = expand_sugar(parse_fo("(x, y) != (u, v)"))
        assert expanded == Or(VarNeq(V("x"), V("u")), VarNeq(V("y"), V("v")))

    def test_bounded_exists(self):
        expanded = expand_sugar(parse_fo("E b in {c1, c2}. dep(b ; x)"))
        assert expanded == Exists(
            V("b"),
            And(disj([VarEq(V("b"), V("c1")), VarEq(V("b"), V("c2"))]),
                Dep((V("b"),), (V("x"),))))

    def test_bounded_forall(self):
        expanded = expand_sugar(parse_fo("A a in {c1, c2}. dep(a ; x)"))
        assert expanded == Forall(
            V("a"),
            Or(conj([VarNeq(V("a"), V("c1")), VarNeq(V("a"), V("c2"))]),
               And(disj([VarEq(V("a"), V("c1")), VarEq(V("a"), V("c2"))]),
                   Dep((V("a"),), (V("x"),)))))

    def test_constancy_exists(self):
        expanded = expand_sugar(parse_fo("Ec c1 c2. c1 = c2"))
        assert expanded == Exists(
            V("c1"), Exists(
                V("c2"),
                conj([Dep((), (V("c1"),)), Dep((), (V("c2"),)),
                      VarNeq(V("c1"), V("c2")), VarEq(V("c1"), V("c2"))])))

    def test_implication_with_disjunctive_guard(self):
        expanded = expand_sugar(parse_fo("(q = @i | r = @i) -> x = y"))
        assert expanded == Or(
            And(VarNeq(V("q"), Const("i")), VarNeq(V("r"), Const("i"))),
            VarEq(V("x"), V("y")))

    def test_unsupported_guard(self):
        with pytest.raises(UnsupportedSugarError):
            expand_sugar(Implies(Dep((), (V("x"),)), VarEq(V("x"), V("y"))))

    @pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
    def test_output_is_sugar_free_and_idempotent(self, text):
        expanded = expand_sugar(parse_fo(text))
        assert not has_sugar(expanded)
        assert expand_sugar(expanded) == expanded

    @pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
    def test_preserves_free_variables(self, text):
        formula = parse_fo(text)
        assert free_vars(expand_sugar(formula)) == free_vars(formula)


def test_node_count_counts_subformulas():
    formula = parse_fo("x = y & (y = z | dep(x ; y))")
    assert node_count(formula) == 5
    assert len(list(subformulas(formula))) == 5
