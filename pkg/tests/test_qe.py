"""Internal linear decision procedure."""

from fractions import Fraction

import pytest

from ptsem.arith import (Add, AndF, Eq, ExistsR, ForallR, Leq, Mul, Not, OrF,
                         RatConst, WVar, compile_sat, compile_validity)
from ptsem.errors import FragmentError
from ptsem.parser import parse_qpl
from ptsem.solver import linear_qe
from ptsem import qe

F = Fraction


def C(n, d=1):
    return RatConst(F(n, d))


x, y, z = WVar("x"), WVar("y"), WVar("z")


class TestBaseCases:
    def test_half_exists(self):
        phi = ExistsR(("x",), AndF((Leq(C(0), x), Eq(Add((x, x)), C(1)))))
        assert linear_qe(phi).is_sat

    def test_conflicting_bounds(self):
        phi = ExistsR(("x",), AndF((Leq(x, C(0)), Leq(C(1), x))))
        assert linear_qe(phi).is_unsat

    def test_strict_versus_weak(self):
        lt = ExistsR(("x",), AndF((Not(Leq(x, C(0))), Leq(x, C(0)))))
        assert linear_qe(lt).is_unsat

    def test_disequality(self):
        phi = ExistsR(("x",), AndF((Leq(C(0), x), Not(Eq(C(0), x)))))
        assert linear_qe(phi).is_sat
        pinned = ExistsR(("x",), AndF((Leq(x, C(0)), Leq(C(0), x),
                                       Not(Eq(x, C(0))))))
        assert linear_qe(pinned).is_unsat

    def test_constant_scaling_is_linear(self):
        phi = ExistsR(("x",), Eq(Mul((C(2, 3), x)), C(1)))
        assert linear_qe(phi).is_sat

    def test_nonlinear_rejected(self):
        phi = ExistsR(("x", "y"), Eq(Mul((x, y)), C(1)))
        with pytest.raises(FragmentError):
            linear_qe(phi)


class TestAlternation:
    def test_forall_exists_true(self):
        # every x has something above it
        phi = ForallR(("x",), ExistsR(("y",), Not(Leq(y, x))))
        assert linear_qe(phi).is_sat

    def test_exists_forall_false(self):
        # no greatest real
        phi = ExistsR(("x",), ForallR(("y",), Leq(y, x)))
        assert linear_qe(phi).is_unsat

    def test_forall_with_guard(self):
        # nonnegative x stays below x + 1
        phi = ForallR(("x",), OrF((Not(Leq(C(0), x)),
                                   Not(Leq(Add((x, C(1))), x)))))
        assert linear_qe(phi).is_sat

    def test_validity_via_qe(self):
        assert linear_qe(compile_validity(parse_qpl("(p) =~ (p)"))).is_sat
        assert linear_qe(compile_validity(parse_qpl("p | !p"))).is_sat
        assert linear_qe(compile_validity(parse_qpl("p"))).is_unsat


class TestModels:
    def test_model_satisfies_bounds(self):
        phi = ExistsR(("x", "y"), AndF((
            Leq(C(1), x), Leq(x, C(2)),
            Not(Leq(y, x)), Leq(y, C(5)))))
        verdict = linear_qe(phi, want_model=True)
        assert verdict.is_sat and verdict.model is not None
        mx, my = verdict.model["x"], verdict.model["y"]
        assert 1 <= mx <= 2 and mx < my <= 5

    def test_model_for_compiled_sat(self):
        verdict = linear_qe(compile_sat(parse_qpl("p")), want_model=True)
        assert verdict.is_sat
        # the single positive-weight assignment sets p to 1
        assert verdict.model["w_s_0"] == 0
        assert verdict.model["w_s_1"] > 0

    def test_model_covers_propagated_values(self):
        phi = ExistsR(("x", "y"), AndF((Eq(x, C(3)), Leq(x, y))))
        verdict = linear_qe(phi, want_model=True)
        assert verdict.model["x"] == 3
        assert verdict.model["y"] >= 3


class TestSimplifier:
    def test_zero_sum_forcing(self):
        # nonneg vars summing to zero all vanish, deciding the sentence
        phi = ExistsR(("x", "y"), AndF((
            Leq(C(0), x), Leq(C(0), y),
            Eq(Add((x, y)), C(0)),
            Eq(x, C(0)))))
        tree = qe.to_internal(phi, allow_poly=False)
        assert tree is True

    def test_propagation_respects_disjunction_scope(self):
        # x = 1 inside one branch must not leak to the other
        phi = ExistsR(("x",), OrF((
            AndF((Eq(x, C(1)), Leq(x, C(0)))),   # contradictory branch
            Eq(x, C(2)),
        )))
        assert linear_qe(phi).is_sat

    def test_propagation_keeps_free_variable_constraints(self):
        # inside a quantifier body, an equality about an outer variable
        # survives the inner elimination
        inner = ExistsR(("y",), AndF((Eq(x, C(0)), Leq(y, x))))
        phi = ExistsR(("x",), AndF((Leq(C(1), x), inner)))
        assert linear_qe(phi).is_unsat


def test_open_universal_matrix_still_decided():
    # the free variable drops out during elimination: for no value of y
    # does x = y hold universally
    phi = ForallR(("x",), Eq(x, y))
    assert not qe.decide(qe.to_internal(phi, allow_poly=False))
