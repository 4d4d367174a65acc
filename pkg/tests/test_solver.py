"""Solver routing, the external broker, and model parsing."""

from fractions import Fraction

from ptsem.arith import compile_sat, compile_team_check, emit_smtlib
from ptsem.parser import parse_fo, parse_qpl
from ptsem.solver import (SolverConfig, _parse_model, run_script, solve)
from ptsem.syntax import expand_sugar
from ptsem.team import ProbabilisticTeam, default_structure

F = Fraction


class TestRouting:
    def test_linear_decided_internally_even_with_solver(self):
        # a bogus solver command proves no process was launched
        config = SolverConfig(command="/nonexistent/solver", timeout=5)
        verdict = solve(compile_sat(parse_qpl("p & !p")), config)
        assert verdict.is_unsat

    def test_nonlinear_without_solver_is_unknown(self):
        verdict = solve(compile_sat(parse_qpl("ci(; p ; q)")), SolverConfig())
        assert verdict.is_unknown
        assert verdict.reason == "solver-missing"

    def test_nonlinear_that_simplifies_to_linear_stays_internal(self):
        # constants flow into the product equations of a concrete team,
        # leaving nothing nonlinear to solve
        team = ProbabilisticTeam.make(
            ("x", "y"), [(("0", "0"), F(1, 2)), (("1", "1"), F(1, 2))])
        sentence = compile_team_check(
            default_structure(team), team, parse_fo("ci(; x ; y)"))
        verdict = solve(sentence, SolverConfig(command="/nonexistent/solver"))
        assert verdict.is_unsat


class TestBroker:
    def test_timeout_reported(self):
        config = SolverConfig(command="sh -c 'sleep 60' slow", timeout=0.2)
        verdict = run_script("(check-sat)\n", config)
        assert verdict.is_unknown
        assert verdict.reason == "timeout"

    def test_missing_binary_reported(self):
        config = SolverConfig(command="/no/such/binary", timeout=5)
        verdict = run_script("(check-sat)\n", config)
        assert verdict.is_unknown
        assert "failed to start" in verdict.reason

    def test_garbage_output_reported(self):
        config = SolverConfig(command="true", timeout=5)
        verdict = run_script("(check-sat)\n", config)
        assert verdict.is_unknown
        assert "solver-said-nothing" in verdict.reason

    def test_script_placeholder_substitution(self, solver_cmd):
        config = SolverConfig(command=f"{solver_cmd} {{script}}", timeout=60)
        verdict = run_script("(set-logic LRA)\n(check-sat)\n", config)
        assert verdict.is_sat


class TestExternalSolver:
    def test_nonlinear_sat(self, solver_config):
        verdict = solve(compile_sat(parse_qpl("ci(; p ; q)")), solver_config)
        assert verdict.is_sat

    def test_nonlinear_unsat(self, solver_config):
        # independence plus perfect correlation with mass on both values
        formula = parse_qpl("ci(; p ; q) & dep(p ; q) & dep(q ; p) "
                            "& ~const(p) & (p) =~ (q)")
        verdict = solve(compile_sat(expand_sugar(formula)), solver_config)
        assert verdict.is_unsat

    def test_model_round_trip(self, solver_config):
        config = SolverConfig(solver_config.command, solver_config.timeout,
                              want_model=True)
        verdict = solve(compile_sat(parse_qpl("ci(; p ; q)")), config)
        assert verdict.is_sat
        assert verdict.model, "expected a rational model"
        total = sum(verdict.model.values())
        assert total > 0


class TestModelParsing:
    def test_define_fun_block(self):
        stdout = """sat
(
  (define-fun w_s_0 () Real (/ 1.0 2.0))
  (define-fun w_s_1 () Real 0.5)
  (define-fun w_s_2 () Real (- (/ 1 4)))
)
"""
        model = _parse_model(stdout)
        assert model == {"w_s_0": F(1, 2), "w_s_1": F(1, 2), "w_s_2": F(-1, 4)}

    def test_algebraic_values_skipped(self):
        stdout = """sat
(
  (define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 2))
  (define-fun y () Real 1.0)
)
"""
        model = _parse_model(stdout)
        assert model == {"y": F(1)}

    def test_no_model(self):
        assert _parse_model("unsat\n(error \"no model\")\n") is None
