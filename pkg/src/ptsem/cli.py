"""Command-line interface.

One executable with subcommands: check (evaluate a formula on a team),
rewrite (inter-logic translation), sat/valid (propositional decision
problems), implies (conditional-independence implication), smt (emit the
SMT-LIB script instead of solving), and prop (randomized property
suites).

Exit codes: 0 true/sat/valid, 1 false/unsat/invalid (or property
violations), 2 undecided, 3 configuration or translation errors,
4 parse and file errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import harness
from .arith import (compile_implication, compile_sat, compile_team_check,
                    compile_validity, emit_smtlib, encode_constants)
from .checker import Strategy, Verdict, check, check_qpl
from .errors import (ConfigurationError, DegenerateTeamError, DomainError,
                     FormulaSyntaxError, InputError, NoPathError, PtsemError,
                     StrategyError, UnsupportedSugarError)
from .parser import Mode, parse
from .rewrite import FreshNameSource, TargetLogic, lower, parse_target
from .solver import SOLVER_ENV_VAR, SolverConfig, solve
from .syntax import expand_sugar, free_vars, props_to_fo, unparse
from .team import (BINARY_STRUCTURE, ProbabilisticTeam, default_structure,
                   load_structure, load_team, normalize, team_to_json)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_UNKNOWN = 2
EXIT_CONFIG = 3
EXIT_PARSE = 4

JSON_SCHEMA = "ptsem-report/1"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="ptsem", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True)

    def formula_args(p, required=True):
        p.add_argument("-f", "--formula", help="formula text")
        p.add_argument("--formula-file", help="file containing the formula")
        p.add_argument("--mode", choices=["fo", "qpl"], default=None,
                       help="concrete-syntax mode (default: fo, qpl for "
                            "sat/valid/implies)")

    def solver_args(p):
        p.add_argument("--solver-cmd", default=None,
                       help="external SMT solver command; {script} is replaced "
                            f"by the script path (default: ${SOLVER_ENV_VAR})")
        p.add_argument("--timeout", type=float, default=30.0,
                       help="solver timeout in seconds (default 30)")

    def output_args(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("check", help="evaluate a formula on a team")
    p.add_argument("--team", required=True, help="team JSON file")
    p.add_argument("--structure", help="structure JSON file")
    p.add_argument("--strategy", choices=[s.value for s in Strategy],
                   default="auto")
    formula_args(p)
    solver_args(p)
    output_args(p)

    p = sub.add_parser("rewrite", help="translate a formula into a target logic")
    formula_args(p)
    p.add_argument("--to", required=True, help="target logic, e.g. FO(~*), FO(indep)")
    p.add_argument("--structure", help="structure JSON file (constants for rewrites)")
    p.add_argument("--verify", type=int, default=0, metavar="N",
                   help="run N random equivalence trials on the result")
    p.add_argument("--seed", type=int, default=0)
    solver_args(p)
    output_args(p)

    for name, blurb in (("sat", "propositional satisfiability by a nonempty team"),
                        ("valid", "propositional validity over all teams")):
        p = sub.add_parser(name, help=blurb)
        formula_args(p)
        p.add_argument("--vars", help="comma-separated proposition tuple")
        p.add_argument("--include-empty-team", action="store_true")
        solver_args(p)
        output_args(p)

    p = sub.add_parser("implies", help="conditional-independence implication")
    p.add_argument("--vars", required=True, help="comma-separated binary variables")
    p.add_argument("--assume", action="append", default=[],
                   help="assumption formula (repeatable)")
    p.add_argument("--goal", required=True, help="goal formula")
    p.add_argument("--trials", type=int, default=400,
                   help="random refutation budget before solving")
    p.add_argument("--seed", type=int, default=0)
    solver_args(p)
    output_args(p)

    p = sub.add_parser("smt", help="emit the SMT-LIB script for a problem")
    p.add_argument("what", choices=["sat", "valid", "implies", "check"])
    p.add_argument("--team", help="team JSON file (for check)")
    p.add_argument("--structure", help="structure JSON file (for check)")
    formula_args(p)
    p.add_argument("--vars", help="comma-separated variable tuple")
    p.add_argument("--assume", action="append", default=[])
    p.add_argument("--goal")
    p.add_argument("--include-empty-team", action="store_true")
    p.add_argument("--strict-vocabulary", action="store_true",
                   help="encode rational constants with fresh pinned variables")
    p.add_argument("--out", help="write the script here instead of stdout")

    p = sub.add_parser("prop", help="randomized property suites")
    p.add_argument("suite", choices=["locality", "scaling", "union-closure",
                                     "rewrite-soundness"])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--linear-only", action="store_true",
                   help="rewrite-soundness: skip solver-needing passes")
    solver_args(p)
    output_args(p)
    return top


# --- small helpers -----------------------------------------------------------


def _read_formula(args, default_mode: str) -> tuple:
    mode = Mode(args.mode or default_mode)
    if args.formula and args.formula_file:
        raise ConfigurationError("give either --formula or --formula-file, not both")
    if args.formula is not None:
        return parse(args.formula, mode), mode
    if args.formula_file:
        try:
            with open(args.formula_file, encoding="utf-8") as handle:
                return parse(handle.read().strip(), mode), mode
        except OSError as exc:
            raise InputError(f"cannot read formula file: {exc}")
    raise ConfigurationError("a formula is required (-f or --formula-file)")


def _solver_config(args, want_model=False) -> SolverConfig:
    if getattr(args, "timeout", 30.0) <= 0:
        raise ConfigurationError("--timeout must be positive")
    return SolverConfig.from_env(args.solver_cmd, args.timeout, want_model)


def _split_vars(text: str | None):
    if not text:
        return None
    names = [v.strip() for v in text.split(",") if v.strip()]
    if not names:
        raise ConfigurationError("empty --vars list")
    return names


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = list(value)
        if isinstance(value, (set, frozenset)):
            items = sorted(items, key=repr)
        return [_jsonable(v) for v in items]
    if isinstance(value, ProbabilisticTeam):
        return team_to_json(value)
    return value


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"schema": JSON_SCHEMA, **_jsonable(payload)},
                         sort_keys=True))
    else:
        for line in text_lines:
            print(line)


_VERDICT_EXIT = {"true": EXIT_TRUE, "false": EXIT_FALSE, "unknown": EXIT_UNKNOWN}


# --- subcommands ---------------------------------------------------------------


def cmd_check(args) -> int:
    team = load_team(args.team)
    formula, mode = _read_formula(args, "fo")
    config = _solver_config(args)
    strategy = Strategy(args.strategy)
    if mode is Mode.QPL:
        structure = BINARY_STRUCTURE
        bad = [v for v in team.values_seen() if v not in ("0", "1")]
        if bad:
            raise InputError(f"propositional mode needs a binary team; saw {bad}")
        verdict = check_qpl(team, formula, strategy, config)
    else:
        structure = (load_structure(args.structure) if args.structure
                     else default_structure(team))
        verdict = check(structure, team, formula, strategy, config)
    lines = [f"verdict: {verdict.value}"]
    lines += [f"  {step}" for step in verdict.reason]
    _emit(args, {"command": "check", "verdict": verdict.value,
                 "trace": list(verdict.reason),
                 "witness": _jsonable(verdict.witness)}, lines)
    return _VERDICT_EXIT[verdict.value]


def cmd_rewrite(args) -> int:
    formula, mode = _read_formula(args, "fo")
    target = parse_target(args.to)
    structure = (load_structure(args.structure) if args.structure
                 else BINARY_STRUCTURE)
    lowered = lower(formula, target, structure)
    lines = [unparse(lowered)]
    payload = {"command": "rewrite", "target": target.value,
               "formula": unparse(lowered)}
    if args.verify:
        config = _solver_config(args)
        report = _verify_equivalence(formula, lowered, structure,
                                     args.verify, args.seed, config)
        payload["verify"] = report
        lines.append(f"verified: {report['agreements']}/{report['trials']} "
                     f"agreements, {report['undecided']} undecided")
        if report["disagreements"]:
            lines.append("DISAGREEMENTS FOUND")
    _emit(args, payload, lines)
    if args.verify and payload["verify"]["disagreements"]:
        return EXIT_FALSE
    return EXIT_TRUE


def _verify_equivalence(source, rewritten, structure, trials, seed, config):
    rng = random.Random(seed)
    vars = sorted(free_vars(source)) or ["x"]
    agreements = disagreements = undecided = 0
    for _ in range(trials):
        team = harness.random_team(structure.universe, vars, 4, rng)
        before = check(structure, team, source, config=config)
        after = check(structure, team, rewritten, config=config)
        if before.is_unknown or after.is_unknown:
            undecided += 1
        elif before.value == after.value:
            agreements += 1
        else:
            disagreements += 1
    return {"trials": trials, "agreements": agreements,
            "disagreements": disagreements, "undecided": undecided}


def _qpl_formula(args):
    formula, _ = _read_formula(args, "qpl")
    declared = _split_vars(args.vars)
    return formula, declared


def _decode_model(model, props):
    """Outer-stage solver values rendered as a weighted team."""
    if model is None:
        return None
    rows = []
    prefix = "w_s_"
    for name, value in sorted(model.items()):
        if name.startswith(prefix) and len(name) == len(prefix) + len(props):
            bits = name[len(prefix):]
            rows.append({"values": list(bits), "weight": str(value)})
    return {"vars": list(props), "rows": rows} if rows else None


def cmd_sat(args) -> int:
    formula, declared = _qpl_formula(args)
    props = tuple(declared or sorted(free_vars(formula)))
    sentence = compile_sat(expand_sugar(formula), props)
    verdict = solve(sentence, _solver_config(args, want_model=True))
    status = {"sat": "sat", "unsat": "unsat", "unknown": "unknown"}[verdict.status]
    lines = [status if not verdict.reason else f"{status} ({verdict.reason})"]
    witness = _decode_model(verdict.model, props)
    if witness:
        lines.append(f"witness team: {json.dumps(witness, sort_keys=True)}")
    _emit(args, {"command": "sat", "result": status, "reason": verdict.reason,
                 "witness": witness}, lines)
    return {"sat": EXIT_TRUE, "unsat": EXIT_FALSE,
            "unknown": EXIT_UNKNOWN}[verdict.status]


def cmd_valid(args) -> int:
    formula, declared = _qpl_formula(args)
    props = tuple(declared or sorted(free_vars(formula)))
    sentence = compile_validity(expand_sugar(formula), props,
                                include_empty_team=args.include_empty_team)
    verdict = solve(sentence, _solver_config(args))
    result = {"sat": "valid", "unsat": "invalid", "unknown": "unknown"}[verdict.status]
    lines = [result if not verdict.reason else f"{result} ({verdict.reason})"]
    _emit(args, {"command": "valid", "result": result, "reason": verdict.reason},
          lines)
    return {"valid": EXIT_TRUE, "invalid": EXIT_FALSE,
            "unknown": EXIT_UNKNOWN}[result]


def cmd_implies(args) -> int:
    vars = _split_vars(args.vars)
    assumptions = [parse(text, Mode.QPL) for text in args.assume]
    goal = parse(args.goal, Mode.QPL)
    for g in assumptions + [goal]:
        extra = free_vars(g) - set(vars)
        if extra:
            raise InputError(f"statement mentions {sorted(extra)} outside --vars")
    config = _solver_config(args)
    counterexample = harness.refute_implication(
        assumptions, goal, vars, args.trials, args.seed)
    if counterexample is not None:
        distribution = team_to_json(normalize(counterexample))
        lines = ["invalid",
                 f"counterexample distribution: "
                 f"{json.dumps(distribution, sort_keys=True)}"]
        _emit(args, {"command": "implies", "result": "invalid",
                     "counterexample": distribution}, lines)
        return EXIT_FALSE
    sentence = compile_implication(
        [expand_sugar(a) for a in assumptions], expand_sugar(goal), vars)
    verdict = solve(sentence, config)
    result = {"sat": "valid", "unsat": "invalid", "unknown": "unknown"}[verdict.status]
    lines = [result if not verdict.reason else f"{result} ({verdict.reason})"]
    _emit(args, {"command": "implies", "result": result,
                 "reason": verdict.reason, "counterexample": None}, lines)
    return {"valid": EXIT_TRUE, "invalid": EXIT_FALSE,
            "unknown": EXIT_UNKNOWN}[result]


def cmd_smt(args) -> int:
    if args.what == "check":
        if not args.team:
            raise ConfigurationError("smt check needs --team")
        team = load_team(args.team)
        formula, mode = _read_formula(args, "fo")
        if mode is Mode.QPL:
            structure = BINARY_STRUCTURE
            formula = props_to_fo(formula)
        else:
            structure = (load_structure(args.structure) if args.structure
                         else default_structure(team))
        sentence = compile_team_check(structure, team, expand_sugar(formula))
    elif args.what == "implies":
        vars = _split_vars(args.vars)
        if vars is None:
            raise ConfigurationError("smt implies needs --vars")
        if not args.goal:
            raise ConfigurationError("smt implies needs --goal")
        assumptions = [expand_sugar(parse(t, Mode.QPL)) for t in args.assume]
        goal = expand_sugar(parse(args.goal, Mode.QPL))
        sentence = compile_implication(assumptions, goal, vars)
    else:
        formula, declared = _qpl_formula(args)
        props = tuple(declared or sorted(free_vars(formula)))
        if args.what == "sat":
            sentence = compile_sat(expand_sugar(formula), props)
        else:
            sentence = compile_validity(expand_sugar(formula), props,
                                        include_empty_team=args.include_empty_team)
    if args.strict_vocabulary:
        sentence = encode_constants(sentence)
    script = emit_smtlib(sentence)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(script)
    else:
        sys.stdout.write(script)
    return EXIT_TRUE


def cmd_prop(args) -> int:
    config = _solver_config(args)
    if args.suite == "locality":
        report = harness.suite_locality(args.trials, args.seed, config)
    elif args.suite == "scaling":
        report = harness.suite_scaling(args.trials, args.seed, config)
    elif args.suite == "union-closure":
        report = harness.suite_union_closure(args.trials, args.seed, config)
    else:
        report = harness.suite_rewrite_soundness(
            args.trials, args.seed, config, linear_only=args.linear_only)
    lines = [report.summary()]
    for violation in report.violations:
        lines.append(f"  trial {violation.trial}: {violation.description}")
    payload = {"command": "prop", "suite": report.suite, "seed": report.seed,
               "trials": report.trials, "skipped": report.skipped,
               "undecided": report.unknowns,
               "violations": [{"trial": v.trial, "description": v.description}
                              for v in report.violations]}
    _emit(args, payload, lines)
    return EXIT_TRUE if report.ok else EXIT_FALSE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {"check": cmd_check, "rewrite": cmd_rewrite, "sat": cmd_sat,
                "valid": cmd_valid, "implies": cmd_implies, "smt": cmd_smt,
                "prop": cmd_prop}
    try:
        return handlers[args.command](args)
    except (FormulaSyntaxError, UnsupportedSugarError) as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NoPathError, ConfigurationError, StrategyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, DomainError, DegenerateTeamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PtsemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
