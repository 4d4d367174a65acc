"""Randomized property suites for the semantic laws and the rewrites.

Every suite is seeded and reproducible: trial inputs are generated up
front from one generator, so running trials in parallel cannot change
what gets tested or how violations are reported.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .checker import Strategy, Verdict, check, check_qpl
from .errors import InputError
from .rewrite import (FreshNameSource, ci_to_marg_indep, dep_to_ci,
                      dep_to_equiv, equiv_to_identity_dep, identity_to_equiv,
                      identity_to_marg_indep)
from .solver import SolverConfig
from .syntax import (And, CondIndep, Dep, Exists, Forall, Formula,
                     MarginalEquiv, MarginalIdentity, Or, Var, VarEq, VarNeq,
                     conj, free_vars, unparse)
from .team import (ProbabilisticTeam, Structure, normalize, restrict,
                   scaled_union, support)


@dataclass
class Violation:
    trial: int
    description: str
    detail: dict = field(default_factory=dict)


@dataclass
class PropertyReport:
    suite: str
    seed: int
    trials: int
    violations: list[Violation] = field(default_factory=list)
    skipped: int = 0
    unknowns: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        extra = ""
        if self.skipped:
            extra += f", {self.skipped} skipped"
        if self.unknowns:
            extra += f", {self.unknowns} undecided"
        return (f"{self.suite}: {self.trials} trials, seed {self.seed}: "
                f"{status}{extra}")


def _structure_over(tokens: Sequence[str]) -> Structure:
    tokens = tuple(sorted(tokens))
    constants = {t: t for t in tokens}
    constants.setdefault("zero", tokens[0])
    return Structure(universe=tokens, relations={}, constants=constants)


def random_team(universe: Sequence[str], vars: Sequence[str], max_rows: int,
                seed) -> ProbabilisticTeam:
    """Seeded team with distinct rows and small exact rational weights."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    space = sorted(itertools.product(sorted(universe), repeat=len(vars)))
    count = rng.randint(0, min(max_rows, len(space)))
    rows = [(assignment, Fraction(rng.randint(0, 12), rng.randint(1, 12)))
            for assignment in rng.sample(space, count)]
    return ProbabilisticTeam.make(tuple(vars), rows)


def _random_tuple(rng: random.Random, vars: Sequence[str], max_len: int = 2,
                  min_len: int = 1) -> tuple[Var, ...]:
    length = rng.randint(min_len, max_len)
    return tuple(Var(rng.choice(list(vars))) for _ in range(length))


def random_atom(rng: random.Random, vars: Sequence[str],
                kinds: Sequence[str]) -> Formula:
    kind = rng.choice(list(kinds))
    if kind == "identity":
        left = _random_tuple(rng, vars)
        right = tuple(Var(rng.choice(list(vars))) for _ in left)
        return MarginalIdentity(left, right)
    if kind == "equiv":
        return MarginalEquiv(_random_tuple(rng, vars), _random_tuple(rng, vars))
    if kind == "ci":
        cond = _random_tuple(rng, vars, max_len=1, min_len=0)
        return CondIndep(cond, _random_tuple(rng, vars, 1),
                         _random_tuple(rng, vars, 1))
    if kind == "dep":
        return Dep(_random_tuple(rng, vars, 1), _random_tuple(rng, vars, 1))
    if kind == "const":
        return Dep((), _random_tuple(rng, vars, 1))
    if kind == "literal":
        a, b = rng.choice(list(vars)), rng.choice(list(vars))
        return (VarEq if rng.random() < 0.5 else VarNeq)(Var(a), Var(b))
    raise InputError(f"unknown atom kind {kind!r}")


# Atom kinds whose compiled form stays multiplication-free: these may sit
# under splits and existentials and still be decided without a solver.
LINEAR_KINDS = ("identity", "dep", "const", "literal")
ALL_KINDS = ("identity", "equiv", "ci", "dep", "const", "literal")


def random_shallow_formula(rng: random.Random, vars: Sequence[str]) -> Formula:
    """Depth <= 2 formulas across every atom kind.

    Independence atoms appear only in conjunctive or universal contexts,
    where their evaluation is direct; everything that can end up under a
    split or existential quantifier compiles linearly.
    """
    shape = rng.randrange(6)
    if shape == 0:
        return random_atom(rng, vars, ALL_KINDS)
    if shape == 1:
        return And(random_atom(rng, vars, ALL_KINDS),
                   random_atom(rng, vars, ALL_KINDS))
    if shape == 2:
        return Or(random_atom(rng, vars, LINEAR_KINDS),
                  random_atom(rng, vars, LINEAR_KINDS))
    if shape == 3:
        bound = rng.choice(list(vars))
        return Exists(Var(bound), random_atom(rng, vars, LINEAR_KINDS))
    if shape == 4:
        bound = rng.choice(list(vars))
        return Forall(Var(bound), random_atom(rng, vars, ALL_KINDS))
    return And(random_atom(rng, vars, ALL_KINDS),
               Or(random_atom(rng, vars, LINEAR_KINDS),
                  random_atom(rng, vars, LINEAR_KINDS)))


def random_identity_formula(rng: random.Random, vars: Sequence[str],
                            depth: int) -> Formula:
    """Formulas over marginal identity atoms and literals, depth-bounded."""
    if depth <= 0 or rng.random() < 0.3:
        return random_atom(rng, vars, ("identity", "identity", "literal"))
    shape = rng.randrange(4)
    if shape == 0:
        return And(random_identity_formula(rng, vars, depth - 1),
                   random_identity_formula(rng, vars, depth - 1))
    if shape == 1:
        return Or(random_identity_formula(rng, vars, depth - 1),
                  random_identity_formula(rng, vars, depth - 1))
    bound = rng.choice(list(vars))
    node = Exists if shape == 2 else Forall
    return node(Var(bound), random_identity_formula(rng, vars, depth - 1))


# --- semantic property suites -----------------------------------------------


def check_locality(f: Formula, trials: int, seed: int,
                   config: SolverConfig | None = None) -> PropertyReport:
    """Verdicts depend only on the team restricted to the free variables."""
    rng = random.Random(seed)
    report = PropertyReport("locality", seed, trials)
    needed = sorted(free_vars(f))
    for trial in range(trials):
        padding = [f"u{i}" for i in range(rng.randint(1, 2))]
        vars = needed + padding
        tokens = ["0", "1", "2"][:rng.randint(2, 3)]
        team = random_team(tokens, vars, 4, rng)
        keep = set(needed) | {p for p in padding if rng.random() < 0.5}
        structure = _structure_over(tokens)
        full = check(structure, team, f, config=config)
        local = check(structure, restrict(team, keep), f, config=config)
        if full.is_unknown or local.is_unknown:
            report.unknowns += 1
            continue
        if full.value != local.value:
            report.violations.append(Violation(
                trial, f"{unparse(f)} changed verdict under restriction",
                {"team": team, "keep": sorted(keep),
                 "full": full.value, "restricted": local.value}))
    return report


def check_scaling(f: Formula, trials: int, seed: int,
                  config: SolverConfig | None = None) -> PropertyReport:
    """Verdicts are invariant under rescaling to total weight one."""
    rng = random.Random(seed)
    report = PropertyReport("scaling", seed, trials)
    vars = sorted(free_vars(f)) or ["x"]
    for trial in range(trials):
        tokens = ["0", "1", "2"][:rng.randint(2, 3)]
        team = random_team(tokens, vars, 4, rng)
        if team.total_weight == 0:
            report.skipped += 1  # degenerate team, nothing to rescale
            continue
        structure = _structure_over(tokens)
        raw = check(structure, team, f, config=config)
        scaled = check(structure, normalize(team), f, config=config)
        if raw.is_unknown or scaled.is_unknown:
            report.unknowns += 1
            continue
        if raw.value != scaled.value:
            report.violations.append(Violation(
                trial, f"{unparse(f)} is not scaling-invariant",
                {"team": team, "raw": raw.value, "scaled": scaled.value}))
    return report


def check_union_closure(f: Formula, trials: int, seed: int,
                        config: SolverConfig | None = None) -> PropertyReport:
    """Two satisfying teams keep satisfying under every scaled union."""
    rng = random.Random(seed)
    report = PropertyReport("union-closure", seed, trials)
    vars = sorted(free_vars(f)) or ["x"]
    for trial in range(trials):
        tokens = ["0", "1", "2"][:rng.randint(2, 3)]
        structure = _structure_over(tokens)
        first = random_team(tokens, vars, 3, rng)
        second = random_team(tokens, vars, 3, rng)
        k = Fraction(rng.randint(0, 6), 6)
        va = check(structure, first, f, config=config)
        vb = check(structure, second, f, config=config)
        if va.is_unknown or vb.is_unknown:
            report.unknowns += 1
            continue
        if not (va.is_true and vb.is_true):
            report.skipped += 1  # premise not met; nothing to assert
            continue
        union = check(structure, scaled_union(first, second, k), f, config=config)
        if union.is_unknown:
            report.unknowns += 1
            continue
        if not union.is_true:
            report.violations.append(Violation(
                trial, f"{unparse(f)} broke under a scaled union",
                {"first": first, "second": second, "k": k}))
    return report


def suite_locality(trials: int, seed: int,
                   config: SolverConfig | None = None) -> PropertyReport:
    """Random shallow formulas over every atom kind, fresh per trial."""
    rng = random.Random(seed)
    report = PropertyReport("locality", seed, trials)
    for trial in range(trials):
        vars = ["x", "y", "z"][:rng.randint(2, 3)]
        f = random_shallow_formula(rng, vars)
        sub = check_locality(f, 1, rng.randrange(2 ** 30), config)
        _merge(report, sub, trial)
    return report


def suite_scaling(trials: int, seed: int,
                  config: SolverConfig | None = None) -> PropertyReport:
    rng = random.Random(seed)
    report = PropertyReport("scaling", seed, trials)
    for trial in range(trials):
        vars = ["x", "y", "z"][:rng.randint(2, 3)]
        f = random_shallow_formula(rng, vars)
        sub = check_scaling(f, 1, rng.randrange(2 ** 30), config)
        _merge(report, sub, trial)
    return report


def suite_union_closure(trials: int, seed: int,
                        config: SolverConfig | None = None,
                        depth: int = 3) -> PropertyReport:
    rng = random.Random(seed)
    report = PropertyReport("union-closure", seed, trials)
    for trial in range(trials):
        vars = ["x", "y", "z"][:rng.randint(2, 3)]
        f = random_identity_formula(rng, vars, depth)
        sub = check_union_closure(f, 1, rng.randrange(2 ** 30), config)
        _merge(report, sub, trial)
    return report


def _merge(report: PropertyReport, sub: PropertyReport, trial: int):
    report.skipped += sub.skipped
    report.unknowns += sub.unknowns
    for violation in sub.violations:
        violation.trial = trial
        report.violations.append(violation)


# --- rewrite soundness --------------------------------------------------------


@dataclass(frozen=True)
class RewritePass:
    name: str
    # builds (source atom, rewritten formula) from an rng and a fresh source
    instance: Callable
    needs_solver: bool


def _dep_instance(rng, vars, fresh):
    atom = Dep(_random_tuple(rng, vars, 1, 1), _random_tuple(rng, vars, 2, 1))
    return atom, dep_to_ci(atom)


def _dep_equiv_instance(rng, vars, fresh):
    atom = Dep(_random_tuple(rng, vars, 1, 1), _random_tuple(rng, vars, 2, 1))
    return atom, dep_to_equiv(atom)


def _equiv_instance(rng, vars, fresh):
    atom = MarginalEquiv(_random_tuple(rng, vars, 2), _random_tuple(rng, vars, 2))
    return atom, equiv_to_identity_dep(atom, fresh)


def _identity_equiv_instance(rng, vars, fresh):
    left = _random_tuple(rng, vars, 2)
    right = tuple(Var(rng.choice(list(vars))) for _ in left)
    atom = MarginalIdentity(left, right)
    return atom, identity_to_equiv(atom, fresh)


def _identity_indep_instance(rng, vars, fresh):
    left = _random_tuple(rng, vars, 1)
    right = (Var(rng.choice(list(vars))),)
    atom = MarginalIdentity(left, right)
    return atom, identity_to_marg_indep(atom, fresh)


def _ci_instance_builder(structure):
    def build(rng, vars, fresh):
        atom = CondIndep(_random_tuple(rng, vars, 1, 1),
                         _random_tuple(rng, vars, 1),
                         _random_tuple(rng, vars, 1))
        return atom, ci_to_marg_indep(atom, structure, fresh)
    return build


def rewrite_passes(structure: Structure) -> list[RewritePass]:
    return [
        RewritePass("dependence-as-self-independence", _dep_instance, False),
        RewritePass("dependence-as-equivalence", _dep_equiv_instance, False),
        RewritePass("equivalence-as-identity-and-dependence",
                    _equiv_instance, False),
        RewritePass("identity-through-equivalence",
                    _identity_equiv_instance, False),
        RewritePass("identity-through-independence",
                    _identity_indep_instance, True),
        RewritePass("conditional-from-marginal-independence",
                    _ci_instance_builder(structure), True),
    ]


def suite_rewrite_soundness(trials: int, seed: int,
                            config: SolverConfig | None = None,
                            passes: Sequence[str] | None = None,
                            linear_only: bool = False,
                            workers: int = 2) -> PropertyReport:
    """Source and rewritten formula must agree on random teams.

    Solver-needing passes (whose rewrites put independence atoms under
    quantifiers) keep their instances small and run trials in parallel,
    one solver process per trial at most.
    """
    report = PropertyReport("rewrite-soundness", seed, trials)
    binary = _structure_over(("0", "1"))
    ternary = _structure_over(("0", "1", "2"))
    selected = [p for p in rewrite_passes(binary)
                if (passes is None or p.name in passes)
                and not (linear_only and p.needs_solver)]
    if passes is not None:
        unknown = set(passes) - {p.name for p in rewrite_passes(binary)}
        if unknown:
            raise InputError(f"unknown rewrite pass(es): {sorted(unknown)}")

    jobs = []
    rng = random.Random(seed)
    for rewrite in selected:
        for trial in range(trials):
            if rewrite.needs_solver:
                # solver-bound instances stay small: binary domain, two
                # variables, at most three rows
                structure, vars, rows = binary, ["x", "y"], 3
            else:
                structure = ternary if rng.random() < 0.4 else binary
                vars = ["x", "y", "z"][:rng.randint(2, 3)]
                rows = 4
            fresh = FreshNameSource(set(vars))
            source, rewritten = rewrite.instance(rng, vars, fresh)
            team = random_team(structure.universe, vars, rows, rng)
            jobs.append((rewrite.name, trial, structure, source, rewritten, team))

    def run(job):
        name, trial, structure, source, rewritten, team = job
        before = check(structure, team, source, config=config)
        after = check(structure, team, rewritten, config=config)
        return name, trial, team, source, before, after

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    for name, trial, team, source, before, after in results:
        if before.is_unknown or after.is_unknown:
            report.unknowns += 1
            continue
        if before.value != after.value:
            report.violations.append(Violation(
                trial, f"{name}: {unparse(source)} disagrees after rewriting",
                {"team": team, "before": before.value, "after": after.value}))
    return report


# --- implication refutation -----------------------------------------------------


def refute_implication(assumptions: Sequence[Formula], goal: Formula,
                       vars: Sequence[str], trials: int,
                       seed: int) -> Optional[ProbabilisticTeam]:
    """Search for a distribution satisfying every assumption but not the goal.

    Sound refuter over random rational binary distributions; finding
    nothing proves nothing.
    """
    rng = random.Random(seed)
    vars = tuple(vars)
    for _ in range(trials):
        team = random_team(("0", "1"), vars, 2 ** len(vars), rng)
        if team.total_weight == 0:
            continue
        team = normalize(team)
        if not all(check_qpl(team, a).is_true for a in assumptions):
            continue
        if check_qpl(team, goal).is_false:
            return team
    return None
