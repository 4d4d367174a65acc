"""Model checking of formulas on concrete teams.

The conjunctive and universally quantified parts of the semantics are
deterministic and evaluated by direct recursion; pure first-order
subtrees collapse to a per-row Tarskian check.  Splits and existential
quantifiers range over continuous choices, so they are decided by
compiling the subtree to a real-arithmetic sentence (exact internal
decision when linear, external solver otherwise), with a bounded
witness search as a sound fallback that can still certify truth when no
solver is available.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import atoms as atom_eval
from .arith import compile_team_check
from .errors import DomainError, InputError, StrategyError
from .rewrite import FreshNameSource, TargetLogic, lower
from .solver import SolverConfig, SolverVerdict, solve
from .syntax import (And, ClassicalNeg, CondIndep, Dep, Exists, Forall,
                     Formula, MarginalEquiv, MarginalIdentity, NegRel, Or,
                     PropLit, Rel, Var, VarEq, VarNeq, expand_sugar, free_vars,
                     is_pure_fo, props_to_fo, subformulas)
from .team import (BINARY_STRUCTURE, LocalDistribution, ProbabilisticTeam,
                   Structure, compact, duplicate, extend, restrict, support)


class Strategy(enum.Enum):
    AUTO = "auto"
    FLAT = "flat"
    DIRECT = "direct"
    COMPILE = "compile"
    WITNESS = "witness-search"


TRUE, FALSE, UNKNOWN = "true", "false", "unknown"


@dataclass(frozen=True)
class Verdict:
    value: str  # "true" | "false" | "unknown"
    reason: tuple[str, ...] = ()
    witness: Optional[object] = None

    @property
    def is_true(self) -> bool:
        return self.value == TRUE

    @property
    def is_false(self) -> bool:
        return self.value == FALSE

    @property
    def is_unknown(self) -> bool:
        return self.value == UNKNOWN

    def negated(self) -> "Verdict":
        if self.value == UNKNOWN:
            return self
        return Verdict(FALSE if self.value == TRUE else TRUE, self.reason)


def _verdict(holds: bool, why: str, witness=None) -> Verdict:
    return Verdict(TRUE if holds else FALSE, (why,), witness)


@dataclass
class _Session:
    structure: Structure
    config: SolverConfig
    strategy: Strategy
    split_cap: int = 4096
    dirac_cap: int = 4096
    trace: list[str] = field(default_factory=list)

    def note(self, message: str):
        if len(self.trace) < 200:
            self.trace.append(message)


# --- flat (Tarskian) evaluation ------------------------------------------------


def _tarski(structure: Structure, env: dict, f: Formula) -> bool:
    if isinstance(f, (VarEq, VarNeq, Rel, NegRel)):
        return atom_eval.satisfies_literal(structure, env, f)
    if isinstance(f, And):
        return _tarski(structure, env, f.left) and _tarski(structure, env, f.right)
    if isinstance(f, Or):
        return _tarski(structure, env, f.left) or _tarski(structure, env, f.right)
    if isinstance(f, Exists):
        return any(_tarski(structure, {**env, f.var.name: a}, f.body)
                   for a in structure.universe)
    if isinstance(f, Forall):
        return all(_tarski(structure, {**env, f.var.name: a}, f.body)
                   for a in structure.universe)
    raise StrategyError(f"not a first-order formula: {type(f).__name__}")


def eval_flat(structure: Structure, team: ProbabilisticTeam, f: Formula) -> Verdict:
    """Per-row Tarskian truth; sound and complete for pure first-order formulas."""
    f = expand_sugar(f)
    if not is_pure_fo(f):
        raise StrategyError("flat evaluation applies only to first-order formulas")
    for assignment, weight in team.rows:
        if weight == 0:
            continue
        env = dict(zip(team.domain, assignment))
        if not _tarski(structure, env, f):
            return _verdict(False, "flat", witness=assignment)
    return _verdict(True, "flat")


# --- the main dispatcher --------------------------------------------------------


def check(structure: Structure, team: ProbabilisticTeam, f: Formula,
          strategy: Strategy = Strategy.AUTO,
          config: SolverConfig | None = None) -> Verdict:
    """Decide whether the team satisfies the formula.

    The result is exact (never unknown) whenever every split or
    existential subtree compiles to a linear sentence; unknowns can only
    come from nonlinear sentences when no solver is configured or the
    solver gives up.
    """
    f = expand_sugar(f)
    if any(isinstance(g, PropLit) for g in subformulas(f)):
        raise InputError("propositional formulas must be routed through check_qpl")
    missing = free_vars(f) - set(team.domain)
    if missing:
        raise DomainError(
            f"formula mentions {sorted(missing)} outside the team domain {team.domain}")
    session = _Session(structure, config or SolverConfig(), strategy)
    if strategy is Strategy.FLAT:
        return eval_flat(structure, team, f)
    if strategy is Strategy.COMPILE:
        verdict = _by_compilation(session, team, f)
        return Verdict(verdict.value, tuple(session.trace), verdict.witness)
    verdict = _check(session, team, f)
    return Verdict(verdict.value, tuple(session.trace), verdict.witness)


def check_qpl(team: ProbabilisticTeam, f: Formula,
              strategy: Strategy = Strategy.AUTO,
              config: SolverConfig | None = None) -> Verdict:
    """Propositional formulas run over the fixed binary structure."""
    return check(BINARY_STRUCTURE, team, props_to_fo(expand_sugar(f)),
                 strategy, config)


def _check(session: _Session, team: ProbabilisticTeam, f: Formula) -> Verdict:
    structure = session.structure
    if isinstance(f, (VarEq, VarNeq, Rel, NegRel)):
        av = atom_eval.eval_fo_literal(structure, team, f)
        return _verdict(av.holds, "literal", av.witness)
    if isinstance(f, MarginalIdentity):
        av = atom_eval.eval_marginal_identity(
            team, _names(f.left), _names(f.right))
        return _verdict(av.holds, "atom", av.witness)
    if isinstance(f, MarginalEquiv):
        av = atom_eval.eval_marginal_equivalence(
            team, _names(f.left), _names(f.right))
        return _verdict(av.holds, "atom", av.witness)
    if isinstance(f, CondIndep):
        av = atom_eval.eval_conditional_independence(
            team, _names(f.cond), _names(f.left), _names(f.right))
        return _verdict(av.holds, "atom", av.witness)
    if isinstance(f, Dep):
        av = atom_eval.eval_dependence(
            team, _names(f.determinants), _names(f.dependents))
        return _verdict(av.holds, "atom", av.witness)
    if isinstance(f, ClassicalNeg):
        return _check(session, team, f.body).negated()
    if isinstance(f, And):
        left = _check(session, team, f.left)
        if left.is_false:
            return left
        right = _check(session, team, f.right)
        if right.is_false:
            return right
        if left.is_unknown or right.is_unknown:
            return Verdict(UNKNOWN, left.reason + right.reason)
        return Verdict(TRUE)
    if isinstance(f, Forall):
        extended = duplicate(team, structure.universe, f.var.name)
        session.note(f"forall {f.var.name}: uniform duplication")
        return _check(session, extended, f.body)
    if isinstance(f, (Or, Exists)):
        if is_pure_fo(f):
            session.note("first-order subtree: flat evaluation")
            return eval_flat(structure, team, f)
        return _continuous(session, team, f)
    raise InputError(f"cannot check {type(f).__name__} nodes")


def _names(vars: tuple[Var, ...]) -> tuple[str, ...]:
    return tuple(v.name for v in vars)


def _continuous(session: _Session, team: ProbabilisticTeam, f: Formula) -> Verdict:
    """Split or existential subtree: compile, then fall back to search."""
    scoped = restrict(team, free_vars(f))  # locality keeps the index space small
    if session.strategy is Strategy.DIRECT:
        raise StrategyError(
            "direct strategy cannot decide splits or existential quantifiers "
            "over dependency atoms")
    if session.strategy is not Strategy.WITNESS:
        verdict = _by_compilation(session, scoped, f)
        if not verdict.is_unknown:
            return verdict
        if session.strategy is Strategy.COMPILE:
            return verdict
        session.note("compilation inconclusive; trying witness search")
    found = witness_search(session.structure, scoped, f,
                           config=session.config,
                           split_cap=session.split_cap,
                           dirac_cap=session.dirac_cap)
    session.note(f"witness search: {found.value}")
    return found


def _by_compilation(session: _Session, team: ProbabilisticTeam,
                    f: Formula) -> Verdict:
    prepared = _make_compilable(f)
    sentence = compile_team_check(session.structure, team, prepared)
    verdict: SolverVerdict = solve(sentence, session.config)
    session.note(f"compiled subtree: {verdict.status}"
                 + (f" ({verdict.reason})" if verdict.reason else ""))
    if verdict.is_sat:
        return Verdict(TRUE, witness=verdict.model)
    if verdict.is_unsat:
        return Verdict(FALSE)
    return Verdict(UNKNOWN, (verdict.reason or "solver unknown",))


def _make_compilable(f: Formula) -> Formula:
    """The compiler refuses multiset-equivalence atoms; rewrite them away."""
    if any(isinstance(g, MarginalEquiv) for g in subformulas(f)):
        return lower(f, TargetLogic.COMPILABLE,
                     fresh=FreshNameSource.for_formula(f))
    return f


# --- witness search --------------------------------------------------------------


def witness_search(structure: Structure, team: ProbabilisticTeam, f: Formula,
                   config: SolverConfig | None = None,
                   split_cap: int = 4096, dirac_cap: int = 4096) -> Verdict:
    """Sound, incomplete search for split and extension witnesses.

    Splits are tried all-or-nothing by row (guard-directed first);
    existential witnesses range over value-functional (Dirac) choices
    plus the uniform one.  Returns true or unknown, never false.
    """
    f = expand_sugar(f)
    if not isinstance(f, (Or, Exists)):
        raise InputError("witness search applies to splits and existentials")
    session = _Session(structure, config or SolverConfig(), Strategy.WITNESS,
                       split_cap=split_cap, dirac_cap=dirac_cap)
    verdict = _search(session, compact(team), f)
    return Verdict(verdict.value, tuple(session.trace), verdict.witness)


def _sub_true(session: _Session, team: ProbabilisticTeam, g: Formula) -> bool:
    if isinstance(g, (Or, Exists)) and not is_pure_fo(g):
        return _search(session, compact(team), g).is_true
    return _check(session, team, g).is_true


def _search(session: _Session, team: ProbabilisticTeam, f: Formula) -> Verdict:
    if isinstance(f, Or):
        rows = [a for a in support(team)]
        guard_sets = _guard_subsets(session.structure, team, f)
        candidates = guard_sets + _all_subsets(rows, session.split_cap)
        seen = set()
        for left_rows in candidates:
            key = frozenset(left_rows)
            if key in seen:
                continue
            seen.add(key)
            left_team = _select(team, key)
            right_team = _select(team, set(rows) - key)
            if (_sub_true(session, left_team, f.left)
                    and _sub_true(session, right_team, f.right)):
                session.note(f"split witness: {sorted(key)} | rest")
                return Verdict(TRUE, witness=("split", tuple(sorted(key))))
        return Verdict(UNKNOWN, ("split search exhausted",))
    if isinstance(f, Exists):
        rows = sorted(support(team))
        universe = session.structure.universe
        if len(universe) ** len(rows) <= session.dirac_cap:
            assignments = itertools.product(universe, repeat=len(rows))
        else:
            assignments = iter(())
        extras = [{row: LocalDistribution.uniform(universe) for row in rows}]
        for values in assignments:
            choice = {row: LocalDistribution.dirac(v)
                      for row, v in zip(rows, values)}
            extended = extend(_select(team, set(rows)), choice, f.var.name)
            if _sub_true(session, extended, f.body):
                session.note(f"functional witness for {f.var.name}: {values}")
                return Verdict(TRUE, witness=("extension", dict(zip(rows, values))))
        for choice in extras:
            if not rows:
                break
            extended = extend(_select(team, set(rows)), choice, f.var.name)
            if _sub_true(session, extended, f.body):
                session.note(f"uniform witness for {f.var.name}")
                return Verdict(TRUE, witness=("extension", "uniform"))
        return Verdict(UNKNOWN, ("extension search exhausted",))
    raise InputError("witness search applies to splits and existentials")


def _select(team: ProbabilisticTeam, rows: set) -> ProbabilisticTeam:
    return ProbabilisticTeam.make(
        team.domain, [(a, w) for a, w in team.rows if a in rows and w > 0])


def _all_subsets(rows: list, cap: int):
    if 2 ** len(rows) > cap:
        return []
    out = []
    for size in range(len(rows) + 1):
        out.extend(set(combo) for combo in itertools.combinations(rows, size))
    return out


def _guard_subsets(structure: Structure, team: ProbabilisticTeam, f: Or):
    """Splits suggested by flat prefixes of the two disjuncts."""
    out = []
    for side, polarity in ((f.left, True), (f.right, False)):
        guard = _flat_prefix(side)
        if guard is None:
            continue
        chosen = set()
        for assignment, weight in team.rows:
            if weight == 0:
                continue
            env = dict(zip(team.domain, assignment))
            if _tarski(structure, env, guard) == polarity:
                chosen.add(assignment)
        out.append(chosen)
    return out


def _flat_prefix(f: Formula):
    """A pure first-order formula that bounds where the disjunct can hold."""
    if is_pure_fo(f):
        return f
    if isinstance(f, And):
        for side in (f.left, f.right):
            found = _flat_prefix(side)
            if found is not None:
                return found
    return None
