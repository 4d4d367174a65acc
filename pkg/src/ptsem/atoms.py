"""Direct exact evaluation of dependency atoms and first-order literals.

Every evaluator works on the positive-weight part of the team and keeps
all arithmetic in exact rationals, so atom verdicts are never subject to
rounding.  Enumeration is restricted to value patterns that carry mass on
at least one side of the defining condition; all other patterns satisfy
it vacuously (both sides are zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError, InputError
from .team import ProbabilisticTeam, Structure, Value, Variable


@dataclass(frozen=True)
class AtomVerdict:
    """Result of one atom evaluation.

    `witness` describes a concrete violation when the failure is
    pointwise-witnessable: a value tuple, a variable assignment, or a
    pair of assignments, depending on the atom.  It is diagnostic only
    and not part of semantic equality.
    """

    holds: bool
    witness: Optional[object] = None

    def __bool__(self) -> bool:
        return self.holds


def _columns(team: ProbabilisticTeam, vars: tuple[Variable, ...]) -> list[int]:
    return [team.column(v) for v in vars]


def _positive_rows(team: ProbabilisticTeam):
    return [(a, w) for a, w in team.rows if w > 0]


def _marginal(team: ProbabilisticTeam, cols: list[int]) -> dict[tuple[Value, ...], Fraction]:
    """Weights of value patterns over the given columns, zeros omitted."""
    out: dict[tuple[Value, ...], Fraction] = {}
    for assignment, weight in team.rows:
        if weight == 0:
            continue
        key = tuple(assignment[c] for c in cols)
        out[key] = out.get(key, Fraction(0)) + weight
    return {k: w for k, w in out.items() if w > 0}


def eval_marginal_identity(team: ProbabilisticTeam, x: tuple[Variable, ...],
                           y: tuple[Variable, ...]) -> AtomVerdict:
    """x ~ y: the two tuples induce pointwise identical marginal weights."""
    if len(x) != len(y):
        raise InputError(
            f"marginal identity needs tuples of equal length, got {len(x)} and {len(y)}")
    mx = _marginal(team, _columns(team, x))
    my = _marginal(team, _columns(team, y))
    for pattern in sorted(set(mx) | set(my)):
        if mx.get(pattern, Fraction(0)) != my.get(pattern, Fraction(0)):
            return AtomVerdict(False, witness=pattern)
    return AtomVerdict(True)


def eval_marginal_equivalence(team: ProbabilisticTeam, x: tuple[Variable, ...],
                              y: tuple[Variable, ...]) -> AtomVerdict:
    """x ~* y: the multisets of positive marginal weights coincide."""
    if not x or not y:
        raise InputError("marginal equivalence over an empty tuple is not defined")
    mx = sorted(_marginal(team, _columns(team, x)).values())
    my = sorted(_marginal(team, _columns(team, y)).values())
    return AtomVerdict(mx == my)


def eval_conditional_independence(team: ProbabilisticTeam, x: tuple[Variable, ...],
                                  y: tuple[Variable, ...],
                                  z: tuple[Variable, ...]) -> AtomVerdict:
    """y and z independent given x, by the product-of-marginals condition.

    For every assignment s over the variables of x, y, z:

        w(xy = s) * w(xz = s)  =  w(xyz = s) * w(x = s).

    It is enough to test the patterns obtained by merging an occurring
    xy-pattern with a consistent occurring xz-pattern: any other
    assignment zeroes both sides.
    """
    if not y or not z:
        raise InputError("independence atom needs nonempty variable tuples")
    xy_vars = _var_union(x, y)
    xz_vars = _var_union(x, z)
    xyz_vars = _var_union(xy_vars, z)
    m_xy = _marginal(team, _columns(team, xy_vars))
    m_xz = _marginal(team, _columns(team, xz_vars))
    m_xyz = _marginal(team, _columns(team, xyz_vars))
    m_x = _marginal(team, _columns(team, _var_union(x, ())))

    xz_by_xpart: dict[tuple[Value, ...], list[tuple[Value, ...]]] = {}
    x_pos_in_xz = [xz_vars.index(v) for v in _var_union(x, ())]
    for pattern in m_xz:
        key = tuple(pattern[i] for i in x_pos_in_xz)
        xz_by_xpart.setdefault(key, []).append(pattern)

    x_pos_in_xy = [xy_vars.index(v) for v in _var_union(x, ())]
    shared = [v for v in xy_vars if v in xz_vars]
    for xy_pattern in sorted(m_xy):
        xkey = tuple(xy_pattern[i] for i in x_pos_in_xy)
        for xz_pattern in sorted(xz_by_xpart.get(xkey, [])):
            merged = dict(zip(xy_vars, xy_pattern))
            consistent = True
            for var, val in zip(xz_vars, xz_pattern):
                if var in shared and merged.get(var, val) != val:
                    consistent = False
                    break
                merged[var] = val
            if not consistent:
                continue
            s = tuple(merged[v] for v in xyz_vars)
            lhs = m_xy[xy_pattern] * m_xz[xz_pattern]
            rhs = (m_xyz.get(s, Fraction(0))
                   * m_x.get(tuple(merged[v] for v in _var_union(x, ())), Fraction(0)))
            if lhs != rhs:
                return AtomVerdict(False, witness=dict(zip(xyz_vars, s)))
    return AtomVerdict(True)


def _var_union(*tuples: tuple[Variable, ...]) -> tuple[Variable, ...]:
    """Variables of the concatenation, first occurrence order, no repeats."""
    seen: list[Variable] = []
    for tup in tuples:
        for v in tup:
            if v not in seen:
                seen.append(v)
    return tuple(seen)


def eval_dependence(team: ProbabilisticTeam, x: tuple[Variable, ...],
                    y: tuple[Variable, ...]) -> AtomVerdict:
    """dep(x; y): on the support, equal x-values force equal y-values.

    Empty x is the constancy reading: y takes a single value on the
    support.
    """
    if not y:
        raise InputError("dependence atom needs a nonempty dependent tuple")
    x_cols = _columns(team, x)
    y_cols = _columns(team, y)
    rows = _positive_rows(team)
    by_x: dict[tuple[Value, ...], tuple[tuple[Value, ...], tuple[Value, ...]]] = {}
    for assignment, _ in rows:
        xv = tuple(assignment[c] for c in x_cols)
        yv = tuple(assignment[c] for c in y_cols)
        if xv in by_x:
            first_assignment, first_yv = by_x[xv]
            if first_yv != yv:
                return AtomVerdict(False, witness=(first_assignment, assignment))
        else:
            by_x[xv] = (assignment, yv)
    return AtomVerdict(True)


def eval_fo_literal(structure: Structure, team: ProbabilisticTeam, lit) -> AtomVerdict:
    """A first-order literal holds iff every positive-weight row satisfies it."""
    from . import syntax  # deferred: syntax imports team, not atoms

    if not isinstance(lit, (syntax.VarEq, syntax.VarNeq, syntax.Rel, syntax.NegRel)):
        raise InputError(f"not a first-order literal: {lit!r}")
    for assignment, weight in team.rows:
        if weight == 0:
            continue
        env = dict(zip(team.domain, assignment))
        if not satisfies_literal(structure, env, lit):
            return AtomVerdict(False, witness=assignment)
    return AtomVerdict(True)


def term_value(structure: Structure, env: dict[Variable, Value], term) -> Value:
    from . import syntax

    if isinstance(term, syntax.Var):
        if term.name not in env:
            raise DomainError(f"variable {term.name!r} unbound")
        return env[term.name]
    if isinstance(term, syntax.Const):
        return structure.constant(term.name)
    raise InputError(f"not a term: {term!r}")


def satisfies_literal(structure: Structure, env: dict[Variable, Value], lit) -> bool:
    """Tarskian truth of one literal under a single assignment."""
    from . import syntax

    if isinstance(lit, syntax.VarEq):
        return term_value(structure, env, lit.lhs) == term_value(structure, env, lit.rhs)
    if isinstance(lit, syntax.VarNeq):
        return term_value(structure, env, lit.lhs) != term_value(structure, env, lit.rhs)
    if isinstance(lit, syntax.Rel):
        args = tuple(term_value(structure, env, t) for t in lit.args)
        return args in structure.relation(lit.name)
    if isinstance(lit, syntax.NegRel):
        args = tuple(term_value(structure, env, t) for t in lit.args)
        return args not in structure.relation(lit.name)
    raise InputError(f"not a first-order literal: {lit!r}")
