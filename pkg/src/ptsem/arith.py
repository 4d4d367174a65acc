"""Compilation of team-semantic satisfaction into real arithmetic.

A formula over n propositions is mapped to a first-order sentence over
(R, +, *, <=, 0, 1): one weight variable per propositional assignment,
with each connective introducing a fresh family of weight variables tied
to the previous one by nonnegativity and sum constraints.  The same
machinery, re-indexed over an arbitrary finite universe and seeded with
a concrete team's weights as constants, decides whether a given team
satisfies a formula.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import DomainError, InputError
from . import syntax
from .syntax import (And, ClassicalNeg, CondIndep, Const, Dep, Exists, Forall,
                     Formula, MarginalEquiv, MarginalIdentity, NegRel, Or,
                     PropLit, Rel, Var, VarEq, VarNeq, free_vars, has_sugar,
                     subformulas, DEPENDENCY_ATOMS)
from .team import ProbabilisticTeam, Structure, Value


def _is_flat(f: Formula) -> bool:
    """No dependency atoms and no classical negation anywhere below."""
    return not any(isinstance(g, DEPENDENCY_ATOMS + (ClassicalNeg,))
                   for g in subformulas(f))

# --- arithmetic terms and formulas ------------------------------------------


@dataclass(frozen=True)
class WVar:
    name: str


@dataclass(frozen=True)
class RatConst:
    value: Fraction


@dataclass(frozen=True)
class Add:
    parts: tuple["ArithTerm", ...]


@dataclass(frozen=True)
class Mul:
    parts: tuple["ArithTerm", ...]


ArithTerm = Union[WVar, RatConst, Add, Mul]

ZERO = RatConst(Fraction(0))
ONE = RatConst(Fraction(1))


@dataclass(frozen=True)
class Eq:
    lhs: ArithTerm
    rhs: ArithTerm


@dataclass(frozen=True)
class Leq:
    lhs: ArithTerm
    rhs: ArithTerm


@dataclass(frozen=True)
class Not:
    body: "ArithFormula"


@dataclass(frozen=True)
class AndF:
    parts: tuple["ArithFormula", ...]


@dataclass(frozen=True)
class OrF:
    parts: tuple["ArithFormula", ...]


@dataclass(frozen=True)
class ExistsR:
    vars: tuple[str, ...]
    body: "ArithFormula"


@dataclass(frozen=True)
class ForallR:
    vars: tuple[str, ...]
    body: "ArithFormula"


ArithFormula = Union[Eq, Leq, Not, AndF, OrF, ExistsR, ForallR]

TRUE = AndF(())
FALSE = OrF(())


def conj_f(parts: Iterable[ArithFormula]) -> ArithFormula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else AndF(parts)


def add(parts: Iterable[ArithTerm]) -> ArithTerm:
    parts = tuple(parts)
    if not parts:
        return ZERO
    return parts[0] if len(parts) == 1 else Add(parts)


def term_vars(term: ArithTerm) -> set[str]:
    if isinstance(term, WVar):
        return {term.name}
    if isinstance(term, RatConst):
        return set()
    return set().union(*(term_vars(p) for p in term.parts))


def formula_weight_vars(phi: ArithFormula) -> set[str]:
    if isinstance(phi, (Eq, Leq)):
        return term_vars(phi.lhs) | term_vars(phi.rhs)
    if isinstance(phi, Not):
        return formula_weight_vars(phi.body)
    if isinstance(phi, (AndF, OrF)):
        return set().union(set(), *(formula_weight_vars(p) for p in phi.parts))
    return set(phi.vars) | formula_weight_vars(phi.body)


def quantified_var_count(phi: ArithFormula) -> int:
    """Number of weight variables introduced anywhere in the sentence."""
    if isinstance(phi, (Eq, Leq)):
        return 0
    if isinstance(phi, Not):
        return quantified_var_count(phi.body)
    if isinstance(phi, (AndF, OrF)):
        return sum(quantified_var_count(p) for p in phi.parts)
    return len(phi.vars) + quantified_var_count(phi.body)


def _term_is_linear(term: ArithTerm) -> bool:
    if isinstance(term, (WVar, RatConst)):
        return True
    if isinstance(term, Add):
        return all(_term_is_linear(p) for p in term.parts)
    # a product stays linear when at most one factor mentions a variable
    symbolic = [p for p in term.parts if term_vars(p)]
    return len(symbolic) <= 1 and all(_term_is_linear(p) for p in term.parts)


def is_linear(phi: ArithFormula) -> bool:
    """Multiplication-free up to constant scaling: decidable internally."""
    if isinstance(phi, (Eq, Leq)):
        return _term_is_linear(phi.lhs) and _term_is_linear(phi.rhs)
    if isinstance(phi, Not):
        return is_linear(phi.body)
    if isinstance(phi, (AndF, OrF)):
        return all(is_linear(p) for p in phi.parts)
    return is_linear(phi.body)


# --- weight-variable stages ---------------------------------------------------

_PLAIN_TOKEN = re.compile(r"[0-9A-Za-z]")


@dataclass(frozen=True)
class Stage:
    """A family of arithmetic terms indexed by assignments over `vars`.

    Only indices reachable with possibly-nonzero weight are stored; all
    others are identically zero.  `parent` links the stage this one was
    built from; `extension` marks quantifier stages, which preserve every
    marginal over the previous variable tuple (splits do not, so they
    act as barriers when older stages stand in for newer ones).
    """

    vars: tuple[str, ...]
    values: tuple[Value, ...]  # shared universe, sorted
    family: Mapping[tuple[Value, ...], ArithTerm]
    parent: "Stage | None" = None
    extension: bool = False
    introduced: str | None = None  # variable the extension (re)bound

    def indices(self):
        return self.family.keys()

    def marginal(self, on: Sequence[str], at: Sequence[Value]) -> ArithTerm:
        cols = [self.vars.index(v) for v in on]
        matching = [term for idx, term in self.family.items()
                    if all(idx[c] == val for c, val in zip(cols, at))]
        return add(matching)

    def buckets(self, on: Sequence[str]) -> dict[tuple[Value, ...], ArithTerm]:
        """All live value patterns of `on`, each with its marginal sum."""
        cols = [self.vars.index(v) for v in on]
        grouped: dict[tuple[Value, ...], list[ArithTerm]] = {}
        for idx, term in self.family.items():
            grouped.setdefault(tuple(idx[c] for c in cols), []).append(term)
        return {pattern: add(terms) for pattern, terms in grouped.items()}


def _index_text(values: tuple[Value, ...], universe: tuple[Value, ...]) -> str:
    if all(len(v) == 1 and _PLAIN_TOKEN.fullmatch(v) for v in universe):
        return "".join(values)
    return "_".join(str(universe.index(v)) for v in values)


class Compiler:
    """Carries the fresh-stage counter so variable names are deterministic.

    With `optimize` set (the team-check entry point), dependency-free
    subtrees compile to per-index zero pins instead of split stages, and
    atoms are constrained on the earliest quantifier stage that covers
    their variables.  The propositional entry points keep the plain
    case-per-connective translation, whose stage sizes are part of the
    published interface.
    """

    def __init__(self, universe: tuple[Value, ...], structure: Structure | None = None,
                 optimize: bool = False):
        self.universe = tuple(sorted(universe))
        self.structure = structure
        self.optimize = optimize
        self.stage_count = 0

    def full_stage(self, vars: tuple[str, ...], tag: str) -> Stage:
        family = {}
        for idx in itertools.product(self.universe, repeat=len(vars)):
            family[idx] = WVar(f"w_{tag}_{_index_text(idx, self.universe)}")
        return Stage(vars, self.universe, family)

    def next_tags(self, pair: bool) -> tuple[str, ...]:
        self.stage_count += 1
        if pair:
            return (f"t{self.stage_count}", f"r{self.stage_count}")
        return (f"t{self.stage_count}",)

    def covering_stage(self, stage: Stage, needed: set[str]) -> Stage:
        """The earliest extension-ancestor still mentioning all of `needed`.

        Quantifier extensions leave the joint distribution of the older
        variables untouched, so an atom over those variables can be
        constrained on the smaller family.  A stage that (re)binds a
        needed variable, or any split, stops the ascent.
        """
        best = stage
        current = stage
        while (current.extension and current.parent is not None
               and current.introduced not in needed):
            current = current.parent
            if needed <= set(current.vars):
                best = current
        return best

    # -- literal satisfaction per index ------------------------------------

    def literal_fails(self, lit, vars: tuple[str, ...], idx: tuple[Value, ...]) -> bool:
        return not self._flat_satisfies(dict(zip(vars, idx)), lit)

    def _flat_satisfies(self, env: dict[str, Value], f: Formula) -> bool:
        """Tarskian truth of a dependency-free formula at one assignment."""
        if isinstance(f, PropLit):
            return (env[f.name] == "1") == f.positive
        if isinstance(f, (VarEq, VarNeq, Rel, NegRel)):
            from .atoms import satisfies_literal
            if self.structure is None:
                raise InputError("first-order literals need a structure")
            return satisfies_literal(self.structure, env, f)
        if isinstance(f, And):
            return (self._flat_satisfies(env, f.left)
                    and self._flat_satisfies(env, f.right))
        if isinstance(f, Or):
            return (self._flat_satisfies(env, f.left)
                    or self._flat_satisfies(env, f.right))
        if isinstance(f, Exists):
            return any(self._flat_satisfies({**env, f.var.name: a}, f.body)
                       for a in self.universe)
        if isinstance(f, Forall):
            return all(self._flat_satisfies({**env, f.var.name: a}, f.body)
                       for a in self.universe)
        raise InputError(f"not a flat formula: {type(f).__name__}")

    # -- the translation ----------------------------------------------------

    def star(self, f: Formula, stage: Stage) -> ArithFormula:
        literal = isinstance(f, (PropLit, VarEq, VarNeq, Rel, NegRel))
        if literal or (self.optimize and _is_flat(f)):
            # Dependency-free subtrees hold exactly when every positive row
            # satisfies them, so they pin the falsifying indices to zero
            # instead of spawning split stages.
            zeros = [Eq(term, ZERO) for idx, term in stage.family.items()
                     if not self._flat_satisfies(dict(zip(stage.vars, idx)), f)]
            return AndF(tuple(zeros))
        if isinstance(f, MarginalIdentity):
            return self._identity(f, self._atom_stage(f, stage))
        if isinstance(f, MarginalEquiv):
            raise InputError(
                "marginal distribution equivalence has no direct arithmetic "
                "translation; rewrite it into identity and dependence first")
        if isinstance(f, CondIndep):
            return self._independence(f, self._atom_stage(f, stage))
        if isinstance(f, Dep):
            return self._dependence(f, self._atom_stage(f, stage))
        if isinstance(f, ClassicalNeg):
            return Not(self.star(f.body, stage))
        if isinstance(f, And):
            return AndF((self.star(f.left, stage), self.star(f.right, stage)))
        if isinstance(f, Or):
            return self._split(f, stage)
        if isinstance(f, Exists):
            return self._quantifier(f.var.name, f.body, stage, uniform=False)
        if isinstance(f, Forall):
            return self._quantifier(f.var.name, f.body, stage, uniform=True)
        raise InputError(f"cannot compile {type(f).__name__} nodes")

    def _atom_stage(self, atom, stage: Stage) -> Stage:
        needed = set(free_vars(atom))
        for name in sorted(needed):
            if name not in stage.vars:
                raise DomainError(f"variable {name!r} is not in scope here")
        return self.covering_stage(stage, needed) if self.optimize else stage

    def _identity(self, f: MarginalIdentity, stage: Stage) -> ArithFormula:
        left = stage.buckets([v.name for v in f.left])
        right = stage.buckets([v.name for v in f.right])
        eqs = [Eq(left.get(at, ZERO), right.get(at, ZERO))
               for at in sorted(set(left) | set(right))]
        return AndF(tuple(eqs))

    def _independence(self, f: CondIndep, stage: Stage) -> ArithFormula:
        cond = [v.name for v in f.cond]
        left = [v.name for v in f.left]
        right = [v.name for v in f.right]
        mentioned: list[str] = []
        for v in cond + left + right:
            if v not in mentioned:
                mentioned.append(v)
        # Any value pattern with weight on both the cond+left and the
        # cond+right side yields a nontrivial product equation; elsewhere
        # both sides of the equation vanish.
        cl = cond + [v for v in left if v not in cond]
        cr_vars = cond + [v for v in right if v not in cond]
        m_cl = stage.buckets(cl)
        m_cr = stage.buckets(cr_vars)
        m_all = stage.buckets(mentioned)
        m_c = stage.buckets(cond)
        eqs = []
        seen = set()
        for cl_pattern in sorted(m_cl):
            env = dict(zip(cl, cl_pattern))
            for cr_pattern in sorted(m_cr):
                cr_env = dict(zip(cr_vars, cr_pattern))
                if any(env.get(v, cr_env[v]) != cr_env[v] for v in cr_vars):
                    continue
                merged = {**env, **cr_env}
                key = tuple(merged[v] for v in mentioned)
                if key in seen:
                    continue
                seen.add(key)
                def at(names):
                    return tuple(merged[n] for n in names)
                lhs = Mul((m_cl[cl_pattern], m_cr[cr_pattern]))
                rhs = Mul((m_all.get(key, ZERO), m_c.get(at(cond), ZERO)))
                eqs.append(Eq(lhs, rhs))
        return AndF(tuple(eqs))

    def _dependence(self, f: Dep, stage: Stage) -> ArithFormula:
        det_cols = [stage.vars.index(v.name) for v in f.determinants]
        dep_cols = [stage.vars.index(v.name) for v in f.dependents]
        clauses = []
        indices = sorted(stage.family)
        for pos, i in enumerate(indices):
            for j in indices[pos + 1:]:
                if (all(i[c] == j[c] for c in det_cols)
                        and any(i[c] != j[c] for c in dep_cols)):
                    clauses.append(OrF((Eq(stage.family[i], ZERO),
                                        Eq(stage.family[j], ZERO))))
        return AndF(tuple(clauses))

    def _split(self, f: Or, stage: Stage) -> ArithFormula:
        left_tag, right_tag = self.next_tags(pair=True)
        live = sorted(stage.family)
        left_family = {idx: WVar(f"w_{left_tag}_{_index_text(idx, self.universe)}")
                       for idx in live}
        right_family = {idx: WVar(f"w_{right_tag}_{_index_text(idx, self.universe)}")
                        for idx in live}
        left_stage = Stage(stage.vars, self.universe, left_family, stage, False)
        right_stage = Stage(stage.vars, self.universe, right_family, stage, False)
        constraints: list[ArithFormula] = []
        for idx in live:
            lt = left_family[idx]
            rt = right_family[idx]
            constraints.append(Leq(ZERO, lt))
            constraints.append(Leq(ZERO, rt))
            constraints.append(Eq(stage.family[idx], Add((lt, rt))))
        body = AndF(tuple(constraints)
                    + (self.star(f.left, left_stage),
                       self.star(f.right, right_stage)))
        names = tuple(left_family[idx].name for idx in live)
        names += tuple(right_family[idx].name for idx in live)
        return ExistsR(names, body) if names else body

    def _quantifier(self, var: str, body: Formula, stage: Stage,
                    uniform: bool) -> ArithFormula:
        (tag,) = self.next_tags(pair=False)
        kept = tuple(v for v in stage.vars if v != var)
        kept_cols = [stage.vars.index(v) for v in kept]
        stems = sorted({tuple(idx[c] for c in kept_cols) for idx in stage.family})
        family = {}
        for stem in stems:
            for a in self.universe:
                idx = stem + (a,)
                family[idx] = WVar(f"w_{tag}_{_index_text(idx, self.universe)}")
        new_stage = Stage(kept + (var,), self.universe, family, stage, True, var)
        group = stage.buckets(kept)
        constraints: list[ArithFormula] = []
        for idx in family:
            constraints.append(Leq(ZERO, family[idx]))
        for stem in stems:
            branch = [family[stem + (a,)] for a in self.universe]
            constraints.append(Eq(add(tuple(branch)), group[stem]))
            if uniform:
                for extra in branch[1:]:
                    constraints.append(Eq(extra, branch[0]))
        names = tuple(family[idx].name for idx in family)
        inner = AndF(tuple(constraints) + (self.star(body, new_stage),))
        return ExistsR(names, inner) if names else inner


# --- entry points -------------------------------------------------------------


def _declared_props(f: Formula, props: Sequence[str] | None) -> tuple[str, ...]:
    free = free_vars(f)
    if props is None:
        return tuple(sorted(free))
    declared = tuple(props)
    missing = free - set(declared)
    if missing:
        raise InputError(
            f"free variables {sorted(missing)} missing from declared tuple {declared}")
    if len(set(declared)) != len(declared):
        raise InputError("declared variable tuple contains repeats")
    return declared


def _check_compilable(f: Formula):
    if has_sugar(f):
        raise InputError("expand sugar before compiling")
    for g in syntax.subformulas(f):
        if isinstance(g, MarginalEquiv):
            raise InputError(
                "marginal distribution equivalence has no direct arithmetic "
                "translation; rewrite it into identity and dependence first")


def _outer(compiler: Compiler, props: tuple[str, ...]) -> Stage:
    return compiler.full_stage(props, "s")


def _team_conditions(stage: Stage, include_empty: bool) -> list[ArithFormula]:
    conditions: list[ArithFormula] = [Leq(ZERO, t) for t in stage.family.values()]
    if not include_empty:
        total = add(tuple(stage.family.values()))
        conditions.append(Not(Eq(ZERO, total)))
    return conditions


def compile_sat(f: Formula, props: Sequence[str] | None = None) -> ArithFormula:
    """Satisfiability by some nonempty binary team, as an existential sentence."""
    _check_compilable(f)
    names = _declared_props(f, props)
    compiler = Compiler(("0", "1"))
    stage = _outer(compiler, names)
    body = AndF(tuple(_team_conditions(stage, include_empty=False))
                + (compiler.star(f, stage),))
    return ExistsR(tuple(t.name for t in stage.family.values()), body)


def compile_validity(f: Formula, props: Sequence[str] | None = None,
                     include_empty_team: bool = False) -> ArithFormula:
    """Truth on every (by default nonempty) binary team, as a universal sentence."""
    _check_compilable(f)
    names = _declared_props(f, props)
    compiler = Compiler(("0", "1"))
    stage = _outer(compiler, names)
    premise = AndF(tuple(_team_conditions(stage, include_empty_team)))
    body = OrF((Not(premise), compiler.star(f, stage)))
    return ForallR(tuple(t.name for t in stage.family.values()), body)


def compile_implication(assumptions: Sequence[Formula], goal: Formula,
                        props: Sequence[str]) -> ArithFormula:
    """Every distribution satisfying all assumptions satisfies the goal."""
    for g in list(assumptions) + [goal]:
        _check_compilable(g)
        extra = free_vars(g) - set(props)
        if extra:
            raise InputError(
                f"statement mentions {sorted(extra)} outside the declared "
                f"variables {tuple(props)}")
    compiler = Compiler(("0", "1"))
    stage = _outer(compiler, tuple(props))
    premise = AndF(tuple(_team_conditions(stage, include_empty=False))
                   + tuple(compiler.star(a, stage) for a in assumptions))
    body = OrF((Not(premise), compiler.star(goal, stage)))
    return ForallR(tuple(t.name for t in stage.family.values()), body)


def compile_team_check(structure: Structure, team: ProbabilisticTeam,
                       f: Formula) -> ArithFormula:
    """Does this concrete team satisfy the formula?

    The outermost weight family is fixed to the team's exact weights;
    only the families introduced by splits and quantifiers remain
    existential, so the sentence is existential overall.
    """
    _check_compilable(f)
    missing = free_vars(f) - set(team.domain)
    if missing:
        raise InputError(
            f"formula mentions {sorted(missing)} outside the team domain "
            f"{team.domain}")
    for token in team.values_seen():
        if token not in structure.universe:
            raise InputError(
                f"team value {token!r} does not occur in the structure universe")
    compiler = Compiler(structure.universe, structure, optimize=True)
    family = {assignment: RatConst(weight)
              for assignment, weight in sorted(team.rows) if weight > 0}
    stage = Stage(tuple(team.domain), compiler.universe, family)
    return compiler.star(f, stage)


# --- SMT-LIB emission ---------------------------------------------------------


def _smt_term(term: ArithTerm) -> str:
    if isinstance(term, WVar):
        return term.name
    if isinstance(term, RatConst):
        value = term.value
        if value.denominator == 1:
            return str(value.numerator) if value >= 0 else f"(- {-value.numerator})"
        text = f"(/ {abs(value.numerator)} {value.denominator})"
        return text if value >= 0 else f"(- {text})"
    if isinstance(term, Add):
        if not term.parts:
            return "0"
        if len(term.parts) == 1:
            return _smt_term(term.parts[0])
        return "(+ " + " ".join(_smt_term(p) for p in term.parts) + ")"
    if not term.parts:
        return "1"
    if len(term.parts) == 1:
        return _smt_term(term.parts[0])
    return "(* " + " ".join(_smt_term(p) for p in term.parts) + ")"


def _smt_formula(phi: ArithFormula) -> str:
    if isinstance(phi, Eq):
        return f"(= {_smt_term(phi.lhs)} {_smt_term(phi.rhs)})"
    if isinstance(phi, Leq):
        return f"(<= {_smt_term(phi.lhs)} {_smt_term(phi.rhs)})"
    if isinstance(phi, Not):
        return f"(not {_smt_formula(phi.body)})"
    if isinstance(phi, AndF):
        if not phi.parts:
            return "true"
        if len(phi.parts) == 1:
            return _smt_formula(phi.parts[0])
        return "(and " + " ".join(_smt_formula(p) for p in phi.parts) + ")"
    if isinstance(phi, OrF):
        if not phi.parts:
            return "false"
        if len(phi.parts) == 1:
            return _smt_formula(phi.parts[0])
        return "(or " + " ".join(_smt_formula(p) for p in phi.parts) + ")"
    binder = "exists" if isinstance(phi, ExistsR) else "forall"
    bound = " ".join(f"({v} Real)" for v in phi.vars)
    return f"({binder} ({bound}) {_smt_formula(phi.body)})"


def emit_smtlib(phi: ArithFormula, get_model: bool = False) -> str:
    """Deterministic SMT-LIB 2 script deciding the closed sentence.

    The outermost existential block becomes global declarations so that
    solvers can report a model for it.
    """
    logic = "LRA" if is_linear(phi) else "NRA"
    lines = []
    if get_model:
        lines.append("(set-option :produce-models true)")
    lines.append(f"(set-logic {logic})")
    body = phi
    if isinstance(phi, ExistsR):
        for name in phi.vars:
            lines.append(f"(declare-const {name} Real)")
        body = phi.body
    lines.append(f"(assert {_smt_formula(body)})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# --- strict {+, *, <=, 0, 1} vocabulary ----------------------------------------


def _int_term(n: int) -> ArithTerm:
    """Build the integer n >= 0 from 0 and 1 with + and * (log size)."""
    if n == 0:
        return ZERO
    if n == 1:
        return ONE
    half = _int_term(n // 2)
    doubled = Mul((Add((ONE, ONE)), half))
    return Add((doubled, ONE)) if n % 2 else doubled


def encode_constants(phi: ArithFormula) -> ArithFormula:
    """Eliminate rational constants other than 0 and 1.

    Each distinct constant p/q becomes an existentially quantified
    variable pinned by q*v = p, with p and q spelled out from 1 by
    doubling, so the sentence speaks the bare {+, *, <=, 0, 1} language.
    """
    constants: list[Fraction] = []

    def scan_term(term: ArithTerm):
        if isinstance(term, RatConst):
            if term.value not in (0, 1) and term.value not in constants:
                constants.append(term.value)
        elif isinstance(term, (Add, Mul)):
            for part in term.parts:
                scan_term(part)

    def scan(phi: ArithFormula):
        if isinstance(phi, (Eq, Leq)):
            scan_term(phi.lhs)
            scan_term(phi.rhs)
        elif isinstance(phi, Not):
            scan(phi.body)
        elif isinstance(phi, (AndF, OrF)):
            for part in phi.parts:
                scan(part)
        else:
            scan(phi.body)

    scan(phi)
    if not constants:
        return phi
    names = {c: f"w_const_{i}" for i, c in enumerate(sorted(constants))}

    def rep_term(term: ArithTerm) -> ArithTerm:
        if isinstance(term, RatConst):
            return WVar(names[term.value]) if term.value in names else term
        if isinstance(term, Add):
            return Add(tuple(rep_term(p) for p in term.parts))
        if isinstance(term, Mul):
            return Mul(tuple(rep_term(p) for p in term.parts))
        return term

    def rep(phi: ArithFormula) -> ArithFormula:
        if isinstance(phi, Eq):
            return Eq(rep_term(phi.lhs), rep_term(phi.rhs))
        if isinstance(phi, Leq):
            return Leq(rep_term(phi.lhs), rep_term(phi.rhs))
        if isinstance(phi, Not):
            return Not(rep(phi.body))
        if isinstance(phi, AndF):
            return AndF(tuple(rep(p) for p in phi.parts))
        if isinstance(phi, OrF):
            return OrF(tuple(rep(p) for p in phi.parts))
        if isinstance(phi, ExistsR):
            return ExistsR(phi.vars, rep(phi.body))
        return ForallR(phi.vars, rep(phi.body))

    pins = []
    for c in sorted(constants):
        var: ArithTerm = WVar(names[c])
        lhs = Mul((_int_term(c.denominator), var))
        if c < 0:
            lhs = Add((lhs, _int_term(abs(c.numerator))))
            pins.append(Eq(lhs, ZERO))
        else:
            pins.append(Eq(lhs, _int_term(c.numerator)))

    replaced = rep(phi)
    if isinstance(replaced, ExistsR):
        return ExistsR(tuple(names[c] for c in sorted(constants)) + replaced.vars,
                       AndF(tuple(pins) + (replaced.body,)))
    return ExistsR(tuple(names[c] for c in sorted(constants)),
                   AndF(tuple(pins) + (replaced,)))
