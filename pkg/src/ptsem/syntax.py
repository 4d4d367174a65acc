"""Formula ASTs for the dependency logics and their propositional variant.

Core nodes follow the negation-normal-form grammar: negation exists only
on first-order literals, and classical (contradictory) negation `~` is a
separate node allowed only in propositional mode.  A handful of sugar
nodes (tuple (dis)equality, bounded and constancy-constrained
quantifiers, guarded implication) expand into the core grammar via
`expand_sugar`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import InputError, UnsupportedSugarError

# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    """A named constant, resolved through the structure at evaluation time."""

    name: str


Term = Union[Var, Const]


# --- core formula nodes ----------------------------------------------------


@dataclass(frozen=True)
class VarEq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class VarNeq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class NegRel:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class PropLit:
    """Propositional literal; only in propositional (binary-team) mode."""

    name: str
    positive: bool = True


@dataclass(frozen=True)
class MarginalIdentity:
    """left ~ right: pointwise equal marginal distributions."""

    left: tuple[Var, ...]
    right: tuple[Var, ...]

    def __post_init__(self):
        if len(self.left) != len(self.right):
            raise InputError(
                "marginal identity atom needs tuples of equal length "
                f"({len(self.left)} vs {len(self.right)})")
        if not self.left:
            raise InputError("marginal identity atom over empty tuples")


@dataclass(frozen=True)
class MarginalEquiv:
    """left ~* right: equal multisets of positive marginal weights."""

    left: tuple[Var, ...]
    right: tuple[Var, ...]

    def __post_init__(self):
        if not self.left or not self.right:
            raise InputError("marginal equivalence atom over an empty tuple")


@dataclass(frozen=True)
class CondIndep:
    """left and right independent conditioned on cond (cond may be empty)."""

    cond: tuple[Var, ...]
    left: tuple[Var, ...]
    right: tuple[Var, ...]

    def __post_init__(self):
        if not self.left or not self.right:
            raise InputError("independence atom needs nonempty argument tuples")


@dataclass(frozen=True)
class Dep:
    """Functional dependence on the support; empty determinants = constancy."""

    determinants: tuple[Var, ...]
    dependents: tuple[Var, ...]

    def __post_init__(self):
        if not self.dependents:
            raise InputError("dependence atom needs a nonempty dependent tuple")


def Constancy(vars: tuple[Var, ...]) -> Dep:
    return Dep((), vars)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class ClassicalNeg:
    """Contradictory negation; propositional mode only."""

    body: "Formula"


# --- sugar nodes -----------------------------------------------------------


@dataclass(frozen=True)
class TupleEq:
    left: tuple[Term, ...]
    right: tuple[Term, ...]

    def __post_init__(self):
        if len(self.left) != len(self.right) or not self.left:
            raise InputError("tuple equality needs nonempty tuples of equal length")


@dataclass(frozen=True)
class TupleNeq:
    left: tuple[Term, ...]
    right: tuple[Term, ...]

    def __post_init__(self):
        if len(self.left) != len(self.right) or not self.left:
            raise InputError("tuple disequality needs nonempty tuples of equal length")


@dataclass(frozen=True)
class BoundedExists:
    var: Var
    choices: tuple[Term, ...]
    body: "Formula"


@dataclass(frozen=True)
class BoundedForall:
    var: Var
    choices: tuple[Term, ...]
    body: "Formula"


@dataclass(frozen=True)
class ConstExists:
    """Existential quantification of jointly constant, pairwise distinct vars."""

    vars: tuple[Var, ...]
    body: "Formula"


@dataclass(frozen=True)
class Implies:
    """guard -> conclusion, for guards built from literals with & and |."""

    guard: "Formula"
    conclusion: "Formula"


Formula = Union[
    VarEq, VarNeq, Rel, NegRel, PropLit,
    MarginalIdentity, MarginalEquiv, CondIndep, Dep,
    And, Or, Exists, Forall, ClassicalNeg,
    TupleEq, TupleNeq, BoundedExists, BoundedForall, ConstExists, Implies,
]

ATOM_NODES = (VarEq, VarNeq, Rel, NegRel, PropLit,
              MarginalIdentity, MarginalEquiv, CondIndep, Dep,
              TupleEq, TupleNeq)
DEPENDENCY_ATOMS = (MarginalIdentity, MarginalEquiv, CondIndep, Dep)
SUGAR_NODES = (TupleEq, TupleNeq, BoundedExists, BoundedForall, ConstExists, Implies)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction (matches the parser's associativity)."""
    parts = list(parts)
    if not parts:
        raise InputError("empty conjunction")
    out = parts[0]
    for part in parts[1:]:
        out = And(out, part)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise InputError("empty disjunction")
    out = parts[0]
    for part in parts[1:]:
        out = Or(out, part)
    return out


# --- traversal helpers -----------------------------------------------------


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall, BoundedExists, BoundedForall, ConstExists)):
        return (f.body,)
    if isinstance(f, ClassicalNeg):
        return (f.body,)
    if isinstance(f, Implies):
        return (f.guard, f.conclusion)
    return ()


def subformulas(f: Formula):
    yield f
    for child in children(f):
        yield from subformulas(child)


def node_count(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def _term_vars(terms: Iterable[Term]) -> set[str]:
    return {t.name for t in terms if isinstance(t, Var)}


def free_vars(f: Formula) -> frozenset[str]:
    """Free variables, with quantifiers binding as in first-order logic."""
    if isinstance(f, (VarEq, VarNeq)):
        return frozenset(_term_vars((f.lhs, f.rhs)))
    if isinstance(f, (Rel, NegRel)):
        return frozenset(_term_vars(f.args))
    if isinstance(f, PropLit):
        return frozenset({f.name})
    if isinstance(f, MarginalIdentity) or isinstance(f, MarginalEquiv):
        return frozenset(_term_vars(f.left) | _term_vars(f.right))
    if isinstance(f, CondIndep):
        return frozenset(_term_vars(f.cond) | _term_vars(f.left) | _term_vars(f.right))
    if isinstance(f, Dep):
        return frozenset(_term_vars(f.determinants) | _term_vars(f.dependents))
    if isinstance(f, (TupleEq, TupleNeq)):
        return frozenset(_term_vars(f.left) | _term_vars(f.right))
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var.name}
    if isinstance(f, (BoundedExists, BoundedForall)):
        return (free_vars(f.body) - {f.var.name}) | frozenset(_term_vars(f.choices))
    if isinstance(f, ConstExists):
        return free_vars(f.body) - {v.name for v in f.vars}
    if isinstance(f, ClassicalNeg):
        return free_vars(f.body)
    if isinstance(f, Implies):
        return free_vars(f.guard) | free_vars(f.conclusion)
    raise InputError(f"not a formula: {f!r}")


def is_pure_fo(f: Formula) -> bool:
    """True when the formula mentions no dependency atoms and no `~`."""
    return not any(isinstance(g, DEPENDENCY_ATOMS + (ClassicalNeg, PropLit))
                   for g in subformulas(f))


def has_sugar(f: Formula) -> bool:
    return any(isinstance(g, SUGAR_NODES) for g in subformulas(f))


# --- sugar expansion -------------------------------------------------------


def _literal_complement(f: Formula) -> Formula:
    """Negate a guard built from (dis)equality and relation literals."""
    if isinstance(f, VarEq):
        return VarNeq(f.lhs, f.rhs)
    if isinstance(f, VarNeq):
        return VarEq(f.lhs, f.rhs)
    if isinstance(f, Rel):
        return NegRel(f.name, f.args)
    if isinstance(f, NegRel):
        return Rel(f.name, f.args)
    if isinstance(f, PropLit):
        return PropLit(f.name, not f.positive)
    if isinstance(f, And):
        return Or(_literal_complement(f.left), _literal_complement(f.right))
    if isinstance(f, Or):
        return And(_literal_complement(f.left), _literal_complement(f.right))
    raise UnsupportedSugarError(
        f"implication guard must combine literals with & and |, found {type(f).__name__}")


def expand_sugar(f: Formula) -> Formula:
    """Rewrite sugar nodes into the core grammar.  Idempotent."""
    if isinstance(f, TupleEq):
        return conj(VarEq(l, r) for l, r in zip(f.left, f.right))
    if isinstance(f, TupleNeq):
        return disj(VarNeq(l, r) for l, r in zip(f.left, f.right))
    if isinstance(f, BoundedExists):
        body = expand_sugar(f.body)
        membership = disj(VarEq(f.var, c) for c in f.choices)
        return Exists(f.var, And(membership, body))
    if isinstance(f, BoundedForall):
        body = expand_sugar(f.body)
        outside = conj(VarNeq(f.var, c) for c in f.choices)
        membership = disj(VarEq(f.var, c) for c in f.choices)
        return Forall(f.var, Or(outside, And(membership, body)))
    if isinstance(f, ConstExists):
        body = expand_sugar(f.body)
        guards: list[Formula] = [Constancy((v,)) for v in f.vars]
        guards += [VarNeq(a, b)
                   for i, a in enumerate(f.vars) for b in f.vars[i + 1:]]
        inner: Formula = conj(guards + [body])
        for var in reversed(f.vars):
            inner = Exists(var, inner)
        return inner
    if isinstance(f, Implies):
        guard = expand_sugar(f.guard)
        return Or(_literal_complement(guard), expand_sugar(f.conclusion))
    if isinstance(f, And):
        return And(expand_sugar(f.left), expand_sugar(f.right))
    if isinstance(f, Or):
        return Or(expand_sugar(f.left), expand_sugar(f.right))
    if isinstance(f, Exists):
        return Exists(f.var, expand_sugar(f.body))
    if isinstance(f, Forall):
        return Forall(f.var, expand_sugar(f.body))
    if isinstance(f, ClassicalNeg):
        return ClassicalNeg(expand_sugar(f.body))
    return f


# --- printing --------------------------------------------------------------

_LEVEL_QUANT = 0
_LEVEL_IMPLIES = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_NEG = 4
_LEVEL_ATOM = 5


def _term_text(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"@{t.name}"


def _tuple_text(terms: Iterable[Term]) -> str:
    return "(" + ", ".join(_term_text(t) for t in terms) + ")"


def _bare_list(terms: Iterable[Term]) -> str:
    return ", ".join(_term_text(t) for t in terms)


def unparse(f: Formula) -> str:
    """Deterministic concrete syntax; parsing the result rebuilds `f`."""
    return _unparse(f, 0)


def _unparse(f: Formula, level: int) -> str:
    def wrap(text: str, own: int) -> str:
        return f"({text})" if own < level else text

    if isinstance(f, VarEq):
        return wrap(f"{_term_text(f.lhs)} = {_term_text(f.rhs)}", _LEVEL_ATOM)
    if isinstance(f, VarNeq):
        return wrap(f"{_term_text(f.lhs)} != {_term_text(f.rhs)}", _LEVEL_ATOM)
    if isinstance(f, Rel):
        return wrap(f"{f.name}({_bare_list(f.args)})", _LEVEL_ATOM)
    if isinstance(f, NegRel):
        return wrap(f"!{f.name}({_bare_list(f.args)})", _LEVEL_ATOM)
    if isinstance(f, PropLit):
        return wrap(f.name if f.positive else f"!{f.name}", _LEVEL_ATOM)
    if isinstance(f, MarginalIdentity):
        return wrap(f"{_tuple_text(f.left)} =~ {_tuple_text(f.right)}", _LEVEL_ATOM)
    if isinstance(f, MarginalEquiv):
        return wrap(f"{_tuple_text(f.left)} =~* {_tuple_text(f.right)}", _LEVEL_ATOM)
    if isinstance(f, CondIndep):
        cond = _bare_list(f.cond)
        cond = cond + " " if cond else ""
        return wrap(f"ci({cond}; {_bare_list(f.left)} ; {_bare_list(f.right)})",
                    _LEVEL_ATOM)
    if isinstance(f, Dep):
        if not f.determinants:
            return wrap(f"const({_bare_list(f.dependents)})", _LEVEL_ATOM)
        return wrap(f"dep({_bare_list(f.determinants)} ; {_bare_list(f.dependents)})",
                    _LEVEL_ATOM)
    if isinstance(f, TupleEq):
        return wrap(f"{_tuple_text(f.left)} = {_tuple_text(f.right)}", _LEVEL_ATOM)
    if isinstance(f, TupleNeq):
        return wrap(f"{_tuple_text(f.left)} != {_tuple_text(f.right)}", _LEVEL_ATOM)
    if isinstance(f, And):
        text = f"{_unparse(f.left, _LEVEL_AND)} & {_unparse(f.right, _LEVEL_AND + 1)}"
        return wrap(text, _LEVEL_AND)
    if isinstance(f, Or):
        text = f"{_unparse(f.left, _LEVEL_OR)} | {_unparse(f.right, _LEVEL_OR + 1)}"
        return wrap(text, _LEVEL_OR)
    if isinstance(f, Implies):
        text = (f"{_unparse(f.guard, _LEVEL_IMPLIES + 1)} -> "
                f"{_unparse(f.conclusion, _LEVEL_IMPLIES + 1)}")
        return wrap(text, _LEVEL_IMPLIES)
    if isinstance(f, Exists):
        return wrap(f"E {f.var.name}. {_unparse(f.body, _LEVEL_QUANT)}", _LEVEL_QUANT)
    if isinstance(f, Forall):
        return wrap(f"A {f.var.name}. {_unparse(f.body, _LEVEL_QUANT)}", _LEVEL_QUANT)
    if isinstance(f, BoundedExists):
        choices = ", ".join(_term_text(c) for c in f.choices)
        return wrap(f"E {f.var.name} in {{{choices}}}. {_unparse(f.body, _LEVEL_QUANT)}",
                    _LEVEL_QUANT)
    if isinstance(f, BoundedForall):
        choices = ", ".join(_term_text(c) for c in f.choices)
        return wrap(f"A {f.var.name} in {{{choices}}}. {_unparse(f.body, _LEVEL_QUANT)}",
                    _LEVEL_QUANT)
    if isinstance(f, ConstExists):
        names = " ".join(v.name for v in f.vars)
        return wrap(f"Ec {names}. {_unparse(f.body, _LEVEL_QUANT)}", _LEVEL_QUANT)
    if isinstance(f, ClassicalNeg):
        return wrap(f"~{_unparse(f.body, _LEVEL_NEG)}", _LEVEL_NEG)
    raise InputError(f"not a formula: {f!r}")


# --- propositional-to-first-order bridge ------------------------------------


def props_to_fo(f: Formula) -> Formula:
    """Replace each propositional literal p with P(p) over the binary structure."""
    if isinstance(f, PropLit):
        if f.positive:
            return Rel("P", (Var(f.name),))
        return NegRel("P", (Var(f.name),))
    if isinstance(f, And):
        return And(props_to_fo(f.left), props_to_fo(f.right))
    if isinstance(f, Or):
        return Or(props_to_fo(f.left), props_to_fo(f.right))
    if isinstance(f, Exists):
        return Exists(f.var, props_to_fo(f.body))
    if isinstance(f, Forall):
        return Forall(f.var, props_to_fo(f.body))
    if isinstance(f, ClassicalNeg):
        return ClassicalNeg(props_to_fo(f.body))
    if isinstance(f, (BoundedExists, BoundedForall)):
        return type(f)(f.var, f.choices, props_to_fo(f.body))
    if isinstance(f, ConstExists):
        return ConstExists(f.vars, props_to_fo(f.body))
    if isinstance(f, Implies):
        return Implies(props_to_fo(f.guard), props_to_fo(f.conclusion))
    return f
