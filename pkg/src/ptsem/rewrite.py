"""Source-to-source translations between the dependency logics.

Each pass replaces one atom kind by a provably equivalent formula over a
different atom vocabulary, introducing fresh variables where the target
formula quantifies.  `lower` composes the passes bottom-up until every
atom lies inside the requested target logic, or reports that no
translation path exists (some atom kinds genuinely cannot be expressed
in some targets; constancy, for instance, is not closed under scaled
unions while every marginal-identity formula is).
"""

from __future__ import annotations

import enum
import itertools

from .errors import ConfigurationError, InputError, NoPathError
from .syntax import (And, BoundedExists, BoundedForall, CondIndep, Const,
                     ConstExists, Constancy, Dep, Exists, Forall, Formula,
                     MarginalEquiv, MarginalIdentity, Or, TupleEq, TupleNeq,
                     Var, VarEq, VarNeq, ClassicalNeg, conj, disj,
                     expand_sugar, free_vars, subformulas)
from .team import Structure


class FreshNameSource:
    """Produces variable names that cannot collide with existing ones.

    Names carry a reserved `$` prefix and a monotone counter; every name
    seen in the input formula (including previously generated `$` names)
    is additionally blocked, so repeated rewriting stays capture-free.
    """

    def __init__(self, reserved=()):
        self.reserved = set(reserved)
        self.counter = 0

    @classmethod
    def for_formula(cls, f: Formula) -> "FreshNameSource":
        names = set()
        for g in subformulas(f):
            names |= set(free_vars(g))
            for attr in ("var",):
                var = getattr(g, attr, None)
                if isinstance(var, Var):
                    names.add(var.name)
            if hasattr(g, "vars"):
                names |= {v.name for v in g.vars}
        return cls(names)

    def fresh(self, hint: str = "v") -> Var:
        while True:
            self.counter += 1
            name = f"${hint}{self.counter}"
            if name not in self.reserved:
                self.reserved.add(name)
                return Var(name)

    def fresh_tuple(self, size: int, hint: str = "v") -> tuple[Var, ...]:
        return tuple(self.fresh(hint) for _ in range(size))


class TargetLogic(enum.Enum):
    """Atom vocabularies a formula can be lowered into."""

    MARGINAL_IDENTITY = "FO(~)"          # marginal identity only
    MARGINAL_EQUIVALENCE = "FO(~*)"      # marginal distribution equivalence only
    IDENTITY_WITH_DEP = "FO(~,dep)"      # marginal identity plus dependence
    MARGINAL_INDEPENDENCE = "FO(indep)"  # unconditional independence only
    CONDITIONAL_INDEPENDENCE = "FO(cindep)"
    COMPILABLE = "compile"               # whatever the arithmetic compiler accepts


_TARGET_ALIASES = {
    "fo(~)": TargetLogic.MARGINAL_IDENTITY,
    "fo(=~)": TargetLogic.MARGINAL_IDENTITY,
    "fo(~*)": TargetLogic.MARGINAL_EQUIVALENCE,
    "fo(=~*)": TargetLogic.MARGINAL_EQUIVALENCE,
    "fo(~,dep)": TargetLogic.IDENTITY_WITH_DEP,
    "fo(=~,dep)": TargetLogic.IDENTITY_WITH_DEP,
    "fo(indep)": TargetLogic.MARGINAL_INDEPENDENCE,
    "fo(cindep)": TargetLogic.CONDITIONAL_INDEPENDENCE,
    "compile": TargetLogic.COMPILABLE,
    "qpl": TargetLogic.COMPILABLE,
}


def parse_target(text: str) -> TargetLogic:
    try:
        return _TARGET_ALIASES[text.strip().lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown target logic {text!r}; choose from "
            + ", ".join(sorted({t.value for t in TargetLogic})))


# --- single passes ----------------------------------------------------------


def dep_to_ci(f: Dep) -> CondIndep:
    """Dependence as self-conditioned independence: dep(x; y) = ci(x; y; y)."""
    if not isinstance(f, Dep):
        raise InputError("dep_to_ci expects a dependence atom")
    return CondIndep(f.determinants, f.dependents, f.dependents)


def dep_to_equiv(f: Dep) -> Formula:
    """Dependence via marginal equivalence: dep(x; y) = (x,y) ~* (x).

    A multi-variable dependent tuple is first decomposed into the chain
    dep(x; y1) & dep(x y1; y2) & ...; the equivalence itself is stated
    for a single dependent.  Bare constancy has no image here: the
    right-hand tuple would be empty, and empty-tuple atoms are rejected
    rather than given ad-hoc semantics.
    """
    if not isinstance(f, Dep):
        raise InputError("dep_to_equiv expects a dependence atom")
    if not f.determinants:
        raise NoPathError(
            "constancy atoms cannot be phrased as a marginal equivalence here: "
            "the defining form would compare against an empty tuple")
    parts = []
    for i, dependent in enumerate(f.dependents):
        dets = f.determinants + f.dependents[:i]
        parts.append(MarginalEquiv(dets + (dependent,), dets))
    return conj(parts)


def equiv_to_identity_dep(f: MarginalEquiv, fresh: FreshNameSource) -> Formula:
    """x ~* y as an existentially quantified bijective relabeling:

        E z. dep(y; z) & dep(z; y) & (x ~ z)     with |z| = |x|.
    """
    if not isinstance(f, MarginalEquiv):
        raise InputError("equiv_to_identity_dep expects a marginal equivalence atom")
    zs = fresh.fresh_tuple(len(f.left), "z")
    body = conj([
        Dep(f.right, zs),
        Dep(zs, f.right),
        MarginalIdentity(f.left, zs),
    ])
    out: Formula = body
    for z in reversed(zs):
        out = Exists(z, out)
    return out


def identity_to_equiv(f: MarginalIdentity, fresh: FreshNameSource) -> Formula:
    """x ~ y through marginal equivalences against a fresh uniform tuple:

        A z. (z != x & z != y) | ((z = x | z = y) & z ~* x & z ~* y)
    """
    if not isinstance(f, MarginalIdentity):
        raise InputError("identity_to_equiv expects a marginal identity atom")
    zs = fresh.fresh_tuple(len(f.left), "z")
    matrix = Or(
        And(TupleNeq(zs, f.left), TupleNeq(zs, f.right)),
        conj([
            Or(TupleEq(zs, f.left), TupleEq(zs, f.right)),
            MarginalEquiv(zs, f.left),
            MarginalEquiv(zs, f.right),
        ]))
    out: Formula = expand_sugar(matrix)
    for z in reversed(zs):
        out = Forall(z, out)
    return out


def _uniform_detector(zs, d, c1, c2, fresh: FreshNameSource) -> Formula:
    """d is uniform over the two constant values and independent of z.

    Shape: (z _||_ d) & A a in {c1,c2}. E b in {c1,c2}.
           (a _||_ b) & ((a = b & d = c1) | (a != b & d = c2))
    """
    a = fresh.fresh("a")
    b = fresh.fresh("b")
    inner = And(
        CondIndep((), (a,), (b,)),
        Or(And(VarEq(a, b), VarEq(d, c1)),
           And(VarNeq(a, b), VarEq(d, c2))))
    return And(
        CondIndep((), zs, (d,)),
        BoundedForall(a, (c1, c2), BoundedExists(b, (c1, c2), inner)))


def identity_to_marg_indep(f: MarginalIdentity, fresh: FreshNameSource) -> Formula:
    """x ~ y using only unconditional independence atoms.

    Builds the detector construction: two constant, distinct auxiliaries
    c1 and c2, a universally distributed tuple z, and a variable d that
    flags whether z matches x or y; equality of the two marginals is
    exactly uniformity of d.  Requires a structure with at least two
    elements.  Constancy subatoms are emitted as self-independence.
    """
    if not isinstance(f, MarginalIdentity):
        raise InputError("identity_to_marg_indep expects a marginal identity atom")
    xs, ys = f.left, f.right
    c1 = fresh.fresh("c")
    c2 = fresh.fresh("c")
    zs = fresh.fresh_tuple(len(xs), "z")
    d = fresh.fresh("d")
    theta = Or(
        And(VarEq(d, c1), TupleEq(zs, xs)),
        And(VarEq(d, c2), TupleEq(zs, ys)))
    phi = _uniform_detector(zs, d, c1, c2, fresh)
    matrix = Or(
        TupleEq(xs, ys),
        And(TupleNeq(xs, ys),
            Or(And(TupleNeq(zs, xs), TupleNeq(zs, ys)),
               And(theta, phi))))
    quantified: Formula = Exists(d, matrix)
    for z in reversed(zs):
        quantified = Forall(z, quantified)
    out = expand_sugar(ConstExists((c1, c2), quantified))
    return _constancy_to_self_independence(out)


def _constancy_to_self_independence(f: Formula) -> Formula:
    """Replace every constancy atom by its self-independence form."""
    def walk(g: Formula) -> Formula:
        if isinstance(g, Dep) and not g.determinants:
            return dep_to_ci(g)
        if isinstance(g, And):
            return And(walk(g.left), walk(g.right))
        if isinstance(g, Or):
            return Or(walk(g.left), walk(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, walk(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, walk(g.body))
        if isinstance(g, ClassicalNeg):
            return ClassicalNeg(walk(g.body))
        return g
    return walk(f)


def _iff(lhs: Formula, rhs: Formula) -> Formula:
    """lhs <-> rhs for (dis)equality combinations, kept in normal form."""
    from .syntax import _literal_complement
    lhs = expand_sugar(lhs)
    rhs = expand_sugar(rhs)
    return Or(And(lhs, rhs),
              And(_literal_complement(lhs), _literal_complement(rhs)))


def ci_to_marg_indep(f: CondIndep, structure: Structure,
                     fresh: FreshNameSource) -> Formula:
    """Conditional independence from marginal independence and identity.

    For ci(x0; x1; x2), a fresh tuple y ranges over all values of the
    mentioned variables; four auxiliary tuples carry the marginals of
    x0, x0x1, x0x2, x0x1x2 independently of y, and two flag variables
    compare the products w(x0)*w(x0x1x2) and w(x0x1)*w(x0x2) pointwise
    through a marginal identity over y.  Needs a designated constant
    named "zero" in the structure.
    """
    if not isinstance(f, CondIndep):
        raise InputError("ci_to_marg_indep expects an independence atom")
    if "zero" not in structure.constants:
        raise ConfigurationError(
            'this translation needs a structure constant named "zero"')
    zero = Const("zero")

    base: list[Var] = []
    for v in f.cond + f.left + f.right:
        if v not in base:
            base.append(v)
    y_of = {v: fresh.fresh("y") for v in base}
    ys = tuple(y_of[v] for v in base)

    def mirror(tup: tuple[Var, ...]) -> tuple[Var, ...]:
        return tuple(y_of[v] for v in tup)

    x0, x1, x2 = f.cond, f.left, f.right
    groups = [x0, x0 + x1, x0 + x2, x0 + x1 + x2]
    zs = [fresh.fresh_tuple(len(g), "z") for g in groups]
    alpha = fresh.fresh("fa")
    beta = fresh.fresh("fb")

    # With an empty condition the first auxiliary tuple is empty: it has no
    # quantifier, no transfer, and its match contributes probability one.
    independence = []
    anchor: tuple[Var, ...] = ys
    for z in zs:
        if z:
            independence.append(CondIndep((), anchor, z))
            anchor = anchor + z
    transfers = [MarginalIdentity(g, z) for g, z in zip(groups, zs) if g]

    flag_a = _iff(VarEq(alpha, zero),
                  _tuple_eq_pair(zs[0], mirror(x0), zs[3], mirror(x0 + x1 + x2)))
    flag_b = _iff(VarEq(beta, zero),
                  _tuple_eq_pair(zs[1], mirror(x0 + x1), zs[2], mirror(x0 + x2)))
    compare = MarginalIdentity(ys + (alpha,), ys + (beta,))

    matrix = conj(independence + transfers + [flag_a, flag_b, compare])
    inner: Formula = matrix
    for var in reversed([*itertools.chain(*zs), alpha, beta]):
        inner = Exists(var, inner)
    out: Formula = inner
    for y in reversed(ys):
        out = Forall(y, out)
    return expand_sugar(out)


def _tuple_eq_pair(left1, right1, left2, right2) -> Formula:
    parts = []
    if left1:
        parts.append(TupleEq(left1, right1))
    parts.append(TupleEq(left2, right2))
    return conj(parts)


# --- composition ------------------------------------------------------------

_ALLOWED = {
    TargetLogic.MARGINAL_IDENTITY: {MarginalIdentity},
    TargetLogic.MARGINAL_EQUIVALENCE: {MarginalEquiv},
    TargetLogic.IDENTITY_WITH_DEP: {MarginalIdentity, Dep},
    TargetLogic.MARGINAL_INDEPENDENCE: {CondIndep},
    TargetLogic.CONDITIONAL_INDEPENDENCE: {CondIndep},
    TargetLogic.COMPILABLE: {MarginalIdentity, CondIndep, Dep},
}


def _atom_ok(atom, target: TargetLogic) -> bool:
    if target is TargetLogic.MARGINAL_INDEPENDENCE and isinstance(atom, CondIndep):
        return not atom.cond
    return type(atom) in _ALLOWED[target]


def _no_path(atom, target: TargetLogic) -> NoPathError:
    reasons = {
        TargetLogic.MARGINAL_IDENTITY:
            "every marginal-identity formula is preserved by scaled unions, "
            "and this atom is not",
        TargetLogic.MARGINAL_EQUIVALENCE:
            "no equivalence-preserving translation of this atom into "
            "marginal-equivalence vocabulary is available",
        TargetLogic.IDENTITY_WITH_DEP:
            "no translation of independence atoms into identity/dependence "
            "vocabulary is known; the gap is open",
    }
    from .syntax import unparse
    reason = reasons.get(target, "no translation path")
    return NoPathError(f"cannot lower {unparse(atom)} into {target.value}: {reason}")


def _lower_atom(atom, target: TargetLogic, structure: Structure,
                fresh: FreshNameSource) -> Formula:
    """One rewriting step; the result may still contain foreign atoms."""
    if isinstance(atom, Dep):
        if target in (TargetLogic.MARGINAL_INDEPENDENCE,
                      TargetLogic.CONDITIONAL_INDEPENDENCE):
            return dep_to_ci(atom)
        if target in (TargetLogic.MARGINAL_EQUIVALENCE,):
            return dep_to_equiv(atom)
        if target is TargetLogic.IDENTITY_WITH_DEP:
            return atom
        raise _no_path(atom, target)
    if isinstance(atom, MarginalEquiv):
        if target is TargetLogic.MARGINAL_EQUIVALENCE:
            return atom
        if target in (TargetLogic.IDENTITY_WITH_DEP,
                      TargetLogic.MARGINAL_INDEPENDENCE,
                      TargetLogic.CONDITIONAL_INDEPENDENCE,
                      TargetLogic.COMPILABLE):
            return equiv_to_identity_dep(atom, fresh)
        raise _no_path(atom, target)
    if isinstance(atom, MarginalIdentity):
        if target is TargetLogic.MARGINAL_EQUIVALENCE:
            return identity_to_equiv(atom, fresh)
        if target in (TargetLogic.MARGINAL_INDEPENDENCE,
                      TargetLogic.CONDITIONAL_INDEPENDENCE):
            if len(structure.universe) < 2:
                raise ConfigurationError(
                    "expressing marginal identity through independence needs "
                    "a universe with at least two elements")
            return identity_to_marg_indep(atom, fresh)
        raise _no_path(atom, target)
    if isinstance(atom, CondIndep):
        if target is TargetLogic.MARGINAL_INDEPENDENCE and atom.cond:
            return ci_to_marg_indep(atom, structure, fresh)
        raise _no_path(atom, target)
    raise InputError(f"not a dependency atom: {atom!r}")


def lower(f: Formula, target: TargetLogic, structure: Structure | None = None,
          fresh: FreshNameSource | None = None) -> Formula:
    """Rewrite every out-of-target atom, bottom-up, until none remain.

    Termination: each step replaces one atom by a formula whose foreign
    atoms are strictly lower in the ordering ~* > dep > ci > ~ > indep,
    so the multiset of foreign atoms shrinks.
    """
    from .team import BINARY_STRUCTURE
    structure = structure or BINARY_STRUCTURE
    f = expand_sugar(f)
    fresh = fresh or FreshNameSource.for_formula(f)

    def walk(g: Formula) -> Formula:
        if isinstance(g, And):
            return And(walk(g.left), walk(g.right))
        if isinstance(g, Or):
            return Or(walk(g.left), walk(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, walk(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, walk(g.body))
        if isinstance(g, ClassicalNeg):
            return ClassicalNeg(walk(g.body))
        if isinstance(g, (MarginalIdentity, MarginalEquiv, CondIndep, Dep)):
            if _atom_ok(g, target):
                return g
            return walk(_lower_atom(g, target, structure, fresh))
        return g

    return walk(f)
