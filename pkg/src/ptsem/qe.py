"""Exact decision procedure for linear real sentences, plus a shared
simplification layer that nonlinear sentences pass through on their way
to an external solver.

Quantifier elimination follows the virtual-substitution recipe: an
existential variable is replaced by finitely many symbolic test points
(minus infinity, the roots of its constraints, and points just above the
roots of its strict constraints), and the disjunction over those
substitutions is equivalent to the original.  All pivots are exact
rationals.  Universal quantifiers go through double negation.

The simplifier propagates single-variable equalities and the
"nonnegative terms summing to zero" pattern through conjunction scopes,
including into the opaque nonlinear atoms; compiled team checks collapse
dramatically under it, and many nominally nonlinear sentences become
linear (hence internally decidable) once the constants have flowed in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import (Add, AndF, ArithFormula, ArithTerm, Eq, ExistsR, ForallR,
                    Leq, Mul, Not, OrF, RatConst, WVar, add)
from .errors import FragmentError

# Internal representation
# -----------------------
# LinExpr: linear combination of weight variables plus a constant.
# Nodes (plain tuples, cheap to build and hash):
#   True / False                      decided
#   ("le", e)   e <= 0
#   ("lt", e)   e <  0
#   ("eq", e)   e == 0
#   ("ne", e)   e != 0
#   ("poly", phi)                     nonlinear leaf, an ArithFormula literal
#   ("and", parts) / ("or", parts)
#   ("ex", vars, body) / ("all", vars, body)


@dataclass(frozen=True)
class LinExpr:
    coeffs: tuple[tuple[str, Fraction], ...]  # sorted by name, nonzero
    const: Fraction

    @classmethod
    def build(cls, coeffs: dict[str, Fraction], const: Fraction) -> "LinExpr":
        items = tuple(sorted((v, c) for v, c in coeffs.items() if c != 0))
        return cls(items, const)

    def coeff(self, var: str) -> Fraction:
        for v, c in self.coeffs:
            if v == var:
                return c
        return Fraction(0)

    def vars(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def scale(self, k: Fraction) -> "LinExpr":
        if k == 0:
            return LinExpr((), Fraction(0))
        return LinExpr(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    def plus(self, other: "LinExpr") -> "LinExpr":
        coeffs = dict(self.coeffs)
        for v, c in other.coeffs:
            coeffs[v] = coeffs.get(v, Fraction(0)) + c
        return LinExpr.build(coeffs, self.const + other.const)

    def drop(self, var: str) -> "LinExpr":
        return LinExpr(tuple((v, c) for v, c in self.coeffs if v != var), self.const)

    def subst(self, var: str, replacement: "LinExpr") -> "LinExpr":
        a = self.coeff(var)
        if a == 0:
            return self
        return self.drop(var).plus(replacement.scale(a))

    def is_const(self) -> bool:
        return not self.coeffs


class _Nonlinear(Exception):
    pass


def _term_to_lin(term: ArithTerm) -> LinExpr:
    if isinstance(term, WVar):
        return LinExpr(((term.name, Fraction(1)),), Fraction(0))
    if isinstance(term, RatConst):
        return LinExpr((), term.value)
    if isinstance(term, Add):
        out = LinExpr((), Fraction(0))
        for part in term.parts:
            out = out.plus(_term_to_lin(part))
        return out
    # Mul: every factor but at most one must fold to a constant
    factor = Fraction(1)
    symbolic: Optional[LinExpr] = None
    for part in term.parts:
        lin = _term_to_lin(part)
        if lin.is_const():
            factor *= lin.const
        elif symbolic is None:
            symbolic = lin
        else:
            raise _Nonlinear()
    if symbolic is None:
        return LinExpr((), factor)
    return symbolic.scale(factor)


def _atom(kind: str, e: LinExpr):
    if e.is_const():
        c = e.const
        if kind == "le":
            return c <= 0
        if kind == "lt":
            return c < 0
        if kind == "eq":
            return c == 0
        return c != 0
    return (kind, e)


_NEG_ATOM = {"le": "lt", "lt": "le", "eq": "ne", "ne": "eq"}


def _negate(node):
    if node is True:
        return False
    if node is False:
        return True
    kind = node[0]
    if kind in ("le", "lt"):
        # not(e <= 0) is -e < 0; not(e < 0) is -e <= 0
        return (_NEG_ATOM[kind], node[1].scale(Fraction(-1)))
    if kind in ("eq", "ne"):
        return (_NEG_ATOM[kind], node[1])
    if kind == "poly":
        phi = node[1]
        return ("poly", phi.body if isinstance(phi, Not) else Not(phi))
    if kind == "and":
        return ("or", tuple(_negate(p) for p in node[1]))
    if kind == "or":
        return ("and", tuple(_negate(p) for p in node[1]))
    if kind == "ex":
        return ("all", node[1], _negate(node[2]))
    return ("ex", node[1], _negate(node[2]))


def _from_arith(phi: ArithFormula, negate: bool, allow_poly: bool):
    if isinstance(phi, Eq):
        try:
            e = _term_to_lin(phi.lhs).plus(_term_to_lin(phi.rhs).scale(Fraction(-1)))
            return _atom("ne" if negate else "eq", e)
        except _Nonlinear:
            if not allow_poly:
                raise FragmentError("sentence is not linear")
            return ("poly", Not(phi) if negate else phi)
    if isinstance(phi, Leq):
        try:
            e = _term_to_lin(phi.lhs).plus(_term_to_lin(phi.rhs).scale(Fraction(-1)))
            if negate:
                return _atom("lt", e.scale(Fraction(-1)))
            return _atom("le", e)
        except _Nonlinear:
            if not allow_poly:
                raise FragmentError("sentence is not linear")
            return ("poly", Not(phi) if negate else phi)
    if isinstance(phi, Not):
        return _from_arith(phi.body, not negate, allow_poly)
    if isinstance(phi, (AndF, OrF)):
        parts = tuple(_from_arith(p, negate, allow_poly) for p in phi.parts)
        conjunctive = isinstance(phi, AndF) != negate
        return ("and" if conjunctive else "or", parts)
    if isinstance(phi, (ExistsR, ForallR)):
        body = _from_arith(phi.body, negate, allow_poly)
        existential = isinstance(phi, ExistsR) != negate
        return ("ex" if existential else "all", tuple(phi.vars), body)
    raise FragmentError(f"unsupported node {type(phi).__name__}")


# --- simplification -----------------------------------------------------------


def _node_vars(node) -> set[str]:
    if node in (True, False):
        return set()
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        return node[1].vars()
    if kind == "poly":
        from .arith import formula_weight_vars
        return formula_weight_vars(node[1])
    if kind in ("and", "or"):
        out: set[str] = set()
        for part in node[1]:
            out |= _node_vars(part)
        return out
    return set(node[1]) | _node_vars(node[2])


def _subst_arith_term(term: ArithTerm, env: dict[str, Fraction]) -> ArithTerm:
    if isinstance(term, WVar):
        if term.name in env:
            return RatConst(env[term.name])
        return term
    if isinstance(term, RatConst):
        return term
    parts = tuple(_subst_arith_term(p, env) for p in term.parts)
    return type(term)(parts)


def _subst_poly(phi: ArithFormula, env: dict[str, Fraction]):
    """Substitute constants into a nonlinear leaf; relinearize if possible."""
    negated = isinstance(phi, Not)
    leaf = phi.body if negated else phi
    lhs = _subst_arith_term(leaf.lhs, env)
    rhs = _subst_arith_term(leaf.rhs, env)
    rebuilt = type(leaf)(lhs, rhs)
    try:
        return _from_arith(rebuilt, negated, allow_poly=False)
    except FragmentError:
        return ("poly", Not(rebuilt) if negated else rebuilt)


def _apply_env(node, env: dict[str, Fraction]):
    """Substitute forced values everywhere.

    Weight-variable names are globally unique in compiled sentences, so
    substitution never needs scope filtering.
    """
    if node in (True, False) or not env:
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        e = node[1]
        if not (e.vars() & env.keys()):
            return node
        out = e
        for var in e.vars() & env.keys():
            out = out.subst(var, LinExpr((), env[var]))
        return _atom(kind, out)
    if kind == "poly":
        return _subst_poly(node[1], env)
    if kind in ("and", "or"):
        return (kind, tuple(_apply_env(p, env) for p in node[1]))
    return (node[0], node[1], _apply_env(node[2], env))


def _simplify(node):
    if node in (True, False):
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        return _atom(kind, node[1])
    if kind == "poly":
        return node
    if kind in ("and", "or"):
        killer = kind == "or"        # True absorbs a disjunction, False a conjunction
        parts = []
        for raw in node[1]:
            part = _simplify(raw)
            if part is killer:
                return killer
            if part is (not killer):
                continue
            parts.append(part)
        if not parts:
            return not killer
        if len(parts) == 1:
            return parts[0]
        flat = []
        for part in parts:
            if isinstance(part, tuple) and part[0] == kind:
                flat.extend(part[1])
            else:
                flat.append(part)
        return (kind, tuple(flat))
    body = _simplify(node[2])
    if body in (True, False):
        return body
    return (kind, node[1], body)


def _spine(node, atoms: list, bound: set):
    """Conjunctive-spine scan: through conjunctions and existential
    bodies, never under a disjunction or a universal block.

    Collects the atoms met on the way and the variables bound by spine
    existentials.  A single-variable equality on the spine pins a spine-
    existential variable in every model, so that variable can be
    substituted away globally (names are unique; the binder's scope is
    the whole sentence below it).
    """
    if node in (True, False):
        return
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        atoms.append(node)
    elif kind == "and":
        for part in node[1]:
            _spine(part, atoms, bound)
    elif kind == "ex":
        bound.update(node[1])
        _spine(node[2], atoms, bound)


def _extract_constants(atoms, substitutable: set) -> dict[str, Fraction]:
    """Forced values for substitutable variables.

    Sources: single-variable equalities, and equalities that say a
    sign-definite combination of zero-bounded variables vanishes.
    """
    env: dict[str, Fraction] = {}
    nonneg: set[str] = set()
    for part in atoms:
        if part[0] == "le":
            e = part[1]
            if e.const == 0 and len(e.coeffs) == 1 and e.coeffs[0][1] < 0:
                nonneg.add(e.coeffs[0][0])
    for part in atoms:
        if part[0] != "eq":
            continue
        e = part[1]
        if len(e.coeffs) == 1:
            var, coeff = e.coeffs[0]
            if var in substitutable:
                env.setdefault(var, -e.const / coeff)
        elif e.coeffs and e.const == 0:
            signs = {c > 0 for _, c in e.coeffs}
            if len(signs) == 1 and all(
                    v in nonneg and v in substitutable for v, _ in e.coeffs):
                for var, _ in e.coeffs:
                    env.setdefault(var, Fraction(0))
    return env


def _propagate(node, env_out: dict | None, extra: set | None):
    """Substitute spine-forced constants globally, to a fixpoint."""
    for _ in range(80):
        if node in (True, False):
            return node
        atoms: list = []
        bound: set = set(extra or ())
        _spine(node, atoms, bound)
        env = _extract_constants(atoms, bound)
        if not env:
            return node
        if env_out is not None:
            env_out.update(env)
        node = _simplify(_apply_env(node, env))
    return node


def simplify_tree(node, env_out: dict | None = None, extra: set | None = None):
    previous = None
    for _ in range(20):
        node = _simplify(node)
        if node in (True, False):
            return node
        node = _propagate(node, env_out, extra)
        if node == previous:
            break
        previous = node
    return node


def _has_poly(node) -> bool:
    if node in (True, False):
        return False
    kind = node[0]
    if kind == "poly":
        return True
    if kind in ("and", "or"):
        return any(_has_poly(p) for p in node[1])
    if kind in ("ex", "all"):
        return _has_poly(node[2])
    return False


# --- virtual substitution -------------------------------------------------------


def _atoms_with_var(node, var: str, out: list):
    if node in (True, False):
        return
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        if node[1].coeff(var) != 0:
            out.append(node)
    elif kind in ("and", "or"):
        for part in node[1]:
            _atoms_with_var(part, var, out)
    else:
        _atoms_with_var(node[2], var, out)


def _subst_minus_inf(node, var: str):
    if node in (True, False):
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        a = node[1].coeff(var)
        if a == 0:
            return node
        if kind in ("le", "lt"):
            return a > 0
        return kind == "ne"
    if kind in ("and", "or"):
        return (kind, tuple(_subst_minus_inf(p, var) for p in node[1]))
    return (node[0], node[1], _subst_minus_inf(node[2], var))


def _subst_term(node, var: str, point: LinExpr):
    if node in (True, False):
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        return _atom(kind, node[1].subst(var, point))
    if kind in ("and", "or"):
        return (kind, tuple(_subst_term(p, var, point) for p in node[1]))
    return (node[0], node[1], _subst_term(node[2], var, point))


def _subst_term_plus_eps(node, var: str, point: LinExpr):
    if node in (True, False):
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        e = node[1]
        a = e.coeff(var)
        if a == 0:
            return node
        v = e.subst(var, point)
        if kind in ("le", "lt"):
            return _atom("le", v) if a < 0 else _atom("lt", v)
        # an equation cannot hold, and a disequation cannot fail, at a point
        # shifted by an infinitesimal
        return kind == "ne"
    if kind in ("and", "or"):
        return (kind, tuple(_subst_term_plus_eps(p, var, point) for p in node[1]))
    return (node[0], node[1], _subst_term_plus_eps(node[2], var, point))


def _eliminate_one(var: str, node):
    """Existential elimination of one variable from a quantifier-free tree."""
    atoms: list = []
    _atoms_with_var(node, var, atoms)
    if not atoms:
        return node
    candidates: list[tuple[str, LinExpr | None]] = [("minus_inf", None)]
    seen: set = set()
    for kind, e in atoms:
        a = e.coeff(var)
        root = e.drop(var).scale(Fraction(-1, 1) / a)
        key = (kind in ("lt", "ne"), root)
        if key in seen:
            continue
        seen.add(key)
        if kind in ("le", "eq"):
            candidates.append(("term", root))
        else:
            candidates.append(("eps", root))
    branches = []
    for tag, point in candidates:
        if tag == "minus_inf":
            branch = _subst_minus_inf(node, var)
        elif tag == "term":
            branch = _subst_term(node, var, point)
        else:
            branch = _subst_term_plus_eps(node, var, point)
        branch = _simplify(branch)
        if branch is True:
            return True
        if branch is not False:
            branches.append(branch)
    if not branches:
        return False
    return _simplify(("or", tuple(branches)))


def _eliminate_block(vars: tuple[str, ...], node):
    node = simplify_tree(node, extra=set(vars))
    remaining = [v for v in vars if v in _node_vars(node)]
    # eliminate the least-entangled variable first; keeps growth down
    while remaining:
        if node in (True, False):
            return node
        def cost(v):
            atoms: list = []
            _atoms_with_var(node, v, atoms)
            return len(atoms)
        var = min(remaining, key=cost)
        remaining.remove(var)
        node = _eliminate_one(var, node)
        node = simplify_tree(node, extra=set(remaining))
        remaining = [v for v in remaining if v in _node_vars(node)]
    return node


def _qe(node):
    """Eliminate all quantifiers, innermost first."""
    if node in (True, False):
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        return node
    if kind == "poly":
        raise FragmentError("sentence is not linear")
    if kind in ("and", "or"):
        return _simplify((kind, tuple(_qe(p) for p in node[1])))
    body = _qe(node[2])
    if kind == "ex":
        return _eliminate_block(node[1], body)
    return _negate_and_simplify(_eliminate_block(node[1], _negate_and_simplify(body)))


def _negate_and_simplify(node):
    return _simplify(_negate(node)) if node not in (True, False) else (node is False)


# --- model search (purely existential sentences) --------------------------------


def _fm_model(atoms: list) -> Optional[dict[str, Fraction]]:
    """Feasibility + sample point for a conjunction of le/lt/eq atoms."""
    vars = sorted(set().union(set(), *(a[1].vars() for a in atoms)))
    trail: list[tuple[str, list, list, list]] = []
    current = list(atoms)
    for var in vars:
        eq_atom = next((a for a in current if a[0] == "eq" and a[1].coeff(var) != 0),
                       None)
        if eq_atom is not None:
            a = eq_atom[1].coeff(var)
            rest = eq_atom[1].drop(var).scale(Fraction(-1) / a)
            trail.append((var, [("eq", rest)], [], []))
            replaced = []
            for atom in current:
                if atom is eq_atom:
                    continue
                out = _atom(atom[0], atom[1].subst(var, rest))
                if out is False:
                    return None
                if out is not True:
                    replaced.append(out)
            current = replaced
            continue
        lowers, uppers, others = [], [], []
        for atom in current:
            c = atom[1].coeff(var)
            if c == 0:
                others.append(atom)
            else:
                bound = atom[1].drop(var).scale(Fraction(-1) / c)
                strict = atom[0] == "lt"
                if c > 0:
                    uppers.append((bound, strict))
                else:
                    lowers.append((bound, strict))
        new_atoms = list(others)
        for (lo, lo_s), (hi, hi_s) in itertools.product(lowers, uppers):
            diff = lo.plus(hi.scale(Fraction(-1)))
            out = _atom("lt" if (lo_s or hi_s) else "le", diff)
            if out is False:
                return None
            if out is not True:
                new_atoms.append(out)
        trail.append((var, [], lowers, uppers))
        current = new_atoms
    for atom in current:
        if not atom[1].is_const() or _atom(atom[0], atom[1]) is False:
            return None
    model: dict[str, Fraction] = {}

    def value_of(e: LinExpr) -> Fraction:
        out = e.const
        for v, c in e.coeffs:
            out += c * model[v]
        return out

    for var, eqs, lowers, uppers in reversed(trail):
        if eqs:
            model[var] = value_of(eqs[0][1])
            continue
        lo = max((value_of(b) for b, _ in lowers), default=None)
        hi = min((value_of(b) for b, _ in uppers), default=None)
        lo_strict = any(s for b, s in lowers if value_of(b) == lo)
        hi_strict = any(s for b, s in uppers if value_of(b) == hi)
        if lo is None and hi is None:
            model[var] = Fraction(0)
        elif lo is None:
            model[var] = hi - 1 if hi_strict else hi
        elif hi is None:
            model[var] = lo + 1 if lo_strict else lo
        else:
            if lo > hi or (lo == hi and (lo_strict or hi_strict)):
                return None
            model[var] = (lo + hi) / 2 if (lo_strict or hi_strict) else lo
    return model


def _pull_exists(node):
    """Hoist existential blocks to the top (names are globally unique).

    Returns a quantifier-free matrix, or None if a universal quantifier
    blocks the way.
    """
    if node in (True, False):
        return node
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne", "poly"):
        return node
    if kind == "ex":
        return _pull_exists(node[2])
    if kind == "all":
        return None
    parts = []
    for part in node[1]:
        pulled = _pull_exists(part)
        if pulled is None:
            return None
        parts.append(pulled)
    return (kind, tuple(parts))


def _pick_or(node):
    """The disjunction node with the fewest branches, if any."""
    best = None
    stack = [node]
    while stack:
        current = stack.pop()
        if current in (True, False) or not isinstance(current, tuple):
            continue
        kind = current[0]
        if kind == "or":
            if best is None or len(current[1]) < len(best[1]):
                best = current
            for part in current[1]:
                stack.append(part)
        elif kind == "and":
            stack.extend(current[1])
    return best


def _replace_node(node, target, replacement):
    if node is target or node == target:
        return replacement
    if node in (True, False) or not isinstance(node, tuple):
        return node
    if node[0] in ("and", "or"):
        return (node[0], tuple(_replace_node(p, target, replacement)
                               for p in node[1]))
    return node


def _spine_atoms(node, out: list) -> bool:
    """Atoms of a pure conjunction; False when structure is unexpected."""
    if node is True:
        return True
    if node is False or not isinstance(node, tuple):
        return False
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        out.append(node)
        return True
    if kind == "and":
        return all(_spine_atoms(p, out) for p in node[1])
    return False


def _sat_search(node, env: dict, free: set) -> Optional[dict[str, Fraction]]:
    """Feasibility of a quantifier-free existential matrix.

    Branch on the smallest disjunction, propagate forced constants, and
    settle conjunctions of linear atoms by elimination.  Disequalities
    split into two strict branches at the leaves.
    """
    node = simplify_tree(node, env, extra=free)
    if node is True:
        return dict(env)
    if node is False:
        return None
    target = _pick_or(node)
    if target is not None:
        for branch in target[1]:
            found = _sat_search(_replace_node(node, target, branch),
                                dict(env), free)
            if found is not None:
                return found
        return None
    atoms: list = []
    if not _spine_atoms(node, atoms):
        return None  # nested quantifier slipped through; caller handles
    split = next((a for a in atoms if a[0] == "ne"), None)
    if split is not None:
        rest = [a for a in atoms if a is not split]
        for variant in (("lt", split[1]), ("lt", split[1].scale(Fraction(-1)))):
            found = _sat_search(("and", tuple(rest + [variant])), dict(env), free)
            if found is not None:
                return found
        return None
    model = _fm_model(atoms)
    if model is None:
        return None
    return {**env, **model}


def flatten_exists(node):
    """Hoist every existential binder to one top block when no universal
    quantifier intervenes; solvers then see a quantifier-free matrix.
    Returns the node unchanged if a universal block is present.
    """
    if _has_forall(node):
        return node
    order: list[str] = []

    def collect(n):
        if n in (True, False) or n[0] in ("le", "lt", "eq", "ne", "poly"):
            return
        if n[0] == "ex":
            order.extend(n[1])
            collect(n[2])
        else:
            for part in n[1]:
                collect(part)

    collect(node)
    matrix = _pull_exists(node)
    if matrix is None or not order:
        return node
    return ("ex", tuple(order), matrix)


def _has_forall(node) -> bool:
    if node in (True, False):
        return False
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne", "poly"):
        return False
    if kind in ("and", "or"):
        return any(_has_forall(p) for p in node[1])
    if kind == "all":
        return True
    return _has_forall(node[2])


def find_model(node, limit: int = 4000) -> Optional[dict[str, Fraction]]:
    """A rational witness for an existential simplified tree, if cheap."""
    matrix = _pull_exists(node)
    if matrix is None:
        return None
    return _sat_search(matrix, {}, _node_vars(matrix))


# --- public entry ---------------------------------------------------------------


def to_internal(phi: ArithFormula, allow_poly: bool, env_out: dict | None = None):
    return simplify_tree(_from_arith(phi, False, allow_poly), env_out)


def has_nonlinear_residue(node) -> bool:
    return _has_poly(node)


def decide(node) -> bool:
    """Truth value of a closed linear sentence (already internalized).

    Purely existential sentences go through feasibility search; anything
    with universal blocks runs full quantifier elimination.
    """
    if isinstance(node, bool):
        return node
    if not _has_forall(node):
        matrix = _pull_exists(node)
        if matrix is not None:
            return _sat_search(matrix, {}, _node_vars(matrix)) is not None
    result = _qe(node)
    if result is True:
        return True
    if result is False:
        return False
    raise FragmentError(f"sentence was not closed: residue {result!r}")


def to_arith(node) -> ArithFormula:
    """Rebuild an ArithFormula from the internal tree (for solver handoff)."""
    if node is True:
        return AndF(())
    if node is False:
        return OrF(())
    kind = node[0]
    if kind in ("le", "lt", "eq", "ne"):
        term = _lin_to_term(node[1])
        if kind == "le":
            return Leq(term, RatConst(Fraction(0)))
        if kind == "lt":
            return Not(Leq(RatConst(Fraction(0)), term))
        if kind == "eq":
            return Eq(term, RatConst(Fraction(0)))
        return Not(Eq(term, RatConst(Fraction(0))))
    if kind == "poly":
        return node[1]
    if kind == "and":
        return AndF(tuple(to_arith(p) for p in node[1]))
    if kind == "or":
        return OrF(tuple(to_arith(p) for p in node[1]))
    if kind == "ex":
        return ExistsR(node[1], to_arith(node[2]))
    return ForallR(node[1], to_arith(node[2]))


def _lin_to_term(e: LinExpr) -> ArithTerm:
    parts: list[ArithTerm] = []
    for var, coeff in e.coeffs:
        if coeff == 1:
            parts.append(WVar(var))
        else:
            parts.append(Mul((RatConst(coeff), WVar(var))))
    if e.const != 0 or not parts:
        parts.append(RatConst(e.const))
    return add(tuple(parts))
