"""Exact-rational probabilistic teams over finite domains.

A probabilistic team assigns a nonnegative rational weight to each
assignment of values to a fixed variable tuple.  All operations are pure
and keep weights exact; nothing in this module touches floating point.
Rows are stored in a canonical order (lexicographic by value tokens) so
that equal teams compare equal and serialize identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DegenerateTeamError, DomainError, InputError

Value = str
Variable = str
Assignment = tuple[Value, ...]  # aligned with the owning team's domain tuple


def as_weight(value) -> Fraction:
    """Convert to an exact nonnegative weight.

    Accepts Fraction, int, and strings in either "p/q" or decimal form.
    Floats are rejected: they have no place in exact semantics.
    """
    if isinstance(value, float):
        raise InputError("float weights are not accepted; pass a string or Fraction")
    w = Fraction(value)
    if w < 0:
        raise InputError(f"negative weight {w}")
    return w


@dataclass(frozen=True)
class ProbabilisticTeam:
    """A finite weighted set of assignments over a shared variable tuple."""

    domain: tuple[Variable, ...]
    rows: tuple[tuple[Assignment, Fraction], ...]

    def __post_init__(self):
        if len(set(self.domain)) != len(self.domain):
            raise InputError(f"duplicate variable in domain {self.domain}")
        for var in self.domain:
            if not var:
                raise InputError("empty variable name")
        seen = set()
        for assignment, weight in self.rows:
            if len(assignment) != len(self.domain):
                raise InputError(
                    f"assignment {assignment} does not cover domain {self.domain}")
            if assignment in seen:
                raise InputError(f"duplicate assignment {assignment}")
            seen.add(assignment)
            if weight < 0:
                raise InputError(f"negative weight {weight} on {assignment}")

    @classmethod
    def make(cls, domain: Iterable[Variable],
             rows: Iterable[tuple[Iterable[Value], object]]) -> "ProbabilisticTeam":
        """Build a team, canonicalizing row order and weight representation."""
        dom = tuple(domain)
        normalized = [(tuple(values), as_weight(w)) for values, w in rows]
        normalized.sort(key=lambda row: row[0])
        return cls(dom, tuple(normalized))

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.rows), Fraction(0))

    @property
    def is_normalized(self) -> bool:
        return not self.rows or self.total_weight == 1

    def weight_of(self, assignment: Assignment) -> Fraction:
        for row, w in self.rows:
            if row == assignment:
                return w
        return Fraction(0)

    def column(self, var: Variable) -> int:
        try:
            return self.domain.index(var)
        except ValueError:
            raise DomainError(f"variable {var!r} not in team domain {self.domain}")

    def values_seen(self) -> tuple[Value, ...]:
        """All value tokens occurring in some row, sorted."""
        seen = {v for assignment, _ in self.rows for v in assignment}
        return tuple(sorted(seen))


@dataclass(frozen=True)
class Structure:
    """Finite first-order structure: universe, named relations, named constants."""

    universe: tuple[Value, ...]
    relations: Mapping[str, frozenset[tuple[Value, ...]]] = field(default_factory=dict)
    constants: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        if not self.universe:
            raise InputError("structure universe must be nonempty")
        if len(set(self.universe)) != len(self.universe):
            raise InputError("duplicate universe element")
        object.__setattr__(self, "universe", tuple(sorted(self.universe)))
        elems = set(self.universe)
        rels = {}
        for name, tuples in self.relations.items():
            frozen = frozenset(tuple(t) for t in tuples)
            arities = {len(t) for t in frozen}
            if len(arities) > 1:
                raise InputError(f"relation {name!r} has mixed arities {sorted(arities)}")
            for t in frozen:
                if not set(t) <= elems:
                    raise InputError(f"relation {name!r} tuple {t} leaves the universe")
            rels[name] = frozen
        object.__setattr__(self, "relations", rels)
        for name, val in self.constants.items():
            if val not in elems:
                raise InputError(f"constant {name!r} = {val!r} not in universe")
        object.__setattr__(self, "constants", dict(self.constants))

    def relation(self, name: str) -> frozenset[tuple[Value, ...]]:
        if name not in self.relations:
            raise DomainError(f"unknown relation {name!r}")
        return self.relations[name]

    def constant(self, name: str) -> Value:
        if name not in self.constants:
            raise DomainError(f"unknown constant {name!r}")
        return self.constants[name]


# The propositional fragment is evaluated over this fixed structure: the
# two truth values with P holding exactly at 1.
BINARY_STRUCTURE = Structure(
    universe=("0", "1"),
    relations={"P": frozenset({("1",)})},
    constants={"zero": "0", "one": "1"},
)


def default_structure(team: ProbabilisticTeam) -> Structure:
    """Relation-free structure inferred from a team's value tokens.

    Every token is also exposed as a constant under its own name, and the
    lexicographically least token doubles as the designated constant
    "zero" (some rewrites need one distinguished element).
    """
    universe = team.values_seen()
    if not universe:
        universe = ("0",)
    constants = {v: v for v in universe}
    constants.setdefault("zero", universe[0])
    return Structure(universe=universe, relations={}, constants=constants)


@dataclass(frozen=True)
class LocalDistribution:
    """Probability distribution over universe values; weights sum to 1."""

    weights: tuple[tuple[Value, Fraction], ...]

    def __post_init__(self):
        values = [v for v, _ in self.weights]
        if len(set(values)) != len(values):
            raise InputError("duplicate value in distribution")
        for _, w in self.weights:
            if w < 0:
                raise InputError("negative probability")
        if sum((w for _, w in self.weights), Fraction(0)) != 1:
            raise InputError("distribution weights must sum to 1")

    @classmethod
    def make(cls, weights: Mapping[Value, object]) -> "LocalDistribution":
        items = sorted((v, as_weight(w)) for v, w in weights.items())
        return cls(tuple(items))

    @classmethod
    def dirac(cls, value: Value) -> "LocalDistribution":
        return cls(((value, Fraction(1)),))

    @classmethod
    def uniform(cls, values: Iterable[Value]) -> "LocalDistribution":
        vals = sorted(set(values))
        if not vals:
            raise InputError("uniform distribution over empty set")
        share = Fraction(1, len(vals))
        return cls(tuple((v, share) for v in vals))

    def mass(self, value: Value) -> Fraction:
        for v, w in self.weights:
            if v == value:
                return w
        return Fraction(0)


# An extension choice maps every row of a team to a local distribution for
# the new variable; used by `extend`.
ExtensionChoice = Mapping[Assignment, LocalDistribution]


def marginal_weight(team: ProbabilisticTeam, vars: tuple[Variable, ...],
                    vals: tuple[Value, ...]) -> Fraction:
    """Total weight of rows whose restriction to `vars` equals `vals`."""
    if len(vars) != len(vals):
        raise InputError(f"{len(vars)} variables but {len(vals)} values")
    cols = [team.column(v) for v in vars]
    total = Fraction(0)
    for assignment, weight in team.rows:
        if all(assignment[c] == val for c, val in zip(cols, vals)):
            total += weight
    return total


def restrict(team: ProbabilisticTeam, keep: Iterable[Variable]) -> ProbabilisticTeam:
    """Project onto a variable subset, summing weights of merged rows."""
    keep_set = set(keep)
    for var in keep_set:
        if var not in team.domain:
            raise DomainError(f"variable {var!r} not in team domain {team.domain}")
    new_domain = tuple(v for v in team.domain if v in keep_set)
    cols = [team.column(v) for v in new_domain]
    grouped: dict[Assignment, Fraction] = {}
    for assignment, weight in team.rows:
        key = tuple(assignment[c] for c in cols)
        grouped[key] = grouped.get(key, Fraction(0)) + weight
    return ProbabilisticTeam.make(new_domain, grouped.items())


def _require_same_domain(y: ProbabilisticTeam, z: ProbabilisticTeam):
    if y.domain != z.domain:
        raise InputError(f"domain mismatch: {y.domain} vs {z.domain}")


def scaled_union(y: ProbabilisticTeam, z: ProbabilisticTeam, k) -> ProbabilisticTeam:
    """Convex combination: weight(s) = k*y(s) + (1-k)*z(s)."""
    _require_same_domain(y, z)
    k = Fraction(k)
    if not 0 <= k <= 1:
        raise InputError(f"scaling factor {k} outside [0, 1]")
    combined: dict[Assignment, Fraction] = {}
    for assignment, weight in y.rows:
        combined[assignment] = combined.get(assignment, Fraction(0)) + k * weight
    for assignment, weight in z.rows:
        combined[assignment] = combined.get(assignment, Fraction(0)) + (1 - k) * weight
    return ProbabilisticTeam.make(y.domain, combined.items())


def plain_union(y: ProbabilisticTeam, z: ProbabilisticTeam) -> ProbabilisticTeam:
    """Weight-additive union: weight(s) = y(s) + z(s)."""
    _require_same_domain(y, z)
    combined: dict[Assignment, Fraction] = {}
    for assignment, weight in y.rows:
        combined[assignment] = combined.get(assignment, Fraction(0)) + weight
    for assignment, weight in z.rows:
        combined[assignment] = combined.get(assignment, Fraction(0)) + weight
    return ProbabilisticTeam.make(y.domain, combined.items())


def _extended_domain(team: ProbabilisticTeam, x: Variable) -> tuple[Variable, ...]:
    # Requantifying an existing variable moves its column to the end.
    return tuple(v for v in team.domain if v != x) + (x,)


def duplicate(team: ProbabilisticTeam, universe: Iterable[Value],
              x: Variable) -> ProbabilisticTeam:
    """Distribute `universe` uniformly into variable `x`.

    Each row's weight is split evenly among the |universe| extensions;
    rows that become identical (when x was already bound) merge by
    summation.  Total weight is preserved.
    """
    values = sorted(set(universe))
    if not values:
        raise InputError("cannot duplicate over an empty universe")
    share = Fraction(1, len(values))
    new_domain = _extended_domain(team, x)
    keep_cols = [team.column(v) for v in new_domain[:-1]]
    grouped: dict[Assignment, Fraction] = {}
    for assignment, weight in team.rows:
        stem = tuple(assignment[c] for c in keep_cols)
        for value in values:
            key = stem + (value,)
            grouped[key] = grouped.get(key, Fraction(0)) + weight * share
    return ProbabilisticTeam.make(new_domain, grouped.items())


def extend(team: ProbabilisticTeam, choice: ExtensionChoice,
           x: Variable) -> ProbabilisticTeam:
    """Extend each row into `x` according to its local distribution."""
    for assignment, _ in team.rows:
        if assignment not in choice:
            raise InputError(f"extension choice missing row {assignment}")
    new_domain = _extended_domain(team, x)
    keep_cols = [team.column(v) for v in new_domain[:-1]]
    grouped: dict[Assignment, Fraction] = {}
    for assignment, weight in team.rows:
        stem = tuple(assignment[c] for c in keep_cols)
        for value, mass in choice[assignment].weights:
            key = stem + (value,)
            grouped[key] = grouped.get(key, Fraction(0)) + weight * mass
    return ProbabilisticTeam.make(new_domain, grouped.items())


def normalize(team: ProbabilisticTeam) -> ProbabilisticTeam:
    """Rescale weights to total 1."""
    total = team.total_weight
    if total == 0:
        raise DegenerateTeamError("cannot normalize a team of total weight 0")
    return ProbabilisticTeam.make(
        team.domain, ((a, w / total) for a, w in team.rows))


def support(team: ProbabilisticTeam) -> set[Assignment]:
    """Assignments carrying strictly positive weight."""
    return {assignment for assignment, weight in team.rows if weight > 0}


def compact(team: ProbabilisticTeam) -> ProbabilisticTeam:
    """Drop zero-weight rows (they are semantically inert)."""
    return ProbabilisticTeam.make(
        team.domain, ((a, w) for a, w in team.rows if w > 0))


# ---------------------------------------------------------------------------
# JSON interchange


def team_to_json(team: ProbabilisticTeam) -> dict:
    return {
        "vars": list(team.domain),
        "rows": [{"values": list(a), "weight": str(w)} for a, w in team.rows],
    }


def team_from_json(data: dict) -> ProbabilisticTeam:
    try:
        domain = data["vars"]
        rows = [(row["values"], row["weight"]) for row in data["rows"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed team file: {exc}")
    return ProbabilisticTeam.make(domain, rows)


def load_team(path: str) -> ProbabilisticTeam:
    with open(path, encoding="utf-8") as handle:
        return team_from_json(json.load(handle))


def structure_to_json(structure: Structure) -> dict:
    return {
        "universe": list(structure.universe),
        "relations": {name: sorted(list(t) for t in tuples)
                      for name, tuples in sorted(structure.relations.items())},
        "constants": dict(sorted(structure.constants.items())),
    }


def structure_from_json(data: dict) -> Structure:
    try:
        return Structure(
            universe=tuple(data["universe"]),
            relations={name: frozenset(tuple(t) for t in tuples)
                       for name, tuples in data.get("relations", {}).items()},
            constants=dict(data.get("constants", {})),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed structure file: {exc}")


def load_structure(path: str) -> Structure:
    with open(path, encoding="utf-8") as handle:
        return structure_from_json(json.load(handle))
