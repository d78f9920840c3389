"""Tropical Plücker vectors and the relations cut out by them.

Implements the min-plus vanishing test ("minimum achieved at least
twice"), the three-term Plücker relations, duality by complementation,
tropical linear-space membership, cocircuit points, and the incidence
relations between two vectors of different ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .core import (
    INF,
    DomainError,
    ExtRational,
    Subset,
    as_rational,
    enumerate_subsets,
    format_subset,
    is_finite,
    subset_rank,
)


@dataclass(frozen=True)
class PluckerVector:
    """Total assignment of exact rationals to all d-subsets of [n].

    ``values`` is aligned with ``enumerate_subsets(n, d)`` so that
    vectors are hashable and enumeration order is canonical.
    """

    n: int
    d: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not (1 <= self.d <= self.n - 1):
            raise DomainError(f"subset size d={self.d} must satisfy 1 <= d <= n-1 (n={self.n})")
        expected = comb(self.n, self.d)
        if len(self.values) != expected:
            raise DomainError(f"expected {expected} weights, got {len(self.values)}")

    @classmethod
    def from_values(cls, n: int, d: int, values) -> "PluckerVector":
        return cls(n, d, tuple(as_rational(v) for v in values))

    @classmethod
    def from_weights(cls, n: int, d: int, weights) -> "PluckerVector":
        """Build from a mapping Subset -> rational; must be total."""
        table = {}
        for key, value in weights.items():
            if not isinstance(key, Subset):
                raise DomainError(f"weight key {key!r} is not a Subset")
            if key.n != n or key.card != d:
                raise DomainError(f"weight key {key} is not a {d}-subset of [{n}]")
            if key.mask in table:
                raise DomainError(f"duplicate weight for {key}")
            table[key.mask] = as_rational(value)
        subsets = enumerate_subsets(n, d)
        missing = [s for s in subsets if s.mask not in table]
        if missing:
            raise DomainError(f"missing weights for {', '.join(format_subset(s) for s in missing)}")
        return cls(n, d, tuple(table[s.mask] for s in subsets))

    @classmethod
    def zeros(cls, n: int, d: int) -> "PluckerVector":
        return cls(n, d, (Fraction(0),) * comb(n, d))

    @property
    def subsets(self) -> tuple[Subset, ...]:
        return enumerate_subsets(self.n, self.d)

    def __getitem__(self, s: Subset) -> Fraction:
        if s.n != self.n or s.card != self.d:
            raise DomainError(f"{s} is not a {self.d}-subset of [{self.n}]")
        return self.values[subset_rank(self.n, self.d)[s.mask]]

    def weight_of_mask(self, mask: int) -> Fraction:
        return self.values[subset_rank(self.n, self.d)[mask]]

    def items(self):
        return zip(self.subsets, self.values)


@dataclass(frozen=True)
class TropPoint:
    """A point of tropical projective space, modulo adding a constant.

    Canonical form shifts the minimum finite coordinate to 0; at least
    one coordinate must be finite.
    """

    coords: tuple[ExtRational, ...]

    def __post_init__(self):
        finite = [c for c in self.coords if is_finite(c)]
        if not finite:
            raise DomainError("tropical point needs at least one finite coordinate")
        if min(finite) != 0:
            raise DomainError("non-canonical TropPoint; use TropPoint.of()")

    @classmethod
    def of(cls, coords) -> "TropPoint":
        vals: list[ExtRational] = []
        for c in coords:
            if isinstance(c, float):
                if c != INF:
                    raise DomainError(f"only +inf is allowed as a non-rational coordinate, got {c!r}")
                vals.append(INF)
            else:
                vals.append(as_rational(c))
        finite = [c for c in vals if is_finite(c)]
        if not finite:
            raise DomainError("tropical point needs at least one finite coordinate")
        shift = min(finite)
        return cls(tuple(c - shift if is_finite(c) else INF for c in vals))

    @property
    def n(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class RelationViolation:
    """Witness that a three-term or incidence form has a unique minimum.

    ``kind`` is "plucker" (witness S and the quadruple i<j<k<l) or
    "incidence" (witness S and T).
    """

    kind: str
    S: Subset
    indices: tuple[int, ...] = ()
    T: Subset | None = None
    terms: tuple[ExtRational, ...] = field(default=())

    def describe(self) -> str:
        terms = ", ".join(str(t) for t in self.terms)
        if self.kind == "plucker":
            quad = ",".join(str(i) for i in self.indices)
            return f"plucker S={format_subset(self.S)} ({quad}): terms ({terms})"
        return f"incidence S={format_subset(self.S)} T={format_subset(self.T)}: terms ({terms})"


class PluckerRelationError(DomainError):
    """Raised when an operation requires a valid tropical Plücker vector."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        first = self.violations[0].describe() if self.violations else ""
        super().__init__(f"tropical Plücker relations violated ({len(self.violations)} witnesses): {first}")


def trop_vanishes(terms) -> bool:
    """Min-plus vanishing: the minimum is attained at least twice.

    A list whose minimum is +inf counts as vanishing (the classical form
    restricts to the zero polynomial there).
    """
    terms = list(terms)
    if not terms:
        raise DomainError("trop_vanishes needs at least one term")
    lo = min(terms)
    if not is_finite(lo):
        return True
    hits = 0
    for t in terms:
        if t == lo:
            hits += 1
            if hits >= 2:
                return True
    return False


def check_plucker(p: PluckerVector) -> list[RelationViolation]:
    """All violated three-term Plücker relations, exhaustively.

    For every S of size d-2 and i<j<k<l outside S the three terms are
    p[Sij]+p[Skl], p[Sik]+p[Sjl], p[Sil]+p[Sjk].  Empty result means the
    vector is a tropical Plücker vector.  When d < 2 or n-d < 2 there are
    no relations.
    """
    n, d = p.n, p.d
    if d < 2 or n - d < 2:
        return []
    rank = subset_rank(n, d)
    values = p.values
    violations = []
    for s in enumerate_subsets(n, d - 2):
        rest = [e for e in range(1, n + 1) if e not in s]
        for idx_i in range(len(rest) - 3):
            for idx_j in range(idx_i + 1, len(rest) - 2):
                for idx_k in range(idx_j + 1, len(rest) - 1):
                    for idx_l in range(idx_k + 1, len(rest)):
                        i, j, k, l = rest[idx_i], rest[idx_j], rest[idx_k], rest[idx_l]
                        base = s.mask
                        bi, bj = 1 << (i - 1), 1 << (j - 1)
                        bk, bl = 1 << (k - 1), 1 << (l - 1)
                        terms = (
                            values[rank[base | bi | bj]] + values[rank[base | bk | bl]],
                            values[rank[base | bi | bk]] + values[rank[base | bj | bl]],
                            values[rank[base | bi | bl]] + values[rank[base | bj | bk]],
                        )
                        if not trop_vanishes(terms):
                            violations.append(
                                RelationViolation("plucker", s, (i, j, k, l), None, terms)
                            )
    return violations


def is_plucker_vector(p: PluckerVector) -> bool:
    return not check_plucker(p)


def require_plucker(p: PluckerVector) -> None:
    violations = check_plucker(p)
    if violations:
        raise PluckerRelationError(violations)


def dualize(p: PluckerVector) -> PluckerVector:
    """Complementation duality: the dual weight of J is the weight of [n]\\J."""
    n = p.n
    dual_d = n - p.d
    return PluckerVector(
        n, dual_d, tuple(p[s.complement()] for s in enumerate_subsets(n, dual_d))
    )


def point_in_space(p: PluckerVector, x: TropPoint) -> bool:
    """Membership of x in the tropical linear space of p.

    True iff for every (d+1)-subset J the terms p[J\\{j}] + x_j (j in J)
    attain their minimum at least twice.  Requires p to satisfy the
    Plücker relations.
    """
    require_plucker(p)
    if x.n != p.n:
        raise DomainError(f"point in R^{x.n} incompatible with ground set [{p.n}]")
    rank = subset_rank(p.n, p.d)
    values = p.values
    for j_set in enumerate_subsets(p.n, p.d + 1):
        terms = [
            values[rank[j_set.mask & ~(1 << (j - 1))]] + x.coords[j - 1] for j in j_set
        ]
        if not trop_vanishes(terms):
            return False
    return True


def cocircuit(p: PluckerVector, k: Subset) -> TropPoint:
    """The point with coordinates p[K + j] for j outside K, +inf on K."""
    require_plucker(p)
    if k.n != p.n or k.card != p.d - 1:
        raise DomainError(f"cocircuit support must be a {p.d - 1}-subset of [{p.n}]")
    coords = [
        INF if j in k else p[k.with_element(j)] for j in range(1, p.n + 1)
    ]
    return TropPoint.of(coords)


def check_incidence(x: PluckerVector, y: PluckerVector) -> list[RelationViolation]:
    """All violated tropical incidence relations between x (rank p) and y (rank q).

    For every S of size p-1 and T of size q+1 the terms are
    x[S+i] + y[T-i] over i in T\\S; each list must attain its minimum at
    least twice.
    """
    if x.n != y.n:
        raise DomainError(f"ground-set mismatch: [{x.n}] vs [{y.n}]")
    if x.d > y.d:
        raise DomainError(f"incidence needs d(x)={x.d} <= d(y)={y.d}")
    n = x.n
    rank_x = subset_rank(n, x.d)
    rank_y = subset_rank(n, y.d)
    violations = []
    for s in enumerate_subsets(n, x.d - 1):
        for t in enumerate_subsets(n, y.d + 1):
            diff = t.mask & ~s.mask
            terms = []
            for i in range(1, n + 1):
                bit = 1 << (i - 1)
                if diff & bit:
                    terms.append(
                        x.values[rank_x[s.mask | bit]] + y.values[rank_y[t.mask & ~bit]]
                    )
            if not trop_vanishes(terms):
                violations.append(RelationViolation("incidence", s, (), t, tuple(terms)))
    return violations


@dataclass(frozen=True)
class FlagInstance:
    """Ordered layers of strictly increasing rank on a common ground set."""

    layers: tuple[PluckerVector, ...]

    def __post_init__(self):
        if not self.layers:
            raise DomainError("flag needs at least one layer")
        n = self.layers[0].n
        for layer in self.layers:
            if layer.n != n:
                raise DomainError("layers must share one ground set")
        dims = [layer.d for layer in self.layers]
        if any(a >= b for a, b in zip(dims, dims[1:])):
            raise DomainError(f"layer sizes must strictly increase, got {dims}")

    @property
    def n(self) -> int:
        return self.layers[0].n

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(layer.d for layer in self.layers)


@dataclass(frozen=True)
class FlagReport:
    """Relation check results for one flag candidate."""

    flag: FlagInstance
    plucker: tuple[tuple[RelationViolation, ...], ...]
    incidence: tuple[tuple[int, int, tuple[RelationViolation, ...]], ...]

    @property
    def is_valid(self) -> bool:
        return all(not v for v in self.plucker) and all(not v for _, _, v in self.incidence)


def check_flag(flag: FlagInstance, all_pairs: bool = False) -> FlagReport:
    """Per-layer Plücker checks plus incidence checks on layer pairs.

    By default only consecutive pairs are checked; with ``all_pairs``
    every ordered pair of layers is.
    """
    plucker = tuple(tuple(check_plucker(layer)) for layer in flag.layers)
    pairs = []
    count = len(flag.layers)
    if all_pairs:
        index_pairs = [(a, b) for a in range(count) for b in range(a + 1, count)]
    else:
        index_pairs = [(a, a + 1) for a in range(count - 1)]
    for a, b in index_pairs:
        pairs.append((a, b, tuple(check_incidence(flag.layers[a], flag.layers[b]))))
    return FlagReport(flag, plucker, tuple(pairs))
