"""Ground-set combinatorics and exact arithmetic primitives.

Everything downstream works over subsets of [n] = {1, ..., n} encoded as
bitmasks, exact rationals (``fractions.Fraction``), and rationals extended
by a single +infinity value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, inf

# Rational weights are stdlib Fractions: reduced canonical form, exact
# field arithmetic with arbitrary-precision integers.
Rational = Fraction

# Extended rationals: a Fraction, or the float +inf sentinel.  Native
# mixed arithmetic already has the semantics we need: inf absorbs
# addition and compares above every Fraction.
INF = inf
ExtRational = Fraction | float

MAX_GROUND_SET = 63  # masks must fit a machine word


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class ParseError(ValueError):
    """Malformed textual input; carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at position {position})")
        self.position = position


def is_finite(x: ExtRational) -> bool:
    return x != INF


def as_rational(x) -> Fraction:
    """Coerce ints/Fractions (and mpq-likes) to Fraction; reject floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise DomainError(f"floating point value {x!r} not allowed in exact context")
    num = getattr(x, "numerator", None)
    den = getattr(x, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise DomainError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class Subset:
    """A subset of [n] = {1, ..., n}, stored as an n-bit mask.

    Bit i-1 of ``mask`` encodes membership of element i.  Instances are
    immutable and hashable; ``members`` is always sorted.
    """

    n: int
    mask: int

    def __post_init__(self):
        if not (1 <= self.n <= MAX_GROUND_SET):
            raise DomainError(f"ground-set size {self.n} out of range 1..{MAX_GROUND_SET}")
        if not (0 <= self.mask < (1 << self.n)):
            raise DomainError(f"mask {self.mask:#x} has elements outside [{self.n}]")

    @classmethod
    def from_members(cls, n: int, members) -> "Subset":
        mask = 0
        for m in members:
            m = int(m)
            if not (1 <= m <= n):
                raise DomainError(f"element {m} outside ground set [{n}]")
            bit = 1 << (m - 1)
            if mask & bit:
                raise DomainError(f"duplicate element {m}")
            mask |= bit
        return cls(n, mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    @property
    def card(self) -> int:
        return self.mask.bit_count()

    @property
    def key(self) -> tuple[int, ...]:
        """Sort key: cardinality first, then lexicographic member order."""
        return (self.card, *self.members)

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.n and self.mask >> (element - 1) & 1 == 1

    def __iter__(self):
        return iter(self.members)

    def __str__(self) -> str:
        return format_subset(self)

    def with_element(self, element: int) -> "Subset":
        if element in self:
            raise DomainError(f"element {element} already present in {self}")
        return Subset(self.n, self.mask | (1 << (element - 1)))

    def without(self, element: int) -> "Subset":
        if element not in self:
            raise DomainError(f"element {element} not present in {self}")
        return Subset(self.n, self.mask & ~(1 << (element - 1)))

    def union(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.n, self.mask | other.mask)

    def intersection(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.n, self.mask & other.mask)

    def difference(self, other: "Subset") -> "Subset":
        self._check_same_ground(other)
        return Subset(self.n, self.mask & ~other.mask)

    def issubset(self, other: "Subset") -> bool:
        self._check_same_ground(other)
        return self.mask & ~other.mask == 0

    def complement(self) -> "Subset":
        return Subset(self.n, ((1 << self.n) - 1) ^ self.mask)

    def indicator(self) -> tuple[int, ...]:
        """0/1 coordinate vector in n-space."""
        return tuple(self.mask >> i & 1 for i in range(self.n))

    def _check_same_ground(self, other: "Subset") -> None:
        if self.n != other.n:
            raise DomainError(f"ground-set mismatch: [{self.n}] vs [{other.n}]")


def empty_subset(n: int) -> Subset:
    return Subset(n, 0)


def full_subset(n: int) -> Subset:
    return Subset(n, (1 << n) - 1)


@lru_cache(maxsize=None)
def enumerate_subsets(n: int, d: int) -> tuple[Subset, ...]:
    """All d-subsets of [n] in lexicographic order of sorted member lists."""
    if not (1 <= n <= MAX_GROUND_SET):
        raise DomainError(f"ground-set size {n} out of range 1..{MAX_GROUND_SET}")
    if not (0 <= d <= n):
        raise DomainError(f"subset size {d} out of range 0..{n}")
    out = tuple(Subset.from_members(n, c) for c in combinations(range(1, n + 1), d))
    assert len(out) == comb(n, d)
    return out


@lru_cache(maxsize=None)
def subset_rank(n: int, d: int) -> dict[int, int]:
    """Mask -> position in the lexicographic enumeration of d-subsets."""
    return {s.mask: i for i, s in enumerate(enumerate_subsets(n, d))}


def complement(s: Subset) -> Subset:
    return s.complement()


def format_subset(s: Subset) -> str:
    if s.card == 0:
        return "{}"
    if s.n <= 9:
        return "".join(str(m) for m in s.members)
    return ",".join(str(m) for m in s.members)


def parse_subset(text: str, n: int) -> Subset:
    """Parse the textual subset format.

    For n <= 9 the text is a digit string ("134"); for n > 9 it is a
    comma-separated list ("1,10,12").  "{}" denotes the empty set in both
    regimes.
    """
    if not (1 <= n <= MAX_GROUND_SET):
        raise DomainError(f"ground-set size {n} out of range 1..{MAX_GROUND_SET}")
    text = text.strip()
    if text == "{}" or text == "":
        return empty_subset(n)
    mask = 0
    if n <= 9:
        for pos, ch in enumerate(text):
            if not ch.isdigit() or ch == "0":
                raise ParseError(f"invalid character {ch!r} in subset", pos)
            m = int(ch)
            if m > n:
                raise ParseError(f"element {m} exceeds ground set [{n}]", pos)
            bit = 1 << (m - 1)
            if mask & bit:
                raise ParseError(f"duplicate element {m}", pos)
            mask |= bit
    else:
        pos = 0
        for piece in text.split(","):
            stripped = piece.strip()
            if not stripped.isdigit():
                raise ParseError(f"invalid element {piece!r}", pos)
            m = int(stripped)
            if not (1 <= m <= n):
                raise ParseError(f"element {m} outside ground set [{n}]", pos)
            bit = 1 << (m - 1)
            if mask & bit:
                raise ParseError(f"duplicate element {m}", pos)
            mask |= bit
            pos += len(piece) + 1
    return Subset(n, mask)


def format_rational(x: Fraction) -> int | str:
    """Reduced 'a/b' string, or a bare int for integral values."""
    x = as_rational(x)
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(value) -> Fraction:
    """Accept ints or 'a/b' / 'a' strings; reject anything lossy."""
    if isinstance(value, bool):
        raise ParseError(f"boolean {value!r} is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed rational {value!r}: {exc}") from exc
    raise ParseError(f"cannot parse rational from {value!r}")
