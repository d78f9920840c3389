"""Certified flag instances from matrices over Laurent polynomials.

A matrix over Q[t, t^-1] with nested row blocks realizes a flag of
linear spaces; tropicalizing its maximal minors (taking minimum
exponents) produces weight vectors that satisfy the Plücker and
incidence relations by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import DomainError, ExtRational, INF, ParseError, as_rational, enumerate_subsets
from .tropical import FlagInstance, PluckerVector


@dataclass(frozen=True)
class LaurentPoly:
    """Laurent polynomial with exact rational coefficients.

    ``terms`` maps integer exponents to nonzero coefficients, stored as a
    sorted tuple of (exponent, coefficient) pairs; the empty tuple is the
    zero polynomial.
    """

    terms: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if exps != sorted(exps) or len(set(exps)) != len(exps):
            raise DomainError("terms must be sorted by exponent and duplicate-free")
        if any(c == 0 for _, c in self.terms):
            raise DomainError("zero coefficients must not be stored")

    @classmethod
    def from_dict(cls, mapping) -> "LaurentPoly":
        items = [(int(e), as_rational(c)) for e, c in mapping.items() if c != 0]
        return cls(tuple(sorted(items)))

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        c = as_rational(c)
        return cls(((0, c),)) if c else cls()

    @classmethod
    def t(cls, exponent: int = 1, coeff=1) -> "LaurentPoly":
        coeff = as_rational(coeff)
        return cls(((int(exponent), coeff),)) if coeff else cls()

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc = dict(self.terms)
        for e, c in other.terms:
            s = acc.get(e, Fraction(0)) + c
            if s:
                acc[e] = s
            else:
                acc.pop(e, None)
        return LaurentPoly(tuple(sorted(acc.items())))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc: dict[int, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                s = acc.get(e, Fraction(0)) + c1 * c2
                if s:
                    acc[e] = s
                else:
                    acc.pop(e, None)
        return LaurentPoly(tuple(sorted(acc.items())))

    def __str__(self) -> str:
        return format_poly(self)


def valuation(f: LaurentPoly) -> ExtRational:
    """Minimum exponent carrying a nonzero coefficient; +inf for zero."""
    if f.is_zero():
        return INF
    return Fraction(f.terms[0][0])


def format_poly(f: LaurentPoly) -> str:
    if f.is_zero():
        return "0"
    pieces = []
    for e, c in f.terms:
        if e == 0:
            body = str(c)
        else:
            t_part = "t" if e == 1 else f"t^{e}"
            if c == 1:
                body = t_part
            elif c == -1:
                body = f"-{t_part}"
            else:
                body = f"{c}*{t_part}"
        pieces.append(body)
    out = pieces[0]
    for body in pieces[1:]:
        out += f" - {body[1:]}" if body.startswith("-") else f" + {body}"
    return out


def parse_poly(text: str) -> LaurentPoly:
    """Parse `1/2 - 3*t^-1 + t^2` style polynomial text.

    Terms are `c`, `c*t^k`, `t^k`, or `t`, with integer or a/b rational c
    and integer k; whitespace is insignificant.
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial", 0)
    acc: dict[int, Fraction] = {}
    pos = 0
    length = len(s)
    first = True
    while pos < length:
        sign = 1
        if s[pos] in "+-":
            if s[pos] == "-":
                sign = -1
            pos += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' before {s[pos:]!r}", pos)
        first = False
        if pos >= length:
            raise ParseError("dangling sign", pos)
        coeff = None
        start = pos
        while pos < length and (s[pos].isdigit() or s[pos] == "/"):
            pos += 1
        if pos > start:
            try:
                coeff = Fraction(s[start:pos])
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"malformed coefficient {s[start:pos]!r}: {exc}", start) from exc
        exponent = None
        if pos < length and s[pos] == "*":
            if coeff is None:
                raise ParseError("'*' without coefficient", pos)
            pos += 1
            if pos >= length or s[pos] != "t":
                raise ParseError("expected 't' after '*'", pos)
        if pos < length and s[pos] == "t":
            pos += 1
            exponent = 1
            if pos < length and s[pos] == "^":
                pos += 1
                start = pos
                if pos < length and s[pos] == "-":
                    pos += 1
                while pos < length and s[pos].isdigit():
                    pos += 1
                if pos == start or s[start:pos] == "-":
                    raise ParseError("malformed exponent", start)
                exponent = int(s[start:pos])
        if coeff is None and exponent is None:
            raise ParseError(f"unexpected character {s[pos]!r}", pos)
        if coeff is None:
            coeff = Fraction(1)
        if exponent is None:
            exponent = 0
        val = acc.get(exponent, Fraction(0)) + sign * coeff
        if val:
            acc[exponent] = val
        else:
            acc.pop(exponent, None)
    return LaurentPoly(tuple(sorted(acc.items())))


def _coerce_poly(entry) -> LaurentPoly:
    if isinstance(entry, LaurentPoly):
        return entry
    if isinstance(entry, str):
        return parse_poly(entry)
    return LaurentPoly.const(as_rational(entry))


@dataclass(frozen=True)
class PolyMatrix:
    """Row-major matrix over Laurent polynomials."""

    rows: int
    cols: int
    entries: tuple[tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DomainError("matrix dimensions must be positive")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DomainError("entry grid inconsistent with declared dimensions")

    @classmethod
    def from_rows(cls, rows) -> "PolyMatrix":
        grid = tuple(tuple(_coerce_poly(e) for e in row) for row in rows)
        if not grid or not grid[0]:
            raise DomainError("matrix needs at least one row and column")
        return cls(len(grid), len(grid[0]), grid)

    def prefix(self, row_count: int) -> "PolyMatrix":
        if not (1 <= row_count <= self.rows):
            raise DomainError(f"prefix of {row_count} rows out of range")
        return PolyMatrix(row_count, self.cols, self.entries[:row_count])

    def column_select(self, cols) -> "PolyMatrix":
        cols = list(cols)
        return PolyMatrix(
            self.rows, len(cols), tuple(tuple(row[c] for c in cols) for row in self.entries)
        )


def determinant(m: PolyMatrix) -> LaurentPoly:
    """Exact determinant by minor expansion, memoized on column masks."""
    if m.rows != m.cols:
        raise DomainError(f"determinant needs a square matrix, got {m.rows}x{m.cols}")
    size = m.rows
    entries = m.entries
    memo: dict[int, LaurentPoly] = {(1 << size) - 1: LaurentPoly.const(1)}

    def expand(col_mask: int) -> LaurentPoly:
        cached = memo.get(col_mask)
        if cached is not None:
            return cached
        row = bin(col_mask).count("1")
        acc = LaurentPoly()
        sign = 1
        for c in range(size):
            if col_mask >> c & 1:
                continue
            entry = entries[row][c]
            if entry:
                term = entry * expand(col_mask | (1 << c))
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        memo[col_mask] = acc
        return acc

    return expand(0)


class ZeroMinorError(DomainError):
    """A maximal minor vanished where a finite weight is required."""

    def __init__(self, column_sets):
        self.column_sets = tuple(column_sets)
        names = ", ".join(str(s) for s in self.column_sets)
        super().__init__(f"zero maximal minor on column sets: {names}")


def tropicalize_minors(m: PolyMatrix) -> PluckerVector:
    """Valuations of all maximal minors of a d x n matrix, as a weight vector."""
    d, n = m.rows, m.cols
    if d > n:
        raise DomainError(f"need rows <= cols, got {d}x{n}")
    weights = []
    zero_sets = []
    for s in enumerate_subsets(n, d):
        minor = determinant(m.column_select(i - 1 for i in s.members))
        if minor.is_zero():
            zero_sets.append(s)
        else:
            weights.append(valuation(minor))
    if zero_sets:
        raise ZeroMinorError(zero_sets)
    return PluckerVector.from_values(n, d, weights)


@dataclass(frozen=True)
class FlagMatrix:
    """Matrix whose first d_i rows represent the i-th flag member."""

    n: int
    dims: tuple[int, ...]
    matrix: PolyMatrix
    resamples: int = 0

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.dims, self.dims[1:])) or not self.dims:
            raise DomainError(f"dims must be strictly increasing, got {self.dims}")
        if self.dims[-1] > self.n:
            raise DomainError(f"top rank {self.dims[-1]} exceeds ground set [{self.n}]")
        if self.matrix.rows != self.dims[-1] or self.matrix.cols != self.n:
            raise DomainError("matrix shape must be max(dims) x n")

    def layer_matrix(self, index: int) -> PolyMatrix:
        return self.matrix.prefix(self.dims[index])

    def tropicalized_layers(self) -> FlagInstance:
        return FlagInstance(
            tuple(tropicalize_minors(self.layer_matrix(i)) for i in range(len(self.dims)))
        )


class GenerationError(RuntimeError):
    """Resample budget exhausted while looking for a nondegenerate matrix."""


def random_flag_matrix(
    n: int,
    dims,
    seed: int,
    coeff_bound: int = 3,
    max_resamples: int = 1000,
) -> FlagMatrix:
    """Seeded random matrix whose prefix blocks all have nonzero maximal minors.

    Entries are polynomials with exponents in {0, 1, 2} and integer
    coefficients drawn uniformly from [-coeff_bound, coeff_bound]; the
    whole matrix is redrawn until every prefix row block is totally
    nondegenerate.
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(a >= b for a, b in zip(dims, dims[1:])) or dims[-1] > n or dims[0] < 1:
        raise DomainError(f"dims {dims} inconsistent with ground set [{n}]")
    if coeff_bound < 1:
        raise DomainError("coeff_bound must be positive")
    rng = random.Random(seed)
    top = dims[-1]
    for attempt in range(max_resamples):
        grid = [
            [
                LaurentPoly.from_dict(
                    {e: rng.randint(-coeff_bound, coeff_bound) for e in (0, 1, 2)}
                )
                for _ in range(n)
            ]
            for _ in range(top)
        ]
        matrix = PolyMatrix.from_rows(grid)
        if all(_prefix_nondegenerate(matrix, d) for d in dims):
            return FlagMatrix(n, dims, matrix, resamples=attempt)
    raise GenerationError(
        f"no nondegenerate matrix found for n={n}, dims={dims} in {max_resamples} draws"
    )


def _prefix_nondegenerate(matrix: PolyMatrix, d: int) -> bool:
    block = matrix.prefix(d)
    return all(
        not determinant(block.column_select(cols)).is_zero()
        for cols in combinations(range(matrix.cols), d)
    )
