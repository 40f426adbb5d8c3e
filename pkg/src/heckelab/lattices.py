"""Positive-definite quadratic lattices of rank 2 and 4.

Gram matrices carry exact rational entries (degree forms produce
half-integral bilinear values); every count below comes from exhaustive
enumeration inside a rigorous box, never from an asymptotic.  The
discriminant convention is the Gram determinant q(e)q(f) - q(e,f)^2; the
classical binary-form discriminant b^2 - 4ac equals -4 times it and is not
used internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np


class UnsupportedConfigurationError(ValueError):
    """The requested ideal-lattice model falls outside the covered cases."""


def _det(rows: tuple[tuple[Fraction, ...], ...]) -> Fraction:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for col in range(n):
        minor = tuple(r[:col] + r[col + 1 :] for r in rows[1:])
        term = rows[0][col] * _det(minor)
        total += term if col % 2 == 0 else -term
    return total


@dataclass(frozen=True)
class GramForm:
    """Symmetric Gram matrix over the rationals, rank 2 or 4."""

    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rank = len(self.gram)
        if rank not in (2, 4):
            raise ValueError(f"rank must be 2 or 4, got {rank}")
        norm = tuple(
            tuple(Fraction(v) for v in row) for row in self.gram
        )
        object.__setattr__(self, "gram", norm)
        for i in range(rank):
            if len(norm[i]) != rank:
                raise ValueError("gram matrix is not square")
            for j in range(i):
                if norm[i][j] != norm[j][i]:
                    raise ValueError("gram matrix is not symmetric")
        for k in range(1, rank + 1):
            if _det(tuple(row[:k] for row in norm[:k])) <= 0:
                raise ValueError("form is not positive definite")

    @classmethod
    def from_rows(cls, rows) -> "GramForm":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def disc(self) -> Fraction:
        return _det(self.gram)

    def value(self, vector) -> Fraction:
        """q(v) = v^T G v for an integer coordinate vector."""
        total = Fraction(0)
        for i, vi in enumerate(vector):
            for j, vj in enumerate(vector):
                total += self.gram[i][j] * vi * vj
        return total


def lagrange_reduce(form: GramForm) -> GramForm:
    """Classical rank-2 reduction: q(e) <= q(f) and 2|q(e,f)| <= q(e)."""
    if form.rank != 2:
        raise ValueError("lagrange_reduce applies to rank-2 forms")
    a, b, c = form.gram[0][0], form.gram[0][1], form.gram[1][1]
    while True:
        if c < a:
            a, c = c, a
        t = round(b / a)
        if t:
            # f -> f - t e
            c = c - 2 * t * b + t * t * a
            b = b - t * a
        if 2 * abs(b) <= a <= c:
            return GramForm(((a, b), (b, c)))


def counting_bound(n: int, disc) -> float:
    """1 + 8 sqrt(n) + 16 n / sqrt(disc)."""
    disc = Fraction(disc)
    if disc <= 0:
        raise ValueError("disc must be positive")
    return 1.0 + 8.0 * math.sqrt(n) + 16.0 * n / math.sqrt(disc)


def _integer_scale(form: GramForm) -> tuple[int, list[list[int]]]:
    scale = 1
    for row in form.gram:
        for v in row:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
    mat = [[int(v * scale) for v in row] for row in form.gram]
    return scale, mat


def _coordinate_bounds(form: GramForm, n) -> list[int]:
    """|x_i| <= sqrt(n * (G^-1)_ii), the rigorous ellipsoid box."""
    rank = form.rank
    det = form.disc
    bounds = []
    cap = Fraction(n)
    for i in range(rank):
        minor_rows = tuple(
            tuple(form.gram[r][c] for c in range(rank) if c != i)
            for r in range(rank)
            if r != i
        )
        inv_ii = _det(minor_rows) / det
        limit = cap * inv_ii
        bounds.append(isqrt(limit.numerator // limit.denominator))
    return bounds


def _value_counts(form: GramForm, n: int) -> np.ndarray:
    """counts[N] = #{v : q(v) = N} for 0 <= N <= n, by exact enumeration.

    The inner coordinate is vectorized; outer coordinates are plain loops
    (the boxes in play stay small enough that this dominates nothing).
    """
    counts = np.zeros(n + 1, dtype=np.int64)
    if n < 0:
        return counts
    scale, mat = _integer_scale(form)
    bounds = _coordinate_bounds(form, n)
    cap = scale * n
    last = form.rank - 1
    xs = np.arange(-bounds[last], bounds[last] + 1, dtype=np.int64)
    quad = mat[last][last] * xs * xs

    def sweep(const: int, lin: int) -> None:
        q = const + lin * xs + quad
        vals = q[(q >= 0) & (q <= cap)]
        vals = vals[vals % scale == 0] // scale
        np.add.at(counts, vals, 1)

    if form.rank == 2:
        for x0 in range(-bounds[0], bounds[0] + 1):
            sweep(mat[0][0] * x0 * x0, 2 * mat[0][1] * x0)
    else:
        for x0 in range(-bounds[0], bounds[0] + 1):
            for x1 in range(-bounds[1], bounds[1] + 1):
                for x2 in range(-bounds[2], bounds[2] + 1):
                    const = (
                        mat[0][0] * x0 * x0
                        + mat[1][1] * x1 * x1
                        + mat[2][2] * x2 * x2
                        + 2 * (mat[0][1] * x0 * x1 + mat[0][2] * x0 * x2 + mat[1][2] * x1 * x2)
                    )
                    lin = 2 * (mat[0][3] * x0 + mat[1][3] * x1 + mat[2][3] * x2)
                    sweep(const, lin)
    return counts


def represented_values(form: GramForm, n: int) -> set[int]:
    """Positive integers N <= n of the shape q(v), v a lattice vector."""
    if form.rank != 2:
        raise ValueError("represented_values applies to rank-2 forms")
    if n <= 0:
        return set()
    counts = _value_counts(lagrange_reduce(form), n)
    return {int(v) for v in np.nonzero(counts[1:])[0] + 1}


def fiber_count(form: GramForm, n: int) -> int:
    """Exact number of lattice vectors with q(v) = n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return int(_value_counts(form, n)[n])


def ball_count(form: GramForm, n: int) -> int:
    """Exact number of lattice vectors with q(v) <= n (zero included)."""
    if form.rank != 4:
        raise ValueError("ball_count applies to rank-4 forms")
    if n < 0:
        return 0
    return int(_value_counts(form, n).sum())


def dense_fiber_set(form: GramForm, eps1, n: int) -> set[int]:
    """{N <= n : fiber_count(form, N) >= eps1 * N}."""
    if form.rank != 4:
        raise ValueError("dense_fiber_set applies to rank-4 forms")
    if eps1 <= 0:
        raise ValueError("eps1 must be positive")
    counts = _value_counts(form, n)
    return {N for N in range(1, n + 1) if counts[N] >= eps1 * N}


def reduced_primitive_forms(disc: int) -> list[tuple[int, int, int]]:
    """All reduced primitive (a, b, c) with b^2 - 4ac = disc < 0, a > 0.

    One per proper ideal class of the order of that discriminant.
    """
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not an imaginary quadratic discriminant")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (a == c or a == abs(b)):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return sorted(out)


def ideal_hom_disc_check(fundamental_disc: int, conductor: int) -> bool:
    """|disc End(E)| >= |disc Hom(E, E')| on ideal-lattice models.

    E and E' are complex tori for proper ideals of the order of the given
    conductor inside the field of the fundamental discriminant.  The End
    lattice carries the norm form of the order; each Hom lattice carries
    the scaled norm form of an ideal class, whose Gram matrix is read off a
    reduced primitive form.  Returns True iff the inequality holds against
    every class.
    """
    from .arith import is_fundamental_discriminant

    if conductor < 1:
        raise UnsupportedConfigurationError("conductor must be >= 1")
    if not is_fundamental_discriminant(fundamental_disc):
        raise UnsupportedConfigurationError(
            f"{fundamental_disc} is not a fundamental imaginary quadratic discriminant"
        )
    disc = conductor * conductor * fundamental_disc
    parity = disc & 1
    end_form = GramForm.from_rows(
        (
            (1, Fraction(parity, 2)),
            (Fraction(parity, 2), Fraction(parity - disc, 4)),
        )
    )
    end_disc = end_form.disc
    for a, b, c in reduced_primitive_forms(disc):
        hom_form = GramForm.from_rows(
            ((a, Fraction(b, 2)), (Fraction(b, 2), c))
        )
        if end_disc < hom_form.disc:
            return False
    return True
