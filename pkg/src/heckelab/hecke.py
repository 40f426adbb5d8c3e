"""Hecke correspondence T_N on X(1): coset representatives and orbits."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import repeat
from typing import NamedTuple

from mpmath import mp, mpc, mpf

from .arith import divisors, prime_divisors
from .numerics import (
    DEFAULT_PRECISION,
    Precision,
    UpperHalfPoint,
    eval_j,
    reduce_to_fundamental_domain,
)

log = logging.getLogger(__name__)


class CosetTriple(NamedTuple):
    """Upper-triangular representative (alpha beta; 0 delta), alpha*delta = N."""

    alpha: int
    beta: int
    delta: int
    n: int


class OrbitPoint(NamedTuple):
    coset: CosetTriple
    tau: UpperHalfPoint  # reduced representative
    j: mpc


@dataclass(frozen=True)
class HeckeOrbit:
    n: int
    base: UpperHalfPoint
    points: tuple[OrbitPoint, ...]


def e_n(n: int) -> int:
    """Degree of T_N: N * prod_{p | N} (1 + 1/p)."""
    if n < 1:
        raise ValueError(f"N must be positive, got {n}")
    out = n
    for p in prime_divisors(n):
        out = out // p * (p + 1)
    return out


def coset_reps(n: int) -> list[CosetTriple]:
    """All (alpha, beta, delta) with alpha*delta = N, 0 <= beta < delta,
    gcd(alpha, beta, delta) = 1, in lexicographic (alpha, beta) order."""
    if n < 1:
        raise ValueError(f"N must be positive, got {n}")
    reps: list[CosetTriple] = []
    gcd = math.gcd
    for alpha in divisors(n):
        delta = n // alpha
        g = gcd(alpha, delta)
        if g == 1:
            # all beta qualify; tuple.__new__ keeps the N <= 5000 sweep
            # (19M triples) inside the acceptance-time budget
            reps.extend(
                map(
                    tuple.__new__,
                    repeat(CosetTriple),
                    zip(repeat(alpha), range(delta), repeat(delta), repeat(n)),
                )
            )
        else:
            reps.extend(
                CosetTriple(alpha, beta, delta, n)
                for beta in range(delta)
                if gcd(beta, g) == 1
            )
    return reps


def hecke_orbit(
    tau: UpperHalfPoint, n: int, prec: Precision = DEFAULT_PRECISION
) -> HeckeOrbit:
    """T_N * tau as a tuple of e_N reduced points with j-values.

    Points are listed in coset order; repeated values are kept with
    multiplicity.
    """
    reps = coset_reps(n)
    points = []
    with mp.workprec(prec.bits + 32):
        z = tau.to_mpc()
        for rep in reps:
            w = (rep.alpha * z + rep.beta) / rep.delta
            moved = UpperHalfPoint(w.real, w.imag)
            reduced, _ = reduce_to_fundamental_domain(moved, prec)
            points.append(OrbitPoint(rep, reduced, eval_j(reduced, prec)))
    return HeckeOrbit(n, tau, tuple(points))


def orbit_symmetry_check(
    tau: UpperHalfPoint, n: int, prec: Precision = DEFAULT_PRECISION
) -> bool:
    """Correspondence symmetry: tau lies in T_N of each point of T_N * tau.

    Checked on j-values within relative tolerance 2^-(bits-20); offending
    cosets are logged at DEBUG level.
    """
    tol = 2.0 ** (-(prec.bits - 20))
    j_base = eval_j(tau, prec)
    scale = max(1.0, float(abs(j_base)))
    orbit = hecke_orbit(tau, n, prec)
    ok = True
    for point in orbit.points:
        back = hecke_orbit(point.tau, n, prec)
        if not any(abs(p.j - j_base) <= tol * scale for p in back.points):
            log.debug(
                "symmetry failure at coset %s: j base %s not in return orbit",
                point.coset,
                j_base,
            )
            ok = False
    return ok


class EquiStat(NamedTuple):
    fraction: float
    prediction: float


def equi_fraction(orbit: HeckeOrbit, im_threshold) -> EquiStat:
    """Fraction of orbit points with Im >= threshold, next to the
    hyperbolic-measure prediction min(1, (3/pi) / threshold)."""
    y0 = float(im_threshold)
    if not y0 > 0:
        raise ValueError("im_threshold must be positive")
    hits = sum(1 for p in orbit.points if float(p.tau.im) >= y0)
    prediction = min(1.0, 3.0 / (math.pi * y0))
    return EquiStat(hits / len(orbit.points), prediction)


def close_point_count(orbit: HeckeOrbit, z, eta) -> int:
    """Number of orbit j-values within eta of z (multiplicity counted)."""
    if not float(eta) > 0:
        raise ValueError("eta must be positive")
    zc = mpc(z)
    return sum(1 for p in orbit.points if abs(p.j - zc) <= mpf(eta))
