"""Small exact-integer helpers shared across modules.

Everything here is elementary and exhaustively testable: trial division,
divisor lists, discriminant splitting.  Inputs are desk-scale, so no
attempt is made at sub-exponential factoring.
"""

from __future__ import annotations

import math
from functools import lru_cache


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by a plain sieve."""
    if n < 2:
        return []
    mark = bytearray([1]) * (n + 1)
    mark[0] = mark[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if mark[p]:
            mark[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i in range(2, n + 1) if mark[i]]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, exponent), ...), p ascending."""
    if n < 1:
        raise ValueError(f"factorize expects n >= 1, got {n}")
    out = []
    m = n
    for p in (2, 3):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            out.append((p, e))
    d = 5
    while d * d <= m:
        for step in (d, d + 2):
            e = 0
            while m % step == 0:
                m //= step
                e += 1
            if e:
                out.append((step, e))
        d += 6
    if m > 1:
        out.append((m, 1))
    return tuple(sorted(out))


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def split_discriminant(disc: int) -> tuple[int, int]:
    """Write a negative discriminant as disc = f^2 * d_K with d_K fundamental.

    Returns (conductor f, fundamental discriminant d_K).  Requires
    disc < 0 and disc = 0 or 1 mod 4.
    """
    if disc >= 0:
        raise ValueError(f"discriminant must be negative, got {disc}")
    if disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a discriminant (need 0 or 1 mod 4)")
    f = 1
    core = -disc
    for p, e in factorize(-disc):
        f *= p ** (e // 2)
        core //= p ** (2 * (e // 2))
    d0 = -core  # squarefree part, negative
    if d0 % 4 == 1:
        d_k = d0
    else:
        d_k = 4 * d0
        if f % 2:
            raise AssertionError("square part lost parity")  # unreachable for valid disc
        f //= 2
    assert f * f * d_k == disc
    return f, d_k


def is_fundamental_discriminant(d: int) -> bool:
    """True for discriminants of imaginary quadratic fields (d < 0)."""
    if d >= 0 or d % 4 not in (0, 1):
        return False
    if d % 4 == 1:
        return _is_squarefree(d)
    q = d // 4
    return q % 4 in (2, 3) and _is_squarefree(q)


def _is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(abs(n)))


def pairwise_sum(values):
    """Sum in a fixed pairwise tree, deterministic regardless of chunking."""
    vals = list(values)
    if not vals:
        return 0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def pairwise_product(values):
    """Product in a fixed pairwise tree (mirrors pairwise_sum)."""
    vals = list(values)
    if not vals:
        return 1
    while len(vals) > 1:
        nxt = [vals[i] * vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
