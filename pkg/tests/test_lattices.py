import random
from fractions import Fraction
from math import gcd

import pytest

from heckelab.lattices import (
    GramForm,
    UnsupportedConfigurationError,
    ball_count,
    counting_bound,
    dense_fiber_set,
    fiber_count,
    ideal_hom_disc_check,
    lagrange_reduce,
    reduced_primitive_forms,
    represented_values,
)

I2 = GramForm.from_rows(((1, 0), (0, 1)))
I4 = GramForm.from_rows(
    ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
)


def _conjugate(form, u):
    # G -> U^T G U; U integral with det +-1 keeps the lattice
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            total = Fraction(0)
            for k in range(2):
                for l in range(2):
                    total += u[k][i] * form.gram[k][l] * u[l][j]
            row.append(total)
        rows.append(tuple(row))
    return GramForm(tuple(rows))


def _random_unimodular(rng, steps=6):
    u = [[1, 0], [0, 1]]
    for _ in range(steps):
        t = rng.randrange(-3, 4)
        if rng.random() < 0.5:
            u = [[u[0][0] + t * u[1][0], u[0][1] + t * u[1][1]], u[1]]
        else:
            u = [u[0], [u[1][0] + t * u[0][0], u[1][1] + t * u[0][1]]]
    if rng.random() < 0.5:
        u = [u[1], u[0]]
    return u


def _random_reduced(rng, half_integral=False):
    a = rng.randrange(1, 12)
    b_twice = rng.randrange(-a, a + 1)  # 2|b| <= a in Gram units
    if not half_integral:
        b = Fraction(b_twice // 1)
        if 2 * abs(b) > a:
            b = Fraction(0)
    else:
        b = Fraction(b_twice, 2)
    c = rng.randrange(a, a + 12)
    return GramForm.from_rows(((a, b), (b, c)))


def _brute_values(form, n):
    out = set()
    # generous box: min eigenvalue >= det/trace
    tr = form.gram[0][0] + form.gram[1][1]
    lam = form.disc / tr
    bound = 1
    while lam * bound * bound < n:
        bound += 1
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            q = form.value((x, y))
            if 0 < q <= n and q.denominator == 1:
                out.add(int(q))
    return out


def test_gram_validation():
    with pytest.raises(ValueError):
        GramForm.from_rows(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(ValueError):
        GramForm.from_rows(((1, 1), (2, 1)))
    with pytest.raises(ValueError):
        GramForm.from_rows(((1, 2), (2, 1)))  # indefinite
    with pytest.raises(ValueError):
        GramForm.from_rows(((0, 0), (0, 1)))
    half = GramForm.from_rows(((1, Fraction(1, 2)), (Fraction(1, 2), 1)))
    assert half.disc == Fraction(3, 4)
    assert half.value((1, 1)) == 3
    assert half.value((1, -1)) == 1


def test_lagrange_reduce_normalizes():
    unimodular = GramForm.from_rows(((10, 7), (7, 5)))
    assert lagrange_reduce(unimodular).gram == I2.gram
    rng = random.Random(17)
    for _ in range(60):
        base = _random_reduced(rng, half_integral=rng.random() < 0.5)
        moved = _conjugate(base, _random_unimodular(rng))
        red = lagrange_reduce(moved)
        a, b, c = red.gram[0][0], red.gram[0][1], red.gram[1][1]
        assert 2 * abs(b) <= a <= c
        assert red.disc == moved.disc == base.disc
        assert represented_values(red, 40) == represented_values(moved, 40)
    with pytest.raises(ValueError):
        lagrange_reduce(I4)


def test_represented_values_against_brute_force():
    rng = random.Random(29)
    assert represented_values(I2, 10) == {1, 2, 4, 5, 8, 9, 10}
    for _ in range(8):
        form = _random_reduced(rng, half_integral=rng.random() < 0.5)
        if rng.random() < 0.5:
            form = _conjugate(form, _random_unimodular(rng))
        assert represented_values(form, 60) == _brute_values(form, 60)
    assert represented_values(I2, 0) == set()
    with pytest.raises(ValueError):
        represented_values(I4, 10)


def test_fiber_and_ball_counts():
    assert fiber_count(I4, 2) == 24
    assert fiber_count(I4, 1) == 8
    assert fiber_count(I4, 0) == 1
    assert ball_count(I4, 2) == 33
    assert ball_count(I4, 10) == 569
    assert ball_count(I4, -1) == 0
    assert fiber_count(I2, 25) == 12  # 25 = 25+0 (4) and 16+9 (8)
    with pytest.raises(ValueError):
        ball_count(I2, 5)
    with pytest.raises(ValueError):
        fiber_count(I4, -2)


def test_counting_bound_holds_on_random_forms():
    rng = random.Random(41)
    for _ in range(40):
        form = _random_reduced(rng, half_integral=rng.random() < 0.5)
        bound_disc = form.disc
        for n in (1, 7, 50, 300):
            assert fiber_count(form, n) <= counting_bound(n, bound_disc)
    with pytest.raises(ValueError):
        counting_bound(5, 0)


def test_dense_fiber_sets_frozen():
    assert dense_fiber_set(I4, 8, 10) == {1, 2, 3, 5, 6, 7, 9, 10}
    assert dense_fiber_set(I4, 24, 10) == set()
    with pytest.raises(ValueError):
        dense_fiber_set(I2, 8, 10)
    with pytest.raises(ValueError):
        dense_fiber_set(I4, 0, 10)


def test_dense_set_size_is_ball_limited():
    # sum of eps1*N over the dense members is at most the ball count
    for eps1 in (2, 8, 16):
        members = dense_fiber_set(I4, eps1, 30)
        total = ball_count(I4, 30)
        assert eps1 * len(members) * (len(members) + 1) // 2 <= total


def test_ball_ratio_decreases_under_scaling():
    # Gram of the index-2^k sublattice chain scales by 4 each step
    n = 100
    chain = [
        ball_count(GramForm.from_rows(tuple(tuple(s * v for v in row) for row in I4.gram)), n)
        for s in (1, 4, 16)
    ]
    assert chain[0] > chain[1] > chain[2]
    ratios = [c / n**2 for c in chain]
    assert ratios[0] > ratios[1] > ratios[2]


def test_sublattice_values_nest():
    doubled = GramForm.from_rows(((4, 0), (0, 4)))
    inner = represented_values(doubled, 60)
    outer = represented_values(I2, 60)
    assert inner <= outer
    assert inner == {4 * v for v in represented_values(I2, 15)}


def test_class_representatives():
    assert reduced_primitive_forms(-3) == [(1, 1, 1)]
    assert reduced_primitive_forms(-4) == [(1, 0, 1)]
    assert reduced_primitive_forms(-12) == [(1, 0, 3)]
    assert reduced_primitive_forms(-16) == [(1, 0, 4)]
    assert reduced_primitive_forms(-20) == [(1, 0, 5), (2, 2, 3)]
    assert len(reduced_primitive_forms(-23)) == 3
    assert len(reduced_primitive_forms(-47)) == 5
    for disc in (-4, -20, -23, -47, -71):
        for a, b, c in reduced_primitive_forms(disc):
            assert b * b - 4 * a * c == disc
            assert gcd(gcd(a, b), c) == 1
            assert (abs(b) <= a <= c) and (b >= 0 or (abs(b) != a and a != c))
    with pytest.raises(ValueError):
        reduced_primitive_forms(5)
    with pytest.raises(ValueError):
        reduced_primitive_forms(-5)


def test_ideal_endomorphism_disc_comparison():
    for d_k, f in ((-4, 1), (-20, 1), (-3, 2), (-7, 3), (-8, 5)):
        assert ideal_hom_disc_check(d_k, f)
    with pytest.raises(UnsupportedConfigurationError):
        ideal_hom_disc_check(-12, 1)  # not fundamental
    with pytest.raises(UnsupportedConfigurationError):
        ideal_hom_disc_check(-4, 0)
