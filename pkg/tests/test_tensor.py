from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gptcone.cones import Lorentz, cone_over, facets, to_hrep
from gptcone.errors import BudgetExceeded, DimensionMismatch, UnsupportedRepresentation
from gptcone.linalg import flatten, outer
from gptcone.tensor import (
    TensorElement,
    compare_tensors,
    lorentz_boundary_sample,
    max_membership,
    max_tensor_rays,
    min_membership,
    min_tensor,
    product_generators,
    tensor_equal,
)
from oracles import brute_force_rays

SQUARE = cone_over([(-1, -1), (1, -1), (1, 1), (-1, 1)])
TRIANGLE = cone_over([(0, 0), (1, 0), (0, 1)])
HEXAGON = cone_over([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)])

entries = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3)


def test_element_algebra():
    x, y = (1, 2, 3), (0, -1, 4)
    t = TensorElement.product(x, y)
    assert t.dims == (3, 3)
    assert t.apply((1, 0, 0), (0, 0, 1)) == 4
    assert t.left((1, 1, 1)) == tuple(Fraction(6) * v for v in y)
    assert t.right((0, 0, 1)) == tuple(Fraction(4) * v for v in x)
    assert TensorElement.from_flat(t.flat, (3, 3)) == t
    assert (t - t).is_zero()
    assert 2 * t == t + t
    with pytest.raises(DimensionMismatch):
        t.pair(TensorElement.product((1, 2), (1, 2)))


def test_square_square_counts():
    cmp = compare_tensors(SQUARE, SQUARE)
    assert len(cmp.max_rays) == 24
    assert sum(cmp.in_min) == 16
    assert not cmp.equal


def test_square_square_max_rays_brute_force():
    fs = [flatten(outer(f, g)) for f in facets(SQUARE) for g in facets(SQUARE)]
    oracle = brute_force_rays(fs, 9)
    assert oracle == set(max_tensor_rays(SQUARE, SQUARE))


def test_min_tensor_rays_are_products():
    assert len(product_generators(SQUARE, SQUARE)) == 16
    assert min_tensor(SQUARE, SQUARE).dim == 9


def test_equality_verdicts():
    assert tensor_equal(TRIANGLE, SQUARE)
    assert tensor_equal(SQUARE, TRIANGLE)
    assert tensor_equal(TRIANGLE, HEXAGON)
    assert not tensor_equal(SQUARE, SQUARE)
    assert not tensor_equal(to_hrep(SQUARE), SQUARE)


def test_dimension_cap():
    with pytest.raises(BudgetExceeded):
        tensor_equal(SQUARE, SQUARE, dim_cap=8)


def test_lorentz_factors_rejected_for_enumeration():
    with pytest.raises(UnsupportedRepresentation):
        product_generators(Lorentz(3), SQUARE)


@given(entries)
def test_min_certificates_are_sound(m):
    w = TensorElement(m)
    inside, cert = min_membership(SQUARE, SQUARE, w)
    assert cert.check(w)
    assert inside == cert.inside
    if inside:
        # min is contained in max
        assert max_membership(SQUARE, SQUARE, w)
    else:
        assert cert.value < 0


@given(entries)
def test_max_outside_implies_min_outside(m):
    w = TensorElement(m)
    if not max_membership(SQUARE, HEXAGON, w):
        assert not min_membership(SQUARE, HEXAGON, w)[0]


def test_products_lie_in_max():
    for g in SQUARE.generators:
        for h in HEXAGON.generators:
            assert max_membership(SQUARE, HEXAGON, TensorElement.product(g, h))


def test_max_membership_with_lorentz_factor():
    rng = random.Random(3)
    l3 = Lorentz(3)
    for _ in range(20):
        g = lorentz_boundary_sample(3, rng)
        h = SQUARE.generators[rng.randrange(4)]
        assert max_membership(l3, SQUARE, TensorElement.product(g, h)) is True
        assert max_membership(SQUARE, l3, TensorElement.product(h, g)) is True
        assert max_membership(l3, SQUARE, -TensorElement.product(g, h)) is False


def test_lorentz_pair_is_falsifier_only():
    l3 = Lorentz(3)
    p = TensorElement.product((0, 0, 1), (1, 0, 1))
    assert max_membership(l3, l3, p, samples=200) is None
    assert max_membership(l3, l3, -p, samples=200) is False


def test_boundary_samples_are_exact():
    rng = random.Random(0)
    for dim in (2, 3, 4, 6):
        for _ in range(25):
            v = lorentz_boundary_sample(dim, rng)
            assert v[-1] == 1
            assert sum(x * x for x in v[:-1]) == 1
