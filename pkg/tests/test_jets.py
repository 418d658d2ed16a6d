import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from projflat.jets import (
    Jet,
    SingularPointError,
    constant_jet,
    cos,
    exp,
    extract_partial,
    jet_space,
    powi,
    recip,
    seed_jet,
    sin,
)
from projflat.multiindex import enumerate_multiindices

from oracles import assert_fd_close, central_difference, poly_eval, poly_mul, poly_partial, poly_random


def jet_of_poly(poly, x0, order):
    """Evaluate a dict-polynomial through jet arithmetic (the path under test)."""
    seeds = seed_jet(x0, order)
    acc = constant_jet(0.0, len(x0), order)
    for exps, coef in poly.items():
        term = constant_jet(coef, len(x0), order)
        for axis, e in enumerate(exps):
            if e:
                term = term * powi(seeds[axis], e)
        acc = acc + term
    return acc


def test_recip_geometric_series():
    x = seed_jet([0.0], 3)[0]
    series = recip(1.0 - x)
    assert np.allclose(series.coeffs, [1.0, 1.0, 1.0, 1.0], rtol=0, atol=1e-15)


def test_exp_series_at_zero():
    x = seed_jet([0.0], 4)[0]
    result = exp(x)
    want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0]
    assert np.allclose(result.coeffs, want, rtol=0, atol=1e-15)


def test_gaussian_jet_against_finite_differences():
    def gaussian(xs):
        return exp(-(xs[0] * xs[0]))

    jet = gaussian(seed_jet([1.0], 2))
    for alpha in enumerate_multiindices(1, 2):
        fd = central_difference(lambda x: math.exp(-x[0] ** 2), [1.0], alpha)
        got = float(extract_partial(jet, alpha))
        assert_fd_close(got, fd, alpha, scale=1.0)


def test_seed_jets_2d():
    j0, j1 = seed_jet([2.0, 3.0], 1)
    assert j0.coeff((0, 0)) == 2.0 and j0.coeff((1, 0)) == 1.0 and j0.coeff((0, 1)) == 0.0
    assert j1.coeff((0, 0)) == 3.0 and j1.coeff((1, 0)) == 0.0 and j1.coeff((0, 1)) == 1.0


def test_seed_jet_1d_origin():
    (j,) = seed_jet([0.0], 3)
    assert list(j.coeffs) == [0.0, 1.0, 0.0, 0.0]


def test_seed_extract_kronecker():
    seeds = seed_jet([0.3, -1.2, 4.0], 2)
    for i, jet in enumerate(seeds):
        for axis in range(3):
            e = tuple(1 if k == axis else 0 for k in range(3))
            assert float(extract_partial(jet, e)) == (1.0 if axis == i else 0.0)


def test_extract_partial_basics():
    (x,) = seed_jet([0.0], 2)
    assert float(extract_partial(x * x, (2,))) == 2.0
    gauss = exp(-(x * x))
    # symbolic oracle: f''(x) = (4x^2 - 2) e^{-x^2}, so -2 at the origin
    assert float(extract_partial(gauss, (2,))) == pytest.approx(-2.0, abs=1e-14)
    assert float(extract_partial(gauss, (0,))) == 1.0
    with pytest.raises(ValueError):
        extract_partial(gauss, (3,))


def test_product_rule_against_symbolic_polynomials():
    rng = np.random.default_rng(42)
    for dim in (1, 2, 3):
        order = 3
        p = poly_random(rng, dim, order)
        q = poly_random(rng, dim, order)
        x0 = [float(v) for v in rng.uniform(-1.5, 1.5, dim)]
        product_jet = jet_of_poly(p, x0, order) * jet_of_poly(q, x0, order)
        pq = poly_mul(p, q)
        for alpha in enumerate_multiindices(dim, order):
            want = poly_eval(poly_partial(pq, alpha), x0)
            got = float(extract_partial(product_jet, alpha))
            assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_mul_commutative_associative():
    rng = np.random.default_rng(7)
    space = jet_space(2, 3)
    a = Jet(space, rng.uniform(-1, 1, space.ncoeff))
    b = Jet(space, rng.uniform(-1, 1, space.ncoeff))
    c = Jet(space, rng.uniform(-1, 1, space.ncoeff))
    assert np.max(np.abs((a * b).coeffs - (b * a).coeffs)) < 1e-12
    assert np.max(np.abs(((a * b) * c).coeffs - (a * (b * c)).coeffs)) < 1e-12


@given(st.lists(st.floats(-3.0, 3.0), min_size=4, max_size=4),
       st.floats(0.2, 3.0), st.booleans())
def test_recip_is_right_inverse(coeffs, const, negate):
    space = jet_space(1, 3)
    coeffs = np.array(coeffs)
    coeffs[0] = -const if negate else const
    jet = Jet(space, coeffs)
    product = jet * recip(jet)
    assert abs(product.coeffs[0] - 1.0) < 1e-12
    assert np.max(np.abs(product.coeffs[1:])) < 1e-12


def test_recip_rejects_zero_constant():
    (x,) = seed_jet([0.0], 2)
    with pytest.raises(SingularPointError):
        recip(x)


def test_composition_against_finite_differences():
    # x -> sin(e^x), derivatives through jets vs the iterated stencil
    (x,) = seed_jet([0.4], 3)
    jet = sin(exp(x))
    for alpha in enumerate_multiindices(1, 3):
        fd = central_difference(lambda v: math.sin(math.exp(v[0])), [0.4], alpha)
        got = float(extract_partial(jet, alpha))
        assert_fd_close(got, fd, alpha, scale=1.0)


def test_trig_jets_match_closed_forms():
    (x,) = seed_jet([0.7], 4)
    s, c = sin(x), cos(x)
    # sin/cos jets at a point are shifted sine series
    for k in range(5):
        want_s = math.sin(0.7 + k * math.pi / 2) / math.factorial(k)
        want_c = math.cos(0.7 + k * math.pi / 2) / math.factorial(k)
        assert float(s.coeffs[k]) == pytest.approx(want_s, abs=1e-15)
        assert float(c.coeffs[k]) == pytest.approx(want_c, abs=1e-15)
    identity = s * s + c * c
    assert abs(identity.coeffs[0] - 1.0) < 1e-14
    assert np.max(np.abs(identity.coeffs[1:])) < 1e-14


def test_powi_matches_repeated_multiplication():
    (x,) = seed_jet([1.3], 4)
    jet = 0.5 + x
    assert np.allclose(powi(jet, 5).coeffs, (jet * jet * jet * jet * jet).coeffs,
                       rtol=0, atol=1e-12)
    assert np.allclose(powi(jet, 0).coeffs, constant_jet(1.0, 1, 4).coeffs)
    assert np.allclose(powi(jet, -2).coeffs, recip(jet * jet).coeffs,
                       rtol=1e-12, atol=1e-12)


def test_scalar_passthrough():
    assert exp(0.0) == 1.0
    assert sin(0.0) == 0.0
    assert cos(0.0) == 1.0
    assert recip(4.0) == 0.25
    assert powi(2.0, 3) == 8.0


def test_dimension_mismatch_rejected():
    a = seed_jet([0.0], 2)[0]
    b = seed_jet([0.0, 1.0], 2)[0]
    with pytest.raises(ValueError):
        a * b


def test_order_mismatch_rejected():
    a = seed_jet([0.0], 2)[0]
    b = seed_jet([0.0], 3)[0]
    with pytest.raises(ValueError):
        a + b


def test_batched_jets_match_pointwise():
    xs = np.array([0.3, -1.1, 2.0, 0.9])

    def field(seeds):
        return exp(-(seeds[0] * seeds[0])) * (1.0 + seeds[0])

    batched = field(seed_jet([xs], 3))
    assert batched.batch_shape == (4,)
    for col, x in enumerate(xs):
        single = field(seed_jet([float(x)], 3))
        assert np.allclose(batched.coeffs[:, col], single.coeffs, rtol=0, atol=1e-15)


def test_mixed_batch_promotion():
    xs = np.array([0.5, 1.5])
    (x,) = seed_jet([xs], 2)
    shifted = 1.0 + x          # scalar against batched jet
    scaled = x * np.array([2.0, 3.0])
    assert shifted.value.tolist() == [1.5, 2.5]
    assert scaled.value.tolist() == [1.0, 4.5]
    unbatched = seed_jet([0.0], 2)[0]
    promoted = unbatched + np.array([1.0, 2.0])
    assert promoted.batch_shape == (2,)
    assert promoted.value.tolist() == [1.0, 2.0]


def test_dense_storage_total_on_low_orders():
    # explicit zeros, not missing entries: every |alpha| <= K is addressable
    (x,) = seed_jet([2.0], 3)
    jet = x * x
    positions = enumerate_multiindices(1, 3)
    assert jet.coeffs.shape == (len(positions),)
    assert [float(jet.coeff(a)) for a in positions] == [4.0, 4.0, 1.0, 0.0]
