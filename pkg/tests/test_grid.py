"""Finite-difference operators: stencils, adjointness, norms."""

import numpy as np
import pytest

from conftest import random_scalar, random_vector
from oracles import dense_grad0, dense_laplacian5, dense_operator

from ibflow.grid import (
    GridSpec,
    ScalarField,
    VectorField,
    d0,
    div0,
    dminus,
    dminus_grad,
    dplus,
    dplus_div,
    grad0,
    inner,
    laplacian5,
    norm,
    vorticity,
)
from ibflow.spectral import transform


def test_gridspec_rejects_tiny_grids():
    with pytest.raises(ValueError):
        GridSpec(3, 8, 0.1)
    with pytest.raises(ValueError):
        GridSpec(8, 8, -0.1)


def test_gridspec_lengths():
    spec = GridSpec(12, 8, 0.25)
    assert spec.L1 == pytest.approx(3.0)
    assert spec.L2 == pytest.approx(2.0)


def test_field_shape_mismatch_rejected(spec8):
    with pytest.raises(ValueError):
        ScalarField(spec8, np.zeros((4, 4)))


@pytest.mark.parametrize("op", [lambda f: d0(f, 1), lambda f: dplus(f, 2), dminus, laplacian5])
def test_operators_annihilate_constants(spec8, op):
    f = ScalarField.full(spec8, 3.7)
    if op is dminus:
        out = op(f, 1)
    else:
        out = op(f)
    assert np.allclose(out.values, 0.0, atol=1e-14)


def test_d0_matches_dense_circulant_on_sine_mode(spec8):
    # exact mode relation: d0 maps e_k to (i sin(2 pi k / n) / h) e_k
    M = dense_operator(spec8, lambda f: d0(f, 1))
    i = np.arange(spec8.n1)
    f = ScalarField(spec8, np.tile(np.sin(2 * np.pi * i / spec8.n1)[:, None], (1, spec8.n2)))
    out = d0(f, 1)
    assert np.allclose(out.values.ravel(), M @ f.values.ravel(), atol=1e-14)
    expected = np.cos(2 * np.pi * i / spec8.n1) * np.sin(2 * np.pi / spec8.n1) / spec8.h
    assert np.allclose(out.values[:, 0], expected, atol=1e-13)


def test_d0_annihilates_nyquist_mode(spec8):
    f = ScalarField(spec8, np.tile(((-1.0) ** np.arange(8))[:, None], (1, 8)))
    assert np.allclose(d0(f, 1).values, 0.0, atol=1e-14)


def test_dplus_ramp_wrap():
    spec = GridSpec(8, 8, 0.1)
    i = np.arange(8)
    f = ScalarField(spec, np.tile((i * spec.h)[:, None], (1, 8)))
    out = dplus(f, 1).values
    assert np.allclose(out[:-1, :], 1.0, atol=1e-12)
    assert np.allclose(out[-1, :], 1.0 - spec.n1, atol=1e-12)


def test_d0_is_mean_of_dplus_dminus(spec8, rng):
    f = random_scalar(spec8, rng)
    for axis in (1, 2):
        combo = 0.5 * (dplus(f, axis) + dminus(f, axis))
        assert np.allclose(d0(f, axis).values, combo.values, atol=1e-14)


def test_laplacian5_sine_eigenrelation():
    spec = GridSpec(8, 8, 0.1)
    L = dense_laplacian5(spec)
    i = np.arange(8)
    f = np.tile(np.sin(2 * np.pi * i / 8)[:, None], (1, 8))
    got = laplacian5(ScalarField(spec, f)).values
    assert np.allclose(got.ravel(), L @ f.ravel(), atol=1e-12)
    lam = -(4.0 / spec.h**2) * np.sin(np.pi / 8) ** 2
    assert np.allclose(got, lam * f, atol=1e-11)


def test_laplacian5_equals_dminus_dplus(spec8, rng):
    f = random_scalar(spec8, rng)
    combo = dminus(dplus(f, 1), 1) + dminus(dplus(f, 2), 2)
    assert np.allclose(laplacian5(f).values, combo.values, atol=1e-13)


def test_div0_grad0_fourier_symbol():
    spec = GridSpec(8, 8, 0.1)
    k1, k2 = 1, 2
    i = np.arange(8)[:, None]
    j = np.arange(8)[None, :]
    f = ScalarField(spec, np.cos(2 * np.pi * (k1 * i + k2 * j) / 8.0))
    got = div0(grad0(f)).values
    sym = -(np.sin(2 * np.pi * k1 / 8) ** 2 + np.sin(2 * np.pi * k2 / 8) ** 2) / spec.h**2
    assert np.allclose(got, sym * f.values, atol=1e-11)
    # cross-check against the dense gradient matrix
    G = dense_grad0(spec)
    assert np.allclose(got.ravel(), -G.T @ (G @ f.values.ravel()), atol=1e-11)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_adjointness_d0(n, rng):
    spec = GridSpec(n, n, 0.05)
    psi = random_scalar(spec, rng)
    v = random_vector(spec, rng)
    lhs = inner(psi, div0(v))
    rhs = -inner(grad0(psi), v)
    assert abs(lhs - rhs) <= 1e-13 * norm(psi) * norm(v)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_adjointness_dplus_dminus(n, rng):
    spec = GridSpec(n, n, 0.05)
    f = random_scalar(spec, rng)
    v = random_vector(spec, rng)
    lhs = inner(f, dplus_div(v))
    rhs = -inner(dminus_grad(f), v)
    assert abs(lhs - rhs) <= 1e-13 * max(1.0, norm(f) * norm(v))


def test_norm_equality_dplus_dminus(rng):
    for n in (8, 16, 32):
        spec = GridSpec(n, n, 0.05)
        f = random_scalar(spec, rng)
        for axis in (1, 2):
            assert norm(dplus(f, axis)) == pytest.approx(norm(dminus(f, axis)), rel=1e-13)


def test_difference_operators_commute(spec8, rng):
    f = random_scalar(spec8, rng)
    ops = [lambda g: d0(g, 1), lambda g: dplus(g, 2), lambda g: dminus(g, 1)]
    for a in ops:
        for b in ops:
            ab = a(b(f)).values
            ba = b(a(f)).values
            assert np.allclose(ab, ba, atol=1e-12)


def test_operators_linear(spec8, rng):
    a = random_scalar(spec8, rng)
    b = random_scalar(spec8, rng)
    combo = 2.5 * a + (-1.25) * b
    for op in (lambda f: d0(f, 1), lambda f: dplus(f, 2), laplacian5):
        lhs = op(combo).values
        rhs = 2.5 * op(a).values - 1.25 * op(b).values
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_norm_zero_field(spec8):
    assert norm(ScalarField.zeros(spec8)) == 0.0


@pytest.mark.parametrize("n1,n2", [(8, 8), (16, 8), (8, 32)])
def test_unit_constant_has_unit_norm(n1, n2):
    assert norm(ScalarField.full(GridSpec(n1, n2, 0.1), 1.0)) == pytest.approx(1.0, abs=1e-14)


def test_parseval(rng):
    spec = GridSpec(16, 16, 0.1)
    f = random_scalar(spec, rng)
    coefs = transform(f)
    assert norm(f) ** 2 == pytest.approx(float(np.sum(np.abs(coefs) ** 2)), rel=1e-13)


def test_inner_rejects_mismatched_specs(rng):
    a = random_scalar(GridSpec(8, 8, 0.1), rng)
    b = random_scalar(GridSpec(16, 16, 0.1), rng)
    with pytest.raises(ValueError):
        inner(a, b)


def test_vorticity_uniform_flow(spec8):
    u = VectorField.from_arrays(spec8, np.full(spec8.shape, 2.0), np.full(spec8.shape, -1.0))
    assert np.allclose(vorticity(u).values, 0.0, atol=1e-14)


def test_vorticity_sine_mode_pair():
    spec = GridSpec(8, 8, 0.1)
    i = np.arange(8)[:, None]
    j = np.arange(8)[None, :]
    # u = (0, sin(2 pi x1 / L1)): curl is the centred derivative of the sine
    u2 = np.sin(2 * np.pi * i / 8.0) + 0.0 * j
    u = VectorField.from_arrays(spec, np.zeros(spec.shape), u2)
    got = vorticity(u).values
    expected = np.cos(2 * np.pi * i / 8.0) * np.sin(2 * np.pi / 8) / spec.h + 0.0 * j
    assert np.allclose(got, expected, atol=1e-12)


def test_vorticity_of_gradient_vanishes(spec8, rng):
    f = random_scalar(spec8, rng)
    assert np.allclose(vorticity(grad0(f)).values, 0.0, atol=1e-13)
