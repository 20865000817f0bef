"""Grid container, multiplier application, and the two operator routes."""

import numpy as np
import pytest

from fracheat.errors import ConfigurationError, DomainError
from fracheat.spectral import (Field, GridSpec, apply_multiplier, convolve,
                               frac_laplacian_quadrature,
                               frac_laplacian_spectral, make_grid, pv_constant,
                               riesz_constant)


def test_grid_geometry():
    g = make_grid(1, 64, 8.0)
    assert g.h == pytest.approx(0.25)
    assert g.axis[0] == -8.0
    assert g.axis[-1] == pytest.approx(8.0 - g.h)
    xi = np.sort(g.xi_axis)
    assert np.allclose(np.diff(xi), np.pi / g.X)


@pytest.mark.parametrize("bad", [dict(N=100), dict(N=4), dict(n=4), dict(X=0.0)])
def test_grid_rejects_bad_shapes(bad):
    kw = dict(n=1, N=64, X=8.0)
    kw.update(bad)
    with pytest.raises(ConfigurationError):
        GridSpec(**kw)


def test_field_shape_guard():
    g = make_grid(1, 64, 8.0)
    with pytest.raises(ConfigurationError):
        Field(g, np.zeros(32))


def test_normalization_constants():
    assert pv_constant(1, 1.0) == pytest.approx(1.0 / np.pi, rel=1e-14)
    assert riesz_constant(1, 0.5) == pytest.approx(1.0 / np.sqrt(2.0 * np.pi),
                                                   rel=1e-14)


def test_apply_multiplier_callable_matches_table():
    g = make_grid(1, 128, 10.0)
    u = Field(g, np.exp(-g.axis ** 2))
    m = lambda s: np.exp(-s)
    direct = apply_multiplier(u, m)
    table = apply_multiplier(u, m(g.xi_radial()))
    assert np.abs(direct.values - table.values).max() < 1e-15
    with pytest.raises(ConfigurationError):
        apply_multiplier(u, np.zeros(7))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_spectral_route_is_exact_on_grid_modes(alpha):
    """A lattice Fourier mode is an eigenvector with symbol |k|^alpha."""
    g = make_grid(1, 256, 10.0)
    k = 6.0 * np.pi / g.X
    u = Field(g, np.cos(k * g.axis))
    out = frac_laplacian_spectral(u, alpha)
    assert np.abs(out.values - k ** alpha * u.values).max() < 1e-12


# plane waves are the hard case for the singular quadrature: no decay,
# persistent oscillation out to the cutoff
QUAD_TOL = {0.5: 5e-3, 1.0: 5e-4, 1.5: 2e-5}


@pytest.mark.parametrize("alpha", sorted(QUAD_TOL))
def test_quadrature_route_reproduces_the_symbol(alpha):
    k = 1.3
    u = lambda x: np.cos(k * np.asarray(x, dtype=float))
    cutoff = 1e12 if alpha == 0.5 else 1e6
    for x in (0.0, 0.7, 2.1):
        want = k ** alpha * np.cos(k * x)
        got = frac_laplacian_quadrature(u, x, alpha, cutoff=cutoff)
        assert abs(got - want) <= QUAD_TOL[alpha] * k ** alpha


def test_quadrature_annihilates_constants():
    c = lambda x: 0.7 * np.ones_like(np.asarray(x, dtype=float))
    assert abs(frac_laplacian_quadrature(c, 0.3, 0.5, cutoff=1e12)) < 1e-5
    assert abs(frac_laplacian_quadrature(c, 0.3, 1.5)) < 1e-8


def test_alpha_two_is_the_laplacian():
    g = make_grid(1, 1024, 12.0)
    u = np.exp(-g.axis ** 2)
    out = frac_laplacian_spectral(Field(g, u), 2.0)
    dd = -(np.roll(u, -1) - 2.0 * u + np.roll(u, 1)) / g.h ** 2
    assert np.abs(out.values - dd).max() <= 2e-3 * np.abs(dd).max()


def test_operator_order_guards():
    g = make_grid(1, 64, 8.0)
    u = Field(g, np.ones(64))
    for bad in (0.0, -0.5, 2.5):
        with pytest.raises(DomainError):
            frac_laplacian_spectral(u, bad)
    with pytest.raises(DomainError):
        frac_laplacian_quadrature(lambda x: 0.0 * x, 0.0, 2.0)
    with pytest.raises(ConfigurationError):
        frac_laplacian_quadrature(lambda x: 0.0 * x, 0.0, 1.0, cutoff=1e-9)


def test_convolve_matches_direct_sum():
    g = make_grid(1, 64, 4.0)
    rng = np.random.default_rng(7)
    a = np.zeros(g.N)
    b = np.zeros(g.N)
    a[20:30] = rng.random(10)
    b[30:40] = rng.random(10)
    got = convolve(Field(g, a), Field(g, b)).values
    want = g.h * np.array([
        sum(a[j] * b[(g.N // 2 + i - j) % g.N] for j in range(g.N))
        for i in range(g.N)])
    assert np.abs(got - want).max() < 1e-12


def test_convolve_grid_mismatch():
    a = Field(make_grid(1, 64, 4.0), np.zeros(64))
    b = Field(make_grid(1, 64, 8.0), np.zeros(64))
    with pytest.raises(ConfigurationError):
        convolve(a, b)
