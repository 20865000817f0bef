"""Stable kernel: profile values, nd evaluation, mass, tail, bounds.

Frozen values in _fixtures.json come from convergent high-precision
series with a second confirming route; see tools/gen_fixtures.py.
"""

import math

import numpy as np
import pytest

from fracheat.errors import (ConfigurationError, DomainError, NumericError,
                             PreconditionError)
from fracheat.heatkernel import (KernelSpec, asymptotic_mass_probe,
                                 check_two_sided_bound, estimate_tail_constant,
                                 kernel_eval, kernel_field, kernel_mass,
                                 poisson_periodized, profile_quadrature,
                                 semigroup_apply, stable_profile)
from fracheat.spectral import Field, convolve, make_grid


def test_profile_battery(fx):
    for alpha, y, want in fx["profile"]:
        got = stable_profile(y, alpha)
        assert abs(got - want) <= 5e-12 * abs(want), (alpha, y)


def test_profile_closed_forms():
    for y in (0.0, 0.4, 1.0, 3.0, 10.0):
        assert stable_profile(y, 1.0) == pytest.approx(
            1.0 / (np.pi * (1.0 + y * y)), rel=1e-14)
        assert stable_profile(y, 2.0) == pytest.approx(
            math.exp(-y * y / 4.0) / math.sqrt(4.0 * math.pi), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.4, 0.75, 1.2, 1.5, 1.9])
def test_profile_center_value(alpha):
    want = math.gamma(1.0 + 1.0 / alpha) / math.pi
    assert stable_profile(0.0, alpha) == pytest.approx(want, rel=1e-12)


def test_quadrature_route_in_its_regime(fx):
    """The cosine-transform leg, where its phase budget holds."""
    hit = 0
    for alpha, y, want in fx["profile"]:
        if alpha in (1.0, 2.0) or y * 45.0 ** (1.0 / alpha) / math.pi > 450.0:
            continue
        assert abs(profile_quadrature(y, alpha) - want) <= 1e-9 * abs(want), \
            (alpha, y)
        hit += 1
    assert hit >= 20


def test_kernel_spec_guards():
    with pytest.raises(DomainError):
        KernelSpec(2.5, 1)
    with pytest.raises(ConfigurationError):
        KernelSpec(1.0, 4)
    with pytest.raises(ConfigurationError):
        KernelSpec(1.0, 1, B_bound=0.5)
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec(1.0, 1), 0.0, 0.0)


def test_kernel_nd_frozen_values(fx):
    for n, alpha, r, t, want in fx["kernel_nd"]:
        spec = KernelSpec(alpha, int(n))
        assert kernel_eval(spec, r, t) == pytest.approx(want, rel=1e-10), \
            (n, alpha, r, t)


def test_center_value_and_continuity(fx):
    assert stable_profile(0.0, 1.5) == pytest.approx(fx["center_alpha15"],
                                                     rel=1e-13)
    spec = KernelSpec(1.5, 3)
    center = kernel_eval(spec, 0.0, 1.0)
    near = kernel_eval(spec, 1e-4, 1.0)
    assert abs(near - center) <= 1e-6 * center


def test_oscillatory_budget_is_refused():
    spec = KernelSpec(0.75, 3)
    with pytest.raises(NumericError):
        kernel_eval(spec, 60.0, 1.0)
    assert any(f[0] == "oscillatory-budget" for f in spec.flags)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_kernel_mass_is_one(alpha, t):
    assert abs(kernel_mass(KernelSpec(alpha, 1), t) - 1.0) < 1e-6


def test_kernel_mass_guards():
    with pytest.raises(ConfigurationError):
        kernel_mass(KernelSpec(1.0, 2), 1.0)
    with pytest.raises(DomainError):
        kernel_mass(KernelSpec(1.0, 1), 0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
def test_scaling_identity(alpha):
    spec = KernelSpec(alpha, 1)
    for t in (0.1, 10.0):
        for x in (0.5, 2.0, 5.0):
            ref = t ** (-1.0 / alpha) * kernel_eval(spec, x * t ** (-1.0 / alpha), 1.0)
            assert kernel_eval(spec, x, t) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_semigroup_spectral_composition(alpha):
    g = make_grid(1, 512, 20.0)
    u = Field(g, np.exp(-g.axis ** 2))
    two = semigroup_apply(semigroup_apply(u, 0.6, alpha), 0.4, alpha)
    one = semigroup_apply(u, 1.0, alpha)
    assert np.abs(two.values - one.values).max() < 1e-12
    G = convolve(kernel_field(g, 0.6, alpha), kernel_field(g, 0.4, alpha))
    assert np.abs(G.values - kernel_field(g, 1.0, alpha).values).max() < 1e-12


def test_cauchy_periodization_closed_form():
    g = make_grid(1, 1024, 15.0)
    for t in (0.3, 1.0, 4.0):
        got = kernel_field(g, t, 1.0).values
        want = poisson_periodized(g.axis, t, 2.0 * g.X)
        assert np.abs(got - want).max() < 1e-12
    assert semigroup_apply(Field(g, np.ones(g.N)), 0.0, 1.0).values.max() == 1.0


def test_tail_constant_alpha_half(fx):
    """Plateau of y^{1+a} g(y) against the frozen tail samples and the
    sine-formula constant."""
    alpha = 0.5
    want_c = math.gamma(1.0 + alpha) * math.sin(0.5 * math.pi * alpha) / math.pi
    for y, gval in fx["tail_plateau_alpha05"]:
        assert stable_profile(y, alpha) == pytest.approx(gval, rel=5e-12)
        assert y ** (1.0 + alpha) * gval == pytest.approx(want_c, rel=0.12)
    spec = KernelSpec(alpha, 1)
    c, quality = estimate_tail_constant(spec, (500.0, 5000.0))
    assert quality < 0.05
    # the y^{-a} correction is still a few percent at y ~ 10^3
    assert c == pytest.approx(want_c, rel=0.05)
    assert spec.tail_constant == c


def test_tail_constant_cauchy():
    c, quality = estimate_tail_constant(KernelSpec(1.0, 1), (20.0, 100.0))
    assert quality < 0.05
    assert c == pytest.approx(1.0 / np.pi, rel=0.02)


def test_tail_window_diagnostics():
    spec = KernelSpec(0.5, 1)
    estimate_tail_constant(spec, (0.2, 0.6))
    assert any(f[0] == "window-unconverged" for f in spec.flags)
    with pytest.raises(ConfigurationError):
        estimate_tail_constant(spec, (3.0, 2.0))
    with pytest.raises(DomainError):
        estimate_tail_constant(KernelSpec(2.0, 1), (1.0, 2.0))


def test_two_sided_bound():
    samples = [(x, t) for x in (0.0, 0.5, 2.0, 10.0) for t in (0.1, 1.0, 10.0)]
    spec = KernelSpec(1.0, 1)
    B = check_two_sided_bound(spec, samples)
    assert B == pytest.approx(np.pi, rel=1e-12)
    assert spec.B_bound == B
    for alpha in (0.5, 1.5):
        assert check_two_sided_bound(KernelSpec(alpha, 1), samples) >= 1.0


def test_asymptotic_mass_probe():
    g = make_grid(1, 1024, 400.0)
    v = np.exp(-g.axis ** 2)
    v /= v.sum() * g.h
    probes, flags = asymptotic_mass_probe(Field(g, v), [25.0, 50.0, 100.0], 1.0)
    assert flags == []
    assert probes[-1] == pytest.approx(1.0 / np.pi, rel=1e-3)
    assert max(probes) - min(probes) <= 5e-3 * probes[-1]
    # mass is what survives at late times, not the shape
    v2 = 0.5 * (np.exp(-(g.axis - 5.0) ** 2) + np.exp(-(g.axis + 5.0) ** 2))
    v2 /= v2.sum() * g.h
    p2, _ = asymptotic_mass_probe(Field(g, v2), [100.0], 1.0)
    assert p2[0] == pytest.approx(probes[-1], rel=2e-2)


def test_asymptotic_mass_probe_edges():
    g = make_grid(1, 256, 10.0)
    _, flags = asymptotic_mass_probe(Field(g, np.exp(-g.axis ** 2)), [50.0], 1.0)
    assert any(f[0] == "diffusion-length-truncation" for f in flags)
    with pytest.raises(PreconditionError):
        asymptotic_mass_probe(Field(g, -np.ones(g.N)), [1.0], 1.0)
    probes, _ = asymptotic_mass_probe(Field(g, np.zeros(g.N)), [1.0], 1.0)
    assert probes == [0.0]
