"""Riemann-Liouville rules, the quadratic Volterra march, and the product run."""
import math

import numpy as np
import pytest

from fracheat.errors import ConfigurationError, DomainError, PreconditionError
from fracheat.potential import WeightSpec
from fracheat.spectral import Field, make_grid
from fracheat.timefrac import (TimeFracSpec, TimeMesh, confident_mask,
                               rl_derivative, rl_integral,
                               separable_blowup_demo, solve_rl_quadratic)


def test_time_mesh_geometry():
    mesh = TimeMesh(2.0, 32)
    assert mesh.dt == 0.0625
    t = mesh.nodes
    assert len(t) == 33
    assert t[0] == 0.0 and t[-1] == 2.0
    assert np.allclose(np.diff(t), mesh.dt)


def test_time_mesh_guards():
    with pytest.raises(ConfigurationError):
        TimeMesh(0.0, 64)
    with pytest.raises(ConfigurationError):
        TimeMesh(-1.0, 64)
    with pytest.raises(ConfigurationError):
        TimeMesh(1.0, 15)


def test_timefrac_spec():
    assert TimeFracSpec(0.5).k_order == 1
    assert TimeFracSpec(1.3).k_order == 2
    # an integer order still differentiates one extra time past its floor
    assert TimeFracSpec(3.0).k_order == 4
    with pytest.raises(DomainError):
        TimeFracSpec(0.0)
    with pytest.raises(DomainError):
        TimeFracSpec(-0.5)
    with pytest.raises(DomainError):
        TimeFracSpec(0.5, lam=-1.0)
    TimeFracSpec(0.5, lam=0.0)


def test_confident_mask_extent():
    mesh = TimeMesh(1.0, 2048)
    m = confident_mask(mesh)
    low = math.ceil(0.05 * (mesh.M + 1))
    assert not m[:low].any()
    assert m[low:].all()


def test_integral_power_rule():
    mesh = TimeMesh(1.0, 2048)
    t = mesh.nodes
    m = confident_mask(mesh)
    for mu in (0.5, 1.0, 2.0):
        got = rl_integral(t, mu, mesh)
        want = math.gamma(2.0) / math.gamma(2.0 + mu) * t ** (1.0 + mu)
        rel = np.abs(got[m] - want[m]).max() / np.abs(want[m]).max()
        assert rel <= 1e-3, (mu, rel)


def test_integral_singular_power():
    # t^{-1/4} is infinite at the origin; the leading-power split keeps the
    # early nodes accurate instead of writing them off
    mesh = TimeMesh(2.0, 512)
    t = mesh.nodes
    h = np.full_like(t, np.inf)
    h[1:] = t[1:] ** -0.25
    got = rl_integral(h, 0.5, mesh)
    want = np.zeros_like(t)
    want[1:] = math.gamma(0.75) / math.gamma(1.25) * t[1:] ** 0.25
    assert got[0] == 0.0
    rel = np.abs(got[1:] - want[1:]) / np.abs(want[1:])
    assert rel.max() <= 1e-8


def test_integral_composition():
    mesh = TimeMesh(1.0, 2048)
    t = mesh.nodes
    h = np.sin(2.0 * t) + 1.5
    two_step = rl_integral(rl_integral(h, 0.4, mesh), 0.3, mesh)
    one_step = rl_integral(h, 0.7, mesh)
    assert np.abs(two_step - one_step).max() <= 1e-5


def test_integral_guards():
    mesh = TimeMesh(1.0, 64)
    h = np.ones(mesh.M + 1)
    with pytest.raises(DomainError):
        rl_integral(h, 0.0, mesh)
    with pytest.raises(DomainError):
        rl_integral(h, -0.5, mesh)
    with pytest.raises(ConfigurationError):
        rl_integral(np.ones(10), 0.5, mesh)


def test_derivative_power_rule():
    mesh = TimeMesh(1.0, 2048)
    t = mesh.nodes
    m = confident_mask(mesh)
    for tau in (0.3, 0.5, 0.7):
        got = rl_derivative(t, tau, mesh)
        want = math.gamma(2.0) / math.gamma(2.0 - tau) * t ** (1.0 - tau)
        rel = np.abs(got[m] - want[m]).max() / np.abs(want[m]).max()
        assert rel <= 1e-3, (tau, rel)


def test_derivative_integer_orders():
    mesh = TimeMesh(1.0, 256)
    t = mesh.nodes
    # first derivative of t^2: centered and one-sided stencils are both
    # exact on quadratics
    d1 = rl_derivative(t ** 2, 1.0, mesh)
    assert np.abs(d1 - 2.0 * t).max() <= 1e-10 * 2.0
    d2 = rl_derivative(t ** 3, 2.0, mesh)
    want = 6.0 * t
    rel = np.abs(d2[2:-2] - want[2:-2]).max() / want.max()
    assert rel <= 1e-8


def test_derivative_annihilates_kernel_power():
    # D^tau t^{tau-1} = 0; the intermediate integral is a constant, so the
    # difference passes see an exactly flat profile
    mesh = TimeMesh(1.0, 1024)
    tau = 0.6
    t = mesh.nodes
    h = np.full_like(t, np.inf)
    h[1:] = t[1:] ** (tau - 1.0)
    got = rl_derivative(h, tau, mesh)
    m = confident_mask(mesh)
    assert np.abs(got[m]).max() <= 1e-6


def test_derivative_guards():
    mesh = TimeMesh(1.0, 64)
    h = np.ones(mesh.M + 1)
    with pytest.raises(DomainError):
        rl_derivative(h, 0.0, mesh)
    with pytest.raises(DomainError):
        rl_derivative(h, -1.0, mesh)
    with pytest.raises(ConfigurationError):
        rl_derivative(np.ones(10), 0.5, mesh)
    # k = 15 difference passes need at least k + 3 nodes
    small = TimeMesh(1.0, 16)
    with pytest.raises(ConfigurationError):
        rl_derivative(np.ones(17), 14.5, small)


def test_self_similar_quadratic_profile():
    # phi(t) = c t^{-beta} with c = Gamma(1-beta)/(lam Gamma(1-2 beta))
    # satisfies D^beta phi = lam phi^2 for beta < 1/2
    beta, lam = 0.25, 1.0
    mesh = TimeMesh(1.0, 2048)
    t = mesh.nodes
    cc = math.gamma(1.0 - beta) / (lam * math.gamma(1.0 - 2.0 * beta))
    prof = np.full_like(t, np.inf)
    prof[1:] = cc * t[1:] ** -beta
    got = rl_derivative(prof, beta, mesh)
    rhs = lam * np.nan_to_num(prof, posinf=0.0) ** 2
    m = confident_mask(mesh)
    rel = np.abs(got[m] - rhs[m]).max() / np.abs(rhs[m]).max()
    assert rel <= 1e-2


def test_volterra_zero_coupling_is_exact():
    # lam = 0 reduces to phi = b t^{beta-1}/Gamma(beta); the march returns
    # the kernel itself with no quadrature error
    mesh = TimeMesh(2.0, 256)
    beta, b = 0.6, 1.3
    out = solve_rl_quadratic(beta, 0.0, b, mesh)
    t = out["t"]
    want = b * t[1:] ** (beta - 1.0) / math.gamma(beta)
    rel = np.abs(out["phi"][1:] - want) / np.abs(want)
    assert rel.max() <= 1e-12
    assert out["T_star"] is None
    assert out["T_star_refined"] is None
    assert out["blown_up"] is False


def test_volterra_blowup_pinned(fx):
    pin = fx["volterra_beta075"]
    mesh = TimeMesh(pin["T"], pin["M"])
    out = solve_rl_quadratic(0.75, 1.0, 1.0, mesh)
    assert out["T_star"] == pin["t_star"]
    assert out["T_star_refined"] == pin["t_star_refined"]
    assert out["refinement_agreement"] < 0.05
    assert out["blown_up"] is True
    # the trace grows monotonically into the escalation
    j = int(round(out["T_star"] / mesh.dt))
    phi = out["phi"][1:j]
    assert (phi > 0.0).all()
    assert (np.diff(phi) >= 0.0).all()


def test_volterra_mesh_doubling():
    coarse = solve_rl_quadratic(0.75, 1.0, 1.0, TimeMesh(6.0, 2048))
    fine = solve_rl_quadratic(0.75, 1.0, 1.0, TimeMesh(6.0, 4096))
    assert coarse["blown_up"] and fine["blown_up"]
    ts = coarse["T_star"]
    assert abs(ts - fine["T_star"]) / fine["T_star"] < 0.05
    # the trace itself is mesh-stable away from both endpoints: skip the
    # startup cells and stop well short of the escalation time
    t = coarse["t"]
    window = (t >= 8 * 6.0 / 2048) & (t <= 0.5 * ts)
    pc = coarse["phi"][window]
    pf = fine["phi"][::2][window]
    assert np.abs(pc - pf).max() / np.abs(pf).max() <= 5e-2


def test_volterra_guards():
    mesh = TimeMesh(1.0, 64)
    with pytest.raises(DomainError):
        solve_rl_quadratic(1.2, 1.0, 1.0, mesh)
    with pytest.raises(DomainError):
        solve_rl_quadratic(0.0, 1.0, 1.0, mesh)
    with pytest.raises(DomainError):
        solve_rl_quadratic(0.5, -0.5, 1.0, mesh)
    with pytest.raises(DomainError):
        solve_rl_quadratic(0.5, 1.0, 0.0, mesh)
    with pytest.raises(DomainError):
        solve_rl_quadratic(0.5, 1.0, -1.0, mesh)


@pytest.fixture(scope="module")
def demo_run():
    grid = make_grid(1, 1024, 8.0)
    rho = lambda s: 1.0 / (1.0 + np.asarray(s, dtype=float) ** 2)
    return separable_blowup_demo(0.75, 0.5, rho, grid, R_schedule=(2.0, 4.0),
                                 lam=1.0, b=1.0, mesh=TimeMesh(1.0, 1024))


def test_separable_demo_report(demo_run):
    rep = demo_run
    assert rep["identity_residual_rel"] <= 0.05
    assert rep["spatial_residual_rel"] >= 0.0
    assert rep["temporal_residual_rel"] >= 0.0
    assert rep["T_star"] is not None
    assert rep["blown_up"] is True
    assert rep["sup_w"] > 0.0
    assert np.isfinite(rep["property_H_sup"])
    w = rep["w"]
    assert w.min() >= 0.0 and w.max() == rep["sup_w"]


def test_separable_rescale_invariance(demo_run):
    # u = phi w is invariant under (lam, b) -> (2 lam, b/2): phi halves and
    # w doubles, so the composite solves the same problem
    grid = make_grid(1, 1024, 8.0)
    rho = lambda s: 1.0 / (1.0 + np.asarray(s, dtype=float) ** 2)
    other = separable_blowup_demo(0.75, 0.5, rho, grid,
                                  R_schedule=(2.0, 4.0), lam=2.0, b=0.5,
                                  mesh=TimeMesh(1.0, 1024))
    phi1, phi2 = demo_run["phi"], other["phi"]
    good = np.isfinite(phi1) & (phi1 > 0.0) & np.isfinite(phi2) & (phi2 > 0.0)
    assert good.any()
    np.testing.assert_allclose(phi2[good], 0.5 * phi1[good], rtol=1e-12)
    inner = np.abs(grid.axis) <= 2.0
    w1, w2 = demo_run["w"][inner], other["w"][inner]
    j = np.argmax(good)
    u1 = phi1[j] * w1
    u2 = phi2[j] * w2
    assert np.abs(u1 - u2).max() / np.abs(u1).max() <= 1e-6


def test_separable_guards():
    grid = make_grid(1, 256, 8.0)
    rho = lambda s: 1.0 / (1.0 + np.asarray(s, dtype=float) ** 2)
    with pytest.raises(DomainError):
        separable_blowup_demo(1.5, 0.5, rho, grid)
    with pytest.raises(ConfigurationError):
        separable_blowup_demo(0.75, 0.5, np.ones(grid.N), grid)
    # a sampled weight cannot feed the radial restriction step
    sampled = WeightSpec(Field(grid, rho(grid.axis)), "sampled")
    with pytest.raises(ConfigurationError):
        separable_blowup_demo(0.75, 0.5, sampled, grid)
    # constant weights have an unbounded potential, so the ansatz refuses
    with pytest.raises(PreconditionError):
        separable_blowup_demo(
            0.75, 0.5, lambda s: np.ones_like(np.asarray(s, dtype=float)), grid)
