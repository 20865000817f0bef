"""Mild stepping, blow-up detection, the necessary-condition monitor,
and the critical-case mass probe."""

import numpy as np
import pytest

from fracheat.errors import ConfigurationError, DomainError, PreconditionError
from fracheat.evolution import (ProblemSpec, critical_mass_growth_probe,
                                fujita_sweep, integrate, step_mild,
                                weissler_bound)
from fracheat.heatkernel import semigroup_apply
from fracheat.spectral import Field, make_grid


def _gauss(g, a=1.0):
    return Field(g, a * np.exp(-g.axis ** 2))


def test_problem_spec_guards():
    g = make_grid(1, 128, 10.0)
    u0 = _gauss(g)
    with pytest.raises(DomainError):
        ProblemSpec(alpha=2.5, p=2.0, u0=u0, horizon=1.0)
    with pytest.raises(DomainError):
        ProblemSpec(alpha=1.0, p=0.0, u0=u0, horizon=1.0)
    with pytest.raises(DomainError):
        ProblemSpec(alpha=1.0, p=2.0, u0=u0, horizon=0.0)
    with pytest.raises(PreconditionError):
        ProblemSpec(alpha=1.0, p=2.0, u0=Field(g, -np.ones(g.N)), horizon=1.0)
    with pytest.raises(ConfigurationError):
        ProblemSpec(alpha=1.0, p=2.0, u0=Field(g, np.zeros(g.N)), horizon=1.0)


def test_step_guards_and_positivity():
    g = make_grid(1, 128, 10.0)
    spec = ProblemSpec(alpha=1.0, p=2.0, u0=_gauss(g), horizon=1.0)
    with pytest.raises(DomainError):
        step_mild(spec.u0, 0.0, spec)
    with pytest.raises(PreconditionError):
        step_mild(Field(g, np.full(g.N, -1.0)), 0.1, spec)
    un, clip = step_mild(spec.u0, 0.01, spec)
    assert un.values.min() >= 0.0
    assert clip >= 0.0


def test_stepper_is_first_order():
    g = make_grid(1, 256, 10.0)
    u0 = Field(g, 0.5 * np.exp(-g.axis ** 2))
    spec = ProblemSpec(alpha=1.0, p=2.0, u0=u0, horizon=0.5, rho=1.0)

    def march(dt):
        u = u0.copy()
        for _ in range(int(round(0.5 / dt))):
            u, _ = step_mild(u, dt, spec)
        return u.values

    ref = march(1.0 / 4096)
    e1 = np.abs(march(1.0 / 64) - ref).max()
    e2 = np.abs(march(1.0 / 128) - ref).max()
    assert 1.7 < e1 / e2 < 2.4


def test_pure_diffusion_conserves_mass():
    g = make_grid(1, 256, 10.0)
    spec = ProblemSpec(alpha=1.5, p=2.0, u0=_gauss(g), horizon=1.0, rho=0.0)
    trace = integrate(spec)
    assert trace.verdict == "Survived"
    l1 = np.array(trace.l1_norms)
    assert np.abs(l1 - l1[0]).max() < 1e-10 * l1[0]
    sups = np.array(trace.sup_norms)
    assert (np.diff(sups) <= 1e-12).all()


@pytest.mark.parametrize("p,a", [(2.0, 1.0)])
def test_constant_data_reproduces_the_ode_blowup_time(p, a):
    g = make_grid(1, 128, 10.0)
    spec = ProblemSpec(alpha=1.0, p=p, u0=Field(g, np.full(g.N, a)),
                       horizon=5.0, rho=1.0)
    trace = integrate(spec)
    assert trace.verdict == "BlownUp"
    want = 1.0 / ((p - 1.0) * a ** (p - 1.0))
    assert trace.t_star == pytest.approx(want, rel=2e-2)
    assert trace.step_stats["accepted"] > 0


def test_survived_cell_matches_frozen_run(fx):
    want = fx["survived_run"]
    rows, notes = fujita_sweep(1.0, 1, [want["p"]], [want["amplitude"]], 50.0)
    assert notes == []
    r = rows[0]
    assert r["verdict"] == want["verdict"] == "Survived"
    assert r["max_sup"] == pytest.approx(want["max_sup"], rel=1e-9)
    assert r["max_weissler"] == pytest.approx(want["max_weissler"], rel=1e-9)
    assert r["box_adequacy_flag"]


def test_survived_cell_has_decaying_tail():
    g = make_grid(1, 256, 10.0)
    spec = ProblemSpec(alpha=1.0, p=3.0, u0=_gauss(g, 0.01), horizon=50.0,
                       rho=1.0)
    trace = integrate(spec)
    assert trace.verdict == "Survived"
    sups = trace.sup_norms
    tail = sups[len(sups) // 2:]
    assert all(b <= a for a, b in zip(tail, tail[1:]))
    assert sups[-1] < 0.5 * sups[0]


def test_box_truncation_is_flagged():
    g = make_grid(1, 256, 10.0)
    spec = ProblemSpec(alpha=0.5, p=3.0, u0=_gauss(g, 0.01), horizon=10.0,
                       rho=1.0)
    trace = integrate(spec)
    assert any(f[0] == "box-truncation" for f in trace.flags)


def test_weissler_bound_collapse_and_guards():
    g = make_grid(1, 256, 10.0)
    u0 = Field(g, 0.5 * np.exp(-g.axis ** 2))
    tau = 0.7
    wb = weissler_bound(u0, tau, 2.0, 1.0)
    sup = semigroup_apply(u0, tau, 1.0).values.max()
    assert wb == pytest.approx(tau * sup, rel=1e-12)
    with pytest.raises(DomainError):
        weissler_bound(u0, tau, 1.0, 1.0)
    with pytest.raises(DomainError):
        weissler_bound(u0, 0.0, 2.0, 1.0)
    with pytest.raises(ConfigurationError):
        g2 = make_grid(2, 32, 10.0)
        weissler_bound(Field(g2, np.ones((32, 32))), tau, 2.0, 1.0)


def test_weissler_bound_free_space_branch():
    """Beyond the box the free-space sums take over; compare against the
    grid route on a much larger box."""
    tau, p, alpha = 5.0, 2.0, 1.0
    small = make_grid(1, 256, 10.0)
    big = make_grid(1, 2048, 80.0)
    v = lambda x: np.exp(-x ** 2)
    w_free = weissler_bound(Field(small, v(small.axis)), tau, p, alpha)
    w_grid = weissler_bound(Field(big, v(big.axis)), tau, p, alpha)
    assert w_free == pytest.approx(w_grid, rel=5e-2)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_critical_product_is_constant(alpha):
    probe = critical_mass_growth_probe(alpha, 1, [1.0, 2.0, 4.0, 8.0])
    assert probe["p_F"] == pytest.approx(1.0 + alpha)
    assert probe["spread"] < 1e-10
    ps = probe["partial_sums"]
    assert all(b > a for a, b in zip(ps, ps[1:]))


def test_critical_probe_value_and_guards():
    probe = critical_mass_growth_probe(1.0, 1, [1.0, 2.0, 4.0])
    assert probe["C2"] == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-2)
    with pytest.raises(ConfigurationError):
        critical_mass_growth_probe(1.0, 2, [1.0])
    with pytest.raises(DomainError):
        critical_mass_growth_probe(2.0, 1, [1.0])


def test_fujita_sweep_small_grid():
    rows, notes = fujita_sweep(1.0, 1, [2.0], [0.1, 10.0], 8.0)
    by_amp = {r["amplitude"]: r for r in rows}
    assert by_amp[10.0]["verdict"] == "BlownUp"
    assert by_amp[10.0]["t_star"] < by_amp[10.0]["T_reached"] + 1e-12
    assert all(r["amplitude_monotone_ok"] for r in rows)
    assert notes == []
    with pytest.raises(ConfigurationError):
        fujita_sweep(1.0, 1, [], [1.0], 1.0)
    with pytest.raises(ConfigurationError):
        fujita_sweep(1.0, 2, [2.0], [1.0], 1.0)
