import math
import warnings

import numpy as np
import pytest

from gcmodel import FlowField, analytic, numeric
from gcmodel.scales import AnalyteDimensionless, DomainError

from conftest import tabulated_groups

P = AnalyteDimensionless(beta=1.0, K_a=1.0, K_d=1.0, Da=0.06, t1_hat=5.0)


def _state(c, q=None, t=0.0):
    c = np.atleast_2d(np.asarray(c, float))
    q = np.zeros_like(c) if q is None else np.atleast_2d(np.asarray(q, float))
    return numeric.FieldSnapshot(np.linspace(0, 1, c.shape[1]), c, q, t)


def test_zero_state_is_fixed_point():
    grid = numeric.Grid(32, 16.0, 100.0)
    s = _state(np.zeros(33), t=10.0)  # pulse already off
    for _ in range(5):
        s = numeric.step(s, grid, [P], FlowField(0.4, 16.0), [1e-3], 1e-3)
    assert not np.any(s.c) and not np.any(s.q)


def test_uniform_flow_specialisation():
    # dyadic inputs keep every intermediate exact
    grid = numeric.Grid(16, 8.0, 10.0)  # dx = 1/2
    p = AnalyteDimensionless(beta=0.5, K_a=0.25, K_d=0.5, Da=0.5, t1_hat=1.0)
    pe, dt = 0.125, 0.0625
    rng = np.random.default_rng(3)
    c = np.round(rng.random(17) * 64) / 64
    q = np.round(rng.random(17) * 64) / 64
    out = numeric.step(_state(c, q, t=0.5), grid, [p], FlowField.uniform(8.0), [pe], dt)
    dx = grid.dx_hat
    R = p.K_a * c - p.K_d * q
    expect = c.copy()
    expect[1:-1] = c[1:-1] - dt / p.Da * ((c[2:] - c[:-2]) / (2 * dx)
                                         - pe * (c[2:] - 2 * c[1:-1] + c[:-2]) / dx**2
                                         + p.beta * R[1:-1])
    np.testing.assert_array_equal(out.c[0, 1:-1], expect[1:-1])
    np.testing.assert_array_equal(out.q[0], q + dt * R)


def test_hand_computed_advection_stencil():
    # no exchange (K_a = 0, q = 0) and no diffusion: c_j - dt/Da (c_{j+1} - c_{j-1}) / (2 dx)
    grid = numeric.Grid(16, 16.0, 10.0)  # dx = 1
    p = AnalyteDimensionless(beta=1.0, K_a=0.0, K_d=1.0, Da=1.0, t1_hat=5.0)
    c = np.zeros(17)
    c[:3] = [1.0, 1.0, 0.5]
    out = numeric.step(_state(c), grid, [p], FlowField.uniform(16.0), [0.0], 0.1)
    np.testing.assert_allclose(out.c[0, :5], [1.0, 1.025, 0.55, 0.025, 0.0], atol=1e-15)


def test_boundaries():
    grid = numeric.Grid(16, 16.0, 10.0)
    c = np.linspace(0, 1.6, 17)[None, :].copy()
    numeric.apply_boundaries(c, grid, 0.0, 1.0, 5.0)
    assert c[0, 0] == 1.0
    # outlet: one-sided second-order derivative vanishes
    assert 3 * c[0, -1] - 4 * c[0, -2] + c[0, -3] == pytest.approx(0.0, abs=1e-15)
    assert c[0, -1] == pytest.approx((4 * 1.5 - 1.4) / 3, rel=1e-15)
    flat = np.full((1, 17), 0.7)
    numeric.apply_boundaries(flat, grid, 0.0, 1.0, 5.0)
    assert flat[0, -1] == pytest.approx(0.7, rel=1e-15)
    numeric.apply_boundaries(c, grid, 0.0, 6.0, 5.0)
    assert c[0, 0] == 0.0
    # Robin with diffusion: 2 dx pulse + Pe(4 c1 - c2) over 2 dx u + 3 Pe
    c = np.full((1, 17), 0.5)
    numeric.apply_boundaries(c, grid, 0.2, 0.0, 5.0, u_inlet=1.0)
    assert c[0, 0] == pytest.approx((2.0 + 0.2 * 1.5) / (2.0 + 0.6), rel=1e-15)
    assert numeric.pulse(0.0, 5.0) == 1.0 and numeric.pulse(5.0, 5.0) == 0.0


def test_kinetic_ode_first_order():
    # c = 1 everywhere with a huge Da leaves c frozen (pulse on, no gradients)
    p = AnalyteDimensionless(beta=1.0, K_a=2.0, K_d=3.0, Da=1e12, t1_hat=1e6)
    grid = numeric.Grid(16, 16.0, 10.0)
    flow = FlowField.uniform(16.0)
    T = 1.0
    exact = p.K_a / p.K_d * (1 - math.exp(-p.K_d * T))
    errors = []
    for n in (20, 40, 80, 160):
        s = _state(np.ones(17))
        for _ in range(n):
            s = numeric.step(s, grid, [p], flow, [0.0], T / n)
        np.testing.assert_allclose(s.c, 1.0, atol=1e-11)
        errors.append(abs(s.q[0, 8] - exact))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    np.testing.assert_allclose(ratios, 2.0, rtol=0.08)


def test_single_step_is_forward_euler_for_q():
    grid = numeric.Grid(16, 16.0, 10.0)
    c, q = np.linspace(0, 1, 17), np.linspace(1, 0, 17)
    out = numeric.step(_state(c, q), grid, [P], FlowField(0.5, 16.0), [1e-3], 0.01)
    np.testing.assert_allclose(out.q[0], q + 0.01 * (P.K_a * c - P.K_d * q), rtol=1e-15)


def test_numba_kernel_matches_numpy_step():
    g = tabulated_groups(L_hat=100.0)
    flow = FlowField(g.pL_hat, 100.0)
    grid = numeric.Grid(200, 100.0, 5.0)
    p, pe = g.analyte(2), g.Pe_inv[2]
    dt = numeric.stable_dt(grid, p, flow, pe)
    n = int(math.ceil(2.0 / dt))
    res = numeric.simulate(grid, [p], flow, [pe], [2.0], snapshot_times=[2.0])
    s = numeric.initial_state(grid, 1, p.t1_hat, [pe], u_inlet=1.0)
    for _ in range(n):
        s = numeric.step(s, grid, [p], flow, [pe], 2.0 / n)
    np.testing.assert_allclose(res.snapshots[0].c[0], s.c[0], atol=1e-14)
    np.testing.assert_allclose(res.snapshots[0].q[0], s.q[0], atol=1e-14)


def test_stability_bound_replaces_naive_cfl():
    g = tabulated_groups(L_hat=500.0)
    flow = FlowField(g.pL_hat, 500.0)
    p, pe = g.analyte(4), g.Pe_inv[4]
    grid = numeric.Grid(4000, 500.0, 100.0)
    x, dx = grid.x, grid.dx_hat
    naive = 0.8 * min((p.Da * dx / flow.velocity(x)).min(),
                      (p.Da * dx**2 / (2 * pe * flow.diffusion_ratio(x))).min())
    ours = numeric.stable_dt(grid, p, flow, pe)
    assert ours < naive
    bad = numeric.initial_state(grid, 1, p.t1_hat, [pe])
    good = bad.copy()
    for _ in range(800):
        bad = numeric.step(bad, grid, [p], flow, [pe], naive)
        good = numeric.step(good, grid, [p], flow, [pe], ours)
    assert np.abs(bad.c).max() > 10.0  # the naive step amplifies grid-scale modes
    assert np.abs(good.c).max() <= 1.2  # bounded front overshoot of centred advection
    with pytest.raises(numeric.StabilityError):
        numeric.simulate(numeric.Grid(4000, 500.0, 1.0, dt_hat=naive), [p], flow, [pe], [1.0])


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_detected():
    grid = numeric.Grid(16, 16.0, 10.0)
    s = _state(np.ones(17))
    with pytest.raises(numeric.StabilityError):
        for _ in range(400):
            s = numeric.step(s, grid, [P], FlowField.uniform(16.0), [1e-3], 50.0)


def test_convergence_sweep_to_constant_u_solution():
    L = 50.0
    flow = FlowField.uniform(L)
    t = np.linspace(0, 130, 261)[1:]
    ref = analytic.concentration_constant_u(P, L, t)
    errors = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # centred advection undershoot at Pe = 0
        for N in (100, 200, 400, 800):
            r = numeric.simulate(numeric.Grid(N, L, 130.0), [P], flow, [0.0], t)
            errors.append(np.abs(r.chromatogram.values[0] - ref).max())
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    assert np.all(ratios >= 1.5), ratios


@pytest.mark.filterwarnings("ignore:finite-difference undershoot")
def test_near_uniform_flow_agrees_with_uniform():
    g = tabulated_groups(L_hat=200.0)
    p, pe = g.analyte(4), g.Pe_inv[4]
    t = np.linspace(0, 160, 321)
    out = []
    for pl in (1.0, 0.9999):
        r = numeric.simulate(numeric.Grid(1000, 200.0, 160.0), [p], FlowField(pl, 200.0), [pe], t)
        out.append(r.chromatogram.values[0])
    assert np.abs(out[0] - out[1]).max() <= 1e-3 * out[0].max()


def test_desk_scale_mass_audit_and_undershoot():
    g = tabulated_groups(L_hat=500.0)
    p, pe = g.analyte(4), g.Pe_inv[4]
    flow = FlowField(g.pL_hat, 500.0)
    t = np.linspace(0, 220, 221)
    r = numeric.simulate(numeric.Grid(4000, 500.0, 220.0), [p], flow, [pe], t,
                         snapshot_times=[60.0])
    assert np.abs(r.mass_audit).max() <= 0.01
    # integer sample times stay clear of the ringing right after the pulse edge
    assert r.undershoot[0] >= -numeric.NEGATIVE_TOL
    ref = analytic.concentration_variable_u(p, flow, 500.0, t)
    assert np.abs(r.chromatogram.values[0] - ref).max() <= 0.02 * ref.max()


def test_snapshot_csv(tmp_path):
    grid = numeric.Grid(16, 4.0, 1.0)
    r = numeric.simulate(grid, [P], FlowField(0.5, 4.0), [1e-2], [0.5, 1.0],
                         snapshot_times=[0.5], names=["a"])
    path = tmp_path / "snap.csv"
    r.snapshots[0].to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# t_hat=0.5")
    assert lines[1] == "x_hat,c_a,q_a"
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=2)
    assert data.shape == (17, 3)


def test_grid_and_input_validation():
    with pytest.raises(DomainError):
        numeric.Grid(8, 1.0, 1.0)
    grid = numeric.Grid(16, 4.0, 1.0)
    with pytest.raises(DomainError):
        numeric.simulate(grid, [P], FlowField(0.5, 4.0), [1e-2], [0.5, 2.0])
    with pytest.raises(DomainError):
        numeric.simulate(grid, [P], FlowField(0.5, 5.0), [1e-2], [0.5])
    with pytest.raises(DomainError):
        numeric.simulate(grid, [P, P], FlowField(0.5, 4.0), [1e-2], [0.5])


def test_front_oscillation_is_transient():
    # centred advection rings just after the inlet switches off, then diffusion damps it
    g = tabulated_groups(L_hat=500.0)
    p, pe = g.analyte(4), g.Pe_inv[4]
    flow = FlowField(g.pL_hat, 500.0)
    t_edge = p.t1_hat + 0.04
    with pytest.warns(RuntimeWarning, match="undershoot"):
        early = numeric.simulate(numeric.Grid(4000, 500.0, t_edge), [p], flow, [pe], [t_edge])
    assert -0.1 < early.undershoot[0] < -numeric.NEGATIVE_TOL
    t_late = p.t1_hat + 2.0
    late = numeric.simulate(numeric.Grid(4000, 500.0, t_late), [p], flow, [pe], [t_late])
    assert late.undershoot[0] >= -numeric.NEGATIVE_TOL
