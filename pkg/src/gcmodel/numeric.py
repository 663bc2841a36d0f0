"""Explicit finite-difference reference solver with axial diffusion.

Method of lines on ``N_x + 1`` nodes: centred first and second differences in
space, forward Euler in time. Interior update for every analyte::

    R_j   = K_a c_j - K_d q_j
    q_j' = q_j + dt R_j
    c_j' = c_j - dt/Da [ u_x,j c_j + (u_j - Pe D_x,j) dc_j - Pe D_j d2c_j + beta R_j ]

with ``dc_j = (c_{j+1} - c_{j-1}) / (2 dx)`` and
``d2c_j = (c_{j+1} - 2 c_j + c_{j-1}) / dx^2``. This is the forward-Euler form
of ``Da c_t + (u c)_x = Pe (D c_x)_x - beta q_t``; the diffusion terms enter
with the sign that makes the scheme consistent with that equation.

Boundary rows: one-sided three-point stencils for the inlet flux condition
``u c - Pe D c_x = pulse(t)`` and the zero-gradient outlet.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .chromatogram import Chromatogram
from .flow import FlowField
from .scales import AnalyteDimensionless, DomainError

NEGATIVE_TOL = 1e-9
STABILITY_SAFETY = 0.8


class StabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    N_x: int
    L_hat: float
    t_end_hat: float
    dt_hat: float | None = None

    def __post_init__(self):
        if self.N_x < 16:
            raise DomainError("N_x must be at least 16")
        if not (self.L_hat > 0 and self.t_end_hat > 0):
            raise DomainError("L_hat and t_end_hat must be positive")
        if self.dt_hat is not None and not self.dt_hat > 0:
            raise DomainError("dt_hat must be positive")

    @property
    def dx_hat(self) -> float:
        return self.L_hat / self.N_x

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L_hat, self.N_x + 1)


@dataclass
class FieldSnapshot:
    x: np.ndarray
    c: np.ndarray  # (n_analytes, N_x + 1)
    q: np.ndarray
    t_hat: float
    names: tuple[str, ...] = field(default=())

    def copy(self) -> "FieldSnapshot":
        return FieldSnapshot(self.x, self.c.copy(), self.q.copy(), self.t_hat, self.names)

    def to_csv(self, path, header_extra: str = ""):
        names = self.names or tuple(f"analyte_{i + 1}" for i in range(self.c.shape[0]))
        cols = ["x_hat"] + [f"c_{n}" for n in names] + [f"q_{n}" for n in names]
        data = np.column_stack([self.x, self.c.T, self.q.T])
        header = f"# t_hat={self.t_hat!r}\n" + header_extra
        with open(path, "w", newline="\n") as fh:
            fh.write(header)
            fh.write(",".join(cols) + "\n")
            np.savetxt(fh, data, delimiter=",", fmt="%.10e")


@dataclass(frozen=True)
class _Coefficients:
    u: np.ndarray
    ux: np.ndarray
    D: np.ndarray
    Dx: np.ndarray


def _coefficients(grid: Grid, flow: FlowField) -> _Coefficients:
    if abs(flow.L_hat - grid.L_hat) > 1e-12 * grid.L_hat:
        raise DomainError("flow field and grid use different column lengths")
    x = grid.x
    return _Coefficients(np.asarray(flow.velocity(x)), np.asarray(flow.velocity_gradient(x)),
                         np.asarray(flow.diffusion_ratio(x)),
                         np.asarray(flow.diffusion_ratio_gradient(x)))


def pulse(t, t1):
    """H(t) - H(t - t1) with H(0) = 1."""
    t = np.asarray(t, dtype=float)
    out = ((t >= 0) & (t < t1)).astype(float)
    return float(out) if out.ndim == 0 else out


def stable_dt(grid: Grid, p: AnalyteDimensionless, flow: FlowField, pe_inv: float,
              safety: float = STABILITY_SAFETY) -> float:
    """Largest forward-Euler step keeping every frozen-coefficient Fourier mode bounded.

    For each node and wavenumber the (c, q) update is ``I + dt A``; the
    returned step is ``safety`` times the largest dt with spectral radius <= 1.
    Centred advection alone is unconditionally unstable, so the bound comes
    from diffusion and adsorption damping.
    """
    coef = _coefficients(grid, flow)
    idx = np.unique(np.linspace(0, grid.N_x, min(grid.N_x + 1, 129)).astype(int))
    u, ux, D, Dx = (arr[idx][:, None] for arr in (coef.u, coef.ux, coef.D, coef.Dx))
    dx = grid.dx_hat
    theta = np.linspace(0.0, np.pi, 257)[1:][None, :]
    a11 = (-(u - pe_inv * Dx) * 1j * np.sin(theta) / dx
           - 4.0 * pe_inv * D * np.sin(0.5 * theta) ** 2 / dx**2
           - ux - p.beta * p.K_a) / p.Da
    a12 = p.beta * p.K_d / p.Da
    a21, a22 = p.K_a, -p.K_d

    def radius(dt):
        tr = 2.0 + dt * (a11 + a22)
        det = (1.0 + dt * a11) * (1.0 + dt * a22) - dt * dt * a12 * a21
        disc = np.sqrt(0.25 * tr * tr - det)
        return np.maximum(np.abs(0.5 * tr + disc), np.abs(0.5 * tr - disc)).max()

    hi = 2.0 / max(np.abs(a11).max(), p.K_d, 1e-300)
    lo = 0.0
    if radius(hi) <= 1.0 + 1e-12:
        return safety * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if radius(mid) <= 1.0 + 1e-12:
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise StabilityError("no stable explicit time step exists for these parameters")
    return safety * lo


def apply_boundaries(c: np.ndarray, grid: Grid, p_pe, t_hat: float, t1_hat: float,
                     u_inlet: float = 1.0) -> np.ndarray:
    """Set inlet and outlet rows of ``c`` (last axis is space) in place.

    ``p_pe`` is the inverse Peclet number (scalar or one per row of ``c``).
    """
    dx = grid.dx_hat
    pe = np.asarray(p_pe, dtype=float)
    inflow = pulse(t_hat, t1_hat)
    c[..., 0] = (2.0 * dx * inflow + pe * (4.0 * c[..., 1] - c[..., 2])) / (2.0 * dx * u_inlet + 3.0 * pe)
    c[..., -1] = (4.0 * c[..., -2] - c[..., -3]) / 3.0
    return c


def initial_state(grid: Grid, n_analytes: int, t1_hat: float, pe_inv, names=(),
                  u_inlet: float = 1.0) -> FieldSnapshot:
    c = np.zeros((n_analytes, grid.N_x + 1))
    apply_boundaries(c, grid, np.asarray(pe_inv, float), 0.0, t1_hat, u_inlet)
    return FieldSnapshot(grid.x, c, np.zeros_like(c), 0.0, tuple(names))


def step(state: FieldSnapshot, grid: Grid, params, flow: FlowField, pe_inv, dt: float) -> FieldSnapshot:
    """Advance every analyte by one explicit step of size ``dt``."""
    coef = _coefficients(grid, flow)
    dx = grid.dx_hat
    c, q = state.c, state.q
    beta = np.array([p.beta for p in params])[:, None]
    ka = np.array([p.K_a for p in params])[:, None]
    kd = np.array([p.K_d for p in params])[:, None]
    Da = params[0].Da
    t1 = params[0].t1_hat
    pe = np.asarray(pe_inv, dtype=float).reshape(-1)
    pe_col = pe[:, None]

    R = ka * c - kd * q
    q_new = q + dt * R
    c_new = c.copy()
    dc = (c[:, 2:] - c[:, :-2]) / (2.0 * dx)
    d2c = (c[:, 2:] - 2.0 * c[:, 1:-1] + c[:, :-2]) / dx**2
    s = slice(1, -1)
    c_new[:, s] = c[:, s] - dt / Da * (coef.ux[s] * c[:, s] + (coef.u[s] - pe_col * coef.Dx[s]) * dc
                                       - pe_col * coef.D[s] * d2c + beta * R[:, s])
    t_new = state.t_hat + dt
    apply_boundaries(c_new, grid, pe, t_new, t1, coef.u[0])
    if not (np.all(np.isfinite(c_new)) and np.all(np.isfinite(q_new))):
        raise StabilityError(f"non-finite values at t_hat={t_new:g}; reduce dt")
    return FieldSnapshot(state.x, c_new, q_new, t_new, state.names)


@numba.njit(cache=True, nogil=True, fastmath=False)
def _advance(c, q, work, n_steps, dt, t0, dx, Da, pe, beta, ka, kd, t1, u, ux, D, Dx):
    """In-place forward-Euler steps for one analyte; returns the outflow integral.

    The interior row is pre-factored into a three-point stencil
    ``lo c_{j-1} + mid c_j + hi c_{j+1} - (dt beta / Da) R_j``.
    """
    n = c.size - 1
    lam = dt / Da
    lo = np.empty(n + 1)
    mid = np.empty(n + 1)
    hi = np.empty(n + 1)
    for j in range(1, n):
        adv = lam * (u[j] - pe * Dx[j]) / (2.0 * dx)
        dif = lam * pe * D[j] / (dx * dx)
        lo[j] = adv + dif
        mid[j] = 1.0 - lam * ux[j] - 2.0 * dif
        hi[j] = -adv + dif
    react = lam * beta
    bc_den = 2.0 * dx * u[0] + 3.0 * pe
    a = c
    b = work
    outflow = 0.0
    for k in range(n_steps):
        t_new = t0 + (k + 1) * dt
        for j in range(1, n):
            r = ka * a[j] - kd * q[j]
            b[j] = lo[j] * a[j - 1] + mid[j] * a[j] + hi[j] * a[j + 1] - react * r
            q[j] += dt * r
        q[0] += dt * (ka * a[0] - kd * q[0])
        q[n] += dt * (ka * a[n] - kd * q[n])
        inflow = 1.0 if (t_new >= 0.0 and t_new < t1) else 0.0
        b[0] = (2.0 * dx * inflow + pe * (4.0 * b[1] - b[2])) / bc_den
        b[n] = (4.0 * b[n - 1] - b[n - 2]) / 3.0
        outflow += 0.5 * dt * u[n] * (a[n] + b[n])
        a, b = b, a
    if n_steps % 2 == 1:
        for j in range(n + 1):
            c[j] = work[j]
    if not np.isfinite(c[n]):
        return np.nan
    return outflow


@dataclass
class SimulationResult:
    chromatogram: Chromatogram
    snapshots: list[FieldSnapshot]
    mass_audit: np.ndarray  # (n_analytes, n_samples) relative balance error
    dt: np.ndarray
    undershoot: np.ndarray = None  # most negative c or q seen at any recorded time, per analyte


def mass_balance(snapshot_c, snapshot_q, x, p: AnalyteDimensionless, exited: float, t_hat: float):
    """(injected, accounted) dimensionless mass for one analyte."""
    injected = min(max(t_hat, 0.0), p.t1_hat)
    held = p.Da * np.trapezoid(snapshot_c, x) + p.beta * np.trapezoid(snapshot_q, x)
    return injected, held + exited


def simulate(grid: Grid, params, flow: FlowField, pe_inv, sample_times,
             snapshot_times=(), names=None) -> SimulationResult:
    """Integrate every analyte to the last sample time.

    Outlet concentration is recorded at ``sample_times``; full fields at
    ``snapshot_times`` (which must be among the sample times' span and are
    merged into the stepping schedule). Each analyte uses its own stable step
    unless ``grid.dt_hat`` fixes one.
    """
    params = list(params)
    pe = np.asarray(pe_inv, dtype=float).reshape(-1)
    if pe.size != len(params):
        raise DomainError("need one inverse Peclet number per analyte")
    if len({p.Da for p in params}) != 1 or len({p.t1_hat for p in params}) != 1:
        raise DomainError("all analytes must share Da and t1_hat")
    samples = np.asarray(sample_times, dtype=float)
    if samples.ndim != 1 or np.any(np.diff(samples) <= 0) or samples[0] < 0:
        raise DomainError("sample times must be non-negative and strictly ascending")
    snaps_req = np.asarray(snapshot_times, dtype=float).reshape(-1)
    schedule = np.unique(np.concatenate([samples, snaps_req]))
    if schedule[-1] > grid.t_end_hat * (1 + 1e-12):
        raise DomainError("requested times exceed grid.t_end_hat")
    names = tuple(names) if names is not None else tuple(f"analyte_{i + 1}" for i in range(len(params)))

    coef = _coefficients(grid, flow)
    dx = grid.dx_hat
    x = grid.x
    n_an = len(params)
    outlet = np.zeros((n_an, samples.size))
    audit = np.zeros((n_an, samples.size))
    snap_c = np.zeros((snaps_req.size, n_an, grid.N_x + 1))
    snap_q = np.zeros_like(snap_c)
    dts = np.zeros(n_an)
    low = np.zeros(n_an)
    sample_pos = {float(t): k for k, t in enumerate(samples)}
    snap_pos = {float(t): k for k, t in enumerate(snaps_req)}

    for i, p in enumerate(params):
        dt_max = stable_dt(grid, p, flow, pe[i])
        if grid.dt_hat is not None:
            if grid.dt_hat > dt_max / STABILITY_SAFETY:
                raise StabilityError(f"dt_hat={grid.dt_hat:g} exceeds the stability limit "
                                     f"{dt_max / STABILITY_SAFETY:g} for {names[i]}")
            dt_max = grid.dt_hat
        dts[i] = dt_max
        state = initial_state(grid, 1, p.t1_hat, pe[i:i + 1], u_inlet=coef.u[0])
        c, q = state.c[0].copy(), state.q[0].copy()
        work = np.zeros_like(c)
        t, exited = 0.0, 0.0
        for t_target in schedule:
            span = t_target - t
            if span > 0:
                n_steps = int(math.ceil(span / dt_max - 1e-9))
                out = _advance(c, q, work, n_steps, span / n_steps, t, dx, p.Da, pe[i], p.beta,
                               p.K_a, p.K_d, p.t1_hat, coef.u, coef.ux, coef.D, coef.Dx)
                if not np.isfinite(out):
                    raise StabilityError(f"{names[i]}: solution diverged before t_hat={t_target:g}")
                exited += out
                t = float(t_target)
            key = float(t_target)
            low[i] = min(low[i], c.min(), q.min())
            if key in sample_pos:
                k = sample_pos[key]
                outlet[i, k] = c[-1]
                injected, accounted = mass_balance(c, q, x, p, exited, t)
                audit[i, k] = (accounted - injected) / p.t1_hat
            if key in snap_pos:
                snap_c[snap_pos[key], i] = c
                snap_q[snap_pos[key], i] = q

    chrom = Chromatogram(samples, outlet, names, meta={"solver": "fd",
                                                       "regime": "constant" if flow.is_uniform else "variable"})
    snapshots = [FieldSnapshot(x, snap_c[k], snap_q[k], float(t), names)
                 for k, t in enumerate(snaps_req)]
    if np.any(low < -NEGATIVE_TOL):
        warnings.warn(f"finite-difference undershoot {low.min():.3e} exceeds {NEGATIVE_TOL:g}",
                      RuntimeWarning, stacklevel=2)
    return SimulationResult(chrom, snapshots, audit, dts, low)
