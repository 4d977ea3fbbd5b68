"""Explicit finite differences for the viscoelastic bar ``u_t = v_x``, ``v_t = (sigma(u) + mu v_x / u)_x``.

The grid is staggered on the periodic cell ``[0, 1)``: ``u`` lives at cell
centres ``(j + 1/2) dx`` and ``v`` at nodes ``j dx``.  The velocity is split as
``v = c x + w`` with ``w`` periodic, so data whose velocity grows by ``c`` per
period (the laminates) are periodic in the unknowns.  Time stepping is Heun's
RK2 under the parabolic restriction ``dt <= 0.4 dx^2 / max(mu / u)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

CFL_SAFETY = 0.4
# a stable step this far below its initial value means the strain is collapsing to zero
DT_COLLAPSE = 1e-4


class CFLError(ValueError):
    """Requested time step violates the parabolic stability restriction."""


@dataclass(frozen=True)
class Grid1D:
    """``N`` cells on ``[0, 1)``; ``dt=None`` picks the largest stable step at every step."""

    N: int
    dt: float | None = None
    t_span: tuple = (1.0, 2.0)
    safety: float = CFL_SAFETY

    def __post_init__(self):
        if self.N < 4:
            raise ValueError("need at least 4 cells")
        if self.t_span[1] <= self.t_span[0]:
            raise ValueError("empty time span")

    @property
    def dx(self) -> float:
        return 1.0 / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N) * self.dx

    @property
    def centres(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.dx

    def stable_dt(self, u: np.ndarray, mu: float) -> float:
        return self.safety * self.dx**2 / max(mu / float(np.min(u)), 1e-300)

    def check_resolution(self, n: int):
        if self.N < 16 * n:
            raise ValueError(f"N={self.N} does not resolve mode n={n}: need N >= 16 n")


@dataclass(frozen=True)
class BarState:
    u: np.ndarray  # at centres
    w: np.ndarray  # periodic part of v at nodes
    drift: float = 0.0

    def velocity(self, nodes: np.ndarray) -> np.ndarray:
        return self.drift * nodes + self.w


@dataclass
class BarTrajectory:
    grid: Grid1D
    mu: float
    drift: float
    times: list = field(default_factory=list)
    u: list = field(default_factory=list)
    w: list = field(default_factory=list)
    stress: list = field(default_factory=list)
    steps: int = 0

    def snapshot(self, t: float) -> int:
        """Index of the stored snapshot closest to ``t``."""
        return int(np.argmin(np.abs(np.asarray(self.times) - t)))

    def velocity(self, k: int) -> np.ndarray:
        return self.drift * self.grid.nodes + self.w[k]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "x", "u", "v", "S"])
        xc = self.grid.centres
        for k, t in enumerate(self.times):
            # v and S are reported at the centres (v averaged from the two neighbouring nodes)
            v = self.velocity(k)
            v_c = 0.5 * (v + np.roll(v, -1))
            v_c[-1] = 0.5 * (v[-1] + v[0] + self.drift)
            for j in range(self.grid.N):
                writer.writerow([repr(float(t)), repr(float(xc[j])), repr(float(self.u[k][j])), repr(float(v_c[j])), repr(float(self.stress[k][j]))])
        return buf.getvalue()


def _total_stress(sigma, mu, u, w, drift, dx):
    vx = np.empty_like(w)
    vx[:-1] = w[1:] - w[:-1]
    vx[-1] = w[0] - w[-1]
    vx = drift + vx / dx
    return sigma(u) + mu * vx / u, vx


def solve_bar(
    sigma,
    mu: float,
    init: BarState,
    grid: Grid1D,
    source=None,
    snapshot_times=None,
) -> BarTrajectory:
    """Integrate from ``grid.t_span[0]`` to ``grid.t_span[1]``.

    ``source(t) -> (f_u at centres, f_v at nodes)`` adds forcing (used by
    manufactured-solution tests).  Snapshots are stored at the first step
    reaching each requested time; the final state is always stored.
    """
    u = np.asarray(init.u, dtype=float).copy()
    w = np.asarray(init.w, dtype=float).copy()
    if u.shape != (grid.N,) or w.shape != (grid.N,):
        raise ValueError("initial data must have one value per cell / node")
    if np.min(u) <= 0:
        raise ValueError("initial strain must be positive")
    c, dx = init.drift, grid.dx
    if grid.dt is not None and grid.dt > grid.stable_dt(u, mu) * (1 + 1e-12):
        raise CFLError(f"dt={grid.dt:.3e} exceeds the stable step {grid.stable_dt(u, mu):.3e}")

    t0, t1 = grid.t_span
    extra = [] if snapshot_times is None else [float(s) for s in snapshot_times]
    pending = sorted(set([t0] + extra))
    traj = BarTrajectory(grid, mu, c)

    def record(t, u, w):
        S, _ = _total_stress(sigma, mu, u, w, c, dx)
        traj.times.append(t)
        traj.u.append(u.copy())
        traj.w.append(w.copy())
        traj.stress.append(S)

    def rhs(t, u, w):
        S, vx = _total_stress(sigma, mu, u, w, c, dx)
        du = vx
        dw = np.empty_like(S)
        dw[1:] = S[1:] - S[:-1]
        dw[0] = S[0] - S[-1]
        dw /= dx
        if source is not None:
            fu, fv = source(t)
            du = du + fu
            dw = dw + fv
        return du, dw

    dt_initial = grid.stable_dt(u, mu)
    t = t0
    while True:
        while pending and pending[0] <= t + 1e-12:
            record(t, u, w)
            pending.pop(0)
        if t >= t1 - 1e-14:
            break
        dt = grid.dt if grid.dt is not None else grid.stable_dt(u, mu)
        if grid.dt is None and dt < DT_COLLAPSE * dt_initial:
            raise ValueError(f"strain collapsing toward zero near t={t:.6f}: stable step fell to {dt:.2e}")
        if grid.dt is not None and dt > grid.stable_dt(u, mu) * (1 + 1e-12):
            raise CFLError(f"dt={dt:.3e} exceeds the stable step during the run")
        dt = min(dt, t1 - t)
        k1u, k1w = rhs(t, u, w)
        u1, w1 = u + dt * k1u, w + dt * k1w
        k2u, k2w = rhs(t + dt, u1, w1)
        u = u + 0.5 * dt * (k1u + k2u)
        w = w + 0.5 * dt * (k1w + k2w)
        t += dt
        traj.steps += 1
        if np.min(u) <= 0:
            raise ValueError(f"strain lost positivity at t={t:.6f}")
    if traj.times[-1] != t:
        record(t, u, w)
    return traj


def initial_from_solution(sol, grid: Grid1D, t: float | None = None) -> BarState:
    """Sample a Lagrangian laminate: ``u`` at centres, ``v - c x`` at nodes."""
    t = grid.t_span[0] if t is None else t
    grid.check_resolution(sol.mode)
    u = sol.u(np.full(grid.N, t), grid.centres)
    v = sol.v(np.full(grid.N, t), grid.nodes)
    return BarState(u, v - sol.c * grid.nodes, sol.c)


@dataclass(frozen=True)
class OscillationMetric:
    total_variation: float
    weights: tuple
    targets: tuple


def oscillation_metric(u: np.ndarray, t: float, a: float, b: float) -> OscillationMetric:
    """Periodic total variation of ``u`` on the unit cell and the share of cells nearer ``a t`` or ``b t``."""
    u = np.asarray(u, dtype=float)
    tv = float(np.abs(np.roll(u, -1) - u).sum())
    near_a = np.abs(u - a * t) <= np.abs(u - b * t)
    w_a = float(near_a.mean())
    return OscillationMetric(tv, (w_a, 1.0 - w_a), (a * t, b * t))


def stress_deviation(traj: BarTrajectory) -> float:
    """Max over snapshots of the spatial standard deviation of the total stress."""
    return float(max(np.std(S) for S in traj.stress))


# --- manufactured solution ---------------------------------------------------

def _mms_fields(t, x, mu, sigma_coef):
    """Smooth periodic solution and its derivatives for a polynomial sigma."""
    k = 2 * np.pi
    u = 2.0 + 0.2 * np.sin(k * x) * np.cos(t)
    u_t = -0.2 * np.sin(k * x) * np.sin(t)
    u_x = 0.2 * k * np.cos(k * x) * np.cos(t)
    v = 0.3 * np.cos(k * x) * np.exp(-t)
    v_t = -v
    v_x = -0.3 * k * np.sin(k * x) * np.exp(-t)
    v_xx = -(k**2) * v
    p = np.polynomial.Polynomial(sigma_coef)
    S_x = p.deriv()(u) * u_x + mu * (v_xx * u - v_x * u_x) / u**2
    return u, v, u_t, v_x, v_t, S_x


def manufactured_run(N: int, mu: float = 0.5, sigma_coef=(0.0, 1.0, 0.0, 0.1), t_span=(1.0, 1.2)) -> float:
    """Max error in ``u`` and ``v`` at the final time for the forced smooth problem."""
    from .materials import MaterialLaw

    sigma = MaterialLaw.polynomial("sigma", list(sigma_coef), (0.5, 4.0))
    grid = Grid1D(N, t_span=t_span)
    xc, xn = grid.centres, grid.nodes

    def source(t):
        _, _, u_t, v_x, _, _ = _mms_fields(t, xc, mu, sigma_coef)
        _, _, _, _, v_t, S_x = _mms_fields(t, xn, mu, sigma_coef)
        return u_t - v_x, v_t - S_x

    u0 = _mms_fields(t_span[0], xc, mu, sigma_coef)[0]
    w0 = _mms_fields(t_span[0], xn, mu, sigma_coef)[1]
    traj = solve_bar(sigma, mu, BarState(u0, w0, 0.0), grid, source=source)
    t = traj.times[-1]
    u_ex = _mms_fields(t, xc, mu, sigma_coef)[0]
    v_ex = _mms_fields(t, xn, mu, sigma_coef)[1]
    return float(max(np.abs(traj.u[-1] - u_ex).max(), np.abs(traj.w[-1] - v_ex).max()))


def convergence_order(N_list=(16, 32, 64), **kwargs) -> tuple[list, float]:
    errors = [manufactured_run(N, **kwargs) for N in N_list]
    order = -float(np.polyfit(np.log(N_list), np.log(errors), 1)[0])
    return errors, order
