"""Amplitude ODEs of single Fourier modes: integration, exact roots, energy balance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import LinearTVParams


@dataclass(frozen=True)
class AmplitudeState:
    a: float
    v: float
    b: float
    t: float = 0.0

    def vector(self) -> np.ndarray:
        return np.array([self.a, self.v, self.b], dtype=float)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled amplitude history; ``states[:, 0:3]`` are ``(a, v, b)``."""

    t: np.ndarray
    states: np.ndarray
    dt: float
    method: str
    order: int

    @property
    def a(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def b(self) -> np.ndarray:
        return self.states[:, 2]


def integrate_amplitude(
    params: LinearTVParams,
    init: AmplitudeState,
    t_end: float,
    dt: float,
    method: str = "rk4",
) -> Trajectory:
    """Fixed-step integration of ``d/dt (a, v, b) = A(n) (a, v, b)``.

    ``method`` is ``"rk4"`` (explicit, needs ``dt (mu + kappa) n^2 <= 0.5``) or
    ``"trapezoidal"`` (implicit, unconditionally stable).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    A = params.matrix()
    n2 = float(params.n) ** 2
    if method == "rk4":
        if dt * (params.mu + params.kappa) * n2 > 0.5:
            raise ValueError(
                f"explicit stability guard violated: dt*(mu+kappa)*n^2 = "
                f"{dt * (params.mu + params.kappa) * n2:.3g} > 0.5"
            )
        # one RK4 step of a linear system is multiplication by the degree-4 Taylor polynomial
        hA = dt * A
        step = np.eye(3) + hA @ (np.eye(3) + hA @ (np.eye(3) / 2 + hA @ (np.eye(3) / 6 + hA / 24)))
        order = 4
    elif method == "trapezoidal":
        half = 0.5 * dt * A
        step = np.linalg.solve(np.eye(3) - half, np.eye(3) + half)
        order = 2
    else:
        raise ValueError(f"unknown method {method!r}")

    n_steps = int(np.ceil((t_end - init.t) / dt - 1e-9))
    if n_steps < 1:
        raise ValueError("t_end must exceed the initial time by at least one step")
    t = init.t + dt * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, 3))
    states[0] = init.vector()
    for k in range(n_steps):
        states[k + 1] = step @ states[k]
    return Trajectory(t=t, states=states, dt=dt, method=method, order=order)


def mode_energy(states: np.ndarray, params: LinearTVParams) -> np.ndarray:
    n2 = float(params.n) ** 2
    a, v, b = states[..., 0], states[..., 1], states[..., 2]
    return 0.5 * v**2 + 0.5 * params.lam * n2 * a**2 + 0.5 * n2 * b**2


def mode_dissipation(states: np.ndarray, params: LinearTVParams) -> np.ndarray:
    n2 = float(params.n) ** 2
    return params.mu * n2 * states[..., 1] ** 2 + params.kappa * n2**2 * states[..., 2] ** 2


def energy_identity_residual(traj: Trajectory, params: LinearTVParams) -> float:
    """Max over interior samples of ``|dE/dt + D|`` with centered differences for dE/dt."""
    if len(traj.t) < 3:
        raise ValueError("need at least 3 samples for a centered difference")
    E = mode_energy(traj.states, params)
    dE = (E[2:] - E[:-2]) / (2.0 * traj.dt)
    D = mode_dissipation(traj.states[1:-1], params)
    return float(np.abs(dE + D).max())


def viscoelastic_roots(lam: float, mu: float, n: int) -> tuple[complex, complex]:
    """Roots ``(rho_minus, rho_plus)`` of ``rho^2 + mu n^2 rho + lam n^2``.

    Real roots are computed without cancellation; complex roots are returned
    when ``4 lam > mu^2 n^2``.
    """
    if not (lam > 0 and mu > 0):
        raise ValueError("need lam > 0 and mu > 0")
    n2 = float(n) ** 2
    p, q = mu * n2, lam * n2
    disc = p * p - 4.0 * q
    if disc >= 0:
        big = -0.5 * (p + np.sqrt(disc))
        return complex(big), complex(q / big)
    im = 0.5 * np.sqrt(-disc)
    return complex(-0.5 * p, -im), complex(-0.5 * p, im)


@dataclass(frozen=True)
class AdiabaticAmplitude:
    """Roots of the scalar amplitude equation and the temperature recovery factor.

    For ``a(t) = alpha(t) zeta`` the temperature amplitude is
    ``b = b_factor * alpha`` with ``b_factor = -(zeta . M nu)``.
    """

    rho_minus: complex
    rho_plus: complex
    b_factor: float

    def b(self, alpha):
        return self.b_factor * np.asarray(alpha)


def adiabatic_amplitude(sigma_r: float, mu: float, n: int, coupling: float = 0.0) -> AdiabaticAmplitude:
    """``coupling`` is ``zeta^r . (M nu)`` for the chosen eigenpair of the modified acoustic tensor."""
    if not sigma_r > 0:
        raise ValueError(f"modified acoustic eigenvalue must be positive, got {sigma_r}")
    rm, rp = viscoelastic_roots(sigma_r, mu, n)
    return AdiabaticAmplitude(rm, rp, -float(coupling))
