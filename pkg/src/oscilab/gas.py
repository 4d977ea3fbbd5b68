"""Adiabatic viscous gas: constitutive class, uniform extensions and interface construction.

The constitutive family is

    psi(u, theta) = theta W(u) - (theta ln theta - theta),   W(u) = int_1^u tau,

so ``sigma = theta tau(u)``, ``eta = ln theta - W(u)`` and ``e = theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline

from .materials import MaterialLaw, PhasePair
from .piecewise import PiecewisePolynomial, as_polynomial, hermite_cubic, line

T_START, T_END = 1.0, 2.0


@dataclass(frozen=True)
class GasConstitutive:
    """Gas law generated by ``tau``; ``W`` vanishes at ``u = 1`` when 1 lies in the domain."""

    tau: MaterialLaw

    def __post_init__(self):
        lo, hi = self.tau.domain
        ref = 1.0 if lo <= 1.0 <= hi else lo
        object.__setattr__(self, "_W", self.tau.law.antiderivative(ref))

    def W(self, u):
        return self._W(u)

    def psi(self, u, theta):
        theta = np.asarray(theta, dtype=float)
        return theta * self.W(u) - (theta * np.log(theta) - theta)

    def sigma(self, u, theta):
        return np.asarray(theta) * self.tau(u)

    def eta(self, u, theta):
        return np.log(theta) - self.W(u)

    def energy(self, u, theta):
        return self.psi(u, theta) + np.asarray(theta) * self.eta(u, theta)

    def sigma_u(self, u, theta):
        return np.asarray(theta) * self.tau.derivative(u)

    def sigma_theta(self, u, theta):
        return self.tau(u) + 0.0 * np.asarray(theta)

    def eta_u(self, u, theta):
        return -self.tau(u) + 0.0 * np.asarray(theta)

    def eta_theta(self, u, theta):
        return 1.0 / np.asarray(theta, dtype=float)

    def hyperbolic(self, u, theta) -> np.ndarray:
        """Pointwise check of ``e_theta > 0``, ``sigma_u > 0``, ``eta_theta > 0``."""
        theta = np.asarray(theta, dtype=float)
        return (theta > 0) & (self.sigma_u(u, theta) > 0)

    @classmethod
    def constant(cls, value: float, domain=(0.25, 10.0)) -> "GasConstitutive":
        return cls(MaterialLaw.polynomial("tau", [value], domain))


@dataclass(frozen=True)
class DenseTrajectory:
    """RK4 samples with exact right-hand-side slopes, interpolated by cubic Hermite splines."""

    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.t, self.y, self.dy))

    def __call__(self, t):
        out = self._spline(np.asarray(t, dtype=float))
        return out if np.ndim(out) else float(out)

    def derivative(self, t):
        out = self._spline(np.asarray(t, dtype=float), 1)
        return out if np.ndim(out) else float(out)

    @property
    def min(self) -> float:
        return float(self.y.min())


def rk4_dense(rhs, y0: float, t0: float = T_START, t1: float = T_END, n_steps: int = 2000) -> DenseTrajectory:
    """Classical RK4 for a scalar ODE ``y' = rhs(t, y)`` on a uniform grid."""
    h = (t1 - t0) / n_steps
    t = t0 + h * np.arange(n_steps + 1)
    y = np.empty(n_steps + 1)
    y[0] = y0
    for k in range(n_steps):
        tk, yk = t[k], y[k]
        k1 = rhs(tk, yk)
        k2 = rhs(tk + h / 2, yk + h / 2 * k1)
        k3 = rhs(tk + h / 2, yk + h / 2 * k2)
        k4 = rhs(tk + h, yk + h * k3)
        y[k + 1] = yk + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    dy = np.array([rhs(tk, yk) for tk, yk in zip(t, y)])
    return DenseTrajectory(t, y, dy)


@dataclass(frozen=True)
class UniformExtension:
    """``u = a t``, ``v = a x``, ``theta = theta_bar(t)`` for the gas law ``gas``."""

    rate: float
    phi0: float
    gas: GasConstitutive
    mu: float
    rk4: DenseTrajectory

    def _rhs_parts(self, t):
        return self.rate * self.gas.tau(self.rate * t), self.mu * self.rate / t

    def closed_form(self, t: float, tol: float = 1e-12) -> float:
        """``phi e^{W(at)-W(a)} + int_1^t (mu a/s) e^{W(at)-W(as)} ds`` by adaptive quadrature."""
        a, W = self.rate, self.gas.W
        Wat = W(a * t)
        integral, _ = quad(lambda s: self.mu * a / s * np.exp(Wat - W(a * s)), 1.0, t, epsabs=tol, epsrel=tol, limit=200)
        return float(self.phi0 * np.exp(Wat - W(a)) + integral)

    def __call__(self, t):
        return self.rk4(t)

    def entropy_identity_residual(self, t_grid) -> float:
        """Max of ``|theta d/dt[ln theta - W(at)] - mu a / t|`` along the trajectory."""
        t = np.asarray(t_grid, dtype=float)
        th, dth = self.rk4(t), self.rk4.derivative(t)
        lhs = th * (dth / th - self.rate * self.gas.tau(self.rate * t))
        return float(np.abs(lhs - self.mu * self.rate / t).max())


def gas_uniform_extension(rate: float, phi0: float, gas: GasConstitutive, mu: float = 1.0, n_steps: int = 2000) -> UniformExtension:
    if not (rate > 0 and phi0 > 0 and mu > 0):
        raise ValueError("rate, initial temperature and viscosity must be positive")

    def rhs(t, th):
        return rate * gas.tau(rate * t) * th + mu * rate / t

    return UniformExtension(rate, phi0, gas, mu, rk4_dense(rhs, phi0, n_steps=n_steps))


@dataclass(frozen=True)
class GasInterface:
    """Result of the interface construction: extended law and both phase temperatures."""

    pair: PhasePair
    gas: GasConstitutive
    theta_A: DenseTrajectory
    theta_hat: DenseTrajectory
    theta_B: DenseTrajectory
    mu: float
    bridge_min: float

    def identity_residual(self, t_grid) -> float:
        """``max |tau(At) theta_A - tau(Bt) theta_B|`` with ``theta_B`` re-solved from the extended law."""
        t = np.asarray(t_grid, dtype=float)
        A, B = self.pair.a, self.pair.b
        tau = self.gas.tau
        return float(np.abs(tau(A * t) * self.theta_A(t) - tau(B * t) * self.theta_B(t)).max())


def _tabulated_pieces(u_nodes, values, slopes):
    pieces = []
    for i in range(len(u_nodes) - 1):
        pieces.append(hermite_cubic(u_nodes[i], u_nodes[i + 1], values[i], values[i + 1], slopes[i], slopes[i + 1]))
    return pieces


def gas_interface_construct(
    pair: PhasePair,
    phi_A: float,
    phi_B: float,
    tau_base,
    mu: float = 1.0,
    n_steps: int = 2000,
) -> GasInterface:
    """Extend ``tau`` from ``[A, 2A]`` to ``[B, 2B]`` so the two uniform extensions can be joined.

    ``theta_hat' = mu B / t + B tau(At) theta_A`` is integrated by RK4 and
    ``tau(Bt) = tau(At) theta_A / theta_hat`` is tabulated as C1 cubic
    Hermite pieces using exact slopes.  ``theta_B`` is then re-solved from
    the extended law as an independent check.
    """
    if not (phi_A > 0 and phi_B > 0 and mu > 0):
        raise ValueError("temperatures and viscosity must be positive")
    A, B = pair.a, pair.b
    base = as_polynomial(tau_base, A, 2 * A)
    # tau = 0 is admitted: it is the decoupled case where both temperatures solve linear ODEs
    if base(np.linspace(A, 2 * A, 401)).min() < 0:
        raise ValueError("tau must be nonnegative on [A, 2A]")
    dbase = base.deriv()

    theta_A = rk4_dense(lambda t, th: A * base(A * t) * th + mu * A / t, phi_A, n_steps=n_steps)
    theta_hat = rk4_dense(lambda t, th: mu * B / t + B * base(A * t) * theta_A(t), phi_B, n_steps=n_steps)
    if theta_hat.min <= 0:
        raise ValueError("constructed temperature is not positive")

    t = theta_A.t
    g = base(A * t) * theta_A.y
    dg = A * dbase(A * t) * theta_A.y + base(A * t) * theta_A.dy
    values = g / theta_hat.y
    # d/dt [g / theta_hat] = (g' theta_hat - g theta_hat') / theta_hat^2, and d/du = (1/B) d/dt
    slopes = (dg * theta_hat.y - g * theta_hat.dy) / theta_hat.y**2 / B
    u_nodes = B * t

    bridge = hermite_cubic(2 * A, B, base(2 * A), values[0], dbase(2 * A), slopes[0])
    left = line(A, base(A), dbase(A), A / 2, A)
    right = line(2 * B, values[-1], slopes[-1], 2 * B, 3 * B)
    breaks = [A / 2, A, 2 * A] + list(u_nodes) + [3 * B]
    pieces = [left, base, bridge] + _tabulated_pieces(u_nodes, values, slopes) + [right]
    law = MaterialLaw("tau", PiecewisePolynomial(breaks, pieces), pair)
    gas = GasConstitutive(law)
    bridge_min = float(bridge(np.linspace(2 * A, B, 401)).min())

    theta_B = rk4_dense(lambda s, th: B * law(B * s) * th + mu * B / s, phi_B, n_steps=n_steps)
    return GasInterface(pair, gas, theta_A, theta_hat, theta_B, mu, bridge_min)


__all__ = [
    "GasConstitutive",
    "DenseTrajectory",
    "rk4_dense",
    "UniformExtension",
    "gas_uniform_extension",
    "GasInterface",
    "gas_interface_construct",
]
