"""Exact oscillating plane-wave solutions of the linear thermoviscoelastic systems.

Every wave here has the form

    u_k(t, x) = (1/n) U_k exp(rho t + i n nu.x),   theta(t, x) = T exp(rho t + i n nu.x)

with ``(rho, U, T)`` taken from an exact eigenpair of the mode matrix, so
real and imaginary parts are exact solutions of

    u_k,tt = d_a (A_klab d_b u_l + M_ka theta) + mu Lap u_k,t
    theta_t = kappa Lap theta + M_ka d_a u_k,t

The 1-d system is the ``d = 1`` case with ``A = lam`` and ``M = m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitude import adiabatic_amplitude
from .dispersion import (
    ElasticSystem,
    LinearTVParams,
    characteristic_cubic,
    check_hypotheses,
    mode_eigenvector,
    modified_acoustic_tensor,
    solve_cubic,
)

BRANCHES = {"slow": 0, "fast1": 1, "fast2": 2}
QUANTITIES = ("u", "v", "w", "v_x", "theta", "theta_x", "theta_xx")


@dataclass(frozen=True)
class WaveField:
    """Immutable evaluator of one complex plane wave and its governing system."""

    n: int
    rho: complex
    nu: np.ndarray
    u_amp: np.ndarray  # U_k, so that u = U e^{...} / n
    theta_amp: complex
    A: np.ndarray
    M: np.ndarray
    mu: float
    kappa: float
    system: str = "tve-1d"
    branch: str = "slow"

    @property
    def d(self) -> int:
        return len(self.nu)

    def _phase(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return np.exp(self.rho * t + 1j * self.n * (x @ self.nu))

    def u(self, t, x) -> np.ndarray:
        return self._phase(t, x)[..., None] * self.u_amp / self.n

    def velocity(self, t, x) -> np.ndarray:
        return self.rho * self.u(t, x)

    def grad_u(self, t, x) -> np.ndarray:
        """``d u_k / d x_b`` with shape ``(..., d, d)``."""
        e = self._phase(t, x)[..., None, None]
        return 1j * e * np.outer(self.u_amp, self.nu)

    def grad_v(self, t, x) -> np.ndarray:
        return self.rho * self.grad_u(t, x)

    def theta(self, t, x) -> np.ndarray:
        return self.theta_amp * self._phase(t, x)

    def theta_x(self, t, x) -> np.ndarray:
        return (1j * self.n * self.theta(t, x))[..., None] * self.nu

    def lap_theta(self, t, x) -> np.ndarray:
        return -(self.n**2) * self.theta(t, x)

    def amplitude(self, quantity: str, t: float, x) -> float:
        """Sup over the sample points ``x`` of the modulus of ``quantity``."""
        getters = {
            "u": lambda: np.linalg.norm(self.u(t, x), axis=-1),
            "v": lambda: np.linalg.norm(self.velocity(t, x), axis=-1),
            "w": lambda: np.linalg.norm(self.grad_u(t, x), axis=(-2, -1)),
            "v_x": lambda: np.linalg.norm(self.grad_v(t, x), axis=(-2, -1)),
            "theta": lambda: np.abs(self.theta(t, x)),
            "theta_x": lambda: np.linalg.norm(self.theta_x(t, x), axis=-1),
            "theta_xx": lambda: np.abs(self.lap_theta(t, x)),
        }
        if quantity not in getters:
            raise ValueError(f"unknown quantity {quantity!r}; choose from {QUANTITIES}")
        return float(np.max(getters[quantity]()))


def _one_d_tensors(lam: float, m: float):
    return np.full((1, 1, 1, 1), float(lam)), np.full((1, 1), float(m))


def wave_1d(params: LinearTVParams, branch: str = "slow", init_scale: float = 1.0) -> WaveField:
    """Exact Fourier-mode wave on one root of the cubic, eigenvector scaled so ``a(0) = mu``."""
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {sorted(BRANCHES)}")
    if params.kappa == 0 and params.m != 0:
        raise ValueError("kappa = 0 with coupling: use wave_adiabatic")
    roots = solve_cubic(characteristic_cubic(params))
    rho = roots[BRANCHES[branch]]
    if rho.imag != 0:
        raise ValueError(f"root on branch {branch!r} is complex ({rho}) at n={params.n}")
    rho = rho.real
    a, _, b = init_scale * mode_eigenvector(params, rho)
    A, M = _one_d_tensors(params.lam, params.m)
    return WaveField(
        n=params.n,
        rho=rho,
        nu=np.array([1.0]),
        u_amp=np.array([a], dtype=complex),
        theta_amp=-1j * b,
        A=A,
        M=M,
        mu=params.mu,
        kappa=params.kappa,
        system="tve-1d" if params.m != 0 else "viscoelastic",
        branch=branch,
    )


def wave_multid(sys: ElasticSystem, nu, r: int, n: int, branch: str = "slow") -> WaveField:
    """Progressive wave along ``nu`` polarized by the acoustic eigenvector ``xi^r``."""
    if sys.kappa == 0:
        raise ValueError("kappa = 0: use wave_adiabatic")
    report = check_hypotheses(sys, nu)
    if not (report.h1 and report.h2):
        raise ValueError(f"hypotheses fail along nu: H1={report.h1}, H2={report.h2}")
    match = report.matched(r)
    if match is None:
        raise ValueError(f"M nu is not parallel to eigenvector {r}: H3 fails")
    m_r, xi = match
    lam_r = float(report.eigenvalues[r])
    base = wave_1d(LinearTVParams(lam_r, m_r, sys.mu, sys.kappa, n), branch)
    return WaveField(
        n=n,
        rho=base.rho,
        nu=np.asarray(nu, dtype=float),
        u_amp=base.u_amp[0] * xi.astype(complex),
        theta_amp=base.theta_amp,
        A=sys.A,
        M=sys.M,
        mu=sys.mu,
        kappa=sys.kappa,
        system="tve-md",
        branch=branch,
    )


def wave_adiabatic(sys: ElasticSystem, nu, r: int, n: int, branch: str = "slow") -> WaveField:
    """Wave of the heat-nonconducting system polarized by the modified acoustic eigenvector.

    The amplitude starts at ``alpha(0) = 1`` and ``theta = i (zeta . M nu) alpha e^{...}``.
    """
    if sys.kappa != 0:
        raise ValueError("wave_adiabatic requires kappa = 0")
    nu = np.asarray(nu, dtype=float)
    _, sigmas, zetas = modified_acoustic_tensor(sys, nu)
    zeta = zetas[:, r]
    coupling = float(zeta @ (sys.M @ nu))
    amp = adiabatic_amplitude(float(sigmas[r]), sys.mu, n, coupling)
    rho = amp.rho_plus if branch == "slow" else amp.rho_minus
    if rho.imag != 0:
        raise ValueError(f"adiabatic root is complex at n={n}")
    return WaveField(
        n=n,
        rho=rho.real,
        nu=nu,
        u_amp=zeta.astype(complex),
        theta_amp=-1j * amp.b_factor,
        A=sys.A,
        M=sys.M,
        mu=sys.mu,
        kappa=0.0,
        system="adiabatic",
        branch=branch,
    )


def _sample_points(field: WaveField, n_t: int = 3, n_x: int = 5, seed: int = 7):
    rng = np.random.default_rng(seed)
    ts = np.linspace(0.1, 0.9, n_t)
    xs = rng.uniform(0.0, 2 * np.pi, size=(n_x, field.d))
    return ts, xs


def pde_residual(field: WaveField, h_t: float, h_x: float, points=None) -> float:
    """Relative centered-difference residual of the governing system on sample points.

    Derivatives are taken with second-order stencils of ``u`` and ``theta``
    only (no analytic derivatives); the result is the max residual divided by
    the largest term magnitude, separately for real and imaginary parts.
    """
    d = field.d
    ts, xs = _sample_points(field) if points is None else points
    eye = np.eye(d)

    def U(t, x):
        return field.u(t, x)

    def T(t, x):
        return field.theta(t, x)

    def dx2(f, t, x, a, b):
        ha, hb = h_x * eye[a], h_x * eye[b]
        if a == b:
            return (f(t, x + ha) - 2 * f(t, x) + f(t, x - ha)) / h_x**2
        return (
            f(t, x + ha + hb) - f(t, x + ha - hb) - f(t, x - ha + hb) + f(t, x - ha - hb)
        ) / (4 * h_x**2)

    def dx1(f, t, x, a):
        ha = h_x * eye[a]
        return (f(t, x + ha) - f(t, x - ha)) / (2 * h_x)

    def ut(t, x):
        return (U(t + h_t, x) - U(t - h_t, x)) / (2 * h_t)

    worst = 0.0
    for t in ts:
        for x in xs:
            u_tt = (U(t + h_t, x) - 2 * U(t, x) + U(t - h_t, x)) / h_t**2
            elastic = sum(
                np.einsum("kl,l->k", field.A[:, :, a, b], dx2(U, t, x, a, b))
                for a in range(d)
                for b in range(d)
            )
            thermal = sum(field.M[:, a] * dx1(T, t, x, a) for a in range(d))
            viscous = field.mu * sum(dx2(ut, t, x, a, a) for a in range(d))
            r_mech = u_tt - elastic - thermal - viscous

            theta_t = (T(t + h_t, x) - T(t - h_t, x)) / (2 * h_t)
            diffusion = field.kappa * sum(dx2(T, t, x, a, a) for a in range(d))
            work = sum(field.M[k, a] * dx1(lambda s, y: ut(s, y)[k], t, x, a) for k in range(d) for a in range(d))
            r_heat = theta_t - diffusion - work

            for part in (np.real, np.imag):
                terms = [u_tt, elastic, thermal, viscous]
                mech_scale = max(np.abs(part(q)).max() for q in terms)
                heat_scale = max(np.abs(part(np.asarray(q))).max() for q in (theta_t, diffusion, work))
                scale = max(mech_scale, heat_scale, 1e-300)
                res = max(np.abs(part(r_mech)).max(), np.abs(part(np.asarray(r_heat))).max())
                worst = max(worst, res / scale)
    return float(worst)


def persistence_metric(make_field, quantity: str, n_list, times=(0.0, 1.0), n_x: int = 64):
    """Sup-amplitude table over ``n_list`` and the log-log slope at each time.

    ``make_field(n)`` builds the wave for mode ``n``.  Returns
    ``{"n": [...], "amplitude": {t: [...]}, "slope": {t: s}}``.
    """
    n_list = list(n_list)
    table = {t: [] for t in times}
    for n in n_list:
        field = make_field(n)
        xs = np.linspace(0.0, 2 * np.pi, n_x * n, endpoint=False)
        xs = xs[:, None] * field.nu[None, :]
        for t in times:
            table[t].append(field.amplitude(quantity, t, xs))
    slopes = {
        t: float(np.polyfit(np.log(n_list), np.log(amps), 1)[0]) for t, amps in table.items()
    }
    return {"n": n_list, "amplitude": table, "slope": slopes}
