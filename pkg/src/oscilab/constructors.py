"""Exact oscillating weak solutions assembled from uniform motions.

Every solution is an immutable evaluator on the time window ``[1, 2]``.  A
solution exposes the conservation-law form of its system through
``conserved(t, X)`` and ``flux(t, X)`` so that :mod:`oscilab.weakform` can
certify it without knowing which system it belongs to.  Interface loci are
closed-form; a point lying exactly on an interface gets the right-limit phase.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace

import numpy as np

from .gas import (
    DenseTrajectory,
    GasConstitutive,
    GasInterface,
    UniformExtension,
    gas_interface_construct,
    gas_uniform_extension,
    rk4_dense,
)
from .materials import (
    LaminatePair,
    MaterialLaw,
    PhasePair,
    StoredEnergy,
    common_stress,
    condition_C_residual,
)

TIME_WINDOW = (1.0, 2.0)
T_GRID = np.linspace(*TIME_WINDOW, 33)
LAGRANGIAN_SYSTEMS = ("bar", "viscoplastic", "gas")


@dataclass(frozen=True)
class Interface:
    """Interface ``kind`` (``"cell"`` at ``k``, ``"fraction"`` at ``k + theta``) of cell ``k``."""

    k: int
    kind: str
    position: float  # at t = 1; Eulerian loci move linearly in t
    speed: float = 0.0

    def at(self, t):
        return self.position + self.speed * (np.asarray(t, dtype=float) - 1.0)


@dataclass(frozen=True)
class YoungMeasure:
    """``sum_i weights[i] delta_{rates[i] t}``."""

    weights: tuple
    rates: tuple

    def __post_init__(self):
        if abs(sum(self.weights) - 1.0) > 1e-14 or min(self.weights) < 0:
            raise ValueError("weights must be nonnegative and sum to 1")

    def supports(self, t) -> list:
        return [r * t for r in self.rates]

    def mean(self, t):
        return sum(w * r * t for w, r in zip(self.weights, self.rates))

    def pushforward(self, f, t):
        """``<nu_t, f>`` for a function of the state."""
        return sum(w * f(r * t) for w, r in zip(self.weights, self.rates))

    def to_dict(self) -> dict:
        return {"atoms": [{"weight": w, "support": f"{r}*t"} for w, r in zip(self.weights, self.rates)]}


# --- 1-d laminates -----------------------------------------------------------


@dataclass(frozen=True)
class PiecewisePeriodicSolution:
    """Laminated 1-d solution, Lagrangian (bar, viscoplastic, gas) or Eulerian (euler).

    Phase ``0`` has strain rate ``a`` (or ``A``) and occupies the fraction
    ``phase_fraction`` of each cell.  ``mode`` is the rescaling index ``n``.
    """

    system: str
    a: float
    b: float
    phase_fraction: float
    law: MaterialLaw | None = None
    mu: float = 1.0
    mode: int = 1
    exponent: float = 0.0
    gas: GasConstitutive | None = None
    temperatures: tuple | None = None
    time_window: tuple = TIME_WINDOW

    def __post_init__(self):
        if self.system not in LAGRANGIAN_SYSTEMS + ("euler",):
            raise ValueError(f"unknown system {self.system!r}")
        if not 0 < self.phase_fraction <= 1:
            raise ValueError("phase fraction must lie in (0, 1]")
        if self.mode < 1:
            raise ValueError("mode must be >= 1")
        if self.system == "gas" and (self.gas is None or self.temperatures is None):
            raise ValueError("gas solutions need a gas law and phase temperatures")

    # basic data
    @property
    def c(self) -> float:
        """Mean strain rate ``theta a + (1 - theta) b`` (``v_0`` in the Eulerian picture)."""
        return self.phase_fraction * self.a + (1 - self.phase_fraction) * self.b

    @property
    def rates(self) -> np.ndarray:
        return np.array([self.a, self.b])

    @property
    def period(self) -> float:
        """Cell length at ``t = 1`` (Lagrangian ``1/n``; Eulerian ``c/n``)."""
        return (self.c if self.system == "euler" else 1.0) / self.mode

    @property
    def dim(self) -> int:
        return 1

    @property
    def normal(self) -> np.ndarray:
        return np.array([1.0])

    @property
    def n_eq(self) -> int:
        return 3 if self.system == "gas" else 2

    @property
    def equations(self) -> tuple:
        if self.system == "euler":
            return ("mass", "momentum")
        return ("kinematic", "momentum", "energy")[: self.n_eq]

    def _cell(self, t, x):
        """Cell index ``k`` and the position ``f`` inside the reference cell ``[0, 1)``."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        z = self.mode * x / (t * self.c) if self.system == "euler" else self.mode * x
        k = np.floor(z)
        f = z - k
        if self.system == "euler":
            # the fraction interface sits at a theta / c of the Eulerian cell
            f = f * self.c
            split = self.a * self.phase_fraction
        else:
            split = self.phase_fraction
        return k, f, split

    def phase(self, t, x) -> np.ndarray:
        _, f, split = self._cell(t, x)
        return (f >= split).astype(int)

    # Lagrangian fields
    def _lagrangian(self, t, k, f, phase):
        th, a, b, n = self.phase_fraction, self.a, self.b, self.mode
        rate = np.where(phase == 0, a, b)
        V = np.where(phase == 0, k * self.c + f * a, k * self.c + th * a + (f - th) * b)
        Y = t * V
        out = {"u": rate * t, "v": V / n, "v_x": rate + 0.0 * t, "y": Y / n}
        if self.system == "gas":
            thA, thB = self.temperatures
            out["theta"] = np.where(phase == 0, thA(t), thB(t))
        out["S"] = self._total_stress(t, out)
        return out

    def _total_stress(self, t, fld):
        u, vx = fld["u"], fld["v_x"]
        if self.system == "bar":
            return self.law(u) + self.mu * vx / u
        if self.system == "viscoplastic":
            return self.law(u) * vx**self.exponent
        return self.gas.sigma(u, fld["theta"]) + self.mu * vx / u

    def _eulerian(self, t, y, phase):
        rate = np.where(phase == 0, self.a, self.b)
        rho = 1.0 / (rate * t)
        u = y / t + 0.0 * rho
        out = {"rho": rho, "u": u, "u_y": 1.0 / t + 0.0 * rho}
        out["p"] = self.law(rho)
        return out

    def fields(self, t, x, phase=None) -> dict:
        """Field values at ``(t, x)``; ``phase`` forces a phase (used for one-sided limits)."""
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        k, f, split = self._cell(t, x)
        ph = (f >= split).astype(int) if phase is None else np.broadcast_to(phase, t.shape)
        if self.system == "euler":
            return self._eulerian(t, x, ph)
        return self._lagrangian(t, k, f, ph)

    def u(self, t, x):
        return self.fields(t, x)["u"]

    def v(self, t, x):
        return self.fields(t, x)["v"]

    def temperature(self, t, x):
        if self.system != "gas":
            raise ValueError("only gas solutions carry a temperature")
        return self.fields(t, x)["theta"]

    # conservation-law form
    def balance(self, t, x) -> tuple[np.ndarray, np.ndarray]:
        """Conserved densities ``(..., n_eq)`` and fluxes ``(..., n_eq, 1)`` with ``U_t + div(flux) = 0``."""
        F = self.fields(t, x)
        if self.system == "euler":
            U = [F["rho"], F["rho"] * F["u"]]
            flux = [F["rho"] * F["u"], F["rho"] * F["u"] ** 2 + F["p"] - self.mu * F["u_y"]]
        else:
            U = [F["u"], F["v"]]
            flux = [-F["v"], -F["S"]]
            if self.system == "gas":
                U.append(0.5 * F["v"] ** 2 + self.gas.energy(F["u"], F["theta"]))
                flux.append(-F["S"] * F["v"])
        return np.stack(U, axis=-1), np.stack(flux, axis=-1)[..., None]

    def conserved(self, t, x) -> np.ndarray:
        return self.balance(t, x)[0]

    def flux(self, t, x) -> np.ndarray:
        return self.balance(t, x)[1]

    # interfaces
    def interfaces(self, lo: float = -1.0, hi: float = 1.0) -> list[Interface]:
        """Interfaces whose position at ``t = 1`` lies in ``(lo, hi)``."""
        n, th = self.mode, self.phase_fraction
        out = []
        if self.system == "euler":
            cell, frac = self.c / n, self.a * th / n
        else:
            cell, frac = 1.0 / n, th / n
        eulerian = self.system == "euler"
        for k in range(int(np.floor(lo / cell)) - 1, int(np.ceil(hi / cell)) + 1):
            for kind, pos in (("cell", k * cell), ("fraction", k * cell + frac)):
                if kind == "fraction" and th == 1.0:
                    continue
                if lo < pos < hi:
                    out.append(Interface(k, kind, pos, pos if eulerian else 0.0))
        return out

    def breaks(self, t: float, lo: float, hi: float) -> np.ndarray:
        """Interface positions at time ``t`` strictly inside ``(lo, hi)``."""
        n, th = self.mode, self.phase_fraction
        scale = t * self.c / n if self.system == "euler" else 1.0 / n
        split = self.a * th / self.c if self.system == "euler" else th
        k = np.arange(np.floor(lo / scale) - 1, np.ceil(hi / scale) + 2)
        pts = np.concatenate([k * scale, (k + split) * scale]) if th < 1 else k * scale
        return np.sort(pts[(pts > lo) & (pts < hi)])

    def one_sided(self, iface: Interface, t) -> tuple[dict, dict]:
        """Left and right limits at an interface, from the phase formulas."""
        t = np.asarray(t, dtype=float)
        x = iface.at(t)
        if self.system == "euler":
            left_phase, right_phase = (1, 0) if iface.kind == "cell" else (0, 1)
            return self._eulerian(t, x, left_phase + 0 * t.astype(int)), self._eulerian(t, x, right_phase + 0 * t.astype(int))
        th = self.phase_fraction
        k = float(iface.k)
        ones = np.ones_like(t)
        if iface.kind == "cell":
            left = self._lagrangian(t, (k - 1) * ones, ones, ones.astype(int))
            right = self._lagrangian(t, k * ones, 0 * ones, 0 * ones.astype(int))
        else:
            left = self._lagrangian(t, k * ones, th * ones, 0 * ones.astype(int))
            right = self._lagrangian(t, k * ones, th * ones, ones.astype(int))
        return left, right

    def rh_residuals(self, t_grid=T_GRID, lo: float = -1.0, hi: float = 1.0) -> dict:
        """Max over interfaces in ``(lo, hi)`` and ``t_grid`` of each jump-condition residual."""
        t = np.asarray(t_grid, dtype=float)
        worst: dict[str, float] = {}
        for iface in self.interfaces(lo, hi):
            L, R = self.one_sided(iface, t)
            if self.system == "euler":
                s = iface.speed
                res = {
                    "mass": (R["rho"] * (R["u"] - s)) - (L["rho"] * (L["u"] - s)),
                    "momentum": (R["rho"] * R["u"] * (R["u"] - s) - L["rho"] * L["u"] * (L["u"] - s))
                    - ((-R["p"] + self.mu * R["u_y"]) - (-L["p"] + self.mu * L["u_y"])),
                    "velocity": R["u"] - L["u"],
                }
            else:
                res = {"velocity": R["v"] - L["v"], "stress": R["S"] - L["S"]}
                if self.system == "gas":
                    res["energy_flux"] = R["S"] * R["v"] - L["S"] * L["v"]
            for name, r in res.items():
                worst[name] = max(worst.get(name, 0.0), float(np.abs(r).max()))
        return worst

    # limits
    def young_measure(self) -> YoungMeasure:
        """Atoms at the phase strains ``a t`` and ``b t`` (Eulerian densities are their reciprocals)."""
        th = self.phase_fraction
        return YoungMeasure((th, 1 - th), (self.a, self.b))

    def weak_limit(self, quantity: str, t, x):
        """Weak-* limit as ``n -> infinity`` of ``quantity`` (depends on ``t`` and ``x`` only)."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        th = self.phase_fraction
        if self.system == "euler":
            # phase 0 fills the fraction a theta / c of every Eulerian cell, so rho_n -> 1 / (c t)
            if quantity == "rho":
                return 1.0 / (self.c * t) + 0 * x
            if quantity == "rho_lagrangian":
                # limit of 1 / u_n in mass coordinates
                return th / (t * self.a) + (1 - th) / (t * self.b) + 0 * x
            if quantity == "u":
                return x / t
        else:
            if quantity == "u":
                return self.c * t + 0 * x
            if quantity == "v":
                return self.c * x + 0 * t
            if quantity == "v_x":
                return self.c + 0 * t + 0 * x
            if quantity == "theta" and self.system == "gas":
                thA, thB = self.temperatures
                return th * thA(t) + (1 - th) * thB(t) + 0 * x
        raise ValueError(f"no weak limit for {quantity!r} in system {self.system!r}")

    def sample_rows(self, t_values, x_values) -> list[tuple]:
        """Rows ``(t, x_or_y, phase_id, u_or_rho, v_or_u, theta)`` for CSV export."""
        rows = []
        for t in t_values:
            x = np.asarray(x_values, dtype=float)
            F = self.fields(t, x)
            ph = self.phase(t, x)
            if self.system == "euler":
                first, second = F["rho"], F["u"]
            else:
                first, second = F["u"], F["v"]
            theta = F.get("theta", np.full(x.shape, np.nan))
            for i in range(len(x)):
                rows.append((float(t), float(x[i]), int(ph[i]), float(first[i]), float(second[i]), float(theta[i])))
        return rows

    def to_csv(self, t_values, x_values) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.system == "euler":
            writer.writerow(["t", "y", "phase_id", "rho", "u", "theta"])
        else:
            writer.writerow(["t", "x", "phase_id", "u", "v", "theta"])
        for row in self.sample_rows(t_values, x_values):
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def descriptor(self) -> dict:
        return {
            "system": self.system,
            "a": self.a,
            "b": self.b,
            "phase_fraction": self.phase_fraction,
            "mode": self.mode,
            "mu": self.mu,
            "exponent": self.exponent,
            "mean_rate": self.c,
            "period": self.period,
            "time_window": list(self.time_window),
        }

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)


def rescale(sol, n: int):
    """``y_n(t, x) = Y(t, n x) / n``: the same laminate with ``n`` times as many cells."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    return replace(sol, mode=sol.mode * int(n))


def bar_solution(pair: PhasePair, fraction: float, sigma: MaterialLaw, mu: float = 1.0, tol: float = 1e-10) -> PiecewisePeriodicSolution:
    """Laminate of the two uniform extensions ``u = a t`` and ``u = b t`` of the viscoelastic bar."""
    if sigma.kind != "sigma":
        raise ValueError("bar solutions need a sigma law")
    _, mismatch = common_stress(pair, sigma, mu, T_GRID)
    if mismatch.max() >= tol:
        raise ValueError(f"stress identity violated: max mismatch {mismatch.max():.3e}")
    return PiecewisePeriodicSolution("bar", pair.a, pair.b, fraction, sigma, mu)


def viscoplastic_solution(pair: PhasePair, fraction: float, phi: MaterialLaw, exponent: float, tol: float = 1e-10) -> PiecewisePeriodicSolution:
    """Laminate for ``v_t = (phi(u) v_x^q)_x``; needs ``phi(t a) a^q = phi(t b) b^q``."""
    residual = float(np.abs(phi(pair.a * T_GRID) * pair.a**exponent - phi(pair.b * T_GRID) * pair.b**exponent).max())
    if residual >= tol:
        raise ValueError(f"viscoplastic interface identity violated: residual {residual:.3e}")
    return PiecewisePeriodicSolution("viscoplastic", pair.a, pair.b, fraction, phi, mu=0.0, exponent=exponent)


def gas_oscillatory(interface: GasInterface, fraction: float, tol: float = 1e-8) -> PiecewisePeriodicSolution:
    """Laminate of two gas uniform extensions whose total stresses agree."""
    res = interface.identity_residual(T_GRID)
    if res >= tol:
        raise ValueError(f"gas interface identity violated: residual {res:.3e}")
    pair = interface.pair
    return PiecewisePeriodicSolution(
        "gas",
        pair.a,
        pair.b,
        fraction,
        interface.gas.tau,
        interface.mu,
        gas=interface.gas,
        temperatures=(interface.theta_A, interface.theta_B),
    )


def ns_oscillatory(pair: PhasePair, fraction: float, pressure: MaterialLaw, mu: float = 1.0, n: int = 1, tol: float = 1e-10) -> PiecewisePeriodicSolution:
    """Eulerian laminate ``u = y / t`` with density ``1/(t a)``, ``1/(t b)`` on moving strips."""
    if pressure.kind != "pressure":
        raise ValueError("Navier-Stokes solutions need a pressure law")
    t = T_GRID
    residual = float(np.abs(pressure(1 / (pair.a * t)) - pressure(1 / (pair.b * t))).max())
    if residual >= tol:
        raise ValueError(f"pressure identity violated: residual {residual:.3e}")
    return PiecewisePeriodicSolution("euler", pair.a, pair.b, fraction, pressure, mu, mode=n)


def weak_limits(pair: PhasePair, fraction: float, sigma: MaterialLaw | None = None) -> dict:
    """Weak-* limits of the rescaled bar sequence and the Young measure."""
    th = fraction
    c = th * pair.a + (1 - th) * pair.b
    out = {
        "u": lambda t: c * np.asarray(t),
        "v": lambda x: c * np.asarray(x),
        "v_x": c,
        "young_measure": YoungMeasure((th, 1 - th), (pair.a, pair.b)),
    }
    if sigma is not None:
        out["sigma_of_u"] = lambda t: th * sigma(pair.a * np.asarray(t)) + (1 - th) * sigma(pair.b * np.asarray(t))
        out["sigma_of_limit"] = lambda t: sigma(c * np.asarray(t))
    return out


@dataclass(frozen=True)
class EulerianFields:
    """Eulerian fields obtained from a Lagrangian laminate by inverting ``x -> y(t, x)``."""

    source: PiecewisePeriodicSolution

    def _invert(self, t: float, y):
        sol = self.source
        y = np.asarray(y, dtype=float)
        span = np.abs(y).max() / (t * min(sol.a, sol.b)) + 2.0 / sol.mode
        xb = np.concatenate([[-span], sol.breaks(t, -span, span), [span]])
        # y(t, .) is continuous, increasing and affine between breaks, so linear interpolation inverts it exactly
        yb = sol.fields(t, xb)["y"]
        return np.interp(y, yb, xb)

    def lagrangian_point(self, t: float, y) -> np.ndarray:
        return self._invert(t, y)

    def rho(self, t: float, y):
        x = self._invert(t, y)
        return 1.0 / self.source.fields(t, x)["u"]

    def velocity(self, t: float, y):
        x = self._invert(t, y)
        return self.source.fields(t, x)["v"]


def lagrangian_to_eulerian(sol: PiecewisePeriodicSolution) -> EulerianFields:
    if sol.system not in ("bar", "viscoplastic"):
        raise ValueError("the transform applies to bar-type solutions")
    if min(sol.a, sol.b) * sol.time_window[0] <= 0:
        raise ValueError("strain must stay positive")
    return EulerianFields(sol)


# --- multi-d viscoelasticity ---------------------------------------------------


@dataclass(frozen=True)
class UniformShearMotion:
    """``y = (t F0 + F1) x``; ``v = F0 x``: a solution for every stored energy."""

    F0: np.ndarray
    F1: np.ndarray
    W: StoredEnergy | None = None

    def y(self, t, X):
        return np.einsum("...ia,...a->...i", t * np.asarray(self.F0) + np.asarray(self.F1), np.asarray(X))

    def v(self, t, X):
        return np.asarray(X) @ np.asarray(self.F0).T + 0 * np.asarray(t)[..., None]

    def F(self, t):
        return np.asarray(t)[..., None, None] * self.F0 + self.F1


@dataclass(frozen=True)
class TwinningSolution:
    """Laminate along ``nu`` of the motions ``t (F0 + a (x) nu) x`` and ``t (F0 + b (x) nu) x``.

    ``static=True`` gives the steady twin ``F = F- + H(x.nu) a (x) nu`` with
    ``v = 0`` and a single interface through the origin.
    """

    F0: np.ndarray
    a_vec: np.ndarray
    b_vec: np.ndarray
    nu: np.ndarray
    W: StoredEnergy
    phase_fraction: float = 0.5
    mode: int = 1
    static: bool = False
    system: str = "twinning"
    time_window: tuple = TIME_WINDOW

    @property
    def dim(self) -> int:
        return len(self.nu)

    @property
    def normal(self) -> np.ndarray:
        return np.asarray(self.nu, dtype=float)

    @property
    def n_eq(self) -> int:
        return self.dim * self.dim + self.dim

    @property
    def equations(self) -> tuple:
        d = self.dim
        return tuple(f"F{i}{j}" for i in range(d) for j in range(d)) + tuple(f"v{i}" for i in range(d))

    @property
    def c_vec(self) -> np.ndarray:
        th = self.phase_fraction
        return th * self.a_vec + (1 - th) * self.b_vec

    def _s(self, X):
        return np.asarray(X, dtype=float) @ self.normal

    def phase(self, t, X) -> np.ndarray:
        s = self._s(X)
        if self.static:
            return (s >= 0).astype(int)
        z = self.mode * s
        return (z - np.floor(z) >= self.phase_fraction).astype(int)

    def fields(self, t, X, phase=None) -> dict:
        t = np.asarray(t, dtype=float)
        X = np.asarray(X, dtype=float)
        ph = self.phase(t, X) if phase is None else np.broadcast_to(phase, X.shape[:-1])
        ph = ph[..., None].astype(float)
        a_vec, b_vec = np.asarray(self.a_vec, dtype=float), np.asarray(self.b_vec, dtype=float)
        amp = a_vec + ph * (b_vec - a_vec)
        grad = np.asarray(self.F0) + amp[..., :, None] * self.normal
        if self.static:
            F = grad + 0 * t[..., None, None]
            v = np.zeros(X.shape)
            gv = np.zeros(F.shape)
        else:
            z = self.mode * self._s(X)
            k = np.floor(z)[..., None]
            f = (z[..., None] - k)
            th = self.phase_fraction
            # phase 0: k c + f a;  phase 1: k c + th a + (f - th) b
            G = k * self.c_vec + (1 - ph) * f * a_vec + ph * (th * a_vec + (f - th) * b_vec)
            v = X @ np.asarray(self.F0).T + G / self.mode
            F = t[..., None, None] * grad
            gv = grad
        T = self.W.first_derivative(F) + gv
        return {"F": F, "v": v, "grad_v": gv, "T": T}

    def balance(self, t, X) -> tuple[np.ndarray, np.ndarray]:
        """Conserved densities and fluxes: ``F_{i a}`` has flux ``-v_i delta_{a b}``, ``v_i`` has ``-T_{i b}``."""
        fl = self.fields(t, X)
        d = self.dim
        v, T, F = fl["v"], fl["T"], fl["F"]
        U = np.concatenate([F.reshape(F.shape[:-2] + (d * d,)), v], axis=-1)
        kin = -(v[..., :, None, None] * np.eye(d)).reshape(v.shape[:-1] + (d * d, d))
        return U, np.concatenate([kin, -T], axis=-2)

    def conserved(self, t, X) -> np.ndarray:
        return self.balance(t, X)[0]

    def flux(self, t, X) -> np.ndarray:
        return self.balance(t, X)[1]

    def breaks(self, t: float, lo: float, hi: float) -> np.ndarray:
        """Interface values of ``s = x . nu`` strictly inside ``(lo, hi)``."""
        if self.static:
            return np.array([0.0]) if lo < 0 < hi else np.array([])
        n, th = self.mode, self.phase_fraction
        k = np.arange(np.floor(lo * n) - 1, np.ceil(hi * n) + 2)
        pts = np.concatenate([k / n, (k + th) / n]) if th < 1 else k / n
        return np.sort(pts[(pts > lo) & (pts < hi)])

    def rh_residuals(self, t_grid=T_GRID) -> dict:
        """Velocity continuity and normal-traction balance on every interface type."""
        t = np.asarray(t_grid, dtype=float)
        nu = self.normal
        kinds = [0.0] if self.static else [0.0, self.phase_fraction / self.mode]
        worst = {"velocity": 0.0, "traction": 0.0, "gradient_compatibility": 0.0}
        eps_dir = np.linalg.svd(nu[None, :])[2][1:] if self.dim > 1 else np.zeros((0, 1))
        for s in kinds:
            # a point on the interface away from the origin, with the tangential part generic
            X = s * nu + (eps_dir.sum(axis=0) * 0.37 if len(eps_dir) else 0.0)
            X = np.broadcast_to(X, t.shape + (self.dim,))
            if self.static:
                left_phase, right_phase = 0, 1
            else:
                left_phase, right_phase = (1, 0) if s == 0.0 else (0, 1)
            L = self._one_sided(t, X, left_phase, s, side=-1)
            R = self._one_sided(t, X, right_phase, s, side=+1)
            worst["velocity"] = max(worst["velocity"], float(np.abs(R["v"] - L["v"]).max()))
            tr = np.einsum("...ib,b->...i", R["T"] - L["T"], nu)
            worst["traction"] = max(worst["traction"], float(np.abs(tr).max()))
            # [F] must be rank one along nu: the tangential part of the jump vanishes
            jump = R["F"] - L["F"]
            tang = jump - np.einsum("...ib,b->...i", jump, nu)[..., None] * nu
            worst["gradient_compatibility"] = max(worst["gradient_compatibility"], float(np.abs(tang).max()))
        return worst

    def _one_sided(self, t, X, phase, s, side):
        if self.static:
            return self.fields(t, X, phase=np.full(t.shape, phase))
        # cell index of the neighbouring cell: the left side of a cell interface belongs to cell k-1
        fl = self.fields(t, X, phase=np.full(t.shape, phase))
        if s == 0.0 and side < 0:
            th = self.phase_fraction
            # evaluate the phase-1 formula at the right end of cell -1: G = -c + th a + (1 - th) b = 0
            G = -self.c_vec + th * self.a_vec + (1 - th) * self.b_vec
            fl["v"] = X @ np.asarray(self.F0).T + G / self.mode
        return fl

    def descriptor(self) -> dict:
        return {
            "system": "twinning",
            "static": self.static,
            "F0": np.asarray(self.F0).tolist(),
            "a_vec": np.asarray(self.a_vec).tolist(),
            "b_vec": np.asarray(self.b_vec).tolist(),
            "nu": self.normal.tolist(),
            "phase_fraction": self.phase_fraction,
            "mode": self.mode,
        }


def uniform_shear_motion(F0, F1, W: StoredEnergy | None = None) -> UniformShearMotion:
    return UniformShearMotion(np.asarray(F0, dtype=float), np.asarray(F1, dtype=float), W)


def twinning_steady(F_minus, a_vec, nu, W: StoredEnergy, tol: float = 1e-8) -> TwinningSolution:
    """Static twin: ``F- | F- + a (x) nu`` across ``x . nu = 0``, needing equal normal tractions."""
    F_minus = np.asarray(F_minus, dtype=float)
    a_vec = np.asarray(a_vec, dtype=float)
    nu = np.asarray(nu, dtype=float)
    F_plus = F_minus + np.outer(a_vec, nu)
    jump = (W.first_derivative(F_plus) - W.first_derivative(F_minus)) @ nu
    if np.linalg.norm(jump) >= tol:
        raise ValueError(f"normal traction jump {np.linalg.norm(jump):.3e} is not zero")
    return TwinningSolution(F_minus, np.zeros_like(a_vec), a_vec, nu, W, static=True)


def twinning_dynamic(pair: LaminatePair, W: StoredEnergy, fraction: float = 0.5, tol: float = 1e-8) -> TwinningSolution:
    """Interlaced dynamic twins; requires the traction condition on ``t in [1, 2]``."""
    res = condition_C_residual(W, pair, T_GRID)
    if res >= tol:
        raise ValueError(f"traction condition fails: residual {res:.3e}")
    return TwinningSolution(pair.F0, pair.a_vec, pair.b_vec, pair.nu, W, phase_fraction=fraction)


__all__ = [
    "DenseTrajectory",
    "EulerianFields",
    "GasConstitutive",
    "GasInterface",
    "Interface",
    "PiecewisePeriodicSolution",
    "TwinningSolution",
    "UniformExtension",
    "UniformShearMotion",
    "YoungMeasure",
    "bar_solution",
    "gas_interface_construct",
    "gas_oscillatory",
    "gas_uniform_extension",
    "lagrangian_to_eulerian",
    "ns_oscillatory",
    "rescale",
    "rk4_dense",
    "twinning_dynamic",
    "twinning_steady",
    "uniform_shear_motion",
    "viscoplastic_solution",
    "weak_limits",
]
