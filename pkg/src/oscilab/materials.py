"""Constitutive laws built to satisfy window identities, and stored energies.

The nonmonotone laws all use one trick: a profile is prescribed on a window
``[a, 2a]`` and *transported* to ``[b, 2b]`` so that the required identity
holds for every ``tau in [1, 2]`` by construction.  The gap between the two
windows is filled with a C1 cubic Hermite bridge and the ends are extended
linearly.  Laws are piecewise polynomials, so they serialize exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

from .piecewise import (
    PiecewisePolynomial,
    as_polynomial,
    hermite_cubic,
    in_frame,
    line,
    transported,
)

TAU_WINDOW = (1.0, 2.0)
LAW_KINDS = ("sigma", "phi", "pressure", "tau")


@dataclass(frozen=True)
class PhasePair:
    """Two phase states with disjoint scaling windows: ``0 < a`` and ``2a < b``."""

    a: float = 1.0
    b: float = 3.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 2 * self.a):
            raise ValueError(f"need 0 < a and 2a < b, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class MaterialLaw:
    """A 1-d constitutive function with its derivative and the identity it was built for."""

    kind: str
    law: PiecewisePolynomial
    pair: PhasePair | None = None
    exponent: float = 0.0
    window: tuple = TAU_WINDOW
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}")
        object.__setattr__(self, "_dlaw", self.law.deriv())

    @property
    def domain(self) -> tuple[float, float]:
        return self.law.domain

    def __call__(self, u):
        return self.law(u)

    def value(self, u):
        return self.law(u)

    def derivative(self, u):
        return self._dlaw(u)

    def identity_residual(self, n_grid: int = 101) -> float:
        """Max residual of the kind-specific identity over ``tau`` in the constraint window."""
        if self.pair is None:
            raise ValueError("law carries no phase pair")
        a, b = self.pair.a, self.pair.b
        tau = np.linspace(*self.window, n_grid)
        if self.kind == "sigma":
            res = self(tau * a) - self(tau * b)
        elif self.kind == "phi":
            res = self(tau * a) - self(tau * b) * (b / a) ** self.exponent
        elif self.kind == "pressure":
            res = self(1.0 / (a * tau)) - self(1.0 / (b * tau))
        else:
            raise ValueError("tau laws satisfy a temperature-weighted identity; see constructors.gas")
        return float(np.abs(res).max())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pair": None if self.pair is None else [self.pair.a, self.pair.b],
            "exponent": self.exponent,
            "window": list(self.window),
            "law": self.law.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "MaterialLaw":
        pair = None if data.get("pair") is None else PhasePair(*data["pair"])
        return cls(
            kind=data["kind"],
            law=PiecewisePolynomial.from_dict(data["law"]),
            pair=pair,
            exponent=float(data.get("exponent", 0.0)),
            window=tuple(data.get("window", TAU_WINDOW)),
        )

    @classmethod
    def from_json(cls, text: str) -> "MaterialLaw":
        return cls.from_dict(json.loads(text))

    @classmethod
    def polynomial(cls, kind: str, coef, domain, pair: PhasePair | None = None, exponent: float = 0.0):
        """A single-polynomial law, e.g. a monotone negative control."""
        lo, hi = domain
        return cls(kind, PiecewisePolynomial([lo, hi], [as_polynomial(coef, lo, hi)]), pair, exponent)


def _assemble(windows, pieces_on_windows, ext_left: float, ext_right: float) -> PiecewisePolynomial:
    """Join window pieces by Hermite bridges and extend linearly to the given ends."""
    (lo1, hi1), (lo2, hi2) = windows
    p1, p2 = pieces_on_windows
    d1, d2 = p1.deriv(), p2.deriv()
    bridge = hermite_cubic(hi1, lo2, p1(hi1), p2(lo2), d1(hi1), d2(lo2))
    left = line(lo1, p1(lo1), d1(lo1), ext_left, lo1)
    right = line(hi2, p2(hi2), d2(hi2), hi2, ext_right)
    breaks = [ext_left, lo1, hi1, lo2, hi2, ext_right]
    return PiecewisePolynomial(breaks, [left, p1, bridge, p2, right])


def _min_on(p: Polynomial, lo: float, hi: float, n: int = 401) -> float:
    return float(p(np.linspace(lo, hi, n)).min())


def build_sigma(pair: PhasePair, base_profile) -> MaterialLaw:
    """Stress with ``sigma(tau a) = sigma(tau b)`` for ``tau in [1, 2]``.

    ``base_profile`` (coefficients or a Polynomial in ``u``) gives sigma on
    ``[a, 2a]``; the law lives on ``[a/2, 3b]``.
    """
    a, b = pair.a, pair.b
    base = as_polynomial(base_profile, a, 2 * a)
    moved = transported(base, a / b)
    law = _assemble([(a, 2 * a), (b, 2 * b)], [base, moved], a / 2, 3 * b)
    return MaterialLaw("sigma", law, pair)


def build_phi(pair: PhasePair, exponent: float, base_profile) -> MaterialLaw:
    """Positive ``phi`` with ``phi(tau a) = phi(tau b) (b/a)^q``.

    The induced viscoplastic stress ``phi(p) q_rate^q`` then takes equal
    values at ``(tau a, a)`` and ``(tau b, b)``.
    """
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    a, b = pair.a, pair.b
    base = as_polynomial(base_profile, a, 2 * a)
    if _min_on(base, a, 2 * a) <= 0:
        raise ValueError("phi base profile must be positive on [a, 2a]")
    moved = transported(base, a / b) * (a / b) ** exponent
    law = _assemble([(a, 2 * a), (b, 2 * b)], [base, moved], a / 2, 3 * b)
    if _min_on(law.pieces[2], 2 * a, b) <= 0:
        raise ValueError("Hermite bridge for phi is not positive; adjust the base profile")
    return MaterialLaw("phi", law, pair, exponent)


def build_pressure(pair: PhasePair, base_profile) -> MaterialLaw:
    """Pressure in density with ``p(1/(a t)) = p(1/(b t))`` for ``t in [1, 2]``.

    ``base_profile`` gives p on ``[1/(2a), 1/a]``; the transported copy lives
    on ``[1/(2b), 1/b]`` and the law on ``[1/(4b), 2/a]``.
    """
    a, b = pair.a, pair.b
    hi_lo, hi_hi = 1 / (2 * a), 1 / a
    lo_lo, lo_hi = 1 / (2 * b), 1 / b
    base = as_polynomial(base_profile, hi_lo, hi_hi)
    moved = transported(base, b / a)
    law = _assemble([(lo_lo, lo_hi), (hi_lo, hi_hi)], [moved, base], 1 / (4 * b), 2 / a)
    return MaterialLaw("pressure", law, pair)


def common_stress(pair: PhasePair, sigma: MaterialLaw, mu: float = 1.0, t=1.0):
    """Total stress ``mu/t + sigma(a t)`` of the first phase and the mismatch with the second."""
    t = np.asarray(t, dtype=float)
    if np.any(t < TAU_WINDOW[0]) or np.any(t > TAU_WINDOW[1]):
        raise ValueError("t must lie in [1, 2]")
    sa = sigma(pair.a * t)
    sb = sigma(pair.b * t)
    return mu / t + sa, np.abs(sa - sb)


# --- stored energies ---------------------------------------------------------


@dataclass(frozen=True)
class LaminatePair:
    """Phase gradients ``F0 + a (x) nu`` and ``F0 + b (x) nu``."""

    F0: np.ndarray
    a_vec: np.ndarray
    b_vec: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float)
        if abs(np.linalg.norm(nu) - 1) > 1e-12:
            raise ValueError("nu must be a unit vector")
        for name in ("F0", "a_vec", "b_vec"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "nu", nu)

    @property
    def F_minus(self) -> np.ndarray:
        return self.F0 + np.outer(self.a_vec, self.nu)

    @property
    def F_plus(self) -> np.ndarray:
        return self.F0 + np.outer(self.b_vec, self.nu)

    @classmethod
    def default(cls, d: int = 2, alpha: float = 1.0, beta: float = 3.0):
        """Shear laminate ``F0 = I``, ``xi = e2``, ``nu = e1``: shear strains alpha and beta."""
        xi, nu = np.eye(d)[1], np.eye(d)[0]
        return cls(np.eye(d), alpha * xi, beta * xi, nu)


@dataclass(frozen=True)
class StoredEnergy:
    """``W(F) = h(xi . F nu) + (c/2) |F|^2`` with piecewise-polynomial ``h'``.

    ``dh`` is the derivative profile ``h'``; ``h`` is its antiderivative,
    equal to ``offset`` at the left end of the profile's domain.
    """

    dh: PiecewisePolynomial
    xi: np.ndarray
    nu: np.ndarray
    c: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))
        object.__setattr__(self, "_h", self.dh.antiderivative())
        object.__setattr__(self, "_d2h", self.dh.deriv())

    @property
    def d(self) -> int:
        return len(self.xi)

    def strain(self, F) -> np.ndarray:
        return (np.asarray(F, dtype=float) @ self.nu) @ self.xi

    def value(self, F):
        F = np.asarray(F, dtype=float)
        return self._h(self.strain(F)) + self.offset + 0.5 * self.c * np.sum(F * F, axis=(-2, -1))

    def first_derivative(self, F) -> np.ndarray:
        F = np.asarray(F, dtype=float)
        hp = np.asarray(self.dh(self.strain(F)))
        return hp[..., None, None] * np.outer(self.xi, self.nu) + self.c * F

    def second_derivative(self, F, xi, nu) -> float:
        """Rank-one form ``sum W_{i a, j b} nu_a nu_b xi_i xi_j``."""
        xi = np.asarray(xi, dtype=float)
        nu = np.asarray(nu, dtype=float)
        hpp = self._d2h(self.strain(F))
        return float(hpp * (self.xi @ xi) ** 2 * (self.nu @ nu) ** 2 + self.c * (xi @ xi) * (nu @ nu))

    def acoustic_matrix(self, F, nu) -> np.ndarray:
        """``sum_ab W_{i a, j b} nu_a nu_b`` as a d x d matrix."""
        nu = np.asarray(nu, dtype=float)
        hpp = self._d2h(self.strain(F))
        return hpp * (self.nu @ nu) ** 2 * np.outer(self.xi, self.xi) + self.c * (nu @ nu) * np.eye(self.d)

    def segment_breaks(self, F_start, F_step) -> np.ndarray:
        """Values of ``s in (0, 1)`` where ``F_start + s F_step`` crosses a knot of ``h'``."""
        e0, e1 = self.strain(F_start), self.strain(np.asarray(F_start) + np.asarray(F_step))
        if e1 == e0:
            return np.array([])
        knots = self.dh.knots_between(e0, e1)
        return np.sort((knots - e0) / (e1 - e0))

    @classmethod
    def quadratic(cls, c: float, d: int = 2) -> "StoredEnergy":
        zero = PiecewisePolynomial([-1e6, 1e6], [Polynomial([0.0])])
        return cls(zero, np.eye(d)[0], np.eye(d)[0], c)

    @classmethod
    def from_h(cls, h_coef, xi, nu, c: float = 0.0, domain=(-10.0, 10.0)) -> "StoredEnergy":
        """Energy from a global polynomial ``h`` (e.g. the double well ``(e^2 - 1)^2``)."""
        h = Polynomial(h_coef)
        dh = as_polynomial(h.deriv(), *domain)
        return cls(PiecewisePolynomial(list(domain), [dh]), xi, nu, c, float(h(domain[0])))


def shear_strains(pair: LaminatePair, xi) -> tuple[float, float, float, float]:
    """``(e_minus, e_plus, alpha, beta)`` for a laminate whose amplitudes are parallel to ``xi``."""
    xi = np.asarray(xi, dtype=float)
    alpha, beta = float(xi @ pair.a_vec), float(xi @ pair.b_vec)
    if not (np.allclose(pair.a_vec, alpha * xi, atol=1e-14) and np.allclose(pair.b_vec, beta * xi, atol=1e-14)):
        raise ValueError("amplitudes must be parallel to the shear direction xi")
    e0 = float(xi @ pair.F0 @ pair.nu)
    return e0 + alpha, e0 + beta, alpha, beta


def build_shear_energy(pair: LaminatePair, base_profile=(0.0, 1.0), c: float = 0.0, xi=None) -> StoredEnergy:
    """Shear-reducible energy satisfying the laminate traction condition on ``t in [1, 2]``.

    ``h'`` is ``base_profile`` on ``[e-, 2e-]`` and on ``[e+, 2e+]``

        h'(u) = h'(u e-/e+) - (beta - alpha)(1 + c u / e+),

    which cancels the viscous jump ``(b - a) (x) nu`` in the normal traction.
    """
    if xi is None:
        xi = pair.b_vec - pair.a_vec
        xi = xi / np.linalg.norm(xi)
    xi = np.asarray(xi, dtype=float)
    e_m, e_p, alpha, beta = shear_strains(pair, xi)
    if not (e_m > 0 and e_p > 2 * e_m):
        raise ValueError(f"need 0 < e- and 2 e- < e+, got e-={e_m}, e+={e_p}")
    base = as_polynomial(base_profile, e_m, 2 * e_m)
    moved = transported(base, e_m / e_p)
    correction = in_frame(Polynomial([beta - alpha, (beta - alpha) * c / e_p]), moved)
    moved = moved - correction
    dh = _assemble([(e_m, 2 * e_m), (e_p, 2 * e_p)], [base, moved], e_m / 2, 3 * e_p)
    return StoredEnergy(dh, xi, pair.nu, c)


def condition_C_residual(W: StoredEnergy, pair: LaminatePair, t_grid) -> float:
    """Max over ``t`` of ``|(DW(t F+) - DW(t F-) + (b - a) (x) nu) nu|``."""
    jump = np.outer(pair.b_vec - pair.a_vec, pair.nu)
    worst = 0.0
    for t in np.atleast_1d(np.asarray(t_grid, dtype=float)):
        T = W.first_derivative(t * pair.F_plus) - W.first_derivative(t * pair.F_minus) + jump
        worst = max(worst, float(np.linalg.norm(T @ pair.nu)))
    return worst


def roc_quadratic_form(W: StoredEnergy, F, xi, nu) -> float:
    return W.second_derivative(F, xi, nu)


@dataclass
class LemmaReport:
    t: float
    condition_residual: float
    M_int: np.ndarray
    identity_residual: float
    rayleigh_quotient: float

    @property
    def roc_violated(self) -> bool:
        return self.rayleigh_quotient < 0


def lemma_contradiction_check(W: StoredEnergy, pair: LaminatePair, t: float, gauss_points: int = 16) -> LemmaReport:
    """Average the acoustic form along the segment ``t F- -> t F+`` and certify it is negative.

    Gauss-Legendre quadrature is applied on each sub-segment between knots
    of ``h'``.  Refuses (``ValueError``) unless the traction condition holds at ``t``.
    """
    res = condition_C_residual(W, pair, [t])
    if res >= 1e-8:
        raise ValueError(f"traction condition fails at t={t} (residual {res:.3e}); nothing to certify")
    diff = pair.b_vec - pair.a_vec
    start = t * pair.F_minus
    step = t * np.outer(diff, pair.nu)
    cuts = np.concatenate([[0.0], W.segment_breaks(start, step), [1.0]])
    nodes, weights = leggauss(gauss_points)
    M_int = np.zeros((W.d, W.d))
    for s0, s1 in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (s1 - s0)
        for x, w in zip(nodes, weights):
            s = s0 + half * (x + 1)
            M_int += w * half * W.acoustic_matrix(start + s * step, pair.nu)
    identity = float(np.linalg.norm(t * M_int @ diff + diff))
    rq = float(diff @ M_int @ diff / (diff @ diff))
    return LemmaReport(t, res, M_int, identity, rq)
