"""Piecewise polynomials with exact window transport and JSON round-tripping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial


def as_polynomial(profile, lo: float, hi: float) -> Polynomial:
    """Coerce a coefficient sequence or Polynomial to a Polynomial scaled to ``[lo, hi]``."""
    if not isinstance(profile, Polynomial):
        profile = Polynomial(np.atleast_1d(np.asarray(profile, dtype=float)))
    return profile.convert(domain=[lo, hi], window=[0.0, 1.0])


def transported(p: Polynomial, ratio: float) -> Polynomial:
    """``q(u) = p(u * ratio)``, obtained exactly by rescaling the domain."""
    lo, hi = p.domain
    return Polynomial(p.coef.copy(), domain=[lo / ratio, hi / ratio], window=p.window)


def in_frame(q: Polynomial, like: Polynomial) -> Polynomial:
    return q.convert(domain=like.domain, window=like.window)


def hermite_cubic(x0: float, x1: float, y0: float, y1: float, d0: float, d1: float) -> Polynomial:
    """C1 cubic on ``[x0, x1]`` matching values and slopes at both ends."""
    h = x1 - x0
    m0, m1 = d0 * h, d1 * h
    # local variable s in [0, 1]
    c = [y0, m0, 3 * (y1 - y0) - 2 * m0 - m1, 2 * (y0 - y1) + m0 + m1]
    return Polynomial(c, domain=[x0, x1], window=[0.0, 1.0])


def line(x0: float, y0: float, slope: float, lo: float, hi: float) -> Polynomial:
    return Polynomial([y0 - slope * x0, slope]).convert(domain=[lo, hi], window=[0.0, 1.0])


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Polynomials on consecutive intervals ``[breaks[i], breaks[i+1]]``.

    A point exactly on a break is evaluated with the piece to its right (the
    last piece owns the right end of the domain).
    """

    breaks: np.ndarray
    pieces: tuple

    def __post_init__(self):
        breaks = np.asarray(self.breaks, dtype=float)
        if len(breaks) != len(self.pieces) + 1 or np.any(np.diff(breaks) <= 0):
            raise ValueError("breaks must be increasing with one more entry than pieces")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "pieces", tuple(self.pieces))
        # power-basis coefficients in the local variable u - breaks[i], for vectorized Horner
        local = [
            p.convert(domain=[breaks[i], breaks[i + 1]], window=[0.0, breaks[i + 1] - breaks[i]]).coef
            for i, p in enumerate(self.pieces)
        ]
        width = max(len(c) for c in local)
        table = np.zeros((len(local), width))
        for i, c in enumerate(local):
            table[i, : len(c)] = c
        object.__setattr__(self, "_table", table)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breaks[0]), float(self.breaks[-1])

    def piece_index(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        lo, hi = self.domain
        span = hi - lo
        # min/max propagate NaN, so one pair of reductions covers all three failures
        u_min, u_max = (np.min(u), np.max(u)) if u.size else (lo, hi)
        if not (u_min >= lo - 1e-12 * span and u_max <= hi + 1e-12 * span):
            bad = u[(u < lo) | (u > hi) | np.isnan(u)]
            raise ValueError(f"argument {bad.ravel()[:3]} outside law domain [{lo}, {hi}]")
        idx = np.searchsorted(self.breaks, u, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        idx = self.piece_index(u)
        local = u - self.breaks[idx]
        coef = self._table[idx]
        out = coef[..., -1]
        for k in range(self._table.shape[1] - 2, -1, -1):
            out = out * local + coef[..., k]
        return out if np.ndim(out) else float(out)

    def deriv(self, m: int = 1) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.breaks, [p.deriv(m) for p in self.pieces])

    def antiderivative(self, ref: float | None = None) -> "PiecewisePolynomial":
        """Continuous antiderivative vanishing at ``ref`` (default: left end)."""
        pieces = []
        acc = 0.0
        for i, p in enumerate(self.pieces):
            P = p.integ()
            P = P - P(self.breaks[i]) + acc
            acc = P(self.breaks[i + 1])
            pieces.append(P)
        out = PiecewisePolynomial(self.breaks, pieces)
        if ref is None:
            return out
        shift = out(ref)
        return PiecewisePolynomial(self.breaks, [p - shift for p in pieces])

    def knots_between(self, lo: float, hi: float) -> np.ndarray:
        inner = self.breaks[(self.breaks > min(lo, hi)) & (self.breaks < max(lo, hi))]
        return np.sort(inner)

    def to_dict(self) -> dict:
        return {
            "breaks": self.breaks.tolist(),
            "pieces": [
                {"coef": p.coef.tolist(), "domain": list(map(float, p.domain)), "window": list(map(float, p.window))}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewisePolynomial":
        pieces = [Polynomial(d["coef"], domain=d["domain"], window=d["window"]) for d in data["pieces"]]
        return cls(np.asarray(data["breaks"], dtype=float), pieces)
