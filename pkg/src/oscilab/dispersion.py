"""Linear spectral analysis of thermoviscoelastic Fourier modes.

A single Fourier mode ``u = a(t) e^{inx} / n``, ``theta = -i b(t) e^{inx}`` of
the 1-d linear thermoviscoelastic system obeys ``d/dt (a, v, b) = A(n) (a, v, b)``
with

    A(n) = [[0,        1,       0    ],
            [-lam n^2, -mu n^2, m n^2],
            [0,        -m,      -kappa n^2]]

whose eigenvalues are the roots of a cubic.  This module computes those
roots exactly (companion matrix + Newton polish) and through their large-n
asymptotic expansions, and provides the acoustic-tensor machinery used for
plane waves in d = 2, 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

REAL_SNAP = 1e-10
H3_ANGLE_TOL = 1e-8


class DegenerateExpansionError(ValueError):
    """Raised when an asymptotic formula divides by ``mu - kappa`` or ``kappa``."""


@dataclass(frozen=True)
class LinearTVParams:
    """Coefficients of the linear thermoviscoelastic system and a mode number."""

    lam: float
    m: float
    mu: float
    kappa: float
    n: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"elastic modulus must be positive, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"viscosity must be positive, got {self.mu}")
        if not self.kappa >= 0:
            raise ValueError(f"heat diffusivity must be nonnegative, got {self.kappa}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"mode number must be a positive integer, got {self.n}")

    def with_mode(self, n: int) -> "LinearTVParams":
        return LinearTVParams(self.lam, self.m, self.mu, self.kappa, n)

    def matrix(self) -> np.ndarray:
        """Coefficient matrix A(n) of the first-order amplitude system."""
        n2 = float(self.n) ** 2
        return np.array(
            [
                [0.0, 1.0, 0.0],
                [-self.lam * n2, -self.mu * n2, self.m * n2],
                [0.0, -self.m, -self.kappa * n2],
            ]
        )


@dataclass(frozen=True)
class CubicCoeffs:
    """Monic cubic ``rho^3 + c2 rho^2 + c1 rho + c0``."""

    c2: float
    c1: float
    c0: float

    def __call__(self, rho):
        return ((rho + self.c2) * rho + self.c1) * rho + self.c0

    def derivative(self, rho):
        return (3.0 * rho + 2.0 * self.c2) * rho + self.c1


@dataclass(frozen=True)
class RootTriple:
    """Three roots sorted by descending real part (``roots[0]`` decays slowest)."""

    roots: tuple

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    @property
    def is_real(self) -> bool:
        return all(np.imag(r) == 0 for r in self.roots)

    def real(self) -> np.ndarray:
        return np.array([np.real(r) for r in self.roots])


@dataclass(frozen=True)
class EigExpansion:
    """Two-term expansions of the slow eigenvalue and its eigenvector.

    ``root(n) ~ r0 + r1 / n^2`` and ``vector(n) ~ xi0 + xi1 / n^2``; ``r2`` is
    the next eigenvalue coefficient (the ``1/n^4`` term).
    """

    r0: float
    r1: float
    r2: float
    xi0: np.ndarray
    xi1: np.ndarray

    def root(self, n: int) -> float:
        return self.r0 + self.r1 / n**2

    def vector(self, n: int) -> np.ndarray:
        return self.xi0 + self.xi1 / n**2


def characteristic_cubic(params: LinearTVParams) -> CubicCoeffs:
    lam, m, mu, kappa = params.lam, params.m, params.mu, params.kappa
    n2 = float(params.n) ** 2
    return CubicCoeffs(
        c2=(kappa + mu) * n2,
        c1=kappa * mu * n2**2 + (lam + m**2) * n2,
        c0=kappa * lam * n2**2,
    )


def _sort_roots(roots) -> tuple:
    return tuple(sorted(roots, key=lambda r: (-np.real(r), -np.imag(r))))


def solve_cubic(coeffs: CubicCoeffs) -> RootTriple:
    """Roots of a monic cubic.

    Companion-matrix eigenvalues seed the roots.  Isolated roots get one Newton
    step; a cluster of two is recomputed from the quadratic left after
    deflating the isolated root, and a cluster of three from the depressed
    cubic about ``-c2/3``, which keeps a triple root exact.
    """
    c = np.array([coeffs.c2, coeffs.c1, coeffs.c0], dtype=float)
    if not np.all(np.isfinite(c)):
        raise ValueError(f"nonfinite cubic coefficients {c}")
    raw = _companion_roots(*c)
    scale = max(1.0, np.abs(raw).max())
    close = [[abs(ri - rj) < 1e-3 * scale for rj in raw] for ri in raw]
    n_close = [sum(row) - 1 for row in close]

    if min(n_close) == 2:
        shift = -c[0] / 3.0
        P = c[1] - c[0] ** 2 / 3.0
        R = c[2] - c[0] * c[1] / 3.0 + 2.0 * c[0] ** 3 / 27.0
        roots = [_snap(shift + s) for s in _companion_roots(0.0, P, R)]
    elif max(n_close) == 1:
        iso = int(np.argmin(n_close))
        r3 = _newton_polish(coeffs, _snap(raw[iso]))
        # divide by a large isolated root instead of cancelling against it
        if abs(r3) > 1.0:
            q = -c[2] / r3
            p = (q - c[1]) / r3
        else:
            p = c[0] + r3
            q = c[1] + r3 * p
        roots = [r3, *_quadratic_roots(p.real, q.real)] if r3.imag == 0 else [
            r3,
            *(_snap(z) for z in np.roots([1.0, p, q])),
        ]
    else:
        roots = [_newton_polish(coeffs, _snap(r)) for r in raw]
    return RootTriple(_sort_roots(roots))


def _companion_roots(c2, c1, c0) -> np.ndarray:
    companion = np.array([[-c2, -c1, -c0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return np.linalg.eigvals(companion).astype(complex)


def _snap(r: complex) -> complex:
    r = complex(r)
    if abs(r.imag) < REAL_SNAP * max(1.0, abs(r)):
        return complex(r.real, 0.0)
    return r


def _quadratic_roots(p: float, q: float) -> list:
    """Roots of ``x^2 + p x + q`` without cancellation."""
    disc = p * p - 4.0 * q
    if disc >= 0:
        s = -0.5 * (p + np.copysign(np.sqrt(disc), p))
        if s == 0.0:
            return [0j, 0j]
        return [complex(s), complex(q / s)]
    im = 0.5 * np.sqrt(-disc)
    return [_snap(complex(-0.5 * p, im)), _snap(complex(-0.5 * p, -im))]


def _newton_polish(coeffs: CubicCoeffs, r: complex) -> complex:
    d = coeffs.derivative(r)
    if d != 0:
        step = coeffs(r) / d
        if abs(step) < 1e-3 * max(1.0, abs(r)):
            r = r - step
    return _snap(r)


def _expansion_coefficients(params: LinearTVParams) -> np.ndarray:
    """Coefficients ``r^k_i`` of ``rho_i / n^2 = sum_k r^k_i n^{-2k}``, k = 0, 1, 2.

    Obtained by solving the order-by-order perturbation equations of the
    scaled cubic; rows index the branch (slow, thermal, viscous).
    """
    lam, m, mu, kappa = params.lam, params.m, params.mu, params.kappa
    if mu == kappa:
        raise DegenerateExpansionError("asymptotic expansion requires mu != kappa")
    out = np.zeros((3, 4))
    for i, r0 in enumerate((0.0, -kappa, -mu)):
        fp = 3 * r0**2 + 2 * (kappa + mu) * r0 + kappa * mu
        if fp == 0.0:
            raise DegenerateExpansionError(
                "asymptotic expansion requires kappa > 0 for the slow branch"
            )
        r1 = (-(lam + m**2) * r0 - kappa * lam) / fp
        r2 = (-3 * r0 * r1**2 - (kappa + mu) * r1**2 - (lam + m**2) * r1) / fp
        # third-order term, used only to size truncation errors
        r3 = (
            -(r1**3 + 6 * r0 * r1 * r2 + 2 * (kappa + mu) * r1 * r2 + (lam + m**2) * r2)
            / fp
        )
        out[i] = (r0, r1, r2, r3)
    return out


def printed_expansion_coefficients(params: LinearTVParams) -> np.ndarray:
    """The closed-form ``(n^2, 1, 1/n^2)`` coefficients as printed in the source.

    The third-branch ``1/n^2`` coefficient differs from the perturbation
    recursion; it is kept here so the discrepancy can be reported.
    """
    lam, m, mu, kappa = params.lam, params.m, params.mu, params.kappa
    if mu == kappa:
        raise DegenerateExpansionError("asymptotic expansion requires mu != kappa")
    if kappa == 0:
        raise DegenerateExpansionError("printed expansion divides by kappa")
    d = mu - kappa
    return np.array(
        [
            [0.0, -lam / mu, -lam / (kappa * mu**2) * (kappa * lam / mu - m**2)],
            [-kappa, -(m**2) / d, -(m**2) / (kappa * d**2) * (lam + kappa * m**2 / d)],
            [-mu, lam / mu + m**2 / d, (lam / mu + m**2 / d) * (lam / mu**2 + kappa * m**2 / d)],
        ]
    )


def asymptotic_roots(params: LinearTVParams, order: int = 1) -> np.ndarray:
    """Truncated large-n expansions of the three roots (slow, thermal, viscous).

    ``order=0`` keeps the leading term of each branch, ``(-lam/mu, -kappa n^2,
    -mu n^2)``; each further order adds the next power of ``1/n^2``.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    coef = _expansion_coefficients(params)
    n2 = float(params.n) ** 2
    out = np.empty(3)
    for i in range(3):
        # the slow branch starts one power later: its n^2 coefficient vanishes
        start = 1 if i == 0 else 0
        terms = coef[i, start : start + order + 1]
        out[i] = sum(c * n2 ** (1 - (start + k)) for k, c in enumerate(terms))
    return out


def truncation_exponent(branch: int, order: int) -> int:
    """Power of n in the error of ``asymptotic_roots(order)`` on ``branch``."""
    return -2 * (order + 1) if branch == 0 else -2 * order


def vieta_residual(roots, coeffs: CubicCoeffs) -> np.ndarray:
    """Relative residuals of the sum, pairwise-sum and product identities."""
    r = np.asarray(list(roots), dtype=complex)
    s1 = r.sum()
    s2 = r[0] * r[1] + r[1] * r[2] + r[2] * r[0]
    s3 = r.prod()
    targets = (-coeffs.c2, coeffs.c1, -coeffs.c0)
    scales = (
        max(abs(coeffs.c2), np.abs(r).sum(), 1e-300),
        max(abs(coeffs.c1), abs(r[0] * r[1]) + abs(r[1] * r[2]) + abs(r[2] * r[0]), 1e-300),
        max(abs(coeffs.c0), np.abs(r).prod(), 1e-300),
    )
    return np.array(
        [abs(s - tgt) / sc for s, tgt, sc in zip((s1, s2, s3), targets, scales)]
    )


def slow_eigen_expansion(params: LinearTVParams) -> EigExpansion:
    lam, m, mu, kappa = params.lam, params.m, params.mu, params.kappa
    if kappa == 0:
        raise DegenerateExpansionError(
            "eigenvector correction needs kappa > 0; use the adiabatic construction"
        )
    coef = _expansion_coefficients(params)
    xi0 = np.array([mu, -lam, 0.0])
    xi1 = np.array([-lam / mu, m**2 * lam / (kappa * mu), m * lam / kappa])
    return EigExpansion(r0=coef[0, 1], r1=coef[0, 2], r2=coef[0, 3], xi0=xi0, xi1=xi1)


def mode_eigenvector(params: LinearTVParams, rho: float) -> np.ndarray:
    """Eigenvector of A(n) for the real eigenvalue ``rho``, scaled so ``a = mu``.

    Uses the rows ``v = rho a`` and ``(rho + kappa n^2) b = -m v`` directly; the
    SVD null vector is the fallback when ``rho = -kappa n^2``.
    """
    n2 = float(params.n) ** 2
    denom = rho + params.kappa * n2
    if abs(denom) > 1e-8 * max(1.0, abs(rho)):
        vec = np.array([1.0, rho, -params.m * rho / denom])
    else:
        _, _, vh = np.linalg.svd(params.matrix() - rho * np.eye(3))
        vec = vh[-1]
    if abs(vec[0]) < 1e-14 * np.linalg.norm(vec):
        return vec / np.linalg.norm(vec)
    return params.mu * vec / vec[0]


# --- acoustic tensors -------------------------------------------------------


@dataclass(frozen=True)
class ElasticSystem:
    """Elastic tensor ``A[k, l, alpha, beta]``, coupling ``M[k, alpha]``, viscosity, diffusivity."""

    A: np.ndarray
    M: np.ndarray
    mu: float = 1.0
    kappa: float = 0.0
    d: int = field(init=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        M = np.asarray(self.M, dtype=float)
        d = A.shape[0]
        if d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {d}")
        if A.shape != (d,) * 4 or M.shape != (d, d):
            raise ValueError(f"shapes {A.shape}, {M.shape} inconsistent with d={d}")
        if not self.mu > 0 or not self.kappa >= 0:
            raise ValueError("need mu > 0 and kappa >= 0")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "d", d)

    @property
    def h1(self) -> bool:
        A = self.A
        return bool(
            np.array_equal(A, A.transpose(1, 0, 2, 3))
            and np.array_equal(A, A.transpose(0, 1, 3, 2))
        )

    @classmethod
    def isotropic(cls, lam: float, d: int = 2, M=None, mu: float = 1.0, kappa: float = 0.0):
        """``A = lam delta_kl delta_ab``, which gives ``Q = lam I`` for every direction."""
        eye = np.eye(d)
        A = lam * np.einsum("kl,ab->klab", eye, eye)
        return cls(A, np.zeros((d, d)) if M is None else M, mu, kappa)


def _unit(nu, tol: float = 1e-12) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > tol:
        raise ValueError(f"direction must be a unit vector, |nu| = {np.linalg.norm(nu)}")
    return nu


def acoustic_tensor(sys: ElasticSystem, nu) -> np.ndarray:
    nu = _unit(nu)
    if nu.shape != (sys.d,):
        raise ValueError(f"direction has shape {nu.shape}, expected ({sys.d},)")
    Q = np.einsum("klab,a,b->kl", sys.A, nu, nu)
    return 0.5 * (Q + Q.T)


def symmetric_eigen(Q) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of a 2x2/3x3 symmetric matrix.

    Each eigenvector's first nonnegligible component is made positive.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] not in (2, 3):
        raise ValueError(f"expected a 2x2 or 3x3 matrix, got shape {Q.shape}")
    scale = max(np.abs(Q).max(), 1e-300)
    if np.abs(Q - Q.T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (Q + Q.T))
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = np.flatnonzero(np.abs(col) > 1e-12)[0]
        if col[lead] < 0:
            vecs[:, j] = -col
    return vals, vecs


@dataclass
class HypothesisReport:
    h1: bool
    h2: bool
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    # (index r, coupling m_r, matched unit eigenvector xi_r)
    h3: list = field(default_factory=list)

    def matched(self, r: int):
        for idx, m_r, xi in self.h3:
            if idx == r:
                return m_r, xi
        return None


def check_hypotheses(sys: ElasticSystem, nu) -> HypothesisReport:
    """Symmetry (H1), positivity of the acoustic tensor (H2), coupling alignment (H3).

    H3 for eigenpair r asks that ``M nu`` be parallel to the eigenvector; on a
    repeated eigenvalue the eigenvector is taken as the normalized projection
    of ``M nu`` onto the eigenspace, so ``Q = c I`` matches any ``M nu``.
    """
    Q = acoustic_tensor(sys, nu)
    vals, vecs = symmetric_eigen(Q)
    h2 = bool(vals.min() > 0)
    Mnu = sys.M @ np.asarray(nu, dtype=float)
    norm_mnu = np.linalg.norm(Mnu)
    scale = max(np.abs(vals).max(), 1e-300)
    h3 = []
    for r in range(sys.d):
        if norm_mnu == 0.0:
            h3.append((r, 0.0, vecs[:, r].copy()))
            continue
        cluster = np.abs(vals - vals[r]) <= 1e-10 * scale
        basis = vecs[:, cluster]
        proj = basis @ (basis.T @ Mnu)
        pn = np.linalg.norm(proj)
        if pn == 0.0:
            continue
        # angle between M nu and its projection onto the eigenspace
        sin_angle = np.linalg.norm(Mnu - proj) / norm_mnu
        if sin_angle >= H3_ANGLE_TOL:
            continue
        if cluster.sum() == 1:
            xi = vecs[:, r].copy()
        else:
            xi = proj / pn
        h3.append((r, float(xi @ Mnu), xi))
    return HypothesisReport(sys.h1, h2, vals, vecs, h3)


def modified_acoustic_tensor(sys: ElasticSystem, nu) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``Q + (M nu)(M nu)^T`` with its ascending eigenvalues and unit eigenvectors."""
    Q = acoustic_tensor(sys, nu)
    if np.linalg.eigvalsh(Q).min() <= 0:
        raise ValueError("acoustic tensor is not positive definite along nu")
    Mnu = sys.M @ np.asarray(nu, dtype=float)
    Qm = Q + np.outer(Mnu, Mnu)
    vals, vecs = symmetric_eigen(Qm)
    return Qm, vals, vecs
