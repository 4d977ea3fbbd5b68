"""Certification of piecewise-smooth weak solutions.

A solution object supplies ``conserved(t, X)`` and ``flux(t, X)`` for a
system ``U_t + div(flux) = 0`` together with ``breaks(t, lo, hi)``, the
interface values of ``s = X . normal``.  Against a test function ``phi``
supported in ``[1, 2) x R^d`` the weak residual of each equation is

    int int U phi_t + flux . grad(phi) dx dt + int U(1, x) phi(1, x) dx,

integrated by Gauss-Legendre rules on cells that are split at every
interface, so no node ever straddles a discontinuity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

T_GRID = np.linspace(1.0, 2.0, 33)
DEFAULT_SEED = 20240611
E = np.e


def bump(s):
    """``e * exp(-1 / (1 - s^2))`` on ``|s| < 1`` (unit maximum), zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    inside = np.abs(s) < 1
    si = s[inside]
    out[inside] = E * np.exp(-1.0 / (1.0 - si * si))
    return out


def bump_derivative(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    inside = np.abs(s) < 1
    si = s[inside]
    q = 1.0 - si * si
    out[inside] = E * np.exp(-1.0 / q) * (-2.0 * si / q**2)
    return out


def _frame(normal) -> np.ndarray:
    """Orthonormal columns whose first column is ``normal``."""
    normal = np.asarray(normal, dtype=float)
    d = len(normal)
    if d == 1:
        return np.array([[1.0]]) * np.sign(normal[0])
    q, _ = np.linalg.qr(np.column_stack([normal, np.eye(d)]))
    q = q[:, :d]
    if q[:, 0] @ normal < 0:
        q = -q
    return q


@dataclass(frozen=True)
class TestFunction:
    """Tensor bump centred at ``(t0, x0)`` with radii ``(r_t, r_x)`` in a rotated frame.

    ``frame`` columns are the spatial axes of the tensor product (identity in
    1-d).  ``amplitude`` scales the whole function, which lets the transported
    functions ``(1/n) phi(t, y/n)`` be represented exactly.
    """

    __test__ = False  # not a pytest class

    t0: float
    x0: tuple
    r_t: float
    r_x: tuple
    amplitude: float = 1.0
    frame: np.ndarray | None = None

    def __post_init__(self):
        x0 = tuple(np.atleast_1d(np.asarray(self.x0, dtype=float)).tolist())
        r_x = np.atleast_1d(np.asarray(self.r_x, dtype=float))
        if len(r_x) == 1 and len(x0) > 1:
            r_x = np.full(len(x0), r_x[0])
        if self.r_t <= 0 or np.any(r_x <= 0):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "r_x", tuple(r_x.tolist()))
        frame = np.eye(len(x0)) if self.frame is None else np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", frame)

    @property
    def dim(self) -> int:
        return len(self.x0)

    def t_support(self) -> tuple[float, float]:
        return self.t0 - self.r_t, self.t0 + self.r_t

    def local(self, X) -> np.ndarray:
        """Frame coordinates of ``X - x0`` scaled by the radii."""
        return ((np.asarray(X, dtype=float) - np.asarray(self.x0)) @ self.frame) / np.asarray(self.r_x)

    def value(self, t, X):
        q = self.local(X)
        st = (np.asarray(t, dtype=float) - self.t0) / self.r_t
        return self.amplitude * bump(st) * np.prod(bump(q), axis=-1)

    def dt(self, t, X):
        q = self.local(X)
        st = (np.asarray(t, dtype=float) - self.t0) / self.r_t
        return self.amplitude * bump_derivative(st) / self.r_t * np.prod(bump(q), axis=-1)

    def grad(self, t, X) -> np.ndarray:
        q = self.local(X)
        st = (np.asarray(t, dtype=float) - self.t0) / self.r_t
        bt = self.amplitude * bump(st)
        b = bump(q)
        db = bump_derivative(q) / np.asarray(self.r_x)
        d = self.dim
        partial = np.empty(q.shape)
        for j in range(d):
            others = np.prod(np.delete(b, j, axis=-1), axis=-1) if d > 1 else 1.0
            partial[..., j] = db[..., j] * others
        return (bt[..., None] if np.ndim(bt) else bt) * (partial @ self.frame.T)

    def transported(self, n: int) -> "TestFunction":
        """``(1/n) phi(t, y / n)``."""
        return TestFunction(
            self.t0,
            tuple(n * np.asarray(self.x0)),
            self.r_t,
            tuple(n * np.asarray(self.r_x)),
            self.amplitude / n,
            self.frame,
        )


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss order per cell, number of uniform cells per support direction, splitting flag."""

    order: int = 8
    cells: int = 32
    split_interfaces: bool = True

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(self.order, self.cells * factor, self.split_interfaces)


def _gauss_on(edges, order):
    x, w = leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def _edges(lo, hi, cells, cuts=()):
    edges = np.linspace(lo, hi, cells + 1)
    if len(cuts):
        edges = np.union1d(edges, np.asarray(cuts, dtype=float))
    # drop slivers that would come from a cut landing on a uniform edge
    keep = np.concatenate([[True], np.diff(edges) > 1e-14 * max(1.0, hi - lo)])
    return edges[keep]


def _spatial_nodes(sol, test: TestFunction, t: float, quad: QuadratureSpec):
    """Quadrature nodes and weights covering the spatial support of ``test`` at time ``t``."""
    d = test.dim
    centre = np.asarray(test.x0) @ test.frame
    per_axis = []
    for j in range(d):
        lo, hi = centre[j] - test.r_x[j], centre[j] + test.r_x[j]
        cuts = ()
        if j == 0 and quad.split_interfaces:
            normal = np.asarray(sol.normal, dtype=float)
            if not np.allclose(test.frame[:, 0], normal, atol=1e-14):
                raise ValueError("test frame must be aligned with the interface normal for splitting")
            cuts = sol.breaks(t, lo, hi)
        per_axis.append(_gauss_on(_edges(lo, hi, quad.cells, cuts), quad.order))
    grids = np.meshgrid(*[n for n, _ in per_axis], indexing="ij")
    wgrids = np.meshgrid(*[w for _, w in per_axis], indexing="ij")
    Q = np.stack([g.ravel() for g in grids], axis=-1)
    W = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    X = Q @ test.frame.T
    return X, W


def _spatial_arg(sol, X):
    return X[:, 0] if sol.dim == 1 else X


def _space_time_nodes(sol, test: TestFunction, t_nodes, t_weights, quad: QuadratureSpec):
    """Stack the spatial rules of every time node into flat ``(t, X, weight)`` arrays."""
    ts, Xs, ws = [], [], []
    for t, wt in zip(t_nodes, t_weights):
        X, wx = _spatial_nodes(sol, test, t, quad)
        ts.append(np.full(len(wx), t))
        Xs.append(X)
        ws.append(wt * wx)
    return np.concatenate(ts), np.concatenate(Xs), np.concatenate(ws)


def weak_terms(
    sol,
    test: TestFunction,
    quad: QuadratureSpec = QuadratureSpec(),
    t_window=(1.0, 2.0),
    chunk: int = 200_000,
) -> np.ndarray:
    """Per-equation integrals ``[int U phi_t, int flux . grad phi, trace at t=1]``, shape ``(n_eq, 3)``."""
    lo, hi = test.t_support()
    if hi > t_window[1] + 1e-14:
        raise ValueError(f"test support [{lo}, {hi}] escapes the time window {t_window}")
    if test.dim != sol.dim:
        raise ValueError("test function dimension does not match the solution")
    t_lo = max(lo, t_window[0])
    t_nodes, t_weights = _gauss_on(_edges(t_lo, hi, quad.cells), quad.order)
    out = np.zeros((sol.n_eq, 3))
    per_t = max(1, chunk // max(1, len(_spatial_nodes(sol, test, t_nodes[0], quad)[1])))
    for i in range(0, len(t_nodes), per_t):
        tt, X, w = _space_time_nodes(sol, test, t_nodes[i : i + per_t], t_weights[i : i + per_t], quad)
        arg = _spatial_arg(sol, X)
        U, Fl = sol.balance(tt, arg)
        out[:, 0] += (w * test.dt(tt, X)) @ U
        out[:, 1] += np.einsum("p,pej,pj->e", w, Fl, test.grad(tt, X))
    if lo < t_window[0]:
        t = t_window[0]
        X, wx = _spatial_nodes(sol, test, t, quad)
        tt = np.full(len(wx), t)
        U = sol.conserved(tt, _spatial_arg(sol, X))
        out[:, 2] = (wx * test.value(tt, X)) @ U
    return out


@dataclass
class WeakReport:
    max_residual: float
    residuals: np.ndarray  # (n_tests, n_eq)
    equations: tuple
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "equations": list(self.equations),
            "per_test": self.residuals.tolist(),
            "seed": self.seed,
        }


def weak_residual(sol, tests, quad: QuadratureSpec = QuadratureSpec(), seed: int | None = None) -> WeakReport:
    """Max over tests and equations of the absolute weak-form residual."""
    rows = [weak_terms(sol, test, quad).sum(axis=1) for test in tests]
    res = np.abs(np.array(rows))
    return WeakReport(float(res.max()), res, tuple(sol.equations), seed)


def random_tests(
    dim: int = 1,
    count: int = 20,
    seed: int = DEFAULT_SEED,
    x_range=(-1.0, 1.0),
    r_x_range=(0.1, 0.4),
    frame=None,
    touch_fraction: float = 0.3,
) -> list[TestFunction]:
    """Seeded bumps inside ``[1, 2) x x_range``; about ``touch_fraction`` reach ``t = 1``."""
    rng = np.random.default_rng(seed)
    tests = []
    for _ in range(count):
        r_t = rng.uniform(0.1, 0.35)
        if rng.uniform() < touch_fraction:
            t0 = rng.uniform(1.0, 1.0 + 0.8 * r_t)
        else:
            t0 = rng.uniform(1.0 + r_t, 2.0 - r_t - 1e-3)
        r_x = rng.uniform(*r_x_range, size=dim)
        x0 = rng.uniform(x_range[0] + r_x.max(), x_range[1] - r_x.max(), size=dim)
        tests.append(TestFunction(t0, tuple(x0), r_t, tuple(r_x), 1.0, frame))
    return tests


def rh_residual(sol, t_grid=T_GRID, **kwargs) -> dict:
    """Jump-condition residuals of every interface in view, keyed by condition."""
    systems = ("bar", "viscoplastic", "gas", "euler", "twinning")
    if getattr(sol, "system", None) not in systems:
        raise ValueError(f"unknown system tag {getattr(sol, 'system', None)!r}")
    return sol.rh_residuals(t_grid, **kwargs)


def interior_residual(sol, n_points: int = 200, h: float = 1e-5, seed: int = DEFAULT_SEED, x_range=(-1.0, 1.0)) -> float:
    """Max ``|U_t + div flux|`` by centred differences at random points inside single phases.

    Points whose stencil comes within ``2h`` of an interface are discarded.
    """
    rng = np.random.default_rng(seed)
    d = sol.dim
    normal = np.asarray(sol.normal, dtype=float)
    t = rng.uniform(1.0 + 2 * h, 2.0 - 2 * h, n_points)
    X = rng.uniform(x_range[0], x_range[1], (n_points, d))
    s = X @ normal
    keep = np.array(
        [all(len(sol.breaks(tt, si - 3 * h, si + 3 * h)) == 0 for tt in (ti - h, ti, ti + h)) for ti, si in zip(t, s)]
    )
    t, X = t[keep], X[keep]
    if len(t) == 0:
        raise ValueError("no interior points survived the interface collar")
    arg = (lambda Y: Y[:, 0]) if d == 1 else (lambda Y: Y)
    U_t = (sol.conserved(t + h, arg(X)) - sol.conserved(t - h, arg(X))) / (2 * h)
    div = np.zeros_like(U_t)
    for j in range(d):
        e = np.eye(d)[j] * h
        div += (sol.flux(t, arg(X + e))[..., j] - sol.flux(t, arg(X - e))[..., j]) / (2 * h)
    return float(np.abs(U_t + div).max())


def entropy_production(sol, n_points: int = 200, h: float = 1e-5, seed: int = DEFAULT_SEED) -> dict:
    """Adiabatic entropy identity ``eta_t = (mu/u) v_x^2 / theta`` inside phases.

    Returns the max identity residual and the minimum production.
    """
    if getattr(sol, "system", None) != "gas":
        raise ValueError("entropy production applies to gas solutions")
    rng = np.random.default_rng(seed)
    t = rng.uniform(1.0 + 2 * h, 2.0 - 2 * h, n_points)
    x = rng.uniform(-1.0, 1.0, n_points)
    gas = sol.gas
    plus, minus, mid = sol.fields(t + h, x), sol.fields(t - h, x), sol.fields(t, x)
    if min(plus["theta"].min(), minus["theta"].min()) <= 0:
        raise ValueError("temperature must stay positive")
    eta_t = (gas.eta(plus["u"], plus["theta"]) - gas.eta(minus["u"], minus["theta"])) / (2 * h)
    production = sol.mu / mid["u"] * mid["v_x"] ** 2 / mid["theta"]
    return {
        "residual": float(np.abs(eta_t - production).max()),
        "min_production": float(production.min()),
    }


def integrate(sol, func, test: TestFunction | None = None, t_range=(1.0, 2.0), x_range=(-1.0, 1.0), quad: QuadratureSpec = QuadratureSpec()) -> float:
    """``int int func(t, x) [phi(t, x)] dx dt`` over a box, split at the interfaces of ``sol`` (1-d)."""
    t_nodes, t_weights = _gauss_on(_edges(*t_range, quad.cells), quad.order)
    total = 0.0
    for t, wt in zip(t_nodes, t_weights):
        cuts = sol.breaks(t, *x_range) if quad.split_interfaces else ()
        x, wx = _gauss_on(_edges(*x_range, quad.cells, cuts), quad.order)
        vals = func(np.full(len(x), t), x)
        if test is not None:
            vals = vals * test.value(np.full(len(x), t), x[:, None])
        total += wt * float(wx @ vals)
    return total


def _slope(n_list, values) -> float:
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        return float("-inf")
    return float(np.polyfit(np.log(n_list), np.log(values), 1)[0])


@dataclass
class RateReport:
    n: list
    errors: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "errors": {k: list(map(float, v)) for k, v in self.errors.items()}, "slopes": self.slopes}


def weak_convergence_rate(seq, quantities, tests, n_list, strong: str | None = "v", quad: QuadratureSpec = QuadratureSpec(order=8, cells=4)) -> RateReport:
    """Tested weak gaps ``max_phi |int (q_n - q_bar) phi|`` and their log-log slopes.

    ``seq(n)`` returns the rescaled solution; the limits come from
    ``solution.weak_limit``.  ``strong`` names a field whose
    ``L^2((1,2) x (-1,1))`` distance to its limit is also measured.
    """
    n_list = list(n_list)
    if len(n_list) < 3:
        raise ValueError("need at least three values of n")
    report = RateReport(n_list)
    for q in quantities:
        errs = []
        for n in n_list:
            sol = seq(n)

            def gap(t, x, sol=sol, q=q):
                return sol.fields(t, x)[q] - sol.weak_limit(q, t, x)

            errs.append(max(abs(integrate(sol, gap, test, test.t_support(), _x_support(test), quad)) for test in tests))
        report.errors[q] = errs
        report.slopes[q] = _slope(n_list, errs)
    if strong is not None:
        errs = []
        for n in n_list:
            sol = seq(n)

            def sq(t, x, sol=sol):
                return (sol.fields(t, x)[strong] - sol.weak_limit(strong, t, x)) ** 2

            errs.append(np.sqrt(integrate(sol, sq, None, (1.0, 2.0), (-1.0, 1.0), quad)))
        report.errors[f"{strong}_L2"] = errs
        report.slopes[f"{strong}_L2"] = _slope(n_list, errs)
    return report


def _x_support(test: TestFunction):
    return test.x0[0] - test.r_x[0], test.x0[0] + test.r_x[0]


def sigma_composition_gap(sol, sigma, test: TestFunction, quad: QuadratureSpec = QuadratureSpec(order=8, cells=4)) -> float:
    """``|int [sigma(u_n) - sigma(u_bar)] phi| / int phi`` for a bar-type laminate."""

    def integrand(t, x):
        return sigma(sol.fields(t, x)["u"]) - sigma(sol.weak_limit("u", t, x))

    num = integrate(sol, integrand, test, test.t_support(), _x_support(test), quad)
    mass = integrate(sol, lambda t, x: np.ones_like(x), test, test.t_support(), _x_support(test), quad)
    return abs(num) / mass
