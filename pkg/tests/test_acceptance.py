"""Acceptance criteria: one test per criterion, each printing a single PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -s`` to see the lines as they
are produced; they are repeated in the terminal summary of any pytest run.
"""

import time

import numpy as np
import pytest

from oscilab.amplitude import AmplitudeState, energy_identity_residual, integrate_amplitude
from oscilab.constructors import (
    T_GRID,
    PiecewisePeriodicSolution,
    bar_solution,
    gas_oscillatory,
    lagrangian_to_eulerian,
    ns_oscillatory,
    rescale,
    twinning_dynamic,
    viscoplastic_solution,
)
from oscilab.dispersion import (
    CubicCoeffs,
    ElasticSystem,
    LinearTVParams,
    asymptotic_roots,
    characteristic_cubic,
    solve_cubic,
    truncation_exponent,
)
from oscilab.fdsolver import (
    Grid1D,
    convergence_order,
    initial_from_solution,
    oscillation_metric,
    solve_bar,
    stress_deviation,
)
from oscilab.gas import GasConstitutive, gas_interface_construct, gas_uniform_extension
from oscilab.linearwaves import persistence_metric, wave_1d, wave_adiabatic
from oscilab.materials import (
    LaminatePair,
    MaterialLaw,
    PhasePair,
    build_phi,
    build_pressure,
    build_shear_energy,
    build_sigma,
    condition_C_residual,
    lemma_contradiction_check,
)
from oscilab.weakform import (
    DEFAULT_SEED,
    QuadratureSpec,
    TestFunction,
    _frame,
    interior_residual,
    random_tests,
    sigma_composition_gap,
    weak_convergence_rate,
    weak_residual,
)

PAIR = PhasePair(1.0, 3.0)
PARAMS = LinearTVParams(1.0, 1.0, 2.0, 1.0)


def test_criterion_01_dispersion_asymptotics(criterion):
    with criterion(1, "dispersion asymptotics") as c:
        ns = [8, 16, 32, 64, 128]
        for branch in range(3):
            scaled = []
            for n in ns:
                p = PARAMS.with_mode(n)
                exact = solve_cubic(characteristic_cubic(p))[branch].real
                err = abs(exact - asymptotic_roots(p, 1)[branch])
                scaled.append(err * n ** (-truncation_exponent(branch, 1)))
            med = np.median(scaled)
            spread = max(max(scaled) / med, med / min(scaled))
            c.check(f"branch{branch + 1}_spread", spread, spread <= 4.0, "<= 4")
        roots = solve_cubic(characteristic_cubic(LinearTVParams(1.0, 0.0, 2.0, 1.0, 1)))
        err = float(np.abs(np.asarray(list(roots)) + 1.0).max())
        c.check("triple_root_error", err, err < 1e-9, "< 1e-9")
        assert solve_cubic(CubicCoeffs(3.0, 3.0, 1.0)).is_real


def test_criterion_02_energy_identity(criterion):
    init = AmplitudeState(1.0, 0.0, 0.5)
    with criterion(2, "Fourier energy identity") as c:
        for n in (1, 2):
            p = PARAMS.with_mode(n)
            r = [
                energy_identity_residual(integrate_amplitude(p, init, 1.0, dt, "trapezoidal"), p)
                for dt in (1e-4, 5e-5)
            ]
            c.check(f"n{n}_residual", r[0], r[0] < 1e-6, "< 1e-6")
            ratio = r[0] / r[1]
            c.check(f"n{n}_halving_ratio", ratio, abs(ratio - 4.0) <= 0.4, "4 +- 0.4")


def test_criterion_03_persistence_slopes(criterion):
    n_list = [8, 16, 32, 64]
    adiabatic = ElasticSystem.isotropic(2.0, 2, M=np.eye(2), mu=2.0, kappa=0.0)
    cases = [
        ("u", lambda n: wave_1d(PARAMS.with_mode(n)), "u", -1.0),
        ("w", lambda n: wave_1d(PARAMS.with_mode(n)), "w", 0.0),
        ("theta_conducting", lambda n: wave_1d(PARAMS.with_mode(n)), "theta", -2.0),
        # eigenpair r=1 is the one carrying M nu, so its temperature is coupled
        ("theta_adiabatic", lambda n: wave_adiabatic(adiabatic, [1.0, 0.0], 1, n), "theta", 0.0),
    ]
    with criterion(3, "persistence slopes") as c:
        for name, make, quantity, target in cases:
            slopes = persistence_metric(make, quantity, n_list)["slope"]
            worst = max(slopes.values(), key=lambda s: abs(s - target))
            c.check(name, worst, abs(worst - target) <= 0.1, f"{target} +- 0.1")


def test_criterion_04_constitutive_identities(criterion):
    with criterion(4, "constitutive identities") as c:
        sigma = build_sigma(PAIR, [0.0, 1.0])
        phi = build_phi(PAIR, 1.0, [3.0])
        pressure = build_pressure(PAIR, [0.0, 1.0])
        for name, law in (("sigma", sigma), ("phi", phi), ("pressure", pressure)):
            r = law.identity_residual(101)
            c.check(name, r, r < 1e-10, "< 1e-10")
        controls = {
            "sigma": MaterialLaw.polynomial("sigma", [0.0, 1.0], (0.5, 9.0), PAIR),
            "phi": MaterialLaw.polynomial("phi", [1.0, 1.0], (0.5, 9.0), PAIR, 1.0),
            "pressure": MaterialLaw.polynomial("pressure", [0.0, 1.0], (0.05, 2.0), PAIR),
        }
        for name, law in controls.items():
            r = law.identity_residual(101)
            c.check(f"monotone_{name}", r, r > 0, "> 0")
        for name, build in (
            ("bar", lambda: bar_solution(PAIR, 0.5, controls["sigma"])),
            ("viscoplastic", lambda: viscoplastic_solution(PAIR, 0.5, controls["phi"], 1.0)),
            ("euler", lambda: ns_oscillatory(PAIR, 0.5, controls["pressure"])),
        ):
            with pytest.raises(ValueError):
                build()
        c.check("monotone_rejected", 3, True)


def test_criterion_05_lemma(criterion):
    pair = LaminatePair.default()
    W = build_shear_energy(pair, (0.0, 1.0))
    with criterion(5, "rank-one convexity lemma") as c:
        cond = condition_C_residual(W, pair, T_GRID)
        c.check("condition_C", cond, cond < 1e-9, "< 1e-9")
        for t in (1.0, 1.5, 2.0):
            rep = lemma_contradiction_check(W, pair, t)
            err = abs(rep.rayleigh_quotient + 1.0 / t)
            c.check(f"t{t}_quotient_error", err, err < 1e-6 and rep.roc_violated, "< 1e-6")


def _solutions():
    sigma = build_sigma(PAIR, [0.0, 1.0])
    pair2 = LaminatePair.default()
    return {
        "bar": (bar_solution(PAIR, 0.5, sigma), QuadratureSpec(8, 32)),
        "viscoplastic": (viscoplastic_solution(PAIR, 0.5, build_phi(PAIR, 1.0, [3.0]), 1.0), QuadratureSpec(8, 32)),
        "gas": (gas_oscillatory(gas_interface_construct(PAIR, 1.0, 1.0, [0.2]), 0.5), QuadratureSpec(8, 32)),
        "twinning": (twinning_dynamic(pair2, build_shear_energy(pair2, (0.0, 1.0))), QuadratureSpec(8, 16)),
        "navier_stokes": (ns_oscillatory(PAIR, 0.5, build_pressure(PAIR, [0.0, 1.0])), QuadratureSpec(8, 32)),
    }


def test_criterion_06_weak_certification(criterion):
    with criterion(6, "weak-solution certification") as c:
        for name, (sol, quad) in _solutions().items():
            assert len(T_GRID) == 33
            rh = max(sol.rh_residuals(T_GRID).values())
            c.check(f"{name}_rh", rh, rh < 1e-10, "< 1e-10")
            frame = _frame(sol.normal) if sol.dim > 1 else None
            tests = random_tests(sol.dim, 20, DEFAULT_SEED, frame=frame)
            weak = weak_residual(sol, tests, quad).max_residual
            c.check(f"{name}_weak", weak, weak < 1e-6, "< 1e-6")
            interior = interior_residual(sol)
            c.check(f"{name}_interior", interior, interior < 1e-8, "< 1e-8")


def test_criterion_07_gas_interface(criterion):
    t = np.linspace(1.0, 2.0, 201)
    with criterion(7, "gas interface lemma") as c:
        gi = gas_interface_construct(PAIR, 1.0, 1.0, [0.2], mu=1.0)
        ident = gi.identity_residual(t)
        c.check("identity", ident, ident < 1e-8, "< 1e-8")
        c.check("theta_hat_min", gi.theta_hat.min, gi.theta_hat.min > 0, "> 0")
        worst = 0.0
        for rate, gas in ((1.0, gi.gas), (3.0, gi.gas)):
            ext = gas_uniform_extension(rate, 1.0, gas, mu=1.0)
            worst = max(worst, max(abs(ext.closed_form(s) - ext(s)) for s in np.linspace(1.0, 2.0, 11)))
        c.check("closed_form_vs_rk4", worst, worst < 1e-8, "< 1e-8")
        zero = gas_uniform_extension(1.0, 1.0, GasConstitutive.constant(0.0), mu=1.0)
        err0 = float(np.abs(zero(t) - (1.0 + np.log(t))).max())
        err0_quad = max(abs(zero.closed_form(s) - (1.0 + np.log(s))) for s in np.linspace(1.0, 2.0, 11))
        c.check("tau0_rk4", err0, err0 < 1e-10, "< 1e-10")
        c.check("tau0_closed_form", err0_quad, err0_quad < 1e-10, "< 1e-10")


def test_criterion_08_lagrangian_eulerian(criterion):
    sigma = build_sigma(PAIR, [0.0, 1.0])
    pressure = build_pressure(PAIR, [0.0, 1.0])
    with criterion(8, "Lagrangian to Eulerian") as c:
        worst_rho = worst_u = 0.0
        for n in (1, 4):
            eul = lagrangian_to_eulerian(rescale(bar_solution(PAIR, 0.5, sigma), n))
            ns = ns_oscillatory(PAIR, 0.5, pressure, n=n)
            for t in T_GRID[::4]:
                y = np.linspace(-1.95, 1.95, 391)
                br = ns.breaks(t, -2.0, 2.0)
                y = y[np.min(np.abs(y[:, None] - br[None, :]), axis=1) > 1e-9]
                worst_rho = max(worst_rho, float(np.abs(eul.rho(t, y) - ns.fields(t, y)["rho"]).max()))
                worst_u = max(worst_u, float(np.abs(eul.velocity(t, y) - ns.fields(t, y)["u"]).max()))
        c.check("rho", worst_rho, worst_rho < 1e-12, "< 1e-12")
        c.check("velocity", worst_u, worst_u < 1e-12, "< 1e-12")
        single = lagrangian_to_eulerian(PiecewisePeriodicSolution("bar", 1.0, 3.0, 1.0, sigma))
        y = np.linspace(-2.0, 2.0, 41)
        err = max(
            max(float(np.abs(single.rho(t, y) - 1.0 / t).max()), float(np.abs(single.velocity(t, y) - y / t).max()))
            for t in T_GRID
        )
        c.check("single_phase", err, err < 1e-12, "< 1e-12")


def test_criterion_09_weak_rates(criterion):
    n_list = [4, 8, 16, 32]
    tests = random_tests(1, 5, DEFAULT_SEED)
    sigma = build_sigma(PAIR, [0.0, 1.0])
    bar = bar_solution(PAIR, 0.5, sigma)
    euler = ns_oscillatory(PAIR, 0.5, build_pressure(PAIR, [0.0, 1.0]))
    gas = gas_oscillatory(gas_interface_construct(PAIR, 1.0, 1.0, [0.2]), 0.5)
    with criterion(9, "weak-convergence rates") as c:
        rep = weak_convergence_rate(lambda n: rescale(bar, n), ["u", "v_x"], tests, n_list, strong="v")
        rho = weak_convergence_rate(lambda n: rescale(euler, n), ["rho"], tests, n_list, strong=None)
        theta = weak_convergence_rate(lambda n: rescale(gas, n), ["theta"], tests, n_list, strong=None)
        slopes = {**rep.slopes, **rho.slopes, **theta.slopes}
        for name in ("u", "rho", "theta", "v_x", "v_L2"):
            c.check(f"slope_{name}", slopes[name], slopes[name] <= -0.9, "<= -0.9")
        phi = TestFunction(1.75, (0.0,), 0.2, (0.5,))
        gaps = [sigma_composition_gap(rescale(bar, n), sigma, phi) for n in n_list]
        c.check("sigma_gap_min", min(gaps), min(gaps) >= 0.1, ">= 0.1")


def test_criterion_10_fd_cross_validation(criterion):
    sigma = build_sigma(PAIR, [0.0, 1.0])
    start = time.perf_counter()
    with criterion(10, "finite-difference cross-validation") as c:
        sol = rescale(bar_solution(PAIR, 0.5, sigma), 2)
        grid = Grid1D(512, t_span=(1.0, 2.0))
        traj = solve_bar(sigma, 1.0, initial_from_solution(sol, grid), grid, snapshot_times=np.linspace(1, 2, 11))
        m = oscillation_metric(traj.u[-1], traj.times[-1], PAIR.a, PAIR.b)
        dev = max(abs(w - 0.5) for w in m.weights)
        c.check("weights_deviation", dev, dev <= 0.1, "<= 0.1")
        std = stress_deviation(traj)
        c.check("stress_std", std, std < 5e-2, "< 5e-2")
        _, order = convergence_order((16, 32, 64))
        c.check("mms_order", order, order >= 1.8, ">= 1.8")
        elapsed = time.perf_counter() - start
        c.check("runtime_s", elapsed, elapsed <= 300.0, "<= 300")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
