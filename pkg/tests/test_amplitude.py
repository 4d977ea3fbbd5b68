import numpy as np
import pytest
from scipy.linalg import expm

from oscilab.amplitude import (
    AmplitudeState,
    adiabatic_amplitude,
    energy_identity_residual,
    integrate_amplitude,
    mode_dissipation,
    mode_energy,
    viscoelastic_roots,
)
from oscilab.dispersion import LinearTVParams

P = LinearTVParams(1.0, 1.0, 2.0, 1.0, 1)
INIT = AmplitudeState(1.0, 0.0, 0.5)


@pytest.mark.parametrize("method, tol", [("rk4", 1e-10), ("trapezoidal", 1e-5)])
def test_matches_matrix_exponential(method, tol):
    traj = integrate_amplitude(P, INIT, 1.0, 1e-3, method)
    exact = expm(P.matrix() * traj.t[-1]) @ INIT.vector()
    assert np.allclose(traj.states[-1], exact, atol=tol)
    assert traj.order == (4 if method == "rk4" else 2)


def test_trapezoidal_is_second_order():
    errs = []
    for dt in (1e-2, 5e-3):
        traj = integrate_amplitude(P.with_mode(2), INIT, 1.0, dt, "trapezoidal")
        exact = expm(P.with_mode(2).matrix() * 1.0) @ INIT.vector()
        errs.append(np.abs(traj.states[-1] - exact).max())
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_rk4_stability_guard():
    with pytest.raises(ValueError, match="stability"):
        integrate_amplitude(P.with_mode(10), INIT, 1.0, 0.01, "rk4")
    # trapezoidal has no guard
    integrate_amplitude(P.with_mode(10), INIT, 0.1, 0.01, "trapezoidal")


@pytest.mark.parametrize("kw", [dict(dt=0.0), dict(method="euler"), dict(t_end=0.0)])
def test_argument_validation(kw):
    args = dict(t_end=1.0, dt=1e-3, method="rk4")
    args.update(kw)
    with pytest.raises(ValueError):
        integrate_amplitude(P, INIT, **args)


def test_energy_decreases_by_dissipation():
    traj = integrate_amplitude(P, INIT, 2.0, 1e-3, "trapezoidal")
    E = mode_energy(traj.states, P)
    assert np.all(np.diff(E) <= 1e-15)
    D = mode_dissipation(traj.states, P)
    assert np.all(D >= 0)
    # integrated balance E(0) - E(T) = int D dt, trapezoid rule
    assert E[0] - E[-1] == pytest.approx(np.trapezoid(D, traj.t), rel=1e-5)


def test_energy_of_known_state():
    s = np.array([[1.0, 2.0, 3.0]])
    p = LinearTVParams(2.0, 0.0, 1.0, 1.0, 2)
    assert mode_energy(s, p)[0] == pytest.approx(0.5 * 4 + 0.5 * 2 * 4 + 0.5 * 4 * 9)
    assert mode_dissipation(s, p)[0] == pytest.approx(1 * 4 * 4 + 1 * 16 * 9)


@pytest.mark.parametrize("n", [1, 2])
def test_energy_identity_residual_small(n):
    traj = integrate_amplitude(P.with_mode(n), INIT, 1.0, 1e-4, "trapezoidal")
    assert energy_identity_residual(traj, P.with_mode(n)) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_energy_identity_residual_second_order(n):
    r = [
        energy_identity_residual(integrate_amplitude(P.with_mode(n), INIT, 1.0, dt, "trapezoidal"), P.with_mode(n))
        for dt in (2e-4, 1e-4)
    ]
    assert r[0] / r[1] == pytest.approx(4.0, rel=0.1)


def test_energy_identity_needs_three_samples():
    traj = integrate_amplitude(P, INIT, 1e-3, 1e-3, "rk4")
    with pytest.raises(ValueError):
        energy_identity_residual(traj, P)


@pytest.mark.parametrize("lam, mu, n", [(1.0, 3.0, 1), (1.0, 1.0, 10), (2.0, 0.5, 1), (1e-8, 1.0, 1)])
def test_viscoelastic_roots(lam, mu, n):
    rm, rp = viscoelastic_roots(lam, mu, n)
    for r in (rm, rp):
        assert abs(r * r + mu * n * n * r + lam * n * n) < 1e-12 * max(1.0, abs(r) ** 2)
    assert rm.real <= rp.real


def test_viscoelastic_roots_no_cancellation():
    _, rp = viscoelastic_roots(1e-8, 1.0, 1)
    assert rp.real == pytest.approx(-1e-8, rel=1e-12)


def test_adiabatic_amplitude():
    amp = adiabatic_amplitude(2.0, 3.0, 1, coupling=0.7)
    assert amp.b_factor == pytest.approx(-0.7)
    assert amp.b(2.0) == pytest.approx(-1.4)
    assert (amp.rho_minus, amp.rho_plus) == viscoelastic_roots(2.0, 3.0, 1)
    with pytest.raises(ValueError):
        adiabatic_amplitude(0.0, 1.0, 1)
