import json

import numpy as np
import pytest

from oscilab.constructors import (
    PiecewisePeriodicSolution,
    YoungMeasure,
    bar_solution,
    gas_oscillatory,
    lagrangian_to_eulerian,
    ns_oscillatory,
    rescale,
    twinning_dynamic,
    twinning_steady,
    uniform_shear_motion,
    viscoplastic_solution,
    weak_limits,
)
from oscilab.gas import gas_interface_construct
from oscilab.materials import (
    LaminatePair,
    MaterialLaw,
    PhasePair,
    StoredEnergy,
    build_phi,
    build_shear_energy,
)

T = np.linspace(1.0, 2.0, 9)
X = np.linspace(-0.99, 0.99, 57)


@pytest.fixture(scope="module")
def bar():
    from oscilab.materials import build_sigma

    return bar_solution(PhasePair(), 0.5, build_sigma(PhasePair(), [0.0, 1.0]))


def test_bar_fields(bar):
    tt, xx = np.meshgrid(T, [0.1, 0.3, 0.6, 0.9], indexing="ij")
    F = bar.fields(tt, xx)
    assert np.allclose(F["u"][:, :2], tt[:, :2] * 1.0)
    assert np.allclose(F["u"][:, 2:], tt[:, 2:] * 3.0)
    # v is continuous and equals c x at cell boundaries
    assert bar.c == 2.0
    assert np.allclose(bar.v(T, np.zeros_like(T)), 0.0)
    assert np.allclose(bar.v(1.5, 1.0), 2.0)
    assert np.allclose(bar.v(1.5, 0.5), 0.5)
    assert bar.period == 1.0 and bar.equations == ("kinematic", "momentum")


def test_bar_total_stress_constant_in_space(bar):
    for t in T:
        S = bar.fields(t, X)["S"]
        assert np.ptp(S) < 1e-12


@pytest.mark.parametrize("fraction", [0.25, 0.5, 0.8])
def test_bar_rankine_hugoniot(fraction, sigma):
    sol = bar_solution(PhasePair(), fraction, sigma)
    res = sol.rh_residuals()
    assert set(res) == {"velocity", "stress"}
    assert max(res.values()) < 1e-10


def test_bar_rejects_monotone_law():
    law = MaterialLaw.polynomial("sigma", [0.0, 1.0], (0.5, 9.0))
    with pytest.raises(ValueError, match="identity"):
        bar_solution(PhasePair(), 0.5, law)
    with pytest.raises(ValueError):
        bar_solution(PhasePair(), 0.5, MaterialLaw.polynomial("phi", [1.0], (0.5, 9.0)))


def test_monotone_laminate_violates_jump_condition():
    law = MaterialLaw.polynomial("sigma", [0.0, 1.0], (0.5, 9.0))
    sol = PiecewisePeriodicSolution("bar", 1.0, 3.0, 0.5, law)
    assert sol.rh_residuals()["stress"] > 1.0


def test_rescale(bar):
    s4 = rescale(bar, 4)
    assert s4.mode == 4 and s4.period == 0.25
    assert np.allclose(s4.u(1.3, [0.05, 0.2]), [1.3, 3.9])
    # y_n(t, x) = y(t, n x) / n
    assert np.allclose(s4.fields(1.3, X)["y"], bar.fields(1.3, 4 * X)["y"] / 4)
    assert (len(bar.interfaces()), len(s4.interfaces())) == (3, 15)
    with pytest.raises(ValueError):
        rescale(bar, 0)


def test_breaks_and_interfaces_agree(bar):
    s = rescale(bar, 3)
    pos = sorted(i.position for i in s.interfaces(-1, 1))
    assert np.allclose(pos, s.breaks(1.7, -1, 1))


def test_young_measure_and_limits(bar):
    ym = bar.young_measure()
    assert ym.weights == (0.5, 0.5) and ym.supports(2.0) == [2.0, 6.0]
    assert ym.mean(1.5) == pytest.approx(bar.weak_limit("u", 1.5, 0.0))
    assert ym.pushforward(lambda u: u**2, 1.0) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        YoungMeasure((0.7, 0.7), (1.0, 3.0))
    with pytest.raises(ValueError):
        bar.weak_limit("rho", 1.0, 0.0)


def test_weak_limits_dictionary(sigma):
    wl = weak_limits(PhasePair(), 0.5, sigma)
    assert wl["v_x"] == 2.0 and wl["u"](1.5) == 3.0 and wl["v"](0.25) == 0.5
    # averaging the nonlinear law is not the law of the average
    t = np.linspace(1, 2, 11)
    assert np.abs(wl["sigma_of_u"](t) - wl["sigma_of_limit"](t)).max() > 0.1


def test_csv_and_json(bar):
    text = bar.to_csv([1.0, 2.0], [0.0, 0.25, 0.75])
    lines = text.strip().split("\n")
    assert lines[0] == "t,x,phase_id,u,v,theta" and len(lines) == 7
    assert lines[2].split(",")[:4] == ["1.0", "0.25", "0", "1.0"]
    d = json.loads(bar.to_json())
    assert d["mean_rate"] == 2.0 and d["system"] == "bar"


@pytest.mark.parametrize("q", [0.5, 1.0, 2.0])
def test_viscoplastic(q):
    phi = build_phi(PhasePair(), q, [3.0])
    sol = viscoplastic_solution(PhasePair(), 0.5, phi, q)
    assert sol.mu == 0.0
    assert max(sol.rh_residuals().values()) < 1e-10


def test_viscoplastic_rejects_wrong_exponent():
    phi = build_phi(PhasePair(), 1.0, [3.0])
    with pytest.raises(ValueError):
        viscoplastic_solution(PhasePair(), 0.5, phi, 2.0)


@pytest.fixture(scope="module")
def gas_sol():
    return gas_oscillatory(gas_interface_construct(PhasePair(), 1.0, 1.0, [0.2]), 0.5)


def test_gas_solution(gas_sol):
    res = gas_sol.rh_residuals()
    assert set(res) == {"velocity", "stress", "energy_flux"}
    assert max(res.values()) < 1e-8
    th = gas_sol.temperature(T, np.full_like(T, 0.25))
    assert np.all(th > 0)
    assert gas_sol.n_eq == 3
    mid = gas_sol.weak_limit("theta", 1.5, 0.0)
    assert mid == pytest.approx(0.5 * (gas_sol.temperature(1.5, 0.25) + gas_sol.temperature(1.5, 0.75)))


def test_temperature_only_for_gas(bar):
    with pytest.raises(ValueError):
        bar.temperature(1.0, 0.0)


@pytest.fixture(scope="module")
def ns(pressure):
    return ns_oscillatory(PhasePair(), 0.5, pressure)


def test_ns_solution(ns):
    assert max(ns.rh_residuals().values()) < 1e-10
    t = 1.4
    rho = ns.fields(t, X)["rho"]
    assert set(np.round(rho * t, 12)) <= {1.0, round(1 / 3, 12)}
    assert np.allclose(ns.fields(t, X)["u"], X / t)
    assert ns.period == 2.0


def test_ns_weak_limits(ns):
    assert ns.weak_limit("rho", 1.5, 0.3) == pytest.approx(1 / 3.0)
    assert ns.weak_limit("rho_lagrangian", 1.5, 0.3) == pytest.approx(0.5 / 1.5 + 0.5 / 4.5)


def test_ns_rejects_monotone_pressure():
    with pytest.raises(ValueError):
        ns_oscillatory(PhasePair(), 0.5, MaterialLaw.polynomial("pressure", [0.0, 1.0], (0.05, 2.0)))


@pytest.mark.parametrize("n", [1, 3])
@pytest.mark.parametrize("fraction", [0.5, 0.3])
def test_lagrangian_to_eulerian_matches_ns(n, fraction, sigma, pressure):
    lag = rescale(bar_solution(PhasePair(), fraction, sigma), n)
    eul = lagrangian_to_eulerian(lag)
    ns = ns_oscillatory(PhasePair(), fraction, pressure, n=n)
    for t in (1.0, 1.5, 2.0):
        y = np.linspace(-1.9, 1.9, 301)
        br = ns.breaks(t, -2, 2)
        off = np.min(np.abs(y[:, None] - br[None, :]), axis=1) > 1e-9
        y = y[off]
        assert np.abs(eul.rho(t, y) - ns.fields(t, y)["rho"]).max() < 1e-12
        assert np.abs(eul.velocity(t, y) - y / t).max() < 1e-12
        x = eul.lagrangian_point(t, y)
        assert np.abs(lag.fields(t, x)["y"] - y).max() < 1e-12


def test_lagrangian_to_eulerian_single_phase(sigma):
    sol = PiecewisePeriodicSolution("bar", 1.0, 3.0, 1.0, sigma)
    eul = lagrangian_to_eulerian(sol)
    y = np.linspace(-1, 1, 11)
    assert np.allclose(eul.rho(1.5, y), 1 / 1.5, rtol=0, atol=1e-12)


def test_lagrangian_to_eulerian_rejects_gas(gas_sol):
    with pytest.raises(ValueError):
        lagrangian_to_eulerian(gas_sol)


def test_solution_validation(sigma):
    with pytest.raises(ValueError):
        PiecewisePeriodicSolution("plasma", 1, 3, 0.5, sigma)
    with pytest.raises(ValueError):
        PiecewisePeriodicSolution("bar", 1, 3, 0.0, sigma)
    with pytest.raises(ValueError):
        PiecewisePeriodicSolution("gas", 1, 3, 0.5, sigma)


# --- multi-d ---


def test_uniform_shear_motion():
    F0, F1 = np.array([[1.0, 0.5], [0.0, 1.0]]), np.eye(2)
    m = uniform_shear_motion(F0, F1)
    X = np.array([[1.0, 2.0], [0.5, -1.0]])
    assert np.allclose(m.y(2.0, X), X @ (2 * F0 + F1).T)
    assert np.allclose(m.v(2.0, X), X @ F0.T)
    assert np.allclose(m.F(2.0), 2 * F0 + F1)


@pytest.fixture(scope="module")
def twin():
    pair = LaminatePair.default()
    return twinning_dynamic(pair, build_shear_energy(pair, (0.0, 1.0)))


def test_twinning_dynamic(twin):
    res = twin.rh_residuals()
    assert max(res.values()) < 1e-10
    assert twin.n_eq == 6 and twin.equations[-1] == "v1"
    X = np.array([[0.2, 0.4], [0.7, -0.3]])
    F = twin.fields(1.5, X)
    assert np.allclose(F["F"][0], 1.5 * np.array([[1.0, 0.0], [1.0, 1.0]]))
    assert np.allclose(F["F"][1], 1.5 * np.array([[1.0, 0.0], [3.0, 1.0]]))
    # velocity is continuous at the cell interface through the origin
    eps = 1e-12
    v = twin.fields(1.5, np.array([[-eps, 0.3], [eps, 0.3]]))["v"]
    assert np.allclose(v[0], v[1], atol=1e-10)


def test_twinning_dynamic_rejects_convex_energy():
    with pytest.raises(ValueError):
        twinning_dynamic(LaminatePair.default(), StoredEnergy.quadratic(1.0))


def test_twinning_steady():
    W = StoredEnergy.from_h([1.0, 0.0, -2.0, 0.0, 1.0], [0.0, 1.0], [1.0, 0.0])
    F_minus = np.array([[1.0, 0.0], [-1.0, 1.0]])
    # wells of h at shear -1 and +1: a jump of 2 e2 (x) e1
    sol = twinning_steady(F_minus, [0.0, 2.0], [1.0, 0.0], W)
    assert sol.static
    assert max(sol.rh_residuals().values()) < 1e-12
    assert np.all(sol.fields(1.5, np.array([[0.3, 0.0]]))["v"] == 0)
    with pytest.raises(ValueError):
        twinning_steady(F_minus, [0.0, 1.5], [1.0, 0.0], W)


def test_twinning_descriptor(twin):
    d = twin.descriptor()
    assert d["system"] == "twinning" and d["nu"] == [1.0, 0.0]
