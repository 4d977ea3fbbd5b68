import numpy as np
import pytest

from oscilab.constructors import bar_solution, rescale
from oscilab.fdsolver import (
    BarState,
    CFLError,
    Grid1D,
    convergence_order,
    initial_from_solution,
    manufactured_run,
    oscillation_metric,
    solve_bar,
    stress_deviation,
)
from oscilab.materials import MaterialLaw, PhasePair


def test_grid_geometry():
    g = Grid1D(8)
    assert g.dx == 0.125
    assert np.allclose(g.centres - g.nodes, 0.0625)
    assert g.stable_dt(np.array([2.0, 4.0]), 1.0) == pytest.approx(0.4 * 0.125**2 * 2.0)
    with pytest.raises(ValueError):
        Grid1D(2)
    with pytest.raises(ValueError):
        Grid1D(8, t_span=(2.0, 1.0))
    with pytest.raises(ValueError):
        Grid1D(32).check_resolution(4)


def test_cfl_violation_raises(sigma):
    sol = bar_solution(PhasePair(), 0.5, sigma)
    grid = Grid1D(64, dt=1e-3)
    with pytest.raises(CFLError):
        solve_bar(sigma, 1.0, initial_from_solution(sol, grid), grid)


def test_initial_data_validation(sigma):
    grid = Grid1D(16)
    with pytest.raises(ValueError):
        solve_bar(sigma, 1.0, BarState(np.ones(15), np.zeros(16)), grid)
    with pytest.raises(ValueError):
        solve_bar(sigma, 1.0, BarState(-np.ones(16), np.zeros(16)), grid)


def test_uniform_extension_is_preserved(sigma):
    grid = Grid1D(32, t_span=(1.0, 1.1))
    init = BarState(np.full(32, 2.0), np.zeros(32), drift=2.0)
    traj = solve_bar(sigma, 1.0, init, grid)
    t = traj.times[-1]
    assert t == pytest.approx(1.1)
    assert np.allclose(traj.u[-1], 2.0 * t, rtol=1e-12)
    assert np.abs(traj.w[-1]).max() < 1e-12


@pytest.fixture(scope="module")
def laminate_run():
    from oscilab.materials import build_sigma

    sigma = build_sigma(PhasePair(), [0.0, 1.0])
    sol = bar_solution(PhasePair(), 0.5, sigma)
    grid = Grid1D(64, t_span=(1.0, 1.5))
    traj = solve_bar(sigma, 1.0, initial_from_solution(sol, grid), grid, snapshot_times=[1.25, 1.5])
    return sol, grid, traj


def test_laminate_is_preserved(laminate_run):
    sol, grid, traj = laminate_run
    for k, t in enumerate(traj.times):
        exact = sol.u(np.full(grid.N, t), grid.centres)
        assert np.abs(traj.u[k] - exact).max() < 1e-10
    assert stress_deviation(traj) < 1e-10
    assert traj.snapshot(1.26) == 1
    assert traj.steps > 0


def test_laminate_oscillation_metric(laminate_run):
    _, _, traj = laminate_run
    t = traj.times[-1]
    m = oscillation_metric(traj.u[-1], t, 1.0, 3.0)
    assert m.weights == pytest.approx((0.5, 0.5))
    assert m.total_variation == pytest.approx(2 * 2 * t, rel=1e-10)
    assert m.targets == (t, 3 * t)


def test_csv_export(laminate_run):
    _, grid, traj = laminate_run
    lines = traj.to_csv().strip().split("\n")
    assert lines[0] == "t,x,u,v,S"
    assert len(lines) == 1 + grid.N * len(traj.times)


def test_rescaled_initial_data(sigma):
    sol = rescale(bar_solution(PhasePair(), 0.5, sigma), 2)
    grid = Grid1D(64)
    init = initial_from_solution(sol, grid)
    assert init.drift == 2.0
    assert np.allclose(init.velocity(grid.nodes), sol.v(np.ones(64), grid.nodes))
    with pytest.raises(ValueError):
        initial_from_solution(rescale(sol, 4), Grid1D(64))


def test_positivity_loss_is_reported():
    law = MaterialLaw.polynomial("sigma", [0.0, 1.0], (-5.0, 5.0))
    grid = Grid1D(16, t_span=(1.0, 2.0))
    u = np.full(16, 0.05)
    w = 0.5 * np.sin(2 * np.pi * grid.nodes)
    with pytest.raises(ValueError, match="positivity|collapsing"):
        solve_bar(law, 0.01, BarState(u, w, drift=-0.2), grid)


def test_manufactured_solution_converges():
    errs, order = convergence_order((16, 32, 64))
    assert all(e1 < e0 for e0, e1 in zip(errs, errs[1:]))
    assert order >= 1.8
    assert manufactured_run(16) == pytest.approx(errs[0])
