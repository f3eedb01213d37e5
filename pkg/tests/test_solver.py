import math

import numpy as np
import pytest

from heathsym import expr as ex
from heathsym import solutions as so
from heathsym import solver as sv
from heathsym.model import HeatSourceModel

PI = math.pi
HEAT0 = HeatSourceModel(ex.parse("0*u"))
SIN_EXACT = f"exp(-({PI})^2*tau)*sin({PI}*x)"


def sin_init(x):
    return math.sin(PI * x)


def test_grid_invariants():
    g = sv.GridSpec(0.0, 1.0, 64, 0.0, 0.1, 100)
    assert abs(g.h - 1.0 / 65) < 1e-15
    assert abs(g.k - 0.001) < 1e-15
    assert g.nodes().size == 66
    for bad in (
        dict(x_lo=0.0, x_hi=1.0, nx=4, tau0=0.0, tau1=1.0, ntau=10),
        dict(x_lo=0.0, x_hi=1.0, nx=16, tau0=0.0, tau1=1.0, ntau=2),
        dict(x_lo=1.0, x_hi=0.0, nx=16, tau0=0.0, tau1=1.0, ntau=10),
        dict(x_lo=0.0, x_hi=1.0, nx=16, tau0=1.0, tau1=0.0, ntau=10),
    ):
        with pytest.raises(ValueError):
            sv.GridSpec(**bad)


def test_snapshot_finite_and_positivity():
    with pytest.raises(ValueError):
        sv.FieldSnapshot(0.0, np.array([1.0, float("nan")]))
    with pytest.warns(sv.PositivityWarning):
        sv.FieldSnapshot(0.0, np.array([1.0, -0.5]))
    snap = sv.FieldSnapshot(0.0, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        snap.phi[0] = 9.0  # frozen


def test_stability_guard():
    g = sv.GridSpec(0.0, 1.0, 128, 0.0, 0.1, 100)
    with pytest.raises(ValueError) as ei:
        sv.SchemeConfig(scheme=sv.EXPLICIT).validate(g)
    assert "h^2/2" in str(ei.value)
    sv.SchemeConfig(scheme=sv.CN_IMEX).validate(g)  # no guard for CN


def test_pure_heat_benchmark_cn():
    g = sv.GridSpec(0.0, 1.0, 128, 0.0, 0.1, 200)
    snaps = sv.solve(HEAT0, sin_init, g, sv.SchemeConfig(), boundary=SIN_EXACT)
    assert len(snaps) == 201
    norms = sv.error_norms(snaps, SIN_EXACT, g)
    assert norms[-1]["Linf"] < 1e-3


def test_pure_heat_benchmark_explicit():
    g = sv.GridSpec(0.0, 1.0, 32, 0.0, 0.05, 200)
    scheme = sv.SchemeConfig(scheme=sv.EXPLICIT)
    scheme.validate(g)
    snaps = sv.solve(HEAT0, sin_init, g, scheme, boundary=SIN_EXACT)
    assert sv.error_norms(snaps, SIN_EXACT, g)[-1]["Linf"] < 1e-3


def test_explicit_maximum_principle():
    # zero source, static Dirichlet: the field stays inside the initial and
    # boundary bounds under the stability guard
    g = sv.GridSpec(0.0, 1.0, 32, 0.0, 0.05, 200)
    scheme = sv.SchemeConfig(scheme=sv.EXPLICIT, boundary=sv.BOUNDARY_STATIC)
    snaps = sv.solve(HEAT0, lambda x: 0.5 + 0.4 * math.sin(3 * x), g, scheme)
    lo = min(float(s.phi.min()) for s in snaps)
    hi = max(float(s.phi.max()) for s in snaps)
    assert lo >= 0.5 - 1e-12
    assert hi <= 0.9 + 1e-12


def test_instability_reported():
    g = sv.GridSpec(0.0, 1.0, 16, 0.0, 5.0, 50)
    with pytest.raises(sv.InstabilityError):
        sv.solve(
            HeatSourceModel(ex.parse("100*u")),
            lambda x: 1.0,
            g,
            sv.SchemeConfig(boundary=sv.BOUNDARY_STATIC),
        )


def test_error_norms_trivia():
    g = sv.GridSpec(0.0, 1.0, 16, 0.0, 0.1, 10)
    snaps = sv.solve(HEAT0, sin_init, g, sv.SchemeConfig(), boundary=SIN_EXACT)
    same = sv.error_norms(snaps[:1], SIN_EXACT, g)
    assert same[0]["Linf"] < 1e-15
    off = sv.error_norms(snaps[:1], f"({SIN_EXACT}) + 0.25", g)
    assert abs(off[0]["Linf"] - 0.25) < 1e-12


def test_single_cn_step_local_error():
    # starting from the exact field, one CN step has a tiny local error
    g = sv.GridSpec(0.0, 1.0, 128, 0.0, 0.002, 4)
    snaps = sv.solve(HEAT0, sin_init, g, sv.SchemeConfig(), boundary=SIN_EXACT)
    err = sv.error_norms(snaps[:2], SIN_EXACT, g)[1]["Linf"]
    assert err < 1e-6


def test_convergence_pure_heat_cn():
    case = sv.ConvergenceCase(
        HEAT0, SIN_EXACT, sv.GridSpec(0.0, 1.0, 16, 0.0, 0.1, 40), sv.SchemeConfig()
    )
    rep = sv.convergence_study(case, [16, 32, 64, 128])
    assert 1.8 <= rep["order"] <= 2.2
    assert rep["monotone"]


def test_convergence_pure_heat_explicit():
    case = sv.ConvergenceCase(
        HEAT0, SIN_EXACT, sv.GridSpec(0.0, 1.0, 16, 0.0, 0.05, 60),
        sv.SchemeConfig(scheme=sv.EXPLICIT),
    )
    rep = sv.convergence_study(case, [16, 32, 64])
    assert 1.8 <= rep["order"] <= 2.2


def test_convergence_needs_three_levels():
    case = sv.ConvergenceCase(
        HEAT0, SIN_EXACT, sv.GridSpec(0.0, 1.0, 16, 0.0, 0.1, 40), sv.SchemeConfig()
    )
    with pytest.raises(ValueError, match="3 levels"):
        sv.convergence_study(case, [16, 32])


def _barrier_case(K=1.0):
    bs = so.barrier_solution(1.0, 1.0, 0.05, 0.9, K, 1.0, 1.0)
    ref = ex.rename(bs.heat.u, {"tau": "t"})
    return bs, ref


def test_manufactured_interior_order():
    # log-linear source with quadratic space profile, fixed strip, exact
    # Dirichlet data from the closed form
    phif = so.terminal_phi_form(1.0, 1.0, 1.0)
    grid = sv.GridSpec(-1.0, 1.0, 32, -0.5, -0.35, 60)
    case = sv.ConvergenceCase(
        HeatSourceModel(phif.model.fhat),
        ex.rename(phif.u, {"tau": "t"}),
        grid,
        sv.SchemeConfig(),
    )
    rep = sv.convergence_study(case, [16, 32, 64, 128])
    assert rep["order"] >= 1.8


def test_barrier_run_accuracy():
    bs, ref = _barrier_case()
    grid = sv.GridSpec(0.3, 2.5, 256, -0.5, 0.0, 400)
    snaps = sv.solve_barrier(bs.heat.model, bs.spec, grid, sv.SchemeConfig(), ref)
    norms = sv.error_norms(
        snaps, ref, grid, mask=lambda tau: sv.barrier_mask(bs.spec, grid, tau)
    )
    assert norms[-1]["Linf"] < 1e-2


def test_barrier_moving_order():
    bs, ref = _barrier_case()
    case = sv.ConvergenceCase(
        bs.heat.model, ref, sv.GridSpec(0.3, 2.5, 32, -0.5, 0.0, 60),
        sv.SchemeConfig(), barrier=bs.spec,
    )
    rep = sv.convergence_study(case, [32, 64, 128])
    assert rep["order"] >= 1.0


def test_barrier_exits_grid():
    bs, ref = _barrier_case()
    grid = sv.GridSpec(0.95, 2.5, 32, -0.5, 0.0, 60)
    with pytest.raises(sv.BarrierExitsGridError, match="barrier exits grid"):
        sv.solve_barrier(bs.heat.model, bs.spec, grid, sv.SchemeConfig(), ref)


def test_map_back_to_original_picture():
    bs, ref = _barrier_case()
    grid = sv.GridSpec(0.3, 2.5, 128, -0.5, 0.0, 200)
    snaps = sv.solve_barrier(bs.heat.model, bs.spec, grid, sv.SchemeConfig(), ref)
    mask = lambda tau: sv.barrier_mask(bs.spec, grid, tau)
    mapped = sv.map_to_heath(snaps, grid, 1.0, 1.0, mask=mask)
    tv, xs, us = mapped[-1]
    worst = max(
        abs(us[i] - bs.heath.evaluate(float(xs[i]), tv)) for i in range(xs.size)
    )
    assert worst < 1e-2


def test_csv_rows_deterministic_order():
    g = sv.GridSpec(0.0, 1.0, 16, 0.0, 0.1, 10)
    snaps = sv.solve(HEAT0, sin_init, g, sv.SchemeConfig(), boundary=SIN_EXACT)
    rows = sv.csv_rows(snaps, g, stride=5)
    assert len(rows) == 3 * 18  # 3 snapshots, 18 nodes
    taus = [r[0] for r in rows]
    assert taus == sorted(taus)
