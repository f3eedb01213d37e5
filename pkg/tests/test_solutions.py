import math

import numpy as np
import pytest

from heathsym import expr as ex
from heathsym import solutions as so
from heathsym.model import heath_to_heat

A_, B_, T_ = 1.0, 1.0, 1.0  # a, b, T used throughout


def test_terminal_solution_residual_and_datum():
    ts = so.terminal_solution(A_, B_, T_)
    assert ts.residual() < 1e-7
    for xv in np.linspace(-1, 1, 9):
        assert abs(ts.evaluate(float(xv), T_) - 1.0) < 1e-9


def test_terminal_singular_time():
    ts = so.terminal_solution(A_, B_, T_)
    sing = ts.boundary["singular_time"]
    assert abs(sing - (T_ - 2 * math.log(2.0) / B_**2)) < 1e-14
    # the box stays on the safe side of the singular time
    assert ts.box["t"][0] > sing


def test_terminal_guard_rejects_singular_sample():
    ts = so.terminal_solution(A_, B_, T_)
    sing = ts.boundary["singular_time"]
    with pytest.raises(so.SampleDomainError):
        ts.residual([(0.0, sing)])


def test_reduced_profile_solves_displayed_ode():
    F = so.terminal_reduction_F(A_, B_, T_)
    Tp = -B_ * B_ * T_ / 2.0
    taus = np.linspace(Tp, Tp + 0.2, 9)
    assert so.terminal_ode_residual(F, A_, B_, T_, taus) < 1e-9


def test_phi_form_solves_heat_picture_and_terminal_datum():
    phif = so.terminal_phi_form(A_, B_, T_)
    assert phif.residual() < 1e-9
    Tp = -B_ * B_ * T_ / 2.0
    for xv in np.linspace(-1, 1, 9):
        want = math.exp(-(A_ * xv + 1.0) / B_**2)
        got = ex.evaluate(phif.u, {"x": float(xv), "t": Tp})
        assert abs(got - want) < 1e-9


def test_wrong_constant_breaks_terminal_datum():
    bad = so.terminal_phi_form(A_, B_, T_, c=1.234)
    Tp = -B_ * B_ * T_ / 2.0
    worst = max(
        abs(ex.evaluate(bad.u, {"x": float(xv), "t": Tp})
            - math.exp(-(A_ * xv + 1.0)))
        for xv in np.linspace(-1, 1, 5)
    )
    assert worst > 1e-3


def test_pictures_agree_for_terminal_solution():
    ts = so.terminal_solution(A_, B_, T_)
    phif = so.terminal_phi_form(A_, B_, T_)
    for xv in np.linspace(-0.8, 0.8, 5):
        for tv in np.linspace(ts.box["t"][0], T_, 5):
            tauv = -B_ * B_ / 2 * tv
            pv = ex.evaluate(phif.u, {"x": float(xv), "t": tauv})
            uv = -B_ * B_ * math.log(pv) - A_ * xv
            assert abs(uv - ts.evaluate(float(xv), float(tv))) < 1e-9


def test_barrier_curve_general_ode():
    A, B = 1.0, -3.0
    H = so.barrier_H_general(A_, B_, A, B, 1, 1, 1, 1)
    taus = np.linspace(-1, 1, 9)
    assert so.barrier_H_ode_residual(H, A, B, 1, 1, 1, taus) < 1e-10


def test_barrier_datum_general_ode():
    A, B = 1.0, -3.0
    R = so.barrier_R_general(A_, B_, A, B, 1, 1, 1, 1, 1, 1)
    taus = np.linspace(-1, 1, 9)
    assert so.barrier_R_ode_residual(R, A_, B_, A, B, 1, 1, 1, 1, 1, taus) < 1e-10


def test_barrier_requires_real_exponent():
    with pytest.raises(ValueError):
        so.barrier_H_general(A_, B_, 1.0, 1.0, 1, 1, 1, 1)  # A^2 - 16B < 0


def test_exponential_barrier_matches_general_forms():
    bs = so.barrier_solution(A_, B_, 0.05, 0.9, 100.0, T_, 1.0)
    p = bs.spec.params
    Hg = so.barrier_H_general(A_, B_, p["A"], p["B"], p["c1"], p["c3"], p["c4"], p["c5"])
    Rg = so.barrier_R_general(A_, B_, p["A"], p["B"], p["c1"], p["c2"], p["c3"],
                              p["c4"], p["c5"], p["c6"])
    Tp = -B_ * B_ * T_ / 2.0
    for tauv in np.linspace(Tp, Tp + 0.4, 9):
        env = {"t": float(tauv)}
        hv = ex.evaluate(ex.rename(Hg, {"tau": "t"}), env)
        hs = ex.evaluate(ex.rename(bs.spec.H, {"tau": "t"}), env)
        rv = ex.evaluate(ex.rename(Rg, {"tau": "t"}), env)
        rs = ex.evaluate(ex.rename(bs.spec.R, {"tau": "t"}), env)
        assert abs(hv - hs) < 1e-12
        assert abs(rv - rs) < 1e-12


def test_barrier_solution_residuals_and_boundary():
    bs = so.barrier_solution(A_, B_, 0.05, 0.9, 100.0, T_, 1.0)
    assert bs.heath.residual() < 1e-7
    assert bs.heat.residual() < 1e-7
    ts = np.linspace(T_ - 1.0, T_, 9)
    assert bs.boundary_residual(ts) < 1e-9
    Tp = -B_ * B_ * T_ / 2.0
    taus = np.linspace(Tp, Tp + 0.4, 9)
    assert bs.phi_boundary_residual(taus) < 1e-10
    # barrier curve hits beta*K at the terminal time
    H_t = ex.rename(bs.spec.H_of_t(B_), {"tau": "t"})
    assert abs(ex.evaluate(H_t, {"t": T_}) - 0.9 * 100.0) < 1e-10


def test_barrier_invariance_and_picture_consistency():
    bs = so.barrier_solution(A_, B_, 0.05, 0.9, 100.0, T_, 1.0)
    Tp = -B_ * B_ * T_ / 2.0
    pts = [(float(xv), float(tv)) for xv in np.linspace(90, 100, 5)
           for tv in np.linspace(T_ - 0.5, T_, 4)]
    assert bs.picture_consistency(pts) < 1e-10
    pts_tau = [(float(xv), float(tauv)) for xv in np.linspace(90, 100, 5)
               for tauv in np.linspace(Tp, Tp + 0.3, 4)]
    assert bs.invariance_residual(pts_tau) < 1e-8


def test_barrier_payoff_reported_not_satisfied():
    bs = so.barrier_solution(A_, B_, 0.05, 0.9, 100.0, T_, 1.0)
    pay = bs.payoff_discrepancy([101.0, 120.0])
    assert pay["satisfied"] is False
    assert all(abs(g) > 1.0 for g in pay["gaps"].values())


def test_barrier_spec_validation():
    with pytest.raises(ValueError):
        so.exponential_barrier(A_, B_, -0.1, 0.9, 100.0, T_, 1.0)
    with pytest.raises(ValueError):
        so.exponential_barrier(A_, B_, 0.05, 1.5, 100.0, T_, 1.0)
    with pytest.raises(ValueError):
        so.exponential_barrier(A_, B_, 0.05, 0.9, -1.0, T_, 1.0)


def test_example_scaling_algebra():
    sol = so.example_A22(A_, B_, 0.0)
    assert sol.residual() < 1e-7


def test_example_quadratic_source():
    sol = so.example_A359(A_, B_, -1.0)
    assert sol.residual() < 1e-7
    # its transformed source lands exactly in the catalog's quadratic family
    h, _ = heath_to_heat(sol.model)
    target = ex.parse("-exp(3*x)*u^2 - (81/4)*exp(-3*x)")
    for xv in np.linspace(0.5, 1.5, 5):
        for uv in np.linspace(0.5, 1.5, 5):
            env = {"x": float(xv), "u": float(uv)}
            assert abs(ex.evaluate(h.fhat, env) - ex.evaluate(target, env)) < 1e-10


def test_example_pole_guard():
    sol = so.example_A359(A_, B_, -1.0)
    # the pole line is x = 6 c1 - 3 b^2 t; stepping onto it raises
    with pytest.raises(so.SampleDomainError):
        sol.residual([(-6.0 - 3.0 * 0.1, 0.1)])
    # a box crossing the pole is reported as a domain violation
    bad = so.example_A359(A_, B_, 0.2)
    assert bad.domain_violation() is not None
    assert sol.domain_violation() is None


def test_solution_serialization():
    sol = so.example_A22(A_, B_, 0.0)
    js = sol.to_json()
    assert "similarity" in js and "box" in js
    csv_text = sol.sample_csv(nx=3, nt=3)
    lines = csv_text.strip().split("\n")
    assert lines[0] == "x,t,u"
    assert len(lines) == 10
