import math
import warnings

import numpy as np
import pytest

from heathsym import expr as ex
from heathsym.model import (
    CoordinateMap,
    DegenerateSourceWarning,
    HeathModel,
    HeatSourceModel,
    apply_equivalence,
    heat_to_heath,
    heath_to_heat,
    is_linearizable,
    pde_residual,
    residual_ratio_factor,
)


def test_forward_transform_log_source():
    m = HeathModel.parse(0.0, 1.0, "u")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSourceWarning)
        h, cmap = heath_to_heat(m)
    # f = u maps to fhat = phi*(2u - 0)/1 with u = -ln(phi): -2 phi ln phi
    rng = np.random.default_rng(0)
    for _ in range(20):
        xv, pv = rng.uniform(0.5, 1.5, 2)
        want = -2.0 * pv * math.log(pv)
        got = ex.evaluate(h.fhat, {"x": float(xv), "u": float(pv)})
        assert abs(got - want) < 1e-12


def test_round_trip_identity():
    rng = np.random.default_rng(1)
    for f in ("u", "x*u^2", "sin(x) + u^3", "exp(u/4)*x"):
        m = HeathModel.parse(0.7, 1.3, f)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateSourceWarning)
            h, _ = heath_to_heat(m)
            back = heat_to_heath(h, 0.7, 1.3)
        orig = ex.parse(f)
        for _ in range(10):
            xv, uv = rng.uniform(0.5, 1.5, 2)
            env = {"x": float(xv), "u": float(uv)}
            assert abs(ex.evaluate(back.f, env) - ex.evaluate(orig, env)) < 1e-12


def test_coordinate_map_inverse():
    cmap = CoordinateMap.heath_heat(0.8, 1.2)
    rng = np.random.default_rng(2)
    for _ in range(10):
        xv, tv, uv = rng.uniform(0.3, 1.2, 3)
        fx, ftau, fphi = cmap.push_forward(float(xv), float(tv), float(uv))
        bx, bt, bu = cmap.pull_back(fx, ftau, fphi)
        assert abs(bx - xv) < 1e-12
        assert abs(bt - tv) < 1e-12
        assert abs(bu - uv) < 1e-10


def test_residual_ratio_factor():
    # the two pictures' residuals differ by the exact factor 2 phi / b^4 for
    # ANY smooth field, solution or not
    a, b = 0.6, 1.1
    u = ex.parse("x^2 + t*x + 1/2")
    m = HeathModel.parse(a, b, "x*u")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSourceWarning)
        h, _ = heath_to_heat(m)
    factor = residual_ratio_factor(a, b)

    ut = ex.diff(u, "t")
    heath_rhs = ex.subs(
        m.pde().rhs, {"u": u, "u_x": ex.diff(u, "x"), "u_xx": ex.diff(u, "x", 2)}
    )
    heath_res = ut - heath_rhs

    phi = ex.exp(-(ex.num(a) * ex.sym("x") + u) / ex.num(b * b))
    # heat residual in original coordinates: d phi/d tau - phi_xx - fhat;
    # tau = -(b^2/2) t so d/d tau = -(2/b^2) d/dt
    phit = ex.num(-2.0 / (b * b)) * ex.diff(phi, "t")
    heat_res = phit - ex.diff(phi, "x", 2) - ex.subs(h.fhat, {"u": phi})

    rng = np.random.default_rng(3)
    for _ in range(100):
        env = {"x": float(rng.uniform(0.5, 1.5)), "t": float(rng.uniform(-0.3, 0.3))}
        env["u"] = ex.evaluate(u, env)
        lhs = ex.evaluate(heat_res, env)
        rhs = ex.evaluate(factor, env) * ex.evaluate(heath_res, env)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs), abs(rhs))


def test_degenerate_source_warning_and_linearizable():
    # f of the linearizable boundary: f = (exp((a x + u)/b^2) g(x) + a^2)/2
    a, b = 0.5, 1.0
    f = "(exp((0.5*x + u)/1)* (x^2) + 0.25)/2"
    with pytest.warns(DegenerateSourceWarning):
        heath_to_heat(HeathModel.parse(a, b, f))
    lin, g = is_linearizable(HeathModel.parse(a, b, f))
    assert lin
    assert g is not None
    for xv in (0.5, 0.9, 1.4):
        assert abs(ex.evaluate(g, {"x": xv}) - xv * xv) < 1e-9


def test_not_linearizable():
    lin, g = is_linearizable(HeathModel.parse(1.0, 1.0, "u^2"))
    assert not lin and g is None


def test_apply_equivalence_preserves_class():
    # pushing a source through the equivalence map keeps the heat-picture
    # class: verify with the known transform of fhat = phi^2 under scaling
    h = HeatSourceModel(ex.parse("u^2"))
    h2 = apply_equivalence(h, d0=0.0, d1=2.0, d3=0.0, d4=1.0)
    # phi~ = 2 phi: new source = 2*(phi~/2)^2 = phi~^2/2
    for pv in (0.5, 1.0, 1.7):
        assert abs(ex.evaluate(h2.fhat, {"x": 1.0, "u": pv}) - pv * pv / 2) < 1e-12
    with pytest.raises(ValueError):
        apply_equivalence(h, d0=0.0, d1=0.0, d3=0.0, d4=1.0)


def test_pde_residual_scaled():
    m = HeathModel.parse(0.0, 1.0, "0*u")
    # u = x^2 - t solves u_t = u_x^2/2 - u_xx/2 ... check: u_t=-1,
    # rhs = (2x)^2/2 - 2/2 = 2x^2 - 1; not a solution; residual positive
    r = pde_residual(m.pde(), ex.parse("x^2 - t"), [(1.0, 0.0)])
    assert r > 0.1
    # exact solution of the zero-source equation: u = c (constant)
    assert pde_residual(m.pde(), ex.parse("0*x + 3"), [(0.7, 0.1)]) < 1e-14


def test_b_zero_rejected():
    with pytest.raises(ValueError):
        HeathModel.parse(1.0, 0.0, "u")
    with pytest.raises(ValueError):
        heat_to_heath(HeatSourceModel(ex.parse("u")), 1.0, 0.0)
