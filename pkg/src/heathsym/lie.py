"""Point-symmetry machinery for scalar second-order evolution equations.

Everything works on the jet space with coordinates
``x, t, u, u_x, u_t, u_xx, u_xt, u_xxx``.  The heat-picture variables
(tau, phi) are represented by the same (t, u) names internally; callers that
prefer tau/phi spelling can parse through `parse_xtu`.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .expr import Expr, DomainError

JET_SYMBOLS = ("x", "t", "u", "u_x", "u_t", "u_xx", "u_xt", "u_xxx")

_HEAT_NAMES = {"tau": "t", "phi": "u"}


def parse_xtu(text: str) -> Expr:
    """Parse an expression written in either (x,t,u) or (x,tau,phi) naming
    into the internal (x,t,u) convention."""
    return ex.rename(ex.parse(text), _HEAT_NAMES)


@dataclass(frozen=True)
class Generator:
    """Infinitesimal generator xi1*d/dx + xi2*d/dt + eta*d/du."""

    xi1: Expr
    xi2: Expr
    eta: Expr

    @classmethod
    def parse(cls, xi1: str, xi2: str, eta: str) -> "Generator":
        return cls(parse_xtu(xi1), parse_xtu(xi2), parse_xtu(eta))

    def __add__(self, other: "Generator") -> "Generator":
        return Generator(self.xi1 + other.xi1, self.xi2 + other.xi2, self.eta + other.eta)

    def scale(self, c) -> "Generator":
        return Generator(ex.mul(c, self.xi1), ex.mul(c, self.xi2), ex.mul(c, self.eta))

    def subs(self, mapping: Mapping[str, object]) -> "Generator":
        return Generator(
            ex.subs(self.xi1, mapping), ex.subs(self.xi2, mapping), ex.subs(self.eta, mapping)
        )

    def apply(self, f: Expr) -> Expr:
        """First-order action on a function of (x, t, u)."""
        return (
            self.xi1 * ex.diff(f, "x") + self.xi2 * ex.diff(f, "t") + self.eta * ex.diff(f, "u")
        )

    def free_parameters(self) -> set[str]:
        names = ex.free_symbols(self.xi1) | ex.free_symbols(self.xi2) | ex.free_symbols(self.eta)
        return names - {"x", "t", "u"}


def commutator(g1: Generator, g2: Generator) -> Generator:
    """Lie bracket [g1, g2], computed exactly on the coefficient functions."""
    return Generator(
        g1.apply(g2.xi1) - g2.apply(g1.xi1),
        g1.apply(g2.xi2) - g2.apply(g1.xi2),
        g1.apply(g2.eta) - g2.apply(g1.eta),
    )


@dataclass(frozen=True)
class EvolutionPDE:
    """u_t = rhs(x, t, u, u_x, u_xx), parabolic (rhs must involve u_xx)."""

    rhs: Expr

    def __post_init__(self):
        extra = ex.free_symbols(self.rhs) - {"x", "t", "u", "u_x", "u_xx"}
        jetlike = extra & {"u_t", "u_xt", "u_xxx"}
        if jetlike:
            raise ValueError(f"rhs must not contain {sorted(jetlike)}")
        if "u_xx" not in ex.free_symbols(self.rhs):
            raise ValueError("rhs does not depend on u_xx; equation is not parabolic")

    def diffusion_coefficient(self) -> Expr:
        return ex.diff(self.rhs, "u_xx")


@dataclass(frozen=True)
class JetPoint:
    x: float
    t: float
    u: float
    u_x: float
    u_xx: float
    u_xxx: float

    def env(self) -> dict[str, float]:
        return {
            "x": self.x, "t": self.t, "u": self.u,
            "u_x": self.u_x, "u_xx": self.u_xx, "u_xxx": self.u_xxx,
        }


def _total_x(f: Expr) -> Expr:
    """Total x-derivative on the jet, for f(x,t,u,u_x,u_t,u_xx)."""
    return (
        ex.diff(f, "x")
        + ex.sym("u_x") * ex.diff(f, "u")
        + ex.sym("u_xx") * ex.diff(f, "u_x")
        + ex.sym("u_xt") * ex.diff(f, "u_t")
        + ex.sym("u_xxx") * ex.diff(f, "u_xx")
    )


def _total_t(f: Expr) -> Expr:
    return ex.diff(f, "t") + ex.sym("u_t") * ex.diff(f, "u") + ex.sym("u_xt") * ex.diff(f, "u_x")


def prolong2(g: Generator) -> dict[str, Expr]:
    """Second-prolongation coefficients eta_x, eta_t, eta_xx of a generator."""
    u_x, u_t, u_xx, u_xt = (ex.sym(s) for s in ("u_x", "u_t", "u_xx", "u_xt"))
    eta_x = _total_x(g.eta) - u_x * _total_x(g.xi1) - u_t * _total_x(g.xi2)
    eta_t = _total_t(g.eta) - u_x * _total_t(g.xi1) - u_t * _total_t(g.xi2)
    eta_xx = _total_x(eta_x) - u_xx * _total_x(g.xi1) - u_xt * _total_x(g.xi2)
    return {"eta_x": eta_x, "eta_t": eta_t, "eta_xx": eta_xx}


def symmetry_condition_terms(pde: EvolutionPDE, g: Generator) -> list[Expr]:
    """The summands of the linearized symmetry condition applied to
    Delta = rhs - u_t, restricted to the solution manifold.

    The on-manifold substitution replaces u_xt by the total x-derivative of
    the rhs first and u_t by the rhs afterwards; the remaining free jet
    coordinates are x, t, u, u_x, u_xx, u_xxx.
    """
    pro = prolong2(g)
    rhs = pde.rhs
    terms = [
        g.xi1 * ex.diff(rhs, "x"),
        g.xi2 * ex.diff(rhs, "t"),
        g.eta * ex.diff(rhs, "u"),
        pro["eta_x"] * ex.diff(rhs, "u_x"),
        pro["eta_xx"] * ex.diff(rhs, "u_xx"),
        ex.mul(-1, pro["eta_t"]),
    ]
    u_xt_expr = _total_x(rhs)  # contains no u_t or u_xt itself
    out = []
    for term in terms:
        term = ex.substitute(term, "u_xt", u_xt_expr)
        term = ex.substitute(term, "u_t", rhs)
        out.append(term)
    return out


def symmetry_residual(pde: EvolutionPDE, g: Generator, p: JetPoint,
                      params: Mapping[str, float] | None = None) -> float:
    """Value of the on-manifold symmetry condition at one jet point.

    Zero (to round-off) at every jet point exactly when g generates a
    symmetry of the equation.
    """
    env = p.env()
    if params:
        env.update(params)
    return sum(ex.evaluate(term, env) for term in symmetry_condition_terms(pde, g))


@dataclass
class SymmetryReport:
    max_abs: float
    mean_abs: float
    points_failed: int
    n_points: int
    tolerance: float
    skipped_domain_errors: int = 0

    @property
    def passed(self) -> bool:
        return self.max_abs < self.tolerance


DEFAULT_BOX: dict[str, tuple[float, float]] = {
    "x": (0.5, 1.5), "t": (-0.5, 0.5), "u": (0.5, 1.5),
    "u_x": (-1.0, 1.0), "u_xx": (-1.0, 1.0), "u_xxx": (-1.0, 1.0),
}


class UnsamplableError(ValueError):
    pass


def check_symmetry(pde: EvolutionPDE, g: Generator, n: int = 100, seed: int = 0,
                   box: Mapping[str, tuple[float, float]] | None = None,
                   params: Mapping[str, float] | None = None,
                   tolerance: float = 1e-8) -> SymmetryReport:
    """Batch residual check over randomly sampled jet points.

    The residual is scaled by the magnitude of the largest summand of the
    symmetry condition at each point, so entries with huge exponential
    factors do not trip the tolerance spuriously.  Deterministic given seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    full_box = dict(DEFAULT_BOX)
    if box:
        full_box.update(box)
    terms = symmetry_condition_terms(pde, g)
    argnames = list(JET_SYMBOLS)
    argnames.remove("u_t")
    argnames.remove("u_xt")
    extra = sorted(set().union(*[ex.free_symbols(t) for t in terms]) - set(argnames))
    if extra and not params:
        raise ValueError(f"unbound parameters {extra}; pass params=")
    fn = ex.compile_exprs(terms, argnames + extra)
    pvals = [float(params[name]) for name in extra] if extra else []

    rng = np.random.default_rng(seed)
    values = []
    skipped = 0
    attempts = 0
    while len(values) < n:
        attempts += 1
        if attempts > 50 * n:
            raise UnsamplableError(
                "could not sample enough jet points without domain violations"
            )
        point = [rng.uniform(*full_box[s]) for s in argnames]
        try:
            tv = fn(*point, *pvals)
        except DomainError:
            skipped += 1
            continue
        scale = max(1.0, max(abs(v) for v in tv))
        values.append(abs(sum(tv)) / scale)
    max_abs = max(values)
    return SymmetryReport(
        max_abs=max_abs,
        mean_abs=statistics.fmean(values),
        points_failed=sum(v >= tolerance for v in values),
        n_points=n,
        tolerance=tolerance,
        skipped_domain_errors=skipped,
    )


def classification_residual(fhat: Expr, F1: Expr, F2: Expr, F3: Expr, F4: Expr,
                            p: Mapping[str, float]) -> float:
    """Residual of the classification equation of the heat-with-source class
    at a point {x, t, u(=phi)}; F1 = F1(x,t), F2..F4 functions of t only.

    Vanishes identically when (F1..F4) encode a point symmetry of
    u_t = u_xx + fhat(x, u).
    """
    fhat = ex.rename(fhat, _HEAT_NAMES)
    F1 = ex.rename(F1, _HEAT_NAMES)
    F2, F3, F4 = (ex.rename(F, _HEAT_NAMES) for F in (F2, F3, F4))
    x, u = ex.sym("x"), ex.sym("u")
    f_u = ex.diff(fhat, "u")
    f_x = ex.diff(fhat, "x")
    F2p, F2pp, F2ppp = ex.diff(F2, "t"), ex.diff(F2, "t", 2), ex.diff(F2, "t", 3)
    F3p, F3pp = ex.diff(F3, "t"), ex.diff(F3, "t", 2)
    F4p = ex.diff(F4, "t")
    bracket = 8 * F4 + x * (x * F2pp - 4 * F3p)
    residual = (
        f_u * (F1 + ex.num(ex.Fraction(1, 8)) * u * bracket)
        + ex.diff(F1, "x", 2)
        - ex.num(ex.Fraction(1, 8)) * fhat * bracket
        + f_x * (F3 - x * F2p / 2)
        + u * F2pp / 4
        - fhat * F2p
        - ex.diff(F1, "t")
        + ex.num(ex.Fraction(1, 8)) * u * (x * (4 * F3pp - x * F2ppp) - 8 * F4p)
    )
    env = {_HEAT_NAMES.get(k, k): float(v) for k, v in p.items()}
    return ex.evaluate(residual, env)


def invariant_surface(g: Generator) -> Expr:
    """eta - xi1*u_x - xi2*u_t, the invariant surface condition."""
    return g.eta - g.xi1 * ex.sym("u_x") - g.xi2 * ex.sym("u_t")


def solution_invariance_residual(g: Generator, u: Expr,
                                 pts: Sequence[tuple[float, float]],
                                 params: Mapping[str, float] | None = None) -> float:
    """Max of |eta - xi1*u_x - xi2*u_t| over (x,t) points with the explicit
    solution u(x,t) and its derivatives substituted in, scaled per point by
    the largest summand so solutions of huge magnitude are judged relative
    to their size."""
    u = ex.rename(u, _HEAT_NAMES)
    ux, ut = ex.diff(u, "x"), ex.diff(u, "t")
    sub = {"u_x": ux, "u_t": ut, "u": u}
    terms = [
        ex.subs(g.eta, sub),
        ex.num(-1) * ex.subs(g.xi1, sub) * ux,
        ex.num(-1) * ex.subs(g.xi2, sub) * ut,
    ]
    worst = 0.0
    for (xv, tv) in pts:
        env = {"x": float(xv), "t": float(tv)}
        if params:
            env.update({k: float(v) for k, v in params.items()})
        vals = [ex.evaluate(term, env) for term in terms]
        scale = max(1.0, max(abs(v) for v in vals))
        worst = max(worst, abs(sum(vals)) / scale)
    return worst


def terminal_invariance_residual(g: Generator, a: float, b: float, T: float,
                                 xs: Sequence[float],
                                 params: Mapping[str, float] | None = None) -> dict[str, float]:
    """Residuals of generator invariance of the terminal problem in heat
    variables: the terminal surface tau = T' and the terminal datum
    phi = exp(-(a x + 1)/b^2) on it, sampled over x.  T' = -b^2 T / 2."""
    t_prime = -b * b * T / 2.0
    datum = ex.parse(f"exp(-(({a})*x+1)/({b})^2)")
    # r1: action on (tau - T') restricted to the surface -> xi2 there
    # r2: action on (phi - datum(x)) restricted to surface and datum
    r2_expr = g.eta - g.xi1 * ex.diff(datum, "x")
    r1 = r2 = 0.0
    for xv in xs:
        env = {"x": float(xv), "t": t_prime}
        env["u"] = ex.evaluate(datum, {"x": float(xv)})
        if params:
            env.update({k: float(v) for k, v in params.items()})
        r1 = max(r1, abs(ex.evaluate(g.xi2, env)))
        r2 = max(r2, abs(ex.evaluate(r2_expr, env)))
    return {"r1": r1, "r2": r2}


def barrier_invariance_residual(g: Generator, H: Expr, R: Expr, a: float, b: float,
                                taus: Sequence[float],
                                params: Mapping[str, float] | None = None) -> dict[str, float]:
    """Residuals of generator invariance of the barrier problem in heat
    variables: the surface x = H(tau) and the datum
    phi = exp(-(a H + R)/b^2) on it, sampled over tau."""
    H = ex.rename(H, _HEAT_NAMES)
    R = ex.rename(R, _HEAT_NAMES)
    datum = ex.exp(ex.mul(-1, (a * H + R) / (b * b)))  # function of t only
    r1_expr = g.xi1 - g.xi2 * ex.diff(H, "t")
    r2_expr = g.eta - g.xi2 * ex.diff(datum, "t")
    r1 = r2 = 0.0
    for tv in taus:
        base = {"t": float(tv)}
        if params:
            base.update({k: float(v) for k, v in params.items()})
        xv = ex.evaluate(H, base)
        uv = ex.evaluate(datum, base)
        env = {**base, "x": xv, "u": uv}
        r1 = max(r1, abs(ex.evaluate(r1_expr, env)))
        r2 = max(r2, abs(ex.evaluate(r2_expr, env)))
    return {"r1": r1, "r2": r2}
