"""Real interpolation norms restricted to (0, 1) and their GGamma identifications."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .errors import ParameterError
from .grids import LogGrid
from .kfunctional import CoupleSpec, k_closed, k_closed_weak_classical, k_search
from .rearrangement import Rearrangement
from .spaces import (GGammaSup, GrandLp, LorentzPQ, PowerLogWeight, SmallLp, WeakLp, ggamma,
                     norm, tail_form)

# t-quadrature in tau = -log t: Gauss panels on [0, tau_max]
_T_PANELS = 48
_T_DEGREE = 8
_T_DECAY = 60.0  # tau_max * (decay rate) for the unit interval part
_T_DECAY_LARGE = 50.0  # same for t > 1 on the half line
_DIVERGENCE_RTOL = 1e-12
# phi(t) may reach this fraction of u_max before K is extrapolated
_GRID_ROOM = 1e-2
# log-t step used to read off the power-law exponent of K at the cut
_SLOPE_STEP = 0.25
_SIGMA_TOL = 1e-9


@dataclass(frozen=True)
class InterpSpec:
    theta: float
    r: float
    alpha: float = 0.0
    domain: str = "unit"

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ParameterError("theta must lie in (0, 1)")
        if not (self.r >= 1.0):
            raise ParameterError("r must be >= 1")
        if self.domain not in ("unit", "halfline"):
            raise ParameterError("domain is 'unit' or 'halfline'")
        if self.domain == "halfline" and self.alpha != 0.0:
            raise ParameterError("(1 - log t)^alpha is only defined on (0, 1); use alpha = 0")

    def to_dict(self) -> dict:
        return {"theta": self.theta, "r": "inf" if math.isinf(self.r) else self.r,
                "alpha": self.alpha, "domain": self.domain}


def _panel_rule(tau_max: float):
    x, w = legendre.leggauss(_T_DEGREE)
    edges = np.concatenate(([0.0], np.geomspace(min(1e-4, tau_max / 10), tau_max, _T_PANELS)))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def resolved_tau(cpl: CoupleSpec, grid: LogGrid) -> float:
    """Largest tau = -log t at which the split point phi(t) (or the nu-budget
    t^{-p}) stays well inside the grid."""
    p = cpl.p
    room = math.log(_GRID_ROOM * grid.u_max)
    if cpl.tag == "classical-small":
        return room * (p - 1.0) / p
    if cpl.tag == "grand-grand":
        return room * (cpl.x0.theta - cpl.x1.theta) / p
    if cpl.tag in ("grand-classical", "weak-classical", "weak-small"):
        return room / p
    return room


def t_quadrature(spec: InterpSpec, tau_unit: float | None = None):
    """(t nodes, weights for dt/t) for the chosen domain.

    On (0, 1) the nodes cover tau = -log t in [0, tau_unit]; the default
    extent is where t^{1-theta} has decayed to exp(-60) in L^r.
    """
    rr = 1.0 if math.isinf(spec.r) else spec.r
    if tau_unit is None:
        tau_unit = _T_DECAY / ((1.0 - spec.theta) * rr)
    tau, w = _panel_rule(tau_unit)
    t = np.exp(-tau)
    if spec.domain == "halfline":
        sig, w2 = _panel_rule(_T_DECAY_LARGE / (spec.theta * rr))
        t = np.concatenate((t, np.exp(sig)))
        w = np.concatenate((w, w2))
    return t, w


def _k_values(f, cpl, t, k_method, grid, levels):
    big = t > 1.0
    if k_method == "search":
        out = np.empty(t.size)
        if np.any(~big):
            out[~big] = np.atleast_1d(k_search(f, cpl, t[~big], levels, grid))
        if np.any(big):
            out[big] = _k_large(f, cpl, t[big], grid, levels)
        return out
    if k_method == "closed-form":
        if np.any(big):
            if cpl.tag != "weak-classical":
                raise ParameterError("closed-form K beyond t = 1 exists only for weak-classical")
            return _weak_classical_any_t(f, cpl.p, t, grid)
        return np.atleast_1d(k_closed(f, cpl, t, grid))
    raise ParameterError(f"unknown K method {k_method!r}")


def _k_large(f, cpl, t, grid, levels):
    # the split family's level table does not depend on t
    from .kfunctional import level_table, search_levels

    table = level_table(f, cpl, search_levels(f, cpl, levels, grid), grid)
    return table.k(t)[0]


def _weak_classical_any_t(f, p, t, grid):
    out = np.empty(t.size)
    lo = t <= 1.0
    if np.any(lo):
        out[lo] = k_closed_weak_classical(f, p, t[lo], grid)
    if np.any(~lo):
        # same formula with budgets t^{-p} < 1
        from .rearrangement import Psi, nu_rearrangement

        tl = t[~lo]
        nu = nu_rearrangement(Psi(f, p), 1.0, grid)
        out[~lo] = tl * nu.power_integral(tl ** -p, p) ** (1.0 / p)
    return out


def interp_norm(f: Rearrangement, cpl: CoupleSpec, spec: InterpSpec, k_method: str = "search",
                grid: LogGrid | None = None, levels: int = 200) -> float:
    """(int [t^{-theta} (1 - log t)^alpha K(f, t)]^r dt/t)^{1/r} over (0, 1) or (0, inf).

    Below the t-range the grid resolves, K is continued as the power law
    through its last two resolved values; its exponent sigma in [0, 1] decides
    convergence at t = 0 (sigma > theta) and gives the remaining integral in
    closed form.
    """
    from .grids import make_log_grid

    grid = grid or make_log_grid()
    if f.is_zero:
        return 0.0
    theta, r, alpha = spec.theta, spec.r, spec.alpha
    rr = 1.0 if math.isinf(r) else r
    tau_full = _T_DECAY / ((1.0 - theta) * rr)
    tau_res = resolved_tau(cpl, grid)
    tau_unit = min(tau_full, tau_res)
    t, w = t_quadrature(spec, tau_unit)
    extrap = tau_res < tau_full
    t_lim = math.exp(-tau_unit)
    t_all = np.concatenate((t, [t_lim, t_lim * math.exp(_SLOPE_STEP)])) if extrap else t
    k_all = _k_values(f, cpl, t_all, k_method, grid, levels)
    if np.any(~np.isfinite(k_all)):
        return math.inf
    k = k_all[:t.size]
    with np.errstate(divide="ignore"):
        log_u = np.where(t <= 1.0, np.log1p(-np.log(np.minimum(t, 1.0))), 0.0)
        lv = -theta * np.log(t) + alpha * log_u + np.log(k)
    tail = 0.0
    if extrap:
        k0, k1 = k_all[-2], k_all[-1]
        if k0 <= 0.0:
            sigma = 1.0
        else:
            sigma = min(max(math.log(k1 / k0) / _SLOPE_STEP, 0.0), 1.0)
        # integrand ~ t^{(sigma - theta) r} (-log t)^{alpha r} below t_lim
        if sigma <= theta + _SIGMA_TOL:
            return math.inf
        lead = -theta * math.log(t_lim) + alpha * math.log1p(tau_unit) + math.log(k0)
        if math.isinf(r):
            lv = np.append(lv, lead)
        else:
            c = (sigma - theta) * r
            tail = math.exp(r * lead) * _log_power_tail(c, alpha * r, tau_unit)
    if math.isinf(r):
        return float(np.exp(lv.max()))
    vals = np.exp(r * lv)
    # integrand not decayed at either end of the t-range: the integral diverges
    n_unit = _T_PANELS * _T_DEGREE
    ends = [] if extrap else [vals[n_unit - 1]]
    if spec.domain == "halfline":
        ends.append(vals[-1])
    if ends and max(ends) > _DIVERGENCE_RTOL * vals.max():
        return math.inf
    return float(vals @ w + tail) ** (1.0 / r)


def _log_power_tail(c: float, a: float, tau0: float) -> float:
    """int_{tau0}^inf e^{-c (tau - tau0)} ((1 + tau)/(1 + tau0))^a dtau."""
    if a == 0.0:
        return 1.0 / c
    x, w = legendre.leggauss(32)
    # substitution tau = tau0 + y/c, y on a graded set of panels up to y = 80
    edges = np.concatenate(([0.0], np.geomspace(0.05, 80.0, 12)))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        y = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        v = np.exp(-y) * ((1.0 + tau0 + y / c) / (1.0 + tau0)) ** a
        total += 0.5 * (hi - lo) * float(v @ w)
    return total / c


# ---------------------------------------------------- closed-form identifications
def _check_region(p, theta, r):
    if not (1.0 < p < math.inf):
        raise ParameterError("need 1 < p < inf")
    if not (0.0 < theta < 1.0):
        raise ParameterError("theta must lie in (0, 1)")
    if not (r >= 1.0):
        raise ParameterError("r must be >= 1")


def classical_small_space(p: float, theta: float, r: float):
    _check_region(p, theta, r)
    pc = p / (p - 1.0)
    return ggamma(p, r, PowerLogWeight(-1.0, r * theta / pc - 1.0))


def interp_closed_classical_small(f, p, theta, r, grid):
    """GGamma(p, r; t^{-1}(1 - log t)^{r theta/p' - 1}, 1)."""
    return norm(classical_small_space(p, theta, r), f, grid)


def grand_classical_space(p: float, theta: float, r: float):
    _check_region(p, theta, r)
    return ggamma(p, r, PowerLogWeight(-1.0, r * theta / p - 1.0), PowerLogWeight(0.0, -1.0))


def interp_closed_grand_classical(f, p, theta, r, grid):
    """GGamma(p, r; t^{-1}(1 - log t)^{r theta/p - 1}, (1 - log t)^{-1})."""
    return norm(grand_classical_space(p, theta, r), f, grid)


def grand_classical_tail(f, p, theta, r, grid):
    """(int (1 - log t)^{r(theta - 1)/p - 1} (int_t^1 f_*^p)^{r/p} dt/t)^{1/r}."""
    _check_region(p, theta, r)
    return tail_form(f, p, r, PowerLogWeight(-1.0, r * (theta - 1.0) / p - 1.0), grid)


def grand_grand_space(p, alpha, beta, theta, r):
    _check_region(p, theta, r)
    if not (0.0 < beta < alpha):
        raise ParameterError("need 0 < beta < alpha")
    return ggamma(p, r, PowerLogWeight(-1.0, r * theta * (alpha - beta) / p - 1.0),
                  PowerLogWeight(0.0, -alpha))


def interp_closed_grand_grand(f, p, alpha, beta, theta, r, grid):
    """GGamma(p, r; t^{-1}(1 - log t)^{r theta (alpha - beta)/p - 1}, (1 - log t)^{-alpha})."""
    return norm(grand_grand_space(p, alpha, beta, theta, r), f, grid)


def interp_maligranda_persson(f, p, theta, grid):
    """The Lorentz L^{p, p/theta} norm."""
    _check_region(p, theta, 1.0)
    return norm(LorentzPQ(p, p / theta), f, grid)


def weak_small_lower_spaces(p, theta, r):
    _check_region(p, theta, r)
    gg_p = ggamma(p, r, PowerLogWeight(-1.0, r * theta - 1.0), PowerLogWeight(0.0, -1.0))
    gg_sup = GGammaSup(r, PowerLogWeight(-1.0, r * theta * (1.0 - 1.0 / p) - 1.0),
                       PowerLogWeight(1.0 / p, 0.0))
    return gg_p, gg_sup


def interp_lower_bounds_weak_small(f, p, theta, r, grid):
    """The two GGamma norms bounding the (weak, small) interpolation norm from below."""
    gg_p, gg_sup = weak_small_lower_spaces(p, theta, r)
    return norm(gg_p, f, grid), norm(gg_sup, f, grid)


def intersection_norm(f, p, theta, r, grid):
    """max of the two lower-bound norms, the quasinorm of their intersection."""
    return max(interp_lower_bounds_weak_small(f, p, theta, r, grid))


def interpolation_inequality_ratio(f, p, alpha, grid):
    """||f||_{L^{p,inf}} / (||f||_{grand}^{1-alpha} ||f||_{small}^alpha); NaN when f = 0."""
    if not (1.0 < p < math.inf):
        raise ParameterError("need 1 < p < inf")
    if not (0.0 <= alpha <= 1.0):
        raise ParameterError("alpha must lie in [0, 1]")
    den_g = norm(GrandLp(p, 1.0), f, grid)
    den_s = norm(SmallLp(p, 1.0), f, grid)
    if den_g == 0.0 or den_s == 0.0:
        return math.nan
    num = norm(WeakLp(p), f, grid)
    return num / (den_g ** (1.0 - alpha) * den_s ** alpha)


# ------------------------------------------------------------- associate space
def _check_assoc(p, r, delta):
    if not (1.0 < p < math.inf and 1.0 < r < math.inf):
        raise ParameterError("need 1 < p, r < inf")
    if not (delta > 0.0):
        raise ParameterError("delta must be positive")


def base_space(p, r, delta):
    """GGamma(p, r; t^{-1}(1 - log t)^{delta - 1}, 1)."""
    _check_assoc(p, r, delta)
    return ggamma(p, r, PowerLogWeight(-1.0, delta - 1.0))


def associate_space(p, r, delta):
    _check_assoc(p, r, delta)
    pc, rc = p / (p - 1.0), r / (r - 1.0)
    return ggamma(pc, rc, PowerLogWeight(-1.0, rc * delta / r - 1.0),
                  PowerLogWeight(0.0, -2.0 * pc * delta / r))


def associate_ggamma_norm(f, p, r, delta, grid):
    """Norm of the associate of GGamma(p, r; t^{-1}(1 - log t)^{delta - 1})."""
    return norm(associate_space(p, r, delta), f, grid)


def associate_tail_norm(f, p, r, delta, grid):
    """The equivalent tail form (int u^{-r' delta/r - 1}(int_t^1 f_*^{p'})^{r'/p'} dt/t)^{1/r'}."""
    _check_assoc(p, r, delta)
    pc, rc = p / (p - 1.0), r / (r - 1.0)
    return tail_form(f, pc, rc, PowerLogWeight(-1.0, -rc * delta / r - 1.0), grid)


def pairing(f: Rearrangement, g: Rearrangement, grid: LogGrid) -> float:
    """int_0^1 f_*(s) g_*(s) ds."""
    from .rearrangement import rearrange_on_grid

    f = f if f.decreasing else rearrange_on_grid(f, grid)
    g = g if g.decreasing else rearrange_on_grid(g, grid)
    if f.is_zero or g.is_zero:
        return 0.0
    from .spaces import _JACOBIAN

    growth = f.growth * g.growth * _JACOBIAN
    if not growth.integrable:
        return math.inf
    gr = grid.refined(tuple(f.breaks_u) + tuple(g.breaks_u))
    u = gr.nodes
    with np.errstate(over="ignore", under="ignore"):
        vals = np.exp(f.log_u(u) + g.log_u(u) + (1.0 - u))
    return gr.integral(vals)
