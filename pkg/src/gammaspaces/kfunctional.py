"""K-functionals: decomposition search and closed-form characterizations.

The search evaluates ``||g0||_0 + t ||g1||_1`` over one-parameter split
families.  The norms of both parts do not depend on t, so a whole K-curve
costs one pass over the levels; ``K(t) = min_level (N0 + t N1)`` is then a
minimum of affine functions of t and automatically concave and nondecreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import Growth
from .errors import EvaluationError, ParameterError
from .grids import LogGrid
from .rearrangement import (Clipped, Psi, Rearrangement, nu_rearrangement, sample_points,
                            weak_lp_split, zero)
from .spaces import (GrandLp, Lp, SmallLp, SpaceSpec, WeakLp, norm, space_from_dict,
                     space_to_dict, _polished_sup)

TAGS = ("classical-small", "grand-classical", "grand-grand", "weak-classical", "weak-small",
        "generic")
CLOSED_FORM_TAGS = ("classical-small", "grand-classical", "grand-grand", "weak-classical")
_PSI_TAGS = ("weak-classical", "weak-small")
_JACOBIAN = Growth(1.0, 0.0)


@dataclass(frozen=True)
class CoupleSpec:
    x0: SpaceSpec
    x1: SpaceSpec
    tag: str = "generic"

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ParameterError(f"unsupported couple tag {self.tag!r}")
        x0, x1 = self.x0, self.x1
        expect = {
            "classical-small": (Lp, SmallLp),
            "grand-classical": (GrandLp, Lp),
            "grand-grand": (GrandLp, GrandLp),
            "weak-classical": (WeakLp, Lp),
            "weak-small": (WeakLp, SmallLp),
        }.get(self.tag)
        if expect is None:
            return
        if not (isinstance(x0, expect[0]) and isinstance(x1, expect[1])):
            raise ParameterError(f"couple {self.tag} needs ({expect[0].__name__}, "
                                 f"{expect[1].__name__})")
        if x0.p != x1.p:
            raise ParameterError("both spaces of a tagged couple share the exponent p")
        if self.tag == "grand-grand":
            if not (x0.theta > x1.theta > 0):
                raise ParameterError("grand-grand couple needs 0 < beta < alpha")
        elif isinstance(x0, GrandLp) and x0.theta != 1.0:
            raise ParameterError("grand-classical couple uses the grand space with theta = 1")
        if isinstance(x1, SmallLp) and x1.theta != 1.0:
            raise ParameterError(f"{self.tag} couple uses the small space with theta = 1")

    @property
    def p(self) -> float:
        return self.x0.p

    def to_dict(self) -> dict:
        return {"tag": self.tag, "x0": space_to_dict(self.x0), "x1": space_to_dict(self.x1)}

    @classmethod
    def from_dict(cls, d: dict) -> "CoupleSpec":
        if not isinstance(d, dict) or set(d) - {"tag", "x0", "x1"}:
            raise ParameterError("couple descriptor has keys tag, x0, x1")
        if "x0" not in d or "x1" not in d:
            raise ParameterError("couple descriptor needs x0 and x1")
        return cls(space_from_dict(d["x0"]), space_from_dict(d["x1"]), d.get("tag", "generic"))


def couple(tag: str, p: float, alpha: float | None = None, beta: float | None = None) -> CoupleSpec:
    """The tagged couple for exponent p (alpha, beta only for grand-grand)."""
    if tag == "classical-small":
        return CoupleSpec(Lp(p), SmallLp(p, 1.0), tag)
    if tag == "grand-classical":
        return CoupleSpec(GrandLp(p, 1.0), Lp(p), tag)
    if tag == "grand-grand":
        if alpha is None or beta is None:
            raise ParameterError("grand-grand couple needs alpha and beta")
        return CoupleSpec(GrandLp(p, alpha), GrandLp(p, beta), tag)
    if tag == "weak-classical":
        return CoupleSpec(WeakLp(p), Lp(p), tag)
    if tag == "weak-small":
        return CoupleSpec(WeakLp(p), SmallLp(p, 1.0), tag)
    raise ParameterError(f"unsupported couple tag {tag!r}")


@dataclass(frozen=True)
class KCurve:
    t_grid: tuple
    values: tuple
    method: str
    couple: CoupleSpec
    notes: tuple = field(default=())

    def shape_violations(self, rtol: float = 1e-9) -> list[str]:
        """Breaches of ``K`` nondecreasing and ``K/t`` nonincreasing on the grid."""
        t = np.asarray(self.t_grid)
        k = np.asarray(self.values)
        out = []
        order = np.argsort(t)
        t, k = t[order], k[order]
        for i in range(t.size - 1):
            if k[i + 1] < k[i] * (1 - rtol) - 1e-300:
                out.append(f"K decreases between t={t[i]:.6g} and t={t[i + 1]:.6g}")
            if k[i + 1] / t[i + 1] > k[i] / t[i] * (1 + rtol) + 1e-300:
                out.append(f"K/t increases between t={t[i]:.6g} and t={t[i + 1]:.6g}")
        return out


def _check_t(t, upper_closed=False):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    bad = (t <= 0) | (t > 1) if upper_closed else (t <= 0) | (t >= 1)
    if np.any(bad) or np.any(np.isnan(t)):
        raise ParameterError(f"t must lie in (0, 1{']' if upper_closed else ')'}")
    return t


def _check_p(p):
    if not (1.0 < p < math.inf):
        raise ParameterError("need 1 < p < inf")


def _scalar_or_array(t_in, out):
    return float(out[0]) if np.ndim(t_in) == 0 else out


# ----------------------------------------------------------- split families
def _psi_split(f, p, cut, grid):
    if cut == 0.0:
        return zero(), f
    return weak_lp_split(f, p, cut, grid)


def _trunc_split(f, level):
    if level == math.inf:
        return zero(), f
    if level == 0.0:
        return f, zero()
    return Clipped(f, level, "upper"), Clipped(f, level, "lower")


def canonical_u(tag: str, p: float, t, alpha: float = 0.0, beta: float = 0.0):
    """u-image of the splitting point phi(t) of the closed forms."""
    t = np.asarray(t, dtype=float)
    if tag == "classical-small":
        return t ** (-p / (p - 1.0))
    if tag == "grand-classical":
        return t ** (-p)
    if tag == "grand-grand":
        return t ** (-p / (alpha - beta))
    raise ParameterError(f"no splitting point for couple {tag!r}")


def canonical_levels(f: Rearrangement, cpl: CoupleSpec, t, grid: LogGrid) -> np.ndarray:
    """The closed forms' split level for each t: f_*(phi(t)) or psi_{*,nu}(t^{-p})."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = cpl.p
    if cpl.tag in _PSI_TAGS:
        psi = Psi(f, p)
        if psi.growth.grows:
            raise EvaluationError("s^{1/p} f_*(s) is unbounded: f is not in the weak space")
        nu = nu_rearrangement(psi, float(np.max(t ** -p)), grid)
        return nu(t ** -p)
    if cpl.tag == "generic":
        return np.zeros(0)
    alpha = getattr(cpl.x0, "theta", 0.0)
    beta = getattr(cpl.x1, "theta", 0.0)
    u = canonical_u(cpl.tag, p, t, alpha, beta)
    with np.errstate(over="ignore"):  # levels beyond float range become inf
        return np.exp(f.log_u(np.minimum(u, grid.u_max)))


def search_levels(f: Rearrangement, cpl: CoupleSpec, levels: int, grid: LogGrid) -> np.ndarray:
    """Geometric level grid: [f_*(1) 1e-3, f_*(s_min) 10] (psi instead of f_* for weak couples)."""
    if cpl.tag in _PSI_TAGS:
        psi = Psi(f, cpl.p)
        if psi.growth.grows:
            raise EvaluationError("s^{1/p} f_*(s) is unbounded: f is not in the weak space")
        vals = np.exp(psi.log_u(sample_points(grid.refined(f.breaks_u))))
        hi = float(vals.max())
        lo = float(vals[0])
    else:
        lo = float(np.exp(f.log_u(np.array([1.0]))[0]))
        hi = float(np.exp(f.log_u(np.array([min(1e3, grid.u_max)]))[0]))
    # f_*(1) = 0 (support inside (0, 1)): fall back to a fixed dynamic range
    if not (lo > 0):
        lo = hi * 1e-3
    if not (hi > 0):
        return np.zeros(0)
    return np.geomspace(lo * 1e-3, hi * 10.0, int(levels))


@dataclass
class _LevelTable:
    levels: np.ndarray
    n0: np.ndarray
    n1: np.ndarray

    def k(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(invalid="ignore"):
            vals = self.n0[None, :] + t[:, None] * self.n1[None, :]
        vals = np.where(np.isnan(vals), math.inf, vals)
        j = np.argmin(vals, axis=1)
        return vals[np.arange(t.size), j], self.levels[j]


def _parts(f, cpl, level, grid):
    if cpl.tag in _PSI_TAGS:
        return _psi_split(f, cpl.p, level, grid)
    return _trunc_split(f, level)


def level_table(f: Rearrangement, cpl: CoupleSpec, levels, grid: LogGrid) -> _LevelTable:
    lv = np.unique(np.concatenate(([0.0, math.inf], np.asarray(levels, dtype=float))))
    n0 = np.empty(lv.size)
    n1 = np.empty(lv.size)
    for i, level in enumerate(lv):
        g0, g1 = _parts(f, cpl, float(level), grid)
        n0[i] = norm(cpl.x0, g0, grid)
        # t * inf is inf for every t > 0; a zero part costs nothing
        n1[i] = norm(cpl.x1, g1, grid)
    return _LevelTable(lv, n0, n1)


_MAX_CANONICAL = 64


def k_search(f: Rearrangement, cpl: CoupleSpec, t, levels: int = 200,
             grid: LogGrid | None = None):
    """min over the split family of ||g0||_0 + t ||g1||_1 (an upper bound on K)."""
    from .grids import make_log_grid

    grid = grid or make_log_grid()
    if levels < 16:
        raise ParameterError("levels must be at least 16")
    tt = _check_t(t, upper_closed=cpl.tag in _PSI_TAGS)
    if f.is_zero:
        return _scalar_or_array(t, np.zeros(tt.size))
    lv = search_levels(f, cpl, levels, grid)
    if cpl.tag != "generic":
        sub = tt if tt.size <= _MAX_CANONICAL else tt[np.linspace(0, tt.size - 1, _MAX_CANONICAL).astype(int)]
        lv = np.concatenate((lv, canonical_levels(f, cpl, sub, grid)))
    table = level_table(f, cpl, lv, grid)
    vals, _ = table.k(tt)
    return _scalar_or_array(t, vals)


# ------------------------------------------------------------- closed forms
def _rearranged(f, grid):
    from .rearrangement import rearrange_on_grid

    return f if f.decreasing else rearrange_on_grid(f, grid)


def k_closed_classical_small(f: Rearrangement, p: float, t, grid: LogGrid):
    """t int_{phi(t)}^1 (1 - log s)^{-1/p} (int_0^s f_*^p)^{1/p} ds/s, phi(t) = exp(1 - t^{-p'})."""
    from .spaces import ONE, _head

    _check_p(p)
    tt = _check_t(t)
    f = _rearranged(f, grid)
    if f.is_zero:
        return _scalar_or_array(t, np.zeros(tt.size))
    if (f.growth ** p * _JACOBIAN).head() is None:
        return _scalar_or_array(t, np.full(tt.size, math.inf))
    U = np.minimum(canonical_u("classical-small", p, tt), grid.u_max)
    g = grid.refined(list(f.breaks_u) + list(U))
    h_nodes, _ = _head(f, p, ONE, g)
    vals = np.exp(-np.log(g.nodes) / p) * h_nodes ** (1.0 / p)
    _, at_edges = g.tail_cumulative(vals)
    idx = np.array([g.edge_index(x) for x in U])
    return _scalar_or_array(t, tt * at_edges[idx])


def _tail_samples(f, p, g):
    from .spaces import _tail

    vals, (t_nodes, t_edges) = _tail(f, p, g)
    u = np.concatenate((g.nodes.ravel(), g.edges))
    tv = np.concatenate((t_nodes.ravel(), [0.0], t_edges[1:]))
    order = np.argsort(u, kind="stable")
    return vals, u[order], tv[order]


def k_closed_grand_classical(f: Rearrangement, p: float, t, grid: LogGrid):
    """sup_{0<s<phi(t)} (1 - log s)^{-1/p} (int_s^1 f_*^p)^{1/p}, phi(t) = exp(1 - t^{-p})."""
    _check_p(p)
    tt = _check_t(t)
    f = _rearranged(f, grid)
    if f.is_zero:
        return _scalar_or_array(t, np.zeros(tt.size))
    t_growth = (f.growth ** p * _JACOBIAN).tail()
    if (Growth(0.0, -1.0 / p) * t_growth ** (1.0 / p)).grows:
        return _scalar_or_array(t, np.full(tt.size, math.inf))
    U = np.minimum(canonical_u("grand-classical", p, tt), grid.u_max)
    g = grid.refined(list(f.breaks_u) + list(U))
    vals, u, tv = _tail_samples(f, p, g)
    edges = g.tail_cumulative(vals)[1]
    with np.errstate(divide="ignore"):
        lv = (np.log(tv) - np.log(u)) / p

    def fun(x):
        with np.errstate(divide="ignore"):
            return (np.log(g.tail_cumulative_at(vals, x, edges)) - np.log(x)) / p

    out = np.empty(tt.size)
    for i, Ui in enumerate(U):
        k = int(np.searchsorted(u, Ui * (1 - 1e-13)))
        out[i] = math.exp(_polished_sup(fun, u[k:], lv[k:], g.u_max))
    return _scalar_or_array(t, out)


def k_closed_grand_grand(f: Rearrangement, p: float, alpha: float, beta: float, t,
                         grid: LogGrid):
    """sup_{s<phi} u^{-alpha/p}(int_s^phi f_*^p)^{1/p} + t sup_{phi<s<1} u^{-beta/p}(int_s^1 f_*^p)^{1/p},
    phi(t) = exp(1 - t^{p/(beta - alpha)})."""
    _check_p(p)
    if not (0.0 < beta < alpha):
        raise ParameterError("grand-grand closed form needs 0 < beta < alpha")
    tt = _check_t(t)
    f = _rearranged(f, grid)
    if f.is_zero:
        return _scalar_or_array(t, np.zeros(tt.size))
    t_growth = (f.growth ** p * _JACOBIAN).tail()
    if (Growth(0.0, -alpha / p) * t_growth ** (1.0 / p)).grows:
        return _scalar_or_array(t, np.full(tt.size, math.inf))
    U = np.minimum(canonical_u("grand-grand", p, tt, alpha, beta), grid.u_max)
    g = grid.refined(list(f.breaks_u) + list(U))
    vals, u, tv = _tail_samples(f, p, g)
    edges = g.tail_cumulative(vals)[1]
    logu = np.log(u)
    out = np.empty(tt.size)
    for i, Ui in enumerate(U):
        k = int(np.searchsorted(u, Ui * (1 - 1e-13)))
        t_at = float(g.tail_cumulative_at(vals, Ui, edges)[0])

        def first(x, t_at=t_at):
            with np.errstate(divide="ignore", invalid="ignore"):
                d = np.maximum(g.tail_cumulative_at(vals, x, edges) - t_at, 0.0)
                return (np.log(d) - alpha * np.log(x)) / p

        def second(x):
            with np.errstate(divide="ignore"):
                return (np.log(g.tail_cumulative_at(vals, x, edges)) - beta * np.log(x)) / p

        with np.errstate(divide="ignore"):
            lv1 = (np.log(np.maximum(tv[k:] - t_at, 0.0)) - alpha * logu[k:]) / p
            lv2 = (np.log(tv[:k + 1]) - beta * logu[:k + 1]) / p
        a1 = _polished_sup(first, u[k:], lv1, g.u_max)
        a2 = _polished_sup(second, u[:k + 1], lv2, Ui)
        out[i] = math.exp(a1) + tt[i] * math.exp(a2)
    return _scalar_or_array(t, out)


def k_closed_weak_classical(f: Rearrangement, p: float, t, grid: LogGrid):
    """t [int_0^{t^{-p}} psi_{*,nu}(x)^p dx]^{1/p} with psi(s) = s^{1/p} f_*(s)."""
    _check_p(p)
    tt = _check_t(t, upper_closed=True)
    f = _rearranged(f, grid)
    if f.is_zero:
        return _scalar_or_array(t, np.zeros(tt.size))
    psi = Psi(f, p)
    if psi.growth.grows:
        raise EvaluationError("s^{1/p} f_*(s) is unbounded: f is not in the weak space")
    budgets = tt ** -p
    nu = nu_rearrangement(psi, float(budgets.max()), grid)
    return _scalar_or_array(t, tt * nu.power_integral(budgets, p) ** (1.0 / p))


def greedy_set_supremum(f: Rearrangement, p: float, budget: float, grid: LogGrid) -> float:
    """max over E with nu(E) = budget of int_E f_*^p ds, by greedy selection of nodes.

    Node k carries nu-mass W_k (its du weight) and Lebesgue mass s_k W_k, so it
    contributes psi_k^p W_k; the best set takes nodes in decreasing psi.
    """
    if not (budget > 0):
        raise ParameterError("budget must be positive")
    f = _rearranged(f, grid)
    if f.is_zero:
        return 0.0
    psi = Psi(f, p)
    if psi.growth.grows:
        return math.inf
    g = grid.refined(f.breaks_u)
    lp = p * psi.log_u(g.nodes).ravel()
    w = g.weights.ravel()
    order = np.argsort(-lp, kind="stable")
    lp, w = lp[order], w[order]
    cum = np.cumsum(w)
    n = int(np.searchsorted(cum, budget))
    val = np.exp(lp[:n]) @ w[:n]
    if n < w.size:
        val += np.exp(lp[n]) * (budget - (cum[n - 1] if n else 0.0))
    return float(val)


def k_lower_weak_small(f: Rearrangement, p: float, t: float, grid: LogGrid):
    """(rho(t), sup_{0<s<t} s^{1/p} f_*(s)) with rho(t) = (1 - log t)^{-1 + 1/p}."""
    _check_p(p)
    _check_t(t)
    t = float(t)
    u_t = 1.0 - math.log(t)
    rho = u_t ** (-1.0 + 1.0 / p)
    f = _rearranged(f, grid)
    if f.is_zero:
        return rho, 0.0
    psi = Psi(f, p)
    if psi.growth.grows:
        return rho, math.inf
    g = grid.refined(list(f.breaks_u) + [u_t])
    u = sample_points(g)
    u = u[u >= u_t * (1 + 1e-13)]
    return rho, math.exp(_polished_sup(psi.log_u, u, psi.log_u(u), g.u_max))


def k_closed(f: Rearrangement, cpl: CoupleSpec, t, grid: LogGrid):
    p = cpl.p
    if cpl.tag == "classical-small":
        return k_closed_classical_small(f, p, t, grid)
    if cpl.tag == "grand-classical":
        return k_closed_grand_classical(f, p, t, grid)
    if cpl.tag == "grand-grand":
        return k_closed_grand_grand(f, p, cpl.x0.theta, cpl.x1.theta, t, grid)
    if cpl.tag == "weak-classical":
        return k_closed_weak_classical(f, p, t, grid)
    raise ParameterError(f"no closed-form K-functional for couple {cpl.tag!r}")


def k_curve(f: Rearrangement, cpl: CoupleSpec, t_grid, method: str = "search",
            grid: LogGrid | None = None, levels: int = 200) -> KCurve:
    from .grids import make_log_grid

    grid = grid or make_log_grid()
    t = np.asarray(t_grid, dtype=float)
    if method == "search":
        vals = np.atleast_1d(k_search(f, cpl, t, levels, grid))
    elif method == "closed-form":
        vals = np.atleast_1d(k_closed(f, cpl, t, grid))
    else:
        raise ParameterError(f"unknown K method {method!r}")
    return KCurve(tuple(float(x) for x in t), tuple(float(v) for v in vals), method, cpl)
