"""Power-log weights, space descriptors and the norm of every family.

Norm evaluation works on the log grid with f's breakpoints inserted as cell
edges.  Divergence is decided by the growth algebra before any quadrature, so
a norm that is infinite for an analytic power-log function returns ``inf``
instead of a large truncated value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar

from .asymptotics import Growth
from .errors import EvaluationError, ParameterError
from .grids import LogGrid, t_of_u
from .rearrangement import Function01, rearrange_on_grid, sample_points

INF = math.inf
_JACOBIAN = Growth(1.0, 0.0)


@dataclass(frozen=True)
class PowerLogWeight:
    """w(t) = t^g0 (1 - log t)^g1."""

    g0: float = 0.0
    g1: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.g0) and math.isfinite(self.g1)):
            raise ParameterError("weight exponents must be finite")

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        return self.g0 * (1.0 - u) + self.g1 * np.log(u)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** self.g0 * (1.0 - np.log(t)) ** self.g1
        return out if out.ndim else float(out)

    @property
    def growth(self) -> Growth:
        return Growth(self.g0, self.g1)

    def to_dict(self) -> dict:
        return {"g0": self.g0, "g1": self.g1}


ONE = PowerLogWeight(0.0, 0.0)


def _check_exponent(name, v, lo=1.0, allow_inf=True):
    if v != v or v < lo or (math.isinf(v) and not allow_inf):
        raise ParameterError(f"{name} must be in [{lo}, {'inf]' if allow_inf else 'inf)'}, got {v!r}")


# ------------------------------------------------------------------ specs
@dataclass(frozen=True)
class Lp:
    p: float
    family: str = field(default="Lp", init=False)

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)


@dataclass(frozen=True)
class WeakLp:
    p: float
    family: str = field(default="WeakLp", init=False)

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)


@dataclass(frozen=True)
class LorentzPQ:
    p: float
    q: float
    family: str = field(default="LorentzPQ", init=False)

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)
        _check_exponent("q", self.q)


@dataclass(frozen=True)
class LambdaP:
    p: float
    w: PowerLogWeight = ONE
    family: str = field(default="LambdaP", init=False)

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)


@dataclass(frozen=True)
class GrandLp:
    p: float
    theta: float = 1.0
    family: str = field(default="GrandLp", init=False)

    def __post_init__(self):
        if not (1.0 < self.p < INF):
            raise ParameterError("grand Lebesgue space needs 1 < p < inf")
        if not (self.theta > 0) or math.isinf(self.theta):
            raise ParameterError("theta must be finite and positive")


@dataclass(frozen=True)
class SmallLp:
    p: float
    theta: float = 1.0
    family: str = field(default="SmallLp", init=False)

    def __post_init__(self):
        if not (1.0 < self.p < INF):
            raise ParameterError("small Lebesgue space needs 1 < p < inf")
        if not (self.theta > 0) or math.isinf(self.theta):
            raise ParameterError("theta must be finite and positive")


@dataclass(frozen=True)
class GGamma:
    """rho(f) = [int_0^1 w1(t) (int_0^t f_*^p w2)^{m/p} dt]^{1/m}."""

    p: float
    m: float
    w1: PowerLogWeight
    w2: PowerLogWeight = ONE
    family: str = field(default="GGamma", init=False)

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)
        _check_exponent("m", self.m)
        if not self.c2_holds():
            warnings.warn(f"{self}: int_0^t w2 is not in L^(m/p)(w1); the space is trivial",
                          stacklevel=3)

    def c2_holds(self) -> bool:
        """Condition c2, decided exactly for power-log weights.

        (c1, doubling of w2, always holds for power-log weights.)
        """
        inner = (self.w2.growth * _JACOBIAN).head()
        if inner is None:
            return False
        if math.isinf(self.m):
            return not (self.w1.growth * inner ** (1.0 / self.p)).grows
        return (self.w1.growth * _JACOBIAN * inner ** (self.m / self.p)).integrable


@dataclass(frozen=True)
class GGammaSup:
    """(int_0^1 v1(t) [sup_{0<s<t} v2(s) f_*(s)]^r dt)^{1/r}."""

    r: float
    v1: PowerLogWeight
    v2: PowerLogWeight
    family: str = field(default="GGammaSup", init=False)

    def __post_init__(self):
        _check_exponent("r", self.r)


SpaceSpec = Union[Lp, WeakLp, LorentzPQ, LambdaP, GrandLp, SmallLp, GGamma, GGammaSup]
FAMILIES = {c.__name__: c for c in (Lp, WeakLp, LorentzPQ, LambdaP, GrandLp, SmallLp,
                                    GGamma, GGammaSup)}
_WEIGHT_FIELDS = ("w", "w1", "w2", "v1", "v2")


# ------------------------------------------------------------------ codec
def _num(v):
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "+inf"):
            return INF
        raise ParameterError(f"not a number: {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParameterError(f"not a number: {v!r}")
    return float(v)


def _enc(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v


def space_to_dict(space: SpaceSpec) -> dict:
    out = {"family": space.family}
    for k, v in asdict(space).items():
        if k == "family":
            continue
        out[k] = v if isinstance(v, dict) else _enc(v)
    return out


def space_from_dict(d: dict) -> SpaceSpec:
    if not isinstance(d, dict) or "family" not in d:
        raise ParameterError("space descriptor needs a 'family' key")
    cls = FAMILIES.get(d["family"])
    if cls is None:
        raise ParameterError(f"unknown space family {d['family']!r}")
    names = [f for f in cls.__dataclass_fields__ if f != "family"]
    extra = set(d) - set(names) - {"family"}
    if extra:
        raise ParameterError(f"unknown keys for {d['family']}: {sorted(extra)}")
    kwargs = {}
    for k in names:
        if k not in d:
            continue
        v = d[k]
        if k in _WEIGHT_FIELDS:
            if not isinstance(v, dict) or set(v) - {"g0", "g1"}:
                raise ParameterError(f"weight {k} must be an object with keys g0, g1")
            kwargs[k] = PowerLogWeight(_num(v.get("g0", 0.0)), _num(v.get("g1", 0.0)))
        else:
            kwargs[k] = _num(v)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ParameterError(str(exc)) from None


# ------------------------------------------------------- grid primitives
def _exp(logv):
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        return np.exp(logv)


def _remainder(growth: Growth, value: float, u: float) -> float:
    """Approximate int_u^inf of a function of the given growth class."""
    if value == 0.0 or not math.isfinite(value):
        return 0.0
    if growth.kappa > 1e-12:
        return value / growth.kappa
    d = -growth.lam - 1.0
    return value * u / d if d > 1e-12 else 0.0


def _head(f: Function01, p: float, w2: PowerLogWeight, g: LogGrid):
    """H(u) = int_0^t f^p w2 ds at nodes and edges, with the beyond-grid remainder."""
    log_int = p * f.log_u(g.nodes) + w2.log_u(g.nodes) + (1.0 - g.nodes)
    vals = _exp(log_int)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("inner integrand overflowed")
    at_nodes, at_edges = g.head_cumulative(vals)
    end = float(_exp(p * f.log_u(np.array([g.u_max]))[0] + w2.log_u(g.u_max) + 1.0 - g.u_max))
    extra = _remainder(f.growth ** p * w2.growth * _JACOBIAN, end, g.u_max)
    # partial-cell rules can dip below zero on underflowing cells
    return np.maximum(at_nodes + extra, 0.0), np.maximum(at_edges + extra, 0.0)


def _tail(f: Function01, p: float, g: LogGrid):
    """T(u) = int_t^1 f^p ds at nodes and edges."""
    vals = _exp(p * f.log_u(g.nodes) + (1.0 - g.nodes))
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("tail integrand overflowed")
    at_nodes, at_edges = g.tail_cumulative(vals)
    return vals, (np.maximum(at_nodes, 0.0), np.maximum(at_edges, 0.0))


def _integrate_outer(log_vals, growth: Growth, g: LogGrid) -> float:
    vals = _exp(log_vals)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("outer integrand overflowed")
    total = g.integral(vals)
    # remainder from the last node, extrapolated by the growth class
    end = float(vals[-1, -1])
    return total + _remainder(growth, end, float(g.nodes[-1, -1]))


def _polished_sup(fun_log, u_samples: np.ndarray, log_vals: np.ndarray, u_hi: float):
    """Max of sampled log-values, refined by a bounded Brent search around the best sample."""
    if np.any(np.isnan(log_vals)):
        raise EvaluationError("NaN in supremum samples")
    k = int(np.argmax(log_vals))
    best = float(log_vals[k])
    if not math.isfinite(best):
        return best
    lo = float(u_samples[max(k - 1, 0)])
    hi = float(u_samples[min(k + 1, u_samples.size - 1)])
    hi = min(hi, u_hi)
    if hi > lo:
        def objective(x):
            v = float(fun_log(np.array([x]))[0])
            # -inf (outside the support) would poison Brent's parabolic step
            return -v if math.isfinite(v) else 1e300

        res = minimize_scalar(objective, bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12 * hi})
        if res.success and -res.fun > best:
            best = float(-res.fun)
    return best


# ----------------------------------------------------------- the functionals
def lp_norm(f: Function01, p: float, grid: LogGrid) -> float:
    if f.is_zero:
        return 0.0
    if not (f.growth ** p * _JACOBIAN).integrable:
        return INF
    g = grid.refined(f.breaks_u)
    growth = f.growth ** p * _JACOBIAN
    return _integrate_outer(p * f.log_u(g.nodes) + (1.0 - g.nodes), growth, g) ** (1.0 / p)


def weak_norm(f: Function01, p: float, grid: LogGrid) -> float:
    """sup_s s^{1/p} f_*(s)."""
    if f.is_zero:
        return 0.0
    if (f.growth * Growth(1.0 / p, 0.0)).grows:
        return INF
    g = grid.refined(f.breaks_u)
    u = sample_points(g)

    def fun(x):
        return f.log_u(x) + (1.0 - x) / p

    return math.exp(_polished_sup(fun, u, fun(u), g.u_max))


def lorentz_norm(f: Function01, p: float, q: float, grid: LogGrid) -> float:
    if math.isinf(q):
        return weak_norm(f, p, grid)
    if f.is_zero:
        return 0.0
    growth = (f.growth * Growth(1.0 / p, 0.0)) ** q
    if not growth.integrable:
        return INF
    g = grid.refined(f.breaks_u)
    return _integrate_outer(q * (f.log_u(g.nodes) + (1.0 - g.nodes) / p), growth, g) ** (1.0 / q)


def lambda_norm(f: Function01, p: float, w: PowerLogWeight, grid: LogGrid) -> float:
    if f.is_zero:
        return 0.0
    growth = f.growth ** p * w.growth * _JACOBIAN
    if not growth.integrable:
        return INF
    g = grid.refined(f.breaks_u)
    lv = p * f.log_u(g.nodes) + w.log_u(g.nodes) + (1.0 - g.nodes)
    return _integrate_outer(lv, growth, g) ** (1.0 / p)


def ggamma_norm(f: Function01, p: float, m: float, w1: PowerLogWeight, w2: PowerLogWeight,
                grid: LogGrid) -> float:
    if f.is_zero:
        return 0.0
    inner = (f.growth ** p * w2.growth * _JACOBIAN).head()
    if inner is None:
        return INF
    g = grid.refined(f.breaks_u)
    h_nodes, h_edges = _head(f, p, w2, g)
    with np.errstate(divide="ignore"):
        log_h_nodes = np.log(h_nodes)
    if math.isinf(m):
        if (w1.growth * inner ** (1.0 / p)).grows:
            return INF
        u = np.concatenate((g.nodes.ravel(), g.edges[:-1]))
        with np.errstate(divide="ignore"):
            lv = np.concatenate((w1.log_u(g.nodes).ravel() + log_h_nodes.ravel() / p,
                                 w1.log_u(g.edges[:-1]) + np.log(h_edges[:-1]) / p))
        return float(_exp(np.max(lv)))
    growth = w1.growth * _JACOBIAN * inner ** (m / p)
    if not growth.integrable:
        return INF
    lv = w1.log_u(g.nodes) + (1.0 - g.nodes) + (m / p) * log_h_nodes
    return _integrate_outer(lv, growth, g) ** (1.0 / m)


def tail_form(f: Function01, p: float, m: float, w1: PowerLogWeight, grid: LogGrid) -> float:
    """(int_0^1 w1(t) (int_t^1 f_*^p)^{m/p} dt)^{1/m}."""
    if f.is_zero:
        return 0.0
    g = grid.refined(f.breaks_u)
    _, (t_nodes, _) = _tail(f, p, g)
    t_growth = (f.growth ** p * _JACOBIAN).tail()
    growth = w1.growth * _JACOBIAN * t_growth ** (m / p)
    if not growth.integrable:
        return INF
    with np.errstate(divide="ignore"):
        lv = w1.log_u(g.nodes) + (1.0 - g.nodes) + (m / p) * np.log(t_nodes)
    return _integrate_outer(lv, growth, g) ** (1.0 / m)


def grand_norm(f: Function01, p: float, theta: float, grid: LogGrid) -> float:
    """sup_{0<t<1} (1 - log t)^{-theta/p} (int_t^1 f_*^p)^{1/p}."""
    if f.is_zero:
        return 0.0
    t_growth = (f.growth ** p * _JACOBIAN).tail()
    if (Growth(0.0, -theta / p) * t_growth ** (1.0 / p)).grows:
        return INF
    g = grid.refined(f.breaks_u)
    vals, (t_nodes, t_edges) = _tail(f, p, g)
    u = np.concatenate((g.nodes.ravel(), g.edges[1:]))
    tv = np.concatenate((t_nodes.ravel(), t_edges[1:]))
    order = np.argsort(u)
    u, tv = u[order], tv[order]
    with np.errstate(divide="ignore"):
        lv = (-theta * np.log(u) + np.log(tv)) / p

    def fun(x):
        with np.errstate(divide="ignore"):
            return (-theta * np.log(x) + np.log(g.tail_cumulative_at(vals, x, t_edges))) / p

    return math.exp(_polished_sup(fun, u, lv, g.u_max))


def ggamma_sup_norm(f: Function01, r: float, v1: PowerLogWeight, v2: PowerLogWeight,
                    grid: LogGrid) -> float:
    if f.is_zero:
        return 0.0
    inner = f.growth * v2.growth
    if inner.grows:
        return INF
    g = grid.refined(f.breaks_u)
    u = sample_points(g)
    lv = f.log_u(u) + v2.log_u(u)
    # sup over s < t is a running max from the small-s (large-u) end
    run = np.maximum.accumulate(lv[::-1])[::-1]
    idx = np.searchsorted(u, g.nodes.ravel())
    s_nodes = run[np.minimum(idx, u.size - 1)].reshape(g.nodes.shape)
    if math.isinf(r):
        if (v1.growth * inner.sup_beyond()).grows:
            return INF
        return float(_exp(np.max(v1.log_u(u) + run)))
    growth = v1.growth * _JACOBIAN * inner.sup_beyond() ** r
    if not growth.integrable:
        return INF
    return _integrate_outer(v1.log_u(g.nodes) + (1.0 - g.nodes) + r * s_nodes, growth, g) ** (1.0 / r)


def norm(space: SpaceSpec, f: Function01, grid: LogGrid) -> float:
    """Norm of f in the given space (``inf`` when it diverges)."""
    if not f.decreasing and not isinstance(space, Lp):
        f = rearrange_on_grid(f, grid)
    if isinstance(space, Lp):
        return lp_norm(f, space.p, grid)
    if isinstance(space, WeakLp):
        return weak_norm(f, space.p, grid)
    if isinstance(space, LorentzPQ):
        return lorentz_norm(f, space.p, space.q, grid)
    if isinstance(space, LambdaP):
        return lambda_norm(f, space.p, space.w, grid)
    if isinstance(space, GrandLp):
        return grand_norm(f, space.p, space.theta, grid)
    if isinstance(space, SmallLp):
        return small_as_ggamma(space.p, space.theta).evaluate(f, grid)
    if isinstance(space, GGamma):
        return ggamma_norm(f, space.p, space.m, space.w1, space.w2, grid)
    if isinstance(space, GGammaSup):
        return ggamma_sup_norm(f, space.r, space.v1, space.v2, grid)
    raise ParameterError(f"unsupported space {space!r}")


@dataclass(frozen=True)
class _GGammaForm:
    p: float
    m: float
    w1: PowerLogWeight
    w2: PowerLogWeight

    def evaluate(self, f, grid):
        return ggamma_norm(f, self.p, self.m, self.w1, self.w2, grid)


def small_as_ggamma(p: float, theta: float) -> _GGammaForm:
    """The small Lebesgue norm written as a GGamma(p, 1; t^{-1}u^{theta-1-theta/p}, 1) form."""
    return _GGammaForm(p, 1.0, PowerLogWeight(-1.0, theta - 1.0 - theta / p), ONE)


# --------------------------------------------------- weights with gamma, beta
def gamma_weights(gamma: float, beta: float):
    """w1 = t^{-1}(1 - log t)^gamma, w2 = (1 - log t)^beta."""
    return PowerLogWeight(-1.0, gamma), PowerLogWeight(0.0, beta)


def ggamma_tail_norm(p: float, m: float, gamma: float, beta: float, f: Function01,
                     grid: LogGrid) -> float:
    """(int_0^1 (1 - log t)^{gamma + beta m/p} (int_t^1 f_*^p)^{m/p} dt/t)^{1/m}."""
    _check_exponent("p", p, allow_inf=False)
    _check_exponent("m", m, allow_inf=False)
    if not (gamma > -1.0 and gamma + beta * m / p + 1.0 < 0.0):
        raise ParameterError("tail form needs gamma > -1 and gamma + beta m/p + 1 < 0")
    if not f.decreasing:
        f = rearrange_on_grid(f, grid)
    return tail_form(f, p, m, PowerLogWeight(-1.0, gamma + beta * m / p), grid)


def weight_reduce(p: float, m: float, gamma: float, beta: float) -> SpaceSpec:
    """Simplest equivalent form of GGamma(p, m; t^{-1}u^gamma, u^beta).

    gamma < -1 gives the classical Lorentz space; gamma > -1 with
    gamma + beta m/p + 1 >= 0 moves the inner weight to the outer one.  Other
    cases (including gamma = -1) return the space unchanged.
    """
    w1, w2 = gamma_weights(gamma, beta)
    if gamma < -1.0:
        return LambdaP(p, w2)
    if gamma > -1.0 and gamma + beta * m / p + 1.0 >= 0.0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return GGamma(p, m, PowerLogWeight(-1.0, gamma + beta * m / p), ONE)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return GGamma(p, m, w1, w2)


def small_theta(p: float, gamma: float, beta: float) -> float:
    """theta = p'(gamma + 1 + beta/p) for GGamma(p, 1; w1, w2) = small Lebesgue."""
    if not (p > 1.0 and gamma > -1.0 and gamma + 1.0 + beta / p > 0.0):
        raise ParameterError("need p > 1, gamma > -1 and gamma + 1 + beta/p > 0")
    return p / (p - 1.0) * (gamma + 1.0 + beta / p)


def ggamma(p: float, m: float, w1: PowerLogWeight, w2: PowerLogWeight = ONE) -> GGamma:
    """GGamma constructor without the c2 warning (for internally built weights)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return GGamma(p, m, w1, w2)


__all__ = [
    "PowerLogWeight", "ONE", "Lp", "WeakLp", "LorentzPQ", "LambdaP", "GrandLp", "SmallLp",
    "GGamma", "GGammaSup", "SpaceSpec", "FAMILIES", "norm", "ggamma_tail_norm", "weight_reduce",
    "small_theta", "gamma_weights", "ggamma", "tail_form", "space_to_dict", "space_from_dict",
    "t_of_u",
]
