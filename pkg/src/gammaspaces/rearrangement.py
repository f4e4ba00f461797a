"""Decreasing rearrangements on (0, 1) and their building blocks.

Every function here is evaluated in log form on the u = 1 - log s axis:
``log_u(u)`` returns log f(exp(1 - u)) (``-inf`` where f vanishes), which keeps
s^{-a} singularities finite all the way down to s = exp(1 - u_max).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .asymptotics import Growth, max_growth, min_growth
from .errors import EvaluationError, ParameterError
from .grids import LogGrid, u_of_t

ZERO_GROWTH = Growth(math.inf, 0.0, 0.0)

# relative offset used to sample one-sided limits at a cell edge
_SIDE = 1e-13
# level bisection for psi_{*,nu}: width relative to sup psi, iteration cap
_BISECT_RTOL = 1e-16
_BISECT_ITER = 60


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


class Function01:
    """A nonnegative function on (0, 1) evaluated through ``log_u``."""

    decreasing = False
    breaks_u: tuple = ()
    growth: Growth = Growth()

    def log_u(self, u):  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.exp(self.log_u(u_of_t(s)))
        return out if out.ndim else float(out)

    @property
    def is_zero(self) -> bool:
        return False


class Rearrangement(Function01):
    """A nonincreasing nonnegative function on (0, 1], i.e. some f_*."""

    decreasing = True

    def value_at_zero_log(self):
        """log f_*(0+) (``inf`` for unbounded functions)."""
        if self.growth.grows:
            return math.inf
        return float(self.log_u(np.array([1e300]))[0])


@dataclass(frozen=True, eq=False)
class PowerLog(Rearrangement):
    """C s^{-a} (1 - log s)^{-b} on (0, support], zero beyond.

    When b > a the formula increases towards s = 1 from s_m = exp(1 - b/a); it is
    replaced there by the constant value at s_m (its greatest nonincreasing
    minorant), so the function stays a rearrangement and keeps its behaviour
    at s = 0.
    """

    a: float
    b: float = 0.0
    scale: float = 1.0
    support: float = 1.0

    def __post_init__(self):
        if not (self.a >= 0.0) or not math.isfinite(self.a):
            raise ParameterError("power-log exponent a must be finite and >= 0")
        if not math.isfinite(self.b):
            raise ParameterError("power-log exponent b must be finite")
        if not (self.scale > 0.0) or not math.isfinite(self.scale):
            raise ParameterError("scale must be finite and positive")
        if not (0.0 < self.support <= 1.0):
            raise ParameterError("support must lie in (0, 1]")
        if self.a == 0.0 and self.b > 0.0:
            raise ParameterError("(1 - log s)^{-b} with b > 0 increases in s; use b <= 0")

    @cached_property
    def u_support(self) -> float:
        return 1.0 - math.log(self.support)

    @cached_property
    def u_flat(self) -> float:
        """Below this u (i.e. above s_m) the function is held constant."""
        if self.b > 0.0:
            return max(self.u_support, self.b / self.a)
        return self.u_support

    @property
    def breaks_u(self):
        out = []
        if self.u_support > 1.0:
            out.append(self.u_support)
        if self.u_flat > self.u_support:
            out.append(self.u_flat)
        return tuple(out)

    @property
    def growth(self):
        return Growth(-self.a, -self.b)

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        ue = np.maximum(u, self.u_flat)
        val = math.log(self.scale) + self.a * (ue - 1.0) - self.b * np.log(ue)
        return np.where(u >= self.u_support, val, -np.inf)


@dataclass(frozen=True, eq=False)
class Step(Rearrangement):
    """values[i] on [breaks_s[i-1], breaks_s[i]) with breaks_s[-1] <= 1, zero after."""

    breaks_s: tuple
    values: tuple

    def __post_init__(self):
        b = np.asarray(self.breaks_s, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or b.size == 0 or b.size != v.size:
            raise ParameterError("step function needs matching, non-empty breaks and values")
        if not (np.all(b > 0) and np.all(b <= 1.0) and np.all(np.diff(b) > 0)):
            raise ParameterError("step breaks must increase strictly within (0, 1]")
        if not (np.all(np.isfinite(v)) and np.all(v >= 0) and np.all(np.diff(v) <= 0)):
            raise ParameterError("step values must be finite, nonnegative and nonincreasing")
        object.__setattr__(self, "breaks_s", tuple(float(x) for x in b))
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    @cached_property
    def _u_asc(self):
        # thresholds strictly inside (0, 1); a break at s = 1 closes the support
        b = np.asarray(self.breaks_s)
        return np.sort(1.0 - np.log(b[b < 1.0]))

    @cached_property
    def _logv(self):
        v = _log(np.asarray(self.values))
        if self.breaks_s[-1] < 1.0:
            v = np.concatenate((v, [-np.inf]))
        return v

    @property
    def breaks_u(self):
        return tuple(self._u_asc)

    @property
    def growth(self):
        return Growth() if self.values[0] > 0 else ZERO_GROWTH

    @property
    def is_zero(self):
        return self.values[0] == 0.0

    def log_u(self, u):
        # number of thresholds s_i <= s, i.e. u_i >= u
        u = np.asarray(u, dtype=float)
        k = self._u_asc.size
        idx = k - np.searchsorted(self._u_asc, u, side="left")
        return self._logv[idx]


def indicator(a: float) -> Step:
    """chi_{(0, a]} up to the value at the endpoint."""
    return Step((a,), (1.0,))


def constant(c: float) -> Step:
    return Step((1.0,), (c,))


def zero() -> Step:
    return Step((1.0,), (0.0,))


@dataclass(frozen=True, eq=False)
class Tabulated(Rearrangement):
    """Linear in (log s, log f_*) between nodes, constant beyond the end nodes."""

    nodes_u: tuple
    values: tuple

    def __post_init__(self):
        u = np.asarray(self.nodes_u, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if u.ndim != 1 or u.size < 1 or u.size != v.size:
            raise ParameterError("tabulated function needs matching node and value lists")
        if not (np.all(u >= 1.0) and np.all(np.diff(u) > 0)):
            raise ParameterError("tabulated nodes must be u-values >= 1, strictly increasing")
        if not (np.all(v > 0) and np.all(np.isfinite(v)) and np.all(np.diff(v) >= 0)):
            raise ParameterError("tabulated values must be positive and nondecreasing in u")
        object.__setattr__(self, "nodes_u", tuple(float(x) for x in u))
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    @property
    def breaks_u(self):
        return tuple(x for x in self.nodes_u if x > 1.0)

    def log_u(self, u):
        return np.interp(u, self.nodes_u, np.log(self.values))


# ---------------------------------------------------------------- combinators
def _crossing_u(f: Function01, log_level: float, u_hi: float = 1e12) -> float | None:
    """u where a nondecreasing-in-u log f crosses log_level (bisection)."""
    lo, hi = 1.0, u_hi
    flo = float(f.log_u(np.array([lo]))[0])
    fhi = float(f.log_u(np.array([hi]))[0])
    if not (flo < log_level < fhi):
        return None
    for _ in range(200):
        mid = math.sqrt(lo * hi) if hi > 4 * lo else 0.5 * (lo + hi)
        if float(f.log_u(np.array([mid]))[0]) > log_level:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-14 * hi:
            break
    return hi


@dataclass(frozen=True, eq=False)
class Scaled(Rearrangement):
    f: Rearrangement
    c: float

    def __post_init__(self):
        if not (self.c >= 0.0) or not math.isfinite(self.c):
            raise ParameterError("scale factor must be finite and >= 0")

    @property
    def breaks_u(self):
        return self.f.breaks_u

    @property
    def growth(self):
        return self.f.growth if self.c > 0 else ZERO_GROWTH

    @property
    def is_zero(self):
        return self.c == 0.0 or self.f.is_zero

    def log_u(self, u):
        return self.f.log_u(u) + _log(self.c)


@dataclass(frozen=True, eq=False)
class Sum(Rearrangement):
    """f + g of two rearrangements (again nonincreasing)."""

    f: Rearrangement
    g: Rearrangement

    @property
    def breaks_u(self):
        return tuple(sorted(set(self.f.breaks_u) | set(self.g.breaks_u)))

    @property
    def growth(self):
        return max_growth(self.f.growth, self.g.growth)

    @property
    def is_zero(self):
        return self.f.is_zero and self.g.is_zero

    def log_u(self, u):
        return np.logaddexp(self.f.log_u(u), self.g.log_u(u))


@dataclass(frozen=True, eq=False)
class Clipped(Rearrangement):
    """(f - level)_+ for ``part='upper'`` and min(f, level) for ``part='lower'``."""

    f: Rearrangement
    level: float
    part: str = "upper"

    def __post_init__(self):
        if not (self.level >= 0.0):
            raise ParameterError("truncation level must be >= 0")
        if self.part not in ("upper", "lower"):
            raise ParameterError("part must be 'upper' or 'lower'")

    @cached_property
    def _log_level(self):
        return math.log(self.level) if self.level > 0 else -math.inf

    @cached_property
    def breaks_u(self):
        out = set(self.f.breaks_u)
        if 0.0 < self.level < math.inf:
            c = _crossing_u(self.f, self._log_level)
            if c is not None:
                out.add(c)
        return tuple(sorted(out))

    @cached_property
    def growth(self):
        g = self.f.growth
        if self.part == "lower":
            return ZERO_GROWTH if (self.level == 0 or self.f.is_zero) else Growth()
        if g.grows:
            return g
        return Growth() if self.f.value_at_zero_log() > self._log_level else ZERO_GROWTH

    @property
    def is_zero(self):
        if self.part == "lower":
            return self.level == 0.0 or self.f.is_zero
        return self.level == math.inf or self.f.value_at_zero_log() <= self._log_level

    def log_u(self, u):
        lf = self.f.log_u(u)
        if self.part == "lower":
            return np.minimum(lf, self._log_level)
        if self._log_level == -math.inf:
            return lf
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            out = lf + np.log1p(-np.exp(self._log_level - lf))
        return np.where(lf > self._log_level, out, -np.inf)


@dataclass(frozen=True, eq=False)
class PowerCap(Rearrangement):
    """min(f_*(s), cut s^{-1/p}), nonincreasing as a minimum of two such."""

    f: Rearrangement
    cut: float
    p: float
    extra_breaks: tuple = ()

    @property
    def breaks_u(self):
        return tuple(sorted(set(self.f.breaks_u) | set(self.extra_breaks)))

    @property
    def growth(self):
        if self.cut == 0.0:
            return ZERO_GROWTH
        return min_growth(self.f.growth, Growth(-1.0 / self.p, 0.0))

    @property
    def is_zero(self):
        return self.cut == 0.0 or self.f.is_zero

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        cap = _log(self.cut) + (u - 1.0) / self.p
        return np.minimum(self.f.log_u(u), cap)


@dataclass(frozen=True, eq=False)
class PowerExcess(Function01):
    """(f_*(s) - cut s^{-1/p})_+ ; not monotone in general."""

    f: Rearrangement
    cut: float
    p: float
    extra_breaks: tuple = ()

    @property
    def breaks_u(self):
        return tuple(sorted(set(self.f.breaks_u) | set(self.extra_breaks)))

    @property
    def growth(self):
        g = self.f.growth
        ref = Growth(-1.0 / self.p, 0.0)
        if self.cut == 0.0:
            return g
        if math.isinf(self.cut):
            return ZERO_GROWTH
        # f dominates s^{-1/p} near 0 only if it grows strictly faster
        return g if min_growth(g, ref) is ref and g._order() != ref._order() else ZERO_GROWTH

    @property
    def is_zero(self):
        return math.isinf(self.cut) or self.f.is_zero

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        lf = self.f.log_u(u)
        if self.cut == 0.0:
            return lf
        if math.isinf(self.cut):
            return np.full_like(u, -np.inf)
        lc = math.log(self.cut) + (u - 1.0) / self.p
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            out = lf + np.log1p(-np.exp(lc - lf))
        return np.where(lf > lc, out, -np.inf)


@dataclass(frozen=True, eq=False)
class Psi(Function01):
    """psi(s) = s^{1/p} f_*(s)."""

    f: Rearrangement
    p: float

    @property
    def breaks_u(self):
        return self.f.breaks_u

    @property
    def growth(self):
        return self.f.growth * Growth(1.0 / self.p, 0.0)

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        # (1 - u) * (1/p) cancels a * (u - 1) exactly when a == 1/p
        return self.f.log_u(u) + (1.0 - u) * (1.0 / self.p)


# ------------------------------------------------------------- sampled input
@dataclass(frozen=True)
class SampledFunction:
    """Samples on the uniform partition of (0, 1); only |values| matters."""

    values: tuple

    def __post_init__(self):
        v = np.abs(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ParameterError("samples must be a non-empty list of finite reals")
        object.__setattr__(self, "values", tuple(float(x) for x in v))


def distribution_function(f: SampledFunction, t: float) -> float:
    """|{x : |f(x)| > t}| for the piecewise-constant reading of the samples."""
    if t < 0:
        raise ParameterError("distribution function needs t >= 0")
    v = np.asarray(f.values)
    return float(np.count_nonzero(v > t)) / v.size


def decreasing_rearrangement(f: SampledFunction) -> Step:
    v = np.sort(np.asarray(f.values))[::-1]
    n = v.size
    # merge runs of equal values into one step
    last = np.flatnonzero(np.concatenate((v[1:] != v[:-1], [True])))
    breaks = (last + 1) / n
    return Step(tuple(breaks), tuple(v[last]))


def sample_points(grid: LogGrid) -> np.ndarray:
    """Nodes plus both one-sided limits at every cell edge, ascending in u."""
    e = grid.edges
    pts = np.concatenate((grid.nodes.ravel(), e[1:-1] * (1 - _SIDE), e[1:-1] * (1 + _SIDE),
                          [1.0, e[-1]]))
    return np.sort(pts)


@dataclass(frozen=True, eq=False)
class LogStep(Rearrangement):
    """Step function stored on the u axis with log values.

    ``u_breaks`` are the right ends (in s) of the steps, strictly decreasing
    in u; ``log_values`` the log of the value on each step.  This reaches
    s far below the double-precision range, which the samples of a singular
    function need.  ``tail_growth`` is the growth class the steps stand in for
    near s = 0 (used for divergence decisions and beyond-grid remainders).
    """

    u_breaks: tuple
    log_values: tuple
    tail_growth: Growth = Growth()

    def __post_init__(self):
        u = np.asarray(self.u_breaks, dtype=float)
        v = np.asarray(self.log_values, dtype=float)
        if u.ndim != 1 or u.size == 0 or u.size != v.size:
            raise ParameterError("log-step needs matching, non-empty breaks and values")
        if not (np.all(u >= 1.0) and np.all(np.diff(u) < 0)):
            raise ParameterError("log-step breaks must decrease strictly in u, down to >= 1")
        if not (np.all(np.diff(v) <= 0) and not np.any(np.isnan(v)) and np.all(v < np.inf)):
            raise ParameterError("log-step values must be finite above and nonincreasing")

    @cached_property
    def _u_asc(self):
        u = np.asarray(self.u_breaks)
        return np.sort(u[u > 1.0])

    @cached_property
    def _logv(self):
        v = np.asarray(self.log_values)
        if self.u_breaks[-1] > 1.0:
            v = np.concatenate((v, [-np.inf]))
        return v

    @property
    def breaks_u(self):
        return tuple(self._u_asc)

    @property
    def growth(self):
        return self.tail_growth if self.log_values[0] > -np.inf else ZERO_GROWTH

    @property
    def is_zero(self):
        return self.log_values[0] == -np.inf

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        k = self._u_asc.size
        idx = k - np.searchsorted(self._u_asc, u, side="left")
        return self._logv[idx]


def rearrange_on_grid(g: Function01, grid: LogGrid) -> Rearrangement:
    """Decreasing rearrangement of a general function, from its node samples.

    Each Gauss node stands for the Lebesgue measure of its weight; sorting
    the samples by value and accumulating the measures (in log form) gives a
    step function on the u axis.
    """
    if g.decreasing:
        return g
    if g.is_zero:
        return zero()
    g_grid = grid.refined(g.breaks_u)
    u = g_grid.nodes.ravel()
    lv = g.log_u(u)
    lm = np.log(g_grid.weights.ravel()) + (1.0 - u)
    if np.any(np.isnan(lv)) or np.any(lv == np.inf):
        raise EvaluationError("non-finite samples while rearranging")
    order = np.argsort(-lv, kind="stable")
    lv, lm = lv[order], lm[order]
    pos = lv > -np.inf
    if not np.any(pos):
        return zero()
    lv, lm = lv[pos], lm[pos]
    # merge equal values into one step
    last = np.flatnonzero(np.concatenate((lv[1:] != lv[:-1], [True])))
    log_s = np.logaddexp.accumulate(lm)[last]
    ub = np.maximum(1.0 - log_s, 1.0)
    vals = lv[last]
    keep = np.concatenate((np.diff(ub) < 0, [True])) if ub.size > 1 else np.array([True])
    # the last step covers up to s where the positive part ends
    ub, vals = ub[keep], vals[keep]
    ok = np.concatenate(([True], np.diff(ub) < 0))
    return LogStep(tuple(ub[ok]), tuple(vals[ok]), g.growth)


# -------------------------------------------------------------------- splits
def truncation_split(f: Rearrangement, level: float):
    """g = (f - level)_+, h = min(f, level); g_* + h_* = f_*."""
    if not (level >= 0.0):
        raise ParameterError("level must be >= 0")
    if level == math.inf:
        return zero(), f
    if level == 0.0:
        return f, zero()
    return Clipped(f, level, "upper"), Clipped(f, level, "lower")


def psi_crossings(f: Rearrangement, p: float, cut: float, grid: LogGrid) -> tuple:
    """u-values where s^{1/p} f_*(s) crosses the level ``cut``."""
    if not (0.0 < cut < math.inf):
        return ()
    psi = Psi(f, p)
    u = sample_points(grid.refined(f.breaks_u))
    lc = math.log(cut)
    d = psi.log_u(u) - lc
    d = np.where(np.isfinite(d), d, -1e300)
    idx = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
    out = []
    for i in idx:
        a, b = float(u[i]), float(u[i + 1])
        if b - a <= 1e-12 * b:
            continue  # a jump of f, already a break
        out.append(brentq(lambda x: float(psi.log_u(np.array([x]))[0]) - lc, a, b,
                          xtol=1e-14 * b))
    return tuple(out)


def weak_lp_split(f: Rearrangement, p: float, cut: float, grid: LogGrid | None = None):
    """Split along the set A = {psi > cut}, psi(s) = s^{1/p} f_*(s).

    g1 = cut s^{-1/p} on A and f_* off A, i.e. min(f_*, cut s^{-1/p});
    g2 = s^{-1/p}(psi - cut) on A and 0 off A.  With a grid, the points where
    psi crosses the cut are located and carried as breakpoints of both parts.
    """
    if not (p > 1.0):
        raise ParameterError("weak_lp_split needs p > 1")
    if not (cut >= 0.0):
        raise ParameterError("cut must be >= 0")
    if cut == math.inf:
        return f, zero()
    extra = psi_crossings(f, p, cut, grid) if grid is not None else ()
    return PowerCap(f, cut, p, extra), PowerExcess(f, cut, p, extra)


# ----------------------------------------------------- rearrangement w.r.t. nu
class NuRearrangement:
    """psi_{*,nu} for d nu = ds/s, from a piecewise reading of psi in u.

    Since d nu = du, nu{psi > lam} is the u-length of the superlevel set.  On
    segments where psi is positive at both ends log psi is interpolated
    linearly (exact for powers of s); segments touching a zero value are
    read linearly in psi.  Level-set lengths and power integrals are exact
    for that interpolant.
    """

    def __init__(self, u: np.ndarray, psi: np.ndarray, x_max: float):
        if not (x_max > 0):
            raise ParameterError("X_max must be positive")
        self.x_max = float(x_max)
        a, b = psi[:-1], psi[1:]
        self._len = np.diff(u)
        self._lo = np.minimum(a, b)
        self._hi = np.maximum(a, b)
        self._loglin = self._lo > 0
        with np.errstate(divide="ignore"):
            self._llo = np.log(np.where(self._loglin, self._lo, 1.0))
            self._lhi = np.log(np.where(self._loglin, self._hi, 1.0))
        self._flat = (self._hi - self._lo) <= 1e-12 * self._hi
        self.psi_max = float(psi.max()) if psi.size else 0.0

    @classmethod
    def from_function(cls, psi: Function01, x_max: float, grid: LogGrid):
        if psi.growth.grows:
            raise EvaluationError("psi is unbounded near s = 0")
        g_grid = grid.refined(psi.breaks_u)
        u = sample_points(g_grid)
        vals = np.exp(psi.log_u(u))
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("non-finite psi samples")
        return cls(u, vals, x_max)

    def _fraction(self, lam: float, idx=None) -> np.ndarray:
        """Share of each segment (or of segments ``idx``) on which psi > lam."""
        sl = slice(None) if idx is None else idx
        hi, lo, lhi, llo = self._hi[sl], self._lo[sl], self._lhi[sl], self._llo[sl]
        if lam <= 0.0:
            return (hi > 0).astype(float)
        ll = math.log(lam)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f_log = (lhi - ll) / (lhi - llo)
            f_lin = (hi - lam) / (hi - lo)
        frac = np.where(self._loglin[sl], f_log, f_lin)
        frac = np.where(self._flat[sl], (hi > lam).astype(float), frac)
        return np.clip(np.where(np.isnan(frac), 0.0, frac), 0.0, 1.0)

    def distribution(self, lam):
        """nu{psi > lam}, vectorised over lam."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        return np.array([self._fraction(x) @ self._len for x in lam])

    def _level(self, x):
        """lam_x = inf{lam : nu{psi > lam} <= x} by bisection.

        Segments entirely above the bracket count as full and segments
        entirely below it as empty, so only straddling segments are
        re-evaluated as the bracket shrinks.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        total = self.distribution(0.0)[0]
        all_idx = np.arange(self._len.size)
        for i, xi in enumerate(x):
            if total <= xi:
                out[i] = 0.0
                continue
            lo, hi = 0.0, self.psi_max
            idx, full = all_idx, 0.0
            for _ in range(_BISECT_ITER):
                if hi - lo <= _BISECT_RTOL * self.psi_max:
                    break
                mid = 0.5 * (lo + hi)
                if full + self._fraction(mid, idx) @ self._len[idx] <= xi:
                    hi = mid
                else:
                    lo = mid
                seg_lo, seg_hi = self._lo[idx], self._hi[idx]
                above = (seg_lo > hi) & ~self._flat[idx]
                above |= self._flat[idx] & (seg_hi > hi)
                below = seg_hi <= lo
                if above.any() or below.any():
                    full += float(self._len[idx[above]].sum())
                    idx = idx[~(above | below)]
                if idx.size == 1:
                    hi = self._solve_single(int(idx[0]), xi - full, lo, hi)
                    break
            out[i] = hi
        return out

    def _solve_single(self, j: int, x: float, lo: float, hi: float) -> float:
        """Level inside [lo, hi] where one straddling segment leaves length x."""
        if self._flat[j]:
            return min(max(self._hi[j], lo), hi)
        share = min(max(x / self._len[j], 0.0), 1.0)
        if self._loglin[j]:
            lam = math.exp(self._lhi[j] - share * (self._lhi[j] - self._llo[j]))
        else:
            lam = self._hi[j] - share * (self._hi[j] - self._lo[j])
        return min(max(lam, lo), hi)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self._level(x)
        return out if x.ndim else float(out[0])

    @cached_property
    def table(self):
        """(x, psi_{*,nu}(x)) on a geometric x-grid in (0, X_max]."""
        x = np.geomspace(self.x_max * 1e-6, self.x_max, 64)
        return x, self._level(x)

    def _superlevel_power_integral(self, lam: float, p: float) -> float:
        # int_{psi > lam} psi^p du for the interpolant
        frac = self._fraction(lam)
        ln = self._len * frac
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # log-linear: psi^p = exp(p l), l from max(llo, log lam) to lhi
            lb = np.maximum(self._llo, math.log(lam)) if lam > 0 else self._llo
            dl = self._lhi - lb
            seg_log = ln * np.where(dl > 1e-12,
                                    (np.exp(p * self._lhi) - np.exp(p * lb)) / (p * dl),
                                    np.exp(p * self._lhi))
            base = np.maximum(self._lo, lam)
            d = self._hi - base
            seg_lin = ln * np.where(d > 1e-14 * self._hi,
                                    (self._hi ** (p + 1) - base ** (p + 1)) / ((p + 1) * d),
                                    self._hi ** p)
        seg = np.where(self._loglin, seg_log, seg_lin)
        seg = np.where(self._flat, ln * self._hi ** p, seg)
        return float(np.sum(np.where(frac > 0, seg, 0.0)))

    def power_integral(self, x, p: float):
        """int_0^x psi_{*,nu}(y)^p dy via the superlevel set of psi at psi_{*,nu}(x)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lam = self._level(x)
        out = np.empty_like(x)
        for i, (xi, li) in enumerate(zip(x, lam)):
            inner = self._superlevel_power_integral(li, p)
            rest = max(xi - self._fraction(li) @ self._len, 0.0)
            out[i] = inner + li ** p * rest
        return out


def nu_rearrangement(psi, x_max: float, grid: LogGrid) -> NuRearrangement:
    """psi_{*,nu}(x) = inf{lam : nu{psi > lam} <= x}.

    ``psi`` is a Function01 or a plain callable of s.
    """
    if not isinstance(psi, Function01):
        psi = _CallableFunction(psi)
    return NuRearrangement.from_function(psi, x_max, grid)


class _CallableFunction(Function01):
    def __init__(self, fn):
        self._fn = fn

    def log_u(self, u):
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.asarray(self._fn(np.exp(1.0 - np.asarray(u, dtype=float))), dtype=float)
        return _log(np.broadcast_to(v, np.shape(u)))
