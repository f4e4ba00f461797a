"""Bounded-ratio experiments over function families.

Each scenario evaluates two expressions that a theorem declares equivalent
(or ordered, or equal) on every member of a family and records the extreme
ratios.  Constants are never asserted a priori: the windows are regression
pins.  The only hard checks are positivity and finiteness of the ratios,
the tolerance of exact identities, and the shape of search K-curves.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import interpolation as ip
from . import kfunctional as kf
from .errors import ParameterError
from .grids import LogGrid, make_log_grid
from .rearrangement import (PowerLog, Psi, Rearrangement, Scaled, Step, Sum, indicator,
                            nu_rearrangement)
from .spaces import (GGamma, GrandLp, LambdaP, PowerLogWeight, SmallLp, gamma_weights, ggamma,
                     ggamma_tail_norm, norm, small_theta, weight_reduce)

T_GRID = tuple(float(x) for x in np.geomspace(0.05, 0.9, 50))


# ----------------------------------------------------------------- families
@dataclass(frozen=True)
class Member:
    name: str
    f: Rearrangement


@dataclass(frozen=True)
class FunctionFamily:
    name: str
    members: tuple

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def powerlog_members(p: float) -> list[Member]:
    """C s^{-a}(1 - log s)^{-b} over a in {0, 1/(2p), 7/(8p)}, b in {0, 1/2, 1, 2}.

    a = 0 with b > 0 would increase, so those members use the exponent -b.
    """
    out = []
    for a in (0.0, 1.0 / (2.0 * p), 7.0 / (8.0 * p)):
        for b in (0.0, 0.5, 1.0, 2.0):
            bb = -b if a == 0.0 and b else b
            out.append(Member(f"powerlog(a={_fmt(a)},b={_fmt(bb)})", PowerLog(a, bb)))
    return out


def indicator_members(kmax: int = 10) -> list[Member]:
    return [Member(f"indicator(2^-{k})", indicator(2.0 ** -k)) for k in range(1, kmax + 1)]


def step_mixtures() -> list[Member]:
    return [
        Member("step(3|1 at 1/2)", Step((0.5, 1.0), (3.0, 1.0))),
        Member("step(8|4|1 at 1/16,1/4)", Step((1 / 16, 0.25, 1.0), (8.0, 4.0, 1.0))),
        Member("step(100|10|1 at 2^-20,2^-6,1/2)",
               Step((2.0 ** -20, 2.0 ** -6, 0.5), (100.0, 10.0, 1.0))),
    ]


def default_family(p: float = 2.0) -> FunctionFamily:
    return FunctionFamily(f"default(p={_fmt(p)})",
                          tuple(powerlog_members(p) + indicator_members() + step_mixtures()))


def indicator_family(p: float = 2.0) -> FunctionFamily:
    return FunctionFamily("indicators", tuple(indicator_members()))


def borderline_family(p: float = 2.0) -> FunctionFamily:
    """Default family plus s^{-1/p} and s^{-1/p}(1 - log s)^{-1}, members of L^{p,inf}."""
    extra = [Member("powerlog(a=1/p,b=0)", PowerLog(1.0 / p, 0.0)),
             Member("powerlog(a=1/p,b=1)", PowerLog(1.0 / p, 1.0))]
    base = default_family(p)
    return FunctionFamily(f"borderline(p={_fmt(p)})", base.members + tuple(extra))


FAMILIES: dict[str, Callable[[float], FunctionFamily]] = {
    "default": default_family,
    "indicators": indicator_family,
    "borderline": borderline_family,
}


def make_family(name: str, p: float = 2.0) -> FunctionFamily:
    try:
        return FAMILIES[name](p)
    except KeyError:
        raise ParameterError(f"unknown family {name!r}") from None


# ------------------------------------------------------------------ reports
@dataclass(frozen=True)
class EquivalenceReport:
    scenario: str
    params: dict
    kind: str
    ratio_min: float
    ratio_max: float
    argmin: str
    argmax: str
    grid: dict
    seconds: float
    count: int = 0
    skipped: tuple = ()
    failures: tuple = ()
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def window(self) -> tuple:
        return (self.ratio_min, self.ratio_max)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario, "params": self.params, "kind": self.kind,
            "ratio_min": _json_num(self.ratio_min), "ratio_max": _json_num(self.ratio_max),
            "argmin": self.argmin, "argmax": self.argmax, "grid": self.grid,
            "seconds": self.seconds, "count": self.count, "skipped": list(self.skipped),
            "failures": list(self.failures),
            "values": {k: _json_num(v) for k, v in self.values.items()},
        }


def _json_num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


class _Collector:
    def __init__(self, kind: str, grid: LogGrid):
        self.kind = kind
        self.grid = grid
        self.ratios: list[float] = []
        self.witnesses: list[str] = []
        self.skipped: list[str] = []
        self.failures: list[str] = []
        self.values: dict = {}

    def add(self, ratio: float, witness: str):
        self.ratios.append(float(ratio))
        self.witnesses.append(witness)

    def compare(self, num: float, den: float, witness: str):
        """Record num/den; members outside the weaker space are skipped."""
        if math.isinf(den) and math.isinf(num):
            self.skipped.append(f"{witness}: both sides infinite")
            return
        if den == 0.0 and num == 0.0:
            self.skipped.append(f"{witness}: both sides zero")
            return
        if math.isinf(den) or (den == 0.0 and self.kind == "one-sided"):
            self.skipped.append(f"{witness}: reference side {den!r}")
            return
        self.add(num / den if den else math.inf, witness)

    def skip(self, why: str):
        self.skipped.append(why)

    def fail(self, msg: str):
        self.failures.append(msg)


@dataclass(frozen=True)
class Scenario:
    id: str
    statement: str
    kind: str  # "equivalence" | "one-sided" | "equality"
    body: Callable
    defaults: tuple
    family: str = "default"
    tolerance: float | None = None
    bound: float | None = None


REGISTRY: dict[str, Scenario] = {}

STATEMENTS = (
    "rho(v) = [int_0^1 w1 (int_0^t v_*^p w2)^{m/p} dt]^{1/m} is a quasinorm",
    "gamma < -1: GGamma(p,m;t^{-1}(1-log t)^gamma,(1-log t)^beta) = Lambda^p((1-log t)^beta)",
    "gamma > -1, gamma + beta m/p + 1 >= 0: GGamma(p,m;w1,w2) = GGamma(p,m;t^{-1}(1-log t)^{gamma+beta m/p},1)",
    "gamma > -1, gamma + beta m/p + 1 < 0: rho(f)^m ~ int_0^1 (1-log t)^{gamma+beta m/p} (int_t^1 f_*^p)^{m/p} dt/t",
    "t_k = 2^{1-2^k}: int_0^1 [(1-log t)^lambda int_0^t H]^q dt/((1-log t) t) ~ sum_k (int_0^{t_k} H)^q 2^{lambda k q} ~ sum_k (2^{lambda k} int_{t_{k+1}}^{t_k} H)^q",
    "m = 1, gamma > -1, gamma + 1 + beta/p > 0: GGamma(p,1;w1,w2) = L^{(p,theta}, theta = p'(gamma + 1 + beta/p)",
    "L^{p),theta} is the associate space of L^{(p',theta}",
    "ordered couples: (X0,X1)_{theta,r;0} over (0,1) = (X0,X1)_{theta,r}",
    "K(f,t;L^p,L^{(p}) ~ t int_{phi(t)}^1 (1-log s)^{-1/p} (int_0^s f_*^p)^{1/p} ds/s, phi(t) = exp(1 - t^{-p'})",
    "(L^p,L^{(p})_{theta,r} = GGamma(p,r;t^{-1}(1-log t)^{r theta/p'-1},1)",
    "(L^p,L^{(p})_{theta,1} = L^{(p,theta}",
    "K(f,t;L^{p)},L^p) ~ sup_{0<s<phi(t)} (1-log s)^{-1/p} (int_s^1 f_*^p)^{1/p}, phi(t) = exp(1 - t^{-p})",
    "(L^{p)},L^p)_{theta,r} = GGamma(p,r;t^{-1}(1-log t)^{r theta/p-1},(1-log t)^{-1})",
    "K(f,t;L^{p),alpha},L^{p),beta}) ~ sup_{s<phi} u^{-alpha/p}(int_s^phi f_*^p)^{1/p} + t sup_{phi<s<1} u^{-beta/p}(int_s^1 f_*^p)^{1/p}, phi = exp(1 - t^{p/(beta-alpha)})",
    "(L^{p),alpha},L^{p),beta})_{theta,r} = GGamma(p,r;t^{-1}(1-log t)^{r theta (alpha-beta)/p-1},(1-log t)^{-alpha})",
    "K(f,t;L^{p,inf},L^p) ~ t [int_0^{t^{-p}} psi_{*,nu}^p]^{1/p}, psi(s) = s^{1/p} f_*(s)",
    "sup{int_E f_*^p : |E|_nu = t^{-p}} = int_0^{t^{-p}} psi_{*,nu}^p",
    "(L^{p,inf},L^p)_{theta,p/theta} = L^{p,p/theta}",
    "sup_{0<s<t} s^{1/p} f_*(s) <~ K(rho(t),f;L^{p,inf},L^{(p}), rho(t) = (1-log t)^{-1+1/p}",
    "||f||_{GGamma(p,r;w1,w2) cap GGamma(inf,r;v1,v2)} <~ ||f||_{(L^{p,inf},L^{(p})_{theta,r}}",
    "1 >= alpha > 1/p: ||v||_{L^{p,inf}} <= c ||v||_{L^{p)}}^{1-alpha} ||v||_{L^{(p}}^alpha",
    "[GGamma(p,r;t^{-1}(1-log t)^{delta-1})]' = GGamma(p',r';t^{-1}(1-log t)^{r' delta/r-1},(1-log t)^{-2p' delta/r})",
    "[GGamma(p,r;w)]' has the norm (int_0^1 (1-log t)^{-r' delta/r-1} (int_t^1 f_*^{p'})^{r'/p'} dt/t)^{1/r'}",
)


def scenario(id: str, statement: str, kind: str, defaults: Iterable[dict], family: str = "default",
             tolerance: float | None = None, bound: float | None = None):
    if statement not in STATEMENTS:
        raise ValueError(f"scenario {id}: statement not in STATEMENTS")

    def deco(fn):
        REGISTRY[id] = Scenario(id, statement, kind, fn, tuple(defaults), family, tolerance, bound)
        return fn

    return deco


def _family_for(sc: Scenario, params: dict, family: FunctionFamily | None) -> FunctionFamily:
    if family is not None:
        return family
    return make_family(params.get("family", sc.family), float(params.get("p", 2.0)))


def run_scenario(id: str, params: dict | None = None, family: FunctionFamily | None = None,
                 grid: LogGrid | None = None) -> EquivalenceReport:
    """Evaluate one scenario; inadmissible parameters raise ParameterError."""
    sc = REGISTRY.get(id)
    if sc is None:
        raise ParameterError(f"unknown scenario {id!r}")
    params = dict(sc.defaults[0] if params is None else params)
    grid = grid or make_log_grid()
    fam = _family_for(sc, params, family)
    col = _Collector(sc.kind, grid)
    start = time.perf_counter()
    sc.body(params, fam, col)
    seconds = time.perf_counter() - start
    r = np.asarray(col.ratios, dtype=float)
    if r.size:
        i_max = int(np.argmax(r))
        i_min = int(np.argmin(r))
        rmax, rmin = float(r[i_max]), float(r[i_min])
        amax, amin = col.witnesses[i_max], col.witnesses[i_min]
    else:
        rmin = rmax = math.nan
        amin = amax = ""
    failures = list(col.failures)
    if r.size and not np.all(np.isfinite(r) & (r > 0)):
        bad = [w for x, w in zip(r, col.witnesses) if not (math.isfinite(x) and x > 0)]
        failures.append(f"non-finite or non-positive ratio at {bad[0]} ({len(bad)} total)")
    if sc.kind == "one-sided":
        rmin, amin = math.nan, ""
    if sc.tolerance is not None and r.size:
        dev = float(np.max(np.abs(r - 1.0)))
        if not dev <= sc.tolerance:
            failures.append(f"equality violated: max |ratio - 1| = {dev:.3g} > {sc.tolerance:g}")
    bound = params.get("bound", sc.bound)
    if bound is not None and r.size:
        lo = 1.0 / bound if sc.kind != "one-sided" else 0.0
        if not (np.min(r) >= lo and np.max(r) <= bound):
            failures.append(f"ratios leave [{lo:.4g}, {bound:g}]")
    return EquivalenceReport(
        scenario=id, params=_canon(params), kind=sc.kind, ratio_min=rmin, ratio_max=rmax,
        argmin=amin, argmax=amax, grid=grid.describe(), seconds=seconds, count=int(r.size),
        skipped=tuple(col.skipped), failures=tuple(failures), values=dict(col.values))


def _canon(params: dict) -> dict:
    return {k: params[k] for k in sorted(params)}


# --------------------------------------------------------------- scenarios
def _w(name, t=None):
    return name if t is None else f"{name}@t={t:.6g}"


@scenario("ggamma-quasinorm", STATEMENTS[0], "one-sided",
          [{"p": 2.0, "m": 1.0, "gamma": -0.5, "beta": -1.0},
           {"p": 1.5, "m": 3.0, "gamma": 0.0, "beta": 0.0}])
def _quasinorm(params, fam, col):
    p, m = params["p"], params["m"]
    w1, w2 = gamma_weights(params["gamma"], params["beta"])
    sp = ggamma(p, m, w1, w2)
    members = [mb for mb in fam.members]
    vals = {mb.name: norm(sp, mb.f, col.grid) for mb in members}
    for mb in members:
        v2 = norm(sp, Scaled(mb.f, 2.0), col.grid)
        if math.isfinite(vals[mb.name]) and abs(v2 - 2.0 * vals[mb.name]) > 1e-9 * v2:
            col.fail(f"homogeneity fails for {mb.name}")
    # comonotone pairs: (f + g)_* = f_* + g_*
    for i, a in enumerate(members):
        for b in members[i + 1::5]:
            den = vals[a.name] + vals[b.name]
            col.compare(norm(sp, Sum(a.f, b.f), col.grid), den, f"{a.name}+{b.name}")
    col.values["constant_bound"] = 2.0 ** (1.0 + 1.0 / min(p, m, 1.0))


@scenario("lambda-collapse", STATEMENTS[1], "equivalence",
          [{"p": 2.0, "m": 1.0, "gamma": -2.0, "beta": -1.0},
           {"p": 3.0, "m": 2.0, "gamma": -1.5, "beta": 0.5}])
def _collapse(params, fam, col):
    p, m, gamma, beta = params["p"], params["m"], params["gamma"], params["beta"]
    if not gamma < -1.0:
        raise ParameterError("collapse needs gamma < -1")
    w1, w2 = gamma_weights(gamma, beta)
    lhs, rhs = ggamma(p, m, w1, w2), LambdaP(p, w2)
    for mb in fam:
        col.compare(norm(lhs, mb.f, col.grid), norm(rhs, mb.f, col.grid), mb.name)


@scenario("weight-reduce", STATEMENTS[2], "equivalence",
          [{"p": 2.0, "m": 1.0, "gamma": 0.0, "beta": 0.0},
           {"p": 2.0, "m": 2.0, "gamma": 1.0, "beta": -1.0},
           {"p": 2.0, "m": 1.0, "gamma": -0.5, "beta": -0.5},
           {"p": 2.0, "m": 1.0, "gamma": -2.0, "beta": -1.0}])
def _reduce(params, fam, col):
    p, m, gamma, beta = params["p"], params["m"], params["gamma"], params["beta"]
    if gamma == -1.0:
        raise ParameterError("gamma = -1 is covered by neither reduction")
    if gamma > -1.0 and gamma + beta * m / p + 1.0 < 0.0:
        raise ParameterError("gamma + beta m/p + 1 < 0: no reduction (use the tail form)")
    w1, w2 = gamma_weights(gamma, beta)
    orig, red = ggamma(p, m, w1, w2), weight_reduce(p, m, gamma, beta)
    col.values["reduced"] = 0.0 if isinstance(red, LambdaP) else red.w1.g1
    for mb in fam:
        col.compare(norm(orig, mb.f, col.grid), norm(red, mb.f, col.grid), mb.name)


@scenario("tail-norm-lemma", STATEMENTS[3], "equivalence",
          [{"p": 2.0, "m": 1.0, "gamma": 0.0, "beta": -4.0},
           {"p": 2.0, "m": 2.0, "gamma": 0.5, "beta": -2.0}])
def _tail(params, fam, col):
    p, m, gamma, beta = params["p"], params["m"], params["gamma"], params["beta"]
    w1, w2 = gamma_weights(gamma, beta)
    sp = ggamma(p, m, w1, w2)
    for mb in fam:
        tail = ggamma_tail_norm(p, m, gamma, beta, mb.f, col.grid)
        col.compare(tail ** m, norm(sp, mb.f, col.grid) ** m, mb.name)


def dyadic_points(k_max: int) -> np.ndarray:
    """u_k = 1 - log t_k for t_k = 2^{1 - 2^k}, k = 0..k_max."""
    k = np.arange(k_max + 1)
    return 1.0 + (2.0 ** k - 1.0) * math.log(2.0)


def default_k_max(grid: LogGrid) -> int:
    """Deepest dyadic point inside the grid."""
    k = 0
    while 1.0 + (2.0 ** (k + 1) - 1.0) * math.log(2.0) <= grid.u_max:
        k += 1
    return k


@dataclass(frozen=True)
class DyadicResult:
    integral: float
    cumulative_sum: float
    slice_sum: float
    side_ratio: float

    def ratios(self) -> tuple:
        a, b, c = self.integral, self.cumulative_sum, self.slice_sum
        if not (a > 0 and b > 0 and c > 0):
            return (math.nan, math.nan, math.nan)
        return (a / b, a / c, b / c)


def dyadic_check(lam: float, q: float, beta: float, f: Rearrangement, k_max: int | None = None,
                 grid: LogGrid | None = None, p: float = 2.0) -> DyadicResult:
    """The three dyadic expressions for H = f_*^p (1 - log x)^beta.

    Returns the integral form, the cumulative sum, the slice sum and the side
    ratio int_0^1 H / int_0^{1/2} H (finite means the side condition holds).
    """
    from .spaces import _head

    if not (lam > 0 and q > 0):
        raise ParameterError("need lambda > 0 and q > 0")
    grid = grid or make_log_grid()
    k_max = default_k_max(grid) if k_max is None else int(k_max)
    if f.is_zero:
        return DyadicResult(0.0, 0.0, 0.0, math.nan)
    uk = dyadic_points(k_max + 1)
    g = grid.refined(list(f.breaks_u) + list(uk[uk < grid.u_max]))
    w2 = PowerLogWeight(0.0, beta)
    h_nodes, h_edges = _head(f, p, w2, g)
    at = np.array([h_edges[g.edge_index(x)] if x < g.u_max else 0.0 for x in uk])
    side = at[0] / at[1] if at[1] > 0 else math.inf
    with np.errstate(divide="ignore"):
        lv = (lam * q - 1.0) * np.log(g.nodes) + q * np.log(h_nodes)
    integral = g.integral(np.exp(lv))
    k = np.arange(k_max + 1)
    cum = float(np.sum(at[:-1] ** q * 2.0 ** (lam * k * q)))
    sl = float(np.sum((2.0 ** (lam * k) * np.maximum(at[:-1] - at[1:], 0.0)) ** q))
    return DyadicResult(float(integral), cum, sl, float(side))


@scenario("dyadic-lemma", STATEMENTS[4], "equivalence",
          [{"p": 2.0, "lam": lam, "q": q, "beta": beta}
           for lam in (0.3, 1.0, 2.0) for q in (1.0, 1.5, 3.0) for beta in (0.0, -1.0)],
          bound=64.0)
def _dyadic(params, fam, col):
    p = params["p"]
    for mb in fam:
        res = dyadic_check(params["lam"], params["q"], params["beta"], mb.f,
                           params.get("k_max"), col.grid, p)
        if not math.isfinite(res.side_ratio):
            col.fail(f"{mb.name}: side condition int_0^1 H <~ int_0^(1/2) H fails")
            continue
        for name, r in zip(("integral/cumulative", "integral/slice", "cumulative/slice"),
                           res.ratios()):
            col.add(r, f"{mb.name}:{name}")


@scenario("small-lebesgue-corollary", STATEMENTS[5], "equivalence",
          [{"p": 2.0, "gamma": 0.0, "beta": -1.0}, {"p": 2.0, "gamma": -0.5, "beta": 0.0},
           {"p": 3.0, "gamma": 0.5, "beta": -1.0}])
def _small_cor(params, fam, col):
    p, gamma, beta = params["p"], params["gamma"], params["beta"]
    theta = small_theta(p, gamma, beta)
    col.values["theta"] = theta
    w1, w2 = gamma_weights(gamma, beta)
    sp = ggamma(p, 1.0, w1, w2)
    for mb in fam:
        col.compare(norm(sp, mb.f, col.grid), norm(SmallLp(p, theta), mb.f, col.grid), mb.name)


@scenario("grand-small-association", STATEMENTS[6], "one-sided",
          [{"p": 2.0, "theta": 1.0}, {"p": 3.0, "theta": 0.5}])
def _grand_small(params, fam, col):
    p, theta = params["p"], params["theta"]
    pc = p / (p - 1.0)
    grand = {mb.name: norm(GrandLp(p, theta), mb.f, col.grid) for mb in fam}
    small = {mb.name: norm(SmallLp(pc, theta), mb.f, col.grid) for mb in fam}
    for a in fam:
        for b in fam.members[::3]:
            col.compare(ip.pairing(a.f, b.f, col.grid), small[a.name] * grand[b.name],
                        f"{a.name}|{b.name}")


def _k_scenario(params, fam, col, cpl, closed_shape=False):
    t = np.asarray(params.get("t_grid", T_GRID), dtype=float)
    levels = int(params.get("levels", 200))
    for mb in fam:
        ks = np.atleast_1d(kf.k_search(mb.f, cpl, t, levels, col.grid))
        kc = np.atleast_1d(kf.k_closed(mb.f, cpl, t, col.grid))
        curve = kf.KCurve(tuple(t), tuple(ks), "search", cpl)
        for v in curve.shape_violations():
            col.fail(f"{mb.name} search: {v}")
        if closed_shape:
            for v in kf.KCurve(tuple(t), tuple(kc), "closed-form", cpl).shape_violations(1e-6):
                col.fail(f"{mb.name} closed: {v}")
        else:
            col.values.setdefault("closed_shape_breaches", 0)
            col.values["closed_shape_breaches"] += len(
                kf.KCurve(tuple(t), tuple(kc), "closed-form", cpl).shape_violations(1e-6))
        for ti, a, b in zip(t, ks, kc):
            col.compare(a, b, _w(mb.name, ti))


@scenario("classical-small-kfunctional", STATEMENTS[8], "equivalence",
          [{"p": 2.0}, {"p": 1.5}])
def _cs_k(params, fam, col):
    _k_scenario(params, fam, col, kf.couple("classical-small", params["p"]))


@scenario("grand-classical-kfunctional", STATEMENTS[11], "equivalence",
          [{"p": 2.0}, {"p": 3.0}])
def _gc_k(params, fam, col):
    _k_scenario(params, fam, col, kf.couple("grand-classical", params["p"]))


@scenario("grand-grand-kfunctional", STATEMENTS[13], "equivalence",
          [{"p": 2.0, "alpha": 2.0, "beta": 1.0}, {"p": 3.0, "alpha": 1.5, "beta": 0.5}])
def _gg_k(params, fam, col):
    if not (0.0 < params["beta"] < params["alpha"]):
        raise ParameterError("need 0 < beta < alpha")
    _k_scenario(params, fam, col, kf.couple("grand-grand", params["p"], params["alpha"],
                                            params["beta"]))


@scenario("weak-classical-kfunctional", STATEMENTS[15], "equivalence",
          [{"p": 2.0, "family": "borderline"}, {"p": 1.5, "family": "borderline"}])
def _wc_k(params, fam, col):
    p = params["p"]
    _k_scenario(params, fam, col, kf.couple("weak-classical", p), closed_shape=True)
    # psi_{*,nu} is nonincreasing: psi_{*,nu}(t^{-p}) <= t (int_0^{t^{-p}} psi_{*,nu}^p)^{1/p}
    t = np.asarray(params.get("t_grid", T_GRID), dtype=float)
    for mb in fam:
        nu = nu_rearrangement(Psi(mb.f, p), float(t.min() ** -p), col.grid)
        lhs = nu(t ** -p)
        rhs = t * nu.power_integral(t ** -p, p) ** (1.0 / p)
        bad = np.flatnonzero(lhs > rhs * (1 + 1e-9))
        if bad.size:
            col.fail(f"{mb.name}: step bound fails at t={t[bad[0]]:.6g}")


@scenario("hardy-littlewood-equality", STATEMENTS[16], "equality",
          [{"p": 1.5}, {"p": 2.0}, {"p": 3.0}], family="indicators", tolerance=1e-3)
def _hl(params, fam, col):
    p = params["p"]
    budgets = np.asarray(params.get("budgets", np.geomspace(1.0, 400.0, 10)), dtype=float)
    for mb in fam:
        nu = nu_rearrangement(Psi(mb.f, p), float(budgets.max()), col.grid)
        exact = nu.power_integral(budgets, p)
        for x, e in zip(budgets, exact):
            col.compare(kf.greedy_set_supremum(mb.f, p, float(x), col.grid), float(e),
                        f"{mb.name}@budget={x:.6g}")


def _interp_scenario(params, fam, col, cpl, closed):
    spec = ip.InterpSpec(params["theta"], params["r"], params.get("alpha", 0.0),
                         params.get("domain", "unit"))
    method = params.get("k_method", "search")
    for mb in fam:
        lhs = ip.interp_norm(mb.f, cpl, spec, method, col.grid, int(params.get("levels", 200)))
        col.compare(lhs, closed(mb.f), mb.name)


@scenario("classical-small-identification", STATEMENTS[9], "equivalence",
          [{"p": 2.0, "theta": 0.5, "r": 2.0}, {"p": 1.5, "theta": 0.25, "r": 1.0}])
def _cs_id(params, fam, col):
    p, th, r = params["p"], params["theta"], params["r"]
    _interp_scenario(params, fam, col, kf.couple("classical-small", p),
                     lambda f: ip.interp_closed_classical_small(f, p, th, r, col.grid))


@scenario("classical-small-theta1", STATEMENTS[10], "equivalence",
          [{"p": 2.0, "theta": 0.5}, {"p": 1.5, "theta": 0.75}])
def _cs_theta1(params, fam, col):
    p, th = params["p"], params["theta"]
    for mb in fam:
        col.compare(ip.interp_closed_classical_small(mb.f, p, th, 1.0, col.grid),
                    norm(SmallLp(p, th), mb.f, col.grid), mb.name)


@scenario("grand-classical-identification", STATEMENTS[12], "equivalence",
          [{"p": 2.0, "theta": 0.5, "r": 2.0}, {"p": 3.0, "theta": 0.25, "r": 1.0}])
def _gc_id(params, fam, col):
    p, th, r = params["p"], params["theta"], params["r"]
    _interp_scenario(params, fam, col, kf.couple("grand-classical", p),
                     lambda f: ip.interp_closed_grand_classical(f, p, th, r, col.grid))


@scenario("grand-classical-tail-form", STATEMENTS[12], "equivalence",
          [{"p": 2.0, "theta": 0.5, "r": 2.0}, {"p": 3.0, "theta": 0.25, "r": 1.0}])
def _gc_tail(params, fam, col):
    p, th, r = params["p"], params["theta"], params["r"]
    for mb in fam:
        col.compare(ip.grand_classical_tail(mb.f, p, th, r, col.grid),
                    ip.interp_closed_grand_classical(mb.f, p, th, r, col.grid), mb.name)


@scenario("grand-grand-identification", STATEMENTS[14], "equivalence",
          [{"p": 2.0, "alpha": 2.0, "beta": 1.0, "theta": 0.5, "r": 2.0}])
def _gg_id(params, fam, col):
    p, a, b, th, r = (params[k] for k in ("p", "alpha", "beta", "theta", "r"))
    _interp_scenario(params, fam, col, kf.couple("grand-grand", p, a, b),
                     lambda f: ip.interp_closed_grand_grand(f, p, a, b, th, r, col.grid))


@scenario("mp-identity", STATEMENTS[17], "equivalence",
          [{"p": 2.0, "theta": 0.5, "domain": "unit"},
           {"p": 2.0, "theta": 0.5, "domain": "halfline"}])
def _mp(params, fam, col):
    p, th = params["p"], params["theta"]
    spec = ip.InterpSpec(th, p / th, 0.0, params.get("domain", "unit"))
    cpl = kf.couple("weak-classical", p)
    method = params.get("k_method", "closed-form")
    for mb in fam:
        col.compare(ip.interp_norm(mb.f, cpl, spec, method, col.grid),
                    ip.interp_maligranda_persson(mb.f, p, th, col.grid), mb.name)


@scenario("interp-definition", STATEMENTS[7], "equivalence",
          [{"p": 2.0, "theta": 0.5, "r": 2.0}])
def _interp_def(params, fam, col):
    p, th, r = params["p"], params["theta"], params["r"]
    cpl = kf.couple("weak-classical", p)
    unit, half = ip.InterpSpec(th, r, 0.0, "unit"), ip.InterpSpec(th, r, 0.0, "halfline")
    for mb in fam:
        col.compare(ip.interp_norm(mb.f, cpl, unit, "closed-form", col.grid),
                    ip.interp_norm(mb.f, cpl, half, "closed-form", col.grid), mb.name)


@scenario("rho-lemma", STATEMENTS[18], "one-sided", [{"p": 2.0, "family": "borderline"}])
def _rho(params, fam, col):
    p = params["p"]
    cpl = kf.couple("weak-small", p)
    t = np.asarray(params.get("t_grid", T_GRID), dtype=float)
    for mb in fam:
        pairs = [kf.k_lower_weak_small(mb.f, p, float(ti), col.grid) for ti in t]
        rho = np.array([pr[0] for pr in pairs])
        ks = np.atleast_1d(kf.k_search(mb.f, cpl, rho, int(params.get("levels", 200)), col.grid))
        for ti, (_, low), k in zip(t, pairs, ks):
            col.compare(low, k, _w(mb.name, ti))


@scenario("weak-small-lower-bounds", STATEMENTS[19], "one-sided",
          [{"p": 2.0, "theta": 0.5, "r": 1.0}, {"p": 2.0, "theta": 0.5, "r": 2.0}])
def _ws_lower(params, fam, col):
    p, th, r = params["p"], params["theta"], params["r"]
    cpl = kf.couple("weak-small", p)
    spec = ip.InterpSpec(th, r)
    for mb in fam:
        ref = ip.interp_norm(mb.f, cpl, spec, "search", col.grid, int(params.get("levels", 200)))
        gp, gs = ip.interp_lower_bounds_weak_small(mb.f, p, th, r, col.grid)
        col.compare(gp, ref, f"{mb.name}:gg_p")
        col.compare(gs, ref, f"{mb.name}:gg_sup")
        col.compare(max(gp, gs), ref, f"{mb.name}:intersection")


@scenario("interpolation-inequality", STATEMENTS[20], "one-sided",
          [{"p": 2.0, "alpha": 0.75}, {"p": 3.0, "alpha": 0.8}, {"p": 1.5, "alpha": 0.8}])
def _interp_ineq(params, fam, col):
    p, alpha = params["p"], params["alpha"]
    if not (max(1.0 / p, 1.0 - 1.0 / p) < alpha <= 1.0):
        raise ParameterError("need max(1/p, 1/p') < alpha <= 1")
    for mb in fam:
        r = ip.interpolation_inequality_ratio(mb.f, p, alpha, col.grid)
        if math.isnan(r):
            col.skip(f"{mb.name}: undefined ratio")
        else:
            col.add(r, mb.name)


@scenario("holder-duality", STATEMENTS[21], "one-sided",
          [{"p": 2.0, "r": 2.0, "delta": 1.0}, {"p": 3.0, "r": 1.5, "delta": 0.5}])
def _holder(params, fam, col):
    p, r, d = params["p"], params["r"], params["delta"]
    base = ip.base_space(p, r, d)
    left = {mb.name: norm(base, mb.f, col.grid) for mb in fam}
    right = {mb.name: ip.associate_ggamma_norm(mb.f, p, r, d, col.grid) for mb in fam}
    for a in fam:
        for b in fam.members[::3]:
            col.compare(ip.pairing(a.f, b.f, col.grid), left[a.name] * right[b.name],
                        f"{a.name}|{b.name}")


@scenario("associate-remark", STATEMENTS[22], "equivalence",
          [{"p": 2.0, "r": 2.0, "delta": 1.0}, {"p": 3.0, "r": 1.5, "delta": 0.5}])
def _assoc_remark(params, fam, col):
    p, r, d = params["p"], params["r"], params["delta"]
    for mb in fam:
        col.compare(ip.associate_tail_norm(mb.f, p, r, d, col.grid),
                    ip.associate_ggamma_norm(mb.f, p, r, d, col.grid), mb.name)


# ------------------------------------------------------------------- export
REPORT_COLUMNS = ("run", "scenario", "params", "kind", "ratio_min", "ratio_max", "witness",
                  "count", "failures", "seconds")


def _fmt12(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def ordered_reports(reports):
    """Deterministic order (scenario, params) with a run index for repeats."""
    keyed = sorted(enumerate(reports),
                   key=lambda ir: (ir[1].scenario, json.dumps(ir[1].params, sort_keys=True), ir[0]))
    seen: dict = {}
    out = []
    for _, rep in keyed:
        k = (rep.scenario, json.dumps(rep.params, sort_keys=True))
        seen[k] = seen.get(k, -1) + 1
        out.append((seen[k], rep))
    return out


def render_report(reports, fmt: str = "csv") -> str:
    rows = ordered_reports(list(reports))
    if fmt == "json":
        return json.dumps([dict(run=i, **r.to_dict()) for i, r in rows], indent=2,
                          sort_keys=True) + "\n"
    if fmt != "csv":
        raise ParameterError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for i, r in rows:
        witness = r.argmax if r.kind == "one-sided" else f"{r.argmin} .. {r.argmax}"
        w.writerow([i, r.scenario, json.dumps(r.params, sort_keys=True), r.kind,
                    _fmt12(r.ratio_min), _fmt12(r.ratio_max), witness, r.count,
                    "; ".join(r.failures), f"{r.seconds:.3f}"])
    return buf.getvalue()


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_report(reports, format: str = "csv", path: str | None = None) -> str:
    text = render_report(reports, format)
    if path is not None:
        atomic_write(path, text)
    return text


def pin_windows(reports) -> dict:
    """Regression pins: scenario -> params -> [ratio_min, ratio_max].

    Floats are stored at full precision (JSON round-trips them exactly);
    an undefined side (one-sided scenarios) is stored as null.
    """
    out: dict = {}
    for _, r in ordered_reports(list(reports)):
        key = json.dumps(r.params, sort_keys=True)
        out.setdefault(r.scenario, {})[key] = [_json_num(r.ratio_min), _json_num(r.ratio_max)]
    return out
