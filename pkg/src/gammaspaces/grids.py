"""Composite Gauss-Legendre quadrature on (0, 1] in the coordinate u = 1 - log t.

Every weight t^g0 (1 - log t)^g1 becomes exp(g0 (1 - u)) u^g1 and dt = -t du,
so integrands with power-log singularities at t = 0 turn into smooth functions
on [1, u_max].  Cells are geometric in u; they stay short near u = 1 where the
t-scale structure lives and grow where integrands are pure powers of u.

Nested integrals (int_0^t and int_t^1 of a node-sampled integrand) reuse the
same node values through the exact Legendre integration matrix of each cell.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as L
from scipy.optimize import minimize_scalar

from .errors import EvaluationError, ParameterError

DEFAULT_U_MAX = 1.0e10
DEFAULT_CELLS = 400
DEFAULT_DEGREE = 8

# Extra cells geometrically graded (ratio 1/4) into the first cell.
_GRADING_LEVELS = 12

# Relative gap under which an inserted break is merged with an existing edge.
_MERGE_RTOL = 1e-13


@functools.lru_cache(maxsize=None)
def _reference_rule(degree: int):
    """Gauss nodes/weights on [-1, 1] plus the matrices used for partial integrals.

    Returns (x, w, vinv, cint, q_from_left, q_to_right) where
    q_from_left[k, l] = int_{-1}^{x_k} ell_l and q_to_right[k, l] = int_{x_k}^{1} ell_l
    for the Lagrange basis ell_l through the Gauss nodes.
    """
    x, w = L.leggauss(degree)
    vinv = np.linalg.inv(L.legvander(x, degree - 1))
    # column m: Legendre coefficients of int_{-1}^{x} P_m
    cint = np.zeros((degree + 1, degree))
    for m in range(degree):
        e = np.zeros(degree)
        e[m] = 1.0
        cint[:, m] = L.legint(e, lbnd=-1.0)
    q_left = L.legvander(x, degree) @ cint @ vinv
    cint_r = np.zeros((degree + 1, degree))
    for m in range(degree):
        e = np.zeros(degree)
        e[m] = 1.0
        cint_r[:, m] = -L.legint(e, lbnd=1.0)
    q_right = L.legvander(x, degree) @ cint_r @ vinv
    for arr in (x, w, vinv, cint, q_left, q_right):
        arr.setflags(write=False)
    return x, w, vinv, cint, q_left, q_right


@dataclass(frozen=True, eq=False)
class LogGrid:
    """Cells [edges[j], edges[j+1]] in u with a Gauss panel of fixed degree each.

    ``edges[0] == 1`` is the image of t = 1 and ``edges[-1] == u_max`` the image
    of the truncation point t = exp(1 - u_max).
    """

    edges: np.ndarray
    degree: int = DEFAULT_DEGREE
    _nodes: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ParameterError("a grid needs at least one cell")
        if edges[0] != 1.0 or not np.all(np.diff(edges) > 0):
            raise ParameterError("grid edges must start at u = 1 and increase strictly")
        if self.degree < 2:
            raise ParameterError("panel degree must be at least 2")
        edges = edges.copy()
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        x, w, *_ = _reference_rule(self.degree)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = mid[:, None] + half[:, None] * x[None, :]
        weights = half[:, None] * w[None, :]
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "_nodes", nodes)
        object.__setattr__(self, "_weights", weights)

    @property
    def u_min(self) -> float:
        return 1.0

    @property
    def u_max(self) -> float:
        return float(self.edges[-1])

    @property
    def cells(self) -> int:
        return self.edges.size - 1

    @property
    def nodes(self) -> np.ndarray:
        """Quadrature nodes in u, shape (cells, degree)."""
        return self._nodes

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights for du, shape (cells, degree)."""
        return self._weights

    @property
    def t_min(self) -> float:
        return math.exp(1.0 - self.u_max)

    def describe(self) -> dict:
        return {"u_max": self.u_max, "cells": self.cells, "degree": self.degree}

    def refined(self, breaks) -> "LogGrid":
        """Grid with extra cell edges at the given u-values (clipped to the grid)."""
        b = np.asarray(list(breaks), dtype=float).ravel()
        b = b[np.isfinite(b)]
        b = b[(b > 1.0) & (b < self.u_max)]
        if b.size == 0:
            return self
        merged = np.union1d(self.edges, b)
        keep = np.ones(merged.size, dtype=bool)
        gaps = np.diff(merged) <= _MERGE_RTOL * merged[1:]
        keep[1:][gaps] = False
        keep[-1] = True
        merged = merged[keep]
        merged[0] = 1.0
        merged[-1] = self.u_max
        return LogGrid(merged, self.degree)

    def edge_index(self, u: float) -> int:
        """Index of the edge closest to u (use after ``refined`` inserted it)."""
        return int(np.argmin(np.abs(self.edges - u)))

    # ------------------------------------------------------------------ sums
    def integral(self, values: np.ndarray, mask: np.ndarray | None = None) -> float:
        """Sum of weights*values over all (or the masked) cells."""
        prod = self._weights * values
        if mask is not None:
            prod = prod[mask]
        return float(np.sum(prod))

    def _cell_totals(self, values):
        _, w, *_ = _reference_rule(self.degree)
        return (values @ w) * (0.5 * np.diff(self.edges))

    def tail_cumulative(self, values: np.ndarray):
        """int_1^u F du at the nodes and at the edges (t-integral from t to 1)."""
        *_, q_left, _ = _reference_rule(self.degree)
        totals = self._cell_totals(values)
        at_edges = np.concatenate(([0.0], np.cumsum(totals)))
        half = 0.5 * np.diff(self.edges)
        at_nodes = at_edges[:-1, None] + half[:, None] * (values @ q_left.T)
        return at_nodes, at_edges

    def head_cumulative(self, values: np.ndarray):
        """int_u^{u_max} F du at the nodes and at the edges (t-integral from 0 to t)."""
        *_, q_right = _reference_rule(self.degree)
        totals = self._cell_totals(values)
        at_edges = np.concatenate((np.cumsum(totals[::-1])[::-1], [0.0]))
        half = 0.5 * np.diff(self.edges)
        at_nodes = at_edges[1:, None] + half[:, None] * (values @ q_right.T)
        return at_nodes, at_edges

    def tail_cumulative_at(self, values: np.ndarray, uq, at_edges=None) -> np.ndarray:
        """int_1^{uq} F du at arbitrary points, using the cell interpolant of F.

        ``at_edges`` may pass in the edge totals from ``tail_cumulative`` to skip recomputing them.
        """
        _, _, vinv, cint, _, _ = _reference_rule(self.degree)
        uq = np.atleast_1d(np.asarray(uq, dtype=float))
        j = np.clip(np.searchsorted(self.edges, uq, side="right") - 1, 0, self.cells - 1)
        lo = self.edges[j]
        h = self.edges[j + 1] - lo
        x = np.clip(2.0 * (uq - lo) / h - 1.0, -1.0, 1.0)
        rows = L.legvander(x, self.degree) @ cint @ vinv
        partial = 0.5 * h * np.einsum("ij,ij->i", rows, values[j])
        if at_edges is None:
            _, at_edges = self.tail_cumulative(values)
        return at_edges[j] + partial


def make_log_grid(u_max: float = DEFAULT_U_MAX, cells: int = DEFAULT_CELLS,
                  panel_degree: int = DEFAULT_DEGREE) -> LogGrid:
    """Geometric cells in u on [1, u_max], i.e. t in [exp(1 - u_max), 1]."""
    if not (u_max > 1.0) or not math.isfinite(u_max):
        raise ParameterError(f"u_max must be a finite number > 1, got {u_max!r}")
    if int(cells) != cells or cells < 1:
        raise ParameterError(f"cells must be a positive integer, got {cells!r}")
    if int(panel_degree) != panel_degree or panel_degree < 2:
        raise ParameterError(f"panel_degree must be an integer >= 2, got {panel_degree!r}")
    edges = np.geomspace(1.0, u_max, int(cells) + 1)
    edges[0] = 1.0
    edges[-1] = u_max
    # grade the first cell towards u = 1, where tail integrals int_t^1 vanish
    # like (u - 1) and their fractional powers are not polynomial
    grade = 1.0 + (edges[1] - 1.0) * 4.0 ** -np.arange(1, _GRADING_LEVELS + 1)
    return LogGrid(np.union1d(edges, grade), int(panel_degree))


def u_of_t(t):
    """u = 1 - log t (t = 0 maps to +inf)."""
    with np.errstate(divide="ignore"):
        return 1.0 - np.log(t)


def t_of_u(u):
    return np.exp(1.0 - np.asarray(u, dtype=float))


def _interval_u(a: float, b: float, grid: LogGrid):
    if not (0.0 <= a < b <= 1.0):
        raise ParameterError(f"need 0 <= a < b <= 1, got a={a!r}, b={b!r}")
    u_hi = grid.u_max if a <= grid.t_min else float(u_of_t(a))
    u_lo = float(u_of_t(b))
    return u_lo, u_hi


def integrate_weighted(g, w, a: float, b: float, grid: LogGrid) -> float:
    """Approximate int_a^b w(t) g(t) dt.

    ``w`` is anything with ``log_u(u)`` (a PowerLogWeight); ``g`` is either a
    rearrangement-like object with ``log_u`` or a plain callable of t.  Where
    the weight times the Jacobian underflows to zero the sample of g is not
    taken, so callables need not be finite at t = 0.
    """
    u_lo, u_hi = _interval_u(a, b, grid)
    breaks = [u_lo, u_hi]
    breaks.extend(getattr(g, "breaks_u", ()))
    g_grid = grid.refined(breaks)
    u = g_grid.nodes
    inside = (u > u_lo) & (u < u_hi)
    log_wj = w.log_u(u) + (1.0 - u)
    if hasattr(g, "log_u"):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.exp(g.log_u(u) + log_wj)
    else:
        wj = np.exp(log_wj)
        vals = np.zeros_like(u)
        live = inside & (wj > 0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            gv = np.asarray(g(t_of_u(u[live])), dtype=float)
            vals[live] = wj[live] * np.broadcast_to(gv, u[live].shape)
    vals = np.where(inside, vals, 0.0)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("non-finite integrand samples")
    return g_grid.integral(vals)


def sup_on_interval(g, a: float, b: float, grid: LogGrid):
    """Supremum of a callable g over (a, b): best grid node, then a Brent polish.

    Returns ``(value, argmax)`` with the argmax in t.
    """
    u_lo, u_hi = _interval_u(a, b, grid)
    g_grid = grid.refined([u_lo, u_hi])
    u = g_grid.nodes.ravel()
    u = u[(u > u_lo) & (u < u_hi)]
    if u.size == 0:
        raise ParameterError("no grid nodes inside the interval")
    eps_lo = u_lo * (1.0 + 1e-12)
    eps_hi = u_hi * (1.0 - 1e-12)
    cand = np.concatenate(([eps_lo], u, [eps_hi]))

    def val(uu):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(g(t_of_u(uu)), dtype=float)

    gv = np.broadcast_to(val(cand), cand.shape)
    if np.any(np.isnan(gv)):
        raise EvaluationError("NaN samples in supremum")
    k = int(np.argmax(gv))
    best_u, best_v = float(cand[k]), float(gv[k])
    lo = float(cand[max(k - 1, 0)])
    hi = float(cand[min(k + 1, cand.size - 1)])
    if hi > lo and math.isfinite(best_v):
        res = minimize_scalar(lambda x: -float(val(np.array([x]))[0]), bounds=(lo, hi),
                              method="bounded",
                              options={"xatol": 1e-13 * max(1.0, abs(best_u))})
        if res.success and -res.fun > best_v:
            best_u, best_v = float(res.x), float(-res.fun)
    return best_v, float(t_of_u(best_u))
