"""Growth classes  exp(-kappa u) u^lam (log u)^mu  as u -> infinity (t -> 0).

Used to decide membership of power-log functions exactly: the quadrature
truncates at u_max, so a divergent integral would otherwise come back as a
large finite number.
"""

from __future__ import annotations

from dataclasses import dataclass

_TOL = 1e-12


def _sign(x: float) -> int:
    if x > _TOL:
        return 1
    if x < -_TOL:
        return -1
    return 0


@dataclass(frozen=True)
class Growth:
    """exp(-kappa u) u^lam (log u)^mu; ``kappa = inf`` encodes "vanishes near t = 0"."""

    kappa: float = 0.0
    lam: float = 0.0
    mu: float = 0.0

    @classmethod
    def t_power(cls, g0: float, g1: float = 0.0) -> "Growth":
        """Growth of t^g0 (1 - log t)^g1."""
        return cls(g0, g1, 0.0)

    def __mul__(self, other: "Growth") -> "Growth":
        return Growth(self.kappa + other.kappa, self.lam + other.lam, self.mu + other.mu)

    def __pow__(self, q: float) -> "Growth":
        return Growth(self.kappa * q, self.lam * q, self.mu * q)

    def _order(self):
        # larger = decays faster
        return (round(self.kappa, 12), -round(self.lam, 12), -round(self.mu, 12))

    @property
    def grows(self) -> bool:
        """Unbounded as u -> infinity."""
        k, l, m = _sign(self.kappa), _sign(self.lam), _sign(self.mu)
        return k < 0 or (k == 0 and (l > 0 or (l == 0 and m > 0)))

    @property
    def integrable(self) -> bool:
        """int^infinity du converges."""
        k, l, m = _sign(self.kappa), _sign(self.lam + 1.0), _sign(self.mu + 1.0)
        return k > 0 or (k == 0 and (l < 0 or (l == 0 and m < 0)))

    def head(self) -> "Growth | None":
        """Growth of int_u^infinity (None when divergent)."""
        if not self.integrable:
            return None
        if _sign(self.kappa) > 0:
            return self
        if _sign(self.lam + 1.0) < 0:
            return Growth(0.0, self.lam + 1.0, self.mu)
        return Growth(0.0, 0.0, self.mu + 1.0)

    def tail(self) -> "Growth":
        """Growth of int_1^u."""
        k = _sign(self.kappa)
        if k < 0:
            return self
        if k > 0:
            return Growth()
        l = _sign(self.lam + 1.0)
        if l > 0:
            return Growth(0.0, self.lam + 1.0, self.mu)
        if l < 0:
            return Growth()
        m = _sign(self.mu + 1.0)
        if m > 0:
            return Growth(0.0, 0.0, self.mu + 1.0)
        if m == 0:
            # log log u: slower than any power of log u, still unbounded
            return Growth(0.0, 0.0, 1e-9)
        return Growth()

    def sup_beyond(self) -> "Growth | None":
        """Growth of sup_{v > u} (None when infinite)."""
        return None if self.grows else self

    def sup_before(self) -> "Growth":
        """Growth of sup_{1 < v < u}."""
        return self if self.grows else Growth()


def min_growth(a: Growth, b: Growth) -> Growth:
    """Growth of min(F, G): the faster-decaying one."""
    return a if a._order() >= b._order() else b


def max_growth(a: Growth, b: Growth) -> Growth:
    return b if a._order() >= b._order() else a
