"""Chain and shadow predicates for delta-hyperbolic point sets.

The predicates work over any point type through a metric object exposing
``dist(x, y)`` and ``gromov_product(x, y, z)``.  The default metric is the
free-group tree (delta = 0), where both are exact integers.  Thresholds
like C, D, delta may be half-integers; all comparisons are done on doubled
integers so no floating point enters a geometric predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import words

__all__ = [
    "TreeMetric",
    "TREE",
    "ChainParams",
    "is_chain",
    "CanoeReport",
    "check_canoe",
    "in_chain_shadow",
    "chain_shadow_via_waypoints",
    "check_fellowtravel_lemma",
]


class TreeMetric:
    """Word metric on the free-group tree; 0-hyperbolic."""

    delta = 0

    @staticmethod
    def dist(x: words.Word, y: words.Word) -> int:
        return words.dist(x, y)

    @staticmethod
    def gromov_product(x: words.Word, y: words.Word, z: words.Word) -> int:
        return words.gromov_product(x, y, z)


TREE = TreeMetric()


def _doubled(value) -> int:
    """Exact doubling of an int or half-integer threshold."""
    d = 2 * value
    rounded = int(round(d))
    if abs(d - rounded) > 1e-9:
        raise ValueError(f"{value} is not a half-integer")
    return rounded


@dataclass(frozen=True)
class ChainParams:
    """Constants (C, D, delta) for chain conditions.

    The local-to-global estimate needs D >= 2C + 2*delta + 1; that is
    checked by :func:`check_canoe`, not assumed here.
    """

    C: float
    D: float
    delta: float = 0

    def __post_init__(self):
        if self.C < 0 or self.D < 0 or self.delta < 0:
            raise ValueError("chain constants must be non-negative")
        # validate half-integrality eagerly
        _doubled(self.C), _doubled(self.D), _doubled(self.delta)

    @property
    def doubled_C(self) -> int:
        return _doubled(self.C)

    @property
    def doubled_D(self) -> int:
        return _doubled(self.D)

    @property
    def doubled_delta(self) -> int:
        return _doubled(self.delta)

    def satisfies_canoe_precondition(self) -> bool:
        # D >= 2C + 2 delta + 1, compared as doubled integers
        return self.doubled_D >= 2 * self.doubled_C + 2 * self.doubled_delta + 2


def is_chain(points: Sequence, p: ChainParams, metric=TREE) -> bool:
    """True iff interior Gromov products are <= C and consecutive
    distances are >= D."""
    if len(points) < 2:
        raise ValueError("a chain needs at least 2 points")
    dC, dD = p.doubled_C, p.doubled_D
    for i in range(len(points) - 1):
        if _doubled(metric.dist(points[i], points[i + 1])) < dD:
            return False
    for i in range(1, len(points) - 1):
        prod = metric.gromov_product(points[i - 1], points[i + 1], points[i])
        if _doubled(prod) > dC:
            return False
    return True


@dataclass(frozen=True)
class CanoeReport:
    """Outcome of the local-to-global check on one chain.

    For a valid (C, D)-chain with D >= 2C + 2 delta + 1 both flags are a
    theorem; the check exists so tests can exercise it on random chains.
    """

    gromov_bound_ok: bool
    length_bound_ok: bool
    endpoint_distance: float
    worst_product: float

    @property
    def ok(self) -> bool:
        return self.gromov_bound_ok and self.length_bound_ok


def check_canoe(points: Sequence, p: ChainParams, metric=TREE) -> CanoeReport:
    """Check (x_0, x_n)_{x_i} <= C + 2 delta at every interior point and
    d(x_0, x_n) >= n."""
    if not is_chain(points, p, metric):
        raise ValueError("points do not form a (C, D)-chain")
    if not p.satisfies_canoe_precondition():
        raise ValueError("need D >= 2C + 2*delta + 1")
    n = len(points) - 1
    x0, xn = points[0], points[-1]
    bound = p.doubled_C + 2 * p.doubled_delta
    worst = 0
    for i in range(1, n):
        worst = max(worst, _doubled(metric.gromov_product(x0, xn, points[i])))
    d = metric.dist(x0, xn)
    return CanoeReport(
        gromov_bound_ok=worst <= bound,
        length_bound_ok=d >= n,
        endpoint_distance=d,
        worst_product=worst / 2,
    )


def in_chain_shadow(z, y, y_plus, p: ChainParams, metric=TREE) -> bool:
    """Sufficient test for z lying in the C-chain-shadow of y_plus seen
    from y, using the two-point chain (y, z).

    True requires d(y, z) >= 2C + 2*delta + 1 and (y, z)_{y_plus} <= C.
    A True answer witnesses membership; False only means the two-point
    chain is not a witness.
    """
    dC, dd = p.doubled_C, p.doubled_delta
    if _doubled(metric.dist(y, z)) < 2 * dC + 2 * dd + 2:
        return False
    return _doubled(metric.gromov_product(y, z, y_plus)) <= dC


def chain_shadow_via_waypoints(
    z, y, y_plus, p: ChainParams, waypoints: Sequence, metric=TREE
) -> bool:
    """Diagnostic fallback: test whether y, w_1, ..., w_m, z is a valid
    (C, 2C+2*delta+1)-chain starting into the shadow of y_plus.

    The waypoints are taken in the given order; no search over subsets.
    """
    pts = [y, *waypoints, z]
    chain_params = ChainParams(p.C, 2 * p.C + 2 * p.delta + 1, p.delta)
    if len(pts) < 2 or pts[0] == pts[1]:
        return False
    if not is_chain(pts, chain_params, metric):
        return False
    return _doubled(metric.gromov_product(pts[0], pts[1], y_plus)) <= p.doubled_C


def check_fellowtravel_lemma(
    a, x, y, g: words.Word, C, K, delta=0, metric=TREE
) -> bool:
    """Verify d(a, g a) <= 2C + 2K + 4 delta for an isometry g that moves
    x and y by at most K, when a lies within C of the geodesic [x, y].

    g acts by left multiplication.  Preconditions are checked (the
    distance from a to [x, y] is the Gromov product (x, y)_a, exact in
    the tree) and a violation raises.
    """
    dC, dK, dd = _doubled(C), _doubled(K), _doubled(delta)
    if _doubled(metric.gromov_product(x, y, a)) > dC:
        raise ValueError("a is not within C of the geodesic [x, y]")
    if _doubled(metric.dist(x, g * x)) > dK or _doubled(metric.dist(y, g * y)) > dK:
        raise ValueError("g moves an endpoint by more than K")
    return _doubled(metric.dist(a, g * a)) <= 2 * dC + 2 * dK + 4 * dd
