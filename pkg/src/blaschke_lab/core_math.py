"""Exponent calculus, boundary-set geometry, and branch-safe complex powers.

This is the shared bottom layer: positive/negative parts, the brace
exponent shorthand used by the half-plane and cut-plane sum weights,
distances to finite boundary sets and to the positive semi-axis, chordal
neighborhood measures of closed subsets of the unit circle, and principal
complex powers.

All functions are pure and all container types are frozen, so values may
be shared freely across threads.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UNIT_MODULUS_TOL",
    "SignedExponent",
    "BoundaryPointSet",
    "CircleClosedSet",
    "DistProductComparison",
    "plus_part",
    "neg_part",
    "brace_shorthand",
    "dist_to_finite_set",
    "dist_product_comparison",
    "comparability_constants",
    "dist_to_positive_ray",
    "circle_neighborhood_measure",
    "ahern_clark_type",
    "principal_power",
    "tree_sum",
]

# Boundary points must sit on the unit circle up to this tolerance; inputs
# outside it are rejected, never silently normalized.
UNIT_MODULUS_TOL = 1e-12


def plus_part(a: float) -> float:
    """Positive part max(a, 0)."""
    return a if a > 0.0 else 0.0


def neg_part(a: float) -> float:
    """Negative part max(-a, 0), so that plus_part(a) - neg_part(a) == a."""
    return -a if a < 0.0 else 0.0


@dataclass(frozen=True)
class SignedExponent:
    """A real exponent split into its positive and negative parts."""

    value: float

    @property
    def pos(self) -> float:
        return plus_part(self.value)

    @property
    def neg(self) -> float:
        return neg_part(self.value)


def brace_shorthand(u: float, c: float, eps: float) -> float:
    """Evaluate the brace exponent (u_- - 1 + eps)_+ - min(c, u_+).

    `c` must be nonnegative and `eps` positive.  The value is
    non-increasing in `c` and non-decreasing in `eps`.
    """
    if c < 0.0:
        raise ValueError(f"c must be nonnegative, got {c}")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    return plus_part(neg_part(u) - 1.0 + eps) - min(c, plus_part(u))


def _as_complex_tuple(points) -> tuple[complex, ...]:
    return tuple(complex(p) for p in points)


@dataclass(frozen=True)
class BoundaryPointSet:
    """A finite set of distinct unit-modulus points, optionally with exponents.

    The exponent list, when present, is parallel to the point list and
    holds the nonnegative per-point exponents of a growth envelope.
    """

    points: tuple[complex, ...]
    exponents: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", _as_complex_tuple(self.points))
        for p in self.points:
            if abs(abs(p) - 1.0) > UNIT_MODULUS_TOL:
                raise ValueError(f"boundary point {p} is off the unit circle")
        for i, p in enumerate(self.points):
            for q in self.points[i + 1:]:
                if p == q:
                    raise ValueError(f"boundary points must be distinct, {p} repeats")
        if self.exponents is not None:
            exps = tuple(float(e) for e in self.exponents)
            object.__setattr__(self, "exponents", exps)
            if len(exps) != len(self.points):
                raise ValueError("exponent list length must match point list")
            if any(e < 0.0 for e in exps):
                raise ValueError("exponents must be nonnegative")

    def __len__(self) -> int:
        return len(self.points)


def dist_to_finite_set(z: complex, boundary: BoundaryPointSet) -> float:
    """Minimum Euclidean distance from z to the points of `boundary`."""
    if len(boundary) == 0:
        raise ValueError("empty boundary set")
    return min(abs(z - p) for p in boundary.points)


@functools.lru_cache(maxsize=128)
def comparability_constants(boundary: BoundaryPointSet) -> tuple[float, float]:
    """Empirical inf/sup of dist(z, B) / prod |z - b_j| over a fixed disk grid.

    No closed form for these constants exists; they are measured on the
    deterministic grid of radii 0..1 step 1/128 and 512 angles, skipping
    points where the product vanishes to rounding.
    """
    if len(boundary) == 0:
        raise ValueError("empty boundary set")
    radii = np.arange(0.0, 1.0 + 1e-9, 1.0 / 128.0)
    angles = np.arange(512) * (2.0 * math.pi / 512.0)
    z = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    pts = np.array(boundary.points)
    dists = np.abs(z[:, None] - pts[None, :])
    dist = dists.min(axis=1)
    prod = dists.prod(axis=1)
    ok = prod > 1e-15
    ratio = dist[ok] / prod[ok]
    return float(ratio.min()), float(ratio.max())


@dataclass(frozen=True)
class DistProductComparison:
    dist: float
    product: float
    c_lower: float
    c_upper: float
    lower_ok: bool
    upper_ok: bool


def dist_product_comparison(z: complex, boundary: BoundaryPointSet) -> DistProductComparison:
    """Compare dist(z, B) with the product of |z - b_j| using grid constants.

    Returns both quantities, the grid-measured constants c(B), C(B), and
    whether c(B)*prod <= dist <= C(B)*prod holds at this z.
    """
    if len(boundary) == 0:
        raise ValueError("empty boundary set")
    c_lo, c_hi = comparability_constants(boundary)
    dists = [abs(z - p) for p in boundary.points]
    dist = min(dists)
    product = math.prod(dists)
    tol = 1e-12 * max(1.0, product)
    return DistProductComparison(
        dist=dist,
        product=product,
        c_lower=c_lo,
        c_upper=c_hi,
        lower_ok=c_lo * product <= dist + tol,
        upper_ok=dist <= c_hi * product + tol,
    )


def dist_to_positive_ray(lam: complex) -> float:
    """Distance from lam to the closed ray [0, +inf)."""
    lam = complex(lam)
    if lam.real >= 0.0:
        return abs(lam.imag)
    return abs(lam)


def _normalize_arc(start: float, end: float) -> tuple[float, float]:
    length = (end - start) % (2.0 * math.pi)
    if length == 0.0 and end != start:
        length = 2.0 * math.pi
    if length <= 0.0:
        raise ValueError("arcs must have positive length")
    s = start % (2.0 * math.pi)
    return s, s + length


def _merge_circular(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Merge intervals on the circle; input as (a, b) with b > a.

    Pieces are reduced mod 2*pi, wrapping intervals split at 0, and the
    seam at angle 0 rejoined, so the output is a disjoint cover.
    """
    two_pi = 2.0 * math.pi
    pieces: list[tuple[float, float]] = []
    for a, b in intervals:
        length = b - a
        if length >= two_pi:
            return [(0.0, two_pi)]
        a %= two_pi
        if a + length > two_pi:
            pieces.append((a, two_pi))
            pieces.append((0.0, a + length - two_pi))
        else:
            pieces.append((a, a + length))
    pieces.sort()
    merged = [pieces[0]]
    for a, b in pieces[1:]:
        la, lb = merged[-1]
        if a <= lb:
            merged[-1] = (la, max(lb, b))
        else:
            merged.append((a, b))
    # Rejoin across the seam at angle 0 / 2*pi.
    if len(merged) > 1 and merged[0][0] == 0.0 and merged[-1][1] >= two_pi:
        a0, b0 = merged.pop(0)
        al, bl = merged[-1]
        merged[-1] = (al, max(bl, b0 + two_pi))
    return merged


@dataclass(frozen=True)
class CircleClosedSet:
    """A closed subset of the unit circle: isolated points plus closed arcs.

    Arcs are (start, end) angles in radians, counterclockwise; they are
    normalized and merged on construction so the stored arcs are disjoint
    with total measure at most 2*pi.
    """

    isolated_points: tuple[complex, ...] = ()
    arcs: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        pts = _as_complex_tuple(self.isolated_points)
        for p in pts:
            if abs(abs(p) - 1.0) > UNIT_MODULUS_TOL:
                raise ValueError(f"circle point {p} is off the unit circle")
        object.__setattr__(self, "isolated_points", pts)
        if self.arcs:
            normalized = [_normalize_arc(float(s), float(e)) for s, e in self.arcs]
            merged = _merge_circular(normalized)
            total = sum(b - a for a, b in merged)
            if total > 2.0 * math.pi + 1e-12:
                raise ValueError("total arc measure exceeds the circle")
            object.__setattr__(self, "arcs", tuple(merged))

    @property
    def is_empty(self) -> bool:
        return not self.isolated_points and not self.arcs

    @property
    def has_arcs(self) -> bool:
        return bool(self.arcs)

    def arc_measure(self) -> float:
        return sum(b - a for a, b in self.arcs)

    def chordal_distance(self, z: complex) -> float:
        """Euclidean distance from z to the set."""
        if self.is_empty:
            raise ValueError("empty circle set")
        best = math.inf
        for p in self.isolated_points:
            best = min(best, abs(z - p))
        for a, b in self.arcs:
            theta = math.atan2(z.imag, z.real) % (2.0 * math.pi)
            # Angular position relative to the arc.
            rel = (theta - a) % (2.0 * math.pi)
            if rel <= (b - a):
                # Nearest arc point shares the angle of z.
                best = min(best, abs(z - cmath.exp(1j * theta)))
            else:
                best = min(best, abs(z - cmath.exp(1j * a)), abs(z - cmath.exp(1j * b)))
        return best


def circle_neighborhood_measure(circle_set: CircleClosedSet, x: float) -> float:
    """Arc length of the chordal x-neighborhood {t on the circle: dist(t, F) < x}.

    Computed analytically: a chord threshold x corresponds to the angular
    halo 2*arcsin(x/2) around each point and around each arc endpoint;
    overlaps are merged exactly.
    """
    if x <= 0.0:
        raise ValueError(f"x must be positive, got {x}")
    if circle_set.is_empty:
        return 0.0
    if x >= 2.0:
        return 2.0 * math.pi
    delta = 2.0 * math.asin(x / 2.0)
    intervals: list[tuple[float, float]] = []
    for p in circle_set.isolated_points:
        theta = math.atan2(p.imag, p.real)
        intervals.append((theta - delta, theta + delta))
    for a, b in circle_set.arcs:
        intervals.append((a - delta, b + delta))
    merged = _merge_circular(intervals)
    return min(sum(b - a for a, b in merged), 2.0 * math.pi)


def ahern_clark_type(circle_set: CircleClosedSet, method: str = "exact") -> tuple[float, str]:
    """Decay exponent of the neighborhood measure, with a method tag.

    Exact mode: 1.0 for a finite point set, 0.0 as soon as the set
    contains an arc (the measure then has a positive limit, so no positive
    exponent is admissible).  Estimator mode fits the log-log slope of
    circle_neighborhood_measure on the dyadic grid x = 2^-k, k = 4..20.
    """
    if circle_set.is_empty:
        raise ValueError("empty circle set")
    if method == "exact":
        if circle_set.has_arcs:
            return 0.0, "exact-arc"
        return 1.0, "exact-finite"
    if method == "estimate":
        ks = np.arange(4, 21)
        xs = 2.0 ** (-ks)
        ms = np.array([circle_neighborhood_measure(circle_set, float(x)) for x in xs])
        slope = np.polyfit(np.log(xs), np.log(ms), 1)[0]
        return float(slope), "estimated-slope"
    raise ValueError(f"unknown method {method!r}")


def principal_power(z, alpha: float):
    """exp(alpha * (ln|z| + i*Arg z)) with Arg in (-pi, pi].

    Accepts scalars or numpy arrays.  z = 0 is allowed only for alpha > 0
    (the value is 0); otherwise the power is singular.
    """
    if np.isscalar(z) or isinstance(z, complex):
        zc = complex(z)
        if zc == 0.0:
            if alpha > 0.0:
                return 0.0 + 0.0j
            raise ValueError("singular power: zero base with nonpositive exponent")
        # +0.0j canonicalizes a -0.0 imaginary part so Arg(-1) is +pi.
        zc = zc + 0.0j
        return cmath.exp(alpha * (math.log(abs(zc)) + 1j * cmath.phase(zc)))
    arr = np.asarray(z, dtype=complex) + 0.0j
    zero = arr == 0.0
    if np.any(zero):
        if alpha <= 0.0:
            raise ValueError("singular power: zero base with nonpositive exponent")
        out = np.zeros_like(arr)
        nz = ~zero
        out[nz] = np.exp(alpha * (np.log(np.abs(arr[nz])) + 1j * np.angle(arr[nz])))
        return out
    return np.exp(alpha * (np.log(np.abs(arr)) + 1j * np.angle(arr)))


def tree_sum(values) -> float:
    """Pairwise tree reduction; fixed association order for reproducibility."""
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
