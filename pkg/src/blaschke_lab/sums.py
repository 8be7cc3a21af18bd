"""Weighted zero sums, growth-constant estimation, and verification reports.

Each evaluator takes a zero multiset and a growth envelope and returns a
SumReport: the per-zero terms (multiplicity folded in), their total under
a fixed-order pairwise reduction, the derived exponents actually used,
and optionally the estimated growth constant with the resulting ratio.

Weight shapes by domain:
  * disk, per-point form:   (1-|z|)^(p+1+e) * prod |z-xi_k|^((q_k-1+e)+)
                                            / prod |z-zeta_j|^(min(p, r_j))
  * disk, closed-set form:  distances to a closed circle set F and a finite
    set E, with the F exponent lowered by the decay type of F
  * two-region / collapsed: split or merged near-vertex weights with the
    region threshold (1-|z|)/|1-z| vs |1-z|^beta
  * half-plane:             (Im z)^(a+1+e) / (1+|z|)^l1 times real-point factors
  * cut plane:              dist(z, ray)^(a+1+e) * |z|^s1 / (1+|z|)^s2 times
                            positive-point factors

The l1, s1, s2 exponents come from the brace shorthand in core_math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .conformal import StolzAngle, stolz_contains
from .core_math import (
    BoundaryPointSet,
    CircleClosedSet,
    ahern_clark_type,
    brace_shorthand,
    dist_to_positive_ray,
    plus_part,
    tree_sum,
)
from .zerofind import AnalyticFn, ZeroSet

__all__ = [
    "EnvelopeSpec",
    "TermRow",
    "SumReport",
    "KhatGrid",
    "SumEvaluationError",
    "VerifyEntry",
    "VerificationReport",
    "DyadicProfile",
    "LevelRow",
    "disk_sum",
    "origin_factor_sum",
    "closed_set_sum",
    "two_region_sum",
    "collapsed_sum",
    "stolz_split_sum",
    "halfplane_exponents",
    "halfplane_sum",
    "cut_exponents",
    "cut_sum",
    "beta_level",
    "dyadic_k0",
    "dyadic_profile",
    "estimate_growth_constant",
    "evaluate_sum",
    "verify_bound",
]

SCHEMA_VERSION = 1


class SumEvaluationError(ValueError):
    """A zero collides with a singular weight point or violates a domain."""


# -- envelopes -----------------------------------------------------------------

def _point_pairs(pairs) -> tuple[tuple[float, float], ...]:
    out = tuple((float(x), float(e)) for x, e in pairs)
    for _, e in out:
        if e < 0.0:
            raise ValueError("point exponents must be nonnegative")
    xs = [x for x, _ in out]
    if len(set(xs)) != len(xs):
        raise ValueError("envelope points must be distinct")
    return out


@dataclass(frozen=True)
class EnvelopeSpec:
    """A growth envelope; exactly one of the four forms is active.

    Forms: "disk_points" (per-point exponent products), "disk_closed"
    (set distances, F an arbitrary closed circle set), "halfplane", "cut".
    """

    domain: str = "disk"
    p: float | None = None
    q: float | None = None
    r: float | None = None
    e_points: BoundaryPointSet | None = None
    f_points: BoundaryPointSet | None = None
    f_closed: CircleClosedSet | None = None
    gamma: float = 0.0
    a: float | None = None
    b: float | None = None
    r_signed: float | None = None
    c_points: tuple[tuple[float, float], ...] = ()
    d_points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.domain not in ("disk", "halfplane", "cut"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if self.domain == "disk":
            if self.p is None or self.p < 0.0:
                raise ValueError("disk envelopes need p >= 0")
            if self.f_closed is not None:
                if self.q is None or self.r is None or self.q < 0.0 or self.r < 0.0:
                    raise ValueError("closed-set form needs q >= 0 and r >= 0")
            if self.e_points is not None and self.f_points is not None:
                shared = set(self.e_points.points) & set(self.f_points.points)
                if shared:
                    raise ValueError(f"E and F must be disjoint, shared: {shared}")
            if self.e_points is not None and self.f_closed is not None:
                for pt in self.e_points.points:
                    if self.f_closed.chordal_distance(pt) == 0.0:
                        raise ValueError(f"E point {pt} lies in the closed set F")
            for pts in (self.e_points, self.f_points):
                if pts is not None and len(pts) and pts.exponents is None:
                    raise ValueError("per-point form needs exponents on every point")
        elif self.domain == "halfplane":
            if self.a is None or self.b is None or self.a < 0.0 or self.b < 0.0:
                raise ValueError("half-plane envelopes need a, b >= 0")
            object.__setattr__(self, "c_points", _point_pairs(self.c_points))
            object.__setattr__(self, "d_points", _point_pairs(self.d_points))
            cset = {x for x, _ in self.c_points}
            if cset & {x for x, _ in self.d_points}:
                raise ValueError("half-plane point sets must be disjoint")
        else:  # cut
            if self.a is None or self.b is None or self.a < 0.0 or self.b < 0.0:
                raise ValueError("cut envelopes need a, b >= 0")
            if self.r_signed is None:
                raise ValueError("cut envelopes need the signed power r")
            object.__setattr__(self, "c_points", _point_pairs(self.c_points))
            object.__setattr__(self, "d_points", _point_pairs(self.d_points))
            for x, _ in self.c_points + self.d_points:
                if x <= 0.0:
                    raise ValueError("cut envelope points must be positive reals")
            cset = {x for x, _ in self.c_points}
            if cset & {x for x, _ in self.d_points}:
                raise ValueError("cut point sets must be disjoint")

    @property
    def form(self) -> str:
        if self.domain == "disk":
            return "disk_closed" if self.f_closed is not None else "disk_points"
        return self.domain

    # Convenience constructors ------------------------------------------------

    @classmethod
    def disk_points(cls, p: float, e=(), f=(), gamma: float = 0.0) -> "EnvelopeSpec":
        """Per-point form: e and f are sequences of (unit point, exponent)."""
        e_set = BoundaryPointSet(tuple(pt for pt, _ in e), tuple(x for _, x in e)) if e else None
        f_set = BoundaryPointSet(tuple(pt for pt, _ in f), tuple(x for _, x in f)) if f else None
        return cls(domain="disk", p=p, e_points=e_set, f_points=f_set, gamma=gamma)

    @classmethod
    def disk_closed(cls, p: float, q: float, r: float, f_closed: CircleClosedSet,
                    e=()) -> "EnvelopeSpec":
        e_set = BoundaryPointSet(tuple(e)) if e else None
        return cls(domain="disk", p=p, q=q, r=r, e_points=e_set, f_closed=f_closed)

    @classmethod
    def halfplane(cls, a: float, b: float, c=(), d=()) -> "EnvelopeSpec":
        return cls(domain="halfplane", a=a, b=b, c_points=tuple(c), d_points=tuple(d))

    @classmethod
    def cut(cls, a: float, b: float, r_signed: float, c=(), d=()) -> "EnvelopeSpec":
        return cls(domain="cut", a=a, b=b, r_signed=r_signed,
                   c_points=tuple(c), d_points=tuple(d))


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class TermRow:
    zero: complex
    multiplicity: int
    term: float
    label: str | None = None


@dataclass(frozen=True)
class SumReport:
    """One evaluated weighted zero sum."""

    total: float
    per_zero: tuple[TermRow, ...]
    epsilon: float | None
    params: dict = field(default_factory=dict)
    k_hat: float | None = None

    @property
    def ratio(self) -> float | None:
        """total / k_hat; inf when the constant is zero but the sum is not."""
        if self.k_hat is None:
            return None
        if self.k_hat > 0.0:
            return self.total / self.k_hat
        return math.inf if self.total > 0.0 else 0.0

    def with_k_hat(self, k_hat: float) -> "SumReport":
        return replace(self, k_hat=float(k_hat))

    def to_json_dict(self) -> dict:
        ratio = self.ratio
        return {
            "schema_version": SCHEMA_VERSION,
            "total": self.total,
            "k_hat": self.k_hat,
            "ratio": ("inf" if ratio is not None and math.isinf(ratio) else ratio),
            "epsilon": self.epsilon,
            "params": self.params,
            "per_zero": [
                {
                    "re": row.zero.real,
                    "im": row.zero.imag,
                    "multiplicity": row.multiplicity,
                    "term": row.term,
                    "label": row.label,
                }
                for row in self.per_zero
            ],
        }

    CSV_COLUMNS = ("re", "im", "multiplicity", "term", "label")

    def to_csv_rows(self) -> list[list]:
        return [
            [row.zero.real, row.zero.imag, row.multiplicity, row.term, row.label or ""]
            for row in self.per_zero
        ]


def _as_zeroset(zeros) -> ZeroSet:
    if isinstance(zeros, ZeroSet):
        return zeros
    return ZeroSet.from_points(zeros)


def _make_report(rows: list[TermRow], epsilon: float | None, params: dict) -> SumReport:
    rows = sorted(rows, key=lambda t: (t.zero.real, t.zero.imag, t.multiplicity))
    total = tree_sum(t.term for t in rows)
    return SumReport(total=total, per_zero=tuple(rows), epsilon=epsilon, params=params)


def _require_in_disk(zs: ZeroSet):
    for e in zs:
        if abs(e.location) >= 1.0:
            raise SumEvaluationError(f"zero {e.location} is not inside the unit disk")


def _pow_ratio(z: complex, points_with_exps, singular_name: str) -> float:
    """prod |z - x|^e with a hard error on a zero-distance, positive-exponent hit."""
    out = 1.0
    for x, e in points_with_exps:
        if e == 0.0:
            continue
        d = abs(z - x)
        if d == 0.0:
            raise SumEvaluationError(f"zero {z} coincides with {singular_name} point {x}")
        out *= d**e
    return out


# -- disk sums -----------------------------------------------------------------

def disk_sum(zeros, env: EnvelopeSpec, eps: float, p0_sharp: bool = False) -> SumReport:
    """Per-point weighted sum on the disk.

    With p0_sharp (valid only when p = 0) the radial factor drops from
    (1-|z|)^(1+eps) to the classical (1-|z|).
    """
    if env.form != "disk_points":
        raise ValueError(f"disk_sum needs the per-point disk form, got {env.form}")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if p0_sharp and env.p != 0.0:
        raise ValueError("the sharp radial factor applies only when p = 0")
    zs = _as_zeroset(zeros)
    _require_in_disk(zs)
    p = env.p
    e_pairs = list(zip(env.e_points.points, env.e_points.exponents)) if env.e_points else []
    f_pairs = list(zip(env.f_points.points, env.f_points.exponents)) if env.f_points else []
    rows = []
    for entry in zs:
        z = entry.location
        base = (1.0 - abs(z)) if p0_sharp else (1.0 - abs(z)) ** (p + 1.0 + eps)
        num = _pow_ratio(z, [(xi, plus_part(qk - 1.0 + eps)) for xi, qk in f_pairs], "F")
        den = _pow_ratio(z, [(ze, min(p, rj)) for ze, rj in e_pairs], "E")
        rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * base * num / den))
    params = {
        "p": p,
        "eps": eps,
        "p0_sharp": p0_sharp,
        "e_exponents": [min(p, rj) for _, rj in e_pairs],
        "f_exponents": [plus_part(qk - 1.0 + eps) for _, qk in f_pairs],
    }
    return _make_report(rows, eps, params)


def origin_factor_sum(zeros, env: EnvelopeSpec, eps: float, gamma: float | None = None) -> SumReport:
    """disk_sum sharpened by the origin factor |z|^(-(gamma-eps)+)."""
    g = env.gamma if gamma is None else float(gamma)
    if g < 0.0:
        raise ValueError("gamma must be nonnegative")
    base_report = disk_sum(zeros, env, eps)
    exponent = plus_part(g - eps)
    rows = []
    for row in base_report.per_zero:
        if exponent > 0.0 and row.zero == 0.0:
            raise SumEvaluationError("zero at the origin with gamma > eps")
        factor = abs(row.zero) ** (-exponent) if exponent > 0.0 else 1.0
        rows.append(replace(row, term=row.term * factor))
    params = dict(base_report.params)
    params.update({"gamma": g, "origin_exponent": exponent})
    return _make_report(rows, eps, params)


def closed_set_sum(zeros, env: EnvelopeSpec, eps: float) -> SumReport:
    """Set-distance weighted sum; the F exponent is (q - type(F) + eps)+."""
    if env.form != "disk_closed":
        raise ValueError(f"closed_set_sum needs the closed-set disk form, got {env.form}")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    zs = _as_zeroset(zeros)
    _require_in_disk(zs)
    alpha, alpha_tag = ahern_clark_type(env.f_closed)
    f_exp = plus_part(env.q - alpha + eps)
    e_exp = min(env.p, env.r)
    rows = []
    for entry in zs:
        z = entry.location
        term = (1.0 - abs(z)) ** (env.p + 1.0 + eps)
        if f_exp > 0.0:
            term *= env.f_closed.chordal_distance(z) ** f_exp
        if env.e_points is not None and len(env.e_points) and e_exp > 0.0:
            d = min(abs(z - pt) for pt in env.e_points.points)
            if d == 0.0:
                raise SumEvaluationError(f"zero {z} coincides with an E point")
            term /= d**e_exp
        rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * term))
    params = {
        "p": env.p,
        "q": env.q,
        "r": env.r,
        "eps": eps,
        "alpha_type": alpha,
        "alpha_method": alpha_tag,
        "f_exponent": f_exp,
        "e_exponent": e_exp,
    }
    return _make_report(rows, eps, params)


def _two_region_beta(p: float, r: float, tau: float) -> float:
    if not (0.0 < p < r + 1.0):
        raise ValueError(f"need 0 < p < r + 1, got p={p}, r={r}")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    return 1.0 / (p + tau) if p <= r else (r + 1.0 - p) / (p + tau)


def two_region_sum(zeros, p: float, r: float, tau: float, vertex: complex = 1.0) -> SumReport:
    """Split sum: steep-approach zeros carry weight (1-|z|), the rest the
    heavy vertex weight (1-|z|)^(p+1+tau) / |z-vertex|^(min(p,r)+1+tau).

    The split compares (1-|z|)/|z-vertex| against |z-vertex|^beta.
    """
    beta = _two_region_beta(p, r, tau)
    s = min(p, r)
    zs = _as_zeroset(zeros)
    _require_in_disk(zs)
    vertex = complex(vertex)
    rows = []
    for entry in zs:
        z = entry.location
        g = 1.0 - abs(z)
        h = abs(z - vertex)
        if h == 0.0:
            raise SumEvaluationError(f"zero {z} coincides with the vertex")
        if g / h > h**beta:
            rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * g, "radial"))
        else:
            term = g ** (p + 1.0 + tau) / h ** (s + 1.0 + tau)
            rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * term, "tangential"))
    report = _make_report(rows, tau, {
        "p": p, "r": r, "tau": tau, "beta": beta, "s": s,
        "vertex": [vertex.real, vertex.imag],
    })
    radial = tree_sum(t.term for t in report.per_zero if t.label == "radial")
    tangential = tree_sum(t.term for t in report.per_zero if t.label == "tangential")
    report.params.update({"radial_total": radial, "tangential_total": tangential})
    return report


def collapsed_sum(zeros, p: float, r: float, tau: float, vertex: complex = 1.0) -> SumReport:
    """Single-weight consequence of the two-region bound:
    (1-|z|)^(p+1+tau) / |z-vertex|^(min(p,r)+tau).

    Term-by-term it is dominated by the matching two-region weight for
    zeros with |z-vertex| <= 1 (and by twice that weight in general).
    """
    beta = _two_region_beta(p, r, tau)  # validates the parameter window
    s = min(p, r)
    zs = _as_zeroset(zeros)
    _require_in_disk(zs)
    vertex = complex(vertex)
    rows = []
    for entry in zs:
        z = entry.location
        h = abs(z - vertex)
        if h == 0.0:
            raise SumEvaluationError(f"zero {z} coincides with the vertex")
        term = (1.0 - abs(z)) ** (p + 1.0 + tau) / h ** (s + tau)
        rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * term))
    return _make_report(rows, tau, {
        "p": p, "r": r, "tau": tau, "beta": beta, "s": s,
        "vertex": [vertex.real, vertex.imag],
    })


def stolz_split_sum(zeros, zeta0: complex, xi0: complex, p: float, q: float, r: float,
                    tau: float, tau_prime: float) -> SumReport:
    """Two-weight sum split along the Stolz angle of aperture 1/(tau - tau').

    Zeros inside the angle carry (1-|z|)^(p+1+eps) |z-xi0|^((q-1+eps)+);
    zeros outside carry (1-|z|)^(p+tau+1) |z-xi0|^((q-1+tau)+)
    / |z-zeta0|^(min(p,r)+tau').
    """
    if not (0.0 <= tau_prime < tau):
        raise ValueError("need 0 <= tau' < tau")
    eps = tau - tau_prime
    if eps >= 1.0:
        raise ValueError("tau - tau' must be below 1 so the aperture 1/(tau - tau') exceeds 1")
    zeta0, xi0 = complex(zeta0), complex(xi0)
    if zeta0 == xi0:
        raise ValueError("the two boundary points must be distinct")
    angle = StolzAngle(zeta0, 1.0 / eps)
    zs = _as_zeroset(zeros)
    _require_in_disk(zs)
    s = min(p, r)
    rows = []
    for entry in zs:
        z = entry.location
        g = 1.0 - abs(z)
        if stolz_contains(z, angle):
            term = g ** (p + 1.0 + eps) * _pow_ratio(z, [(xi0, plus_part(q - 1.0 + eps))], "F")
            label = "inside"
        else:
            term = g ** (p + tau + 1.0) * _pow_ratio(z, [(xi0, plus_part(q - 1.0 + tau))], "F")
            term /= _pow_ratio(z, [(zeta0, s + tau_prime)], "E")
            label = "outside"
        rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * term, label))
    report = _make_report(rows, eps, {
        "p": p, "q": q, "r": r, "tau": tau, "tau_prime": tau_prime,
        "eps": eps, "aperture": 1.0 / eps, "s": s,
        "zeta0": [zeta0.real, zeta0.imag], "xi0": [xi0.real, xi0.imag],
    })
    inside = tree_sum(t.term for t in report.per_zero if t.label == "inside")
    outside = tree_sum(t.term for t in report.per_zero if t.label == "outside")
    report.params.update({"inside_total": inside, "outside_total": outside})
    return report


# -- half-plane and cut --------------------------------------------------------

def halfplane_exponents(a: float, b: float, c_exps, d_exps, eps: float) -> tuple[float, float]:
    """The balance exponent l and the denominator exponent l1."""
    c_exps = [float(c) for c in c_exps]
    d_exps = [float(d) for d in d_exps]
    if min([a, b] + c_exps + d_exps, default=0.0) < 0.0 or a < 0.0 or b < 0.0:
        raise ValueError("exponents must be nonnegative")
    l = 2.0 * a - 2.0 * b - sum(c_exps) + sum(d_exps)
    l1 = (
        2.0 * (a + 1.0 + eps)
        + brace_shorthand(l, a, eps)
        - sum(min(a, c) for c in c_exps)
        + sum(plus_part(d - 1.0 + eps) for d in d_exps)
    )
    return l, l1


def halfplane_sum(zeros, env: EnvelopeSpec, eps: float) -> SumReport:
    """Weighted zero sum on the upper half-plane."""
    if env.form != "halfplane":
        raise ValueError(f"halfplane_sum needs a half-plane envelope, got {env.form}")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    zs = _as_zeroset(zeros)
    l, l1 = halfplane_exponents(env.a, env.b, [c for _, c in env.c_points],
                                [d for _, d in env.d_points], eps)
    rows = []
    for entry in zs:
        z = entry.location
        if z.imag <= 0.0:
            raise SumEvaluationError(f"zero {z} is not in the open upper half-plane")
        term = z.imag ** (env.a + 1.0 + eps) / (1.0 + abs(z)) ** l1
        term *= _pow_ratio(z, [(x, plus_part(d - 1.0 + eps)) for x, d in env.d_points], "X'")
        term /= _pow_ratio(z, [(x, min(env.a, c)) for x, c in env.c_points], "X")
        rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * term))
    return _make_report(rows, eps, {
        "a": env.a, "b": env.b, "eps": eps, "l": l, "l1": l1,
        "c_exponents": [min(env.a, c) for _, c in env.c_points],
        "d_exponents": [plus_part(d - 1.0 + eps) for _, d in env.d_points],
    })


def cut_exponents(a: float, b: float, r_signed: float, c_exps, d_exps,
                  eps: float) -> tuple[float, float, float]:
    """The balance exponent s and the modulus exponents s1, s2."""
    c_exps = [float(c) for c in c_exps]
    d_exps = [float(d) for d in d_exps]
    if a < 0.0 or b < 0.0 or any(c < 0.0 for c in c_exps) or any(d < 0.0 for d in d_exps):
        raise ValueError("exponents must be nonnegative")
    s = 3.0 * a - 2.0 * b + 2.0 * r_signed - 2.0 * sum(c_exps) + 2.0 * sum(d_exps)
    br = brace_shorthand(-2.0 * r_signed - a, a, eps)
    s1 = (br - a - 1.0 - eps) / 2.0
    s2 = (
        a + 1.0 + eps
        + (br + brace_shorthand(s, a, eps)) / 2.0
        - sum(min(a, c) for c in c_exps)
        + sum(plus_part(d - 1.0 + eps) for d in d_exps)
    )
    return s, s1, s2


def cut_sum(zeros, env: EnvelopeSpec, eps: float) -> SumReport:
    """Weighted zero sum on the plane cut along the positive semi-axis."""
    if env.form != "cut":
        raise ValueError(f"cut_sum needs a cut envelope, got {env.form}")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    zs = _as_zeroset(zeros)
    s, s1, s2 = cut_exponents(env.a, env.b, env.r_signed,
                              [c for _, c in env.c_points], [d for _, d in env.d_points], eps)
    rows = []
    for entry in zs:
        z = entry.location
        d_ray = dist_to_positive_ray(z)
        if d_ray == 0.0:
            raise SumEvaluationError(f"zero {z} lies on the cut [0, inf)")
        term = d_ray ** (env.a + 1.0 + eps) * abs(z) ** s1 / (1.0 + abs(z)) ** s2
        term *= _pow_ratio(z, [(x, plus_part(d - 1.0 + eps)) for x, d in env.d_points], "T'")
        term /= _pow_ratio(z, [(x, min(env.a, c)) for x, c in env.c_points], "T")
        rows.append(TermRow(z, entry.multiplicity, entry.multiplicity * term))
    return _make_report(rows, eps, {
        "a": env.a, "b": env.b, "r_signed": env.r_signed, "eps": eps,
        "s": s, "s1": s1, "s2": s2,
        "c_exponents": [min(env.a, c) for _, c in env.c_points],
        "d_exponents": [plus_part(d - 1.0 + eps) for _, d in env.d_points],
    })


# -- dyadic diagnostics ----------------------------------------------------------

def beta_level(k: int) -> float:
    """beta_k = arcsin(2^-k) / arccos(2^-k); satisfies 2/pi <= 2^k beta_k <= 3/2."""
    if k < 1:
        raise ValueError("level index starts at 1")
    x = 2.0 ** (-k)
    return math.asin(x) / math.acos(x)


def dyadic_k0(eps: float) -> int:
    """The level k0 with 2^(-k0-1) <= eps < 2^(-k0)."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    k0 = math.floor(-math.log2(eps))
    if not eps < 2.0 ** (-k0):
        k0 -= 1
    return k0


@dataclass(frozen=True)
class LevelRow:
    k: int
    count: int
    level_sum: float
    beta_next: float


@dataclass(frozen=True)
class DyadicProfile:
    rows: tuple[LevelRow, ...]
    near_count: int
    far_count: int
    k0: int | None

    def to_csv_rows(self) -> list[list]:
        return [[r.k, r.count, r.level_sum, r.beta_next] for r in self.rows]

    CSV_COLUMNS = ("k", "count", "level_sum", "beta_next")


def dyadic_profile(zeros, zeta0: complex = 1.0, eps: float | None = None,
                   max_level: int = 30) -> DyadicProfile:
    """Per-level table of the dyadic Stolz exhaustion around a vertex.

    Zeros split at |z - zeta0| = 1/16 into near and far parts; the near
    part is layered by the angles of aperture 2^k, and each new layer
    contributes sum of (1-|z|) |z-zeta0|^beta_(k+1), the weight the layer
    bound actually carries.
    """
    zeta0 = complex(zeta0)
    zs = _as_zeroset(zeros)
    _require_in_disk(zs)
    near = [e for e in zs if abs(e.location - zeta0) < 1.0 / 16.0]
    far_count = sum(e.multiplicity for e in zs) - sum(e.multiplicity for e in near)
    rows = []
    assigned: set[int] = set()
    remaining = {i for i in range(len(near))}
    for k in range(1, max_level + 1):
        angle = StolzAngle(zeta0, 2.0**k)
        new = [i for i in remaining if stolz_contains(near[i].location, angle)]
        beta_next = beta_level(k + 1)
        level = tree_sum(
            near[i].multiplicity * (1.0 - abs(near[i].location))
            * abs(near[i].location - zeta0) ** beta_next
            for i in sorted(new)
        )
        rows.append(LevelRow(k, sum(near[i].multiplicity for i in new), level, beta_next))
        assigned |= set(new)
        remaining -= set(new)
        if not remaining:
            break
    return DyadicProfile(
        rows=tuple(rows),
        near_count=sum(e.multiplicity for e in near),
        far_count=far_count,
        k0=None if eps is None else dyadic_k0(eps),
    )


# -- growth-constant estimation ---------------------------------------------------

@dataclass(frozen=True)
class KhatGrid:
    """Polar evaluation grid: radii 1 - 2^-j plus the origin, uniform angles."""

    n_radial: int = 12
    n_angle: int = 512
    include_origin: bool = True
    puncture: float = 1e-6

    def disk_points(self) -> np.ndarray:
        radii = [1.0 - 2.0 ** (-j) for j in range(1, self.n_radial + 1)]
        if self.include_origin:
            radii = [0.0] + radii
        angles = 2.0 * math.pi * np.arange(self.n_angle) / self.n_angle
        pts = (np.array(radii)[:, None] * np.exp(1j * angles)[None, :]).ravel()
        return pts


def _khat_weights(env: EnvelopeSpec, pts: np.ndarray) -> np.ndarray:
    """The envelope reciprocal evaluated on grid points of the right domain."""
    if env.form == "disk_points":
        w = (1.0 - np.abs(pts)) ** env.p
        if env.f_points:
            for xi, qk in zip(env.f_points.points, env.f_points.exponents):
                w = w * np.abs(pts - xi) ** qk
        if env.e_points:
            for ze, rj in zip(env.e_points.points, env.e_points.exponents):
                w = w / np.abs(pts - ze) ** rj
        if env.gamma > 0.0:
            with np.errstate(divide="ignore"):
                w = w / np.abs(pts) ** env.gamma
        return w
    if env.form == "disk_closed":
        w = (1.0 - np.abs(pts)) ** env.p
        df = np.array([env.f_closed.chordal_distance(complex(z)) for z in pts])
        w = w * df**env.q
        if env.e_points is not None and len(env.e_points):
            de = np.min(np.abs(pts[:, None] - np.array(env.e_points.points)[None, :]), axis=1)
            w = w / de**env.r
        return w
    if env.form == "halfplane":
        w = np.imag(pts) ** env.a / (1.0 + np.abs(pts)) ** (2.0 * env.b)
        for x, d in env.d_points:
            w = w * np.abs(pts - x) ** d
        for x, c in env.c_points:
            w = w / np.abs(pts - x) ** c
        return w
    # cut
    dist = np.array([dist_to_positive_ray(complex(z)) for z in pts])
    with np.errstate(divide="ignore"):
        w = np.abs(pts) ** env.r_signed * dist**env.a / (1.0 + np.abs(pts)) ** env.b
    for x, d in env.d_points:
        w = w * np.abs(pts - x) ** d
    for x, c in env.c_points:
        w = w / np.abs(pts - x) ** c
    return w


def _grid_for(env: EnvelopeSpec, f: AnalyticFn, grid: KhatGrid) -> np.ndarray:
    pts = grid.disk_points()
    if env.domain == "halfplane":
        keep = np.abs(pts - 1.0) > 1e-12
        pts = 1j * (1.0 + pts[keep]) / (1.0 - pts[keep])
    elif env.domain == "cut":
        keep = np.abs(pts - 1.0) > 1e-12
        w = 1j * (1.0 + pts[keep]) / (1.0 - pts[keep])
        pts = w * w
    singular = list(f.singular_points)
    if env.form == "disk_points":
        singular += list(env.e_points.points if env.e_points else [])
        singular += list(env.f_points.points if env.f_points else [])
    elif env.form == "disk_closed":
        singular += list(env.e_points.points if env.e_points else [])
    else:
        singular += [complex(x) for x, _ in env.c_points + env.d_points]
    for s in singular:
        pts = pts[np.abs(pts - s) > grid.puncture]
    return pts


def estimate_growth_constant(f: AnalyticFn, env: EnvelopeSpec, grid: KhatGrid | None = None) -> float:
    """Empirical growth constant: sup over the grid of log+|f| over the envelope.

    Non-decreasing under grid refinement (the refined grids are nested).
    Raises on a non-finite product at any grid point.
    """
    if f.domain_tag != env.domain:
        raise ValueError(f"domain mismatch: function on {f.domain_tag}, envelope on {env.domain}")
    grid = grid or KhatGrid()
    pts = _grid_for(env, f, grid)
    logs = np.asarray(f.log_abs(pts), dtype=float)
    weights = _khat_weights(env, pts)
    pos = logs > 0.0
    vals = np.zeros_like(logs)
    vals[pos] = logs[pos] * weights[pos]
    if not np.all(np.isfinite(vals)):
        bad = pts[~np.isfinite(vals)][:3]
        raise SumEvaluationError(f"non-finite envelope product at grid points {bad}")
    return float(vals.max(initial=0.0))


# -- verification ------------------------------------------------------------------

_SUM_KINDS = {"disk_points", "origin_factor", "closed_set", "two_region",
              "collapsed", "halfplane", "cut"}


def evaluate_sum(kind: str, zeros, env: EnvelopeSpec, eps: float, extra: dict | None = None) -> SumReport:
    """Dispatch a named sum kind; `extra` carries kind-specific parameters."""
    extra = extra or {}
    if kind == "disk_points":
        return disk_sum(zeros, env, eps, p0_sharp=extra.get("p0_sharp", False))
    if kind == "origin_factor":
        return origin_factor_sum(zeros, env, eps, gamma=extra.get("gamma"))
    if kind == "closed_set":
        return closed_set_sum(zeros, env, eps)
    if kind == "two_region":
        return two_region_sum(zeros, extra["p"], extra["r"], eps, vertex=extra.get("vertex", 1.0))
    if kind == "collapsed":
        return collapsed_sum(zeros, extra["p"], extra["r"], eps, vertex=extra.get("vertex", 1.0))
    if kind == "halfplane":
        return halfplane_sum(zeros, env, eps)
    if kind == "cut":
        return cut_sum(zeros, env, eps)
    raise ValueError(f"unknown sum kind {kind!r}; choose from {sorted(_SUM_KINDS)}")


@dataclass(frozen=True)
class VerifyEntry:
    n: int
    epsilon: float
    total: float
    k_hat: float | None
    ratio: float | None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProbeReport:
    totals: tuple[tuple[int, float], ...]
    growth_exponent: float | None


@dataclass(frozen=True)
class VerificationReport:
    kind: str
    entries: tuple[VerifyEntry, ...]
    supported: bool
    ratio_bound: float
    probe: ProbeReport | None = None

    def ratios(self, eps: float) -> list[float]:
        return [e.ratio for e in self.entries if e.epsilon == eps and e.ratio is not None]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "supported": self.supported,
            "ratio_bound": self.ratio_bound,
            "entries": [
                {
                    "n": e.n,
                    "epsilon": e.epsilon,
                    "total": e.total,
                    "k_hat": e.k_hat,
                    "ratio": ("inf" if e.ratio is not None and math.isinf(e.ratio) else e.ratio),
                    "flags": list(e.flags),
                }
                for e in self.entries
            ],
            "probe": (
                None
                if self.probe is None
                else {
                    "totals": [[n, t] for n, t in self.probe.totals],
                    "growth_exponent": self.probe.growth_exponent,
                }
            ),
        }


def verify_bound(instances, env: EnvelopeSpec, eps_ladder, kind: str = "disk_points",
                 khat_grid: KhatGrid | None = None, ratio_bound: float = 10.0,
                 probe_eps0: bool = False, **extra) -> VerificationReport:
    """Evaluate sum/constant ratios across a family of truncations.

    `instances` is a sequence of (n, AnalyticFn or ZeroSet).  For function
    instances the growth constant is estimated on the grid and the ratio
    reported; a zero constant with a positive sum is flagged and the
    classical boundary-mean baseline -log|f(0)| substituted.  The family
    is "supported" if, for every epsilon, the finite ratios across n stay
    within `ratio_bound` (max/min).
    """
    eps_ladder = [float(e) for e in eps_ladder]
    if any(e <= 0.0 for e in eps_ladder):
        raise ValueError("the epsilon ladder must be positive; use probe_eps0 for the boundary case")
    entries: list[VerifyEntry] = []
    totals_by_eps: dict[float, list[float]] = {e: [] for e in eps_ladder}
    for n, inst in instances:
        if isinstance(inst, AnalyticFn):
            if inst.known_zeros is None:
                raise ValueError("function instances need known zeros")
            zeros = inst.known_zeros
            fn = inst
        else:
            zeros = _as_zeroset(inst)
            fn = None
        for eps in eps_ladder:
            report = evaluate_sum(kind, zeros, env, eps, extra)
            flags: list[str] = []
            k_hat = None
            if fn is not None:
                k_hat = estimate_growth_constant(fn, env, khat_grid)
                if k_hat == 0.0 and report.total > 0.0:
                    baseline = -fn.log_abs(fn.base_point)
                    flags.append("vacuous-growth-constant:jensen-baseline")
                    k_hat = float(baseline)
            report = report.with_k_hat(k_hat) if k_hat is not None else report
            entries.append(VerifyEntry(int(n), eps, report.total, report.k_hat,
                                       report.ratio, tuple(flags)))
            totals_by_eps[eps].append(report.ratio if report.ratio is not None else math.nan)
    supported = True
    for eps, ratios in totals_by_eps.items():
        finite = [x for x in ratios if x is not None and math.isfinite(x) and x > 0.0]
        if len(finite) >= 2 and max(finite) / min(finite) >= ratio_bound:
            supported = False
    probe = None
    if probe_eps0:
        if kind in ("halfplane", "cut"):
            raise ValueError("the boundary-case probe is defined for disk kinds only")
        tiny = 1e-12  # stand-in for the excluded endpoint
        totals = []
        for n, inst in instances:
            zeros = inst.known_zeros if isinstance(inst, AnalyticFn) else _as_zeroset(inst)
            totals.append((int(n), evaluate_sum(kind, zeros, env, tiny, extra).total))
        slope = None
        if len(totals) >= 3:
            ns = np.log([max(n, 1) for n, _ in totals])
            ts = np.array([t for _, t in totals])
            if np.all(ts > 0.0):
                slope = float(np.polyfit(ns, np.log(ts), 1)[0])
        probe = ProbeReport(tuple(totals), slope)
    return VerificationReport(kind=kind, entries=tuple(entries), supported=supported,
                              ratio_bound=ratio_bound, probe=probe)
