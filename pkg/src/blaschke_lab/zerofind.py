"""Test-function builders and certified zero localization.

Builders produce `AnalyticFn` values: Blaschke products with a known zero
multiset, zero-free envelope exponentials with closed-form log-modulus,
and pointwise products of both.  Evaluators are array-in/array-out.

Localization runs the argument principle over an adaptive quadrisection
of a rectangle: cells with winding zero are dropped, winding-one cells
are polished by Newton from the cell center and re-certified on a small
circle, and higher windings subdivide until the cell diameter drops
below the requested tolerance.  Split lines that hit a zero are jittered
and the subdivision retried, so reported multiplicities always agree
with a verified winding number.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .conformal import cayley_to_halfplane

__all__ = [
    "AnalyticFn",
    "ZeroRecord",
    "ZeroSet",
    "Box",
    "CircleContour",
    "ZeroOnContourError",
    "UnresolvedWindingError",
    "UnresolvedCellsError",
    "blaschke_product",
    "envelope_exponential",
    "product",
    "pullback_to_halfplane",
    "winding_number",
    "locate_zeros",
    "jensen_residual",
]

# Subdivision gives up on cells whose winding exceeds this; quadrature
# reliability degrades for very high multiplicities.
MULTIPLICITY_CAP = 8
_MAX_CONTOUR_POINTS = 65536
_ZERO_NEAR_FACTOR = 1e-13


class ZeroOnContourError(RuntimeError):
    """A function value on the contour is too small to trust the winding."""


class UnresolvedWindingError(RuntimeError):
    """Contour quadrature did not settle on an integer within the point cap."""


class UnresolvedCellsError(RuntimeError):
    """Subdivision ended with unresolved cells; partial results attached."""

    def __init__(self, found: "ZeroSet", cells: list):
        super().__init__(f"{len(cells)} unresolved cell(s); {len(found.entries)} zero(s) located")
        self.found = found
        self.cells = cells


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    multiplicity: int
    radius: float

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")
        if self.radius < 0.0:
            raise ValueError("radius must be nonnegative")


@dataclass(frozen=True)
class ZeroSet:
    """Located zeros with multiplicities and certified error radii."""

    entries: tuple[ZeroRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def from_points(cls, points, radius: float = 0.0) -> "ZeroSet":
        counts = Counter(complex(p) for p in points)
        return cls(tuple(ZeroRecord(p, m, radius) for p, m in counts.items()))

    def points(self, with_multiplicity: bool = True) -> list[complex]:
        if with_multiplicity:
            return [e.location for e in self.entries for _ in range(e.multiplicity)]
        return [e.location for e in self.entries]

    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def sorted(self) -> "ZeroSet":
        key = lambda e: (e.location.real, e.location.imag, e.multiplicity)
        return ZeroSet(tuple(sorted(self.entries, key=key)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _maybe_scalar(values, scalar_input: bool):
    return complex(values[()]) if scalar_input and values.ndim == 0 else values


@dataclass(frozen=True)
class AnalyticFn:
    """An evaluatable analytic function on one of the three domains.

    `evaluator` and `derivative` take numpy complex arrays (or scalars)
    and return matching shapes.  `log_modulus`, when present, is an exact
    closed form for log|f| and is preferred over log(abs(f)) wherever
    overflow is possible.  `known_zeros` marks oracle families whose zero
    multiset is known by construction.
    """

    evaluator: object
    derivative: object | None = None
    known_zeros: ZeroSet | None = None
    domain_tag: str = "disk"
    log_modulus: object | None = None
    singular_points: tuple[complex, ...] = ()

    def __post_init__(self):
        if self.domain_tag not in ("disk", "halfplane", "cut"):
            raise ValueError(f"unknown domain tag {self.domain_tag!r}")

    def __call__(self, z):
        scalar = np.isscalar(z) or isinstance(z, complex)
        out = np.asarray(self.evaluator(np.asarray(z, dtype=complex)))
        return _maybe_scalar(out, scalar)

    def deriv(self, z):
        if self.derivative is None:
            raise ValueError("no derivative available")
        scalar = np.isscalar(z) or isinstance(z, complex)
        out = np.asarray(self.derivative(np.asarray(z, dtype=complex)))
        return _maybe_scalar(out, scalar)

    def log_abs(self, z):
        scalar = np.isscalar(z) or isinstance(z, complex)
        za = np.asarray(z, dtype=complex)
        if self.log_modulus is not None:
            out = np.asarray(self.log_modulus(za))
        else:
            with np.errstate(divide="ignore"):
                out = np.log(np.abs(np.asarray(self.evaluator(za))))
        if scalar and out.ndim == 0:
            return float(out[()])
        return out

    @property
    def base_point(self) -> complex:
        return {"disk": 0.0 + 0.0j, "halfplane": 1j, "cut": -1.0 + 0.0j}[self.domain_tag]

    def normalized(self) -> "AnalyticFn":
        """Divide by |f| at the domain base point so the modulus there is 1."""
        scale = math.exp(self.log_abs(self.base_point))
        if scale == 0.0 or not math.isfinite(scale):
            raise ValueError("cannot normalize: |f| at the base point is zero or non-finite")
        ev, dv, lm = self.evaluator, self.derivative, self.log_modulus
        log_scale = math.log(scale)
        return replace(
            self,
            evaluator=lambda z: ev(z) / scale,
            derivative=(None if dv is None else (lambda z: dv(z) / scale)),
            log_modulus=(
                (lambda z: lm(z) - log_scale)
                if lm is not None
                else (lambda z, _ev=ev: _log_abs_raw(_ev, z) - log_scale)
            ),
        )


def _log_abs_raw(ev, z):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(np.asarray(ev(np.asarray(z, dtype=complex)))))


# -- builders -----------------------------------------------------------------

def blaschke_product(zeros) -> AnalyticFn:
    """Product of disk automorphism factors vanishing at the given points.

    Each factor is (|a|/a)(a-z)/(1 - conj(a) z), or z when a = 0, so the
    modulus is below 1 on the disk and |f(0)| is the product of |a_k|.
    Repeated points become multiplicities in `known_zeros`.
    """
    zs = [complex(a) for a in zeros]
    for a in zs:
        if abs(a) >= 1.0:
            raise ValueError(f"Blaschke zero {a} is not inside the open unit disk")
    zs_arr = np.array(zs, dtype=complex)

    def factors(z: np.ndarray) -> np.ndarray:
        # shape (n_zeros, *z.shape)
        out = np.empty((len(zs_arr),) + z.shape, dtype=complex)
        for k, a in enumerate(zs_arr):
            if a == 0.0:
                out[k] = z
            else:
                out[k] = (abs(a) / a) * (a - z) / (1.0 - a.conjugate() * z)
        return out

    def factor_derivs(z: np.ndarray) -> np.ndarray:
        out = np.empty((len(zs_arr),) + z.shape, dtype=complex)
        for k, a in enumerate(zs_arr):
            if a == 0.0:
                out[k] = np.ones_like(z)
            else:
                out[k] = (abs(a) / a) * (abs(a) ** 2 - 1.0) / (1.0 - a.conjugate() * z) ** 2
        return out

    def ev(z: np.ndarray) -> np.ndarray:
        if len(zs_arr) == 0:
            return np.ones_like(z)
        return factors(z).prod(axis=0)

    def dv(z: np.ndarray) -> np.ndarray:
        if len(zs_arr) == 0:
            return np.zeros_like(z)
        b = factors(z)
        db = factor_derivs(z)
        n = len(zs_arr)
        prefix = np.ones_like(b)
        suffix = np.ones_like(b)
        for k in range(1, n):
            prefix[k] = prefix[k - 1] * b[k - 1]
        for k in range(n - 2, -1, -1):
            suffix[k] = suffix[k + 1] * b[k + 1]
        return (db * prefix * suffix).sum(axis=0)

    def log_mod(z: np.ndarray) -> np.ndarray:
        if len(zs_arr) == 0:
            return np.zeros(z.shape, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(factors(z))).sum(axis=0)

    return AnalyticFn(
        evaluator=ev,
        derivative=dv,
        known_zeros=ZeroSet.from_points(zs),
        domain_tag="disk",
        log_modulus=log_mod,
    )


def envelope_exponential(kind: str, c: float = 1.0, m: float = 1.0,
                         zeta0: complex = 1.0, xi0: complex = -1.0,
                         r: float = 0.0, q: float = 0.0) -> AnalyticFn:
    """Zero-free exponentials realizing the growth envelopes.

    Kinds:
      * "cayley":            exp(c (1+z)/(1-z)); log|f| = c (1-|z|^2)/|1-z|^2.
      * "reciprocal_power":  exp(c / (1-z)^m), m > 0, principal power.
      * "point_ratio":       exp(c u^r / v^q) with u = 1 - z conj(zeta0),
                             v = 1 - z conj(xi0).  |u| = |z - zeta0| and u, v
                             have positive real part on the disk, so the
                             principal powers are analytic there.
    """
    c = float(c)
    if kind == "cayley":
        def g(z):
            return c * (1.0 + z) / (1.0 - z)

        def gprime(z):
            return 2.0 * c / (1.0 - z) ** 2

        singular = (1.0 + 0.0j,)
    elif kind == "reciprocal_power":
        if m <= 0.0:
            raise ValueError(f"m must be positive, got {m}")

        def g(z):
            return c * (1.0 - z) ** (-m)

        def gprime(z):
            return c * m * (1.0 - z) ** (-m - 1.0)

        singular = (1.0 + 0.0j,)
    elif kind == "point_ratio":
        zeta0 = complex(zeta0)
        xi0 = complex(xi0)
        for p in (zeta0, xi0):
            if abs(abs(p) - 1.0) > 1e-12:
                raise ValueError(f"envelope point {p} is off the unit circle")
        if zeta0 == xi0:
            raise ValueError("envelope points must be distinct")
        if r < 0.0 or q < 0.0:
            raise ValueError("exponents must be nonnegative")
        zc, xc = zeta0.conjugate(), xi0.conjugate()

        def g(z):
            return c * (1.0 - z * zc) ** r * (1.0 - z * xc) ** (-q)

        def gprime(z):
            u = 1.0 - z * zc
            v = 1.0 - z * xc
            return c * (-zc * r * u ** (r - 1.0) * v ** (-q) + xc * q * u**r * v ** (-q - 1.0))

        singular = (xi0,) if q > 0.0 else ()
    else:
        raise ValueError(f"unknown envelope kind {kind!r}")

    def ev(z):
        return np.exp(g(z))

    def dv(z):
        return np.exp(g(z)) * gprime(z)

    def log_mod(z):
        return np.real(g(z))

    return AnalyticFn(
        evaluator=ev,
        derivative=dv,
        known_zeros=ZeroSet(),
        domain_tag="disk",
        log_modulus=log_mod,
        singular_points=singular,
    )


def product(f: AnalyticFn, g: AnalyticFn) -> AnalyticFn:
    """Pointwise product; known zero multisets merge when both are known."""
    if f.domain_tag != g.domain_tag:
        raise ValueError(f"domain mismatch: {f.domain_tag} vs {g.domain_tag}")
    fe, ge = f.evaluator, g.evaluator
    deriv = None
    if f.derivative is not None and g.derivative is not None:
        fd, gd = f.derivative, g.derivative
        deriv = lambda z: fd(z) * ge(z) + fe(z) * gd(z)
    zeros = None
    if f.known_zeros is not None and g.known_zeros is not None:
        mults: Counter = Counter()
        radius = 0.0
        for e in list(f.known_zeros) + list(g.known_zeros):
            mults[e.location] += e.multiplicity
            radius = max(radius, e.radius)
        zeros = ZeroSet(tuple(ZeroRecord(p, m, radius) for p, m in mults.items()))
    return AnalyticFn(
        evaluator=lambda z: fe(z) * ge(z),
        derivative=deriv,
        known_zeros=zeros,
        domain_tag=f.domain_tag,
        log_modulus=lambda z: f.log_abs(z) + g.log_abs(z),
        singular_points=tuple(set(f.singular_points) | set(g.singular_points)),
    )


def pullback_to_halfplane(f: AnalyticFn) -> AnalyticFn:
    """g(w) = f((w - i)/(w + i)) on the upper half-plane, zeros transported."""
    if f.domain_tag != "disk":
        raise ValueError("pullback expects a disk function")
    fe = f.evaluator

    def to_disk(w):
        return (w - 1j) / (w + 1j)

    deriv = None
    if f.derivative is not None:
        fd = f.derivative
        deriv = lambda w: fd(to_disk(w)) * (2j / (w + 1j) ** 2)
    zeros = None
    if f.known_zeros is not None:
        zeros = ZeroSet(tuple(
            ZeroRecord(cayley_to_halfplane(e.location), e.multiplicity, e.radius)
            for e in f.known_zeros
        ))
    log_mod = None
    if f.log_modulus is not None:
        flm = f.log_modulus
        log_mod = lambda w: flm(to_disk(w))
    return AnalyticFn(
        evaluator=lambda w: fe(to_disk(w)),
        derivative=deriv,
        known_zeros=zeros,
        domain_tag="halfplane",
        log_modulus=log_mod,
    )


# -- contours and the argument principle --------------------------------------

@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")

    @property
    def scale(self) -> float:
        return 2.0 * self.radius

    def sample(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Closed-loop nodes and dz/dt weights for t_k = k/n."""
        t = np.arange(n) / n
        e = np.exp(2j * math.pi * t)
        return self.center + self.radius * e, 2j * math.pi * self.radius * e


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle [x0, x1] x [y0, y1] used as cell and contour."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("degenerate box")

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    @property
    def diameter(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def scale(self) -> float:
        return self.diameter

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.x0 - pad <= z.real <= self.x1 + pad) and (self.y0 - pad <= z.imag <= self.y1 + pad)

    def corners(self) -> list[complex]:
        return [
            complex(self.x0, self.y0),
            complex(self.x1, self.y0),
            complex(self.x1, self.y1),
            complex(self.x0, self.y1),
        ]

    def sample(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and dz/dt weights along the four edges, counterclockwise."""
        per_edge = max(n // 4, 8)
        cs = self.corners()
        zs = []
        ws = []
        for k in range(4):
            a, b = cs[k], cs[(k + 1) % 4]
            t = np.arange(per_edge) / per_edge
            zs.append(a + (b - a) * t)
            ws.append(np.full(per_edge, (b - a) * 4.0))  # dz/dt with t spanning 1/4
        return np.concatenate(zs), np.concatenate(ws)

    def split(self, shift_x: float = 0.0, shift_y: float = 0.0) -> list["Box"]:
        cx = 0.5 * (self.x0 + self.x1) + shift_x
        cy = 0.5 * (self.y0 + self.y1) + shift_y
        return [
            Box(self.x0, cx, self.y0, cy),
            Box(cx, self.x1, self.y0, cy),
            Box(self.x0, cx, cy, self.y1),
            Box(cx, self.x1, cy, self.y1),
        ]


def _winding_once(f: AnalyticFn, contour, n: int) -> int:
    zs, dz = contour.sample(n)
    vals = f(zs)
    min_abs = float(np.min(np.abs(vals)))
    if min_abs < _ZERO_NEAR_FACTOR * contour.scale:
        raise ZeroOnContourError(f"min |f| = {min_abs:.3e} on the contour; subdivide or move it")
    if f.derivative is not None:
        integrand = f.deriv(zs) / vals * dz
        value = complex(integrand.mean() / (2j * math.pi))
        nearest = round(value.real)
        residual = abs(value - nearest)
        if residual > 0.25:
            raise UnresolvedWindingError(f"quadrature residual {residual:.3f} with n={n}")
        return int(nearest)
    # Phase-increment fallback: exact integer once steps are resolved.
    rolled = np.roll(vals, -1)
    steps = np.angle(rolled / vals)
    if float(np.max(np.abs(steps))) > 0.5 * math.pi:
        raise UnresolvedWindingError(f"phase step too large with n={n}")
    return int(round(float(steps.sum()) / (2.0 * math.pi)))


def winding_number(f: AnalyticFn, contour, n_points: int = 256) -> int:
    """Argument-principle zero count inside the contour, multiplicity included.

    The node count doubles on unresolved quadrature until the cap; a zero
    sitting on (or numerically too close to) the contour raises
    ZeroOnContourError so the caller can move the contour.
    """
    n = max(int(n_points), 16)
    while True:
        try:
            return _winding_once(f, contour, n)
        except UnresolvedWindingError:
            if n >= _MAX_CONTOUR_POINTS:
                raise
            n *= 2


# -- adaptive localization -----------------------------------------------------

_JITTER_STEPS = (0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 5.0)


def locate_zeros(f: AnalyticFn, region, tol: float = 1e-8, max_depth: int = 60,
                 n_points: int = 256) -> ZeroSet:
    """Locate every zero of f inside `region` with certified multiplicities.

    `region` is a Box or an (x0, x1, y0, y1) tuple lying compactly inside
    the analyticity domain.  Winding-one cells are polished by Newton when
    a derivative is available and re-certified on a circle of radius tol/2;
    multiple zeros subdivide until the cell diameter is below tol.  Raises
    UnresolvedCellsError (carrying partial results) if cells remain
    unresolved at max_depth or exceed the multiplicity cap.
    """
    box = region if isinstance(region, Box) else Box(*region)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    entries: list[ZeroRecord] = []
    unresolved: list[tuple[Box, int | None]] = []

    root_w = None
    root = box
    for k in range(4):
        try:
            root_w = winding_number(f, root, n_points)
            break
        except ZeroOnContourError:
            pad = tol / 16.0 * (k + 1)
            root = Box(box.x0 - pad, box.x1 + pad, box.y0 - pad, box.y1 + pad)
    if root_w is None:
        raise ZeroOnContourError("region boundary keeps hitting a zero; enlarge the region")

    stack: list[tuple[Box, int, int]] = [(root, root_w, 0)]
    while stack:
        cell, w, depth = stack.pop()
        if w == 0:
            continue
        if w == 1 and f.derivative is not None:
            polished = _newton_polish(f, cell, tol)
            if polished is not None:
                entries.append(polished)
                continue
        if cell.diameter < tol:
            if w <= MULTIPLICITY_CAP:
                entries.append(ZeroRecord(cell.center, w, 0.5 * cell.diameter))
            else:
                unresolved.append((cell, w))
            continue
        if depth >= max_depth:
            unresolved.append((cell, w))
            continue
        split = _split_consistent(f, cell, w, tol, n_points)
        if split is None:
            unresolved.append((cell, w))
            continue
        for child, cw in split:
            stack.append((child, cw, depth + 1))

    found = ZeroSet(tuple(entries)).sorted()
    if unresolved:
        raise UnresolvedCellsError(found, unresolved)
    return found


def _split_consistent(f: AnalyticFn, cell: Box, parent_w: int, tol: float,
                      n_points: int):
    """Quadrisect with jittered cross lines until child windings add up.

    The jitter unit scales with the cell (floor tol/16) so a zero sitting
    exactly on a split line is cleared by a resolvable margin.
    """
    side = min(cell.x1 - cell.x0, cell.y1 - cell.y0)
    unit = max(tol / 16.0, side / 64.0)
    for j in _JITTER_STEPS:
        try:
            children = cell.split(shift_x=j * unit, shift_y=j * unit)
        except ValueError:
            continue
        try:
            ws = [winding_number(f, c, n_points) for c in children]
        except (ZeroOnContourError, UnresolvedWindingError):
            continue
        if sum(ws) == parent_w:
            return list(zip(children, ws))
    return None


def _newton_polish(f: AnalyticFn, cell: Box, tol: float) -> ZeroRecord | None:
    """Newton from the cell center; certify on a small circle.  None on failure."""
    z = cell.center
    fz = f(z)
    for _ in range(60):
        d = f.deriv(z)
        if d == 0.0:
            return None
        step = fz / d
        for _halve in range(30):
            znew = z - step
            fnew = f(znew)
            if abs(fnew) <= abs(fz) or abs(step) < tol * 1e-6:
                break
            step *= 0.5
        z, fz = znew, fnew
        if abs(step) < tol * 1e-3:
            break
    else:
        return None
    if not cell.contains(z, pad=tol):
        return None
    radius = 0.5 * tol
    for _ in range(5):
        try:
            if winding_number(f, CircleContour(z, radius), 128) == 1:
                return ZeroRecord(z, 1, radius)
            return None
        except (ZeroOnContourError, UnresolvedWindingError):
            radius *= 0.7
    return None


# -- consistency with growth ---------------------------------------------------

def jensen_residual(f: AnalyticFn, r: float, n_theta: int) -> float:
    """Boundary mean of log|f| minus log|f(0)| minus the zero-counting sum.

    Uses the function's known zero multiset; a small residual certifies
    that the recorded zeros are consistent with the growth of log|f| on
    the circle of radius r.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    if f.known_zeros is None:
        raise ValueError("known zeros required; build from an oracle family or locate first")
    log_f0 = f.log_abs(0.0 + 0.0j)
    if not math.isfinite(log_f0):
        raise ValueError("normalize first: f vanishes at 0")
    for e in f.known_zeros:
        if abs(abs(e.location) - r) < 1e-12:
            raise ValueError(f"zero {e.location} lies on the integration circle")
    thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    mean = float(np.mean(f.log_abs(r * np.exp(1j * thetas))))
    zsum = sum(
        e.multiplicity * math.log(r / abs(e.location))
        for e in f.known_zeros
        if abs(e.location) < r
    )
    return mean - log_f0 - zsum
