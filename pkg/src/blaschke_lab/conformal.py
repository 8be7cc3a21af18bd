"""Explicit conformal maps and numerical certification of distortion bounds.

Covers the Stolz angle -> disk map with its closed-form derivative, its
numerical inverse (grid-seeded Newton), boundary-distance queries against
the parametrized Stolz boundary curve, the Cayley maps between disk and
upper half-plane, the square-root map from the cut plane, and the
elementary two-sided comparison inequalities these transfers rely on.

Conventions: the Stolz angle with aperture A > 1 and vertex zeta_0 on the
unit circle is { |z - zeta_0| / (1 - |z|) < A }.  Its half-opening angle
is omega = arccos(1/A) and the distortion exponent is
alpha = pi / (2 * omega) > 1.  A vertex other than 1 is handled by
pre-rotation, so all cached geometry is stored for vertex 1.

Branch discipline: principal square roots and principal powers
throughout.  The disk map is built from the symmetric pair
a = (1 + sqrt(z))^alpha, b = (1 - sqrt(z))^alpha; every formula below is
invariant under swapping a and b, so the choice of square-root sign does
not affect values.  `calibrate_branch_sign` verifies this numerically on
a reference grid and fixes the '+' assignment.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "StolzAngle",
    "MapSample",
    "Sandwich",
    "HalfplaneComparisons",
    "PommerenkeReport",
    "OutsideDomainError",
    "NonConvergenceError",
    "stolz_params",
    "stolz_contains",
    "stolz_boundary_radius",
    "stolz_to_disk",
    "stolz_to_disk_deriv_abs",
    "stolz_to_disk_deriv",
    "disk_to_stolz",
    "stolz_boundary_distance",
    "cayley_to_halfplane",
    "cayley_to_disk",
    "halfplane_comparisons",
    "cut_to_halfplane",
    "cut_distance_sandwich",
    "pommerenke_check",
    "calibrate_branch_sign",
]


class OutsideDomainError(ValueError):
    """Input point lies outside the map's domain."""


class NonConvergenceError(RuntimeError):
    """Iteration failed to converge; carries the best residual seen."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual


def stolz_params(aperture: float) -> tuple[float, float]:
    """Half-angle omega = arccos(1/A) and exponent alpha = pi/(2*omega)."""
    if aperture <= 1.0:
        raise ValueError(f"aperture must exceed 1, got {aperture}")
    omega = math.acos(1.0 / aperture)
    return omega, math.pi / (2.0 * omega)


@dataclass(frozen=True)
class StolzAngle:
    """Approach region with a vertex on the circle and aperture > 1."""

    vertex: complex = 1.0 + 0.0j
    aperture: float = 2.0

    def __post_init__(self):
        v = complex(self.vertex)
        if abs(abs(v) - 1.0) > 1e-12:
            raise ValueError(f"vertex {v} is off the unit circle")
        object.__setattr__(self, "vertex", v)
        if self.aperture <= 1.0:
            raise ValueError(f"aperture must exceed 1, got {self.aperture}")

    @property
    def half_angle(self) -> float:
        return stolz_params(self.aperture)[0]

    @property
    def exponent(self) -> float:
        return stolz_params(self.aperture)[1]

    @cached_property
    def _boundary(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense boundary sampling for vertex 1: (angles, curve points)."""
        thetas = np.linspace(-math.pi, math.pi, 4097)[:-1]
        return thetas, stolz_boundary_radius(self.aperture, thetas) * np.exp(1j * thetas)


def stolz_contains(z: complex, angle: StolzAngle) -> bool:
    """Strict membership |z - vertex| / (1 - |z|) < A; requires |z| < 1."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"point {z} is not inside the unit disk")
    return abs(z - angle.vertex) < angle.aperture * (1.0 - abs(z))


def stolz_boundary_radius(aperture: float, theta):
    """Polar radius rho(theta) of the Stolz boundary curve, vertex 1.

    Solves |rho e^{i theta} - 1| = A (1 - rho) for the root inside the
    disk; the two quadratic roots multiply to 1, so the smaller one is
    taken.  rho(0) = 1 is the vertex.
    """
    a2 = aperture * aperture
    g = a2 - np.cos(theta)
    disc = np.sqrt(np.maximum(g * g - (a2 - 1.0) ** 2, 0.0))
    return (g - disc) / (a2 - 1.0)


# -- Stolz angle -> disk map -------------------------------------------------

_BRANCH_SIGN: int | None = None


def calibrate_branch_sign(aperture: float = 2.0) -> int:
    """Pick the square-root sign assignment in the disk map.

    Both assignments agree identically (the map is symmetric under
    swapping the two power terms); this evaluates both on a reference
    grid, checks they match and map into the disk with f(0) = 0, and
    fixes +1.  The result is cached for the process lifetime.
    """
    global _BRANCH_SIGN
    if _BRANCH_SIGN is not None:
        return _BRANCH_SIGN
    ts = np.linspace(0.05, 0.9, 12)
    thetas = np.linspace(-math.pi, math.pi, 17)[:-1]
    rho = stolz_boundary_radius(aperture, thetas)
    zs = (ts[:, None] * (rho * np.exp(1j * thetas))[None, :]).ravel()
    _, alpha = stolz_params(aperture)
    for sign in (+1, -1):
        vals = _phi_raw(zs, alpha, sign)
        if not (np.all(np.abs(vals) < 1.0) and abs(_phi_raw(np.array([0.0 + 0.0j]), alpha, sign)[0]) < 1e-12):
            raise AssertionError(f"branch sign {sign} fails the reference-grid check")
    plus = _phi_raw(zs, alpha, +1)
    minus = _phi_raw(zs, alpha, -1)
    if not np.allclose(plus, minus, rtol=0.0, atol=1e-12):
        raise AssertionError("branch sign assignments disagree on the reference grid")
    _BRANCH_SIGN = +1
    return _BRANCH_SIGN


def _phi_raw(z: np.ndarray, alpha: float, sign: int) -> np.ndarray:
    s = sign * np.sqrt(z + 0.0j)
    apb = (1.0 + s) ** alpha + (1.0 - s) ** alpha
    return 1.0 - 4.0 * (1.0 - z) ** alpha / (apb * apb)


def stolz_to_disk(z: complex, aperture: float, allow_outside: bool = False) -> complex:
    """Conformal map of the Stolz angle (vertex 1) onto the unit disk.

    Normalized so 0 -> 0 and the vertex 1 -> 1.  Outside the angle the
    formula is still evaluated when allow_outside is set (diagnostics);
    otherwise an OutsideDomainError is raised.
    """
    z = complex(z)
    if not allow_outside:
        if abs(z) >= 1.0 or not stolz_contains(z, StolzAngle(1.0, aperture)):
            raise OutsideDomainError(f"{z} is outside the Stolz angle with aperture {aperture}")
    _, alpha = stolz_params(aperture)
    return complex(_phi_raw(np.asarray([z]), alpha, calibrate_branch_sign())[0])


def stolz_to_disk_deriv_abs(z: complex, aperture: float) -> float:
    """|derivative| of the Stolz->disk map: 4a|1-z|^{a-1}/sqrt|z| * |p-q|/|p+q|^3.

    Singular at z = 0 (the limit exists but is out of contract here).
    """
    z = complex(z)
    if z == 0.0:
        raise ValueError("derivative formula is singular at z = 0")
    _, alpha = stolz_params(aperture)
    s = cmath.sqrt(z)
    a = (1.0 + s) ** alpha
    b = (1.0 - s) ** alpha
    return 4.0 * alpha * abs(1.0 - z) ** (alpha - 1.0) / math.sqrt(abs(z)) * abs(a - b) / abs(a + b) ** 3


def stolz_to_disk_deriv(z: complex, aperture: float) -> complex:
    """Complex derivative of the Stolz->disk map, with a series guard at 0.

    d/dz = 4*alpha*(1-z)^{alpha-1} * (a - b) / (sqrt(z) * (a + b)^3) with
    a, b the two power terms; near 0 the ratio (a - b)/sqrt(z) is replaced
    by its expansion 2*alpha + alpha*(alpha-1)*(alpha-2)/3 * z.
    """
    z = complex(z)
    _, alpha = stolz_params(aperture)
    if abs(z) < 1e-10:
        ratio = 2.0 * alpha + alpha * (alpha - 1.0) * (alpha - 2.0) / 3.0 * z
        apb = 2.0 + alpha * (alpha - 1.0) * z  # (1+s)^a + (1-s)^a = 2 + a(a-1) z + O(z^2)
        return 4.0 * alpha * (1.0 - z) ** (alpha - 1.0) * ratio / apb**3
    s = cmath.sqrt(z)
    a = (1.0 + s) ** alpha
    b = (1.0 - s) ** alpha
    return 4.0 * alpha * (1.0 - z) ** (alpha - 1.0) * (a - b) / (s * (a + b) ** 3)


# -- numerical inverse -------------------------------------------------------

_SEED_CACHE: dict[float, tuple[np.ndarray, np.ndarray]] = {}


def _seed_grid(aperture: float) -> tuple[np.ndarray, np.ndarray]:
    grid = _SEED_CACHE.get(aperture)
    if grid is None:
        ts = np.linspace(0.02, 0.995, 64)
        thetas = np.linspace(-math.pi, math.pi, 65)[:-1]
        rho = stolz_boundary_radius(aperture, thetas)
        zs = (ts[:, None] * (rho * np.exp(1j * thetas))[None, :]).ravel()
        zs = np.concatenate([zs, [0.0 + 0.0j]])
        _, alpha = stolz_params(aperture)
        ws = _phi_raw(zs, alpha, calibrate_branch_sign())
        grid = (zs, ws)
        _SEED_CACHE[aperture] = grid
    return grid


def disk_to_stolz(w: complex, aperture: float, tol: float = 1e-12, max_iter: int = 50) -> complex:
    """Inverse of stolz_to_disk: z in the closed angle with map(z) ~ w.

    Newton iteration with the exact complex derivative, seeded from a
    precomputed forward grid.  Raises NonConvergenceError with the best
    residual if max_iter damped steps do not reach tol.
    """
    w = complex(w)
    if abs(w) >= 1.0:
        raise ValueError(f"point {w} is not inside the unit disk")
    if w == 0.0:
        return 0.0 + 0.0j
    zs, ws = _seed_grid(aperture)
    z = complex(zs[int(np.argmin(np.abs(ws - w)))])
    _, alpha = stolz_params(aperture)
    best = math.inf
    for _ in range(max_iter):
        f = complex(_phi_raw(np.asarray([z]), alpha, calibrate_branch_sign())[0]) - w
        res = abs(f)
        best = min(best, res)
        if res < tol:
            return z
        d = stolz_to_disk_deriv(z, aperture)
        if d == 0.0:
            break
        step = f / d
        # Damp: keep the iterate in the disk and do not let the residual grow.
        for _halve in range(25):
            znew = z - step
            if abs(znew) < 1.0:
                fnew = complex(_phi_raw(np.asarray([znew]), alpha, calibrate_branch_sign())[0]) - w
                if abs(fnew) <= res:
                    break
            step *= 0.5
        else:
            break
        z = znew
    raise NonConvergenceError(f"inverse map did not converge for w={w}", best)


def stolz_boundary_distance(z: complex, angle: StolzAngle) -> float:
    """Distance from z (inside the angle) to the boundary curve.

    Dense sampling of the polar boundary parametrization followed by
    golden-section refinement around the best sample.
    """
    z = complex(z)
    if not stolz_contains(z, angle):
        raise OutsideDomainError(f"{z} is outside the Stolz angle")
    zr = z * angle.vertex.conjugate()
    thetas, curve = angle._boundary
    d = np.abs(zr - curve)
    i = int(np.argmin(d))
    lo = thetas[(i - 1) % len(thetas)]
    hi = thetas[(i + 1) % len(thetas)]
    if hi < lo:  # wrapped bracket
        hi += 2.0 * math.pi

    def h(theta: float) -> float:
        return abs(zr - stolz_boundary_radius(angle.aperture, theta) * cmath.exp(1j * theta))

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    dd = a + invphi * (b - a)
    hc, hd = h(c), h(dd)
    for _ in range(80):
        if hc < hd:
            b, dd, hd = dd, c, hc
            c = b - invphi * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, dd, hd
            dd = a + invphi * (b - a)
            hd = h(dd)
    return min(float(d[i]), hc, hd)


# -- Cayley maps and elementary comparisons ----------------------------------

def cayley_to_halfplane(z: complex) -> complex:
    """w = i (1 + z) / (1 - z): unit disk onto the upper half-plane."""
    z = complex(z)
    if z == 1.0:
        raise ValueError("pole: z = 1")
    return 1j * (1.0 + z) / (1.0 - z)


def cayley_to_disk(w: complex) -> complex:
    """z = (w - i) / (w + i): upper half-plane onto the unit disk."""
    w = complex(w)
    if w == -1j:
        raise ValueError("pole: w = -i")
    return (w - 1j) / (w + 1j)


@dataclass(frozen=True)
class Sandwich:
    """One verified two-sided inequality lower <= value <= upper."""

    name: str
    lower: float
    value: float
    upper: float

    @property
    def ok(self) -> bool:
        tol = 1e-12 * max(abs(self.lower), abs(self.value), abs(self.upper), 1e-300)
        return self.lower <= self.value + tol and self.value <= self.upper + tol

    @property
    def slack(self) -> tuple[float, float]:
        """Multiplicative slack (value/lower, upper/value); inf on zero."""
        lo = self.value / self.lower if self.lower > 0.0 else math.inf
        hi = self.upper / self.value if self.value > 0.0 else math.inf
        return lo, hi


@dataclass(frozen=True)
class HalfplaneComparisons:
    vertex_chord: Sandwich
    radial_gap: Sandwich
    point_identity: Sandwich
    point_chord: Sandwich

    @property
    def all(self) -> tuple[Sandwich, ...]:
        return (self.vertex_chord, self.radial_gap, self.point_identity, self.point_chord)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.all)


def halfplane_comparisons(w: complex, x: float = 0.0) -> HalfplaneComparisons:
    """The four elementary disk/half-plane comparisons at w (Im w > 0).

    With z the Cayley image of w and zeta that of the real point x:
      * 2/(1+|w|) <= |1-z| <= 2*sqrt(2)/(1+|w|)
      * 2 Im w/(1+|w|)^2 <= 1-|z| <= 8 Im w/(1+|w|)^2
      * |w-x| equals 2|z-zeta| / (|1-z| |1-zeta|) exactly
      * 2|w-x| / ((1+|w|)|x+i|) <= |z-zeta| <= 2*sqrt(2)|w-x| / ((1+|w|)|x+i|)
    """
    w = complex(w)
    if w.imag <= 0.0:
        raise ValueError(f"{w} is not in the open upper half-plane")
    z = cayley_to_disk(w)
    zeta = cayley_to_disk(complex(x))
    aw = 1.0 + abs(w)
    s1 = Sandwich("vertex_chord", 2.0 / aw, abs(1.0 - z), 2.0 * math.sqrt(2.0) / aw)
    s2 = Sandwich("radial_gap", 2.0 * w.imag / aw**2, 1.0 - abs(z), 8.0 * w.imag / aw**2)
    ident = 2.0 * abs(z - zeta) / (abs(1.0 - z) * abs(1.0 - zeta))
    s3 = Sandwich("point_identity", ident, abs(w - x), ident)
    denom = aw * abs(complex(x) + 1j)
    s4 = Sandwich("point_chord", 2.0 * abs(w - x) / denom, abs(z - zeta), 2.0 * math.sqrt(2.0) * abs(w - x) / denom)
    return HalfplaneComparisons(s1, s2, s3, s4)


def cut_to_halfplane(lam: complex) -> complex:
    """Square root of a point off the ray [0, inf), taken in the upper half-plane."""
    lam = complex(lam)
    if lam.imag == 0.0 and lam.real >= 0.0:
        raise ValueError(f"{lam} lies on the cut [0, inf)")
    theta = math.atan2(lam.imag, lam.real) % (2.0 * math.pi)
    return math.sqrt(abs(lam)) * cmath.exp(0.5j * theta)


def cut_distance_sandwich(w: complex) -> Sandwich:
    """|w| Im w <= dist(w^2, ray) <= 2 |w| Im w for w in the upper half-plane."""
    from .core_math import dist_to_positive_ray

    w = complex(w)
    if w.imag <= 0.0:
        raise ValueError(f"{w} is not in the open upper half-plane")
    core = abs(w) * w.imag
    return Sandwich("cut_dist", core, dist_to_positive_ray(w * w), 2.0 * core)


# -- distortion certification -------------------------------------------------

@dataclass(frozen=True)
class MapSample:
    """One evaluated sample of a conformal map onto the disk."""

    input: complex
    output: complex
    derivative_abs: float

    def __post_init__(self):
        if self.derivative_abs < 0.0:
            raise ValueError("derivative modulus must be nonnegative")
        if abs(self.output) > 1.0 + 1e-12:
            raise ValueError("output must lie in the closed unit disk")


@dataclass(frozen=True)
class PommerenkeReport:
    samples: tuple[Sandwich, ...]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.samples)

    @property
    def worst_slack(self) -> float:
        return min(min(s.slack) for s in self.samples) if self.samples else math.inf


def pommerenke_check(samples, boundary_dist) -> PommerenkeReport:
    """Check (1/2) d |f'| <= 1 - |f| <= 4 d |f'| with d from the oracle.

    `samples` is an iterable of MapSample; `boundary_dist` maps a domain
    point to its distance to the domain boundary.
    """
    rows = []
    for s in samples:
        d = boundary_dist(s.input)
        core = d * s.derivative_abs
        rows.append(Sandwich(f"pommerenke@{s.input!r}", 0.5 * core, 1.0 - abs(s.output), 4.0 * core))
    return PommerenkeReport(tuple(rows))
