"""Invariant suites behind the `selftest` subcommand.

Each suite returns (ok, detail) and prints one verdict line.  Suites that
consume randomness take the seed; the rest are fully deterministic, so
their printed lines are identical across seeds.
"""

from __future__ import annotations

import math

import numpy as np

from .conformal import (
    MapSample,
    StolzAngle,
    cut_distance_sandwich,
    halfplane_comparisons,
    pommerenke_check,
    stolz_boundary_distance,
    stolz_contains,
    stolz_to_disk,
    stolz_to_disk_deriv_abs,
)
from .sampling import (
    disk_samples,
    halfplane_samples,
    near_vertex_zero_sets,
    random_blaschke_zero_sets,
    stolz_interior_samples,
    stolz_vertex_samples,
)
from .sums import beta_level, collapsed_sum, cut_exponents, halfplane_exponents, two_region_sum
from .zerofind import Box, blaschke_product, envelope_exponential, jensen_residual, locate_zeros, product, winding_number

__all__ = ["run_selftest", "SUITES"]


def suite_distortion(seed: int, lower: float = 1.0 / 16.0, upper: float = 48.0):
    """Derivative window on the near-vertex part of the angle, three apertures."""
    worst_lo, worst_hi = math.inf, 0.0
    for aperture in (2.0, 4.0, 8.0):
        alpha = StolzAngle(1.0, aperture).exponent
        for z in stolz_vertex_samples(aperture, 500):
            ratio = stolz_to_disk_deriv_abs(z, aperture) / abs(z - 1.0) ** (alpha - 1.0)
            worst_lo = min(worst_lo, ratio)
            worst_hi = max(worst_hi, ratio)
            if not (lower < ratio < upper):
                return False, f"ratio {ratio:.6g} escapes ({lower:.6g}, {upper:.6g}) at {z:.6g}"
    return True, f"ratio range [{worst_lo:.6g}, {worst_hi:.6g}] inside ({lower:.6g}, {upper:.6g})"


def suite_pommerenke(seed: int):
    """Distortion sandwich for the identity map and the angle-to-disk map."""
    ident = [MapSample(z, z, 1.0) for z in disk_samples(np.random.default_rng(7), 50, 0.95)]
    rep1 = pommerenke_check(ident, lambda w: 1.0 - abs(w))
    angle = StolzAngle(1.0, 2.0)
    samples = []
    for z in stolz_interior_samples(2.0, 200, t_max=0.9):
        if abs(z) < 1e-3:
            continue
        samples.append(MapSample(z, stolz_to_disk(z, 2.0), stolz_to_disk_deriv_abs(z, 2.0)))
    rep2 = pommerenke_check(samples, lambda w: stolz_boundary_distance(w, angle))
    ok = rep1.ok and rep2.ok
    return ok, f"identity ok={rep1.ok}, angle map ok={rep2.ok} over {len(samples)} samples"


def suite_stolz_nesting(seed: int):
    """(B-A)/(B+1)(1-|z|) <= dist(z, outer boundary) < 1-|z| for nested angles."""
    rng = np.random.default_rng(seed)
    inner = StolzAngle(1.0, 1.5)
    outer = StolzAngle(1.0, 3.0)
    lower_const = (3.0 - 1.5) / (3.0 + 1.0)
    checked = 0
    while checked < 200:
        z = complex(disk_samples(rng, 1)[0])
        if not stolz_contains(z, inner):
            continue
        checked += 1
        d = stolz_boundary_distance(z, outer)
        gap = 1.0 - abs(z)
        if not (lower_const * gap <= d < gap):
            return False, f"nesting fails at {z:.6g}: dist {d:.6g} vs gap {gap:.6g}"
    return True, f"200 samples within [{lower_const}*gap, gap)"


def suite_beta_levels(seed: int):
    """2/pi <= 2^k beta_k <= 3/2 for k = 1..30 and beta_1 = 1/2 exactly."""
    if abs(beta_level(1) - 0.5) > 1e-15:
        return False, f"beta_1 = {beta_level(1)!r}"
    for k in range(1, 31):
        scaled = 2.0**k * beta_level(k)
        if not (2.0 / math.pi <= scaled <= 1.5):
            return False, f"2^{k} beta_{k} = {scaled!r} escapes [2/pi, 3/2]"
    return True, "levels 1..30 inside [2/pi, 3/2]"


def suite_exponent_tuples(seed: int):
    """Hand-derived half-plane and cut exponent tuples reproduce exactly."""
    l, l1 = halfplane_exponents(1.0, 0.0, [], [], 0.1)
    s, s1, s2 = cut_exponents(1.0, 0.0, 0.0, [], [], 0.1)
    checks = [
        ("l", l, 2.0), ("l1", l1, 3.2),
        ("s", s, 3.0), ("s1", s1, -1.0), ("s2", s2, 1.65),
    ]
    for name, got, want in checks:
        if abs(got - want) > 1e-12:
            return False, f"{name} = {got!r}, expected {want}"
    return True, "l=2, l1=3.2, s=3, s1=-1, s2=1.65 within 1e-12"


def suite_jensen(seed: int):
    """Quadrature residuals below 1e-6 at r = 0.9 for the oracle families."""
    families = {
        "single": blaschke_product([0.5]),
        "triple": blaschke_product([0.3, -0.2, 0.5j]),
        "envelope": envelope_exponential("cayley", c=1.0),
        "mixed": product(blaschke_product([0.5, -0.4 + 0.2j]),
                         envelope_exponential("reciprocal_power", c=0.5, m=1.0)),
    }
    worst = 0.0
    for name, fn in families.items():
        res = abs(jensen_residual(fn, 0.9, 4096))
        worst = max(worst, res)
        if res >= 1e-6:
            return False, f"{name}: residual {res:.3e}"
    return True, f"worst residual {worst:.3e} < 1e-6"


def suite_zero_oracle(seed: int, count: int = 12):
    """Constructed Blaschke zeros are recovered with exact multiplicities."""
    rng = np.random.default_rng(seed)
    region = Box(-0.9, 0.9, -0.9, 0.9)
    for zeros in random_blaschke_zero_sets(rng, count):
        fn = blaschke_product(zeros)
        found = locate_zeros(fn, region, tol=1e-8)
        want = fn.known_zeros.sorted()
        if len(found) != len(want):
            return False, f"found {len(found)} clusters, built {len(want)}"
        for got, exp in zip(found, want):
            if abs(got.location - exp.location) > 1e-8 or got.multiplicity != exp.multiplicity:
                return False, f"mismatch near {exp.location:.6g}"
        if winding_number(fn, region) != want.total_multiplicity():
            return False, "winding total disagrees with construction"
    return True, f"{count} random products recovered exactly"


def suite_sandwiches(seed: int, n: int = 10_000):
    """Half-plane comparison inequalities and the cut-distance sandwich."""
    rng = np.random.default_rng(seed)
    for w in halfplane_samples(rng, n):
        comp = halfplane_comparisons(complex(w), x=float(rng.uniform(-5.0, 5.0)))
        if not comp.ok:
            return False, f"half-plane comparison fails at {w:.6g}"
    for w in halfplane_samples(rng, n):
        if not cut_distance_sandwich(complex(w)).ok:
            return False, f"cut sandwich fails at {w:.6g}"
    return True, f"{n} half-plane and {n} cut points, zero violations"


def suite_dominance(seed: int, count: int = 500):
    """Near-vertex zero sets: merged weight is below the two-region total."""
    rng = np.random.default_rng(seed)
    for zeros in near_vertex_zero_sets(rng, count):
        r = float(rng.uniform(0.0, 2.0))
        p = float(rng.uniform(0.05, r + 0.95))
        tau = float(rng.uniform(0.05, 1.0))
        merged = collapsed_sum(zeros, p, r, tau).total
        split = two_region_sum(zeros, p, r, tau).total
        if merged > split * (1.0 + 1e-12):
            return False, f"dominance fails: {merged!r} > {split!r} (p={p}, r={r}, tau={tau})"
    return True, f"{count} seeded zero sets dominated"


SUITES = {
    "distortion": suite_distortion,
    "pommerenke": suite_pommerenke,
    "stolz_nesting": suite_stolz_nesting,
    "beta_levels": suite_beta_levels,
    "exponent_tuples": suite_exponent_tuples,
    "jensen": suite_jensen,
    "zero_oracle": suite_zero_oracle,
    "sandwiches": suite_sandwiches,
    "dominance": suite_dominance,
}


def run_selftest(seed: int = 2025, overrides: dict | None = None, echo=print) -> int:
    """Execute every suite; print one verdict line each.  Returns the exit code.

    `overrides` maps suite name to keyword arguments (the mutation hook
    used to demonstrate that a perturbed constant is caught).
    """
    overrides = overrides or {}
    failures = 0
    for name, fn in SUITES.items():
        kwargs = overrides.get(name, {})
        try:
            ok, detail = fn(seed, **kwargs)
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += 0 if ok else 1
        echo(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    echo(f"{'OK' if failures == 0 else 'FAILED'}: {len(SUITES) - failures}/{len(SUITES)} suites passed")
    return 0 if failures == 0 else 1
