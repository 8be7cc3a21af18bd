"""Deterministic and seeded point generators used by the check suites."""

from __future__ import annotations

import math

import numpy as np

from .conformal import StolzAngle, stolz_boundary_radius, stolz_contains

__all__ = [
    "stolz_interior_samples",
    "stolz_vertex_samples",
    "disk_samples",
    "halfplane_samples",
    "near_vertex_zero_sets",
    "random_blaschke_zero_sets",
]


def stolz_interior_samples(aperture: float, n: int, t_max: float = 0.9,
                           t_min: float = 0.05) -> list[complex]:
    """Deterministic interior fill of the Stolz angle with vertex 1.

    Points are t * rho(theta) e^{i theta} for a rectangular (t, theta)
    lattice, so membership holds by construction.
    """
    rows = max(int(math.ceil(math.sqrt(n))), 2)
    ts = np.linspace(t_min, t_max, rows)
    thetas = np.linspace(-math.pi * 0.98, math.pi * 0.98, rows + 1)
    rho = stolz_boundary_radius(aperture, thetas)
    pts = (ts[:, None] * (rho * np.exp(1j * thetas))[None, :]).ravel()
    return [complex(z) for z in pts[:n]]


def stolz_vertex_samples(aperture: float, n: int, window: float = 1.0 / 16.0) -> list[complex]:
    """Deterministic samples of the angle within |z - 1| < `window`.

    Built as z = 1 - delta e^{i phi} with log-spaced delta and a fan of
    angles, filtered by strict membership.
    """
    angle = StolzAngle(1.0, aperture)
    out: list[complex] = []
    deltas = np.exp(np.linspace(math.log(1e-6), math.log(window * 0.999), 4 * n // 10 + 20))
    phis = np.linspace(-0.45 * math.pi, 0.45 * math.pi, 41)
    for delta in deltas:
        for phi in phis:
            z = 1.0 - delta * complex(math.cos(phi), math.sin(phi))
            if abs(z) < 1.0 and abs(z - 1.0) < window and stolz_contains(z, angle):
                out.append(z)
                if len(out) == n:
                    return out
    if len(out) < n:
        raise RuntimeError(f"could not fill {n} vertex samples, got {len(out)}")
    return out


def disk_samples(rng: np.random.Generator, n: int, r_max: float = 1.0) -> np.ndarray:
    """Area-uniform points of the disk of radius r_max."""
    r = r_max * np.sqrt(rng.uniform(0.0, 1.0, n))
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    return r * np.exp(1j * theta)


def halfplane_samples(rng: np.random.Generator, n: int, re_max: float = 10.0,
                      im_max: float = 10.0) -> np.ndarray:
    """Points with |Re| < re_max and 0 < Im < im_max."""
    re = rng.uniform(-re_max, re_max, n)
    im = rng.uniform(1e-9, im_max, n)
    return re + 1j * im


def near_vertex_zero_sets(rng: np.random.Generator, count: int, max_size: int = 12,
                          vertex: complex = 1.0) -> list[list[complex]]:
    """Seeded zero sets accumulating toward a boundary vertex.

    Every zero satisfies |z - vertex| < 1, the regime of the near-vertex
    sum weights.  Distances from the vertex are log-uniform so the sets
    probe both tangential and radial approach.
    """
    vertex = complex(vertex)
    sets: list[list[complex]] = []
    for _ in range(count):
        size = int(rng.integers(1, max_size + 1))
        zeros: list[complex] = []
        while len(zeros) < size:
            rho = math.exp(rng.uniform(math.log(1e-4), math.log(0.98)))
            phi = rng.uniform(-0.5 * math.pi, 0.5 * math.pi)
            z = vertex * (1.0 - rho * complex(math.cos(phi), math.sin(phi)))
            if abs(z) < 1.0:
                zeros.append(z)
        sets.append(zeros)
    return sets


def random_blaschke_zero_sets(rng: np.random.Generator, count: int, max_distinct: int = 6,
                              max_multiplicity: int = 3, max_total: int = 12,
                              r_max: float = 0.8, min_separation: float = 0.05) -> list[list[complex]]:
    """Seeded zero lists (with repetitions for multiplicity) for oracle products."""
    sets: list[list[complex]] = []
    for _ in range(count):
        distinct = int(rng.integers(1, max_distinct + 1))
        points: list[complex] = []
        guard = 0
        while len(points) < distinct and guard < 1000:
            guard += 1
            z = complex(disk_samples(rng, 1, r_max)[0])
            if all(abs(z - p) >= min_separation for p in points):
                points.append(z)
        zeros: list[complex] = []
        for p in points:
            mult = int(rng.integers(1, max_multiplicity + 1))
            room = max_total - len(zeros)
            if room <= 0:
                break
            zeros.extend([p] * min(mult, room))
        sets.append(zeros)
    return sets
