"""Batch runners: verify, map tabulation, zero location, sweeps, manifest.

Every runner writes deterministic JSON/CSV artifacts into the output
directory and a manifest listing each file with its content digest.
Identical config and seed give byte-identical report files; the manifest
additionally carries wall times, so it is the one file that differs
between reruns.

Exit codes across the harness: 0 all checks pass, 1 computational
failure, 2 configuration error.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import FamilySpec, RootConfig, VerifyExperiment
from .conformal import (
    cayley_to_disk,
    cayley_to_halfplane,
    cut_to_halfplane,
    disk_to_stolz,
    stolz_boundary_radius,
    stolz_to_disk,
    stolz_to_disk_deriv,
    stolz_to_disk_deriv_abs,
)
from .sums import SumReport, estimate_growth_constant, evaluate_sum, dyadic_profile
from .zerofind import (
    AnalyticFn,
    UnresolvedCellsError,
    ZeroSet,
    blaschke_product,
    envelope_exponential,
    locate_zeros,
    product,
)

__all__ = [
    "EXIT_OK",
    "EXIT_COMPONENT",
    "EXIT_CONFIG",
    "build_function",
    "run_verify",
    "run_map",
    "run_zeros",
    "run_sweep",
]

EXIT_OK = 0
EXIT_COMPONENT = 1
EXIT_CONFIG = 2

ZEROS_CSV_COLUMNS = ("re", "im", "multiplicity", "radius", "unresolved")
MAP_CSV_COLUMNS = ("re_in", "im_in", "re_out", "im_out", "deriv_abs")
TRACE_CSV_COLUMNS = ("n", "epsilon", "total", "k_hat", "ratio")
ERROR_CSV_COLUMNS = ("experiment", "n", "epsilon", "error")
LEVELS_CSV_COLUMNS = ("k", "count", "level_sum", "beta_next")


def _fmt(value) -> str:
    """Shortest-roundtrip text for floats; plain text otherwise."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_hash(config: RootConfig) -> str:
    return hashlib.sha256(json.dumps(config.raw, sort_keys=True, default=str).encode()).hexdigest()


def build_function(family: FamilySpec, n: int | None, seed: int | None,
                   exp_index: int = 0) -> AnalyticFn:
    """Materialize a family instance: Blaschke factor times optional envelope."""
    if family.kind == "blaschke_radial":
        if n is None:
            raise ValueError("radial family needs a truncation index")
        zeros = [1.0 - 2.0 ** (-k) for k in range(1, n + 1)]
    elif family.kind == "blaschke_list":
        zeros = list(family.zeros if n is None else family.zeros[:n])
    elif family.kind == "random_blaschke":
        rng = np.random.default_rng([int(seed), exp_index])
        r = family.r_max * np.sqrt(rng.uniform(0.0, 1.0, family.count))
        theta = rng.uniform(0.0, 2.0 * math.pi, family.count)
        zeros = list(r * np.exp(1j * theta))
    elif family.kind == "envelope_only":
        zeros = []
    else:
        raise ValueError(f"unknown family kind {family.kind!r}")
    fn = blaschke_product(zeros)
    if family.envelope_kind is not None:
        fn = product(fn, envelope_exponential(family.envelope_kind, **family.envelope_params))
    return fn


@dataclass
class _ExperimentResult:
    name: str
    status: str
    wall_time_s: float
    outputs: list[Path]
    errors: list[list]


def _instances(exp: VerifyExperiment, seed: int | None, index: int) -> list[tuple[int, AnalyticFn]]:
    fam = exp.family
    if exp.truncations is not None and fam.kind in ("blaschke_radial", "blaschke_list"):
        lo, hi = exp.truncations
        if fam.kind == "blaschke_list":
            hi = min(hi, len(fam.zeros))
        return [(n, build_function(fam, n, seed, index)) for n in range(lo, hi + 1)]
    f = build_function(fam, None, seed, index)
    n = f.known_zeros.total_multiplicity() if f.known_zeros is not None else 0
    return [(n, f)]


def _run_one_experiment(exp: VerifyExperiment, index: int, out_dir: Path,
                        seed: int | None) -> _ExperimentResult:
    start = time.perf_counter()
    outputs: list[Path] = []
    errors: list[list] = []
    exp_dir = out_dir / exp.name
    trace_rows: list[list] = []
    entries: list[dict] = []
    try:
        for n, fn in _instances(exp, seed, index):
            zeros = fn.known_zeros
            k_hat = estimate_growth_constant(fn, exp.envelope, exp.khat_grid)
            for eps in exp.eps_ladder:
                report: SumReport = evaluate_sum(exp.theorem, zeros, exp.envelope, eps, exp.extra)
                flags = []
                k_use = k_hat
                if k_hat == 0.0 and report.total > 0.0:
                    k_use = float(-fn.log_abs(fn.base_point))
                    flags.append("vacuous-growth-constant:jensen-baseline")
                report = report.with_k_hat(k_use)
                doc = report.to_json_dict()
                doc["n"] = n
                doc["flags"] = flags
                jpath = exp_dir / f"report_n{n}_eps{_fmt(eps)}.json"
                _write_json(jpath, doc)
                cpath = exp_dir / f"per_zero_n{n}_eps{_fmt(eps)}.csv"
                _write_csv(cpath, SumReport.CSV_COLUMNS, report.to_csv_rows())
                outputs += [jpath, cpath]
                ratio = report.ratio
                trace_rows.append([n, eps, report.total, report.k_hat,
                                   ("inf" if ratio is not None and math.isinf(ratio) else ratio)])
                entries.append({"n": n, "epsilon": eps, "total": report.total,
                                "k_hat": report.k_hat,
                                "ratio": ("inf" if ratio is not None and math.isinf(ratio) else ratio),
                                "flags": flags})
        tpath = exp_dir / "trace.csv"
        _write_csv(tpath, TRACE_CSV_COLUMNS, trace_rows)
        outputs.append(tpath)
        supported = True
        for eps in exp.eps_ladder:
            finite = [e["ratio"] for e in entries
                      if e["epsilon"] == eps and isinstance(e["ratio"], float)
                      and math.isfinite(e["ratio"]) and e["ratio"] > 0.0]
            if len(finite) >= 2 and max(finite) / min(finite) >= exp.ratio_bound:
                supported = False
        summary = {
            "schema_version": 1,
            "name": exp.name,
            "theorem": exp.theorem,
            "supported": supported,
            "ratio_bound": exp.ratio_bound,
            "entries": entries,
        }
        spath = exp_dir / "summary.json"
        _write_json(spath, summary)
        outputs.append(spath)
        status = "ok"
    except Exception as exc:  # collected into the error table, exit 1
        errors.append([exp.name, "", "", f"{type(exc).__name__}: {exc}"])
        status = "error"
    return _ExperimentResult(exp.name, status, time.perf_counter() - start, outputs, errors)


def _write_manifest(out_dir: Path, config: RootConfig, results: list[_ExperimentResult],
                    csv_columns: dict):
    manifest = {
        "schema_version": 1,
        "tool_version": __version__,
        "config_hash": _config_hash(config),
        "csv_columns": csv_columns,
        "experiments": [
            {
                "name": r.name,
                "status": r.status,
                "wall_time_s": r.wall_time_s,
                "outputs": [
                    {"path": str(p.relative_to(out_dir)), "sha256": _sha256(p)}
                    for p in r.outputs
                ],
            }
            for r in results
        ],
    }
    _write_json(out_dir / "manifest.json", manifest)


def _run_all_experiments(config: RootConfig, out: Path, threads: int) -> list[_ExperimentResult]:
    exps = list(config.verify_experiments)
    if not exps:
        raise ValueError("config has no verify experiments")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_one_experiment, e, i, out, config.seed)
                       for i, e in enumerate(exps)]
            return [f.result() for f in futures]
    return [_run_one_experiment(e, i, out, config.seed) for i, e in enumerate(exps)]


def _finalize_verify(config: RootConfig, out: Path, results: list[_ExperimentResult]) -> int:
    all_errors = [row for r in results for row in r.errors]
    if all_errors:
        epath = out / "errors.csv"
        _write_csv(epath, ERROR_CSV_COLUMNS, all_errors)
        for r in results:
            if r.errors:
                r.outputs.append(epath)
    _write_manifest(out, config, results, {
        "per_zero": list(SumReport.CSV_COLUMNS),
        "trace": list(TRACE_CSV_COLUMNS),
        "errors": list(ERROR_CSV_COLUMNS),
        "levels": list(LEVELS_CSV_COLUMNS),
    })
    return EXIT_COMPONENT if all_errors else EXIT_OK


def run_verify(config: RootConfig, out_dir: str | Path, threads: int = 1) -> int:
    """Run every configured verify experiment; emit reports and a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = _run_all_experiments(config, out, threads)
    return _finalize_verify(config, out, results)


# -- map tabulation -------------------------------------------------------------

def _map_rows(name: str, aperture: float, n: int) -> list[list]:
    rows: list[list] = []
    if name == "stolz_to_disk":
        ts = np.linspace(0.05, 0.95, n)
        thetas = np.linspace(-0.98 * math.pi, 0.98 * math.pi, n)
        for t in ts:
            for theta in thetas:
                z = complex(t * stolz_boundary_radius(aperture, theta) * np.exp(1j * theta))
                w = stolz_to_disk(z, aperture)
                rows.append([z.real, z.imag, w.real, w.imag, stolz_to_disk_deriv_abs(z, aperture)])
    elif name == "disk_to_stolz":
        rs = np.linspace(0.0, 0.9, n)
        thetas = 2.0 * math.pi * np.arange(n) / n
        for r in rs:
            for theta in thetas:
                w = complex(r * np.exp(1j * theta))
                z = disk_to_stolz(w, aperture)
                d = abs(stolz_to_disk_deriv(z, aperture))
                rows.append([w.real, w.imag, z.real, z.imag, 1.0 / d])
    elif name == "disk_to_halfplane":
        rs = np.linspace(0.0, 0.95, n)
        thetas = 2.0 * math.pi * np.arange(n) / n
        for r in rs:
            for theta in thetas:
                z = complex(r * np.exp(1j * theta))
                w = cayley_to_halfplane(z)
                rows.append([z.real, z.imag, w.real, w.imag, 2.0 / abs(1.0 - z) ** 2])
    elif name == "halfplane_to_disk":
        xs = np.linspace(-5.0, 5.0, n)
        ys = np.exp(np.linspace(math.log(1e-2), math.log(10.0), n))
        for x in xs:
            for y in ys:
                w = complex(x, y)
                z = cayley_to_disk(w)
                rows.append([w.real, w.imag, z.real, z.imag, 2.0 / abs(w + 1j) ** 2])
    elif name == "cut_to_halfplane":
        rs = np.exp(np.linspace(math.log(1e-2), math.log(10.0), n))
        phis = np.linspace(0.02, 2.0 * math.pi - 0.02, n)
        for r in rs:
            for phi in phis:
                lam = complex(r * np.exp(1j * phi))
                w = cut_to_halfplane(lam)
                rows.append([lam.real, lam.imag, w.real, w.imag, 0.5 / math.sqrt(abs(lam))])
    else:
        raise ValueError(f"unknown map {name!r}")
    return rows


def run_map(config: RootConfig, out_dir: str | Path) -> int:
    """Tabulate one conformal map on a deterministic n-by-n domain grid."""
    if config.map_config is None:
        raise ValueError("config has no map section")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mc = config.map_config
    start = time.perf_counter()
    rows = _map_rows(mc.name, mc.aperture, mc.n)
    path = out / f"map_{mc.name}.csv"
    _write_csv(path, MAP_CSV_COLUMNS, rows)
    result = _ExperimentResult(f"map:{mc.name}", "ok", time.perf_counter() - start, [path], [])
    _write_manifest(out, config, [result], {"map": list(MAP_CSV_COLUMNS)})
    return EXIT_OK


# -- zero location ----------------------------------------------------------------

def run_zeros(config: RootConfig, out_dir: str | Path) -> int:
    """Locate zeros of the configured function; emit the zero-set CSV."""
    if config.zeros_config is None:
        raise ValueError("config has no zeros section")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    zc = config.zeros_config
    fn = build_function(zc.family, None, config.seed)
    start = time.perf_counter()
    rows: list[list] = []
    status = "ok"
    code = EXIT_OK
    try:
        found = locate_zeros(fn, zc.region, tol=zc.tol, max_depth=zc.max_depth)
    except UnresolvedCellsError as exc:
        found = exc.found
        for cell, w in exc.cells:
            rows.append([cell.center.real, cell.center.imag, w or 0, 0.5 * cell.diameter, 1])
        status = "unresolved-cells"
        code = EXIT_COMPONENT
    for e in found:
        rows.append([e.location.real, e.location.imag, e.multiplicity, e.radius, 0])
    path = out / "zeros.csv"
    _write_csv(path, ZEROS_CSV_COLUMNS, rows)
    result = _ExperimentResult("zeros", status, time.perf_counter() - start, [path], [])
    _write_manifest(out, config, [result], {"zeros": list(ZEROS_CSV_COLUMNS)})
    return code


# -- sweeps --------------------------------------------------------------------------

def run_sweep(config: RootConfig, out_dir: str | Path, threads: int = 1) -> int:
    """Verify plus per-experiment dyadic level diagnostics at the top truncation."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = _run_all_experiments(config, out, threads)
    for i, exp in enumerate(config.verify_experiments):
        result = results[i]
        if result.status != "ok":
            continue
        try:
            pairs = _instances(exp, config.seed, i)
            n, fn = pairs[-1]
            vertex = 1.0 + 0.0j
            if exp.envelope.e_points is not None and len(exp.envelope.e_points):
                vertex = exp.envelope.e_points.points[0]
            profile = dyadic_profile(fn.known_zeros, vertex, eps=exp.eps_ladder[0])
            lpath = out / exp.name / f"levels_n{n}.csv"
            _write_csv(lpath, LEVELS_CSV_COLUMNS, profile.to_csv_rows())
            result.outputs.append(lpath)
        except Exception as exc:
            result.errors.append([exp.name, "", "", f"{type(exc).__name__}: {exc}"])
            result.status = "error"
    return _finalize_verify(config, out, results)
