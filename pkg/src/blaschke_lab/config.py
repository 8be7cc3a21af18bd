"""Configuration document for the experiment harness.

One human-editable YAML document drives every subcommand; each reads its
own section.  Validation is strict: unknown keys, missing required keys,
and out-of-range values raise ConfigError, which the CLI maps to exit
code 2.  Defaults are stated in the dataclasses and documented in the
README schema table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .core_math import CircleClosedSet
from .sums import EnvelopeSpec, KhatGrid

__all__ = [
    "ConfigError",
    "FamilySpec",
    "VerifyExperiment",
    "MapConfig",
    "ZerosConfig",
    "RootConfig",
    "load_config",
]

SCHEMA_VERSION = 1

_FAMILY_KINDS = {"blaschke_radial", "blaschke_list", "random_blaschke", "envelope_only"}
_ENVELOPE_KINDS = {"cayley", "reciprocal_power", "point_ratio"}
_THEOREMS = {"disk_points", "origin_factor", "closed_set", "two_region",
             "collapsed", "halfplane", "cut"}
_MAP_NAMES = {"stolz_to_disk", "disk_to_stolz", "disk_to_halfplane",
              "halfplane_to_disk", "cut_to_halfplane"}


class ConfigError(ValueError):
    """Configuration document violates the schema."""


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _as_complex(pair, where: str) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ConfigError(f"{where}: points are [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    zeros: tuple[complex, ...] = ()
    count: int = 8
    r_max: float = 0.8
    envelope_kind: str | None = None
    envelope_params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict, where: str) -> "FamilySpec":
        _require_keys(d, {"kind", "zeros", "count", "r_max", "envelope_factor"}, {"kind"}, where)
        kind = d["kind"]
        if kind not in _FAMILY_KINDS:
            raise ConfigError(f"{where}: unknown family kind {kind!r}")
        zeros = tuple(_as_complex(z, where) for z in d.get("zeros", []))
        if kind == "blaschke_list" and not zeros:
            raise ConfigError(f"{where}: blaschke_list needs a zeros list")
        env_kind = None
        env_params: dict = {}
        if d.get("envelope_factor") is not None:
            env = d["envelope_factor"]
            _require_keys(env, {"kind", "c", "m", "zeta0", "xi0", "r", "q"}, {"kind"},
                          f"{where}.envelope_factor")
            env_kind = env["kind"]
            if env_kind not in _ENVELOPE_KINDS:
                raise ConfigError(f"{where}: unknown envelope kind {env_kind!r}")
            env_params = {k: v for k, v in env.items() if k != "kind"}
            for key in ("zeta0", "xi0"):
                if key in env_params:
                    env_params[key] = _as_complex(env_params[key], f"{where}.envelope_factor")
        return cls(kind=kind, zeros=zeros, count=int(d.get("count", 8)),
                   r_max=float(d.get("r_max", 0.8)), envelope_kind=env_kind,
                   envelope_params=env_params)

    @property
    def uses_rng(self) -> bool:
        return self.kind == "random_blaschke"


def _envelope_from_dict(d: dict, where: str) -> EnvelopeSpec:
    allowed = {"domain", "p", "q", "r", "gamma", "e_points", "f_points", "f_closed",
               "a", "b", "r_signed", "c_points", "d_points"}
    _require_keys(d, allowed, {"domain"}, where)
    domain = d["domain"]

    def unit_pairs(key):
        return [
            (_as_complex(item["point"], f"{where}.{key}"), float(item["exponent"]))
            for item in d.get(key) or []
        ]

    def real_pairs(key):
        return [(float(item["point"]), float(item["exponent"])) for item in d.get(key) or []]

    try:
        if domain == "disk":
            if d.get("f_closed") is not None:
                fc = d["f_closed"]
                _require_keys(fc, {"points", "arcs"}, set(), f"{where}.f_closed")
                closed = CircleClosedSet(
                    tuple(_as_complex(p, f"{where}.f_closed") for p in fc.get("points", [])),
                    tuple((float(a), float(b)) for a, b in fc.get("arcs", [])),
                )
                e_pts = [_as_complex(item["point"], where) for item in d.get("e_points") or []]
                return EnvelopeSpec.disk_closed(float(d.get("p", 0.0)), float(d.get("q", 0.0)),
                                                float(d.get("r", 0.0)), closed, e=e_pts)
            return EnvelopeSpec.disk_points(float(d.get("p", 0.0)), e=unit_pairs("e_points"),
                                            f=unit_pairs("f_points"),
                                            gamma=float(d.get("gamma", 0.0)))
        if domain == "halfplane":
            return EnvelopeSpec.halfplane(float(d.get("a", 0.0)), float(d.get("b", 0.0)),
                                          c=real_pairs("c_points"), d=real_pairs("d_points"))
        if domain == "cut":
            return EnvelopeSpec.cut(float(d.get("a", 0.0)), float(d.get("b", 0.0)),
                                    float(d.get("r_signed", 0.0)),
                                    c=real_pairs("c_points"), d=real_pairs("d_points"))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown domain {domain!r}")


@dataclass(frozen=True)
class VerifyExperiment:
    name: str
    theorem: str
    family: FamilySpec
    envelope: EnvelopeSpec
    eps_ladder: tuple[float, ...]
    truncations: tuple[int, int] | None
    sharpness_probe: bool
    ratio_bound: float
    khat_grid: KhatGrid
    extra: dict

    @classmethod
    def from_dict(cls, d: dict, index: int) -> "VerifyExperiment":
        where = f"verify.experiments[{index}]"
        allowed = {"name", "theorem", "family", "envelope", "eps_ladder", "truncations",
                   "sharpness_probe", "ratio_bound", "khat_grid", "extra"}
        _require_keys(d, allowed, {"name", "theorem", "family", "envelope", "eps_ladder"}, where)
        theorem = d["theorem"]
        if theorem not in _THEOREMS:
            raise ConfigError(f"{where}: unknown theorem selector {theorem!r}")
        ladder = [float(e) for e in d["eps_ladder"]]
        if not ladder:
            raise ConfigError(f"{where}: eps_ladder must be nonempty")
        probe = bool(d.get("sharpness_probe", False))
        if any(e < 0.0 for e in ladder):
            raise ConfigError(f"{where}: eps values must be nonnegative")
        if any(e == 0.0 for e in ladder) and not probe:
            raise ConfigError(f"{where}: eps = 0 requires sharpness_probe: true")
        truncations = None
        if d.get("truncations") is not None:
            lo, hi = (int(x) for x in d["truncations"])
            if not 1 <= lo <= hi:
                raise ConfigError(f"{where}: truncations must be a nonempty 1-based range")
            truncations = (lo, hi)
        family = FamilySpec.from_dict(d["family"], f"{where}.family")
        if family.kind == "blaschke_radial" and truncations is None:
            raise ConfigError(f"{where}: blaschke_radial needs a truncations range")
        grid_d = d.get("khat_grid") or {}
        _require_keys(grid_d, {"n_radial", "n_angle"}, set(), f"{where}.khat_grid")
        grid = KhatGrid(n_radial=int(grid_d.get("n_radial", 12)),
                        n_angle=int(grid_d.get("n_angle", 512)))
        extra = dict(d.get("extra") or {})
        if theorem in ("two_region", "collapsed"):
            for key in ("p", "r"):
                if key not in extra:
                    raise ConfigError(f"{where}: theorem {theorem} needs extra.{key}")
        return cls(name=str(d["name"]), theorem=theorem, family=family,
                   envelope=_envelope_from_dict(d["envelope"], f"{where}.envelope"),
                   eps_ladder=tuple(e for e in ladder if e > 0.0),
                   truncations=truncations, sharpness_probe=probe,
                   ratio_bound=float(d.get("ratio_bound", 10.0)), khat_grid=grid,
                   extra=extra)


@dataclass(frozen=True)
class MapConfig:
    name: str
    aperture: float
    n: int

    @classmethod
    def from_dict(cls, d: dict) -> "MapConfig":
        _require_keys(d, {"name", "aperture", "n"}, {"name"}, "map")
        name = d["name"]
        if name not in _MAP_NAMES:
            raise ConfigError(f"map: unknown map {name!r}; choose from {sorted(_MAP_NAMES)}")
        n = int(d.get("n", 64))
        if n < 2:
            raise ConfigError("map: grid size n must be at least 2")
        aperture = float(d.get("aperture", 2.0))
        if aperture <= 1.0:
            raise ConfigError("map: aperture must exceed 1")
        return cls(name=name, aperture=aperture, n=n)


@dataclass(frozen=True)
class ZerosConfig:
    family: FamilySpec
    region: tuple[float, float, float, float]
    tol: float
    max_depth: int

    @classmethod
    def from_dict(cls, d: dict) -> "ZerosConfig":
        _require_keys(d, {"function", "region", "tol", "max_depth"}, {"function", "region"}, "zeros")
        region = tuple(float(x) for x in d["region"])
        if len(region) != 4 or not (region[1] > region[0] and region[3] > region[2]):
            raise ConfigError("zeros: region is [x0, x1, y0, y1] with x1 > x0, y1 > y0")
        tol = float(d.get("tol", 1e-8))
        if tol <= 0.0:
            raise ConfigError("zeros: tol must be positive")
        return cls(family=FamilySpec.from_dict(d["function"], "zeros.function"),
                   region=region, tol=tol, max_depth=int(d.get("max_depth", 60)))


@dataclass(frozen=True)
class RootConfig:
    seed: int | None
    threads: int | None
    tol: float
    verify_experiments: tuple[VerifyExperiment, ...]
    map_config: MapConfig | None
    zeros_config: ZerosConfig | None
    raw: dict

    @classmethod
    def from_dict(cls, doc: dict) -> "RootConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a mapping")
        allowed = {"schema_version", "seed", "threads", "tol", "verify", "map", "zeros"}
        _require_keys(doc, allowed, {"schema_version"}, "root")
        if int(doc["schema_version"]) != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {doc['schema_version']}")
        seed = doc.get("seed")
        if seed is not None:
            seed = int(seed)
            if not 0 <= seed < 2**64:
                raise ConfigError("seed must fit in an unsigned 64-bit integer")
        threads = doc.get("threads")
        if threads is not None and int(threads) < 1:
            raise ConfigError("threads must be at least 1")
        tol = float(doc.get("tol", 1e-9))
        if not (tol > 0.0 and math.isfinite(tol)):
            raise ConfigError("tol must be a positive finite number")
        experiments: list[VerifyExperiment] = []
        if doc.get("verify") is not None:
            _require_keys(doc["verify"], {"experiments"}, {"experiments"}, "verify")
            experiments = [
                VerifyExperiment.from_dict(e, i)
                for i, e in enumerate(doc["verify"]["experiments"])
            ]
            names = [e.name for e in experiments]
            if len(set(names)) != len(names):
                raise ConfigError("verify: experiment names must be unique")
        map_config = MapConfig.from_dict(doc["map"]) if doc.get("map") is not None else None
        zeros_config = ZerosConfig.from_dict(doc["zeros"]) if doc.get("zeros") is not None else None
        uses_rng = any(e.family.uses_rng for e in experiments) or (
            zeros_config is not None and zeros_config.family.uses_rng
        )
        if uses_rng and seed is None:
            raise ConfigError("a seed is mandatory when any random family is configured")
        return cls(seed=seed, threads=None if threads is None else int(threads), tol=tol,
                   verify_experiments=tuple(experiments), map_config=map_config,
                   zeros_config=zeros_config, raw=doc)


def load_config(path: str | Path) -> RootConfig:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return RootConfig.from_dict(doc)
