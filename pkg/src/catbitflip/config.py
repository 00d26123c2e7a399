"""Run configuration: one JSON document per run, flags override fields.

All rates and strengths are in units of kappa2, which is fixed to 1.
"""

from dataclasses import asdict, dataclass, field
import json
import math

import numpy as np

from .errors import ConfigError
from .fock import MIN_ALPHA2
from .liouville import KINDS, PerturbationSpec

METHODS = ("analytic", "eigensum", "spectral", "decay_fit")
FORMATS = ("csv", "json")


def expand_grid(grid):
    """Accept a list of alpha^2 values or ``{"start", "stop", "step"}`` (stop inclusive)."""
    if isinstance(grid, dict):
        try:
            start, stop, step = (float(grid[k]) for k in ("start", "stop", "step"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"grid range needs numeric start, stop, step: {grid}") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"bad grid range {grid}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(count)]
    if isinstance(grid, (int, float)):
        return [float(grid)]
    try:
        return [float(x) for x in grid]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"alpha2_grid must be a list of numbers, got {grid!r}") from exc


def check_grid(grid):
    if len(grid) == 0:
        raise ConfigError("alpha2_grid is empty")
    if not all(math.isfinite(x) for x in grid):
        raise ConfigError("alpha2_grid has non-finite entries")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("alpha2_grid must be strictly increasing")
    if grid[0] < MIN_ALPHA2 * (1.0 - 1e-12):
        raise ConfigError(f"alpha2_grid entries must be >= {MIN_ALPHA2}, got {grid[0]}")


@dataclass
class RunConfig:
    perturbation: dict
    alpha2_grid: list
    methods: list = field(default_factory=lambda: ["analytic", "spectral"])
    dim_override: int = None
    output_path: str = "-"
    format: str = "csv"
    t_grid: list = None  # leakage probe times

    def __post_init__(self):
        self.alpha2_grid = expand_grid(self.alpha2_grid)
        check_grid(self.alpha2_grid)
        if isinstance(self.methods, str):
            self.methods = [self.methods]
        self.methods = list(self.methods)
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.dim_override is not None:
            if int(self.dim_override) != self.dim_override or self.dim_override < 4:
                raise ConfigError(f"dim_override must be an integer >= 4, got {self.dim_override}")
            self.dim_override = int(self.dim_override)
        if self.t_grid is not None:
            self.t_grid = [float(t) for t in self.t_grid]
        self.perturbation = normalize_perturbation(self.perturbation)
        self.spec()  # validates strength and (m, n)

    def spec(self):
        if self.perturbation["kind"] == "none":
            return None
        p = self.perturbation
        return PerturbationSpec(p["kind"], p["strength"], p.get("m", 0), p.get("n", 0))

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "perturbation" not in data or "alpha2_grid" not in data:
            raise ConfigError("config needs 'perturbation' and 'alpha2_grid'")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls.from_json(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


def normalize_perturbation(p):
    if isinstance(p, str):
        p = {"kind": p}
    if not isinstance(p, dict) or "kind" not in p:
        raise ConfigError("perturbation must be an object with a 'kind'")
    kind = p["kind"]
    if kind not in KINDS + ("none",) or kind == "generic_hamiltonian":
        raise ConfigError(f"perturbation kind {kind!r} is not available from a config file")
    extra = set(p) - {"kind", "strength", "m", "n"}
    if extra:
        raise ConfigError(f"unknown perturbation keys {sorted(extra)}")
    out = {"kind": kind, "strength": float(p.get("strength", 0.0))}
    if kind == "generic_dissipator":
        out["m"] = p.get("m", 0)
        out["n"] = p.get("n", 0)
    return out


def default_t_grid(t_max=2.0, count=21):
    return list(np.linspace(0.0, t_max, count))
