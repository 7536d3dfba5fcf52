"""Scenario configuration: YAML schema, validation and defaults.

A scenario file looks like::

    system:              # optional overrides of the reference set-up
      gamma_m: 17.28
    csl:                 # either an explicit rate ...
      delta: 1.0e6
                         # ... or collapse parameters (rate computed)
      # gamma_csl: 1.0e-28
      # r_c: 1.0e-7
      # two_pi: false
    arms:
      - input: tms       # vacuum | thermal | tms
        selectors: [q_plus]
    sweep:
      n: [100]           # mean photons per input mode
      phi: [3.141592653589793]
      N: [100]
      # delta: [1.0e4, 1.0e6]   overrides csl
    test:
      alpha: 0.05
    time_grid:
      t_min: 1.0e-9
      t_max: null        # null -> 20 / gamma_m
      points: 400
      spacing: log       # log | lin
    seed: 0

Unknown keys anywhere are rejected.
"""
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
import yaml

from ..csl import CslParams, csl_delta
from ..errors import InvalidArgumentError
from ..model import NoiseKind, Occupation, QuadratureSelector, SystemParams

DEFAULT_DELTA = 1e6
DEFAULT_ALPHA = 0.05
DEFAULT_N = 100
DEFAULT_PHOTONS = 100.0

_SYSTEM_KEYS = {
    "omega_m", "gamma_m", "T_bath", "omega_c", "kappa", "delta", "P_pump", "m", "L",
    "R_sphere", "occupation",
}
_CSL_KEYS = {"delta", "gamma_csl", "r_c", "two_pi"}
_ARM_KEYS = {"input", "selectors"}
_SWEEP_KEYS = {"n", "phi", "N", "delta"}
_TEST_KEYS = {"alpha"}
_GRID_KEYS = {"t_min", "t_max", "points", "spacing"}
_TOP_KEYS = {"system", "csl", "arms", "sweep", "test", "time_grid", "seed"}


@dataclass(frozen=True)
class TimeGrid:
    t_min: float = 1e-9
    t_max: Optional[float] = None
    points: int = 400
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in ("log", "lin"):
            raise InvalidArgumentError(f"spacing must be 'log' or 'lin', got {self.spacing!r}")
        if int(self.points) != self.points or self.points < 1:
            raise InvalidArgumentError("points must be a positive integer")
        if self.t_min < 0 or (self.spacing == "log" and self.t_min <= 0):
            raise InvalidArgumentError("t_min must be > 0 for log spacing and >= 0 otherwise")
        if self.t_max is not None and self.points > 1 and not self.t_max > self.t_min:
            raise InvalidArgumentError("t_max must exceed t_min")

    def values(self, params):
        t_max = self.t_max if self.t_max is not None else 20.0 / params.gamma_m
        if self.points == 1:
            return np.array([float(self.t_min)])
        if not t_max > self.t_min:
            raise InvalidArgumentError("t_max must exceed t_min")
        if self.spacing == "log":
            return np.logspace(math.log10(self.t_min), math.log10(t_max), int(self.points))
        return np.linspace(self.t_min, t_max, int(self.points))

    @classmethod
    def parse(cls, text):
        """Parse the ``t_min,t_max,points,log|lin`` command-line form."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise InvalidArgumentError("grid must be 't_min,t_max,points,log|lin'")
        t_max = None if parts[1].lower() in ("", "auto", "none") else float(parts[1])
        return cls(float(parts[0]), t_max, int(parts[2]), parts[3].lower())


@dataclass(frozen=True)
class Arm:
    """One protocol arm: an input-light family measured on given quadratures."""

    input: NoiseKind
    selectors: Tuple[QuadratureSelector, ...]

    def __post_init__(self):
        object.__setattr__(self, "input", NoiseKind(self.input))
        sels = tuple(QuadratureSelector(s) for s in self.selectors)
        if not sels:
            raise InvalidArgumentError("each arm needs at least one selector")
        object.__setattr__(self, "selectors", sels)


@dataclass(frozen=True)
class ScenarioConfig:
    arms: Tuple[Arm, ...]
    system: SystemParams = field(default_factory=SystemParams)
    csl: Optional[CslParams] = None
    csl_two_pi: bool = False
    deltas: Tuple[float, ...] = (DEFAULT_DELTA,)
    photons: Tuple[float, ...] = (DEFAULT_PHOTONS,)
    phis: Tuple[float, ...] = (math.pi,)
    sample_sizes: Tuple[int, ...] = (DEFAULT_N,)
    alpha: float = DEFAULT_ALPHA
    time_grid: TimeGrid = field(default_factory=TimeGrid)
    seed: int = 0
    name: str = "scenario"

    def __post_init__(self):
        if not self.arms:
            raise InvalidArgumentError("at least one arm is required")
        for label, values in (
            ("delta", self.deltas),
            ("n", self.photons),
            ("phi", self.phis),
            ("N", self.sample_sizes),
        ):
            if len(values) == 0:
                raise InvalidArgumentError(f"sweep axis {label!r} is empty")
        if any(not d >= 0 for d in self.deltas):
            raise InvalidArgumentError("delta values must be >= 0")
        if any(not n >= 0 for n in self.photons):
            raise InvalidArgumentError("photon numbers must be >= 0")
        if any(int(N) != N or N < 2 for N in self.sample_sizes):
            raise InvalidArgumentError("sample sizes must be integers >= 2")
        if not 0 < self.alpha < 1:
            raise InvalidArgumentError("alpha must lie in (0, 1)")

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        d = asdict(self)
        d["arms"] = [{"input": a.input.value, "selectors": [s.value for s in a.selectors]} for a in self.arms]
        d["system"]["occupation"] = self.system.occupation.value
        return d

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float).encode()
        return hashlib.sha256(blob).hexdigest()


def _check_keys(section, allowed, where):
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise InvalidArgumentError(f"{where} must be a mapping")
    unknown = set(section) - allowed
    if unknown:
        raise InvalidArgumentError(f"unknown key(s) in {where}: {sorted(unknown)}")
    return section


def _float_list(value, where):
    values = value if isinstance(value, (list, tuple)) else [value]
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{where} must be numbers") from exc


def from_dict(raw, name="scenario"):
    raw = _check_keys(raw or {}, _TOP_KEYS, "config")
    system_raw = dict(_check_keys(raw.get("system"), _SYSTEM_KEYS, "system"))
    if "occupation" in system_raw:
        system_raw["occupation"] = Occupation(system_raw["occupation"])
    system = SystemParams(**{k: (v if k == "occupation" else float(v)) for k, v in system_raw.items()})

    csl_raw = _check_keys(raw.get("csl"), _CSL_KEYS, "csl")
    sweep = _check_keys(raw.get("sweep"), _SWEEP_KEYS, "sweep")
    two_pi = bool(csl_raw.get("two_pi", False))
    csl = None
    if "delta" in sweep:
        deltas = _float_list(sweep["delta"], "sweep.delta")
    elif "delta" in csl_raw:
        deltas = (float(csl_raw["delta"]),)
    elif csl_raw:
        csl = CslParams(
            gamma_csl=float(csl_raw.get("gamma_csl", CslParams.gamma_csl)),
            r_c=float(csl_raw.get("r_c", CslParams.r_c)),
            R_sphere=system.R_sphere,
            m=system.m,
        )
        deltas = (csl_delta(csl, system.omega_m, two_pi=two_pi),)
    else:
        deltas = (DEFAULT_DELTA,)

    arms_raw = raw.get("arms")
    if not arms_raw:
        raise InvalidArgumentError("config needs a non-empty 'arms' list")
    arms = []
    for i, arm in enumerate(arms_raw):
        arm = _check_keys(arm, _ARM_KEYS, f"arms[{i}]")
        if "input" not in arm or "selectors" not in arm:
            raise InvalidArgumentError(f"arms[{i}] needs 'input' and 'selectors'")
        try:
            arms.append(Arm(arm["input"], tuple(arm["selectors"])))
        except ValueError as exc:
            raise InvalidArgumentError(f"arms[{i}]: {exc}") from exc

    test = _check_keys(raw.get("test"), _TEST_KEYS, "test")
    grid = _check_keys(raw.get("time_grid"), _GRID_KEYS, "time_grid")
    time_grid = TimeGrid(
        t_min=float(grid.get("t_min", TimeGrid.t_min)),
        t_max=None if grid.get("t_max") is None else float(grid["t_max"]),
        points=int(grid.get("points", TimeGrid.points)),
        spacing=str(grid.get("spacing", TimeGrid.spacing)),
    )
    sizes = sweep.get("N", [DEFAULT_N])
    sizes = sizes if isinstance(sizes, (list, tuple)) else [sizes]
    if any(int(N) != N for N in sizes):
        raise InvalidArgumentError("sweep.N must be integers")
    return ScenarioConfig(
        arms=tuple(arms),
        system=system,
        csl=csl,
        csl_two_pi=two_pi,
        deltas=deltas,
        photons=_float_list(sweep.get("n", [DEFAULT_PHOTONS]), "sweep.n"),
        phis=_float_list(sweep.get("phi", [math.pi]), "sweep.phi"),
        sample_sizes=tuple(int(N) for N in sizes),
        alpha=float(test.get("alpha", DEFAULT_ALPHA)),
        time_grid=time_grid,
        seed=int(raw.get("seed", 0)),
        name=name,
    )


def load(path):
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    stem = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return from_dict(raw, name=stem)
