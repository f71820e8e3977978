# cli/run_config.py
# Run configuration: built-in defaults (config.py) < key-value config file < flags.
from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from dotenv import dotenv_values

import config


def parse_vector(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_box(text: str) -> Tuple[Tuple[float, float], ...]:
    """'lo:hi,lo:hi,...'; a single interval is repeated for every axis."""
    out = []
    for part in str(text).split(","):
        bounds = part.split(":")
        if len(bounds) != 2:
            raise argparse.ArgumentTypeError(f"box intervals look like lo:hi, got {part!r}")
        try:
            out.append((float(bounds[0]), float(bounds[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(f"box bounds must be numbers, got {part!r}") from None
    return tuple(out)


def parse_counts(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    command: str = ""
    manifold: Optional[str] = None
    center: Optional[Tuple[float, ...]] = None
    box: Optional[Tuple[Tuple[float, float], ...]] = None
    centers_per_axis: Tuple[int, ...] = (config.DEFAULT_CENTERS_PER_AXIS,)
    nodes_per_axis: int = config.DEFAULT_NODES_PER_AXIS
    seeds_per_axis: int = config.DEFAULT_SEEDS_PER_AXIS
    tau: float = config.DEFAULT_TAU
    tau_newton: float = config.DEFAULT_TAU_NEWTON
    delta: float = config.DEFAULT_DELTA
    seed: int = config.DEFAULT_SEED
    trials: int = config.DEFAULT_TRIALS
    instances: int = config.DEFAULT_DICHOTOMY_INSTANCES
    linking_radius: Optional[float] = None
    output: Optional[str] = None
    table: Optional[str] = None
    point_cloud: Optional[str] = None
    example: Optional[str] = None
    count: Optional[int] = None
    eps: Optional[float] = None
    n: Optional[int] = None
    d: Optional[int] = None
    scale: Optional[float] = None
    spacing: float = 1.0

    def validate(self) -> "RunConfig":
        problems = []
        for name in ("tau", "tau_newton", "delta"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be positive")
        if self.nodes_per_axis < config.MIN_NODES_PER_AXIS:
            problems.append(f"nodes_per_axis must be >= {config.MIN_NODES_PER_AXIS}")
        if self.seeds_per_axis < 2:
            problems.append("seeds_per_axis must be >= 2")
        if any(c < config.MIN_CENTERS_PER_AXIS for c in self.centers_per_axis):
            problems.append(f"centers_per_axis must be >= {config.MIN_CENTERS_PER_AXIS}")
        if self.trials < 1 or self.instances < 1:
            problems.append("trials and instances must be >= 1")
        if self.linking_radius is not None and not self.linking_radius > 0:
            problems.append("linking_radius must be positive")
        if self.eps is not None and not self.eps > 0:
            problems.append("eps must be positive")
        if problems:
            raise ValueError(f"invalid run configuration: {'; '.join(problems)}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "manifold": str,
    "center": parse_vector,
    "box": parse_box,
    "centers_per_axis": parse_counts,
    "nodes_per_axis": int,
    "seeds_per_axis": int,
    "tau": float,
    "tau_newton": float,
    "delta": float,
    "seed": int,
    "trials": int,
    "instances": int,
    "linking_radius": float,
    "output": str,
    "table": str,
    "point_cloud": str,
    "example": str,
    "count": int,
    "eps": float,
    "n": int,
    "d": int,
    "scale": float,
    "spacing": float,
}


def load_config_file(path: Path) -> Dict[str, Any]:
    """Key-value file (KEY=value per line); keys are RunConfig field names, any case."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    values: Dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        if name not in _PARSERS:
            raise ValueError(f"{path}: unknown config key {key!r}")
        if raw is None or raw == "":
            continue
        try:
            values[name] = _PARSERS[name](raw)
        except (ValueError, argparse.ArgumentTypeError) as e:
            raise ValueError(f"{path}: bad value for {key!r}: {e}") from e
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=getattr(args, "command", "") or "")
    config_file = getattr(args, "config", None)
    if config_file:
        cfg = replace(cfg, **load_config_file(config_file))
    names = {f.name for f in fields(RunConfig)} - {"command"}
    overrides = {k: v for k, v in vars(args).items() if k in names and v is not None}
    return replace(cfg, **overrides).validate()
