"""
Run configuration files: flat ``key = value`` lines, ``#`` starts a comment.

Required keys: p1 p2 gamma1 gamma2 delta1 delta2 d.
Optional keys: q, delay (default "0"), steps, n_min, n_max, tol,
scan_points, sign (paper|corrected), out.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Union

from .errors import ConfigError, ExpressionError
from .expression import parse
from .problem import ProblemSpec, validate
from .shooting import IntegratorConfig
from .spectrum import DEFAULT_SCAN_POINTS, DEFAULT_TOL

REQUIRED = ("p1", "p2", "gamma1", "gamma2", "delta1", "delta2", "d")
OPTIONAL = ("q", "delay", "steps", "n_min", "n_max", "tol", "scan_points", "sign", "out")
BUNDLED = ("C0", "C1", "C2")


@dataclass(frozen=True)
class RunConfig:
    spec: ProblemSpec
    integrator: IntegratorConfig
    n_min: int = 5
    n_max: int = 20
    tol: float = DEFAULT_TOL
    scan_points: int = DEFAULT_SCAN_POINTS
    sign: str = "corrected"
    output_dir: Path = Path(".")
    name: str = ""

    def __post_init__(self):
        if self.n_min > self.n_max:
            raise ConfigError(f"n_min={self.n_min} exceeds n_max={self.n_max}")
        if self.n_min < 1:
            raise ConfigError("n_min must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.sign not in ("paper", "corrected"):
            raise ConfigError(f"sign must be 'paper' or 'corrected', got {self.sign!r}")


def parse_pairs(text: str) -> Dict[str, str]:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in REQUIRED and key not in OPTIONAL:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _number(pairs, key, kind=float):
    try:
        return kind(pairs[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot read {pairs[key]!r} as {kind.__name__}") from None


def parse_config(text: str, name: str = "") -> RunConfig:
    """Build and validate a :class:`RunConfig` from config-file text.

    Raises ConfigError for format problems and the problem's ValidationError
    subclasses when the parameters violate the standing assumptions.
    """
    pairs = parse_pairs(text)
    for key in REQUIRED:
        if key not in pairs:
            raise ConfigError(f"missing required key {key!r}")
    exprs = {}
    for key in ("q", "delay"):
        try:
            exprs[key] = parse(pairs.get(key, "0"))
        except ExpressionError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from exc
    spec = ProblemSpec.build(*(_number(pairs, k) for k in REQUIRED),
                             q=exprs["q"], delay=exprs["delay"])
    validate(spec)
    opts = {}
    if "steps" in pairs:
        opts["integrator"] = IntegratorConfig(steps_per_piece=_number(pairs, "steps", int))
    else:
        opts["integrator"] = IntegratorConfig()
    for key in ("n_min", "n_max", "scan_points"):
        if key in pairs:
            opts[key] = _number(pairs, key, int)
    if "tol" in pairs:
        opts["tol"] = _number(pairs, "tol")
    if "sign" in pairs:
        opts["sign"] = pairs["sign"]
    if "out" in pairs:
        opts["output_dir"] = Path(pairs["out"])
    return RunConfig(spec=spec, name=name, **opts)


def bundled_config_text(name: str) -> str:
    if name not in BUNDLED:
        raise ConfigError(f"no bundled config named {name!r}; choose from {', '.join(BUNDLED)}")
    return resources.files(__package__).joinpath("configs", f"{name}.cfg").read_text()


def load_config(source: Union[str, Path]) -> RunConfig:
    """Read a config file, or a bundled reference config by name (C0, C1, C2)."""
    path = Path(source)
    if path.is_file():
        return parse_config(path.read_text(), name=path.stem)
    if str(source) in BUNDLED:
        return parse_config(bundled_config_text(str(source)), name=str(source))
    raise ConfigError(f"config file not found: {source}")


def reference_spec(name: str) -> ProblemSpec:
    return parse_config(bundled_config_text(name), name=name).spec
