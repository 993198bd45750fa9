"""Run configuration shared by every subcommand."""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..core.errors import ConfigurationError, FlagError, InputError, UnknownCommandError

COMMANDS = ("solve", "eigen", "flow", "verify-linear", "transform", "diagnose", "oracle")
DIAGNOSTICS = ("exponent", "radius", "induction", "cl1", "curvature")
INPUT_REQUIRED = {("transform", None), ("diagnose", "induction")}


@dataclass
class RunConfig:
    """Every flag of every subcommand, with the defaults the CLI uses.

    Args:
        command: Subcommand name
        out_dir: Directory receiving dumps, tables and the manifest
        threads: Requested worker count (DEGMA_THREADS wins)
        seed: Master seed for random ensembles
    """

    command: str
    out_dir: str = "degma-out"
    threads: Optional[int] = None
    seed: int = 0
    verbose: bool = False

    # nonlinear solver
    q: float = 1.0
    lam: float = 1.0
    domain: List[float] = field(default_factory=lambda: [1.0, 1.0])
    nr: int = 64
    ntheta: int = 64
    tol: float = 1e-10
    max_iter: int = 60

    # flow
    dt: float = 1.0
    steps: int = 1000
    scheme: str = "linearly-implicit"
    residual_stop: float = 1e-6

    # linear model
    m: Optional[int] = None
    k: int = 0
    modes: int = 32
    vertical: int = 64
    samples: int = 10
    grid: str = "fd"
    algebra: bool = False

    # transforms and diagnostics
    input: Optional[str] = None
    point: float = 0.0
    delta: float = 0.1
    what: str = "exponent"
    qmax: int = 3
    n_max: int = 10
    r: Optional[float] = None
    pmax: int = 40
    bmax: int = 5
    d: Optional[int] = None

    # radial oracle
    mode: str = "dirichlet"
    radius: float = 1.0
    method: str = "DOP853"
    rtol: float = 1e-12

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UnknownCommandError(f"Unknown subcommand '{self.command}'", {"known": list(COMMANDS)})
        if len(self.domain) != 2:
            raise ConfigurationError("Domain takes two semi-axes a,b", {"domain": self.domain})
        self.domain = [float(v) for v in self.domain]
        for name in ("tol", "rtol", "residual_stop", "dt", "delta", "lam", "radius"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive", {name: getattr(self, name)})
        if self.command == "diagnose" and self.what not in DIAGNOSTICS:
            raise FlagError(f"Unknown diagnostic '{self.what}'", {"known": list(DIAGNOSTICS)})
        what = self.what if self.command == "diagnose" else None
        if (self.command, what) in INPUT_REQUIRED and not self.input:
            raise FlagError(f"'{self.command}' needs --input", {"what": what})
        if self.input and self.command in ("solve", "eigen", "verify-linear", "oracle"):
            raise FlagError(f"'{self.command}' takes no --input", {"input": self.input})
        if self.input and not Path(self.input).exists():
            raise InputError(f"Missing input file {self.input}", {"path": self.input})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=4, sort_keys=True) + "\n"

    def canonical(self) -> str:
        """Compact sorted JSON without the presentation-only fields."""
        data = {k: v for k, v in self.to_dict().items() if k not in ("verbose", "out_dir")}
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise FlagError("Unknown configuration keys", {"keys": unknown})
        return cls(**data)

    @classmethod
    def from_json(cls, source: Union[str, Path]) -> "RunConfig":
        """Parse a JSON document, or read it from a path."""
        text = str(source)
        if not text.lstrip().startswith("{"):
            path = Path(text)
            if not path.exists():
                raise InputError(f"Missing config file {path}", {"path": str(path)})
            text = path.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("Config is not valid JSON", {"reason": str(exc)}) from exc
        return cls.from_dict(data)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """Defaults, then the --config file, then every flag given on the command line."""
        data: Dict[str, Any] = {}
        config_path = getattr(args, "config", None)
        if config_path:
            data.update(cls.from_json(config_path).to_dict())
        for f in fields(cls):
            value = getattr(args, f.name, None)
            if value is not None:
                data[f.name] = value
        data["command"] = getattr(args, "command", None) or data.get("command")
        if not data["command"]:
            raise UnknownCommandError("No subcommand given", {"known": list(COMMANDS)})
        return cls.from_dict(data)
