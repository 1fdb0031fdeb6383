"""Flat `key = value` experiment configuration files.

Lines hold one `key = value` pair; `#` starts a comment; nested concepts
use dotted keys (`protocol.kind` is fixed by the protocol list instead,
see `protocols`). Unknown keys are rejected. Missing keys take the
defaults below (field, BS, node count, packet size and energy cap follow
the standard desk-scale setup).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

from .energy import EnergyModel, Position
from .engine import ConfigError, NetworkConfig
from .protocols import ProtocolKind, ProtocolSpec

VARIANTS = [
    "leach", "leach-ach",
    "sep", "sep-ach",
    "teen", "teen-ach",
    "deec", "deec-ach",
]

_KEY_TYPES = {
    "field_width": float,
    "field_height": float,
    "n_nodes": int,
    "bs.x": float,
    "bs.y": float,
    "packet_bits": int,
    "max_rounds": int,
    "seed": int,
    "seeds": int,
    "seed_list": str,
    "protocols": str,
    "out_dir": str,
    "jobs": int,
    "protocol.popt": float,
    "protocol.sep_a": float,
    "protocol.sep_m": float,
    "protocol.teen_hard": float,
    "protocol.teen_soft": float,
    "ach.min_dist": float,
    "energy.e_elec": float,
    "energy.eps_fs": float,
    "energy.eps_mp": float,
    "energy.e_da": float,
    "initial_energy_normal": float,
}

_ALIASES = {
    "ach_min_dist": "ach.min_dist",
}


@dataclass
class ExperimentSpec:
    """A batch of runs: protocol variants x seeds over one base config."""

    base: NetworkConfig = field(default_factory=NetworkConfig)
    variants: list[str] = field(default_factory=lambda: ["leach"])
    seeds: list[int] = field(default_factory=lambda: [1])
    out_dir: Path = field(default_factory=lambda: Path(os.environ.get("WSN_SIM_OUT", "out")))
    jobs: int = 1

    def validate(self):
        if not self.variants:
            raise ConfigError("protocols must name at least one variant")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(
                    f"protocols: unknown variant '{v}' (expected one of {', '.join(VARIANTS)})"
                )
        if not self.seeds:
            raise ConfigError("seeds must be >= 1")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f"seed_list entries must be distinct, got {self.seeds}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        self.base.validate()

    def config_for(self, variant: str, seed: int) -> NetworkConfig:
        """The concrete per-run config for one (variant, seed) cell."""
        kind = ProtocolKind(variant.removesuffix("-ach"))
        protocol = dataclasses.replace(
            self.base.protocol, kind=kind, ach_enabled=variant.endswith("-ach")
        )
        return dataclasses.replace(self.base, protocol=protocol, seed=seed)


def _parse_lines(lines) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
        key, _, val = line.partition("=")
        key = key.strip()
        key = _ALIASES.get(key, key)
        val = val.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        try:
            values[key] = _KEY_TYPES[key](val)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: invalid {_KEY_TYPES[key].__name__} for '{key}': '{val}'"
            ) from None
    return values


def _build_spec(values: dict[str, object]) -> ExperimentSpec:
    defaults = NetworkConfig()

    def get(key, fallback):
        return values.get(key, fallback)

    energy = EnergyModel(
        e_elec=get("energy.e_elec", defaults.energy.e_elec),
        eps_fs=get("energy.eps_fs", defaults.energy.eps_fs),
        eps_mp=get("energy.eps_mp", defaults.energy.eps_mp),
        e_da=get("energy.e_da", defaults.energy.e_da),
    )
    protocol = ProtocolSpec(
        popt=get("protocol.popt", defaults.protocol.popt),
        sep_a=get("protocol.sep_a", defaults.protocol.sep_a),
        sep_m=get("protocol.sep_m", defaults.protocol.sep_m),
        teen_hard=get("protocol.teen_hard", defaults.protocol.teen_hard),
        teen_soft=get("protocol.teen_soft", defaults.protocol.teen_soft),
        ach_min_dist=get("ach.min_dist", defaults.protocol.ach_min_dist),
    )
    base = NetworkConfig(
        field_width=get("field_width", defaults.field_width),
        field_height=get("field_height", defaults.field_height),
        n_nodes=get("n_nodes", defaults.n_nodes),
        bs_position=Position(
            get("bs.x", defaults.bs_position.x), get("bs.y", defaults.bs_position.y)
        ),
        packet_bits=get("packet_bits", defaults.packet_bits),
        max_rounds=get("max_rounds", defaults.max_rounds),
        seed=get("seed", defaults.seed),
        protocol=protocol,
        energy=energy,
        initial_energy_normal=get("initial_energy_normal", defaults.initial_energy_normal),
    )

    if "seed_list" in values:
        try:
            seeds = [int(s) for s in str(values["seed_list"]).split(",") if s.strip()]
        except ValueError:
            raise ConfigError(f"seed_list: expected comma-separated integers, got '{values['seed_list']}'") from None
    else:
        n_seeds = values.get("seeds", 1)
        if n_seeds < 1:
            raise ConfigError(f"seeds must be >= 1, got {n_seeds}")
        seeds = [base.seed + i for i in range(n_seeds)]

    variants = [v.strip() for v in str(values.get("protocols", "leach")).split(",") if v.strip()]
    out_dir = Path(values.get("out_dir", os.environ.get("WSN_SIM_OUT", "out")))

    spec = ExperimentSpec(
        base=base,
        variants=variants,
        seeds=seeds,
        out_dir=out_dir,
        jobs=values.get("jobs", 1),
    )
    spec.validate()
    return spec


def parse_config(path) -> ExperimentSpec:
    """Parse and validate an experiment config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return _build_spec(_parse_lines(text.splitlines()))


def write_resolved_config(spec: ExperimentSpec, path) -> None:
    """Echo every resolved value; re-parsing the file reproduces the spec."""
    b = spec.base
    lines = [
        "# resolved experiment configuration",
        f"field_width = {b.field_width!r}",
        f"field_height = {b.field_height!r}",
        f"n_nodes = {b.n_nodes}",
        f"bs.x = {b.bs_position.x!r}",
        f"bs.y = {b.bs_position.y!r}",
        f"packet_bits = {b.packet_bits}",
        f"max_rounds = {b.max_rounds}",
        f"seed = {b.seed}",
        f"seed_list = {','.join(str(s) for s in spec.seeds)}",
        f"protocols = {','.join(spec.variants)}",
        f"out_dir = {spec.out_dir}",
        f"jobs = {spec.jobs}",
        f"protocol.popt = {b.protocol.popt!r}",
        f"protocol.sep_a = {b.protocol.sep_a!r}",
        f"protocol.sep_m = {b.protocol.sep_m!r}",
        f"protocol.teen_hard = {b.protocol.teen_hard!r}",
        f"protocol.teen_soft = {b.protocol.teen_soft!r}",
        f"ach.min_dist = {b.protocol.ach_min_dist!r}",
        f"energy.e_elec = {b.energy.e_elec!r}",
        f"energy.eps_fs = {b.energy.eps_fs!r}",
        f"energy.eps_mp = {b.energy.eps_mp!r}",
        f"energy.e_da = {b.energy.e_da!r}",
        f"initial_energy_normal = {b.initial_energy_normal!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")
