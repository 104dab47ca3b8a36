"""Line-oriented run configuration: [section] headers and key = value pairs.

The schema is closed: unknown keys are rejected, defaults fill anything not
given, and parse -> serialize -> parse is the identity on the typed config.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import MissingSectionError, ParseError, UnknownKeyError

__all__ = ["RunConfig", "parse_config", "parse_config_text", "serialize_config"]


@dataclass(frozen=True)
class ModelCfg:
    m: float = 2.0
    p: float = 2.0
    N: int = 1
    reaction_kind: str = "monostable"
    reaction_a: float = 0.0
    reaction_q: float | None = None
    reaction_k: float = 1.0


@dataclass(frozen=True)
class WaveCfg:
    gamma: float = 0.0
    gammas: tuple = (0.0, 0.02, 0.04, 0.06, 0.08, 0.1)
    tol: float = 1e-6
    profile_points: int = 2400


@dataclass(frozen=True)
class SimCfg:
    geometry: str = "radial"        # radial | line
    R: float = 30.0                 # radius, or half-width for line grids
    dr: float = 0.02
    T: float = 10.0
    left_bc: str = "dirichlet0"     # line grids only
    datum: str = "plateau"          # plateau | kanel | tw | left_plateau | box
    rho: float = 5.0
    eta: float = 0.9
    c: float = 0.5
    delta: float = 0.1
    sigma: float = 3.0
    beta: float = 2.0
    radius: float = 1.0
    x0: float = 0.0
    height: float = 0.8
    level: float = 0.9
    edge: float = 0.0
    width: float = 1.0
    sample_every: float = 0.5
    snapshots: tuple = ()
    record_center: bool = True


@dataclass(frozen=True)
class AnalyzeCfg:
    window_fraction: float = 0.5
    spread_level: float = 0.95
    vanish_level: float = 0.01
    probe_fraction: float = 0.25
    tau: float = 1.0


@dataclass(frozen=True)
class SweepCfg:
    command: str = "simulate"
    vary: tuple = ()   # tuple of (dotted key, tuple of string values)


@dataclass(frozen=True)
class RunConfig:
    model: ModelCfg = field(default_factory=ModelCfg)
    wave: WaveCfg = field(default_factory=WaveCfg)
    sim: SimCfg = field(default_factory=SimCfg)
    analyze: AnalyzeCfg = field(default_factory=AnalyzeCfg)
    output_dir: str = "out"
    sweep: SweepCfg = field(default_factory=SweepCfg)


# file key -> (section dataclass attribute, converter tag)
_SCHEMA = {
    "model": {
        "m": ("m", "float"), "p": ("p", "float"), "N": ("N", "int"),
        "reaction.kind": ("reaction_kind", "str"),
        "reaction.a": ("reaction_a", "float"),
        "reaction.q": ("reaction_q", "float"),
        "reaction.k": ("reaction_k", "float"),
    },
    "wave": {
        "gamma": ("gamma", "float"), "gammas": ("gammas", "floats"),
        "tol": ("tol", "float"), "profile_points": ("profile_points", "int"),
    },
    "sim": {
        "geometry": ("geometry", "str"), "R": ("R", "float"), "dr": ("dr", "float"),
        "T": ("T", "float"), "left_bc": ("left_bc", "str"), "datum": ("datum", "str"),
        "datum.rho": ("rho", "float"), "datum.eta": ("eta", "float"),
        "datum.c": ("c", "float"), "datum.delta": ("delta", "float"),
        "datum.sigma": ("sigma", "float"), "datum.beta": ("beta", "float"),
        "datum.radius": ("radius", "float"), "datum.x0": ("x0", "float"),
        "datum.height": ("height", "float"), "datum.level": ("level", "float"),
        "datum.edge": ("edge", "float"), "datum.width": ("width", "float"),
        "sample_every": ("sample_every", "float"),
        "snapshots": ("snapshots", "floats"),
        "record_center": ("record_center", "bool"),
    },
    "analyze": {
        "window_fraction": ("window_fraction", "float"),
        "spread_level": ("spread_level", "float"),
        "vanish_level": ("vanish_level", "float"),
        "probe_fraction": ("probe_fraction", "float"),
        "tau": ("tau", "float"),
    },
    "output": {"dir": ("output_dir", "str")},
    "sweep": {"command": ("command", "str")},
}

_SECTION_ATTR = {"model": "model", "wave": "wave", "sim": "sim",
                 "analyze": "analyze", "sweep": "sweep"}


def _convert(tag: str, raw: str, line_no: int):
    try:
        if tag == "float":
            return float(raw)
        if tag == "int":
            return int(raw)
        if tag == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if tag == "floats":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError as exc:
        raise ParseError(line_no, f"cannot parse value {raw!r} as {tag}") from exc


def parse_config_text(text: str) -> RunConfig:
    section = None
    seen = set()
    sections_seen = set()
    values: dict = {name: {} for name in _SCHEMA}
    vary: list = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(line_no, "unterminated section header")
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise UnknownKeyError(f"line {line_no}: unknown section [{section}]")
            sections_seen.add(section)
            continue
        if "=" not in line:
            raise ParseError(line_no, "expected key = value")
        if section is None:
            raise ParseError(line_no, "key outside any [section]")
        key, raw_val = (s.strip() for s in line.split("=", 1))
        if (section, key) in seen:
            raise ParseError(line_no, f"duplicate key {key!r} in [{section}]")
        seen.add((section, key))
        if section == "sweep" and key.startswith("vary."):
            vary.append((key[len("vary."):],
                         tuple(v.strip() for v in raw_val.split(",") if v.strip())))
            continue
        if key not in _SCHEMA[section]:
            raise UnknownKeyError(f"line {line_no}: unknown key {key!r} in [{section}]")
        attr, tag = _SCHEMA[section][key]
        values[section][attr] = _convert(tag, raw_val, line_no)

    if "model" not in sections_seen:
        raise MissingSectionError("configuration must contain a [model] section")

    cfg = RunConfig(
        model=ModelCfg(**values["model"]),
        wave=WaveCfg(**values["wave"]),
        sim=SimCfg(**values["sim"]),
        analyze=AnalyzeCfg(**values["analyze"]),
        output_dir=values["output"].get("output_dir", "out"),
        sweep=SweepCfg(command=values["sweep"].get("command", "simulate"),
                       vary=tuple(vary)),
    )
    # validate the sweep targets against the schema
    for dotted, _ in cfg.sweep.vary:
        sec, _, key = dotted.partition(".")
        if sec not in _SCHEMA or key not in _SCHEMA[sec]:
            raise UnknownKeyError(f"sweep target {dotted!r} is not a config key")
    return cfg


def parse_config(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise MissingSectionError(f"config file not found: {p}")
    return parse_config_text(p.read_text())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text with every resolved value; round-trips through parse."""
    out = []
    for section, keys in _SCHEMA.items():
        body = []
        holder = cfg if section == "output" else getattr(cfg, _SECTION_ATTR.get(section, section), cfg)
        for file_key, (attr, _tag) in keys.items():
            value = getattr(holder, attr)
            if value is None:
                continue
            body.append(f"{file_key} = {_fmt(value)}")
        if section == "sweep":
            for dotted, vals in cfg.sweep.vary:
                body.append(f"vary.{dotted} = {', '.join(vals)}")
        out.append(f"[{section}]")
        out.extend(body)
        out.append("")
    return "\n".join(out)


def flatten_config(cfg: RunConfig) -> dict:
    """config.<section>.<key> = value entries for the meta sidecar."""
    out = {}
    for section, keys in _SCHEMA.items():
        holder = cfg if section == "output" else getattr(cfg, _SECTION_ATTR[section])
        for file_key, (attr, _tag) in keys.items():
            value = getattr(holder, attr)
            if value is not None:
                out[f"config.{section}.{file_key}"] = _fmt(value)
    for dotted, vals in cfg.sweep.vary:
        out[f"config.sweep.vary.{dotted}"] = ", ".join(vals)
    return out


def apply_override(cfg: RunConfig, dotted: str, raw_value: str) -> RunConfig:
    """Return a config with one dotted key replaced (used by sweeps)."""
    sec, _, key = dotted.partition(".")
    attr, tag = _SCHEMA[sec][key]
    value = _convert(tag, raw_value, 0)
    if sec == "output":
        return replace(cfg, output_dir=value)
    holder_name = _SECTION_ATTR[sec]
    holder = getattr(cfg, holder_name)
    return replace(cfg, **{holder_name: replace(holder, **{attr: value})})
