"""Strict JSON ingestion for analysis configs and design files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Any, Optional

from jsonschema import Draft202012Validator

from .model import (
    STANDARD,
    Accumulation,
    AmbientReference,
    HeatBath,
    PhysicalConstants,
    ProcessTimeline,
    SecondLawError,
    Stream,
    SystemSnapshot,
    validate_timeline,
)
from .variational import TEMPLATES, DesignSpace, Objective, Parameter, Viewpoint

CONFIG_SCHEMA = "analysis-config-v1.json"
DESIGN_SCHEMA = "design-v1.json"


class ConfigError(SecondLawError):
    """Input document rejected; ``path`` locates the offending node."""

    def __init__(self, code: str, message: str, path: str = "", line: Optional[int] = None, column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        where = f" at {path}" if path else ""
        if line is not None:
            where += f" (line {line}, column {column})"
        super().__init__(code, f"{message}{where}")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(resources.files("secondlaw").joinpath("schemas", name).read_text(encoding="utf-8"))


def format_path(parts) -> str:
    out = ""
    for part in parts:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("syntax_error", exc.msg, line=exc.lineno, column=exc.colno) from None


def _check_schema(doc: Any, schema_name: str) -> None:
    validator = Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.validator))
    if not errors:
        return
    unknown = [e for e in errors if e.validator == "additionalProperties"]
    if unknown:
        err = unknown[0]
        raise ConfigError("unknown_field", err.message, path=format_path(err.absolute_path))
    err = errors[0]
    raise ConfigError("schema_violation", err.message, path=format_path(err.absolute_path))


@dataclass(frozen=True)
class AnalysisConfig:
    ambient: AmbientReference
    timeline: ProcessTimeline
    mass_closed: bool = False
    stationary: bool = False
    constants: PhysicalConstants = STANDARD
    g_override: Optional[float] = None
    version: str = "1"
    source: dict = field(default_factory=dict, compare=False, repr=False)


def _snapshot(raw: dict, ambient: AmbientReference, stationary: bool, mass_closed: bool) -> SystemSnapshot:
    acc = raw.get("accumulation", {})
    return SystemSnapshot(
        t=float(raw["t"]),
        ambient=ambient,
        streams=tuple(
            Stream(
                name=st["name"],
                direction=st["direction"],
                G=float(st["G"]),
                h=float(st["h"]),
                s=float(st["s"]),
                v=float(st.get("v", 0.0)),
                z=float(st.get("z", 0.0)),
            )
            for st in raw.get("streams", [])
        ),
        baths=tuple(HeatBath(b["name"], float(b["T"]), float(b["Qdot"])) for b in raw.get("baths", [])),
        accumulation=Accumulation(dSdt=float(acc.get("dSdt", 0.0)), dEdt=float(acc.get("dEdt", 0.0))),
        Wdot_effective_declared=None if raw.get("Wdot_effective_declared") is None else float(raw["Wdot_effective_declared"]),
        stationary=stationary,
        mass_closed=mass_closed,
    )


def parse_config(text: str) -> AnalysisConfig:
    """Parse and validate a version-1 analysis config.

    Raises ``ConfigError`` with code ``syntax_error``, ``unknown_field`` or
    ``schema_violation``.  Physical invariants (time grid, positive
    temperatures, mass closure, stationary accumulation) are checked after the
    schema and reported as ``schema_violation`` at the failing node.
    """
    doc = _load_json(text)
    _check_schema(doc, CONFIG_SCHEMA)
    ambient = AmbientReference(float(doc["ambient"]["T_a"]))
    flags = doc.get("flags", {})
    stationary = bool(flags.get("stationary", False))
    mass_closed = bool(flags.get("mass_closed", False))
    g = doc.get("constants_override", {}).get("g")
    constants = STANDARD if g is None else replace(STANDARD, g=float(g))
    tl_raw = doc["timeline"]
    timeline = ProcessTimeline(
        tuple(_snapshot(s, ambient, stationary, mass_closed) for s in tl_raw["snapshots"]),
        float(tl_raw["tau"]),
    )
    report = validate_timeline(timeline)
    if not report.ok:
        v = report.violations[0]
        raise ConfigError("schema_violation", f"{v.code}: {v.message}", path=f"timeline.{v.path}")
    return AnalysisConfig(
        ambient=ambient,
        timeline=timeline,
        mass_closed=mass_closed,
        stationary=stationary,
        constants=constants,
        g_override=None if g is None else float(g),
        source=doc,
    )


def config_to_dict(cfg: AnalysisConfig) -> dict:
    """Canonical document for ``cfg``; ``parse_config(dump_config(cfg)) == cfg``."""
    snaps = []
    for snap in cfg.timeline.snapshots:
        snaps.append(
            {
                "t": snap.t,
                "streams": [
                    {"name": st.name, "direction": st.direction.value, "G": st.G, "h": st.h, "s": st.s, "v": st.v, "z": st.z}
                    for st in snap.streams
                ],
                "baths": [{"name": b.name, "T": b.T, "Qdot": b.Qdot} for b in snap.baths],
                "accumulation": {"dSdt": snap.accumulation.dSdt, "dEdt": snap.accumulation.dEdt},
                "Wdot_effective_declared": snap.Wdot_effective_declared,
            }
        )
    doc = {
        "version": cfg.version,
        "ambient": {"T_a": cfg.ambient.T_a},
        "flags": {"mass_closed": cfg.mass_closed, "stationary": cfg.stationary},
        "timeline": {"tau": cfg.timeline.tau, "snapshots": snaps},
    }
    if cfg.g_override is not None:
        doc["constants_override"] = {"g": cfg.g_override}
    return doc


def dump_config(cfg: AnalysisConfig) -> str:
    # repr-based floats round-trip exactly
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


@dataclass(frozen=True)
class DesignConfig:
    template: str
    space: DesignSpace
    viewpoint: Viewpoint = Viewpoint.SYSTEM
    objective: Objective = Objective.LOST_WORK

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.space.params]


def parse_design(text: str) -> DesignConfig:
    """Parse a design file naming a built-in template plus parameter bounds."""
    doc = _load_json(text)
    _check_schema(doc, DESIGN_SCHEMA)
    settings = dict(doc.get("settings", {}))
    if "ambient" in doc:
        settings["T_a"] = doc["ambient"]["T_a"]
    if "tau" in doc:
        settings["tau"] = doc["tau"]
    bounds = doc["bounds"]
    for i, b in enumerate(bounds):
        if not b["lower"] < b["upper"]:
            raise ConfigError("schema_violation", "lower bound must be below upper bound", path=f"bounds[{i}]")
    template = doc["template"]
    if template == "quadratic":
        settings.setdefault("center", [1.0] * len(bounds))
        if len(settings["center"]) != len(bounds):
            raise ConfigError("schema_violation", "quadratic center needs one entry per bound", path="settings.center")
    elif len(bounds) != 1:
        raise ConfigError("schema_violation", f"template {template!r} has exactly one parameter", path="bounds")
    try:
        space = TEMPLATES[template](**settings)
    except TypeError as exc:
        raise ConfigError("unknown_field", str(exc), path="settings") from None
    space = replace(space, params=tuple(Parameter(b["name"], float(b["lower"]), float(b["upper"])) for b in bounds))
    return DesignConfig(
        template=template,
        space=space,
        viewpoint=Viewpoint(doc.get("viewpoint", "system")),
        objective=Objective(doc.get("objective", "lost_work")),
    )
