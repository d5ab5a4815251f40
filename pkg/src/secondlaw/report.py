"""Audit reports and their table / JSON renderings."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from . import __version__
from .balance import GOUY_STODOLA_RTOL, BalanceResult, LifetimeResult, gouy_stodola_audit, lost_power
from .config import AnalysisConfig
from .microdynamics import bridge_check
from .model import SecondLawError


@dataclass(frozen=True)
class AuditWarning:
    code: str
    message: str
    t: Optional[float] = None


@dataclass(frozen=True)
class SnapshotRow:
    t: float
    balance: BalanceResult
    bridge_residual: Optional[float]  # None when the stationary bridge premises do not hold


@dataclass
class Report:
    rows: list[SnapshotRow]
    lifetime: LifetimeResult
    warnings: list[AuditWarning] = field(default_factory=list)
    config_sha256: str = ""
    tool_version: str = __version__

    @property
    def exit_code(self) -> int:
        return 1 if self.warnings else 0


def analyze(cfg: AnalysisConfig, source_text: str = "") -> Report:
    """Run the lifetime audit plus per-snapshot balances for a parsed config."""
    constants = cfg.constants
    rows = []
    warnings = []
    for snap in cfg.timeline.snapshots:
        bal = lost_power(snap, constants)
        if bal.negative_generation:
            warnings.append(
                AuditWarning("negative_entropy_generation", f"Sdot_g = {bal.Sdot_g:.6g} W/K < 0", snap.t)
            )
        try:
            bridge: Optional[float] = bridge_check(snap, constants)
        except SecondLawError as exc:
            if exc.code != "bridge_premises_unmet":
                warnings.append(AuditWarning(exc.code, exc.message, snap.t))
            bridge = None
        rows.append(SnapshotRow(snap.t, bal, bridge))

    lifetime = gouy_stodola_audit(cfg.timeline, constants)
    if lifetime.S_g < 0:
        warnings.append(AuditWarning("negative_entropy_generation", f"S_g = {lifetime.S_g:.6g} J/K < 0 over the lifetime"))
    if not lifetime.passes:
        warnings.append(
            AuditWarning(
                "gouy_stodola_residual",
                f"|W_lambda - T_a S_g| relative residual {lifetime.residual_gouy_stodola:.3g} exceeds {GOUY_STODOLA_RTOL:g}",
            )
        )
    digest = hashlib.sha256(source_text.encode("utf-8")).hexdigest()
    return Report(rows=rows, lifetime=lifetime, warnings=warnings, config_sha256=digest)


# -- rendering -----------------------------------------------------------------


def _num(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    return format(x, ".17g")


def _encode(obj: Any, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_encode(str(k))}: {_encode(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(obj: Any) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant digits."""
    return _encode(obj) + "\n"


def report_to_dict(r: Report) -> dict:
    lt = r.lifetime
    return {
        "provenance": {"tool": "secondlaw", "tool_version": r.tool_version, "config_sha256": r.config_sha256},
        "snapshots": [
            {
                "t": row.t,
                "Sdot_g": row.balance.Sdot_g,
                "Wdot_max": row.balance.Wdot_max,
                "Wdot_eff": row.balance.Wdot_eff,
                "Wdot_lost": row.balance.Wdot_lost,
                "Wdot_lost_entropy": row.balance.Wdot_lost_entropy,
                "route": row.balance.route.value,
                "declared_effective_power": row.balance.declared,
                "bridge_residual": row.bridge_residual,
            }
            for row in r.rows
        ],
        "lifetime": {
            "tau": lt.tau,
            "T_a": lt.T_a,
            "S_g": lt.S_g,
            "W_lambda": lt.W_lambda,
            "T_a_S_g": lt.T_a * lt.S_g,
            "delta_S_e": lt.delta_S_e,
            "residual_gouy_stodola": lt.residual_gouy_stodola,
            "residual_tolerance": GOUY_STODOLA_RTOL,
            "pass": lt.passes,
        },
        "warnings": [{"code": w.code, "message": w.message, "t": w.t} for w in r.warnings],
    }


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows]
    return lines


def report_to_table(r: Report) -> str:
    lt = r.lifetime
    headers = ["t [s]", "Sdot_g [W/K]", "Wdot_max [W]", "Wdot_eff [W]", "Wdot_lost [W]", "T_a*Sdot_g [W]", "bridge [W/K]"]
    rows = [
        [
            f"{row.t:.6g}",
            f"{row.balance.Sdot_g:.6g}",
            f"{row.balance.Wdot_max:.6g}",
            f"{row.balance.Wdot_eff:.6g}",
            f"{row.balance.Wdot_lost:.6g}",
            f"{row.balance.Wdot_lost_entropy:.6g}",
            "n/a" if row.bridge_residual is None else f"{row.bridge_residual:.3g}",
        ]
        for row in r.rows
    ]
    verdict = "PASS" if lt.passes else "FAIL"
    lines = ["Snapshots", *_table(headers, rows), "", "Lifetime"]
    lines += [
        f"tau  {lt.tau:.6g} s",
        f"T_a  {lt.T_a:.6g} K",
        f"S_g  {lt.S_g:.3f} J/K",
        f"W_lambda  {lt.W_lambda:.3f} J",
        f"T_a*S_g  {lt.T_a * lt.S_g:.3f} J",
        f"delta_S_e  {lt.delta_S_e:.3f} J/K",
        f"residual  {lt.residual_gouy_stodola:.3g}",
        f"residual ≤ {GOUY_STODOLA_RTOL:g}: {verdict}",
        "",
        "Warnings",
    ]
    lines += [f"{w.code}  {w.message}" + ("" if w.t is None else f" (t = {w.t:g} s)") for w in r.warnings] or ["none"]
    lines += ["", f"config sha256 {r.config_sha256}", f"secondlaw {r.tool_version}"]
    return "\n".join(lines) + "\n"


def emit_report(r: Report, format: str = "table") -> str:
    if format == "json":
        return to_json(report_to_dict(r))
    if format == "table":
        return report_to_table(r)
    raise ValueError(f"unknown format {format!r}")
