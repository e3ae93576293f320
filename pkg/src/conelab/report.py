"""Report records, JSON emission and plot-data export."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1
TIMING_KEY = "timing"


@dataclass
class Check:
    name: str
    lhs: float
    rhs: float
    passed: bool
    hard: bool = True
    note: str = ""

    @property
    def ratio(self) -> float | None:
        if self.rhs == 0:
            return None if self.lhs != 0 else 0.0
        return self.lhs / self.rhs

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "passed": bool(self.passed), "hard": self.hard, "note": self.note}


@dataclass
class Report:
    command: str
    config: dict
    checks: list = dc_field(default_factory=list)
    constants: dict = dc_field(default_factory=dict)
    data: dict = dc_field(default_factory=dict)
    flags: list = dc_field(default_factory=list)
    started: float = dc_field(default_factory=time.perf_counter)
    elapsed: dict = dc_field(default_factory=dict)

    def check(self, name, lhs, rhs, passed, hard=True, note="") -> Check:
        c = Check(name, _num(lhs), _num(rhs), bool(passed), hard, note)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.hard)

    def as_dict(self) -> dict:
        timing = dict(self.elapsed)
        timing["total_seconds"] = time.perf_counter() - self.started
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": _plain(self.config),
            "checks": [c.as_dict() for c in self.checks],
            "constants": _plain(self.constants),
            "data": _plain(self.data),
            "flags": list(self.flags),
            "passed": self.passed,
            TIMING_KEY: timing,
        }

    def to_json(self) -> str:
        return dumps(self.as_dict())


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _plain(obj):
    """Recursively convert numpy and Fraction values to JSON-ready types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def strip_timing(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if k != TIMING_KEY}


def _sweeps(report: dict) -> list[dict]:
    data = report.get("data", report)
    if data.get("kind") == "restriction-sweep":
        return [data]
    found = [v for v in data.values() if isinstance(v, dict) and v.get("kind") == "restriction-sweep"]
    if not found:
        raise ValueError("report contains no restriction sweep")
    return found


def export_plot_data(report: dict, path) -> int:
    """Write (q, max_ratio, per-family maxima...) rows; returns the row count."""
    sweep = _sweeps(report)[0]
    rows = sweep.get("per_q", [])
    families = sorted({fam for row in rows for fam in row.get("families", {})})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "max_ratio"] + [f"{fam}_max_ratio" for fam in families])
        for row in rows:
            fams = row.get("families", {})
            w.writerow([row["q"], repr(float(row["max_ratio"]))]
                       + [repr(float(fams[f])) if f in fams else "" for f in families])
    return len(rows)
