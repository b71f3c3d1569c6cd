"""Run reports: canonical JSON envelopes for every CLI command.

A report embeds its full input echo, so any run can be reproduced from the
report alone. Serialization is canonical (sorted keys, fixed separators):
two runs with the same flags and seed produce byte-identical reports except
for the wall_time_ms field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = "1"


def _jsonify(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class Check:
    name: str
    passed: bool
    observed: float
    bound: float
    tolerance: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "observed": _jsonify(self.observed),
            "bound": _jsonify(self.bound),
            "tolerance": _jsonify(self.tolerance),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Check":
        return cls(doc["name"], doc["pass"], doc["observed"], doc["bound"], doc["tolerance"])


@dataclass
class Report:
    command: str
    inputs: dict
    seeds: list
    results: dict
    checks: list = field(default_factory=list)
    wall_time_ms: int = 0
    version: str = SCHEMA_VERSION

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": _jsonify(self.inputs),
            "seeds": [int(s) for s in self.seeds],
            "results": _jsonify(self.results),
            "checks": [c.to_json() for c in self.checks],
            "wall_time_ms": int(self.wall_time_ms),
            "version": self.version,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: dict) -> "Report":
        return cls(
            command=doc["command"],
            inputs=doc["inputs"],
            seeds=list(doc["seeds"]),
            results=doc["results"],
            checks=[Check.from_json(c) for c in doc["checks"]],
            wall_time_ms=doc["wall_time_ms"],
            version=doc["version"],
        )

    @classmethod
    def loads(cls, text: str) -> "Report":
        return cls.from_json(json.loads(text))

    def write_csv(self, path: str):
        """Checks (and tabular results) flattened to CSV."""
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "pass", "observed", "bound", "tolerance"])
            for c in self.checks:
                writer.writerow([c.name, c.passed, c.observed, c.bound, c.tolerance])
            rows = self.results.get("table")
            if rows:
                writer.writerow([])
                keys = list(rows[0].keys())
                writer.writerow(keys)
                for row in rows:
                    writer.writerow([row[k] for k in keys])
