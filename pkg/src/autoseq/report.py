"""JSON report: assembly, canonical serialisation and schema validation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

from .strategy import TheoremTag, Verdict

SCHEMA_VERSION = 1

__all__ = ["Report", "SCHEMA_VERSION", "load_schema", "validate", "dumps"]


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (Fraction,)):
        return str(o)
    if isinstance(o, (tuple, set, frozenset)):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default, allow_nan=False) + "\n"


_SCHEMA = None


def load_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("autoseq").joinpath("report_schema.json").read_text(encoding="utf-8")
        _SCHEMA = json.loads(text)
    return _SCHEMA


def validate(doc: dict) -> None:
    """Schema check plus the theorem-tag whitelist; raises on the first problem."""
    jsonschema.validate(doc, load_schema())
    verdict = doc.get("verdict")
    if verdict:
        for item in verdict["evidence"]:
            TheoremTag.parse(item["tag"])


@dataclass
class Report:
    command: str
    input: dict
    config: dict
    verdict: dict | None = None
    payloads: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    tool: dict = field(default_factory=dict)

    @classmethod
    def build(cls, command: str, input: dict, config: dict, verdict: Verdict | None = None,
              payloads: dict | None = None, timings: dict | None = None) -> "Report":
        from . import __version__

        t = dict(timings or {})
        vd = None
        if verdict is not None:
            vd = verdict.to_dict()
            t.update(verdict.timings)
        # normalise through JSON so the in-memory form equals the parsed form
        doc = json.loads(dumps({
            "command": command, "input": input, "config": config, "verdict": vd,
            "payloads": payloads or {}, "timings": t,
            "tool": {"name": "autoseq", "version": __version__},
        }))
        return cls(**doc)

    def to_dict(self, with_timings: bool = True) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "tool": self.tool,
            "command": self.command,
            "input": self.input,
            "config": self.config,
            "verdict": self.verdict,
            "payloads": self.payloads,
        }
        if with_timings:
            doc["timings"] = self.timings
        return doc

    def to_json(self, with_timings: bool = True) -> str:
        doc = self.to_dict(with_timings)
        validate(doc)
        return dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        doc = json.loads(text)
        validate(doc)
        if doc["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {doc['schema_version']}")
        return cls(doc["command"], doc["input"], doc["config"], doc.get("verdict"),
                   doc.get("payloads", {}), doc.get("timings", {}), doc["tool"])

    def verdict_label(self) -> str | None:
        return None if self.verdict is None else self.verdict["label"]

