"""Verification reports: named checks with status and witness values.

Serialized as JSON with sorted keys so reports are byte-stable for a given
dataset, configuration and seed (timings are excluded from the stable form).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

STATUSES = ("pass", "fail", "skipped", "evidence", "evidence-fail", "external")


@dataclass
class Check:
    id: str
    ref: str
    status: str
    witness: dict[str, Any] = field(default_factory=dict)
    seconds: float | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError("unknown status %r" % self.status)

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "evidence", "skipped", "external")


@dataclass
class VerificationReport:
    dataset: str
    checks: list[Check] = field(default_factory=list)
    tool_version: str = ""
    config: dict[str, Any] = field(default_factory=dict)
    conclusion: str = ""

    @property
    def verdict(self) -> str:
        return "pass" if self.checks and all(c.ok for c in self.checks) else "fail"

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        checks = []
        for c in self.checks:
            d = asdict(c)
            if not timings:
                d.pop("seconds")
            checks.append(d)
        return {
            "dataset": self.dataset,
            "verdict": self.verdict,
            "conclusion": self.conclusion,
            "tool_version": self.tool_version,
            "config": self.config,
            "checks": checks,
        }

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True, default=str)

    def summary_lines(self) -> list[str]:
        lines = ["%-8s %s" % (c.status.upper(), c.id) for c in self.checks]
        lines.append("VERDICT  %s" % self.verdict)
        return lines
