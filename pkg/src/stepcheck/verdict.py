"""Per-judgment verdicts shared by the tool legs and the critic."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Status(Enum):
    VALID = "Valid"
    INVALID = "Invalid"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking one judgment.

    ``tool`` names the leg that decided it; ``evidence`` points at the
    artifact backing a Valid verdict (a script hash, a normal form). An
    Invalid verdict always has a nonempty ``reason`` and, when the deciding
    tool produced one, a ``counterexample`` mapping symbols to values.
    """

    status: Status
    tool: str = ""
    reason: str = ""
    evidence: str = ""
    counterexample: dict[str, str] | None = None
    replayed: bool | None = None
    legs: tuple[tuple[str, str, str], ...] = field(default=())

    def __post_init__(self):
        if self.status is Status.INVALID and not self.reason.strip():
            raise ValueError("an Invalid verdict needs a reason")

    @classmethod
    def valid(cls, tool: str, evidence: str = "", reason: str = "") -> "Verdict":
        return cls(Status.VALID, tool, reason, evidence)

    @classmethod
    def invalid(cls, tool: str, reason: str, counterexample: dict[str, str] | None = None,
                replayed: bool | None = None) -> "Verdict":
        return cls(Status.INVALID, tool, reason, counterexample=counterexample,
                   replayed=replayed)

    @classmethod
    def unknown(cls, tool: str, reason: str) -> "Verdict":
        return cls(Status.UNKNOWN, tool, reason)

    @property
    def is_valid(self) -> bool:
        return self.status is Status.VALID

    @property
    def is_invalid(self) -> bool:
        return self.status is Status.INVALID

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    def to_json(self) -> dict:
        out = {"status": self.status.value, "tool": self.tool, "reason": self.reason}
        if self.evidence:
            out["evidence"] = self.evidence
        if self.counterexample is not None:
            out["counterexample"] = dict(sorted(self.counterexample.items()))
        if self.replayed is not None:
            out["replayed"] = self.replayed
        if self.legs:
            out["legs"] = [{"tool": t, "status": s, "reason": r} for t, s, r in self.legs]
        return out
