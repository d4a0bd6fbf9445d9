"""Meta-outputs: the side channel every translation and evaluation step feeds.

Each record says how a step went (what got resolved, what failed, what a plan
would cost) without being part of the translated output itself.  Severity
gives the dialogue manager a single scale for "what is worth voicing".
"""

from __future__ import annotations

from dataclasses import dataclass, field

INVALID_COMMAND = "invalid_command"
PRESUPPOSITION_FAILURE = "presupposition_failure"
CARDINALITY_MISMATCH = "cardinality_mismatch"
AMBIGUOUS_REFERENCE = "ambiguous_reference"
UNRESOLVED_REFERENCE = "unresolved_reference"
RESOLUTION_RECORD = "resolution_record"
COST_ESTIMATE = "cost_estimate"

SEVERITY = {
    INVALID_COMMAND: 6,
    PRESUPPOSITION_FAILURE: 5,
    CARDINALITY_MISMATCH: 4,
    AMBIGUOUS_REFERENCE: 3,
    UNRESOLVED_REFERENCE: 2,
    RESOLUTION_RECORD: 1,
    COST_ESTIMATE: 0,
}

# Severity at or above which a candidate interpretation is unusable as-is.
ERROR_SEVERITY = 2


@dataclass(frozen=True)
class MetaOutput:
    kind: str
    detail: tuple[tuple[str, object], ...] = field(default_factory=tuple)

    @property
    def severity(self) -> int:
        return SEVERITY[self.kind]

    def get(self, key: str, default=None):
        for k, v in self.detail:
            if k == key:
                return v
        return default

    def to_json(self) -> dict:
        return {"kind": self.kind, "severity": self.severity,
                "detail": {k: v for k, v in self.detail}}

    def __repr__(self):
        inner = " ".join(f"{k}={v!r}" for k, v in self.detail)
        return f"<{self.kind} {inner}>" if inner else f"<{self.kind}>"


def _mk(kind: str, **detail) -> MetaOutput:
    return MetaOutput(kind, tuple(detail.items()))


def invalid_command(reason: str) -> MetaOutput:
    return _mk(INVALID_COMMAND, reason=reason)


def presupposition_failure(reason: str, entity: str) -> MetaOutput:
    return _mk(PRESUPPOSITION_FAILURE, reason=reason, entity=entity)


def cardinality_mismatch(expected: int, actual: int, sort: str) -> MetaOutput:
    return _mk(CARDINALITY_MISMATCH, expected=expected, actual=actual, sort=sort)


def ambiguous_reference(sort: str, candidates: tuple[str, ...]) -> MetaOutput:
    return _mk(AMBIGUOUS_REFERENCE, sort=sort, candidates=tuple(candidates))


def unresolved_reference(surface: str, sort: str | None) -> MetaOutput:
    return _mk(UNRESOLVED_REFERENCE, surface=surface, sort=sort)


def resolution_record(device: str, chosen, source: str | None = None) -> MetaOutput:
    return _mk(RESOLUTION_RECORD, device=device, chosen=chosen, source=source)


def cost_estimate(seconds: float) -> MetaOutput:
    if seconds < 0:
        raise ValueError("cost estimates cannot be negative")
    return _mk(COST_ESTIMATE, seconds=seconds)


def max_severity(metas) -> int:
    return max((m.severity for m in metas), default=0)


def worst(metas) -> MetaOutput | None:
    """The single most important meta-output, stable under ties."""
    best = None
    for m in metas:
        if best is None or m.severity > best.severity:
            best = m
    return best


def has_errors(metas) -> bool:
    return max_severity(metas) >= ERROR_SEVERITY
