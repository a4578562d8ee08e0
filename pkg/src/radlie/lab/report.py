"""Trial outcomes and the suite report with its JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class TrialOutcome:
    passed: bool
    residual: float = 0.0
    hypothesis_met: bool = True
    witness: dict = field(default_factory=dict)
    observations: dict = field(default_factory=dict)
    error: str | None = None


def _clean(value):
    """JSON-safe copy: non-finite floats become strings, arrays become lists."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "tolist"):
        return _clean(value.tolist())
    if isinstance(value, complex):
        return [_clean(value.real), _clean(value.imag)]
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return str(value)


@dataclass
class VerificationReport:
    suite: str
    trials: int
    failures: list[dict]
    max_residual: float
    hypothesis_not_met: int
    tolerances: dict
    elapsed_ms: float
    numerical_errors: list[dict] = field(default_factory=list)
    observations: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures and not self.numerical_errors

    @property
    def status(self) -> str:
        if self.failures:
            return "violation"
        if self.numerical_errors:
            return "numerical-failure"
        return "pass"

    def to_dict(self, include_elapsed: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "hypothesis_not_met": self.hypothesis_not_met,
            "tolerances": self.tolerances,
            "numerical_errors": self.numerical_errors,
            "observations": self.observations,
        }
        if include_elapsed:
            out["elapsed_ms"] = self.elapsed_ms
        return _clean(out)

    def to_json(self, include_elapsed: bool = True) -> str:
        return json.dumps(self.to_dict(include_elapsed), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            suite=data["suite"],
            trials=data["trials"],
            failures=list(data["failures"]),
            max_residual=data["max_residual"],
            hypothesis_not_met=data["hypothesis_not_met"],
            tolerances=dict(data["tolerances"]),
            elapsed_ms=data.get("elapsed_ms", 0.0),
            numerical_errors=list(data.get("numerical_errors", [])),
            observations=dict(data.get("observations", {})),
        )

    def summary_line(self) -> str:
        return (f"{self.suite:<18} {self.status.upper():<17} trials={self.trials} "
                f"failures={len(self.failures)} hyp_not_met={self.hypothesis_not_met} "
                f"max_residual={self.max_residual:.3e} elapsed_ms={self.elapsed_ms:.0f}")
