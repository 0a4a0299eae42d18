from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class SuiteReport:
    """Outcome of a seeded verification suite.

    ``passed`` is derived, never set by hand: it is true iff the worst residual
    is finite and within ``tolerance``.
    """

    suite: str
    instance: str
    samples: int
    seed: int
    tolerance: float
    max_residual: float = 0.0
    worst_input: Any = None
    details: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)
    check_tolerances: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tolerance)

    def observe(self, residual: float, inputs: Any = None, check: str | None = None,
                tol: float | None = None) -> None:
        """Fold one sample residual into the report (order-independent max).

        A check with its own tolerance ``tol`` is rescaled to the suite
        tolerance before entering ``max_residual``; ``details`` keeps the raw
        value and ``check_tolerances`` the bound of every observed check.
        """
        residual = float(residual)
        if not np.isfinite(residual):
            residual = float("inf")
        if check is not None:
            self.details[check] = max(self.details.get(check, 0.0), residual)
            self.check_tolerances[check] = float(self.tolerance if tol is None else tol)
        scaled = residual if tol is None else residual * (self.tolerance / tol)
        if scaled > self.max_residual or self.worst_input is None:
            self.max_residual = max(self.max_residual, scaled)
            if inputs is not None and scaled >= self.max_residual:
                self.worst_input = _jsonable({"check": check, "inputs": inputs})

    def failed_checks(self) -> list[str]:
        out = []
        for name, bound in self.check_tolerances.items():
            value = self.details[name]
            if not (np.isfinite(value) and value <= bound):
                out.append(name)
        return out

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "instance": self.instance,
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "worst_input": self.worst_input,
            "details": _jsonable(self.details),
            "check_tolerances": dict(self.check_tolerances),
            "findings": list(self.findings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.suite}[{self.instance}] samples={self.samples} seed={self.seed} "
                f"max_residual={self.max_residual:.3e} tol={self.tolerance:.1e}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _jsonable(np.stack([obj.real, obj.imag], axis=-1))
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj
