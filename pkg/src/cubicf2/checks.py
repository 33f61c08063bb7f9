"""Named pass/fail records shared by the certificate and suite code."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    expected: object = None
    seconds: float = 0.0

    def as_json(self, timings: bool = True) -> dict:
        # numbers travel as decimal strings
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "value": _text(self.value),
            "expected": _text(self.expected),
            "seconds": f"{self.seconds:.3f}" if timings else "0",
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {_text(self.value)} (expected {_text(self.expected)}) {self.seconds:.2f}s"


class CheckFailed(AssertionError):
    def __init__(self, check: Check):
        super().__init__(f"{check.name} failed: got {check.value}, expected {check.expected}")
        self.check = check


def _text(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_text(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, set, frozenset)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return "[" + ", ".join(_text(x) for x in items) + "]"
    return str(v)


@contextmanager
def timed():
    box = {"start": time.perf_counter(), "seconds": 0.0}
    try:
        yield box
    finally:
        box["seconds"] = time.perf_counter() - box["start"]


def check(name: str, value, expected, passed: bool | None = None, seconds: float = 0.0) -> Check:
    if passed is None:
        passed = value == expected
    return Check(name, bool(passed), value, expected, seconds)
