"""Deterministic check reports with a stable JSON rendering.

A report is a command name, its parameters, and an ordered list of checks,
each `{name, status, details}` with status one of pass/fail/unknown/skip.
The exit code is 0 exactly when no check failed; unknown and skip do not
fail.  Serialisation sorts keys and renders non-JSON values (infinite
depths, fractions, words, group elements) through a fixed conversion, so
identical inputs produce identical bytes.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"
SKIP = "skip"
_STATUSES = (PASS, FAIL, UNKNOWN, SKIP)


def make_check(name, status, **details):
    if status not in _STATUSES:
        raise ValueError(f"unknown status {status!r}")
    return {"name": name, "status": status, "details": details}


def from_check_dict(raw, name=None):
    """Adapt a `{check, status, violations, ...}` dict to a report check."""
    details = {k: v for k, v in raw.items() if k not in ("check", "status")}
    status = raw["status"] if raw["status"] in _STATUSES else FAIL
    return make_check(name or raw["check"], status, **details)


def collapse_check(name, report):
    """Informational check from a divergence analysis (never fails)."""
    return make_check(
        name, PASS,
        collapsed=list(report.collapsed),
        improper=report.improper,
        depths={g: d for g, d in sorted(report.depths.items())},
        residual_generators=list(report.residual.generators),
        residual_rank=report.residual_rank)


def bound_check(name, report):
    return make_check(
        name, PASS if report.passed else FAIL,
        edge_count=report.edge_count,
        max_edge_order=report.max_edge_order,
        rank=report.rank,
        edge_bound=report.edge_bound,
        edge_sum=report.edge_sum,
        rank_side=report.rank_side,
        edge_count_ok=report.edge_count_ok,
        edge_sum_ok=report.edge_sum_ok)


def _plain(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float) and math.isinf(value):
        return "DIVERGES"
    if isinstance(value, (int, float, str)):
        return value
    if isinstance(value, Fraction):
        return (int(value) if value.denominator == 1
                else f"{value.numerator}/{value.denominator}")
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=repr) if isinstance(value, (set, frozenset)) \
            else value
        return [_plain(v) for v in items]
    return repr(value)


@dataclass
class Report:
    """Ordered checks for one command run."""

    command: str
    parameters: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, name, status, **details):
        self.checks.append(make_check(name, status, **details))

    def extend(self, checks):
        self.checks.extend(checks)

    @property
    def exit_code(self):
        return 1 if any(c["status"] == FAIL for c in self.checks) else 0

    @property
    def counts(self):
        out = {s: 0 for s in _STATUSES}
        for c in self.checks:
            out[c["status"]] += 1
        return out

    def to_dict(self):
        return _plain({"command": self.command,
                       "parameters": self.parameters,
                       "checks": self.checks,
                       "exit_code": self.exit_code})

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        lines = []
        for c in self.checks:
            details = ", ".join(f"{k}={_plain(v)}"
                                for k, v in sorted(c["details"].items()))
            lines.append(f"[{c['status']:>7}] {c['name']}"
                         + (f"  ({details})" if details else ""))
        counts = self.counts
        summary = ", ".join(f"{counts[s]} {s}" for s in _STATUSES if counts[s])
        lines.append(f"{self.command}: {summary or 'no checks'} "
                     f"-> exit {self.exit_code}")
        return "\n".join(lines) + "\n"
