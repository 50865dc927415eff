"""Verification records, run configuration, and the JSON report format.

Complex values are serialized as two-element [re, im] arrays. A tolerance of
None marks a record-only check: its residual is reported but never gates the
suite (used for empirically-determined quantities the run documents).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .exceptions import ParameterError

REPORT_VERSION = "1"

SUITE_NAMES = ("theta", "series", "kernels", "rmatrix", "dybe", "rll", "det", "gauge")


def _enc(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    if isinstance(v, dict):
        return {k: _enc(x) for k, x in v.items()}
    return v


def _dec_complex(v):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    return v


@dataclass
class VerificationRecord:
    check_name: str
    params: dict
    residual: float
    tolerance: float | None
    passed: bool
    skipped_singular: bool = False

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "params": _enc(self.params),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "skipped_singular": self.skipped_singular,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationRecord":
        return cls(
            check_name=d["check_name"],
            params={k: _dec_complex(v) for k, v in d["params"].items()},
            residual=d["residual"],
            tolerance=d["tolerance"],
            passed=d["passed"],
            skipped_singular=d["skipped_singular"],
        )


def make_record(check_name: str, params: dict, residual: float,
                tolerance: float | None, skipped: bool = False) -> VerificationRecord:
    residual = float(residual)
    tolerance = None if tolerance is None else float(tolerance)
    passed = True if (skipped or tolerance is None) else bool(residual <= tolerance)
    params = {k: complex(v) if isinstance(v, complex) else v for k, v in params.items()}
    return VerificationRecord(check_name, params, residual, tolerance, passed, skipped)


@dataclass(frozen=True)
class TruncationOrders:
    laurent: int = 24
    jet: int = 8
    kernel_N: int = 12


@dataclass(frozen=True)
class VerificationConfig:
    tau: complex = 0.75j
    gamma: complex = 0.05 + 0j
    suites: tuple = ("all",)
    samples: int = 100
    seed: int = 42
    tolerance: float = 1e-9
    truncation_orders: TruncationOrders = field(default_factory=TruncationOrders)
    report_path: str | None = None

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise ParameterError(f"Im(tau) must be positive, got tau = {self.tau}")
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if self.samples < 1:
            raise ParameterError("samples must be >= 1")
        unknown = set(self.suites) - set(SUITE_NAMES) - {"all"}
        if unknown:
            raise ParameterError(f"unknown suite label(s): {sorted(unknown)}")

    def active_suites(self) -> tuple:
        if "all" in self.suites:
            return SUITE_NAMES
        # preserve canonical order for determinism
        return tuple(s for s in SUITE_NAMES if s in self.suites)

    def scaled(self, base_tolerance: float) -> float:
        """Published per-check tolerances scale with the global knob.

        --tol 1e-9 (the default) reproduces the published values exactly.
        """
        return base_tolerance * (self.tolerance / 1e-9)

    def to_dict(self) -> dict:
        return {
            "tau": _enc(complex(self.tau)),
            "gamma": _enc(complex(self.gamma)),
            "suites": list(self.suites),
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "truncation_orders": dataclasses.asdict(self.truncation_orders),
            "report_path": self.report_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationConfig":
        return cls(
            tau=_dec_complex(d["tau"]),
            gamma=_dec_complex(d["gamma"]),
            suites=tuple(d["suites"]),
            samples=d["samples"],
            seed=d["seed"],
            tolerance=d["tolerance"],
            truncation_orders=TruncationOrders(**d["truncation_orders"]),
            report_path=d.get("report_path"),
        )


@dataclass
class Report:
    version: str
    config_echo: VerificationConfig
    records: list
    wall_time_ms: int

    @property
    def summary(self) -> dict:
        skipped = sum(1 for r in self.records if r.skipped_singular)
        passed = sum(1 for r in self.records if r.passed and not r.skipped_singular)
        failed = sum(1 for r in self.records if not r.passed and not r.skipped_singular)
        return {
            "total": len(self.records),
            "passed": passed,
            "failed": failed,
            "skipped": skipped,
        }

    @property
    def all_passed(self) -> bool:
        return self.summary["failed"] == 0

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config_echo": self.config_echo.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            version=d["version"],
            config_echo=VerificationConfig.from_dict(d["config_echo"]),
            records=[VerificationRecord.from_dict(r) for r in d["records"]],
            wall_time_ms=d["wall_time_ms"],
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))
