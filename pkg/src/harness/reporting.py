#!/usr/bin/env python3
"""
Evaluation Reports
==================

``EvalReport`` aggregates per-seed F1 scores, selection timings and the
selected node ids of one strategy. Reports serialize to JSON and carry a
SHA-256 fingerprint of every deterministic field (timings excluded), so two
runs of the same experiment can be compared for bitwise identity.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from src.utils.atomic_io import atomic_write_json
from src.utils.error_handling import ContractViolationError

REPORT_VERSION = 1


@dataclass
class EvalReport:
    strategy: str
    seeds: List[int] = field(default_factory=list)
    macro_f1: List[float] = field(default_factory=list)
    micro_f1: List[float] = field(default_factory=list)
    selection_seconds: List[float] = field(default_factory=list)
    selected: List[List[int]] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)

    def add_seed(self, seed: int, macro: float, micro: float, seconds: float, selected) -> None:
        for value in (macro, micro):
            if not 0.0 <= value <= 1.0:
                raise ContractViolationError("F1 values must lie in [0, 1]", {"seed": seed, "value": value})
        self.seeds.append(int(seed))
        self.macro_f1.append(float(macro))
        self.micro_f1.append(float(micro))
        self.selection_seconds.append(float(seconds))
        self.selected.append([int(node) for node in selected])

    # Aggregates use the population standard deviation.

    @property
    def macro_mean(self) -> float:
        return float(np.mean(self.macro_f1)) if self.macro_f1 else 0.0

    @property
    def macro_std(self) -> float:
        return float(np.std(self.macro_f1)) if self.macro_f1 else 0.0

    @property
    def micro_mean(self) -> float:
        return float(np.mean(self.micro_f1)) if self.micro_f1 else 0.0

    @property
    def micro_std(self) -> float:
        return float(np.std(self.micro_f1)) if self.micro_f1 else 0.0

    @property
    def mean_selection_seconds(self) -> float:
        return float(np.mean(self.selection_seconds)) if self.selection_seconds else 0.0

    def deterministic_fields(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "seeds": self.seeds,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "selected": self.selected,
            "config": self.config,
        }

    def fingerprint(self) -> str:
        canonical = json.dumps(self.deterministic_fields(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        document = self.deterministic_fields()
        document.update(
            {
                "version": REPORT_VERSION,
                "selection_seconds": self.selection_seconds,
                "summary": {
                    "macro_f1_mean": self.macro_mean,
                    "macro_f1_std": self.macro_std,
                    "micro_f1_mean": self.micro_mean,
                    "micro_f1_std": self.micro_std,
                    "selection_seconds_mean": self.mean_selection_seconds,
                },
                "fingerprint": self.fingerprint(),
            }
        )
        return document

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "EvalReport":
        if document.get("version") != REPORT_VERSION:
            raise ContractViolationError("unsupported report version", {"version": document.get("version")})
        report = cls(
            strategy=document["strategy"],
            seeds=[int(s) for s in document["seeds"]],
            macro_f1=[float(v) for v in document["macro_f1"]],
            micro_f1=[float(v) for v in document["micro_f1"]],
            selection_seconds=[float(v) for v in document["selection_seconds"]],
            selected=[[int(n) for n in nodes] for nodes in document["selected"]],
            config=dict(document["config"]),
        )
        if "fingerprint" in document and document["fingerprint"] != report.fingerprint():
            raise ContractViolationError("report fingerprint does not match its contents")
        return report

    def write(self, path: Union[str, Path]) -> Path:
        return atomic_write_json(path, self.to_dict())

    @classmethod
    def read(cls, path: Union[str, Path]) -> "EvalReport":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvalReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def summary_table(reports: Dict[str, EvalReport]) -> List[Dict[str, Any]]:
    """One row per report, ordered by descending mean Macro-F1."""
    rows = [
        {
            "name": name,
            "macro_f1_mean": report.macro_mean,
            "macro_f1_std": report.macro_std,
            "micro_f1_mean": report.micro_mean,
            "micro_f1_std": report.micro_std,
            "selection_seconds": report.mean_selection_seconds,
        }
        for name, report in reports.items()
    ]
    return sorted(rows, key=lambda row: (-row["macro_f1_mean"], row["name"]))


__all__ = ["REPORT_VERSION", "EvalReport", "summary_table"]
