#!/usr/bin/env python3
"""
Selection Report
================

JSON document describing one DELTA selection: configuration, candidate
count, the per-node score table and the final ordered annotation list.
"""

import dataclasses
import json
from pathlib import Path
from typing import Any, Dict, List, Union

from src.selection.delta_selector import SelectionResult
from src.utils.atomic_io import atomic_write_json

REPORT_KIND = "delta-selection"


def selection_report(result: SelectionResult) -> Dict[str, Any]:
    distances = result.candidates.distances
    rows = result.table.rows()
    for row in rows:
        row["distance"] = float(distances[row["node"]])
    return {
        "kind": REPORT_KIND,
        "config": dataclasses.asdict(result.config),
        "num_candidates": len(result.candidates),
        "scores": rows,
        "provenance": dict(result.table.provenance),
        "selected": [int(node) for node in result.selected],
    }


def write_selection_report(path: Union[str, Path], result: SelectionResult) -> Path:
    return atomic_write_json(path, selection_report(result))


def read_selected_nodes(path: Union[str, Path]) -> List[int]:
    """Ordered selection from a report file written by ``write_selection_report``."""
    with open(path, "r", encoding="utf-8") as handle:
        document = json.load(handle)
    return [int(node) for node in document["selected"]]


__all__ = ["REPORT_KIND", "selection_report", "write_selection_report", "read_selected_nodes"]
