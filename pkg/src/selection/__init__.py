"""
Selection
=========

DELTA candidate scoring and the baseline selectors.
"""

from src.selection.delta_selector import (
    CandidateSet,
    ScoreTable,
    ScoringMode,
    SelectConfig,
    SelectionResult,
    candidates,
    domain_discrepancy,
    inconsistency,
    select,
    topo_uncertainty,
    weighted_khop_logits,
)
from src.selection.baselines import BaselineKind, baseline_select
from src.selection.selection_report import read_selected_nodes, selection_report, write_selection_report

__all__ = [
    "CandidateSet",
    "ScoreTable",
    "ScoringMode",
    "SelectConfig",
    "SelectionResult",
    "candidates",
    "domain_discrepancy",
    "inconsistency",
    "select",
    "topo_uncertainty",
    "weighted_khop_logits",
    "BaselineKind",
    "baseline_select",
    "read_selected_nodes",
    "selection_report",
    "write_selection_report",
]
