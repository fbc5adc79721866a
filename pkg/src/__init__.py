"""
DELTA Selection Pipeline
========================

Active node selection for graph domain adaptation: dual graph subnetworks,
consistency-based candidate scoring, and an experiment harness.
"""

__version__ = "1.0.1"
