"""Occupational gender-bias evaluation for machine translation.

Quantifies how MT systems assign gender when translating gender-ambiguous
occupational texts: an LLM judge detects occupations and their gender in the
translations, detections are aggregated over the ISCO-08 hierarchy, and the
aggregates are scored with the GRAPE divergence against parity or real-world
reference distributions.
"""

__version__ = "0.1.0"

from .gender import GenderLabel
from .metrics import GenderCounts, ReferenceDistribution, classify_extremity, grape
from .taxonomy import IscoEntry, Taxonomy, load_taxonomy, truncate_to_level

__all__ = [
    "__version__",
    "GenderLabel",
    "GenderCounts",
    "ReferenceDistribution",
    "classify_extremity",
    "grape",
    "IscoEntry",
    "Taxonomy",
    "load_taxonomy",
    "truncate_to_level",
]
