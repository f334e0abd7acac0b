"""Numerical escaping and fast escaping sets of finitely generated transcendental semigroups."""

from .engine import (
    Classification,
    Classifier,
    ClassifierConfig,
    Semigroup,
    Verdict,
    Word,
    classify_point,
    classify_points,
    enumerate_words,
)
from .expr import EntireFunction, evaluate, log_magnitude, parse_function, pretty
from .grid import Window, classify_grid, extract_boundary, render
from .maxmod import CircleSampling, MaxModulusTable, ThresholdNotFound, find_threshold_R, max_modulus, mm_tower
from .verify import PropertyReport, run_all

__all__ = [
    "CircleSampling",
    "Classification",
    "Classifier",
    "ClassifierConfig",
    "EntireFunction",
    "MaxModulusTable",
    "PropertyReport",
    "Semigroup",
    "ThresholdNotFound",
    "Verdict",
    "Window",
    "Word",
    "classify_grid",
    "classify_point",
    "classify_points",
    "enumerate_words",
    "evaluate",
    "extract_boundary",
    "find_threshold_R",
    "log_magnitude",
    "max_modulus",
    "mm_tower",
    "parse_function",
    "pretty",
    "render",
    "run_all",
]
