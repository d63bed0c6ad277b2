"""Tutte embeddings of planar graphs solved classically or with a simulated HHL circuit."""

from .errors import DegradedAccuracyWarning, InvalidInputError, NumericalFailure
from .generators import generate
from .graph import (Embedding, Graph, PinMode, PinSpec, TutteSystem, build_system,
                    soft_ground_instance)
from .hhl import HHLConfig, HHLResult, solve_hhl
from .pipeline import condition_number_study, draw

__all__ = [
    "DegradedAccuracyWarning",
    "Embedding",
    "Graph",
    "HHLConfig",
    "HHLResult",
    "InvalidInputError",
    "NumericalFailure",
    "PinMode",
    "PinSpec",
    "TutteSystem",
    "build_system",
    "condition_number_study",
    "draw",
    "generate",
    "soft_ground_instance",
    "solve_hhl",
]
