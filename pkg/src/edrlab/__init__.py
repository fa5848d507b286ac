"""Finite-dimensional workbench for error-disturbance and error-tradeoff relations."""

__version__ = "0.1.0"

from .exceptions import (
    DimensionMismatchError,
    EdrlabError,
    InconsistentInputError,
    NotHermitianError,
    NotPSDError,
    NotUnitaryError,
    PreconditionError,
    ValidationError,
)
from .qmodel import DensityOperator, JointModel, MeasuringProcess, MomentSet, Observable, pauli
from .relations import RelationId, RelationReport, evaluate, evaluate_all

__all__ = [
    "DensityOperator",
    "DimensionMismatchError",
    "EdrlabError",
    "InconsistentInputError",
    "JointModel",
    "MeasuringProcess",
    "MomentSet",
    "NotHermitianError",
    "NotPSDError",
    "NotUnitaryError",
    "Observable",
    "PreconditionError",
    "RelationId",
    "RelationReport",
    "ValidationError",
    "evaluate",
    "evaluate_all",
    "pauli",
]
