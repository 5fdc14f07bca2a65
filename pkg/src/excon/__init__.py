"""Existence and non-existence constraints over partial-function tables."""

from .catalog import TODAY, Catalog, FunctionDef, ObjectSet, ValueDomain
from .constraints import Constraint, ConstraintRegistry, FunctionProduct, Kind, is_violated
from .engine import Database
from .enforcement import EnforcementOutcome, Enforcer, EvalCounters, Violation
from .errors import (
    CatalogError,
    ConstraintRejected,
    CycleError,
    DomainValueError,
    DuplicateNameError,
    ExconError,
    InUseError,
    ParseError,
    SaveRejected,
    StoreError,
    UnknownNameError,
)
from .store import EditSession, Row, Store

__all__ = [
    "TODAY", "Catalog", "FunctionDef", "ObjectSet", "ValueDomain",
    "Constraint", "ConstraintRegistry", "FunctionProduct", "Kind", "is_violated",
    "Database", "EnforcementOutcome", "Enforcer", "EvalCounters", "Violation",
    "CatalogError", "ConstraintRejected", "CycleError", "DomainValueError", "DuplicateNameError",
    "ExconError", "InUseError", "ParseError", "SaveRejected", "StoreError", "UnknownNameError",
    "EditSession", "Row", "Store",
]
