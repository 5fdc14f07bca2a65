"""Row-level enforcement run before a row is saved.

``before_update`` chains the hooks for the row's table, non-existence ones
first, and cancels on the first violation.  The two enforcement methods
skip rows whose relevant columns were not modified, and stop reading
components as soon as the outcome is decided.  Every component read is
counted so the bounds can be checked from tests.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .constraints import Constraint, Kind

EXISTENCE_MSG = (
    "Saving these values is rejected: according to existence constraint {ec}, "
    "column {g} must have a not null value!"
)
NON_EXISTENCE_MSG = (
    "Saving these values is rejected: according to non-existence constraint {nec}, "
    "column {g} must have a null value!"
)
CONSOLIDATED_MSG = (
    "Saving these values is rejected: according to non-existence constraint {nec}, "
    "only one of the columns {gi} and {gj} may have a not null value!"
)
TOTALITY_MSG = "Saving these values is rejected: column {col} must have a not null value!"


def existence_message(ec: str, g: str) -> str:
    return EXISTENCE_MSG.format(ec=ec, g=g)


def non_existence_message(nec: str, g: str) -> str:
    return NON_EXISTENCE_MSG.format(nec=nec, g=g)


def consolidated_message(nec: str, gi: str, gj: str) -> str:
    # gi is the second non-null column found, gj the first
    return CONSOLIDATED_MSG.format(nec=nec, gi=gi, gj=gj)


def totality_message(col: str) -> str:
    return TOTALITY_MSG.format(col=col)


@dataclass(frozen=True)
class Violation:
    constraint: str | None
    message: str
    columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class EnforcementOutcome:
    violation: Violation | None = None

    @property
    def cancelled(self) -> bool:
        return self.violation is not None


PASS = EnforcementOutcome()


@dataclass
class EvalCounters:
    constraints_evaluated: int = 0
    component_reads: Counter = field(default_factory=Counter)
    left_reads: Counter = field(default_factory=Counter)
    right_reads: Counter = field(default_factory=Counter)
    evaluated: list = field(default_factory=list)


def pipeline_order(constraints) -> list[Constraint]:
    """Non-existence and consolidated hooks first, then existence; stable."""
    return sorted(constraints, key=lambda c: c.kind is Kind.EXISTENCE)


class Enforcer:
    """Holds the wired hooks and runs them against edit sessions.

    ``catalog`` is used only to decide which hooks apply to a row: those
    whose base set contains the row's set.
    """

    def __init__(self, catalog):
        self.catalog = catalog
        self._hooks: dict[str, Constraint] = {}
        self.counters = EvalCounters()

    # -- wiring -----------------------------------------------------------

    def register(self, c: Constraint) -> None:
        self._hooks[c.name] = c

    def unregister(self, name: str) -> None:
        self._hooks.pop(name, None)

    def hooks(self) -> list[Constraint]:
        return pipeline_order(self._hooks.values())

    def hooks_for(self, set_name: str) -> list[Constraint]:
        return [c for c in self.hooks() if self.catalog.is_subset(set_name, c.base)]

    # -- counters ---------------------------------------------------------

    def reset_counters(self) -> None:
        self.counters = EvalCounters()

    def read_counters(self) -> EvalCounters:
        return self.counters

    # -- evaluation -------------------------------------------------------

    def _read(self, c: Constraint, fn, row, side: Counter):
        self.counters.component_reads[c.name] += 1
        side[c.name] += 1
        return row.value_of(fn)

    def _touched(self, c: Constraint, row) -> bool:
        if row.is_new:
            return True
        dirty = row.dirty
        return any(fn.name in dirty for fn in c.components)

    def _scan_existence(self, ec: Constraint, row) -> tuple[str, ...] | None:
        self.counters.constraints_evaluated += 1
        self.counters.evaluated.append(ec.name)
        if not self._touched(ec, row):
            return None
        for fn in ec.left:
            if self._read(ec, fn, row, self.counters.left_reads) is not None:
                break
        else:
            return None
        for fn in ec.right:
            if self._read(ec, fn, row, self.counters.right_reads) is None:
                return (fn.name,)
        return None

    def _scan_non_existence(self, nec: Constraint, row) -> tuple[str, ...] | None:
        self.counters.constraints_evaluated += 1
        self.counters.evaluated.append(nec.name)
        if not self._touched(nec, row):
            return None
        if nec.left.arity == 0:
            first = None
            for fn in nec.right:
                if self._read(nec, fn, row, self.counters.right_reads) is not None:
                    if first is not None:
                        return (fn.name, first)
                    first = fn.name
            return None
        for fn in nec.left:
            if self._read(nec, fn, row, self.counters.left_reads) is not None:
                break
        else:
            return None
        for fn in nec.right:
            if self._read(nec, fn, row, self.counters.right_reads) is not None:
                return (fn.name,)
        return None

    def enforce_existence(self, ec: Constraint, row) -> bool:
        """True when the row violates ``ec``."""
        return self._scan_existence(ec, row) is not None

    def enforce_non_existence(self, nec: Constraint, row) -> bool:
        """True when the row violates ``nec`` (single or consolidated)."""
        return self._scan_non_existence(nec, row) is not None

    def check(self, c: Constraint, row) -> Violation | None:
        """Run one hook, returning its violation record if it fires."""
        if c.kind is Kind.EXISTENCE:
            cols = self._scan_existence(c, row)
            if cols is None:
                return None
            return Violation(c.name, existence_message(c.name, cols[0]), cols)
        cols = self._scan_non_existence(c, row)
        if cols is None:
            return None
        if len(cols) == 2:
            return Violation(c.name, consolidated_message(c.name, *cols), cols)
        return Violation(c.name, non_existence_message(c.name, cols[0]), cols)

    def before_update(self, row, hooks=None) -> EnforcementOutcome:
        """Run ``hooks`` (default: those applying to the row's set) in order."""
        if hooks is None:
            hooks = self.hooks_for(row.set_name)
        for c in hooks:
            violation = self.check(c, row)
            if violation is not None:
                return EnforcementOutcome(violation)
        return PASS
