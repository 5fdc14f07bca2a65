"""Existence / non-existence constraints and the admission registry.

Three kinds are supported:

* ``Existence``     ``f |- g``    if f has a value, every component of g is non-null
* ``NonExistence``  ``f !|- g``   if f has a value, every component of g is null
* ``Consolidated``  ``!|- g``     at most one component of g is non-null

A product "has a value" when at least one of its components is non-null.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .catalog import Catalog, FunctionDef
from .errors import ConstraintRejected

EMPTY_PRODUCT = "∅"


class Kind(enum.Enum):
    EXISTENCE = "Existence"
    NON_EXISTENCE = "NonExistence"
    CONSOLIDATED = "Consolidated"

    @property
    def is_existence(self) -> bool:
        return self is Kind.EXISTENCE


@dataclass(frozen=True)
class FunctionProduct:
    components: tuple[FunctionDef, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def arity(self) -> int:
        return len(self.components)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.components]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __str__(self):
        if not self.components:
            return EMPTY_PRODUCT
        return "•".join(self.names)


@dataclass(frozen=True)
class Constraint:
    name: str
    kind: Kind
    left: FunctionProduct
    right: FunctionProduct
    base: str

    @property
    def components(self) -> tuple[FunctionDef, ...]:
        return self.left.components + self.right.components

    def __str__(self):
        if self.kind is Kind.EXISTENCE:
            return f"{self.name}: {self.left} |— {self.right}"
        if self.kind is Kind.NON_EXISTENCE:
            return f"{self.name}: {self.left} ¬|— {self.right}"
        return f"{self.name}: ¬|— {self.right}"


def is_violated(kind: Kind, left_values: Sequence, right_values: Sequence) -> bool:
    """Direct evaluation of a constraint's definition over one row's values."""
    if kind is Kind.CONSOLIDATED:
        return sum(v is not None for v in right_values) > 1
    if not any(v is not None for v in left_values):
        return False
    if kind is Kind.EXISTENCE:
        return any(v is None for v in right_values)
    return any(v is not None for v in right_values)


# -- rejection messages ------------------------------------------------------

def msg_duplicate(cn: str) -> str:
    return f"Request rejected: {cn} is the name of another constraint! Please choose a unique constraint name!"


def msg_make_total(g) -> str:
    return f"Request rejected: please add to C the constraint {g} total instead!"


def msg_incompatible(f, g) -> str:
    return f"Request rejected: {f} and {g} do not have compatible domains!"


def msg_total_component(fn) -> str:
    return f"Request rejected: {fn} is totally defined!"


def msg_instance_violation(cn: str, x) -> str:
    return f"Request rejected: {cn} is violated for {x}!"


def msg_unknown(cn: str) -> str:
    return f"Request rejected: {cn} is not a known constraint name!"


@dataclass
class AdmissionTrace:
    """What the last add request checked, in order."""

    checks: list[str] = field(default_factory=list)
    totality_checks: int = 0
    rejected_by: str | None = None


class ConstraintRegistry:
    """The constraint set C, with add/delete as in the admission algorithm.

    ``rows_of(base)`` must yield committed rows visible in ``base`` in key
    order; each row exposes ``key`` and ``value_of(fn)``.  Admitted
    constraints are wired into ``enforcer`` (anything with ``register`` and
    ``unregister``).
    """

    def __init__(self, catalog: Catalog, rows_of: Callable[[str], Iterable], enforcer=None):
        self.catalog = catalog
        self.rows_of = rows_of
        self.enforcer = enforcer
        self._constraints: dict[str, Constraint] = {}
        self.trace = AdmissionTrace()

    def __contains__(self, name: str) -> bool:
        return name in self._constraints

    def __getitem__(self, name: str) -> Constraint:
        return self._constraints[name]

    def __len__(self):
        return len(self._constraints)

    def list_constraints(self) -> list[Constraint]:
        return list(self._constraints.values())

    def _product(self, items) -> FunctionProduct:
        if isinstance(items, FunctionProduct):
            return items
        comps = []
        for item in items:
            comps.append(item if isinstance(item, FunctionDef) else self.catalog.function(item))
        return FunctionProduct(tuple(comps))

    def _reject(self, check: str, message: str):
        self.trace.rejected_by = check
        raise ConstraintRejected(message, check)

    def add_constraint(self, name: str, kind: Kind, left, right) -> Constraint:
        """Admit a constraint or raise :class:`ConstraintRejected`.

        Checks run in a fixed order and stop at the first failure: name
        uniqueness, shape (existence needs a left side), domain
        compatibility, totality of each left then each right component, and
        finally a scan of the current instance.
        """
        kind = Kind(kind)
        f = self._product(left)
        g = self._product(right)
        trace = self.trace = AdmissionTrace()

        trace.checks.append("unique")
        if name in self._constraints:
            self._reject("unique", msg_duplicate(name))

        trace.checks.append("shape")
        if kind is Kind.EXISTENCE and f.arity == 0:
            self._reject("shape", msg_make_total(g))
        if g.arity == 0:
            self._reject("shape", f"Request rejected: {name} needs at least one right-side function!")
        if kind is Kind.NON_EXISTENCE and f.arity == 0:
            self._reject(
                "shape",
                f"Request rejected: {name} has no left-side function; declare it as a consolidated constraint instead!",
            )
        if kind is Kind.CONSOLIDATED and (f.arity != 0 or g.arity < 2):
            self._reject(
                "shape",
                f"Request rejected: consolidated constraint {name} needs no left side and at least two right-side functions!",
            )

        trace.checks.append("domains")
        base = self.catalog.common_superset(fn.domain for fn in f.components + g.components)
        if base is None:
            self._reject("domains", msg_incompatible(f, g))

        trace.checks.append("totality")
        for fn in f.components + g.components:
            trace.totality_checks += 1
            if fn.total:
                self._reject("totality", msg_total_component(fn))

        c = Constraint(name, kind, f, g, base)
        trace.checks.append("instance")
        for row in self.rows_of(base):
            if row_violates(c, row):
                self._reject("instance", msg_instance_violation(name, row.key))

        self._constraints[name] = c
        if self.enforcer is not None:
            self.enforcer.register(c)
        return c

    def build(self, name: str, kind: Kind, left, right) -> Constraint:
        """Resolve a constraint without admitting it (no checks, not stored)."""
        f = self._product(left)
        g = self._product(right)
        base = self.catalog.common_superset(fn.domain for fn in f.components + g.components)
        if base is None:
            raise ConstraintRejected(msg_incompatible(f, g), "domains")
        return Constraint(name, Kind(kind), f, g, base)

    def delete_constraint(self, name: str, confirmed: bool) -> bool:
        """Remove ``name`` if confirmed. Returns whether anything was removed."""
        if name not in self._constraints:
            raise ConstraintRejected(msg_unknown(name), "known")
        if not confirmed:
            return False
        del self._constraints[name]
        if self.enforcer is not None:
            self.enforcer.unregister(name)
        return True

    def validate_instance(self, c: Constraint | str) -> list[int]:
        """Keys of every committed row of the constraint's base violating it."""
        if isinstance(c, str):
            c = self._constraints[c]
        return [row.key for row in self.rows_of(c.base) if row_violates(c, row)]

    def referencing(self, fn: FunctionDef) -> list[str]:
        return [c.name for c in self._constraints.values() if fn in c.components]


def row_violates(c: Constraint, row) -> bool:
    return is_violated(
        c.kind,
        [row.value_of(fn) for fn in c.left],
        [row.value_of(fn) for fn in c.right],
    )
