"""Database scheme: object sets, their inclusion DAG, value domains and functions.

Tables are object sets; columns are (possibly partial) functions defined on
them.  A function is *total* when every row of its domain must carry a
non-null value (the classic NOT NULL case).
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Union

from .errors import CatalogError, CycleError, DomainValueError, DuplicateNameError, InUseError, UnknownNameError

KINDS = ("integer", "decimal", "text", "date", "boolean")

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class _Today:
    """Range bound that resolves to the store clock's date at write time."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TODAY"

    def __reduce__(self):
        return (_Today, ())


TODAY = _Today()


def check_identifier(name: str) -> str:
    if not isinstance(name, str) or not IDENT_RE.match(name):
        raise CatalogError(f"invalid identifier: {name!r}")
    return name


@dataclass(frozen=True)
class ObjectSet:
    name: str


@dataclass(frozen=True)
class ValueDomain:
    kind: str
    range: tuple | None = None
    width: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainValueError(f"unknown value kind: {self.kind}")
        if self.width is not None and self.width <= 0:
            raise DomainValueError(f"width must be positive, got {self.width}")
        if self.range is not None:
            lo, hi = self.range
            lo = lo if lo is TODAY else self._convert(lo)
            hi = hi if hi is TODAY else self._convert(hi)
            object.__setattr__(self, "range", (lo, hi))
            if lo is not TODAY and hi is not TODAY and lo > hi:
                raise DomainValueError(f"empty range [{lo}, {hi}]")

    def _convert(self, value):
        """Convert ``value`` to this kind's Python type, parsing strings."""
        kind = self.kind
        try:
            if kind == "integer":
                if isinstance(value, bool):
                    raise TypeError
                if isinstance(value, str):
                    return int(value.strip())
                if isinstance(value, int):
                    return value
                if isinstance(value, Decimal) and value == value.to_integral_value():
                    return int(value)
                raise TypeError
            if kind == "decimal":
                if isinstance(value, bool):
                    raise TypeError
                if isinstance(value, (str, int, Decimal)):
                    d = Decimal(value.strip() if isinstance(value, str) else value)
                    if not d.is_finite():
                        raise ValueError
                    return d
                if isinstance(value, float):
                    return Decimal(repr(value))
                raise TypeError
            if kind == "text":
                if not isinstance(value, str):
                    raise TypeError
                return value
            if kind == "date":
                if isinstance(value, dt.datetime):
                    return value.date()
                if isinstance(value, dt.date):
                    return value
                if isinstance(value, str):
                    return dt.date.fromisoformat(value.strip())
                raise TypeError
            if isinstance(value, bool):
                return value
            if isinstance(value, str) and value.strip().lower() in ("true", "false"):
                return value.strip().lower() == "true"
            raise TypeError
        except (TypeError, ValueError, InvalidOperation):
            raise DomainValueError(f"{value!r} is not a valid {kind} value") from None

    def coerce(self, value, today: dt.date | None = None):
        """Return ``value`` converted and checked against kind, width and range."""
        v = self._convert(value)
        if self.kind == "text" and v == "":
            raise DomainValueError("empty text is not representable (empty means null)")
        if self.width is not None:
            if self.kind == "integer":
                size = len(str(abs(v)))
            elif self.kind == "decimal":
                size = len(v.as_tuple().digits)
            elif self.kind == "text":
                size = len(v)
            else:
                size = 0
            if size > self.width:
                raise DomainValueError(f"{v!r} exceeds width {self.width}")
        if self.range is not None:
            lo, hi = self.range
            if lo is TODAY or hi is TODAY:
                if today is None:
                    today = dt.date.today()
            lo = today if lo is TODAY else lo
            hi = today if hi is TODAY else hi
            if not lo <= v <= hi:
                raise DomainValueError(f"{self.render(v)} is outside [{self.render(lo)}, {self.render(hi)}]")
        return v

    def parse(self, text: str, today: dt.date | None = None):
        """Parse a textual value; the empty string means null."""
        if text == "":
            return None
        return self.coerce(text, today)

    def render(self, value) -> str:
        if value is None:
            return ""
        if value is TODAY:
            return "TODAY"
        if self.kind == "boolean":
            return "true" if value else "false"
        if self.kind == "date":
            return value.isoformat()
        return str(value)


Codomain = Union[ValueDomain, str]


@dataclass(frozen=True)
class FunctionDef:
    """A column: ``name : domain -> codomain``.

    ``codomain`` is either a :class:`ValueDomain` or the name of an object set
    (values are then surrogate keys of that set).
    """

    name: str
    domain: str
    codomain: Codomain
    total: bool = False

    @property
    def value_domain(self) -> ValueDomain:
        if isinstance(self.codomain, ValueDomain):
            return self.codomain
        return _KEY_DOMAIN

    def __str__(self):
        return self.name


_KEY_DOMAIN = ValueDomain("integer", range=(1, 2**63 - 1))


@dataclass
class Catalog:
    sets: dict[str, ObjectSet] = field(default_factory=dict)
    # direct edges sub -> {super}
    parents: dict[str, set[str]] = field(default_factory=dict)
    functions: dict[tuple[str, str], FunctionDef] = field(default_factory=dict)

    # -- sets -------------------------------------------------------------

    def declare_set(self, name: str) -> ObjectSet:
        check_identifier(name)
        if name in self.sets:
            raise DuplicateNameError(f"set {name} is already declared")
        obj = ObjectSet(name)
        self.sets[name] = obj
        self.parents[name] = set()
        return obj

    def require_set(self, name: str) -> ObjectSet:
        try:
            return self.sets[name]
        except KeyError:
            raise UnknownNameError(f"unknown set {name}") from None

    def declare_inclusion(self, sub: str, sup: str) -> None:
        self.require_set(sub)
        self.require_set(sup)
        if sub == sup or sup in self.parents[sub]:
            return
        if self.is_subset(sup, sub):
            raise CycleError(f"{sup} is already a subset of {sub}; {sub} <= {sup} would form a cycle")
        self.parents[sub].add(sup)
        try:
            self._check_name_clashes()
        except DuplicateNameError:
            self.parents[sub].discard(sup)
            raise

    def ancestors(self, name: str) -> set[str]:
        """All supersets of ``name``, including itself."""
        seen = {name}
        stack = [name]
        while stack:
            for p in self.parents[stack.pop()]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def descendants(self, name: str) -> set[str]:
        """All subsets of ``name``, including itself."""
        return {s for s in self.sets if name in self.ancestors(s)}

    def is_subset(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    def upper_bounds(self, names: Iterable[str]) -> set[str]:
        names = list(names)
        for n in names:
            self.require_set(n)
        if not names:
            raise ValueError("upper_bounds needs at least one set")
        bounds = self.ancestors(names[0])
        for n in names[1:]:
            bounds &= self.ancestors(n)
        return bounds

    def common_superset(self, names: Iterable[str]) -> str | None:
        """Minimal set containing every input set, or None if absent or ambiguous."""
        bounds = self.upper_bounds(names)
        minimal = [b for b in bounds if not any(o != b and self.is_subset(o, b) for o in bounds)]
        if len(minimal) != 1:
            return None
        return minimal[0]

    def drop_set(self, name: str) -> None:
        self.require_set(name)
        for fn in self.functions.values():
            if fn.domain == name or fn.codomain == name:
                raise InUseError(f"set {name} is referenced by function {fn.name}")
        del self.sets[name]
        del self.parents[name]
        for ps in self.parents.values():
            ps.discard(name)

    # -- functions --------------------------------------------------------

    def declare_function(self, name: str, domain: str, codomain: Codomain, total: bool = False) -> FunctionDef:
        check_identifier(name)
        self.require_set(domain)
        if isinstance(codomain, str):
            self.require_set(codomain)
        elif not isinstance(codomain, ValueDomain):
            raise TypeError(f"codomain must be a ValueDomain or set name, got {codomain!r}")
        if (name, domain) in self.functions:
            raise DuplicateNameError(f"function {name} is already declared on {domain}")
        fn = FunctionDef(name, domain, codomain, bool(total))
        self.functions[(name, domain)] = fn
        try:
            self._check_name_clashes()
        except DuplicateNameError:
            del self.functions[(name, domain)]
            raise
        return fn

    def drop_function(self, name: str, domain: str) -> None:
        if (name, domain) not in self.functions:
            raise UnknownNameError(f"unknown function {name} on {domain}")
        del self.functions[(name, domain)]

    def function(self, name: str, domain: str | None = None) -> FunctionDef:
        """Resolve a function by name, optionally restricted to a domain."""
        if domain is not None:
            try:
                return self.functions[(name, domain)]
            except KeyError:
                raise UnknownNameError(f"unknown function {name} on {domain}") from None
        found = [f for f in self.functions.values() if f.name == name]
        if not found:
            raise UnknownNameError(f"unknown function {name}")
        if len(found) > 1:
            doms = ", ".join(f.domain for f in found)
            raise UnknownNameError(f"function name {name} is ambiguous (declared on {doms})")
        return found[0]

    def visible_functions(self, set_name: str) -> list[FunctionDef]:
        """Columns a row of ``set_name`` carries: functions on it or on its supersets."""
        anc = self.ancestors(set_name)
        return [f for f in self.functions.values() if f.domain in anc]

    def table_functions(self, set_name: str) -> list[FunctionDef]:
        """Columns physically present on the table of ``set_name``.

        These are the visible functions plus those declared on its subsets
        (null for rows outside the subset).
        """
        related = self.ancestors(set_name) | self.descendants(set_name)
        return [f for f in self.functions.values() if f.domain in related]

    def _check_name_clashes(self) -> None:
        by_name: dict[str, list[FunctionDef]] = {}
        for f in self.functions.values():
            by_name.setdefault(f.name, []).append(f)
        for name, fns in by_name.items():
            for i, a in enumerate(fns):
                for b in fns[i + 1:]:
                    if self.is_subset(a.domain, b.domain) or self.is_subset(b.domain, a.domain):
                        raise DuplicateNameError(
                            f"column {name} would be visible twice ({a.domain} and {b.domain} are nested)"
                        )

