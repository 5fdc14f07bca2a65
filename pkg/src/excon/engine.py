"""One object holding a catalog, its tables and its constraints."""

from __future__ import annotations

import datetime as dt
from typing import Callable

from . import dsl
from .catalog import Catalog, FunctionDef, ValueDomain
from .constraints import Constraint, ConstraintRegistry, Kind
from .enforcement import Enforcer
from .errors import InUseError, StoreError
from .store import Store


class Database:
    def __init__(self, clock: Callable[[], dt.date] = dt.date.today):
        self.catalog = Catalog()
        self.enforcer = Enforcer(self.catalog)
        self.store = Store(self.catalog, self.enforcer, clock)
        self.registry = ConstraintRegistry(self.catalog, self.store.rows, self.enforcer)

    # -- schema -----------------------------------------------------------

    def declare_set(self, name: str):
        obj = self.catalog.declare_set(name)
        self.store.create_table(name)
        return obj

    def declare_inclusion(self, sub: str, sup: str) -> None:
        self.catalog.declare_inclusion(sub, sup)

    def declare_function(self, name: str, domain: str, codomain, total: bool = False) -> FunctionDef:
        if isinstance(codomain, str) and codomain in dsl.KIND_NAMES:
            codomain = ValueDomain(codomain)
        if total:
            self.catalog.require_set(domain)
            if self.store.rows(domain):
                raise StoreError(f"cannot declare total function {name}: table {domain} is not empty")
        return self.catalog.declare_function(name, domain, codomain, total)

    def drop_function(self, name: str, domain: str) -> None:
        fn = self.catalog.function(name, domain)
        users = self.registry.referencing(fn)
        if users:
            raise InUseError(f"function {name} is used by constraint(s) {', '.join(users)}")
        self.catalog.drop_function(name, domain)
        for row in self.store.rows(domain):
            row.values.pop(name, None)

    def drop_set(self, name: str) -> None:
        if any(c.base == name for c in self.registry.list_constraints()):
            raise InUseError(f"set {name} is the base of a constraint")
        if self.store.own_rows(name):
            raise InUseError(f"set {name} still has rows")
        self.catalog.drop_set(name)
        self.store.drop_table(name)

    def apply(self, decls) -> None:
        """Apply parsed schema declarations in order."""
        for d in decls:
            if isinstance(d, dsl.SetDecl):
                self.declare_set(d.name)
            elif isinstance(d, dsl.SubsetDecl):
                self.declare_inclusion(d.sub, d.sup)
            elif isinstance(d, dsl.FnDecl):
                self.declare_function(d.name, d.domain, d.codomain, d.total)
            elif isinstance(d, dsl.ConstraintAst):
                self.add_ast(d)
            else:
                raise TypeError(f"unexpected declaration {d!r}")

    def load_schema(self, text: str) -> None:
        self.apply(dsl.parse_schema(text))

    # -- constraints ------------------------------------------------------

    def add_constraint(self, name: str, kind, left, right) -> Constraint:
        return self.registry.add_constraint(name, Kind(kind), left, right)

    def add_ast(self, ast: dsl.ConstraintAst) -> Constraint:
        return self.registry.add_constraint(ast.name, ast.kind, ast.left, ast.right)

    def add(self, text: str) -> Constraint:
        """Parse and admit one ``constraint NAME : ...`` declaration."""
        return self.add_ast(dsl.parse_constraint(text))

    def delete_constraint(self, name: str, confirmed: bool) -> bool:
        return self.registry.delete_constraint(name, confirmed)

    def list_constraints(self) -> list[Constraint]:
        return self.registry.list_constraints()

    def validate_instance(self, c) -> list[int]:
        return self.registry.validate_instance(c)

    # -- rows -------------------------------------------------------------

    def open_insert(self, table: str, key: int | None = None):
        return self.store.open_insert(table, key)

    def open_update(self, table: str, key: int):
        return self.store.open_update(table, key)

    def insert(self, table: str, values: dict | None = None, key: int | None = None) -> int:
        return self.store.insert(table, values, key)

    def update(self, table: str, key: int, values: dict) -> int:
        return self.store.update(table, key, values)

    def delete_row(self, table: str, key: int) -> None:
        self.store.delete_row(table, key)
