"""Generate SQL triggers enforcing the registered constraints of a table.

Target dialect is SQLite: ``CREATE TRIGGER ... BEFORE INSERT|UPDATE`` with
``SELECT RAISE(ABORT, '<message>') WHERE <condition>`` statements.  The
statements run in pipeline order, so the first one to fire names the same
constraint and column as the in-process enforcer.  Update triggers are
gated on the constraint's columns actually changing (``NEW.c IS NOT OLD.c``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog, FunctionDef
from .constraints import Constraint, Kind
from .enforcement import (
    Enforcer,
    consolidated_message,
    existence_message,
    non_existence_message,
    pipeline_order,
)
from .errors import ExconError
from .store import KEY_COLUMN

_SQL_TYPES = {"integer": "INTEGER", "decimal": "NUMERIC", "text": "TEXT", "date": "TEXT", "boolean": "INTEGER"}


class CodegenError(ExconError):
    pass


@dataclass(frozen=True)
class TriggerScript:
    table: str
    sql: str
    constraints: tuple[str, ...] = ()

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.sql)


def quote_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def quote_str(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def table_constraints(catalog: Catalog, enforcer: Enforcer, table: str) -> list[Constraint]:
    """Constraints whose base is comparable with ``table``, in pipeline order.

    A constraint based on a proper subset of ``table`` never fires for rows
    outside that subset, because all its columns read as null there.
    """
    related = catalog.ancestors(table) | catalog.descendants(table)
    return pipeline_order(c for c in enforcer.hooks() if c.base in related)


def scaffold_ddl(catalog: Catalog, table: str) -> str:
    cols = [f"    {quote_ident(KEY_COLUMN)} INTEGER PRIMARY KEY"]
    for fn in catalog.table_functions(table):
        sql_type = _SQL_TYPES[fn.value_domain.kind]
        cols.append(f"    {quote_ident(fn.name)} {sql_type}")
    return f"CREATE TABLE {quote_ident(table)} (\n" + ",\n".join(cols) + "\n);\n"


class _Conditions:
    def __init__(self, present: set[str]):
        self.present = present

    def col(self, fn: FunctionDef) -> str:
        if fn.name not in self.present:
            return "NULL"
        return f"NEW.{quote_ident(fn.name)}"

    def is_null(self, fn) -> str:
        return f"{self.col(fn)} IS NULL"

    def not_null(self, fn) -> str:
        return f"{self.col(fn)} IS NOT NULL"

    def any_not_null(self, fns) -> str:
        return "(" + " OR ".join(self.not_null(f) for f in fns) + ")"

    def changed(self, c: Constraint) -> str:
        parts = [f"NEW.{quote_ident(f.name)} IS NOT OLD.{quote_ident(f.name)}" for f in c.components if f.name in self.present]
        return "(" + " OR ".join(parts) + ")" if parts else "0"


def _statements(c: Constraint, cond: _Conditions, update: bool) -> list[str]:
    """SQL statements for one constraint, in firing order."""
    out = []
    gate = [cond.changed(c)] if update else []
    if c.kind is Kind.EXISTENCE:
        lhs = cond.any_not_null(c.left)
        for g in c.right:
            out.append((gate + [lhs, cond.is_null(g)], existence_message(c.name, g.name)))
    elif c.kind is Kind.NON_EXISTENCE:
        lhs = cond.any_not_null(c.left)
        for g in c.right:
            out.append((gate + [lhs, cond.not_null(g)], non_existence_message(c.name, g.name)))
    else:
        right = list(c.right)
        count = "(" + " + ".join(f"({cond.not_null(g)})" for g in right) + ") > 1"
        # one statement per (first, second) pair of non-null columns
        for i, second in enumerate(right):
            for j in range(i):
                first = right[j]
                terms = [cond.is_null(g) for g in right[:j]]
                terms.append(cond.not_null(first))
                terms += [cond.is_null(g) for g in right[j + 1:i]]
                terms.append(cond.not_null(second))
                out.append((gate + [count] + terms, consolidated_message(c.name, second.name, first.name)))
    return [
        f"    SELECT RAISE(ABORT, {quote_str(msg)})\n     WHERE " + "\n       AND ".join(terms) + ";"
        for terms, msg in out
    ]


def generate(catalog: Catalog, enforcer: Enforcer, table: str) -> TriggerScript:
    catalog.require_set(table)
    constraints = table_constraints(catalog, enforcer, table)
    if not constraints:
        raise CodegenError(f"table {table} has no registered constraints")
    cond = _Conditions({f.name for f in catalog.table_functions(table)})

    lines = [f"-- Integrity triggers for table {table} (SQLite dialect)."]
    lines.append("-- Constraints, in enforcement order:")
    for c in constraints:
        lines.append(f"--   {c.name} ({c.kind.value}): {c}")
    lines.append("--")
    lines.append("-- Table scaffold:")
    lines.extend("-- " + ln for ln in scaffold_ddl(catalog, table).splitlines())
    lines.append("")
    for event, suffix in (("INSERT", "bi"), ("UPDATE", "bu")):
        name = quote_ident(f"{table}_excon_{suffix}")
        lines.append(f"DROP TRIGGER IF EXISTS {name};")
        lines.append(f"CREATE TRIGGER {name} BEFORE {event} ON {quote_ident(table)}")
        lines.append("FOR EACH ROW BEGIN")
        for c in constraints:
            lines.append(f"    -- {c.name}")
            lines.extend(_statements(c, cond, update=event == "UPDATE"))
        lines.append("END;")
        lines.append("")
    return TriggerScript(table, "\n".join(lines), tuple(c.name for c in constraints))
