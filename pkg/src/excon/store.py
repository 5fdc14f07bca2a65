"""In-memory tables with surrogate keys, edit sessions and CSV snapshots.

Each row lives in the table of its most specific set and is visible in
every superset's table.  Columns declared on a set the row does not belong
to read as null.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from .catalog import Catalog, FunctionDef
from .enforcement import EnforcementOutcome, Violation, totality_message
from .errors import DomainValueError, SaveRejected, StoreError, UnknownNameError

KEY_COLUMN = "_x"


@dataclass
class Row:
    key: int
    set_name: str
    values: dict = field(default_factory=dict)
    store: "Store | None" = field(default=None, repr=False, compare=False)

    def value_of(self, fn: FunctionDef):
        if not self.store.catalog.is_subset(self.set_name, fn.domain):
            return None
        return self.values.get(fn.name)


@dataclass
class EditSession:
    """Pending edits of one row.  ``dirty`` holds columns whose value differs
    from the committed one."""

    store: "Store" = field(repr=False)
    set_name: str
    key: int | None
    is_new: bool
    committed: dict = field(default_factory=dict)
    pending: dict = field(default_factory=dict)
    dirty: set = field(default_factory=set)
    closed: bool = False

    def set(self, column: str, value) -> None:
        self.store.set_value(self, column, value)

    def merged(self) -> dict:
        out = dict(self.committed)
        out.update(self.pending)
        return out

    def value_of(self, fn: FunctionDef):
        if not self.store.catalog.is_subset(self.set_name, fn.domain):
            return None
        if fn.name in self.pending:
            return self.pending[fn.name]
        return self.committed.get(fn.name)

    def save(self) -> int:
        return self.store.save(self)

    def close(self) -> None:
        self.store.close(self)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if not self.closed:
            self.close()


class Store:
    """Tables for every declared set.

    ``enforcer`` is consulted on every save; ``clock`` supplies the date used
    for ``TODAY`` range bounds.
    """

    def __init__(self, catalog: Catalog, enforcer=None, clock: Callable[[], dt.date] = dt.date.today):
        self.catalog = catalog
        self.enforcer = enforcer
        self.clock = clock
        self.tables: dict[str, dict[int, Row]] = {}
        self._next_key = 1
        self._issued: set[int] = set()
        self._open: dict[int, EditSession] = {}

    @property
    def next_key(self) -> int:
        return self._next_key

    def reserve_keys(self, next_key: int) -> None:
        """Never issue keys below ``next_key`` (keeps deleted keys retired across restarts)."""
        self._next_key = max(self._next_key, next_key)

    # -- tables -----------------------------------------------------------

    def create_table(self, set_name: str) -> None:
        self.catalog.require_set(set_name)
        self.tables.setdefault(set_name, {})

    def drop_table(self, set_name: str) -> None:
        if self.tables.get(set_name):
            raise StoreError(f"table {set_name} is not empty")
        self.tables.pop(set_name, None)

    def _table(self, set_name: str) -> dict[int, Row]:
        self.catalog.require_set(set_name)
        return self.tables.setdefault(set_name, {})

    def own_rows(self, set_name: str) -> list[Row]:
        return sorted(self._table(set_name).values(), key=lambda r: r.key)

    def rows(self, set_name: str) -> list[Row]:
        """Every committed row visible in ``set_name`` (own and subsets'), by key."""
        self.catalog.require_set(set_name)
        out = []
        for s in self.catalog.descendants(set_name):
            out.extend(self.tables.get(s, {}).values())
        return sorted(out, key=lambda r: r.key)

    def __iter__(self) -> Iterator[Row]:
        for t in self.tables.values():
            yield from t.values()

    def get(self, set_name: str, key: int) -> Row:
        for s in self.catalog.descendants(set_name):
            row = self.tables.get(s, {}).get(key)
            if row is not None:
                return row
        raise StoreError(f"no row {key} in {set_name}")

    def columns(self, set_name: str) -> list[FunctionDef]:
        return self.catalog.visible_functions(set_name)

    def _column(self, set_name: str, column: str) -> FunctionDef:
        for fn in self.catalog.visible_functions(set_name):
            if fn.name == column:
                return fn
        raise UnknownNameError(f"{set_name} has no column {column}")

    # -- sessions ---------------------------------------------------------

    def open_insert(self, set_name: str, key: int | None = None) -> EditSession:
        self._table(set_name)
        if key is not None:
            if not isinstance(key, int) or isinstance(key, bool) or key <= 0:
                raise StoreError(f"surrogate key must be a positive integer, got {key!r}")
            if key in self._issued or key in self._open:
                raise StoreError(f"surrogate key {key} is already used")
        return EditSession(self, set_name, key, is_new=True)

    def open_update(self, set_name: str, key: int) -> EditSession:
        row = self.get(set_name, key)
        if key in self._open:
            raise StoreError(f"row {key} is already being edited")
        session = EditSession(self, row.set_name, key, is_new=False, committed=dict(row.values))
        self._open[key] = session
        return session

    def close(self, session: EditSession) -> None:
        session.closed = True
        if session.key is not None and self._open.get(session.key) is session:
            del self._open[session.key]

    def set_value(self, session: EditSession, column: str, value) -> None:
        if session.closed:
            raise StoreError("session is closed")
        fn = self._column(session.set_name, column)
        if value is not None:
            value = fn.value_domain.coerce(value, self.clock())
        session.pending[column] = value
        if value == session.committed.get(column) and type(value) is type(session.committed.get(column)):
            session.dirty.discard(column)
        else:
            session.dirty.add(column)

    def save(self, session: EditSession) -> int:
        """Commit the session or raise :class:`SaveRejected`; nothing is
        written on rejection and the session stays open."""
        if session.closed:
            raise StoreError("session is closed")
        merged = session.merged()
        for fn in self.catalog.visible_functions(session.set_name):
            if fn.total and merged.get(fn.name) is None:
                raise SaveRejected(
                    EnforcementOutcome(Violation(None, totality_message(fn.name), (fn.name,)))
                )
        if self.enforcer is not None:
            outcome = self.enforcer.before_update(session)
            if outcome.cancelled:
                raise SaveRejected(outcome)
        return self._commit(session, merged)

    def _commit(self, session: EditSession, merged: dict) -> int:
        values = {k: v for k, v in merged.items() if v is not None}
        if session.is_new:
            key = session.key if session.key is not None else self._next_key
            if key in self._issued:
                raise StoreError(f"surrogate key {key} is already used")
            self._issued.add(key)
            self._next_key = max(self._next_key, key + 1)
            self._table(session.set_name)[key] = Row(key, session.set_name, values, self)
            session.key = key
        else:
            self.tables[session.set_name][session.key].values = values
        self.close(session)
        return session.key

    def delete_row(self, set_name: str, key: int) -> None:
        """Remove a row.  No constraint is evaluated: deletion cannot violate one."""
        row = self.get(set_name, key)
        if key in self._open:
            raise StoreError(f"row {key} is being edited")
        del self.tables[row.set_name][key]

    def insert(self, set_name: str, values: dict | None = None, key: int | None = None) -> int:
        session = self.open_insert(set_name, key)
        for col, v in (values or {}).items():
            session.set(col, v)
        return self.save(session)

    def update(self, set_name: str, key: int, values: dict) -> int:
        session = self.open_update(set_name, key)
        try:
            for col, v in values.items():
                session.set(col, v)
            return self.save(session)
        finally:
            if not session.closed:
                self.close(session)

    # -- CSV --------------------------------------------------------------

    def save_csv(self, set_name: str, path) -> None:
        cols = self.columns(set_name)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([KEY_COLUMN] + [fn.name for fn in cols])
            for row in self.own_rows(set_name):
                w.writerow([row.key] + [fn.value_domain.render(row.values.get(fn.name)) for fn in cols])

    def load_csv(self, set_name: str, path, trusted: bool = False) -> list[int]:
        """Append the rows of a CSV file to ``set_name``'s table.

        Untrusted rows go through :meth:`save` one by one; trusted rows skip
        the constraint hooks but not domain and totality checks.  The load is
        all-or-nothing.
        """
        cols = {fn.name: fn for fn in self.columns(set_name)}
        path = Path(path)
        with open(path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise StoreError(f"{path}: missing header") from None
            if not header or header[0] != KEY_COLUMN:
                raise StoreError(f"{path}: first column must be {KEY_COLUMN}")
            names = header[1:]
            if len(set(names)) != len(names) or set(names) != set(cols):
                raise StoreError(
                    f"{path}: header {names} does not match the columns of {set_name}: {sorted(cols)}"
                )
            records = []
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                if len(rec) != len(header):
                    raise StoreError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
                try:
                    key = int(rec[0])
                except ValueError:
                    raise StoreError(f"{path}:{lineno}:{KEY_COLUMN}: bad surrogate key {rec[0]!r}") from None
                values = {}
                for name, text in zip(names, rec[1:]):
                    try:
                        values[name] = cols[name].value_domain.parse(text, self.clock())
                    except DomainValueError as e:
                        raise StoreError(f"{path}:{lineno}:{name}: {e}") from None
                records.append((lineno, key, values))

        loaded: list[int] = []
        issued, next_key = set(self._issued), self._next_key
        try:
            for lineno, key, values in records:
                session = self.open_insert(set_name, key)
                session.pending.update(values)
                if trusted:
                    merged = session.merged()
                    for fn in cols.values():
                        if fn.total and merged.get(fn.name) is None:
                            raise SaveRejected(
                                EnforcementOutcome(Violation(None, totality_message(fn.name), (fn.name,)))
                            )
                    self._commit(session, merged)
                else:
                    self.save(session)
                loaded.append(key)
        except Exception:
            for key in loaded:
                del self.tables[set_name][key]
            self._issued, self._next_key = issued, next_key
            raise
        return loaded
