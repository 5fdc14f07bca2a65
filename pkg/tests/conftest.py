import datetime as dt
import itertools
import sqlite3

import pytest

from excon import Database, Kind
from excon import codegen

FIXED_TODAY = dt.date(2024, 5, 18)

PERSONS_SCHEMA = """\
set PERSONS
fn SSN : PERSONS -> integer(9)
fn ITIN : PERSONS -> integer(9)
fn BirthDate : PERSONS -> date [1900-01-01,TODAY]
fn Sex : PERSONS -> text(1)
"""

EC = "constraint ec : SSN * ITIN |- BirthDate * Sex"
NEC = "constraint nec : !|- SSN * ITIN"


def fixed_clock():
    return FIXED_TODAY


def make_persons(constraints=(NEC, EC)):
    db = Database(clock=fixed_clock)
    db.load_schema(PERSONS_SCHEMA)
    for text in constraints:
        db.add(text)
    return db


@pytest.fixture
def persons():
    return make_persons(())


@pytest.fixture
def persons_ec_nec():
    return make_persons()


def flat_db(ncols, table="T", total=()):
    """A single table T with integer columns c0..c{ncols-1}."""
    db = Database(clock=fixed_clock)
    db.declare_set(table)
    for i in range(ncols):
        db.declare_function(f"c{i}", table, "integer", total=i in total)
    return db


def kind_cases(max_n=3, max_m=4):
    """Every kind-valid (kind, n, m) with n <= max_n and 1 <= m <= max_m."""
    for kind in Kind:
        for n in range(0, max_n + 1):
            for m in range(1, max_m + 1):
                if kind is Kind.CONSOLIDATED and (n != 0 or m < 2):
                    continue
                if kind is not Kind.CONSOLIDATED and n == 0:
                    continue
                yield kind, n, m


def null_patterns(width):
    """All 2**width assignments; True means the column holds a value."""
    return itertools.product((False, True), repeat=width)


def single_constraint_db(kind, n, m, name="k"):
    db = flat_db(n + m)
    left = [f"c{i}" for i in range(n)]
    right = [f"c{n + j}" for j in range(m)]
    db.add_constraint(name, kind, left, right)
    return db, left, right


def sqlite_with(db, table="T"):
    """In-memory SQLite connection with the scaffold table and generated triggers."""
    conn = sqlite3.connect(":memory:")
    conn.executescript(codegen.scaffold_ddl(db.catalog, table))
    conn.executescript(codegen.generate(db.catalog, db.enforcer, table).sql)
    return conn


def sqlite_insert(conn, table, values):
    """Insert a row; returns None on success or the abort message."""
    cols = list(values)
    sql = f'INSERT INTO "{table}" ({", ".join(cols)}) VALUES ({", ".join("?" for _ in cols)})'
    if not cols:
        sql = f'INSERT INTO "{table}" DEFAULT VALUES'
    try:
        conn.execute(sql, [values[c] for c in cols])
    except sqlite3.IntegrityError as e:
        return str(e)
    return None


# -- acceptance reporting ----------------------------------------------------

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and report.failed and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], "error"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
