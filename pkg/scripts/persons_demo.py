"""Walk through the PERSONS example: admit ec and nec, then try four saves.

    python3 scripts/persons_demo.py
"""

from __future__ import annotations

import datetime as dt

from excon import Database, SaveRejected

SCHEMA = """\
set PERSONS
fn SSN : PERSONS -> integer(9)
fn ITIN : PERSONS -> integer(9)
fn BirthDate : PERSONS -> date [1900-01-01,TODAY]
fn Sex : PERSONS -> text(1)
constraint ec : SSN * ITIN |- BirthDate * Sex
constraint nec : !|- SSN * ITIN
"""

ATTEMPTS = [
    {"SSN": 123456789, "Sex": "F"},
    {"SSN": 123456789, "BirthDate": "1990-01-01"},
    {"SSN": 123456789, "ITIN": 987654321, "BirthDate": "1990-01-01", "Sex": "F"},
    {"SSN": 123456789, "BirthDate": "1990-01-01", "Sex": "F"},
]


def main() -> None:
    db = Database(clock=lambda: dt.date(2024, 5, 18))
    db.load_schema(SCHEMA)
    for c in db.list_constraints():
        print(f"admitted {c}")
    for values in ATTEMPTS:
        db.enforcer.reset_counters()
        try:
            key = db.insert("PERSONS", values)
            outcome = f"saved as row {key}"
        except SaveRejected as e:
            outcome = e.message
        reads = dict(db.enforcer.counters.component_reads)
        print(f"\n{values}\n  -> {outcome}\n  hooks run: {db.enforcer.counters.evaluated}, reads: {reads}")


if __name__ == "__main__":
    main()
