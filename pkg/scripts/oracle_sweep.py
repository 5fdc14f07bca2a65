"""Exhaustive sweep: every kind-valid (kind, n, m) and every null pattern,
comparing the engine, the brute-force definition and SQLite triggers.

    python3 scripts/oracle_sweep.py [--max-n 3] [--max-m 4]
"""

from __future__ import annotations

import argparse
import itertools
import sqlite3
import time

from excon import Database, Kind, SaveRejected, codegen


def holds(kind: Kind, f, g) -> bool:
    if kind is Kind.CONSOLIDATED:
        return sum(v is not None for v in g) <= 1
    if all(v is None for v in f):
        return True
    if kind is Kind.EXISTENCE:
        return all(v is not None for v in g)
    return all(v is None for v in g)


def cases(max_n: int, max_m: int):
    for kind in Kind:
        for n in range(max_n + 1):
            for m in range(1, max_m + 1):
                if kind is Kind.CONSOLIDATED and (n or m < 2):
                    continue
                if kind is not Kind.CONSOLIDATED and not n:
                    continue
                yield kind, n, m


def sweep(kind: Kind, n: int, m: int) -> tuple[int, int, int]:
    db = Database()
    db.declare_set("T")
    cols = [f"c{i}" for i in range(n + m)]
    for c in cols:
        db.declare_function(c, "T", "integer")
    left, right = cols[:n], cols[n:]
    db.add_constraint("k", kind, left, right)
    conn = sqlite3.connect(":memory:")
    conn.executescript(codegen.scaffold_ddl(db.catalog, "T"))
    conn.executescript(codegen.generate(db.catalog, db.enforcer, "T").sql)

    rows = oracle_diff = sql_diff = 0
    for pattern in itertools.product((False, True), repeat=n + m):
        vals = {c: 1 for c, on in zip(cols, pattern) if on}
        rows += 1
        try:
            db.insert("T", vals)
            engine = None
        except SaveRejected as e:
            engine = e.message
        expected = holds(kind, [vals.get(c) for c in left], [vals.get(c) for c in right])
        oracle_diff += (engine is None) != expected
        names = list(vals) or ["_x"]
        try:
            conn.execute(f'INSERT INTO "T" ({", ".join(names)}) VALUES ({", ".join("?" * len(names))})',
                         [vals.get(c) for c in names])
            sql = None
        except sqlite3.IntegrityError as e:
            sql = str(e)
        sql_diff += sql != engine
    conn.close()
    return rows, oracle_diff, sql_diff


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--max-m", type=int, default=4)
    args = p.parse_args()
    print(f"sqlite {sqlite3.sqlite_version}")
    print(f"{'kind':<14}{'n':>3}{'m':>3}{'rows':>7}{'oracle':>8}{'sqlite':>8}")
    start = time.perf_counter()
    totals = [0, 0, 0]
    for kind, n, m in cases(args.max_n, args.max_m):
        r = sweep(kind, n, m)
        totals = [a + b for a, b in zip(totals, r)]
        print(f"{kind.value:<14}{n:>3}{m:>3}{r[0]:>7}{r[1]:>8}{r[2]:>8}")
    print(f"total rows {totals[0]}, oracle mismatches {totals[1]}, "
          f"sqlite mismatches {totals[2]}, {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()
