"""Command-line front end.

State lives in a workspace directory::

    schema.emdm        set / subset / fn declarations
    constraints.emdm   one constraint per line, in declaration order
    <SET>.csv          rows whose most specific set is SET

Every invocation rebuilds the engine from the workspace: schema, then
trusted CSV loads, then re-admission of every constraint (which re-scans
the instance).  ``check`` is the exception: it scans stored constraints
without admitting them, so it still works on a workspace whose rows were
made inconsistent by a trusted load.

Exit codes: 0 success, 1 rejection or violation, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from . import codegen, dsl
from .engine import Database
from .errors import ConstraintRejected, ExconError, ParseError, SaveRejected

SCHEMA_FILE = "schema.emdm"
CONSTRAINTS_FILE = "constraints.emdm"
_NEXT_KEY_RE = re.compile(r"^# next-key: (\d+)$", re.M)


class UsageError(Exception):
    pass


class Rejected(Exception):
    pass


class Workspace:
    def __init__(self, path):
        self.path = Path(path)

    def load(self, admit: bool = True):
        """Rebuild the engine.  With ``admit=False`` the stored constraints are
        resolved but not admitted; they are returned alongside the engine."""
        db = Database()
        schema = self.path / SCHEMA_FILE
        if schema.exists():
            text = schema.read_text(encoding="utf-8")
            db.apply(dsl.parse_schema(text))
            for name in db.catalog.sets:
                csv_path = self.path / f"{name}.csv"
                if csv_path.exists():
                    db.store.load_csv(name, csv_path, trusted=True)
            m = _NEXT_KEY_RE.search(text)
            if m:
                db.store.reserve_keys(int(m.group(1)))
        stored = []
        cons = self.path / CONSTRAINTS_FILE
        if cons.exists():
            for ast in dsl.parse_constraints(cons.read_text(encoding="utf-8")):
                if admit:
                    db.add_ast(ast)
                else:
                    stored.append(db.registry.build(ast.name, ast.kind, ast.left, ast.right))
        return db if admit else (db, stored)

    def save(self, db: Database) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        schema = dsl.render_schema(db.catalog) + f"# next-key: {db.store.next_key}\n"
        (self.path / SCHEMA_FILE).write_text(schema, encoding="utf-8")
        cons = "".join(dsl.render(c) + "\n" for c in db.list_constraints())
        (self.path / CONSTRAINTS_FILE).write_text(cons, encoding="utf-8")
        for name in db.catalog.sets:
            db.store.save_csv(name, self.path / f"{name}.csv")
        for stale in self.path.glob("*.csv"):
            if stale.stem not in db.catalog.sets:
                stale.unlink()


def _assignments(items: list[str]) -> dict:
    values = {}
    for item in items:
        col, sep, val = item.partition("=")
        if not sep or not col:
            raise UsageError(f"expected col=value, got {item!r}")
        values[col] = None if val == "" else val
    return values


def _key(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"row key must be an integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="excon", description="Existence / non-existence constraint engine")
    p.add_argument("-w", "--workspace", default=os.environ.get("EXCON_WORKSPACE", "."),
                   help="workspace directory (default: $EXCON_WORKSPACE or .)")
    p.add_argument("--porcelain", action="store_true", help="tab-separated machine-readable output")
    sub = p.add_subparsers(dest="cmd", required=True)

    schema = sub.add_parser("schema").add_subparsers(dest="action", required=True)
    schema.add_parser("load").add_argument("file")
    schema.add_parser("show")

    cons = sub.add_parser("constraint").add_subparsers(dest="action", required=True)
    cons.add_parser("add").add_argument("decl")
    d = cons.add_parser("del")
    d.add_argument("name")
    d.add_argument("--yes", action="store_true")
    cons.add_parser("list")

    row = sub.add_parser("row").add_subparsers(dest="action", required=True)
    r = row.add_parser("insert")
    r.add_argument("table")
    r.add_argument("values", nargs="*")
    r = row.add_parser("update")
    r.add_argument("table")
    r.add_argument("key")
    r.add_argument("values", nargs="*")
    r = row.add_parser("del")
    r.add_argument("table")
    r.add_argument("key")

    sub.add_parser("check").add_argument("constraint", nargs="?")

    g = sub.add_parser("gen-sql")
    g.add_argument("table")
    g.add_argument("-o", "--output")

    lc = sub.add_parser("load-csv")
    lc.add_argument("table")
    lc.add_argument("file")
    lc.add_argument("--trusted", action="store_true")

    sc = sub.add_parser("save-csv")
    sc.add_argument("table")
    sc.add_argument("file")
    return p


def _confirm(name: str, stdin, stdout) -> bool:
    stdout.write(f"Delete constraint {name}? [y/N] ")
    stdout.flush()
    return stdin.readline().strip().lower() in ("y", "yes")


def _check(args, ws: Workspace, out) -> int:
    # stored constraints are scanned rather than re-admitted, so a workspace
    # holding violating rows (from a trusted load) can still be inspected
    db, stored = ws.load(admit=False)
    by_name = {c.name: c for c in stored}
    if args.constraint is not None and args.constraint not in by_name:
        raise Rejected(f"Request rejected: {args.constraint} is not a known constraint name!")
    targets = [by_name[args.constraint]] if args.constraint else stored
    bad = False
    for c in targets:
        for x in db.validate_instance(c):
            bad = True
            out.write(f"{c.name}\t{x}\n" if args.porcelain else f"{c.name} is violated for {x}\n")
    return 1 if bad else 0


def _dispatch(args, ws: Workspace, out, stdin) -> int:
    if args.cmd == "check":
        return _check(args, ws, out)
    db = ws.load()
    cmd, action = args.cmd, getattr(args, "action", None)
    mutated = False

    if cmd == "schema" and action == "load":
        text = Path(args.file).read_text(encoding="utf-8")
        db.apply(dsl.parse_schema(text))
        mutated = True
    elif cmd == "schema":
        out.write(dsl.render_schema(db.catalog))
    elif cmd == "constraint" and action == "add":
        db.add(args.decl)
        mutated = True
    elif cmd == "constraint" and action == "del":
        if args.name not in db.registry:
            db.delete_constraint(args.name, confirmed=False)  # raises the unknown-name rejection
        if args.yes:
            confirmed = True
        elif stdin.isatty():
            confirmed = _confirm(args.name, stdin, out)
        else:
            raise Rejected(f"Deleting {args.name} needs confirmation: rerun with --yes")
        if not confirmed:
            raise Rejected(f"Request cancelled: {args.name} was not deleted")
        db.delete_constraint(args.name, confirmed=True)
        mutated = True
    elif cmd == "constraint":
        for c in db.list_constraints():
            if args.porcelain:
                out.write("\t".join([c.name, c.kind.value, c.base, "*".join(c.left.names), "*".join(c.right.names)]) + "\n")
            else:
                out.write(f"{dsl.render(c)}    # on {c.base}\n")
    elif cmd == "row" and action == "insert":
        key = db.insert(args.table, _assignments(args.values))
        out.write(f"{key}\n")
        mutated = True
    elif cmd == "row" and action == "update":
        db.update(args.table, _key(args.key), _assignments(args.values))
        mutated = True
    elif cmd == "row":
        db.delete_row(args.table, _key(args.key))
        mutated = True
    elif cmd == "gen-sql":
        script = codegen.generate(db.catalog, db.enforcer, args.table)
        if args.output:
            script.write(args.output)
        else:
            out.write(script.sql)
    elif cmd == "load-csv":
        db.store.load_csv(args.table, args.file, trusted=args.trusted)
        mutated = True
    elif cmd == "save-csv":
        db.store.save_csv(args.table, args.file)

    if mutated:
        ws.save(db)
    return 0


def run(argv=None, stdout=None, stderr=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return _dispatch(args, Workspace(args.workspace), stdout, stdin)
    except (UsageError, ParseError) as e:
        stderr.write(f"{e}\n")
        return 2
    except (ConstraintRejected, SaveRejected, Rejected) as e:
        stderr.write(f"{getattr(e, 'message', e)}\n")
        return 1
    except (ExconError, OSError) as e:
        stderr.write(f"error: {e}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
