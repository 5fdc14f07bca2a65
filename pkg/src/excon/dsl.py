"""Parser and renderer for the schema and constraint text formats.

Schema lines::

    set PERSONS
    subset USResidences <= PERSONS
    fn SSN : USResidences -> integer(9)
    fn BirthDate : PERSONS -> date [1900-01-01,TODAY]
    fn Owner : CARS -> PERSONS total

Constraint lines::

    constraint ec : SSN * ITIN |- BirthDate * Sex
    constraint r : TributaryTo !|- Lake * Sea
    constraint nec : !|- SSN * ITIN

``#`` starts a comment.  The Unicode forms ``•``, ``|—`` and ``¬|—`` are
accepted as aliases of ``*``, ``|-`` and ``!|-``.  Names are not resolved
here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .catalog import KINDS, TODAY, Catalog, ValueDomain
from .constraints import Constraint, Kind
from .errors import DomainValueError, ParseError

KIND_NAMES = frozenset(KINDS)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\f\v]+)
   |(?P<comment>\#.*)
   |(?P<date>\d{4}-\d{2}-\d{2})
   |(?P<op>!\|-|¬\|[-—]|\|[-—]|<=|->|[:*•()\[\],])
   |(?P<number>-?\d+(?:\.\d+)?)
   |(?P<string>"(?:[^"\\]|\\.)*")
   |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_OP_ALIASES = {"•": "*", "|—": "|-", "¬|-": "!|-", "¬|—": "!|-"}


@dataclass(frozen=True)
class Span:
    line: int
    start: int
    end: int


@dataclass(frozen=True)
class SetDecl:
    name: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SubsetDecl:
    sub: str
    sup: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FnDecl:
    name: str
    domain: str
    codomain: ValueDomain | str
    total: bool = False
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ConstraintAst:
    name: str
    kind: Kind
    left: tuple[str, ...]
    right: tuple[str, ...]
    span: Span | None = field(default=None, compare=False)

    @property
    def operator(self) -> str:
        return "|-" if self.kind is Kind.EXISTENCE else "!|-"


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


class _Syntax(Exception):
    def __init__(self, col: int, msg: str):
        self.col = col
        self.msg = msg


def _tokenize(line: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise _Syntax(pos + 1, f"unexpected character {line[pos]!r}")
        kind = m.lastgroup
        text = m.group()
        if kind == "op":
            text = _OP_ALIASES.get(text, text)
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, text, pos + 1))
        pos = m.end()
    toks.append(_Tok("eol", "", len(line) + 1))
    return toks


class _LineParser:
    def __init__(self, line: str, lineno: int):
        self.line = line
        self.lineno = lineno
        self.toks = _tokenize(line)
        self.pos = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def _describe(self, tok: _Tok) -> str:
        return "end of line" if tok.kind == "eol" else repr(tok.text)

    def error(self, expected: str):
        raise _Syntax(self.tok.col, f"expected {expected}, found {self._describe(self.tok)}")

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "ident") and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.error(repr(text))

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            self.error(what)
        text = self.tok.text
        self.pos += 1
        return text

    def end(self) -> None:
        if self.tok.kind != "eol":
            self.error("end of line")

    def span(self) -> Span:
        return Span(self.lineno, self.toks[0].col, len(self.line.rstrip()) + 1)

    # -- grammar ----------------------------------------------------------

    def declaration(self):
        if self.tok.kind != "ident":
            self.error("'set', 'subset', 'fn' or 'constraint'")
        word = self.tok.text
        if word == "set":
            self.pos += 1
            name = self.ident("set name")
            self.end()
            return SetDecl(name, self.span())
        if word == "subset":
            self.pos += 1
            sub = self.ident("set name")
            self.expect("<=")
            sup = self.ident("set name")
            self.end()
            return SubsetDecl(sub, sup, self.span())
        if word == "fn":
            return self.function()
        if word == "constraint":
            return self.constraint()
        self.error("'set', 'subset', 'fn' or 'constraint'")

    def function(self) -> FnDecl:
        self.expect("fn")
        name = self.ident("function name")
        self.expect(":")
        domain = self.ident("domain set name")
        self.expect("->")
        target_col = self.tok.col
        target = self.ident("value kind or set name")
        if target in KIND_NAMES:
            width = None
            bounds = None
            if self.accept("("):
                if self.tok.kind != "number" or not self.tok.text.isdigit():
                    self.error("width (positive integer)")
                width = int(self.tok.text)
                self.pos += 1
                self.expect(")")
            if self.accept("["):
                lo = self.bound()
                self.expect(",")
                hi = self.bound()
                self.expect("]")
                bounds = (lo, hi)
            try:
                codomain: ValueDomain | str = ValueDomain(target, range=bounds, width=width)
            except DomainValueError as e:
                raise _Syntax(target_col, f"malformed range or width: {e}") from None
        else:
            codomain = target
        total = self.accept("total")
        self.end()
        return FnDecl(name, domain, codomain, total, self.span())

    def bound(self):
        tok = self.tok
        if tok.kind == "ident" and tok.text == "TODAY":
            self.pos += 1
            return TODAY
        if tok.kind == "ident" and tok.text in ("true", "false"):
            self.pos += 1
            return tok.text == "true"
        if tok.kind in ("number", "date"):
            self.pos += 1
            return tok.text
        if tok.kind == "string":
            self.pos += 1
            return json.loads(tok.text)
        self.error("range bound")

    def product(self) -> tuple[str, ...]:
        names = [self.ident("function name")]
        while self.accept("*"):
            names.append(self.ident("function name"))
        return tuple(names)

    def constraint(self) -> ConstraintAst:
        self.expect("constraint")
        name = self.ident("constraint name")
        self.expect(":")
        if self.accept("!|-"):
            col = self.tok.col
            right = self.product()
            if len(right) < 2:
                raise _Syntax(col, "a consolidated constraint needs at least two functions")
            self.end()
            return ConstraintAst(name, Kind.CONSOLIDATED, (), right, self.span())
        left = self.product()
        if self.accept("|-"):
            kind = Kind.EXISTENCE
        elif self.accept("!|-"):
            kind = Kind.NON_EXISTENCE
        else:
            self.error("'*', '|-' or '!|-'")
        right = self.product()
        self.end()
        return ConstraintAst(name, kind, left, right, self.span())


def _parse_lines(text: str, only_constraints: bool = False) -> list:
    decls = []
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        try:
            p = _LineParser(line, lineno)
            if p.tok.kind == "eol":
                continue
            decls.append(p.constraint() if only_constraints else p.declaration())
        except _Syntax as e:
            errors.append((lineno, e.col, e.msg))
    if errors:
        raise ParseError(errors)
    return decls


def parse_schema(text: str) -> list:
    """Parse a schema file; constraint lines are allowed too.

    All syntax errors are collected and raised together as a
    :class:`ParseError`.
    """
    return _parse_lines(text)


def parse_constraints(text: str) -> list[ConstraintAst]:
    return _parse_lines(text, only_constraints=True)


def parse_constraint(text: str) -> ConstraintAst:
    decls = parse_constraints(text)
    if len(decls) != 1:
        raise ParseError([(1, 1, f"expected exactly one constraint, found {len(decls)}")])
    return decls[0]


# -- rendering --------------------------------------------------------------

def _render_bound(domain: ValueDomain, value) -> str:
    if value is TODAY:
        return "TODAY"
    if domain.kind == "text":
        return json.dumps(value, ensure_ascii=False)
    return domain.render(value)


def render_codomain(codomain) -> str:
    if isinstance(codomain, str):
        return codomain
    out = codomain.kind
    if codomain.width is not None:
        out += f"({codomain.width})"
    if codomain.range is not None:
        lo, hi = codomain.range
        out += f" [{_render_bound(codomain, lo)},{_render_bound(codomain, hi)}]"
    return out


def render(decl) -> str:
    """Render one declaration or constraint back to its canonical line."""
    if isinstance(decl, SetDecl):
        return f"set {decl.name}"
    if isinstance(decl, SubsetDecl):
        return f"subset {decl.sub} <= {decl.sup}"
    if isinstance(decl, FnDecl):
        out = f"fn {decl.name} : {decl.domain} -> {render_codomain(decl.codomain)}"
        return out + " total" if decl.total else out
    if isinstance(decl, Constraint):
        decl = constraint_ast(decl)
    if isinstance(decl, ConstraintAst):
        right = " * ".join(decl.right)
        if decl.kind is Kind.CONSOLIDATED:
            return f"constraint {decl.name} : !|- {right}"
        return f"constraint {decl.name} : {' * '.join(decl.left)} {decl.operator} {right}"
    raise TypeError(f"cannot render {decl!r}")


def constraint_ast(c: Constraint) -> ConstraintAst:
    return ConstraintAst(c.name, c.kind, tuple(c.left.names), tuple(c.right.names))


def schema_decls(catalog: Catalog) -> list:
    out: list = [SetDecl(name) for name in catalog.sets]
    for sub in catalog.sets:
        out.extend(SubsetDecl(sub, sup) for sup in sorted(catalog.parents[sub]))
    out.extend(FnDecl(f.name, f.domain, f.codomain, f.total) for f in catalog.functions.values())
    return out


def render_schema(catalog: Catalog) -> str:
    return "".join(render(d) + "\n" for d in schema_decls(catalog))
