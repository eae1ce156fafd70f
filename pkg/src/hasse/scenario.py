"""Scenario files (.hsw): parser and pretty-printer.

A scenario is a sequence of blocks::

    module M { generators = 2, relations = [[x^2*(x - 1), 0]] }
    check thm55 { modderiv = D, filter = F }

The head is a kind followed by a name (for declarations) or a check type
(for ``check``). Entries are ``key = value`` pairs separated by commas or
newlines; ``#`` starts a comment. Values are polynomials in ``x`` with
rational coefficients, bare names, or bracketed lists of values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import HasseError
from .poly import Poly, X

DECLARATIONS = ("algebra", "derivation", "modderiv", "natrans", "emmodule", "module", "filter")
KINDS = DECLARATIONS + ("seed", "check")
CHECKS = (
    "leibniz",
    "convert",
    "roundtrip",
    "bridge",
    "monad-laws",
    "higher-deriv",
    "module-deriv",
    "module-leibniz",
    "torsion",
    "invariant",
    "thm48",
    "quotient",
    "extend",
    "uniqueness",
    "thm55",
)
# keys whose bare-name values must name an earlier declaration
REFERENCE_KEYS = frozenset({"algebra", "derivation", "base", "module", "ring", "filter", "modderiv", "family"})


class ScenarioError(HasseError):
    def __init__(self, code: str, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {code}: {message}")
        self.code = code
        self.line = line
        self.col = col
        self.bare = message


def syntax_error(msg, line, col):
    return ScenarioError("E001", msg, line, col)


@dataclass(frozen=True)
class Name:
    ident: str

    def __str__(self) -> str:
        return self.ident


Value = Union[Poly, Name, tuple]


@dataclass(frozen=True)
class Statement:
    kind: str
    name: Optional[str]
    entries: tuple[tuple[str, Value], ...]
    line: int = field(default=0, compare=False)

    def get(self, key: str, default=None):
        for k, v in self.entries:
            if k == key:
                return v
        return default

    def keys(self) -> list[str]:
        return [k for k, _ in self.entries]


@dataclass(frozen=True)
class Scenario:
    statements: tuple[Statement, ...] = ()

    def declarations(self) -> list[Statement]:
        return [s for s in self.statements if s.kind in DECLARATIONS]

    def checks(self) -> list[Statement]:
        return [s for s in self.statements if s.kind == "check"]


# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<number>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\]{},=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise syntax_error(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            toks.append(Token("nl", "\n", line, col))
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


# -- parser -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def skip_nl(self):
        while self.tok.kind == "nl":
            self.i += 1

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.text != text or t.kind not in ("op",):
            raise syntax_error(f"expected {text!r}, found {_describe(t)}", t.line, t.col)
        return self.advance()

    def scenario(self) -> Scenario:
        stmts = []
        self.skip_nl()
        while self.tok.kind != "eof":
            stmts.append(self.statement())
            self.skip_nl()
        return Scenario(tuple(stmts))

    def head_word(self) -> Token:
        # head words may contain hyphens (check types such as monad-laws)
        t = self.tok
        if t.kind != "ident":
            raise syntax_error(f"expected a name, found {_describe(t)}", t.line, t.col)
        self.advance()
        text = t.text
        while self.tok.text == "-" and self.toks[self.i + 1].kind == "ident" and self._adjacent():
            self.advance()
            text += "-" + self.advance().text
        return Token("ident", text, t.line, t.col)

    def _adjacent(self) -> bool:
        a, b, c = self.toks[self.i - 1], self.toks[self.i], self.toks[self.i + 1]
        return a.line == b.line == c.line and b.col == a.col + len(a.text) and c.col == b.col + 1

    def statement(self) -> Statement:
        kind = self.head_word()
        if kind.text not in KINDS:
            raise syntax_error(f"unknown statement kind {kind.text!r}", kind.line, kind.col)
        name = None
        if self.tok.kind == "ident":
            nt = self.head_word()
            name = nt.text
            if kind.text == "check" and name not in CHECKS:
                raise ScenarioError("E004", f"unknown check type {name!r}", nt.line, nt.col)
        elif kind.text in DECLARATIONS or kind.text == "check":
            t = self.tok
            raise syntax_error(f"{kind.text} needs a {'type' if kind.text == 'check' else 'name'}", t.line, t.col)
        self.expect("{")
        entries = []
        keys_seen = set()
        self.skip_sep()
        while not (self.tok.kind == "op" and self.tok.text == "}"):
            kt = self.tok
            key = self.key()
            if key in keys_seen:
                raise ScenarioError("E002", f"duplicate key {key!r}", kt.line, kt.col)
            keys_seen.add(key)
            self.expect("=")
            vt = self.tok
            val = self.value()
            entries.append((key, val, vt))
            if not self.skip_sep() and not (self.tok.kind == "op" and self.tok.text == "}"):
                t = self.tok
                raise syntax_error(f"expected ',' or newline, found {_describe(t)}", t.line, t.col)
        self.expect("}")
        stmt = Statement(kind.text, name, tuple((k, v) for k, v, _ in entries), kind.line)
        stmt_positions = {k: t for k, _, t in entries}
        self.positions.append((stmt, stmt_positions))
        return stmt

    positions: list

    def skip_sep(self) -> bool:
        seen = False
        while self.tok.kind == "nl" or (self.tok.kind == "op" and self.tok.text == ","):
            self.i += 1
            seen = True
        return seen

    def key(self) -> str:
        t = self.tok
        if t.kind != "ident":
            raise syntax_error(f"expected a key, found {_describe(t)}", t.line, t.col)
        self.advance()
        key = t.text
        if self.tok.text == "(":
            self.advance()
            arg = self.tok
            if arg.kind != "ident":
                raise syntax_error(f"expected an argument name, found {_describe(arg)}", arg.line, arg.col)
            self.advance()
            self.expect(")")
            key = f"{key}({arg.text})"
        return key

    def value(self) -> Value:
        t = self.tok
        if t.kind == "op" and t.text == "[":
            self.advance()
            items = []
            self.skip_nl()
            if self.tok.text == "]":
                self.advance()
                return ()
            while True:
                self.skip_nl()
                items.append(self.value())
                self.skip_nl()
                if self.tok.text == ",":
                    self.advance()
                    self.skip_nl()
                    if self.tok.text == "]":
                        self.advance()
                        return tuple(items)
                    continue
                self.expect("]")
                return tuple(items)
        if t.kind == "ident" and t.text != "x":
            self.advance()
            return Name(t.text)
        return self.expr()

    # polynomial expressions
    def expr(self) -> Poly:
        out = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Poly:
        out = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ScenarioError("E004", "division only by nonzero constants", op.line, op.col)
                out = out / rhs.lc
        return out

    def unary(self) -> Poly:
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            v = self.unary()
            return -v if op == "-" else v
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            caret = self.advance()
            t = self.tok
            if t.kind != "number":
                raise syntax_error(f"'^' needs a non-negative integer exponent, found {_describe(t)}", caret.line, caret.col)
            self.advance()
            return base ** int(t.text)
        return base

    def atom(self) -> Poly:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Poly.const(Fraction(int(t.text)))
        if t.kind == "ident" and t.text == "x":
            self.advance()
            return X
        if t.kind == "op" and t.text == "(":
            self.advance()
            v = self.expr()
            self.expect(")")
            return v
        raise syntax_error(f"expected a polynomial, found {_describe(t)}", t.line, t.col)


def _describe(t: Token) -> str:
    if t.kind == "eof":
        return "end of input"
    if t.kind == "nl":
        return "end of line"
    return repr(t.text)


def _names_in(v: Value):
    if isinstance(v, Name):
        yield v
    elif isinstance(v, tuple):
        for item in v:
            yield from _names_in(item)


def parse_scenario(text: str) -> Scenario:
    """Parse and resolve references; raises ScenarioError with a position."""
    p = _Parser(text)
    p.positions = []
    scenario = p.scenario()
    declared: set[str] = set()
    for stmt, pos in p.positions:
        for key, val in stmt.entries:
            if key in REFERENCE_KEYS:
                for nm in _names_in(val):
                    if nm.ident not in declared:
                        t = pos[key]
                        raise ScenarioError("E003", f"unresolved reference {nm.ident!r}", t.line, t.col)
        if stmt.kind in DECLARATIONS:
            if stmt.name in declared:
                raise ScenarioError("E002", f"duplicate name {stmt.name!r}", stmt.line, 1)
            declared.add(stmt.name)
    return scenario


# -- pretty-printer ---------------------------------------------------------


def format_value(v: Value) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(format_value(i) for i in v) + "]"
    return str(v)


def format_scenario(s: Scenario) -> str:
    out = []
    for st in s.statements:
        head = st.kind if st.name is None else f"{st.kind} {st.name}"
        if not st.entries:
            out.append(head + " { }")
            continue
        out.append(head + " {")
        out.extend(f"    {k} = {format_value(v)}" for k, v in st.entries)
        out.append("}")
    return "\n".join(out) + ("\n" if out else "")
