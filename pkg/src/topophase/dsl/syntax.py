"""Lexer, parser and canonical formatter for ``.topo`` setup scripts.

Grammar::

    script    := stmt*
    stmt      := prepare | path | sweep | emit
    prepare   := "prepare" NAME ( "(" arg ("," arg)* ")" )?
    arg       := NAME "=" expr
    path      := "path" "{" qubit_line ( ","? qubit_line )* "}"
    qubit_line:= ("s" | "o" | "i") ":" segment ( "," segment )*
    segment   := "ramp" "(" expr "," expr "," "to" "=" expr ")"
    sweep     := "sweep" "t" "=" "[" expr ("," expr)* "]"
                 "theta" "=" "range" "(" expr "," expr "," INT ")"
    emit      := "emit" ("fringes" | "invariants" | "phase") STRING?
    expr      := term (("+" | "-") term)*
    term      := unary ("/" unary)*
    unary     := "-"* atom
    atom      := NUMBER | "pi" | NUMBER "pi"        (e.g. 2pi, 0.5pi)

``#`` starts a comment that runs to the end of the line. Newlines are
whitespace; statements are delimited by their leading keyword.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

MAX_SCRIPT_BYTES = 64 * 1024

QUBITS = ("s", "o", "i")
EMIT_KINDS = ("fringes", "invariants", "phase")
STATEMENT_KEYWORDS = ("prepare", "path", "sweep", "emit")


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class DslError(Exception):
    """Any problem with a setup script; always carries a 1-based location."""

    kind = "error"

    def __init__(self, message: str, line: int, column: int, source: str = "<script>"):
        self.message, self.line, self.column, self.source = message, line, column, source
        super().__init__(f"{source}:{line}:{column}: {self.kind}: {message}")


class LexError(DslError):
    kind = "lexical error"

    def __init__(self, message, line, column, token="", source="<script>"):
        self.token = token
        super().__init__(message, line, column, source)


class ParseError(DslError):
    kind = "syntax error"

    def __init__(self, token: "Token", expected, source="<script>"):
        self.token = token.text
        self.expected = tuple(sorted(expected))
        shown = "end of input" if token.kind == "EOF" else repr(token.text)
        message = f"unexpected {shown}; expected one of: {', '.join(self.expected)}"
        super().__init__(message, token.line, token.column, source)


class SemanticError(DslError):
    kind = "semantic error"


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER PI STRING PUNCT EOF
    text: str
    line: int
    column: int


_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<pi>{_NUMBER}pi(?![A-Za-z0-9_]))
  | (?P<number>{_NUMBER})
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<punct>[{{}}()\[\],:=+\-/])
    """,
    re.VERBOSE | re.ASCII,
)


def tokenize(text: str, source: str = "<script>") -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if ch == '"':
                raise LexError("unterminated string", line, col, ch, source)
            raise LexError(f"unexpected character {ch!r}", line, col, ch, source)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind.upper(), chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Loc:
    line: int
    column: int


def _loc():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: float
    loc: Loc = _loc()


@dataclass(frozen=True)
class PiLit:
    coef: float | None  # None for a bare ``pi``
    loc: Loc = _loc()


@dataclass(frozen=True)
class Neg:
    operand: object
    loc: Loc = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    loc: Loc = _loc()


@dataclass(frozen=True)
class Arg:
    name: str
    value: object
    loc: Loc = _loc()


@dataclass(frozen=True)
class Prepare:
    name: str
    args: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class Segment:
    start: object
    end: object
    to: object
    loc: Loc = _loc()


@dataclass(frozen=True)
class QubitLine:
    qubit: str
    segments: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class PathStmt:
    lines: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class Range:
    start: object
    stop: object
    count: int
    loc: Loc = _loc()


@dataclass(frozen=True)
class Sweep:
    t_values: tuple
    theta: Range
    loc: Loc = _loc()


@dataclass(frozen=True)
class Emit:
    kind: str
    target: str | None
    loc: Loc = _loc()


@dataclass(frozen=True)
class Script:
    statements: tuple
    source: str = field(default="<script>", compare=False, repr=False)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token], source: str):
        self.tokens, self.pos, self.source = tokens, 0, source

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def fail(self, expected):
        raise ParseError(self.tok, expected, self.source)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("PUNCT", "IDENT") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail({text})
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def loc(self) -> Loc:
        return Loc(self.tok.line, self.tok.column)

    def name(self) -> Token:
        if self.tok.kind != "IDENT":
            self.fail({"name"})
        return self.advance()

    # statements
    def script(self) -> Script:
        stmts = []
        while self.tok.kind != "EOF":
            if self.tok.kind == "IDENT" and self.tok.text in STATEMENT_KEYWORDS:
                stmts.append(getattr(self, "stmt_" + self.tok.text)())
            else:
                self.fail(set(STATEMENT_KEYWORDS) | {"end of input"})
        return Script(tuple(stmts), self.source)

    def stmt_prepare(self) -> Prepare:
        loc = self.loc()
        self.advance()
        name = self.name().text
        args = []
        if self.at("("):
            self.advance()
            while True:
                aloc = self.loc()
                key = self.name().text
                self.expect("=")
                args.append(Arg(key, self.expr(), aloc))
                if self.at(","):
                    self.advance()
                    continue
                if self.at(")"):
                    self.advance()
                    break
                self.fail({",", ")"})
        return Prepare(name, tuple(args), loc)

    def _at_qubit_line(self) -> bool:
        return (self.tok.kind == "IDENT" and self.tok.text in QUBITS
                and self.peek().kind == "PUNCT" and self.peek().text == ":")

    def stmt_path(self) -> PathStmt:
        loc = self.loc()
        self.advance()
        self.expect("{")
        lines = [self.qubit_line()]
        while not self.at("}"):
            if self.at(","):
                self.advance()
                if self._at_qubit_line():
                    lines.append(self.qubit_line())
                    continue
                self.fail(set(QUBITS))
            if self._at_qubit_line():
                lines.append(self.qubit_line())
                continue
            self.fail({",", "}"} | set(QUBITS))
        self.advance()
        return PathStmt(tuple(lines), loc)

    def qubit_line(self) -> QubitLine:
        loc = self.loc()
        if not (self.tok.kind == "IDENT" and self.tok.text in QUBITS):
            self.fail(set(QUBITS))
        qubit = self.advance().text
        self.expect(":")
        segments = [self.segment()]
        while self.at(",") and not (self.peek().kind == "IDENT" and self.peek().text in QUBITS
                                    and self.peek(2).text == ":"):
            self.advance()
            segments.append(self.segment())
        return QubitLine(qubit, tuple(segments), loc)

    def segment(self) -> Segment:
        loc = self.loc()
        self.expect("ramp")
        self.expect("(")
        start = self.expr()
        self.expect(",")
        end = self.expr()
        self.expect(",")
        self.expect("to")
        self.expect("=")
        to = self.expr()
        self.expect(")")
        return Segment(start, end, to, loc)

    def stmt_sweep(self) -> Sweep:
        loc = self.loc()
        self.advance()
        self.expect("t")
        self.expect("=")
        self.expect("[")
        values = [self.expr()]
        while self.at(","):
            self.advance()
            values.append(self.expr())
        self.expect("]")
        self.expect("theta")
        self.expect("=")
        rloc = self.loc()
        self.expect("range")
        self.expect("(")
        start = self.expr()
        self.expect(",")
        stop = self.expr()
        self.expect(",")
        tok = self.tok
        if tok.kind != "NUMBER" or not tok.text.isdigit():
            self.fail({"integer"})
        if len(tok.text) > 9:
            raise ParseError(tok, {"integer below 10^9"}, self.source)
        self.advance()
        self.expect(")")
        return Sweep(tuple(values), Range(start, stop, int(tok.text), rloc), loc)

    def stmt_emit(self) -> Emit:
        loc = self.loc()
        self.advance()
        if not (self.tok.kind == "IDENT" and self.tok.text in EMIT_KINDS):
            self.fail(set(EMIT_KINDS))
        kind = self.advance().text
        target = None
        if self.tok.kind == "STRING":
            target = self.advance().text[1:-1]
        return Emit(kind, target, loc)

    # expressions
    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            loc = self.loc()
            op = self.advance().text
            node = BinOp(op, node, self.term(), loc)
        return node

    def term(self):
        node = self.unary()
        while self.at("/"):
            loc = self.loc()
            self.advance()
            node = BinOp("/", node, self.unary(), loc)
        return node

    def unary(self):
        locs = []
        while self.at("-"):
            locs.append(self.loc())
            self.advance()
        node = self.atom()
        for loc in reversed(locs):
            node = Neg(node, loc)
        return node

    def atom(self):
        tok, loc = self.tok, self.loc()
        if tok.kind == "NUMBER":
            self.advance()
            return Num(float(tok.text), loc)
        if tok.kind == "PI":
            self.advance()
            return PiLit(float(tok.text[:-2]), loc)
        if tok.kind == "IDENT" and tok.text == "pi":
            self.advance()
            return PiLit(None, loc)
        self.fail({"number", "pi", "-"})


def parse(script: str | bytes, source: str = "<script>") -> Script:
    """Parse a setup script into its AST.

    Raises
    ------
    LexError, ParseError
        With 1-based line and column of the offending input.
    """
    if isinstance(script, (bytes, bytearray)):
        if len(script) > MAX_SCRIPT_BYTES:
            raise LexError(f"script exceeds {MAX_SCRIPT_BYTES} bytes", 1, 1, "", source)
        try:
            script = bytes(script).decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = bytes(script[:exc.start]).decode("utf-8", errors="replace")
            line = prefix.count("\n") + 1
            col = len(prefix) - (prefix.rfind("\n") + 1) + 1
            raise LexError("invalid UTF-8", line, col, "", source) from None
    elif len(script.encode("utf-8", errors="surrogatepass")) > MAX_SCRIPT_BYTES:
        raise LexError(f"script exceeds {MAX_SCRIPT_BYTES} bytes", 1, 1, "", source)
    return _Parser(tokenize(script, source), source).script()


# ---------------------------------------------------------------------------
# evaluation and canonical formatting
# ---------------------------------------------------------------------------

def evaluate(node) -> float:
    """Numeric value of an expression node."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, PiLit):
        return math.pi * (1.0 if node.coef is None else node.coef)
    if isinstance(node, Neg):
        return -evaluate(node.operand)
    if isinstance(node, BinOp):
        left, right = evaluate(node.left), evaluate(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if right == 0:
            loc = node.loc or Loc(0, 0)
            raise SemanticError("division by zero", loc.line, loc.column)
        return left / right
    raise TypeError(f"not an expression node: {node!r}")


def _fmt_literal(value: float) -> str:
    if not math.isfinite(value):
        return "1e999"
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_expr(node) -> str:
    if isinstance(node, Num):
        return _fmt_literal(node.value)
    if isinstance(node, PiLit):
        return "pi" if node.coef is None else _fmt_literal(node.coef) + "pi"
    if isinstance(node, Neg):
        return "-" + format_expr(node.operand)
    if isinstance(node, BinOp):
        if node.op == "/":
            return f"{format_expr(node.left)}/{format_expr(node.right)}"
        return f"{format_expr(node.left)} {node.op} {format_expr(node.right)}"
    raise TypeError(f"not an expression node: {node!r}")


def format_script(ast: Script) -> str:
    """Canonical text; comments are dropped and statement order is kept."""
    out = []
    for stmt in ast.statements:
        if isinstance(stmt, Prepare):
            line = f"prepare {stmt.name}"
            if stmt.args:
                line += "(" + ", ".join(f"{a.name}={format_expr(a.value)}" for a in stmt.args) + ")"
            out.append(line)
        elif isinstance(stmt, PathStmt):
            body = []
            for ql in stmt.lines:
                segs = ", ".join(
                    f"ramp({format_expr(s.start)}, {format_expr(s.end)}, to={format_expr(s.to)})"
                    for s in ql.segments)
                body.append(f"  {ql.qubit}: {segs}")
            out.append("path {\n" + ",\n".join(body) + "\n}")
        elif isinstance(stmt, Sweep):
            ts = ", ".join(format_expr(v) for v in stmt.t_values)
            r = stmt.theta
            out.append(f"sweep t=[{ts}] theta=range({format_expr(r.start)}, "
                       f"{format_expr(r.stop)}, {r.count})")
        elif isinstance(stmt, Emit):
            out.append(f"emit {stmt.kind}" + (f' "{stmt.target}"' if stmt.target is not None else ""))
        else:
            raise TypeError(f"unknown statement {stmt!r}")
    return "\n".join(out) + "\n"


def parse_number(text: str) -> float:
    """Evaluate a standalone expression such as ``-pi/2`` or ``1/3``."""
    parser = _Parser(tokenize(text, "<arg>"), "<arg>")
    node = parser.expr()
    if parser.tok.kind != "EOF":
        parser.fail({"end of input", "+", "-", "/"})
    return evaluate(node)
