"""Reader and printer for the ``.gmc`` guarded-command model format.

Grammar::

    model    ::= vardecl* command* target
    vardecl  ::= "var" IDENT ":" ("bool" | "[" INT ".." INT "]") "init" lit ";"
    command  ::= "[" boolexpr "]" branch ("+" branch)* ";"
    branch   ::= PROB ":" "(" [update ("&" update)*] ")"
    update   ::= IDENT "'" "=" expr
    target   ::= "target" boolexpr ";"

PROB is a fraction (``4/5``), a decimal (``0.8``) or an integer; decimals are
converted to exact fractions.  ``//`` starts a line comment.  Expression
operators, loosest first: ``=>`` (right associative), ``|``, ``&``, ``!``,
comparisons, ``+ -``, ``*``, unary ``-``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import ModelError, ParseError
from .expr import (
    And,
    Arith,
    Cmp,
    Const,
    Expr,
    Implies,
    Neg,
    Not,
    Or,
    Var,
)
from .model import (
    Assignment,
    Branch,
    Command,
    ReachabilityQuery,
    SymbolicMdp,
    VarDecl,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.|=>|==|!=|<=|>=|:=|[-+*/<>!&|()\[\]:;'=])
    """,
    re.VERBOSE,
)

KEYWORDS = {"var", "bool", "init", "target", "true", "false"}


@dataclass
class Token:
    kind: str  # "num", "ident", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = pos + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.types: dict[str, str] = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "num" or "." in t.text:
            raise self.error("expected integer")
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    # model structure
    def model(self) -> tuple[SymbolicMdp, ReachabilityQuery]:
        decls = []
        while self.at("var"):
            decls.append(self.vardecl())
        commands = []
        while self.at("["):
            commands.append(self.command())
        if not self.at("target"):
            raise self.error("expected a command or 'target'")
        self.expect("target")
        start = self.tok
        target = self.boolexpr()
        self.expect(";")
        if self.tok.kind != "eof":
            raise self.error("trailing input after target")
        try:
            model = SymbolicMdp(tuple(decls), tuple(commands))
        except ModelError as exc:
            raise self.error(str(exc), start) from None
        return model, ReachabilityQuery(target)

    def vardecl(self) -> VarDecl:
        self.expect("var")
        name_tok = self.ident()
        name = name_tok.text
        if name in self.types:
            raise self.error(f"duplicate variable {name!r}", name_tok)
        self.expect(":")
        if self.accept("bool"):
            self.expect("init")
            if self.accept("true"):
                init = True
            elif self.accept("false"):
                init = False
            else:
                raise self.error("expected 'true' or 'false'")
            decl = VarDecl(name, "bool", 0, 1, init)
        else:
            self.expect("[")
            lo = self.integer()
            self.expect("..")
            hi = self.integer()
            self.expect("]")
            self.expect("init")
            init_tok = self.tok
            init = self.integer()
            try:
                decl = VarDecl(name, "int", lo, hi, init)
            except ModelError as exc:
                raise self.error(str(exc), init_tok) from None
        self.expect(";")
        self.types[name] = decl.kind
        return decl

    def command(self) -> Command:
        start = self.expect("[")
        guard = self.boolexpr()
        self.expect("]")
        branches = [self.branch()]
        while self.accept("+"):
            branches.append(self.branch())
        self.expect(";")
        total = sum((b.probability for b in branches), Fraction(0))
        if total != 1:
            raise self.error(f"probabilities sum to {total}", start)
        return Command(guard, tuple(branches))

    def probability(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            raise self.error("expected probability")
        self.i += 1
        p = Fraction(t.text)  # decimal strings convert exactly
        if self.accept("/"):
            d = self.tok
            if d.kind != "num" or "." in d.text:
                raise self.error("expected integer denominator")
            self.i += 1
            if int(d.text) == 0:
                raise self.error("zero denominator", d)
            p = p / int(d.text)
        if p <= 0:
            raise self.error("probability must be positive", t)
        return p

    def branch(self) -> Branch:
        prob = self.probability()
        self.expect(":")
        self.expect("(")
        updates: list[tuple[str, Expr]] = []
        if not self.at(")"):
            updates.append(self.update(updates))
            while self.accept("&"):
                updates.append(self.update(updates))
        self.expect(")")
        return Branch(prob, Assignment(tuple(updates)))

    def update(self, previous) -> tuple[str, Expr]:
        name_tok = self.ident()
        name = name_tok.text
        if name not in self.types:
            raise self.error(f"assignment to undeclared variable {name!r}", name_tok)
        if any(n == name for n, _ in previous):
            raise self.error(f"variable {name!r} assigned twice", name_tok)
        self.expect("'")
        if not self.accept(":="):
            self.expect("=")
        start = self.tok
        e, ty = self.expr(in_update=True)
        if ty != self.types[name]:
            raise self.error(f"cannot assign {ty} expression to {self.types[name]} variable {name!r}", start)
        return name, e

    # expressions: each level returns (expr, type)
    def boolexpr(self) -> Expr:
        start = self.tok
        e, ty = self.expr()
        if ty != "bool":
            raise self.error("expected boolean expression", start)
        return e

    def expr(self, in_update: bool = False):
        self.in_update = in_update
        return self.implies()

    def _need(self, ty: str, want: str, tok: Token, what: str):
        if ty != want:
            raise self.error(f"{what} expects {want} operands, got {ty}", tok)

    def implies(self):
        start = self.tok
        left, lt = self.disjunction()
        if self.at("=>"):
            op = self.tok
            self.i += 1
            right, rt = self.implies()
            self._need(lt, "bool", start, "'=>'")
            self._need(rt, "bool", op, "'=>'")
            return Implies(left, right), "bool"
        return left, lt

    def disjunction(self):
        start = self.tok
        e, ty = self.conjunction()
        args = [e]
        while self.at("|"):
            op = self.tok
            self.i += 1
            r, rt = self.conjunction()
            self._need(ty, "bool", start, "'|'")
            self._need(rt, "bool", op, "'|'")
            args.append(r)
        return (Or(args), "bool") if len(args) > 1 else (e, ty)

    def _update_separator(self) -> bool:
        # inside an update list, "& IDENT '" starts the next update
        return self.in_update and self.peek(1).kind == "ident" and self.peek(2).text == "'"

    def conjunction(self):
        start = self.tok
        e, ty = self.negation()
        args = [e]
        while self.at("&") and not self._update_separator():
            op = self.tok
            self.i += 1
            r, rt = self.negation()
            self._need(ty, "bool", start, "'&'")
            self._need(rt, "bool", op, "'&'")
            args.append(r)
        return (And(args), "bool") if len(args) > 1 else (e, ty)

    def negation(self):
        if self.at("!"):
            op = self.tok
            self.i += 1
            e, ty = self.negation()
            self._need(ty, "bool", op, "'!'")
            return Not(e), "bool"
        return self.comparison()

    def comparison(self):
        left, lt = self.additive()
        if self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", "<=", ">", ">="):
            op = self.tok
            self.i += 1
            right, rt = self.additive()
            if lt != rt:
                raise self.error(f"comparison of {lt} with {rt}", op)
            if lt == "bool" and op.text not in ("==", "!="):
                raise self.error("ordering comparison over booleans", op)
            return Cmp(op.text, left, right), "bool"
        return left, lt

    def additive(self):
        start = self.tok
        e, ty = self.multiplicative()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok
            self.i += 1
            r, rt = self.multiplicative()
            self._need(ty, "int", start, f"'{op.text}'")
            self._need(rt, "int", op, f"'{op.text}'")
            e = Arith(op.text, e, r)
        return e, ty

    def multiplicative(self):
        start = self.tok
        e, ty = self.unary()
        while self.at("*"):
            op = self.tok
            self.i += 1
            r, rt = self.unary()
            self._need(ty, "int", start, "'*'")
            self._need(rt, "int", op, "'*'")
            e = Arith("*", e, r)
        return e, ty

    def unary(self):
        if self.at("-"):
            op = self.tok
            self.i += 1
            if self.tok.kind == "num":
                t = self.tok
                if "." in t.text:
                    raise self.error("decimal literal in expression", t)
                self.i += 1
                return Const(-int(t.text)), "int"
            e, ty = self.unary()
            self._need(ty, "int", op, "unary '-'")
            return Neg(e), "int"
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "num":
            if "." in t.text:
                raise self.error("decimal literal in expression", t)
            self.i += 1
            return Const(int(t.text)), "int"
        if self.accept("true"):
            return Const(True), "bool"
        if self.accept("false"):
            return Const(False), "bool"
        if self.accept("("):
            saved = self.in_update
            self.in_update = False
            e = self.implies()
            self.in_update = saved
            self.expect(")")
            return e
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if t.text not in self.types:
                raise self.error(f"undeclared variable {t.text!r}", t)
            return Var(t.text), self.types[t.text]
        raise self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def parse_model(text: str) -> tuple[SymbolicMdp, ReachabilityQuery]:
    """Parse ``.gmc`` text into a model (without target command) and its query."""
    return _Parser(text).model()


def load_model(path: str | Path) -> tuple[SymbolicMdp, ReachabilityQuery]:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def _lit(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _updates(a: Assignment) -> str:
    return "(" + " & ".join(f"{v}'={e}" for v, e in a.updates) + ")"


def format_model(model: SymbolicMdp, query: ReachabilityQuery) -> str:
    """Render a model back to ``.gmc`` text; the target command, if any, is omitted."""
    lines = []
    for d in model.variables:
        if d.kind == "bool":
            lines.append(f"var {d.name} : bool init {_lit(d.initial)};")
        else:
            lines.append(f"var {d.name} : [{d.lo}..{d.hi}] init {d.initial};")
    for i, c in enumerate(model.commands):
        if i == model.target_command:
            continue
        branches = " + ".join(f"{b.probability}: {_updates(b.assignment)}" for b in c.branches)
        lines.append(f"[{c.guard}] {branches};")
    lines.append(f"target {query.target};")
    return "\n".join(lines) + "\n"
