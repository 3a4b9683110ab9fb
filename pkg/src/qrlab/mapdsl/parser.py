"""Recursive-descent parser for the piecewise map language.

A map file is a sequence of lines::

    name: noninj-example
    param M = 1
    domain: halfplane(1)
    piece: 0 < re(z) <= 2*M*im(z) -> (4*M^2 + 4*M*i)*z + (4*M^2 + 1)*conj(z)

Expressions and guards are LL(1); the grammar is in ``docs/grammar.ebnf``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from ..errors import DslSyntaxError, GuardTypeError, UndeclaredParameterError
from . import expr as E
from .guards import And, Compare, Not, Or, TRUE, Guard

RESERVED = {"z", "i", "true", "and", "or", "not"} | set(E.FUNCTIONS)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|>=|≤|≥|[-−+*/^()\[\],;<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number, imag, ident, op, end
    text: str
    line: int
    column: int
    value: Optional[float] = None


def tokenize(text: str, line: int = 1, column: int = 1) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError("unexpected character", line, column + pos, text[pos])
        col = column + pos
        if m.group("number") is not None:
            kind = "imag" if m.group("imag") else "number"
            tokens.append(Token(kind, m.group(0), line, col, float(m.group("number"))))
        elif m.group("ident") is not None:
            tokens.append(Token("ident", m.group("ident"), line, col))
        elif m.group("op") is not None:
            op = {"−": "-", "≤": "<=", "≥": ">="}.get(m.group("op"), m.group("op"))
            tokens.append(Token("op", op, line, col))
        pos = m.end()
    tokens.append(Token("end", "", line, column + len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, declared):
        self.tokens = tokens
        self.pos = 0
        self.declared = declared

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message, cls=DslSyntaxError, tok=None):
        tok = tok or self.tok
        raise cls(message, tok.line, tok.column, tok.text or "<end of line>")

    def at(self, text) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def expect_end(self):
        if self.tok.kind != "end":
            self.error("unexpected trailing input")

    # expressions ---------------------------------------------------------
    def expression(self) -> E.Expr:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            node = E.Add(node, rhs) if op == "+" else E.Sub(node, rhs)
        return node

    def term(self) -> E.Expr:
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            rhs = self.unary()
            node = E.Mul(node, rhs) if op == "*" else E.Div(node, rhs)
        return node

    def unary(self) -> E.Expr:
        if self.at("-"):
            self.advance()
            if self.tok.kind in ("number", "imag") and not self._followed_by_power():
                tok = self.advance()
                if tok.kind == "number":
                    return E.Const(complex(-tok.value, 0.0))
                return E.Const(complex(0.0, -tok.value))
            return E.Neg(self.unary())
        return self.power()

    def _followed_by_power(self) -> bool:
        nxt = self.tokens[self.pos + 1]
        return nxt.kind == "op" and nxt.text == "^"

    def power(self) -> E.Expr:
        base = self.atom()
        if not self.at("^"):
            return base
        self.advance()
        negate = False
        if self.at("-"):
            self.advance()
            negate = True
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            if tok.value != int(tok.value) or not re.fullmatch(r"\d+", tok.text):
                self.error("only integer powers are supported", tok=tok)
            n = int(tok.text)
            return E.Pow(base, -n if negate else n)
        if tok.kind == "ident" and tok.text not in RESERVED:
            self.advance()
            if tok.text not in self.declared:
                self.error(f"undeclared parameter {tok.text!r}", UndeclaredParameterError, tok)
            value = self.declared[tok.text]
            if value != int(value):
                self.error(f"exponent parameter {tok.text}={value} is not an integer", tok=tok)
            return E.Pow(base, tok.text, negate)
        self.error("expected an integer exponent")

    def atom(self) -> E.Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return E.Const(complex(tok.value, 0.0))
        if tok.kind == "imag":
            self.advance()
            return E.Const(complex(0.0, tok.value))
        if tok.kind == "ident":
            name = tok.text
            if name == "z":
                self.advance()
                return E.Z
            if name == "i":
                self.advance()
                return E.Const(1j)
            if name in E.FUNCTIONS:
                self.advance()
                self.expect("(")
                arg = self.expression()
                self.expect(")")
                return E.Call(name, arg)
            if name in RESERVED:
                self.error(f"unexpected keyword {name!r}")
            self.advance()
            if name not in self.declared:
                self.error(f"undeclared parameter {name!r}", UndeclaredParameterError, tok)
            return E.Param(name)
        if self.at("("):
            self.advance()
            node = self.expression()
            self.expect(")")
            return node
        self.error("expected an expression")

    # guards --------------------------------------------------------------
    def guard(self) -> Guard:
        node = self.guard_term()
        while self.at("or"):
            self.advance()
            node = Or(node, self.guard_term())
        return node

    def guard_term(self) -> Guard:
        node = self.guard_factor()
        while self.at("and"):
            self.advance()
            node = And(node, self.guard_factor())
        return node

    def guard_factor(self) -> Guard:
        if self.at("not"):
            self.advance()
            return Not(self.guard_factor())
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("["):
            self.advance()
            node = self.guard()
            self.expect("]")
            return node
        start = self.tok
        left = self.expression()
        if not any(self.at(op) for op in ("<", "<=", ">", ">=")):
            self.error("expected a comparison operator")
        node = None
        while any(self.at(op) for op in ("<", "<=", ">", ">=")):
            op = self.advance().text
            right_tok = self.tok
            right = self.expression()
            for side, t in ((left, start), (right, right_tok)):
                if not E.is_real_valued(side):
                    self.error("guard comparisons must be between real-valued expressions",
                               GuardTypeError, t)
            cmp = Compare(op, left, right)
            node = cmp if node is None else And(node, cmp)
            left, start = right, right_tok
        return node


def parse_expression(text: str, params=None, line: int = 1, column: int = 1) -> E.Expr:
    p = _Parser(tokenize(text, line, column), dict(params or {}))
    node = p.expression()
    p.expect_end()
    return node


def parse_guard(text: str, params=None, line: int = 1, column: int = 1) -> Guard:
    p = _Parser(tokenize(text, line, column), dict(params or {}))
    node = p.guard()
    p.expect_end()
    return node


def parse_constant(text: str, line: int = 1, column: int = 1) -> complex:
    node = parse_expression(text, {}, line, column)
    if E.parameters_used(node) or _mentions_z(node):
        raise DslSyntaxError("expected a constant", line, column, text)
    return complex(E.evaluate(node, 0j, {}))


def _mentions_z(node) -> bool:
    if isinstance(node, E.Var):
        return True
    return any(_mentions_z(c) for c in E.children(node))
