"""
Expression Parser — closed-form mini-language for chart and table data
======================================================================
Grammar (whitespace insignificant):

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | '+' unary | power
    power    := base ('^' exponent)?
    exponent := ['+' | '-'] INT | INTNAME | '(' ['+' | '-'] INT ')'
    base     := NUM | NAME | FUNC '(' expr ')' | '(' expr ')'

Unary minus binds looser than '^', so ``-x^2`` is ``-(x^2)``.
Denominators may mention parameters only, never coordinates, and may not
be the literal zero.
"""

import logging
import re
from fractions import Fraction
from typing import List, NamedTuple, Optional

from models.expression import (
    FUNCTIONS, Expression, Num, ParseContext, add, func, mul, neg, power, sym,
)
from utils.validators import ParseError, UndeclaredNameError

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(src: str, field: str = "expr") -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if match is None:
            raise ParseError(field, f"unexpected character {src[pos]!r} at position {pos}")
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, context: ParseContext, field: str):
        self.src = src
        self.context = context
        self.field = field
        self.tokens = tokenize(src, field)
        self.index = 0
        self.integers = dict(context.integers)

    # ── Token helpers ───────────────────────────────────────────────

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.index += 1
            return True
        return False

    def _expect(self, text: str):
        if not self._accept(text):
            self._fail(f"expected {text!r}")

    def _fail(self, message: str, pos: Optional[int] = None):
        pos = self.current.pos if pos is None else pos
        found = self.current.text or "end of input"
        raise ParseError(self.field, f"{message} at position {pos} (found {found!r}) in {self.src!r}")

    # ── Grammar ─────────────────────────────────────────────────────

    def parse(self) -> Expression:
        if self.current.kind == "end":
            self._fail("empty expression")
        result = self.expr()
        if self.current.kind != "end":
            self._fail("unexpected token")
        return result

    def expr(self) -> Expression:
        terms = [self.term()]
        while True:
            if self._accept("+"):
                terms.append(self.term())
            elif self._accept("-"):
                terms.append(neg(self.term()))
            else:
                return add(*terms)

    def term(self) -> Expression:
        factors = [self.unary()]
        while True:
            if self._accept("*"):
                factors.append(self.unary())
            elif self.current.text == "/" and self.current.kind == "op":
                pos = self._advance().pos
                denominator = self.unary()
                self._check_denominator(denominator, pos)
                factors.append(power(denominator, -1))
            else:
                return mul(*factors)

    def unary(self) -> Expression:
        if self._accept("-"):
            return neg(self.unary())
        if self._accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expression:
        pos = self.current.pos
        base = self.base()
        if self._accept("^"):
            exponent = self.exponent()
            if exponent < 0:
                self._check_denominator(base, pos)
            return power(base, exponent)
        return base

    def exponent(self) -> int:
        if self._accept("("):
            value = self.exponent()
            self._expect(")")
            return value
        sign = 1
        if self._accept("-"):
            sign = -1
        elif self._accept("+"):
            pass
        token = self.current
        if token.kind == "num" and "." not in token.text:
            self._advance()
            return sign * int(token.text)
        if token.kind == "name" and token.text in self.integers:
            self._advance()
            return sign * self.integers[token.text]
        self._fail("expected an integer exponent")

    def base(self) -> Expression:
        token = self.current
        if token.kind == "num":
            self._advance()
            return Num(Fraction(token.text))
        if token.kind == "name":
            self._advance()
            if token.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return func(token.text, arg)
            return self._name(token)
        if self._accept("("):
            inner = self.expr()
            self._expect(")")
            return inner
        self._fail("expected a number, name or '('")

    def _name(self, token: Token) -> Expression:
        name = token.text
        if name in self.integers:
            return Num(Fraction(self.integers[name]))
        if name in self.context.coords or name in self.context.params:
            return sym(name)
        raise UndeclaredNameError(
            self.field, f"undeclared name {name!r} at position {token.pos} in {self.src!r}")

    def _check_denominator(self, denominator: Expression, pos: int):
        from services.symexpr_service import free_names, is_literal_zero

        if is_literal_zero(denominator):
            self._fail("zero-literal denominator", pos)
        coords = free_names(denominator) & set(self.context.coords)
        if coords:
            self._fail(f"denominator depends on coordinates {sorted(coords)}", pos)


def parse(src: str, context: ParseContext = ParseContext(), field: str = "expr") -> Expression:
    """Parse ``src`` in ``context``. Raises ParseError / UndeclaredNameError."""
    return _Parser(src, context, field).parse()
