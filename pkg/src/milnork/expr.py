"""Parser and printer for the expression grammar.

Grammar: rational literals (`3`, `-2/5`), variable names
`[a-zA-Z][a-zA-Z0-9_]*`, operators `+ - * ^` where `^` takes a nonnegative
integer literal, and parentheses.  Whitespace is insignificant.
"""

import re
from fractions import Fraction

from .errors import ParseError
from .poly import Polynomial

_TOKEN = re.compile(r"\s*(?:(\d+(?:\s*/\s*\d+)?)|([A-Za-z][A-Za-z0-9_]*)|([()+\-*^]))")


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos:].strip()[0]!r} in {text!r}")
            break
        pos = m.end()
        if m.group(1):
            tokens.append(("num", Fraction(m.group(1).replace(" ", ""))))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
    return tokens


class _Parser:
    def __init__(self, tokens, names, text):
        self.tokens = tokens
        self.pos = 0
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, value = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def expression(self):
        result = self.term()
        while True:
            kind, value = self.peek()
            if kind == "op" and value in "+-":
                self.pos += 1
                rhs = self.term()
                result = result + rhs if value == "+" else result - rhs
            else:
                return result

    def term(self):
        result = self.factor()
        while True:
            kind, value = self.peek()
            if kind == "op" and value == "*":
                self.pos += 1
                result = result * self.factor()
            else:
                return result

    def factor(self):
        kind, value = self.peek()
        if kind == "op" and value == "-":
            self.pos += 1
            return -self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        kind, value = self.peek()
        if kind == "op" and value == "^":
            self.pos += 1
            ekind, evalue = self.take()
            if ekind != "num" or evalue.denominator != 1 or evalue < 0:
                raise ParseError(f"exponent must be a nonnegative integer in {self.text!r}")
            return base ** int(evalue)
        return base

    def atom(self):
        kind, value = self.take()
        if kind == "num":
            return Polynomial.constant(len(self.names), value)
        if kind == "name":
            if value not in self.index:
                raise ParseError(f"unknown variable {value!r} in {self.text!r}")
            return Polynomial.variable(len(self.names), self.index[value])
        if kind == "op" and value == "(":
            inner = self.expression()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected end of expression in {self.text!r}")


def parse_polynomial(text, names):
    """Parse `text` into a Polynomial over the ordered variable list `names`."""
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens, names, text)
    result = parser.expression()
    if parser.pos != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return result


def monomial_str(mono, names):
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def polynomial_str(p, names):
    """Canonical printer; output re-parses to the same polynomial."""
    if not p.terms:
        return "0"
    pieces = []
    for mono, coeff in p.sorted_terms():
        mstr = monomial_str(mono, names)
        mag = abs(coeff)
        if not mstr:
            body = str(mag)
        elif mag == 1:
            body = mstr
        else:
            body = f"{mag}*{mstr}"
        pieces.append((coeff < 0, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for negative, body in pieces[1:]:
        out += (" - " if negative else " + ") + body
    return out
