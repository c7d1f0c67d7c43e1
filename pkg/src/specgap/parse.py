"""Recursive-descent parser for polynomial text.

Grammar (whitespace insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' number))*
    factor := atom ['^' integer]
    atom   := number | name | '(' expr ')'

Numbers are integers or decimals, converted exactly to rationals; ``p/q`` is
parsed as a division by a numeric constant.  Names are ``x``, ``x1``..``x9``,
``E`` and the parameter placeholders ``l1``..``l9``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .diffpoly import ParamPoly, Poly1

__all__ = ["PolyParseError", "parse_sparse", "parse_poly1", "parse_param_poly", "parse_polyd"]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


class PolyParseError(ValueError):
    def __init__(self, message: str, text: str, column: int):
        self.text = text
        self.column = column
        super().__init__(f"{message} at column {column}: {text!r}")

    def diagnostic(self) -> str:
        return f"{self.text}\n{' ' * (self.column - 1)}^ {self.args[0]}"


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolyParseError("unexpected character", text, col)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


# sparse polynomial: {tuple of (name, exp) sorted: Fraction}
def _mul(p, q):
    out = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            merged = dict(k1)
            for n, e in k2:
                merged[n] = merged.get(n, 0) + e
            key = tuple(sorted(merged.items()))
            out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def _add(p, q, sign=1):
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0) + sign * c
    return {k: c for k, c in out.items() if c}


class _Parser:
    def __init__(self, text: str, names):
        self.text = text
        self.names = names
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolyParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty polynomial")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        p = self.term()
        if sign < 0:
            p = {k: -c for k, c in p.items()}
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            p = _add(p, self.term(), 1 if op == "+" else -1)
        return p

    def term(self):
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            if op == "*":
                p = _mul(p, self.factor())
            else:
                tok = self.peek()
                q = self.factor()
                if set(q) - {()}:
                    self.fail("division only by a numeric constant", tok)
                d = q.get((), 0)
                if d == 0:
                    self.fail("division by zero", tok)
                p = {k: c / d for k, c in p.items()}
        return p

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "num" or not tok[1].isdigit():
                self.fail("exponent must be a non-negative integer", tok)
            self.take()
            n = int(tok[1])
            out = {(): Fraction(1)}
            for _ in range(n):
                out = _mul(out, base)
            return out
        return base

    def atom(self):
        tok = self.peek()
        kind, val, _ = tok
        if kind == "num":
            self.take()
            return {(): Fraction(val)} if Fraction(val) else {}
        if kind == "name":
            self.take()
            if val not in self.names:
                self.fail(f"unknown variable {val!r}", tok)
            return {((val, 1),): Fraction(1)}
        if kind == "op" and val == "(":
            self.take()
            p = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return p
        self.fail(f"unexpected {val!r}" if val else "unexpected end of input", tok)


def parse_sparse(text: str, names) -> dict:
    """Parse into ``{((name, exp), ...): Fraction}`` over the allowed variable names."""
    return _Parser(text, frozenset(names)).parse()


def parse_poly1(text: str) -> Poly1:
    terms = parse_sparse(text, {"x"})
    deg = max((dict(k).get("x", 0) for k in terms), default=0)
    cs = [Fraction(0)] * (deg + 1)
    for k, c in terms.items():
        cs[dict(k).get("x", 0)] += c
    return Poly1(cs)


def parse_param_poly(text: str, nparams: int | None = None) -> ParamPoly:
    """Parse a polynomial in x, E and placeholders ``l1``..``l9``.

    The arity is the highest placeholder index used unless ``nparams`` is given.
    """
    names = {"x", "E"} | {f"l{j}" for j in range(1, 10)}
    terms = parse_sparse(text, names)
    used = [int(n[1:]) for k in terms for n, _ in k if n.startswith("l")]
    p = max(used, default=0)
    if nparams is None:
        nparams = p
    elif p > nparams:
        raise ValueError(f"placeholder l{p} exceeds declared arity {nparams}")
    out = {}
    for k, c in terms.items():
        d = dict(k)
        key = (d.get("x", 0), d.get("E", 0)) + tuple(d.get(f"l{j}", 0) for j in range(1, nparams + 1))
        out[key] = out.get(key, 0) + c
    return ParamPoly(out, nparams)


def parse_polyd(text: str, d: int):
    """Parse a polynomial in ``x1``..``xd`` into a :class:`~specgap.multidim.PolyD`.

    For d <= 3 the names x, y, z may stand in for x1, x2, x3.
    """
    from .multidim import PolyD

    names = {f"x{j}" for j in range(1, d + 1)}
    alias = {n: f"x{j}" for j, n in enumerate("xyz"[:d], start=1)} if d <= 3 else {}
    terms = parse_sparse(text, names | set(alias))
    out = {}
    for k, c in terms.items():
        dd: dict = {}
        for name, e in k:
            name = alias.get(name, name)
            dd[name] = dd.get(name, 0) + e
        key = tuple(dd.get(f"x{j}", 0) for j in range(1, d + 1))
        out[key] = out.get(key, 0) + c
    return PolyD(out, d)
