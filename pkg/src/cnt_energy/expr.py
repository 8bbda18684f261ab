"""Tiny arithmetic expressions in theta, used for perturbation directions.

Grammar (``^`` and ``**`` both mean power, right associative)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names: ``theta`` (also ``t``), the constants ``pi`` and ``r0``, and the
functions ``sin cos tan exp log sqrt``.  Parsed expressions are vectorised
callables and can be differentiated exactly with :meth:`Expr.derivative`.
"""

from __future__ import annotations

import re

import numpy as np

__all__ = ["Expr", "ExprError", "parse_expression"]


class ExprError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*|θ)|(\*\*|[-+*/^()]))")

_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
}


class Expr:
    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.broadcast_to(np.asarray(self.eval(theta), dtype=float), theta.shape).copy()

    def eval(self, theta):
        raise NotImplementedError

    def derivative(self):
        raise NotImplementedError


class Num(Expr):
    def __init__(self, value):
        self.value = float(value)

    def eval(self, theta):
        return self.value

    def derivative(self):
        return Num(0.0)

    def __repr__(self):
        return repr(self.value)


class Theta(Expr):
    def eval(self, theta):
        return theta

    def derivative(self):
        return Num(1.0)

    def __repr__(self):
        return "theta"


class BinOp(Expr):
    def __init__(self, op, a, b):
        self.op, self.a, self.b = op, a, b

    def eval(self, theta):
        a, b = self.a.eval(theta), self.b.eval(theta)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return np.power(a, b)

    def derivative(self):
        a, b = self.a, self.b
        da, db = a.derivative(), b.derivative()
        if self.op in "+-":
            return _simplify(BinOp(self.op, da, db))
        if self.op == "*":
            return _simplify(BinOp("+", BinOp("*", da, b), BinOp("*", a, db)))
        if self.op == "/":
            return _simplify(BinOp("/", BinOp("-", BinOp("*", da, b), BinOp("*", a, db)),
                                   BinOp("*", b, b)))
        if isinstance(b, Num):
            return _simplify(BinOp("*", BinOp("*", Num(b.value), BinOp("^", a, Num(b.value - 1))), da))
        # general power: (a^b)' = a^b (b' log a + b a' / a)
        return _simplify(BinOp("*", self, BinOp("+", BinOp("*", db, Call("log", a)),
                                                BinOp("/", BinOp("*", b, da), a))))

    def __repr__(self):
        return f"({self.a!r} {self.op} {self.b!r})"


class Neg(Expr):
    def __init__(self, a):
        self.a = a

    def eval(self, theta):
        return -self.a.eval(theta)

    def derivative(self):
        return _simplify(Neg(self.a.derivative()))

    def __repr__(self):
        return f"-{self.a!r}"


class Call(Expr):
    def __init__(self, name, arg):
        self.name, self.arg = name, arg

    def eval(self, theta):
        return _FUNCS[self.name](self.arg.eval(theta))

    def derivative(self):
        a, da = self.arg, self.arg.derivative()
        outer = {
            "sin": lambda: Call("cos", a),
            "cos": lambda: Neg(Call("sin", a)),
            "tan": lambda: BinOp("/", Num(1.0), BinOp("^", Call("cos", a), Num(2.0))),
            "exp": lambda: Call("exp", a),
            "log": lambda: BinOp("/", Num(1.0), a),
            "sqrt": lambda: BinOp("/", Num(0.5), Call("sqrt", a)),
        }[self.name]()
        return _simplify(BinOp("*", outer, da))

    def __repr__(self):
        return f"{self.name}({self.arg!r})"


def _is(e, value):
    return isinstance(e, Num) and e.value == value


def _simplify(e):
    """Fold the zero/one identities that differentiation keeps producing."""
    if isinstance(e, Neg):
        if isinstance(e.a, Num):
            return Num(-e.a.value)
        return e
    if not isinstance(e, BinOp):
        return e
    a, b = e.a, e.b
    if isinstance(a, Num) and isinstance(b, Num) and e.op != "^":
        return Num(BinOp(e.op, a, b).eval(0.0))
    if e.op == "+":
        if _is(a, 0.0):
            return b
        if _is(b, 0.0):
            return a
    elif e.op == "-":
        if _is(b, 0.0):
            return a
        if _is(a, 0.0):
            return Neg(b)
    elif e.op == "*":
        if _is(a, 0.0) or _is(b, 0.0):
            return Num(0.0)
        if _is(a, 1.0):
            return b
        if _is(b, 1.0):
            return a
    elif e.op == "/":
        if _is(a, 0.0):
            return Num(0.0)
        if _is(b, 1.0):
            return a
    elif e.op == "^":
        if _is(b, 1.0):
            return a
        if _is(b, 0.0):
            return Num(1.0)
    return e


class _Parser:
    def __init__(self, text, constants):
        self.text = text
        self.constants = constants
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text):
        tokens, i = [], 0
        text = text.rstrip()
        while i < len(text):
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                raise ExprError(f"unexpected character {text[i:].lstrip()[:1]!r} in {text!r}")
            num, name, op = m.groups()
            if num is not None:
                tokens.append(("num", num))
            elif name is not None:
                tokens.append(("name", name))
            else:
                tokens.append(("op", op))
            i = m.end()
        return tokens

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise ExprError(f"expected {want!r} in {self.text!r}, got {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ExprError("empty expression")
        e = self.expr()
        if self.pos != len(self.tokens):
            raise ExprError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() in (("op", "^"), ("op", "**")):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Num(val)
        if kind == "name":
            self.take()
            if val in _FUNCS:
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return Call(val, arg)
            if val in ("theta", "t", "θ"):
                return Theta()
            if val == "pi":
                return Num(np.pi)
            if val in self.constants:
                return Num(self.constants[val])
            raise ExprError(f"unknown name {val!r} in {self.text!r}")
        if (kind, val) == ("op", "("):
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        raise ExprError(f"unexpected {val!r} in {self.text!r}")


def parse_expression(text, r0=None, **constants):
    """Parse ``text`` into an :class:`Expr`; ``r0`` becomes a named constant."""
    if r0 is not None:
        constants["r0"] = float(r0)
    return _Parser(str(text), constants).parse()
