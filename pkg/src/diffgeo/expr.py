"""Small recursive-descent parser for closed-form expressions with symbolic
differentiation.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?

so ``-x^2`` is ``-(x^2)`` and ``2^-1`` is one half.
    atom   := NUMBER | NAME | NAME "(" expr ("," expr)? ")" | "(" expr ")"

Supported functions: sin, cos, exp, ln, pow. Constants: pi, e.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import InputError

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^(),]))")
_UNARY = ("sin", "cos", "exp", "ln")
_CONSTANTS = {"pi": math.pi, "e": math.e}


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"unexpected character {text[pos]!r} in expression {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", float(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = set(variables)
        self.text = text

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            raise InputError(f"expected {value or kind} in {self.text!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        self.take("end")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return ("num", val)
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "name":
            self.take()
            if self.peek() == ("op", "("):
                self.take()
                arg = self.expr()
                if val == "pow":
                    self.take("op", ",")
                    expo = self.expr()
                    self.take("op", ")")
                    return ("pow", arg, expo)
                self.take("op", ")")
                if val == "log":
                    val = "ln"
                if val not in _UNARY:
                    raise InputError(f"unknown function {val!r}")
                return (val, arg)
            if val in self.variables:
                return ("var", val)
            if val in _CONSTANTS:
                return ("num", _CONSTANTS[val])
            raise InputError(f"unknown name {val!r} in {self.text!r}")
        raise InputError(f"unexpected token {val!r} in {self.text!r}")


def _is_num(node, value=None):
    return node[0] == "num" and (value is None or node[1] == value)


def _simplify(node):
    op = node[0]
    if op == "add":
        a, b = node[1], node[2]
        if _is_num(a, 0.0):
            return b
        if _is_num(b, 0.0):
            return a
        if _is_num(a) and _is_num(b):
            return ("num", a[1] + b[1])
    elif op == "sub":
        a, b = node[1], node[2]
        if _is_num(b, 0.0):
            return a
        if _is_num(a, 0.0):
            return _simplify(("neg", b))
        if _is_num(a) and _is_num(b):
            return ("num", a[1] - b[1])
    elif op == "mul":
        a, b = node[1], node[2]
        if _is_num(a, 0.0) or _is_num(b, 0.0):
            return ("num", 0.0)
        if _is_num(a, 1.0):
            return b
        if _is_num(b, 1.0):
            return a
        if _is_num(a) and _is_num(b):
            return ("num", a[1] * b[1])
    elif op == "div":
        a, b = node[1], node[2]
        if _is_num(a, 0.0):
            return ("num", 0.0)
        if _is_num(b, 1.0):
            return a
    elif op == "neg":
        a = node[1]
        if _is_num(a):
            return ("num", -a[1])
        if a[0] == "neg":
            return a[1]
    return node


def _diff(node, var):
    op = node[0]
    S = _simplify
    if op == "num":
        return ("num", 0.0)
    if op == "var":
        return ("num", 1.0 if node[1] == var else 0.0)
    if op in ("add", "sub"):
        return S((op, _diff(node[1], var), _diff(node[2], var)))
    if op == "neg":
        return S(("neg", _diff(node[1], var)))
    if op == "mul":
        a, b = node[1], node[2]
        return S(("add", S(("mul", _diff(a, var), b)), S(("mul", a, _diff(b, var)))))
    if op == "div":
        a, b = node[1], node[2]
        num = S(("sub", S(("mul", _diff(a, var), b)), S(("mul", a, _diff(b, var)))))
        return S(("div", num, ("pow", b, ("num", 2.0))))
    da = _diff(node[1], var)
    if op == "sin":
        return S(("mul", ("cos", node[1]), da))
    if op == "cos":
        return S(("neg", S(("mul", ("sin", node[1]), da))))
    if op == "exp":
        return S(("mul", node, da))
    if op == "ln":
        return S(("div", da, node[1]))
    if op == "pow":
        a, b = node[1], node[2]
        db = _diff(b, var)
        if _is_num(db, 0.0):
            return S(("mul", S(("mul", b, ("pow", a, S(("sub", b, ("num", 1.0)))))), da))
        # d(a^b) = a^b * (b' ln a + b a'/a)
        inner = S(("add", S(("mul", db, ("ln", a))), S(("div", S(("mul", b, da)), a))))
        return S(("mul", node, inner))
    raise InputError(f"cannot differentiate node {op!r}")


def _eval(node, env):
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return env[node[1]]
    if op == "add":
        return _eval(node[1], env) + _eval(node[2], env)
    if op == "sub":
        return _eval(node[1], env) - _eval(node[2], env)
    if op == "mul":
        return _eval(node[1], env) * _eval(node[2], env)
    if op == "div":
        return _eval(node[1], env) / _eval(node[2], env)
    if op == "neg":
        return -_eval(node[1], env)
    if op == "pow":
        base, expo = _eval(node[1], env), _eval(node[2], env)
        if _is_num(node[2]) and float(node[2][1]).is_integer():
            return base ** int(node[2][1])
        return np.power(base, expo)
    if op == "sin":
        return np.sin(_eval(node[1], env))
    if op == "cos":
        return np.cos(_eval(node[1], env))
    if op == "exp":
        return np.exp(_eval(node[1], env))
    if op == "ln":
        return np.log(_eval(node[1], env))
    raise InputError(f"bad node {op!r}")


class Expr:
    """A parsed expression in a fixed set of variables."""

    def __init__(self, node, variables):
        self.node = node
        self.variables = tuple(variables)

    @classmethod
    def parse(cls, text: str, variables=("x", "y")) -> "Expr":
        if not isinstance(text, str) or not text.strip():
            raise InputError("expression must be a non-empty string")
        return cls(_Parser(text, variables).parse(), variables)

    def diff(self, var: str) -> "Expr":
        if var not in self.variables:
            raise InputError(f"{var!r} is not a variable of this expression")
        return Expr(_diff(self.node, var), self.variables)

    def __call__(self, *args):
        env = dict(zip(self.variables, args))
        val = _eval(self.node, env)
        if np.ndim(val) == 0 and any(np.ndim(a) for a in args):
            val = np.full(np.broadcast(*args).shape, float(val))
        return val
