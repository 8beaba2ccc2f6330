"""Parser and evaluators for operator-composition expressions.

Grammar (whitespace-insensitive, left-associative, '*' over '+'/'-'):

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := ['-'] (scalar | atom)
    atom   := IDENT | 'I' ['(' IDENT ')'] | 'pinv' '(' expr ')'
            | 'adj' '(' expr ')' | '(' expr ')'
    scalar := decimal or complex literal, e.g. 2, 0.5, 2i, 1+0.5i

Scalar literals only make sense as multiplicative prefactors, so a term
consisting of nothing but scalars is rejected.  'pinv', 'adj' and 'I' are
reserved words.

A bare `I` takes its size from context when the expression is evaluated: it
passes through products, adjoints and pseudo-inverses as a scalar multiple of
"the identity of whatever shape is needed" and materializes the moment it is
added to (or subtracted from) a square matrix.  An expression that never
provides a shape source at all (no identifier and no `I(name)`) is rejected
at parse time, since no evaluation context could ever resolve it.

Two evaluators share the tree.  The matrix evaluator works on any mapping
from names to complex matrices (symbol matrices or dense torus matrices) and
supports pinv.  The position evaluator builds an actual multiplication
operator out of the calculus in the operator module; pseudo-inverses have no
position-space counterpart, so their presence is an error there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .operator import (
    MultiplicationOperator,
    add as op_add,
    adjoint as op_adjoint,
    identity_operator,
    mul as op_mul,
    scale as op_scale,
)
from .symbol import pinv_matrix, symbol_at


class ExprSyntaxError(ValueError):
    def __init__(self, offset: int, expected):
        self.offset = offset
        self.expected = tuple(expected)
        super().__init__(f"syntax error at offset {offset}: expected {', '.join(self.expected)}")


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Identity:
    name: str | None  # None = bare I, resolved by shape context


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class ScalarMul:
    scalar: complex
    child: object


@dataclass(frozen=True)
class Adjoint:
    child: object


@dataclass(frozen=True)
class Pinv:
    child: object


_KEYWORDS = {"I", "pinv", "adj"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.\d*|\.\d+|\d+)i?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[+\-*()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise ExprSyntaxError(bad, [f"valid token (found {text[bad]!r})"])
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        raise ExprSyntaxError(self.peek()[2], expected)

    def expect_op(self, symbol):
        kind, value, _ = self.peek()
        if kind == "op" and value == symbol:
            return self.advance()
        self.fail([f"'{symbol}'"])

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "eof":
            self.fail(["end of expression", "'+'", "'-'", "'*'"])
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if value == "+" else Sub(node, rhs)
            else:
                return node

    def term(self):
        factors = [self.factor(leading=True)]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                factors.append(self.factor(leading=False))
            else:
                break
        prefactor = complex(1)
        chain = None
        for f in factors:
            if isinstance(f, tuple):
                prefactor *= f[1]
            elif chain is None:
                chain = f
            else:
                chain = Mul(chain, f)
        if chain is None:
            offset = factors[0][2]
            raise ExprSyntaxError(offset, ["an operator for the scalar to multiply"])
        if prefactor != 1:
            chain = ScalarMul(prefactor, chain)
        return chain

    def factor(self, leading: bool):
        kind, value, offset = self.peek()
        negate = False
        if kind == "op" and value == "-":
            self.advance()
            negate = True
            kind, value, offset = self.peek()
        if kind == "number":
            c = self.scalar_literal()
            if leading and not (self.peek()[0] == "op" and self.peek()[1] == "*"):
                self.fail(["'*' after a scalar literal"])
            return ("scalar", -c if negate else c, offset)
        node = self.atom()
        return Neg(node) if negate else node

    def scalar_literal(self) -> complex:
        _, text, _ = self.advance()
        if text.endswith("i"):
            return complex(0.0, float(text[:-1]))
        real = float(text)
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            nxt = self.tokens[self.pos + 1]
            if nxt[0] == "number" and nxt[1].endswith("i"):
                self.advance()
                self.advance()
                imag = float(nxt[1][:-1])
                return complex(real, -imag if value == "-" else imag)
        return complex(real)

    def atom(self):
        kind, value, offset = self.peek()
        if kind == "ident":
            self.advance()
            if value == "I":
                if self.peek()[0] == "op" and self.peek()[1] == "(":
                    self.advance()
                    k2, name, _ = self.peek()
                    if k2 != "ident" or name in _KEYWORDS:
                        self.fail(["operator name inside I(...)"])
                    self.advance()
                    self.expect_op(")")
                    return Identity(name)
                return Identity(None)
            if value in ("pinv", "adj"):
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Pinv(inner) if value == "pinv" else Adjoint(inner)
            return Ident(value)
        if kind == "op" and value == "(":
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        self.fail(["identifier", "'I'", "'pinv'", "'adj'", "'('", "number"])


def _has_shape_source(node) -> bool:
    if isinstance(node, Ident):
        return True
    if isinstance(node, Identity):
        return node.name is not None
    if isinstance(node, (Add, Sub, Mul)):
        return _has_shape_source(node.left) or _has_shape_source(node.right)
    if isinstance(node, (Neg, ScalarMul, Adjoint, Pinv)):
        return _has_shape_source(node.child)
    return False


def identifiers(node) -> set[str]:
    if isinstance(node, Ident):
        return {node.name}
    if isinstance(node, Identity):
        return set() if node.name is None else {node.name}
    if isinstance(node, (Add, Sub, Mul)):
        return identifiers(node.left) | identifiers(node.right)
    if isinstance(node, (Neg, ScalarMul, Adjoint, Pinv)):
        return identifiers(node.child)
    return set()


@dataclass(frozen=True)
class Expression:
    """A parsed expression: the AST plus the original text."""

    ast: object
    text: str

    def eval_matrices(self, env) -> np.ndarray:
        """Evaluate with names bound to complex matrices (symbols or dense)."""
        value = _eval_mat(self.ast, env)
        if isinstance(value, _IdentityVal):
            raise ValueError("expression reduces to a bare identity with no shape context")
        return value

    def eval_position(self, env) -> MultiplicationOperator:
        """Evaluate with names bound to operators, staying in position space."""
        value = _eval_pos(self.ast, env)
        if isinstance(value, complex):
            raise ValueError("expression reduces to a bare identity with no shape context")
        return value

    def identifiers(self) -> set[str]:
        return identifiers(self.ast)

    def __str__(self) -> str:
        return self.text


def parse(text: str) -> Expression:
    node = _Parser(text).parse()
    if not _has_shape_source(node):
        raise ValueError(
            "expression contains no operator identifier; a bare I cannot be sized (use I(name))"
        )
    return Expression(ast=node, text=text)


def render(node) -> str:
    """Canonical text for an AST; parsing it back yields an identical tree."""
    if isinstance(node, Expression):
        node = node.ast
    return _render(node, 0)


def _fmt_float(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x)) if x >= 0 else f"-{-int(x)}"
    return repr(x)


def _fmt_scalar(c: complex) -> str:
    if c.imag == 0:
        return _fmt_float(c.real)
    if c.real == 0:
        return f"{_fmt_float(c.imag)}i"
    sign = "+" if c.imag > 0 else "-"
    return f"{_fmt_float(c.real)}{sign}{_fmt_float(abs(c.imag))}i"


def _render(node, prec: int) -> str:
    if isinstance(node, Ident):
        return node.name
    if isinstance(node, Identity):
        return "I" if node.name is None else f"I({node.name})"
    if isinstance(node, Pinv):
        return f"pinv({_render(node.child, 0)})"
    if isinstance(node, Adjoint):
        return f"adj({_render(node.child, 0)})"
    if isinstance(node, (Add, Sub)):
        op = " + " if isinstance(node, Add) else " - "
        text = f"{_render(node.left, 1)}{op}{_render(node.right, 2)}"
        return f"({text})" if prec > 1 else text
    if isinstance(node, Mul):
        text = f"{_render(node.left, 2)}*{_render(node.right, 3)}"
        return f"({text})" if prec > 2 else text
    if isinstance(node, ScalarMul):
        text = f"{_fmt_scalar(node.scalar)}*{_render(node.child, 3)}"
        return f"({text})" if prec > 2 else text
    if isinstance(node, Neg):
        inner = _render(node.child, 4)
        if isinstance(node.child, (Ident, Identity, Pinv, Adjoint)):
            return f"-{inner}"
        return f"-({_render(node.child, 0)})"
    raise TypeError(f"not an expression node: {node!r}")


class _IdentityVal:
    """Scalar multiple of a contextually sized identity matrix."""

    __slots__ = ("c",)

    def __init__(self, c: complex):
        self.c = c


def _lookup(env, name: str):
    try:
        return env[name]
    except KeyError:
        raise ValueError(f"unbound identifier '{name}'") from None


def _materialize(val: _IdentityVal, like: np.ndarray, what: str) -> np.ndarray:
    if like.shape[0] != like.shape[1]:
        raise ValueError(f"bare I cannot be {what} a non-square matrix of shape {like.shape}")
    return val.c * np.eye(like.shape[0], dtype=complex)


def _eval_mat(node, env):
    if isinstance(node, Ident):
        return np.asarray(_lookup(env, node.name), dtype=complex)
    if isinstance(node, Identity):
        if node.name is None:
            return _IdentityVal(complex(1))
        ref = np.asarray(_lookup(env, node.name))
        return np.eye(ref.shape[1], dtype=complex)
    if isinstance(node, (Add, Sub)):
        a = _eval_mat(node.left, env)
        b = _eval_mat(node.right, env)
        samesign = isinstance(node, Add)
        if isinstance(a, _IdentityVal) and isinstance(b, _IdentityVal):
            return _IdentityVal(a.c + b.c if samesign else a.c - b.c)
        if isinstance(a, _IdentityVal):
            a = _materialize(a, b, "added to")
        elif isinstance(b, _IdentityVal):
            b = _materialize(b, a, "added to")
        if a.shape != b.shape:
            raise ValueError(f"shape mismatch in '{'+' if samesign else '-'}': {a.shape} vs {b.shape}")
        return a + b if samesign else a - b
    if isinstance(node, Mul):
        a = _eval_mat(node.left, env)
        b = _eval_mat(node.right, env)
        if isinstance(a, _IdentityVal) and isinstance(b, _IdentityVal):
            return _IdentityVal(a.c * b.c)
        if isinstance(a, _IdentityVal):
            return a.c * b
        if isinstance(b, _IdentityVal):
            return b.c * a
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch in '*': {a.shape} times {b.shape}")
        return a @ b
    if isinstance(node, Neg):
        val = _eval_mat(node.child, env)
        return _IdentityVal(-val.c) if isinstance(val, _IdentityVal) else -val
    if isinstance(node, ScalarMul):
        val = _eval_mat(node.child, env)
        return _IdentityVal(node.scalar * val.c) if isinstance(val, _IdentityVal) else node.scalar * val
    if isinstance(node, Adjoint):
        val = _eval_mat(node.child, env)
        return _IdentityVal(val.c.conjugate()) if isinstance(val, _IdentityVal) else val.conj().T
    if isinstance(node, Pinv):
        val = _eval_mat(node.child, env)
        if isinstance(val, _IdentityVal):
            return _IdentityVal(1 / val.c if val.c != 0 else complex(0))
        return pinv_matrix(val)
    raise TypeError(f"not an expression node: {node!r}")


def eval_symbol(expr, env, k) -> np.ndarray:
    """Evaluate an expression over the symbols of pre-compatible operators at k."""
    ast = expr.ast if isinstance(expr, Expression) else expr
    mats = {name: symbol_at(op, k).matrix for name, op in env.items()}
    value = _eval_mat(ast, mats)
    if isinstance(value, _IdentityVal):
        raise ValueError("expression reduces to a bare identity with no shape context")
    return value


def _contains_pinv(node) -> bool:
    if isinstance(node, Pinv):
        return True
    if isinstance(node, (Add, Sub, Mul)):
        return _contains_pinv(node.left) or _contains_pinv(node.right)
    if isinstance(node, (Neg, ScalarMul, Adjoint)):
        return _contains_pinv(node.child)
    return False


def _ident_on(op: MultiplicationOperator, c: complex) -> MultiplicationOperator:
    if op.domain_se != op.codomain_se:
        raise ValueError("bare I cannot be added to an operator with distinct structure elements")
    return op_scale(c, identity_operator(op.lattice, op.domain_se))


def _eval_pos(node, env):
    if isinstance(node, Ident):
        return _lookup(env, node.name)
    if isinstance(node, Identity):
        if node.name is None:
            return complex(1)
        ref = _lookup(env, node.name)
        return identity_operator(ref.lattice, ref.domain_se)
    if isinstance(node, (Add, Sub)):
        a = _eval_pos(node.left, env)
        b = _eval_pos(node.right, env)
        samesign = isinstance(node, Add)
        if isinstance(a, complex) and isinstance(b, complex):
            return a + b if samesign else a - b
        if isinstance(a, complex):
            a = _ident_on(b, a)
        elif isinstance(b, complex):
            b = _ident_on(a, b)
        return op_add(a, b if samesign else op_scale(-1, b))
    if isinstance(node, Mul):
        a = _eval_pos(node.left, env)
        b = _eval_pos(node.right, env)
        if isinstance(a, complex) and isinstance(b, complex):
            return a * b
        if isinstance(a, complex):
            return op_scale(a, b)
        if isinstance(b, complex):
            return op_scale(b, a)
        return op_mul(a, b)
    if isinstance(node, Neg):
        val = _eval_pos(node.child, env)
        return -val if isinstance(val, complex) else op_scale(-1, val)
    if isinstance(node, ScalarMul):
        val = _eval_pos(node.child, env)
        return node.scalar * val if isinstance(val, complex) else op_scale(node.scalar, val)
    if isinstance(node, Adjoint):
        val = _eval_pos(node.child, env)
        return val.conjugate() if isinstance(val, complex) else op_adjoint(val)
    if isinstance(node, Pinv):
        raise ValueError("pseudo-inverse not available in position space")
    raise TypeError(f"not an expression node: {node!r}")


def eval_position(expr, env) -> MultiplicationOperator:
    ast = expr.ast if isinstance(expr, Expression) else expr
    if _contains_pinv(ast):
        raise ValueError("pseudo-inverse not available in position space")
    value = _eval_pos(ast, env)
    if isinstance(value, complex):
        raise ValueError("expression reduces to a bare identity with no shape context")
    return value
