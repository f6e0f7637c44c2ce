"""Parser and evaluator for coefficient expressions in the variables s, t.

Grammar (EBNF, also shipped in docs/grammar.ebnf):

    expr    = term   { ("+" | "-") term } ;
    term    = unary  { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;
    atom    = NUMBER | NAME | NAME "(" expr ")" | "(" expr ")" ;

"^" is right-associative and binds tighter than unary minus, so
"-2^2" is -(2^2) = -4.  There is no implicit multiplication: "2s" is a
syntax error.  NAME is a variable (s or t), a known function
(sin, cos, exp, log, sqrt, abs), or a free parameter bound at evaluation
time.  Whitespace is insignificant.

Evaluation is plain IEEE double arithmetic.  Domain violations (log of a
nonpositive value, division by zero, fractional power of a negative base,
overflow to infinity) raise EvalError naming the offending subexpression
instead of propagating silent NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "CoeffExpr",
    "ParseError",
    "EvalError",
    "PositivityReport",
    "parse",
    "to_text",
    "eval_expr",
    "eval_array",
    "positivity_scan",
    "FUNCTIONS",
    "VARIABLES",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")
VARIABLES = ("s", "t")


class ParseError(ValueError):
    """Syntax error with byte offset and the set of tokens that were expected."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        text = f"{message} at offset {offset}"
        if expected:
            text += " (expected " + " | ".join(expected) + ")"
        super().__init__(text)


class EvalError(ValueError):
    """Evaluation failure; carries the offending subexpression as text."""

    def __init__(self, message: str, subexpr: "Node | None" = None):
        self.subexpr = subexpr
        if subexpr is not None:
            message += f" in subexpression '{_print(subexpr)}'"
        super().__init__(message)


# ----------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Name, Neg, Bin, Call]


@dataclass(frozen=True)
class CoeffExpr:
    """A parsed coefficient expression over {s, t} and named parameters."""

    ast: Node

    def text(self) -> str:
        return _print(self.ast)

    def free_names(self) -> frozenset[str]:
        names: set[str] = set()
        _collect_names(self.ast, names)
        return frozenset(names)

    def free_parameters(self) -> frozenset[str]:
        return frozenset(n for n in self.free_names() if n not in VARIABLES)


def _collect_names(node: Node, out: set[str]) -> None:
    if isinstance(node, Name):
        out.add(node.ident)
    elif isinstance(node, Neg):
        _collect_names(node.operand, out)
    elif isinstance(node, Bin):
        _collect_names(node.left, out)
        _collect_names(node.right, out)
    elif isinstance(node, Call):
        _collect_names(node.arg, out)


# ----------------------------------------------------------------------
# tokenizer

_OPS = "+-*/^"


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | lparen | rparen | end
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            tokens.append(_Token("lparen", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Token("rparen", c, i))
            i += 1
        elif c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ParseError(f"malformed number '{text}'", i) from None
            tokens.append(_Token("number", text, i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(_Token("name", src[i:j], i))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


# ----------------------------------------------------------------------
# recursive-descent parser


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        shown = tok.text if tok.kind != "end" else "end of input"
        raise ParseError(f"unexpected {shown!r}", tok.offset, expected)

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = Bin(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            return Bin("^", node, self.unary())
        return node

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if self.peek().kind == "lparen":
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}", tok.offset,
                                     FUNCTIONS)
                self.advance()
                arg = self.expr()
                if self.peek().kind != "rparen":
                    self.fail(("')'",))
                self.advance()
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                raise ParseError(f"function {tok.text!r} needs an argument list",
                                 tok.offset, ("'('",))
            return Name(tok.text)
        if tok.kind == "lparen":
            self.advance()
            node = self.expr()
            if self.peek().kind != "rparen":
                self.fail(("')'",))
            self.advance()
            return node
        self.fail(("number", "name", "'('", "'-'"))


def parse(src: str) -> CoeffExpr:
    """Parse source text into a CoeffExpr; raises ParseError with position."""
    parser = _Parser(_tokenize(src))
    node = parser.expr()
    if parser.peek().kind != "end":
        parser.fail(("operator", "end of input"))
    return CoeffExpr(ast=node)


# ----------------------------------------------------------------------
# printer (output reparses to a structurally identical tree)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: Node) -> int:
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return 5


def _print(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Call):
        return f"{node.func}({_print(node.arg)})"
    if isinstance(node, Neg):
        inner = _print(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Bin):
        op = node.op
        lp, rp = _prec(node.left), _prec(node.right)
        left = _print(node.left)
        right = _print(node.right)
        if op == "^":
            # right-associative: parenthesize any left child at or below ^
            if lp <= _PREC["^"]:
                left = f"({left})"
            if rp < _PREC["^"]:
                right = f"({right})"
        else:
            if lp < _PREC[op]:
                left = f"({left})"
            if rp <= _PREC[op]:
                right = f"({right})"
        return f"{left} {op} {right}" if op in "+-" else f"{left}{op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


def to_text(expr: CoeffExpr) -> str:
    return expr.text()


# ----------------------------------------------------------------------
# evaluation


def eval_expr(expr: CoeffExpr, s: float | None = None, t: float | None = None,
              params: dict[str, float] | None = None) -> float:
    """Evaluate at (s, t) with all free parameters bound.

    Raises EvalError for unbound names, domain violations and non-finite
    results; the message carries the offending subexpression.
    """
    env = dict(params or {})
    if s is not None:
        env["s"] = float(s)
    if t is not None:
        env["t"] = float(t)
    value = _eval(expr.ast, env)
    if not math.isfinite(value):
        raise EvalError(f"non-finite result {value!r}", expr.ast)
    return value


def _eval(node: Node, env: dict[str, float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        try:
            return float(env[node.ident])
        except KeyError:
            raise EvalError(f"unbound parameter {node.ident!r}", node) from None
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        arg = _eval(node.arg, env)
        if node.func == "log":
            if arg <= 0.0:
                raise EvalError(f"log of nonpositive value {arg!r}", node)
            return math.log(arg)
        if node.func == "sqrt":
            if arg < 0.0:
                raise EvalError(f"sqrt of negative value {arg!r}", node)
            return math.sqrt(arg)
        if node.func == "exp":
            try:
                return math.exp(arg)
            except OverflowError:
                raise EvalError(f"exp overflow at argument {arg!r}", node) from None
        if node.func == "sin":
            return math.sin(arg)
        if node.func == "cos":
            return math.cos(arg)
        if node.func == "abs":
            return abs(arg)
        raise EvalError(f"unknown function {node.func!r}", node)
    if isinstance(node, Bin):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        try:
            if node.op == "+":
                out = a + b
            elif node.op == "-":
                out = a - b
            elif node.op == "*":
                out = a * b
            elif node.op == "/":
                if b == 0.0:
                    raise EvalError("division by zero", node)
                out = a / b
            elif node.op == "^":
                if a == 0.0 and b < 0.0:
                    raise EvalError("zero raised to a negative power", node)
                if a < 0.0 and b != math.floor(b):
                    raise EvalError(
                        f"negative base {a!r} with non-integer exponent {b!r}", node)
                out = math.pow(a, b)
            else:
                raise EvalError(f"unknown operator {node.op!r}", node)
        except OverflowError:
            raise EvalError("overflow", node) from None
        if math.isinf(out):
            raise EvalError("overflow to infinity", node)
        return out
    raise TypeError(f"not an expression node: {node!r}")


def eval_array(expr: CoeffExpr, s=None, t=None,
               params: dict[str, float] | None = None) -> np.ndarray:
    """Vectorized evaluation on numpy arrays.

    Domain violations surface as NaN/inf in the result instead of raising
    (invalid-operation warnings are suppressed); callers scanning grids
    inspect finiteness themselves.  Unbound names still raise EvalError.
    """
    env: dict[str, object] = dict(params or {})
    if s is not None:
        env["s"] = np.asarray(s, dtype=float)
    if t is not None:
        env["t"] = np.asarray(t, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval_np(expr.ast, env)
    return np.asarray(out, dtype=float)


_NP_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log,
             "sqrt": np.sqrt, "abs": np.abs}


def _eval_np(node: Node, env: dict[str, object]):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        try:
            return env[node.ident]
        except KeyError:
            raise EvalError(f"unbound parameter {node.ident!r}", node) from None
    if isinstance(node, Neg):
        return -_eval_np(node.operand, env)
    if isinstance(node, Call):
        return _NP_FUNCS[node.func](_eval_np(node.arg, env))
    if isinstance(node, Bin):
        a = _eval_np(node.left, env)
        b = _eval_np(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)
    raise TypeError(f"not an expression node: {node!r}")


# ----------------------------------------------------------------------
# positivity scan


@dataclass(frozen=True)
class PositivityReport:
    ok: bool
    counterexample: tuple[float, float] | None = None
    value: float | None = None


def positivity_scan(expr: CoeffExpr, params: dict[str, float] | None,
                    s_range: tuple[float, float], t_range: tuple[float, float],
                    n: int = 32) -> PositivityReport:
    """Probe positivity on an n x n log-spaced grid over s_range x t_range.

    Advisory only: a passing scan cannot prove positivity.  The first
    nonpositive or non-finite grid value is returned as a counterexample;
    unbound parameters raise EvalError.
    """
    if n < 2:
        raise ValueError("grid size n must be at least 2")
    for name, (lo, hi) in (("s", s_range), ("t", t_range)):
        if not (0.0 < lo < hi):
            raise ValueError(f"{name}_range must satisfy 0 < lo < hi, got {(lo, hi)!r}")
    s_vals = np.geomspace(s_range[0], s_range[1], n)
    t_vals = np.geomspace(t_range[0], t_range[1], n)
    ss, tt = np.meshgrid(s_vals, t_vals, indexing="ij")
    out = eval_array(expr, ss, tt, params)
    bad = ~np.isfinite(out) | (out <= 0.0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return PositivityReport(ok=False,
                                counterexample=(float(s_vals[i]), float(t_vals[j])),
                                value=float(out[i, j]))
    return PositivityReport(ok=True)
