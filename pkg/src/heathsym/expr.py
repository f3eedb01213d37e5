"""Small immutable expression trees: parse, differentiate, substitute, evaluate.

This is deliberately not a CAS.  Construction folds constants and removes
0/1 identities; `simplify` adds a few safe rewrites (exp/log merging).
Equality of expressions is decided downstream by numeric sampling, never by
canonical forms.  Numeric literals are kept as exact rationals whenever the
source text allows it, so residuals of exact cancellations come out at
machine zero.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

Number = Union[int, float, Fraction]
ExprLike = Union["Expr", int, float, Fraction]


class ExprError(Exception):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundSymbolError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unbound symbol '{name}'")
        self.name = name


class DomainError(ExprError):
    """Raised when evaluation leaves the real domain (ln of non-positive,
    division by zero, fractional power of a negative base, ...)."""

    def __init__(self, message: str, subexpr: str = ""):
        self.subexpr = subexpr
        if subexpr:
            message = f"{message} in '{subexpr}'"
        super().__init__(message)


# Functions understood by the parser / evaluator and their float implementations.
_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "exp": math.exp,
    "ln": None,  # guarded below
    "sqrt": None,  # guarded below
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "abs": abs,
    "sign": lambda v: (v > 0) - (v < 0),
}


class Expr:
    """Immutable expression node.

    ``op`` is one of 'num', 'sym', 'add', 'mul', 'pow', 'call'.
    ``args`` holds the payload: a number, a name, child expressions, or
    (function-name, child) for calls.  Nodes hash structurally so repeated
    subtrees dedupe in memoized walks.
    """

    __slots__ = ("op", "args", "_hash")

    def __init__(self, op: str, args: tuple):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((op, args)))

    def __setattr__(self, *_):
        raise AttributeError("Expr is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Expr)
            and self._hash == other._hash
            and self.op == other.op
            and self.args == other.args
        )

    # -- convenience arithmetic -------------------------------------------
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, other):
        return pow_(self, _lift(other))

    def __rpow__(self, other):
        return pow_(_lift(other), self)

    def __neg__(self):
        return mul(num(-1), self)

    def __repr__(self):
        return f"Expr({to_str(self)!r})"

    def __str__(self):
        return to_str(self)


def _lift(v: ExprLike) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return num(v)
    if isinstance(v, float):
        return num(v)
    raise TypeError(f"cannot use {type(v).__name__} as an expression")


# -- constructors (do the light normalization) ----------------------------

def num(v: Number) -> Expr:
    if isinstance(v, float) and v.is_integer() and abs(v) < 1e15:
        v = Fraction(int(v))
    elif isinstance(v, int):
        v = Fraction(v)
    return Expr("num", (v,))


def sym(name: str) -> Expr:
    return Expr("sym", (name,))


def symbols(names: str) -> list[Expr]:
    return [sym(n) for n in names.replace(",", " ").split()]


ZERO = num(0)
ONE = num(1)


def _is_num(e: Expr) -> bool:
    return e.op == "num"


def _numval(e: Expr) -> Number:
    return e.args[0]


def add(*terms: ExprLike) -> Expr:
    # flatten, fold constants, and collect like terms coefficient-wise
    coeffs: dict[Expr, Number] = {}
    const: Number = Fraction(0)
    for t in terms:
        t = _lift(t)
        if t.op == "add":
            children = t.args
        else:
            children = (t,)
        for c in children:
            if _is_num(c):
                const = const + _numval(c)
                continue
            if c.op == "mul" and _is_num(c.args[0]):
                coef = _numval(c.args[0])
                rest = c.args[1] if len(c.args) == 2 else Expr("mul", c.args[1:])
            else:
                coef, rest = Fraction(1), c
            coeffs[rest] = coeffs.get(rest, Fraction(0)) + coef
    flat = [mul(num(k), term) for term, k in coeffs.items() if k != 0]
    if const != 0 or not flat:
        flat.insert(0, num(const))
    if len(flat) == 1:
        return flat[0]
    return Expr("add", tuple(flat))


def sub(a: ExprLike, b: ExprLike) -> Expr:
    return add(a, mul(num(-1), b))


def mul(*factors: ExprLike) -> Expr:
    # flatten, fold constants, and merge repeated bases with numeric exponents
    powers: dict[Expr, Number] = {}
    const: Number = Fraction(1)
    for f in factors:
        f = _lift(f)
        if f.op == "mul":
            children = f.args
        else:
            children = (f,)
        for c in children:
            if _is_num(c):
                const = const * _numval(c)
                continue
            if c.op == "pow" and _is_num(c.args[1]):
                base, ex = c.args[0], _numval(c.args[1])
            else:
                base, ex = c, Fraction(1)
            powers[base] = powers.get(base, Fraction(0)) + ex
    if const == 0:
        return ZERO
    flat = [pow_(base, num(ex)) for base, ex in powers.items() if ex != 0]
    flat = [f for f in flat if not (_is_num(f) and _numval(f) == 1)]
    if const != 1 or not flat:
        flat.insert(0, num(const))
    if len(flat) == 1:
        return flat[0]
    return Expr("mul", tuple(flat))


def div(a: ExprLike, b: ExprLike) -> Expr:
    b = _lift(b)
    if _is_num(b):
        v = _numval(b)
        if v == 0:
            raise DomainError("division by zero constant")
        return mul(a, num(Fraction(1, 1) / v if isinstance(v, Fraction) else 1.0 / v))
    return mul(a, pow_(b, num(-1)))


def pow_(base: ExprLike, exponent: ExprLike) -> Expr:
    base = _lift(base)
    exponent = _lift(exponent)
    if _is_num(exponent):
        ev = _numval(exponent)
        if ev == 1:
            return base
        if ev == 0:
            return ONE
        if _is_num(base):
            bv = _numval(base)
            if isinstance(bv, Fraction) and isinstance(ev, Fraction) and ev.denominator == 1:
                e_int = int(ev)
                if bv == 0 and e_int < 0:
                    raise DomainError("zero to a negative power")
                return num(bv ** e_int)
        if base.op == "pow" and _is_num(base.args[1]):
            # (u^c1)^c2 -> u^(c1*c2) when c2 is an integer (no branch issues)
            inner = _numval(base.args[1])
            if isinstance(ev, Fraction) and ev.denominator == 1:
                return pow_(base.args[0], num(inner * ev))
    if _is_num(base) and _numval(base) == 1:
        return ONE
    return Expr("pow", (base, exponent))


def call(fname: str, arg: ExprLike) -> Expr:
    if fname not in _FUNCTIONS:
        raise ExprError(f"unknown function '{fname}'")
    arg = _lift(arg)
    if fname == "exp" and _is_num(arg) and _numval(arg) == 0:
        return ONE
    if fname == "ln" and _is_num(arg) and _numval(arg) == 1:
        return ZERO
    return Expr("call", (fname, arg))


def exp(a: ExprLike) -> Expr:
    return call("exp", a)


def ln(a: ExprLike) -> Expr:
    return call("ln", a)


def sqrt(a: ExprLike) -> Expr:
    return call("sqrt", a)


# -- queries ---------------------------------------------------------------

def free_symbols(e: Expr) -> set[str]:
    seen: set[int] = set()
    out: set[str] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if node.op == "sym":
            out.add(node.args[0])
        elif node.op == "call":
            stack.append(node.args[1])
        elif node.op in ("add", "mul", "pow"):
            stack.extend(node.args)
    return out


def _children(e: Expr) -> tuple[Expr, ...]:
    if e.op in ("add", "mul", "pow"):
        return e.args
    if e.op == "call":
        return (e.args[1],)
    return ()


# -- evaluation ------------------------------------------------------------

def _eval_call(fname: str, v: float, where: Expr) -> float:
    if fname == "ln":
        if v <= 0:
            raise DomainError(f"ln of non-positive value {v!r}", to_str(where))
        return math.log(v)
    if fname == "sqrt":
        if v < 0:
            raise DomainError(f"sqrt of negative value {v!r}", to_str(where))
        return math.sqrt(v)
    try:
        return float(_FUNCTIONS[fname](v))
    except OverflowError:
        raise DomainError(f"overflow in {fname}({v!r})", to_str(where))


def _eval_pow(b: float, ev: float, where: Expr) -> float:
    if ev == int(ev):
        if b == 0 and ev < 0:
            raise DomainError("zero raised to a negative power", to_str(where))
        return b ** int(ev)
    if b < 0:
        raise DomainError(
            f"negative base {b!r} with non-integer exponent {ev!r}", to_str(where)
        )
    if b == 0 and ev < 0:
        raise DomainError("zero raised to a negative power", to_str(where))
    try:
        return b ** ev
    except OverflowError:
        raise DomainError("overflow in power", to_str(where))


def evaluate(e: Expr, env: Mapping[str, float]) -> float:
    """Evaluate a closed expression to a float.

    Every free symbol must appear in ``env``; domain violations raise
    DomainError naming the offending subexpression instead of producing NaN.
    """
    memo: dict[Expr, float] = {}

    def walk(node: Expr) -> float:
        got = memo.get(node)
        if got is not None:
            return got
        if node.op == "num":
            v = float(node.args[0])
        elif node.op == "sym":
            name = node.args[0]
            if name not in env:
                raise UnboundSymbolError(name)
            v = float(env[name])
        elif node.op == "add":
            v = math.fsum(walk(c) for c in node.args)
        elif node.op == "mul":
            v = 1.0
            for c in node.args:
                v *= walk(c)
        elif node.op == "pow":
            v = _eval_pow(walk(node.args[0]), walk(node.args[1]), node)
        else:  # call
            v = _eval_call(node.args[0], walk(node.args[1]), node)
        if math.isinf(v):
            raise DomainError("overflow to infinity", to_str(node))
        memo[node] = v
        return v

    return walk(e)


# -- differentiation -------------------------------------------------------

def diff(e: Expr, var: Union[str, Expr], order: int = 1) -> Expr:
    """Exact structural derivative with respect to a variable name.

    Symbols other than ``var`` are treated as constants.  abs/sign use the
    convention abs' = sign, sign' = 0 (valid away from zero).
    """
    if isinstance(var, Expr):
        if var.op != "sym":
            raise ExprError("differentiation variable must be a symbol")
        var = var.args[0]
    for _ in range(order):
        e = _diff1(e, var)
    return e


def _diff1(e: Expr, var: str) -> Expr:
    memo: dict[Expr, Expr] = {}

    def d(node: Expr) -> Expr:
        got = memo.get(node)
        if got is not None:
            return got
        if node.op == "num":
            r = ZERO
        elif node.op == "sym":
            r = ONE if node.args[0] == var else ZERO
        elif node.op == "add":
            r = add(*[d(c) for c in node.args])
        elif node.op == "mul":
            terms = []
            children = node.args
            for i, c in enumerate(children):
                dc = d(c)
                if dc is ZERO or (_is_num(dc) and _numval(dc) == 0):
                    continue
                terms.append(mul(*(children[:i] + (dc,) + children[i + 1:])))
            r = add(*terms) if terms else ZERO
        elif node.op == "pow":
            base, expo = node.args
            db, de = d(base), d(expo)
            de_zero = _is_num(de) and _numval(de) == 0
            db_zero = _is_num(db) and _numval(db) == 0
            if de_zero and db_zero:
                r = ZERO
            elif de_zero:
                # d(u^c) = c*u^(c-1)*u'
                r = mul(expo, pow_(base, sub(expo, ONE)), db)
            else:
                # d(u^v) = u^v * (v' ln u + v u'/u)
                r = mul(node, add(mul(de, ln(base)), mul(expo, db, pow_(base, num(-1)))))
        else:  # call
            fname, arg = node.args
            da = d(arg)
            if _is_num(da) and _numval(da) == 0:
                r = ZERO
            else:
                r = mul(_fn_derivative(fname, arg), da)
        memo[node] = r
        return r

    return d(e)


def _fn_derivative(fname: str, arg: Expr) -> Expr:
    if fname == "exp":
        return exp(arg)
    if fname == "ln":
        return pow_(arg, num(-1))
    if fname == "sqrt":
        return mul(num(Fraction(1, 2)), pow_(arg, num(Fraction(-1, 2))))
    if fname == "sin":
        return call("cos", arg)
    if fname == "cos":
        return mul(num(-1), call("sin", arg))
    if fname == "tan":
        return pow_(call("cos", arg), num(-2))
    if fname == "sinh":
        return call("cosh", arg)
    if fname == "cosh":
        return call("sinh", arg)
    if fname == "abs":
        return call("sign", arg)
    if fname == "sign":
        return ZERO
    raise ExprError(f"no derivative rule for '{fname}'")


# -- substitution ----------------------------------------------------------

def substitute(e: Expr, target: Union[str, Expr], replacement: ExprLike) -> Expr:
    """Replace every occurrence of the symbol ``target``.  No binders exist,
    so capture is impossible."""
    if isinstance(target, Expr):
        if target.op != "sym":
            raise ExprError("substitution target must be a symbol")
        target = target.args[0]
    return subs(e, {target: replacement})


def subs(e: Expr, mapping: Mapping[str, ExprLike]) -> Expr:
    repl = {k: _lift(v) for k, v in mapping.items()}
    memo: dict[Expr, Expr] = {}

    def walk(node: Expr) -> Expr:
        got = memo.get(node)
        if got is not None:
            return got
        if node.op == "sym":
            r = repl.get(node.args[0], node)
        elif node.op == "num":
            r = node
        elif node.op == "add":
            r = add(*[walk(c) for c in node.args])
        elif node.op == "mul":
            r = mul(*[walk(c) for c in node.args])
        elif node.op == "pow":
            r = pow_(walk(node.args[0]), walk(node.args[1]))
        else:
            r = call(node.args[0], walk(node.args[1]))
        memo[node] = r
        return r

    return walk(e)


def rename(e: Expr, mapping: Mapping[str, str]) -> Expr:
    return subs(e, {k: sym(v) for k, v in mapping.items()})


# -- simplification --------------------------------------------------------

def simplify(e: Expr) -> Expr:
    """Best-effort cleanup: constant folding (already done by constructors),
    merging products of exponentials, ln(exp(u)) -> u, exp(ln(u)) -> u.
    The result is only guaranteed equivalent where the input is defined."""
    memo: dict[Expr, Expr] = {}

    def walk(node: Expr) -> Expr:
        got = memo.get(node)
        if got is not None:
            return got
        if node.op in ("num", "sym"):
            r = node
        elif node.op == "add":
            r = add(*[walk(c) for c in node.args])
        elif node.op == "mul":
            factors = [walk(c) for c in node.args]
            exp_args = [f.args[1] for f in factors if f.op == "call" and f.args[0] == "exp"]
            rest = [f for f in factors if not (f.op == "call" and f.args[0] == "exp")]
            if len(exp_args) > 1:
                rest.append(exp(add(*exp_args)))
                r = mul(*rest)
            else:
                r = mul(*factors)
        elif node.op == "pow":
            base, expo = walk(node.args[0]), walk(node.args[1])
            if base.op == "call" and base.args[0] == "exp":
                r = exp(mul(base.args[1], expo))
            elif base.op == "pow" and _is_num(base.args[1]) and _is_num(expo):
                bv, ev = _numval(base.args[1]), _numval(expo)
                if isinstance(ev, Fraction) and ev.denominator == 1:
                    r = pow_(base.args[0], num(bv * ev))
                else:
                    r = pow_(base, expo)
            else:
                r = pow_(base, expo)
        else:
            fname, arg = node.args
            arg = walk(arg)
            if fname == "ln" and arg.op == "call" and arg.args[0] == "exp":
                r = arg.args[1]
            elif fname == "exp" and arg.op == "call" and arg.args[0] == "ln":
                r = arg.args[1]
            elif (
                fname == "exp"
                and arg.op == "mul"
                and len(arg.args) == 2
                and _is_num(arg.args[0])
                and arg.args[1].op == "call"
                and arg.args[1].args[0] == "ln"
            ):
                # exp(c*ln(u)) -> u^c
                r = pow_(arg.args[1].args[1], arg.args[0])
            else:
                r = call(fname, arg)
        memo[node] = r
        return r

    return walk(e)


# -- printing --------------------------------------------------------------

def _num_str(v: Number) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return repr(v)


# precedence levels: add=1, mul=2, unary-minus=2.5, pow=3, atom=4
def _print(e: Expr, parent_prec: float) -> str:
    if e.op == "num":
        v = e.args[0]
        s = _num_str(v)
        prec = 4.0
        if v < 0:
            prec = 2.5
        elif isinstance(v, Fraction) and v.denominator != 1:
            prec = 2.0
        return f"({s})" if prec < parent_prec else s
    if e.op == "sym":
        return e.args[0]
    if e.op == "call":
        return f"{e.args[0]}({_print(e.args[1], 0)})"
    if e.op == "add":
        parts = [_print(e.args[0], 1.0)]
        for t in e.args[1:]:
            neg = _negated(t)
            if neg is not None:
                parts.append(f" - {_print(neg, 1.5)}")
            else:
                parts.append(f" + {_print(t, 1.5)}")
        s = "".join(parts)
        return f"({s})" if parent_prec > 1.0 else s
    if e.op == "mul":
        factors = list(e.args)
        prefix = ""
        if _is_num(factors[0]) and _numval(factors[0]) == -1 and len(factors) > 1:
            factors = factors[1:]
            prefix = "-"
        s = prefix + "*".join(_print(f, 2.5) for f in factors)
        prec = 2.0 if not prefix else 1.9
        return f"({s})" if parent_prec > prec else s
    # pow: right-associative, binds tighter than unary minus
    base, expo = e.args
    s = f"{_print(base, 3.5)}^{_print(expo, 3.1)}"
    return f"({s})" if parent_prec > 3.0 else s


def _negated(t: Expr) -> Expr | None:
    """If t == -s for a syntactically evident s, return s."""
    if t.op == "num" and _numval(t) < 0:
        return num(-_numval(t))
    if t.op == "mul" and _is_num(t.args[0]) and _numval(t.args[0]) < 0:
        c = _numval(t.args[0])
        if c == -1 and len(t.args) == 2:
            return t.args[1]
        return mul(num(-c), *t.args[1:])
    return None


def to_str(e: Expr) -> str:
    return _print(e, 0)


# -- parsing ---------------------------------------------------------------

class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            return ("eof", "", self.pos)
        ch = self.text[self.pos]
        if ch.isdigit() or (ch == "." and self.pos + 1 < len(self.text) and self.text[self.pos + 1].isdigit()):
            return self._number()
        if ch.isalpha() or ch == "_":
            j = self.pos
            while j < len(self.text) and (self.text[j].isalnum() or self.text[j] == "_"):
                j += 1
            return ("ident", self.text[self.pos:j], self.pos)
        if ch in "+-*/^(),":
            return ("op", ch, self.pos)
        raise ParseError(f"unexpected character {ch!r}", self.pos)

    def _number(self):
        j = self.pos
        text = self.text
        while j < len(text) and text[j].isdigit():
            j += 1
        if j < len(text) and text[j] == ".":
            j += 1
            while j < len(text) and text[j].isdigit():
                j += 1
        if j < len(text) and text[j] in "eE":
            k = j + 1
            if k < len(text) and text[k] in "+-":
                k += 1
            if k < len(text) and text[k].isdigit():
                while k < len(text) and text[k].isdigit():
                    k += 1
                j = k
        return ("number", text[self.pos:j], self.pos)

    def advance(self, token):
        self.pos = token[2] + len(token[1])

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1


def parse(text: str) -> Expr:
    """Parse infix text into an Expr.  See docs/grammar.md for the grammar."""
    tz = _Tokenizer(text)
    e = _parse_sum(tz)
    tok = tz.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
    return e


def _parse_sum(tz: _Tokenizer) -> Expr:
    left = _parse_term(tz)
    while True:
        tok = tz.peek()
        if tok[0] == "op" and tok[1] in "+-":
            tz.advance(tok)
            right = _parse_term(tz)
            left = add(left, right) if tok[1] == "+" else sub(left, right)
        else:
            return left


def _parse_term(tz: _Tokenizer) -> Expr:
    left = _parse_factor(tz)
    while True:
        tok = tz.peek()
        if tok[0] == "op" and tok[1] in "*/":
            tz.advance(tok)
            right = _parse_factor(tz)
            left = mul(left, right) if tok[1] == "*" else div(left, right)
        else:
            return left


def _parse_factor(tz: _Tokenizer) -> Expr:
    tok = tz.peek()
    if tok[0] == "op" and tok[1] == "-":
        tz.advance(tok)
        return mul(num(-1), _parse_factor(tz))
    if tok[0] == "op" and tok[1] == "+":
        tz.advance(tok)
        return _parse_factor(tz)
    return _parse_power(tz)


def _parse_power(tz: _Tokenizer) -> Expr:
    base = _parse_atom(tz)
    tok = tz.peek()
    if tok[0] == "op" and tok[1] == "^":
        tz.advance(tok)
        return pow_(base, _parse_factor(tz))
    return base


def _parse_atom(tz: _Tokenizer) -> Expr:
    tok = tz.peek()
    if tok[0] == "number":
        tz.advance(tok)
        text = tok[1]
        if "e" in text.lower() and "." not in text:
            return num(Fraction(text.lower().replace("e", "E")))
        try:
            return num(Fraction(text))
        except ValueError:
            return num(float(text))
    if tok[0] == "ident":
        tz.advance(tok)
        nxt = tz.peek()
        if nxt[0] == "op" and nxt[1] == "(":
            if tok[1] not in _FUNCTIONS:
                raise ParseError(f"unknown function '{tok[1]}'", tok[2])
            tz.advance(nxt)
            arg = _parse_sum(tz)
            closing = tz.peek()
            if closing[0] != "op" or closing[1] != ")":
                raise ParseError("expected ')'", closing[2])
            tz.advance(closing)
            return call(tok[1], arg)
        return sym(tok[1])
    if tok[0] == "op" and tok[1] == "(":
        tz.advance(tok)
        e = _parse_sum(tz)
        closing = tz.peek()
        if closing[0] != "op" or closing[1] != ")":
            raise ParseError("expected ')'", closing[2])
        tz.advance(closing)
        return e
    raise ParseError(f"unexpected token {tok[1]!r}" if tok[1] else "unexpected end of input", tok[2])


# -- compilation to fast callables ----------------------------------------

def _c_ln(v, s):
    if v <= 0:
        raise DomainError(f"ln of non-positive value {v!r}", s)
    return math.log(v)


def _c_sqrt(v, s):
    if v < 0:
        raise DomainError(f"sqrt of negative value {v!r}", s)
    return math.sqrt(v)


def _c_pow(b, e, s):
    if e == int(e):
        if b == 0 and e < 0:
            raise DomainError("zero raised to a negative power", s)
        try:
            return b ** int(e)
        except OverflowError:
            raise DomainError("overflow in power", s)
    if b < 0:
        raise DomainError(f"negative base {b!r} with non-integer exponent {e!r}", s)
    if b == 0 and e < 0:
        raise DomainError("zero raised to a negative power", s)
    try:
        return b ** e
    except OverflowError:
        raise DomainError("overflow in power", s)


def _c_exp(v, s):
    try:
        return math.exp(v)
    except OverflowError:
        raise DomainError(f"overflow in exp({v!r})", s)


def compile_exprs(exprs: Iterable[Expr], argnames: Iterable[str]) -> Callable[..., tuple]:
    """Compile expressions into one positional-argument function returning a
    tuple of floats.  Shared subtrees are evaluated once.  Used for batch
    sampling; raises the same DomainError family as `evaluate`."""
    exprs = list(exprs)
    argnames = list(argnames)
    index: dict[Expr, str] = {}
    lines: list[str] = []
    ns: dict[str, object] = {
        "_ln": _c_ln, "_sqrt": _c_sqrt, "_pow": _c_pow, "_exp": _c_exp,
        "sin": math.sin, "cos": math.cos, "tan": math.tan,
        "sinh": math.sinh, "cosh": math.cosh,
        "_sign": lambda v: float((v > 0) - (v < 0)),
        "DomainError": DomainError,
    }
    counter = [0]

    def emit(node: Expr) -> str:
        got = index.get(node)
        if got is not None:
            return got
        if node.op == "num":
            name = f"c{counter[0]}"
            ns[name] = float(node.args[0])
        elif node.op == "sym":
            sname = node.args[0]
            if sname not in argnames:
                raise UnboundSymbolError(sname)
            index[node] = f"a[{argnames.index(sname)}]"
            return index[node]
        else:
            if node.op == "add":
                rhs = " + ".join(emit(c) for c in node.args)
            elif node.op == "mul":
                rhs = " * ".join(emit(c) for c in node.args)
            elif node.op == "pow":
                b, ex = node.args
                if _is_num(ex) and _numval(ex) == Fraction(2):
                    bb = emit(b)
                    rhs = f"{bb} * {bb}"
                elif _is_num(ex) and _numval(ex) == Fraction(-1):
                    bb = emit(b)
                    rhs = f"_pow({bb}, -1.0, '')"
                else:
                    rhs = f"_pow({emit(b)}, {emit(ex)}, '')"
            else:
                fname, arg = node.args
                aa = emit(arg)
                if fname in ("ln", "sqrt", "exp"):
                    rhs = f"_{fname}({aa}, '')"
                elif fname == "abs":
                    rhs = f"abs({aa})"
                elif fname == "sign":
                    rhs = f"_sign({aa})"
                else:
                    rhs = f"{fname}({aa})"
            name = f"v{counter[0]}"
            lines.append(f"    {name} = {rhs}")
            counter[0] += 1
            index[node] = name
            return name
        counter[0] += 1
        index[node] = name
        return name

    results = [emit(e) for e in exprs]
    src = "def _f(*a):\n" + "\n".join(lines or ["    pass"]) + \
          "\n    return (" + ", ".join(results) + ("," if len(results) == 1 else "") + ")\n"
    exec(compile(src, "<expr-compile>", "exec"), ns)
    return ns["_f"]  # type: ignore[return-value]


def compile_expr(e: Expr, argnames: Iterable[str]) -> Callable[..., float]:
    f = compile_exprs([e], argnames)
    return lambda *a: f(*a)[0]
