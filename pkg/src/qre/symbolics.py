"""A small symbolic expression engine for parametric resource counts.

Expressions are immutable trees built from constants, symbols and a fixed
set of operators. Python operators are overloaded, so cost formulas read like
ordinary arithmetic:

    >>> n = Symbol("n")
    >>> simplify(2 * n * n + n * 3)
    2*n^2 + 3*n

Constants are exact ``Fraction`` values unless a float enters the tree, after
which evaluation is approximate and comparisons use a relative tolerance.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

from qre.errors import DomainError, NotPolynomial, UnboundSymbol

Number = Union[int, Fraction, float]
ExprLike = Union["SymExpr", int, Fraction, float, str]

FLOAT_RTOL = 1e-9


class Mode(enum.Enum):
    """How rounding operators are treated.

    STRICT keeps ceil/floor. BOUNDS replaces them by their argument, which is
    what asymptotic reasoning (e.g. leading terms) wants.
    """

    STRICT = "strict"
    BOUNDS = "bounds"


def _num(x: Number) -> Number:
    if isinstance(x, bool):
        raise TypeError("booleans are not numeric constants")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, float)):
        return x
    raise TypeError(f"not a number: {x!r}")


def sym(x: ExprLike) -> "SymExpr":
    """Coerce a number or symbol name into an expression."""
    if isinstance(x, SymExpr):
        return x
    if isinstance(x, str):
        return Symbol(x)
    return Const(x)


def symbols(names: str) -> tuple["Symbol", ...]:
    return tuple(Symbol(s) for s in names.replace(",", " ").split())


class SymExpr:
    """Base class of all expression nodes."""

    __slots__ = ("_hash",)

    def children(self) -> tuple["SymExpr", ...]:
        return ()

    def rebuild(self, children: tuple["SymExpr", ...]) -> "SymExpr":
        return self

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, Fraction)) and not isinstance(other, bool):
            return isinstance(self, Const) and self.value == other
        if not isinstance(other, SymExpr):
            return NotImplemented
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("expressions are immutable")

    # arithmetic
    def __add__(self, other):
        return Add((self, sym(other)))

    def __radd__(self, other):
        return Add((sym(other), self))

    def __sub__(self, other):
        return Add((self, Mul((Const(-1), sym(other)))))

    def __rsub__(self, other):
        return Add((sym(other), Mul((Const(-1), self))))

    def __mul__(self, other):
        return Mul((self, sym(other)))

    def __rmul__(self, other):
        return Mul((sym(other), self))

    def __truediv__(self, other):
        return Mul((self, Pow(sym(other), Const(-1))))

    def __rtruediv__(self, other):
        return Mul((sym(other), Pow(self, Const(-1))))

    def __pow__(self, other):
        return Pow(self, sym(other))

    def __rpow__(self, other):
        return Pow(sym(other), self)

    def __neg__(self):
        return Mul((Const(-1), self))

    def __pos__(self):
        return self

    def __int__(self) -> int:
        v = evaluate(self)
        if isinstance(v, float):
            if not v.is_integer():
                raise ValueError(f"{self} is not an integer")
            return int(v)
        if v.denominator != 1:
            raise ValueError(f"{self} is not an integer")
        return int(v)

    def __float__(self) -> float:
        return float(evaluate(self))

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return to_text(self)

    @property
    def free_symbols(self) -> frozenset[str]:
        return free_symbols(self)

    def subs(self, mapping: Mapping[str, ExprLike]) -> "SymExpr":
        return subs(self, mapping)

    def evaluate(self, bindings: Mapping[str, Number] | None = None, mode: Mode = Mode.STRICT):
        return evaluate(self, bindings, mode)


class Const(SymExpr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        object.__setattr__(self, "value", _num(value))

    def _key(self):
        return (self.value,)

    def __hash__(self) -> int:
        return hash(self.value)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)


class Symbol(SymExpr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not name or not isinstance(name, str):
            raise ValueError("symbol names must be nonempty strings")
        object.__setattr__(self, "name", name)

    def _key(self):
        return (self.name,)


class _NAry(SymExpr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[ExprLike]):
        args = tuple(sym(a) for a in args)
        if not args:
            raise ValueError(f"{type(self).__name__} needs at least one argument")
        object.__setattr__(self, "args", args)

    def children(self):
        return self.args

    def rebuild(self, children):
        return type(self)(children)

    def _key(self):
        return self.args


class Add(_NAry):
    __slots__ = ()


class Mul(_NAry):
    __slots__ = ()


class Max(_NAry):
    __slots__ = ()


class Min(_NAry):
    __slots__ = ()


class Pow(SymExpr):
    __slots__ = ("base", "exp")

    def __init__(self, base: ExprLike, exp: ExprLike):
        object.__setattr__(self, "base", sym(base))
        object.__setattr__(self, "exp", sym(exp))

    def children(self):
        return (self.base, self.exp)

    def rebuild(self, children):
        return Pow(*children)

    def _key(self):
        return (self.base, self.exp)


class _Unary(SymExpr):
    __slots__ = ("arg",)

    def __init__(self, arg: ExprLike):
        object.__setattr__(self, "arg", sym(arg))

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return type(self)(children[0])

    def _key(self):
        return (self.arg,)


class Log2(_Unary):
    __slots__ = ()


class Ln(_Unary):
    __slots__ = ()


class Ceil(_Unary):
    __slots__ = ()


class Floor(_Unary):
    __slots__ = ()


# Constructors that read like math.


def log2(x: ExprLike) -> SymExpr:
    return Log2(x)


def ln(x: ExprLike) -> SymExpr:
    return Ln(x)


def ceil(x: ExprLike) -> SymExpr:
    return Ceil(x)


def floor(x: ExprLike) -> SymExpr:
    return Floor(x)


def smax(*xs: ExprLike) -> SymExpr:
    return Max(xs)


def smin(*xs: ExprLike) -> SymExpr:
    return Min(xs)


def bitsize(x: ExprLike) -> SymExpr:
    """Number of bits needed to index ``x`` items: ceil(log2(x))."""
    return Ceil(Log2(x))


PI = Const(math.pi)


# ---------------------------------------------------------------------------
# Evaluation


def _log2_exact(v: Fraction) -> Number:
    num, den = v.numerator, v.denominator
    if num & (num - 1) == 0 and den & (den - 1) == 0:
        return Fraction(num.bit_length() - den.bit_length())
    return math.log2(num) - math.log2(den)


def _pow(b: Number, e: Number) -> Number:
    if isinstance(e, Fraction) and e.denominator == 1:
        if b == 0 and e < 0:
            raise DomainError("zero raised to a negative power")
        if isinstance(b, Fraction):
            return b ** int(e)
        return float(b) ** int(e)
    if b < 0:
        raise DomainError("negative base with non-integer exponent")
    if b == 0:
        if e <= 0:
            raise DomainError("zero raised to a non-positive power")
        return Fraction(0) if isinstance(b, Fraction) else 0.0
    return float(b) ** float(e)


def _apply(node: SymExpr, vals: list[Number], mode: Mode) -> Number:
    if isinstance(node, Add):
        return sum(vals[1:], vals[0])
    if isinstance(node, Mul):
        out = vals[0]
        for v in vals[1:]:
            out = out * v
        return out
    if isinstance(node, Pow):
        return _pow(vals[0], vals[1])
    if isinstance(node, Max):
        return max(vals)
    if isinstance(node, Min):
        return min(vals)
    (v,) = vals
    if isinstance(node, Log2):
        if v <= 0:
            raise DomainError(f"log2 of non-positive value {v}")
        return _log2_exact(v) if isinstance(v, Fraction) else math.log2(v)
    if isinstance(node, Ln):
        if v <= 0:
            raise DomainError(f"ln of non-positive value {v}")
        return Fraction(0) if v == 1 and isinstance(v, Fraction) else math.log(v)
    if isinstance(node, (Ceil, Floor)):
        if mode is Mode.BOUNDS:
            return v
        r = math.ceil(v) if isinstance(node, Ceil) else math.floor(v)
        return Fraction(r)
    raise TypeError(f"unknown node {type(node).__name__}")


def evaluate(e: ExprLike, bindings: Mapping[str, Number] | None = None,
             mode: Mode = Mode.STRICT) -> Number:
    """Numeric value of ``e``; exact (a ``Fraction``) when no float is involved."""
    e = sym(e)
    bindings = bindings or {}
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Symbol):
        try:
            return _num(bindings[e.name])
        except KeyError:
            raise UnboundSymbol(e.name) from None
    vals = [evaluate(c, bindings, mode) for c in e.children()]
    return _apply(e, vals, mode)


def evaluate_int(e: ExprLike, bindings: Mapping[str, Number] | None = None) -> int:
    v = evaluate(e, bindings)
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(f"{e} evaluates to non-integer {v}")
        return int(v)
    if v.denominator != 1:
        raise ValueError(f"{e} evaluates to non-integer {v}")
    return int(v)


def approx_equal(a: Number, b: Number, rtol: float = FLOAT_RTOL) -> bool:
    """Exact equality for rationals, relative tolerance once a float is involved."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300) or a == b


def is_exact(e: SymExpr) -> bool:
    if isinstance(e, Const):
        return e.is_exact
    return all(is_exact(c) for c in e.children())


def free_symbols(e: ExprLike) -> frozenset[str]:
    e = sym(e)
    if isinstance(e, Symbol):
        return frozenset((e.name,))
    out: set[str] = set()
    for c in e.children():
        out |= free_symbols(c)
    return frozenset(out)


def is_constant(e: ExprLike) -> bool:
    return not free_symbols(e)


def subs(e: ExprLike, mapping: Mapping[str, ExprLike]) -> SymExpr:
    e = sym(e)
    if isinstance(e, Symbol):
        return sym(mapping[e.name]) if e.name in mapping else e
    kids = e.children()
    if not kids:
        return e
    return e.rebuild(tuple(subs(c, mapping) for c in kids))


def map_tree(e: SymExpr, fn: Callable[[SymExpr], SymExpr]) -> SymExpr:
    """Bottom-up rewrite."""
    kids = e.children()
    if kids:
        e = e.rebuild(tuple(map_tree(c, fn) for c in kids))
    return fn(e)


def drop_rounding(e: ExprLike) -> SymExpr:
    """Bounds-mode view of ``e``: ceil(x) and floor(x) become x."""
    return map_tree(sym(e), lambda n: n.arg if isinstance(n, (Ceil, Floor)) else n)


# ---------------------------------------------------------------------------
# Simplification

_RANK = {Const: 0, Symbol: 1, Pow: 2, Mul: 3, Add: 4, Log2: 5, Ln: 6, Ceil: 7, Floor: 8, Max: 9, Min: 10}


def _sort_key(e: SymExpr):
    return (_RANK[type(e)], to_text(e))


def _try_fold(node: SymExpr) -> SymExpr:
    try:
        return Const(evaluate(node))
    except DomainError:
        return node


def _split_power(f: SymExpr) -> tuple[SymExpr, SymExpr]:
    if isinstance(f, Pow):
        return f.base, f.exp
    return f, Const(1)


def _split_coef(t: SymExpr) -> tuple[Number, SymExpr]:
    if isinstance(t, Mul) and isinstance(t.args[0], Const):
        rest = t.args[1:]
        return t.args[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), t


def _simplify_add(terms: tuple[SymExpr, ...]) -> SymExpr:
    flat: list[SymExpr] = []
    for t in terms:
        flat.extend(t.args if isinstance(t, Add) else (t,))
    const: Number = Fraction(0)
    coefs: dict[SymExpr, Number] = {}
    for t in flat:
        if isinstance(t, Const):
            const = const + t.value
            continue
        c, mono = _split_coef(t)
        coefs[mono] = coefs.get(mono, 0) + c
    rest = []
    for mono, c in coefs.items():
        if c == 0:
            continue
        rest.append(mono if c == 1 else _simplify_mul((Const(c), mono)))
    if const != 0 or not rest:
        rest.append(Const(const))
    if len(rest) == 1:
        return rest[0]
    return Add(tuple(sorted(rest, key=_sort_key)))


def _simplify_mul(factors: tuple[SymExpr, ...]) -> SymExpr:
    flat: list[SymExpr] = []
    for f in factors:
        flat.extend(f.args if isinstance(f, Mul) else (f,))
    const: Number = Fraction(1)
    exps: dict[SymExpr, list[SymExpr]] = {}
    order: list[SymExpr] = []
    for f in flat:
        if isinstance(f, Const):
            const = const * f.value
            continue
        base, exp = _split_power(f)
        if base not in exps:
            exps[base] = []
            order.append(base)
        exps[base].append(exp)
    if const == 0:
        return Const(const)
    if len(order) == 1 and const != 1 and isinstance(order[0], Add) and exps[order[0]] == [Const(1)]:
        return _simplify_add(tuple(_simplify_mul((Const(const), t)) for t in order[0].args))
    rest = []
    for base in order:
        es = exps[base]
        exp = es[0] if len(es) == 1 else simplify_once(Add(tuple(es)))
        if exp == 0:
            continue
        rest.append(base if exp == 1 else Pow(base, exp))
    if const != 1 or not rest:
        rest.insert(0, Const(const))
    if len(rest) == 1:
        return rest[0]
    rest.sort(key=_sort_key)
    return Mul(tuple(rest))


def _simplify_minmax(node: _NAry) -> SymExpr:
    kind = type(node)
    flat: list[SymExpr] = []
    for a in node.args:
        flat.extend(a.args if isinstance(a, kind) else (a,))
    consts = [a.value for a in flat if isinstance(a, Const)]
    rest = sorted(set(a for a in flat if not isinstance(a, Const)), key=_sort_key)
    if consts:
        rest.insert(0, Const(max(consts) if kind is Max else min(consts)))
    if len(rest) == 1:
        return rest[0]
    return kind(tuple(rest))


def simplify_once(e: SymExpr) -> SymExpr:
    kids = e.children()
    if not kids:
        return e
    kids = tuple(simplify_once(c) for c in kids)
    if isinstance(e, Add):
        return _simplify_add(kids)
    if isinstance(e, Mul):
        return _simplify_mul(kids)
    if isinstance(e, (Max, Min)):
        return _simplify_minmax(type(e)(kids))
    node = e.rebuild(kids)
    if all(isinstance(k, Const) for k in kids):
        return _try_fold(node)
    if isinstance(node, Pow):
        if node.exp == 1:
            return node.base
        if node.exp == 0:
            return Const(1)
        if node.base == 1:
            return Const(1)
        if _is_integer_const(node.exp):
            # (a b)^k = a^k b^k and (a^m)^k = a^(m k) for integer k
            if isinstance(node.base, Mul):
                return _simplify_mul(tuple(Pow(f, node.exp) for f in node.base.args))
            if isinstance(node.base, Pow):
                return Pow(node.base.base, _simplify_mul((node.base.exp, node.exp)))
    if isinstance(node, (Ceil, Floor)) and isinstance(node.arg, (Ceil, Floor)):
        return node.arg
    return node


def _is_integer_const(e: SymExpr) -> bool:
    return isinstance(e, Const) and e.value == int(e.value)


def simplify(e: ExprLike) -> SymExpr:
    """Constant folding, flattening of sums/products and x^a*x^b -> x^(a+b).

    Iterates to a fixed point, so ``simplify`` is idempotent.
    """
    e = sym(e)
    for _ in range(64):
        nxt = simplify_once(e)
        if nxt == e:
            return nxt
        e = nxt
    return e


def _factor_exps(t: SymExpr) -> tuple[Number, dict[SymExpr, SymExpr]]:
    c, mono = _split_coef(t)
    factors = mono.args if isinstance(mono, Mul) else (mono,)
    out: dict[SymExpr, SymExpr] = {}
    for f in factors:
        base, exp = _split_power(f)
        out[base] = exp
    return c, out


def factor_terms(e: ExprLike) -> SymExpr:
    """Pull factors shared by every term of a top-level sum out in front.

    A factor is shared when the same base appears with the same exponent in
    every term. The numeric coefficient of smallest magnitude is pulled out
    too when it divides every other coefficient to an integer.
    """
    e = simplify(e)
    if not isinstance(e, Add):
        return e
    split = [_factor_exps(t) for t in e.args]
    common = {b: x for b, x in split[0][1].items()
              if all(parts.get(b) == x for _, parts in split[1:])}
    coefs = [c for c, _ in split]
    c0 = min(coefs, key=abs)
    ratios = [c / c0 for c in coefs]
    if c0 == 0 or not all(r == int(r) for r in ratios):
        c0, ratios = Fraction(1), coefs
    if not common and c0 == 1:
        return e
    inner = []
    for r, (_, parts) in zip(ratios, split):
        rest = [b if x == 1 else Pow(b, x) for b, x in parts.items() if b not in common]
        inner.append(_simplify_mul((Const(int(r) if r == int(r) else r), *rest)))
    outer = [b if x == 1 else Pow(b, x) for b, x in common.items()]
    factors = sorted(outer + [_simplify_add(tuple(inner))], key=_sort_key)
    return Mul(tuple(([Const(c0)] if c0 != 1 else []) + factors))


# ---------------------------------------------------------------------------
# Polynomial view


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            out[k] = out[k] + va * vb if k in out else va * vb
    return out


def _as_poly(e: SymExpr, s: str, mode: Mode) -> dict[Fraction, SymExpr]:
    if s not in free_symbols(e):
        return {Fraction(0): e}
    if isinstance(e, Symbol):
        return {Fraction(1): Const(1)}
    if isinstance(e, Add):
        out: dict = {}
        for t in e.args:
            out = _poly_add(out, _as_poly(t, s, mode))
        return out
    if isinstance(e, Mul):
        out = {Fraction(0): Const(1)}
        for f in e.args:
            out = _poly_mul(out, _as_poly(f, s, mode))
        return out
    if isinstance(e, Pow):
        if s in free_symbols(e.exp) or not isinstance(simplify(e.exp), Const):
            raise NotPolynomial(f"exponent of {e} depends on {s}")
        q = simplify(e.exp).value
        if isinstance(q, float):
            q = Fraction(q).limit_denominator(10**9)
        base = _as_poly(e.base, s, mode)
        nonzero = {k: v for k, v in base.items() if simplify(v) != 0}
        if len(nonzero) == 1:
            ((k, c),) = nonzero.items()
            return {k * q: Pow(c, Const(q))}
        if q.denominator == 1 and q >= 0:
            out = {Fraction(0): Const(1)}
            for _ in range(int(q)):
                out = _poly_mul(out, base)
            return out
        raise NotPolynomial(f"{e} is not polynomial in {s}")
    if isinstance(e, (Ceil, Floor)) and mode is Mode.BOUNDS:
        return _as_poly(e.arg, s, mode)
    raise NotPolynomial(f"{type(e).__name__} of {s} is not polynomial")


def leading_term(e: ExprLike, s: ExprLike, mode: Mode = Mode.BOUNDS) -> tuple[SymExpr, Fraction]:
    """Coefficient and degree of the highest power of ``s`` in ``e``.

    Rounding is dropped by default (bounds mode); pass ``Mode.STRICT`` to
    refuse expressions where ceil/floor wrap ``s``.
    """
    name = s.name if isinstance(s, Symbol) else str(s)
    poly = _as_poly(simplify(e), name, mode)
    for deg in sorted(poly, reverse=True):
        coef = simplify(poly[deg])
        if coef != 0:
            return coef, deg
    return Const(0), Fraction(0)


# ---------------------------------------------------------------------------
# Rendering

_PREC = {Add: 1, Mul: 2, Pow: 3}


def _fmt_const(v: Number) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(v)


def _neg_coef(t: SymExpr):
    """Split a term with a negative leading constant into (positive term)."""
    if isinstance(t, Const) and t.value < 0:
        return Const(-t.value)
    if isinstance(t, Mul) and isinstance(t.args[0], Const) and t.args[0].value < 0:
        c = -t.args[0].value
        rest = t.args[1:]
        if c == 1:
            return rest[0] if len(rest) == 1 else Mul(rest)
        return Mul((Const(c),) + rest)
    return None


def to_text(e: ExprLike) -> str:
    e = sym(e)
    return _text(e, 0)


def _text(e: SymExpr, parent: int) -> str:
    if isinstance(e, Const):
        s = _fmt_const(e.value)
        needs = parent > 0 and (e.value < 0 or (isinstance(e.value, Fraction) and e.value.denominator != 1))
        return f"({s})" if needs else s
    if isinstance(e, Symbol):
        return e.name
    prec = _PREC.get(type(e), 4)
    if isinstance(e, Add):
        args = [a for a in e.args if not isinstance(a, Const)] + [a for a in e.args if isinstance(a, Const)]
        parts = [_text(args[0], prec)]
        for t in args[1:]:
            neg = _neg_coef(t)
            parts.append(f"- {_text(neg, prec)}" if neg is not None else f"+ {_text(t, prec)}")
        s = " ".join(parts)
    elif isinstance(e, Mul):
        num, den = [], []
        for f in e.args:
            if isinstance(f, Pow) and isinstance(f.exp, Const) and f.exp.value < 0:
                inv = f.base if f.exp.value == -1 else Pow(f.base, Const(-f.exp.value))
                den.append(_text(inv, prec + 1))
            else:
                num.append(_text(f, prec))
        s = "*".join(num) if num else "1"
        if den:
            s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    elif isinstance(e, Pow):
        s = f"{_text(e.base, prec + 1)}^{_text(e.exp, prec + 1)}"
    elif isinstance(e, (Max, Min)):
        name = "max" if isinstance(e, Max) else "min"
        s = f"{name}({', '.join(_text(a, 0) for a in e.args)})"
    else:
        name = {Log2: "log2", Ln: "ln", Ceil: "ceil", Floor: "floor"}[type(e)]
        s = f"{name}({_text(e.arg, 0)})"
    return f"({s})" if prec < parent else s


def to_latex(e: ExprLike) -> str:
    return _latex(sym(e), 0)


def _latex(e: SymExpr, parent: int) -> str:
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, Fraction) and v.denominator != 1:
            s = rf"\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"
            s = "-" + s if v < 0 else s
        elif isinstance(v, float) and v == math.pi:
            s = r"\pi"
        else:
            s = _fmt_const(v)
        return f"\\left({s}\\right)" if parent > 0 and v < 0 else s
    if isinstance(e, Symbol):
        return e.name
    prec = _PREC.get(type(e), 4)
    if isinstance(e, Add):
        args = [a for a in e.args if not isinstance(a, Const)] + [a for a in e.args if isinstance(a, Const)]
        parts = [_latex(args[0], prec)]
        for t in args[1:]:
            neg = _neg_coef(t)
            parts.append(f"- {_latex(neg, prec)}" if neg is not None else f"+ {_latex(t, prec)}")
        s = " ".join(parts)
    elif isinstance(e, Mul):
        num, den = [], []
        for f in e.args:
            if isinstance(f, Pow) and isinstance(f.exp, Const) and f.exp.value < 0:
                den.append(f.base if f.exp.value == -1 else Pow(f.base, Const(-f.exp.value)))
            else:
                num.append(f)
        top = " ".join(_latex(f, prec) for f in num) if num else "1"
        if den:
            bottom = " ".join(_latex(f, prec) for f in den)
            s = rf"\frac{{{top}}}{{{bottom}}}"
        else:
            s = top
    elif isinstance(e, Pow):
        s = f"{_latex(e.base, prec + 1)}^{{{_latex(e.exp, 0)}}}"
    elif isinstance(e, (Max, Min)):
        name = r"\max" if isinstance(e, Max) else r"\min"
        s = f"{name}\\left({', '.join(_latex(a, 0) for a in e.args)}\\right)"
    elif isinstance(e, Log2):
        s = rf"\log_2\left({_latex(e.arg, 0)}\right)"
    elif isinstance(e, Ln):
        s = rf"\ln\left({_latex(e.arg, 0)}\right)"
    elif isinstance(e, Ceil):
        s = rf"\left\lceil {_latex(e.arg, 0)} \right\rceil"
    else:
        s = rf"\left\lfloor {_latex(e.arg, 0)} \right\rfloor"
    return f"\\left({s}\\right)" if prec < parent else s
