"""Sparse Laurent polynomials and subtraction-free rational functions.

Coefficients are ``fractions.Fraction``.  A ``PositiveRational`` is a pair of
Laurent polynomials with strictly positive coefficients; arithmetic on it
never subtracts and never cancels common factors.
"""
from __future__ import annotations

import cmath
import json
import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

ExpVec = tuple  # tuple[int, ...]
Number = Union[int, Fraction]


class AlgebraError(Exception):
    pass


class NotDivisible(AlgebraError):
    pass


class DenominatorZero(AlgebraError):
    pass


class ArityMismatch(AlgebraError):
    pass


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c.strip())
    if isinstance(c, float):
        raise TypeError("float coefficients are not exact")
    return Fraction(c)


def _vadd(a: ExpVec, b: ExpVec) -> ExpVec:
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a: ExpVec, b: ExpVec) -> ExpVec:
    return tuple(x - y for x, y in zip(a, b))


class LaurentPolynomial:
    """Finite sum of c * x^e with e an integer vector of length ``nvars``."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable = ()):
        self.nvars = int(nvars)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            if len(e) != self.nvars:
                raise ArityMismatch(f"exponent {e} has wrong length for {nvars} variables")
            acc[e] = acc.get(e, Fraction(0)) + _frac(c)
        self._terms = {e: c for e, c in sorted(acc.items(), reverse=True) if c != 0}
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPolynomial":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c: Number = 1) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars: int) -> "LaurentPolynomial":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int, power: int = 1) -> "LaurentPolynomial":
        e = [0] * nvars
        e[i] = power
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Number = 1) -> "LaurentPolynomial":
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "LaurentPolynomial":
        # terms already clean (nonzero, right length); only sorts
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = dict(sorted(terms.items(), reverse=True))
        p._hash = None
        return p

    # basic access
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def exponents(self) -> list:
        return list(self._terms)

    def coeff(self, e: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_positive(self) -> bool:
        return bool(self._terms) and all(c > 0 for c in self._terms.values())

    def leading_term(self) -> tuple:
        e = next(iter(self._terms))
        return e, self._terms[e]

    def bounds(self) -> tuple:
        """Per-variable (min, max) exponent."""
        es = list(self._terms)
        lo = tuple(min(e[i] for e in es) for i in range(self.nvars))
        hi = tuple(max(e[i] for e in es) for i in range(self.nvars))
        return lo, hi

    # arithmetic
    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            if other.nvars != self.nvars:
                raise ArityMismatch("polynomials live in different rings")
            return other
        return LaurentPolynomial.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            v = acc.get(e, 0) + c
            if v:
                acc[e] = v
            else:
                acc.pop(e, None)
        return LaurentPolynomial._raw(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        acc: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = _vadd(e1, e2)
                acc[e] = acc.get(e, 0) + c1 * c2
        return LaurentPolynomial._raw(self.nvars, {e: c for e, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            if not self.is_monomial():
                raise NotDivisible("negative power of a non-monomial")
            (e, c), = self._terms.items()
            return LaurentPolynomial._raw(self.nvars, {tuple(k * v for v in e): Fraction(1) / c ** (-k)})
        result = LaurentPolynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, e: Sequence[int], c: Number = 1) -> "LaurentPolynomial":
        """Multiply by the monomial c x^e."""
        c = _frac(c)
        e = tuple(e)
        return LaurentPolynomial._raw(self.nvars, {_vadd(k, e): v * c for k, v in self._terms.items()})

    def scale(self, c: Number) -> "LaurentPolynomial":
        c = _frac(c)
        if c == 0:
            return LaurentPolynomial.zero(self.nvars)
        return LaurentPolynomial._raw(self.nvars, {k: v * c for k, v in self._terms.items()})

    def diff(self, i: int) -> "LaurentPolynomial":
        acc = {}
        for e, c in self._terms.items():
            if e[i]:
                acc[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        return LaurentPolynomial._raw(self.nvars, acc)

    def embed(self, nvars: int, positions: Sequence[int]) -> "LaurentPolynomial":
        """Re-index variables: old variable k becomes new variable positions[k]."""
        acc = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for k, v in enumerate(e):
                ne[positions[k]] += v
            acc[tuple(ne)] = c
        return LaurentPolynomial._raw(nvars, acc)

    def compose(self, comps: Sequence) -> object:
        """Evaluate in any commutative ring: comps are ring elements (with inverses for
        negative exponents)."""
        if len(comps) != self.nvars:
            raise ArityMismatch("wrong number of substitutions")
        result = None
        for e, c in self._terms.items():
            t = None
            for v, k in zip(comps, e):
                if k:
                    f = v ** k
                    t = f if t is None else t * f
            term = c if t is None else t * c
            result = term if result is None else result + term
        return result

    # comparison
    def __eq__(self, other):
        if isinstance(other, LaurentPolynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPolynomial.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self._terms.items())))
        return self._hash

    # evaluation
    def evaluate(self, point: Sequence):
        """Evaluate at a point with nonzero coordinates (Fractions or complex)."""
        if len(point) != self.nvars:
            raise ArityMismatch("point has wrong dimension")
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        return total

    def log_eval(self, w: np.ndarray) -> complex:
        """log p(exp(w)) for complex w, via a stabilised sum of exponentials."""
        if not self._terms:
            raise DenominatorZero("log of the zero polynomial")
        E = np.array(list(self._terms), dtype=float).reshape(len(self._terms), self.nvars)
        logc = np.array([_logc(c) for c in self._terms.values()], dtype=complex)
        v = logc + E @ np.asarray(w, dtype=complex)
        m = np.max(v.real)
        s = np.sum(np.exp(v - m))
        if s == 0:
            raise DenominatorZero("cancellation to zero in log evaluation")
        return m + cmath.log(s)

    # text and json
    def to_text(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or default_names(self.nvars)
        parts = []
        for e, c in self._terms.items():
            factors = [f"{names[i]}" if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k]
            cs = str(c)
            if factors:
                if c == 1:
                    body = "*".join(factors)
                elif c == -1:
                    body = "-" + "*".join(factors)
                else:
                    body = cs + "*" + "*".join(factors)
            else:
                body = cs
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"LaurentPolynomial({self.to_text()})"

    __str__ = to_text

    def to_json(self) -> dict:
        return {"nvars": self.nvars,
                "terms": [{"e": list(e), "c": str(c)} for e, c in self._terms.items()]}

    @classmethod
    def from_json(cls, obj) -> "LaurentPolynomial":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["nvars"], [(t["e"], Fraction(str(t["c"]))) for t in obj["terms"]])

    @classmethod
    def from_text(cls, text: str, names: Sequence[str]) -> "LaurentPolynomial":
        """Parse the canonical ``c*x1^a*x2^b + ...`` format."""
        index = {n: i for i, n in enumerate(names)}
        n = len(names)
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls.zero(n)
        if s[0] not in "+-":
            s = "+" + s
        # split at signs that begin a term (not inside an exponent)
        chunks = re.findall(r"[+-](?:[^+\-^]|\^-?\d+)+", s)
        if "".join(chunks) != s:
            raise ValueError(f"cannot parse polynomial {text!r}")
        acc = []
        for ch in chunks:
            sign = -1 if ch[0] == "-" else 1
            c = Fraction(sign)
            e = [0] * n
            for f in ch[1:].split("*"):
                if "^" in f:
                    base, k = f.split("^")
                    k = int(k)
                else:
                    base, k = f, 1
                if base in index:
                    e[index[base]] += k
                else:
                    c *= Fraction(base) ** k
            acc.append((e, c))
        return cls(n, acc)


def _logc(c: Fraction) -> complex:
    if c > 0:
        return math.log(c.numerator) - math.log(c.denominator)
    return complex(math.log(-c.numerator) - math.log(c.denominator), math.pi)


def default_names(n: int) -> list:
    return ["x"] if n == 1 else [f"x{i + 1}" for i in range(n)]


def poly_divide_exact(p: LaurentPolynomial, q: LaurentPolynomial) -> LaurentPolynomial:
    """Return r with p == q*r, or raise NotDivisible.

    Lex leading-term division; any quotient term must lie in the exponent box
    [lo(p) - lo(q), hi(p) - hi(q)], which bounds the loop.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.nvars != q.nvars:
        raise ArityMismatch("polynomials live in different rings")
    if p.is_zero():
        return p
    lp, hp = p.bounds()
    lq, hq = q.bounds()
    lo, hi = _vsub(lp, lq), _vsub(hp, hq)
    if any(a > b for a, b in zip(lo, hi)):
        raise NotDivisible("Newton polytope of divisor does not fit")
    qe, qc = q.leading_term()
    rem = p
    quot: dict = {}
    while not rem.is_zero():
        e, c = rem.leading_term()
        d = _vsub(e, qe)
        if any(x < a or x > b for x, a, b in zip(d, lo, hi)):
            raise NotDivisible("non-zero remainder")
        k = c / qc
        quot[d] = quot.get(d, 0) + k
        rem = rem - q.shift(d, k)
    return LaurentPolynomial(p.nvars, quot)


class PositiveRational:
    """num/den with both sides coefficient-positive.  Never cancels."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPolynomial, den: LaurentPolynomial | None = None):
        if den is None:
            den = LaurentPolynomial.one(num.nvars)
        if num.nvars != den.nvars:
            raise ArityMismatch("numerator and denominator in different rings")
        if not num.is_positive() or not den.is_positive():
            raise ValueError("PositiveRational needs nonzero coefficient-positive num and den")
        self.num = num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def const(cls, nvars: int, c: Number = 1) -> "PositiveRational":
        return cls(LaurentPolynomial.const(nvars, c))

    @classmethod
    def var(cls, nvars: int, i: int) -> "PositiveRational":
        return cls(LaurentPolynomial.var(nvars, i))

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Number = 1) -> "PositiveRational":
        exp = tuple(exp)
        pos = tuple(max(v, 0) for v in exp)
        neg = tuple(max(-v, 0) for v in exp)
        return cls(LaurentPolynomial.monomial(pos, c), LaurentPolynomial.monomial(neg))

    def _check(self, other: "PositiveRational") -> "PositiveRational":
        if isinstance(other, (int, Fraction)):
            return PositiveRational.const(self.nvars, other)
        if other.nvars != self.nvars:
            raise ArityMismatch("rational functions over different variable sets")
        return other

    def __add__(self, other):
        other = self._check(other)
        if self.den == other.den:
            return PositiveRational(self.num + other.num, self.den)
        return PositiveRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __mul__(self, other):
        other = self._check(other)
        return PositiveRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        return PositiveRational(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._check(other) / self

    def inv(self) -> "PositiveRational":
        return PositiveRational(self.den, self.num)

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return PositiveRational(self.den ** (-k), self.num ** (-k))
        return PositiveRational(self.num ** k, self.den ** k)

    def equals(self, other: "PositiveRational") -> bool:
        """Equality as rational functions (cross-multiplication)."""
        other = self._check(other)
        return self.num * other.den == other.num * self.den

    def __eq__(self, other):
        if isinstance(other, PositiveRational):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def strip_monomial_content(self) -> "PositiveRational":
        """Explicitly move the monomial factor x^min of num and den out; keeps positivity."""
        ln, _ = self.num.bounds()
        ld, _ = self.den.bounds()
        m = tuple(min(a, b) for a, b in zip(ln, ld))
        neg = tuple(-v for v in m)
        num, den = self.num.shift(neg), self.den.shift(neg)
        if den.is_monomial():
            e, c = den.leading_term()
            return PositiveRational(num.shift(tuple(-v for v in e), 1 / c))
        return PositiveRational(num, den)

    def reduce(self) -> LaurentPolynomial:
        """The Laurent polynomial equal to num/den, or NotDivisible."""
        return poly_divide_exact(self.num, self.den)

    def evaluate(self, point: Sequence, mode: str = "exact"):
        if mode == "exact":
            pt = [_frac(x) for x in point]
            if any(x <= 0 for x in pt):
                raise ValueError("exact evaluation needs strictly positive rationals")
            return self.num.evaluate(pt) / self.den.evaluate(pt)
        pt = [complex(x) for x in point]
        d = self.den.evaluate(pt)
        if d == 0:
            raise DenominatorZero("denominator vanishes at the point")
        return complex(self.num.evaluate(pt)) / complex(d)

    def log_eval(self, w) -> complex:
        return self.num.log_eval(w) - self.den.log_eval(w)

    def __repr__(self):
        return f"PositiveRational(({self.num.to_text()}) / ({self.den.to_text()}))"

    def to_text(self, names=None) -> str:
        return f"({self.num.to_text(names)})/({self.den.to_text(names)})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj) -> "PositiveRational":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(LaurentPolynomial.from_json(obj["num"]), LaurentPolynomial.from_json(obj["den"]))


class SignedPositiveSum:
    """f = plus - minus; a side set to None is absent."""

    __slots__ = ("plus", "minus")

    def __init__(self, plus: PositiveRational | None, minus: PositiveRational | None = None):
        if plus is None and minus is None:
            raise ValueError("at least one side must be present")
        self.plus = plus
        self.minus = minus

    @property
    def nvars(self) -> int:
        return (self.plus or self.minus).nvars

    def evaluate(self, point, mode: str = "exact"):
        a = self.plus.evaluate(point, mode) if self.plus is not None else 0
        b = self.minus.evaluate(point, mode) if self.minus is not None else 0
        return a - b

    def __repr__(self):
        return f"SignedPositiveSum(+{self.plus!r}, -{self.minus!r})"


def pr_arith(op: str, f: PositiveRational, g: PositiveRational) -> PositiveRational:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown operation {op!r}")


def evaluate(f, point, mode: str = "exact"):
    if mode not in ("exact", "complex"):
        raise ValueError("mode must be 'exact' or 'complex'")
    return f.evaluate(point, mode)


def _subst_poly(p: LaurentPolynomial, comps: Sequence[PositiveRational], cache: dict) -> tuple:
    """p o comps as (P, Q) with P, Q positive; p must be coefficient-positive."""
    n = comps[0].nvars
    lo, hi = p.bounds()

    def pw(kind, i, k):
        key = (kind, i, k)
        if key not in cache:
            base = comps[i].num if kind == "N" else comps[i].den
            cache[key] = base ** k
        return cache[key]

    P = LaurentPolynomial.zero(n)
    for e, c in p.items():
        t = LaurentPolynomial.const(n, c)
        for i, a in enumerate(e):
            if a - lo[i]:
                t = t * pw("N", i, a - lo[i])
            if hi[i] - a:
                t = t * pw("D", i, hi[i] - a)
        P = P + t
    Fn = LaurentPolynomial.one(n)
    Fd = LaurentPolynomial.one(n)
    for i in range(len(comps)):
        if lo[i] > 0:
            Fn = Fn * pw("N", i, lo[i])
        elif lo[i] < 0:
            Fd = Fd * pw("N", i, -lo[i])
        if hi[i] > 0:
            Fd = Fd * pw("D", i, hi[i])
        elif hi[i] < 0:
            Fn = Fn * pw("D", i, -hi[i])
    return P * Fn, Fd


def substitute(f: PositiveRational, comps: Sequence[PositiveRational]) -> PositiveRational:
    """f o comps, built without subtraction."""
    if len(comps) != f.nvars:
        raise ArityMismatch(f"expected {f.nvars} components, got {len(comps)}")
    if not comps:
        raise ArityMismatch("empty substitution")
    n = comps[0].nvars
    if any(c.nvars != n for c in comps):
        raise ArityMismatch("components over different variable sets")
    cache: dict = {}
    P1, Q1 = _subst_poly(f.num, comps, cache)
    P2, Q2 = _subst_poly(f.den, comps, cache)
    return PositiveRational(P1 * Q2, Q1 * P2)


# --- subtraction-free expression parser -------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(s: str) -> list:
    out = []
    for num, name, op in _TOKEN.findall(s):
        if num:
            out.append(("num", num))
        elif name:
            out.append(("name", name))
        elif op.strip():
            out.append(("op", op))
    return out


def _natural_key(name: str):
    m = re.match(r"([A-Za-z_]+)(\d*)$", name)
    if m:
        return (m.group(1), int(m.group(2) or 0))
    return (name, 0)


def parse_positive(text: str, names: Sequence[str] | None = None) -> tuple:
    """Parse a subtraction-free expression such as ``(x^3+1)/(x+1)``.

    Returns ``(PositiveRational, names)``; variables default to the sorted set of
    identifiers appearing in the text.
    """
    toks = _tokenize(text)
    if names is None:
        names = sorted({v for k, v in toks if k == "name"}, key=_natural_key)
    names = list(names)
    index = {v: i for i, v in enumerate(names)}
    n = len(names)
    if n == 0:
        raise ValueError("expression has no variables")
    pos = [0]

    def peek():
        return toks[pos[0]] if pos[0] < len(toks) else ("end", "")

    def take(expect=None):
        t = peek()
        if expect is not None and t != ("op", expect):
            raise ValueError(f"expected {expect!r} in {text!r}, got {t[1]!r}")
        pos[0] += 1
        return t

    def expr():
        v = term()
        while peek() == ("op", "+"):
            take()
            v = v + term()
        return v

    def term():
        v = power()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            w = power()
            v = v * w if op == "*" else v / w
        return v

    def power():
        v = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            k = take()
            if k[0] != "num" or "/" in k[1]:
                raise ValueError("exponent must be an integer")
            v = v ** (sign * int(k[1]))
        return v

    def atom():
        t = take()
        if t == ("op", "("):
            v = expr()
            take(")")
            return v
        if t[0] == "num":
            c = Fraction(t[1])
            if c <= 0:
                raise ValueError("coefficients must be positive")
            return PositiveRational.const(n, c)
        if t[0] == "name":
            if t[1] not in index:
                raise ValueError(f"unknown variable {t[1]!r}")
            return PositiveRational.var(n, index[t[1]])
        raise ValueError(f"unexpected token {t[1]!r} in {text!r} (subtraction is not allowed)")

    v = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in {text!r}")
    return v, names
