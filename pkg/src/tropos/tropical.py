"""Tropicalization of positive rational maps (max convention)."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_algebra import PositiveRational, LaurentPolynomial
from .lp import interior_point

LinearForm = tuple


class DimensionMismatch(ValueError):
    pass


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def _prune(forms: set) -> frozenset:
    """Drop forms that are never a strict maximum (only when the set is big)."""
    if len(forms) <= 6:
        return frozenset(forms)
    keep = []
    fl = sorted(forms)
    for f in fl:
        others = [tuple(g[i] - f[i] for i in range(len(f))) for g in fl if g != f]
        if interior_point(others) is not None:
            keep.append(f)
    return frozenset(keep)


@dataclass(frozen=True)
class TropPolynomial:
    forms: frozenset

    def __init__(self, forms):
        fs = frozenset(tuple(f) for f in forms)
        if not fs:
            raise ValueError("a tropical polynomial needs at least one form")
        object.__setattr__(self, "forms", fs)

    @property
    def dim(self) -> int:
        return len(next(iter(self.forms)))

    def __call__(self, xi):
        return max(_dot(f, xi) for f in self.forms)

    def __add__(self, other: "TropPolynomial") -> "TropPolynomial":
        s = {tuple(a + b for a, b in zip(f, g)) for f in self.forms for g in other.forms}
        return TropPolynomial(_prune(s))

    def scale(self, k: int) -> "TropPolynomial":
        # k >= 0
        if k == 0:
            return TropPolynomial([(0,) * self.dim])
        return TropPolynomial({tuple(k * v for v in f) for f in self.forms})

    def join(self, other: "TropPolynomial") -> "TropPolynomial":
        return TropPolynomial(self.forms | other.forms)

    def sorted_forms(self) -> list:
        return sorted(self.forms, reverse=True)

    @classmethod
    def linear(cls, f) -> "TropPolynomial":
        return cls([tuple(f)])


@dataclass(frozen=True)
class TropRational:
    pos: TropPolynomial
    neg: TropPolynomial

    @property
    def dim(self) -> int:
        return self.pos.dim

    def __call__(self, xi):
        if len(xi) != self.dim:
            raise DimensionMismatch(f"point of dimension {len(xi)} for a map on {self.dim} variables")
        return self.pos(xi) - self.neg(xi)

    def to_json(self) -> dict:
        return {"pos": [list(map(_jnum, f)) for f in self.pos.sorted_forms()],
                "neg": [list(map(_jnum, f)) for f in self.neg.sorted_forms()]}

    @classmethod
    def from_json(cls, obj) -> "TropRational":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(TropPolynomial(obj["pos"]), TropPolynomial(obj["neg"]))

    def to_text(self, names=None) -> str:
        names = names or [f"xi{i + 1}" for i in range(self.dim)]
        return f"{_poly_text(self.pos, names)} - {_poly_text(self.neg, names)}"


def _jnum(v):
    v = Fraction(v)
    return int(v) if v.denominator == 1 else str(v)


def _form_text(f, names) -> str:
    parts = []
    for c, n in zip(f, names):
        if c == 0:
            continue
        s = n if abs(c) == 1 else f"{abs(c)}*{n}"
        parts.append(("-" if c < 0 else "+") + s)
    if not parts:
        return "0"
    out = "".join(parts)
    return out[1:] if out[0] == "+" else out


def _poly_text(p: TropPolynomial, names) -> str:
    fs = [_form_text(f, names) for f in p.sorted_forms()]
    return fs[0] if len(fs) == 1 else "max(" + ", ".join(fs) + ")"


@dataclass(frozen=True)
class PLMap:
    comps: tuple

    def __init__(self, comps: Sequence[TropRational]):
        comps = tuple(comps)
        if not comps:
            raise ValueError("empty PL map")
        d = comps[0].dim
        if any(c.dim != d for c in comps):
            raise DimensionMismatch("components have different domain dimensions")
        object.__setattr__(self, "comps", comps)

    @property
    def domain_dim(self) -> int:
        return self.comps[0].dim

    @property
    def codomain_dim(self) -> int:
        return len(self.comps)

    def __call__(self, xi) -> tuple:
        return tuple(c(xi) for c in self.comps)

    @classmethod
    def identity(cls, n: int) -> "PLMap":
        return cls([linear_trop(tuple(int(i == j) for j in range(n))) for i in range(n)])

    def to_json(self) -> list:
        return [c.to_json() for c in self.comps]


def linear_trop(f) -> TropRational:
    d = len(f)
    return TropRational(TropPolynomial.linear(f), TropPolynomial.linear((0,) * d))


def trop_poly(p: LaurentPolynomial) -> TropPolynomial:
    if not p.is_positive():
        raise ValueError("tropicalization needs a coefficient-positive polynomial")
    return TropPolynomial(p.exponents())


def tropicalize(f: PositiveRational) -> TropRational:
    return TropRational(trop_poly(f.num), trop_poly(f.den))


def tropicalize_map(fs: Sequence[PositiveRational]) -> PLMap:
    return PLMap([tropicalize(f) for f in fs])


def trop_eval(T: TropRational | PLMap, xi) -> object:
    xi = [Fraction(v) for v in xi]
    if isinstance(T, PLMap):
        if len(xi) != T.domain_dim:
            raise DimensionMismatch("point has wrong dimension")
    return T(xi)


def _compose_poly(p: TropPolynomial, G: PLMap) -> tuple:
    """p o G as (X, Y) with p o G = X - Y."""
    d = G.domain_dim
    zero = TropPolynomial([(0,) * d])

    def lin(a):
        X, Y = zero, zero
        for ai, g in zip(a, G.comps):
            if ai > 0:
                X = X + g.pos.scale(ai)
                Y = Y + g.neg.scale(ai)
            elif ai < 0:
                X = X + g.neg.scale(-ai)
                Y = Y + g.pos.scale(-ai)
        return X, Y

    parts = [lin(a) for a in sorted(p.forms)]
    if len(parts) == 1:
        return parts[0]
    Ysum = zero
    for _, Y in parts:
        Ysum = Ysum + Y
    top = None
    for k, (X, _) in enumerate(parts):
        acc = X
        for j, (_, Y) in enumerate(parts):
            if j != k:
                acc = acc + Y
        top = acc if top is None else top.join(acc)
    return TropPolynomial(_prune(set(top.forms))), Ysum


def pl_compose(F: PLMap, G: PLMap) -> PLMap:
    """F o G by symbolic max-plus substitution."""
    if G.codomain_dim != F.domain_dim:
        raise DimensionMismatch("codomain of G does not match domain of F")
    out = []
    for c in F.comps:
        Xp, Yp = _compose_poly(c.pos, G)
        Xn, Yn = _compose_poly(c.neg, G)
        out.append(TropRational(Xp + Yn, Yp + Xn))
    return PLMap(out)


@dataclass
class Chamber:
    cone: object  # cones.Cone
    linear_map: tuple  # rows of the linear map on the chamber


def linearity_chambers(F: PLMap | TropRational) -> list:
    """Open chambers on which F is linear, one per argmax pattern with nonempty interior."""
    from .cones import Cone

    if isinstance(F, TropRational):
        F = PLMap([F])
    d = F.domain_dim
    polys = []
    for c in F.comps:
        for p in (c.pos, c.neg):
            if p not in polys:
                polys.append(p)
    chambers = []

    def rec(k, choice, strict):
        if k == len(polys):
            pick = dict(zip(range(len(polys)), choice))
            rows = []
            for c in F.comps:
                a = pick[polys.index(c.pos)]
                b = pick[polys.index(c.neg)]
                rows.append(tuple(x - y for x, y in zip(a, b)))
            chambers.append(Chamber(Cone(d, _dedupe(strict)), tuple(rows)))
            return
        for f in sorted(polys[k].forms, reverse=True):
            new = [tuple(g[i] - f[i] for i in range(d)) for g in polys[k].forms if g != f]
            cand = strict + new
            if interior_point(_dedupe(cand)) is not None:
                rec(k + 1, choice + [f], cand)

    rec(0, [], [])
    return chambers


def _dedupe(forms):
    seen = []
    for f in forms:
        if f not in seen:
            seen.append(f)
    return seen


def trop_equal(S: TropRational, T: TropRational) -> bool:
    """Semantic equality: compare linear pieces on a common chamber refinement."""
    if S.dim != T.dim:
        return False
    for ch in linearity_chambers(PLMap([S, T])):
        if ch.linear_map[0] != ch.linear_map[1]:
            return False
    return True


def _solve(A, b):
    """Exact solve of a square system; None if singular."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return None
        M[c], M[p] = M[p], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def pl_inverse_point(F: PLMap, xi, chambers: list | None = None):
    """Exact preimage of xi under a bijective PL map, using its chambers."""
    if F.domain_dim != F.codomain_dim:
        raise DimensionMismatch("only square PL maps can be inverted")
    xi = [Fraction(v) for v in xi]
    chambers = chambers if chambers is not None else linearity_chambers(F)
    for ch in chambers:
        eta = _solve(ch.linear_map, xi)
        if eta is None:
            continue
        if all(_dot(f, eta) <= 0 for f in ch.cone.forms) and list(F(eta)) == xi:
            return eta
    raise ValueError("point is not in the image of the PL map")
