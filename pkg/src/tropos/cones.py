"""Open polyhedral cones given by strict linear inequalities, with exact certificates."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import lp
from .exact_algebra import PositiveRational, SignedPositiveSum
from .tropical import TropRational, tropicalize, trop_eval


class EmptyCone(ValueError):
    pass


class NonMonomialDenominator(ValueError):
    pass


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def _fr(f) -> tuple:
    return tuple(Fraction(v) for v in f)


class Cone:
    """{xi : f.xi < 0 for f in forms} in Q^dim."""

    def __init__(self, dim: int, forms: Sequence = ()):
        self.dim = int(dim)
        fs = []
        for f in forms:
            f = _fr(f)
            if len(f) != self.dim:
                raise ValueError("form of the wrong length")
            fs.append(f)
        self.forms = tuple(fs)

    def __len__(self):
        return len(self.forms)

    def __repr__(self):
        return f"Cone(dim={self.dim}, forms={[list(map(str, f)) for f in self.forms]})"

    def member(self, xi, strict: bool = True) -> bool:
        xi = _fr(xi)
        if strict:
            return all(_dot(f, xi) < 0 for f in self.forms)
        return all(_dot(f, xi) <= 0 for f in self.forms)

    def pullback(self, M: Sequence[Sequence]) -> "Cone":
        """Cone in eta-coordinates where xi = M eta."""
        k = len(M[0])
        forms = [tuple(sum(f[i] * Fraction(M[i][j]) for i in range(self.dim)) for j in range(k))
                 for f in self.forms]
        return Cone(k, [f for f in forms if any(f)] + [f for f in forms if not any(f)])

    def intersect(self, other: "Cone") -> "Cone":
        return Cone(self.dim, self.forms + other.forms)

    def to_json(self) -> dict:
        return {"dim": self.dim, "strict": [[str(v) for v in f] for f in self.forms]}

    @classmethod
    def from_json(cls, obj) -> "Cone":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["dim"], [[Fraction(str(v)) for v in f] for f in obj["strict"]])


def cone_from_potentials(potentials: Sequence[PositiveRational], dim: int | None = None) -> Cone:
    """Forms a - d for each numerator exponent a and the monomial denominator exponent d."""
    forms = []
    for phi in potentials:
        if not phi.den.is_monomial():
            raise NonMonomialDenominator(f"denominator {phi.den.to_text()} is not a monomial")
        d, _ = phi.den.leading_term()
        for a in sorted(phi.num.exponents()):
            forms.append(tuple(x - y for x, y in zip(a, d)))
    if dim is None:
        if not potentials:
            raise ValueError("dimension needed for an empty potential set")
        dim = potentials[0].nvars
    return Cone(dim, forms)


def member(C, xi, strict: bool = True) -> bool:
    """Membership in a Cone, or in the cone of a set of potentials (any denominators)."""
    if isinstance(C, Cone):
        return C.member(xi, strict)
    vals = [trop_eval(p if isinstance(p, TropRational) else tropicalize(p), xi) for p in C]
    return all(v < 0 for v in vals) if strict else all(v <= 0 for v in vals)


def interior_point(C: Cone) -> list | None:
    """A rational point strictly inside C, or None if C is empty."""
    if not C.forms:
        return [Fraction(0)] * C.dim
    return lp.interior_point(C.forms)


@dataclass
class FarkasCertificate:
    """For candidate form a: lam on cone forms and mu on (b - a) forms, sum to zero, sum(lam) = 1."""

    form: tuple
    cone_multipliers: list
    neg_multipliers: list

    def to_json(self) -> dict:
        return {"form": [str(v) for v in self.form],
                "cone_multipliers": [str(v) for v in self.cone_multipliers],
                "neg_multipliers": [str(v) for v in self.neg_multipliers]}


@dataclass
class DominationVerdict:
    dominated: bool
    certificates: list = field(default_factory=list)
    witness: list | None = None

    def to_json(self) -> dict:
        out = {"dominated": self.dominated}
        if self.dominated:
            out["certificates"] = [c.to_json() for c in self.certificates]
        else:
            out["witness"] = [str(v) for v in self.witness]
        return out


def check_certificate(cert: FarkasCertificate, C: Cone, T: TropRational) -> bool:
    """Re-verify exactly: sum lam_i c_i + sum mu_b (b - a) = 0, lam, mu >= 0, sum lam > 0."""
    a = _fr(cert.form)
    negs = sorted(_fr(b) for b in T.neg.forms)
    lam, mu = cert.cone_multipliers, cert.neg_multipliers
    if len(lam) != len(C.forms) or len(mu) != len(negs):
        return False
    if any(v < 0 for v in lam) or any(v < 0 for v in mu) or sum(lam) <= 0:
        return False
    total = [Fraction(0)] * C.dim
    for l, c in zip(lam, C.forms):
        total = [t + l * ci for t, ci in zip(total, c)]
    for m, b in zip(mu, negs):
        total = [t + m * (bi - ai) for t, bi, ai in zip(total, b, a)]
    return all(t == 0 for t in total)


def is_dominated(T, C: Cone) -> DominationVerdict:
    """Decide whether T < 0 everywhere on the open cone C."""
    if isinstance(T, PositiveRational):
        T = tropicalize(T)
    if interior_point(C) is None:
        raise EmptyCone("domination over an empty cone is vacuous")
    negs = sorted(_fr(b) for b in T.neg.forms)
    certs = []
    for a in sorted(T.pos.forms, reverse=True):
        a = _fr(a)
        # T >= 0 at xi via form a:  c.xi <= -1 (scaled strictness),  (b - a).xi <= 0
        A = [list(c) for c in C.forms] + [[bi - ai for bi, ai in zip(b, a)] for b in negs]
        b = [Fraction(-1)] * len(C.forms) + [Fraction(0)] * len(negs)
        y = lp.farkas_nonneg(A, b)
        if y is None:
            res = lp.linprog([0] * C.dim, A, b)
            xi = res.x
            assert C.member(xi) and T(xi) >= 0
            return DominationVerdict(False, witness=xi)
        k = len(C.forms)
        s = sum(y[:k])
        cert = FarkasCertificate(a, [v / s for v in y[:k]], [v / s for v in y[k:]])
        if not check_certificate(cert, C, T):
            raise AssertionError("Farkas certificate failed exact re-check")
        certs.append(cert)
    return DominationVerdict(True, certs)


def is_dominated_signed(f: SignedPositiveSum, C: Cone) -> bool:
    """Sufficient test: each present side is dominated."""
    return all(is_dominated(p, C).dominated for p in (f.plus, f.minus) if p is not None)


def cones_equal(C1: Cone, C2: Cone) -> bool:
    if C1.dim != C2.dim:
        raise ValueError("cones in different dimensions")
    e1, e2 = interior_point(C1) is None, interior_point(C2) is None
    if e1 or e2:
        return e1 and e2

    def inside(A, B):
        return all(is_dominated(_linear(f), A).dominated for f in B.forms)

    return inside(C1, C2) and inside(C2, C1)


def _linear(f) -> TropRational:
    from .tropical import TropPolynomial
    return TropRational(TropPolynomial([tuple(f)]), TropPolynomial([(0,) * len(f)]))
