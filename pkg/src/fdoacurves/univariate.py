"""Small exact univariate toolkit used for line restrictions.

Coefficients are :class:`ExactScalar` values over Q(i).  Just enough is
implemented for the curve work: Euclidean division, gcd, squarefree part
(whose degree certifies the number of distinct complex roots), exact roots
in degree <= 2 (registering a quadratic extension when needed), and
numeric roots with exact verification of rational guesses.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .scalars import ExactScalar, ExtensionSpec, ReducibleExtension, sc


class UniPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [sc(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else sc(0)

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return UniPoly([c / lead for c in self.coeffs])

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] - other[k] for k in range(n)])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return UniPoly([])
        out = [sc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    def scale(self, k) -> "UniPoly":
        k = sc(k)
        return UniPoly([c * k for c in self.coeffs])

    def divmod(self, other) -> Tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly([]), UniPoly(rem)
        quot = [sc(0)] * (dq + 1)
        inv_lead = other.coeffs[-1].inv()
        for k in range(dq, -1, -1):
            if len(rem) < len(other.coeffs) + k:
                continue
            c = rem[len(other.coeffs) - 1 + k] * inv_lead
            if c.is_zero():
                continue
            quot[k] = c
            for j, b in enumerate(other.coeffs):
                rem[j + k] = rem[j + k] - c * b
        while rem and rem[-1].is_zero():
            rem.pop()
        return UniPoly(quot), UniPoly(rem)

    def derivative(self) -> "UniPoly":
        return UniPoly([c * k for k, c in enumerate(self.coeffs)][1:])

    def gcd(self, other) -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def squarefree_part(self) -> "UniPoly":
        if self.degree <= 0:
            return self.monic()
        g = self.gcd(self.derivative())
        if g.degree <= 0:
            return self.monic()
        return self.divmod(g)[0].monic()

    def eval(self, x: ExactScalar) -> ExactScalar:
        acc = sc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_complex(self, x: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c.to_complex()
        return acc

    def numeric_roots(self) -> List[complex]:
        if self.degree <= 0:
            return []
        cs = [c.to_complex() for c in reversed(self.coeffs)]
        return [complex(r) for r in np.roots(cs)]

    def __repr__(self):
        return "UniPoly(%s)" % ", ".join(str(c) for c in self.coeffs)


def roots_quadratic(poly: UniPoly, label: str = "s") -> List[ExactScalar]:
    """Exact roots of a degree <= 2 polynomial.

    If the discriminant is not a square in Q(i), the roots live in a freshly
    registered quadratic extension.
    """
    if poly.degree == 1:
        return [-poly[0] / poly[1]]
    if poly.degree != 2:
        raise ValueError("expected degree 1 or 2, got %d" % poly.degree)
    a, b, c = poly[2], poly[1], poly[0]
    disc = b * b - 4 * a * c
    if disc.is_zero():
        return [-b / (2 * a)]
    root = disc.sqrt_in_field()
    if root is None:
        if not disc.is_gaussian():
            raise ReducibleExtension("cannot nest quadratic extensions")
        ext = ExtensionSpec(sc(1), sc(0), -disc, label=label)
        root = ExactScalar.gen(ext)
    return [(-b + root) / (2 * a), (-b - root) / (2 * a)]


def rational_roots(poly: UniPoly, max_den: int = 10 ** 6) -> List[ExactScalar]:
    """Roots in Q(i), found by guessing from numeric roots and verifying exactly."""
    out: List[ExactScalar] = []
    if poly.degree <= 0:
        return out
    for z in poly.numeric_roots():
        re = Fraction(z.real).limit_denominator(max_den)
        im = Fraction(z.imag).limit_denominator(max_den)
        cand = ExactScalar(re, im)
        if poly.eval(cand).is_zero() and not any(cand == r for r in out):
            out.append(cand)
    return out
