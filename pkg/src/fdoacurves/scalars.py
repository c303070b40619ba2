"""Exact scalar arithmetic for the curve computations.

The base field is the Gaussian rationals Q(i): numbers ``re + im*i`` with
``re, im`` exact :class:`fractions.Fraction` values.  On top of the base
field a single quadratic extension may be attached: scalars then take the
form ``c0 + c1*t`` where ``t`` satisfies a registered degree-two minimal
polynomial ``A*t^2 + B*t + C = 0`` (``A != 0``, irreducible over Q(i)).
Every product is reduced modulo the minimal polynomial, so the degree in
``t`` never exceeds one.  Nested extensions are rejected.

All values are immutable; equality is exact and zero has a unique
representation (Fraction normalisation takes care of lowest terms and
positive denominators).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Tuple, Union

RationalLike = Union[int, Fraction, str]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class ExtensionMismatch(ValueError):
    """Arithmetic attempted between scalars of different extensions."""


class ReducibleExtension(ValueError):
    """The requested minimal polynomial has a root in Q(i) already."""


def frac_sqrt(f: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    if f < 0:
        return None
    if f == 0:
        return _ZERO
    rn = math.isqrt(f.numerator)
    rd = math.isqrt(f.denominator)
    if rn * rn == f.numerator and rd * rd == f.denominator:
        return Fraction(rn, rd)
    return None


# -- internal helpers on (re, im) Fraction pairs ------------------------------

def _cmul(a: Tuple[Fraction, Fraction], b: Tuple[Fraction, Fraction]):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _cinv(a):
    n = a[0] * a[0] + a[1] * a[1]
    if n == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    return (a[0] / n, -a[1] / n)


def _gauss_sqrt_pair(x: Fraction, y: Fraction):
    """Square root of x + y*i in Q(i), as a pair, or None."""
    if x == 0 and y == 0:
        return (_ZERO, _ZERO)
    if y == 0:
        s = frac_sqrt(x)
        if s is not None:
            return (s, _ZERO)
        s = frac_sqrt(-x)
        if s is not None:
            return (_ZERO, s)
        return None
    s = frac_sqrt(x * x + y * y)
    if s is None:
        return None
    # for y != 0 the real part a is forced: a^2 = (x + s) / 2
    a = frac_sqrt((x + s) / 2)
    if a is None or a == 0:
        return None
    b = y / (2 * a)
    if a * a - b * b == x and 2 * a * b == y:
        return (a, b)
    return None


class ExtensionSpec:
    """A registered quadratic extension Q(i)(t), A*t^2 + B*t + C = 0.

    ``which_root`` (+1 or -1) selects the numeric root used when converting
    to floating point; exact arithmetic itself never depends on the choice.
    """

    __slots__ = ("A", "B", "C", "which_root", "label", "_bA", "_cA", "_root")

    def __init__(self, A: "ExactScalar", B: "ExactScalar", C: "ExactScalar",
                 which_root: int = 1, label: str = "t"):
        A, B, C = ExactScalar.of(A), ExactScalar.of(B), ExactScalar.of(C)
        for coeff in (A, B, C):
            if coeff.ext is not None:
                raise ValueError("extension coefficients must be Gaussian rationals")
        if A.is_zero():
            raise ValueError("leading coefficient of the minimal polynomial is zero")
        if which_root not in (1, -1):
            raise ValueError("which_root must be +1 or -1")
        disc = (B * B - 4 * A * C)
        if _gauss_sqrt_pair(disc.re, disc.im) is not None:
            raise ReducibleExtension(
                "discriminant %s is a square in Q(i); no extension needed" % disc)
        self.A, self.B, self.C = A, B, C
        self.which_root = which_root
        self.label = label
        self._bA = _cmul((B.re, B.im), _cinv((A.re, A.im)))   # B/A
        self._cA = _cmul((C.re, C.im), _cinv((A.re, A.im)))   # C/A
        a = complex(A.re) + 1j * complex(A.im)
        b = complex(B.re) + 1j * complex(B.im)
        c = complex(C.re) + 1j * complex(C.im)
        sq = (b * b - 4 * a * c) ** 0.5
        self._root = (-b + which_root * sq) / (2 * a)

    def key(self):
        return (self.A, self.B, self.C, self.which_root)

    def __eq__(self, other):
        return isinstance(other, ExtensionSpec) and self.key() == other.key()

    def __hash__(self):
        return hash(("ext",) + tuple((s.re, s.im) for s in (self.A, self.B, self.C))
                    + (self.which_root,))

    @property
    def numeric_root(self) -> complex:
        return self._root

    def is_real_coeffs(self) -> bool:
        return self.A.im == 0 and self.B.im == 0 and self.C.im == 0

    def discriminant(self) -> "ExactScalar":
        return self.B * self.B - 4 * self.A * self.C

    def __repr__(self):
        return "ExtensionSpec(%s: %s*t^2 + %s*t + %s, root %+d)" % (
            self.label, self.A, self.B, self.C, self.which_root)


def _join_ext(a: Optional[ExtensionSpec], b: Optional[ExtensionSpec]):
    if a is None:
        return b
    if b is None or a is b or a == b:
        return a
    raise ExtensionMismatch("scalars live in different quadratic extensions")


class ExactScalar:
    """A Gaussian rational, optionally extended by one quadratic generator.

    value = (re + im*i) + (tre + tim*i) * t
    """

    __slots__ = ("re", "im", "tre", "tim", "ext")

    def __init__(self, re=0, im=0, tre=0, tim=0, ext: Optional[ExtensionSpec] = None):
        self.re = Fraction(re)
        self.im = Fraction(im)
        self.tre = Fraction(tre)
        self.tim = Fraction(tim)
        if ext is None and (self.tre != 0 or self.tim != 0):
            raise ValueError("t-part present without a registered extension")
        # ext is kept even when the t-part is zero, preserving field context
        self.ext = ext

    # -- construction ---------------------------------------------------------

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction, tre: Fraction, tim: Fraction,
             ext: Optional[ExtensionSpec]) -> "ExactScalar":
        """Internal fast constructor: inputs must already be Fractions."""
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        obj.tre = tre
        obj.tim = tim
        obj.ext = ext
        return obj

    @classmethod
    def of(cls, x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction, str)):
            return cls(Fraction(x))
        raise TypeError("cannot coerce %r to ExactScalar" % (x,))

    @classmethod
    def from_parts(cls, re=0, im=0) -> "ExactScalar":
        return cls(Fraction(re), Fraction(im))

    @classmethod
    def i(cls) -> "ExactScalar":
        return cls(0, 1)

    @classmethod
    def zero(cls) -> "ExactScalar":
        return cls()

    @classmethod
    def one(cls) -> "ExactScalar":
        return cls(1)

    @classmethod
    def gen(cls, ext: ExtensionSpec) -> "ExactScalar":
        """The extension generator t itself."""
        return cls(0, 0, 1, 0, ext)

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0 and self.tre == 0 and self.tim == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_gaussian(self) -> bool:
        return self.tre == 0 and self.tim == 0

    def is_rational(self) -> bool:
        return self.is_gaussian() and self.im == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("%s is not rational" % self)
        return self.re

    # -- arithmetic ------------------------------------------------------------

    def _pair0(self):
        return (self.re, self.im)

    def _pair1(self):
        return (self.tre, self.tim)

    def __add__(self, other):
        if not isinstance(other, ExactScalar):
            other = ExactScalar.of(other)
        if not (self.tre or self.tim or other.tre or other.tim):
            return ExactScalar._raw(self.re + other.re, self.im + other.im,
                                    _ZERO, _ZERO, self.ext or other.ext)
        ext = _join_ext(self.ext, other.ext)
        return ExactScalar._raw(self.re + other.re, self.im + other.im,
                                self.tre + other.tre, self.tim + other.tim, ext)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw(-self.re, -self.im, -self.tre, -self.tim, self.ext)

    def __sub__(self, other):
        return self + (-ExactScalar.of(other))

    def __rsub__(self, other):
        return ExactScalar.of(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, ExactScalar):
            other = ExactScalar.of(other)
        if not (self.tre or self.tim or other.tre or other.tim):
            # plain Gaussian rationals, with a fast purely-real path
            a, b, c, d = self.re, self.im, other.re, other.im
            ext = self.ext or other.ext
            if not b and not d:
                return ExactScalar._raw(a * c, _ZERO, _ZERO, _ZERO, ext)
            return ExactScalar._raw(a * c - b * d, a * d + b * c, _ZERO, _ZERO, ext)
        ext = _join_ext(self.ext, other.ext)
        a0, a1 = self._pair0(), self._pair1()
        b0, b1 = other._pair0(), other._pair1()
        c0 = _cmul(a0, b0)
        c1 = _cadd(_cmul(a0, b1), _cmul(a1, b0))
        c2 = _cmul(a1, b1)
        if c2 != (0, 0):
            # t^2 = -(B/A) t - (C/A)
            c1 = _csub(c1, _cmul(c2, ext._bA))
            c0 = _csub(c0, _cmul(c2, ext._cA))
        return ExactScalar._raw(c0[0], c0[1], c1[0], c1[1], ext)

    __rmul__ = __mul__

    def inv(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.tre == 0 and self.tim == 0:
            r = _cinv(self._pair0())
            return ExactScalar(r[0], r[1], 0, 0, self.ext)
        ext = self.ext
        c0, c1 = self._pair0(), self._pair1()
        # Galois conjugate over Q(i): (c0 - c1*B/A) - c1*t
        g0 = _csub(c0, _cmul(c1, ext._bA))
        g1 = (-c1[0], -c1[1])
        # field norm to Q(i): value * conjugate = c0*g0 + c1^2 * C/A
        n = _cadd(_cmul(c0, g0), _cmul(_cmul(c1, c1), ext._cA))
        ninv = _cinv(n)
        r0 = _cmul(g0, ninv)
        r1 = _cmul(g1, ninv)
        return ExactScalar(r0[0], r0[1], r1[0], r1[1], ext)

    def __truediv__(self, other):
        return self * ExactScalar.of(other).inv()

    def __rtruediv__(self, other):
        return ExactScalar.of(other) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = ExactScalar.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.of(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if (self.tre, self.tim) != (other.tre, other.tim):
            return False
        if (self.tre != 0 or self.tim != 0) and not (
                self.ext is other.ext or self.ext == other.ext):
            return False
        return (self.re, self.im) == (other.re, other.im)

    def __hash__(self):
        return hash((self.re, self.im, self.tre, self.tim))

    # -- conjugation / realness --------------------------------------------------

    def conj(self) -> "ExactScalar":
        """Complex conjugate.  For extension scalars the minimal polynomial
        must have real coefficients, so that conjugation permutes its roots."""
        if self.tre == 0 and self.tim == 0:
            return ExactScalar(self.re, -self.im, 0, 0, self.ext)
        ext = self.ext
        if not ext.is_real_coeffs():
            raise ValueError("conjugation undefined: minimal polynomial is not real")
        disc = ext.discriminant()
        if disc.re > 0:
            # both roots real: conj(t) = t
            return ExactScalar(self.re, -self.im, self.tre, -self.tim, ext)
        # complex-conjugate roots: conj(t) = -B/A - t
        c0 = (self.re, -self.im)
        c1 = (self.tre, -self.tim)
        g0 = _csub(c0, _cmul(c1, ext._bA))
        return ExactScalar(g0[0], g0[1], -c1[0], -c1[1], ext)

    def is_real_value(self) -> bool:
        if self.tre == 0 and self.tim == 0:
            return self.im == 0
        return self.conj() == self

    # -- numeric / radical --------------------------------------------------------

    def to_complex(self) -> complex:
        z = complex(self.re) + 1j * complex(self.im)
        if self.tre != 0 or self.tim != 0:
            z += (complex(self.tre) + 1j * complex(self.tim)) * self.ext.numeric_root
        return z

    def to_float(self) -> float:
        z = self.to_complex()
        if abs(z.imag) > 1e-12 * (1 + abs(z.real)):
            raise ValueError("%s is not numerically real" % self)
        return z.real

    def sqrt_in_field(self) -> Optional["ExactScalar"]:
        """Square root inside Q(i), if one exists (plain scalars only)."""
        if not self.is_gaussian():
            return None
        pair = _gauss_sqrt_pair(self.re, self.im)
        if pair is None:
            return None
        return ExactScalar(pair[0], pair[1], 0, 0, self.ext)

    # -- formatting ---------------------------------------------------------------

    @staticmethod
    def _fmt_pair(re: Fraction, im: Fraction) -> str:
        if im == 0:
            return str(re)
        if re == 0:
            if im == 1:
                return "i"
            if im == -1:
                return "-i"
            return "%s*i" % im
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        ipart = "i" if mag == 1 else "%s*i" % mag
        return "(%s%s%s)" % (re, sign, ipart)

    def __str__(self):
        base = self._fmt_pair(self.re, self.im)
        if self.tre == 0 and self.tim == 0:
            return base
        tpart = self._fmt_pair(self.tre, self.tim)
        label = self.ext.label if self.ext else "t"
        if self.re == 0 and self.im == 0:
            return "%s*%s" % (tpart, label)
        return "(%s + %s*%s)" % (base, tpart, label)

    def __repr__(self):
        return "ExactScalar(%s)" % self


def gauss_sqrt(z: ExactScalar) -> Optional[ExactScalar]:
    return ExactScalar.of(z).sqrt_in_field()


def cross_eq(a: ExactScalar, b: ExactScalar) -> bool:
    """Equality of scalars that may live in different quadratic extensions.

    A scalar with a nonzero t-part is irrational over Q(i) (the registered
    minimal polynomial is irreducible), so it can never equal a plain
    Gaussian rational.  Two irrational scalars from different registrations
    are compared through their own monic minimal polynomials; if those
    agree, the two conjugate candidates are separated numerically (the root
    separation of a quadratic is computable, and coefficient sizes here
    keep double precision far from the boundary).
    """
    a, b = ExactScalar.of(a), ExactScalar.of(b)
    a_irr = a.tre != 0 or a.tim != 0
    b_irr = b.tre != 0 or b.tim != 0
    if a_irr != b_irr:
        return False
    if not a_irr:
        return (a.re, a.im) == (b.re, b.im)
    if a.ext is b.ext or a.ext == b.ext:
        return a == b
    mu_a = _monic_minpoly(a)
    mu_b = _monic_minpoly(b)
    if mu_a != mu_b:
        return False
    za, zb = a.to_complex(), b.to_complex()
    b1, b0 = mu_a
    sep = abs((b1.to_complex() ** 2 - 4 * b0.to_complex()) ** 0.5)
    return abs(za - zb) < max(sep / 4, 1e-30)


def _monic_minpoly(x: ExactScalar) -> Tuple[ExactScalar, ExactScalar]:
    """(b1, b0) with x^2 + b1 x + b0 = 0 for an irrational quadratic scalar."""
    ext = x.ext
    c0 = ExactScalar(x.re, x.im)
    c1 = ExactScalar(x.tre, x.tim)
    # x = c0 + c1 t  =>  A (x - c0)^2 + B c1 (x - c0) + C c1^2 = 0
    A, B, C = ext.A, ext.B, ext.C
    lead = A
    b1 = (B * c1 - 2 * A * c0) / lead
    b0 = (A * c0 * c0 - B * c1 * c0 + C * c1 * c1) / lead
    return (b1, b0)


ZERO = ExactScalar.zero()
ONE = ExactScalar.one()
I = ExactScalar.i()


def sc(x) -> ExactScalar:
    """Shorthand coercion used throughout the package."""
    return ExactScalar.of(x)
