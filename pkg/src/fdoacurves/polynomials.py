"""Homogeneous multivariate polynomials and projective points.

Polynomials are stored densely-keyed: a dict from exponent tuples to
nonzero :class:`ExactScalar` coefficients, all exponent tuples summing to
the polynomial degree (homogeneity is structural, not checked per use).
The zero polynomial has an empty term map and degree 0 by convention;
additive operations treat it as compatible with any degree.

The variable frames in play are tiny (at most five variables, degree at
most eight), so no attempt is made at sparse cleverness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .scalars import ExactScalar, ExtensionMismatch, cross_eq, sc

Expo = Tuple[int, ...]


class FrameMismatch(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class UnknownVariable(ValueError):
    pass


class SingularTransform(ValueError):
    pass


class NotOnVariety(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    name: str
    axes: Tuple[str, ...]

    def __len__(self):
        return len(self.axes)

    def index(self, var: str) -> int:
        try:
            return self.axes.index(var)
        except ValueError:
            raise UnknownVariable("variable %r not in frame %s" % (var, self.name))

    def __repr__(self):
        return "Frame(%s)" % self.name


ORIGINAL = Frame("original", ("u", "y1", "y2", "r1", "r2"))
W = Frame("w", ("w0", "w1", "w2", "w3", "x1"))
Z = Frame("z", ("z0", "z1", "z2", "z3", "x"))
U = Frame("u", ("u0", "u1", "u2"))
Q = Frame("q", ("q0", "q1", "q2"))
PLANE = Frame("plane", ("u", "y1", "y2"))     # the (u, y1, y2) subframe of ORIGINAL
W3 = Frame("w3", ("w0", "w1", "w2", "w3"))    # ambient CP^3 of the quadric Y(Q)
CP1 = Frame("cp1", ("c0", "c1"))
PARAM = Frame("param", ("s", "t"))            # line parameters for restrictions

FRAMES = {f.name: f for f in (ORIGINAL, W, Z, U, Q, PLANE, W3, CP1, PARAM)}


class HomogPoly:
    __slots__ = ("frame", "degree", "terms")

    def __init__(self, frame: Frame, terms: Dict[Expo, ExactScalar],
                 _checked: bool = False):
        self.frame = frame
        if _checked:
            self.terms = terms
        else:
            clean: Dict[Expo, ExactScalar] = {}
            for expo, coeff in terms.items():
                coeff = sc(coeff)
                if coeff.is_zero():
                    continue
                if len(expo) != len(frame.axes):
                    raise ValueError("exponent arity %d != frame arity %d"
                                     % (len(expo), len(frame.axes)))
                clean[tuple(expo)] = coeff
            self.terms = clean
        if self.terms:
            degrees = {sum(e) for e in self.terms}
            if len(degrees) != 1:
                raise ValueError("inhomogeneous term set: degrees %s" % sorted(degrees))
            self.degree = degrees.pop()
        else:
            self.degree = 0    # the zero polynomial, by convention

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, frame: Frame) -> "HomogPoly":
        return cls(frame, {}, _checked=True)

    @classmethod
    def variable(cls, frame: Frame, name: str) -> "HomogPoly":
        i = frame.index(name)
        expo = tuple(1 if j == i else 0 for j in range(len(frame.axes)))
        return cls(frame, {expo: sc(1)}, _checked=True)

    @classmethod
    def monomial(cls, frame: Frame, coeff, exponents: Dict[str, int]) -> "HomogPoly":
        expo = [0] * len(frame.axes)
        for var, e in exponents.items():
            expo[frame.index(var)] = e
        return cls(frame, {tuple(expo): sc(coeff)})

    @classmethod
    def constant(cls, frame: Frame, coeff) -> "HomogPoly":
        coeff = sc(coeff)
        if coeff.is_zero():
            return cls.zero(frame)
        return cls(frame, {(0,) * len(frame.axes): coeff}, _checked=True)

    # -- predicates --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def _require_frame(self, other: "HomogPoly"):
        if self.frame is not other.frame and self.frame != other.frame:
            raise FrameMismatch("frames %s and %s differ"
                                % (self.frame.name, other.frame.name))

    # -- ring operations -----------------------------------------------------------

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        self._require_frame(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise DegreeMismatch("cannot add degree %d to degree %d"
                                 % (self.degree, other.degree))
        out = dict(self.terms)
        for expo, coeff in other.terms.items():
            acc = out.get(expo)
            s = coeff if acc is None else acc + coeff
            if s.is_zero():
                out.pop(expo, None)
            else:
                out[expo] = s
        return HomogPoly(self.frame, out, _checked=True)

    def __neg__(self) -> "HomogPoly":
        return HomogPoly(self.frame, {e: -c for e, c in self.terms.items()},
                         _checked=True)

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        return self + (-other)

    def __mul__(self, other: "HomogPoly") -> "HomogPoly":
        self._require_frame(other)
        if self.is_zero() or other.is_zero():
            return HomogPoly.zero(self.frame)
        out: Dict[Expo, ExactScalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                acc = out.get(expo)
                s = prod if acc is None else acc + prod
                if s.is_zero():
                    out.pop(expo, None)
                else:
                    out[expo] = s
        return HomogPoly(self.frame, out, _checked=True)

    def scale(self, k) -> "HomogPoly":
        k = sc(k)
        if k.is_zero():
            return HomogPoly.zero(self.frame)
        return HomogPoly(self.frame, {e: c * k for e, c in self.terms.items()},
                         _checked=True)

    def __pow__(self, n: int) -> "HomogPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = HomogPoly.constant(self.frame, 1)
        for _ in range(n):
            out = out * self
        return out

    # -- evaluation / calculus --------------------------------------------------------

    def eval_at(self, coords: Sequence[ExactScalar]) -> ExactScalar:
        if len(coords) != len(self.frame.axes):
            raise FrameMismatch("expected %d coordinates, got %d"
                                % (len(self.frame.axes), len(coords)))
        coords = [sc(c) for c in coords]
        total = sc(0)
        for expo, coeff in self.terms.items():
            v = coeff
            for x, e in zip(coords, expo):
                if e:
                    v = v * x ** e
            total = total + v
        return total

    def eval_point(self, pt: "ProjPoint") -> ExactScalar:
        if pt.frame != self.frame:
            raise FrameMismatch("point frame %s vs poly frame %s"
                                % (pt.frame.name, self.frame.name))
        return self.eval_at(pt.coords)

    def eval_complex(self, coords: Sequence[complex]) -> complex:
        total = 0j
        for expo, coeff in self.terms.items():
            v = coeff.to_complex()
            for x, e in zip(coords, expo):
                if e:
                    v *= x ** e
            total += v
        return total

    def partial(self, var: str) -> "HomogPoly":
        i = self.frame.index(var)
        out: Dict[Expo, ExactScalar] = {}
        for expo, coeff in self.terms.items():
            e = expo[i]
            if e == 0:
                continue
            new = list(expo)
            new[i] = e - 1
            key = tuple(new)
            add = coeff * e
            acc = out.get(key)
            s = add if acc is None else acc + add
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return HomogPoly(self.frame, out, _checked=True)

    def gradient(self) -> List["HomogPoly"]:
        return [self.partial(v) for v in self.frame.axes]

    # -- substitution -------------------------------------------------------------------

    def compose(self, images: Sequence["HomogPoly"], target: Frame) -> "HomogPoly":
        """Substitute each frame variable by the corresponding image polynomial.

        All images must live in ``target`` and share one degree k >= 1; the
        result is homogeneous of degree ``self.degree * k``.
        """
        if len(images) != len(self.frame.axes):
            raise ValueError("need %d images" % len(self.frame.axes))
        img_deg = None
        for g in images:
            if g.frame != target:
                raise FrameMismatch("image not in target frame")
            if g.is_zero():
                continue
            if img_deg is None:
                img_deg = g.degree
            elif g.degree != img_deg:
                raise DegreeMismatch("images of mixed degrees")
        if self.is_zero():
            return HomogPoly.zero(target)
        # cache powers of each image
        pows: List[List[HomogPoly]] = []
        maxes = [0] * len(images)
        for expo in self.terms:
            for i, e in enumerate(expo):
                maxes[i] = max(maxes[i], e)
        one = HomogPoly.constant(target, 1)
        for i, g in enumerate(images):
            cache = [one]
            for _ in range(maxes[i]):
                cache.append(cache[-1] * g)
            pows.append(cache)
        total = HomogPoly.zero(target)
        for expo, coeff in self.terms.items():
            term = HomogPoly.constant(target, coeff)
            for i, e in enumerate(expo):
                if e:
                    term = term * pows[i][e]
            if term.is_zero():
                continue
            if total.is_zero():
                total = term
            else:
                total = total + term
        return total

    def substitute_linear(self, matrix: Sequence[Sequence[ExactScalar]],
                          target: Frame) -> "HomogPoly":
        """Replace source variable i by the linear form sum_j matrix[i][j] * target_j.

        The matrix must be square and invertible over the scalars.
        """
        n = len(self.frame.axes)
        if len(matrix) != n or any(len(row) != len(target.axes) for row in matrix):
            raise ValueError("transform shape mismatch")
        if len(target.axes) == n and matrix_rank([[sc(x) for x in row] for row in matrix]) < n:
            raise SingularTransform("linear substitution matrix is singular")
        images = []
        for row in matrix:
            terms: Dict[Expo, ExactScalar] = {}
            for j, cj in enumerate(row):
                cj = sc(cj)
                if cj.is_zero():
                    continue
                expo = tuple(1 if k == j else 0 for k in range(len(target.axes)))
                terms[expo] = cj
            images.append(HomogPoly(target, terms, _checked=True))
        return self.compose(images, target)

    # -- comparisons / canonical form ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return self.frame == other.frame and self.terms == other.terms

    def __hash__(self):
        return hash((self.frame.name, frozenset((e, c) for e, c in self.terms.items())))

    def proportional(self, other: "HomogPoly") -> Optional[ExactScalar]:
        """The scalar k with self = k * other, or None."""
        self._require_frame(other)
        if other.is_zero():
            return sc(0) if self.is_zero() else None
        if self.is_zero():
            return None
        if set(self.terms) != set(other.terms):
            return None
        expo = next(iter(self.terms))
        k = self.terms[expo] / other.terms[expo]
        for e, c in self.terms.items():
            if c != k * other.terms[e]:
                return None
        return k

    def canonical_str(self) -> str:
        """Deterministic plain-text form: terms sorted by descending exponents."""
        if not self.terms:
            return "0"
        pieces = []
        for expo in sorted(self.terms, reverse=True):
            coeff = self.terms[expo]
            mono = "*".join(
                ("%s^%d" % (v, e) if e > 1 else v)
                for v, e in zip(self.frame.axes, expo) if e)
            cs = str(coeff)
            pieces.append("%s * %s" % (cs, mono) if mono else cs)
        return "  +  ".join(pieces)

    def __repr__(self):
        return "HomogPoly[%s, deg %d](%s)" % (self.frame.name, self.degree,
                                              self.canonical_str())


# -- module-level operation aliases matching the operation contract ----------------

def poly_add(p: HomogPoly, q: HomogPoly) -> HomogPoly:
    return p + q


def poly_mul(p: HomogPoly, q: HomogPoly) -> HomogPoly:
    return p * q


def poly_eval(p: HomogPoly, pt: "ProjPoint") -> ExactScalar:
    return p.eval_point(pt)


def poly_substitute_linear(p: HomogPoly, matrix, target: Frame) -> HomogPoly:
    return p.substitute_linear(matrix, target)


def poly_partial(p: HomogPoly, var: str) -> HomogPoly:
    return p.partial(var)


def linear_divides(line: HomogPoly, p: HomogPoly) -> bool:
    """True iff the degree-1 form divides p.

    Solves the line for a variable with nonzero coefficient and substitutes
    into p; divisibility is equivalent to the substitution vanishing.
    """
    if line.degree != 1 or line.is_zero():
        raise ValueError("divisor must be a nonzero linear form")
    line._require_frame(p)
    if p.is_zero():
        return True
    frame = p.frame
    pivot = None
    for expo, coeff in line.terms.items():
        pivot = (expo.index(1), coeff)
        break
    i, ci = pivot
    # x_i = -(sum_{j != i} c_j x_j) / c_i
    images = []
    for k in range(len(frame.axes)):
        if k != i:
            images.append(HomogPoly.variable(frame, frame.axes[k]))
            continue
        terms: Dict[Expo, ExactScalar] = {}
        for expo, coeff in line.terms.items():
            j = expo.index(1)
            if j == i:
                continue
            key = tuple(1 if m == j else 0 for m in range(len(frame.axes)))
            terms[key] = -(coeff / ci)
        images.append(HomogPoly(frame, terms, _checked=True))
    return p.compose(images, frame).is_zero()


# -- projective points ------------------------------------------------------------------


class ProjPoint:
    __slots__ = ("frame", "coords")

    def __init__(self, frame: Frame, coords: Iterable):
        self.frame = frame
        cs = tuple(sc(c) for c in coords)
        if len(cs) != len(frame.axes):
            raise ValueError("expected %d coordinates for frame %s"
                             % (len(frame.axes), frame.name))
        if all(c.is_zero() for c in cs):
            raise ValueError("projective point must have a nonzero coordinate")
        self.coords = cs

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, k):
        return self.coords[k]

    def projectively_equal(self, other: "ProjPoint") -> bool:
        if self.frame != other.frame:
            raise FrameMismatch("points in different frames")
        n = len(self.coords)
        try:
            for i in range(n):
                for j in range(i + 1, n):
                    if self.coords[i] * other.coords[j] != self.coords[j] * other.coords[i]:
                        return False
            return True
        except ExtensionMismatch:
            # points live in different quadratic extensions: compare the
            # normalised representatives coordinate by coordinate
            a = self.normalized()
            b = other.normalized()
            return all(cross_eq(x, y) for x, y in zip(a.coords, b.coords))

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.frame == other.frame and self.projectively_equal(other)

    def scaled(self, k) -> "ProjPoint":
        k = sc(k)
        if k.is_zero():
            raise ValueError("scaling a projective point by zero")
        return ProjPoint(self.frame, tuple(c * k for c in self.coords))

    def normalized(self) -> "ProjPoint":
        """Representative with first nonzero coordinate equal to 1."""
        for c in self.coords:
            if not c.is_zero():
                return self.scaled(c.inv())
        raise AssertionError("unreachable")

    def is_real(self) -> bool:
        """True iff some scaling makes every coordinate real-valued."""
        pivot = next(c for c in self.coords if not c.is_zero())
        inv = pivot.inv()
        return all((c * inv).is_real_value() for c in self.coords)

    def to_complex(self) -> Tuple[complex, ...]:
        return tuple(c.to_complex() for c in self.coords)

    def __repr__(self):
        return "[%s]@%s" % (", ".join(str(c) for c in self.coords), self.frame.name)


def proj(frame: Frame, *coords) -> ProjPoint:
    return ProjPoint(frame, coords)


# -- exact linear algebra -------------------------------------------------------------------


def matrix_rank(rows: List[List[ExactScalar]]) -> int:
    """Exact rank by Gaussian elimination over the scalar field."""
    m = [list(r) for r in rows]
    nrows = len(m)
    if nrows == 0:
        return 0
    ncols = len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        pivot = None
        for r in range(row, nrows):
            if not m[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        pinv = m[row][col].inv()
        for r in range(row + 1, nrows):
            if m[r][col].is_zero():
                continue
            factor = m[r][col] * pinv
            m[r] = [a - factor * b for a, b in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def matrix_mul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), sc(0))
             for col in zip(*b)] for row in a]


def matrix_is_identity(m) -> bool:
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if x != (sc(1) if i == j else sc(0)):
                return False
    return True


def poly_reduce(p: HomogPoly, divisors: Sequence[HomogPoly]) -> HomogPoly:
    """Multivariate division remainder of p by the divisors (lex order).

    For a single divisor this decides ideal membership exactly: the
    remainder is zero iff the divisor divides p.
    """
    if not divisors:
        return p
    lts = []
    for d in divisors:
        if d.is_zero():
            raise ZeroDivisionError("zero divisor")
        e = max(d.terms)
        lts.append((e, d.terms[e], d))
    work = dict(p.terms)
    remainder: Dict[Expo, ExactScalar] = {}
    while work:
        expo = max(work)
        coeff = work.pop(expo)
        hit = None
        for e, c, d in lts:
            if all(a >= b for a, b in zip(expo, e)):
                hit = (e, c, d)
                break
        if hit is None:
            remainder[expo] = coeff
            continue
        e, c, d = hit
        shift = tuple(a - b for a, b in zip(expo, e))
        factor = coeff / c
        for de, dc in d.terms.items():
            if de == e:
                continue
            key = tuple(a + b for a, b in zip(de, shift))
            acc = work.get(key)
            val = -factor * dc
            s = val if acc is None else acc + val
            if s.is_zero():
                work.pop(key, None)
            else:
                work[key] = s
    return HomogPoly(p.frame, remainder, _checked=True)


def jacobian_rank_at(polys: Sequence[HomogPoly], pt: ProjPoint) -> int:
    """Exact rank of the partial-derivative matrix at a point of the variety.

    Raises NotOnVariety if any defining polynomial is nonzero at pt.
    """
    frame = pt.frame
    for p in polys:
        if p.frame != frame:
            raise FrameMismatch("polynomial frame %s vs point frame %s"
                                % (p.frame.name, frame.name))
        if not p.eval_point(pt).is_zero():
            raise NotOnVariety("point %r is not on the variety" % (pt,))
    rows = []
    for p in polys:
        rows.append([p.partial(v).eval_point(pt) for v in frame.axes])
    return matrix_rank(rows)
