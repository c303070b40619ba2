"""Scenario parameters, coordinate frames, and the named polynomials.

Sensor half-separation is normalised to 1: sensors sit at (1, 0) and
(-1, 0) in the y-plane, and the homogenising variable is u.  The command
line accepts a physical half-separation ``a`` and rescales plot output;
nothing in this module depends on it.

Polynomial normalisations follow the displayed forms: the frame-changed
versions of a polynomial agree with the substituted original up to a fixed
positive constant (recorded in the tests), which is invisible projectively.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .polynomials import (
    ORIGINAL, PLANE, U, W, Z,
    Frame, FrameMismatch, HomogPoly, ProjPoint,
    matrix_is_identity, matrix_mul,
)
from .scalars import ExactScalar, sc


class ScenarioError(ValueError):
    pass


class AtSensor(ValueError):
    """The FDOA function is undefined at a sensor position."""


class ZeroTDOA(ValueError):
    pass


class NonRealScenario(ValueError):
    pass


_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)
_EIGHTH = Fraction(1, 8)


def _inv5(m: List[List[ExactScalar]]) -> List[List[ExactScalar]]:
    """Exact inverse by Gauss-Jordan."""
    n = len(m)
    a = [[sc(x) for x in row] + [sc(1) if i == j else sc(0) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pinv = a[col][col].inv()
        a[col] = [x * pinv for x in a[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class FrameTransform:
    """A real linear change of projective coordinates.

    ``point_matrix`` maps source coordinates to destination coordinates;
    ``sub_matrix`` (its inverse) expresses each source variable as a linear
    form in destination variables, which is what polynomial substitution
    needs.
    """

    name: str
    src: Frame
    dst: Frame
    point_matrix: Tuple[Tuple[ExactScalar, ...], ...]
    sub_matrix: Tuple[Tuple[ExactScalar, ...], ...]

    @classmethod
    def from_point_matrix(cls, name, src, dst, rows) -> "FrameTransform":
        pm = tuple(tuple(sc(x) for x in row) for row in rows)
        sub = tuple(tuple(row) for row in _inv5([list(r) for r in pm]))
        prod = matrix_mul([list(r) for r in pm], [list(r) for r in sub])
        assert matrix_is_identity(prod)
        return cls(name, src, dst, pm, sub)

    def convert_point(self, pt: ProjPoint) -> ProjPoint:
        if pt.frame != self.src:
            raise FrameMismatch("point frame %s, transform expects %s"
                                % (pt.frame.name, self.src.name))
        coords = [sum((m * c for m, c in zip(row, pt.coords)), sc(0))
                  for row in self.point_matrix]
        return ProjPoint(self.dst, coords)

    def convert_poly(self, p: HomogPoly) -> HomogPoly:
        if p.frame != self.src:
            raise FrameMismatch("poly frame %s, transform expects %s"
                                % (p.frame.name, self.src.name))
        return p.substitute_linear(self.sub_matrix, self.dst)

    def inverted(self) -> "FrameTransform":
        return FrameTransform(self.name + "^-1", self.dst, self.src,
                              self.sub_matrix, self.point_matrix)


# w0 = u-y1-r1, w1 = -u-y1-r2, w2 = -u-y1+r2, w3 = u-y1+r1, x1 = -y2
ORIGINAL_TO_W = FrameTransform.from_point_matrix(
    "original->w", ORIGINAL, W,
    [[1, -1, 0, -1, 0],
     [-1, -1, 0, 0, -1],
     [-1, -1, 0, 0, 1],
     [1, -1, 0, 1, 0],
     [0, 0, -1, 0, 0]])

# z0 = 2(w3-w0), z1 = 2(w2-w1), z2 = 2(w0+w3), z3 = 2(w2+w1), x = 4*x1
W_TO_Z = FrameTransform.from_point_matrix(
    "w->z", W, Z,
    [[-2, 0, 0, 2, 0],
     [0, -2, 2, 0, 0],
     [2, 0, 0, 2, 0],
     [0, 2, 2, 0, 0],
     [0, 0, 0, 0, 4]])

ORIGINAL_TO_Z = FrameTransform.from_point_matrix(
    "original->z", ORIGINAL, Z,
    matrix_mul([list(r) for r in W_TO_Z.point_matrix],
               [list(r) for r in ORIGINAL_TO_W.point_matrix]))

TRANSFORMS = {t.name: t for t in (ORIGINAL_TO_W, W_TO_Z, ORIGINAL_TO_Z)}


def convert_point(pt: ProjPoint, transform: FrameTransform) -> ProjPoint:
    return transform.convert_point(pt)


class Scenario:
    """The parameter record (v11, v12, v21, v22, d) with derived data.

    Parameters may be any Gaussian rationals except all-zero (the parameter
    space is projective); most physical uses restrict them to real values.
    """

    __slots__ = ("v11", "v12", "v21", "v22", "d")

    def __init__(self, v11, v12, v21, v22, d):
        self.v11 = sc(v11)
        self.v12 = sc(v12)
        self.v21 = sc(v21)
        self.v22 = sc(v22)
        self.d = sc(d)
        if all(x.is_zero() for x in (self.v11, self.v12, self.v21, self.v22, self.d)):
            raise ScenarioError("parameters (v, d) must not all vanish")

    @classmethod
    def equal_velocity(cls, v, d) -> "Scenario":
        return cls(0, v, 0, v, d)

    # -- derived coefficients -----------------------------------------------------

    @property
    def a1(self) -> ExactScalar:
        return self.v11 - self.v21 - self.d

    @property
    def a2(self) -> ExactScalar:
        return -self.v11 - self.v21 + self.d

    @property
    def a3(self) -> ExactScalar:
        return self.v11 + self.v21 + self.d

    @property
    def a4(self) -> ExactScalar:
        return -self.v11 + self.v21 - self.d

    def a(self, j: int) -> ExactScalar:
        return (self.a1, self.a2, self.a3, self.a4)[j - 1]

    # -- flags -----------------------------------------------------------------------

    @property
    def nonzero_v1(self) -> bool:
        return not (self.v11.is_zero() and self.v12.is_zero())

    @property
    def nonzero_v2(self) -> bool:
        return not (self.v21.is_zero() and self.v22.is_zero())

    @property
    def nonzero_d(self) -> bool:
        return not self.d.is_zero()

    def v1_squaresum(self) -> ExactScalar:
        return self.v11 * self.v11 + self.v12 * self.v12

    def v2_squaresum(self) -> ExactScalar:
        return self.v21 * self.v21 + self.v22 * self.v22

    @property
    def satisfies_noLfactors(self) -> bool:
        if not (self.nonzero_v1 and self.nonzero_v2 and self.nonzero_d):
            return False
        if self.v1_squaresum().is_zero() or self.v2_squaresum().is_zero():
            return False
        d2 = self.d * self.d
        if self.v21.is_zero() and (self.v11 * self.v11 - d2).is_zero():
            return False
        if self.v11.is_zero() and (self.v21 * self.v21 - d2).is_zero():
            return False
        return True

    @property
    def is_real(self) -> bool:
        return all(x.is_gaussian() and x.im == 0
                   for x in (self.v11, self.v12, self.v21, self.v22, self.d))

    @property
    def is_equal_velocity(self) -> bool:
        return (self.v11.is_zero() and self.v21.is_zero()
                and self.v12 == self.v22)

    def conditions_held(self) -> Dict[str, bool]:
        """The explicit genericity inequalities the analysis relies on."""
        d2 = self.d * self.d
        return {
            "a1_nonzero": not self.a1.is_zero(),
            "a2_nonzero": not self.a2.is_zero(),
            "a3_nonzero": not self.a3.is_zero(),
            "a4_nonzero": not self.a4.is_zero(),
            "v1_squaresum_nonzero": not self.v1_squaresum().is_zero(),
            "v2_squaresum_nonzero": not self.v2_squaresum().is_zero(),
            "v12sq_plus_a1a3_nonzero": not (self.v12 * self.v12 + self.a1 * self.a3).is_zero(),
            "v22sq_plus_a1a2_nonzero": not (self.v22 * self.v22 + self.a1 * self.a2).is_zero(),
            "v12sq_plus_a2a4_nonzero": not (self.v12 * self.v12 + self.a2 * self.a4).is_zero(),
            "v22sq_plus_a3a4_nonzero": not (self.v22 * self.v22 + self.a3 * self.a4).is_zero(),
            "noLfactors": self.satisfies_noLfactors,
            "d_nonzero": self.nonzero_d,
            "equal_velocity": self.is_equal_velocity,
        }

    def as_dict(self) -> Dict[str, str]:
        return {k: str(getattr(self, k)) for k in ("v11", "v12", "v21", "v22", "d")}

    def __repr__(self):
        return "Scenario(v1=(%s, %s), v2=(%s, %s), d=%s)" % (
            self.v11, self.v12, self.v21, self.v22, self.d)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k)
                   for k in ("v11", "v12", "v21", "v22", "d"))


# -- scenario text format -----------------------------------------------------------

def parse_scenario_text(text: str) -> Tuple[Scenario, Fraction]:
    """Parse key=value lines; returns (scenario, half_separation a)."""
    values: Dict[str, ExactScalar] = {}
    a = Fraction(1)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError("line %d: expected key=value, got %r" % (lineno, raw))
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        try:
            frac = Fraction(val)
        except (ValueError, ZeroDivisionError):
            raise ScenarioError("line %d: cannot parse %r as an exact rational"
                                % (lineno, val))
        if key == "a":
            if frac <= 0:
                raise ScenarioError("half-separation a must be positive")
            a = frac
        elif key in ("v11", "v12", "v21", "v22", "d"):
            values[key] = sc(frac)
        else:
            raise ScenarioError("line %d: unknown key %r" % (lineno, key))
    missing = [k for k in ("v11", "v12", "v21", "v22", "d") if k not in values]
    if missing:
        raise ScenarioError("missing keys: %s" % ", ".join(missing))
    return Scenario(**{k: values[k] for k in ("v11", "v12", "v21", "v22", "d")}), a


# -- polynomial builders -------------------------------------------------------------

def _mono(frame, coeff, **exps):
    return HomogPoly.monomial(frame, coeff, exps)


def build_Q1(frame: Frame = ORIGINAL) -> HomogPoly:
    if frame == ORIGINAL:
        # (u - y1)^2 + y2^2 - r1^2
        return (_mono(ORIGINAL, 1, u=2) + _mono(ORIGINAL, -2, u=1, y1=1)
                + _mono(ORIGINAL, 1, y1=2) + _mono(ORIGINAL, 1, y2=2)
                + _mono(ORIGINAL, -1, r1=2))
    if frame == W:
        return _mono(W, 1, w0=1, w3=1) + _mono(W, 1, x1=2)
    if frame == Z:
        return _mono(Z, 1, x=2) + _mono(Z, 1, z2=2) + _mono(Z, -1, z0=2)
    raise FrameMismatch("Q1 is provided in ORIGINAL, W or Z")


def build_Q2(frame: Frame = ORIGINAL) -> HomogPoly:
    if frame == ORIGINAL:
        return (_mono(ORIGINAL, 1, u=2) + _mono(ORIGINAL, 2, u=1, y1=1)
                + _mono(ORIGINAL, 1, y1=2) + _mono(ORIGINAL, 1, y2=2)
                + _mono(ORIGINAL, -1, r2=2))
    if frame == W:
        return _mono(W, 1, w1=1, w2=1) + _mono(W, 1, x1=2)
    if frame == Z:
        return _mono(Z, 1, x=2) + _mono(Z, 1, z3=2) + _mono(Z, -1, z1=2)
    raise FrameMismatch("Q2 is provided in ORIGINAL, W or Z")


def build_Q1_Q2() -> Tuple[HomogPoly, HomogPoly]:
    return build_Q1(ORIGINAL), build_Q2(ORIGINAL)


def build_Q(frame: Frame = W) -> HomogPoly:
    if frame == W:
        return _mono(W, 1, w0=1, w3=1) + _mono(W, -1, w1=1, w2=1)
    if frame == Z:
        return (_mono(Z, 1, z2=2) + _mono(Z, -1, z0=2)
                + _mono(Z, -1, z3=2) + _mono(Z, 1, z1=2))
    raise FrameMismatch("Q is provided in W or Z")


def build_L(j: int, scenario: Scenario, frame: Frame = ORIGINAL) -> HomogPoly:
    """L1 = v11*(u - y1) - v12*y2 ; L2 = -v21*(u + y1) - v22*y2."""
    if frame not in (ORIGINAL, PLANE):
        raise FrameMismatch("L_j is a polynomial in (u, y1, y2)")
    if j == 1:
        cu, cy1, cy2 = scenario.v11, -scenario.v11, -scenario.v12
    elif j == 2:
        cu, cy1, cy2 = -scenario.v21, -scenario.v21, -scenario.v22
    else:
        raise ValueError("j must be 1 or 2")
    return (_mono(frame, cu, u=1) + _mono(frame, cy1, y1=1)
            + _mono(frame, cy2, y2=1))


def build_f(j: int, frame: Frame = PLANE) -> HomogPoly:
    """f1 = (u - y1)^2 + y2^2 ; f2 = (u + y1)^2 + y2^2."""
    if frame not in (ORIGINAL, PLANE):
        raise FrameMismatch("f_j is a polynomial in (u, y1, y2)")
    s = -1 if j == 1 else 1
    return (_mono(frame, 1, u=2) + _mono(frame, 2 * s, u=1, y1=1)
            + _mono(frame, 1, y1=2) + _mono(frame, 1, y2=2))


def build_Qtilde(scenario: Scenario, frame: Frame = ORIGINAL) -> HomogPoly:
    if frame == ORIGINAL:
        l1 = build_L(1, scenario, ORIGINAL)
        l2 = build_L(2, scenario, ORIGINAL)
        r1 = HomogPoly.variable(ORIGINAL, "r1")
        r2 = HomogPoly.variable(ORIGINAL, "r2")
        return l2 * r1 - l1 * r2 - (r1 * r2).scale(scenario.d)
    if frame == W:
        # A(w) x1 + C(w), with C = a1 w0w1 + a2 w0w2 + a3 w1w3 + a4 w2w3
        s = scenario
        aw = (_mono(W, 2 * s.v22, w3=1) + _mono(W, -2 * s.v22, w0=1)
              + _mono(W, -2 * s.v12, w2=1) + _mono(W, 2 * s.v12, w1=1))
        cw = (_mono(W, s.a1, w0=1, w1=1) + _mono(W, s.a2, w0=1, w2=1)
              + _mono(W, s.a3, w1=1, w3=1) + _mono(W, s.a4, w2=1, w3=1))
        x1 = HomogPoly.variable(W, "x1")
        return aw * x1 + cw
    if frame == Z:
        s = scenario
        a1x = (_mono(Z, s.v22, z0=1) + _mono(Z, -s.v12, z1=1))
        c1 = (_mono(Z, s.v21, z0=1, z3=1) + _mono(Z, -s.v11, z1=1, z2=1)
              + _mono(Z, -s.d, z0=1, z1=1))
        x = HomogPoly.variable(Z, "x")
        return a1x * x + c1
    raise FrameMismatch("Qtilde is provided in ORIGINAL, W or Z")


def build_P(scenario: Scenario) -> HomogPoly:
    """The plane quartic of the system V."""
    s = scenario
    return (_mono(U, s.a4, u2=4)
            + _mono(U, 2 * s.v22, u0=1, u2=3) + _mono(U, -2 * s.v12, u1=1, u2=3)
            + _mono(U, -s.a3, u0=2, u2=2) + _mono(U, -s.a2, u1=2, u2=2)
            + _mono(U, 2 * s.v22, u0=1, u1=2, u2=1) + _mono(U, -2 * s.v12, u0=2, u1=1, u2=1)
            + _mono(U, s.a1, u0=2, u1=2))


def quartic_u0_grouping(scenario: Scenario) -> Tuple[HomogPoly, HomogPoly, HomogPoly]:
    """P written as X1*u0^2 + M*u0 + X2*u2^2: returns (X1, M, X2).

    X1 and X2 are quadratics in (u1, u2); M = 2 v22 (u2^3 + u1^2 u2).
    """
    s = scenario
    x1 = (_mono(U, -s.a3, u2=2) + _mono(U, -2 * s.v12, u1=1, u2=1)
          + _mono(U, s.a1, u1=2))
    x2 = (_mono(U, s.a4, u2=2) + _mono(U, -2 * s.v12, u1=1, u2=1)
          + _mono(U, -s.a2, u1=2))
    mid = _mono(U, 2 * s.v22, u2=3) + _mono(U, 2 * s.v22, u1=2, u2=1)
    return x1, mid, x2


def build_g(scenario: Scenario, k: int) -> HomogPoly:
    """The four sign-choice quadrics g1..g4 in the full (u, y, r) frame."""
    l1 = build_L(1, scenario, ORIGINAL)
    l2 = build_L(2, scenario, ORIGINAL)
    r1 = HomogPoly.variable(ORIGINAL, "r1")
    r2 = HomogPoly.variable(ORIGINAL, "r2")
    e1, e2 = {1: (1, 1), 2: (-1, -1), 3: (-1, 1), 4: (1, -1)}[k]
    s1 = r1.scale(e1)
    s2 = r2.scale(e2)
    return l2 * s1 - l1 * s2 - (s1 * s2).scale(scenario.d)


def restrict_to_plane(p: HomogPoly) -> HomogPoly:
    """Reinterpret an ORIGINAL-frame polynomial free of r1, r2 in (u, y1, y2)."""
    if p.frame != ORIGINAL:
        raise FrameMismatch("expected an ORIGINAL-frame polynomial")
    out = {}
    for expo, coeff in p.terms.items():
        if expo[3] or expo[4]:
            raise ValueError("polynomial still involves r1 or r2")
        out[expo[:3]] = coeff
    return HomogPoly(PLANE, out, _checked=True)


def substitute_r_squares(p: HomogPoly) -> HomogPoly:
    """Replace r1^2 -> f1, r2^2 -> f2; requires only even powers of r1, r2."""
    if p.frame != ORIGINAL:
        raise FrameMismatch("expected an ORIGINAL-frame polynomial")
    f1 = build_f(1, ORIGINAL)
    f2 = build_f(2, ORIGINAL)
    out = HomogPoly.zero(ORIGINAL)
    for expo, coeff in p.terms.items():
        e1, e2 = expo[3], expo[4]
        if e1 % 2 or e2 % 2:
            raise ValueError("odd power of r%d present" % (1 if e1 % 2 else 2))
        base = HomogPoly(ORIGINAL, {expo[:3] + (0, 0): coeff}, _checked=True)
        term = base * f1 ** (e1 // 2) * f2 ** (e2 // 2)
        out = term if out.is_zero() else out + term
    return out


def build_h(scenario: Scenario) -> HomogPoly:
    """The FDOA octic h = (L2^2 f1 + L1^2 f2 - d^2 f1 f2)^2 - 4 L1^2 L2^2 f1 f2."""
    l1 = build_L(1, scenario, PLANE)
    l2 = build_L(2, scenario, PLANE)
    f1 = build_f(1, PLANE)
    f2 = build_f(2, PLANE)
    d2 = scenario.d * scenario.d
    q = l2 * l2 * f1 + l1 * l1 * f2 - (f1 * f2).scale(d2)
    return q * q - (l1 * l1 * l2 * l2 * f1 * f2).scale(4)


def build_TDOA_L(b) -> HomogPoly:
    b = sc(b)
    if b.is_zero():
        raise ZeroTDOA("TDOA value b must be nonzero")
    return (_mono(ORIGINAL, 1, r2=1) + _mono(ORIGINAL, -1, r1=1)
            + _mono(ORIGINAL, -b, u=1))


# -- the physical FDOA function ---------------------------------------------------------

SENSOR_1 = (1.0, 0.0)
SENSOR_2 = (-1.0, 0.0)


def fdoa_value(y: Tuple[float, float], scenario: Scenario) -> float:
    """(s2-y).v2/|s2-y| - (s1-y).v1/|s1-y| in double precision."""
    if not scenario.is_real:
        raise NonRealScenario("fdoa_value needs real velocities and d")
    y1, y2 = float(y[0]), float(y[1])
    d1 = ((SENSOR_1[0] - y1) ** 2 + y2 * y2) ** 0.5
    d2 = ((SENSOR_2[0] - y1) ** 2 + y2 * y2) ** 0.5
    if d1 == 0.0 or d2 == 0.0:
        raise AtSensor("FDOA is undefined at the sensor positions")
    v11, v12 = scenario.v11.to_float(), scenario.v12.to_float()
    v21, v22 = scenario.v21.to_float(), scenario.v22.to_float()
    dot2 = (SENSOR_2[0] - y1) * v21 + (-y2) * v22
    dot1 = (SENSOR_1[0] - y1) * v11 + (-y2) * v12
    return dot2 / d2 - dot1 / d1


def cauchy_schwarz_ok(scenario: Scenario) -> bool:
    """Exact test of |d| <= ||v1|| + ||v2|| (norms compared by squaring)."""
    if not scenario.is_real:
        raise NonRealScenario("the Cauchy-Schwarz bound applies to real scenarios")
    A = (scenario.d * scenario.d).as_fraction()
    B = scenario.v1_squaresum().as_fraction()
    C = scenario.v2_squaresum().as_fraction()
    lhs = A - B - C
    if lhs <= 0:
        return True
    return lhs * lhs <= 4 * B * C


# -- seeded random scenarios ---------------------------------------------------------------


def _rand_frac(rng, lo=-9, hi=9, den=4) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_scenario(rng, *, require_generic: bool = False,
                    require_noLfactors: bool = False,
                    max_tries: int = 1000) -> Scenario:
    """A random real rational scenario, optionally constrained.

    ``require_generic`` enforces the explicit inequality list the
    singularity analysis relies on (nonzero a_j, nonzero velocity
    square-sums and the four quadratic non-degeneracies).
    """
    for _ in range(max_tries):
        s = Scenario(_rand_frac(rng), _rand_frac(rng), _rand_frac(rng),
                     _rand_frac(rng), _rand_frac(rng))
        if not (s.nonzero_v1 and s.nonzero_v2 and s.nonzero_d):
            continue
        if require_noLfactors and not s.satisfies_noLfactors:
            continue
        if require_generic:
            c = s.conditions_held()
            needed = ("a1_nonzero", "a2_nonzero", "a3_nonzero", "a4_nonzero",
                      "v1_squaresum_nonzero", "v2_squaresum_nonzero",
                      "v12sq_plus_a1a3_nonzero", "v22sq_plus_a1a2_nonzero",
                      "v12sq_plus_a2a4_nonzero", "v22sq_plus_a3a4_nonzero",
                      "noLfactors")
            if not all(c[k] for k in needed):
                continue
        return s
    raise RuntimeError("could not draw a scenario meeting the constraints")


def random_equal_velocity(rng, *, exclude_special: bool = True,
                          max_tries: int = 1000) -> Scenario:
    """Random equal-velocity scenario (0,v),(0,v); optionally d^2 not in {0, v^2, 4v^2}."""
    for _ in range(max_tries):
        v = _rand_frac(rng)
        d = _rand_frac(rng)
        if v == 0 or d == 0:
            continue
        if exclude_special and (d * d == v * v or d * d == 4 * v * v):
            continue
        return Scenario.equal_velocity(v, d)
    raise RuntimeError("could not draw an equal-velocity scenario")
