"""The maps between the varieties and exact membership tests.

Contents: the birational pair alpha/beta between the ambient surface and
the plane, the double-cover projection of the surface onto the quadric in
CP^3, the projection of the space curve onto the plane octic with its sign
lifts, the Cremona desingularisation of the equal-velocity quartic, and the
Segre embedding.

Undefinedness of a rational map is always decided by exact simultaneous
vanishing of every coordinate polynomial at the input point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .model import (
    Scenario, build_f, build_h, build_P, build_Q, build_Q1, build_Q2,
    build_Qtilde,
)
from .polynomials import (
    CP1, ORIGINAL, PLANE, Q as QFRAME, U, W, W3, Z,
    Frame, FrameMismatch, HomogPoly, NotOnVariety, ProjPoint, proj,
)
from .scalars import ExactScalar, ExtensionSpec, sc

Expo = Tuple[int, ...]


class NotOnY(NotOnVariety):
    pass


class NotOnHCF(NotOnVariety):
    pass


class NotOnZ(NotOnVariety):
    pass


class NotOnQuadric(NotOnVariety):
    pass


class NotOnVtilde(NotOnVariety):
    pass


class IrrationalFibre(ValueError):
    """A required square root does not exist in the working field."""


class ZeroImage(AssertionError):
    pass


class ScenarioNotEqualVelocity(ValueError):
    pass


class DegenerateParameters(ValueError):
    pass


@dataclass(frozen=True)
class MapResult:
    image: Optional[ProjPoint]
    undefined_reason: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.image is not None

    @classmethod
    def of(cls, pt: ProjPoint) -> "MapResult":
        return cls(pt, None)

    @classmethod
    def undefined(cls, reason: str) -> "MapResult":
        return cls(None, reason)


# -- varieties ----------------------------------------------------------------------


@dataclass(frozen=True)
class VarietyId:
    tag: str
    frame: Frame
    polys: Tuple[HomogPoly, ...]

    def contains(self, pt: ProjPoint) -> bool:
        if pt.frame != self.frame:
            raise FrameMismatch("point frame %s, variety lives in %s"
                                % (pt.frame.name, self.frame.name))
        return all(p.eval_point(pt).is_zero() for p in self.polys)

    def residuals(self, pt: ProjPoint) -> List[ExactScalar]:
        return [p.eval_point(pt) for p in self.polys]


def variety_Y(frame: Frame = W) -> VarietyId:
    if frame == ORIGINAL:
        return VarietyId("Y", ORIGINAL, (build_Q1(ORIGINAL), build_Q2(ORIGINAL)))
    if frame in (W, Z):
        return VarietyId("Y", frame, (build_Q(frame), build_Q1(frame)))
    raise FrameMismatch("Y is defined in ORIGINAL, W or Z")


def variety_quadric() -> VarietyId:
    q = (HomogPoly.monomial(W3, 1, {"w0": 1, "w3": 1})
         + HomogPoly.monomial(W3, -1, {"w1": 1, "w2": 1}))
    return VarietyId("QUADRIC_Y_Q", W3, (q,))


def variety_HCF(scenario: Scenario, frame: Frame = Z) -> VarietyId:
    if frame == ORIGINAL:
        polys = (build_Q1(ORIGINAL), build_Q2(ORIGINAL), build_Qtilde(scenario, ORIGINAL))
    elif frame in (W, Z):
        polys = (build_Q(frame), build_Q1(frame), build_Qtilde(scenario, frame))
    else:
        raise FrameMismatch("HC_F is defined in ORIGINAL, W or Z")
    return VarietyId("HCF", frame, polys)


def variety_V(scenario: Scenario) -> VarietyId:
    return VarietyId("V", U, (build_P(scenario),))


def variety_Z_octic(scenario: Scenario) -> VarietyId:
    return VarietyId("Z", PLANE, (build_h(scenario),))


def variety_Vtilde(scenario: Scenario, t: ExactScalar) -> VarietyId:
    return VarietyId("VTILDE", QFRAME, (build_V_tilde(scenario, t),))


def membership(pt: ProjPoint, variety: VarietyId) -> bool:
    return variety.contains(pt)


# -- normal form modulo the surface relations -----------------------------------------

def reduce_mod_Y(p: HomogPoly) -> HomogPoly:
    """Canonical form of a W-frame polynomial modulo (x1^2 + w0 w3, w1 w2 - w0 w3).

    The two relations form a Groebner basis (their leading terms x1^2 and
    w1 w2 are coprime), so rewriting x1^2 -> -w0 w3 and w1 w2 -> w0 w3 to a
    fixpoint yields a canonical representative: ideal membership is exactly
    "reduces to zero".
    """
    if p.frame != W:
        raise FrameMismatch("reduce_mod_Y expects a W-frame polynomial")
    out: Dict[Expo, ExactScalar] = {}
    for (e0, e1, e2, e3, ex), coeff in p.terms.items():
        k, r = divmod(ex, 2)
        if k % 2 == 1:
            coeff = -coeff
        e0 += k
        e3 += k
        m = min(e1, e2)
        if m:
            e1 -= m
            e2 -= m
            e0 += m
            e3 += m
        key = (e0, e1, e2, e3, r)
        acc = out.get(key)
        s = coeff if acc is None else acc + coeff
        if s.is_zero():
            out.pop(key, None)
        else:
            out[key] = s
    return HomogPoly(W, out, _checked=True)


# -- alpha and beta ---------------------------------------------------------------------

_Y_W = None


def _y_w() -> VarietyId:
    global _Y_W
    if _Y_W is None:
        _Y_W = variety_Y(W)
    return _Y_W


def alpha(pt: ProjPoint) -> MapResult:
    """[w, x1] -> [w3 x1, w2 x1, w2 w3]; input must lie on Y(Q, Q1)."""
    if pt.frame != W:
        raise FrameMismatch("alpha expects W-frame points")
    if not _y_w().contains(pt):
        raise NotOnY("alpha input %r is not on Y(Q, Q1)" % (pt,))
    w0, w1, w2, w3, x1 = pt.coords
    coords = (w3 * x1, w2 * x1, w2 * w3)
    if all(c.is_zero() for c in coords):
        return MapResult.undefined("point lies on l1 u l2 u l4, where alpha is undefined")
    return MapResult.of(ProjPoint(U, coords))


def beta(pt: ProjPoint) -> MapResult:
    """[u0, u1, u2] -> [-u0 u1^2, -u0^2 u1, u1 u2^2, u0 u2^2, u0 u1 u2]."""
    if pt.frame != U:
        raise FrameMismatch("beta expects U-frame points")
    u0, u1, u2 = pt.coords
    coords = (-u0 * u1 * u1, -u0 * u0 * u1, u1 * u2 * u2, u0 * u2 * u2, u0 * u1 * u2)
    if all(c.is_zero() for c in coords):
        return MapResult.undefined("beta is undefined at [1,0,0], [0,1,0], [0,0,1]")
    return MapResult.of(ProjPoint(W, coords))


# -- the double cover of the quadric --------------------------------------------------------

def pi_project(pt: ProjPoint) -> ProjPoint:
    """The everywhere-defined projection [w, x1] -> [w]."""
    if pt.frame != W:
        raise FrameMismatch("pi expects W-frame points")
    return ProjPoint(W3, pt.coords[:4])


def pi_fibre(pt: ProjPoint, allow_extension: bool = True) -> List[ProjPoint]:
    """Fibre of the double cover over a point of the quadric w0 w3 = w1 w2.

    Two points [w, +-R] with R^2 = -w0 w3 off the branch curve w0 w3 = 0,
    one point [w, 0] on it.  When -w0 w3 is not a square in Q(i) the root is
    produced in a freshly registered quadratic extension (or IrrationalFibre
    is raised if extensions are disallowed).
    """
    if pt.frame != W3:
        raise FrameMismatch("pi_fibre expects points of CP^3")
    if not variety_quadric().contains(pt):
        raise NotOnQuadric("%r is not on the quadric" % (pt,))
    w0, w1, w2, w3 = pt.coords
    m = w0 * w3
    if m.is_zero():
        return [ProjPoint(W, pt.coords + (sc(0),))]
    root = (-m).sqrt_in_field()
    if root is None:
        if not allow_extension:
            raise IrrationalFibre("-w0*w3 = %s is not a square in Q(i)" % (-m))
        if not m.is_gaussian():
            raise IrrationalFibre("fibre over an extension-valued point needs a tower")
        ext = ExtensionSpec(sc(1), sc(0), m, label="R")
        root = ExactScalar.gen(ext)
    return [ProjPoint(W, pt.coords + (root,)),
            ProjPoint(W, pt.coords + (-root,))]


# -- projection to the plane octic -------------------------------------------------------------

def rho_project(pt: ProjPoint, scenario: Scenario) -> ProjPoint:
    """[u, y1, y2, r1, r2] -> [u, y1, y2]; the image lies on Z."""
    if pt.frame != ORIGINAL:
        raise FrameMismatch("rho expects ORIGINAL-frame points")
    if not variety_HCF(scenario, ORIGINAL).contains(pt):
        raise NotOnHCF("%r is not on HC_F" % (pt,))
    coords = pt.coords[:3]
    if all(c.is_zero() for c in coords):
        raise ZeroImage("u = y1 = y2 = 0 cannot happen on HC_F")
    return ProjPoint(PLANE, coords)


def rho_lift(zpt: ProjPoint, scenario: Scenario, mode: str = "auto",
             tol: float = 1e-9) -> List[ProjPoint]:
    """All sign-lifts [u, y1, y2, ±R1, ±R2] of a Z-point onto HC_F.

    Exact mode requires f1, f2 to be perfect squares in the working field at
    the given representative and returns exact points; "auto" falls back to
    floating point, where a lift counts when the FDOA quadric residual is
    below tol (scaled) and the result is a list of coordinate 5-tuples.
    """
    if zpt.frame != PLANE:
        raise FrameMismatch("rho_lift expects plane points")
    h = build_h(scenario)
    if not h.eval_point(zpt).is_zero():
        raise NotOnZ("%r is not on Z" % (zpt,))
    f1v = build_f(1, PLANE).eval_point(zpt)
    f2v = build_f(2, PLANE).eval_point(zpt)
    r1 = f1v.sqrt_in_field()
    r2 = f2v.sqrt_in_field()
    if r1 is not None and r2 is not None:
        qt = build_Qtilde(scenario, ORIGINAL)
        lifts: List[ProjPoint] = []
        for e1, e2 in itertools.product((1, -1), repeat=2):
            cand = ProjPoint(ORIGINAL, zpt.coords + (r1 * e1, r2 * e2))
            if qt.eval_point(cand).is_zero():
                if not any(cand.projectively_equal(p) for p in lifts):
                    lifts.append(cand)
        return lifts
    if mode == "exact":
        raise IrrationalFibre("f1 or f2 is not a perfect square at %r" % (zpt,))
    return _rho_lift_float(zpt, scenario, tol)


def _rho_lift_float(zpt: ProjPoint, scenario: Scenario, tol: float) -> List[ProjPoint]:
    import cmath

    cu, cy1, cy2 = (c.to_complex() for c in zpt.coords)
    f1v = (cu - cy1) ** 2 + cy2 ** 2
    f2v = (cu + cy1) ** 2 + cy2 ** 2
    s1 = cmath.sqrt(f1v)
    s2 = cmath.sqrt(f2v)
    v11, v12 = scenario.v11.to_complex(), scenario.v12.to_complex()
    v21, v22 = scenario.v21.to_complex(), scenario.v22.to_complex()
    dd = scenario.d.to_complex()
    l1 = v11 * (cu - cy1) - v12 * cy2
    l2 = -v21 * (cu + cy1) - v22 * cy2
    scale = (abs(l1) + abs(l2) + abs(dd)) * (abs(s1) + abs(s2) + abs(s1 * s2)) + 1.0
    out = []
    seen = []
    for e1, e2 in itertools.product((1, -1), repeat=2):
        a, b = e1 * s1, e2 * s2
        res = l2 * a - l1 * b - dd * a * b
        if abs(res) <= tol * scale:
            key = (a, b)
            if any(abs(key[0] - k[0]) + abs(key[1] - k[1]) <= tol * scale for k in seen):
                continue
            seen.append(key)
            out.append((cu, cy1, cy2, a, b))
    return out


# -- Segre ---------------------------------------------------------------------------------------

def segre(a: ProjPoint, b: ProjPoint) -> ProjPoint:
    if a.frame != CP1 or b.frame != CP1:
        raise FrameMismatch("segre expects two CP^1 points")
    a0, a1 = a.coords
    b0, b1 = b.coords
    return ProjPoint(W3, (a0 * b0, a0 * b1, a1 * b0, a1 * b1))


def segre_local_inverse(pt: ProjPoint) -> Tuple[ProjPoint, ProjPoint]:
    """Local inverse on the chart w0 != 0: [w] -> ([w0, w2], [w0, w1])."""
    if pt.frame != W3:
        raise FrameMismatch("expects a CP^3 point")
    w0, w1, w2, w3 = pt.coords
    if w0.is_zero():
        raise ValueError("local inverse needs w0 != 0")
    return ProjPoint(CP1, (w0, w2)), ProjPoint(CP1, (w0, w1))


# -- Cremona desingularisation (equal-velocity pencil) ---------------------------------------------


def _check_cremona_scenario(scenario: Scenario):
    if not scenario.is_equal_velocity:
        raise ScenarioNotEqualVelocity("the Cremona construction needs v1 = v2 = (0, v)")
    v, d = scenario.v12, scenario.d
    if v.is_zero() or d.is_zero():
        raise DegenerateParameters("need v != 0 and d != 0")
    if (d * d - v * v).is_zero() or (d * d - 4 * v * v).is_zero():
        raise DegenerateParameters("need d^2 not in {v^2, 4 v^2}")


def cremona_t(scenario: Scenario, which: int = 1) -> ExactScalar:
    """A chosen root t of d t^2 + 2 v t + d = 0, exact.

    Returns a plain Gaussian rational when the discriminant is a square,
    otherwise a generator of the registered quadratic extension.
    """
    _check_cremona_scenario(scenario)
    v, d = scenario.v12, scenario.d
    disc = 4 * (v * v - d * d)
    root = disc.sqrt_in_field()
    if root is not None:
        chosen = root if which == 1 else -root
        return (-2 * v + chosen) / (2 * d)
    ext = ExtensionSpec(d, 2 * v, d, which_root=which, label="t")
    return ExactScalar.gen(ext)


def build_V_tilde(scenario: Scenario, t: ExactScalar) -> HomogPoly:
    """The plane cubic birational to the equal-velocity quartic.

    (2(vt+d)q1 + d q2) q2^2 - 2vt q0 ((q1+q2)^2 + t^2 q1^2)
        + (2(vt+d)q1 + d q2) t^2 q0^2
    """
    _check_cremona_scenario(scenario)
    v, d = scenario.v12, scenario.d
    assert (d * t * t + 2 * v * t + d).is_zero(), "t is not a root of the minimal polynomial"
    m = HomogPoly.monomial
    two_vtd = 2 * (v * t + d)
    t2 = t * t
    return (m(QFRAME, two_vtd, {"q1": 1, "q2": 2}) + m(QFRAME, d, {"q2": 3})
            + m(QFRAME, -2 * v * t * (1 + t2), {"q0": 1, "q1": 2})
            + m(QFRAME, -4 * v * t, {"q0": 1, "q1": 1, "q2": 1})
            + m(QFRAME, -2 * v * t, {"q0": 1, "q2": 2})
            + m(QFRAME, two_vtd * t2, {"q0": 2, "q1": 1})
            + m(QFRAME, d * t2, {"q0": 2, "q2": 1}))


P1_W = proj(W, 1, 0, 0, 0, 0)
P2_W = proj(W, 0, 0, 0, 1, 0)
P3_W = proj(W, 0, 1, 0, 0, 0)
P4_W = proj(W, 0, 0, 1, 0, 0)
P_POINTS_W = (P1_W, P2_W, P3_W, P4_W)


def cremona_rho(qpt: ProjPoint, scenario: Scenario, t: ExactScalar) -> ProjPoint:
    """The total desingularisation map Vtilde -> HC_F (W-frame image).

    The coordinate formula covers every point except [0,1,0] and [1,0,0],
    which extend holomorphically to p3 and p4.
    """
    if qpt.frame != QFRAME:
        raise FrameMismatch("cremona_rho expects q-frame points")
    vt = variety_Vtilde(scenario, t)
    if not vt.contains(qpt):
        raise NotOnVtilde("%r is not on Vtilde" % (qpt,))
    q0, q1, q2 = qpt.coords
    s = q1 + q2
    coords = (-q0 * q2 * s * s, -q1 * q2 * q2 * s, t * t * q0 * q0 * q1 * s,
              t * t * q0 * q1 * q1 * q2, t * q0 * q1 * q2 * s)
    if not all(c.is_zero() for c in coords):
        return ProjPoint(W, coords)
    if qpt.projectively_equal(proj(QFRAME, 0, 1, 0)):
        return P3_W
    if qpt.projectively_equal(proj(QFRAME, 1, 0, 0)):
        return P4_W
    raise AssertionError("rho degenerates only at [0,1,0] and [1,0,0] on Vtilde")


def cremona_rho_hat(wpt: ProjPoint, scenario: Scenario, t: ExactScalar) -> MapResult:
    """[w, x1] -> [w2(t x1 - w3), t w3 x1, t x1 (t x1 - w3)], undefined at p1..p4."""
    if wpt.frame != W:
        raise FrameMismatch("cremona_rho_hat expects W-frame points")
    _check_cremona_scenario(scenario)
    if not variety_HCF(scenario, W).contains(wpt):
        raise NotOnHCF("%r is not on HC_F" % (wpt,))
    w0, w1, w2, w3, x1 = wpt.coords
    k = t * x1 - w3
    coords = (w2 * k, t * w3 * x1, t * x1 * k)
    if all(c.is_zero() for c in coords):
        return MapResult.undefined("rho_hat is undefined exactly at p1, p2, p3, p4")
    return MapResult.of(ProjPoint(QFRAME, coords))


def exceptional_points(scenario: Scenario, t: ExactScalar
                       ) -> List[Tuple[ProjPoint, int]]:
    """The eight points of Vtilde blown down by rho, with their target p_j.

    All eight are exact in the t-extension field: the two quadratic families
    of the construction collapse, via the minimal polynomial, to
    [1,0,-1], [1,0,-t^2] (over p1) and [1,1,-1], [1,t^2,-t^2] (over p2).
    """
    _check_cremona_scenario(scenario)
    v, d = scenario.v12, scenario.d
    t2 = t * t
    one = sc(1)
    x_p4 = t * (v * t + d) / (v * (1 + t2))
    pts = [
        (proj(QFRAME, 1, 0, -t2), 1),
        (proj(QFRAME, 1, 0, -1), 1),
        (proj(QFRAME, 1, 1, -1), 2),
        (proj(QFRAME, 1, t2, -t2), 2),
        (proj(QFRAME, 0, 1, 0), 3),
        (proj(QFRAME, 0, one, t2 - 1), 3),
        (proj(QFRAME, 1, 0, 0), 4),
        (proj(QFRAME, 1, x_p4, 0), 4),
    ]
    return pts


def vtilde_chord_points(scenario: Scenario, t: ExactScalar, count: int,
                        generic_only: bool = True) -> List[ProjPoint]:
    """Exact points of Vtilde generated by the chord construction.

    The third intersection of the line through two known curve points is
    again a curve point with coordinates in the same field; starting from
    the eight exceptional points this produces arbitrarily many samples.
    ``generic_only`` keeps only points with q0 q1 q2 (q1+q2) != 0.
    """
    cubic = build_V_tilde(scenario, t)

    def third_point(p: ProjPoint, q: ProjPoint) -> Optional[ProjPoint]:
        # restrict the cubic to the line s*p + u*q: a binary cubic with
        # known roots at [1,0] and [0,1], so it is s*u*(c21 s + c12 u)
        c21 = sc(0)
        c12 = sc(0)
        for expo, coeff in cubic.terms.items():
            # expand prod_i (s p_i + u q_i)^{e_i}, keeping s^2u and su^2
            poly = {(0, 0): coeff}
            for i, e in enumerate(expo):
                for _ in range(e):
                    nxt = {}
                    for (es, eu), c in poly.items():
                        for de, fac in ((1, p.coords[i]), (0, q.coords[i])):
                            key = (es + de, eu + 1 - de)
                            if key in nxt:
                                nxt[key] = nxt[key] + c * fac
                            else:
                                nxt[key] = c * fac
                    poly = nxt
            c21 = c21 + poly.get((2, 1), sc(0))
            c12 = c12 + poly.get((1, 2), sc(0))
        if c21.is_zero() and c12.is_zero():
            return None
        coords = tuple(c12 * a - c21 * b for a, b in zip(p.coords, q.coords))
        if all(c.is_zero() for c in coords):
            return None
        return ProjPoint(QFRAME, coords).normalized()

    pool: List[ProjPoint] = [pt for pt, _ in exceptional_points(scenario, t)]
    found: List[ProjPoint] = []

    def is_generic(pt: ProjPoint) -> bool:
        q0, q1, q2 = pt.coords
        return not (q0 * q1 * q2 * (q1 + q2)).is_zero()

    def remember(pt: ProjPoint):
        if any(pt.projectively_equal(x) for x in pool):
            return
        pool.append(pt)
        if (not generic_only) or is_generic(pt):
            found.append(pt)

    frontier = 0
    while len(found) < count:
        progressed = False
        n = len(pool)
        for i in range(frontier, n):
            for j in range(i):
                r = third_point(pool[i], pool[j])
                if r is not None and not any(r.projectively_equal(x) for x in pool):
                    remember(r)
                    progressed = True
                    if len(found) >= count:
                        return found
        frontier = n
        if not progressed:
            raise RuntimeError("chord construction stalled at %d points" % len(found))
    return found
