"""Singularity enumeration, classification, and component decompositions.

Every reported singular point is verified exactly: membership first, then a
rank drop of the Jacobian (for curves in CP^4) or vanishing of the full
gradient (for plane curves).  Double points on plane curves are classified
through the degree-2 jet of the local expansion; delta-invariants of the
multiplicity-4 points of the octic are fixed known values, not computed
here (a full computation needs infinitely-near-point towers).

"Generic" is everywhere operationalised as explicit inequality lists;
each report records which of those conditions the scenario satisfies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .maps import NotOnVariety, variety_HCF, variety_Y
from .model import Scenario, build_L, build_P, build_Qtilde, build_h
from .polynomials import (
    Frame, FrameMismatch, HomogPoly, PLANE, ProjPoint, U, W, Z,
    jacobian_rank_at, proj,
)
from .scalars import ExactScalar, sc
from .univariate import UniPoly, rational_roots, roots_quadratic

NODE = "Node"
CUSP = "Cusp"
OTHER = "Other"
SURFACE_ODP = "OrdinaryDoublePointOfSurface"
MULT4 = "Multiplicity4"
UNCLASSIFIED = "Unclassified"


class AssumptionViolated(ValueError):
    pass


class HypothesisViolated(ValueError):
    def __init__(self, failed: Sequence[str]):
        super().__init__("hypotheses failed: %s" % ", ".join(failed))
        self.failed = list(failed)


class NoLFactorsViolated(ValueError):
    """The octic has a linear factor; the variety is reducible."""


class NotDoublePoint(ValueError):
    pass


class NegativeGenus(ValueError):
    pass


class NotDegenerateCase(ValueError):
    pass


@dataclass
class SingularPoint:
    point: ProjPoint
    kind: str
    is_real: Optional[bool] = None
    multiplicity: Optional[int] = None
    delta: Optional[int] = None
    note: str = ""

    def as_record(self) -> Dict[str, object]:
        return {
            "point": [str(c) for c in self.point.coords],
            "frame": self.point.frame.name,
            "kind": self.kind,
            "is_real": self.is_real,
            "multiplicity": self.multiplicity,
            "delta": self.delta,
            "note": self.note,
        }


@dataclass
class SingularReport:
    variety: str
    scenario: Optional[Dict[str, str]]
    points: List[SingularPoint]
    genus_of_desingularization: Optional[int] = None
    conditions_held: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def real_points(self) -> List[SingularPoint]:
        return [p for p in self.points if p.is_real]


# -- fixture point sets ------------------------------------------------------------------

P1_Z = proj(Z, -1, 0, 1, 0, 0)
P2_Z = proj(Z, 1, 0, 1, 0, 0)
P3_Z = proj(Z, 0, -1, 0, 1, 0)
P4_Z = proj(Z, 0, 1, 0, 1, 0)
P_POINTS_Z = (P1_Z, P2_Z, P3_Z, P4_Z)


def singular_points_Y() -> List[ProjPoint]:
    """The four singular points of the ambient surface, W-frame."""
    return [proj(W, 1, 0, 0, 0, 0), proj(W, 0, 0, 0, 1, 0),
            proj(W, 0, 1, 0, 0, 0), proj(W, 0, 0, 1, 0, 0)]


def y_singular_report() -> SingularReport:
    pts = []
    surf = variety_Y(W)
    for p in singular_points_Y():
        assert surf.contains(p)
        assert jacobian_rank_at(surf.polys, p) < 2
        pts.append(SingularPoint(p, SURFACE_ODP, is_real=p.is_real(), multiplicity=2,
                                 note="ordinary double point of the double cover"))
    return SingularReport("Y", None, pts,
                          notes=["surface ODP type follows from the double-cover picture"])


def base_points_H() -> List[ProjPoint]:
    """The eight base points of the space family, Z-frame."""
    i = ExactScalar.i()
    return list(P_POINTS_Z) + [
        proj(Z, 0, 0, 1, 1, i), proj(Z, 0, 0, 1, 1, -i),
        proj(Z, 0, 0, 1, -1, i), proj(Z, 0, 0, 1, -1, -i)]


def base_points_V() -> List[ProjPoint]:
    """The six base points of the plane quartic family."""
    i = ExactScalar.i()
    return [proj(U, 1, 0, 0), proj(U, 0, 1, 0),
            proj(U, 1, 1, i), proj(U, 1, 1, -i),
            proj(U, 1, -1, i), proj(U, 1, -1, -i)]


# -- local expansion helpers -----------------------------------------------------------------

_LOCAL = Frame("local", ("e", "s1", "s2"))


def _local_jets(p: HomogPoly, pt: ProjPoint) -> List[Dict[Tuple[int, int], ExactScalar]]:
    """Jets of p at pt in an affine chart: jets[k] maps (e1, e2) -> coeff.

    The chart is the first nonzero coordinate of pt; the two remaining
    coordinates become the local variables s1, s2.
    """
    if len(pt.coords) != 3 or len(p.frame.axes) != 3:
        raise FrameMismatch("local expansion implemented for plane curves")
    pivot = next(k for k, c in enumerate(pt.coords) if not c.is_zero())
    rep = pt.scaled(pt.coords[pivot].inv())
    others = [k for k in range(3) if k != pivot]
    e = HomogPoly.variable(_LOCAL, "e")
    svars = [HomogPoly.variable(_LOCAL, "s1"), HomogPoly.variable(_LOCAL, "s2")]
    images = []
    for m in range(3):
        img = e.scale(rep.coords[m])
        if m in others:
            img = img + svars[others.index(m)]
        images.append(img)
    expanded = p.compose(images, _LOCAL)
    jets: List[Dict[Tuple[int, int], ExactScalar]] = [dict() for _ in range(p.degree + 1)]
    for (ee, e1, e2), coeff in expanded.terms.items():
        jets[e1 + e2][(e1, e2)] = coeff
    return jets


def jet_order(p: HomogPoly, pt: ProjPoint) -> int:
    """Multiplicity of the curve p = 0 at pt (0 means pt not on the curve)."""
    jets = _local_jets(p, pt)
    for k, jet in enumerate(jets):
        if jet:
            return k
    raise ValueError("zero polynomial")


def classify_double_point(p: HomogPoly, pt: ProjPoint) -> str:
    """Node / Cusp / Other for a multiplicity-2 point of a plane curve.

    Node iff the degree-2 jet has two distinct linear factors; ordinary
    cusp iff it is a square L^2 with the degree-3 jet not divisible by L.
    """
    jets = _local_jets(p, pt)
    if jets[0]:
        raise NotDoublePoint("point is not on the curve")
    if jets[1]:
        raise NotDoublePoint("point is a smooth point")
    q2 = jets[2]
    if not q2:
        raise NotDoublePoint("multiplicity exceeds 2")
    a = q2.get((2, 0), sc(0))
    b = q2.get((1, 1), sc(0))
    c = q2.get((0, 2), sc(0))
    disc = b * b - 4 * a * c
    if not disc.is_zero():
        return NODE
    # q2 = L^2; direction vector of L = 0
    direction = (-b, 2 * a) if not a.is_zero() else (sc(1), sc(0))
    q3 = jets[3] if len(jets) > 3 else {}
    val = sc(0)
    for (e1, e2), coeff in q3.items():
        val = val + coeff * direction[0] ** e1 * direction[1] ** e2
    return CUSP if not val.is_zero() else OTHER


def plane_point_is_singular(p: HomogPoly, pt: ProjPoint) -> bool:
    if not p.eval_point(pt).is_zero():
        raise NotOnVariety("%r not on the curve" % (pt,))
    return jacobian_rank_at([p], pt) == 0


# -- genus ------------------------------------------------------------------------------------

def genus_degree(degree: int, sing_data: Sequence[Tuple[int, int]]) -> int:
    """(d-1)(d-2)/2 minus the sum of delta-invariants.

    ``sing_data`` is a list of (multiplicity, delta) pairs; only delta enters
    the formula, the multiplicity is carried for the caller's bookkeeping.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    total = (degree - 1) * (degree - 2) // 2
    for mult, delta in sing_data:
        if delta < 0:
            raise ValueError("delta must be nonnegative")
        total -= delta
    if total < 0:
        raise NegativeGenus("genus came out negative: inconsistent input")
    return total


# -- HC_F singularities --------------------------------------------------------------------------

EXTRA_Q = proj(Z, 1, -1, 0, 0, 1)
EXTRA_QTILDE = proj(Z, 1, -1, 0, 0, -1)


def hc_singularities(scenario: Scenario) -> SingularReport:
    """Exact rank test of the singular-point candidates of the space curve.

    The candidate set is the eight base points, plus the two extra points
    [1,-1,0,0,+-1] in the equal-velocity pencil (membership decides which of
    the two occurs; that happens exactly at d^2 = 4 v^2).
    """
    hcf = variety_HCF(scenario, Z)
    candidates = base_points_H()
    if scenario.is_equal_velocity:
        candidates = candidates + [EXTRA_Q, EXTRA_QTILDE]
    points = []
    for pt in candidates:
        if not hcf.contains(pt):
            continue
        rank = jacobian_rank_at(hcf.polys, pt)
        if rank < 3:
            points.append(SingularPoint(pt, UNCLASSIFIED, is_real=pt.is_real(),
                                        note="jacobian rank %d < 3" % rank))
    return SingularReport("HCF", scenario.as_dict(), points,
                          conditions_held=scenario.conditions_held(),
                          notes=["candidates restricted to the base points"
                                 " (+ the two equal-velocity extras)"])


# -- V singularities ---------------------------------------------------------------------------


def v_singularities(scenario: Scenario) -> SingularReport:
    p = build_P(scenario)
    if scenario.a1.is_zero():
        raise AssumptionViolated("a1 = 0: the analysis at [1,0,0] assumes a1 != 0")
    i = ExactScalar.i()
    points: List[SingularPoint] = []
    notes: List[str] = []

    for pt in (proj(U, 1, 0, 0), proj(U, 0, 1, 0)):
        assert plane_point_is_singular(p, pt)
        kind = classify_double_point(p, pt)
        delta = 1 if kind in (NODE, CUSP) else None
        points.append(SingularPoint(pt, kind, is_real=True, multiplicity=2, delta=delta))

    for pt in (proj(U, 1, 1, i), proj(U, 1, 1, -i),
               proj(U, 1, -1, i), proj(U, 1, -1, -i)):
        if plane_point_is_singular(p, pt):
            points.append(SingularPoint(pt, UNCLASSIFIED, is_real=False,
                                        note="base point singular (isotropic velocities)"))

    d, v = scenario.d, scenario.v12
    if scenario.is_equal_velocity and not v.is_zero() and not d.is_zero():
        for extra, when in ((proj(U, 1, -1, 1), d - 2 * v), (proj(U, -1, 1, 1), d + 2 * v)):
            if when.is_zero() and plane_point_is_singular(p, extra):
                kind = classify_double_point(p, extra)
                points.append(SingularPoint(
                    extra, kind, is_real=True, multiplicity=2,
                    delta=1 if kind in (NODE, CUSP) else None,
                    note="third singular point of the d^2 = 4v^2 member"))

    genus = None
    if all(pt.delta is not None for pt in points):
        genus = genus_degree(4, [(pt.multiplicity, pt.delta) for pt in points])
    return SingularReport("V", scenario.as_dict(), points, genus,
                          scenario.conditions_held(), notes)


# -- Z singularities -----------------------------------------------------------------------------


def _z_quadratic_branch(scenario: Scenario, which: int):
    """Singular points from L_j = 0 joint with the quadratic remainder.

    In the split variables T = u - y1, S = u + y1, the first branch pairs
    L1 = v11 T - v12 y2 with
        (v21^2 - d^2) S^2 + 2 v21 v22 S y2 + (v22^2 - d^2) y2^2 = 0
    and the second pairs L2 = -v21 S - v22 y2 with
        (v11^2 - d^2) T^2 - 2 v11 v12 T y2 + (v12^2 - d^2) y2^2 = 0.
    Points come back in (u, y1, y2); at most two per branch.
    """
    s = scenario
    d2 = s.d * s.d
    if which == 1:
        pivot = s.v11                   # L1 = 0 gives T = (v12/v11) y2
        fixed = None if pivot.is_zero() else s.v12 / pivot
        quad = UniPoly([s.v22 * s.v22 - d2, 2 * s.v21 * s.v22, s.v21 * s.v21 - d2])
        # quad in sigma = S / y2 (coefficients low to high)
    else:
        pivot = s.v21                   # L2 = 0 gives S = -(v22/v21) y2
        fixed = None if pivot.is_zero() else -s.v22 / pivot
        quad = UniPoly([s.v12 * s.v12 - d2, -2 * s.v11 * s.v12, s.v11 * s.v11 - d2])
    pts: List[ProjPoint] = []
    if fixed is None:
        # L_j forces y2 = 0; under the noLfactors conditions the quadratic
        # leading coefficient is nonzero, pinning the known sensor image
        return pts
    roots = roots_quadratic(quad, label="sig%d" % which) if quad.degree >= 1 else []
    for r in roots:
        tv, sv = (fixed, r) if which == 1 else (r, fixed)
        u = (tv + sv) / 2
        y1 = (sv - tv) / 2
        pts.append(ProjPoint(PLANE, (u, y1, sc(1))))
    # the y2 = 0 solutions degenerate to the sensor images [1, +-1, 0]
    return pts


def z_singularities(scenario: Scenario) -> SingularReport:
    """The singular points of the plane octic under the no-linear-factor conditions."""
    if not scenario.satisfies_noLfactors:
        raise NoLFactorsViolated("the octic has a linear factor; Z is reducible")
    h = build_h(scenario)
    i = ExactScalar.i()
    points: List[SingularPoint] = []
    notes: List[str] = []

    for pt, mult_expected in ((proj(PLANE, 1, 1, 0), 4), (proj(PLANE, 1, -1, 0), 4)):
        assert plane_point_is_singular(h, pt)
        mult = jet_order(h, pt)
        delta = None
        if mult == 4:
            delta = 8 if scenario.is_equal_velocity else 6
        points.append(SingularPoint(pt, MULT4 if mult == 4 else UNCLASSIFIED,
                                    is_real=True, multiplicity=mult, delta=delta,
                                    note="delta is a fixture, not computed"))

    for pt in (proj(PLANE, 1, 0, i), proj(PLANE, 1, 0, -i),
               proj(PLANE, 0, 1, i), proj(PLANE, 0, 1, -i)):
        assert plane_point_is_singular(h, pt)
        try:
            kind = classify_double_point(h, pt)
        except NotDoublePoint:
            kind = UNCLASSIFIED
        points.append(SingularPoint(pt, kind, is_real=False, multiplicity=2,
                                    delta=1 if kind in (NODE, CUSP) else None))

    if scenario.is_equal_velocity:
        # the special pencil member d^2 = 4 v^2 gains one more singular point,
        # the projection image [0, 0, 1] of the extra space-curve singularity
        extra = proj(PLANE, 0, 0, 1)
        if h.eval_point(extra).is_zero() and plane_point_is_singular(h, extra):
            try:
                kind = classify_double_point(h, extra)
            except NotDoublePoint:
                kind = UNCLASSIFIED
            points.append(SingularPoint(
                extra, kind, is_real=True, multiplicity=jet_order(h, extra),
                delta=1 if kind in (NODE, CUSP) else None,
                note="extra singular point of the d^2 = 4v^2 member"))

    known = [sp.point for sp in points]
    for which in (1, 2):
        disc = 4 * scenario.d * scenario.d * (
            (scenario.v2_squaresum() if which == 1 else scenario.v1_squaresum())
            - scenario.d * scenario.d)
        for pt in _z_quadratic_branch(scenario, which):
            if any(pt.projectively_equal(k) for k in known):
                continue
            if not h.eval_point(pt).is_zero() or not plane_point_is_singular(h, pt):
                notes.append("candidate %r from branch %d failed verification" % (pt, which))
                continue
            known.append(pt)
            try:
                kind = classify_double_point(h, pt)
            except NotDoublePoint:
                kind = UNCLASSIFIED
            try:
                realness = pt.is_real()
            except ValueError:
                realness = None
            points.append(SingularPoint(
                pt, kind, is_real=realness, multiplicity=2,
                delta=1 if kind in (NODE, CUSP) else None,
                note="branch L%d, discriminant %s" % (which, disc)))

    count = len(points)
    if scenario.is_equal_velocity:
        d2 = scenario.d * scenario.d
        expected = 7 if (d2 - 4 * scenario.v12 * scenario.v12).is_zero() else 6
    else:
        expected = 10
    if count < expected:
        notes.append("found %d distinct singular points (expected %d generically); "
                     "reporting what was found, genus withheld" % (count, expected))
    genus = None
    if count == expected and all(sp.delta is not None for sp in points):
        genus = genus_degree(8, [(sp.multiplicity, sp.delta) for sp in points])
    return SingularReport("Z", scenario.as_dict(), points, genus,
                          scenario.conditions_held(), notes)


# -- line intersections ----------------------------------------------------------------------------

_LINES_Z = {
    # name -> (point at z1 = 0, point at z0 = 0, parametrisation sign pattern)
    "l1": (proj(Z, 1, 0, -1, 0, 0), proj(Z, 0, 1, 0, -1, 0), (-1, -1)),
    "l2": (proj(Z, 1, 0, -1, 0, 0), proj(Z, 0, 1, 0, 1, 0), (-1, 1)),
    "l3": (proj(Z, 1, 0, 1, 0, 0), proj(Z, 0, 1, 0, 1, 0), (1, 1)),
    "l4": (proj(Z, 1, 0, 1, 0, 0), proj(Z, 0, 1, 0, -1, 0), (1, -1)),
}

_LINE_COEFF = {"l1": 1, "l2": 2, "l3": 4, "l4": 3}   # which a_k controls l_j


def line_point(name: str, z0, z1) -> ProjPoint:
    s2, s3 = _LINES_Z[name][2]
    z0, z1 = sc(z0), sc(z1)
    return ProjPoint(Z, (z0, z1, z0 * s2, z1 * s3, sc(0)))


def line_intersections_H(scenario: Scenario) -> Dict[str, Dict[str, object]]:
    """HC_F intersected with each of the four lines on the ambient surface.

    When the controlling coefficient a_k vanishes the whole line is a
    component of the curve; otherwise the intersection is the stated pair
    of base points.
    """
    hcf = variety_HCF(scenario, Z)
    out: Dict[str, Dict[str, object]] = {}
    for name, (pt_a, pt_b, _) in _LINES_Z.items():
        ak = scenario.a(_LINE_COEFF[name])
        if ak.is_zero():
            out[name] = {"component": True, "points": [],
                         "a_index": _LINE_COEFF[name]}
            continue
        pts = [pt_a, pt_b]
        for pt in pts:
            assert hcf.contains(pt)
        out[name] = {"component": False, "points": pts, "a_index": _LINE_COEFF[name]}
    return out


def line_intersections_V(scenario: Scenario) -> Dict[str, List[ProjPoint]]:
    """V intersected with the coordinate lines H0, H1, H2 (three points each)."""
    s = scenario
    failed = []
    for j in (1, 2, 3, 4):
        if s.a(j).is_zero():
            failed.append("a%d = 0" % j)
    if not (s.v12 * s.v12 + s.a2 * s.a4):
        failed.append("v12^2 + a2 a4 = 0")
    if not (s.v22 * s.v22 + s.a3 * s.a4):
        failed.append("v22^2 + a3 a4 = 0")
    if failed:
        raise HypothesisViolated(failed)
    p = build_P(s)
    out: Dict[str, List[ProjPoint]] = {}
    # H0: [0, r, R] with a4 R^2 - 2 v12 r R - a2 r^2 = 0, ratio tau = R/r
    tau_h0 = roots_quadratic(UniPoly([-s.a2, -2 * s.v12, s.a4]), label="h0")
    out["H0"] = [proj(U, 0, 1, 0)] + [ProjPoint(U, (sc(0), sc(1), t)) for t in tau_h0]
    # H1: [s, 0, S] with a4 S^2 + 2 v22 s S - a3 s^2 = 0, tau = S/s
    tau_h1 = roots_quadratic(UniPoly([-s.a3, 2 * s.v22, s.a4]), label="h1")
    out["H1"] = [proj(U, 1, 0, 0)] + [ProjPoint(U, (sc(1), sc(0), t)) for t in tau_h1]
    out["H2"] = [proj(U, 1, 0, 0), proj(U, 0, 1, 0)]
    for name, pts in out.items():
        for pt in pts:
            assert p.eval_point(pt).is_zero(), (name, pt)
    # the four quadratic-root points are smooth points of V
    for pt in out["H0"][1:] + out["H1"][1:]:
        assert jacobian_rank_at([p], pt) == 1
    return out


# -- Z cap G: the octic restricted to the two lines ----------------------------------------------


@dataclass
class LineRootRecord:
    point: Optional[ProjPoint]          # exact when available
    approx: Tuple[complex, complex, complex]
    exact: bool
    line: str


def _line_basis(coeffs: Sequence[ExactScalar]) -> Tuple[ProjPoint, ProjPoint]:
    cu, cy1, cy2 = coeffs
    if not cu.is_zero():
        p0 = ProjPoint(PLANE, (-cy1 / cu, sc(1), sc(0)))
        p1 = ProjPoint(PLANE, (-cy2 / cu, sc(0), sc(1)))
    elif not cy1.is_zero():
        p0 = ProjPoint(PLANE, (sc(1), -cu / cy1, sc(0)))
        p1 = ProjPoint(PLANE, (sc(0), -cy2 / cy1, sc(1)))
    else:
        p0 = ProjPoint(PLANE, (sc(1), sc(0), sc(0)))
        p1 = ProjPoint(PLANE, (sc(0), sc(1), sc(0)))
    return p0, p1


def _restrict_to_line(p: HomogPoly, p0: ProjPoint, p1: ProjPoint) -> List[ExactScalar]:
    """Binary-form coefficients of p(s*p0 + t*p1), low t-degree first.

    Returns ``[c_0, ..., c_n]`` with p restricted = sum c_k s^k t^(n-k).
    """
    n = p.degree
    out = [sc(0)] * (n + 1)
    for expo, coeff in p.terms.items():
        poly = {(0, 0): coeff}
        for idx, e in enumerate(expo):
            for _ in range(e):
                nxt: Dict[Tuple[int, int], ExactScalar] = {}
                for (es, eu), c in poly.items():
                    for de, fac in ((1, p0.coords[idx]), (0, p1.coords[idx])):
                        if fac.is_zero():
                            continue
                        key = (es + de, eu + 1 - de)
                        acc = nxt.get(key)
                        v = c * fac
                        nxt[key] = v if acc is None else acc + v
                poly = nxt
        for (es, eu), c in poly.items():
            out[es] = out[es] + c
    return out


def z_cap_G(scenario: Scenario) -> Tuple[List[LineRootRecord], int]:
    """The octic's intersection with the two degree-one loci L1 = 0, L2 = 0.

    Returns the point records and a certified count of distinct points: the
    count comes from exact squarefree degrees of the restricted octic, so it
    is exact even when individual roots are only isolated numerically.
    """
    if not scenario.satisfies_noLfactors:
        raise NoLFactorsViolated("a linear factor makes the intersection infinite")
    h = build_h(scenario)
    l1 = build_L(1, scenario, PLANE)
    l2 = build_L(2, scenario, PLANE)
    c1 = [l1.terms.get(tuple(1 if k == j else 0 for k in range(3)), sc(0)) for j in range(3)]
    c2 = [l2.terms.get(tuple(1 if k == j else 0 for k in range(3)), sc(0)) for j in range(3)]
    proportional = all((c1[i] * c2[j] - c1[j] * c2[i]).is_zero()
                       for i in range(3) for j in range(3))

    records: List[LineRootRecord] = []
    total = 0

    def handle_line(coeffs, label) -> int:
        p0, p1 = _line_basis(coeffs)
        bform = _restrict_to_line(h, p0, p1)
        uni = UniPoly(bform)
        assert not uni.is_zero(), "line is a component: excluded by noLfactors"
        count = 0
        # root at [s, t] = [1, 0] (the point p0) when the top coefficient dies
        if bform[-1].is_zero():
            count += 1
            records.append(LineRootRecord(p0, p0.to_complex(), True, label))
        sf = uni.squarefree_part()
        count += sf.degree
        remaining = sf
        for r in rational_roots(sf):
            pt = ProjPoint(PLANE, tuple(a * r + b for a, b in zip(p0.coords, p1.coords)))
            records.append(LineRootRecord(pt, pt.to_complex(), True, label))
            remaining = remaining.divmod(UniPoly([-r, sc(1)]))[0]
        if remaining.degree in (1, 2):
            for r in roots_quadratic(remaining, label="zg"):
                pt = ProjPoint(PLANE, tuple(a * r + b for a, b in zip(p0.coords, p1.coords)))
                records.append(LineRootRecord(pt, pt.to_complex(), True, label))
        elif remaining.degree > 2:
            for z in remaining.numeric_roots():
                approx = tuple(a.to_complex() * z + b.to_complex()
                               for a, b in zip(p0.coords, p1.coords))
                records.append(LineRootRecord(None, approx, False, label))
        return count

    total += handle_line(c1, "L1")
    if not proportional:
        total += handle_line(c2, "L2")
        # the lines meet in one point; discount it if it lies on the octic
        cross = (c1[1] * c2[2] - c1[2] * c2[1],
                 c1[2] * c2[0] - c1[0] * c2[2],
                 c1[0] * c2[1] - c1[1] * c2[0])
        if not all(c.is_zero() for c in cross):
            meet = ProjPoint(PLANE, cross)
            if h.eval_point(meet).is_zero():
                total -= 1
    assert total <= 16
    return records, total


# -- pencil component decompositions -------------------------------------------------------------


@dataclass
class Component:
    name: str
    frame: Frame
    sample: object                      # callable (m, n) -> ProjPoint
    note: str = ""


@dataclass
class ComponentDecomposition:
    case: str
    space_components: List[Component]
    plane_components: List[Component]
    factor_checks: Dict[str, bool]
    notes: List[str] = field(default_factory=list)


def _conic_sample(kind: str):
    """Rational parametrisations of the circles/conics used by the pencil."""
    def pythagoras(m, n):
        m, n = sc(m), sc(n)
        return m * m + n * n, m * m - n * n, 2 * m * n
    i = ExactScalar.i()

    if kind == "C1p":
        return lambda m, n: ProjPoint(Z, (lambda z0, z2, x: (z0, z0, z2, z2, x))(
            *pythagoras(m, n)))
    if kind == "C1m":
        return lambda m, n: ProjPoint(Z, (lambda z0, z2, x: (z0, z0, z2, -z2, x))(
            *pythagoras(m, n)))
    if kind == "E1p":
        return lambda m, n: ProjPoint(Z, (lambda z3, z1, z2: (sc(0), z1, z2, z3, i * z2))(
            *pythagoras(m, n)))
    if kind == "E1m":
        return lambda m, n: ProjPoint(Z, (lambda z3, z1, z2: (sc(0), z1, z2, z3, -i * z2))(
            *pythagoras(m, n)))
    if kind == "E2p":
        return lambda m, n: ProjPoint(Z, (lambda z2, z0, z3: (z0, sc(0), z2, z3, i * z3))(
            *pythagoras(m, n)))
    if kind == "E2m":
        return lambda m, n: ProjPoint(Z, (lambda z2, z0, z3: (z0, sc(0), z2, z3, -i * z3))(
            *pythagoras(m, n)))
    raise ValueError(kind)


def pencil_components(scenario: Scenario, case: str) -> ComponentDecomposition:
    """Named component decomposition of the degenerate pencil members.

    ``case`` is "d=0" (needs d = 0, v != 0) or "v=0" (needs v = 0, d != 0);
    the scenario must be equal-velocity.
    """
    if not scenario.is_equal_velocity:
        raise NotDegenerateCase("pencil decompositions concern the equal-velocity family")
    v, d = scenario.v12, scenario.d
    i = ExactScalar.i()
    qt_z = build_Qtilde(scenario, Z)
    p_u = build_P(scenario)
    m = HomogPoly.monomial

    if case == "d=0":
        if not d.is_zero() or v.is_zero():
            raise NotDegenerateCase("case d=0 needs d = 0 and v != 0")
        # Qtilde = v (z0 - z1) x ; P = -2v (u1 - u0) u2 (u2^2 - u0 u1)
        factor_space = (m(Z, 1, {"z0": 1}) + m(Z, -1, {"z1": 1})) * m(Z, 1, {"x": 1})
        factor_plane = ((m(U, 1, {"u1": 1}) + m(U, -1, {"u0": 1})) * m(U, 1, {"u2": 1})
                        * (m(U, 1, {"u2": 2}) + m(U, -1, {"u0": 1, "u1": 1})))
        checks = {
            "space_factorisation": qt_z.proportional(factor_space) is not None,
            "plane_factorisation": p_u.proportional(factor_plane) is not None,
        }
        space = [
            Component("C1+", Z, _conic_sample("C1p")),
            Component("C1-", Z, _conic_sample("C1m")),
        ] + [Component(name, Z, (lambda nm: lambda m_, n_: line_point(nm, m_, n_))(name))
             for name in ("l1", "l2", "l3", "l4")]
        plane = [
            Component("H", U, lambda m_, n_: proj(U, m_, m_, n_), "line u0 = u1"),
            Component("H~", U, lambda m_, n_: proj(U, m_, n_, 0), "line u2 = 0"),
            Component("C", U, lambda m_, n_: proj(U, sc(m_) * m_, sc(n_) * n_, sc(m_) * n_),
                      "conic u2^2 = u0 u1"),
        ]
        return ComponentDecomposition("d=0", space, plane, checks)

    if case == "v=0":
        if not v.is_zero() or d.is_zero():
            raise NotDegenerateCase("case v=0 needs v = 0 and d != 0")
        factor_space = m(Z, 1, {"z0": 1}) * m(Z, 1, {"z1": 1})
        factor_plane = ((m(U, 1, {"u2": 2}) + m(U, 1, {"u1": 2}))
                        * (m(U, 1, {"u2": 2}) + m(U, 1, {"u0": 2})))
        checks = {
            "space_factorisation": qt_z.proportional(factor_space) is not None,
            "plane_factorisation": p_u.proportional(factor_plane) is not None,
        }
        space = [Component(nm, Z, _conic_sample(nm))
                 for nm in ("E1p", "E1m", "E2p", "E2m")]
        plane = [
            Component("K1+", U, lambda m_, n_: proj(U, m_, n_, sc(n_) * i), "one real point [1,0,0]"),
            Component("K1-", U, lambda m_, n_: proj(U, m_, n_, sc(n_) * (-i)), "one real point [1,0,0]"),
            Component("K2+", U, lambda m_, n_: proj(U, m_, n_, sc(m_) * i), "one real point [0,1,0]"),
            Component("K2-", U, lambda m_, n_: proj(U, m_, n_, sc(m_) * (-i)), "one real point [0,1,0]"),
        ]
        return ComponentDecomposition("v=0", space, plane, checks)

    raise NotDegenerateCase("case must be 'd=0' or 'v=0'")
