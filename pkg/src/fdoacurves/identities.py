"""The exact identity suite.

Each identity is a named check over a seeded random scenario; all hold with
zero tolerance.  A check can be run in corrupted mode, which injects a
wrong coefficient into one side and must make the check fail -- the
negative control used by the command line.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .maps import (
    P_POINTS_W, alpha, beta, build_V_tilde, cremona_rho, cremona_rho_hat,
    cremona_t, exceptional_points, reduce_mod_Y, variety_Y,
    vtilde_chord_points,
)
from .model import (
    ORIGINAL_TO_W, ORIGINAL_TO_Z, W_TO_Z,
    Scenario, build_P, build_Q, build_Q1, build_Q2, build_Qtilde,
    build_g, build_h, random_equal_velocity, random_scenario,
    restrict_to_plane, substitute_r_squares,
)
from .polynomials import (
    HomogPoly, ORIGINAL, ProjPoint, Q as QFRAME, U, W, Z, poly_reduce, proj,
)
from .scalars import sc


@dataclass
class IdentityResult:
    name: str
    passed: bool
    detail: str = ""

    def as_record(self) -> Dict[str, object]:
        return {"identity": self.name, "passed": self.passed, "detail": self.detail}


def _bump(p: HomogPoly) -> HomogPoly:
    """Corrupt one coefficient (the lexicographically largest term)."""
    expo = max(p.terms)
    terms = dict(p.terms)
    terms[expo] = terms[expo] + 1
    return HomogPoly(p.frame, terms)


def _rand_upoint(rng) -> ProjPoint:
    return proj(U, rng.randint(1, 9), rng.randint(1, 9), rng.randint(1, 9))


# -- individual identities --------------------------------------------------------------


def check_frame_coherence_w(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """W-frame forms of Q1, Q2, Qtilde match the substituted originals."""
    pairs = [
        (ORIGINAL_TO_W.convert_poly(build_Q1(ORIGINAL)), build_Q1(W), sc(1)),
        (ORIGINAL_TO_W.convert_poly(build_Q2(ORIGINAL)), build_Q2(W), sc(1)),
        (ORIGINAL_TO_W.convert_poly(build_Qtilde(s, ORIGINAL)), build_Qtilde(s, W),
         sc(Fraction(1, 4))),
    ]
    if corrupt:
        sub, target, ratio = pairs[-1]
        pairs[-1] = (sub, _bump(target), ratio)
    for sub, target, ratio in pairs:
        if sub.proportional(target) != ratio:
            return IdentityResult("frame-coherence-w", False,
                                  "substituted form does not match the W-frame form")
    return IdentityResult("frame-coherence-w", True)


def check_frame_coherence_z(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """Z-frame forms match; includes Q itself under the w -> z substitution."""
    sixteenth = sc(Fraction(1, 16))
    pairs = [
        (ORIGINAL_TO_Z.convert_poly(build_Q1(ORIGINAL)), build_Q1(Z), sixteenth),
        (ORIGINAL_TO_Z.convert_poly(build_Q2(ORIGINAL)), build_Q2(Z), sixteenth),
        (W_TO_Z.convert_poly(build_Q(W)), build_Q(Z), sixteenth),
        (ORIGINAL_TO_Z.convert_poly(build_Qtilde(s, ORIGINAL)), build_Qtilde(s, Z),
         sixteenth),
    ]
    if corrupt:
        sub, target, ratio = pairs[-1]
        pairs[-1] = (sub, _bump(target), ratio)
    for sub, target, ratio in pairs:
        if sub.proportional(target) != ratio:
            return IdentityResult("frame-coherence-z", False,
                                  "substituted form does not match the Z-frame form")
    return IdentityResult("frame-coherence-z", True)


def check_coordinate_roundtrip(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """Substituting by M then by M^-1 returns the original polynomial exactly."""
    qt = build_Qtilde(s, ORIGINAL)
    for tr in (ORIGINAL_TO_W, ORIGINAL_TO_Z):
        back = tr.inverted().convert_poly(tr.convert_poly(qt))
        if corrupt:
            back = _bump(back)
        if back != qt:
            return IdentityResult("coordinate-roundtrip", False,
                                  "round trip through %s is not the identity" % tr.name)
    return IdentityResult("coordinate-roundtrip", True)


def check_q_difference(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """Q2 - Q1 maps onto the quadric polynomial (up to the fixed scale)."""
    diff = build_Q2(ORIGINAL) - build_Q1(ORIGINAL)
    target = build_Q(W)
    if corrupt:
        target = _bump(target)
    ratio = ORIGINAL_TO_W.convert_poly(diff).proportional(target)
    ok = ratio is not None and not ratio.is_zero()
    return IdentityResult("q-difference", ok,
                          "" if ok else "Q2 - Q1 does not match w0w3 - w1w2")


def check_a_sum(s: Scenario, rng, corrupt=False) -> IdentityResult:
    total = s.a1 + s.a2 + s.a3 + s.a4
    if corrupt:
        total = total + 1
    return IdentityResult("a-sum-zero", total.is_zero(),
                          "" if total.is_zero() else "a1+a2+a3+a4 = %s" % total)


def check_alpha_beta(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """alpha . beta = id off the coordinate lines; beta . alpha = id off the lines."""
    for _ in range(4):
        upt = _rand_upoint(rng)
        img = beta(upt)
        if not img.defined or not variety_Y(W).contains(img.image):
            return IdentityResult("alpha-beta-roundtrip", False, "beta image left Y")
        back = alpha(img.image)
        target = upt
        if corrupt:
            target = proj(U, *(c + 1 for c in upt.coords))
        if not back.defined or not back.image.projectively_equal(target):
            return IdentityResult("alpha-beta-roundtrip", False,
                                  "alpha(beta(u)) != u at %r" % (upt,))
        again = beta(back.image)
        if not again.defined or not again.image.projectively_equal(img.image):
            return IdentityResult("alpha-beta-roundtrip", False,
                                  "beta(alpha(y)) != y at %r" % (img.image,))
    return IdentityResult("alpha-beta-roundtrip", True)


def check_p_pullback(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """P(w3 x1, w2 x1, w2 w3) = w2^3 w3^3 (A x1 + C) modulo the surface relations."""
    p = build_P(s)
    w2 = HomogPoly.variable(W, "w2")
    w3 = HomogPoly.variable(W, "w3")
    x1 = HomogPoly.variable(W, "x1")
    images = [w3 * x1, w2 * x1, w2 * w3]
    lhs = p.compose(images, W)
    rhs = (w2 ** 3) * (w3 ** 3) * build_Qtilde(s, W)
    if corrupt:
        rhs = _bump(rhs)
    ok = reduce_mod_Y(lhs - rhs).is_zero()
    return IdentityResult("p-pullback-alphaonHC", ok,
                          "" if ok else "pullback does not reduce to zero mod (Q, Q1)")


def check_qtilde_pushforward(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """Qtilde(W) composed with beta equals u0 u1 P, exactly."""
    u0 = HomogPoly.variable(U, "u0")
    u1 = HomogPoly.variable(U, "u1")
    u2 = HomogPoly.variable(U, "u2")
    images = [-u0 * u1 * u1, -u0 * u0 * u1, u1 * u2 * u2, u0 * u2 * u2, u0 * u1 * u2]
    lhs = build_Qtilde(s, W).compose(images, U)
    rhs = u0 * u1 * build_P(s)
    if corrupt:
        rhs = _bump(rhs)
    ok = lhs == rhs
    return IdentityResult("qtilde-beta-pushforward", ok,
                          "" if ok else "Qtilde o beta != u0 u1 P")


def check_h_factorization(s: Scenario, rng, corrupt=False) -> IdentityResult:
    """g1 g2 g3 g4 with r_j^2 -> f_j reproduces the octic exactly."""
    prod = build_g(s, 1) * build_g(s, 2) * build_g(s, 3) * build_g(s, 4)
    lhs = restrict_to_plane(substitute_r_squares(prod))
    rhs = build_h(s)
    if corrupt:
        rhs = _bump(rhs)
    ok = lhs == rhs
    return IdentityResult("h-factorization", ok,
                          "" if ok else "g-product does not reproduce h")


def _rho_polys(t) -> List[HomogPoly]:
    q0 = HomogPoly.variable(QFRAME, "q0")
    q1 = HomogPoly.variable(QFRAME, "q1")
    q2 = HomogPoly.variable(QFRAME, "q2")
    ssum = q1 + q2
    t2 = t * t
    return [(q0 * q2 * ssum * ssum).scale(-1), (q1 * q2 * q2 * ssum).scale(-1),
            (q0 * q0 * q1 * ssum).scale(t2), (q0 * q1 * q1 * q2).scale(t2),
            (q0 * q1 * q2 * ssum).scale(t)]


def check_cremona_rhohat_rho(ev: Scenario, rng, corrupt=False) -> IdentityResult:
    """rho_hat(rho(q)) = t^4 q0^2 q1^2 q2^2 (q1+q2) * q as polynomials."""
    t = cremona_t(ev)
    rho = _rho_polys(t)
    k = rho[4].scale(t) - rho[3]                    # t x1 - w3 on the image
    comp = [rho[2] * k, (rho[3] * rho[4]).scale(t), (rho[4] * k).scale(t)]
    q_vars = [HomogPoly.variable(QFRAME, n) for n in QFRAME.axes]
    lam = (q_vars[0] * q_vars[0] * q_vars[1] * q_vars[1] * q_vars[2] * q_vars[2]
           * (q_vars[1] + q_vars[2])).scale(t ** 4)
    if corrupt:
        lam = _bump(lam)
    for i in range(3):
        if comp[i] != lam * q_vars[i]:
            return IdentityResult("cremona-rhohat-rho", False,
                                  "coordinate %d does not factor through lambda" % i)
    # spot-check the identity at exact curve points produced by chords
    for pt in vtilde_chord_points(ev, t, 3):
        image = cremona_rho(pt, ev, t)
        back = cremona_rho_hat(image, ev, t)
        if not back.defined or not back.image.projectively_equal(pt):
            return IdentityResult("cremona-rhohat-rho", False,
                                  "round trip failed at %r" % (pt,))
    return IdentityResult("cremona-rhohat-rho", True)


def check_cremona_rho_rhohat(ev: Scenario, rng, corrupt=False) -> IdentityResult:
    """rho(rho_hat(w)) is proportional to w modulo (Q, Q1)."""
    t = cremona_t(ev)
    w_vars = [HomogPoly.variable(W, n) for n in W.axes]
    k = w_vars[4].scale(t) - w_vars[3]
    rh = [w_vars[2] * k, (w_vars[3] * w_vars[4]).scale(t), (w_vars[4] * k).scale(t)]
    comp = [p.compose(rh, W) for p in _rho_polys(t)]
    if corrupt:
        comp[0] = _bump(comp[0])
    for i in range(5):
        for j in range(i + 1, 5):
            minor = comp[i] * w_vars[j] - comp[j] * w_vars[i]
            if not reduce_mod_Y(minor).is_zero():
                return IdentityResult("cremona-rho-rhohat", False,
                                      "minor (%d, %d) not in (Q, Q1)" % (i, j))
    return IdentityResult("cremona-rho-rhohat", True)


def check_rho_image_on_hcf(ev: Scenario, rng, corrupt=False) -> IdentityResult:
    """Q and Q1 vanish identically on rho; Qtilde reduces to zero mod the cubic."""
    t = cremona_t(ev)
    rho = _rho_polys(t)
    q_poly = build_Q(W).compose(rho, QFRAME)
    q1_poly = build_Q1(W).compose(rho, QFRAME)
    qt_poly = build_Qtilde(ev, W).compose(rho, QFRAME)
    cubic = build_V_tilde(ev, t)
    if corrupt:
        qt_poly = _bump(qt_poly)
    if not q_poly.is_zero() or not q1_poly.is_zero():
        return IdentityResult("rho-image-on-hcf", False, "Q or Q1 does not vanish on rho")
    ok = poly_reduce(qt_poly, [cubic]).is_zero()
    return IdentityResult("rho-image-on-hcf", ok,
                          "" if ok else "Qtilde o rho is not divisible by the cubic")


def check_exceptional_points(ev: Scenario, rng, corrupt=False) -> IdentityResult:
    """Eight distinct blown-down points mapping pairwise onto p1..p4."""
    t = cremona_t(ev)
    cubic = build_V_tilde(ev, t)
    pts = exceptional_points(ev, t)
    if corrupt:
        pts = [(pts[0][0], 2)] + pts[1:]
    seen_targets = {1: 0, 2: 0, 3: 0, 4: 0}
    for k, (pt, target) in enumerate(pts):
        if not cubic.eval_point(pt).is_zero():
            return IdentityResult("cremona-exceptional-points", False,
                                  "%r is not on the cubic" % (pt,))
        img = cremona_rho(pt, ev, t)
        if not img.projectively_equal(P_POINTS_W[target - 1]):
            return IdentityResult("cremona-exceptional-points", False,
                                  "%r does not map to p%d" % (pt, target))
        seen_targets[target] += 1
        for prev, _ in pts[:k]:
            if pt.projectively_equal(prev):
                return IdentityResult("cremona-exceptional-points", False,
                                      "coincident exceptional points")
    ok = all(n == 2 for n in seen_targets.values())
    return IdentityResult("cremona-exceptional-points", ok,
                          "" if ok else "images are not pairwise onto p1..p4")


CORE_IDENTITIES = (
    ("frame-coherence-w", check_frame_coherence_w),
    ("frame-coherence-z", check_frame_coherence_z),
    ("coordinate-roundtrip", check_coordinate_roundtrip),
    ("q-difference", check_q_difference),
    ("a-sum-zero", check_a_sum),
    ("alpha-beta-roundtrip", check_alpha_beta),
    ("p-pullback-alphaonHC", check_p_pullback),
    ("qtilde-beta-pushforward", check_qtilde_pushforward),
    ("h-factorization", check_h_factorization),
)

CREMONA_IDENTITIES = (
    ("cremona-rhohat-rho", check_cremona_rhohat_rho),
    ("cremona-rho-rhohat", check_cremona_rho_rhohat),
    ("rho-image-on-hcf", check_rho_image_on_hcf),
    ("cremona-exceptional-points", check_exceptional_points),
)

IDENTITY_NAMES = tuple(n for n, _ in CORE_IDENTITIES + CREMONA_IDENTITIES)


def run_suite(n: int = 100, seed: int = 0, corrupt: Optional[str] = None,
              cremona_rounds: Optional[int] = None) -> Tuple[bool, List[IdentityResult]]:
    """Run every identity over n seeded random scenarios.

    Returns one result per identity: a pass, or the first failure with its
    detail.  The Cremona identities run over equal-velocity scenarios; their
    round count defaults to min(n, 10) since each round is a full symbolic
    verification, uniform in the scenario.
    """
    if corrupt is not None and corrupt not in IDENTITY_NAMES:
        raise ValueError("unknown identity %r" % corrupt)
    rng = random.Random(seed)
    status: Dict[str, IdentityResult] = {
        name: IdentityResult(name, True) for name in IDENTITY_NAMES}

    def record(res: IdentityResult):
        if not res.passed and status[res.name].passed:
            status[res.name] = res

    for k in range(n):
        s = random_scenario(rng)
        for name, fn in CORE_IDENTITIES:
            record(fn(s, rng, corrupt=(corrupt == name and k == 0)))
    if cremona_rounds is None:
        cremona_rounds = min(n, 10)
    for k in range(cremona_rounds):
        ev = random_equal_velocity(rng)
        for name, fn in CREMONA_IDENTITIES:
            record(fn(ev, rng, corrupt=(corrupt == name and k == 0)))
    results = [status[name] for name in IDENTITY_NAMES]
    return all(r.passed for r in results), results
