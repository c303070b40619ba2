import random
from fractions import Fraction

import pytest

from fdoacurves.maps import (
    DegenerateParameters, IrrationalFibre, NotOnHCF, NotOnQuadric,
    NotOnVtilde, NotOnY, NotOnZ, P_POINTS_W, ScenarioNotEqualVelocity,
    alpha, beta, build_V_tilde, cremona_rho, cremona_rho_hat, cremona_t,
    exceptional_points, membership, pi_fibre, pi_project, reduce_mod_Y,
    rho_lift, rho_project, segre, segre_local_inverse, variety_HCF,
    variety_V, variety_Y, variety_quadric,
    vtilde_chord_points,
)
from fdoacurves.model import (
    ORIGINAL_TO_W, ORIGINAL_TO_Z, Scenario, build_L, build_h,
)
from fdoacurves.polynomials import (
    CP1, HomogPoly, ORIGINAL, PLANE, Q as QFRAME, U, W, W3, Z, proj,
)
from fdoacurves.scalars import ExactScalar, sc


def y_point_from(rng):
    """A random smooth point of the ambient surface, via beta."""
    while True:
        upt = proj(U, rng.randint(1, 9), rng.randint(1, 9), rng.randint(1, 9))
        img = beta(upt)
        if img.defined:
            return upt, img.image


def hcf_point(rng, velocities=(1, 2, 3, Fraction(1, 2))):
    """An exact rational point on a space curve, solving for d."""
    while True:
        upt, wpt = y_point_from(rng)
        orig = ORIGINAL_TO_W.inverted().convert_point(wpt)
        u_, y1_, y2_, r1_, r2_ = orig.coords
        if (r1_ * r2_).is_zero():
            continue
        v11, v12, v21, v22 = (sc(v) for v in velocities)
        l1 = v11 * (u_ - y1_) - v12 * y2_
        l2 = -v21 * (u_ + y1_) - v22 * y2_
        d = (l2 * r1_ - l1 * r2_) / (r1_ * r2_)
        if d.is_zero():
            continue
        return Scenario(v11, v12, v21, v22, d), orig


# -- alpha / beta ------------------------------------------------------------------------


def test_alpha_on_l3_and_sensors():
    res = alpha(proj(W, 0, 0, 5, 7, 0))
    assert res.defined and res.image.projectively_equal(proj(U, 0, 0, 1))
    assert not alpha(proj(W, 1, 0, 0, 0, 0)).defined
    with pytest.raises(NotOnY):
        alpha(proj(W, 1, 1, 1, 1, 1))


def test_beta_collapses():
    assert beta(proj(U, 0, 1, 1)).image.projectively_equal(proj(W, 0, 0, 1, 0, 0))
    assert beta(proj(U, 1, 0, 1)).image.projectively_equal(proj(W, 0, 0, 0, 1, 0))
    assert beta(proj(U, 1, 1, 0)).image.projectively_equal(proj(W, 1, 1, 0, 0, 0))
    for bad in (proj(U, 1, 0, 0), proj(U, 0, 1, 0), proj(U, 0, 0, 1)):
        assert not beta(bad).defined


def test_alpha_beta_inverses():
    rng = random.Random(21)
    yv = variety_Y(W)
    for _ in range(100):
        upt, wpt = y_point_from(rng)
        assert yv.contains(wpt)
        back = alpha(wpt)
        assert back.defined and back.image.projectively_equal(upt)
        again = beta(back.image)
        assert again.image.projectively_equal(wpt)


def test_beta_alpha_roundtrip_example():
    upt = proj(U, 1, 2, 3)
    assert alpha(beta(upt).image).image.projectively_equal(upt)


def test_image_containment():
    rng = random.Random(22)
    for _ in range(20):
        s, orig = hcf_point(rng)
        wpt = ORIGINAL_TO_W.convert_point(orig)
        assert membership(wpt, variety_HCF(s, W))
        a = alpha(wpt)
        if a.defined:
            assert membership(a.image, variety_V(s))
            b = beta(a.image)
            assert b.defined and membership(b.image, variety_HCF(s, W))


# -- double cover -------------------------------------------------------------------------


def test_pi_fibre_cases():
    fib = pi_fibre(proj(W3, 1, 1, 1, 1))
    assert len(fib) == 2
    vals = sorted(str(f.coords[4]) for f in fib)
    assert vals == ["-i", "i"]
    assert pi_fibre(proj(W3, 1, 1, 0, 0)) == [proj(W, 1, 1, 0, 0, 0)]
    fib = pi_fibre(proj(W3, 1, -1, 1, -1))
    assert {str(f.coords[4]) for f in fib} == {"1", "-1"}
    with pytest.raises(NotOnQuadric):
        pi_fibre(proj(W3, 1, 2, 3, 4))


def test_pi_fibre_extension_and_rejection():
    pt = proj(W3, 1, 2, 1, 2)      # -w0 w3 = -2: irrational root
    fib = pi_fibre(pt)
    assert len(fib) == 2
    r = fib[0].coords[4]
    assert (r * r) == sc(-2)
    with pytest.raises(IrrationalFibre):
        pi_fibre(pt, allow_extension=False)


def test_pi_fibre_cardinality_over_branch_curve():
    rng = random.Random(23)
    for _ in range(30):
        a = proj(CP1, rng.randint(1, 9), rng.randint(0, 9))
        b = proj(CP1, rng.randint(1, 9), rng.randint(0, 9))
        q = segre(a, b)
        w0, w1, w2, w3 = q.coords
        fib = pi_fibre(q)
        if (w0 * w3).is_zero():
            assert len(fib) == 1
        else:
            assert len(fib) == 2
        for f in fib:
            assert membership(f, variety_Y(W))
            assert pi_project(f).projectively_equal(q)


# -- rho: projection and lifts ----------------------------------------------------------------


def test_rho_project_and_unique_lift():
    rng = random.Random(24)
    for _ in range(25):
        s, orig = hcf_point(rng)
        zpt = rho_project(orig, s)
        assert build_h(s).eval_point(zpt).is_zero()
        l1 = build_L(1, s, PLANE).eval_point(zpt)
        l2 = build_L(2, s, PLANE).eval_point(zpt)
        lifts = rho_lift(zpt, s)
        # rho_project . rho_lift is the identity on Z, on every lift
        for lift in lifts:
            assert rho_project(lift, s).projectively_equal(zpt)
        assert any(lift.projectively_equal(orig) for lift in lifts)
        if not (l1 * l2).is_zero():
            assert len(lifts) == 1
    with pytest.raises(NotOnHCF):
        rho_project(proj(ORIGINAL, 1, 2, 3, 4, 5), Scenario(1, 1, 1, 1, 1))


def test_rho_lift_forced_zero_radii():
    # [0, 1, i] has f1 = f2 = 0: the unique lift carries R1 = R2 = 0
    s = Scenario(1, 2, 3, Fraction(1, 2), 2)
    i = ExactScalar.i()
    lifts = rho_lift(proj(PLANE, 0, 1, i), s)
    assert len(lifts) == 1
    assert lifts[0].coords[3].is_zero() and lifts[0].coords[4].is_zero()


def test_rho_lift_at_sensor_image():
    s = Scenario(1, 2, 3, Fraction(1, 2), 2)
    lifts = rho_lift(proj(PLANE, 1, 1, 0), s)
    assert len(lifts) == 2
    for lift in lifts:
        assert lift.coords[3].is_zero()          # r1 = 0 over the sensor
    with pytest.raises(NotOnZ):
        rho_lift(proj(PLANE, 5, 2, 3), s)


def test_rho_project_of_p_points_hits_sensors():
    s = Scenario(1, 2, 3, Fraction(1, 2), 2)
    p4_z = proj(Z, 0, 1, 0, 1, 0)
    orig = ORIGINAL_TO_Z.inverted().convert_point(p4_z)
    zpt = rho_project(orig, s)
    assert zpt.projectively_equal(proj(PLANE, 1, 1, 0))


def test_rho_lift_float_mode_unique_on_traced_points():
    s = Scenario.equal_velocity(1, Fraction(1, 2))
    # off-lattice real points of Z found by the tracer have irrational radii;
    # the numeric lift enumerates the four sign choices and exactly one
    # residual survives the 1e-9 tolerance away from the linear locus
    from fdoacurves.tracer import TraceConfig, trace_branches
    from fdoacurves.maps import _rho_lift_float
    branches = trace_branches(s, TraceConfig(grid=(64, 64), refine_depth=2))
    checked = 0
    for label in ("App", "Amp"):
        for line in branches[label].polylines:
            y1, y2 = line[len(line) // 2]
            if abs(y2) < 1e-3:
                continue                  # near the linear locus L1 L2 = 0
            zfloat = proj(PLANE, 1, Fraction(y1).limit_denominator(10 ** 15),
                          Fraction(y2).limit_denominator(10 ** 15))
            lifts = _rho_lift_float(zfloat, s, tol=1e-9)
            assert len(lifts) == 1
            checked += 1
    assert checked >= 3


# -- Segre ---------------------------------------------------------------------------------------


def test_segre():
    spt = segre(proj(CP1, 1, 0), proj(CP1, 1, 0))
    assert spt.projectively_equal(proj(W3, 1, 0, 0, 0))
    spt = segre(proj(CP1, 1, 2), proj(CP1, 3, 4))
    assert spt.projectively_equal(proj(W3, 3, 4, 6, 8))
    assert membership(spt, variety_quadric())
    a, b = segre_local_inverse(spt)
    assert a.projectively_equal(proj(CP1, 1, 2)) and b.projectively_equal(proj(CP1, 3, 4))


# -- Cremona -----------------------------------------------------------------------------------


def test_cremona_preconditions():
    with pytest.raises(ScenarioNotEqualVelocity):
        cremona_t(Scenario(1, 2, 3, 4, 5))
    with pytest.raises(DegenerateParameters):
        cremona_t(Scenario.equal_velocity(1, 2))
    with pytest.raises(DegenerateParameters):
        cremona_t(Scenario.equal_velocity(1, 1))
    with pytest.raises(DegenerateParameters):
        cremona_t(Scenario.equal_velocity(1, 0))


def test_cremona_t_rational_when_possible():
    # v = 5, d = 3: discriminant 4(v^2-d^2) = 64 is a perfect square
    t = cremona_t(Scenario.equal_velocity(5, 3))
    assert t.is_gaussian()
    s = Scenario.equal_velocity(5, 3)
    assert (s.d * t * t + 2 * s.v12 * t + s.d).is_zero()


def test_vtilde_six_axis_points_and_tangent():
    ev = Scenario.equal_velocity(1, Fraction(1, 2))
    t = cremona_t(ev)
    cubic = build_V_tilde(ev, t)
    v, d = ev.v12, ev.d
    t2 = t * t
    x_p4 = t * (v * t + d) / (v * (1 + t2))
    for pt in (proj(QFRAME, 0, 1, 0), proj(QFRAME, 0, sc(1), t2 - 1),
               proj(QFRAME, 1, 0, 0), proj(QFRAME, 1, 0, -t2),
               proj(QFRAME, 1, 0, -1), proj(QFRAME, 1, x_p4, 0)):
        assert cubic.eval_point(pt).is_zero()
    # tangent line at the (q0, q2)-chart origin of [0,1,0] is the q2-axis:
    # the linear jet of the dehomogenised cubic is a multiple of q0 alone
    dq0 = cubic.partial("q0").eval_point(proj(QFRAME, 0, 1, 0))
    dq2 = cubic.partial("q2").eval_point(proj(QFRAME, 0, 1, 0))
    assert not dq0.is_zero() and dq2.is_zero()


def test_vtilde_diagonal_points():
    # [u, U, -U] on the cubic satisfies d U^2 + 2vt u U + d t^2 u^2 = 0
    ev = Scenario.equal_velocity(2, 1)
    t = cremona_t(ev)
    cubic = build_V_tilde(ev, t)
    v, d = ev.v12, ev.d
    for pt in (proj(QFRAME, 1, 1, -1), proj(QFRAME, sc(1), t * t, -(t * t))):
        assert cubic.eval_point(pt).is_zero()
        u_, U_ = pt.coords[0], pt.coords[1]
        assert (d * U_ * U_ + 2 * v * t * u_ * U_ + d * t * t * u_ * u_).is_zero()


def test_exceptional_points_pairing():
    rng = random.Random(25)
    for _ in range(5):
        v = Fraction(rng.randint(1, 9), rng.randint(1, 3))
        d = Fraction(rng.randint(1, 9), rng.randint(1, 3))
        if d * d == v * v or d * d == 4 * v * v:
            continue
        ev = Scenario.equal_velocity(v, d)
        t = cremona_t(ev)
        pts = exceptional_points(ev, t)
        assert len(pts) == 8
        counts = {1: 0, 2: 0, 3: 0, 4: 0}
        for k, (pt, target) in enumerate(pts):
            img = cremona_rho(pt, ev, t)
            assert img.projectively_equal(P_POINTS_W[target - 1])
            counts[target] += 1
            for prev, _ in pts[:k]:
                assert not pt.projectively_equal(prev)
        assert counts == {1: 2, 2: 2, 3: 2, 4: 2}


def test_cremona_rho_extension_rules():
    ev = Scenario.equal_velocity(1, Fraction(1, 2))
    t = cremona_t(ev)
    assert cremona_rho(proj(QFRAME, 0, 1, 0), ev, t).projectively_equal(P_POINTS_W[2])
    assert cremona_rho(proj(QFRAME, 1, 0, 0), ev, t).projectively_equal(P_POINTS_W[3])
    t2 = t * t
    assert cremona_rho(proj(QFRAME, 0, sc(1), t2 - 1), ev, t).projectively_equal(
        P_POINTS_W[2])
    with pytest.raises(NotOnVtilde):
        cremona_rho(proj(QFRAME, 0, 0, 1), ev, t)


def test_cremona_round_trips_on_chord_points():
    ev = Scenario.equal_velocity(1, Fraction(1, 2))
    t = cremona_t(ev)
    hcf = variety_HCF(ev, W)
    for pt in vtilde_chord_points(ev, t, 8):
        w = cremona_rho(pt, ev, t)
        assert hcf.contains(w)
        back = cremona_rho_hat(w, ev, t)
        assert back.defined and back.image.projectively_equal(pt)


def test_cremona_rho_hat_undefined_exactly_at_p():
    ev = Scenario.equal_velocity(1, Fraction(1, 2))
    t = cremona_t(ev)
    for p in P_POINTS_W:
        res = cremona_rho_hat(p, ev, t)
        assert not res.defined
    with pytest.raises(NotOnHCF):
        cremona_rho_hat(proj(W, 1, 1, 1, 1, 1), ev, t)


def test_rho_rhohat_identity_mod_surface():
    ev = Scenario.equal_velocity(2, 3)
    t = cremona_t(ev)
    w_vars = [HomogPoly.variable(W, n) for n in W.axes]
    k = w_vars[4].scale(t) - w_vars[3]
    rh = [w_vars[2] * k, (w_vars[3] * w_vars[4]).scale(t), (w_vars[4] * k).scale(t)]
    ss = rh[1] + rh[2]
    rr = [(rh[0] * rh[2] * ss * ss).scale(-1),
          (rh[1] * rh[2] * rh[2] * ss).scale(-1),
          (rh[0] * rh[0] * rh[1] * ss).scale(t * t),
          (rh[0] * rh[1] * rh[1] * rh[2]).scale(t * t),
          (rh[0] * rh[1] * rh[2] * ss).scale(t)]
    for i in range(5):
        for j in range(i + 1, 5):
            assert reduce_mod_Y(rr[i] * w_vars[j] - rr[j] * w_vars[i]).is_zero()


def test_membership_negative():
    s = Scenario(1, 2, 3, 4, 5)
    assert not membership(proj(Z, 1, 1, 1, 1, 1), variety_HCF(s, Z))
