"""Acceptance criteria, one test per criterion.

Each test prints a single PASS line with its runtime; tolerances and
runtime budgets are pinned here and nowhere else.
"""

import math
import random
import time
from fractions import Fraction

from fdoacurves.cli import main as cli_main
from fdoacurves.identities import (
    IDENTITY_NAMES, check_alpha_beta, check_frame_coherence_w,
    check_frame_coherence_z, check_h_factorization, check_p_pullback,
    check_qtilde_pushforward, run_suite,
)
from fdoacurves.maps import (
    P_POINTS_W, cremona_rho, cremona_rho_hat, cremona_t, exceptional_points,
    beta, rho_lift, rho_project, variety_HCF, variety_Y, vtilde_chord_points,
)
from fdoacurves.model import (
    ORIGINAL_TO_W, Scenario, build_L, build_P, build_h,
    random_equal_velocity, random_scenario,
)
from fdoacurves.polynomials import (
    PLANE, U, W, Z, jacobian_rank_at, proj,
)
from fdoacurves.scalars import ExactScalar, sc
from fdoacurves.singular import (
    CUSP, NODE, P_POINTS_Z, base_points_H, base_points_V, genus_degree,
    hc_singularities, singular_points_Y, v_singularities, z_cap_G,
    z_singularities,
)
from fdoacurves.tracer import (
    BRANCH_LABELS, EmptyWindow, TraceConfig, branch_max_diameter,
    trace_branches, trace_Z, validate_A0, vertices_off_sensors,
)


def _report(name: str, t0: float, budget: float):
    dt = time.perf_counter() - t0
    print("ACCEPTANCE %-38s PASS  (%.2fs, budget %.0fs)" % (name, dt, budget))
    assert dt < budget, "runtime %.2fs exceeded the %.0fs budget" % (dt, budget)


def test_criterion_1_exact_identity_suite():
    """100 seeded random scenarios; all listed identities with zero tolerance."""
    t0 = time.perf_counter()
    rng = random.Random(20260808)
    checks = (check_frame_coherence_w, check_frame_coherence_z, check_alpha_beta,
              check_p_pullback, check_qtilde_pushforward, check_h_factorization)
    for _ in range(100):
        s = random_scenario(rng)
        for fn in checks:
            res = fn(s, rng)
            assert res.passed, (res.name, res.detail, s)
    _report("1: exact identity suite", t0, 30.0)


def test_criterion_2_fixture_points():
    """Y-singularities, H-base and V-base points with membership and rank."""
    t0 = time.perf_counter()
    y_pts = singular_points_Y()
    expected_y = [proj(W, 1, 0, 0, 0, 0), proj(W, 0, 0, 0, 1, 0),
                  proj(W, 0, 1, 0, 0, 0), proj(W, 0, 0, 1, 0, 0)]
    assert len(y_pts) == 4
    for e in expected_y:
        assert any(p.projectively_equal(e) for p in y_pts)
    surf = variety_Y(W)
    for p in y_pts:
        assert surf.contains(p)
        assert jacobian_rank_at(surf.polys, p) < 2

    h_base = base_points_H()
    v_base = base_points_V()
    assert len(h_base) == 8 and len(v_base) == 6
    i = ExactScalar.i()
    for e in (proj(Z, 0, 0, 1, 1, i), proj(Z, 0, 0, 1, -1, -i)):
        assert any(p.projectively_equal(e) for p in h_base)
    for e in (proj(U, 1, 0, 0), proj(U, 0, 1, 0), proj(U, 1, -1, i)):
        assert any(p.projectively_equal(e) for p in v_base)

    rng = random.Random(2)
    for _ in range(20):
        s = random_scenario(rng, require_generic=True)
        hcf = variety_HCF(s, Z)
        for pt in h_base:
            assert hcf.contains(pt)
            rank = jacobian_rank_at(hcf.polys, pt)
            if any(pt.projectively_equal(p) for p in P_POINTS_Z):
                assert rank < 3          # singular on every member
            else:
                assert rank == 3         # the four non-real base points are smooth
        p_quartic = build_P(s)
        for pt in v_base:
            assert p_quartic.eval_point(pt).is_zero()
        for pt in (proj(U, 1, 0, 0), proj(U, 0, 1, 0)):
            assert jacobian_rank_at([p_quartic], pt) == 0
        for pt in v_base[2:]:
            assert jacobian_rank_at([p_quartic], pt) == 1
    _report("2: fixture points", t0, 5.0)


def test_criterion_3_equal_velocity_singularity_counts():
    t0 = time.perf_counter()
    rng = random.Random(3)
    # HC_F: 4 for d^2 not in {0, 4v^2}; 5 for d = +-2v with the extra point
    for _ in range(4):
        ev = random_equal_velocity(rng)
        assert len(hc_singularities(ev).points) == 4
    rep = hc_singularities(Scenario.equal_velocity(3, 6))
    assert len(rep.points) == 5
    assert any(sp.point.projectively_equal(proj(Z, 1, -1, 0, 0, -1))
               for sp in rep.points)
    rep = hc_singularities(Scenario.equal_velocity(3, -6))
    assert len(rep.points) == 5
    assert any(sp.point.projectively_equal(proj(Z, 1, -1, 0, 0, 1))
               for sp in rep.points)

    # V: two nodes generically, two cusps at d^2 = v^2, three nodes at 4v^2
    for _ in range(3):
        ev = random_equal_velocity(rng)
        kinds = sorted(sp.kind for sp in v_singularities(ev).points)
        assert kinds == [NODE, NODE]
    assert sorted(sp.kind for sp in
                  v_singularities(Scenario.equal_velocity(2, 2)).points) == [CUSP, CUSP]
    assert sorted(sp.kind for sp in
                  v_singularities(Scenario.equal_velocity(2, -2)).points) == [CUSP, CUSP]
    for d_sign in (2, -2):
        kinds = sorted(sp.kind for sp in
                       v_singularities(Scenario.equal_velocity(2, 2 * d_sign)).points)
        assert kinds == [NODE, NODE, NODE]

    # Z: exactly the six points of the equal-velocity example
    for _ in range(3):
        ev = random_equal_velocity(rng)
        rep = z_singularities(ev)
        assert len(rep.points) == 6
        i = ExactScalar.i()
        for e in (proj(PLANE, 1, 1, 0), proj(PLANE, 1, -1, 0),
                  proj(PLANE, 1, 0, i), proj(PLANE, 1, 0, -i),
                  proj(PLANE, 0, 1, i), proj(PLANE, 0, 1, -i)):
            assert any(sp.point.projectively_equal(e) for sp in rep.points)
    _report("3: equal-velocity singularity counts", t0, 5.0)


def test_criterion_4_genus_arithmetic():
    t0 = time.perf_counter()
    assert genus_degree(4, [(2, 1), (2, 1)]) == 1
    assert genus_degree(8, [(4, 8), (4, 8), (2, 1), (2, 1), (2, 1), (2, 1)]) == 1
    assert genus_degree(4, [(2, 1), (2, 1), (2, 1)]) == 0
    assert genus_degree(3, []) == 1
    _report("4: genus arithmetic", t0, 5.0)


def test_criterion_5_cremona_suite():
    """20 equal-velocity scenarios: exceptional structure and round trips,
    exact in the t-extension field."""
    t0 = time.perf_counter()
    rng = random.Random(5)
    round_trip_points = 0
    for k in range(20):
        ev = random_equal_velocity(rng)
        t = cremona_t(ev, which=1 if k % 2 == 0 else -1)
        pts = exceptional_points(ev, t)
        assert len(pts) == 8
        counts = {1: 0, 2: 0, 3: 0, 4: 0}
        for idx, (pt, target) in enumerate(pts):
            img = cremona_rho(pt, ev, t)
            assert img.projectively_equal(P_POINTS_W[target - 1])
            counts[target] += 1
            for prev, _ in pts[:idx]:
                assert not pt.projectively_equal(prev)
        assert counts == {1: 2, 2: 2, 3: 2, 4: 2}
        for pt in vtilde_chord_points(ev, t, 3):
            image = cremona_rho(pt, ev, t)
            assert variety_HCF(ev, W).contains(image)
            back = cremona_rho_hat(image, ev, t)
            assert back.defined and back.image.projectively_equal(pt)
            round_trip_points += 1
    assert round_trip_points >= 50
    _report("5: cremona suite (%d round-trip points)" % round_trip_points, t0, 30.0)


def _exact_hcf_sample(rng):
    while True:
        upt = proj(U, rng.randint(1, 9), rng.randint(1, 9), rng.randint(1, 9))
        img = beta(upt)
        if not img.defined:
            continue
        orig = ORIGINAL_TO_W.inverted().convert_point(img.image)
        u_, y1_, y2_, r1_, r2_ = orig.coords
        if (r1_ * r2_).is_zero():
            continue
        v11 = sc(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        v12 = sc(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        v21 = sc(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        v22 = sc(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        l1 = v11 * (u_ - y1_) - v12 * y2_
        l2 = -v21 * (u_ + y1_) - v22 * y2_
        d = (l2 * r1_ - l1 * r2_) / (r1_ * r2_)
        if d.is_zero():
            continue
        try:
            s = Scenario(v11, v12, v21, v22, d)
        except Exception:
            continue
        if not (s.nonzero_v1 and s.nonzero_v2):
            continue
        return s, orig


def test_criterion_6_projection_suite():
    t0 = time.perf_counter()
    rng = random.Random(6)
    on_g = 0
    for _ in range(200):
        s, orig = _exact_hcf_sample(rng)
        zpt = rho_project(orig, s)
        assert build_h(s).eval_point(zpt).is_zero()
        lifts = rho_lift(zpt, s)
        assert any(l.projectively_equal(orig) for l in lifts)
        l1v = build_L(1, s, PLANE).eval_point(zpt)
        l2v = build_L(2, s, PLANE).eval_point(zpt)
        if (l1v * l2v).is_zero():
            on_g += 1
        else:
            assert len(lifts) == 1
    # equal-velocity intersection with the linear locus is the sensor pair
    recs, count = z_cap_G(Scenario.equal_velocity(1, Fraction(1, 2)))
    assert count == 2
    exact_pts = [r.point for r in recs if r.exact]
    assert any(p.projectively_equal(proj(PLANE, 1, 1, 0)) for p in exact_pts)
    assert any(p.projectively_equal(proj(PLANE, 1, -1, 0)) for p in exact_pts)
    for _ in range(50):
        s = random_scenario(rng, require_noLfactors=True)
        _, count = z_cap_G(s)
        assert count <= 16
    _report("6: projection suite (%d samples on G)" % on_g, t0, 60.0)


def test_criterion_7_plot_regimes():
    t0 = time.perf_counter()
    cfg = TraceConfig(grid=(160, 160), refine_depth=2)

    diameters = []
    for alpha in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        s = Scenario.equal_velocity(1, alpha)
        branches = trace_branches(s, cfg)
        for label in BRANCH_LABELS:
            assert not branches[label].is_empty(), (alpha, label)
        diameters.append(branch_max_diameter(branches["App"]))
        report = validate_A0(s, branches["App"])
        assert report.max_deviation <= 1e-6
    assert diameters[0] > diameters[1] > diameters[2] > 0

    for alpha in (Fraction(5, 4), Fraction(3, 2), Fraction(7, 4)):
        s = Scenario.equal_velocity(1, alpha)
        branches = trace_branches(s, cfg, allow_empty=True)
        assert not vertices_off_sensors(branches["App"], 1e-3), alpha
        validate_A0(s, branches["App"])

    s = Scenario.equal_velocity(1, Fraction(5, 2))
    try:
        lines = trace_Z(s, cfg)
        verts = [pt for line in lines for pt in line]
    except EmptyWindow:
        verts = []
    off = [pt for pt in verts
           if math.hypot(pt[0] - 1, pt[1]) > 1e-3 and math.hypot(pt[0] + 1, pt[1]) > 1e-3]
    assert not off
    _report("7: plot regimes", t0, 20.0)


def test_criterion_8_negative_controls(capsys):
    t0 = time.perf_counter()
    for name in IDENTITY_NAMES:
        ok, results = run_suite(n=1, seed=8, corrupt=name, cremona_rounds=1)
        assert not ok
        failed = [r for r in results if not r.passed]
        assert len(failed) == 1 and failed[0].name == name
    # the command-line surface reports the failure and exits 1
    code = cli_main(["check-identities", "--n", "1", "--corrupt", "h-factorization"])
    captured = capsys.readouterr()
    assert code == 1
    assert "h-factorization" in captured.err
    with capsys.disabled():
        _report("8: negative controls", t0, 60.0)
