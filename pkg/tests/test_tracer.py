import math
import os
from fractions import Fraction

import pytest

from fdoacurves.model import Scenario, build_h
from fdoacurves.polynomials import HomogPoly, PLANE
from fdoacurves.tracer import (
    BRANCH_LABELS, EmptyWindow, NoBranch, TraceConfig, TracedBranch,
    ValidationFailure, branch_max_diameter, classify_branch, emit_csv,
    emit_svg, load_csv, polyline_diameter, trace_branches, trace_Z,
    validate_A0, vertices_off_sensors,
)

CFG = TraceConfig(grid=(128, 128), refine_depth=2)


def ev(alpha) -> Scenario:
    return Scenario.equal_velocity(1, Fraction(alpha).limit_denominator(64))


def test_config_validation():
    with pytest.raises(ValueError):
        TraceConfig(grid=(8, 32))
    with pytest.raises(ValueError):
        TraceConfig(window=(1.0, 1.0, -1.0, 1.0))
    with pytest.raises(ValueError):
        TraceConfig(zero_tol=0.0)


def test_trace_residual_bound():
    s = ev(0.5)
    lines = trace_Z(s, CFG)
    assert lines
    h = build_h(s)
    f = lambda y1, y2: h.eval_complex((1.0, y1, y2)).real
    for line in lines:
        for (y1, y2) in line[::7]:
            dh1 = h.partial("y1").eval_complex((1.0, y1, y2)).real
            dh2 = h.partial("y2").eval_complex((1.0, y1, y2)).real
            assert abs(f(y1, y2)) <= CFG.zero_tol * (1 + math.hypot(dh1, dh2))


def test_trace_has_loops_and_arcs_at_half():
    branches = trace_branches(ev(0.5), CFG)
    assert all(not branches[l].is_empty() for l in BRANCH_LABELS)
    # bounded loops: App diameter is small; unbounded arcs reach the window edge
    assert branch_max_diameter(branches["App"]) < 2.0
    amp_pts = branches["Amp"].vertices()
    assert max(abs(p[0]) for p in amp_pts) > 2.5 or max(abs(p[1]) for p in amp_pts) > 2.5


def test_loop_diameters_shrink():
    diams = []
    for alpha in (0.25, 0.5, 0.75, 0.95):
        branches = trace_branches(ev(alpha), CFG)
        diams.append(branch_max_diameter(branches["App"]))
    assert all(d > 0 for d in diams)
    assert all(a > b for a, b in zip(diams, diams[1:]))


def test_app_empty_between_one_and_two():
    for alpha in (1.25, 1.5):
        branches = trace_branches(ev(alpha), CFG, allow_empty=True)
        assert not vertices_off_sensors(branches["App"], 1e-3)
        assert not branches["Amp"].is_empty()
        assert not branches["Apm"].is_empty()


def test_empty_window_beyond_bound():
    with pytest.raises(EmptyWindow):
        trace_Z(ev(2.5), CFG)
    assert trace_Z(ev(2.5), CFG, allow_empty=True) == []


def test_degenerate_d0_octic_is_a_square():
    # h(v, 0) = 16 v^4 u^2 y1^2 y2^4: the real zero set in the u = 1 chart is
    # exactly the two coordinate axes, and h is nonnegative (every factor is
    # squared), so the contour exists only where grid nodes hit the axes
    s = Scenario.equal_velocity(2, 0)
    h = build_h(s)
    expected = HomogPoly.monomial(PLANE, 16 * 2 ** 4, {"u": 2, "y1": 2, "y2": 4})
    assert h == expected
    for y2 in (0.5, 1.0, 2.0):
        assert h.eval_complex((1.0, 0.0, y2)) == 0
    for y1 in (0.5, 1.0, 2.0):
        assert h.eval_complex((1.0, y1, 0.0)) == 0
    lines = trace_Z(s, CFG, allow_empty=True)
    for line in lines:
        for (y1, y2) in line:
            assert min(abs(y1), abs(y2)) < 1e-9
    # the y2-axis is among the traced pieces (nodes of the even grid hit it)
    axis_pts = [pt for line in lines for pt in line
                if abs(pt[0]) < 1e-9 and abs(pt[1]) > 1.0]
    assert axis_pts
    # on the bisector axis both perpendicular sign choices vanish, and the
    # physical value agrees with d = 0
    from fdoacurves.model import fdoa_value
    for pt in axis_pts[:5]:
        labels = classify_branch(pt, s)
        assert "App" in labels and "Amm" in labels
        assert abs(fdoa_value(pt, s)) < 1e-12


def test_classify_branch():
    s = ev(0.5)
    branches = trace_branches(s, CFG)
    pt = branches["App"].polylines[0][1]
    assert "App" in classify_branch(pt, s)
    # a symmetry point on the y2-axis with d = 0 belongs to App and Amm
    s0 = Scenario.equal_velocity(1, 0)
    labels = classify_branch((0.0, 1.3), s0)
    assert "App" in labels and "Amm" in labels
    # sensors carry every label
    assert classify_branch((1.0, 0.0), s) == list(BRANCH_LABELS)
    with pytest.raises(NoBranch):
        classify_branch((0.4, 0.9), s)


def test_reflection_symmetry_between_app_and_amm():
    branches = trace_branches(ev(0.5), CFG)
    app = branches["App"].vertices()
    amm = branches["Amm"].vertices()
    for (y1, y2) in app[::25]:
        # reflecting across the y2-axis swaps R1 and R2, hence App <-> Amm
        best = min(math.hypot(a - (-y1), b - y2) for a, b in amm)
        assert best < 5e-3


def test_branch_partition_covers_contour():
    s = ev(0.5)
    lines = trace_Z(s, CFG)
    n_contour = sum(len(line) for line in lines)
    branches = trace_branches(s, CFG)
    n_branch = sum(len(b.vertices()) for b in branches.values())
    # every contour vertex lands in at least one branch (crossings in several);
    # the run-splitting drops only isolated singletons
    assert n_branch >= 0.98 * n_contour
    single = multi = 0
    for line in lines:
        for pt in line:
            try:
                labels = classify_branch(pt, s)
            except NoBranch:
                continue
            if len(labels) == 1:
                single += 1
            else:
                multi += 1
    # away from crossings exactly one branch function vanishes
    assert single > 50 * max(multi, 1)


def test_validate_A0():
    s = ev(0.25)
    branches = trace_branches(s, CFG)
    report = validate_A0(s, branches["App"])
    assert report.checked > 100
    # traced physical-branch points reproduce the measured value to 1e-9
    assert report.max_deviation <= 1e-9
    # a deliberately bad vertex trips the failure path
    bad = TracedBranch("App", [[(0.5, 0.5), (0.6, 0.6)]], alpha=0.25)
    with pytest.raises(ValidationFailure):
        validate_A0(s, bad)


def test_emit_and_reload(tmp_path):
    s = ev(0.5)
    branches = trace_branches(s, CFG)
    svg_path = os.path.join(tmp_path, "plot.svg")
    csv_path = os.path.join(tmp_path, "plot.csv")
    emit_svg(branches, svg_path)
    emit_csv(branches, csv_path)
    text = open(svg_path).read()
    assert "<svg" in text and 'stroke="red"' in text and 'stroke="teal"' in text
    assert text.count("<circle") == 2
    loaded = load_csv(csv_path)
    for label in BRANCH_LABELS:
        assert loaded[label].polylines == branches[label].polylines
        assert loaded[label].alpha == branches[label].alpha


def test_emit_and_reload_without_alpha(tmp_path):
    # non-equal-velocity scenarios have no alpha; the CSV column stays empty
    s = Scenario(0, 1, Fraction(1, 4), 1, Fraction(1, 2))
    branches = trace_branches(s, CFG)
    path = os.path.join(tmp_path, "gen.csv")
    emit_csv(branches, path)
    loaded = load_csv(path)
    for label, branch in loaded.items():
        assert branch.alpha is None
        assert branch.polylines == branches[label].polylines


def test_emit_svg_empty_branches(tmp_path):
    path = os.path.join(tmp_path, "empty.svg")
    emit_svg({l: TracedBranch(l) for l in BRANCH_LABELS}, path)
    text = open(path).read()
    assert text.count("<circle") == 2 and "<polyline" not in text


def test_polyline_diameter():
    assert polyline_diameter([(0.0, 0.0), (3.0, 4.0)]) == 5.0
    assert polyline_diameter([(1.0, 1.0)]) == 0.0
