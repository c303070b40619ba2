"""Numeric tracing of the real octic in the u = 1 chart.

Grid + local refinement + Newton polish rather than algebraic curve
tracking: the octic has multiplicity-4 real points at the sensors where
predictor-corrector methods stall, while sign-change cells plus a gradient
Newton step are robust there.  Branch labels come from the four sign-choice
functions evaluated with nonnegative radicals; their tolerance scales with
R1*R2 so the labels stay meaningful near the sensors, where all four
functions vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import NonRealScenario, Scenario, build_h, fdoa_value
from .polynomials import HomogPoly

Point2 = Tuple[float, float]
Polyline = List[Point2]

BRANCH_LABELS = ("App", "Amm", "Amp", "Apm")
BRANCH_COLORS = {"App": "red", "Amm": "darkgreen", "Amp": "navy", "Apm": "teal"}
SENSORS = ((1.0, 0.0), (-1.0, 0.0))


class EmptyWindow(RuntimeError):
    """No sign changes in the window (legitimate beyond the feasibility bound)."""


class NoBranch(ValueError):
    pass


class ValidationFailure(AssertionError):
    def __init__(self, report):
        super().__init__("FDOA validation failed at %d vertices (max dev %.3g)"
                         % (len(report.failures), report.max_deviation))
        self.report = report


@dataclass
class TraceConfig:
    window: Tuple[float, float, float, float] = (-3.0, 3.0, -3.0, 3.0)
    grid: Tuple[int, int] = (512, 512)
    refine_depth: int = 3
    zero_tol: float = 1e-10

    def __post_init__(self):
        x0, x1, y0, y1 = self.window
        if not (x1 > x0 and y1 > y0):
            raise ValueError("window is degenerate")
        if self.grid[0] < 16 or self.grid[1] < 16:
            raise ValueError("grid must be at least 16 x 16")
        if self.zero_tol <= 0:
            raise ValueError("zero_tol must be positive")


@dataclass
class TracedBranch:
    label: str
    polylines: List[Polyline] = field(default_factory=list)
    alpha: Optional[float] = None

    @property
    def color(self) -> str:
        return BRANCH_COLORS[self.label]

    def vertices(self) -> List[Point2]:
        return [pt for line in self.polylines for pt in line]

    def is_empty(self) -> bool:
        return not any(self.polylines)


@dataclass
class ValidationReport:
    label: str
    checked: int
    excluded_near_sensor: int
    max_deviation: float
    failures: List[Tuple[Point2, float]]


def _compile_plane_poly(p: HomogPoly) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Vectorised evaluator of a real (u, y1, y2) polynomial on the u = 1 chart."""
    terms = []
    max1 = max2 = 0
    for (eu, e1, e2), coeff in p.terms.items():
        if not coeff.is_real_value():
            raise NonRealScenario("polynomial has non-real coefficients")
        terms.append((float(coeff.re), e1, e2))
        max1 = max(max1, e1)
        max2 = max(max2, e2)

    def evaluate(y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        p1 = [np.ones_like(y1)]
        for _ in range(max1):
            p1.append(p1[-1] * y1)
        p2 = [np.ones_like(y2)]
        for _ in range(max2):
            p2.append(p2[-1] * y2)
        acc = np.zeros_like(y1)
        for c, e1, e2 in terms:
            acc = acc + c * p1[e1] * p2[e2]
        return acc

    return evaluate


class _OcticField:
    """h(1, y1, y2) and its gradient as fast callables."""

    def __init__(self, scenario: Scenario):
        h = build_h(scenario)
        self.f = _compile_plane_poly(h)
        self.fx = _compile_plane_poly(h.partial("y1"))
        self.fy = _compile_plane_poly(h.partial("y2"))

    def polish(self, x: float, y: float, zero_tol: float,
               iters: int = 40) -> Optional[Point2]:
        for _ in range(iters):
            v = float(self.f(x, y))
            gx = float(self.fx(x, y))
            gy = float(self.fy(x, y))
            norm = math.hypot(gx, gy)
            if abs(v) <= zero_tol * (1.0 + norm):
                return (x, y)
            if norm == 0.0:
                break
            step = v / (norm * norm)
            x -= step * gx
            y -= step * gy
        v = float(self.f(x, y))
        norm = math.hypot(float(self.fx(x, y)), float(self.fy(x, y)))
        if abs(v) <= zero_tol * (1.0 + norm):
            return (x, y)
        return None


# marching squares: segment endpoints as pairs of cell-edge slots.
# edges are numbered 0: bottom, 1: right, 2: top, 3: left.
_MS_TABLE: Dict[int, List[Tuple[int, int]]] = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    8: [(2, 3)], 7: [(2, 3)],
    3: [(3, 1)], 12: [(3, 1)],
    6: [(0, 2)], 9: [(0, 2)],
    # 5 and 10 are the ambiguous saddles, resolved by the centre sample
}


def trace_Z(scenario: Scenario, cfg: Optional[TraceConfig] = None,
            allow_empty: bool = False) -> List[Polyline]:
    """Marching-squares contour of the octic with refinement and polishing.

    Every returned vertex satisfies |h| <= zero_tol * (1 + |grad h|).
    Raises EmptyWindow when no sign change exists (unless allow_empty).
    """
    if not scenario.is_real:
        raise NonRealScenario("tracing needs a real scenario")
    cfg = cfg or TraceConfig()
    field_ = _OcticField(scenario)
    x0, x1, y0, y1 = cfg.window
    nx, ny = cfg.grid
    sub = 1 << cfg.refine_depth
    fine_nx, fine_ny = nx * sub, ny * sub
    hx = (x1 - x0) / fine_nx
    hy = (y1 - y0) / fine_ny

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    grid = field_.f(xs[:, None], ys[None, :])
    pos = grid > 0
    cell_mix = (pos[:-1, :-1] | pos[1:, :-1] | pos[1:, 1:] | pos[:-1, 1:]) & ~(
        pos[:-1, :-1] & pos[1:, :-1] & pos[1:, 1:] & pos[:-1, 1:])
    flagged = np.argwhere(cell_mix)
    if flagged.size == 0:
        if allow_empty:
            return []
        raise EmptyWindow("no sign changes of h in the window")

    # evaluate the refined corner grids of all flagged cells in one batch
    m = sub + 1
    off = np.arange(m)
    cx = x0 + (flagged[:, 0][:, None] * sub + off[None, :]) * hx     # (ncell, m)
    cy = y0 + (flagged[:, 1][:, None] * sub + off[None, :]) * hy
    vals = field_.f(cx[:, :, None], cy[:, None, :])                  # (ncell, m, m)

    verts: Dict[Tuple[int, int, str], Point2] = {}
    edges: List[Tuple[Tuple[int, int, str], Tuple[int, int, str]]] = []

    def edge_vertex(kind: str, gi: int, gj: int, va: float, vb: float) -> Tuple[int, int, str]:
        key = (gi, gj, kind)
        if key not in verts:
            va, vb = float(va), float(vb)
            if va == vb:
                t = 0.5
            else:
                t = min(max(va / (va - vb), 0.0), 1.0)
            px = x0 + gi * hx
            py = y0 + gj * hy
            if kind == "h":
                verts[key] = (float(px + t * hx), float(py))
            else:
                verts[key] = (float(px), float(py + t * hy))
        return key

    for k in range(flagged.shape[0]):
        ci, cj = flagged[k]
        v = vals[k]
        vp = v > 0
        mix = (vp[:-1, :-1] | vp[1:, :-1] | vp[1:, 1:] | vp[:-1, 1:]) & ~(
            vp[:-1, :-1] & vp[1:, :-1] & vp[1:, 1:] & vp[:-1, 1:])
        for li, lj in np.argwhere(mix):
            gi = int(ci) * sub + int(li)
            gj = int(cj) * sub + int(lj)
            c00, c10 = v[li, lj], v[li + 1, lj]
            c11, c01 = v[li + 1, lj + 1], v[li, lj + 1]
            code = ((c00 > 0) * 1 + (c10 > 0) * 2 + (c11 > 0) * 4 + (c01 > 0) * 8)
            if code in (0, 15):
                continue
            # edge slots: 0 bottom (h, gi, gj), 1 right (v, gi+1, gj),
            #             2 top (h, gi, gj+1), 3 left (v, gi, gj)
            slot = {
                0: lambda: edge_vertex("h", gi, gj, c00, c10),
                1: lambda: edge_vertex("v", gi + 1, gj, c10, c11),
                2: lambda: edge_vertex("h", gi, gj + 1, c01, c11),
                3: lambda: edge_vertex("v", gi, gj, c00, c01),
            }
            if code in (5, 10):
                centre = float(field_.f(x0 + (gi + 0.5) * hx, y0 + (gj + 0.5) * hy))
                if code == 5:
                    pairs = [(0, 1), (2, 3)] if centre > 0 else [(0, 3), (1, 2)]
                else:
                    pairs = [(0, 3), (1, 2)] if centre > 0 else [(0, 1), (2, 3)]
            else:
                pairs = _MS_TABLE[code]
            for a, b in pairs:
                edges.append((slot[a](), slot[b]()))

    if not edges:
        if allow_empty:
            return []
        raise EmptyWindow("no crossing segments found")

    # polish each unique vertex once; vertices that cannot meet the residual
    # bound (essentially exactly at the sensors) are dropped
    polished: Dict[Tuple[int, int, str], Optional[Point2]] = {}
    for key, (px, py) in verts.items():
        polished[key] = field_.polish(px, py, cfg.zero_tol)

    # stitch segments into polylines
    adj: Dict[Tuple[int, int, str], List[Tuple[int, int, str]]] = {}
    for a, b in edges:
        if a == b:
            continue
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    unused = {tuple(sorted((a, b))) for a, b in edges if a != b}

    def walk(start, nxt):
        chain = [start, nxt]
        unused.discard(tuple(sorted((start, nxt))))
        while True:
            cur = chain[-1]
            step = None
            for cand in adj.get(cur, ()):
                if tuple(sorted((cur, cand))) in unused:
                    step = cand
                    break
            if step is None:
                return chain
            unused.discard(tuple(sorted((cur, step))))
            chain.append(step)

    chains = []
    endpoints = [k for k, nb in adj.items() if len(nb) == 1]
    for k in endpoints:
        for nb in adj[k]:
            if tuple(sorted((k, nb))) in unused:
                chains.append(walk(k, nb))
    while unused:
        a, b = next(iter(unused))
        chains.append(walk(a, b))

    polylines: List[Polyline] = []
    for chain in chains:
        current: Polyline = []
        for key in chain:
            pt = polished.get(key)
            if pt is None:
                if len(current) >= 2:
                    polylines.append(current)
                current = []
            else:
                current.append(pt)
        if len(current) >= 2:
            polylines.append(current)
    if not polylines and not allow_empty:
        raise EmptyWindow("all vertices failed the residual bound")
    return polylines


# -- branch classification ----------------------------------------------------------------------


class _ScenarioFloats:
    __slots__ = ("v11", "v12", "v21", "v22", "d", "vmag")

    def __init__(self, scenario: Scenario):
        if not scenario.is_real:
            raise NonRealScenario("branch work needs a real scenario")
        self.v11 = scenario.v11.to_float()
        self.v12 = scenario.v12.to_float()
        self.v21 = scenario.v21.to_float()
        self.v22 = scenario.v22.to_float()
        self.d = scenario.d.to_float()
        self.vmag = (math.hypot(self.v11, self.v12)
                     + math.hypot(self.v21, self.v22) + abs(self.d))


def _classify_batch(pts: Sequence[Point2], sf: _ScenarioFloats, tol: float,
                    sensor_eps: float, force: bool = False) -> List[List[str]]:
    """Label sets per point; with force, an off-tolerance point gets the
    label of its smallest branch function instead of no label (used for
    contour vertices, which lie on the curve by construction)."""
    arr = np.asarray(pts, dtype=float)
    y1, y2 = arr[:, 0], arr[:, 1]
    r1 = np.hypot(1.0 - y1, y2)
    r2 = np.hypot(1.0 + y1, y2)
    l1 = sf.v11 * (1.0 - y1) - sf.v12 * y2
    l2 = -sf.v21 * (1.0 + y1) - sf.v22 * y2
    gs = (l2 * r1 - l1 * r2 - sf.d * r1 * r2,
          -l2 * r1 + l1 * r2 - sf.d * r1 * r2,
          -l2 * r1 - l1 * r2 + sf.d * r1 * r2,
          l2 * r1 + l1 * r2 + sf.d * r1 * r2)
    scale = np.maximum(r1 * r2 * sf.vmag, 1e-300)
    near = np.minimum(r1, r2) < sensor_eps
    masks = [np.abs(g) <= tol * scale for g in gs]
    argmin = np.argmin(np.abs(np.stack(gs)), axis=0)
    out: List[List[str]] = []
    for k in range(len(arr)):
        if near[k]:
            out.append(list(BRANCH_LABELS))
            continue
        labels = [label for label, m in zip(BRANCH_LABELS, masks) if m[k]]
        if not labels and force:
            labels = [BRANCH_LABELS[int(argmin[k])]]
        out.append(labels)
    return out


def classify_branch(pt: Point2, scenario: Scenario, tol: float = 1e-7,
                    sensor_eps: float = 1e-9) -> List[str]:
    """The labels whose sign-choice function vanishes at pt (several at crossings)."""
    labels = _classify_batch([pt], _ScenarioFloats(scenario), tol, sensor_eps)[0]
    if not labels:
        raise NoBranch("point %r is not on Z(R) within tolerance" % (pt,))
    return labels


def _polish_on_g(pt: Point2, sf: _ScenarioFloats, label: str,
                 iters: int = 20) -> Point2:
    """Newton-polish a vertex on its own branch function."""
    e1, e2 = {"App": (1, 1), "Amm": (-1, -1), "Amp": (-1, 1), "Apm": (1, -1)}[label]
    v11, v12 = sf.v11, sf.v12
    v21, v22 = sf.v21, sf.v22
    d = sf.d
    x, y = pt
    for _ in range(iters):
        q1 = math.hypot(1.0 - x, y)
        q2 = math.hypot(1.0 + x, y)
        if q1 < 1e-12 or q2 < 1e-12:
            return (x, y)
        rho1, rho2 = e1 * q1, e2 * q2
        l1 = v11 * (1.0 - x) - v12 * y
        l2 = -v21 * (1.0 + x) - v22 * y
        g = l2 * rho1 - l1 * rho2 - d * rho1 * rho2
        dr1 = ((x - 1.0) / q1, y / q1)
        dr2 = ((x + 1.0) / q2, y / q2)
        gx = (-v21 * rho1 + l2 * e1 * dr1[0] + v11 * rho2 - l1 * e2 * dr2[0]
              - d * (e1 * dr1[0] * rho2 + rho1 * e2 * dr2[0]))
        gy = (-v22 * rho1 + l2 * e1 * dr1[1] + v12 * rho2 - l1 * e2 * dr2[1]
              - d * (e1 * dr1[1] * rho2 + rho1 * e2 * dr2[1]))
        norm2 = gx * gx + gy * gy
        if norm2 == 0.0 or abs(g) < 1e-15 * (1.0 + math.sqrt(norm2)):
            return (x, y)
        x -= g * gx / norm2
        y -= g * gy / norm2
    return (x, y)


def trace_branches(scenario: Scenario, cfg: Optional[TraceConfig] = None,
                   tol: float = 1e-7, allow_empty: bool = False
                   ) -> Dict[str, TracedBranch]:
    """Trace the octic and split the contour into the four labelled branches."""
    polylines = trace_Z(scenario, cfg, allow_empty=allow_empty)
    sf = _ScenarioFloats(scenario)
    alpha = None
    if scenario.is_equal_velocity and not scenario.v12.is_zero():
        alpha = (scenario.d / scenario.v12).to_float()
    branches = {label: TracedBranch(label, [], alpha) for label in BRANCH_LABELS}
    for line in polylines:
        labelled = _classify_batch(line, sf, tol, 1e-9, force=True)
        for label in BRANCH_LABELS:
            run: Polyline = []
            for pt, labs in zip(line, labelled):
                if label in labs:
                    run.append(_polish_on_g(pt, sf, label))
                else:
                    if len(run) >= 2:
                        branches[label].polylines.append(run)
                    run = []
            if len(run) >= 2:
                branches[label].polylines.append(run)
    return branches


def validate_A0(scenario: Scenario, branch: TracedBranch, tol: float = 1e-6,
                sensor_exclusion: float = 1e-6) -> ValidationReport:
    """Check |FDOA(y) - d| <= tol on every branch vertex away from the sensors.

    The physical isocurve excludes the sensor points themselves, so vertices
    within ``sensor_exclusion`` of a sensor are skipped (and counted).
    """
    if branch.label != "App":
        raise ValueError("the physical isocurve is the App branch")
    d = scenario.d.to_float()
    checked = excluded = 0
    max_dev = 0.0
    failures: List[Tuple[Point2, float]] = []
    for pt in branch.vertices():
        if any(math.hypot(pt[0] - sx, pt[1] - sy) < sensor_exclusion
               for sx, sy in SENSORS):
            excluded += 1
            continue
        dev = abs(fdoa_value(pt, scenario) - d)
        checked += 1
        max_dev = max(max_dev, dev)
        if dev > tol:
            failures.append((pt, dev))
    report = ValidationReport(branch.label, checked, excluded, max_dev, failures)
    if failures:
        raise ValidationFailure(report)
    return report


# -- geometry helpers -----------------------------------------------------------------------------

def polyline_diameter(line: Sequence[Point2]) -> float:
    pts = np.asarray(line, dtype=float)
    if len(pts) > 2000:
        pts = pts[:: len(pts) // 2000 + 1]
    if len(pts) < 2:
        return 0.0
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.max()))


def branch_max_diameter(branch: TracedBranch) -> float:
    if branch.is_empty():
        return 0.0
    return max(polyline_diameter(line) for line in branch.polylines)


def vertices_off_sensors(branch: TracedBranch, radius: float) -> List[Point2]:
    out = []
    for pt in branch.vertices():
        if all(math.hypot(pt[0] - sx, pt[1] - sy) > radius for sx, sy in SENSORS):
            out.append(pt)
    return out


# -- output -----------------------------------------------------------------------------------------


def emit_svg(branches: Dict[str, TracedBranch], path: str,
             window: Tuple[float, float, float, float] = (-3.0, 3.0, -3.0, 3.0),
             size: int = 640, title: Optional[str] = None) -> None:
    """Static SVG with the four branch colours and sensor markers at (+-1, 0)."""
    x0, x1, y0, y1 = window
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def to_px(pt: Point2) -> Tuple[float, float]:
        return ((pt[0] - x0) * sx, (y1 - pt[1]) * sy)

    lines = ['<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             'width="%d" height="%d" viewBox="0 0 %d %d">' % (size, size, size, size),
             '<rect width="%d" height="%d" fill="white"/>' % (size, size)]
    if title:
        lines.append('<title>%s</title>' % title)
    for label in BRANCH_LABELS:
        branch = branches.get(label)
        if branch is None:
            continue
        for line in branch.polylines:
            pts = " ".join("%.4f,%.4f" % to_px(p) for p in line)
            lines.append('<polyline fill="none" stroke="%s" stroke-width="1.2" '
                         'points="%s"/>' % (branch.color, pts))
    for sxn, syn in SENSORS:
        px, py = to_px((sxn, syn))
        lines.append('<circle cx="%.4f" cy="%.4f" r="4" fill="black"/>' % (px, py))
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_csv(branches: Dict[str, TracedBranch], path: str) -> None:
    """Columns y1,y2,branch,alpha; a blank line separates polylines."""
    rows = ["y1,y2,branch,alpha"]
    for label in BRANCH_LABELS:
        branch = branches.get(label)
        if branch is None:
            continue
        alpha = "" if branch.alpha is None else repr(branch.alpha)
        for line in branch.polylines:
            for y1v, y2v in line:
                rows.append("%r,%r,%s,%s" % (y1v, y2v, label, alpha))
            rows.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows).rstrip("\n") + "\n")


def load_csv(path: str) -> Dict[str, TracedBranch]:
    branches: Dict[str, TracedBranch] = {}
    current: Polyline = []
    current_label: Optional[str] = None

    def flush():
        nonlocal current
        if current_label is not None and len(current) >= 2:
            branches[current_label].polylines.append(current)
        current = []

    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        assert header.strip() == "y1,y2,branch,alpha"
        for raw in fh:
            line = raw.strip()
            if not line:
                flush()
                continue
            y1s, y2s, label, alphas = line.split(",")
            if label not in branches:
                branches[label] = TracedBranch(
                    label, [], float(alphas) if alphas else None)
            if current_label != label:
                flush()
            current_label = label
            current.append((float(y1s), float(y2s)))
    flush()
    return branches
