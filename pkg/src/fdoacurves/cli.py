"""Command-line entry point.

Subcommands: check-identities, singularities, trace, dump.  Exit codes are
a stable contract: 0 success, 1 verification failure, 2 usage or parse
error.  All randomized behaviour is controlled by --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .identities import IDENTITY_NAMES, run_suite
from .maps import (
    DegenerateParameters, MapResult, ScenarioNotEqualVelocity, alpha, beta,
    build_V_tilde, cremona_rho, cremona_rho_hat, cremona_t,
    exceptional_points, variety_HCF, variety_V, variety_Y,
)
from .model import (
    Scenario, ScenarioError, build_P, build_Q, build_Q1, build_Q2,
    build_Qtilde, build_h, parse_scenario_text,
)
from .polynomials import ORIGINAL, W, Z
from .singular import (
    AssumptionViolated, NoLFactorsViolated, base_points_H, base_points_V,
    hc_singularities, pencil_components, v_singularities, y_singular_report,
    z_singularities,
)
from .tracer import (
    TraceConfig, ValidationFailure, emit_csv, emit_svg, trace_branches,
    validate_A0,
)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


@dataclass
class RunManifest:
    subcommand: str
    scenario_source: str
    seed: Optional[int]
    out_dir: Optional[str]
    formats: List[str]

    def write(self):
        if self.out_dir:
            os.makedirs(self.out_dir, exist_ok=True)
            path = os.path.join(self.out_dir, "manifest.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(asdict(self), fh, sort_keys=True, indent=1)
                fh.write("\n")


def _add_scenario_args(sub):
    sub.add_argument("--scenario", metavar="FILE", help="key=value scenario file")
    for key in ("v11", "v12", "v21", "v22", "d"):
        sub.add_argument("--" + key, metavar="Q",
                         help="exact rational, e.g. 3/7 or 0.25")
    sub.add_argument("--a", metavar="Q", default=None,
                     help="physical sensor half-separation (plot scaling only)")


def _scenario_from_args(args) -> tuple:
    if args.scenario:
        with open(args.scenario, encoding="utf-8") as fh:
            scenario, a = parse_scenario_text(fh.read())
        return scenario, a, "file:" + args.scenario
    inline = {k: getattr(args, k) for k in ("v11", "v12", "v21", "v22", "d")}
    if any(v is None for v in inline.values()):
        raise ScenarioError("provide --scenario FILE or all of --v11 --v12 --v21 --v22 --d")
    values = {k: Fraction(v) for k, v in inline.items()}
    a = Fraction(args.a) if args.a else Fraction(1)
    if a <= 0:
        raise ScenarioError("half-separation a must be positive")
    return Scenario(**values), a, "inline"


def _jsonl(fh, record: Dict):
    fh.write(json.dumps(record, sort_keys=True) + "\n")


def _out_file(args, name: str):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        return open(os.path.join(args.out, name), "w", encoding="utf-8")
    return sys.stdout


# -- check-identities ------------------------------------------------------------------------


def cmd_check_identities(args) -> int:
    ok, results = run_suite(n=args.n, seed=args.seed, corrupt=args.corrupt)
    RunManifest("check-identities", "random(n=%d)" % args.n, args.seed,
                args.out, ["jsonl"]).write()
    fh = _out_file(args, "identities.jsonl")
    try:
        for res in results:
            _jsonl(fh, res.as_record())
    finally:
        if fh is not sys.stdout:
            fh.close()
    for res in results:
        print("%-28s %s%s" % (res.name, "PASS" if res.passed else "FAIL",
                              ("  " + res.detail) if res.detail else ""))
    if not ok:
        first = next(r for r in results if not r.passed)
        print("identity verification FAILED: %s" % first.name, file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


# -- singularities ----------------------------------------------------------------------------


def _report_records(report) -> List[Dict]:
    out = []
    for sp in report.points:
        rec = sp.as_record()
        rec.update({
            "variety": report.variety,
            "scenario": report.scenario,
            "conditions_held": report.conditions_held,
            "genus": report.genus_of_desingularization,
        })
        out.append(rec)
    return out


def cmd_singularities(args) -> int:
    try:
        scenario, _, source = _scenario_from_args(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print("scenario error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    manifest = RunManifest("singularities", source, None, args.out, ["jsonl"])
    fh = _out_file(args, "singularities.jsonl")
    try:
        if scenario.is_equal_velocity and (scenario.v12.is_zero()
                                           or scenario.d.is_zero()):
            case = "v=0" if scenario.v12.is_zero() else "d=0"
            dec = pencil_components(scenario, case)
            _jsonl(fh, {"variety": "HCF", "scenario": scenario.as_dict(),
                        "pencil_case": dec.case,
                        "space_components": [c.name for c in dec.space_components],
                        "plane_components": [c.name for c in dec.plane_components],
                        "factor_checks": dec.factor_checks})
        else:
            for rec in _report_records(hc_singularities(scenario)):
                _jsonl(fh, rec)
            try:
                for rec in _report_records(v_singularities(scenario)):
                    _jsonl(fh, rec)
            except AssumptionViolated as exc:
                _jsonl(fh, {"variety": "V", "scenario": scenario.as_dict(),
                            "error": str(exc)})
            try:
                for rec in _report_records(z_singularities(scenario)):
                    _jsonl(fh, rec)
            except NoLFactorsViolated as exc:
                _jsonl(fh, {"variety": "Z", "scenario": scenario.as_dict(),
                            "error": str(exc)})
    finally:
        if fh is not sys.stdout:
            fh.close()
    manifest.write()
    return EXIT_OK


# -- trace -------------------------------------------------------------------------------------


def _alpha_sweep_values(sweep: str) -> List[Fraction]:
    try:
        start_s, end_s, step_s = sweep.split(":")
        start, end, step = Fraction(start_s), Fraction(end_s), Fraction(step_s)
    except (ValueError, ZeroDivisionError):
        raise ScenarioError("--alpha-sweep expects START:END:STEP")
    if step <= 0 or end < start:
        raise ScenarioError("--alpha-sweep needs a positive step and END >= START")
    values = []
    a = start
    while a <= end:
        values.append(a)
        a += step
    return values


def _trace_one(scenario: Scenario, args, cfg: TraceConfig, a: Fraction,
               tag: str) -> int:
    try:
        branches = trace_branches(scenario, cfg, allow_empty=True)
    except Exception as exc:
        print("trace error: %s" % exc, file=sys.stderr)
        return EXIT_VERIFICATION
    n_verts = sum(len(b.vertices()) for b in branches.values())
    if n_verts == 0:
        print("%s: no contour vertices in the window (feasibility bound)" % tag)
    try:
        report = validate_A0(scenario, branches["App"])
        print("%s: max |FDOA - d| on App = %.3g over %d vertices"
              % (tag, report.max_deviation, report.checked))
    except ValidationFailure as exc:
        print("%s: FDOA validation failed: %s" % (tag, exc), file=sys.stderr)
        return EXIT_VERIFICATION
    if a != 1:
        # rescale the normalised trace to the physical half-separation
        scale = float(a)
        for branch in branches.values():
            branch.polylines = [[(x * scale, y * scale) for (x, y) in line]
                                for line in branch.polylines]
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    w = tuple(x * float(a) for x in cfg.window)
    wrote = []
    if args.svg or not args.csv:
        path = os.path.join(out_dir, "%s.svg" % tag)
        emit_svg(branches, path, window=w, title=tag)
        wrote.append(path)
    if args.csv or not args.svg:
        path = os.path.join(out_dir, "%s.csv" % tag)
        emit_csv(branches, path)
        wrote.append(path)
    for path in wrote:
        print("wrote %s" % path)
    return EXIT_OK


def cmd_trace(args) -> int:
    cfg = TraceConfig(window=tuple(args.window), grid=tuple(args.grid),
                      refine_depth=args.refine_depth, zero_tol=args.zero_tol)
    if args.alpha_sweep:
        try:
            alphas = _alpha_sweep_values(args.alpha_sweep)
            v = Fraction(args.v)
            if v <= 0:
                raise ScenarioError("--v must be positive")
        except ScenarioError as exc:
            print("usage error: %s" % exc, file=sys.stderr)
            return EXIT_USAGE
        RunManifest("trace", "alpha-sweep:" + args.alpha_sweep, args.seed,
                    args.out, ["svg", "csv"]).write()
        status = EXIT_OK
        for alpha in alphas:
            scenario = Scenario.equal_velocity(v, alpha * v)
            tag = "trace_alpha_%s" % str(float(alpha)).replace(".", "_")
            status = max(status, _trace_one(scenario, args, cfg, Fraction(1), tag))
        return status
    try:
        scenario, a, source = _scenario_from_args(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print("scenario error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    if not scenario.is_real:
        print("trace needs a real scenario", file=sys.stderr)
        return EXIT_USAGE
    formats = ["svg", "csv"] if not (args.svg or args.csv) else (
        (["svg"] if args.svg else []) + (["csv"] if args.csv else []))
    RunManifest("trace", source, args.seed, args.out, formats).write()
    if a != 1:
        cfg = TraceConfig(window=tuple(x / float(a) for x in cfg.window),
                          grid=cfg.grid, refine_depth=cfg.refine_depth,
                          zero_tol=cfg.zero_tol)
    return _trace_one(scenario, args, cfg, a, "trace")


# -- dump ---------------------------------------------------------------------------------------


def _fixture_record(map_name: str, inp, result, residual_variety=None) -> Dict:
    rec: Dict[str, object] = {
        "map": map_name,
        "input": [str(c) for c in inp.coords],
    }
    if isinstance(result, MapResult):
        if result.defined:
            rec["output"] = [str(c) for c in result.image.coords]
            if residual_variety is not None:
                rec["variety_residuals"] = [
                    str(r) for r in residual_variety.residuals(result.image)]
        else:
            rec["output"] = None
            rec["undefined"] = result.undefined_reason
    else:
        rec["output"] = [str(c) for c in result.coords]
        if residual_variety is not None:
            rec["variety_residuals"] = [
                str(r) for r in residual_variety.residuals(result)]
    return rec


def _map_fixture_records(scenario: Scenario) -> List[Dict]:
    from .polynomials import U as UFRAME, proj

    records = []
    v_var = variety_V(scenario)
    y_var = variety_Y(W)
    for upt in (proj(UFRAME, 0, 1, 1), proj(UFRAME, 1, 0, 1), proj(UFRAME, 1, 1, 0),
                proj(UFRAME, 1, 0, 0), proj(UFRAME, 0, 1, 0), proj(UFRAME, 0, 0, 1),
                proj(UFRAME, 1, 2, 3)):
        records.append(_fixture_record("beta", upt, beta(upt), y_var))
    from .maps import P_POINTS_W
    for wpt in P_POINTS_W:
        records.append(_fixture_record("alpha", wpt, alpha(wpt), v_var))
    generic_y = beta(proj(UFRAME, 1, 2, 3)).image
    records.append(_fixture_record("alpha", generic_y, alpha(generic_y), v_var))
    try:
        t = cremona_t(scenario)
        hcf_w = variety_HCF(scenario, W)
        for qpt, target in exceptional_points(scenario, t):
            img = cremona_rho(qpt, scenario, t)
            rec = _fixture_record("cremona_rho", qpt, img, hcf_w)
            rec["blown_down_to"] = "p%d" % target
            records.append(rec)
        for wpt in P_POINTS_W:
            if hcf_w.contains(wpt):
                records.append(_fixture_record(
                    "cremona_rho_hat", wpt, cremona_rho_hat(wpt, scenario, t)))
    except (ScenarioNotEqualVelocity, DegenerateParameters):
        pass
    return records


def cmd_dump(args) -> int:
    try:
        scenario, _, source = _scenario_from_args(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print("scenario error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    RunManifest("dump", source, None, args.out, ["txt", "jsonl"]).write()
    fh = _out_file(args, "dump.txt")
    try:
        w = fh.write
        w("scenario: %s\n" % json.dumps(scenario.as_dict(), sort_keys=True))
        w("a-coefficients: a1=%s a2=%s a3=%s a4=%s\n"
          % (scenario.a1, scenario.a2, scenario.a3, scenario.a4))
        w("\n[Q1 original]  %s\n" % build_Q1(ORIGINAL).canonical_str())
        w("[Q2 original]  %s\n" % build_Q2(ORIGINAL).canonical_str())
        w("[Q1 w]         %s\n" % build_Q1(W).canonical_str())
        w("[Q w]          %s\n" % build_Q(W).canonical_str())
        w("[Q z]          %s\n" % build_Q(Z).canonical_str())
        w("[Qtilde original] %s\n" % build_Qtilde(scenario, ORIGINAL).canonical_str())
        w("[Qtilde w]     %s\n" % build_Qtilde(scenario, W).canonical_str())
        w("[Qtilde z]     %s\n" % build_Qtilde(scenario, Z).canonical_str())
        w("[P]            %s\n" % build_P(scenario).canonical_str())
        w("[h]            %s\n" % build_h(scenario).canonical_str())
        try:
            t = cremona_t(scenario)
            w("\n[t]            root of d t^2 + 2 v t + d, chosen branch +: %s\n" % t)
            w("[Vtilde]       %s\n" % build_V_tilde(scenario, t).canonical_str())
            w("[exceptional points]\n")
            for pt, target in exceptional_points(scenario, t):
                w("  %s -> p%d\n" % (pt, target))
        except (ScenarioNotEqualVelocity, DegenerateParameters) as exc:
            w("\n[Vtilde]       unavailable: %s\n" % exc)
        w("\n[Y singular points (w-frame)]\n")
        for sp in y_singular_report().points:
            w("  %s\n" % (sp.point,))
        w("[H base points (z-frame)]\n")
        for pt in base_points_H():
            w("  %s\n" % (pt,))
        w("[V base points]\n")
        for pt in base_points_V():
            w("  %s\n" % (pt,))
    finally:
        if fh is not sys.stdout:
            fh.close()
    if args.out:
        with open(os.path.join(args.out, "map_fixtures.jsonl"), "w",
                  encoding="utf-8") as mf:
            for rec in _map_fixture_records(scenario):
                _jsonl(mf, rec)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fdoacurves",
        description="Exact geometry of two-sensor FDOA curves: identity "
                    "verification, singularity reports, isocurve tracing, dumps.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-identities", help="run the exact identity suite")
    p.add_argument("--n", type=int, default=100, metavar="N",
                   help="number of random scenarios (default 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt", choices=IDENTITY_NAMES, metavar="IDENTITY",
                   help="test mode: inject a wrong coefficient into one identity")
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(fn=cmd_check_identities)

    p = sub.add_parser("singularities", help="singularity reports for HC_F, V, Z")
    _add_scenario_args(p)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(fn=cmd_singularities)

    p = sub.add_parser("trace", help="trace the real octic and emit SVG/CSV")
    _add_scenario_args(p)
    p.add_argument("--alpha-sweep", metavar="START:END:STEP",
                   help="equal-velocity sweep over alpha = d/v")
    p.add_argument("--v", default="1", metavar="Q",
                   help="speed for --alpha-sweep (default 1)")
    p.add_argument("--window", type=float, nargs=4, default=[-3.0, 3.0, -3.0, 3.0],
                   metavar=("X0", "X1", "Y0", "Y1"))
    p.add_argument("--grid", type=int, nargs=2, default=[512, 512], metavar=("NX", "NY"))
    p.add_argument("--refine-depth", type=int, default=3)
    p.add_argument("--zero-tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--csv", action="store_true", help="write CSV only")
    p.add_argument("--svg", action="store_true", help="write SVG only")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("dump", help="canonical polynomial and fixture dumps")
    _add_scenario_args(p)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(fn=cmd_dump)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print("scenario error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
