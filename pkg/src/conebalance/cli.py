"""
Command-line front end.

    conebalance analyze --input spec.json --outdir out/
    conebalance balance --input spec.json --outdir out/ --recheck
    conebalance dual    --input spec.json --outdir out/
    conebalance verify  [--tol-accept 1e-14]

Exit codes: 0 success, 1 error (with ``error.json``), 2 success with warnings.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance, export, pipeline
from .analysis import sextactic_points
from .config import DEFAULT_TOLERANCES
from .curve_model import CurveSpec
from .errors import ConeError, FlatBetaError
from .spectral import change_grid

EXIT_OK, EXIT_ERROR, EXIT_WARN = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--outdir", type=Path, help="directory for reports (created if missing)")
    common.add_argument("--grid", type=int, metavar="N", help="grid size override (power of two)")
    common.add_argument("--tol-class", type=float, help="classification band eps_c")
    common.add_argument("--tol-beta", type=float, help="flat-beta threshold eps_beta")
    common.add_argument("--tol-ode", type=float, help="relative tolerance of the ODE integrator")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="conebalance", description=__doc__.split("\n")[1])
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("analyze", "coefficients, frame and monodromy class"),
                       ("balance", "balanced parametrization and sextactic points"),
                       ("dual", "dual curve and differential-inequality diagnostic")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--input", type=Path, required=True, help="curve spec JSON")
        if name == "balance":
            sp.add_argument("--recheck", action="store_true",
                            help="re-run the pipeline on the balanced output")
    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--tol-accept", type=float, help="replace every acceptance threshold")
    v.add_argument("--only", type=int, nargs="+", metavar="K", help="run only these criteria")
    return p


def tolerances_from(args):
    tol = DEFAULT_TOLERANCES.with_overrides(classification=args.tol_class, beta_flat=args.tol_beta,
                                            ode_rtol=args.tol_ode)
    if args.tol_ode is not None:
        tol = tol.with_overrides(ode_atol=min(tol.ode_atol, 1e-2 * args.tol_ode))
    return tol


def load_spec(path: Path, grid_override=None) -> CurveSpec:
    doc = json.loads(Path(path).read_text())
    if grid_override is not None:
        if doc.get("family") == "raw_samples" and "data" in doc:
            doc["data"] = change_grid(np.asarray(doc["data"], dtype=float), grid_override)
        doc["N"] = grid_override
    return CurveSpec.from_dict(doc)


def effective_config(args, tol, n=None, flipped=None) -> dict:
    out = {"command": args.command, "grid": n, "tolerances": tol.to_dict(), "seed": args.seed}
    if getattr(args, "input", None) is not None:
        out["input"] = str(args.input)
    if flipped is not None:
        out["orientation_flipped"] = bool(flipped)
    return out


class Writer:
    """Writes report files when an output directory was given."""

    def __init__(self, outdir):
        self.outdir = outdir
        if outdir is not None:
            Path(outdir).mkdir(parents=True, exist_ok=True)

    def __call__(self, name, text):
        if self.outdir is not None:
            (Path(self.outdir) / name).write_text(text)

    def json(self, name, obj):
        self(name, export.dumps(obj))


def _analysis_outputs(a, write, config):
    write("coefficients.csv", export.coefficients_csv(a.lift))
    write("frames.json", export.frames_json(a.frame, a.lift.orientation_flipped))
    mono = export.monodromy_report(a.monodromy, a.system)
    write.json("monodromy.json", mono)
    return {"config": config, "monodromy": mono, "gauge_residual": a.lift.c2_residual,
            "frame": {"det_defect": a.frame.det_defect, "ode_residual": a.frame.ode_residual,
                      "closure_defect": a.frame.closure_defect}}


def run_analyze(args, tol, write):
    a = pipeline.analyze(load_spec(args.input, args.grid), tol)
    config = effective_config(args, tol, a.lift.n, a.lift.orientation_flipped)
    report = _analysis_outputs(a, write, config)
    report["warnings"] = list(a.warnings)
    write.json("report.json", report)
    return report


def run_balance(args, tol, write):
    a = pipeline.analyze(load_spec(args.input, args.grid), tol)
    config = effective_config(args, tol, a.lift.n, a.lift.orientation_flipped)
    report = _analysis_outputs(a, write, config)
    res = pipeline.balance(a)
    write.json("balanced.json", dict(export.balanced_report(res), config=config))
    write("balanced.csv", export.balanced_csv(res, a.lift.orientation_flipped))
    notes = []
    try:
        sx = sextactic_points(res.beta_balanced, tol)
        sx_doc = export.sextactic_report(sx)
        write("segments.csv", export.segments_csv(sx))
    except FlatBetaError as exc:
        sx_doc = {"zeros": [], "count": 0, "segment_lengths": [], "total_length": 0.0,
                  "touch_points": [], "warnings": [], "note": f"FlatBeta: {exc}"}
        notes.append(sx_doc["note"])
    write.json("sextactic.json", dict(sx_doc, config=config))
    report.update(alpha_star=res.alpha_star, case=res.case_tag, non_unique=res.non_unique,
                  alpha_deviation=res.alpha_deviation, beta_deviation=res.beta_deviation,
                  sextactic_count=sx_doc["count"], notes=notes)
    report["warnings"] = list(res.warnings) + list(sx_doc["warnings"])
    if args.recheck:
        r = pipeline.recheck(res, tol)
        report["recheck"] = r
        print(f"recheck: alpha deviation {r['alpha_deviation']:.3e}, "
              f"shift deviation {r['shift_deviation']:.3e}")
    write.json("report.json", report)
    return report


def run_dual(args, tol, write):
    a = pipeline.analyze(load_spec(args.input, args.grid), tol)
    config = effective_config(args, tol, a.lift.n, a.lift.orientation_flipped)
    n = a.lift.n
    bases = [i * n // 4 for i in range(4)]
    d, reps = pipeline.dual(a, bases)
    write("dual.csv", export.csv_table(
        "t,z0,z1,z2,alpha_dual,beta_dual",
        (a.lift.t, d.z[:, 0], d.z[:, 1], d.z[:, 2], d.alpha_dual, d.beta_dual),
        f"N={n} orientation_flipped={str(a.lift.orientation_flipped).lower()}"))
    report = {
        "config": config,
        "duality_defect": d.duality_defect,
        "orthogonality_defect": d.orthogonality_defect,
        "alpha_dual_deviation": float(np.abs(d.alpha_dual - a.lift.alpha).max()),
        "beta_dual_deviation": float(np.abs(d.beta_dual + a.lift.beta).max()),
        "inequality": [{"t0_index": r.t0_index, "max_value": r.max_value} for r in reps],
        "warnings": list(a.warnings),
    }
    write.json("report.json", report)
    return report


def run_verify(args, tol, write):
    results = acceptance.run_all(n=args.grid or acceptance.DEFAULT_GRID, tol=tol, seed=args.seed,
                                 tol_accept=args.tol_accept,
                                 only=set(args.only) if args.only else None)
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    report = {"config": dict(effective_config(args, tol, args.grid or acceptance.DEFAULT_GRID),
                             tol_accept=args.tol_accept),
              "criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                            "detail": r.detail} for r in results]}
    write.json("acceptance.json", report)
    report["all_passed"] = passed == len(results)
    return report


COMMANDS = {"analyze": run_analyze, "balance": run_balance, "dual": run_dual, "verify": run_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    write = Writer(args.outdir)
    try:
        tol = tolerances_from(args)
        report = COMMANDS[args.command](args, tol, write)
    except (ConeError, ValueError, OSError) as exc:
        kind = "ParseError" if isinstance(exc, json.JSONDecodeError) else type(exc).__name__
        err = {"error": kind, "message": str(exc), "command": args.command}
        try:
            write.json("error.json", err)
        except OSError:
            pass
        sys.stdout.write(export.dumps(err))
        return EXIT_ERROR
    if args.command == "verify":
        return EXIT_OK if report["all_passed"] else EXIT_ERROR
    if args.outdir is None:
        sys.stdout.write(export.dumps(report))
    return EXIT_WARN if report.get("warnings") else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
