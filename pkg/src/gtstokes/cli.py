"""Command-line interface: ``gtstokes <subcommand> [options]``.

Matrices are read from the JSON layout of :mod:`gtstokes.jsonio`. Results
go to stdout as JSON, or with ``--output PATH`` to PATH plus a CSV file
next to it (same stem, ``.csv`` suffix).
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .am import am_via_rh, gamma_am
from .caterpillar import rh_caterpillar, stokes_subdiag
from .errors import GTStokesError
from .gt import gt_coordinates
from .iso import FlowState, conservation_residuals, iso_flow, verify_mainthm
from .jsonio import csv_text, dumps, load_matrix, matrix_to_json
from .linalg import unitarity_residual
from .oracle import LinearSystem, OracleConfig, stokes_numeric
from .verify import SUITES, RunConfig, run_suite

log = logging.getLogger("gtstokes")


def _floats(text):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--input", "--matrix", dest="input", help="matrix JSON file")
    g.add_argument("--output", help="write JSON here and CSV next to it")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=None, help="matrix size for random samples")
    g.add_argument("--samples", type=int, default=None, help="number of random samples")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")
    g.add_argument("--tol-unitary", type=float, default=1e-8)
    g.add_argument("--tol-rh", type=float, default=1e-8)
    g.add_argument("--tol-oracle", type=float, default=1e-5)
    g.add_argument("--tol-gap", type=float, default=None, help="open-cone gap tolerance")
    g.add_argument("--rtol", type=float, default=1e-11)
    g.add_argument("--atol", type=float, default=1e-13)
    g.add_argument("--radius", type=float, default=None, help="oracle matching radius R")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="gtstokes", description=__doc__.splitlines()[0],
                                     epilog="Common options go after the subcommand.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gt-coords", parents=[common], help="Gelfand-Tsetlin action-angle coordinates")
    sub.add_parser("am-map", parents=[common], help="explicit Γ_AM and its unitary factors")
    sub.add_parser("rh-cat", parents=[common], help="caterpillar-point connection and ν")
    sub.add_parser("stokes-cat", parents=[common], help="caterpillar Stokes matrices")

    p = sub.add_parser("oracle", parents=[common], help="numerical Stokes data at a point u")
    p.add_argument("--u", type=_floats, required=True, help="e.g. 0,1,3")
    p.add_argument("--report", help="alias of --output")

    p = sub.add_parser("iso-flow", parents=[common], help="isomonodromy flow along a straight path")
    p.add_argument("--u-start", type=_floats, required=True)
    p.add_argument("--u-end", type=_floats, required=True)
    p.add_argument("--chunks", type=int, default=20)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--s", type=_floats, default=None, help="mainthm schedule, e.g. 10,20,40,80")

    p = sub.add_parser("verify-mainthm", parents=[common],
                       help="remainder decay along u = (0, 1, ..., s)")
    p.add_argument("--s", type=_floats, default=[10.0, 20.0, 40.0, 80.0])
    return parser


def _emit(args, payload, csv_header=None, csv_rows=None):
    text = dumps(payload)
    out = getattr(args, "report", None) or args.output
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    if csv_header is not None:
        path.with_suffix(".csv").write_text(csv_text(csv_header, csv_rows))


def _matrix(args):
    if args.input is None:
        raise SystemExit("error: --input is required for this subcommand")
    return load_matrix(args.input)


def cmd_gt_coords(args):
    A = _matrix(args)
    coords = gt_coordinates(A, gap_tol=args.tol_gap)
    rows = [(k, i + 1, float(lam), float(coords.angles[k - 1][i]) if k < A.shape[0] else "",
             float(coords.moduli[k - 1][i]) if k < A.shape[0] else "")
            for k in range(1, A.shape[0] + 1) for i, lam in enumerate(coords.actions.level(k))]
    _emit(args, coords.to_json(), ("level", "index", "action", "angle", "modulus"), rows)
    return 0


def cmd_am_map(args):
    A = _matrix(args)
    f = gamma_am(A, gap_tol=args.tol_gap)
    w = np.linalg.eigvalsh(f.gamma)
    diag = {"psi_unitarity": max(unitarity_residual(p) for p in f.psi_factors),
            "min_eigenvalue": float(w.min()),
            "two_path": float(np.linalg.norm(f.gamma - am_via_rh(A, gap_tol=args.tol_gap)))}
    payload = {"gamma": matrix_to_json(f.gamma, hermitian=True),
               "psi_factors": [matrix_to_json(p) for p in f.psi_factors],
               "diagnostics": diag}
    _emit(args, payload, ("name", "value"), list(diag.items()))
    return 0


def cmd_rh_cat(args):
    A = _matrix(args)
    res = rh_caterpillar(A, gap_tol=args.tol_gap)
    _emit(args, res.to_json(), ("name", "value"), list(res.diagnostics.items()))
    return 0


def cmd_stokes_cat(args):
    A = _matrix(args)
    res = rh_caterpillar(A, gap_tol=args.tol_gap)
    sub = stokes_subdiag(A, gap_tol=args.tol_gap)
    S = res.stokes.s_plus
    rows = [(k + 1, abs(sp - S[k, k + 1]), abs(sm - np.conj(S[k, k + 1]))) for k, (sp, sm) in enumerate(sub)]
    payload = {"s_plus": matrix_to_json(S), "s_minus": matrix_to_json(res.stokes.s_minus),
               "subdiag_closed_form": [{"s_plus": sp, "s_minus": sm} for sp, sm in sub],
               "diagnostics": dict(res.diagnostics,
                                   subdiag_residual=max((max(r[1], r[2]) for r in rows), default=0.0))}
    _emit(args, payload, ("k", "s_plus_residual", "s_minus_residual"), rows)
    return 0


def cmd_oracle(args):
    A = _matrix(args)
    cfg = OracleConfig(R=args.radius, rtol=args.rtol, atol=args.atol)
    res = stokes_numeric(LinearSystem(args.u, A), cfg)
    _emit(args, res.to_json(), ("name", "value"), list(res.residuals.items()))
    return 0


def cmd_iso_flow(args):
    A = _matrix(args)
    st = iso_flow(FlowState(np.array(args.u_start), A), np.array(args.u_end),
                  rtol=min(args.rtol, 1e-12), atol=min(args.atol, 1e-14),
                  chunks=args.chunks, keep_history=True)
    cons = conservation_residuals(A, st.Phi)
    snaps = [{"u": u.tolist(), "Phi": matrix_to_json(P, hermitian=True)} for u, P in st.history]
    payload = {"snapshots": snaps, "drift": st.drift, "conservation": cons}
    rows = []
    for u, P in st.history:
        c = conservation_residuals(A, P)
        rows.append((*[float(x) for x in u], c["spectrum"], c["diagonal"]))
    header = tuple(f"u{i + 1}" for i in range(A.shape[0])) + ("spectrum_drift", "diagonal_drift")
    _emit(args, payload, header, rows)
    return 0


def _run_config(args, default_n, default_samples):
    cfg = RunConfig(seed=args.seed, n=args.n or default_n, samples=args.samples or default_samples,
                    tol_unitary=args.tol_unitary, tol_rh=args.tol_rh, tol_oracle=args.tol_oracle,
                    gap_tol=args.tol_gap, rtol=args.rtol, atol=args.atol, radius=args.radius,
                    jobs=args.jobs)
    if getattr(args, "s", None):
        cfg.s_values = tuple(args.s)
    return cfg


_SUITE_DEFAULTS = {"gt": (4, 50), "caterpillar": (4, 50), "am": (4, 50),
                   "oracle-xcheck": (2, 3), "iso": (2, 3), "mainthm": (3, 10)}


def _print_summary(report):
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"{report.suite:>14} {c.name:<28} {c.residual:10.3e}  tol {c.tolerance:.1e}  {status}",
              file=sys.stderr)


def cmd_verify(args):
    cfg = _run_config(args, *_SUITE_DEFAULTS[args.suite])
    report = run_suite(args.suite, cfg)
    _print_summary(report)
    if report.table:
        payload = report.to_json()
        payload["table"] = [dict(zip(report.table_header, r)) for r in report.table]
        _emit(args, payload, report.table_header, report.table)
    else:
        _emit(args, report.to_json(), ("check", "residual", "tolerance", "status"), report.csv_rows())
    return 0 if report.passed else 1


def cmd_verify_mainthm(args):
    if args.input is None:
        args.suite = "mainthm"
        return cmd_verify(args)
    A = _matrix(args)
    n = A.shape[0]
    cfg = OracleConfig(R=args.radius, rtol=args.rtol, atol=args.atol)
    schedule = [np.concatenate([np.arange(n - 1, dtype=float), [s]]) for s in args.s]
    rep = verify_mainthm(A, schedule, cfg)
    payload = {"s": list(args.s), "ratio": rep.ratios.tolist(), "error": rep.errors.tolist(),
               "slope": rep.slope, "oracle_residuals": list(rep.oracle_residuals)}
    _emit(args, payload, ("ratio", "error"), rep.csv_rows())
    print(f"slope {rep.slope:.4f}", file=sys.stderr)
    return 0


COMMANDS = {"gt-coords": cmd_gt_coords, "am-map": cmd_am_map, "rh-cat": cmd_rh_cat,
            "stokes-cat": cmd_stokes_cat, "oracle": cmd_oracle, "iso-flow": cmd_iso_flow,
            "verify": cmd_verify, "verify-mainthm": cmd_verify_mainthm}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except GTStokesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
