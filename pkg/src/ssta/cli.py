"""Command-line front end: analyze graphs, dump gate PDFs, decompose.

Result files are JSON run reports; plot output is CSV.  All numeric
output uses shortest-round-trip formatting, files are written
atomically (temp + rename), and wall-clock timings go to the error
stream only, so result files are byte-identical across reruns.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .distributions import GaussianParams
from .gate_delay import (
    GateInputs,
    QuadratureError,
    gate_mean_closed,
    gate_pdf_exact,
    gate_pdf_independent,
    gate_pdf_weak_corr,
    gate_std,
)
from .gmm import (
    CombConfig,
    GaussianMixture,
    decompose,
    default_support,
    mixture_pdf,
    mixture_summary,
)
from .monte_carlo import McConfig, mc_graph
from .simplex import LpInfeasibleError, LpUnboundedError, PivotLimitError
from .timing_graph import (
    GraphError,
    UnsupportedCorrelationError,
    default_max_workers,
    gakeda_run,
    load_graph,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_INPUT_ERRORS = (GraphError, UnsupportedCorrelationError, ValueError, OSError)
_NUMERICAL_ERRORS = (
    QuadratureError,
    LpInfeasibleError,
    LpUnboundedError,
    PivotLimitError,
    FloatingPointError,
)


def _fail(code: int, message: str) -> int:
    print(f"ssta: error: {message}", file=sys.stderr)
    return code


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _json_dumps(obj) -> str:
    # Python float repr is shortest-round-trip, which is the contract.
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _gate_inputs_from_args(args) -> GateInputs:
    return GateInputs(
        x1=GaussianParams(args.mu1, args.sd1),
        x2=GaussianParams(args.mu2, args.sd2),
        x0=GaussianParams(args.mu0, args.sd0),
        rho=args.rho,
    )


def _add_gate_flags(sub):
    for name in ("mu1", "sd1", "mu2", "sd2", "mu0", "sd0"):
        sub.add_argument(f"--{name}", type=float, required=True)
    sub.add_argument("--rho", type=float, default=0.0)


def _mixture_entry(dist) -> list[list[float]]:
    if isinstance(dist, GaussianParams):
        return [[1.0, dist.mu, dist.sigma]]
    return [list(t) for t in dist.to_triples()]


def cmd_analyze(args) -> int:
    try:
        with open(args.graph) as fh:
            text = fh.read()
    except OSError as exc:
        return _fail(EXIT_INPUT, f"cannot read {args.graph}: {exc}")
    digest = hashlib.sha256(text.encode()).hexdigest()
    try:
        graph = load_graph(text)
    except GraphError as exc:
        return _fail(EXIT_INPUT, str(exc))

    t0 = time.perf_counter()
    try:
        result = gakeda_run(
            graph,
            comb_size=args.comb_size,
            width_factor=args.width_factor,
            weak_corr=args.weak_corr,
            max_workers=default_max_workers(),
        )
    except _NUMERICAL_ERRORS as exc:
        return _fail(EXIT_NUMERICAL, f"propagation failed: {exc}")
    except _INPUT_ERRORS as exc:
        return _fail(EXIT_INPUT, f"propagation rejected the graph: {exc}")
    except RuntimeError as exc:
        return _fail(EXIT_NUMERICAL, f"propagation failed: {exc}")
    t_prop = time.perf_counter() - t0

    report = {
        "tool": "ssta",
        "version": __version__,
        "input_digest": f"sha256:{digest}",
        "config": {
            "comb_size": args.comb_size,
            "width_factor": args.width_factor,
            "weak_corr": args.weak_corr,
            "mc_check": args.mc_check,
            "samples": args.samples,
            "seed": args.seed,
        },
        "nodes": {
            nid: {
                "moments": result.moments[nid],
                "mixture": _mixture_entry(result.arrivals[nid]),
                "decomposition_residual": result.residuals[nid],
            }
            for nid in result.visit_order
        },
        "visit_order": result.visit_order,
    }

    t_mc = 0.0
    if args.mc_check:
        t1 = time.perf_counter()
        try:
            mc = mc_graph(graph, McConfig(n_samples=args.samples, seed=args.seed))
        except UnsupportedCorrelationError as exc:
            return _fail(EXIT_INPUT, str(exc))
        t_mc = time.perf_counter() - t1
        report["mc_comparison"] = {
            sid: {
                "mc_mean": r.mean,
                "mc_std": r.std,
                "mc_skewness": r.skewness,
                "mc_kurtosis": r.kurtosis,
                "se_mean": r.se_mean,
                "se_std": r.se_std,
                "se_skewness": r.se_skewness,
                "se_kurtosis": r.se_kurtosis,
                "mean_gap": abs(result.moments[sid]["mean"] - r.mean),
                "std_gap": abs(result.moments[sid]["std"] - r.std),
            }
            for sid, r in sorted(mc.items())
        }

    try:
        _atomic_write(args.out, _json_dumps(report))
    except OSError as exc:
        return _fail(EXIT_INPUT, f"cannot write {args.out}: {exc}")
    # Timings stay on stderr so the result file is run-to-run identical.
    print(
        f"ssta: propagation {t_prop:.3f}s, mc {t_mc:.3f}s, "
        f"{len(result.visit_order)} nodes -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_gate_pdf(args) -> int:
    try:
        g = _gate_inputs_from_args(args)
    except ValueError as exc:
        return _fail(EXIT_INPUT, str(exc))
    if args.points < 1:
        return _fail(EXIT_INPUT, f"--points must be >= 1, got {args.points}")
    if args.points == 1:
        if getattr(args, "from") != args.to:
            return _fail(EXIT_INPUT, "--points 1 requires --from == --to")
        x = np.array([args.to])
    else:
        lo = getattr(args, "from")
        if not lo < args.to:
            return _fail(EXIT_INPUT, f"empty grid: from={lo} to={args.to}")
        x = np.linspace(lo, args.to, args.points)

    exact = np.atleast_1d(gate_pdf_exact(x, g))
    indep = np.atleast_1d(gate_pdf_independent(x, g))
    weak = np.atleast_1d(gate_pdf_weak_corr(x, g))

    out = sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "exact", "independent", "weak_corr"])
    for row in zip(x, exact, indep, weak):
        writer.writerow([repr(float(v)) for v in row])
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.comb_size < 2:
        return _fail(EXIT_INPUT, f"--comb-size must be >= 2, got {args.comb_size}")
    if args.mixture is not None:
        try:
            with open(args.mixture) as fh:
                triples = json.load(fh)
            mix = GaussianMixture.from_triples(triples)
        except (OSError, ValueError) as exc:
            return _fail(EXIT_INPUT, f"cannot load mixture {args.mixture}: {exc}")
        stats = mixture_summary(mix)
        support = default_support(stats["mean"], stats["std"])

        def target(x):
            return mixture_pdf(x, mix)
    else:
        missing = [n for n in ("mu1", "sd1", "mu2", "sd2", "mu0", "sd0") if getattr(args, n) is None]
        if missing:
            return _fail(
                EXIT_INPUT,
                f"either --mixture or all gate flags are required (missing {missing})",
            )
        try:
            g = GateInputs(
                x1=GaussianParams(args.mu1, args.sd1),
                x2=GaussianParams(args.mu2, args.sd2),
                x0=GaussianParams(args.mu0, args.sd0),
                rho=args.rho,
            )
        except ValueError as exc:
            return _fail(EXIT_INPUT, str(exc))
        mean = gate_mean_closed(g)
        sd = gate_std(g)
        support = default_support(mean, sd)

        def target(x):
            return gate_pdf_exact(x, g)

    cfg = CombConfig(m=args.comb_size, support=support, width_factor=args.width_factor)
    try:
        mixture, t_star = decompose(target, cfg)
    except _NUMERICAL_ERRORS as exc:
        return _fail(EXIT_NUMERICAL, f"decomposition failed: {exc}")

    payload = _json_dumps(
        {
            "tool": "ssta",
            "version": __version__,
            "comb_size": args.comb_size,
            "width_factor": args.width_factor,
            "support": list(support),
            "linf_residual": t_star,
            "mixture": [list(t) for t in mixture.to_triples()],
        }
    )
    if args.out is not None:
        try:
            _atomic_write(args.out, payload)
        except OSError as exc:
            return _fail(EXIT_INPUT, f"cannot write {args.out}: {exc}")
    else:
        sys.stdout.write(payload)
    print(f"t* = {t_star!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssta",
        description="Statistical static timing analysis with Gaussian-comb mixtures.",
    )
    parser.add_argument("--version", action="version", version=f"ssta {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    an = subs.add_parser("analyze", help="propagate arrival distributions through a graph")
    an.add_argument("--graph", required=True, help="input graph JSON file")
    an.add_argument("--out", required=True, help="output run-report JSON file")
    an.add_argument("--mc-check", action="store_true", help="add a Monte Carlo comparison")
    an.add_argument("--samples", type=int, default=1_000_000)
    an.add_argument("--seed", type=int, default=42)
    an.add_argument("--comb-size", type=int, default=32)
    an.add_argument("--width-factor", type=float, default=1.0)
    an.add_argument("--weak-corr", action="store_true",
                    help="apply the linear-in-rho correction for correlated mixture inputs")
    an.set_defaults(func=cmd_analyze)

    gp = subs.add_parser("gate-pdf", help="tabulate gate-delay densities as CSV")
    _add_gate_flags(gp)
    gp.add_argument("--from", type=float, required=True)
    gp.add_argument("--to", type=float, required=True)
    gp.add_argument("--points", type=int, default=601)
    gp.set_defaults(func=cmd_gate_pdf)

    de = subs.add_parser("decompose", help="fit a Gaussian comb to a gate PDF or a mixture")
    for name in ("mu1", "sd1", "mu2", "sd2", "mu0", "sd0"):
        de.add_argument(f"--{name}", type=float)
    de.add_argument("--rho", type=float, default=0.0)
    de.add_argument("--mixture", help="JSON file of (weight, mu, sigma) triples")
    de.add_argument("--comb-size", type=int, default=32)
    de.add_argument("--width-factor", type=float, default=1.0)
    de.add_argument("--out", help="write the mixture JSON here instead of stdout")
    de.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # Downstream consumer (head, less) closed the pipe; not an error.
        sys.stderr.close()
        return EXIT_OK
    except _NUMERICAL_ERRORS as exc:
        return _fail(EXIT_NUMERICAL, str(exc))


if __name__ == "__main__":
    sys.exit(main())
