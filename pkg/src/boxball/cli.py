"""Command-line front end.

Every statistical subcommand emits a JSON report with the fixed top-level
schema {spec, results, diagnostics, version}: spec echoes the resolved
parameters (including the seed), results carry the numbers, diagnostics the
bookkeeping.  Exit codes: 0 success/pass, 2 statistical-test failure or
route mismatch, 1 usage or domain errors.

The seed falls back to the BBS_SEED environment variable, then to 0.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import classify as cls
from . import continuum as cont
from . import dynamics as dyn
from . import sampling as smp
from .carrier import apply_Ti_direct, run_carrier
from .errors import BoxBallError
from .lattice import (Boundary, config_to_text, encode, decode, encoding_to_csv,
                      parse_config_text)
from .pitman import (DomainSet, FiniteTail, ScalarPath, in_domain,
                     pitman_inverse, pitman_one_sided, pitman_two_sided)
from .simplex import build_simplex_basis, gram_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TEST_FAILED = 2


def _resolve_seed(value):
    if value is not None:
        return int(value)
    return int(os.environ.get("BBS_SEED", "0"))


def _report(spec: dict, results, diagnostics=None) -> dict:
    return {"spec": spec, "results": results,
            "diagnostics": diagnostics or {}, "version": __version__}


def _emit(payload, output):
    text = json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _load_config(args):
    if getattr(args, "config_file", None):
        with open(args.config_file) as fh:
            return parse_config_text(fh.read().strip())
    if getattr(args, "config", None):
        return parse_config_text(args.config)
    raise BoxBallError("provide --config-file or --config")


def _parse_floats(text):
    return tuple(float(tok) for tok in text.split(","))


def cmd_basis(args):
    basis = build_simplex_basis(args.kappa)
    payload = _report(
        {"subcommand": "basis", "kappa": args.kappa},
        {"vectors": basis.vectors.tolist(), "gram_deviation": gram_report(basis)})
    _emit(payload, args.output)
    return EXIT_OK


def cmd_evolve(args):
    config = _load_config(args)
    word = dyn.parse_word(args.word) if args.word else tuple(range(1, config.kappa + 1))
    assumptions = {}
    if config.boundary is Boundary.WINDOWED:
        if not args.assume_empty_left:
            raise BoxBallError("windowed input: pass --assume-empty-left to apply "
                               "the dynamics under the empty-left-tail assumption")
        assumptions["assume_empty_left_tail"] = True
    print(config_to_text(config))
    current = config
    for step in range(args.steps):
        for pos in range(len(word)):
            routes = {}
            letter = word[pos]
            if args.route in ("pitman", "both"):
                path = encode(current)
                if letter > 0:
                    path = dyn.apply_Ti(path, letter, **assumptions)
                else:
                    path = dyn.apply_Ti_inverse(path, -letter)
                routes["pitman"] = decode(path)
            if args.route in ("direct", "both"):
                if letter < 0:
                    raise BoxBallError("the direct carrier route has no inverse; "
                                       "use --route pitman for words with inverses")
                routes["direct"] = apply_Ti_direct(current, letter, **(
                    {"initial_load": 0} if assumptions else {}))
            if len(routes) == 2 and routes["pitman"] != routes["direct"]:
                sys.stderr.write(f"ROUTE MISMATCH at step {step + 1}, "
                                 f"word position {pos}:\n"
                                 f"  pitman: {config_to_text(routes['pitman'])}\n"
                                 f"  direct: {config_to_text(routes['direct'])}\n")
                return EXIT_TEST_FAILED
            current = routes.get("pitman", routes.get("direct"))
            if args.print_substeps and pos < len(word) - 1:
                print(config_to_text(current))
        print(config_to_text(current))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(encoding_to_csv(encode(current)))
    return EXIT_OK


def cmd_invert(args):
    config = _load_config(args)
    path = encode(config)
    for _ in range(args.steps):
        path = dyn.apply_Ti_inverse(path, args.color)
        print(config_to_text(decode(path)))
    return EXIT_OK


def cmd_carrier(args):
    config = _load_config(args)
    kwargs = {}
    if config.boundary is Boundary.WINDOWED and args.assume_empty_left:
        kwargs["initial_load"] = 0
    trace = run_carrier(config, args.color, **kwargs)
    lines = ["n,W"] + [f"{trace.offset + k},{int(w)}" for k, w in enumerate(trace.loads)]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_pitman(args):
    rows = []
    with open(args.input) as fh:
        header = fh.readline()
        for line in fh:
            if line.strip():
                n, v = line.split(",")
                rows.append((int(n), float(v)))
    rows.sort()
    offset = rows[0][0]
    values = np.array([v for _, v in rows])
    path = ScalarPath(offset=offset, values=values,
                      boundary=FiniteTail(args.left_slope, args.right_slope))
    fn = {"forward": pitman_two_sided, "inverse": pitman_inverse,
          "one-sided": pitman_one_sided}[args.direction]
    out = fn(path)
    domains = {d.value: in_domain(path, d).value for d in DomainSet}
    lines = ["n,value"] + [f"{out.n_lo + k},{float(v)}" for k, v in enumerate(out.values)]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(json.dumps({"domains": domains}) + "\n")
    return EXIT_OK


def cmd_classify(args):
    config = _load_config(args)
    path = encode(config)
    horizon = None
    if args.horizon:
        lo, hi = args.horizon.split(",")
        horizon = (int(lo), int(hi))
    rep = cls.reversibility_report(path, args.color)
    good = cls.good_set_check(path, horizon=horizon)
    results = {
        "color": rep.color, "M0": rep.m0, "I0": rep.i0,
        "M_inf": rep.m_inf, "I_minus_inf": rep.i_minus_inf, "exact": rep.exact,
        "forward_then_back": rep.forward_then_back.value,
        "back_then_forward": rep.back_then_forward.value,
        "reversible": rep.reversible.value,
        "ratio_trace": {"indices": rep.ratio_indices,
                        "values": [None if np.isnan(v) else float(v)
                                   for v in rep.ratio_values]},
        "good_set": {
            "positive": {str(k): v for k, v in good.positive.items()},
            "negative": {str(k): v for k, v in good.negative.items()},
            "pairwise_max": {f"{i}/{j}": v for (i, j), v in good.pairwise_max.items()},
            "ratio_tol": good.ratio_tol, "pair_bound": good.pair_bound,
            "horizon": good.horizon, "all_good": good.all_good,
        },
    }
    payload = _report(
        {"subcommand": "classify", "color": args.color, "horizon": args.horizon,
         "config_file": args.config_file},
        results)
    _emit(payload, args.output)
    return EXIT_OK


def cmd_examples(args):
    config = cls.example_config(args.name, args.epochs)
    print(config_to_text(config))
    return EXIT_OK


def cmd_sample(args):
    seed = _resolve_seed(args.seed)
    lo, hi = (int(tok) for tok in args.window.split(","))
    if args.c is not None:
        config = smp.sample_near_critical(args.kappa, _parse_floats(args.c),
                                          args.n, (lo, hi), seed)
    else:
        law = smp.ColorLaw(args.kappa, _parse_floats(args.probs))
        config = smp.sample_iid(law, (lo, hi), seed)
    text = config_to_text(config) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_invariance_test(args):
    seed = _resolve_seed(args.seed)
    law = smp.ColorLaw(args.kappa, _parse_floats(args.probs))
    null_law = smp.ColorLaw(args.kappa, _parse_floats(args.null_probs)) \
        if args.null_probs else None
    t0 = time.time()
    rep = smp.invariance_test(law, args.color, args.sites, args.word, args.trials,
                              seed, p_threshold=args.p_threshold, null_law=null_law,
                              workers=args.threads)
    payload = _report(
        {"subcommand": "invariance-test", "kappa": args.kappa, "probs": law.probs,
         "null_probs": rep.null_law.probs, "color": args.color, "sites": args.sites,
         "word": args.word, "trials": args.trials, "seed": seed,
         "p_threshold": args.p_threshold},
        {"passed": rep.passed, "n_pass": rep.n_pass, "n_excluded": rep.n_excluded,
         "p_values": [t.p_value for t in rep.trials]},
        {"rng": rep.rng, "runtime_s": time.time() - t0,
         "required_passes": rep.required_passes})
    _emit(payload, args.output)
    if args.counts_csv:
        width = len(rep.trials[0].counts)
        with open(args.counts_csv, "w") as fh:
            fh.write("trial," + ",".join(f"pattern_{k}" for k in range(width)) + "\n")
            for t in rep.trials:
                fh.write(f"{t.trial}," + ",".join(str(c) for c in t.counts) + "\n")
    return EXIT_OK if rep.passed else EXIT_TEST_FAILED


def cmd_donsker(args):
    seed = _resolve_seed(args.seed)
    c = _parse_floats(args.c)
    t0 = time.time()
    if args.dump_path:
        walk = cont.donsker_rescale(args.kappa, c, args.n, args.L, seed)
        with open(args.dump_path, "w") as fh:
            fh.write(cont.path_to_csv(walk))
    marginals = cont.donsker_unit_marginals(args.kappa, c, args.n, args.samples, seed)
    basis = build_simplex_basis(args.kappa)
    drift = np.asarray(c) @ basis.vectors
    ks = [cont.ks_distance_to_normal(marginals[:, j], float(drift[j]), 1.0)
          for j in range(args.kappa)]
    cov = np.cov(marginals.T) if args.kappa > 1 else np.array([[marginals.var()]])
    passed = max(ks) < args.ks_threshold
    payload = _report(
        {"subcommand": "donsker", "kappa": args.kappa, "c": c, "n": args.n,
         "samples": args.samples, "seed": seed, "ks_threshold": args.ks_threshold},
        {"passed": passed, "ks_per_component": ks, "drift": drift.tolist(),
         "mean": marginals.mean(axis=0).tolist(), "covariance": cov.tolist()},
        {"rng": smp.RNG_ALGORITHM, "runtime_s": time.time() - t0})
    _emit(payload, args.output)
    return EXIT_OK if passed else EXIT_TEST_FAILED


def cmd_bm_invariance(args):
    seed = _resolve_seed(args.seed)
    spec = cont.DriftSpec(args.kappa, _parse_floats(args.c))
    reference = spec.scaled(args.control_factor) if args.control_factor else None
    x_points = tuple(range(min(3, max(1, int(args.L / 4)))))
    t0 = time.time()
    if args.dump_path:
        path = cont.sample_brownian_with_drift(spec, args.L, args.h, seed)
        with open(args.dump_path, "w") as fh:
            fh.write(cont.path_to_csv(path))
    rep = cont.bm_invariance_test(spec, args.L, args.h, args.Lprime, args.seeds,
                                  seed=seed, threshold=args.threshold,
                                  x_points=x_points, reference=reference,
                                  workers=args.threads)
    payload = _report(
        {"subcommand": "bm-invariance", "kappa": args.kappa, "c": spec.c,
         "reference_c": rep.reference.c, "L": args.L, "h": args.h,
         "Lprime": args.Lprime, "seeds": args.seeds, "seed": seed,
         "threshold": args.threshold},
        {"passed": rep.passed, "max_distance": rep.max_distance,
         "distances": {f"T{color}:{label}": v
                       for (color, label), v in rep.distances.items()}},
        {"rng": rep.rng, "excluded": {str(k): v for k, v in rep.excluded.items()},
         "runtime_s": time.time() - t0})
    _emit(payload, args.output)
    return EXIT_OK if rep.passed else EXIT_TEST_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxball",
        description="Multicolor box-ball system: exact lattice dynamics, "
                    "classifiers, and stochastic invariance experiments.")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for independent trials (default 1)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_config_args(p):
        p.add_argument("--config-file", help="file holding one configuration line")
        p.add_argument("--config", help="configuration line, e.g. "
                                        "'kappa=2 offset=1 cells=120010'")

    p = sub.add_parser("basis", help="print the simplex basis and its Gram report")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_basis)

    p = sub.add_parser("evolve", help="apply a word of operators, printing each state")
    add_config_args(p)
    p.add_argument("--word", help="signed word like '+1+2+3' (default: full update)")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--route", choices=("pitman", "direct", "both"), default="both")
    p.add_argument("--assume-empty-left", action="store_true",
                   help="treat a windowed input's left tail as empty")
    p.add_argument("--print-substeps", action="store_true",
                   help="also print the state after every letter of the word")
    p.add_argument("--csv", help="write the final encoding as CSV")
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("invert", help="apply the inverse operator of one color")
    add_config_args(p)
    p.add_argument("--color", type=int, required=True)
    p.add_argument("--steps", type=int, default=1)
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("carrier", help="dump the carrier load trace as CSV")
    add_config_args(p)
    p.add_argument("--color", type=int, required=True)
    p.add_argument("--assume-empty-left", action="store_true")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_carrier)

    p = sub.add_parser("pitman", help="transform a scalar path CSV (columns n,value)")
    p.add_argument("--input", required=True)
    p.add_argument("--direction", choices=("forward", "inverse", "one-sided"),
                   default="forward")
    p.add_argument("--left-slope", type=float, default=0.0)
    p.add_argument("--right-slope", type=float, default=0.0)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_pitman)

    p = sub.add_parser("classify", help="reversibility/invariance report as JSON")
    add_config_args(p)
    p.add_argument("--color", type=int, required=True)
    p.add_argument("--horizon", help="index range lo,hi for the proxies")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("examples", help="emit one of the counterexample families")
    p.add_argument("--name", choices=("a", "b", "c"), required=True)
    p.add_argument("--epochs", type=int, default=5)
    p.set_defaults(fn=cmd_examples)

    p = sub.add_parser("sample", help="sample an i.i.d. or near-critical configuration")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--probs", help="p0,p1,... for i.i.d. sampling")
    p.add_argument("--c", help="c0,c1,... near-critical coefficients")
    p.add_argument("--n", type=int, help="near-critical scale")
    p.add_argument("--window", default="-1000,1000")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("invariance-test",
                       help="chi-square invariance test of T_i on i.i.d. input")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--probs", required=True)
    p.add_argument("--null-probs", help="test against this law instead (control)")
    p.add_argument("--color", type=int, required=True)
    p.add_argument("--sites", type=int, default=10**6)
    p.add_argument("--word", type=int, default=2, help="pattern length (<= 4)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--p-threshold", type=float, default=0.001)
    p.add_argument("--seed", type=int)
    p.add_argument("--counts-csv", help="write per-trial pattern counts")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_invariance_test)

    p = sub.add_parser("donsker", help="rescaled-walk marginals vs the Gaussian limit")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--n", type=int, default=10**4)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--L", type=float, default=1.0, help="span of the dumped path")
    p.add_argument("--ks-threshold", type=float, default=0.02)
    p.add_argument("--dump-path", help="write one rescaled walk as CSV")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_donsker)

    p = sub.add_parser("bm-invariance",
                       help="two-sample KS invariance test for drifted Brownian paths")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--L", type=float, default=50.0)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--Lprime", type=float, default=25.0)
    p.add_argument("--seeds", type=int, default=5000)
    p.add_argument("--threshold", type=float, default=0.035)
    p.add_argument("--control-factor", type=float,
                   help="scale the reference drift (negative control)")
    p.add_argument("--dump-path", help="write one sampled path as CSV")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_bm_invariance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BoxBallError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
