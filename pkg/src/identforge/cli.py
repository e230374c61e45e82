"""Command line interface: ``identforge run`` and ``identforge bench``."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .algebra import DEFAULT_PRIME
from .basis import DEFAULT_CANDIDATES
from .bench import bench_table
from .groebner import FORMATS
from .model import BUNDLED_MODELS, ModelError
from .pipeline import (EXIT_BUDGET, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, MODES, RunConfig, StageError,
                       run_pipeline)
from .prolongation import dump_psys


def _prob(text: str) -> Fraction:
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < f < 1:
        raise argparse.ArgumentTypeError("probability must lie strictly between 0 and 1")
    return f


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="identforge", description="Structural identifiability of ODE models "
                                 "with transcendence-basis elimination.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="analyse one model")
    run.add_argument("model", help="path to a .ode file")
    run.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--mode", choices=MODES, default="zerodim")
    run.add_argument("--weights", help="weight file (name weight per line)")
    run.add_argument("--candidates", type=int, default=DEFAULT_CANDIDATES, metavar="K")
    run.add_argument("--prob", type=_prob, default=Fraction(99, 100))
    run.add_argument("--export", choices=FORMATS, help="write an engine script instead of running Buchberger")
    run.add_argument("--report-entropy", action="store_true", help="print the candidate entropy CSV")
    run.add_argument("--bench", action="store_true", help="print a timing row for the run")
    run.add_argument("--strategy", choices=("normal", "sugar"), default="normal")
    run.add_argument("--max-pairs", type=int, default=10**6)
    run.add_argument("--out", type=Path, help="directory for report, record and system files")

    bench = sub.add_parser("bench", help="benchmark table over several models")
    bench.add_argument("models", nargs="*", default=list(BUNDLED_MODELS),
                       help="bundled model names or .ode paths (default: the six bundled models)")
    bench.add_argument("--modes", default="default,zerodim")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--csv", type=Path, help="write the CSV twin here")
    bench.add_argument("--weights", action="append", default=[], metavar="MODEL=FILE")
    bench.add_argument("--no-memory", action="store_true", help="skip allocator tracing")
    return ap


def _run(args) -> int:
    if args.mode == "zerodim-weights" and not args.weights:
        print("error: --mode zerodim-weights requires --weights", file=sys.stderr)
        return EXIT_USAGE
    if not Path(args.model).is_file():
        print(f"error: no such model file: {args.model}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        cfg = RunConfig(args.model, prime=args.prime, seed=args.seed, candidates=args.candidates,
                        mode=args.mode, weights=args.weights, export=args.export, prob=args.prob,
                        max_pairs=args.max_pairs, strategy=args.strategy, measure_memory=args.bench)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        res = run_pipeline(cfg, groebner=args.export is None)
    except StageError as exc:
        err = exc.error
        if isinstance(err, ModelError):
            for d in err.diagnostics:
                print(f"{args.model}: {d}", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    out = args.out
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / "system.psys").write_text(dump_psys(res.final_system), encoding="utf-8")
        if res.record is not None:
            (out / "substitution.json").write_text(res.record.to_json() + "\n", encoding="utf-8")
    if res.export_text is not None:
        if out:
            ext = {"maple": "mpl", "magma": "magma", "generic": "txt"}[args.export]
            (out / f"system.{ext}").write_text(res.export_text, encoding="utf-8")
        else:
            sys.stdout.write(res.export_text)
    if args.report_entropy:
        text = res.entropy_csv()
        if out:
            (out / "entropy.csv").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    print(f"# {res.system.n_polys} polynomials, {res.system.n_vars} variables, "
          f"transcendence degree {res.transcendence_degree}", file=sys.stderr)
    if res.basis is not None:
        print(f"# eliminated basis: {', '.join(res.basis.labels(res.system))}", file=sys.stderr)
    if res.gb is None:
        return EXIT_OK
    if not res.gb.basis.complete:
        print(f"error: Groebner basis budget exhausted after {res.gb.basis.stats.pairs} pairs "
              f"({res.gb.seconds:.1f} s)", file=sys.stderr)
        return EXIT_BUDGET
    if res.report is not None:
        text = res.report.to_json() + "\n"
        if out:
            (out / "report.json").write_text(text, encoding="utf-8")
        if not args.export:
            sys.stdout.write(text)
    if args.bench:
        mem = "N/A" if res.gb.peak_bytes is None else f"{res.gb.peak_bytes / 2**20:.2f} MB"
        print(f"bench: model={Path(args.model).stem} mode={args.mode} polys={res.final_system.n_polys} "
              f"vars={res.final_system.n_vars} gb_seconds={res.gb.seconds:.3f} peak={mem}")
    return EXIT_OK


def _bench(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad:
        print(f"error: unknown modes {', '.join(bad)}", file=sys.stderr)
        return EXIT_USAGE
    weights = {}
    for item in args.weights:
        name, sep, path = item.partition("=")
        if not sep:
            print(f"error: --weights expects MODEL=FILE, got {item!r}", file=sys.stderr)
            return EXIT_USAGE
        weights[name] = path
    text, csv_text, _ = bench_table(args.models, modes, seed=args.seed, weights=weights,
                                    measure_memory=not args.no_memory)
    sys.stdout.write(text)
    if args.csv:
        args.csv.write_text(csv_text, encoding="utf-8")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    return _bench(args)


if __name__ == "__main__":
    raise SystemExit(main())
