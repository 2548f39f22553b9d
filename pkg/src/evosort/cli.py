"""Command line interface.

Subcommands: ``run`` (batch experiments), ``calibrate`` (margin-constant
sweep), ``verify`` (the acceptance suite), ``bench`` (pure vs compiled
engine).  Exit codes: 0 success, 1 configuration error, 2 I/O error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import engine
from .harness import ExperimentConfig, run_experiment
from .topk import SELECTION, SET


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_world_args(p, defaults=True):
    p.add_argument("--problem", choices=[SET, SELECTION], default=SELECTION,
                   help="which pipeline to run (default: selection)")
    p.add_argument("--model", choices=["consecutive", "gaussian"],
                   default="consecutive")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", default="10",
                   help="k, or a comma-separated sweep list")
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--horizon", type=int, default=200_000)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--c", type=float, default=4.0,
                   help="margin/block constant (default 4)")
    p.add_argument("--cprime", type=float, default=4.0,
                   help="selection candidate-margin constant (default 4)")
    p.add_argument("--sample-every", type=int, default=97)
    p.add_argument("--engine", choices=["auto", "compiled", "pure"],
                   default="auto")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for trials")
    p.add_argument("--identity-init", action="store_true",
                   help="start from the identity permutation (debugging)")


def _config_from(args, **overrides) -> ExperimentConfig:
    ks = tuple(int(x) for x in str(args.k).split(",") if x != "")
    fields = dict(
        problem=args.problem, model=args.model, n=args.n, ks=ks,
        alpha=args.alpha, horizon=args.horizon, trials=args.trials,
        master_seed=args.seed, c=args.c, cprime=args.cprime,
        sample_every=args.sample_every, engine=args.engine, jobs=args.jobs,
        identity_init=args.identity_init,
        out=getattr(args, "out", None), fmt=getattr(args, "format", "csv"))
    fields.update(overrides)
    return ExperimentConfig(**fields)


def _print_stats(stats) -> None:
    cols = ("model", "n", "k", "alpha", "samples", "p_set_ok", "p_kt_zero",
            "kt_mean", "kt_median", "kt_p95", "warmup_steps_observed",
            "probes_forfeited", "wall_time")
    print("  ".join(cols))
    for s in stats:
        row = []
        for col in cols:
            v = getattr(s, col)
            if v is None:
                row.append("-")
            elif isinstance(v, float):
                row.append(f"{v:.4f}")
            else:
                row.append(str(v))
        print("  ".join(row))


def _cmd_run(args) -> int:
    config = _config_from(args)
    stats = run_experiment(config)
    _print_stats(stats)
    if config.out:
        print(f"wrote {config.fmt} to {config.out}")
    return 0


def _cmd_calibrate(args) -> int:
    print("sweeping margin constant c over {1, 2, 4, 8} (cprime = c)")
    stats = []
    for c in (1.0, 2.0, 4.0, 8.0):
        config = _config_from(args, c=c, cprime=c, out=None)
        for s in run_experiment(config):
            print(f"c={c:.0f}: k={s.k} p_set_ok="
                  f"{'-' if s.p_set_ok is None else f'{s.p_set_ok:.4f}'} "
                  f"p_kt_zero="
                  f"{'-' if s.p_kt_zero is None else f'{s.p_kt_zero:.4f}'} "
                  f"kt_median="
                  f"{'-' if s.kt_median is None else f'{s.kt_median:.1f}'}")
            stats.append((c, s))
    if getattr(args, "out", None):
        from .harness import write_json
        write_json([s for _, s in stats], args.out)
        print(f"wrote json to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    from .acceptance import criteria_ids, run_all

    only = None
    if args.only:
        only = [int(x) for x in args.only.split(",")]
        unknown = set(only) - set(criteria_ids())
        if unknown:
            print(f"unknown criteria: {sorted(unknown)}", file=sys.stderr)
            return 1
    results = run_all(only=only, engine=args.engine)
    failed = [r.cid for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" +
          (f"; FAILED: {failed}" if failed else ""))
    return 3 if failed else 0


def _cmd_bench(args) -> int:
    from .harness import run_trial

    config = _config_from(args, engine="pure", trials=1)
    results = {}
    for eng in ("pure", "compiled"):
        if eng == "compiled" and not engine.HAVE_COMPILED:
            print("compiled: extension not built, skipping")
            continue
        cfg = _config_from(args, engine=eng, trials=1)
        started = time.perf_counter()
        results[eng] = run_trial(cfg, 0)
        elapsed = time.perf_counter() - started
        rate = args.horizon * len(cfg.ks) / elapsed
        print(f"{eng:9s} {elapsed:8.2f}s  {rate:12,.0f} steps/s")
    if len(results) == 2:
        same = all(
            a.records == b.records and a.probes_used == b.probes_used
            for a, b in zip(results["pure"], results["compiled"]))
        print("records identical across engines:", same)
        if not same:
            return 3
    return 0


def main(argv=None) -> int:
    parser = _Parser(prog="evosort",
                     description="top-k tracking over evolving orders")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a batch experiment")
    _add_world_args(p_run)
    p_run.add_argument("--out", help="output file path")
    p_run.add_argument("--format", choices=["csv", "json"], default="csv")

    p_cal = sub.add_parser("calibrate", help="sweep the margin constant")
    _add_world_args(p_cal)
    p_cal.add_argument("--out", help="json output path")

    p_ver = sub.add_parser("verify", help="run the acceptance suite")
    p_ver.add_argument("--only", help="comma-separated criterion ids")
    p_ver.add_argument("--engine", choices=["auto", "compiled", "pure"],
                       default="auto")

    p_bench = sub.add_parser("bench", help="compare pure and compiled engines")
    _add_world_args(p_bench)

    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "calibrate": _cmd_calibrate,
                "verify": _cmd_verify, "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
