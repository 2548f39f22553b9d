"""Batch experiment runner: configures trials, runs them (serially or on a
worker pool), aggregates regime statistics, and emits CSV/JSON results.

Per-trial seeds are a stable mix of (master_seed, trial_index, stream tag),
so adding trials never perturbs existing ones, and reruns of the same config
emit byte-identical CSV.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import engine
from .metrics import ErrorRecord, count_inversions, topk_set_correct
from .order import CONSECUTIVE, GAUSSIAN, EvolutionModel, create_order
from .rng import TAG_ALGO, TAG_WORLD, SplitMix64, derive_seed
from .topk import (KIND_ORDER, KIND_SET, SELECTION, SET, make_topk_selection,
                   make_topk_set, pipeline_params)

CSV_HEADER = "model,n,k,alpha,trial,t,warming_up,set_ok,kt,max_disp"


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = SELECTION
    model: str = CONSECUTIVE
    n: int = 1000
    ks: tuple = (10,)
    alpha: int = 1
    horizon: int = 100_000
    trials: int = 1
    master_seed: int = 0
    c: float = 4.0
    cprime: float = 4.0
    sample_every: int = 97
    out: Optional[str] = None
    fmt: str = "csv"
    engine: str = "auto"
    jobs: int = 1
    identity_init: bool = False

    def validate(self) -> None:
        if self.problem not in (SET, SELECTION):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.model not in (CONSECUTIVE, GAUSSIAN):
            raise ValueError(f"unknown model {self.model!r}")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.ks:
            raise ValueError("at least one k is required")
        for k in self.ks:
            if not 1 <= k <= self.n:
                raise ValueError(f"k={k} out of range 1..{self.n}")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.horizon < 0 or self.trials < 1 or self.sample_every < 1:
            raise ValueError("horizon >= 0, trials >= 1, sample_every >= 1 "
                             "required")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")
        # Derived pipelines must be constructible.
        for k in self.ks:
            pipeline_params(self.problem, self.model, self.n, k, self.alpha,
                            self.c, self.cprime)
        warmup_guide = 20 * self.n * math.log(self.n)
        if 0 < self.horizon < warmup_guide:
            warnings.warn(
                f"horizon {self.horizon} is below the warm-up guideline "
                f"20*n*ln(n) ~ {warmup_guide:.0f}; post-warm-up samples may "
                f"be scarce", stacklevel=2)


@dataclass
class TrialResult:
    """Records plus run metadata for one (trial, k) drive."""

    k: int
    trial: int
    records: list
    probes_used: int
    probes_forfeited: int


def build_model(config: ExperimentConfig) -> EvolutionModel:
    if config.model == CONSECUTIVE:
        return EvolutionModel.consecutive(config.alpha)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return EvolutionModel.gaussian(config.n, config.alpha)


def trial_seeds(master_seed: int, trial_index: int) -> tuple:
    """(world_seed, algo_seed) for one trial."""
    return (derive_seed(master_seed, trial_index, TAG_WORLD),
            derive_seed(master_seed, trial_index, TAG_ALGO))


def _measure(world, published, k) -> ErrorRecord:
    t = world.t
    if published.kind == KIND_SET:
        ok = topk_set_correct(published.members, world.oracle_snapshot(), k)
        return ErrorRecord(t, False, ok, None, None)
    if published.kind == KIND_ORDER:
        rank = world._rank
        ranks = [rank[e] for e in published.ranked]
        ok = all(r <= k for r in ranks)
        kt = count_inversions(ranks)
        disp = max(abs(r - (i + 1)) for i, r in enumerate(ranks))
        return ErrorRecord(t, False, ok, kt, disp)
    return ErrorRecord(t, True, None, None, None)


def _run_trial_pure(config: ExperimentConfig, k: int,
                    trial_index: int) -> TrialResult:
    world_seed, algo_seed = trial_seeds(config.master_seed, trial_index)
    world = create_order(config.n, build_model(config), world_seed,
                         identity_init=config.identity_init)
    rng = SplitMix64(algo_seed)
    if config.problem == SET:
        algo = make_topk_set(config.n, k, config.alpha, config.c,
                             config.model, rng)
    else:
        algo = make_topk_selection(config.n, k, config.alpha, config.c,
                                   config.cprime, config.model, rng)
    records = []
    sample_every = config.sample_every
    for _ in range(config.horizon):
        world.advance_time()
        algo.step(world)
        if world.t % sample_every == 0:
            records.append(_measure(world, algo.published, k))
            world.validate_bijection()
    return TrialResult(k, trial_index, records, world.probes_used,
                       algo.forfeited)


def _run_trial_compiled(config: ExperimentConfig, k: int,
                        trial_index: int) -> TrialResult:
    from . import _kernels

    world_seed, algo_seed = trial_seeds(config.master_seed, trial_index)
    model = build_model(config)
    params = pipeline_params(config.problem, config.model, config.n, k,
                             config.alpha, config.c, config.cprime)
    n_samples = config.horizon // config.sample_every
    rec_t = np.empty(n_samples, dtype=np.int64)
    rec_warm = np.empty(n_samples, dtype=np.int8)
    rec_setok = np.empty(n_samples, dtype=np.int8)
    rec_kt = np.empty(n_samples, dtype=np.int64)
    rec_disp = np.empty(n_samples, dtype=np.int64)
    count, probes, forfeited = _kernels.run_trial(
        0 if config.problem == SET else 1,
        0 if config.model == CONSECUTIVE else 1,
        config.n, k, config.alpha, model.cdf_array(),
        params["margin"], params["cmargin"], params["block"],
        params["modulus"],
        world_seed, algo_seed, config.horizon, config.sample_every,
        1 if config.identity_init else 0,
        rec_t, rec_warm, rec_setok, rec_kt, rec_disp)
    records = []
    for i in range(count):
        if rec_warm[i]:
            records.append(ErrorRecord(int(rec_t[i]), True, None, None, None))
        elif rec_kt[i] < 0:
            records.append(ErrorRecord(int(rec_t[i]), False,
                                       bool(rec_setok[i]), None, None))
        else:
            records.append(ErrorRecord(int(rec_t[i]), False,
                                       bool(rec_setok[i]), int(rec_kt[i]),
                                       int(rec_disp[i])))
    return TrialResult(k, trial_index, records, probes, forfeited)


def run_trial(config: ExperimentConfig, trial_index: int,
              k: Optional[int] = None) -> list:
    """Run one trial (all configured k values, or a single one) and return
    its TrialResults in k order."""
    which = engine.resolve(config.engine)
    runner = _run_trial_compiled if which == "compiled" else _run_trial_pure
    ks = config.ks if k is None else (k,)
    return [runner(config, kk, trial_index) for kk in ks]


@dataclass
class SummaryStats:
    model: str
    n: int
    k: int
    alpha: int
    samples: int
    p_set_ok: Optional[float]
    p_kt_zero: Optional[float]
    kt_mean: Optional[float]
    kt_median: Optional[float]
    kt_p95: Optional[float]
    warmup_steps_observed: Optional[float]
    probes_forfeited: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def summarize(config_key: tuple, rows: list) -> SummaryStats:
    """Aggregate (trial, t, warming_up, set_ok, kt, max_disp) rows for one
    (model, n, k, alpha) cell.  Pure function of the emitted CSV contents."""
    model, n, k, alpha = config_key
    warmups = {}
    live = []
    for trial, t, warming, set_ok, kt, _disp in rows:
        if warming:
            continue
        if trial not in warmups:
            warmups[trial] = t
        live.append((set_ok, kt))
    if not live:
        return SummaryStats(model, n, k, alpha, 0, None, None, None, None,
                            None, None)
    p_set_ok = sum(1 for ok, _ in live if ok) / len(live)
    kts = [kt for _, kt in live if kt is not None]
    if kts:
        arr = np.asarray(kts, dtype=np.float64)
        p_kt_zero = float(np.mean(arr == 0))
        kt_mean = float(np.mean(arr))
        kt_median = float(np.median(arr))
        kt_p95 = float(np.percentile(arr, 95))
    else:
        p_kt_zero = kt_mean = kt_median = kt_p95 = None
    warmup = float(np.mean(list(warmups.values()))) if warmups else None
    return SummaryStats(model, n, k, alpha, len(live), p_set_ok, p_kt_zero,
                        kt_mean, kt_median, kt_p95, warmup)


def _trial_worker(args) -> list:
    config, trial_index = args
    return run_trial(config, trial_index)


def run_experiment(config: ExperimentConfig) -> list:
    """Run all trials, optionally emit the configured output file, and return
    SummaryStats per (model, n, k, alpha)."""
    config.validate()
    started = time.perf_counter()
    tasks = [(config, i) for i in range(config.trials)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            per_trial = list(pool.map(_trial_worker, tasks))
    else:
        per_trial = [_trial_worker(t) for t in tasks]
    wall = time.perf_counter() - started

    results = [r for trial_results in per_trial for r in trial_results]
    stats = []
    for k in config.ks:
        rows = []
        forfeited = 0
        for res in results:
            if res.k != k:
                continue
            forfeited += res.probes_forfeited
            for rec in res.records:
                rows.append((res.trial, rec.t, rec.warming_up, rec.set_ok,
                             rec.kt, rec.max_disp))
        s = summarize((config.model, config.n, k, config.alpha), rows)
        s.probes_forfeited = forfeited
        s.wall_time = wall
        stats.append(s)

    if config.out:
        if config.fmt == "csv":
            write_csv(config, results, config.out)
        else:
            write_json(stats, config.out)
    return stats


# -- emission and round-trip ----------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def write_csv(config: ExperimentConfig, results: list, path: str) -> None:
    with open(path, "w") as f:
        f.write(CSV_HEADER + "\n")
        for k in config.ks:
            for res in results:
                if res.k != k:
                    continue
                for rec in res.records:
                    f.write(",".join([
                        config.model, str(config.n), str(k),
                        str(config.alpha), str(res.trial), str(rec.t),
                        "1" if rec.warming_up else "0",
                        _fmt(rec.set_ok), _fmt(rec.kt), _fmt(rec.max_disp),
                    ]) + "\n")


def write_json(stats: list, path: str) -> None:
    with open(path, "w") as f:
        json.dump([s.as_dict() for s in stats], f, indent=2, sort_keys=True)
        f.write("\n")


def load_csv(path: str) -> dict:
    """Read an emitted CSV back into {(model, n, k, alpha): rows} suitable
    for ``summarize`` (the round-trip property)."""
    cells = {}
    with open(path) as f:
        header = f.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in f:
            model, n, k, alpha, trial, t, warm, ok, kt, disp = \
                line.rstrip("\n").split(",")
            key = (model, int(n), int(k), int(alpha))
            cells.setdefault(key, []).append((
                int(trial), int(t), warm == "1",
                None if ok == "" else ok == "1",
                None if kt == "" else int(kt),
                None if disp == "" else int(disp)))
    return cells
