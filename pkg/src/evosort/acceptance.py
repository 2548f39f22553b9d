"""The verification suite: thirteen checks combining exact properties with
statistical targets at desk scale.

Each criterion is a function returning (passed, detail); ``run_all`` times
them and enforces each criterion's runtime budget.  Budgets assume the
compiled engine (the default when the extension is built).  All seeds are
fixed, so every check is deterministic on both engines.
"""

from __future__ import annotations

import itertools
import math
import os
import tempfile
import time
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as scistats

from . import engine as _engine
from .harness import ExperimentConfig, run_experiment, run_trial
from .metrics import (count_inversions_py, kendall_tau_brute,
                      kendall_tau_restricted)
from .order import (CONSECUTIVE, GAUSSIAN, EvolutionModel, Permutation,
                    create_order)
from .quicksort import QuicksortRun
from .rng import SplitMix64, derive_seed
from .topk import SELECTION, SET, make_topk_selection, make_topk_set


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: Optional[float]

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        budget = f"/{self.budget:.0f}s" if self.budget else ""
        return (f"criterion {self.cid:2d}: {self.status} "
                f"[{self.seconds:6.1f}s{budget}] {self.title}: {self.detail}")


def _quiet_experiment(**kwargs) -> list:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return run_experiment(ExperimentConfig(**kwargs))


# -- criterion 1: exact static correctness ----------------------------------

def _c1(engine: str):
    bad = []
    checked = 0
    for problem in (SET, SELECTION):
        for k in (1, 16, 256, 512):
            for seed in range(101, 106):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    cfg = ExperimentConfig(
                        problem=problem, model=CONSECUTIVE, n=512, ks=(k,),
                        alpha=0, horizon=100_000, trials=1, master_seed=seed,
                        sample_every=97, engine=engine)
                    res = run_trial(cfg, 0)[0]
                for rec in res.records:
                    if rec.warming_up:
                        continue
                    checked += 1
                    ok = rec.set_ok and (problem == SET or rec.kt == 0)
                    if not ok:
                        bad.append((problem, k, seed, rec))
    detail = (f"{checked} post-warm-up samples across 2 pipelines x 4 k x 5 "
              f"seeds, {len(bad)} violations")
    return not bad and checked > 0, detail


# -- criterion 2: Kendall tau oracle equivalence -----------------------------

def _perm_of(order: tuple) -> Permutation:
    # order[i] = element at rank i+1
    n = len(order)
    elem = [0] + list(order)
    rank = [0] * (n + 1)
    for r in range(1, n + 1):
        rank[elem[r]] = r
    return Permutation(rank, elem)


def _c2(engine: str):
    cases = 0
    for k in range(1, 7):
        ids = tuple(range(1, k + 1))
        for truth_order in itertools.permutations(ids):
            truth = _perm_of(truth_order)
            for pred in itertools.permutations(ids):
                fast = kendall_tau_restricted(pred, truth)
                if fast != kendall_tau_brute(pred, truth):
                    return False, f"mismatch at k={k} pred={pred} truth={truth_order}"
                cases += 1
    rng = SplitMix64(derive_seed(202, 1))
    n = 50
    for _ in range(1000):
        k = 7 + rng.randbelow(6)
        universe = list(range(1, n + 1))
        for i in range(n - 1, 0, -1):
            j = rng.randbelow(i + 1)
            universe[i], universe[j] = universe[j], universe[i]
        truth = _perm_of(tuple(universe))
        pred = universe[: 2 * k]
        for i in range(len(pred) - 1, 0, -1):
            j = rng.randbelow(i + 1)
            pred[i], pred[j] = pred[j], pred[i]
        pred = pred[:k]
        fast = kendall_tau_restricted(pred, truth)
        if fast != kendall_tau_brute(pred, truth) or \
                fast != count_inversions_py([truth.rank_of(e) for e in pred]):
            return False, f"random-case mismatch at k={k}"
        cases += 1
    return True, f"fast path equals brute force on {cases} cases"


# -- criteria 3 and 4: metered quicksort statistics ---------------------------

def _metered_quicksort_stats(engine: str, runs: int = 100):
    n, alpha, master = 4096, 1, 303
    comps, disps = [], []
    if engine == "compiled":
        from . import _kernels
        empty = np.empty(0, dtype=np.float64)
        for r in range(runs):
            c, d = _kernels.metered_quicksort(
                n, alpha, 0, empty, derive_seed(master, r, 1),
                derive_seed(master, r, 2))
            comps.append(c)
            disps.append(d)
        return n, comps, disps
    for r in range(runs):
        world = create_order(n, EvolutionModel.consecutive(alpha),
                             derive_seed(master, r, 1))
        run = QuicksortRun(range(1, n + 1),
                           SplitMix64(derive_seed(master, r, 2)))
        while not run.done:
            world.advance_time()
            req = run.pending()
            run.feed(world.probe_compare(req.a, req.b))
        est = run.result()
        comps.append(run.comparisons_used)
        disps.append(max(abs(world._rank[e] - (i + 1))
                         for i, e in enumerate(est.ranked)))
    return n, comps, disps


_qs_stats_cache = {}


def _qs_stats(engine: str):
    if engine not in _qs_stats_cache:
        _qs_stats_cache[engine] = _metered_quicksort_stats(engine)
    return _qs_stats_cache[engine]


def _c3(engine: str):
    n, comps, _ = _qs_stats(engine)
    bound = 8 * n * math.log(n)
    ok = sum(1 for c in comps if c <= bound)
    return ok >= 99, (f"comparisons <= 8n*ln(n)={bound:.0f} in {ok}/100 runs "
                      f"(max {max(comps)}, mean {np.mean(comps):.0f})")


def _c4(engine: str):
    n, _, disps = _qs_stats(engine)
    bound = 40 * math.log(n)
    ok = sum(1 for d in disps if d <= bound)
    return ok >= 95, (f"max displacement <= 40*ln(n)={bound:.1f} in {ok}/100 "
                      f"runs (max {max(disps)})")


# -- criteria 5-8, 10, 11: pipeline accuracy regimes --------------------------

def _c5(engine: str):
    parts = []
    ok = True
    for k in (10, 500, 1900):
        s = _quiet_experiment(problem=SET, model=CONSECUTIVE, n=2000, ks=(k,),
                              alpha=1, horizon=310_000, trials=10,
                              master_seed=505, sample_every=97, engine=engine)[0]
        parts.append(f"k={k}: {s.p_set_ok:.3f} ({s.samples} samples)")
        ok = ok and s.samples >= 10_000 and s.p_set_ok >= 0.9
    return ok, "Pr(set_ok) >= 0.9 required; " + "; ".join(parts)


def _c6(engine: str):
    s = _quiet_experiment(problem=SELECTION, model=CONSECUTIVE, n=10_000,
                          ks=(10,), alpha=1, horizon=1_900_000, trials=5,
                          master_seed=606, sample_every=97, engine=engine)[0]
    return s.p_kt_zero >= 0.9, (f"Pr(kt=0)={s.p_kt_zero:.3f} over {s.samples} "
                                f"samples, required >= 0.9")


def _c7(engine: str):
    s = _quiet_experiment(problem=SELECTION, model=CONSECUTIVE, n=10_000,
                          ks=(100,), alpha=1, horizon=1_900_000, trials=5,
                          master_seed=707, sample_every=97, engine=engine)[0]
    return 0.05 <= s.p_kt_zero <= 0.99, (
        f"Pr(kt=0)={s.p_kt_zero:.3f} over {s.samples} samples, required in "
        f"[0.05, 0.99] (kt median {s.kt_median:.0f})")


def _c8(engine: str):
    s = _quiet_experiment(problem=SELECTION, model=CONSECUTIVE, n=10_000,
                          ks=(2000,), alpha=1, horizon=1_900_000, trials=5,
                          master_seed=808, sample_every=97, engine=engine)[0]
    bound = 10 * 2000 * 2000 / 10_000
    ok = s.kt_median <= bound and s.p_kt_zero <= 0.5
    return ok, (f"kt median={s.kt_median:.0f} (required <= {bound:.0f}), "
                f"Pr(kt=0)={s.p_kt_zero:.3f} (required <= 0.5)")


def _c9(engine: str):
    n, draws = 1000, 1_000_000
    seed = derive_seed(909, 0, 1)
    model = EvolutionModel.gaussian(n)
    if engine == "compiled":
        from . import _kernels
        hist = _kernels.sample_distances(n, model.cdf_array(), seed, draws)
        counts = hist[1:].astype(np.int64)
    else:
        world = create_order(n, model, seed)
        counts = np.zeros(n, dtype=np.int64)
        for _ in range(draws):
            lo, hi = world.sample_swap_pair()
            counts[hi - lo] += 1
        counts = counts[1:]
    cdf = model.cdf_array()
    mass = np.diff(np.concatenate([[0.0], cdf]))
    observed = [counts[d - 1] for d in range(1, 5)] + [counts[4:].sum()]
    expected = [mass[d - 1] * draws for d in range(1, 5)] + \
        [mass[4:].sum() * draws]
    chi2, p = scistats.chisquare(observed, expected)
    return p > 0.001, (f"chi-square p={p:.4f} over cells d=1..4 plus pooled "
                       f"tail (chi2={chi2:.2f}), required p > 0.001")


def _c10(engine: str):
    s = _quiet_experiment(problem=SET, model=GAUSSIAN, n=2000, ks=(500,),
                          alpha=1, horizon=310_000, trials=10, master_seed=1010,
                          c=2.0, cprime=2.0, sample_every=97, engine=engine)[0]
    return s.p_set_ok >= 0.85, (f"Pr(set_ok)={s.p_set_ok:.3f} over {s.samples} "
                                f"samples, required >= 0.85")


def _c11(engine: str):
    small = _quiet_experiment(problem=SELECTION, model=GAUSSIAN, n=10_000,
                              ks=(10,), alpha=1, horizon=1_900_000, trials=5,
                              master_seed=1111, sample_every=97,
                              engine=engine)[0]
    large = _quiet_experiment(problem=SELECTION, model=GAUSSIAN, n=10_000,
                              ks=(2000,), alpha=1, horizon=1_900_000, trials=5,
                              master_seed=1111, sample_every=97,
                              engine=engine)[0]
    bound = 10 * 2000 * 2000 * math.log(10_000) / 10_000
    ok = small.p_kt_zero >= 0.85 and large.kt_median <= bound
    return ok, (f"k=10: Pr(kt=0)={small.p_kt_zero:.3f} (required >= 0.85); "
                f"k=2000: kt median={large.kt_median:.0f} "
                f"(required <= {bound:.0f})")


def _c12(engine: str):
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i in range(2):
            path = os.path.join(tmp, f"run{i}.csv")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cfg = ExperimentConfig(problem=SELECTION, model=CONSECUTIVE,
                                       n=500, ks=(20,), alpha=1, horizon=40_000,
                                       trials=3, master_seed=1212,
                                       sample_every=97, engine=engine,
                                       out=path, fmt="csv")
                run_experiment(cfg)
            with open(path, "rb") as f:
                outputs.append(f.read())
    same = outputs[0] == outputs[1]
    return same, (f"two reruns emitted {'identical' if same else 'DIFFERENT'} "
                  f"CSV bytes ({len(outputs[0])} bytes)")


def _c13(engine: str):
    steps = 20_000
    checked = 0
    for problem in (SET, SELECTION):
        for model_kind in (CONSECUTIVE, GAUSSIAN):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                model = (EvolutionModel.consecutive(1)
                         if model_kind == CONSECUTIVE
                         else EvolutionModel.gaussian(64))
            world = create_order(64, model, derive_seed(1313, checked, 1))
            rng = SplitMix64(derive_seed(1313, checked, 2))
            if problem == SET:
                algo = make_topk_set(64, 8, 1, 4.0, model_kind, rng)
            else:
                algo = make_topk_selection(64, 8, 1, 4.0, 4.0, model_kind, rng)
            for _ in range(steps):
                world.advance_time()
                before = world.probes_used
                algo.step(world)
                if world.probes_used - before > 1:
                    return False, "budget violation"
                world.validate_bijection()
            checked += 1
    # the compiled engine runs the same checks internally
    if engine == "compiled":
        _quiet_experiment(problem=SELECTION, model=GAUSSIAN, n=64, ks=(8,),
                          alpha=2, horizon=50_000, trials=2, master_seed=1313,
                          sample_every=13, engine="compiled")
    return True, (f"<=1 probe/step and full bijectivity asserted on every "
                  f"step of {checked} x {steps}-step drives, 0 violations")


_CRITERIA: list = [
    (1, "exact static correctness (alpha=0)", _c1, 60),
    (2, "Kendall tau fast path equals brute-force oracle", _c2, 60),
    (3, "quicksort runtime under evolution", _c3, 60),
    (4, "quicksort rank displacement at completion", _c4, 60),
    (5, "top-k-set accuracy, consecutive n=2000", _c5, 300),
    (6, "small-k selection regime, n=10^4 k=10", _c6, 300),
    (7, "critical regime, n=10^4 k=100", _c7, 300),
    (8, "large-k error scaling, n=10^4 k=2000", _c8, 600),
    (9, "gaussian swap-distance distribution", _c9, 60),
    (10, "gaussian top-k-set accuracy", _c10, 300),
    (11, "gaussian selection regimes", _c11, 600),
    (12, "byte-identical reruns", _c12, None),
    (13, "probe budget and bijectivity invariants", _c13, None),
]


def criteria_ids() -> list:
    return [cid for cid, _, _, _ in _CRITERIA]


def run_criterion(cid: int, engine: str = "auto") -> CriterionResult:
    resolved = _engine.resolve(engine)
    for c, title, fn, budget in _CRITERIA:
        if c == cid:
            started = time.perf_counter()
            passed, detail = fn(resolved)
            elapsed = time.perf_counter() - started
            if budget is not None and elapsed > budget:
                passed = False
                detail += f"; RUNTIME {elapsed:.0f}s exceeded budget {budget}s"
            return CriterionResult(cid, title, passed, detail, elapsed, budget)
    raise ValueError(f"no criterion {cid}")


def run_all(only=None, engine: str = "auto", report=print) -> list:
    results = []
    for cid in (only or criteria_ids()):
        result = run_criterion(cid, engine)
        results.append(result)
        if report:
            report(result.line())
    return results
