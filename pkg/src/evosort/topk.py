"""Interleaved top-k pipelines under a one-probe-per-time-step budget.

A pipeline is a fixed set of lanes, each owning one residue class of the
time counter.  Every lane repeatedly runs a resumable sub-algorithm (a
quicksort or a local sort), feeding it exactly one truthful comparison on
each of its scheduled steps, and republishing its output the moment a run
completes.  Lanes communicate only through mailbox snapshots taken when a
run starts; a lane whose input has not been produced yet forfeits its steps.

Two problems are supported, each under both evolution models:

* top-k set: a full sort keeps a candidate window around rank k up to date
  while a second sort refines the window into the current top-k set.
* top-k selection: a full sort feeds a candidate set, which is narrowed to a
  shortlist of size k, ordered, and then continuously repaired by block-local
  sorting, which publishes the top-k order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .localsort import LocalSortRun
from .order import CONSECUTIVE, GAUSSIAN, EvolvingOrder
from .quicksort import QuicksortRun

SET = "set"
SELECTION = "selection"

KIND_WARMING = "warming"
KIND_SET = "set"
KIND_ORDER = "order"

WARMING_UP = None  # published placeholder before the first full pass


@dataclass(frozen=True)
class TopKEstimate:
    """A pipeline's published answer: a set, an order, or warming-up."""

    kind: str
    members: Optional[frozenset] = None
    ranked: Optional[tuple] = None
    produced_at: int = 0

    @property
    def warming_up(self) -> bool:
        return self.kind == KIND_WARMING


def pipeline_params(problem: str, model_kind: str, n: int, k: int, alpha: int,
                    c: float, cprime: float) -> dict:
    """Derived integer parameters shared by both engines.

    margin:   half-width of the top-k-set candidate window around rank k.
    cmargin:  extra candidates kept above k by the selection pipeline.
    block:    local-sort block size.
    modulus:  number of lanes (residue classes).
    """
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if c <= 0 or cprime <= 0:
        raise ValueError("margin constants must be positive")
    ln_n = math.log(n)
    if model_kind == CONSECUTIVE:
        margin = max(1, math.ceil(c * alpha * ln_n))
        cmargin = max(0, math.ceil(cprime * alpha * ln_n))
        block = math.ceil(4 * c) + 1
        modulus = 2 if problem == SET else 4
    elif model_kind == GAUSSIAN:
        margin = max(1, math.ceil(c * ln_n ** 1.5))
        cmargin = max(0, math.ceil(cprime * ln_n ** 1.5))
        block = 4 * math.ceil(c * math.sqrt(ln_n)) + 1
        modulus = 2 if problem == SET else 3
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")
    return {"margin": margin, "cmargin": cmargin, "block": block,
            "modulus": modulus}


class Lane:
    """One residue class: a resumable run plus its input snapshot.

    ``source`` pulls the freshest upstream value (None while unavailable),
    ``build`` turns it into a settled run, ``publish`` consumes a completed
    result.  A lane restarts on the same step it completes; a run that needs
    no comparisons at all publishes on the lane's next scheduled step.
    """

    __slots__ = ("name", "run", "payload", "completions", "builds",
                 "_source", "_build", "_publish")

    def __init__(self, name, source, build, publish):
        self.name = name
        self.run = None
        self.payload = None
        self.completions = 0
        self.builds = 0
        self._source = source
        self._build = build
        self._publish = publish

    def _try_build(self) -> bool:
        payload = self._source()
        if payload is None:
            return False
        self.payload = payload
        self.run = self._build(payload)
        self.builds += 1
        return True

    def _complete(self, t: int) -> None:
        self._publish(self.run.result(), self.payload, t)
        self.completions += 1
        self.run = None
        self.payload = None

    def step(self, world: EvolvingOrder, probe_log=None) -> bool:
        """Spend this step's probe on the lane's run, if it has one to spend
        it on.  Returns True iff a probe was issued."""
        t = world.t
        if self.run is None and not self._try_build():
            return False
        if self.run.done:
            self._complete(t)
            return False
        req = self.run.pending()
        answer = world.probe_compare(req.a, req.b)
        if probe_log is not None:
            probe_log.append((t, self.name, req.a, req.b, answer))
        self.run.feed(answer)
        if self.run.done:
            self._complete(t)
            self._try_build()
        return True


class InterleavedAlgorithm:
    """A schedule of lanes plus the rolling published estimate."""

    def __init__(self, problem, model_kind, n, k, params, lanes_by_residue,
                 mailbox):
        self.problem = problem
        self.model_kind = model_kind
        self.n = n
        self.k = k
        self.params = params
        self.modulus = params["modulus"]
        self.lanes = lanes_by_residue
        self.mailbox = mailbox
        self.published = TopKEstimate(KIND_WARMING)
        self.forfeited = 0
        self.probe_log = None

    def step(self, world: EvolvingOrder) -> bool:
        """Advance the lane owning the current residue by one probe."""
        lane = self.lanes[world.t % self.modulus]
        before = world.probes_used
        used = lane.step(world, self.probe_log)
        if world.probes_used - before != (1 if used else 0):
            raise RuntimeError("probe budget violated: more than one probe "
                               "issued in a single time step")
        if not used:
            self.forfeited += 1
        return used


def make_topk_set(n: int, k: int, alpha: int, c: float, model_kind: str,
                  rng) -> InterleavedAlgorithm:
    """Two lanes: a full sort maintains a locked prefix and a candidate
    window around rank k; a window sort publishes the current top-k set."""
    params = pipeline_params(SET, model_kind, n, k, alpha, c, c)
    margin = params["margin"]
    mailbox = {}
    universe = tuple(range(1, n + 1))

    algo = None  # set below; publish closures capture it

    def full_publish(est, payload, t):
        lo = max(k - margin, 0)
        hi = min(k + margin, n)
        mailbox["window"] = (est.ranked[:lo], est.ranked[lo:hi])

    def window_publish(est, payload, t):
        locked = payload[0]
        members = frozenset(locked) | frozenset(est.ranked[: k - len(locked)])
        algo.published = TopKEstimate(KIND_SET, members=members, produced_at=t)

    lanes = {
        1: Lane("full", lambda: universe,
                lambda items: QuicksortRun(items, rng), full_publish),
        0: Lane("window", lambda: mailbox.get("window"),
                lambda payload: QuicksortRun(payload[1], rng),
                window_publish),
    }
    algo = InterleavedAlgorithm(SET, model_kind, n, k, params, lanes, mailbox)
    return algo


def make_topk_selection(n: int, k: int, alpha: int, c: float, cprime: float,
                        model_kind: str, rng) -> InterleavedAlgorithm:
    """Selection pipeline publishing the top-k order.

    Consecutive model, four lanes: full sort -> candidates; candidate sort ->
    shortlist (top k); shortlist sort -> shortlist order; local sort ->
    published order.  Gaussian model, three lanes: the candidate sort's own
    output order doubles as the shortlist order.
    """
    params = pipeline_params(SELECTION, model_kind, n, k, alpha, c, cprime)
    cmargin = params["cmargin"]
    block = params["block"]
    mailbox = {}
    universe = tuple(range(1, n + 1))

    algo = None

    def full_publish(est, payload, t):
        mailbox["cand"] = est.ranked[: min(k + cmargin, n)]

    def cand_publish(est, payload, t):
        mailbox["shortlist"] = est.ranked[:k]
        if model_kind == GAUSSIAN:
            mailbox["ordered"] = est.ranked[:k]

    def top_publish(est, payload, t):
        mailbox["ordered"] = est.ranked

    def local_publish(est, payload, t):
        algo.published = TopKEstimate(KIND_ORDER, ranked=est.ranked,
                                      produced_at=t)

    full = Lane("full", lambda: universe,
                lambda items: QuicksortRun(items, rng), full_publish)
    cand = Lane("cand", lambda: mailbox.get("cand"),
                lambda items: QuicksortRun(items, rng), cand_publish)
    local = Lane("local", lambda: mailbox.get("ordered"),
                 lambda ordered: LocalSortRun(ordered, block), local_publish)

    if model_kind == CONSECUTIVE:
        top = Lane("top", lambda: mailbox.get("shortlist"),
                   lambda items: QuicksortRun(items, rng), top_publish)
        lanes = {1: full, 2: cand, 3: top, 0: local}
    else:
        lanes = {1: full, 2: cand, 0: local}

    algo = InterleavedAlgorithm(SELECTION, model_kind, n, k, params, lanes,
                                mailbox)
    return algo


def drive(world: EvolvingOrder, algo: InterleavedAlgorithm,
          steps: int) -> list:
    """Run the budgeted loop: each step advances the world once, routes the
    single probe to the scheduled lane, and records the published estimate."""
    trace = []
    for _ in range(steps):
        world.advance_time()
        algo.step(world)
        trace.append(algo.published)
    return trace


def trace_rows(world: EvolvingOrder, algo: InterleavedAlgorithm, steps: int):
    """Drive while yielding debug rows: step, lane, probe_a, probe_b, answer,
    estimate_kind, kt, set_ok (metrics against the live oracle)."""
    from .metrics import kendall_tau_restricted, topk_set_correct

    algo.probe_log = []
    for _ in range(steps):
        world.advance_time()
        n_logged = len(algo.probe_log)
        algo.step(world)
        probed = algo.probe_log[n_logged:]
        t, lane_name, a, b, ans = (
            probed[0] if probed
            else (world.t, algo.lanes[world.t % algo.modulus].name, "", "", "")
        )
        est = algo.published
        truth = world.oracle_snapshot()
        kt = set_ok = ""
        if est.kind == KIND_ORDER:
            kt = kendall_tau_restricted(est.ranked, truth)
            set_ok = int(topk_set_correct(est.ranked, truth, algo.k))
        elif est.kind == KIND_SET:
            set_ok = int(topk_set_correct(est.members, truth, algo.k))
        yield {"step": t, "lane": lane_name, "probe_a": a, "probe_b": b,
               "answer": ans, "estimate_kind": est.kind, "kt": kt,
               "set_ok": set_ok}
