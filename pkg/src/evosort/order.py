"""The simulated world: a total order over n elements that drifts by random
rank swaps, observable only through truthful pairwise comparison probes.

Two evolution models are supported: ``consecutive`` (each swap exchanges a
uniformly random adjacent pair of ranks) and ``gaussian`` (the swap's rank
distance d is drawn with probability proportional to exp(-d^2/2), then a
uniform pair at that distance is swapped).  Rank 1 is the largest element.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .rng import TAG_EVOLUTION, TAG_INIT, SplitMix64, derive_seed

CONSECUTIVE = "consecutive"
GAUSSIAN = "gaussian"


class SwapEvent(NamedTuple):
    time: int
    rank_lo: int
    rank_hi: int
    distance: int


def gaussian_distance_cdf(n: int) -> np.ndarray:
    """Cumulative distribution of swap distances d in {1..n-1}.

    Mass at d is proportional to exp(-d^2/2), truncated to distances that fit
    in the array and renormalized.  The final entry is exactly 1.0; entries
    are non-decreasing (strictly increasing until the mass underflows
    float64, around d = 38).
    """
    if n < 2:
        raise ValueError("need n >= 2 for a distance distribution")
    d = np.arange(1, n, dtype=np.float64)
    mass = np.exp(-0.5 * d * d)
    cdf = np.cumsum(mass)
    cdf /= cdf[-1]
    return cdf


@dataclass(frozen=True)
class EvolutionModel:
    """How the order drifts: swap kind, swaps per step, and (for the gaussian
    kind) the precomputed distance CDF."""

    kind: str
    alpha: int
    gaussian_cdf: Optional[tuple] = field(default=None, repr=False)

    @staticmethod
    def consecutive(alpha: int = 1) -> "EvolutionModel":
        _check_alpha(alpha)
        return EvolutionModel(CONSECUTIVE, alpha)

    @staticmethod
    def gaussian(n: int, alpha: int = 1) -> "EvolutionModel":
        _check_alpha(alpha)
        if alpha != 1:
            warnings.warn(
                "gaussian model with alpha != 1 is outside the analyzed "
                "regime; simulating it anyway",
                stacklevel=2,
            )
        cdf = gaussian_distance_cdf(n)
        return EvolutionModel(GAUSSIAN, alpha, tuple(cdf.tolist()))

    def cdf_array(self) -> np.ndarray:
        if self.gaussian_cdf is None:
            return np.empty(0, dtype=np.float64)
        return np.asarray(self.gaussian_cdf, dtype=np.float64)


def _check_alpha(alpha: int) -> None:
    if not isinstance(alpha, int) or alpha < 0:
        raise ValueError(f"alpha must be a non-negative integer, got {alpha!r}")


class Permutation:
    """A bijection between element ids and ranks, both 1..n (rank 1 largest)."""

    __slots__ = ("n", "_rank", "_elem")

    def __init__(self, rank: list, elem: list):
        self.n = len(rank) - 1
        self._rank = rank
        self._elem = elem

    @staticmethod
    def identity(n: int) -> "Permutation":
        ids = list(range(n + 1))
        return Permutation(ids[:], ids[:])

    def rank_of(self, element: int) -> int:
        return self._rank[element]

    def element_at(self, rank: int) -> int:
        return self._elem[rank]

    def top_k(self, k: int) -> list:
        """Elements at ranks 1..k."""
        return self._elem[1 : k + 1]

    def copy(self) -> "Permutation":
        return Permutation(self._rank[:], self._elem[:])

    def is_bijective(self) -> bool:
        n = self.n
        seen = [False] * (n + 1)
        for r in range(1, n + 1):
            e = self._elem[r]
            if not 1 <= e <= n or seen[e] or self._rank[e] != r:
                return False
            seen[e] = True
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._elem == other._elem

    def __repr__(self) -> str:
        return f"Permutation(n={self.n})"


class EvolvingOrder:
    """The ground-truth order plus its evolution state and time counter.

    The evolution stream is independent of probing: probes are pure reads and
    consume no randomness, so a world trajectory replays identically no
    matter what an algorithm asks.
    """

    __slots__ = ("n", "model", "t", "swap_log_len", "probes_used", "_rank",
                 "_elem", "_evo", "_cdf")

    def __init__(self, n: int, model: EvolutionModel, perm: Permutation,
                 evo_rng: SplitMix64):
        self.n = n
        self.model = model
        self.t = 0
        self.swap_log_len = 0
        self.probes_used = 0
        self._rank = perm._rank
        self._elem = perm._elem
        self._evo = evo_rng
        self._cdf = model.gaussian_cdf

    # -- observation ------------------------------------------------------

    def probe_compare(self, a: int, b: int) -> bool:
        """Truthful comparison under the current order: True iff a is larger
        (ranks above) b right now."""
        n = self.n
        if a == b:
            raise ValueError("cannot compare an element with itself")
        if not (1 <= a <= n and 1 <= b <= n):
            raise ValueError(f"element ids must be in 1..{n}: got {a}, {b}")
        self.probes_used += 1
        return self._rank[a] < self._rank[b]

    def oracle_snapshot(self) -> Permutation:
        """Deep copy of the current permutation (metrics ground truth; not
        part of the probe interface)."""
        return Permutation(self._rank[:], self._elem[:])

    def validate_bijection(self) -> None:
        if not Permutation(self._rank, self._elem).is_bijective():
            raise RuntimeError("permutation bijectivity violated")

    # -- evolution --------------------------------------------------------

    def sample_swap_pair(self) -> tuple:
        """Draw the next (rank_lo, rank_hi) swap from the evolution stream
        without applying it."""
        n = self.n
        if self._cdf is None:
            lo = 1 + self._evo.randbelow(n - 1)
            return lo, lo + 1
        u = self._evo.unif01()
        cdf = self._cdf
        idx = 0
        while cdf[idx] <= u:
            idx += 1
        d = idx + 1
        lo = 1 + self._evo.randbelow(n - d)
        return lo, lo + d

    def advance_time(self) -> list:
        """Apply one time step: alpha sequential swaps, each sampled from the
        permutation state left by the previous one.  Returns the SwapEvents
        in application order."""
        self.t += 1
        t = self.t
        rank = self._rank
        elem = self._elem
        events = []
        for _ in range(self.model.alpha):
            lo, hi = self.sample_swap_pair()
            e1 = elem[lo]
            e2 = elem[hi]
            elem[lo] = e2
            elem[hi] = e1
            rank[e1] = hi
            rank[e2] = lo
            if elem[rank[e1]] != e1 or elem[rank[e2]] != e2:
                raise RuntimeError("swap corrupted the permutation")
            events.append(SwapEvent(t, lo, hi, hi - lo))
        self.swap_log_len += len(events)
        return events


def create_order(n: int, model: EvolutionModel, seed: int,
                 identity_init: bool = False) -> EvolvingOrder:
    """Build a world of n elements at t=0.

    The initial permutation is uniformly random, drawn from an init stream
    derived from ``seed``; the evolution stream is derived separately, so the
    trajectory of swaps does not depend on the initial shuffle.
    ``identity_init`` puts element i at rank i instead (debugging aid).
    """
    if n < 2:
        raise ValueError(f"need at least 2 elements, got n={n}")
    if model.kind == GAUSSIAN:
        if model.gaussian_cdf is None or len(model.gaussian_cdf) != n - 1:
            raise ValueError("gaussian model was built for a different n")
    elif model.kind != CONSECUTIVE:
        raise ValueError(f"unknown model kind {model.kind!r}")

    elem = list(range(n + 1))
    if not identity_init:
        init = SplitMix64(derive_seed(seed, TAG_INIT))
        for r in range(n, 1, -1):
            j = 1 + init.randbelow(r)
            elem[r], elem[j] = elem[j], elem[r]
    rank = [0] * (n + 1)
    for r in range(1, n + 1):
        rank[elem[r]] = r

    evo = SplitMix64(derive_seed(seed, TAG_EVOLUTION))
    return EvolvingOrder(n, model, Permutation(rank, elem), evo)


def swap_events_to_csv(events, fileobj) -> None:
    """Dump a swap log as CSV (time, rank_lo, rank_hi, distance)."""
    fileobj.write("time,rank_lo,rank_hi,distance\n")
    for ev in events:
        fileobj.write(f"{ev.time},{ev.rank_lo},{ev.rank_hi},{ev.distance}\n")
