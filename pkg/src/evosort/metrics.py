"""Ground-truth error measurement for published top-k answers.

All functions compare a prediction against an oracle snapshot of the true
order; nothing here is visible to the algorithms themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .order import Permutation
from .quicksort import OrderEstimate

try:
    from ._kernels import count_inversions as _count_inversions_c
except ImportError:
    _count_inversions_c = None


@dataclass(frozen=True)
class ErrorRecord:
    """Per-time-step measurement of a published estimate."""

    t: int
    warming_up: bool
    set_ok: Optional[bool]
    kt: Optional[int]
    max_disp: Optional[int]


def count_inversions(seq: Sequence[int]) -> int:
    """Pairs (i < j) with seq[i] > seq[j], by merge counting in O(m log m)."""
    if _count_inversions_c is not None:
        return _count_inversions_c(list(seq))
    return count_inversions_py(seq)


def count_inversions_py(seq: Sequence[int]) -> int:
    a = list(seq)
    buf = [0] * len(a)
    total = 0
    width = 1
    m = len(a)
    while width < m:
        for lo in range(0, m - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, m)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    j += 1
                    total += mid - i
                k += 1
            buf[k:hi] = a[i:mid] if i < mid else a[j:hi]
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return total


def kendall_tau_restricted(pred: Sequence[int], truth: Permutation) -> int:
    """Pairs of predicted elements whose relative order in ``pred`` (a
    decreasing list) disagrees with their relative order under the true
    global ranks."""
    ranks = [truth.rank_of(e) for e in pred]
    if len(set(ranks)) != len(ranks):
        raise ValueError("prediction contains duplicate element ids")
    return count_inversions(ranks)


def kendall_tau_brute(pred: Sequence[int], truth: Permutation) -> int:
    """O(k^2) pair enumeration; the independent oracle for the fast path."""
    ranks = [truth.rank_of(e) for e in pred]
    if len(set(ranks)) != len(ranks):
        raise ValueError("prediction contains duplicate element ids")
    k = len(ranks)
    total = 0
    for i in range(k):
        for j in range(i + 1, k):
            if ranks[i] > ranks[j]:
                total += 1
    return total


def topk_set_correct(pred_set, truth: Permutation, k: int) -> bool:
    """True iff the predicted set is exactly the true top-k set."""
    pred_set = set(pred_set)
    if len(pred_set) != k:
        raise ValueError(f"expected a set of size {k}, got {len(pred_set)}")
    return all(truth.rank_of(e) <= k for e in pred_set)


def max_rank_displacement(est, truth: Permutation) -> int:
    """Largest |true rank - estimated rank| over the estimate's elements.

    Estimated ranks are positions within the estimate; true ranks are global,
    so the two coincide in scale only when the estimate covers everything.
    """
    ranked = est.ranked if isinstance(est, OrderEstimate) else list(est)
    if not ranked:
        return 0
    return max(abs(truth.rank_of(e) - (i + 1)) for i, e in enumerate(ranked))


def max_rank_displacement_brute(est, truth: Permutation) -> int:
    """Direct recomputation oracle for ``max_rank_displacement``."""
    ranked = est.ranked if isinstance(est, OrderEstimate) else list(est)
    best = 0
    for pos in range(1, len(ranked) + 1):
        e = ranked[pos - 1]
        disp = truth.rank_of(e) - pos
        if disp < 0:
            disp = -disp
        if disp > best:
            best = disp
    return best
