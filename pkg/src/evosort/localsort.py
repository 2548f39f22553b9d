"""Block-local correction of a nearly-sorted order, one comparison per feed.

Local sort walks the input order with a sliding block: each round finds the
block's maximum by a linear scan, emits it as the next output rank, removes
it, and tops the block up with the next input element.  In a static world a
block of size b repairs any input whose ranks are displaced by at most
(b - 1) // 4.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .quicksort import ComparisonRequest, OrderEstimate


class MaximumFindRun:
    """Linear-scan champion tournament over a fixed block."""

    __slots__ = ("comparisons_used", "_block", "_champ", "_j")

    def __init__(self, block: Sequence[int]):
        if not block:
            raise ValueError("block must be non-empty")
        self.comparisons_used = 0
        self._block = list(block)
        self._champ = self._block[0]
        self._j = 1

    @property
    def done(self) -> bool:
        return self._j >= len(self._block)

    def pending(self) -> Optional[ComparisonRequest]:
        if self.done:
            return None
        return ComparisonRequest(self._champ, self._block[self._j])

    def feed(self, a_larger: bool) -> None:
        """Answer champion-vs-challenger; the challenger takes over unless the
        champion won."""
        if self.done:
            raise RuntimeError("cannot feed a completed scan")
        if not a_larger:
            self._champ = self._block[self._j]
        self._j += 1
        self.comparisons_used += 1

    def result(self) -> int:
        if not self.done:
            raise RuntimeError("scan has not finished")
        return self._champ


class LocalSortRun:
    """Resumable local sort of ``pi_ranked`` (an order over P) with the given
    block size."""

    __slots__ = ("comparisons_used", "_order", "_block", "_next", "_out",
                 "_scan")

    def __init__(self, pi_ranked: Sequence[int], block_size: int):
        pi_ranked = list(pi_ranked)
        if not pi_ranked:
            raise ValueError("cannot local-sort an empty order")
        if len(set(pi_ranked)) != len(pi_ranked):
            raise ValueError("order contains duplicate element ids")
        if block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {block_size}")
        self.comparisons_used = 0
        self._order = pi_ranked
        self._next = min(block_size, len(pi_ranked))
        self._block = pi_ranked[: self._next]
        self._out = []
        self._scan = MaximumFindRun(self._block)
        self._settle()

    @property
    def done(self) -> bool:
        return self._scan is None

    def pending(self) -> Optional[ComparisonRequest]:
        if self._scan is None:
            return None
        return self._scan.pending()

    def feed(self, a_larger: bool) -> None:
        if self._scan is None:
            raise RuntimeError("cannot feed a completed run")
        self._scan.feed(a_larger)
        self.comparisons_used += 1
        self._settle()

    def result(self) -> OrderEstimate:
        if self._scan is not None:
            raise RuntimeError("run has not terminated yet")
        return OrderEstimate(tuple(self._out))

    def _settle(self) -> None:
        """Emit champions of finished scans; blocks that collapse to one
        element resolve without comparisons."""
        while self._scan is not None and self._scan.done:
            champ = self._scan.result()
            self._out.append(champ)
            self._block.remove(champ)
            if self._next < len(self._order):
                self._block.append(self._order[self._next])
                self._next += 1
            if self._block:
                self._scan = MaximumFindRun(self._block)
            else:
                self._scan = None


def local_sort(pi_ranked: Sequence[int], block_size: int) -> LocalSortRun:
    return LocalSortRun(pi_ranked, block_size)
