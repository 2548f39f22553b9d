"""Randomized quicksort as a resumable machine that emits one comparison
request per feed.

The driver meters it at one probe per time step; answers may be mutually
inconsistent when the underlying order evolves mid-run, and the run still
terminates with a total order of its snapshot (each element simply lands
where the answer at query time put it).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence


class ComparisonRequest(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True)
class OrderEstimate:
    """A total order over a snapshot: ranked[0] is the estimated largest."""

    ranked: tuple

    @property
    def as_rank(self) -> dict:
        return {e: i + 1 for i, e in enumerate(self.ranked)}

    def rank_of(self, element: int) -> int:
        return self.ranked.index(element) + 1

    def __len__(self) -> int:
        return len(self.ranked)


_SORT = 0  # frame: [kind, segment]
_PART = 1  # frame: [kind, segment, pivot_index, scan_index, larger, smaller]
_EMIT = 2  # frame: [kind, element]


class QuicksortRun:
    """One quicksort execution over a snapshot of element ids.

    Pivots are drawn uniformly from the sub-array being split.  Comparisons
    are issued depth-first, the larger-side sub-array first, so output ranks
    are produced in decreasing order as the run progresses.
    """

    __slots__ = ("comparisons_used", "_rng", "_stack", "_out", "_pending")

    def __init__(self, items: Sequence[int], rng):
        items = list(items)
        if not items:
            raise ValueError("cannot sort an empty snapshot")
        if len(set(items)) != len(items):
            raise ValueError("snapshot contains duplicate element ids")
        self.comparisons_used = 0
        self._rng = rng
        self._stack = [[_SORT, items]]
        self._out = []
        self._pending = None
        self._settle()

    @property
    def done(self) -> bool:
        return self._pending is None

    def pending(self) -> Optional[ComparisonRequest]:
        """The comparison the run is waiting on, or None when done.  Stable
        under repeated calls."""
        return self._pending

    def feed(self, a_larger: bool) -> None:
        """Answer the pending request: True iff request.a ranked above
        request.b at query time."""
        if self._pending is None:
            raise RuntimeError("cannot feed a completed run")
        frame = self._stack[-1]
        _, seg, pidx, i, larger, smaller = frame
        (larger if a_larger else smaller).append(seg[i])
        frame[3] = i + 1
        self.comparisons_used += 1
        self._settle()

    def result(self) -> OrderEstimate:
        if self._pending is not None:
            raise RuntimeError("run has not terminated yet")
        return OrderEstimate(tuple(self._out))

    def _settle(self) -> None:
        """Advance zero-cost frames until a comparison is needed or the run
        completes."""
        stack = self._stack
        out = self._out
        while stack:
            frame = stack[-1]
            kind = frame[0]
            if kind == _EMIT:
                out.append(frame[1])
                stack.pop()
            elif kind == _SORT:
                seg = frame[1]
                if len(seg) <= 1:
                    out.extend(seg)
                    stack.pop()
                else:
                    pidx = self._rng.randbelow(len(seg))
                    stack[-1] = [_PART, seg, pidx, 0, [], []]
            else:  # _PART
                seg, pidx, i = frame[1], frame[2], frame[3]
                if i == pidx:
                    i += 1
                    frame[3] = i
                if i < len(seg):
                    self._pending = ComparisonRequest(seg[i], seg[pidx])
                    return
                larger, smaller = frame[4], frame[5]
                pivot = seg[pidx]
                stack.pop()
                stack.append([_SORT, smaller])
                stack.append([_EMIT, pivot])
                stack.append([_SORT, larger])
        self._pending = None


def qs_start(items: Sequence[int], rng) -> QuicksortRun:
    return QuicksortRun(items, rng)
