"""evosort: top-k tracking over an evolving total order, one comparison per
time step.

The package simulates a ground-truth permutation drifting by random rank
swaps (consecutive or gaussian-distance), runs interleaved quicksort /
local-sort pipelines against it under a strict one-probe-per-step budget,
and measures set correctness and restricted Kendall tau error against the
hidden truth.
"""

from .engine import HAVE_COMPILED
from .harness import ExperimentConfig, SummaryStats, run_experiment, run_trial
from .localsort import LocalSortRun, MaximumFindRun, local_sort
from .metrics import (ErrorRecord, count_inversions, kendall_tau_restricted,
                      max_rank_displacement, topk_set_correct)
from .order import (CONSECUTIVE, GAUSSIAN, EvolutionModel, EvolvingOrder,
                    Permutation, SwapEvent, create_order)
from .quicksort import ComparisonRequest, OrderEstimate, QuicksortRun, qs_start
from .rng import SplitMix64, derive_seed
from .topk import (SELECTION, SET, InterleavedAlgorithm, TopKEstimate, drive,
                   make_topk_selection, make_topk_set, pipeline_params)

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED", "ExperimentConfig", "SummaryStats", "run_experiment",
    "run_trial", "LocalSortRun", "MaximumFindRun", "local_sort",
    "ErrorRecord", "count_inversions", "kendall_tau_restricted",
    "max_rank_displacement", "topk_set_correct", "CONSECUTIVE", "GAUSSIAN",
    "EvolutionModel", "EvolvingOrder", "Permutation", "SwapEvent",
    "create_order", "ComparisonRequest", "OrderEstimate", "QuicksortRun",
    "qs_start", "SplitMix64", "derive_seed", "SELECTION", "SET",
    "InterleavedAlgorithm", "TopKEstimate", "drive", "make_topk_selection",
    "make_topk_set", "pipeline_params",
]
