import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evosort.metrics import (count_inversions, count_inversions_py,
                             kendall_tau_brute, kendall_tau_restricted,
                             max_rank_displacement,
                             max_rank_displacement_brute, topk_set_correct)
from evosort.order import Permutation
from evosort.quicksort import OrderEstimate
from evosort.rng import SplitMix64


def perm_from_decreasing(order):
    n = len(order)
    elem = [0] + list(order)
    rank = [0] * (n + 1)
    for r in range(1, n + 1):
        rank[elem[r]] = r
    return Permutation(rank, elem)


# -- inversion counting --------------------------------------------------------

def brute_inversions(seq):
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
               if seq[i] > seq[j])


def test_inversions_exhaustive_small():
    for m in range(1, 7):
        for perm in itertools.permutations(range(m)):
            expected = brute_inversions(perm)
            assert count_inversions_py(perm) == expected
            assert count_inversions(list(perm)) == expected


@given(st.lists(st.integers(0, 1000), min_size=0, max_size=200))
@settings(max_examples=100, deadline=None)
def test_inversions_property(seq):
    # works on arbitrary integer sequences, not just permutations
    assert count_inversions_py(seq) == brute_inversions(seq)


# -- restricted Kendall tau ------------------------------------------------------

def test_kt_identity_is_zero():
    truth = perm_from_decreasing([5, 4, 3, 2, 1])
    assert kendall_tau_restricted([5, 4, 3], truth) == 0


def test_kt_reverse_k3():
    truth = perm_from_decreasing([5, 4, 3, 2, 1])
    assert kendall_tau_restricted([3, 4, 5], truth) == 3


def test_kt_rejects_duplicates():
    truth = perm_from_decreasing([3, 2, 1])
    with pytest.raises(ValueError):
        kendall_tau_restricted([2, 2], truth)


def test_kt_matches_brute_on_random_cases():
    rng = SplitMix64(77)
    n = 30
    for _ in range(1000):
        k = 2 + rng.randbelow(11)
        ids = list(range(1, n + 1))
        for i in range(n - 1, 0, -1):
            j = rng.randbelow(i + 1)
            ids[i], ids[j] = ids[j], ids[i]
        truth = perm_from_decreasing(ids)
        pred = ids[:k][::-1] if rng.randbelow(2) else ids[-k:]
        for i in range(k - 1, 0, -1):
            j = rng.randbelow(i + 1)
            pred[i], pred[j] = pred[j], pred[i]
        assert kendall_tau_restricted(pred, truth) == \
            kendall_tau_brute(pred, truth)


def test_kt_symmetric_under_simultaneous_reversal():
    rng = SplitMix64(78)
    for _ in range(200):
        n = 8
        ids = list(range(1, n + 1))
        for i in range(n - 1, 0, -1):
            j = rng.randbelow(i + 1)
            ids[i], ids[j] = ids[j], ids[i]
        truth = perm_from_decreasing(ids)
        reversed_truth = perm_from_decreasing(ids[::-1])
        pred = ids[:5]
        assert kendall_tau_restricted(pred, truth) == \
            kendall_tau_restricted(pred[::-1], reversed_truth)


def test_kt_bounded_by_pairs():
    truth = perm_from_decreasing(list(range(12, 0, -1)))
    for k in (1, 2, 5, 12):
        pred = list(range(1, k + 1))
        assert kendall_tau_restricted(pred, truth) <= k * (k - 1) // 2


def test_kt_zero_and_set_ok_iff_exact_topk():
    # enumeration: over all ordered k-subsets of a small universe, kt == 0
    # together with set_ok holds exactly for the true top-k order
    truth_order = [6, 3, 5, 1, 4, 2]
    truth = perm_from_decreasing(truth_order)
    k = 3
    exact = tuple(truth_order[:k])
    for pred in itertools.permutations(truth_order, k):
        kt = kendall_tau_restricted(list(pred), truth)
        ok = topk_set_correct(set(pred), truth, k)
        assert (kt == 0 and ok) == (pred == exact)


# -- set correctness -------------------------------------------------------------

def test_set_correct_examples():
    truth = perm_from_decreasing([5, 2, 4, 1, 3])
    assert topk_set_correct({5, 2}, truth, 2)
    assert not topk_set_correct({5, 4}, truth, 2)  # rank k+1 element swapped in
    assert topk_set_correct({1, 2, 3, 4, 5}, truth, 5)


def test_set_correct_rejects_size_mismatch():
    truth = perm_from_decreasing([2, 1])
    with pytest.raises(ValueError):
        topk_set_correct({1, 2}, truth, 1)


# -- displacement ----------------------------------------------------------------

def test_displacement_zero_for_exact():
    order = [4, 3, 2, 1]
    truth = perm_from_decreasing(order)
    assert max_rank_displacement(OrderEstimate(tuple(order)), truth) == 0


def test_displacement_one_for_adjacent_swap():
    truth = perm_from_decreasing([4, 3, 2, 1])
    assert max_rank_displacement([3, 4, 2, 1], truth) == 1


def test_displacement_matches_brute():
    rng = SplitMix64(79)
    for _ in range(500):
        n = 2 + rng.randbelow(9)
        ids = list(range(1, n + 1))
        for i in range(n - 1, 0, -1):
            j = rng.randbelow(i + 1)
            ids[i], ids[j] = ids[j], ids[i]
        truth = perm_from_decreasing(ids)
        pred = ids[:]
        for i in range(n - 1, 0, -1):
            j = rng.randbelow(i + 1)
            pred[i], pred[j] = pred[j], pred[i]
        assert max_rank_displacement(pred, truth) == \
            max_rank_displacement_brute(pred, truth)


def test_displacement_empty_estimate():
    truth = perm_from_decreasing([2, 1])
    assert max_rank_displacement([], truth) == 0
