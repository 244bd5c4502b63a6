"""Suffix similarity and remaining-time error measures.

Sequences are activity-index sequences with EOC already stripped.
"""
from collections import Counter
from itertools import groupby
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np


def dl_distance(s1: Sequence, s2: Sequence) -> int:
    """Optimal-string-alignment Damerau-Levenshtein distance.

    Unit cost for insertion, deletion, substitution and adjacent transposition;
    no substring is edited twice.

        >>> dl_distance((1, 2, 3), (1, 3, 2))
        1
        >>> dl_distance((1, 2), ())
        2
    """
    s1, s2 = tuple(s1), tuple(s2)
    if s1 == s2:
        return 0
    len_1, len_2 = len(s1), len(s2)
    if len_1 == 0:
        return len_2
    if len_2 == 0:
        return len_1

    # three rolling rows: two rows back (for transpositions), previous, current
    dprev = list(range(len_2 + 1))
    d0 = list(range(len_2 + 1))
    d1 = [0] * (len_2 + 1)
    for i in range(len_1):
        d1[0] = i + 1
        for j in range(len_2):
            cost = d0[j] + (s1[i] != s2[j])
            if d1[j] + 1 < cost:
                cost = d1[j] + 1
            if d0[j + 1] + 1 < cost:
                cost = d0[j + 1] + 1
            if i > 0 and j > 0 and s1[i] == s2[j - 1] and s1[i - 1] == s2[j]:
                if dprev[j - 1] + 1 < cost:
                    cost = dprev[j - 1] + 1
            d1[j + 1] = cost
        dprev, d0, d1 = d0, d1, dprev
    return d0[-1]


def sdl(s1: Sequence, s2: Sequence) -> float:
    """1 - DL / max(len). Two empty sequences count as identical."""
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - dl_distance(s1, s2) / longest


def ras(ground: Sequence, predicted: Sequence) -> float:
    """Repetitive activity similarity: 1 - sum|cG - cP| / sum(cG + cP) over all activities seen."""
    count_g = Counter(ground)
    count_p = Counter(predicted)
    total = sum(count_g.values()) + sum(count_p.values())
    if total == 0:
        return 1.0
    activities = set(count_g) | set(count_p)
    diff = sum(abs(count_g[a] - count_p[a]) for a in activities)
    return 1.0 - diff / total


def mae(pairs: Iterable[Tuple[float, float]]) -> float:
    """Mean absolute error over (actual, predicted) pairs, in the unit of the inputs."""
    arr = np.asarray(list(pairs), dtype=float)
    if arr.size == 0:
        raise ValueError("mae needs at least one (actual, predicted) pair")
    return float(np.mean(np.abs(arr[:, 0] - arr[:, 1])))


def repetition_profile(s: Sequence) -> Dict[int, int]:
    """Maximal runs of identical consecutive activities, tallied by run length."""
    runs = Counter(sum(1 for _ in group) for _, group in groupby(s))
    return dict(sorted(runs.items()))


def merge_profiles(profiles: Iterable[Mapping[int, int]]) -> Dict[int, int]:
    total: Counter = Counter()
    for profile in profiles:
        total.update(profile)
    return dict(sorted(total.items()))


def profile_distance(a: Mapping[int, int], b: Mapping[int, int]) -> float:
    """L1 distance between two run-length profiles built over the same pairs."""
    lengths = set(a) | set(b)
    return float(sum(abs(a.get(length, 0) - b.get(length, 0)) for length in lengths))
