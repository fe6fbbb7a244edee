"""Random inversion sort: swap a uniformly chosen pair if it is out of order."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..core import Process, uniform_index
from ._fast import inversion_sort_run


def count_inversions(entries: Sequence) -> int:
    # merge sort count; O(n log n)
    def sort_count(xs):
        if len(xs) <= 1:
            return list(xs), 0
        mid = len(xs) // 2
        left, a = sort_count(xs[:mid])
        right, b = sort_count(xs[mid:])
        merged, c, i, j = [], 0, 0, 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                merged.append(right[j])
                c += len(left) - i
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, a + b + c

    return sort_count(list(entries))[1]


@dataclass(frozen=True)
class ArrayState:
    entries: tuple
    inversions: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.inversions < 0:
            object.__setattr__(self, "inversions", count_inversions(self.entries))

    @property
    def absorbed(self) -> bool:
        return self.inversions == 0


def decode_pair(m: int, n: int) -> tuple[int, int]:
    """The ``m``-th pair ``(i, j)``, ``i < j``, in lexicographic order."""
    i = 0
    while m >= n - 1 - i:
        m -= n - 1 - i
        i += 1
    return i, i + 1 + m


def step_inversion_sort(state: ArrayState, rng: np.random.Generator) -> ArrayState:
    """Pick one of the ``C(n,2)`` position pairs uniformly; swap if inverted.

    A swap of an inverted pair ``(i, j)`` removes that inversion plus two for
    every entry strictly between the positions whose value lies strictly
    between the swapped values (one for entries equal to either value).
    """
    if state.absorbed:
        return state
    a = state.entries
    n = len(a)
    i, j = decode_pair(uniform_index(rng.random(), n * (n - 1) // 2), n)
    hi, lo = a[i], a[j]
    if not hi > lo:
        return state
    drop = 1
    for x in a[i + 1 : j]:
        if lo < x < hi:
            drop += 2
        elif x == lo or x == hi:
            drop += 1
    b = list(a)
    b[i], b[j] = lo, hi
    return ArrayState(tuple(b), state.inversions - drop)


def gen_adjacent_swapped(n: int) -> ArrayState:
    """``[2, 1, 4, 3, ...]``: ``n/2`` disjoint adjacent inversions."""
    if n % 2:
        raise ValueError("n must be even")
    entries = []
    for k in range(1, n, 2):
        entries += [k + 1, k]
    return ArrayState(tuple(entries), n // 2)


def sort_process(entries: Sequence, name: str = "inversion_sort") -> Process:
    init = ArrayState(tuple(entries))
    if len(init.entries) < 2:
        raise ValueError("need at least two entries")
    fast = None
    if all(isinstance(x, (int, np.integer)) and abs(int(x)) < 2**53 for x in init.entries):
        values = np.array(init.entries, dtype=np.float64)
        fast = lambda rng, max_steps: inversion_sort_run(rng, values, init.inversions, max_steps)  # noqa: E731
    return Process(
        name=name,
        initial=init,
        step=step_inversion_sort,
        potential=lambda s: float(s.inversions),
        absorbed=lambda s: s.absorbed,
        fast_run=fast,
    )


def random_permutation_sort(n: int) -> Process:
    """Inversion sort on a uniformly random permutation drawn from the stream."""

    def initial(rng):
        # Fisher-Yates from uniforms so the stream stays uniform-only
        a = list(range(n))
        for i in range(n - 1, 0, -1):
            j = uniform_index(rng.random(), i + 1)
            a[i], a[j] = a[j], a[i]
        return ArrayState(tuple(a))

    def fast(rng, max_steps):
        s = initial(rng)
        return inversion_sort_run(rng, np.array(s.entries, dtype=np.float64), s.inversions, max_steps)

    return Process(
        name="inversion_sort",
        initial=initial,
        step=step_inversion_sort,
        potential=lambda s: float(s.inversions),
        absorbed=lambda s: s.absorbed,
        fast_run=fast,
    )
