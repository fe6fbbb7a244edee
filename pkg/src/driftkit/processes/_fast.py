"""Compiled run loops.  Each mirrors a Python step kernel draw for draw."""
import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def birth_death_run(rng, start, up, down, absorbing, max_steps):
    k = start
    t = 0
    while not absorbing[k]:
        if t >= max_steps:
            return t, True
        u = rng.random()
        if u < up[k]:
            k += 1
        elif u < up[k] + down[k]:
            k -= 1
        t += 1
    return t, False


@numba.njit(cache=True, nogil=True)
def coupon_uniform_run(rng, missing, max_steps):
    missing = missing.copy()
    n = missing.shape[0]
    left = 0
    for i in range(n):
        if missing[i]:
            left += 1
    t = 0
    while left > 0:
        if t >= max_steps:
            return t, True
        i = int(rng.random() * n)
        if i >= n:
            i = n - 1
        if missing[i]:
            missing[i] = False
            left -= 1
        t += 1
    return t, False


@numba.njit(cache=True, nogil=True)
def coupon_per_kind_run(rng, missing, p, max_steps):
    missing = missing.copy()
    n = missing.shape[0]
    left = 0
    for i in range(n):
        if missing[i]:
            left += 1
    t = 0
    while left > 0:
        if t >= max_steps:
            return t, True
        got = 0
        for i in range(n):
            if missing[i] and rng.random() < p:
                missing[i] = False
                got += 1
        left -= got
        t += 1
    return t, False


@numba.njit(cache=True, nogil=True)
def inversion_sort_run(rng, entries, inversions, max_steps):
    a = entries.copy()
    n = a.shape[0]
    pairs = n * (n - 1) // 2
    t = 0
    while inversions > 0:
        if t >= max_steps:
            return t, True
        m = int(rng.random() * pairs)
        if m >= pairs:
            m = pairs - 1
        i = 0
        while m >= n - 1 - i:
            m -= n - 1 - i
            i += 1
        j = i + 1 + m
        hi = a[i]
        lo = a[j]
        if hi > lo:
            d = 1
            for k in range(i + 1, j):
                x = a[k]
                if lo < x < hi:
                    d += 2
                elif x == lo or x == hi:
                    d += 1
            a[i] = lo
            a[j] = hi
            inversions -= d
        t += 1
    return t, False


def as_bool_array(n, members):
    out = np.zeros(n, dtype=np.bool_)
    for i in members:
        out[i] = True
    return out
