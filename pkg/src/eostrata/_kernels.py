"""
Compiled inner loops for the closure-order search.

Permutations are 0-indexed int64 arrays here.  A Bruhat "rank table" for a
permutation ``y`` of degree ``n`` is the ``(n+1, n)`` array
``R[k, v] = #{j < k : y[j] >= v}``; then ``x <= y`` iff the same counts for
``x`` never exceed ``R``.
"""

import warnings

import numpy as np
from numba import njit, prange

# an outdated system TBB only disables that backend; numba falls back on its own
warnings.filterwarnings("ignore", message="The TBB threading layer")


@njit(cache=True)
def rank_table(y):
    n = y.shape[0]
    R = np.zeros((n + 1, n), dtype=np.int64)
    for k in range(n):
        for v in range(n):
            R[k + 1, v] = R[k, v] + (1 if y[k] >= v else 0)
    return R


@njit(cache=True)
def bruhat_leq_table(x, R, cnt):
    """``x <= y`` given the rank table of ``y``; ``cnt`` is scratch of length n."""
    n = x.shape[0]
    for v in range(n):
        cnt[v] = 0
    for k in range(n):
        xk = x[k]
        # only counts with threshold <= x[k] change at this prefix
        for v in range(xk + 1):
            cnt[v] += 1
            if cnt[v] > R[k + 1, v]:
                return False
    return True


@njit(cache=True)
def perm_length(x):
    n = x.shape[0]
    total = 0
    for i in range(n):
        xi = x[i]
        for j in range(i + 1, n):
            if xi > x[j]:
                total += 1
    return total


@njit(cache=True)
def _swap_positions(x, xinv, a, b):
    """Swap entries at positions a, b; return the change in length."""
    if a == b:
        return 0
    if a > b:
        a, b = b, a
    lo = x[a]
    hi = x[b]
    up = lo < hi
    if not up:
        lo, hi = hi, lo
    m = 0
    for k in range(a + 1, b):
        if lo < x[k] < hi:
            m += 1
    va = x[a]
    vb = x[b]
    x[a] = vb
    x[b] = va
    xinv[vb] = a
    xinv[va] = b
    if up:
        return 2 * m + 1
    return -(2 * m + 1)


@njit(cache=True)
def dot_action_arr(h, w, c):
    """``h w c h^{-1} c`` for 0-indexed arrays."""
    n = h.shape[0]
    hinv = np.empty(n, dtype=np.int64)
    for i in range(n):
        hinv[h[i]] = i
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = h[w[c[hinv[c[i]]]]]
    return out


@njit(cache=True)
def _search_chunk(w, c, a_flag, coset, R, tlen, open_, exhaustive, found, witness):
    """
    Enumerate one coset ``{sigma * g : sigma fixes value n-1}`` of the parabolic
    subgroup ``S_{0,1} x S_{2..n-1}`` (times ``s_1`` if ``a_flag``), where
    ``g`` swaps the values ``2 + coset`` and ``n - 1``.  Successive elements
    differ by left multiplication with a transposition (Heap's order), so
    ``x = h . w`` is updated in place by one position swap and one value swap.
    """
    n = w.shape[0]
    T = R.shape[0]
    h = np.arange(n)
    if a_flag:
        h[0] = 1
        h[1] = 0
    last = n - 1
    if n >= 3:
        p0 = 2 + coset
        if p0 != last:
            h[p0] = last
            h[last] = p0
    hinv = np.empty(n, dtype=np.int64)
    for i in range(n):
        hinv[h[i]] = i
    x = dot_action_arr(h, w, c)
    xinv = np.empty(n, dtype=np.int64)
    for i in range(n):
        xinv[x[i]] = i
    ell = perm_length(x)
    cnt = np.zeros(n, dtype=np.int64)

    remaining = 0
    maxlen = -1
    for t in range(T):
        if open_[t]:
            remaining += 1
            if tlen[t] > maxlen:
                maxlen = tlen[t]
    if remaining == 0:
        return

    m = n - 3 if n >= 3 else 0  # Heap's algorithm runs over values 2..n-2
    state = np.zeros(max(m, 1), dtype=np.int64)
    i = 1
    first = True
    while True:
        if first:
            first = False
        else:
            # advance Heap's algorithm by one transposition
            while i < m and state[i] >= i:
                state[i] = 0
                i += 1
            if i >= m:
                break
            if i % 2 == 0:
                j0 = 0
            else:
                j0 = state[i]
            p = 2 + j0
            r = 2 + i
            state[i] += 1
            i = 1
            # h <- t h
            hp = hinv[p]
            hr = hinv[r]
            h[hp] = r
            h[hr] = p
            hinv[p] = hr
            hinv[r] = hp
            # x <- t x t'   with t' = c t c
            ell += _swap_positions(x, xinv, c[p], c[r])
            ell += _swap_positions(x, xinv, xinv[p], xinv[r])

        if exhaustive:
            for t in range(T):
                if open_[t] and bruhat_leq_table(x, R[t], cnt):
                    if not found[t]:
                        found[t] = True
                        for k in range(n):
                            witness[t, k] = h[k]
        elif ell <= maxlen:
            newmax = -1
            for t in range(T):
                if open_[t] and not found[t]:
                    if tlen[t] >= ell and bruhat_leq_table(x, R[t], cnt):
                        found[t] = True
                        remaining -= 1
                        for k in range(n):
                            witness[t, k] = h[k]
                    elif tlen[t] > newmax:
                        newmax = tlen[t]
            maxlen = newmax
            if remaining == 0:
                return
        if m <= 1:
            break


@njit(cache=True, parallel=True)
def search_chunks(w, c, chunk_a, chunk_c, R, tlen, open_, exhaustive):
    """Run independent cosets in parallel; results are per chunk, merged by the caller."""
    B = chunk_a.shape[0]
    T = R.shape[0]
    n = w.shape[0]
    found = np.zeros((B, T), dtype=np.bool_)
    witness = np.full((B, T, n), -1, dtype=np.int64)
    for b in prange(B):
        _search_chunk(w, c, chunk_a[b], chunk_c[b], R, tlen, open_, exhaustive,
                      found[b], witness[b])
    return found, witness


@njit(cache=True)
def scan_reflections(w, c, reflections, R, tlen, open_):
    """For each simple reflection ``s`` (0-indexed position k swaps k, k+1), test
    ``s . w <= y`` against every open target.  Returns a (K, T) boolean array."""
    n = w.shape[0]
    K = reflections.shape[0]
    T = R.shape[0]
    out = np.zeros((K, T), dtype=np.bool_)
    cnt = np.zeros(n, dtype=np.int64)
    h = np.empty(n, dtype=np.int64)
    for r in range(K):
        for i in range(n):
            h[i] = i
        k = reflections[r]
        h[k] = k + 1
        h[k + 1] = k
        x = dot_action_arr(h, w, c)
        ell = perm_length(x)
        for t in range(T):
            if open_[t] and tlen[t] >= ell and bruhat_leq_table(x, R[t], cnt):
                out[r, t] = True
    return out
