"""Bit-packed GF(2) kernels.

Every kernel exists twice: a numba version (``_nb_*``) and a vectorised
numpy version (``_np_*``). The public names dispatch on
:data:`sdbb._accel.USE_NUMBA`. Both versions must return identical
results for identical inputs; ``tests/test_kernels.py`` checks this.

Packed layout: a binary row of length ``n`` occupies ``ceil(n / 64)``
little-endian ``uint64`` words, column ``j`` at bit ``j % 64`` of word
``j // 64``. Several kernels take *augmented* rows whose trailing word
carries a logical syndrome that is XOR-ed along with the row but ignored
by weights and pivoting.
"""

from __future__ import annotations

import numpy as np

from sdbb._accel import USE_NUMBA, njit

U64 = np.uint64
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_rows(dense: np.ndarray, extra_words: int = 0) -> np.ndarray:
    """Pack a 0/1 matrix into rows of uint64 words (plus zeroed extra words)."""
    dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8) & 1)
    rows, n = dense.shape
    w = n_words(n)
    padded = np.zeros((rows, w * 64), dtype=np.uint8)
    padded[:, :n] = dense
    packed = np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(U64)
    if extra_words:
        packed = np.hstack([packed, np.zeros((rows, extra_words), dtype=U64)])
    return np.ascontiguousarray(packed)


def unpack_rows(packed: np.ndarray, n: int) -> np.ndarray:
    packed = np.ascontiguousarray(np.atleast_2d(packed), dtype="<u8")
    bits = np.unpackbits(packed.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :n].astype(np.uint8)


def pack_int_rows(dense: np.ndarray) -> np.ndarray:
    """Pack each row of a (rows x k<=64) 0/1 matrix into one uint64."""
    dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8) & 1)
    if dense.shape[1] > 64:
        raise ValueError("at most 64 logical qubits are supported by the packed kernels")
    weights = (np.uint64(1) << np.arange(dense.shape[1], dtype=U64)).astype(U64)
    return (dense.astype(U64) * weights).sum(axis=1, dtype=U64) if dense.shape[1] else np.zeros(
        dense.shape[0], dtype=U64
    )


# ----------------------------------------------------------------------------
# numba kernels


@njit
def _popcount64(x):
    x = x - ((x >> U64(1)) & _M1)
    x = (x & _M2) + ((x >> U64(2)) & _M2)
    x = (x + (x >> U64(4))) & _M4
    return np.int64((x * _H01) >> U64(56))


@njit
def _nb_row_weight(row, w):
    s = 0
    for i in range(w):
        s += _popcount64(row[i])
    return s


@njit
def _nb_rref(a, order):
    """In-place reduced row echelon form, pivoting along ``order``.

    Returns the pivot column of each of the first ``rank`` rows (-1 after).
    """
    rows, words = a.shape
    pivots = np.full(rows, -1, dtype=np.int64)
    r = 0
    for col in order:
        if r == rows:
            break
        wi = col >> 6
        bit = U64(1) << U64(col & 63)
        piv = -1
        for i in range(r, rows):
            if a[i, wi] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(words):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        for i in range(rows):
            if i != r and (a[i, wi] & bit):
                for j in range(words):
                    a[i, j] ^= a[r, j]
        pivots[r] = col
        r += 1
    return pivots


@njit(nogil=True)
def _nb_best_combination(g, w, t, bound, stop_at, base):
    """Lightest nontrivial ``base ^ (XOR of exactly t rows of g)``.

    ``g`` is augmented: ``g[:, :w]`` holds codewords and ``g[:, w]`` their
    logical syndromes; a combination counts only when its syndrome is
    nonzero. Only weights strictly below ``bound`` are reported, and the
    search returns as soon as a weight ``<= stop_at`` is found.
    Returns ``(best_weight, indices, leaves)``; ``best_weight == bound``
    with indices ``-1`` means nothing lighter exists.
    """
    k = g.shape[0]
    words = g.shape[1]
    best = bound
    best_idx = np.full(max(t, 1), -1, dtype=np.int64)
    leaves = 0
    if t < 1 or t > k:
        return best, best_idx, leaves
    idx = np.empty(t, dtype=np.int64)
    acc = np.zeros((t, words), dtype=np.uint64)
    for j in range(words):
        acc[0, j] = base[j]
    for i in range(t):
        idx[i] = i
    # acc[l] = base ^ rows idx[0..l-1]; the last index is looped explicitly
    for lvl in range(1, t):
        for j in range(words):
            acc[lvl, j] = acc[lvl - 1, j] ^ g[idx[lvl - 1], j]
    while True:
        start = idx[t - 2] + 1 if t >= 2 else 0
        top = acc[t - 1]
        for last in range(start, k):
            leaves += 1
            if (top[w] ^ g[last, w]) == 0:
                continue
            s = 0
            for j in range(w):
                s += _popcount64(top[j] ^ g[last, j])
                if s >= best:
                    break
            if s < best:
                best = s
                for j in range(t - 1):
                    best_idx[j] = idx[j]
                best_idx[t - 1] = last
                if best <= stop_at:
                    return best, best_idx, leaves
        if t == 1:
            break
        # advance the (t-1)-prefix
        i = t - 2
        while i >= 0 and idx[i] == k - t + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, t - 1):
            idx[j] = idx[j - 1] + 1
        for lvl in range(i + 1, t):
            for j in range(words):
                acc[lvl, j] = acc[lvl - 1, j] ^ g[idx[lvl - 1], j]
    return best, best_idx, leaves


@njit
def _nb_first_logical_support(cols, m_words, weight):
    """First support of exactly ``weight`` columns whose syndrome vanishes.

    ``cols[j, :m_words]`` is the check syndrome of a single error on
    qubit ``j``; ``cols[j, m_words]`` is its logical syndrome. Returns the
    lexicographically first support with zero check syndrome and nonzero
    logical syndrome, or an array of ``-1`` if none exists.
    """
    n = cols.shape[0]
    words = cols.shape[1]
    out = np.full(weight, -1, dtype=np.int64)
    if weight < 1 or weight > n:
        return out
    idx = np.empty(weight, dtype=np.int64)
    acc = np.zeros((weight + 1, words), dtype=np.uint64)
    for i in range(weight):
        idx[i] = i
    for lvl in range(weight):
        for j in range(words):
            acc[lvl + 1, j] = acc[lvl, j] ^ cols[idx[lvl], j]
    while True:
        ok = acc[weight, m_words] != 0
        if ok:
            for j in range(m_words):
                if acc[weight, j] != 0:
                    ok = False
                    break
        if ok:
            for j in range(weight):
                out[j] = idx[j]
            return out
        i = weight - 1
        while i >= 0 and idx[i] == n - weight + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, weight):
            idx[j] = idx[j - 1] + 1
        for lvl in range(i, weight):
            for j in range(words):
                acc[lvl + 1, j] = acc[lvl, j] ^ cols[idx[lvl], j]
    return out


@njit(nogil=True)
def _nb_isd_trial(g, w, order, bound):
    """One Lee-Brickell round: eliminate along ``order``, then try p <= 2.

    ``g`` is an augmented generator (copied, not modified). Returns
    ``(best_weight, codeword_words)`` with ``best_weight == bound`` when no
    lighter nontrivial codeword was seen.
    """
    a = g.copy()
    pivots = _nb_rref(a, order)
    rank = 0
    while rank < pivots.shape[0] and pivots[rank] >= 0:
        rank += 1
    words = a.shape[1]
    best = bound
    best_word = np.zeros(words, dtype=np.uint64)
    for i in range(rank):
        if a[i, w] != 0:
            s = _nb_row_weight(a[i], w)
            if s < best:
                best = s
                best_word[:] = a[i]
    for i in range(rank):
        for j in range(i + 1, rank):
            if (a[i, w] ^ a[j, w]) == 0:
                continue
            s = 0
            for q in range(w):
                s += _popcount64(a[i, q] ^ a[j, q])
                if s >= best:
                    break
            if s < best:
                best = s
                for q in range(words):
                    best_word[q] = a[i, q] ^ a[j, q]
    return best, best_word


# ----------------------------------------------------------------------------
# numpy kernels


def _np_weights(block: np.ndarray) -> np.ndarray:
    return np.bitwise_count(block).sum(axis=-1, dtype=np.int64)


def _np_rref(a: np.ndarray, order: np.ndarray) -> np.ndarray:
    rows = a.shape[0]
    pivots = np.full(rows, -1, dtype=np.int64)
    r = 0
    for col in order:
        if r == rows:
            break
        wi = int(col) >> 6
        bit = U64(1) << U64(int(col) & 63)
        hits = np.flatnonzero(a[r:, wi] & bit)
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        mask = (a[:, wi] & bit) != 0
        mask[r] = False
        a[mask] ^= a[r]
        pivots[r] = int(col)
        r += 1
    return pivots


def _np_best_combination(g, w, t, bound, stop_at, base):
    from itertools import combinations

    k = g.shape[0]
    best = int(bound)
    best_idx = np.full(max(t, 1), -1, dtype=np.int64)
    leaves = 0
    if t < 1 or t > k:
        return best, best_idx, leaves
    for prefix in combinations(range(k - 1), t - 1):
        start = prefix[-1] + 1 if prefix else 0
        top = base ^ np.bitwise_xor.reduce(g[list(prefix)], axis=0) if prefix else base
        block = g[start:] ^ top
        leaves += block.shape[0]
        live = block[:, w] != 0
        if not live.any():
            continue
        wts = _np_weights(block[:, :w])
        wts[~live] = np.iinfo(np.int64).max
        j = int(np.argmin(wts))
        if wts[j] < best:
            hits = np.flatnonzero(wts <= min(stop_at, best - 1))
            if hits.size and wts[j] <= stop_at:
                # mirror the scalar loop: it stops at the first qualifying leaf
                j = int(hits[0])
                leaves -= block.shape[0] - j - 1
            best = int(wts[j])
            best_idx[: t - 1] = prefix
            best_idx[t - 1] = start + j
            if best <= stop_at:
                return best, best_idx, leaves
    return best, best_idx, leaves


def _np_first_logical_support(cols, m_words, weight):
    from itertools import combinations

    n = cols.shape[0]
    out = np.full(weight, -1, dtype=np.int64)
    if weight < 1 or weight > n:
        return out
    for prefix in combinations(range(n), weight - 1):
        start = prefix[-1] + 1 if prefix else 0
        if start >= n:
            continue
        base = np.bitwise_xor.reduce(cols[list(prefix)], axis=0) if prefix else np.zeros(
            cols.shape[1], dtype=U64
        )
        block = cols[start:] ^ base
        ok = (block[:, m_words] != 0) & ~(block[:, :m_words] != 0).any(axis=1)
        hits = np.flatnonzero(ok)
        if hits.size:
            out[: weight - 1] = prefix
            out[weight - 1] = start + int(hits[0])
            return out
    return out


def _np_isd_trial(g, w, order, bound):
    a = g.copy()
    pivots = _np_rref(a, order)
    rank = int((pivots >= 0).sum())
    a = a[:rank]
    best = int(bound)
    best_word = np.zeros(g.shape[1], dtype=U64)
    if rank == 0:
        return best, best_word
    wts = _np_weights(a[:, :w])
    live = a[:, w] != 0
    for i in np.flatnonzero(live):
        if wts[i] < best:
            best = int(wts[i])
            best_word = a[i].copy()
    for i in range(rank - 1):
        block = a[i + 1 :] ^ a[i]
        live = block[:, w] != 0
        if not live.any():
            continue
        bw = _np_weights(block[:, :w])
        bw[~live] = np.iinfo(np.int64).max
        j = int(np.argmin(bw))
        if bw[j] < best:
            best = int(bw[j])
            best_word = block[j].copy()
    return best, best_word


# ----------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    rref_packed = _nb_rref
    best_combination = _nb_best_combination
    first_logical_support = _nb_first_logical_support
    isd_trial = _nb_isd_trial
else:
    rref_packed = _np_rref
    best_combination = _np_best_combination
    first_logical_support = _np_first_logical_support
    isd_trial = _np_isd_trial

NUMBA_KERNELS = {
    "rref": _nb_rref,
    "best_combination": _nb_best_combination,
    "first_logical_support": _nb_first_logical_support,
    "isd_trial": _nb_isd_trial,
}
NUMPY_KERNELS = {
    "rref": _np_rref,
    "best_combination": _np_best_combination,
    "first_logical_support": _np_first_logical_support,
    "isd_trial": _np_isd_trial,
}
