"""Hot numeric kernels.

Every kernel exists twice: a loop body compiled with numba and a vectorized
numpy twin. The public names at the bottom of the module pick one according to
:mod:`freqmap._accel`. Both variants perform the same floating point operations
in the same order, so results agree bit for bit; the tests hold them to that.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# EMD cost matrix between the columns of two frequency matrices.
# Inputs are column-wise cumulative sums (rows = positions).


def _emd_cost_loop(cum_a, cum_b):
    m = cum_a.shape[0]
    out = np.empty((m, m))
    for a in range(m):
        for b in range(m):
            acc = 0.0
            for i in range(m - 1):
                acc += abs(cum_a[i, a] - cum_b[i, b])
            out[a, b] = acc
    return out


def _emd_cost_numpy(cum_a, cum_b):
    m = cum_a.shape[0]
    acc = np.zeros((m, m))
    for i in range(m - 1):
        acc += np.abs(cum_a[i][:, None] - cum_b[i][None, :])
    return acc


# ---------------------------------------------------------------------------
# Hungarian method (shortest augmenting path with potentials), square costs.
# Returns assign[row] = column.


def _lap_loop(cost):
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, np.int64)
    way = np.zeros(n + 1, np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, np.bool_)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assign = np.empty(n, np.int64)
    for j in range(1, n + 1):
        assign[p[j] - 1] = j - 1
    return assign


def _lap_numpy(cost):
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, np.int64)
    way = np.zeros(n + 1, np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assign = np.empty(n, np.int64)
    assign[p[1:] - 1] = np.arange(n)
    return assign


def _assigned_sum(cost, assign):
    total = 0.0
    for i in range(cost.shape[0]):
        total += cost[i, assign[i]]
    return total


# ---------------------------------------------------------------------------
# Batched positionwise distances: many (cum_a, cum_b) pairs at once.


def _pairs_raw_loop(cums, left, right):
    out = np.empty(left.shape[0])
    for t in range(left.shape[0]):
        cost = _emd_cost_nb(cums[left[t]], cums[right[t]])
        assign = _lap_nb(cost)
        out[t] = _assigned_sum_nb(cost, assign)
    return out


def _pairs_raw_numpy(cums, left, right):
    out = np.empty(left.shape[0])
    for t in range(left.shape[0]):
        cost = _emd_cost_numpy(cums[left[t]], cums[right[t]])
        assign = _lap_numpy(cost)
        out[t] = _assigned_sum(cost, assign)
    return out


# ---------------------------------------------------------------------------
# Repeated insertion decoding. ins[r, t] in [0, t] is the slot (number of
# earlier items ranked above) where item t is inserted. Returns orders[r, pos].


def _decode_insertions_loop(ins):
    n, m = ins.shape
    orders = np.empty((n, m), np.int64)
    for r in range(n):
        for t in range(m):
            q = ins[r, t]
            for s in range(t, q, -1):
                orders[r, s] = orders[r, s - 1]
            orders[r, q] = t
    return orders


def _decode_insertions_numpy(ins):
    n, m = ins.shape
    pos = np.zeros((n, m), np.int64)
    for t in range(m):
        q = ins[:, t][:, None]
        pos[:, :t] += pos[:, :t] >= q
        pos[:, t] = ins[:, t]
    return np.argsort(pos, axis=1, kind="stable")


# ---------------------------------------------------------------------------
# Mallows position distribution via the insertion chain (float path).
# out[i, j] = P(item ranked j-th centrally lands in position i).


def _mallows_chain_loop(m, phi):
    pw = np.empty(m + 1)
    pw[0] = 1.0
    for d in range(1, m + 1):
        pw[d] = pw[d - 1] * phi
    cum = np.empty(m + 1)
    cum[0] = pw[0]
    for d in range(1, m + 1):
        cum[d] = cum[d - 1] + pw[d]
    out = np.zeros((m, m))
    dist = np.empty(m)
    new = np.empty(m)
    for j in range(m):
        size = j + 1
        z = cum[size - 1]
        for q in range(size):
            dist[q] = pw[size - 1 - q] / z
        for size in range(j + 2, m + 1):
            z = cum[size - 1]
            for x in range(size):
                new[x] = 0.0
            for x in range(size - 1):
                stay = cum[size - 2 - x] / z
                move = (z - cum[size - 2 - x]) / z
                new[x] += dist[x] * stay
                new[x + 1] += dist[x] * move
            for x in range(size):
                dist[x] = new[x]
        for x in range(m):
            out[x, j] = dist[x]
    return out


def _mallows_chain_numpy(m, phi):
    pw = np.ones(m + 1)
    pw[1:] = np.cumprod(np.full(m, phi))  # repeated products, as in the loop
    cum = np.empty(m + 1)
    cum[0] = pw[0]
    for d in range(1, m + 1):
        cum[d] = cum[d - 1] + pw[d]
    out = np.zeros((m, m))
    for j in range(m):
        size = j + 1
        z = cum[size - 1]
        dist = np.zeros(m)
        dist[:size] = pw[size - 1 - np.arange(size)] / z
        for size in range(j + 2, m + 1):
            z = cum[size - 1]
            tail = cum[size - 2 - np.arange(size - 1)]
            stay = tail / z
            move = (z - tail) / z
            new = np.zeros(m)
            new[: size - 1] += dist[: size - 1] * stay
            new[1:size] += dist[: size - 1] * move
            dist = new
        out[:, j] = dist
    return out


# ---------------------------------------------------------------------------
# Kemeny subset DP. w[a, b] = weighted number of voters ranking a above b.
# top[c, S] = sum_{b in S} w[b, c] (cost of putting c above the rest of S);
# best[S] = minimal disagreement for ordering the candidate set S.


def _kemeny_loop(w):
    m = w.shape[0]
    full = 1 << m
    top = np.zeros((m, full), np.int64)
    for c in range(m):
        for b in range(m):
            lo = 1 << b
            for s in range(lo, lo << 1):
                top[c, s] = top[c, s - lo] + w[b, c]
    best = np.zeros(full, np.int64)
    for s in range(1, full):
        val = np.iinfo(np.int64).max
        for c in range(m):
            if (s >> c) & 1:
                cand = top[c, s] + best[s ^ (1 << c)]
                if cand < val:
                    val = cand
        best[s] = val
    return top, best


def _kemeny_numpy(w):
    m = w.shape[0]
    full = 1 << m
    top = np.zeros((m, full), np.int64)
    for b in range(m):
        lo = 1 << b
        top[:, lo : lo << 1] = top[:, :lo] + w[b, :, None]
    subsets = np.arange(full, dtype=np.int64)
    popcount = np.zeros(full, np.int64)
    for b in range(m):
        popcount += (subsets >> b) & 1
    best = np.zeros(full, np.int64)
    big = np.iinfo(np.int64).max
    for k in range(1, m + 1):
        layer = subsets[popcount == k]
        val = np.full(layer.shape[0], big, np.int64)
        for c in range(m):
            has = ((layer >> c) & 1).astype(bool)
            cand = top[c, layer] + best[layer ^ (1 << c)]
            val = np.where(has & (cand < val), cand, val)
        best[layer] = val
    return top, best


# ---------------------------------------------------------------------------

_emd_cost_nb = njit(_emd_cost_loop)
_lap_nb = njit(_lap_loop)
_assigned_sum_nb = njit(_assigned_sum)
_pairs_raw_nb = njit(_pairs_raw_loop)
_decode_insertions_nb = njit(_decode_insertions_loop)
_mallows_chain_nb = njit(_mallows_chain_loop)
_kemeny_nb = njit(_kemeny_loop)

NUMBA = {
    "emd_cost": _emd_cost_nb,
    "lap": _lap_nb,
    "pairs_raw": _pairs_raw_nb,
    "decode_insertions": _decode_insertions_nb,
    "mallows_chain": _mallows_chain_nb,
    "kemeny": _kemeny_nb,
}
NUMPY = {
    "emd_cost": _emd_cost_numpy,
    "lap": _lap_numpy,
    "pairs_raw": _pairs_raw_numpy,
    "decode_insertions": _decode_insertions_numpy,
    "mallows_chain": _mallows_chain_numpy,
    "kemeny": _kemeny_numpy,
}
_ACTIVE = NUMBA if USE_NUMBA else NUMPY


def emd_cost_matrix(cum_a: np.ndarray, cum_b: np.ndarray) -> np.ndarray:
    return _ACTIVE["emd_cost"](np.ascontiguousarray(cum_a), np.ascontiguousarray(cum_b))


def linear_assignment(cost: np.ndarray) -> np.ndarray:
    return _ACTIVE["lap"](np.ascontiguousarray(cost, dtype=float))


def assigned_sum(cost: np.ndarray, assign: np.ndarray) -> float:
    return float(_assigned_sum(cost, assign))


def pairs_raw(cums: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return _ACTIVE["pairs_raw"](
        np.ascontiguousarray(cums, dtype=float),
        np.ascontiguousarray(left, dtype=np.int64),
        np.ascontiguousarray(right, dtype=np.int64),
    )


def decode_insertions(ins: np.ndarray) -> np.ndarray:
    return _ACTIVE["decode_insertions"](np.ascontiguousarray(ins, dtype=np.int64))


def mallows_chain(m: int, phi: float) -> np.ndarray:
    return _ACTIVE["mallows_chain"](int(m), float(phi))


def kemeny_tables(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return _ACTIVE["kemeny"](np.ascontiguousarray(w, dtype=np.int64))
