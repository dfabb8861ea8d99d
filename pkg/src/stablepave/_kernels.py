"""Hot numeric kernels, compiled with numba when available.

Every kernel has two interchangeable implementations: a numba ``@njit`` loop
and a vectorized pure-numpy fallback.  The active set is chosen once at
import time; set ``STABLEPAVE_NUMBA=0`` in the environment to force the
numpy path (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``, which times both).

Subset tables are flat float64 arrays of length ``2**n``; the coefficient of
``z^S`` sits at the index whose bit ``i`` is set iff ``i in S``.  Dense
multi-degree tables are flat mixed-radix arrays: variable ``i`` has cap
``caps[i]`` and stride ``prod(caps[j]+1 for j > i)``.
"""

from __future__ import annotations

import math
import os

import numpy as np

_env = os.environ.get("STABLEPAVE_NUMBA", "1").strip().lower()
_WANT_NUMBA = _env not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError("numba disabled via STABLEPAVE_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised via env flag
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def popcounts(n: int) -> np.ndarray:
    """Table of popcount(m) for m in [0, 2**n), cached per n."""
    tab = _POPCOUNT_CACHE.get(n)
    if tab is None:
        m = np.arange(1 << n, dtype=np.uint32)
        tab = np.zeros(1 << n, dtype=np.int64)
        while m.any():
            tab += (m & 1).astype(np.int64)
            m >>= 1
        _POPCOUNT_CACHE[n] = tab
    return tab


# --------------------------------------------------------------------------
# subset-lattice transforms (butterfly, O(n 2^n)); operate on the last axis
# --------------------------------------------------------------------------

def _np_superset_sum(table):
    out = np.array(table, dtype=np.float64, copy=True)
    size = out.shape[-1]
    bit = 1
    while bit < size:
        idx = (np.arange(size) & bit) == 0
        out[..., idx] += out[..., ~idx]
        bit <<= 1
    return out


def _np_superset_mobius(table):
    out = np.array(table, dtype=np.float64, copy=True)
    size = out.shape[-1]
    bit = 1
    while bit < size:
        idx = (np.arange(size) & bit) == 0
        out[..., idx] -= out[..., ~idx]
        bit <<= 1
    return out


def _np_subset_sum(table):
    out = np.array(table, dtype=np.float64, copy=True)
    size = out.shape[-1]
    bit = 1
    while bit < size:
        idx = (np.arange(size) & bit) == bit
        out[..., idx] += out[..., ~idx]
        bit <<= 1
    return out


@njit(cache=True)
def _nb_butterfly(flat, rows, size, sign, up):
    for r in range(rows):
        base = r * size
        bit = 1
        while bit < size:
            for m in range(size):
                if m & bit == 0:
                    if up:
                        flat[base + m] += sign * flat[base + (m | bit)]
                    else:
                        flat[base + (m | bit)] += sign * flat[base + m]
            bit <<= 1


def _nb_transform(table, sign, up):
    out = np.array(table, dtype=np.float64, copy=True)
    size = out.shape[-1]
    flat = out.reshape(-1)
    _nb_butterfly(flat, flat.size // size, size, sign, up)
    return out


def _numba_superset_sum(table):
    return _nb_transform(table, 1.0, True)


def _numba_superset_mobius(table):
    return _nb_transform(table, -1.0, True)


def _numba_subset_sum(table):
    return _nb_transform(table, 1.0, False)


# --------------------------------------------------------------------------
# multi-affine table kernels
# --------------------------------------------------------------------------

def _np_ma_diagonalize(table, n):
    return np.bincount(popcounts(n), weights=table, minlength=n + 1)


@njit(cache=True)
def _nb_ma_diagonalize(table, n):
    out = np.zeros(n + 1)
    for m in range(table.shape[0]):
        c = 0
        mm = m
        while mm:
            c += mm & 1
            mm >>= 1
        out[c] += table[m]
    return out


def _numba_ma_diagonalize(table, n):
    return _nb_ma_diagonalize(np.ascontiguousarray(table, dtype=np.float64), n)


def _np_ma_eval(table, point):
    cur = np.asarray(table, dtype=np.float64)
    for i in range(len(point)):
        half = cur.shape[0] // 2
        lo = cur.reshape(half, 2)
        # pairing (S, S|{i}) requires variable i to be the lowest live bit
        cur = lo[:, 0] + point[i] * lo[:, 1]
    return float(cur[0])


@njit(cache=True)
def _nb_ma_eval(table, point):
    cur = table.copy()
    size = cur.shape[0]
    for i in range(point.shape[0]):
        half = size // 2
        for m in range(half):
            cur[m] = cur[2 * m] + point[i] * cur[2 * m + 1]
        size = half
    return cur[0]


def _numba_ma_eval(table, point):
    return float(
        _nb_ma_eval(
            np.ascontiguousarray(table, dtype=np.float64),
            np.ascontiguousarray(point, dtype=np.float64),
        )
    )


def _np_ma_affine_sub(table, scale, shift):
    out = np.array(table, dtype=np.float64, copy=True)
    size = out.shape[0]
    masks = np.arange(size)
    for i in range(len(scale)):
        hi = (masks & (1 << i)) != 0
        with_i = out[hi]
        out[~hi] += shift[i] * with_i
        out[hi] = scale[i] * with_i
    return out


@njit(cache=True)
def _nb_ma_affine_sub(table, scale, shift):
    out = table.copy()
    size = out.shape[0]
    for i in range(scale.shape[0]):
        bit = 1 << i
        for m in range(size):
            if m & bit:
                out[m ^ bit] += shift[i] * out[m]
                out[m] = scale[i] * out[m]
    return out


def _numba_ma_affine_sub(table, scale, shift):
    return _nb_ma_affine_sub(
        np.ascontiguousarray(table, dtype=np.float64),
        np.ascontiguousarray(scale, dtype=np.float64),
        np.ascontiguousarray(shift, dtype=np.float64),
    )


# --------------------------------------------------------------------------
# dense mixed-radix product
# --------------------------------------------------------------------------

def _strides(caps):
    n = len(caps)
    strides = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * (caps[i + 1] + 1)
    return strides


def _np_dense_mul(a, caps_a, b, caps_b):
    caps_a = np.asarray(caps_a, dtype=np.int64)
    caps_b = np.asarray(caps_b, dtype=np.int64)
    caps_out = caps_a + caps_b
    st_a, st_b, st_o = _strides(caps_a), _strides(caps_b), _strides(caps_out)
    out = np.zeros(int(np.prod(caps_out + 1)), dtype=np.float64)

    idx_b = np.nonzero(b)[0]
    dig_b = (idx_b[:, None] // st_b[None, :]) % (caps_b + 1)[None, :]
    off_b = dig_b @ st_o
    vals_b = b[idx_b]
    for ia in np.nonzero(a)[0]:
        dig_a = (ia // st_a) % (caps_a + 1)
        base = int(dig_a @ st_o)
        out[base + off_b] += a[ia] * vals_b
    return out, caps_out


@njit(cache=True)
def _nb_dense_mul(a, caps_a, st_a, b, caps_b, st_b, st_o, out):
    n = caps_a.shape[0]
    for ia in range(a.shape[0]):
        va = a[ia]
        if va == 0.0:
            continue
        base = 0
        for k in range(n):
            base += ((ia // st_a[k]) % (caps_a[k] + 1)) * st_o[k]
        for ib in range(b.shape[0]):
            vb = b[ib]
            if vb == 0.0:
                continue
            off = base
            for k in range(n):
                off += ((ib // st_b[k]) % (caps_b[k] + 1)) * st_o[k]
            out[off] += va * vb


def _numba_dense_mul(a, caps_a, b, caps_b):
    caps_a = np.asarray(caps_a, dtype=np.int64)
    caps_b = np.asarray(caps_b, dtype=np.int64)
    caps_out = caps_a + caps_b
    st_a, st_b, st_o = _strides(caps_a), _strides(caps_b), _strides(caps_out)
    out = np.zeros(int(np.prod(caps_out + 1)), dtype=np.float64)
    _nb_dense_mul(
        np.ascontiguousarray(a, dtype=np.float64), caps_a, st_a,
        np.ascontiguousarray(b, dtype=np.float64), caps_b, st_b,
        st_o, out,
    )
    return out, caps_out


# --------------------------------------------------------------------------
# Sturm chain sign variations
# --------------------------------------------------------------------------

def _np_sign_variations(chain, degs, x, zero_tol):
    vals = np.zeros(len(degs))
    for r, d in enumerate(degs):
        acc = 0.0
        for k in range(d, -1, -1):
            acc = acc * x + chain[r, k]
        vals[r] = acc
    signs = [v for v in vals if abs(v) > zero_tol]
    count = 0
    for i in range(1, len(signs)):
        if (signs[i] > 0) != (signs[i - 1] > 0):
            count += 1
    return count


@njit(cache=True)
def _nb_sign_variations(chain, degs, x, zero_tol):
    count = 0
    prev = 0.0
    have_prev = False
    for r in range(degs.shape[0]):
        acc = 0.0
        for k in range(degs[r], -1, -1):
            acc = acc * x + chain[r, k]
        if abs(acc) > zero_tol:
            if have_prev and ((acc > 0.0) != (prev > 0.0)):
                count += 1
            prev = acc
            have_prev = True
    return count


def _numba_sign_variations(chain, degs, x, zero_tol):
    return int(
        _nb_sign_variations(
            np.ascontiguousarray(chain, dtype=np.float64),
            np.ascontiguousarray(degs, dtype=np.int64),
            float(x),
            float(zero_tol),
        )
    )


# --------------------------------------------------------------------------
# Sturm bisection: isolate all distinct roots of a packed chain
# --------------------------------------------------------------------------

def _np_isolate_chain(chain, degs, lo, hi, width):
    def var(x):
        return _np_sign_variations(chain, degs, x, 0.0)

    roots, counts = [], []
    stack = [(lo, hi, var(lo), var(hi))]
    while stack:
        a, b, va, vb = stack.pop()
        k = va - vb
        if k <= 0:
            continue
        if k == 1 or b - a <= width:
            while b - a > width:
                mid = 0.5 * (a + b)
                vm = var(mid)
                right = min(vm - vb, k)
                if right == k:
                    a, va = mid, vm
                elif right <= 0:
                    b, vb = mid, vm
                else:
                    stack.append((mid, b, vm, vb))
                    k -= right
                    b, vb = mid, vm
            if k > 0:
                roots.append(0.5 * (a + b))
                counts.append(k)
            continue
        mid = 0.5 * (a + b)
        vm = var(mid)
        stack.append((mid, b, vm, vb))
        stack.append((a, mid, va, vm))
    order = np.argsort(roots)
    return np.array(roots)[order], np.array(counts, dtype=np.int64)[order]


@njit(cache=True)
def _nb_isolate_chain(chain, degs, lo, hi, width):
    cap = degs[0] + 2
    out_x = np.empty(cap)
    out_k = np.empty(cap, np.int64)
    nout = 0
    st_a = np.empty(4 * cap + 8)
    st_b = np.empty(4 * cap + 8)
    st_va = np.empty(4 * cap + 8, np.int64)
    st_vb = np.empty(4 * cap + 8, np.int64)
    st_a[0] = lo
    st_b[0] = hi
    st_va[0] = _nb_sign_variations(chain, degs, lo, 0.0)
    st_vb[0] = _nb_sign_variations(chain, degs, hi, 0.0)
    sp = 1
    while sp > 0:
        sp -= 1
        a, b = st_a[sp], st_b[sp]
        va, vb = st_va[sp], st_vb[sp]
        k = va - vb
        if k <= 0:
            continue
        if k == 1 or b - a <= width:
            while b - a > width:
                mid = 0.5 * (a + b)
                vm = _nb_sign_variations(chain, degs, mid, 0.0)
                right = vm - vb
                if right > k:
                    right = k
                if right == k:
                    a, va = mid, vm
                elif right <= 0:
                    b, vb = mid, vm
                else:
                    st_a[sp] = mid
                    st_b[sp] = b
                    st_va[sp] = vm
                    st_vb[sp] = vb
                    sp += 1
                    k -= right
                    b, vb = mid, vm
            if k > 0:
                out_x[nout] = 0.5 * (a + b)
                out_k[nout] = k
                nout += 1
            continue
        mid = 0.5 * (a + b)
        vm = _nb_sign_variations(chain, degs, mid, 0.0)
        st_a[sp] = mid
        st_b[sp] = b
        st_va[sp] = vm
        st_vb[sp] = vb
        sp += 1
        st_a[sp] = a
        st_b[sp] = mid
        st_va[sp] = va
        st_vb[sp] = vm
        sp += 1
    return out_x[:nout], out_k[:nout]


def _numba_isolate_chain(chain, degs, lo, hi, width):
    xs, ks = _nb_isolate_chain(
        np.ascontiguousarray(chain, dtype=np.float64),
        np.ascontiguousarray(degs, dtype=np.int64),
        float(lo), float(hi), float(width),
    )
    order = np.argsort(xs)
    return xs[order], ks[order]


# --------------------------------------------------------------------------
# exhaustive partition scoring
# --------------------------------------------------------------------------

def _np_partition_best(maxroots, n, r):
    total = r ** n
    best_val = math.inf
    best_code = 0
    chunk = 1 << 16
    codes0 = np.arange(min(chunk, total), dtype=np.int64)
    for start in range(0, total, chunk):
        codes = codes0[: min(chunk, total - start)] + start
        masks = np.zeros((codes.shape[0], r), dtype=np.int64)
        c = codes.copy()
        for i in range(n):
            d = c % r
            masks[np.arange(codes.shape[0]), d] |= 1 << i
            c //= r
        scores = maxroots[masks].max(axis=1)
        k = int(np.argmin(scores))
        if scores[k] < best_val:
            best_val = float(scores[k])
            best_code = int(codes[k])
    return best_code, best_val


@njit(cache=True)
def _nb_partition_best(maxroots, n, r):
    total = 1
    for _ in range(n):
        total *= r
    best_val = np.inf
    best_code = 0
    masks = np.zeros(r, dtype=np.int64)
    for code in range(total):
        for j in range(r):
            masks[j] = 0
        c = code
        for i in range(n):
            masks[c % r] |= 1 << i
            c //= r
        score = -np.inf
        for j in range(r):
            v = maxroots[masks[j]]
            if v > score:
                score = v
        if score < best_val:
            best_val = score
            best_code = code
    return best_code, best_val


def _numba_partition_best(maxroots, n, r):
    code, val = _nb_partition_best(
        np.ascontiguousarray(maxroots, dtype=np.float64), n, r
    )
    return int(code), float(val)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

NUMPY_IMPL = {
    "superset_sum": _np_superset_sum,
    "superset_mobius": _np_superset_mobius,
    "subset_sum": _np_subset_sum,
    "ma_diagonalize": _np_ma_diagonalize,
    "ma_eval": _np_ma_eval,
    "ma_affine_sub": _np_ma_affine_sub,
    "dense_mul": _np_dense_mul,
    "sign_variations": _np_sign_variations,
    "isolate_chain": _np_isolate_chain,
    "partition_best": _np_partition_best,
}

NUMBA_IMPL = {
    "superset_sum": _numba_superset_sum,
    "superset_mobius": _numba_superset_mobius,
    "subset_sum": _numba_subset_sum,
    "ma_diagonalize": _numba_ma_diagonalize,
    "ma_eval": _numba_ma_eval,
    "ma_affine_sub": _numba_ma_affine_sub,
    "dense_mul": _numba_dense_mul,
    "sign_variations": _numba_sign_variations,
    "isolate_chain": _numba_isolate_chain,
    "partition_best": _numba_partition_best,
}

ACTIVE = NUMBA_IMPL if NUMBA_ENABLED else NUMPY_IMPL

superset_sum = ACTIVE["superset_sum"]
superset_mobius = ACTIVE["superset_mobius"]
subset_sum = ACTIVE["subset_sum"]
ma_diagonalize = ACTIVE["ma_diagonalize"]
ma_eval = ACTIVE["ma_eval"]
ma_affine_sub = ACTIVE["ma_affine_sub"]
dense_mul = ACTIVE["dense_mul"]
sign_variations = ACTIVE["sign_variations"]
isolate_chain = ACTIVE["isolate_chain"]
partition_best = ACTIVE["partition_best"]
