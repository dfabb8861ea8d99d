"""Dense multivariate polynomials with per-variable degree caps.

Coefficients live in a flat mixed-radix table: variable i has cap caps[i]
and C-order stride prod(caps[j]+1 for j > i).  The table budget (default
2**20 entries) guards the dense blowup of powers and products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, DimensionMismatch, ZeroScale
from .multiaffine import MultiAffinePoly
from .univariate import RealRootedPoly

TABLE_BUDGET = 1 << 20

_EXPSUM_CACHE: dict[tuple[int, ...], np.ndarray] = {}
_BITREV_CACHE: dict[int, np.ndarray] = {}


def _table_size(caps) -> int:
    size = 1
    for c in caps:
        size *= c + 1
    return size


def _strides(caps) -> np.ndarray:
    n = len(caps)
    st = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        st[i] = st[i + 1] * (caps[i + 1] + 1)
    return st


def exponent_sums(caps) -> np.ndarray:
    """Total degree of each flat index, cached per caps tuple."""
    key = tuple(caps)
    out = _EXPSUM_CACHE.get(key)
    if out is None:
        st = _strides(caps)
        idx = np.arange(_table_size(caps), dtype=np.int64)
        out = np.zeros_like(idx)
        for i, c in enumerate(caps):
            out += (idx // st[i]) % (c + 1)
        _EXPSUM_CACHE[key] = out
    return out


@dataclass(frozen=True)
class MultiDegreePoly:
    caps: tuple[int, ...]
    coeffs: np.ndarray

    def __post_init__(self):
        caps = tuple(int(c) for c in self.caps)
        size = _table_size(caps)
        if size > TABLE_BUDGET:
            raise BudgetExceeded(f"dense table of {size} entries exceeds budget")
        c = np.asarray(self.coeffs, dtype=np.float64).ravel().copy()
        if c.size != size:
            raise DimensionMismatch(f"table has {c.size} entries, expected {size}")
        c.flags.writeable = False
        object.__setattr__(self, "caps", caps)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.caps)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.caps)

    def as_array(self) -> np.ndarray:
        return self.coeffs.reshape(self.shape).copy()

    def __call__(self, point):
        return evaluate(self, point)


def _bit_reversal(n: int) -> np.ndarray:
    perm = _BITREV_CACHE.get(n)
    if perm is None:
        idx = np.arange(1 << n, dtype=np.int64)
        perm = np.zeros_like(idx)
        for i in range(n):
            perm |= ((idx >> i) & 1) << (n - 1 - i)
        _BITREV_CACHE[n] = perm
    return perm


def from_multiaffine(p: MultiAffinePoly) -> MultiDegreePoly:
    if p.n == 0:
        return MultiDegreePoly((), p.coeffs)
    out = np.zeros(1 << p.n)
    out[_bit_reversal(p.n)] = p.coeffs
    return MultiDegreePoly((1,) * p.n, out)


def to_multiaffine(p: MultiDegreePoly) -> MultiAffinePoly:
    if any(c > 1 for c in p.caps):
        raise DimensionMismatch("degree caps exceed 1")
    target = np.zeros((2,) * p.n)
    target[tuple(slice(0, s) for s in p.shape)] = p.coeffs.reshape(p.shape)
    # bit reversal (an involution) maps dense C-order indices to bitmask order
    return MultiAffinePoly(p.n, target.ravel()[_bit_reversal(p.n)])


def evaluate(p: MultiDegreePoly, point) -> float:
    pt = np.asarray(point, dtype=np.float64).ravel()
    if pt.size != p.n:
        raise DimensionMismatch(f"point has {pt.size} entries, expected {p.n}")
    arr = p.coeffs.reshape(p.shape)
    for i in range(p.n - 1, -1, -1):
        powers = pt[i] ** np.arange(p.caps[i] + 1)
        arr = np.tensordot(arr, powers, axes=([i], [0]))
    return float(arr)


def multiply(a: MultiDegreePoly, b: MultiDegreePoly) -> MultiDegreePoly:
    if a.n != b.n:
        raise DimensionMismatch("variable counts differ")
    caps_out = tuple(ca + cb for ca, cb in zip(a.caps, b.caps))
    if _table_size(caps_out) > TABLE_BUDGET:
        raise BudgetExceeded("product table exceeds budget")
    flat, caps = _kernels.dense_mul(
        a.coeffs, np.array(a.caps, dtype=np.int64),
        b.coeffs, np.array(b.caps, dtype=np.int64),
    )
    return MultiDegreePoly(tuple(int(c) for c in caps), flat)


def power(p: MultiDegreePoly, r: int) -> MultiDegreePoly:
    if r < 0:
        raise ValueError("nonnegative powers only")
    if r == 0:
        return MultiDegreePoly((0,) * p.n, np.ones(1))
    acc = p
    for _ in range(r - 1):
        acc = multiply(acc, p)
    return acc


def partial(p: MultiDegreePoly, axis: int, order: int = 1) -> MultiDegreePoly:
    """order-fold derivative along one variable."""
    cap = p.caps[axis]
    caps_gone = tuple(0 if i == axis else c for i, c in enumerate(p.caps))
    if order > cap:
        return MultiDegreePoly(caps_gone, np.zeros(_table_size(caps_gone)))
    arr = p.coeffs.reshape(p.shape)
    sl = [slice(None)] * p.n
    sl[axis] = slice(order, None)
    arr = arr[tuple(sl)]
    k = np.arange(cap - order + 1)
    fac = np.ones_like(k, dtype=np.float64)
    for j in range(1, order + 1):
        fac *= k + j
    shape = [1] * p.n
    shape[axis] = len(k)
    arr = arr * fac.reshape(shape)
    caps_out = tuple(c - order if i == axis else c for i, c in enumerate(p.caps))
    return MultiDegreePoly(caps_out, arr.ravel())


def partial_mask(p: MultiDegreePoly, mask: int) -> MultiDegreePoly:
    out = p
    i = 0
    while mask:
        if mask & 1:
            out = partial(out, i, 1)
        mask >>= 1
        i += 1
    return out


def diagonalize(p: MultiDegreePoly) -> RealRootedPoly:
    sums = exponent_sums(p.caps)
    deg = int(sums[-1]) if p.coeffs.size else 0
    return RealRootedPoly(np.bincount(sums, weights=p.coeffs, minlength=deg + 1))


def _substitute(p: MultiDegreePoly, scale, shift) -> MultiDegreePoly:
    """p(scale * z + shift) without the nonzero-scale validation; exact
    per-axis binomial expansion."""
    arr = p.coeffs.reshape(p.shape)
    for i, cap in enumerate(p.caps):
        k = cap + 1
        M = np.zeros((k, k))
        for kk in range(k):
            for j in range(kk + 1):
                M[j, kk] = math.comb(kk, j) * scale[i] ** j * shift[i] ** (kk - j)
        arr = np.moveaxis(np.tensordot(arr, M, axes=([i], [1])), -1, i)
    return MultiDegreePoly(p.caps, arr.ravel())


def affine_sub(p: MultiDegreePoly, scale, shift) -> MultiDegreePoly:
    sc = np.asarray(scale, dtype=np.float64).ravel()
    sh = np.asarray(shift, dtype=np.float64).ravel()
    if sc.size != p.n or sh.size != p.n:
        raise DimensionMismatch("scale/shift must have one entry per variable")
    if np.any(sc == 0.0):
        raise ZeroScale("affine substitution requires nonzero scales")
    return _substitute(p, sc, sh)


def restrict_var(p: MultiDegreePoly, axis: int, beta: float) -> MultiDegreePoly:
    """Substitute the constant beta for one variable; its cap drops to 0."""
    arr = p.coeffs.reshape(p.shape)
    powers = beta ** np.arange(p.caps[axis] + 1, dtype=np.float64)
    arr = np.tensordot(arr, powers, axes=([axis], [0]))
    arr = np.expand_dims(arr, axis)
    caps_out = tuple(0 if i == axis else c for i, c in enumerate(p.caps))
    return MultiDegreePoly(caps_out, arr.ravel())


def section(p: MultiDegreePoly, alpha, e) -> np.ndarray:
    """Ascending coefficients of the univariate t -> p(alpha + t e).

    Exact expansion; e may contain zeros (unlike affine_sub)."""
    al = np.asarray(alpha, dtype=np.float64).ravel()
    ev = np.asarray(e, dtype=np.float64).ravel()
    if al.size != p.n or ev.size != p.n:
        raise DimensionMismatch("alpha/e must have one entry per variable")
    sub = _substitute(p, ev, al)
    return diagonalize(sub).coeffs
