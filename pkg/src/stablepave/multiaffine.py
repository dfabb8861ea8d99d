"""Multi-affine polynomials over subset-indexed coefficient tables.

A polynomial in n variables with degree <= 1 in each lives in a dense flat
table of 2**n coefficients; the coefficient of z^S sits at the bitmask of S
(variable i <-> bit i).  The kernel-style view indexes coefficients by the
complement, a_A = [z^{A^c}] p, which is how paving preconditions are stated.

Stability is never decided, only falsified: objects that must be real stable
are produced by stability-preserving constructors (determinantal polynomials,
partial derivatives, restrictions, inversion, reflection, affine substitution
with positive scales), and `stability_falsifier` is the sanity net.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    NotPSDContraction,
    WrongArity,
    ZeroScale,
)
from .univariate import DEFAULT_TOL, RealRootedPoly, is_real_rooted

MAX_VARS = 16


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def indices_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def compress_mask(mask: int, within: int) -> int:
    """Re-index the bits of mask (a subset of `within`) into positions
    0..popcount(within)-1, preserving order."""
    out = 0
    pos = 0
    i = 0
    w = within
    while w:
        if w & 1:
            if mask & (1 << i):
                out |= 1 << pos
            pos += 1
        i += 1
        w >>= 1
    return out


def expand_mask(mask: int, within: int) -> int:
    """Inverse of compress_mask."""
    out = 0
    pos = 0
    i = 0
    w = within
    while w:
        if w & 1:
            if mask & (1 << pos):
                out |= 1 << i
            pos += 1
        i += 1
        w >>= 1
    return out


@dataclass(frozen=True)
class MultiAffinePoly:
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VARS:
            raise DimensionMismatch(f"n={self.n} outside [0, {MAX_VARS}]")
        c = np.asarray(self.coeffs, dtype=np.float64).ravel().copy()
        if c.size != 1 << self.n:
            raise DimensionMismatch(
                f"coefficient table has {c.size} entries, expected {1 << self.n}"
            )
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, n):
        return cls(n, np.zeros(1 << n))

    @classmethod
    def constant(cls, n, value):
        c = np.zeros(1 << n)
        c[0] = value
        return cls(n, c)

    @classmethod
    def from_terms(cls, n, terms):
        """terms: iterable of (variable index list, coefficient)."""
        c = np.zeros(1 << n)
        for vars_, coeff in terms:
            c[mask_of(vars_)] += coeff
        return cls(n, c)

    def coefficient(self, vars_) -> float:
        return float(self.coeffs[mask_of(vars_)])

    @property
    def top_coefficient(self) -> float:
        return float(self.coeffs[-1])

    def __call__(self, point):
        return evaluate(self, point)


def evaluate(p: MultiAffinePoly, point) -> float:
    pt = np.asarray(point, dtype=np.float64).ravel()
    if pt.size != p.n:
        raise DimensionMismatch(f"point has {pt.size} entries, expected {p.n}")
    if p.n == 0:
        return float(p.coeffs[0])
    return float(_kernels.ma_eval(p.coeffs, pt))


def partial(p: MultiAffinePoly, mask: int) -> MultiAffinePoly:
    """The mixed derivative over the variables in `mask`."""
    size = 1 << p.n
    idx = np.arange(size)
    out = np.zeros(size)
    free = (idx & mask) == 0
    out[free] = p.coeffs[idx[free] | mask]
    return MultiAffinePoly(p.n, out)


def restrict_var(p: MultiAffinePoly, i: int, beta: float) -> MultiAffinePoly:
    size = 1 << p.n
    idx = np.arange(size)
    bit = 1 << i
    out = np.zeros(size)
    lo = (idx & bit) == 0
    out[lo] = p.coeffs[idx[lo]] + beta * p.coeffs[idx[lo] | bit]
    return MultiAffinePoly(p.n, out)


def diagonalize(p: MultiAffinePoly) -> RealRootedPoly:
    """The univariate restriction p(x, x, ..., x)."""
    return RealRootedPoly(_kernels.ma_diagonalize(p.coeffs, p.n))


def inversion(p: MultiAffinePoly) -> MultiAffinePoly:
    """z1...zn * p(1/z1, ..., 1/zn): coefficient of z^S becomes that of
    z^{S^c}.  An involution."""
    full = (1 << p.n) - 1
    idx = np.arange(1 << p.n)
    return MultiAffinePoly(p.n, p.coeffs[full ^ idx])


def reflect(p: MultiAffinePoly) -> MultiAffinePoly:
    """(-1)^n p(-z); negates the roots of the diagonalization."""
    pc = _kernels.popcounts(p.n)
    signs = np.where((p.n - pc) % 2 == 0, 1.0, -1.0)
    return MultiAffinePoly(p.n, p.coeffs * signs)


def affine_sub(p: MultiAffinePoly, scale, shift) -> MultiAffinePoly:
    """p(scale * z + shift), componentwise."""
    sc = np.asarray(scale, dtype=np.float64).ravel()
    sh = np.asarray(shift, dtype=np.float64).ravel()
    if sc.size != p.n or sh.size != p.n:
        raise DimensionMismatch("scale/shift must have one entry per variable")
    if np.any(sc == 0.0):
        raise ZeroScale("affine substitution requires nonzero scales")
    return MultiAffinePoly(p.n, _kernels.ma_affine_sub(p.coeffs, sc, sh))


def shift_poly(p: MultiAffinePoly, shift) -> MultiAffinePoly:
    """p(z + shift); the scale-1 special case used for centering."""
    sh = np.asarray(shift, dtype=np.float64).ravel()
    return MultiAffinePoly(
        p.n, _kernels.ma_affine_sub(p.coeffs, np.ones(p.n), sh)
    )


def kernel_coefficients(p: MultiAffinePoly) -> np.ndarray:
    """a_A = [z^{A^c}] p, the complement-indexed view used by the paving
    hypotheses (a at index mask(A))."""
    full = (1 << p.n) - 1
    idx = np.arange(1 << p.n)
    return p.coeffs[full ^ idx].copy()


def support(p: MultiAffinePoly, tol: float = DEFAULT_TOL) -> set[int]:
    scale = max(1.0, float(np.max(np.abs(p.coeffs))))
    return set(np.nonzero(np.abs(p.coeffs) > tol * scale)[0].tolist())


def support_convexity_check(p: MultiAffinePoly, tol: float = DEFAULT_TOL) -> bool:
    """True iff the support is convex in the subset lattice: A <= C <= B with
    A, B in the support forces C in the support."""
    scale = max(1.0, float(np.max(np.abs(p.coeffs))))
    supp = (np.abs(p.coeffs) > tol * scale).astype(np.float64)
    has_sub = _kernels.subset_sum(supp) > 0.5
    has_super = _kernels.superset_sum(supp) > 0.5
    bad = (~(supp > 0.5)) & has_sub & has_super
    return not bool(bad.any())


def coefficient_sign_check(p: MultiAffinePoly, tol: float = DEFAULT_TOL) -> bool:
    """Sign pattern forced on multi-affine real stable polynomials with
    positive top coefficient and nonnegative diagonalization roots:
    (-1)^(n-|S|) [z^S] p >= 0 for every S."""
    pc = _kernels.popcounts(p.n)
    signs = np.where((p.n - pc) % 2 == 0, 1.0, -1.0)
    scale = max(1.0, float(np.max(np.abs(p.coeffs))))
    return bool(np.all(signs * p.coeffs >= -tol * scale))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a randomized falsifier."""

    falsified: bool
    ray_v: Optional[np.ndarray] = None
    ray_alpha: Optional[np.ndarray] = None

    def __bool__(self):
        return not self.falsified


def _ray_section(p: MultiAffinePoly, v, alpha) -> RealRootedPoly:
    sub = _kernels.ma_affine_sub(p.coeffs, np.asarray(v, dtype=np.float64),
                                 np.asarray(alpha, dtype=np.float64))
    return RealRootedPoly(_kernels.ma_diagonalize(sub, p.n))


def stability_falsifier(
    p: MultiAffinePoly, trials: int = 50, rng_seed: int = 0
) -> Verdict:
    """Tests real-rootedness of t -> p(t v + alpha) on random rays with
    v > 0.  Finding a non-real-rooted section certifies that p is not real
    stable; not finding one proves nothing."""
    if p.n == 0 or not np.any(p.coeffs):
        return Verdict(False)
    rng = np.random.default_rng(rng_seed)
    rays = [(np.ones(p.n), np.zeros(p.n))]
    for _ in range(trials):
        v = rng.uniform(0.1, 2.0, size=p.n)
        alpha = rng.normal(0.0, 1.5, size=p.n)
        rays.append((v, alpha))
    for v, alpha in rays:
        section = _ray_section(p, v, alpha)
        if section.is_zero or section.degree == 0:
            continue
        if not is_real_rooted(section):
            return Verdict(True, np.array(v), np.array(alpha))
    return Verdict(False)


def bivariate_stability_exact(p: MultiAffinePoly) -> bool:
    """Exact stability test for nonzero bivariate multi-affine polynomials:
    a11 a00 - a10 a01 <= 0."""
    if p.n != 2:
        raise WrongArity(f"needs n=2, got n={p.n}")
    if not np.any(p.coeffs):
        raise WrongArity("zero polynomial")
    a00, a10, a01, a11 = p.coeffs[0b00], p.coeffs[0b01], p.coeffs[0b10], p.coeffs[0b11]
    return bool(a11 * a00 - a10 * a01 <= 0.0)


def validate_symmetric(K, tol: float = 1e-12) -> np.ndarray:
    M = np.asarray(K, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("matrix must be square")
    if np.max(np.abs(M - M.T)) > tol * max(1.0, float(np.max(np.abs(M)))):
        raise NotPSDContraction("matrix is not symmetric within tolerance")
    return 0.5 * (M + M.T)


def char_poly_matrix(K) -> MultiAffinePoly:
    """det(Z - K) as a multi-affine polynomial: [z^S] = (-1)^(n-|S|)
    det(K_{S^c}) over all principal minors."""
    M = validate_symmetric(K)
    n = M.shape[0]
    if n > MAX_VARS:
        raise DimensionMismatch(f"n={n} exceeds {MAX_VARS}")
    size = 1 << n
    coeffs = np.zeros(size)
    for s in range(size):
        comp = indices_of((size - 1) ^ s)
        if comp:
            det = float(np.linalg.det(M[np.ix_(comp, comp)]))
        else:
            det = 1.0
        coeffs[s] = ((-1.0) ** len(comp)) * det
    return MultiAffinePoly(n, coeffs)


def principal_minors(K) -> np.ndarray:
    """det(K_A) for every A, indexed by mask; det(K_empty) = 1."""
    M = np.asarray(K, dtype=np.float64)
    n = M.shape[0]
    out = np.ones(1 << n)
    for a in range(1, 1 << n):
        rows = indices_of(a)
        out[a] = float(np.linalg.det(M[np.ix_(rows, rows)]))
    return out


def disjoint_product(polys: list[MultiAffinePoly]) -> MultiAffinePoly:
    """Product of multi-affine polynomials placed on disjoint variable
    blocks: block j occupies bits [sum of earlier n's, ...).  The result is
    multi-affine in the total variable count."""
    total = sum(q.n for q in polys)
    if total > MAX_VARS:
        raise DimensionMismatch(f"{total} variables exceed {MAX_VARS}")
    acc = np.ones(1)
    for q in polys:
        acc = np.kron(q.coeffs, acc)
    return MultiAffinePoly(total, acc)


def restrict_to_block(p: MultiAffinePoly, within: int) -> MultiAffinePoly:
    """Drop variables outside `within` (the polynomial must not depend on
    them), compacting the surviving bits."""
    keep = [m for m in range(1 << p.n) if (m & ~within) == 0]
    sub = p.coeffs[keep]
    return MultiAffinePoly(bin(within).count("1"), sub)
