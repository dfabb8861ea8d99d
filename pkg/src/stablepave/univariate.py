"""Univariate real-rooted polynomial arithmetic.

Root isolation is Sturm-sequence bisection (absolute width 1e-12) with a
Newton polish on simple roots; real-rootedness certificates come from the
Sturm count matching the degree.  Near-multiple roots are clustered at
1e-9 and reported with multiplicity.  An exact sign-count over rationals
(`sturm_count_exact`, `real_root_count_exact`) backs small oracle runs.

Polynomials are stored as ascending coefficient arrays; the zero polynomial
is represented explicitly and follows the convention that it interlaces and
is interlaced by everything.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels
from .errors import (
    DegreeMismatch,
    LengthMismatch,
    NotRealRooted,
    SumMismatch,
    ZeroPolynomial,
)

DEFAULT_TOL = 1e-9
ROOT_WIDTH = 1e-12
CLUSTER_TOL = 1e-9
# remainder entries below this (on unit max-norm chain elements) end the
# Sturm chain; anything that truncates early has multiple roots and is
# handed to the derivative-chain pass
STRICT_CHAIN_TOL = 1e-12


def _trim(coeffs, rel_tol=0.0):
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1)
    cutoff = rel_tol * scale
    last = c.size - 1
    while last > 0 and abs(c[last]) <= cutoff:
        last -= 1
    return np.array(c[: last + 1])


@dataclass(frozen=True)
class RealRootedPoly:
    """Univariate polynomial, ascending coefficients, degree-trimmed."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = _trim(self.coeffs)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        c = npoly.polyfromroots(np.asarray(roots, dtype=np.float64))
        return cls(lead * c)

    def __call__(self, x):
        return npoly.polyval(x, self.coeffs)


@dataclass(frozen=True)
class RootVector:
    """Roots sorted non-increasing; multiplicity by repetition."""

    roots: np.ndarray

    def __post_init__(self):
        r = np.sort(np.asarray(self.roots, dtype=np.float64).ravel())[::-1].copy()
        r.flags.writeable = False
        object.__setattr__(self, "roots", r)

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def as_poly(p) -> RealRootedPoly:
    if isinstance(p, RealRootedPoly):
        return p
    return RealRootedPoly(np.asarray(p, dtype=np.float64))


# --------------------------------------------------------------------------
# Sturm chains
# --------------------------------------------------------------------------

def _normalized(c):
    return c / np.max(np.abs(c))


def _sturm_chain(coeffs, zero_tol):
    """Classic Sturm chain, truncated where the remainder falls below
    zero_tol (all elements are scaled to unit max-norm first, so the cut is
    relative).  Returns the list of ascending coefficient lists."""
    p0 = _normalized(_trim(coeffs))
    chain = [[float(v) for v in p0]]
    if len(p0) > 1:
        d = [k * chain[0][k] for k in range(1, len(chain[0]))]
        s = max(abs(v) for v in d)
        chain.append([v / s for v in d])
    while len(chain[-1]) > 1:
        num = list(chain[-2])
        den = chain[-1]
        while len(num) >= len(den):
            f = num[-1] / den[-1]
            off = len(num) - len(den)
            for i in range(len(den) - 1):
                num[off + i] -= f * den[i]
            num.pop()
        while len(num) > 1 and num[-1] == 0.0:
            num.pop()
        if not num or max(abs(v) for v in num) <= zero_tol:
            break
        s = max(abs(v) for v in num)
        chain.append([-v / s for v in num])
    return chain


def _pack_chain(chain):
    width = max(len(c) for c in chain)
    mat = np.zeros((len(chain), width))
    degs = np.zeros(len(chain), dtype=np.int64)
    for i, c in enumerate(chain):
        mat[i, : len(c)] = c
        degs[i] = len(c) - 1
    return mat, degs


# strict signs: only exact float zeros are skipped in variation counts, so
# the tiny signed values next to multiple roots still steer the bisection
_VAR_ZERO_TOL = 0.0


class _Chain:
    """Packed Sturm chain with sign-variation queries."""

    def __init__(self, coeffs, zero_tol):
        self.elements = _sturm_chain(coeffs, zero_tol)
        self.mat, self.degs = _pack_chain(self.elements)

    def variations(self, x):
        return int(
            _kernels.sign_variations(self.mat, self.degs, float(x), _VAR_ZERO_TOL)
        )

    def count(self, a, b):
        """Number of distinct real roots in (a, b]."""
        return self.variations(a) - self.variations(b)

    @property
    def gcd_part(self):
        tail = self.elements[-1]
        return tail if len(tail) > 1 else None


def cauchy_bound(coeffs):
    c = _trim(coeffs)
    if len(c) == 1:
        return 1.0
    return 1.0 + float(np.max(np.abs(c[:-1])) / abs(c[-1]))


def _count_distinct(chain, bound):
    return chain.count(-bound, bound)


def _horner(coeffs, x):
    acc = 0.0
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * x + coeffs[k]
    return acc


def _newton_polish(coeffs, x, lo, hi):
    c = [float(v) for v in coeffs]
    dc = [k * c[k] for k in range(1, len(c))]
    for _ in range(30):
        fx = _horner(c, x)
        dfx = _horner(dc, x)
        if dfx == 0.0:
            break
        step = fx / dfx
        nx = x - step
        if not (lo - 1e-9 <= nx <= hi + 1e-9):
            break
        x = nx
        if abs(step) < 1e-16 * max(1.0, abs(nx)):
            break
    return x


def _roots_with_mult(coeffs):
    """Roots with multiplicities when the strict Sturm chain certifies an
    all-simple spectrum; anything with multiple roots (early chain
    truncation) is delegated to the derivative-chain pass by raising
    NotRealRooted."""
    c = _trim(coeffs)
    degree = len(c) - 1
    if degree == 0:
        return []
    chain = _Chain(c, STRICT_CHAIN_TOL)
    if chain.gcd_part is not None:
        raise NotRealRooted("chain truncated early: multiple roots present")
    bound = cauchy_bound(c) + 1.0
    distinct = _count_distinct(chain, bound)
    if distinct != degree:
        raise NotRealRooted(f"Sturm count {distinct} != degree {degree}")
    xs, ks = _kernels.isolate_chain(chain.mat, chain.degs, -bound, bound, ROOT_WIDTH)
    pairs = []
    for x, k in zip(xs, ks):
        x = float(x)
        if k == 1:
            x = _newton_polish(chain.elements[0], x, x - 1e-9, x + 1e-9)
        pairs.append((x, int(k)))
    merged = _cluster(pairs)
    if sum(m for _, m in merged) != degree:
        raise NotRealRooted(f"multiplicity total disagrees with degree {degree}")
    return merged


def _cluster(pairs, tol=CLUSTER_TOL):
    pairs = sorted(pairs)
    merged = []
    for x, m in pairs:
        if merged and abs(x - merged[-1][0]) <= tol:
            px, pm = merged[-1]
            merged[-1] = ((px * pm + x * m) / (pm + m), pm + m)
        else:
            merged.append((x, m))
    return merged


# --------------------------------------------------------------------------
# Rolle-chain fallback for noise-limited multiple roots
# --------------------------------------------------------------------------
#
# Float remainder cascades can fail to expose the gcd of a polynomial whose
# multiple roots carry coefficient noise.  The fallback recovers the root
# structure from the derivative chain instead: critical points where |p| sits
# below an evaluation-noise threshold are multiple roots (multiplicity one
# more than in p'), and the remaining simple roots are bracketed by sign
# changes between consecutive critical points, where evaluation is well
# conditioned.

_ROLLE_NOISE_LADDER = (1e-14, 1e-12, 1e-11)


def _eval_scale(c, x):
    # chain elements are unit max-norm, so max(1, |x|)^deg bounds the
    # generic magnitude; a data-dependent scale would collapse near zero
    # whenever low-order coefficients vanish exactly
    return max(1.0, abs(x)) ** (len(c) - 1)


def _sign_bisect(c, a, b, sa):
    cl = [float(v) for v in c]
    for _ in range(200):
        if b - a <= ROOT_WIDTH:
            break
        mid = 0.5 * (a + b)
        fm = _horner(cl, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (sa > 0):
            a = mid
        else:
            b = mid
    return _newton_polish(c, 0.5 * (a + b), a, b)


def _bracket_inward(c, x0, other, want_sign, eta):
    """First point between x0 and other (walking from x0) where p is
    significant with the expected sign; None if the walk hits `other`."""
    span = other - x0
    h = 1e-9 * (1.0 + abs(x0))
    cl = [float(v) for v in c]
    while abs(h) < abs(span):
        x = x0 + (h if span > 0 else -h)
        v = _horner(cl, x)
        if abs(v) > eta * _eval_scale(c, x):
            if (v > 0) == (want_sign > 0):
                return x
            return None
        h *= 2.0
    return None


def _rolle_structure(coeffs, eta):
    c = _normalized(_trim(coeffs))
    d = len(c) - 1
    if d == 0:
        return []
    if d == 1:
        return [(-c[0] / c[1], 1)]
    crit = _cluster(_rolle_structure(npoly.polyder(c), eta))
    bound = cauchy_bound(c) + 1.0
    out = []
    # side signs of p immediately left/right of each critical node
    sides = []
    for x0, m0 in crit:
        v = npoly.polyval(x0, c)
        if abs(v) <= eta * _eval_scale(c, x0):
            mult = m0 + 1
            out.append((x0, mult))
            dm = c
            for _ in range(mult):
                dm = npoly.polyder(dm)
            s_right = 1.0 if npoly.polyval(x0, dm) > 0 else -1.0
            s_left = s_right * ((-1.0) ** mult)
        else:
            s_right = s_left = 1.0 if v > 0 else -1.0
        sides.append((x0, s_left, s_right))
    nodes = (
        [(-bound, 0.0, 1.0 if npoly.polyval(-bound, c) > 0 else -1.0)]
        + sides
        + [(bound, 1.0 if npoly.polyval(bound, c) > 0 else -1.0, 0.0)]
    )
    for (xa, _, sa), (xb, sb, _) in zip(nodes[:-1], nodes[1:]):
        if sa * sb >= 0:
            continue
        a = _bracket_inward(c, xa, xb, sa, eta)
        b = _bracket_inward(c, xb, xa, sb, eta)
        if a is None or b is None or a >= b:
            raise NotRealRooted("sign-change bracket lost in derivative gap")
        out.append((_sign_bisect(c, a, b, sa), 1))
    merged = _cluster(out)
    if sum(m for _, m in merged) != d:
        raise NotRealRooted(
            f"derivative-chain count {sum(m for _, m in merged)} != degree {d}"
        )
    return merged


def _rolle_ladder(coeffs):
    last = None
    for eta in _ROLLE_NOISE_LADDER:
        try:
            return _rolle_structure(coeffs, eta)
        except NotRealRooted as err:
            last = err
    raise last


def _structure(coeffs):
    """Root/multiplicity structure via the Sturm ladder, falling back to the
    derivative chain when remainder noise hides the gcd."""
    try:
        return _roots_with_mult(coeffs)
    except NotRealRooted as sturm_err:
        try:
            return _rolle_ladder(coeffs)
        except NotRealRooted:
            raise sturm_err from None


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

def roots(p, tol: float = DEFAULT_TOL) -> RootVector:
    """All real roots with multiplicity, sorted non-increasing.

    Certifies real-rootedness on the way (the recovered multiplicity total
    must reach the degree); raises NotRealRooted otherwise, ZeroPolynomial
    for the zero polynomial."""
    q = as_poly(p)
    if q.is_zero:
        raise ZeroPolynomial("zero polynomial has no root vector")
    pairs = _structure(q.coeffs)
    expanded = [x for x, m in pairs for _ in range(m)]
    return RootVector(np.array(expanded[::-1]))


def real_root_count(p) -> int:
    """Number of real roots counted with multiplicity (0 for constants)."""
    q = as_poly(p)
    if q.is_zero:
        raise ZeroPolynomial("zero polynomial")
    if q.degree == 0:
        return 0
    try:
        return sum(m for _, m in _structure(q.coeffs))
    except NotRealRooted:
        pass
    # fall back to the strictest-rung distinct count; callers only compare
    # against the degree
    chain = _Chain(q.coeffs, STRICT_CHAIN_TOL)
    return _count_distinct(chain, cauchy_bound(q.coeffs) + 1.0)


def is_real_rooted(p) -> bool:
    q = as_poly(p)
    if q.is_zero or q.degree == 0:
        return True
    try:
        _structure(q.coeffs)
        return True
    except NotRealRooted:
        return False


def maxroot(p, tol: float = DEFAULT_TOL) -> float:
    """Largest real root; -inf for nonzero constants.

    Goes through the full multiplicity-aware extraction so that a multiple
    largest root (projection kernels produce them) is polished through the
    gcd recursion rather than read off a noise-limited bracket."""
    q = as_poly(p)
    if q.is_zero:
        raise ZeroPolynomial("zero polynomial")
    if q.degree == 0:
        return -np.inf
    try:
        pairs = _structure(q.coeffs)
    except NotRealRooted:
        pairs = None
    if pairs:
        return float(pairs[-1][0])
    # certificate failed or no real roots at the strict rungs; fall back to
    # bracketing the largest sign change of the strictest chain
    chain = _Chain(q.coeffs, STRICT_CHAIN_TOL)
    bound = cauchy_bound(q.coeffs) + 1.0
    if chain.count(-bound, bound) < 1:
        raise NotRealRooted("no real root found for nonconstant polynomial")
    lo, hi = -bound, bound
    while hi - lo > ROOT_WIDTH:
        mid = 0.5 * (lo + hi)
        if chain.count(mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
    return float(_newton_polish(q.coeffs, 0.5 * (lo + hi), lo, hi))


def min_root(p, tol: float = DEFAULT_TOL) -> float:
    """Smallest real root; +inf for nonzero constants."""
    q = as_poly(p)
    if q.is_zero:
        raise ZeroPolynomial("zero polynomial")
    if q.degree == 0:
        return np.inf
    rev = q.coeffs * ((-1.0) ** np.arange(len(q.coeffs)))
    return -maxroot(RealRootedPoly(rev), tol)


def max_abs_root(p, tol: float = DEFAULT_TOL) -> float:
    """Largest |root|; 0 for nonzero constants."""
    q = as_poly(p)
    if q.is_zero:
        raise ZeroPolynomial("zero polynomial")
    if q.degree == 0:
        return 0.0
    return max(abs(maxroot(q, tol)), abs(min_root(q, tol)))


def _alternates(upper, lower, tol):
    """upper[0] >= lower[0] >= upper[1] >= lower[1] >= ... within tol, with
    len(upper) in {len(lower), len(lower)+1}."""
    for i, v in enumerate(lower):
        if upper[i] < v - tol:
            return False
        if i + 1 < len(upper) and v < upper[i + 1] - tol:
            return False
    return True


def interlaces(q, p, tol: float = DEFAULT_TOL) -> bool:
    """Whether the root sequences of q and p alternate.

    With deg(q) = deg(p) - 1 this asks that q's roots sit between
    consecutive roots of p; with equal degrees either alternation order is
    accepted.  The zero polynomial interlaces and is interlaced by
    everything."""
    qq, pp = as_poly(q), as_poly(p)
    if qq.is_zero or pp.is_zero:
        return True
    if qq.degree == 0 or pp.degree == 0:
        return abs(qq.degree - pp.degree) <= 1
    if abs(qq.degree - pp.degree) > 1:
        raise DegreeMismatch(
            f"degrees {qq.degree} and {pp.degree} differ by more than one"
        )
    rq = roots(qq, tol).roots
    rp = roots(pp, tol).roots
    if len(rq) == len(rp):
        return _alternates(rp, rq, tol) or _alternates(rq, rp, tol)
    if len(rq) == len(rp) - 1:
        return _alternates(rp, rq, tol)
    return _alternates(rq, rp, tol)


def proper_position(q, p, tol: float = DEFAULT_TOL) -> bool:
    """q << p: alternating roots plus Wronskian p q' - p' q <= 0.

    The Wronskian sign is checked on a grid spanning the root interval."""
    qq, pp = as_poly(q), as_poly(p)
    if qq.is_zero or pp.is_zero:
        return True
    if qq.degree == 0 and pp.degree == 0:
        return True
    if abs(qq.degree - pp.degree) > 1:
        return False
    if not interlaces(qq, pp, tol):
        return False
    pts = []
    for f in (qq, pp):
        if f.degree > 0:
            pts.extend(roots(f, tol).roots.tolist())
    lo, hi = min(pts) - 1.0, max(pts) + 1.0
    grid = np.linspace(lo, hi, 129)
    w = npoly.polyval(grid, qq.coeffs) * npoly.polyval(
        grid, npoly.polyder(pp.coeffs)
    ) - npoly.polyval(grid, pp.coeffs) * npoly.polyval(
        grid, npoly.polyder(qq.coeffs)
    )
    # W[p, q] = p q' - p' q = -(q p' - p q')
    wpq = -w
    scale = max(1.0, float(np.max(np.abs(wpq))))
    return bool(np.all(wpq <= tol * scale))


def common_interlacer_probe(ps, trials: int = 64, rng_seed: int = 0) -> bool:
    """Randomized test for a common interlacer via convex combinations.

    Returns False (a certificate of NO common interlacer) as soon as some
    convex combination fails real-rootedness; True only means the probe did
    not falsify."""
    polys = [as_poly(p) for p in ps]
    if len(polys) <= 1:
        return True
    deg = polys[0].degree
    for q in polys:
        if q.degree != deg:
            raise DegreeMismatch("common interlacer probe needs equal degrees")
        if q.coeffs[-1] <= 0:
            raise ValueError("common interlacer probe needs positive leading coefficients")
    stack = np.stack([q.coeffs for q in polys])
    combos = []
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            w = np.zeros(len(polys))
            w[i] = w[j] = 0.5
            combos.append(w)
    rng = np.random.default_rng(rng_seed)
    for _ in range(trials):
        combos.append(rng.dirichlet(np.ones(len(polys))))
    for w in combos:
        mix = w @ stack
        if not is_real_rooted(RealRootedPoly(mix)):
            return False
    return True


def majorizes(a, b, tol: float = DEFAULT_TOL) -> bool:
    """a > b in the majorization order: sorted-descending prefix sums of a
    dominate those of b, equal totals."""
    va = np.sort(np.asarray(a, dtype=np.float64).ravel())[::-1]
    vb = np.sort(np.asarray(b, dtype=np.float64).ravel())[::-1]
    if len(va) != len(vb):
        raise LengthMismatch(f"lengths {len(va)} != {len(vb)}")
    sa, sb = np.cumsum(va), np.cumsum(vb)
    if abs(sa[-1] - sb[-1]) > max(tol, tol * max(1.0, abs(sa[-1]))):
        raise SumMismatch(f"totals {sa[-1]} != {sb[-1]}")
    return bool(np.all(sa >= sb - tol))


def majorization_margin(a, b) -> float:
    """min_k (prefix_a - prefix_b); nonnegative iff a majorizes b."""
    va = np.sort(np.asarray(a, dtype=np.float64).ravel())[::-1]
    vb = np.sort(np.asarray(b, dtype=np.float64).ravel())[::-1]
    if len(va) != len(vb):
        raise LengthMismatch(f"lengths {len(va)} != {len(vb)}")
    return float(np.min(np.cumsum(va) - np.cumsum(vb)))


# --------------------------------------------------------------------------
# exact-rational mode (oracle runs)
# --------------------------------------------------------------------------

def _exact_chain(coeffs):
    def trim_fr(c):
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        return c

    p0 = trim_fr([Fraction(x) for x in coeffs])
    chain = [p0]
    if len(p0) > 1:
        chain.append(trim_fr([k * c for k, c in enumerate(p0)][1:]))
    while len(chain[-1]) > 1:
        num, den = list(chain[-2]), chain[-1]
        # synthetic division, exact
        while len(num) >= len(den):
            f = num[-1] / den[-1]
            shift = len(num) - len(den)
            for i, d in enumerate(den):
                num[shift + i] -= f * d
            num = num[:-1]
            num = trim_fr(num) if num else [Fraction(0)]
        rem = trim_fr(num) if num else [Fraction(0)]
        if len(rem) == 1 and rem[0] == 0:
            break
        chain.append([-c for c in rem])
    return chain


def _exact_variations(chain, x):
    signs = []
    for c in chain:
        acc = Fraction(0)
        for coeff in reversed(c):
            acc = acc * x + coeff
        if acc != 0:
            signs.append(1 if acc > 0 else -1)
    return sum(1 for i in range(1, len(signs)) if signs[i] != signs[i - 1])


def sturm_count_exact(coeffs, a, b) -> int:
    """Distinct real roots in (a, b], exact rational arithmetic."""
    chain = _exact_chain(coeffs)
    return _exact_variations(chain, Fraction(a)) - _exact_variations(chain, Fraction(b))


def real_root_count_exact(coeffs) -> int:
    """Total real roots with multiplicity, exact rational arithmetic."""
    c = [Fraction(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    if len(c) == 1:
        if c[0] == 0:
            raise ZeroPolynomial("zero polynomial")
        return 0
    bound = 1 + max(abs(x) for x in c[:-1]) / abs(c[-1])
    distinct = sturm_count_exact(c, -bound - 1, bound + 1)
    chain = _exact_chain(c)
    tail = chain[-1]
    if len(tail) > 1:
        return distinct + real_root_count_exact(tail)
    return distinct
