"""Hyperbolicity checks: homogenization, cone membership, root-vector
majorization, and the lifted polynomial that transports a centered kernel's
root bound into an entropy statement.

Root-vector convention
----------------------
``lambda_at(p, e, alpha)`` returns the roots of t -> p(t e + alpha) sorted
non-increasing, with no sign flip.  Worked n=1 example (kernel z - q of a
Bernoulli(q) point, centered kernel xi = z, lift F(z, u, w) = z + u):

    F(t e + (0, -q, 1)) = t - q   with e = (1, 0, 0),

so the section's literal root q reproduces the root of the kernel
diagonalization x - q.  The two other specializations (w = 1, u = 0 giving
the centered roots; w = 0 giving the sorted marginals) come out right under
the same literal convention, which is what fixes it.
"""

from __future__ import annotations

import numpy as np

from . import multiaffine as ma
from . import multidegree as md
from .errors import NotRealRooted, SpecializationMismatch, WrongArity
from .multiaffine import MultiAffinePoly, Verdict
from .multidegree import MultiDegreePoly
from .univariate import (
    DEFAULT_TOL,
    RealRootedPoly,
    is_real_rooted,
    majorization_margin,
    majorizes,
    maxroot,
    roots as poly_roots,
)

CONE_STRICT = 1e-10


def homogenize(p) -> MultiDegreePoly:
    """Degree-d homogenization in one extra variable w (the last axis):
    each monomial z^v picks up w^(d - |v|)."""
    if isinstance(p, MultiAffinePoly):
        p = md.from_multiaffine(p)
    sums = md.exponent_sums(p.caps)
    d = 0
    nz = np.nonzero(p.coeffs)[0]
    if nz.size:
        d = int(sums[nz].max())
    caps_out = tuple(p.caps) + (d,)
    arr = np.zeros(tuple(c + 1 for c in caps_out))
    flat_view = arr.reshape(-1, d + 1)
    w_exp = d - sums
    flat_view[np.arange(p.coeffs.size), w_exp] = p.coeffs
    return MultiDegreePoly(caps_out, arr.ravel())


def dehomogenize(p: MultiDegreePoly) -> MultiDegreePoly:
    """Set the homogenizing variable (last axis) to 1 and drop it."""
    arr = p.coeffs.reshape(p.shape)
    out = arr.sum(axis=-1)
    return MultiDegreePoly(p.caps[:-1], out.ravel())


def is_homogeneous(p: MultiDegreePoly) -> bool:
    sums = md.exponent_sums(p.caps)
    nz = np.nonzero(p.coeffs)[0]
    if nz.size == 0:
        return True
    return bool(np.all(sums[nz] == sums[nz][0]))


def _section_poly(p: MultiDegreePoly, e, alpha) -> RealRootedPoly:
    return RealRootedPoly(md.section(p, alpha, e))


def hyperbolicity_probe(
    p: MultiDegreePoly, e, trials: int = 40, rng_seed: int = 0
) -> Verdict:
    """Falsifier for hyperbolicity in direction e: p(e) > 0 and every
    random section t -> p(t e + alpha) real rooted."""
    ev = np.asarray(e, dtype=np.float64)
    if md.evaluate(p, ev) <= 0.0:
        return Verdict(True, ev, np.zeros(p.n))
    rng = np.random.default_rng(rng_seed)
    for _ in range(trials):
        alpha = rng.normal(0.0, 1.0, size=p.n)
        sec = _section_poly(p, ev, alpha)
        if sec.is_zero or sec.degree == 0:
            continue
        if not is_real_rooted(sec):
            return Verdict(True, ev, alpha)
    return Verdict(False)


def lambda_at(p: MultiDegreePoly, e, alpha) -> np.ndarray:
    """Non-increasing roots of t -> p(t e + alpha) (literal, no negation;
    see the module docstring for the worked example)."""
    sec = _section_poly(p, e, alpha)
    if sec.is_zero:
        raise NotRealRooted("section is identically zero")
    return poly_roots(sec).roots


def cone_membership(p: MultiDegreePoly, e, x, strict: float = CONE_STRICT) -> bool:
    """x in the open hyperbolicity cone: p(x + t e) has no roots t >= 0."""
    sec = _section_poly(p, e, x)
    if sec.is_zero:
        return False
    if sec.degree == 0:
        return float(sec.coeffs[0]) != 0.0
    try:
        return maxroot(sec) < -strict
    except NotRealRooted:
        from .univariate import _Chain, STRICT_CHAIN_TOL, cauchy_bound

        chain = _Chain(sec.coeffs, STRICT_CHAIN_TOL)
        return chain.count(-strict, cauchy_bound(sec.coeffs) + 1.0) == 0


def hyperbolic_majorization_check(
    p: MultiDegreePoly, e, v, u, tol: float = 1e-7
) -> bool:
    """lambda_{v+u}(p) majorized by lambda_v(p) + lambda_u(p)."""
    lv = lambda_at(p, e, np.asarray(v, dtype=np.float64))
    lu = lambda_at(p, e, np.asarray(u, dtype=np.float64))
    lvu = lambda_at(p, e, np.asarray(v, dtype=np.float64) + np.asarray(u, dtype=np.float64))
    return majorizes(lv + lu, lvu, tol)


# --------------------------------------------------------------------------
# the lifted polynomial of a centered kernel
# --------------------------------------------------------------------------

def lift_direction(n: int) -> np.ndarray:
    """Hyperbolicity direction for the lift: ones on the z block, zeros on
    the u block and on w."""
    e = np.zeros(2 * n + 1)
    e[:n] = 1.0
    return e


def F_construction(xi: MultiAffinePoly) -> MultiDegreePoly:
    """Lift of a centered kernel xi to 2n+1 variables:

        F(z, u, w) = sum_A ( sum_{B <= A} b_B w^{|B|} u^{A \\ B} ) z^{A^c},

    with b_B = [z^{B^c}] xi the kernel-style coefficients.  F is
    homogeneous of degree n and hyperbolic in the lift direction; its
    sections at (0, -p, 1), (0, 0, 1) and (0, -p, 0) recover the kernel
    roots, the centered roots, and the sorted marginals."""
    n = xi.n
    b = ma.kernel_coefficients(xi)
    caps = (1,) * n + (1,) * n + (n,)
    arr = np.zeros(tuple(c + 1 for c in caps))
    full = (1 << n) - 1
    for a_mask in range(1 << n):
        zc = full ^ a_mask
        sub = a_mask
        while True:
            b_mask = sub
            u_mask = a_mask ^ b_mask
            idx = (
                tuple((zc >> i) & 1 for i in range(n))
                + tuple((u_mask >> i) & 1 for i in range(n))
                + (bin(b_mask).count("1"),)
            )
            arr[idx] += b[b_mask]
            if sub == 0:
                break
            sub = (sub - 1) & a_mask
    return MultiDegreePoly(caps, arr.ravel())


def check_F_specializations(
    xi: MultiAffinePoly,
    kernel_diag_roots,
    marginal_probs,
    tol: float = 1e-8,
) -> dict:
    """Verify the three sections of the lift and the majorization
    lambda(kernel) < lambda(centered) + sorted(marginals).

    Raises SpecializationMismatch when a section misses its target (an
    implementation bug, not an instance property)."""
    n = xi.n
    F = F_construction(xi)
    e = lift_direction(n)
    p = np.asarray(marginal_probs, dtype=np.float64)
    zeros = np.zeros(n)

    alpha_kernel = np.concatenate([zeros, -p, [1.0]])
    alpha_centered = np.concatenate([zeros, zeros, [1.0]])
    alpha_marginals = np.concatenate([zeros, -p, [0.0]])

    lam_kernel = lambda_at(F, e, alpha_kernel)
    lam_centered = lambda_at(F, e, alpha_centered)
    lam_marginals = lambda_at(F, e, alpha_marginals)

    target_kernel = np.sort(np.asarray(kernel_diag_roots, dtype=np.float64))[::-1]
    target_centered = poly_roots(ma.diagonalize(xi)).roots
    target_marginals = np.sort(p)[::-1]

    for name, got, want in (
        ("kernel", lam_kernel, target_kernel),
        ("centered", lam_centered, target_centered),
        ("marginals", lam_marginals, target_marginals),
    ):
        if len(got) != len(want) or np.max(np.abs(got - want)) > tol:
            raise SpecializationMismatch(
                f"{name} section missed its target by "
                f"{np.max(np.abs(got - want)) if len(got) == len(want) else 'degree'}"
            )
    margin = majorization_margin(lam_centered + lam_marginals, lam_kernel)
    return {
        "lambda_kernel": lam_kernel,
        "lambda_centered": lam_centered,
        "marginals_sorted": lam_marginals,
        "majorization_margin": float(margin),
        "majorizes": bool(margin >= -1e-8),
    }


# --------------------------------------------------------------------------
# above-the-roots property tests
# --------------------------------------------------------------------------

def _ma_section(p: MultiAffinePoly, alpha, direction) -> RealRootedPoly:
    from . import _kernels

    sub = _kernels.ma_affine_sub(
        p.coeffs,
        np.asarray(direction, dtype=np.float64),
        np.asarray(alpha, dtype=np.float64),
    )
    return RealRootedPoly(_kernels.ma_diagonalize(sub, p.n))


def ma_above_roots(p: MultiAffinePoly, u, strict: float = CONE_STRICT) -> bool:
    """Above-the-roots test for multi-affine stable p along the all-ones
    direction."""
    sec = _ma_section(p, np.asarray(u, dtype=np.float64), np.ones(p.n))
    if sec.is_zero:
        return False
    if sec.degree == 0:
        return True
    return maxroot(sec) < -strict


def ab_convexity_test(
    p: MultiAffinePoly, samples: int = 50, rng_seed: int = 0
) -> bool:
    """Property test: u above the roots, v >= 0 with p nonvanishing on the
    segment [u - v, u] forces u - v above the roots."""
    rng = np.random.default_rng(rng_seed)
    top = maxroot(ma.diagonalize(p))
    checked = 0
    for _ in range(samples * 4):
        if checked >= samples:
            break
        u = (top + rng.uniform(0.05, 1.5)) * np.ones(p.n) + rng.uniform(
            0.0, 0.5, size=p.n
        )
        if not ma_above_roots(p, u):
            return False
        v = rng.uniform(0.0, 1.0, size=p.n) * rng.uniform(0.2, 1.5)
        sec = _ma_section(p, u, -v)
        if sec.is_zero or sec.degree == 0:
            continue
        try:
            rts = poly_roots(sec).roots
        except NotRealRooted:
            continue
        if np.any((rts >= -1e-9) & (rts <= 1.0 + 1e-9)):
            continue
        checked += 1
        if not ma_above_roots(p, u - v):
            return False
    return checked > 0


def boundary_lemma_test(
    p: MultiAffinePoly, samples: int = 50, rng_seed: int = 0, eta: float = 1e-6
) -> bool:
    """Property test along rays: walking down from above the roots, the
    first zero of the segment is the boundary; just above it the point is
    still above the roots, just below it is not."""
    rng = np.random.default_rng(rng_seed)
    top = maxroot(ma.diagonalize(p))
    checked = 0
    for _ in range(samples * 4):
        if checked >= samples:
            break
        u = (top + rng.uniform(0.2, 1.5)) * np.ones(p.n)
        d = rng.uniform(0.1, 1.0, size=p.n)
        sec = _ma_section(p, u, -d)
        try:
            rts = poly_roots(sec).roots
        except NotRealRooted:
            continue
        positive = rts[rts > 1e-7]
        if positive.size == 0:
            continue
        s0 = float(positive.min())
        checked += 1
        before = u - (s0 - eta) * d
        at = u - s0 * d
        if not ma_above_roots(p, before):
            return False
        if abs(ma.evaluate(p, at)) > 1e-6 * max(
            1.0, abs(ma.evaluate(p, u))
        ) and not ma_above_roots(p, at):
            return False
        if ma_above_roots(p, at + eta * np.ones(p.n)) is False:
            return False
        if ma_above_roots(p, at - eta * np.ones(p.n)):
            return False
    return checked > 0
