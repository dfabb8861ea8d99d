"""Partition search and certified root bounds for multi-affine kernels.

The objects here follow one storyline: for an admissible multi-affine g
(top coefficient 1, small first-order kernel coefficients, diagonalization
roots in a known interval), the variables can be split into r groups so
that every group's restricted polynomial diag(d^{S^c} g) has small roots.
Three routes produce such partitions:

* exhaustive search over all r^n ordered partitions (the desk-scale oracle),
* greedy descent through the interlacing-family tree, and
* the two-stage shift/reflect construction for zero-diagonal kernels,
  which yields r^2 groups with two-sided root bounds.

The certified bound on maxroot(g_r) comes from an n-step barrier iteration
on g^r, optimized over the starting height b.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from . import multiaffine as ma
from . import multidegree as md
from .errors import (
    BudgetExceeded,
    DescentStuck,
    HypothesisViolated,
    MonotonicityViolated,
    NotAboveRoots,
    ParamOutOfRange,
    PoleAtPoint,
)
from .multiaffine import MultiAffinePoly
from .multidegree import MultiDegreePoly
from .univariate import (
    DEFAULT_TOL,
    RealRootedPoly,
    max_abs_root,
    maxroot,
    min_root,
)

PARTITION_BUDGET = 10 ** 6


class Method(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    DESCENT = "descent"
    TWO_STAGE = "two-stage"


@dataclass(frozen=True)
class Partition:
    """Ordered partition of [n] into labelled, possibly empty parts.

    Only nonempty parts are stored explicitly; total_parts >= len(masks)
    implies trailing empty parts (the two-stage construction at large r
    produces mostly empty groups)."""

    n: int
    masks: tuple[int, ...]
    total_parts: Optional[int] = None

    def __post_init__(self):
        total = self.total_parts if self.total_parts is not None else len(self.masks)
        object.__setattr__(self, "masks", tuple(int(m) for m in self.masks))
        object.__setattr__(self, "total_parts", int(total))
        if self.total_parts < len(self.masks):
            raise ParamOutOfRange("total_parts below the explicit part count")
        union = 0
        for m in self.masks:
            if m & union:
                raise ParamOutOfRange("partition parts overlap")
            union |= m
        if union != (1 << self.n) - 1:
            raise ParamOutOfRange("partition does not cover the ground set")

    @property
    def num_parts(self) -> int:
        return self.total_parts

    def part_indices(self) -> list[list[int]]:
        return [ma.indices_of(m) for m in self.masks]


@dataclass(frozen=True)
class PavingParams:
    r: int
    alpha: Optional[float] = None
    lam: Optional[float] = None

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 2:
            raise ParamOutOfRange("r must be an integer >= 2")
        object.__setattr__(self, "r", int(self.r))
        if self.alpha is not None:
            hi = (self.r - 1) ** 2 / self.r ** 2
            if not 0.0 < self.alpha <= hi + 1e-12:
                raise ParamOutOfRange(
                    f"alpha={self.alpha} outside (0, (r-1)^2/r^2 = {hi:.6g}]"
                )
        if self.lam is not None and not self.lam > 0.0:
            raise ParamOutOfRange("lambda must be positive")


@dataclass(frozen=True)
class PavingResult:
    partition: Partition
    per_part_maxroot: tuple[float, ...]
    bound: float
    certified: bool
    method: Method


# --------------------------------------------------------------------------
# closed-form bounds
# --------------------------------------------------------------------------

def lr_bound(r: int, alpha: float) -> float:
    """Paving bound (sqrt(1/r - alpha/(r-1)) + sqrt(alpha))^2."""
    PavingParams(r, alpha=alpha)
    return (math.sqrt(1.0 / r - alpha / (r - 1)) + math.sqrt(alpha)) ** 2


def mss_bound(r: int, alpha: float) -> float:
    """The earlier (sqrt(1/r) + sqrt(alpha))^2 bound, kept for comparison."""
    if r < 2 or alpha <= 0:
        raise ParamOutOfRange("needs r >= 2 and alpha > 0")
    return (math.sqrt(1.0 / r) + math.sqrt(alpha)) ** 2


def zero_diag_bound(r: int, lam: float) -> float:
    """Two-sided root bound for the r^2-part zero-diagonal paving."""
    if int(r) != r or r < 4:
        raise ParamOutOfRange("zero-diagonal paving needs integer r >= 4")
    if lam <= 0:
        raise ParamOutOfRange("lambda must be positive")
    t = (r - 2) / (r * (r - 1))
    return (t + 2.0 * math.sqrt(t)) * lam


def two_stage_stage_bound(r: int, lam: float) -> float:
    """Per-stage maxroot bound (sqrt(2L/r - L/(r-1)) + sqrt(L))^2; the final
    two-sided bound is this minus lam."""
    if int(r) != r or r < 4:
        raise ParamOutOfRange("needs integer r >= 4")
    return (math.sqrt(2.0 * lam / r - lam / (r - 1)) + math.sqrt(lam)) ** 2


def r_for_epsilon(eps: float, lam: float = 1.0) -> int:
    """Smallest integer r >= 4 with zero_diag_bound(r, lam) <= eps."""
    if eps <= 0:
        raise ParamOutOfRange("eps must be positive")
    lo, hi = 4, 8
    if zero_diag_bound(lo, lam) <= eps:
        return lo
    while zero_diag_bound(hi, lam) > eps:
        hi *= 2
        if hi > 10 ** 9:
            raise ParamOutOfRange(f"no feasible r for eps={eps}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if zero_diag_bound(mid, lam) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


# --------------------------------------------------------------------------
# g_S and g_r
# --------------------------------------------------------------------------

def subset_diagonalizations(g: MultiAffinePoly) -> list[np.ndarray]:
    """diag(d^{S^c} g) for every part mask S, ascending coefficients."""
    out = []
    full = (1 << g.n) - 1
    for s in range(1 << g.n):
        out.append(_kernels.ma_diagonalize(ma.partial(g, full ^ s).coeffs, g.n)[: bin(s).count("1") + 1])
    return out


def maxroots_by_mask(g: MultiAffinePoly, tol: float = DEFAULT_TOL) -> np.ndarray:
    """maxroot of diag(d^{S^c} g) per mask; -inf for the empty part."""
    diags = subset_diagonalizations(g)
    out = np.full(1 << g.n, -np.inf)
    for s in range(1, 1 << g.n):
        out[s] = maxroot(RealRootedPoly(diags[s]), tol)
    return out


def g_of_partition(g: MultiAffinePoly, partition: Partition) -> RealRootedPoly:
    """Product over parts of diag(d^{S_i^c} g)."""
    full = (1 << g.n) - 1
    acc = np.ones(1)
    for mask in partition.masks:
        c = _kernels.ma_diagonalize(ma.partial(g, full ^ mask).coeffs, g.n)
        acc = np.convolve(acc, c[: bin(mask).count("1") + 1])
    return RealRootedPoly(acc)


def g_r_bruteforce(g: MultiAffinePoly, r: int, budget: int = PARTITION_BUDGET) -> RealRootedPoly:
    """Sum of g_S over all r^n ordered partitions (labelled parts, empty
    parts allowed)."""
    n = g.n
    total = r ** n
    if total > budget:
        raise BudgetExceeded(f"{total} partitions exceed budget {budget}")
    diags = subset_diagonalizations(g)
    acc = np.zeros(n + 1)
    for code in range(total):
        masks = [0] * r
        c = code
        for i in range(n):
            masks[c % r] |= 1 << i
            c //= r
        term = np.ones(1)
        for m in masks:
            term = np.convolve(term, diags[m])
        acc[: len(term)] += term
    return RealRootedPoly(acc)


def g_r_differential(g: MultiAffinePoly, r: int) -> RealRootedPoly:
    """(1/(r-1)!)^n prod_i d_i^{r-1} applied to g^r, then diagonalized."""
    dense = md.power(md.from_multiaffine(g), r)
    for i in range(g.n):
        dense = md.partial(dense, i, r - 1)
    scale = (1.0 / math.factorial(r - 1)) ** g.n
    return RealRootedPoly(scale * md.diagonalize(dense).coeffs)


# --------------------------------------------------------------------------
# hypotheses
# --------------------------------------------------------------------------

def hypothesis_failures(
    g: MultiAffinePoly,
    alpha: Optional[float] = None,
    zero_diagonal: bool = False,
    root_interval: tuple[float, float] = (0.0, 1.0),
    tol: float = 1e-7,
) -> list[str]:
    """Check the paving preconditions; returns human-readable failures.

    Kernel-style: a_empty = [z_1...z_n] g must be 1, |a_{i}| bounded by
    alpha (or exactly 0 for the zero-diagonal variant), and the roots of
    the diagonalization must lie in root_interval."""
    failures = []
    if abs(g.top_coefficient - 1.0) > tol:
        failures.append(f"top coefficient {g.top_coefficient:.6g} != 1")
    full = (1 << g.n) - 1
    first_order = np.array([g.coeffs[full ^ (1 << i)] for i in range(g.n)])
    if zero_diagonal:
        bad = np.max(np.abs(first_order)) if g.n else 0.0
        if bad > tol:
            failures.append(f"first-order kernel coefficient {bad:.3g} != 0")
    elif alpha is not None:
        bad = np.max(np.abs(first_order)) if g.n else 0.0
        if bad > alpha + tol:
            failures.append(
                f"first-order kernel coefficient {bad:.6g} exceeds alpha={alpha}"
            )
    try:
        from .univariate import roots as _roots

        rts = _roots(ma.diagonalize(g)).roots
        lo, hi = root_interval
        if rts.size and (rts.min() < lo - tol or rts.max() > hi + tol):
            failures.append(
                f"diagonalization roots [{rts.min():.6g}, {rts.max():.6g}] "
                f"leave [{lo}, {hi}]"
            )
    except Exception as err:  # noqa: BLE001 - report, do not mask, root failures
        failures.append(f"diagonalization not certifiably real-rooted: {err}")
    return failures


def _require_hypotheses(g, alpha=None, zero_diagonal=False, root_interval=(0.0, 1.0)):
    failures = hypothesis_failures(
        g, alpha=alpha, zero_diagonal=zero_diagonal, root_interval=root_interval
    )
    if failures:
        raise HypothesisViolated(failures)


def kernel_alpha(g: MultiAffinePoly) -> float:
    """max_i |a_{i}|, the observed first-order coefficient bound."""
    full = (1 << g.n) - 1
    if g.n == 0:
        return 0.0
    return float(max(abs(g.coeffs[full ^ (1 << i)]) for i in range(g.n)))


# --------------------------------------------------------------------------
# exhaustive paving
# --------------------------------------------------------------------------

def _partition_from_code(code: int, n: int, r: int) -> list[int]:
    masks = [0] * r
    for i in range(n):
        masks[code % r] |= 1 << i
        code //= r
    return masks


def make_paving_result(
    g: MultiAffinePoly,
    masks: list[int],
    total_parts: int,
    bound: float,
    method: Method,
    use_abs: bool = False,
    tol: float = DEFAULT_TOL,
) -> PavingResult:
    """Assemble a result, recomputing every per-part root statistic from g
    (nonempty parts only; empty parts contribute -inf)."""
    full = (1 << g.n) - 1
    nonempty = [m for m in masks if m]
    stats = []
    for m in nonempty:
        diag = ma.diagonalize(ma.partial(g, full ^ m))
        stats.append(max_abs_root(diag, tol) if use_abs else maxroot(diag, tol))
    worst = max(stats) if stats else -np.inf
    return PavingResult(
        partition=Partition(g.n, tuple(nonempty), total_parts),
        per_part_maxroot=tuple(stats),
        bound=float(bound),
        certified=bool(worst <= bound + 1e-8),
        method=method,
    )


def exhaustive_paving(
    g: MultiAffinePoly,
    params: PavingParams,
    budget: int = PARTITION_BUDGET,
    tol: float = DEFAULT_TOL,
) -> PavingResult:
    """Scan all r^n ordered partitions and return one minimizing the worst
    per-part maxroot; the minimum must meet the closed-form bound."""
    r = params.r
    alpha = params.alpha if params.alpha is not None else kernel_alpha(g)
    PavingParams(r, alpha=alpha)
    _require_hypotheses(g, alpha=alpha)
    if r ** g.n > budget:
        raise BudgetExceeded(f"{r ** g.n} partitions exceed budget {budget}")
    table = maxroots_by_mask(g, tol)
    code, best = _kernels.partition_best(table, g.n, r)
    bound = lr_bound(r, alpha)
    result = make_paving_result(
        g, _partition_from_code(code, g.n, r), r, bound, Method.EXHAUSTIVE
    )
    if best > bound + 1e-8:
        raise AssertionError(
            f"exhaustive minimum {best:.12g} exceeds the bound {bound:.12g}"
        )
    return result


# --------------------------------------------------------------------------
# interlacing-family tree
# --------------------------------------------------------------------------

def node_polynomial(
    g: MultiAffinePoly, assignment: tuple[int, ...], k: int, r: int
) -> RealRootedPoly:
    """Polynomial attached to the depth-k node whose first k elements are
    assigned by `assignment` (r disjoint masks covering [k]).

    Computed by the operator route: take the product of r copies of g on
    disjoint variable blocks, apply the prefix derivatives d^{[k] \\ S_l} on
    copy l, apply for every unassigned i the sum of the (r-1)-fold
    derivative operators across copies, then diagonalize everything."""
    n = g.n
    if r * n > ma.MAX_VARS:
        raise BudgetExceeded(f"{r} copies of {n} variables exceed {ma.MAX_VARS}")
    if len(assignment) != r:
        raise ParamOutOfRange("assignment needs one mask per part")
    prefix = (1 << k) - 1
    if sum(bin(m & prefix).count("1") for m in assignment) != k:
        raise ParamOutOfRange("assignment must cover exactly [k]")
    prod = ma.disjoint_product([g] * r)
    pre_mask = 0
    for l in range(r):
        missing = prefix & ~assignment[l]
        pre_mask |= _block_mask(missing, l, n)
    work = ma.partial(prod, pre_mask).coeffs
    for i in range(k, n):
        acc = np.zeros_like(work)
        for j in range(r):
            m = 0
            for l in range(r):
                if l != j:
                    m |= 1 << (l * n + i)
            acc += ma.partial(MultiAffinePoly(r * n, work), m).coeffs
        work = acc
    return RealRootedPoly(_kernels.ma_diagonalize(work, r * n))


def _block_mask(mask: int, block: int, n: int) -> int:
    return mask << (block * n)


def interlacing_descent(
    g: MultiAffinePoly,
    params: PavingParams,
    tol: float = DEFAULT_TOL,
    node_check: bool = True,
) -> PavingResult:
    """Walk the interlacing-family tree root-to-leaf, moving at each node to
    a child whose maxroot does not exceed the node's (one exists because the
    children share a common interlacer and sum to the node).

    With node_check, every visited node is verified to equal the sum of its
    children coefficientwise."""
    r = params.r
    alpha = params.alpha if params.alpha is not None else kernel_alpha(g)
    PavingParams(r, alpha=alpha)
    _require_hypotheses(g, alpha=alpha)
    n = g.n
    assignment = [0] * r
    node = node_polynomial(g, tuple(assignment), 0, r)
    root_max = maxroot(node, tol)
    current_max = root_max
    for k in range(n):
        children = []
        for j in range(r):
            trial = list(assignment)
            trial[j] |= 1 << k
            children.append(
                (j, node_polynomial(g, tuple(trial), k + 1, r))
            )
        if node_check:
            total = np.zeros(n + 1)
            for _, ch in children:
                total[: len(ch.coeffs)] += ch.coeffs
            scale = max(1.0, float(np.max(np.abs(node.coeffs))))
            if np.max(np.abs(total[: len(node.coeffs)] - node.coeffs)) > 1e-8 * scale:
                raise MonotonicityViolated(
                    f"node at depth {k} is not the sum of its children"
                )
        viable = []
        for j, ch in children:
            mr = maxroot(ch, tol)
            if mr <= current_max + tol:
                viable.append((mr, j, ch))
        if not viable:
            raise DescentStuck(
                f"no child met the maxroot inequality at depth {k}"
            )
        mr, j, node = min(viable, key=lambda t: t[0])
        assignment[j] |= 1 << k
        current_max = mr
    result = make_paving_result(
        g, assignment, r, root_max, Method.DESCENT
    )
    leaf = g_of_partition(g, Partition(n, tuple(m for m in assignment if m), r))
    if maxroot(leaf, tol) > root_max + 1e-8:
        raise AssertionError("leaf maxroot exceeds the root maxroot")
    return result


# --------------------------------------------------------------------------
# barrier method
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BarrierState:
    p: MultiDegreePoly
    u: np.ndarray
    history: tuple[tuple[int, float], ...] = field(default=())

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64).copy()
        u.flags.writeable = False
        object.__setattr__(self, "u", u)


ABOVE_ROOTS_STRICT = 1e-10


def is_above_roots(p: MultiDegreePoly, u, strict: float = ABOVE_ROOTS_STRICT) -> bool:
    """u above the roots of p, tested along the all-ones direction (the
    hyperbolicity cone argument makes the single direction sufficient).

    Certified root extraction can refuse sections of perfect powers whose
    multiple roots split under rounding; the decision only needs the ray
    t >= 0 to be root-free, so a Sturm distinct-root count over [0, B]
    settles those (counts are reliable away from the clusters)."""
    from .errors import NotRealRooted
    from .univariate import _Chain, STRICT_CHAIN_TOL, cauchy_bound

    sec = md.section(p, u, np.ones(p.n))
    poly = RealRootedPoly(sec)
    if poly.is_zero:
        return False
    if poly.degree == 0:
        return True
    try:
        return maxroot(poly) < -strict
    except NotRealRooted:
        chain = _Chain(poly.coeffs, STRICT_CHAIN_TOL)
        bound = cauchy_bound(poly.coeffs) + 1.0
        return chain.count(-strict, bound) == 0


def barrier_phi(p: MultiDegreePoly, i: int, u) -> float:
    """d_i p(u) / p(u)."""
    val = md.evaluate(p, u)
    if val == 0.0:
        raise PoleAtPoint("polynomial vanishes at the evaluation point")
    return md.evaluate(md.partial(p, i, 1), u) / val


def section_min_root(p: MultiDegreePoly, j: int, u) -> float:
    """Smallest root of the univariate section through u along axis j."""
    out = p
    for i in range(p.n):
        if i != j:
            out = md.restrict_var(out, i, float(u[i]))
    coeffs = np.zeros(p.caps[j] + 1)
    arr = out.coeffs.reshape(out.shape)
    sl = [0] * p.n
    sl[j] = slice(None)
    coeffs[: out.caps[j] + 1] = arr[tuple(sl)]
    return min_root(RealRootedPoly(coeffs))


def barrier_step(
    state: BarrierState,
    j: int,
    r: int,
    assume_nonneg_roots: bool = False,
    tol: float = DEFAULT_TOL,
) -> BarrierState:
    """One barrier move: step down along axis j by
    delta = ((r-1)^2/r) / (Phi_p^j(u) - 1/(u_j - lambda_r)) and replace p by
    d_j^{r-1} p.  With assume_nonneg_roots the section roots are known
    nonnegative and the denominator uses u_j itself.

    Verifies afterwards that the point stays above the roots and that no
    barrier value increased."""
    p, u = state.p, state.u
    phi_before = [barrier_phi(p, i, u) for i in range(p.n)]
    lam_r = 0.0 if assume_nonneg_roots else section_min_root(p, j, u)
    denom = phi_before[j] - 1.0 / (u[j] - lam_r)
    if denom <= 0.0:
        raise NotAboveRoots(
            f"barrier denominator {denom:.3g} nonpositive along axis {j}"
        )
    delta = ((r - 1) ** 2 / r) / denom
    new_p = md.partial(p, j, r - 1)
    new_u = u.copy()
    new_u[j] -= delta
    if not is_above_roots(new_p, new_u):
        raise NotAboveRoots(f"stepped point left the above-roots region (axis {j})")
    for i in range(p.n):
        after = barrier_phi(new_p, i, new_u)
        if after > phi_before[i] + tol:
            raise MonotonicityViolated(
                f"barrier value along {i} rose from {phi_before[i]:.9g} to {after:.9g}"
            )
    return BarrierState(new_p, new_u, state.history + ((j, float(delta)),))


def analytic_barrier_delta(b: float, r: int, alpha: float) -> float:
    """Uniform per-step displacement implied by the barrier upper bound
    r (alpha/(b-1) + (1-alpha)/b) at the starting point b."""
    denom = r * (alpha / (b - 1.0) + (1.0 - alpha) / b) - 1.0 / b
    if denom <= 0.0:
        raise ParamOutOfRange(f"no positive analytic step at b={b}")
    return ((r - 1) ** 2 / r) / denom


@dataclass(frozen=True)
class BarrierRun:
    b: float
    deltas: tuple[float, ...]
    bound: float


def run_barrier(g: MultiAffinePoly, r: int, b: float,
                check_analytic: bool = True) -> BarrierRun:
    """Full n-step barrier iteration on g^r from b * ones; the certified
    bound for this b is b minus the smallest step."""
    n = g.n
    alpha = kernel_alpha(g)
    state = BarrierState(md.power(md.from_multiaffine(g), r), np.full(n, float(b)))
    # Ab_{g^r} = Ab_g, and the multi-affine section has simple roots where
    # the r-th power's section does not
    if not is_above_roots(md.from_multiaffine(g), state.u):
        raise NotAboveRoots(f"b={b} does not start above the roots of g^r")
    floor = analytic_barrier_delta(b, r, alpha) if check_analytic else None
    for j in range(n):
        state = barrier_step(state, j, r, assume_nonneg_roots=True)
        delta = state.history[-1][1]
        if floor is not None and delta < floor - 1e-9:
            raise MonotonicityViolated(
                f"step {j} fell below the analytic floor: {delta:.9g} < {floor:.9g}"
            )
    deltas = tuple(d for _, d in state.history)
    return BarrierRun(b=float(b), deltas=deltas, bound=float(b - min(deltas)))


def certified_maxroot_bound(
    g: MultiAffinePoly,
    r: int,
    b_grid=None,
    refine: bool = True,
    details: bool = False,
):
    """min over b of the barrier bound for maxroot(g_r).

    The grid is logarithmic in (1, 4] and a golden-section pass sharpens the
    best bracket; every run keeps the above-roots and monotonicity checks
    on."""
    alpha = kernel_alpha(g)
    _require_hypotheses(g, alpha=alpha)
    PavingParams(r, alpha=alpha)
    if b_grid is None:
        b_grid = 1.0 + np.geomspace(1e-6, 3.0, 200)
    runs = [run_barrier(g, r, float(b)) for b in b_grid]
    best_idx = int(np.argmin([run.bound for run in runs]))
    best = runs[best_idx]
    if refine:
        lo = b_grid[max(best_idx - 1, 0)]
        hi = b_grid[min(best_idx + 1, len(b_grid) - 1)]
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = float(lo), float(hi)
        c = b - phi * (b - a)
        d = a + phi * (b - a)
        fc = run_barrier(g, r, c)
        fd = run_barrier(g, r, d)
        for _ in range(40):
            if fc.bound < fd.bound:
                b, d, fd = d, c, fc
                c = b - phi * (b - a)
                fc = run_barrier(g, r, c)
            else:
                a, c, fc = c, d, fd
                d = a + phi * (b - a)
                fd = run_barrier(g, r, d)
            if b - a < 1e-9:
                break
        final = min((fc, fd, best), key=lambda run: run.bound)
    else:
        final = best
    alpha_eff = min(max(alpha, 1e-12), (r - 1) ** 2 / r ** 2)
    cap = lr_bound(r, alpha_eff) + 2e-3
    if final.bound > cap:
        raise AssertionError(
            f"certified bound {final.bound:.9g} exceeds the closed form "
            f"{cap:.9g} beyond grid slack"
        )
    g_r_max = maxroot(g_r_differential(g, r))
    if final.bound < g_r_max - 1e-8:
        raise AssertionError(
            f"certified bound {final.bound:.9g} fell below maxroot(g_r) "
            f"= {g_r_max:.9g}"
        )
    if details:
        return final.bound, final, runs
    return final.bound


# --------------------------------------------------------------------------
# zero-diagonal two-stage paving
# --------------------------------------------------------------------------

def _pave_stage(g: MultiAffinePoly, r: int, lam: float,
                budget: int, tol: float) -> list[int]:
    """One shift-and-pave stage: partition the variables of g into r groups
    with maxroot(diag d^{S^c} g(z - lam)) below the stage bound.

    With r >= n singleton groups meet the bound outright, so enumeration is
    skipped (the bound strictly exceeds lam, and a singleton's shifted
    restriction is exactly z - lam when first-order coefficients vanish)."""
    n = g.n
    bound = two_stage_stage_bound(r, lam)
    h = ma.shift_poly(g, np.full(n, -lam))
    if n == 0:
        return [0] * r
    if r >= n:
        masks = [1 << i for i in range(n)] + [0] * (r - n)
    else:
        if r ** n > budget:
            raise BudgetExceeded(f"{r ** n} partitions exceed budget {budget}")
        table = maxroots_by_mask(h, tol)
        code, _ = _kernels.partition_best(table, n, r)
        masks = _partition_from_code(code, n, r)
    full = (1 << n) - 1
    for m in masks:
        if m and maxroot(ma.diagonalize(ma.partial(h, full ^ m)), tol) > bound + 1e-8:
            raise AssertionError(
                f"stage paving failed the bound {bound:.9g} on part {m:b}"
            )
    return masks


def two_stage_paving(
    g: MultiAffinePoly,
    r: int,
    lam: float,
    budget: int = PARTITION_BUDGET,
    tol: float = DEFAULT_TOL,
) -> PavingResult:
    """r^2-part paving of a zero-diagonal kernel with two-sided root bounds.

    Stage one paves g(z - lam) to push every group's roots into
    [-lam, bound - lam]; each group is then reflected and shift-paved again,
    and interlacing of derivative restrictions turns the one-sided bounds
    into |roots| <= zero_diag_bound(r, lam)."""
    if int(r) != r or r < 4:
        raise ParamOutOfRange("two-stage paving needs integer r >= 4")
    _require_hypotheses(g, zero_diagonal=True, root_interval=(-lam, lam))
    stage1 = _pave_stage(g, r, lam, budget, tol)
    full = (1 << g.n) - 1
    final_masks: list[int] = []
    for m in stage1:
        if not m:
            continue
        block = ma.restrict_to_block(ma.partial(g, full ^ m), m)
        reflected = ma.reflect(block)
        sub = _pave_stage(reflected, r, lam, budget, tol)
        final_masks.extend(
            ma.expand_mask(sm, m) for sm in sub if sm
        )
    bound = zero_diag_bound(r, lam)
    result = make_paving_result(
        g, final_masks, r * r, bound, Method.TWO_STAGE, use_abs=True, tol=tol
    )
    if result.per_part_maxroot and max(result.per_part_maxroot) > bound + 1e-8:
        raise AssertionError(
            f"two-stage paving exceeded {bound:.9g}: "
            f"{max(result.per_part_maxroot):.9g}"
        )
    return result


# --------------------------------------------------------------------------
# matrix specialization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixPavingReport:
    result: PavingResult
    operator_norms: tuple[float, ...]


def matrix_paving(
    K,
    params: PavingParams,
    method: Method = Method.EXHAUSTIVE,
    tol: float = DEFAULT_TOL,
) -> MatrixPavingReport:
    """Pave the multivariate characteristic polynomial of a PSD contraction
    and reconcile each part's maxroot with the submatrix operator norm."""
    M = ma.validate_symmetric(K)
    n = M.shape[0]
    eigs = np.linalg.eigvalsh(M)
    if eigs.min() < -1e-10 or eigs.max() > 1.0 + 1e-10:
        raise HypothesisViolated(["matrix is not a PSD contraction"])
    alpha = params.alpha if params.alpha is not None else float(np.max(np.diag(M)))
    if np.max(np.diag(M)) > alpha + 1e-12:
        raise HypothesisViolated(
            [f"diagonal entry {np.max(np.diag(M)):.6g} exceeds alpha={alpha}"]
        )
    g = ma.char_poly_matrix(M)
    sub_params = PavingParams(params.r, alpha=alpha)
    if method is Method.EXHAUSTIVE:
        result = exhaustive_paving(g, sub_params, tol=tol)
    elif method is Method.DESCENT:
        result = interlacing_descent(g, sub_params, tol=tol)
    else:
        raise ParamOutOfRange("matrix paving supports exhaustive or descent")
    norms = []
    for mask, mr in zip(result.partition.masks, result.per_part_maxroot):
        idx = ma.indices_of(mask)
        norm = float(np.linalg.eigvalsh(M[np.ix_(idx, idx)]).max())
        if abs(norm - mr) > 1e-8:
            raise AssertionError(
                f"operator norm {norm:.12g} disagrees with maxroot {mr:.12g}"
            )
        norms.append(norm)
    return MatrixPavingReport(result=result, operator_norms=tuple(norms))
