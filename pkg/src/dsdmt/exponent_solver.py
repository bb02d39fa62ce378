"""Outage-exponent minimization: the independent route to the tradeoff.

The tradeoff d(r) equals the infimum of the exponent

    eps(alpha, beta) = sum a_i alpha_i + sum b_j beta_j + sum (alpha_i - beta_j)^+

over the outage set {sum (1 - alpha_i)^+ <= r} with both exponent vectors
non-decreasing and alpha_i >= beta_i >= 0 on the coupled range.  (alpha are
the eigenvalue exponents of the product channel's Gram matrix, beta those of
the scatterer-side Wishart layer; the outage set is taken closed -- the
infimum over the open set is the same and a closed set is LP-representable.)

Two solvers are provided and must agree exactly:

* :func:`solve_lp` -- the exact rational linear program, via the internal
  two-phase simplex.  This is the ground-truth oracle.
* :func:`greedy_reduce` + :func:`minimize_threshold` -- the "beta passes
  alpha" elimination: walking each beta leftward through the alpha chain
  while its running coefficient stays positive turns the objective into a
  plain weighted sum of alphas, which a threshold argument then minimizes.

Coefficient layout depends on how the channel dimensions (m, n, l) compare
(after enforcing n <= m by reciprocity):

* case A, n >= l:      alpha and beta both have l components;
* case B, n < l <= m:  alpha has n components, beta has l;
* case C, n <= m < l:  as case B with l and m interchanged (the scatterer
  layer is rank deficient, so beta has m components).

In every case a_i = n - i + 1, and b_j = l + m - n - j for j <= n + 1 with
the slope doubling to b_j = l + m + 1 - 2j beyond (indices 1-based here;
the code stores 0-based tuples).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import _simplex

__all__ = [
    "CaseId",
    "ExponentProgram",
    "ReducedObjective",
    "LpSolution",
    "ReductionInvariantError",
    "classify_case",
    "build_program",
    "solve_lp",
    "greedy_reduce",
    "minimize_threshold",
    "dmt_via_lp",
    "dmt_via_greedy",
]


class CaseId(Enum):
    A = "min(m,n) >= l"
    B = "n < l <= m"
    C = "n <= m < l"


class ReductionInvariantError(RuntimeError):
    """The greedy elimination produced coefficients that are not
    non-negative and non-increasing; signals a bookkeeping bug."""


def classify_case(m: int, n: int, l: int) -> CaseId:
    """Classify (m, n, l) with n <= m already enforced by the caller."""
    if min(m, n, l) < 1:
        raise ValueError(f"dimensions must be positive, got ({m}, {n}, {l})")
    if n > m:
        raise ValueError(f"reciprocity not applied: n={n} > m={m}")
    if n >= l:
        return CaseId.A
    if l <= m:
        return CaseId.B
    return CaseId.C


@dataclass(frozen=True)
class ExponentProgram:
    """Exact encoding of the exponent minimization for one (m, n, l, r).

    Index pairs in ``plus_pairs`` are 0-based: (i, j) contributes
    (alpha_i - beta_j)^+ to the objective, and alpha_i >= beta_i is enforced
    for i < couple_range.
    """

    m: int
    n: int
    l: int
    case: CaseId
    alpha_dim: int
    beta_dim: int
    alpha_coeffs: tuple[int, ...]
    beta_coeffs: tuple[int, ...]
    plus_pairs: frozenset[tuple[int, int]]
    couple_range: int
    r: Fraction

    def __post_init__(self):
        if self.alpha_dim != min(self.m, self.n, self.l):
            raise ValueError(
                f"alpha_dim {self.alpha_dim} != min(m,n,l) = {min(self.m, self.n, self.l)}"
            )
        if len(self.alpha_coeffs) != self.alpha_dim or len(self.beta_coeffs) != self.beta_dim:
            raise ValueError("coefficient lengths do not match the declared dimensions")
        if any(b < 0 for b in self.beta_coeffs) or any(a <= 0 for a in self.alpha_coeffs):
            raise ValueError("coefficients out of range")
        for i, j in self.plus_pairs:
            if not (0 <= i < j < self.beta_dim and i < self.alpha_dim):
                raise ValueError(f"bad plus pair ({i}, {j})")
        if not 0 <= self.couple_range <= min(self.alpha_dim, self.beta_dim):
            raise ValueError(f"bad couple_range {self.couple_range}")


def build_program(m: int, n: int, l: int, r) -> ExponentProgram:
    """Build the exact exponent program for (m, n, l) at multiplexing gain r."""
    case = classify_case(m, n, l)
    if case is CaseId.A:
        alpha_dim, beta_dim = l, l
    elif case is CaseId.B:
        alpha_dim, beta_dim = n, l
    else:
        alpha_dim, beta_dim = n, m
    # b_j below is written for cases B/C; in case A every j satisfies
    # j <= l <= n + 1, so the same first branch reproduces m - n + l - j.
    s = l + m
    alpha_coeffs = tuple(n - i for i in range(alpha_dim))
    beta_coeffs = tuple(
        s - n - (j + 1) if (j + 1) <= n + 1 else s + 1 - 2 * (j + 1)
        for j in range(beta_dim)
    )
    pairs = frozenset(
        (i, j) for i in range(alpha_dim) for j in range(i + 1, beta_dim)
    )
    return ExponentProgram(
        m=m,
        n=n,
        l=l,
        case=case,
        alpha_dim=alpha_dim,
        beta_dim=beta_dim,
        alpha_coeffs=alpha_coeffs,
        beta_coeffs=beta_coeffs,
        plus_pairs=pairs,
        couple_range=alpha_dim,
        r=Fraction(r),
    )


@dataclass(frozen=True)
class LpSolution:
    value: Fraction
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]


def solve_lp(p: ExponentProgram) -> LpSolution:
    """Exact optimum of the exponent program; value equals d(r).

    Variables are x = [alpha, beta, t (one per plus pair), s (one per alpha)]
    with t_ij >= (alpha_i - beta_j) and s_i >= (1 - alpha_i) relaxed upward,
    so minimization pins them to the plus parts.
    """
    if p.r < 0:
        raise ValueError(f"r must be nonnegative, got {p.r}")
    na, nb = p.alpha_dim, p.beta_dim
    pairs = sorted(p.plus_pairs)
    npair = len(pairs)
    nvar = na + nb + npair + na
    ofs_b, ofs_t, ofs_s = na, na + nb, na + nb + npair

    c = list(p.alpha_coeffs) + list(p.beta_coeffs) + [1] * npair + [0] * na
    rows, rhs = [], []

    def add(coeffs, bound):
        row = [0] * nvar
        for idx, v in coeffs:
            row[idx] += v
        rows.append(row)
        rhs.append(bound)

    for k, (i, j) in enumerate(pairs):  # alpha_i - beta_j - t_ij <= 0
        add([(i, 1), (ofs_b + j, -1), (ofs_t + k, -1)], 0)
    add([(ofs_s + i, 1) for i in range(na)], p.r)  # sum s_i <= r
    for i in range(na):  # 1 - alpha_i - s_i <= 0
        add([(i, -1), (ofs_s + i, -1)], -1)
    for i in range(na - 1):  # alpha chain
        add([(i, 1), (i + 1, -1)], 0)
    for j in range(nb - 1):  # beta chain
        add([(ofs_b + j, 1), (ofs_b + j + 1, -1)], 0)
    for i in range(p.couple_range):  # beta_i <= alpha_i
        add([(ofs_b + i, 1), (i, -1)], 0)

    try:
        value, x = _simplex.solve_min(c, rows, rhs)
    except _simplex.Infeasible as exc:  # impossible for r >= 0
        raise RuntimeError(f"exponent LP unexpectedly infeasible: {exc}") from exc
    return LpSolution(
        value=value,
        alpha=tuple(x[:na]),
        beta=tuple(x[ofs_b : ofs_b + nb]),
    )


@dataclass(frozen=True)
class ReducedObjective:
    """Alpha coefficients after the betas have been optimally eliminated."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.coeffs):
            raise ReductionInvariantError(f"negative reduced coefficient: {self.coeffs}")
        if any(a < b for a, b in zip(self.coeffs, self.coeffs[1:])):
            raise ReductionInvariantError(f"coefficients not non-increasing: {self.coeffs}")


def greedy_reduce(p: ExponentProgram) -> ReducedObjective:
    """Eliminate the betas by the leftward-passing procedure.

    Starting from the interleaved chain 0 <= beta_1 = alpha_1 <= ... every
    beta_j walks left past alpha_{j-1}, alpha_{j-2}, ... while its running
    coefficient (initially b_j, down 1 per pass) is still positive and a
    plus pair (i, j) exists; each pass adds 1 to that alpha's coefficient.
    A beta whose coefficient is still positive after all passes drops to 0;
    one whose coefficient hits 0 parks where it is.  The decrements are
    counted explicitly rather than taken from any closed-form final value.
    """
    passes = [0] * p.alpha_dim
    for j in range(p.beta_dim):
        coeff = p.beta_coeffs[j]
        for i in sorted((i for i, jj in p.plus_pairs if jj == j), reverse=True):
            if coeff <= 0:
                break
            passes[i] += 1
            coeff -= 1
    return ReducedObjective(
        tuple(a + extra for a, extra in zip(p.alpha_coeffs, passes))
    )


def minimize_threshold(ro: ReducedObjective, r) -> Fraction:
    """Minimize sum coeffs_i * alpha_i over the outage set, coefficients sorted.

    With non-increasing coefficients the optimum zeroes the first floor(r)
    alphas, puts the next at 1 - frac(r), and pins the rest at 1.
    """
    r = Fraction(r)
    dim = len(ro.coeffs)
    if not 0 <= r <= dim:
        raise ValueError(f"r must lie in [0, {dim}], got {r}")
    k = int(r)
    frac = r - k
    value = Fraction(sum(ro.coeffs[k + 1 :]))
    if k < dim:
        value += ro.coeffs[k] * (1 - frac)
    return value


def _apply_reciprocity(m: int, n: int, l: int) -> tuple[int, int, int]:
    if min(m, n, l) < 1:
        raise ValueError(f"dimensions must be positive, got ({m}, {n}, {l})")
    return (n, m, l) if n > m else (m, n, l)


def dmt_via_lp(m: int, n: int, l: int, r) -> Fraction:
    """d(r) by the exact linear program, for any role order of (m, n, l)."""
    m, n, l = _apply_reciprocity(m, n, l)
    r = Fraction(r)
    if not 0 <= r <= min(m, n, l):
        raise ValueError(f"r must lie in [0, {min(m, n, l)}], got {r}")
    return solve_lp(build_program(m, n, l, r)).value


def dmt_via_greedy(m: int, n: int, l: int, r) -> Fraction:
    """d(r) by greedy beta elimination plus threshold minimization."""
    m, n, l = _apply_reciprocity(m, n, l)
    r = Fraction(r)
    if not 0 <= r <= min(m, n, l):
        raise ValueError(f"r must lie in [0, {min(m, n, l)}], got {r}")
    return minimize_threshold(greedy_reduce(build_program(m, n, l, r)), r)
