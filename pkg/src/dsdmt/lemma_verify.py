"""Numerical corroboration of the random-matrix facts behind the tradeoff.

Two families of checks:

* exact finite-matrix inequalities (singular values of products, and the
  sandwich sigma_i(M) sigma_min(T) <= sigma_i(TM) <= sigma_i(M) sigma_max(T)),
  verified with a small relative slack against double-precision SVD error;
* high-SNR determinant asymptotics, where the determinants cancel
  catastrophically by construction.  These run in mpmath arbitrary
  precision; the measured exponent is the least-squares slope of
  log(quantity) against log(SNR) over the top half of the grid, the bottom
  half being discarded as pre-asymptotic.

A computed determinant whose magnitude falls within ~12 digits of the
working precision floor (relative to the matrix scale) raises
PrecisionLossError instead of returning garbage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from mpmath import mp, mpf

from .randmat import complex_gaussian, singular_values

__all__ = [
    "PrecisionLossError",
    "ExponentPair",
    "AsymptoticFit",
    "CheckReport",
    "check_lemma4",
    "check_prop1",
    "check_lemma1_exponent",
    "check_lemma2_exponent",
    "check_lemma3_limit",
    "lemma1_predicted_exponent",
    "lemma2_predicted_exponent",
    "lemma4_suite",
    "prop1_suite",
    "lemma1_suite",
    "lemma2_suite",
    "lemma3_suite",
]

INEQ_SLACK = 1e-9
COND_LIMIT = 1e8
_GUARD_DIGITS = 12


class PrecisionLossError(RuntimeError):
    """Cancellation ate the working precision; re-run with more digits."""


@dataclass(frozen=True)
class ExponentPair:
    """Ordered exponent vectors with beta_i >= 0 and alpha_i >= beta_i."""

    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        a, b = self.alpha, self.beta
        if len(a) != len(b):
            raise ValueError(f"alpha and beta must have equal length, got {len(a)} vs {len(b)}")
        if any(x > y for x, y in zip(a, a[1:])) or any(x > y for x, y in zip(b, b[1:])):
            raise ValueError("alpha and beta must be non-decreasing")
        if any(x < 0 for x in b):
            raise ValueError("beta must be nonnegative")
        if any(x < y for x, y in zip(a, b)):
            raise ValueError("alpha_i >= beta_i required")


@dataclass(frozen=True)
class AsymptoticFit:
    snr_points: tuple[float, ...]
    measured_exponent: float
    predicted_exponent: float
    residual: float

    def __post_init__(self):
        pts = self.snr_points
        if len(pts) < 4 or any(x >= y for x, y in zip(pts, pts[1:])):
            raise ValueError("need at least 4 ascending SNR points")


@dataclass
class CheckReport:
    check: str
    cases: int
    violations: list = field(default_factory=list)
    worst_residual: float = 0.0
    precision_digits: int | None = None
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return self.skipped is None and not self.violations

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "cases": self.cases,
            "violations": self.violations,
            "worst_residual": self.worst_residual,
            "precision_digits": self.precision_digits,
            "skipped": self.skipped,
        }


def _condition_number(mat) -> float:
    sv = singular_values(mat).values
    return float("inf") if sv[-1] == 0 else float(sv[0] / sv[-1])


def check_lemma4(a, b, rel_slack: float = INEQ_SLACK) -> CheckReport:
    """sigma_{i+j-1}(AB) <= sigma_i(A) sigma_j(B) and the eta counterpart."""
    a = np.asarray(a)
    b = np.asarray(b)
    m = a.shape[0]
    if a.shape != (m, m) or b.shape != (m, m):
        raise ValueError(f"need square matrices of equal size, got {a.shape} and {b.shape}")
    report = CheckReport(check="lemma4", cases=0)
    if max(_condition_number(a), _condition_number(b)) > COND_LIMIT:
        report.skipped = f"condition number above {COND_LIMIT:.0e}"
        return report
    sa = singular_values(a).values
    sb = singular_values(b).values
    sab = singular_values(a @ b)
    desc, asc = sab.values, sab.ascending()
    ea, eb = sa[::-1], sb[::-1]
    for i in range(1, m + 1):
        for j in range(1, m + 2 - i):
            report.cases += 2
            hi = sa[i - 1] * sb[j - 1]
            lo = ea[i - 1] * eb[j - 1]
            rel_up = float(desc[i + j - 2] / hi - 1.0)
            rel_dn = float(1.0 - asc[i + j - 2] / lo)
            report.worst_residual = max(report.worst_residual, rel_up, rel_dn)
            if rel_up > rel_slack:
                report.violations.append(
                    {"kind": "upper", "i": i, "j": j, "lhs": float(desc[i + j - 2]), "rhs": float(hi)}
                )
            if rel_dn > rel_slack:
                report.violations.append(
                    {"kind": "lower", "i": i, "j": j, "lhs": float(asc[i + j - 2]), "rhs": float(lo)}
                )
    return report


def check_prop1(m_mat, t_mat, rel_slack: float = INEQ_SLACK) -> CheckReport:
    """sigma_i(M) sigma_min(T) <= sigma_i(TM) <= sigma_i(M) sigma_max(T)."""
    m_mat = np.asarray(m_mat)
    t_mat = np.asarray(t_mat)
    if t_mat.shape[0] != t_mat.shape[1] or t_mat.shape[1] != m_mat.shape[0]:
        raise ValueError(f"T must be square and conformable with M, got {t_mat.shape}, {m_mat.shape}")
    report = CheckReport(check="prop1", cases=0)
    if _condition_number(t_mat) > COND_LIMIT:
        report.skipped = f"T condition number above {COND_LIMIT:.0e}"
        return report
    st = singular_values(t_mat).values
    sm = singular_values(m_mat).values
    stm = singular_values(t_mat @ m_mat).values
    for i, (s, s_prod) in enumerate(zip(sm, stm), start=1):
        report.cases += 1
        lo, hi = s * st[-1], s * st[0]
        rel = max(float(lo / s_prod - 1.0), float(s_prod / hi - 1.0))
        report.worst_residual = max(report.worst_residual, rel)
        if rel > rel_slack:
            report.violations.append({"i": i, "lhs": float(lo), "mid": float(s_prod), "rhs": float(hi)})
    return report


def _fit_top_half(snrs, logvals) -> tuple[tuple[float, ...], float]:
    """LS slope of log(value)/log(SNR) over the top half of the grid."""
    half = len(snrs) // 2
    xs = np.log10(np.asarray(snrs[half:], dtype=float))
    ys = np.array([float(v) / mp.log(10) for v in logvals[half:]], dtype=float)
    slope = np.polyfit(xs, ys, 1)[0]
    return tuple(float(s) for s in snrs[half:]), float(slope)


def _guarded_logabsdet(mat, digits: int):
    """log |det| in mpmath, guarding against cancellation past the budget."""
    det = mp.det(mat)
    scale = mpf(1)
    rows = mat.rows
    for i in range(rows):
        scale *= max(abs(mat[i, j]) for j in range(mat.cols))
    floor = scale * mpf(10) ** (-(digits - _GUARD_DIGITS))
    if det == 0 or abs(det) < floor:
        raise PrecisionLossError(
            f"|det| = {mp.nstr(abs(det), 5)} below the cancellation floor "
            f"{mp.nstr(floor, 5)} at {digits} digits; increase the precision"
        )
    return mp.log(abs(det))


def _default_snr_grid() -> tuple[float, ...]:
    return tuple(10.0**k for k in range(4, 13))


def lemma1_predicted_exponent(ep: ExponentPair) -> float:
    """-sum over i < j of (alpha_i - beta_j)^+."""
    return -sum(
        max(ep.alpha[i] - ep.beta[j], 0.0)
        for i in range(len(ep.alpha))
        for j in range(i + 1, len(ep.beta))
    )


def check_lemma1_exponent(ep: ExponentPair, snr_grid=None, digits: int = 60) -> AsymptoticFit:
    """Exponent of |det exp(-SNR^-(alpha_j - beta_i))| against its prediction."""
    snrs = tuple(float(s) for s in (snr_grid or _default_snr_grid()))
    l = len(ep.alpha)
    if l > 3:
        raise ValueError(f"determinant evaluation is sized for l <= 3, got l = {l}")
    if any(a <= b for a, b in zip(ep.alpha, ep.beta)):
        raise ValueError("strict alpha_i > beta_i required so the exp factor tends to 1")
    if len(snrs) < 8 or snrs[-1] / snrs[0] < 1e8:
        raise ValueError("snr grid must span at least 8 decades with 8+ points")
    logs = []
    with mp.workdps(digits):
        for snr in snrs:
            s = mpf(snr)
            mat = mp.matrix(l, l)
            for i in range(l):
                for j in range(l):
                    mat[i, j] = mp.exp(-(s ** (-(ep.alpha[j] - ep.beta[i]))))
            logs.append(_guarded_logabsdet(mat, digits))
        top, measured = _fit_top_half(snrs, logs)
    predicted = lemma1_predicted_exponent(ep)
    return AsymptoticFit(
        snr_points=top,
        measured_exponent=measured,
        predicted_exponent=predicted,
        residual=abs(measured - predicted),
    )


def _xi_mp(mu, lam):
    """mpmath version of the mixed power/exponential matrix (rows follow mu)."""
    p, n = len(mu), len(lam)
    mat = mp.matrix(p, p)
    for i in range(p):
        for e in range(p - n):
            mat[i, e] = mu[i] ** e
        pref = mu[i] ** (p - n - 1)
        for j in range(n):
            mat[i, p - n + j] = pref * mp.exp(-lam[j] / mu[i])
    return mat


def lemma2_predicted_exponent(beta, alpha, l: int, n: int) -> float:
    """Exponent of |det Xi| under mu_i = SNR^-beta_i, lam_j = SNR^-alpha_j.

    Read off the factorized asymptotics: the power columns contribute
    (l-n-1) beta_i for i <= n+1 and (l-i) beta_i beyond, the residual
    exponential blocks contribute every (alpha_i - beta_j)^+ with j > i.
    """
    total = (l - n - 1) * sum(beta[: n + 1])
    total += sum((l - (i + 1)) * beta[i] for i in range(n + 1, l))
    total += sum(
        max(alpha[i] - beta[j], 0.0) for i in range(n) for j in range(n, l)
    )
    total += sum(
        max(alpha[i] - beta[j], 0.0) for i in range(n) for j in range(i + 1, n)
    )
    return -total


def check_lemma2_exponent(mu_exponents, lambda_exponents, dims, snr_grid=None,
                          digits: int = 60) -> AsymptoticFit:
    """Exponent of |det Xi| for the n < l <= m regime against its prediction."""
    m, n, l = dims
    if not n < l <= m:
        raise ValueError(f"need n < l <= m, got (m, n, l) = {dims}")
    if l > 3:
        raise ValueError(f"determinant evaluation is sized for l <= 3, got l = {l}")
    beta = tuple(float(b) for b in mu_exponents)
    alpha = tuple(float(a) for a in lambda_exponents)
    if len(beta) != l or len(alpha) != n:
        raise ValueError(f"expected {l} mu exponents and {n} lambda exponents")
    if any(x > y for x, y in zip(beta, beta[1:])) or any(x > y for x, y in zip(alpha, alpha[1:])):
        raise ValueError("exponent vectors must be non-decreasing")
    if any(alpha[i] <= beta[i] for i in range(n)):
        raise ValueError("strict alpha_i > beta_i required on the coupled range")
    snrs = tuple(float(s) for s in (snr_grid or _default_snr_grid()))
    logs = []
    with mp.workdps(digits):
        for snr in snrs:
            s = mpf(snr)
            mu = [s ** (-b) for b in beta]
            lam = [s ** (-a) for a in alpha]
            logs.append(_guarded_logabsdet(_xi_mp(mu, lam), digits))
        top, measured = _fit_top_half(snrs, logs)
    predicted = lemma2_predicted_exponent(beta, alpha, l, n)
    return AsymptoticFit(
        snr_points=top,
        measured_exponent=measured,
        predicted_exponent=predicted,
        residual=abs(measured - predicted),
    )


_EPS_MULTIPLIERS = (1.0, 0.6, 0.35, 0.2)


def check_lemma3_limit(mu_positive, lam, dims, eps_grid, digits: int = 60) -> dict:
    """Rank-deficient limit: det(Xi)/Vandermonde(mu) with m - l trailing
    eigenvalues at eps * (distinct multipliers) must approach the reduced
    l-row expression as eps -> 0.

    Returns a report with the ratio per eps and the fitted convergence order.
    """
    m, n, l = dims
    if not (l >= n and m > l):
        raise ValueError(f"need l >= n and m > l, got (m, n, l) = {dims}")
    mu_pos = [float(v) for v in mu_positive]
    lam = [float(v) for v in lam]
    if len(mu_pos) != l or len(lam) != n:
        raise ValueError(f"expected {l} positive eigenvalues and {n} lambdas")
    eps_grid = [float(e) for e in eps_grid]
    if any(a <= b for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps grid must be strictly descending")
    if m - l > len(_EPS_MULTIPLIERS):
        raise ValueError(f"at most {len(_EPS_MULTIPLIERS)} trailing eigenvalues supported")
    if max(eps_grid) >= min(mu_pos):
        raise ValueError("eps must stay below the smallest positive eigenvalue")

    ratios = []
    with mp.workdps(digits):
        mu_l = [mpf(v) for v in mu_pos]
        lam_mp = [mpf(v) for v in lam]
        log_rhs = _guarded_logabsdet(_xi_mp(mu_l, lam_mp), digits) - _log_vdm(mu_l)
        for eps in eps_grid:
            tail = [mpf(eps) * mpf(c) for c in _EPS_MULTIPLIERS[: m - l]]
            mu_full = mu_l + tail
            log_lhs = _guarded_logabsdet(_xi_mp(mu_full, lam_mp), digits) - _log_vdm(mu_full)
            ratios.append(float(mp.exp(log_lhs - log_rhs)))
    errors = [abs(rho - 1.0) for rho in ratios]
    if len(eps_grid) >= 2 and all(e > 0 for e in errors):
        order = float(np.polyfit(np.log(eps_grid), np.log(errors), 1)[0])
    else:
        order = float("nan")
    return {
        "check": "lemma3",
        "dims": {"m": m, "n": n, "l": l},
        "eps": eps_grid,
        "ratios": ratios,
        "errors": errors,
        "monotone_decreasing": all(a > b for a, b in zip(errors, errors[1:])),
        "convergence_order": order,
        "precision_digits": digits,
    }


def _log_vdm(vals):
    total = mpf(0)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            total += mp.log(abs(vals[i] - vals[j]))
    return total


# ---------------------------------------------------------------------------
# Suites: the configured case lists run by `dmt verify` and the acceptance
# tests.

LEMMA1_CASES = {
    "l1-trivial": ExponentPair(alpha=(0.5,), beta=(0.2,)),
    "l2-standard": ExponentPair(alpha=(0.5, 0.9), beta=(0.1, 0.3)),
    "l2-zero": ExponentPair(alpha=(0.2, 0.9), beta=(0.1, 0.3)),
    "l2-hard": ExponentPair(alpha=(2.5, 3.0), beta=(0.1, 0.2)),
    "l3-mixed": ExponentPair(alpha=(0.5, 0.9, 1.3), beta=(0.1, 0.3, 0.6)),
}

LEMMA2_CASES = {
    "m2n1l2": ((2, 1, 2), (0.1, 0.2), (0.5,)),
    "m3n1l2": ((3, 1, 2), (0.1, 0.2), (0.5,)),
    "m3n1l3": ((3, 1, 3), (0.1, 0.2, 0.4), (0.6,)),
    "m3n2l3": ((3, 2, 3), (0.05, 0.15, 0.4), (0.5, 0.8)),
}

LEMMA3_CASES = {
    "m2l1n1": ((2, 1, 1), (1.0,), (1.3,)),
    "m3l2n1": ((3, 1, 2), (2.0, 1.0), (1.5,)),
    "m4l2n2": ((4, 2, 2), (2.0, 1.0), (1.8, 0.9)),
}

EXPONENT_TOL = 0.05


def lemma1_suite(digits: int = 60, tol: float = EXPONENT_TOL) -> dict:
    results = {}
    worst = 0.0
    for name, ep in LEMMA1_CASES.items():
        fit = check_lemma1_exponent(ep, digits=digits)
        worst = max(worst, fit.residual)
        results[name] = {
            "measured": fit.measured_exponent,
            "predicted": fit.predicted_exponent,
            "residual": fit.residual,
            "ok": fit.residual <= tol,
        }
    return {
        "check": "lemma1",
        "cases": len(results),
        "results": results,
        "violations": [k for k, v in results.items() if not v["ok"]],
        "worst_residual": worst,
        "precision_digits": digits,
    }


def lemma2_suite(digits: int = 60, tol: float = EXPONENT_TOL) -> dict:
    results = {}
    worst = 0.0
    for name, (dims, beta, alpha) in LEMMA2_CASES.items():
        fit = check_lemma2_exponent(beta, alpha, dims, digits=digits)
        worst = max(worst, fit.residual)
        results[name] = {
            "measured": fit.measured_exponent,
            "predicted": fit.predicted_exponent,
            "residual": fit.residual,
            "ok": fit.residual <= tol,
        }
    return {
        "check": "lemma2",
        "cases": len(results),
        "results": results,
        "violations": [k for k, v in results.items() if not v["ok"]],
        "worst_residual": worst,
        "precision_digits": digits,
    }


def lemma3_suite(digits: int = 60, eps_grid=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6)) -> dict:
    results = {}
    violations = []
    for name, (dims, mu_pos, lam) in LEMMA3_CASES.items():
        rep = check_lemma3_limit(mu_pos, lam, dims, eps_grid, digits=digits)
        ok = rep["monotone_decreasing"] and rep["errors"][-1] < 1e-3
        results[name] = dict(rep, ok=ok)
        if not ok:
            violations.append(name)
    return {
        "check": "lemma3",
        "cases": len(results),
        "results": results,
        "violations": violations,
        "precision_digits": digits,
    }


def _random_nonsingular(dim: int, rng, cols: int | None = None):
    while True:
        mat = complex_gaussian((dim, cols if cols is not None else dim), rng)
        if cols is not None and cols != dim:
            return mat
        if _condition_number(mat) < COND_LIMIT:
            return mat


def lemma4_suite(trials: int, dim: int, rng) -> dict:
    cases = 0
    violations = []
    worst = 0.0
    for t in range(trials):
        rep = check_lemma4(_random_nonsingular(dim, rng), _random_nonsingular(dim, rng))
        if rep.skipped:
            continue
        cases += rep.cases
        worst = max(worst, rep.worst_residual)
        if rep.violations:
            violations.append({"trial": t, "violations": rep.violations})
    return {
        "check": "lemma4",
        "trials": trials,
        "dim": dim,
        "cases": cases,
        "violations": violations,
        "worst_residual": worst,
    }


def prop1_suite(trials: int, dim: int, cols: int, rng) -> dict:
    cases = 0
    violations = []
    worst = 0.0
    for t in range(trials):
        t_mat = _random_nonsingular(dim, rng)
        m_mat = _random_nonsingular(dim, rng, cols=cols)
        rep = check_prop1(m_mat, t_mat)
        if rep.skipped:
            continue
        cases += rep.cases
        worst = max(worst, rep.worst_residual)
        if rep.violations:
            violations.append({"trial": t, "violations": rep.violations})
    return {
        "check": "prop1",
        "trials": trials,
        "dim": dim,
        "cols": cols,
        "cases": cases,
        "violations": violations,
        "worst_residual": worst,
    }
