"""Interval ratios mean(Psi**2) / mean(Psi)**2 and their supremum.

The best constant ``C`` with ``mean(Psi**2) <= C * mean(Psi)**2`` on every
interval is estimated here.  For ``Psi = |t|**alpha`` the ratio is scale
invariant and the supremum reduces to a one-variable problem in the endpoint
ratio ``t = a/b``; that path is exact up to golden-section tolerance.  Other
functions go through a 2-D scan of the box ``|a|, |b| <= bound`` followed by a
local refinement, which yields a lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, SearchError
from .psi import NONNEGATIVE, WHOLE_LINE, PsiSpec, canonical_domain

INV_PHI = (math.sqrt(5) - 1) / 2

# Below this distance from t=1 the series limit replaces the 0/0 quotient.
SERIES_THRESHOLD = 1e-6
CONDITION_TOL = 1e-9


@dataclass(frozen=True)
class IntervalRatio:
    a: float
    b: float
    mean_psi: float
    mean_psi_sq: float
    ratio: float


@dataclass(frozen=True)
class ConstantEstimate:
    value: float
    argmax_interval: tuple[float, float]
    domain: str
    evaluations: int

    def to_dict(self) -> dict:
        a, b = self.argmax_interval
        return {
            "value": self.value,
            "a": a,
            "b": b,
            "domain": self.domain,
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class SearchConfig:
    scan_points: int = 200
    refine_iters: int = 60
    interval_bound: float = 10.0

    def __post_init__(self):
        if self.scan_points < 2 or self.refine_iters < 1 or not self.interval_bound > 0:
            raise ValueError("search parameters must be positive (scan_points >= 2)")


@dataclass(frozen=True)
class ConditionResult:
    holds: bool
    witness: tuple[float, float] | None
    witness_ratio: float
    estimate: ConstantEstimate

    def __bool__(self):
        return self.holds


def interval_ratio(psi: PsiSpec, a: float, b: float) -> IntervalRatio:
    """Means of Psi and Psi**2 on ``(a, b)`` and their ratio."""
    if not a < b:
        raise DomainError(f"degenerate interval ({a}, {b})")
    length = b - a
    mean1 = float(psi.phi(b) - psi.phi(a)) / length
    mean2 = float(psi.int_sq(a, b)) / length
    if not mean1**2 > 0:
        raise DomainError(f"Psi vanishes on ({a}, {b}); ratio undefined")
    return IntervalRatio(a, b, mean1, mean2, mean2 / mean1**2)


def _signed_pow(t: float, p: float) -> float:
    return math.copysign(abs(t) ** p, t)


def power_inner(alpha: float, t: float) -> float:
    """``(1-t)(1-t**(2a+1)) / (1-|t|**a t)**2`` with odd powers for ``t < 0``."""
    if not alpha > -0.5:
        raise DomainError(f"alpha must exceed -1/2, got {alpha}")
    if not t <= 1:
        raise DomainError(f"t must not exceed 1, got {t}")
    if 1 - t < SERIES_THRESHOLD:
        # second-order expansion about t = 1 in d = 1 - t
        p1, p2 = alpha + 1, 2 * alpha + 1
        d = 1 - t
        base = p2 / p1**2
        # (1 - t**p) = p d - p(p-1)/2 d**2 + ...
        num = 1 - (p2 - 1) / 2 * d
        den = 1 - (p1 - 1) / 2 * d
        return base * num / den**2
    if t == 0:
        return 1.0
    num = (1 - t) * (1 - _signed_pow(t, 2 * alpha + 1))
    den = (1 - _signed_pow(t, alpha + 1)) ** 2
    return num / den


def _golden_max(f, lo: float, hi: float, iters: int):
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    evals = 2
    for _ in range(iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
        evals += 1
    best = (fc, c) if fc >= fd else (fd, d)
    return best[1], best[0], evals


def _bracket_and_refine(f, grid: np.ndarray, iters: int):
    """Scan ``f`` on ``grid`` then golden-refine around the best node."""
    values = np.array([f(x) for x in grid])
    evals = len(grid)
    i = int(np.argmax(values))  # first maximal node
    best_x, best_v = float(grid[i]), float(values[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    if hi > lo:
        x, v, n = _golden_max(f, float(lo), float(hi), iters)
        evals += n
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v, evals


def power_constant(alpha: float, domain: str = WHOLE_LINE, scan_points: int = 401,
                   refine_iters: int = 80) -> ConstantEstimate:
    """Best reverse-Cauchy constant for ``Psi = |t|**alpha``.

    The supremum of :func:`power_inner` is taken over ``t`` in ``[0, 1]``
    (half-line) or ``[-1, 1]`` (whole line); ``t -> 1/t`` leaves the inner
    expression unchanged, so ``t < -1`` adds nothing.  A maximizer found at
    ``-1 < t < 0`` is reported through its reciprocal.
    """
    domain = canonical_domain(domain)
    if not alpha > -0.5:
        raise DomainError(f"alpha must exceed -1/2, got {alpha}")
    factor = (alpha + 1) ** 2 / (2 * alpha + 1)
    if alpha == 0:
        return ConstantEstimate(1.0, (0.0, 1.0), domain, 0)
    lo = 0.0 if domain == NONNEGATIVE else -1.0
    grid = np.linspace(lo, 1.0, scan_points)
    t, inner, evals = _bracket_and_refine(lambda x: power_inner(alpha, x), grid, refine_iters)
    if -1 < t < 0:
        t = 1 / t
    return ConstantEstimate(factor * inner, (t, 1.0), domain, evals)


def _ratio_or_nan(psi: PsiSpec, a: float, b: float) -> float:
    if not a < b:
        return math.nan
    try:
        return interval_ratio(psi, a, b).ratio
    except DomainError:
        return math.nan


def estimate_constant(psi: PsiSpec, domain: str = WHOLE_LINE,
                      search: SearchConfig | None = None) -> ConstantEstimate:
    """Lower-bound estimate of the supremum of the interval ratio."""
    domain = canonical_domain(domain)
    search = search or SearchConfig()
    if psi.domain == NONNEGATIVE and domain == WHOLE_LINE:
        raise DomainError("a nonnegative_only Psi cannot be searched on the whole line")
    if psi.cap is None and psi.is_constant:
        if psi.psi(0.0) <= 0:
            raise SearchError("Psi vanishes identically")
        return ConstantEstimate(1.0, (0.0, 1.0), domain, 0)
    if psi.kind == "power" and psi.cap is None:
        return power_constant(psi.alpha, domain, refine_iters=max(search.refine_iters, 60))

    bound = search.interval_bound
    lo = 0.0 if domain == NONNEGATIVE else -bound
    nodes = np.linspace(lo, bound, search.scan_points)
    best = (-math.inf, 0.0, 0.0)
    evals = 0
    # lexicographic order (a, b); strict '>' keeps the first maximal cell
    for i, a in enumerate(nodes[:-1]):
        bs = nodes[i + 1:]
        length = bs - a
        m1 = (np.asarray(psi.phi(bs)) - psi.phi(a)) / length
        m2 = np.asarray(psi.int_sq(a, bs)) / length
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(m1 > 0, m2 / np.where(m1 > 0, m1, 1.0) ** 2, -math.inf)
        evals += len(bs)
        j = int(np.argmax(r))
        if r[j] > best[0]:
            best = (float(r[j]), float(a), float(bs[j]))
    if not math.isfinite(best[0]):
        raise SearchError("Psi vanishes on every scanned interval")

    def neg(x):
        a, b = float(x[0]), float(x[1])
        if a < lo or b > bound:
            return math.inf
        r = _ratio_or_nan(psi, a, b)
        return -r if math.isfinite(r) else math.inf

    res = optimize.minimize(
        neg,
        x0=np.array(best[1:]),
        method="Nelder-Mead",
        options={"maxiter": search.refine_iters * 20, "xatol": 1e-12, "fatol": 1e-15},
    )
    evals += int(res.nfev)
    if math.isfinite(res.fun) and -res.fun > best[0]:
        best = (float(-res.fun), float(res.x[0]), float(res.x[1]))
    return ConstantEstimate(max(best[0], 1.0), (best[1], best[2]), domain, evals)


def check_condition(psi: PsiSpec, candidate_c: float, domain: str = WHOLE_LINE,
                    search: SearchConfig | None = None) -> ConditionResult:
    """Whether ``mean(Psi**2) <= C mean(Psi)**2`` on every scanned interval."""
    if not candidate_c >= 1:
        raise DomainError("a reverse-Cauchy constant is never below 1")
    est = estimate_constant(psi, domain, search)
    holds = est.value <= candidate_c + CONDITION_TOL
    witness = None if holds else est.argmax_interval
    return ConditionResult(holds, witness, est.value, est)
