"""Closed-form regret bounds for UCB1, UCB-N and UCB-MaxN, plus the two-sample tail bound.

Conventions:

* reciprocal gap sums skip zero-gap arms (the optimal arm has no 1/0 term);
* a clique whose smallest gap is 0 but which also holds a suboptimal arm makes
  the logarithmic coefficient infinite; such reports carry ``mixed_optimal``;
* a clique of optimal arms only contributes 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .environment import GapProfile
from .errors import InputError
from .graph import CliqueCover

__all__ = [
    "UCB_CONSTANT",
    "CoverBoundReport",
    "ucb1_regret_bound",
    "clique_cover_bound_thm2",
    "clique_cover_bound_thm3",
    "lemma1_tail_bound",
    "best_bound_over_covers",
    "empirical_exceedance",
    "write_bound_reports",
]

UCB_CONSTANT = 1.0 + math.pi ** 2 / 3.0


@dataclass(frozen=True)
class CoverBoundReport:
    which: str
    log_coefficient: float
    constant_term: float
    residual_term: float
    horizon_n: int
    mixed_optimal: bool = False

    @property
    def total_at_n(self) -> float:
        if math.isinf(self.log_coefficient):
            return math.inf
        return self.log_coefficient * math.log(self.horizon_n) + self.constant_term + self.residual_term


def _gaps(gaps) -> np.ndarray:
    return gaps.gaps if isinstance(gaps, GapProfile) else np.asarray(gaps, dtype=np.float64)


def _check_n(n: int) -> int:
    if int(n) != n or n < 2:
        raise InputError(f"horizon n must be an integer >= 2, got {n}")
    return int(n)


def ucb1_regret_bound(gaps, n: int) -> CoverBoundReport:
    """``8 sum_{gap>0} 1/gap * ln n + (1 + pi^2/3) sum gap``."""
    n = _check_n(n)
    g = _gaps(gaps)
    log_coef = 8.0 * sum(1.0 / x for x in g if x > 0)
    const = UCB_CONSTANT * float(sum(g))
    return CoverBoundReport("eq2", log_coef, const, 0.0, n)


def _cover_members(cover: CliqueCover, num_arms: int) -> list[tuple[int, ...]]:
    if cover.num_arms != num_arms or set(cover.covered) != set(range(num_arms)):
        raise InputError("the bound needs a cover of every arm of the instance")
    return [c.members for c in cover.cliques]


def _clique_terms(g: np.ndarray, members) -> tuple[float, float]:
    """(log-coefficient contribution before the factor 8, smallest gap)."""
    sub = g[list(members)]
    top, low = float(sub.max()), float(sub.min())
    if top == 0.0:
        return 0.0, low
    if low == 0.0:
        return math.inf, low
    return top / (low * low), low


def clique_cover_bound_thm2(gaps, cover: CliqueCover, n: int) -> CoverBoundReport:
    """UCB-N bound for one cover: ``8 sum_C max gap / min gap^2 * ln n + (1+pi^2/3) sum_i gap_i``."""
    n = _check_n(n)
    g = _gaps(gaps)
    coef = 0.0
    for members in _cover_members(cover, g.size):
        coef += _clique_terms(g, members)[0]
    const = UCB_CONSTANT * float(sum(g))
    return CoverBoundReport("thm2", 8.0 * coef, const, 0.0, n, mixed_optimal=math.isinf(coef))


def _residual(g: np.ndarray, members, low: float, n: int) -> float:
    total = 0.0
    ln_n = math.log(n)
    for i in members:
        delta = float(g[i]) - low
        if delta <= 0.0:
            continue
        d2 = delta * delta
        ratio = math.expm1(-n * d2 / 2.0) / math.expm1(-d2 / 2.0)
        total += 2.0 * float(g[i]) * ratio * math.exp(-4.0 * d2 / (low * low) * ln_n)
    return total


def clique_cover_bound_thm3(gaps, cover: CliqueCover, n: int) -> CoverBoundReport:
    """UCB-MaxN bound for one cover, including the vanishing residual term.

    The constant sums the smallest gap of each clique; the residual adds, for
    every arm whose gap exceeds its clique's smallest gap by ``delta > 0``,
    ``2 gap (1 - e^{-n delta^2/2}) / (1 - e^{-delta^2/2}) * n^{-4 delta^2 / low^2}``.
    """
    n = _check_n(n)
    g = _gaps(gaps)
    coef = const = residual = 0.0
    for members in _cover_members(cover, g.size):
        part, low = _clique_terms(g, members)
        coef += part
        const += low
        if part and not math.isinf(part):
            residual += _residual(g, members, low, n)
    return CoverBoundReport(
        "thm3", 8.0 * coef, UCB_CONSTANT * const, residual, n, mixed_optimal=math.isinf(coef)
    )


def lemma1_tail_bound(gap: float, n: int, m: int) -> float:
    """Bound on P(mean of n draws at mu > mean of m draws at nu) with ``nu - mu = gap``."""
    if not gap > 0:
        raise InputError(f"gap must be positive, got {gap}")
    if n < 1 or m < 1:
        raise InputError(f"sample sizes must be >= 1, got n={n}, m={m}")
    return 2.0 * math.exp(-min(n, m) * gap * gap / 2.0)


_BOUNDS = {"thm2": clique_cover_bound_thm2, "thm3": clique_cover_bound_thm3}


def best_bound_over_covers(gaps, covers: Sequence[CliqueCover], n: int,
                           which: str = "thm2") -> tuple[int, CoverBoundReport]:
    """Cover of the list with the smallest total; ties keep the earliest."""
    if not covers:
        raise InputError("need at least one cover")
    if which not in _BOUNDS:
        raise InputError(f"which must be 'thm2' or 'thm3', got {which!r}")
    bound = _BOUNDS[which]
    best_idx, best = -1, None
    for idx, cover in enumerate(covers):
        report = bound(gaps, cover, n)
        if best is None or report.total_at_n < best.total_at_n:
            best_idx, best = idx, report
    return best_idx, best


def empirical_exceedance(mu: float, nu: float, n: int, m: int, trials: int,
                         rng: np.random.Generator) -> tuple[float, float]:
    """Monte-Carlo frequency of ``mean(X_1..X_n) > mean(Y_1..Y_m)`` for Bernoulli samples.

    Returns the frequency and its standard error.
    """
    xs = rng.binomial(n, mu, size=trials) / n
    ys = rng.binomial(m, nu, size=trials) / m
    freq = float(np.mean(xs > ys))
    return freq, math.sqrt(freq * (1.0 - freq) / trials)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.9g}"


def write_bound_reports(rows: Iterable[tuple[str, CoverBoundReport]], path) -> None:
    """CSV with one row per ``(cover_id, report)``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["which", "cover_id", "log_coefficient", "constant_term", "residual_term", "n", "total"])
        for cover_id, r in rows:
            w.writerow([
                r.which, cover_id, _fmt(r.log_coefficient), _fmt(r.constant_term),
                _fmt(r.residual_term), r.horizon_n, _fmt(r.total_at_n),
            ])
