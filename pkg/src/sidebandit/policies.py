"""Arm selection and estimate updates for the UCB family and epsilon-greedy.

All argmax operations break ties toward the lowest arm index. Decisions at
round ``t`` use ``t = state.step + 1``, so the very first decision sees
``ln 1 = 0``. An arm with a zero count has an infinite index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import RoundOutcome
from .errors import ConfigError, InputError
from .graph import SOGraph

__all__ = [
    "POLICY_NAMES",
    "PolicyState",
    "EpsilonGreedyConfig",
    "PolicySpec",
    "MaxNChoice",
    "ucb_index",
    "ucb_indices",
    "select_ucb1",
    "select_ucbn",
    "select_ucb_maxn",
    "epsilon_schedule",
    "select_epsilon_greedy",
    "update_observations",
    "update_on_cliques",
    "update_pulled_only",
]

POLICY_NAMES = ("ucb1", "ucb-n", "ucb-maxn", "ucb1-on-cliques", "epsilon-greedy")


@dataclass
class PolicyState:
    """Mutable per-run learner state.

    ``obs_counts`` counts every observation of an arm, direct or on the side;
    ``pull_counts`` counts direct pulls only. UCB1 keeps the two equal.
    """

    empirical_means: np.ndarray
    obs_counts: np.ndarray
    pull_counts: np.ndarray
    step: int = 0

    @classmethod
    def initial(cls, num_arms: int) -> "PolicyState":
        return cls(
            np.zeros(num_arms, dtype=np.float64),
            np.zeros(num_arms, dtype=np.int64),
            np.zeros(num_arms, dtype=np.int64),
            0,
        )

    @property
    def num_arms(self) -> int:
        return self.empirical_means.size

    def copy(self) -> "PolicyState":
        return PolicyState(
            self.empirical_means.copy(), self.obs_counts.copy(), self.pull_counts.copy(), self.step
        )


@dataclass(frozen=True)
class EpsilonGreedyConfig:
    c: float = 5.0
    d: float = 1.0
    k_effective: int = 1

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0):
            raise InputError(f"epsilon-greedy needs c > 0 and d > 0, got c={self.c}, d={self.d}")
        if int(self.k_effective) != self.k_effective or self.k_effective < 1:
            raise InputError(f"k_effective must be a positive integer, got {self.k_effective}")


@dataclass(frozen=True)
class PolicySpec:
    """A policy name plus its parameters.

    ``k_effective`` is only read by epsilon-greedy; ``None`` means "number of
    cliques in the full greedy cover of the instance graph".
    """

    name: str
    c: float = 5.0
    d: float = 1.0
    k_effective: int | None = None

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise ConfigError(f"unknown policy {self.name!r}; choose from {', '.join(POLICY_NAMES)}")
        if not (self.c > 0 and self.d > 0):
            raise ConfigError(f"epsilon-greedy needs c > 0 and d > 0, got c={self.c}, d={self.d}")


@dataclass(frozen=True)
class MaxNChoice:
    observe_target: int
    pulled: int


def ucb_index(mean: float, count: int, t: int) -> float:
    """``mean + sqrt(2 ln t / count)``, or ``+inf`` when ``count == 0``."""
    if t < 1:
        raise InputError(f"t must be >= 1, got {t}")
    if count < 0:
        raise InputError(f"count must be nonnegative, got {count}")
    if count == 0:
        return math.inf
    return mean + math.sqrt(2.0 * math.log(t) / count)


def ucb_indices(means: np.ndarray, counts: np.ndarray, t: int) -> np.ndarray:
    """Vectorised :func:`ucb_index` over all arms."""
    if t < 1:
        raise InputError(f"t must be >= 1, got {t}")
    seen = counts > 0
    out = np.full(means.shape, np.inf)
    out[seen] = means[seen] + np.sqrt(2.0 * math.log(t) / counts[seen])
    return out


def select_ucb1(state: PolicyState) -> int:
    return int(np.argmax(ucb_indices(state.empirical_means, state.pull_counts, state.step + 1)))


def select_ucbn(state: PolicyState) -> int:
    return int(np.argmax(ucb_indices(state.empirical_means, state.obs_counts, state.step + 1)))


def select_ucb_maxn(state: PolicyState, graph: SOGraph) -> MaxNChoice:
    """Pick the arm to observe by UCB, then pull the empirically best arm of its neighborhood."""
    target = select_ucbn(state)
    nbrs = graph.neighborhood_arrays[target]
    pulled = int(nbrs[np.argmax(state.empirical_means[nbrs])])
    return MaxNChoice(target, pulled)


def epsilon_schedule(n: int, cfg: EpsilonGreedyConfig) -> float:
    """``min(1, c K / (d^2 n))`` at round ``n``."""
    if n < 1:
        raise InputError(f"round must be >= 1, got {n}")
    return min(1.0, cfg.c * cfg.k_effective / (cfg.d * cfg.d * n))


def select_epsilon_greedy(state: PolicyState, cfg: EpsilonGreedyConfig,
                          rng: np.random.Generator) -> int:
    """Explore a uniformly random arm with probability eps_n, else exploit.

    Consumes one uniform for the coin and, when exploring, a second one for
    the arm, taken as ``floor(u * K)``.
    """
    eps = epsilon_schedule(state.step + 1, cfg)
    if rng.random() < eps:
        k = state.num_arms
        return min(int(rng.random() * k), k - 1)
    return int(np.argmax(state.empirical_means))


def _fold_in(state: PolicyState, arms: np.ndarray, values) -> None:
    state.obs_counts[arms] += 1
    o = state.obs_counts[arms]
    state.empirical_means[arms] = values / o + (1.0 - 1.0 / o) * state.empirical_means[arms]


def update_observations(state: PolicyState, outcome: RoundOutcome) -> PolicyState:
    """Count the pull and fold every drawn value of N(pulled) into its estimate."""
    state.pull_counts[outcome.pulled] += 1
    state.step += 1
    _fold_in(state, outcome.arms, outcome.values)
    return state


def update_on_cliques(state: PolicyState, pulled: int, reward: float,
                      graph: SOGraph) -> PolicyState:
    """Fold the pulled arm's own reward into every estimate of N(pulled)."""
    if not 0.0 <= reward <= 1.0:
        raise InputError(f"reward must lie in [0, 1], got {reward}")
    state.pull_counts[pulled] += 1
    state.step += 1
    _fold_in(state, graph.neighborhood_arrays[pulled], reward)
    return state


def update_pulled_only(state: PolicyState, outcome: RoundOutcome) -> PolicyState:
    """UCB1 update: side observations are ignored."""
    state.pull_counts[outcome.pulled] += 1
    state.step += 1
    _fold_in(state, np.array([outcome.pulled]), outcome.reward)
    return state
