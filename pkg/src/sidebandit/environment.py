"""Bandit instances, per-round reward draws and regret accounting."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import InputError, ParseError
from .graph import SOGraph, induced_subgraph

__all__ = [
    "Bernoulli",
    "Beta",
    "BanditInstance",
    "GapProfile",
    "RoundOutcome",
    "gap_profile",
    "sample_round",
    "pseudo_regret",
    "means_from_ratings",
    "load_means",
    "load_ratings",
    "uniform_means",
]


@dataclass(frozen=True)
class Bernoulli:
    """Reward 1 with probability equal to the arm mean, else 0."""

    name = "bernoulli"

    def draw(self, rng: np.random.Generator, means: np.ndarray) -> np.ndarray:
        return (rng.random(means.size) < means).astype(np.float64)


@dataclass(frozen=True)
class Beta:
    """Beta rewards with the arm mean and a fixed ``concentration = a + b``.

    Arms with mean exactly 0 or 1 are degenerate and return that value; they
    still consume one draw so the stream position does not depend on means.
    """

    concentration: float = 2.0
    name = "beta"

    def __post_init__(self):
        if not self.concentration > 0:
            raise InputError("Beta concentration must be positive")

    def draw(self, rng: np.random.Generator, means: np.ndarray) -> np.ndarray:
        inner = (means > 0.0) & (means < 1.0)
        a = np.where(inner, means * self.concentration, 1.0)
        b = np.where(inner, (1.0 - means) * self.concentration, 1.0)
        values = rng.beta(a, b)
        return np.where(inner, values, means)


@dataclass(frozen=True)
class GapProfile:
    optimal_arm: int
    optimal_mean: float
    gaps: np.ndarray

    @property
    def num_arms(self) -> int:
        return self.gaps.size


@dataclass(frozen=True, eq=False)
class BanditInstance:
    """Per-arm means, a reward family with support in [0, 1], and the graph."""

    means: np.ndarray
    graph: SOGraph
    family: Bernoulli | Beta = field(default_factory=Bernoulli)

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        if means.ndim != 1 or means.size != self.graph.num_arms:
            raise InputError(
                f"expected {self.graph.num_arms} means, got shape {means.shape}"
            )
        if not np.all((means >= 0.0) & (means <= 1.0)):
            raise InputError("every arm mean must lie in [0, 1]")
        means.setflags(write=False)
        object.__setattr__(self, "means", means)

    @property
    def num_arms(self) -> int:
        return self.graph.num_arms

    def restrict(self, arms) -> tuple["BanditInstance", list[int]]:
        """Instance on the induced subgraph over ``arms``, relabelled ascending."""
        sub, keep = induced_subgraph(self.graph, arms)
        return BanditInstance(self.means[keep], sub, self.family), keep


@dataclass(frozen=True)
class RoundOutcome:
    """What one round reveals: the pulled arm's reward and the draws over N(pulled).

    ``arms`` is sorted ascending and ``values[k]`` belongs to ``arms[k]``.
    """

    pulled: int
    reward: float
    arms: np.ndarray
    values: np.ndarray

    @property
    def observations(self) -> dict[int, float]:
        return {int(a): float(v) for a, v in zip(self.arms, self.values)}


def gap_profile(instance: BanditInstance) -> GapProfile:
    means = instance.means
    best = int(np.argmax(means))
    mu_star = float(means[best])
    gaps = mu_star - means
    gaps.setflags(write=False)
    return GapProfile(best, mu_star, gaps)


def sample_round(instance: BanditInstance, pulled: int, rng: np.random.Generator) -> RoundOutcome:
    """Draw one fresh value for every arm in N(pulled), in ascending arm order."""
    if not 0 <= pulled < instance.num_arms:
        raise InputError(f"arm {pulled} out of range")
    arms = instance.graph.neighborhood_arrays[pulled]
    values = instance.family.draw(rng, instance.means[arms])
    reward = float(values[np.searchsorted(arms, pulled)])
    return RoundOutcome(int(pulled), reward, arms, values)


def pseudo_regret(gaps: GapProfile | np.ndarray, pull_counts) -> float:
    """``sum_i gap_i * T_i``."""
    g = gaps.gaps if isinstance(gaps, GapProfile) else np.asarray(gaps, dtype=np.float64)
    counts = np.asarray(pull_counts)
    if counts.shape != g.shape:
        raise InputError(f"expected {g.size} counts, got shape {counts.shape}")
    if np.any(counts < 0):
        raise InputError("pull counts must be nonnegative")
    return float(np.dot(g, counts))


def means_from_ratings(ratings: Mapping[tuple, float], threshold: float = 3.5,
                       users=None) -> dict:
    """Per-user fraction of rated items scored strictly above ``threshold``.

    ``users`` optionally lists users that must be present; any of them without
    a rating is an error.
    """
    above: dict = defaultdict(int)
    total: dict = defaultdict(int)
    for (user, _item), stars in ratings.items():
        total[user] += 1
        if stars > threshold:
            above[user] += 1
    if users is not None:
        missing = [u for u in users if total.get(u, 0) == 0]
        if missing:
            raise InputError(f"users without ratings: {missing[:10]}")
    if not total:
        raise InputError("no ratings given")
    return {u: above[u] / total[u] for u in total}


def load_ratings(path) -> dict[tuple[str, str], float]:
    """Read ``user item stars`` lines; later duplicates overwrite earlier ones."""
    path = Path(path)
    ratings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"expected 'user item stars', got {line!r}", path, lineno)
            try:
                stars = float(parts[2])
            except ValueError:
                raise ParseError(f"bad star value {parts[2]!r}", path, lineno) from None
            ratings[(parts[0], parts[1])] = stars
    return ratings


def ratings_to_means(ratings: Mapping[tuple, float], num_arms: int,
                     threshold: float = 3.5) -> np.ndarray:
    """Arm means from ratings whose user ids are the arm indices ``0..K-1``."""
    keyed = {}
    for (user, item), stars in ratings.items():
        try:
            arm = int(user)
        except ValueError:
            raise InputError(f"user id {user!r} is not an arm index") from None
        if not 0 <= arm < num_arms:
            raise InputError(f"user id {arm} outside [0, {num_arms})")
        keyed[(arm, item)] = stars
    per_user = means_from_ratings(keyed, threshold, users=range(num_arms))
    return np.array([per_user[i] for i in range(num_arms)], dtype=np.float64)


def load_means(path) -> np.ndarray:
    """One mean per line; line order is arm order."""
    path = Path(path)
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                v = float(line)
            except ValueError:
                raise ParseError(f"not a number: {line!r}", path, lineno) from None
            if not 0.0 <= v <= 1.0:
                raise ParseError(f"mean {v} outside [0, 1]", path, lineno)
            values.append(v)
    if not values:
        raise ParseError("no means found", path)
    return np.array(values, dtype=np.float64)


def uniform_means(num_arms: int, low: float, high: float, seed: int) -> np.ndarray:
    """Per-arm means drawn i.i.d. uniform on ``[low, high]``."""
    if not 0.0 <= low <= high <= 1.0:
        raise InputError(f"need 0 <= low <= high <= 1, got [{low}, {high}]")
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=num_arms)
