"""Monte-Carlo experiments: single runs, aggregation into regret curves, speedups, CSV."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import graph as gc
from .environment import (
    BanditInstance,
    Bernoulli,
    gap_profile,
    load_means,
    load_ratings,
    ratings_to_means,
    sample_round,
    uniform_means,
)
from .errors import ConfigError, InputError
from .policies import (
    EpsilonGreedyConfig,
    PolicySpec,
    PolicyState,
    select_epsilon_greedy,
    select_ucb1,
    select_ucb_maxn,
    select_ucbn,
    update_observations,
    update_on_cliques,
    update_pulled_only,
)

log = logging.getLogger(__name__)

CSV_HEADER = ["policy", "t", "mean_per_step_regret", "stderr", "num_cliques"]

_ENV_CHUNK = 1 << 16


@dataclass
class RunResult:
    pull_log: np.ndarray
    pseudo_regret: np.ndarray
    rewards: np.ndarray
    optimal_mean: float
    final_state: PolicyState | None = None

    @property
    def realized_regret(self) -> np.ndarray:
        """``t * mu_star - cumulative reward``; noisier than the pseudo-regret."""
        t = np.arange(1, self.rewards.size + 1)
        return t * self.optimal_mean - np.cumsum(self.rewards)


@dataclass
class RegretCurve:
    policy: str
    t: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    @property
    def per_step(self) -> list[tuple[int, float, float]]:
        return [(int(a), float(b), float(c)) for a, b, c in zip(self.t, self.mean, self.stderr)]

    @property
    def final(self) -> float:
        return float(self.mean[-1])


@dataclass
class SpeedupReport:
    factors: dict[str, float]

    def __getitem__(self, policy: str) -> float:
        return self.factors[policy]


@dataclass
class ExperimentConfig:
    graph_spec: str | None = None
    edge_list: str | None = None
    means_spec: str | None = None
    policies: list[PolicySpec] = field(default_factory=list)
    horizon: int = 1000
    num_runs: int = 100
    base_seed: int = 0
    cover_fraction: float = 1.0
    output_path: str | None = None
    parallelism: int = 1
    dump_full: bool = False

    def validate(self) -> "ExperimentConfig":
        if (self.graph_spec is None) == (self.edge_list is None):
            raise ConfigError("exactly one of a graph spec or an edge-list path is required")
        if self.means_spec is None:
            raise ConfigError("a means spec is required")
        if not self.policies:
            raise ConfigError("at least one policy is required")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError(f"horizon must be a positive integer, got {self.horizon}")
        if int(self.num_runs) != self.num_runs or self.num_runs < 1:
            raise ConfigError(f"runs must be a positive integer, got {self.num_runs}")
        if self.base_seed < 0:
            raise ConfigError(f"seed must be unsigned, got {self.base_seed}")
        if not 0.0 < self.cover_fraction <= 1.0:
            raise ConfigError(f"cover fraction must lie in (0, 1], got {self.cover_fraction}")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        names = [p.name for p in self.policies]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate policy in {names}")
        return self


@dataclass
class ExperimentResult:
    curves: list[RegretCurve]
    speedups: SpeedupReport
    cover_info: gc.CoverStats
    cover: gc.CliqueCover
    instance: BanditInstance
    arms: list[int]


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    # environment and policy randomness are independent children of the run seed
    env, pol = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(env), np.random.default_rng(pol)


def _as_spec(policy) -> PolicySpec:
    if isinstance(policy, PolicySpec):
        return policy
    if isinstance(policy, str):
        return PolicySpec(policy)
    raise ConfigError(f"cannot interpret policy {policy!r}")


def _k_effective(spec: PolicySpec, instance: BanditInstance) -> int:
    if spec.k_effective is not None:
        return int(spec.k_effective)
    return len(gc.greedy_clique_cover(instance.graph, 1.0).cliques)


def _run_reference(instance, spec, horizon, seed) -> RunResult:
    env_rng, pol_rng = _streams(seed)
    state = PolicyState.initial(instance.num_arms)
    gaps = gap_profile(instance)
    cfg = None
    if spec.name == "epsilon-greedy":
        cfg = EpsilonGreedyConfig(spec.c, spec.d, _k_effective(spec, instance))
    pull_log = np.empty(horizon, dtype=np.int64)
    regret = np.empty(horizon)
    rewards = np.empty(horizon)
    cum = 0.0
    for step in range(horizon):
        name = spec.name
        if name == "ucb1":
            j = select_ucb1(state)
        elif name == "ucb-maxn":
            j = select_ucb_maxn(state, instance.graph).pulled
        elif name == "epsilon-greedy":
            j = select_epsilon_greedy(state, cfg, pol_rng)
        else:
            j = select_ucbn(state)
        outcome = sample_round(instance, j, env_rng)
        if name == "ucb1":
            update_pulled_only(state, outcome)
        elif name == "ucb1-on-cliques":
            update_on_cliques(state, j, outcome.reward, instance.graph)
        else:
            update_observations(state, outcome)
        cum += gaps.gaps[j]
        pull_log[step] = j
        regret[step] = cum
        rewards[step] = outcome.reward
    return RunResult(pull_log, regret, rewards, gaps.optimal_mean, state)


def _run_kernel(instance, spec, horizon, seed) -> RunResult:
    from ._kernel import POLICY_CODES, simulate_chunk

    env_rng, pol_rng = _streams(seed)
    k = instance.num_arms
    gaps = gap_profile(instance)
    indptr, indices = instance.graph.csr
    max_nbhd = int(np.max(np.diff(indptr)))
    code = POLICY_CODES[spec.name]
    eps_greedy = spec.name == "epsilon-greedy"
    k_eff = float(_k_effective(spec, instance)) if eps_greedy else 1.0

    xbar = np.zeros(k)
    obs = np.zeros(k, dtype=np.int64)
    pulls = np.zeros(k, dtype=np.int64)
    pull_log = np.empty(horizon, dtype=np.int64)
    regret = np.empty(horizon)
    rewards = np.empty(horizon)

    chunk = max(_ENV_CHUNK, 64 * max_nbhd)
    env_u = np.empty(0)
    pol_u = np.empty(0)
    env_pos = pol_pos = 0
    step, cum = 0, 0.0
    while step < horizon:
        if env_pos + max_nbhd > env_u.size:
            env_u = np.concatenate([env_u[env_pos:], env_rng.random(chunk)])
            env_pos = 0
        if eps_greedy and pol_pos + 2 > pol_u.size:
            pol_u = np.concatenate([pol_u[pol_pos:], pol_rng.random(_ENV_CHUNK)])
            pol_pos = 0
        step, env_pos, pol_pos, cum = simulate_chunk(
            code, indptr, indices, instance.means, gaps.gaps, xbar, obs, pulls, step, horizon,
            env_u, env_pos, pol_u, pol_pos, float(spec.c), float(spec.d), k_eff, max_nbhd,
            pull_log, regret, rewards, cum,
        )
    state = PolicyState(xbar, obs, pulls, step)
    return RunResult(pull_log, regret, rewards, gaps.optimal_mean, state)


def run_single(instance: BanditInstance, policy, horizon: int, seed: int,
               engine: str = "auto") -> RunResult:
    """Play ``horizon`` rounds of select, draw, update; deterministic in ``seed``.

    ``engine`` picks the compiled loop (Bernoulli rewards only) or the plain
    numpy loop; ``auto`` uses the compiled loop whenever it applies. Both
    produce identical results.
    """
    spec = _as_spec(policy)
    if int(horizon) != horizon or horizon < 1:
        raise InputError(f"horizon must be a positive integer, got {horizon}")
    if seed < 0:
        raise InputError(f"seed must be unsigned, got {seed}")
    horizon = int(horizon)
    if engine not in ("auto", "kernel", "reference"):
        raise InputError(f"unknown engine {engine!r}")
    bernoulli = isinstance(instance.family, Bernoulli)
    if engine == "kernel" and not bernoulli:
        raise InputError("the compiled loop only handles Bernoulli rewards")
    if engine == "reference" or not bernoulli:
        return _run_reference(instance, spec, horizon, seed)
    return _run_kernel(instance, spec, horizon, seed)


def checkpoints(horizon: int, per_decade: int = 10) -> np.ndarray:
    """Log-spaced rounds ``1 <= t <= horizon``, always ending at ``horizon``."""
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    exps = np.arange(0, math.log10(horizon), 1.0 / per_decade)
    ts = np.unique(np.round(10.0 ** exps).astype(np.int64))
    ts = ts[ts < horizon]
    return np.append(ts, horizon)


def aggregate(policy: str, trajectories: np.ndarray, ts: np.ndarray) -> RegretCurve:
    """Mean and standard error over runs of ``regret(t) / t`` at the rounds ``ts``.

    ``trajectories`` has one row per run, in run-index order, sampled at ``ts``.
    """
    per_step = np.asarray(trajectories, dtype=np.float64) / ts
    runs = per_step.shape[0]
    mean = per_step.mean(axis=0)
    if runs > 1:
        stderr = per_step.std(axis=0, ddof=1) / math.sqrt(runs)
    else:
        stderr = np.zeros_like(mean)
    return RegretCurve(policy, np.asarray(ts, dtype=np.int64), mean, stderr)


def speedup(curves: list[RegretCurve], baseline: str = "ucb1") -> SpeedupReport:
    """``r_baseline(T) / r_policy(T)`` for every curve."""
    base = next((c for c in curves if c.policy == baseline), None)
    if base is None:
        raise InputError(f"speedup needs a {baseline} curve")
    ref = base.final
    factors = {}
    for c in curves:
        r = c.final
        if r == 0.0:
            factors[c.policy] = 1.0 if ref == 0.0 else math.inf
        else:
            factors[c.policy] = ref / r
    factors[baseline] = 1.0
    return SpeedupReport(factors)


def _resolve_means(spec: str, num_arms: int, default_seed: int) -> np.ndarray:
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        parts = rest.split(":")
        seed = default_seed
        if parts and parts[-1].startswith("seed"):
            seed = int(parts.pop()[4:])
        if len(parts) != 2:
            raise ConfigError(f"bad means spec {spec!r}; expected uniform:a:b[:seedN]")
        means = uniform_means(num_arms, float(parts[0]), float(parts[1]), seed)
    elif kind == "ratings":
        path, _, thr = rest.partition(":")
        threshold = float(thr) if thr else 3.5
        means = ratings_to_means(load_ratings(path), num_arms, threshold)
    else:
        means = load_means(rest if kind == "file" else spec)
    if means.size != num_arms:
        raise ConfigError(f"means spec gives {means.size} arms, graph has {num_arms}")
    return means


def _load_graph(config: ExperimentConfig) -> gc.SOGraph:
    if config.edge_list is not None:
        return gc.load_edge_list(config.edge_list)
    return gc.parse_graph_kind(config.graph_spec, config.base_seed)


def prepare_instance(config: ExperimentConfig):
    """Graph, means, cover at the configured fraction, and the instance on the covered arms.

    Returns ``(full_instance, cover, active_instance, arms)``; ``arms[k]`` is the
    original label of active arm ``k``.
    """
    graph = _load_graph(config)
    means = _resolve_means(config.means_spec, graph.num_arms, config.base_seed)
    full = BanditInstance(means, graph)
    cover = gc.greedy_clique_cover(graph, config.cover_fraction)
    active, arms = full.restrict(cover.covered)
    return full, cover, active, arms


def _run_task(args):
    instance, spec, horizon, seed, ts = args
    result = run_single(instance, spec, horizon, seed)
    return result.pseudo_regret[ts - 1]


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every policy ``num_runs`` times; run ``r`` of every policy uses seed ``base_seed + r``."""
    config.validate()
    _, cover, instance, arms = prepare_instance(config)
    stats = gc.cover_stats(cover)
    log.info("cover: %d cliques over %d arms (avg %.3f per arm)",
             stats.num_cliques, len(arms), stats.avg_cliques_per_arm)

    horizon = int(config.horizon)
    ts = np.arange(1, horizon + 1) if config.dump_full else checkpoints(horizon)
    specs = []
    for p in config.policies:
        if p.name == "epsilon-greedy" and p.k_effective is None:
            p = PolicySpec(p.name, p.c, p.d, len(cover.cliques))
        specs.append(p)

    tasks = [
        (instance, spec, horizon, config.base_seed + r, ts)
        for spec in specs
        for r in range(config.num_runs)
    ]
    if config.parallelism > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * config.parallelism))))
    else:
        rows = [_run_task(t) for t in tasks]

    curves = []
    for idx, spec in enumerate(specs):
        block = np.vstack(rows[idx * config.num_runs:(idx + 1) * config.num_runs])
        curves.append(aggregate(spec.name, block, ts))

    if any(c.policy == "ucb1" for c in curves):
        speedups = speedup(curves)
    else:
        speedups = SpeedupReport({})
    return ExperimentResult(curves, speedups, stats, cover, instance, arms)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.9g}"


def write_csv(curves: list[RegretCurve], speedups: SpeedupReport | None,
              cover_info: gc.CoverStats | None, path) -> None:
    """Write the regret curves and, next to them, a ``*.speedups.csv`` file.

    Rows are sorted by policy name then ``t``; ``num_cliques`` repeats the
    cover size on every row so plots can mark it.
    """
    path = Path(path)
    num_cliques = cover_info.num_cliques if cover_info is not None else ""
    rows = []
    for c in curves:
        for t, m, s in zip(c.t, c.mean, c.stderr):
            rows.append((c.policy, int(t), float(m), float(s)))
    rows.sort(key=lambda r: (r[0], r[1]))
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for policy, t, m, s in rows:
                w.writerow([policy, t, _fmt(m), _fmt(s), num_cliques])
        if speedups is not None and speedups.factors:
            with open(speedup_path(path), "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["policy", "speedup"])
                for policy in sorted(speedups.factors):
                    w.writerow([policy, _fmt(speedups.factors[policy])])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def speedup_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".speedups.csv")
