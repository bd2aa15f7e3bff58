"""Stochastic bandits with side observations.

UCB-N and UCB-MaxN policies with their baselines, greedy clique covers of the
side-observation graph, closed-form regret bounds, and a seeded Monte-Carlo
harness.
"""

from .bounds import (
    CoverBoundReport,
    best_bound_over_covers,
    clique_cover_bound_thm2,
    clique_cover_bound_thm3,
    lemma1_tail_bound,
    ucb1_regret_bound,
)
from .environment import BanditInstance, Bernoulli, Beta, gap_profile, pseudo_regret, sample_round
from .errors import ConfigError, InputError, ParseError
from .graph import (
    Clique,
    CliqueCover,
    SOGraph,
    build_graph,
    cover_stats,
    generate_graph,
    greedy_clique_cover,
    is_clique,
    load_edge_list,
    maximal_clique_containing,
    neighborhood,
    trivial_cover,
)
from .harness import (
    ExperimentConfig,
    RegretCurve,
    SpeedupReport,
    run_experiment,
    run_single,
    speedup,
    write_csv,
)
from .policies import POLICY_NAMES, PolicySpec, PolicyState

__version__ = "0.1.0"
