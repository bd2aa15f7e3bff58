"""Compiled inner loop for Bernoulli instances.

Mirrors :mod:`sidebandit.policies` operation for operation, including the
floating-point expressions, so pull logs match the reference loop exactly.
Random numbers come from pre-drawn uniform buffers; the loop stops early when
a buffer might run dry and the caller refills it, which keeps the stream
identical to drawing ``rng.random(|N(j)|)`` once per round.
"""

import math

import numpy as np
from numba import njit

UCB1, UCB_N, UCB_MAXN, UCB1_ON_CLIQUES, EPSILON_GREEDY = 0, 1, 2, 3, 4

POLICY_CODES = {
    "ucb1": UCB1,
    "ucb-n": UCB_N,
    "ucb-maxn": UCB_MAXN,
    "ucb1-on-cliques": UCB1_ON_CLIQUES,
    "epsilon-greedy": EPSILON_GREEDY,
}


@njit(cache=True)
def _ucb_argmax(xbar, counts, two_lnt):
    best_i = 0
    best = -np.inf
    for i in range(xbar.size):
        c = counts[i]
        if c == 0:
            v = np.inf
        else:
            v = xbar[i] + math.sqrt(two_lnt / c)
        if v > best:
            best = v
            best_i = i
    return best_i


@njit(cache=True)
def simulate_chunk(code, indptr, indices, mu, gaps, xbar, obs, pulls, step, horizon,
                   env_u, env_pos, pol_u, pol_pos, c, d, k_eff, max_nbhd,
                   pull_log, regret, rewards, cum):
    k_arms = mu.size
    while step < horizon:
        if env_pos + max_nbhd > env_u.size:
            break
        if code == EPSILON_GREEDY and pol_pos + 2 > pol_u.size:
            break
        t = step + 1
        two_lnt = 2.0 * math.log(t)

        if code == UCB1:
            j = _ucb_argmax(xbar, pulls, two_lnt)
        elif code == EPSILON_GREEDY:
            eps = min(1.0, c * k_eff / (d * d * t))
            u = pol_u[pol_pos]
            pol_pos += 1
            if u < eps:
                j = min(int(pol_u[pol_pos] * k_arms), k_arms - 1)
                pol_pos += 1
            else:
                j = 0
                for a in range(1, k_arms):
                    if xbar[a] > xbar[j]:
                        j = a
        else:
            j = _ucb_argmax(xbar, obs, two_lnt)
            if code == UCB_MAXN:
                target = j
                j = indices[indptr[target]]
                for p in range(indptr[target] + 1, indptr[target + 1]):
                    a = indices[p]
                    if xbar[a] > xbar[j]:
                        j = a

        reward = 0.0
        side = code == UCB_N or code == UCB_MAXN or code == EPSILON_GREEDY
        for p in range(indptr[j], indptr[j + 1]):
            a = indices[p]
            x = 1.0 if env_u[env_pos] < mu[a] else 0.0
            env_pos += 1
            if a == j:
                reward = x
            if side:
                obs[a] += 1
                o = obs[a]
                xbar[a] = x / o + (1.0 - 1.0 / o) * xbar[a]

        if code == UCB1:
            obs[j] += 1
            o = obs[j]
            xbar[j] = reward / o + (1.0 - 1.0 / o) * xbar[j]
        elif code == UCB1_ON_CLIQUES:
            for p in range(indptr[j], indptr[j + 1]):
                a = indices[p]
                obs[a] += 1
                o = obs[a]
                xbar[a] = reward / o + (1.0 - 1.0 / o) * xbar[a]

        pulls[j] += 1
        cum += gaps[j]
        pull_log[step] = j
        regret[step] = cum
        rewards[step] = reward
        step += 1
    return step, env_pos, pol_pos, cum
