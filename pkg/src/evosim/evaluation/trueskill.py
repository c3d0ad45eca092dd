"""Skill rating over evaluator rankings.

Each ranking is treated as one free-for-all match between all groups and
processed sequentially with Gaussian belief propagation: performances form
a chain of greater-than constraints between adjacent finishers, relaxed by
expectation propagation until convergence, then projected back to skills.
Defaults: mu0 = 25, sigma0 = mu0/3, beta = mu0/6, tau = mu0/300, no draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

MU0 = 25.0
SIGMA0 = MU0 / 3.0
BETA = MU0 / 6.0
TAU = MU0 / 300.0

_EPS = 1e-12


@dataclass(frozen=True)
class RatingResult:
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def _v_gt(x: float) -> float:
    # E-step moment ratio for a greater-than-zero truncation.
    denom = 0.5 * math.erfc(-x / math.sqrt(2.0))
    if denom < 1e-300:
        return -x  # deep tail: truncated mean approaches the boundary
    return math.exp(-0.5 * x * x) / (math.sqrt(2.0 * math.pi) * denom)


def _w_gt(x: float) -> float:
    v = _v_gt(x)
    return v * (v + x)


class _Gaussian:
    """Natural-parameter Gaussian (precision pi, precision-mean tau)."""

    __slots__ = ("pi", "tau")

    def __init__(self, pi: float = 0.0, tau: float = 0.0):
        self.pi = pi
        self.tau = tau

    @classmethod
    def from_moments(cls, mean: float, var: float) -> "_Gaussian":
        return cls(pi=1.0 / var, tau=mean / var)

    @property
    def mean(self) -> float:
        return self.tau / self.pi

    @property
    def var(self) -> float:
        return 1.0 / self.pi

    def divide(self, other: "_Gaussian") -> "_Gaussian":
        return _Gaussian(self.pi - other.pi, self.tau - other.tau)

    def multiply(self, other: "_Gaussian") -> "_Gaussian":
        return _Gaussian(self.pi + other.pi, self.tau + other.tau)


def _chain_posteriors(means: list[float], variances: list[float],
                      max_sweeps: int = 100, tol: float = 1e-12) -> list[_Gaussian]:
    """EP marginals of performances t_0 > t_1 > ... > t_{k-1}."""
    k = len(means)
    posteriors = [_Gaussian.from_moments(m, v) for m, v in zip(means, variances)]
    # messages[j] = (to t_j, to t_{j+1}) from the j-th greater-than factor
    messages = [[_Gaussian(), _Gaussian()] for _ in range(k - 1)]
    for _ in range(max_sweeps):
        delta = 0.0
        for j in list(range(k - 1)) + list(range(k - 2, -1, -1)):
            cav_a = posteriors[j].divide(messages[j][0])
            cav_b = posteriors[j + 1].divide(messages[j][1])
            va, vb = cav_a.var, cav_b.var
            ma, mb = cav_a.mean, cav_b.mean
            chi2 = va + vb
            chi = math.sqrt(chi2)
            arg = (ma - mb) / chi
            v = _v_gt(arg)
            w = _w_gt(arg)
            new_a = _Gaussian.from_moments(ma + (va / chi) * v,
                                           max(va * (1.0 - (va / chi2) * w), _EPS))
            new_b = _Gaussian.from_moments(mb - (vb / chi) * v,
                                           max(vb * (1.0 - (vb / chi2) * w), _EPS))
            delta = max(delta,
                        abs(new_a.mean - posteriors[j].mean),
                        abs(new_b.mean - posteriors[j + 1].mean))
            messages[j][0] = new_a.divide(cav_a)
            messages[j][1] = new_b.divide(cav_b)
            posteriors[j] = new_a
            posteriors[j + 1] = new_b
        if delta < tol:
            break
    return posteriors


def rate_match(ratings: list[RatingResult], beta: float = BETA,
               tau: float = TAU) -> list[RatingResult]:
    """Update ratings for one match; input ordered by finish (winner first)."""
    if len(ratings) < 2:
        return list(ratings)
    skill_vars = [r.sigma ** 2 + tau ** 2 for r in ratings]
    perf_vars = [sv + beta ** 2 for sv in skill_vars]
    perf_means = [r.mu for r in ratings]
    posteriors = _chain_posteriors(perf_means, perf_vars)
    out = []
    for r, sv, pv, pm, post in zip(ratings, skill_vars, perf_vars, perf_means, posteriors):
        # Likelihood message the match sends to the performance variable.
        msg = post.divide(_Gaussian.from_moments(pm, pv))
        if msg.pi <= _EPS:
            out.append(RatingResult(mu=r.mu, sigma=math.sqrt(sv)))
            continue
        msg_mean = msg.tau / msg.pi
        msg_var = 1.0 / msg.pi + beta ** 2  # message passed down through the noise
        new_var = 1.0 / (1.0 / sv + 1.0 / msg_var)
        new_mu = new_var * (r.mu / sv + msg_mean / msg_var)
        out.append(RatingResult(mu=new_mu, sigma=math.sqrt(new_var)))
    return out


def trueskill_rank(rankings: list[list[str]], mu0: float = MU0, sigma0: float = SIGMA0,
                   beta: float = BETA, tau: float = TAU) -> dict[str, RatingResult]:
    """Sequentially process each ranking (best group first) as a free-for-all."""
    if not rankings:
        raise ValueError("need at least one ranking")
    group_set = set(rankings[0])
    for r in rankings:
        if set(r) != group_set or len(r) != len(group_set):
            raise ValueError("every ranking must cover the same group set exactly once")
    ratings = {g: RatingResult(mu=mu0, sigma=sigma0) for g in sorted(group_set)}
    for ranking in rankings:
        updated = rate_match([ratings[g] for g in ranking], beta=beta, tau=tau)
        for g, r in zip(ranking, updated):
            ratings[g] = r
    return ratings
