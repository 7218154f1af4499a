"""Low-SNR epsilon-outage capacity of one-relay incremental relaying.

The capacity expressions for decode-and-forward and bursty amplify-and-
forward share the form ``C = L / E(N)`` with a log term ``L`` that does not
depend on the rate. Imperfect feedback enters only through ``E(N)``, which
itself depends on the rate through ``P̄_SD(R)``, so ``C`` is the root of

    R * E(N; R, p) - L = 0,

bracketed by ``[0, L]`` because ``1 <= E(N) <= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .channel import ChannelParams, check_strategy, source_outage_prob
from .errors import DegenerateTargetError, DomainError, SolverError
from .phases import check_probability, expected_phases_one_relay
from .simulation import SimConfig, run

__all__ = [
    "OutageTarget",
    "CapacityResult",
    "Estimate",
    "RESIDUAL_RTOL",
    "MAX_ITER",
    "df_log_term",
    "baf_log_term",
    "phases_at_rate",
    "df_capacity",
    "baf_capacity",
    "outage_probability_empirical",
]

RESIDUAL_RTOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True)
class OutageTarget:
    epsilon: float

    def __post_init__(self):
        eps = check_probability(self.epsilon, "epsilon")
        object.__setattr__(self, "epsilon", eps)


@dataclass(frozen=True)
class CapacityResult:
    rate: float
    expected_phases: float
    iterations: int
    residual: float
    log_term: float
    p_bar_sd: float


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float


def _one_relay(params: ChannelParams):
    if params.num_relays != 1:
        raise DomainError(
            f"capacity expressions are for one relay, got {params.num_relays}; use the phase routes for larger networks"
        )
    return params.var_sd, params.var_sr[0], params.var_rd[0]


def _epsilon(target) -> float:
    eps = target.epsilon if isinstance(target, OutageTarget) else OutageTarget(target).epsilon
    if eps in (0.0, 1.0):
        raise DegenerateTargetError(f"epsilon must lie strictly inside (0, 1), got {eps}")
    return eps


def df_log_term(params: ChannelParams, epsilon) -> float:
    """``log2(1 + SNR sqrt(2 s_sd s_sr s_rd eps / (2 s_rd + s_sr)))``."""
    sd, sr, rd = _one_relay(params)
    eps = check_probability(epsilon, "epsilon")
    return math.log2(1.0 + params.snr * math.sqrt(2.0 * sd * sr * rd * eps / (2.0 * rd + sr)))


def baf_log_term(params: ChannelParams, epsilon) -> float:
    """``log2(1 + SNR sqrt(2 s_sd s_sr s_rd eps / (s_rd + s_sr)))``."""
    sd, sr, rd = _one_relay(params)
    eps = check_probability(epsilon, "epsilon")
    return math.log2(1.0 + params.snr * math.sqrt(2.0 * sd * sr * rd * eps / (rd + sr)))


def phases_at_rate(params: ChannelParams, rate, p) -> float:
    """One-relay ``E(N)`` when the phases run at ``2 * rate``."""
    return expected_phases_one_relay(source_outage_prob(params, rate), p)


def _solve(params: ChannelParams, log_term: float, p) -> CapacityResult:
    p = check_probability(p, "p")

    def defect(r):
        return r * phases_at_rate(params, r, p) - log_term

    if log_term == 0.0:
        return CapacityResult(0.0, phases_at_rate(params, 0.0, p), 0, 0.0, 0.0, 0.0)
    try:
        rate, info = bisect(
            defect, 0.0, log_term, xtol=1e-15 * log_term, rtol=4 * np.finfo(float).eps,
            maxiter=MAX_ITER, full_output=True, disp=False,
        )
    except (RuntimeError, ValueError) as exc:
        raise SolverError(str(exc)) from exc
    residual = abs(defect(rate))
    if not info.converged or residual > RESIDUAL_RTOL * log_term:
        raise SolverError(
            f"bisection stopped after {info.iterations} iterations with residual {residual:.3g}",
            last_iterate=rate,
            iterations=info.iterations,
        )
    return CapacityResult(
        rate=rate,
        expected_phases=phases_at_rate(params, rate, p),
        iterations=info.iterations,
        residual=residual,
        log_term=log_term,
        p_bar_sd=source_outage_prob(params, rate),
    )


def df_capacity(params: ChannelParams, target, p) -> CapacityResult:
    """Epsilon-outage capacity of decode-and-forward with feedback reliability ``p``."""
    return _solve(params, df_log_term(params, _epsilon(target)), p)


def baf_capacity(params: ChannelParams, target, p) -> CapacityResult:
    """Epsilon-outage capacity of bursty amplify-and-forward with feedback reliability ``p``."""
    return _solve(params, baf_log_term(params, _epsilon(target)), p)


def outage_probability_empirical(
    params: ChannelParams, rate, p, strategy, trials: int, rng_state, partitions: int = 1
) -> Estimate:
    """Fraction of simulated blocks in which the destination never decodes."""
    strategy = check_strategy(strategy)
    if int(trials) < 1:
        raise DomainError("trials must be >= 1")
    report = run(SimConfig(params, rate, p, strategy, int(trials), int(rng_state), "shared", partitions))
    return Estimate(report.outage_rate, report.outage_stderr)
