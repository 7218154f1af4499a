"""Monte Carlo simulation of incremental relaying with noisy one-bit feedback.

Each block draws fresh fading gains. The source transmits first; after every
phase the destination sends a truthful ACK/NACK and the transmitters observe
it through a BSC. An observed NACK hands the next phase to the next relay,
an observed ACK (or running out of relays) ends the block. The phase count
follows the *observed* feedback, so a decoded block whose ACK is misread
still spends the next phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ._random import chunks, split, substreams
from .channel import (
    ChannelParams,
    check_rate,
    check_strategy,
    decode_states,
    decode_threshold,
    draw_gains,
    relay_contributions,
    source_outage_prob,
)
from .errors import DomainError
from .phases import (
    DecodeProfile,
    check_probability,
    expected_phases,
    expected_phases_gradient,
    expected_phases_one_relay,
    worthless_feedback_phases,
)

__all__ = [
    "SimConfig",
    "SimReport",
    "ClosureResult",
    "run",
    "empirical_decode_profile",
    "analytic_phases",
    "closure_check",
]

FeedbackObservation = Literal["shared", "independent"]


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines one simulation run.

    ``feedback_observation="shared"`` lets all nodes see one BSC output per
    feedback slot. ``"independent"`` gives the source its own BSC draw; the
    relays still drive the phase sequence, and slots where the source reads
    ACK while the scheduled relay reads NACK are counted as collisions but
    not resolved.
    """

    channel: ChannelParams
    rate: float
    p: float
    strategy: str = "DF"
    blocks: int = 100_000
    seed: int = 0
    feedback_observation: FeedbackObservation = "shared"
    partitions: int = 1

    def __post_init__(self):
        object.__setattr__(self, "rate", check_rate(self.rate))
        object.__setattr__(self, "p", check_probability(self.p, "p"))
        object.__setattr__(self, "strategy", check_strategy(self.strategy))
        if int(self.blocks) < 1 or int(self.blocks) != self.blocks:
            raise DomainError(f"blocks must be a positive integer, got {self.blocks!r}")
        if self.feedback_observation not in ("shared", "independent"):
            raise DomainError(f"unknown feedback observation mode {self.feedback_observation!r}")
        if int(self.partitions) < 1 or int(self.partitions) > int(self.blocks):
            raise DomainError("partitions must lie in [1, blocks]")
        if int(self.seed) < 0:
            raise DomainError("seed must be non-negative")
        object.__setattr__(self, "blocks", int(self.blocks))
        object.__setattr__(self, "partitions", int(self.partitions))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def num_relays(self) -> int:
        return self.channel.num_relays


@dataclass(frozen=True)
class SimReport:
    mean_phases: float
    phases_stderr: float
    outage_rate: float
    outage_stderr: float
    phase_histogram: tuple[int, ...]
    blocks_run: int
    collisions: int = 0


@dataclass
class _Tally:
    num_relays: int
    histogram: np.ndarray = field(init=False)
    outages: int = 0
    collisions: int = 0
    reached: np.ndarray = field(init=False)
    decoded: np.ndarray = field(init=False)

    def __post_init__(self):
        k = self.num_relays
        self.histogram = np.zeros(k + 1, dtype=np.int64)
        self.reached = np.zeros(max(k, 1), dtype=np.int64)
        self.decoded = np.zeros(max(k, 1), dtype=np.int64)


def _simulate_batch(config: SimConfig, n: int, rng: np.random.Generator, tally: _Tally):
    params = config.channel
    k = params.num_relays
    t = decode_threshold(config.rate, params.snr)
    g_sd, g_sr, g_rd = draw_gains(params, n, rng)
    flips = rng.random((n, k)) < 1.0 - config.p
    independent = config.feedback_observation == "independent"
    if independent:
        source_flips = rng.random((n, k)) < 1.0 - config.p

    dec = decode_states(g_sd, relay_contributions(g_sr, g_rd, t, params.snr, config.strategy), t)
    phases = np.ones(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    tally.reached[0] += n
    tally.decoded[0] += int(dec[:, 0].sum())
    for level in range(k):
        nack = ~dec[:, level]
        extend = active & (nack ^ flips[:, level])
        if independent:
            source_sends = ~(nack ^ source_flips[:, level])
            tally.collisions += int((extend & source_sends).sum())
        phases += extend
        active = extend
        if level + 1 < k:
            tally.reached[level + 1] += int(active.sum())
            tally.decoded[level + 1] += int((active & dec[:, level + 1]).sum())

    final = dec[np.arange(n), phases - 1]
    tally.outages += int(n - final.sum())
    tally.histogram += np.bincount(phases - 1, minlength=k + 1)


def _tally(config: SimConfig) -> _Tally:
    tally = _Tally(config.num_relays)
    streams = substreams(config.seed, config.partitions)
    for rng, n_part in zip(streams, split(config.blocks, config.partitions)):
        for n in chunks(n_part):
            _simulate_batch(config, n, rng, tally)
    return tally


def _report(config: SimConfig, tally: _Tally) -> SimReport:
    n = config.blocks
    counts = tally.histogram
    values = np.arange(1, counts.size + 1)
    # Integer moments keep the summary exact and partition-order independent.
    s1 = int((counts * values).sum())
    s2 = int((counts * values * values).sum())
    mean = s1 / n
    var = (s2 - s1 * s1 / n) / (n - 1) if n > 1 else 0.0
    outage = tally.outages / n
    return SimReport(
        mean_phases=mean,
        phases_stderr=math.sqrt(max(var, 0.0) / n),
        outage_rate=outage,
        outage_stderr=math.sqrt(outage * (1.0 - outage) / n),
        phase_histogram=tuple(int(c) for c in counts),
        blocks_run=n,
        collisions=tally.collisions,
    )


def run(config: SimConfig) -> SimReport:
    """Simulate ``config.blocks`` independent blocks and summarise them."""
    return _report(config, _tally(config))


def _profile(tally: _Tally, min_samples: int) -> DecodeProfile:
    levels, stderr, counts, low = [], [], [], []
    for reached, decoded in zip(tally.reached.tolist(), tally.decoded.tolist()):
        if reached == 0:
            levels.append(levels[-1])
            stderr.append(math.nan)
        else:
            q = decoded / reached
            levels.append(q)
            stderr.append(math.sqrt(q * (1.0 - q) / reached))
        counts.append(reached)
        low.append(reached < min_samples)
    return DecodeProfile(tuple(levels), tuple(stderr), tuple(counts), tuple(low))


def empirical_decode_profile(config: SimConfig, min_samples: int = 30) -> DecodeProfile:
    """Path-conditional decode probabilities measured by the simulator.

    Entry ``j`` is the fraction of blocks that reached phase ``j + 1`` in
    which the destination could decode after that phase. Feeding this
    profile to the phase tree reproduces the simulated ``E(N)`` up to
    sampling noise.
    """
    return _profile(_tally(config), min_samples)


def analytic_phases(config: SimConfig) -> float | None:
    """Exact ``E(N)`` when a closed form applies, else None.

    Closed forms exist for zero or one relay and, for any number of relays,
    at ``p = 1/2``.
    """
    if config.feedback_observation != "shared":
        return None
    k = config.num_relays
    if k == 0:
        return 1.0
    if k == 1:
        return expected_phases_one_relay(source_outage_prob(config.channel, config.rate), config.p)
    if config.p == 0.5:
        return worthless_feedback_phases(k)
    return None


@dataclass(frozen=True)
class ClosureResult:
    simulated: float
    simulated_stderr: float
    predicted: float
    predicted_stderr: float

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.simulated_stderr, self.predicted_stderr)

    @property
    def z_score(self) -> float:
        diff = self.simulated - self.predicted
        if self.combined_stderr == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.combined_stderr


def closure_check(config: SimConfig, profile_seed: int | None = None) -> ClosureResult:
    """Compare simulated ``E(N)`` with the tree prediction from a measured profile.

    The profile is measured on an independent stream (``profile_seed``,
    default ``config.seed + 1``) so the two estimates are uncorrelated. The
    prediction error propagates the profile standard errors linearly.
    """
    report = run(config)
    k = config.num_relays
    if k == 0:
        return ClosureResult(report.mean_phases, report.phases_stderr, 1.0, 0.0)
    seed = config.seed + 1 if profile_seed is None else profile_seed
    profile_config = SimConfig(
        config.channel, config.rate, config.p, config.strategy, config.blocks,
        seed, config.feedback_observation, config.partitions,
    )
    profile = empirical_decode_profile(profile_config)
    predicted = expected_phases(profile, config.p, k)
    grad = expected_phases_gradient(profile, config.p, k)
    se = np.nan_to_num(np.asarray(profile.stderr[:k]), nan=0.0)
    return ClosureResult(
        report.mean_phases, report.phases_stderr, predicted, float(np.sqrt(np.sum((grad * se) ** 2)))
    )
