"""Rayleigh fading links and destination decode events.

Every link gain is zero-mean circularly-symmetric complex Gaussian, so its
squared magnitude is exponential with mean equal to the link variance. All
phases run at spectral efficiency ``2R``, so a phase (or a combination of
phases) succeeds when the accumulated squared gain reaches

    t(R) = (2**(2R) - 1) / SNR.

Combining across phases adds effective squared gains: a decode-and-forward
relay contributes ``|h_rd|^2`` when it decoded the source itself
(``|h_sr|^2 >= t``) and nothing otherwise; an amplify-and-forward relay
contributes ``|h_sr|^2 |h_rd|^2 / (|h_sr|^2 + |h_rd|^2 + 1/SNR)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._random import chunks, split, substreams
from .errors import DomainError, TopologyError
from .phases import DecodeProfile, check_probability

__all__ = [
    "ChannelParams",
    "FadingRealization",
    "Strategy",
    "check_rate",
    "check_strategy",
    "decode_threshold",
    "draw_realization",
    "draw_gains",
    "source_outage_prob",
    "df_decode_after_relay",
    "af_decode_after_relay",
    "af_relay_term",
    "relay_contributions",
    "decode_states",
    "decode_profile",
    "db_to_linear",
]

Strategy = Literal["DF", "AF"]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def check_strategy(strategy) -> str:
    s = str(strategy).upper()
    if s not in ("DF", "AF"):
        raise DomainError(f"strategy must be 'DF' or 'AF', got {strategy!r}")
    return s


def check_rate(rate) -> float:
    r = float(rate)
    if not r >= 0.0 or math.isinf(r):
        raise DomainError(f"rate must be a finite non-negative number, got {rate!r}")
    return r


def _positive(value, name) -> float:
    x = float(value)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return x


@dataclass(frozen=True)
class ChannelParams:
    """Link variances and transmit SNR of a network with ``K`` relays.

    ``var_sr[k]`` and ``var_rd[k]`` belong to relay ``k`` (0-based).
    """

    var_sd: float
    var_sr: tuple[float, ...] = ()
    var_rd: tuple[float, ...] = ()
    snr: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "var_sd", _positive(self.var_sd, "var_sd"))
        var_sr = tuple(_positive(v, "var_sr") for v in np.atleast_1d(self.var_sr))
        var_rd = tuple(_positive(v, "var_rd") for v in np.atleast_1d(self.var_rd))
        if len(var_sr) != len(var_rd):
            raise DomainError(
                f"var_sr and var_rd must both have one entry per relay ({len(var_sr)} != {len(var_rd)})"
            )
        object.__setattr__(self, "var_sr", var_sr)
        object.__setattr__(self, "var_rd", var_rd)
        object.__setattr__(self, "snr", _positive(self.snr, "snr"))

    @property
    def num_relays(self) -> int:
        return len(self.var_sr)

    @classmethod
    def uniform(cls, num_relays: int, snr: float, var_sd=1.0, var_sr=1.0, var_rd=1.0) -> "ChannelParams":
        """All relays share the same source-relay and relay-destination variances."""
        if num_relays < 0:
            raise DomainError("num_relays must be >= 0")
        return cls(var_sd, (var_sr,) * num_relays, (var_rd,) * num_relays, snr)


@dataclass(frozen=True)
class FadingRealization:
    """Squared link gains of one transmission block."""

    g_sd: float
    g_sr: tuple[float, ...] = ()
    g_rd: tuple[float, ...] = ()

    def __post_init__(self):
        g_sr = tuple(float(g) for g in self.g_sr)
        g_rd = tuple(float(g) for g in self.g_rd)
        if len(g_sr) != len(g_rd):
            raise DomainError("g_sr and g_rd must have one entry per relay")
        if not float(self.g_sd) >= 0 or any(not g >= 0 for g in g_sr + g_rd):
            raise DomainError("squared gains must be non-negative")
        object.__setattr__(self, "g_sd", float(self.g_sd))
        object.__setattr__(self, "g_sr", g_sr)
        object.__setattr__(self, "g_rd", g_rd)

    @property
    def num_relays(self) -> int:
        return len(self.g_sr)


def decode_threshold(rate, snr) -> float:
    """Squared gain needed to carry ``2 * rate`` bits per channel use."""
    return math.expm1(2.0 * check_rate(rate) * math.log(2.0)) / _positive(snr, "snr")


def draw_gains(params: ChannelParams, n: int, rng: np.random.Generator):
    """Draw ``n`` independent blocks of squared gains.

    Returns
    -------
    g_sd : ndarray, shape (n,)
    g_sr, g_rd : ndarray, shape (n, K)
    """
    k = params.num_relays
    g_sd = rng.exponential(params.var_sd, size=n)
    g_sr = rng.exponential(1.0, size=(n, k)) * np.asarray(params.var_sr)
    g_rd = rng.exponential(1.0, size=(n, k)) * np.asarray(params.var_rd)
    return g_sd, g_sr, g_rd


def draw_realization(params: ChannelParams, rng_state) -> FadingRealization:
    """One block of squared gains; reproducible for a fixed seed."""
    rng = substreams(rng_state, 1)[0]
    g_sd, g_sr, g_rd = draw_gains(params, 1, rng)
    return FadingRealization(g_sd[0], tuple(g_sr[0]), tuple(g_rd[0]))


def source_outage_prob(params: ChannelParams, rate) -> float:
    """``P̄_SD = Pr(|h_sd|^2 < t(R))``."""
    t = decode_threshold(rate, params.snr)
    return -math.expm1(-t / params.var_sd)


def _relay(realization: FadingRealization, k) -> int:
    if isinstance(k, bool) or not 0 <= int(k) < realization.num_relays or int(k) != k:
        raise TopologyError(f"relay index {k!r} out of range for {realization.num_relays} relay(s)")
    return int(k)


def df_decode_after_relay(realization: FadingRealization, relay_index, rate, snr) -> bool:
    """Destination decodes from the source phase plus DF relay ``relay_index``.

    The caller guarantees the relay decoded the source message.
    """
    k = _relay(realization, relay_index)
    return realization.g_sd + realization.g_rd[k] >= decode_threshold(rate, snr)


def af_relay_term(g_sr, g_rd, snr):
    """Effective squared gain of an amplify-and-forward hop (works on arrays)."""
    g_sr = np.asarray(g_sr, dtype=float)
    g_rd = np.asarray(g_rd, dtype=float)
    num = g_sr * g_rd
    den = g_sr + g_rd + 1.0 / snr
    return num / den


def af_decode_after_relay(realization: FadingRealization, relay_index, rate, snr) -> bool:
    """Destination decodes from the source phase plus AF relay ``relay_index``."""
    k = _relay(realization, relay_index)
    snr = _positive(snr, "snr")
    term = float(af_relay_term(realization.g_sr[k], realization.g_rd[k], snr))
    return realization.g_sd + term >= decode_threshold(rate, snr)


def relay_contributions(g_sr, g_rd, threshold, snr, strategy) -> np.ndarray:
    """Squared gain each relay adds at the destination when it transmits."""
    if check_strategy(strategy) == "DF":
        return np.where(g_sr >= threshold, g_rd, 0.0)
    return af_relay_term(g_sr, g_rd, snr)


def decode_states(g_sd, contributions, threshold) -> np.ndarray:
    """Decode indicator after each phase, shape (n, K + 1).

    Column ``l`` tells whether the destination can decode once phases
    ``1 .. l + 1`` (source, then relays ``0 .. l - 1``) have been combined.
    """
    acc = np.concatenate((g_sd[:, None], contributions), axis=1)
    np.cumsum(acc, axis=1, out=acc)
    return acc >= threshold


def decode_profile(
    params: ChannelParams,
    rate,
    strategy: Strategy,
    trials: int,
    rng_state,
    *,
    conditioning: Literal["path", "unconditional"] = "path",
    p=1.0,
    partitions: int = 1,
    min_samples: int = 30,
) -> DecodeProfile:
    """Level decode probabilities for the phase tree.

    Entry 0 is the exact ``P_SD``. Entries ``1 .. K-1`` are Monte Carlo
    estimates of ``P_RkD`` for ``trials`` fading blocks.

    Parameters
    ----------
    conditioning : {"path", "unconditional"}
        ``"path"`` estimates the probability of decoding after relay ``k``
        given that the protocol actually reached that phase: each block is
        weighted by the probability that feedback with reliability ``p``
        extended it through all earlier levels (with ``p = 1`` this is the
        textbook "all earlier phases failed" condition). This is the
        quantity for which the level recurrence is exact. ``"unconditional"``
        ignores the history and estimates ``Pr(decoded after phase k + 1)``.
    p : float
        Feedback reliability used by ``"path"`` conditioning.
    partitions : int
        Number of independent substreams; the merged estimate is
        deterministic for a fixed seed and partition count.
    min_samples : int
        Entries whose effective sample size falls below this are flagged.
    """
    if int(trials) < 1:
        raise DomainError("trials must be >= 1")
    if conditioning not in ("path", "unconditional"):
        raise DomainError(f"unknown conditioning {conditioning!r}")
    strategy = check_strategy(strategy)
    p = check_probability(p, "p")
    k = params.num_relays
    p_sd = 1.0 - source_outage_prob(params, rate)
    if k <= 1:
        return DecodeProfile((p_sd,), (0.0,), (int(trials),), (False,))

    t = decode_threshold(rate, params.snr)
    levels = k - 1
    # Weighted moments per relay level, merged across partitions by summation.
    sw = np.zeros(levels)
    swx = np.zeros(levels)
    sww = np.zeros(levels)
    swwx = np.zeros(levels)
    swwxx = np.zeros(levels)
    for rng, n_part in zip(substreams(rng_state, partitions), split(int(trials), partitions)):
        for n in chunks(n_part):
            g_sd, g_sr, g_rd = draw_gains(params, n, rng)
            dec = decode_states(g_sd, relay_contributions(g_sr, g_rd, t, params.snr, strategy), t)
            d = dec[:, :k].astype(float)
            if conditioning == "path":
                ext = d * (1.0 - p) + (1.0 - d) * p
                w = np.cumprod(ext, axis=1)[:, :levels]
            else:
                w = np.ones((n, levels))
            x = d[:, 1:k]
            sw += w.sum(axis=0)
            swx += (w * x).sum(axis=0)
            sww += (w * w).sum(axis=0)
            swwx += (w * w * x).sum(axis=0)
            swwxx += (w * w * x * x).sum(axis=0)

    est, se, cnt, low = [p_sd], [0.0], [int(trials)], [False]
    for j in range(levels):
        if sw[j] <= 0:
            # Level never reached: fall back on the previous level (decoding is cumulative).
            est.append(est[-1])
            se.append(math.nan)
            cnt.append(0)
            low.append(True)
            continue
        mean = swx[j] / sw[j]
        var = (swwxx[j] - 2 * mean * swwx[j] + mean * mean * sww[j]) / sw[j] ** 2
        n_eff = sw[j] ** 2 / sww[j]
        est.append(min(1.0, max(0.0, float(mean))))
        se.append(math.sqrt(max(var, 0.0)))
        cnt.append(int(round(n_eff)))
        low.append(n_eff < min_samples)
    return DecodeProfile(tuple(est), tuple(se), tuple(cnt), tuple(low))
