import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from increlay.channel import (
    ChannelParams,
    FadingRealization,
    af_decode_after_relay,
    af_relay_term,
    decode_profile,
    decode_threshold,
    df_decode_after_relay,
    draw_gains,
    draw_realization,
    source_outage_prob,
)
from increlay.errors import DomainError, TopologyError
from increlay.simulation import SimConfig, empirical_decode_profile
from tests.oracles import sum_of_exponentials_tail

gains = st.floats(0.0, 50.0, allow_nan=False)


class TestParams:
    def test_valid(self):
        params = ChannelParams(1.0, (2.0, 3.0), (0.5, 0.5), snr=4.0)
        assert params.num_relays == 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(var_sd=0.0),
            dict(var_sd=-1.0),
            dict(var_sr=(1.0,), var_rd=()),
            dict(var_sr=(0.0,), var_rd=(1.0,)),
            dict(snr=0.0),
            dict(snr=math.inf),
        ],
    )
    def test_invalid(self, kwargs):
        base = dict(var_sd=1.0, var_sr=(), var_rd=(), snr=1.0)
        base.update(kwargs)
        with pytest.raises(DomainError):
            ChannelParams(**base)

    def test_realization_invariants(self):
        with pytest.raises(DomainError):
            FadingRealization(-0.1)
        with pytest.raises(DomainError):
            FadingRealization(1.0, (1.0,), ())


class TestDraws:
    def test_exponential_median(self):
        rng = np.random.default_rng(11)
        g_sd, _, _ = draw_gains(ChannelParams(1.0), 10**6, rng)
        assert abs(np.mean(g_sd < math.log(2)) - 0.5) < 0.002

    def test_mean_matches_variance(self):
        rng = np.random.default_rng(12)
        _, g_sr, g_rd = draw_gains(ChannelParams(1.0, (2.0,), (0.5,)), 10**6, rng)
        assert g_sr.mean() == pytest.approx(2.0, rel=0.01)
        assert g_rd.mean() == pytest.approx(0.5, rel=0.01)

    def test_deterministic(self):
        params = ChannelParams.uniform(3, snr=2.0)
        assert draw_realization(params, 42) == draw_realization(params, 42)
        assert draw_realization(params, 42) != draw_realization(params, 43)
        assert draw_realization(params, 42).num_relays == 3


class TestSourceOutage:
    def test_zero_rate(self):
        assert source_outage_prob(ChannelParams(1.0, snr=1.0), 0.0) == 0.0

    def test_unit_threshold(self):
        assert source_outage_prob(ChannelParams(1.0, snr=1.0), 0.5) == pytest.approx(1 - math.exp(-1), abs=1e-15)
        assert 1 - math.exp(-1) == pytest.approx(0.6321, abs=1e-4)

    def test_monte_carlo_cross_check(self):
        params = ChannelParams(1.0, snr=1.0)
        g_sd, _, _ = draw_gains(params, 10**6, np.random.default_rng(3))
        t = decode_threshold(0.5, 1.0)
        assert t == pytest.approx(1.0)
        q = 1 - math.exp(-1)
        assert abs(np.mean(g_sd < t) - q) < 3 * math.sqrt(q * (1 - q) / 10**6)

    def test_monotone(self):
        rates = np.linspace(0, 2, 21)
        snrs = np.logspace(-0.5, 4, 25)
        variances = np.logspace(-1, 1, 9)
        by_rate = [source_outage_prob(ChannelParams(1.0, snr=1.0), r) for r in rates]
        by_snr = [source_outage_prob(ChannelParams(1.0, snr=s), 0.5) for s in snrs]
        by_var = [source_outage_prob(ChannelParams(v, snr=1.0), 0.5) for v in variances]
        assert np.all(np.diff(by_rate) > 0)
        assert np.all(np.diff(by_snr) < 0)
        assert np.all(np.diff(by_var) < 0)
        assert by_snr[-1] < 1e-3
        assert all(0 <= v <= 1 for v in by_rate + by_snr + by_var)


class TestDecodeConditions:
    def test_df_example(self):
        real = FadingRealization(0.6, (5.0,), (0.5,))
        assert df_decode_after_relay(real, 0, 0.5, 1.0)

    def test_df_zero_gains(self):
        real = FadingRealization(0.0, (0.0,), (0.0,))
        assert not df_decode_after_relay(real, 0, 0.1, 1.0)

    def test_relay_index_checked(self):
        real = FadingRealization(0.6, (5.0,), (0.5,))
        for bad in (1, -1):
            with pytest.raises(TopologyError):
                df_decode_after_relay(real, bad, 0.5, 1.0)
            with pytest.raises(TopologyError):
                af_decode_after_relay(real, bad, 0.5, 1.0)

    def test_af_dead_source_relay_link(self):
        for g_sd in (0.5, 1.0, 1.5):
            real = FadingRealization(g_sd, (0.0,), (10.0,))
            assert af_decode_after_relay(real, 0, 0.5, 1.0) == (g_sd >= 1.0)

    def test_af_example(self):
        assert af_relay_term(1.0, 1.0, 1.0) == pytest.approx(1 / 3)
        assert not af_decode_after_relay(FadingRealization(0.5, (1.0,), (1.0,)), 0, 0.5, 1.0)

    def test_af_snr_limit(self):
        snrs = np.logspace(-2, 6, 40)
        terms = [float(af_relay_term(2.0, 3.0, s)) for s in snrs]
        assert np.all(np.diff(terms) >= 0)
        assert terms[-1] == pytest.approx(6.0 / 5.0, rel=1e-5)

    @given(gains, gains, st.floats(0.01, 100))
    def test_af_term_bounded_by_weaker_hop(self, g_sr, g_rd, snr):
        assert float(af_relay_term(g_sr, g_rd, snr)) <= min(g_sr, g_rd) + 1e-12

    @given(gains, gains, st.floats(0, 5), st.floats(0, 5), st.floats(0.01, 3))
    def test_df_monotone_in_gains(self, g_sd, g_rd, bump_sd, bump_rd, rate):
        before = df_decode_after_relay(FadingRealization(g_sd, (1.0,), (g_rd,)), 0, rate, 1.0)
        after = df_decode_after_relay(FadingRealization(g_sd + bump_sd, (1.0,), (g_rd + bump_rd,)), 0, rate, 1.0)
        assert after or not before

    def test_df_distribution_matches_hypoexponential_tail(self):
        n = 10**6
        for var_sd, var_rd in [(1.0, 1.0), (1.0, 2.5)]:
            params = ChannelParams(var_sd, (1.0,), (var_rd,), snr=1.0)
            g_sd, _, g_rd = draw_gains(params, n, np.random.default_rng(8))
            hits = np.mean(g_sd + g_rd[:, 0] >= decode_threshold(0.5, 1.0))
            tail = sum_of_exponentials_tail(1.0, var_sd, var_rd)
            assert abs(hits - tail) < 3 * math.sqrt(tail * (1 - tail) / n)

    def test_df_agrees_scalar_and_vector(self):
        params = ChannelParams.uniform(1, snr=1.0)
        for seed in range(50):
            real = draw_realization(params, seed)
            expected = real.g_sd + real.g_rd[0] >= 1.0
            assert df_decode_after_relay(real, 0, 0.5, 1.0) == expected


class TestDecodeProfile:
    def test_no_relays(self):
        prof = decode_profile(ChannelParams(1.0, snr=1.0), 0.5, "AF", 10, 0)
        assert prof.levels == pytest.approx((math.exp(-1),))

    def test_trials_checked(self):
        with pytest.raises(DomainError):
            decode_profile(ChannelParams.uniform(2, 1.0), 0.5, "DF", 0, 0)
        with pytest.raises(DomainError):
            decode_profile(ChannelParams.uniform(2, 1.0), 0.5, "XF", 10, 0)

    def test_erlang_tail_unconditional(self):
        # The source-relay link is so strong that the relay always decodes.
        params = ChannelParams(1.0, (1e9, 1e9), (1.0, 1.0), snr=1.0)
        n = 10**6
        prof = decode_profile(params, 0.5, "DF", n, 21, conditioning="unconditional")
        assert prof.levels[0] == pytest.approx(math.exp(-1))
        oracle = 2 * math.exp(-1)
        assert oracle == pytest.approx(0.7358, abs=1e-4)
        assert abs(prof.levels[1] - oracle) < 3 * prof.stderr[1]
        assert all(0 <= q <= 1 for q in prof.levels)
        assert all(s <= 1 / (2 * math.sqrt(n)) for s in prof.stderr)

    def test_stderr_halves_with_four_times_trials(self):
        params = ChannelParams.uniform(2, snr=1.0)
        small = decode_profile(params, 0.5, "AF", 50_000, 1, conditioning="unconditional")
        large = decode_profile(params, 0.5, "AF", 200_000, 1, conditioning="unconditional")
        assert large.stderr[1] == pytest.approx(small.stderr[1] / 2, rel=0.05)

    def test_nested_events_nondecreasing(self):
        params = ChannelParams(1.0, (1e9,) * 4, (1.0, 0.5, 2.0, 1.0), snr=1.0)
        prof = decode_profile(params, 0.5, "DF", 200_000, 4, conditioning="unconditional")
        assert np.all(np.diff(prof.levels) >= 0)

    @pytest.mark.parametrize("strategy, p", [("DF", 1.0), ("DF", 0.7), ("AF", 0.3)])
    def test_path_conditioning_matches_brute_force_protocol(self, strategy, p):
        params = ChannelParams(1.0, (2.0, 1.0, 0.5), (1.0, 3.0, 1.0), snr=1.0)
        weighted = decode_profile(params, 0.5, strategy, 400_000, 5, p=p)
        sampled = empirical_decode_profile(SimConfig(params, 0.5, p, strategy, 400_000, seed=6))
        for j in range(1, 3):
            se = math.hypot(weighted.stderr[j], sampled.stderr[j])
            assert abs(weighted.levels[j] - sampled.levels[j]) < 4 * se

    def test_perfect_feedback_conditions_on_earlier_failures(self):
        params = ChannelParams(1.0, (1e9, 1e9), (1.0, 1.0), snr=1.0)
        prof = decode_profile(params, 0.5, "DF", 10**6, 9, p=1.0)
        # Pr(X + Y >= 1 | X < 1) for unit exponentials.
        oracle = (2 * math.exp(-1) - math.exp(-1)) / (1 - math.exp(-1))
        assert abs(prof.levels[1] - oracle) < 3 * prof.stderr[1]
        assert prof.counts[1] == pytest.approx(10**6 * (1 - math.exp(-1)), rel=0.01)

    def test_partitioned_determinism(self):
        params = ChannelParams.uniform(3, snr=2.0)
        a = decode_profile(params, 0.3, "AF", 20_000, 77, partitions=4)
        b = decode_profile(params, 0.3, "AF", 20_000, 77, partitions=4)
        c = decode_profile(params, 0.3, "AF", 20_000, 77, partitions=1)
        assert a == b
        assert a.levels != c.levels
        assert a.levels == pytest.approx(c.levels, abs=0.02)

    def test_low_confidence_flag(self):
        params = ChannelParams(1e-6, (1e-6, 1e-6), (1e-6, 1e-6), snr=1.0)
        prof = decode_profile(params, 2.0, "DF", 100, 0, p=1.0)
        assert prof.low_confidence == (False, False)
        params = ChannelParams(100.0, (1.0, 1.0), (1.0, 1.0), snr=100.0)
        prof = decode_profile(params, 0.01, "DF", 100, 0, p=1.0)
        assert prof.low_confidence[1]
