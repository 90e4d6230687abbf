"""Traffic generator tests: fragmentation, calibration, determinism."""

import numpy as np
import pytest

from gamemux.errors import ProfileError
from gamemux.packet import Direction
from gamemux.profiles import (ROM, SHENZHOU, WOW, DirectionTraffic,
                              DiscreteApdu, GameProfile, UniformMixture,
                              WeibullApdu)
from gamemux.traffic import (fragment_apdu, generate_player_stream,
                             generate_scenario, stream_stats)

C2S = Direction.CLIENT_TO_SERVER
S2C = Direction.SERVER_TO_CLIENT


class TestFragmentation:
    def test_examples(self):
        assert fragment_apdu(100) == [100]
        assert fragment_apdu(1460) == [1460]
        assert fragment_apdu(2920) == [1460, 1460]
        assert fragment_apdu(3000) == [1460, 1460, 80]

    def test_conservation(self):
        rng = np.random.default_rng(0)
        for size in rng.integers(1, 10_000, size=200):
            frags = fragment_apdu(int(size))
            assert sum(frags) == size
            assert all(f == 1460 for f in frags[:-1])
            assert 0 < frags[-1] <= 1460

    def test_zero_rejected(self):
        with pytest.raises(ProfileError):
            fragment_apdu(0)


class TestStream:
    def test_exact_packet_count_and_ordering(self):
        pkts = generate_player_stream(WOW, C2S, 2000, seed=1)
        assert len(pkts) == 2000
        times = [p.arrival_time for p in pkts]
        assert times == sorted(times)

    def test_single_packet(self):
        pkts = generate_player_stream(WOW, C2S, 1, seed=1)
        assert len(pkts) == 1
        assert pkts[0].arrival_time >= 0

    def test_determinism(self):
        a = generate_player_stream(WOW, S2C, 500, seed=7)
        b = generate_player_stream(WOW, S2C, 500, seed=7)
        c = generate_player_stream(WOW, S2C, 500, seed=8)
        assert [p.header_fields() for p in a] == \
            [p.header_fields() for p in b]
        assert [p.arrival_time for p in a] == [p.arrival_time for p in b]
        assert [p.arrival_time for p in a] != [p.arrival_time for p in c]

    def test_header_field_evolution(self):
        pkts = generate_player_stream(WOW, C2S, 1000, seed=3)
        for prev, cur in zip(pkts, pkts[1:]):
            assert cur.seq == (prev.seq + prev.payload_len) % (1 << 32)
            assert cur.ipid == (prev.ipid + 1) % (1 << 16)
        for p in pkts:
            assert p.is_pure_ack == (p.payload_len == 0)
            assert p.push_flag == (p.payload_len > 0)
            assert p.wire_size == 40 + p.payload_len

    def test_ack_fractions(self):
        up = generate_player_stream(WOW, C2S, 10_000, seed=11)
        down = generate_player_stream(WOW, S2C, 10_000, seed=11)
        assert stream_stats(up)["ack_fraction"] == pytest.approx(0.56,
                                                                 abs=0.02)
        assert stream_stats(down)["ack_fraction"] == pytest.approx(0.28,
                                                                   abs=0.02)

    def test_rate_and_payload_calibration(self):
        for profile, direction, payload, pps in (
                (WOW, C2S, 8.74, 9.51), (WOW, S2C, 314.0, 6.05),
                (SHENZHOU, C2S, 25.0, 8.0), (ROM, S2C, 99.0, 5.17)):
            stats = stream_stats(
                generate_player_stream(profile, direction, 30_000, seed=5))
            assert stats["mean_payload"] == pytest.approx(payload, rel=0.05)
            assert stats["pps"] == pytest.approx(pps, rel=0.05)

    def test_large_apdus_fragment_with_burst_spacing(self):
        pkts = generate_player_stream(WOW, S2C, 20_000, seed=9)
        full = [i for i, p in enumerate(pkts) if p.payload_len == 1460]
        assert full, "downlink stream should contain MSS-sized fragments"
        i = full[0]
        assert pkts[i + 1].arrival_time == pkts[i].arrival_time + 1


class TestScenario:
    def test_merge_counts_and_order(self):
        pkts = generate_scenario(WOW, C2S, 10, 500, seed=1)
        assert len(pkts) == 5000
        assert {p.flow_id for p in pkts} == set(range(10))
        keys = [(p.arrival_time, p.flow_id) for p in pkts]
        assert keys == sorted(keys)

    def test_single_player_equals_player_stream(self):
        scen = generate_scenario(WOW, C2S, 1, 300, seed=4)
        solo = generate_player_stream(WOW, C2S, 300, seed=4)
        assert [p.header_fields() for p in scen] == \
            [p.header_fields() for p in solo]

    def test_flow_subsequence_matches_its_seed(self):
        scen = generate_scenario(WOW, C2S, 3, 200, seed=10)
        flow2 = [p for p in scen if p.flow_id == 2]
        solo = generate_player_stream(WOW, C2S, 200, seed=12, flow_id=2)
        assert [p.header_fields() for p in flow2] == \
            [p.header_fields() for p in solo]

    def test_zero_players_rejected(self):
        with pytest.raises(ProfileError):
            generate_scenario(WOW, C2S, 0, 100, seed=1)


class TestProfileValidation:
    def test_bad_probabilities(self):
        with pytest.raises(ProfileError):
            DiscreteApdu(sizes=(10, 20), probs=(0.5, 0.6)).validate()

    def test_bad_rate(self):
        bad = GameProfile(
            name="bad",
            c2s=DirectionTraffic(expected_payload=0.0, packet_rate=0.0,
                                 ack_ratio=0.0,
                                 apdu=DiscreteApdu((10,), (1.0,))),
            s2c=WOW.s2c)
        with pytest.raises(ProfileError):
            bad.validate()

    def test_miscalibrated_expected_payload(self):
        bad = DirectionTraffic(expected_payload=100.0, packet_rate=5.0,
                               ack_ratio=0.0,
                               apdu=DiscreteApdu((10,), (1.0,)))
        with pytest.raises(ProfileError):
            bad.validate()

    def test_bad_mixture(self):
        with pytest.raises(ProfileError):
            UniformMixture(components=((0.2, 0.1, 1.0),)).validate()

    def test_weibull_analytics_match_sampling(self):
        apdu = WOW.s2c.apdu
        rng = np.random.default_rng(2)
        draws = apdu.sample(rng, 400_000)
        assert draws.mean() == pytest.approx(apdu.mean(), rel=0.01)
        frags = np.ceil(draws / 1460)
        assert frags.mean() == pytest.approx(apdu.mean_fragments(1460),
                                             rel=0.01)

    def test_builtin_profiles_are_calibrated(self):
        for profile in (WOW, SHENZHOU, ROM):
            profile.validate()
