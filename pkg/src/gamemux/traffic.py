"""Synthetic per-player TCP packet stream generation.

Three stages per flow: APDUs and inter-APDU times are drawn from the
profile, APDUs larger than the MSS are split into back-to-back fragments,
and pure TCP ACKs are injected as an independent event stream whose rate
realizes the profile's pure-ACK fraction.

Header fields evolve packet by packet: seq advances by the payload bytes
sent, ipid by one, and ack/window deltas are drawn from the per-direction
field change model so that compressed-header statistics match the measured
behaviour of the real game.
"""

import math

import numpy as np

from .codec import DEFAULT_FIELD_MODEL, sample_field_deltas
from .errors import ProfileError
from .packet import MSS_DEFAULT, U16, U32, Direction, NativePacket

BURST_EPSILON_US = 1    # serialization gap between fragments of one APDU


def fragment_apdu(apdu_len, mss=MSS_DEFAULT):
    """Split an APDU into per-packet payload lengths.

    All fragments equal mss except possibly the last; their sum is the
    APDU length.
    """
    if apdu_len <= 0:
        raise ProfileError(f"APDU length {apdu_len} must be > 0")
    if mss <= 0:
        raise ProfileError(f"MSS {mss} must be > 0")
    n_full, rest = divmod(apdu_len, mss)
    return [mss] * n_full + ([rest] if rest else [])


def _fragment_arrays(times_us, sizes, mss):
    """Vectorized fragmentation of APDU arrays into packet arrays."""
    frags = -(-sizes // mss)                      # ceil division
    total = int(frags.sum())
    starts = np.cumsum(frags) - frags
    within = np.arange(total) - np.repeat(starts, frags)
    pkt_times = np.repeat(times_us, frags) + BURST_EPSILON_US * within
    payloads = np.full(total, mss, dtype=np.int64)
    last_idx = np.cumsum(frags) - 1
    payloads[last_idx] = sizes - (frags - 1) * mss
    return pkt_times, payloads


def generate_player_stream(profile, direction, n_packets, seed,
                           field_model=DEFAULT_FIELD_MODEL,
                           mss=MSS_DEFAULT, flow_id=0):
    """Generate exactly n_packets packets of one flow, time-sorted.

    Deterministic in (profile, direction, n_packets, seed).
    """
    if n_packets <= 0:
        raise ProfileError(f"n_packets {n_packets} must be > 0")
    profile.validate(mss)
    dt = profile.traffic(direction)
    rng = np.random.default_rng(seed)

    seq0, ack0 = (int(x) for x in rng.integers(0, U32, size=2))
    win0, ipid0 = (int(x) for x in rng.integers(0, U16, size=2))

    apdu_rate, ack_rate = dt.event_rates(mss)
    mix_mean = dt.interpacket.mean()
    n_events = n_packets + 16       # each stream alone covers the horizon

    if apdu_rate > 0:
        gaps = dt.interpacket.sample(rng, n_events,
                                     scale=1.0 / (apdu_rate * mix_mean))
        apdu_times = np.round(np.cumsum(gaps) * 1e6).astype(np.int64)
        apdu_sizes = dt.apdu.sample(rng, n_events)
        data_times, data_payloads = _fragment_arrays(apdu_times, apdu_sizes,
                                                     mss)
    else:
        data_times = np.empty(0, dtype=np.int64)
        data_payloads = np.empty(0, dtype=np.int64)

    if ack_rate > 0:
        gaps = dt.interpacket.sample(rng, n_events,
                                     scale=1.0 / (ack_rate * mix_mean))
        ack_times = np.round(np.cumsum(gaps) * 1e6).astype(np.int64)
    else:
        ack_times = np.empty(0, dtype=np.int64)

    times = np.concatenate([data_times, ack_times])
    payloads = np.concatenate([data_payloads,
                               np.zeros(len(ack_times), dtype=np.int64)])
    order = np.argsort(times, kind="stable")
    keep = order[:n_packets]
    times = times[keep]
    payloads = payloads[keep]

    seq = (seq0 + np.concatenate([[0], np.cumsum(payloads[:-1])])) % U32
    da = sample_field_deltas(field_model, direction, "a", n_packets, rng)
    dw = sample_field_deltas(field_model, direction, "w", n_packets, rng)
    ack = (ack0 + np.cumsum(da)) % U32
    window = (win0 + np.cumsum(dw)) % U16
    ipid = (ipid0 + np.arange(1, n_packets + 1)) % U16
    checksum = rng.integers(0, U16, size=n_packets)

    return [NativePacket(arrival_time=int(times[i]), direction=direction,
                         flow_id=flow_id, payload_len=int(payloads[i]),
                         push_flag=payloads[i] > 0, seq=int(seq[i]),
                         ack=int(ack[i]), window=int(window[i]),
                         ipid=int(ipid[i]), is_pure_ack=payloads[i] == 0,
                         checksum=int(checksum[i]))
            for i in range(n_packets)]


def generate_scenario(profile, direction, n_players, packets_per_player,
                      seed, field_model=DEFAULT_FIELD_MODEL,
                      mss=MSS_DEFAULT):
    """Merge n_players independent flows into one time-sorted stream.

    Flow i uses seed + i, so the single-player scenario is identical to
    generate_player_stream for the same seed.  Ties are broken by flow id.
    """
    if n_players < 1:
        raise ProfileError(f"n_players {n_players} must be >= 1")
    flows = [generate_player_stream(profile, direction, packets_per_player,
                                    seed + i, field_model=field_model,
                                    mss=mss, flow_id=i)
             for i in range(n_players)]
    merged = [p for flow in flows for p in flow]
    merged.sort(key=lambda p: (p.arrival_time, p.flow_id))
    return merged


def stream_stats(packets):
    """Mean payload, packet rate, and pure-ACK fraction of a stream."""
    n = len(packets)
    payload = sum(p.payload_len for p in packets)
    acks = sum(p.is_pure_ack for p in packets)
    span_s = (packets[-1].arrival_time - packets[0].arrival_time) / 1e6
    rate = (n - 1) / span_s if span_s > 0 else math.inf
    return {"n": n, "mean_payload": payload / n, "pps": rate,
            "ack_fraction": acks / n}
