"""Bandwidth-saving formulas and measured run statistics.

The per-period byte budgets are

    bytes_native = E[k] * (NH + E[P])
    bytes_mux    = CH + E[k] * (MH + E[RH] + E[P])

giving the bandwidth saving

    BWS = 1 - CH / (E[k] * (NH + E[P])) - (MH + E[RH] + E[P]) / (NH + E[P])

whose E[k] -> infinity limit is the per-title saving asymptote.
"""

from dataclasses import dataclass

import numpy as np

from .codec import StreamCompressor
from .errors import ProfileError, TraceIntegrityError
from .mux import MuxConfig, bundle_spans, delay_stats_from_arrays, multiplex
from .packet import NATIVE_HEADER
from .traffic import generate_scenario

WARMUP_US = 1_000_000


@dataclass(frozen=True)
class SavingsInput:
    e_k: float
    e_p: float
    e_rh: float
    nh: int = NATIVE_HEADER
    ch: int = 25
    mh: int = 2

    def validate(self):
        if self.e_k <= 0:
            raise ProfileError("E[k] must be > 0")
        if self.nh + self.e_p <= 0:
            raise ProfileError("NH + E[P] must be > 0")
        if min(self.e_p, self.e_rh, self.nh, self.ch, self.mh) < 0:
            raise ProfileError("savings inputs must be non-negative")
        return self


def bws(inputs):
    """Bandwidth saving for a finite mean bundle occupancy E[k].

    May be negative when the tunnel overhead exceeds the compression gain.
    """
    inputs.validate()
    per_packet = inputs.nh + inputs.e_p
    return (1.0
            - inputs.ch / (inputs.e_k * per_packet)
            - (inputs.mh + inputs.e_rh + inputs.e_p) / per_packet)


def bws_asymptote(e_p, e_rh, nh=NATIVE_HEADER, mh=2):
    """Maximum achievable saving, reached as E[k] grows without bound."""
    if nh + e_p <= 0:
        raise ProfileError("NH + E[P] must be > 0")
    return 1.0 - (mh + e_rh + e_p) / (nh + e_p)


@dataclass
class RunReport:
    """Measured and analytic statistics of one simulated run."""

    n_players: int
    period_us: int
    direction: str
    n_packets: int
    n_bundles: int
    native_bytes: int
    muxed_bytes: int
    native_pps: float
    muxed_pps: float
    e_k: float
    e_p: float
    e_rh: float
    bws_measured: float
    bws_analytic: float
    mean_delay_us: float
    max_delay_us: int
    oversized_bundles: int


def _windowed_rate(times, warmup_us):
    times = np.asarray(times)
    if times.size < 2:
        return 0.0
    t0 = times[0] + warmup_us
    t1 = times[-1]
    if t1 <= t0:
        t0 = times[0]
    count = int(np.count_nonzero((times >= t0) & (times <= t1)))
    return count / ((t1 - t0) / 1e6) if t1 > t0 else 0.0


@dataclass
class _StreamArrays:
    """Per-scenario columns shared across the period axis of a sweep."""

    direction: str
    n_players: int
    times: np.ndarray
    payloads: np.ndarray
    header_lens: np.ndarray

    @classmethod
    def from_run(cls, packets, records, n_players):
        if len(records) != len(packets):
            raise TraceIntegrityError(
                f"{len(packets)} packets vs {len(records)} records")
        return cls(
            direction=packets[0].direction.value, n_players=n_players,
            times=np.asarray([p.arrival_time for p in packets],
                             dtype=np.int64),
            payloads=np.asarray([p.payload_len for p in packets],
                                dtype=np.int64),
            header_lens=np.asarray([r.header_len for r in records],
                                   dtype=np.int64))

    def member_sizes(self, cfg):
        return self.payloads + self.header_lens + cfg.mux_header


def _measure(arrays, spans, cfg, warmup_us):
    n = len(arrays.times)
    if spans and spans[-1][1] != n:
        raise TraceIntegrityError(
            f"bundles cover {spans[-1][1]} of {n} packets")
    send = np.asarray([s[2] for s in spans], dtype=np.int64)
    wire = np.asarray([s[4] for s in spans], dtype=np.int64)
    counts = np.asarray([s[1] - s[0] for s in spans], dtype=np.int64)

    native_bytes = int((arrays.payloads + NATIVE_HEADER).sum())
    muxed_bytes = int(wire.sum())
    e_p = float(arrays.payloads.mean())
    e_rh = float(arrays.header_lens.mean())
    e_k = n / len(spans) if spans else 0.0

    delays = np.repeat(send, counts) - arrays.times
    stats = delay_stats_from_arrays(delays)

    measured = 1.0 - muxed_bytes / native_bytes
    analytic = bws(SavingsInput(e_k=e_k, e_p=e_p, e_rh=e_rh,
                                ch=cfg.common_header, mh=cfg.mux_header))
    return RunReport(
        n_players=arrays.n_players, period_us=cfg.period_us,
        direction=arrays.direction, n_packets=n, n_bundles=len(spans),
        native_bytes=native_bytes, muxed_bytes=muxed_bytes,
        native_pps=_windowed_rate(arrays.times, warmup_us),
        muxed_pps=_windowed_rate(send, warmup_us),
        e_k=e_k, e_p=e_p, e_rh=e_rh, bws_measured=measured,
        bws_analytic=analytic, mean_delay_us=stats.mean_us,
        max_delay_us=stats.max_us,
        oversized_bundles=int(np.count_nonzero(wire > cfg.mtu)))


def measure_run(packets, records, bundles, cfg, n_players=1,
                warmup_us=WARMUP_US):
    """Build a RunReport from a native stream, its compressed records and
    the bundles produced by the multiplexer."""
    bundled = sum(b.n_records for b in bundles)
    if bundled != len(packets):
        raise TraceIntegrityError(
            f"packet counts disagree: {len(packets)} native, "
            f"{bundled} bundled")
    arrays = _StreamArrays.from_run(packets, records, n_players)
    spans = []
    stop = 0
    for b in bundles:
        start, stop = stop, stop + b.n_records
        spans.append((start, stop, b.send_time, b.flush_cause, b.wire_size))
    return _measure(arrays, spans, cfg, warmup_us)


def run_pipeline(profile, direction, n_players, packets_per_player, seed,
                 cfg, warmup_us=WARMUP_US):
    """Generate, compress, multiplex and measure one scenario."""
    packets = generate_scenario(profile, direction, n_players,
                                packets_per_player, seed)
    records = StreamCompressor(direction).compress_stream(packets)
    timed = [(p.arrival_time, r) for p, r in zip(packets, records)]
    bundles = multiplex(timed, cfg)
    return measure_run(packets, records, bundles, cfg,
                       n_players=n_players, warmup_us=warmup_us), \
        packets, records, bundles


def sweep(profile, direction, players, periods_us, seed,
          packets_per_player=5000, size_threshold=None, warmup_us=WARMUP_US):
    """Grid of RunReports over player counts and multiplexing periods.

    Generation and compression are shared across the period axis of each
    player count.  size_threshold of None keeps the module default.
    """
    if not players or not periods_us:
        raise ProfileError("sweep needs non-empty player and period lists")
    reports = []
    for n_players in players:
        packets = generate_scenario(profile, direction, n_players,
                                    packets_per_player, seed)
        records = StreamCompressor(direction).compress_stream(packets)
        arrays = _StreamArrays.from_run(packets, records, n_players)
        for period_us in periods_us:
            kwargs = {} if size_threshold is None else \
                {"size_threshold": size_threshold}
            cfg = MuxConfig(period_us=period_us, **kwargs)
            spans = bundle_spans(arrays.times, arrays.member_sizes(cfg), cfg)
            reports.append(_measure(arrays, spans, cfg, warmup_us))
    return reports
