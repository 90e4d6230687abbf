"""Period + threshold multiplexing of compressed records into bundles.

A bundle carries the tunnel common header (IP + L2TP + PPP, 25 bytes by
default) once, plus one PPPMux separator (2 bytes) per member record.
Periods tile the timeline with a fixed cadence; everything accumulated in
a period is flushed at its end, and the bundle is flushed early whenever
its wire size reaches the configured threshold.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ProfileError

COMMON_HEADER = 25      # 20 IP + 4 L2TP + 1 PPP
MUX_HEADER = 2          # PPPMux separator per member
SIZE_THRESHOLD = 1350   # keeps bundles under a 1500-byte MTU
MTU = 1500


class FlushCause(Enum):
    PERIOD_END = "period"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class MuxConfig:
    period_us: int
    size_threshold: int | None = SIZE_THRESHOLD   # None disables early flush
    common_header: int = COMMON_HEADER
    mux_header: int = MUX_HEADER
    mtu: int = MTU

    def validate(self):
        if self.period_us <= 0:
            raise ProfileError(f"period {self.period_us} us must be > 0")
        if self.size_threshold is not None and self.size_threshold >= self.mtu:
            raise ProfileError("size threshold must stay below the MTU")
        if self.common_header < 0 or self.mux_header < 0:
            raise ProfileError("header overheads must be non-negative")
        return self


@dataclass
class Bundle:
    """One multiplexed packet: member records plus tunnel overhead."""

    send_time: int
    records: list                # (arrival_time_us, CompressedRecord)
    flush_cause: FlushCause
    wire_size: int

    @property
    def n_records(self):
        return len(self.records)

    def member_delays_us(self):
        return [self.send_time - t for t, _ in self.records]


def bundle_spans(times, member_sizes, cfg):
    """Core bundling policy over parallel arrays of arrival times and
    per-member wire contributions (MH + header + payload).

    Returns (start, stop, send_time, cause, wire_size) tuples; members of
    a bundle are always a contiguous slice of the time-sorted input.
    """
    cfg.validate()
    if hasattr(times, "tolist"):
        times = times.tolist()
    if hasattr(member_sizes, "tolist"):
        member_sizes = member_sizes.tolist()
    pe = cfg.period_us
    ch = cfg.common_header
    threshold = cfg.size_threshold
    if threshold is None:
        threshold = 1 << 62
    spans = []
    start = 0
    wire = ch
    cur_period = 0
    n = len(times)
    for i in range(n):
        t = times[i]
        period = t // pe
        if i > start and period != cur_period:
            spans.append((start, i, (cur_period + 1) * pe,
                          FlushCause.PERIOD_END, wire))
            start = i
            wire = ch
        cur_period = period
        wire += member_sizes[i]
        if wire >= threshold:
            spans.append((start, i + 1, t, FlushCause.THRESHOLD, wire))
            start = i + 1
            wire = ch
    if start < n:
        spans.append((start, n, (cur_period + 1) * pe,
                      FlushCause.PERIOD_END, wire))
    return spans


def multiplex(timed_records, cfg):
    """Bundle a time-sorted stream of (arrival_time_us, record) pairs.

    Each arrival joins the period [k*PE, (k+1)*PE) containing it and is
    sent at the period end, unless the accumulated wire size reaches the
    threshold first, in which case the bundle leaves immediately and
    accumulation restarts within the same period.
    """
    items = list(timed_records)
    mh = cfg.mux_header
    times = [t for t, _ in items]
    sizes = [mh + r.header_len + r.payload_len for _, r in items]
    return [Bundle(send_time=send, records=items[start:stop],
                   flush_cause=cause, wire_size=wire)
            for start, stop, send, cause, wire
            in bundle_spans(times, sizes, cfg)]


def demultiplex(bundles, decompressor):
    """Rebuild native packets from bundles, in send order.

    Delivery time of every member is its bundle's send time.  Codec errors
    propagate annotated with the bundle index.
    """
    out = []
    for i, bundle in enumerate(bundles):
        for _, rec in bundle.records:
            try:
                out.append(decompressor.decompress(rec, bundle.send_time))
            except Exception as exc:
                raise type(exc)(f"bundle {i}: {exc}") from exc
    return out


def drop_bundles(bundles, loss_probability, seed):
    """I.i.d. bundle loss; returns (kept, dropped) lists."""
    rng = np.random.default_rng(seed)
    lost = rng.random(len(bundles)) < loss_probability
    kept = [b for b, dead in zip(bundles, lost) if not dead]
    dropped = [b for b, dead in zip(bundles, lost) if dead]
    return kept, dropped


@dataclass
class DelayStats:
    mean_us: float
    stdev_us: float
    max_us: int
    histogram: dict = field(repr=False, default_factory=dict)


def delay_stats_from_arrays(delays, bucket_us=1000):
    delays = np.asarray(delays)
    if delays.size == 0:
        return DelayStats(0.0, 0.0, 0, {})
    buckets = delays // bucket_us
    uniq, counts = np.unique(buckets, return_counts=True)
    hist = {int(u) * bucket_us: int(c) for u, c in zip(uniq, counts)}
    return DelayStats(mean_us=float(delays.mean()),
                      stdev_us=float(delays.std()),
                      max_us=int(delays.max()),
                      histogram=hist)


def added_delay_stats(bundles, bucket_us=1000):
    """Distribution of send_time - arrival_time over all member packets."""
    delays = np.asarray([d for b in bundles for d in b.member_delays_us()])
    return delay_stats_from_arrays(delays, bucket_us)
