"""Multiplexing: bundle many players' compressed packets into a few
tunnel packets per second.

Everything arriving within one period PE rides one bundle (25-byte tunnel
header once, 2-byte separator per member), sent at the period end; a
bundle also leaves early when it reaches 1350 bytes so it never exceeds
the MTU.
"""

import numpy as np

from gamemux import (Direction, MuxConfig, StreamCompressor,
                     added_delay_stats, generate_scenario, multiplex)
from gamemux.profiles import WOW

direction = Direction.CLIENT_TO_SERVER
packets = generate_scenario(WOW, direction, n_players=100,
                            packets_per_player=1000, seed=3)
records = StreamCompressor(direction).compress_stream(packets)
timed = [(p.arrival_time, r) for p, r in zip(packets, records)]

span_s = (packets[-1].arrival_time - packets[0].arrival_time) / 1e6
print(f"100 WoW uplink players: {len(packets) / span_s:.0f} native pps\n")

print(f"{'PE (ms)':>8s} {'bundles/s':>10s} {'E[k]':>6s} "
      f"{'mean delay':>11s} {'max delay':>10s}")
for period_ms in (10, 20, 60, 100):
    cfg = MuxConfig(period_us=period_ms * 1000)
    bundles = multiplex(timed, cfg)
    stats = added_delay_stats(bundles)
    print(f"{period_ms:8d} {len(bundles) / span_s:10.1f} "
          f"{len(packets) / len(bundles):6.1f} "
          f"{stats.mean_us / 1000:9.1f}ms {stats.max_us / 1000:8.1f}ms")

# The added delay never exceeds PE, and the flush causes show when the
# size threshold kicks in.
cfg = MuxConfig(period_us=100_000)
bundles = multiplex(timed, cfg)
causes = {c: sum(b.flush_cause.value == c for b in bundles)
          for c in ("period", "threshold")}
wire = np.array([b.wire_size for b in bundles])
print(f"\nPE=100ms: {causes['period']} period flushes, "
      f"{causes['threshold']} threshold flushes, "
      f"largest bundle {wire.max()} B (MTU 1500)")
