"""Bandwidth savings: measured vs analytic, and the per-title ceiling.

The saving of a run is 1 - muxed bytes / native bytes.  Analytically it
is determined by the mean bundle occupancy E[k], the mean payload E[P]
and the mean compressed header E[RH]; as E[k] grows the saving approaches
a per-title asymptote that depends only on E[P] and E[RH].
"""

from gamemux import (DEFAULT_FIELD_MODEL, Direction, bws_asymptote,
                     expected_reduced_header, sweep)
from gamemux.profiles import BUILTIN_PROFILES, WOW

print("per-title saving ceilings:")
for name, profile in BUILTIN_PROFILES.items():
    for direction in Direction:
        e_rh = expected_reduced_header(DEFAULT_FIELD_MODEL, direction)
        e_p = profile.traffic(direction).expected_payload
        print(f"  {name:10s} {direction.value}: "
              f"{100 * bws_asymptote(e_p=e_p, e_rh=e_rh):5.2f} %")

players = [5, 10, 20, 50, 100]
periods_ms = [10, 20, 50, 100]
reports = sweep(WOW, Direction.CLIENT_TO_SERVER, players,
                [p * 1000 for p in periods_ms], seed=4,
                packets_per_player=2000)
by_key = {(r.n_players, r.period_us // 1000): r for r in reports}

print("\nWoW uplink saving (%) by players x period:")
print(" " * 8 + "".join(f"PE={p:3d}ms " for p in periods_ms))
for n in players:
    row = "".join(f"{100 * by_key[(n, p)].bws_measured:8.1f} "
                  for p in periods_ms)
    print(f"{n:4d} pl {row}")

r = by_key[(100, 100)]
print(f"\n100 players, PE=100ms: E[k]={r.e_k:.1f}, measured saving "
      f"{100 * r.bws_measured:.2f} % vs analytic "
      f"{100 * r.bws_analytic:.2f} % (they reconcile exactly)")
