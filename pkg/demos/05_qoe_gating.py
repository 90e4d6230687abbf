"""Quality gating: how large a multiplexing period can the network afford?

The multiplexer's added delay (uniform over the period) combines with the
network's delay and jitter; a logistic MOS model maps the combined
mean + jitter to a 1-5 score, with 3.5 the usual acceptability bar.
Any model implementing the QoeModel interface can be registered instead.
"""

import numpy as np

from gamemux import DelayProfile, LogisticDelayModel, estimate

model = LogisticDelayModel()
rng = np.random.default_rng(5)

print("MOS by network delay x multiplexing period "
      "(network jitter 10 ms, * = acceptable):\n")
periods = list(range(10, 101, 10))
print("net delay " + "".join(f"{p:6d}" for p in periods) + "   (PE, ms)")
for net_ms in (20, 40, 100):
    cells = []
    for period in periods:
        mux = rng.uniform(0, period, size=20_000)
        verdict = estimate(model, DelayProfile(
            network_delay_mean_ms=float(net_ms),
            network_delay_stdev_ms=10.0,
            mux_delay_samples_ms=tuple(mux)))
        cells.append(f"{verdict.mos:5.2f}{'*' if verdict.acceptable else ' '}")
    print(f"{net_ms:6d} ms " + "".join(cells))

print("\nA 20 ms network tolerates any period up to 100 ms; at 100 ms the "
      "period has to stay below roughly 50 ms.")
