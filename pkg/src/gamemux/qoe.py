"""Pluggable subjective-quality (MOS) estimation from delay and jitter.

The published regression for the studied game is not reproducible here, so
the default model is a documented logistic surrogate over an effective
delay (mean one-way delay plus a jitter penalty), anchored to two
qualitative facts: a 20 ms / 10 ms network stays acceptable for any
multiplexing period up to 100 ms, and a 100 ms / 10 ms network needs the
period kept somewhere below roughly 50 ms.  Any model implementing
QoeModel can be registered and selected by name.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

ACCEPTABLE_MOS = 3.5


@dataclass(frozen=True)
class DelayProfile:
    """Network delay plus per-packet multiplexing delay samples (ms)."""

    network_delay_mean_ms: float
    network_delay_stdev_ms: float
    mux_delay_samples_ms: tuple

    def validate(self):
        if self.network_delay_mean_ms < 0 or self.network_delay_stdev_ms < 0:
            raise ConfigError("network delay moments must be non-negative")
        return self


@dataclass(frozen=True)
class MosEstimate:
    mos: float
    acceptable: bool


def combine_delay(profile):
    """Moments of total per-packet delay (network + multiplexing).

    Means add; variances add under independence of the network and the
    multiplexer.
    """
    profile.validate()
    samples = np.asarray(profile.mux_delay_samples_ms, dtype=float)
    mux_mean = float(samples.mean()) if samples.size else 0.0
    mux_var = float(samples.var()) if samples.size else 0.0
    mean = profile.network_delay_mean_ms + mux_mean
    stdev = math.sqrt(profile.network_delay_stdev_ms ** 2 + mux_var)
    return {"mean_ms": mean, "stdev_ms": stdev}


def sample_combined_delay(profile, n, seed):
    """Empirical total-delay samples; the brute-force cross-check of
    combine_delay."""
    rng = np.random.default_rng(seed)
    net = rng.normal(profile.network_delay_mean_ms,
                     profile.network_delay_stdev_ms, size=n)
    mux = np.asarray(profile.mux_delay_samples_ms, dtype=float)
    if mux.size:
        net = net + rng.choice(mux, size=n)
    return net


class QoeModel:
    """Maps combined (mean delay, jitter) in ms to a MOS in [1, 5]."""

    name = "abstract"

    def mos(self, mean_delay_ms, jitter_ms):
        raise NotImplementedError


class LogisticDelayModel(QoeModel):
    """MOS = 1 + 4 * sigmoid((midpoint - effective delay) / slope), with
    effective delay = mean + jitter_weight * jitter.

    The default midpoint/slope put the 3.5 acceptability boundary at an
    effective delay of 140 ms.
    """

    name = "logistic"

    def __init__(self, midpoint_ms=147.66, slope_ms=15.0, jitter_weight=1.0):
        if slope_ms <= 0 or jitter_weight < 0:
            raise ConfigError("slope must be > 0 and jitter_weight >= 0")
        self.midpoint_ms = midpoint_ms
        self.slope_ms = slope_ms
        self.jitter_weight = jitter_weight

    def mos(self, mean_delay_ms, jitter_ms):
        effective = mean_delay_ms + self.jitter_weight * jitter_ms
        x = (self.midpoint_ms - effective) / self.slope_ms
        raw = 1.0 + 4.0 / (1.0 + math.exp(-x))
        return min(5.0, max(1.0, raw))


_MODELS = {"logistic": LogisticDelayModel}


def register_model(name, factory):
    _MODELS[name] = factory


def get_model(name, **params):
    try:
        factory = _MODELS[name]
    except KeyError:
        raise ConfigError(f"unknown QoE model {name!r}; "
                          f"available: {', '.join(sorted(_MODELS))}") from None
    return factory(**params)


def estimate(model, profile):
    """MOS estimate for the combined network + multiplexing delay."""
    moments = combine_delay(profile)
    mos = model.mos(moments["mean_ms"], moments["stdev_ms"])
    return MosEstimate(mos=mos, acceptable=mos >= ACCEPTABLE_MOS)
