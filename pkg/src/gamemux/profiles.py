"""Per-game, per-direction traffic parameters.

A profile describes, for each direction, the total packet rate (pure ACKs
included), the pure-ACK fraction, the APDU size model (discrete table or
rounded Weibull) and the shape of the inter-APDU time distribution (a
mixture of uniform intervals).  The mixture is stored as a canonical shape;
the generator rescales it so that the event rates hit the profile targets.

Profiles can be loaded from TOML files, one game per file; unknown keys
are rejected.  See docs/profiles.md for the schema.
"""

import math
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:         # Python 3.10
    import tomli as tomllib

from .errors import ConfigError, ProfileError
from .packet import MSS_DEFAULT, Direction

_PROB_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteApdu:
    """APDU drawn from a small table of (size, probability) entries."""

    sizes: tuple
    probs: tuple

    def validate(self):
        if len(self.sizes) != len(self.probs) or not self.sizes:
            raise ProfileError("discrete APDU table: sizes/probs mismatch")
        if any(s <= 0 for s in self.sizes):
            raise ProfileError("APDU sizes must be strictly positive")
        if any(p < 0 for p in self.probs) or \
                abs(sum(self.probs) - 1.0) > _PROB_TOL:
            raise ProfileError(
                f"APDU probabilities {self.probs} must sum to 1")

    def sample(self, rng, n):
        return rng.choice(np.asarray(self.sizes, dtype=np.int64),
                          size=n, p=self.probs)

    def mean(self):
        return float(sum(s * p for s, p in zip(self.sizes, self.probs)))

    def mean_fragments(self, mss):
        return float(sum(math.ceil(s / mss) * p
                         for s, p in zip(self.sizes, self.probs)))


@dataclass(frozen=True)
class WeibullApdu:
    """APDU of max(1, round(scale * Weibull(shape))) bytes."""

    shape: float
    scale: float

    def validate(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ProfileError("Weibull shape and scale must be positive")

    def sample(self, rng, n):
        raw = np.round(self.scale * rng.weibull(self.shape, n))
        return np.maximum(1, raw).astype(np.int64)

    def _tail(self, x):
        # P(APDU > x) for x >= 1
        return math.exp(-((x + 0.5) / self.scale) ** self.shape)

    def mean(self):
        m = np.arange(1, max(100, int(40 * self.scale)))
        tail = np.exp(-(((m + 0.5) / self.scale) ** self.shape))
        return float(1.0 + tail.sum())

    def mean_fragments(self, mss):
        total, j = 1.0, 1
        while True:
            t = self._tail(j * mss)
            total += t
            j += 1
            if t < 1e-14:
                return total


@dataclass(frozen=True)
class UniformMixture:
    """Mixture of uniform intervals; components are (lo, hi, weight)."""

    components: tuple

    def validate(self):
        if not self.components:
            raise ProfileError("empty inter-packet mixture")
        w = 0.0
        for lo, hi, weight in self.components:
            if lo < 0 or hi < lo or weight < 0:
                raise ProfileError(
                    f"bad mixture component ({lo}, {hi}, {weight})")
            w += weight
        if abs(w - 1.0) > _PROB_TOL:
            raise ProfileError(f"mixture weights sum to {w}, expected 1")
        if self.mean() <= 0:
            raise ProfileError("mixture mean must be positive")

    def mean(self):
        return float(sum((lo + hi) / 2 * w for lo, hi, w in self.components))

    def sample(self, rng, n, scale=1.0):
        comp = rng.choice(len(self.components), size=n,
                          p=[w for _, _, w in self.components])
        lo = np.asarray([c[0] for c in self.components])[comp]
        hi = np.asarray([c[1] for c in self.components])[comp]
        return scale * rng.uniform(lo, hi)


# Canonical inter-event mixture shape (three uniform intervals); the
# generator rescales it to the per-stream target rate.
DEFAULT_MIXTURE = UniformMixture(components=(
    (0.05, 0.15, 0.5),
    (0.15, 0.45, 0.3),
    (0.30, 0.90, 0.2),
))


@dataclass(frozen=True)
class DirectionTraffic:
    """Traffic parameters of one direction of one game."""

    expected_payload: float     # mean TCP payload over all packets, ACKs as 0
    packet_rate: float          # packets per second, pure ACKs included
    ack_ratio: float            # fraction of packets that are pure ACKs
    apdu: object                # DiscreteApdu | WeibullApdu
    interpacket: UniformMixture = DEFAULT_MIXTURE

    def validate(self, mss=MSS_DEFAULT):
        if self.packet_rate <= 0:
            raise ProfileError(f"packet rate {self.packet_rate} must be > 0")
        if not 0.0 <= self.ack_ratio <= 1.0:
            raise ProfileError(f"ack ratio {self.ack_ratio} not in [0, 1]")
        self.apdu.validate()
        self.interpacket.validate()
        implied = self.implied_mean_payload(mss)
        if self.expected_payload > 0 and \
                abs(implied - self.expected_payload) > \
                0.01 * self.expected_payload + 1e-6:
            raise ProfileError(
                f"profile not calibrated: model implies mean payload "
                f"{implied:.3f}, expected_payload says {self.expected_payload}")

    def implied_mean_payload(self, mss=MSS_DEFAULT):
        """Mean payload over all packets implied by the APDU model."""
        ef = self.apdu.mean_fragments(mss)
        return (1.0 - self.ack_ratio) * self.apdu.mean() / ef

    def event_rates(self, mss=MSS_DEFAULT):
        """(APDU event rate, pure-ACK event rate) hitting packet_rate."""
        ack_rate = self.ack_ratio * self.packet_rate
        data_pkt_rate = (1.0 - self.ack_ratio) * self.packet_rate
        return data_pkt_rate / self.apdu.mean_fragments(mss), ack_rate


@dataclass(frozen=True)
class GameProfile:
    name: str
    c2s: DirectionTraffic
    s2c: DirectionTraffic

    def traffic(self, direction):
        return self.c2s if direction is Direction.CLIENT_TO_SERVER else self.s2c

    def validate(self, mss=MSS_DEFAULT):
        self.c2s.validate(mss)
        self.s2c.validate(mss)
        return self


# ---------------------------------------------------------------------------
# Built-in profiles
#
# Published measurements pin, per direction, the mean payload over all
# packets, the packet rate and (for WoW) the pure-ACK fractions.  The free
# parameters below (uplink size table, downlink Weibull) are calibrated so
# the pinned aggregates come out exactly:
#   uplink data-packet mean  8.74 / 0.44  = 19.8636 bytes
#   downlink data-packet mean 314 / 0.72  = 436.111 bytes (after MSS
#   fragmentation, hence the scale solved against the rounded-Weibull
#   fragment expectation).
WOW = GameProfile(
    name="wow",
    c2s=DirectionTraffic(
        expected_payload=8.74, packet_rate=9.51, ack_ratio=0.56,
        apdu=DiscreteApdu(sizes=(10, 20, 40),
                          probs=(0.31364, 0.53636, 0.15)),
    ),
    s2c=DirectionTraffic(
        expected_payload=314.0, packet_rate=6.05, ack_ratio=0.28,
        apdu=WeibullApdu(shape=1.2, scale=473.411042),
    ),
)

# Only mean payload and rate are published for these two titles; payloads
# use a single-size table.
SHENZHOU = GameProfile(
    name="shenzhou",
    c2s=DirectionTraffic(expected_payload=25.0, packet_rate=8.0,
                         ack_ratio=0.0,
                         apdu=DiscreteApdu(sizes=(25,), probs=(1.0,))),
    s2c=DirectionTraffic(expected_payload=114.0, packet_rate=8.0,
                         ack_ratio=0.0,
                         apdu=DiscreteApdu(sizes=(114,), probs=(1.0,))),
)

ROM = GameProfile(
    name="rom",
    c2s=DirectionTraffic(expected_payload=33.0, packet_rate=4.17,
                         ack_ratio=0.0,
                         apdu=DiscreteApdu(sizes=(33,), probs=(1.0,))),
    s2c=DirectionTraffic(expected_payload=99.0, packet_rate=5.17,
                         ack_ratio=0.0,
                         apdu=DiscreteApdu(sizes=(99,), probs=(1.0,))),
)

BUILTIN_PROFILES = {p.name: p for p in (WOW, SHENZHOU, ROM)}


def get_profile(name):
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        raise ConfigError(
            f"unknown game profile {name!r}; "
            f"available: {', '.join(sorted(BUILTIN_PROFILES))}") from None


# ---------------------------------------------------------------------------
# TOML loading


def _reject_unknown(table, allowed, where):
    unknown = set(table) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")


def _parse_apdu(table, where):
    _reject_unknown(table, {"kind", "sizes", "probs", "shape", "scale"}, where)
    kind = table.get("kind")
    if kind == "discrete":
        return DiscreteApdu(sizes=tuple(table["sizes"]),
                            probs=tuple(table["probs"]))
    if kind == "weibull":
        return WeibullApdu(shape=float(table["shape"]),
                           scale=float(table["scale"]))
    raise ConfigError(f"{where}: apdu kind must be 'discrete' or 'weibull'")


def _parse_direction(table, where):
    _reject_unknown(table, {"expected_payload", "packet_rate", "ack_ratio",
                            "apdu", "interpacket"}, where)
    mixture = DEFAULT_MIXTURE
    if "interpacket" in table:
        mixture = UniformMixture(components=tuple(
            (float(lo), float(hi), float(w))
            for lo, hi, w in table["interpacket"]))
    return DirectionTraffic(
        expected_payload=float(table.get("expected_payload", 0.0)),
        packet_rate=float(table["packet_rate"]),
        ack_ratio=float(table.get("ack_ratio", 0.0)),
        apdu=_parse_apdu(table["apdu"], f"{where}.apdu"),
        interpacket=mixture,
    )


def load_profile(path):
    """Load and validate a game profile from a TOML file."""
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    _reject_unknown(doc, {"name", "c2s", "s2c"}, str(path))
    try:
        profile = GameProfile(name=str(doc["name"]),
                              c2s=_parse_direction(doc["c2s"], "c2s"),
                              s2c=_parse_direction(doc["s2c"], "s2c"))
    except KeyError as exc:
        raise ConfigError(f"{path}: missing key {exc}") from exc
    return profile.validate()
