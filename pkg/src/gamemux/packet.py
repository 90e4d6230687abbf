"""Core packet-level domain types.

All timestamps are integer microseconds.  A native packet models one
TCP/IPv4 segment of a game flow; its wire size is payload_len plus the
40-byte native TCP/IP header.
"""

from dataclasses import dataclass
from enum import Enum

NATIVE_HEADER = 40          # TCP/IPv4 header, bytes
MTU_DEFAULT = 1500
MSS_DEFAULT = MTU_DEFAULT - NATIVE_HEADER

U16 = 1 << 16
U32 = 1 << 32


class Direction(str, Enum):
    CLIENT_TO_SERVER = "c2s"
    SERVER_TO_CLIENT = "s2c"

    @classmethod
    def parse(cls, text):
        for d in cls:
            if d.value == text:
                return d
        raise ValueError(f"unknown direction {text!r} (use 'c2s' or 's2c')")


@dataclass
class NativePacket:
    """One TCP/IPv4 packet of a game flow."""

    arrival_time: int           # microseconds
    direction: Direction
    flow_id: int
    payload_len: int
    push_flag: bool
    seq: int                    # u32
    ack: int                    # u32
    window: int                 # u16
    ipid: int                   # u16
    is_pure_ack: bool
    checksum: int = 0           # u16, carried verbatim by the codec
    urgent: int = 0             # always 0 for this traffic class

    @property
    def wire_size(self):
        return self.payload_len + NATIVE_HEADER

    def header_fields(self):
        """Fields reconstructed by the decompressor, for equality checks."""
        return (self.seq, self.ack, self.window, self.ipid,
                self.checksum, self.push_flag, self.payload_len)
