"""Header compression + multiplexing simulator for TCP game traffic.

The pipeline: synthetic per-player packet streams (traffic), IPHC-style
TCP/IP header compression with per-flow contexts (codec), period+threshold
bundling with tunnel overhead accounting (mux), bandwidth/pps analytics
(analytics) and subjective-quality gating (qoe).
"""

from .analytics import (RunReport, SavingsInput, bws, bws_asymptote,
                        measure_run, run_pipeline, sweep)
from .codec import (DEFAULT_FIELD_MODEL, CompressedRecord,
                    CompressionContext, FieldDeltaModel, RecordKind,
                    StreamCompressor, StreamDecompressor, decode, encode,
                    expected_reduced_header, sample_header_size,
                    sample_header_sizes)
from .mux import (Bundle, FlushCause, MuxConfig, added_delay_stats,
                  demultiplex, drop_bundles, multiplex)
from .packet import Direction, NativePacket
from .profiles import (BUILTIN_PROFILES, DiscreteApdu, GameProfile,
                       UniformMixture, WeibullApdu, get_profile,
                       load_profile)
from .qoe import (DelayProfile, LogisticDelayModel, MosEstimate, QoeModel,
                  combine_delay, estimate, get_model, register_model)
from .traffic import fragment_apdu, generate_player_stream, generate_scenario

__version__ = "0.1.0"
