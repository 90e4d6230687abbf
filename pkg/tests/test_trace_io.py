"""Trace CSV round-trip and schema validation tests."""

import os

import pytest

from gamemux.codec import StreamCompressor
from gamemux.errors import TraceIntegrityError
from gamemux.mux import MuxConfig, multiplex
from gamemux.packet import Direction
from gamemux.profiles import WOW
from gamemux.trace_io import (BUNDLE_HEADER_ROW, DELAY_HEADER_ROW,
                              NATIVE_HEADER_ROW, SWEEP_HEADER_ROW,
                              bundle_rows, delay_rows, native_rows,
                              packets_from_rows, read_csv, write_csv)
from gamemux.traffic import generate_scenario

C2S = Direction.CLIENT_TO_SERVER


@pytest.fixture(scope="module")
def pipeline():
    packets = generate_scenario(WOW, C2S, 3, 400, seed=17)
    records = StreamCompressor(C2S).compress_stream(packets)
    bundles = multiplex([(p.arrival_time, r)
                         for p, r in zip(packets, records)],
                        MuxConfig(period_us=30_000))
    return packets, records, bundles


class TestNativeTrace:
    def test_round_trip(self, pipeline, tmp_path):
        packets, _, _ = pipeline
        path = tmp_path / "native.csv"
        write_csv(path, NATIVE_HEADER_ROW, native_rows(packets),
                  comments=["seed=17"])
        back = packets_from_rows(read_csv(path, NATIVE_HEADER_ROW))
        assert len(back) == len(packets)
        for orig, got in zip(packets, back):
            assert got.arrival_time == orig.arrival_time
            assert got.flow_id == orig.flow_id
            assert got.payload_len == orig.payload_len
            assert (got.seq, got.ack, got.window, got.ipid, got.push_flag) \
                == (orig.seq, orig.ack, orig.window, orig.ipid,
                    orig.push_flag)
            assert got.is_pure_ack == orig.is_pure_ack

    def test_file_shape(self, pipeline, tmp_path):
        packets, _, _ = pipeline
        path = tmp_path / "native.csv"
        write_csv(path, NATIVE_HEADER_ROW, native_rows(packets),
                  comments=["a=1", "b=2"])
        raw = path.read_bytes()
        assert b"\r" not in raw                       # LF only
        lines = raw.decode().splitlines()
        assert lines[0] == "# a=1" and lines[1] == "# b=2"
        assert lines[2] == ",".join(NATIVE_HEADER_ROW)
        assert len(lines) == 3 + len(packets)

    def test_no_temp_file_left_behind(self, pipeline, tmp_path):
        packets, _, _ = pipeline
        write_csv(tmp_path / "native.csv", NATIVE_HEADER_ROW,
                  native_rows(packets))
        assert os.listdir(tmp_path) == ["native.csv"]


class TestBundleAndDelayTraces:
    def test_bundle_rows(self, pipeline, tmp_path):
        _, _, bundles = pipeline
        path = tmp_path / "bundles.csv"
        write_csv(path, BUNDLE_HEADER_ROW, bundle_rows(bundles))
        rows = read_csv(path, BUNDLE_HEADER_ROW)
        assert len(rows) == len(bundles)
        assert sum(int(r[1]) for r in rows) == \
            sum(b.n_records for b in bundles)
        assert all(r[3] in ("period", "threshold") for r in rows)

    def test_delay_rows(self, pipeline, tmp_path):
        packets, _, bundles = pipeline
        path = tmp_path / "delays.csv"
        write_csv(path, DELAY_HEADER_ROW, delay_rows(bundles))
        rows = read_csv(path, DELAY_HEADER_ROW)
        assert len(rows) == len(packets)
        for arrival, send, flow in rows:
            assert 0 < int(send) - int(arrival) <= 30_000
            assert 0 <= int(flow) < 3


class TestSchemaValidation:
    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_csv(path, ["alpha", "beta"], [[1, 2]])
        with pytest.raises(TraceIntegrityError):
            read_csv(path, SWEEP_HEADER_ROW)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(TraceIntegrityError):
            read_csv(tmp_path / "absent.csv", NATIVE_HEADER_ROW)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(TraceIntegrityError):
            read_csv(path, NATIVE_HEADER_ROW)
