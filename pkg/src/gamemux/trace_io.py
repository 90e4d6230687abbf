"""CSV trace emission and validation.

Every file starts with '#'-prefixed provenance comments (the effective
configuration), then the documented header row, then data rows with LF
line endings.  Times are integer microseconds throughout.  Files are
written atomically (temp file + rename).
"""

import csv
import os
import tempfile

from .errors import TraceIntegrityError
from .packet import Direction, NativePacket

NATIVE_HEADER_ROW = ["t_us", "flow", "dir", "payload", "seq", "ack",
                     "window", "ipid", "push"]
BUNDLE_HEADER_ROW = ["send_t_us", "n_records", "wire_size", "cause"]
DELAY_HEADER_ROW = ["t_arrival_us", "t_send_us", "flow"]
SWEEP_HEADER_ROW = ["players", "period_ms", "direction", "bws_measured",
                    "bws_analytic", "native_pps", "mux_pps", "e_k",
                    "mean_delay_ms", "max_delay_ms"]


def write_csv(path, header, rows, comments=()):
    """Atomically write one CSV file with provenance comments."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path, expected_header):
    """Read a trace CSV, skipping comments; the header must match the
    documented schema exactly."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise TraceIntegrityError(f"cannot read {path}: {exc}") from exc
    with fh:
        rows = [r for r in csv.reader(fh)
                if r and not r[0].startswith("#")]
    if not rows or rows[0] != list(expected_header):
        got = rows[0] if rows else []
        raise TraceIntegrityError(
            f"{path}: header {got} does not match {list(expected_header)}")
    return rows[1:]


def native_rows(packets):
    return [[p.arrival_time, p.flow_id, p.direction.value, p.payload_len,
             p.seq, p.ack, p.window, p.ipid, int(p.push_flag)]
            for p in packets]


def packets_from_rows(rows):
    out = []
    for r in rows:
        payload = int(r[3])
        out.append(NativePacket(
            arrival_time=int(r[0]), flow_id=int(r[1]),
            direction=Direction.parse(r[2]), payload_len=payload,
            seq=int(r[4]), ack=int(r[5]), window=int(r[6]), ipid=int(r[7]),
            push_flag=bool(int(r[8])), is_pure_ack=payload == 0))
    return out


def bundle_rows(bundles):
    return [[b.send_time, b.n_records, b.wire_size, b.flush_cause.value]
            for b in bundles]


def delay_rows(bundles):
    return [[t, b.send_time, rec.flow_id]
            for b in bundles for t, rec in b.records]


def sweep_rows(reports):
    return [[r.n_players, r.period_us / 1000, r.direction,
             f"{r.bws_measured:.6f}", f"{r.bws_analytic:.6f}",
             f"{r.native_pps:.3f}", f"{r.muxed_pps:.3f}", f"{r.e_k:.4f}",
             f"{r.mean_delay_us / 1000:.3f}", f"{r.max_delay_us / 1000:.3f}"]
            for r in reports]
