"""Command-line front end for reproducible compression/multiplexing runs.

Subcommands:
    run         generate, compress, multiplex one scenario; emit traces
    sweep       grid of runs over player counts and periods; emit CSV
    report      summarize traces: asymptotes, measured vs analytic, MOS
    profiles    list built-in game profiles

Option precedence is CLI flag > config file (--config or $GAMEMUX_CONFIG)
> built-in default.  The seed is mandatory: outputs are a pure function of
the experiment spec and the seed.
"""

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import analytics, qoe, trace_io
from .errors import ConfigError, GamemuxError, TraceIntegrityError
from .mux import MuxConfig, SIZE_THRESHOLD
from .packet import Direction
from .profiles import BUILTIN_PROFILES, get_profile, load_profile

EXIT_USAGE = 2
EXIT_OUTPUT = 3
EXIT_SCHEMA = 4

CONFIG_ENV = "GAMEMUX_CONFIG"

DEFAULTS = {
    "game": "wow",
    "direction": "c2s",
    "packets_per_player": 5000,
    "threshold": SIZE_THRESHOLD,
    "net_delay_ms": 40.0,
    "net_jitter_ms": 10.0,
    "qoe_model": "logistic",
}


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"config {path}: {exc}") from exc
    unknown = set(doc) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {sorted(unknown)}")
    return doc


def _effective(args, key):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in args._config:
        return args._config[key]
    return DEFAULTS.get(key)


def _resolve_profile(args):
    if getattr(args, "profile_file", None):
        return load_profile(args.profile_file)
    return get_profile(_effective(args, "game")).validate()


def _mux_config(args):
    threshold = _effective(args, "threshold")
    return MuxConfig(period_us=int(round(args.period_ms * 1000)),
                     size_threshold=None if threshold in (0, "none")
                     else int(threshold))


def _config_comments(pairs):
    return [f"{k}={v}" for k, v in pairs]


def _ensure_outdir(path):
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write_probe")
        with open(probe, "w"):
            pass
        os.unlink(probe)
    except OSError as exc:
        print(f"error: output directory {path!r} not writable: {exc}",
              file=sys.stderr)
        sys.exit(EXIT_OUTPUT)


def cmd_run(args):
    profile = _resolve_profile(args)
    direction = Direction.parse(_effective(args, "direction"))
    if args.players < 1:
        raise ConfigError(f"--players must be >= 1, got {args.players}")
    cfg = _mux_config(args)
    packets_per_player = int(_effective(args, "packets_per_player"))
    _ensure_outdir(args.out)

    report, packets, records, bundles = analytics.run_pipeline(
        profile, direction, args.players, packets_per_player, args.seed, cfg)

    comments = _config_comments([
        ("game", profile.name), ("direction", direction.value),
        ("players", args.players),
        ("packets_per_player", packets_per_player),
        ("period_us", cfg.period_us),
        ("size_threshold", cfg.size_threshold),
        ("seed", args.seed),
    ])
    out = args.out
    trace_io.write_csv(os.path.join(out, "native_trace.csv"),
                       trace_io.NATIVE_HEADER_ROW,
                       trace_io.native_rows(packets), comments)
    trace_io.write_csv(os.path.join(out, "bundle_trace.csv"),
                       trace_io.BUNDLE_HEADER_ROW,
                       trace_io.bundle_rows(bundles), comments)
    trace_io.write_csv(os.path.join(out, "delay_trace.csv"),
                       trace_io.DELAY_HEADER_ROW,
                       trace_io.delay_rows(bundles), comments)
    trace_io.write_csv(os.path.join(out, "summary.csv"),
                       trace_io.SWEEP_HEADER_ROW,
                       trace_io.sweep_rows([report]), comments)
    print(f"players={report.n_players} period={report.period_us / 1000:g}ms "
          f"bws={report.bws_measured:.4f} (analytic {report.bws_analytic:.4f}) "
          f"native_pps={report.native_pps:.1f} mux_pps={report.muxed_pps:.1f} "
          f"e_k={report.e_k:.2f}")
    return 0


def _parse_int_list(text):
    try:
        items = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None
    return items


def cmd_sweep(args):
    profile = _resolve_profile(args)
    direction = Direction.parse(_effective(args, "direction"))
    players = _parse_int_list(args.players)
    periods_ms = _parse_int_list(args.periods_ms)
    if not players or not periods_ms:
        raise ConfigError("sweep grid must not be empty")
    _ensure_outdir(args.out)

    threshold = _effective(args, "threshold")
    reports = analytics.sweep(
        profile, direction, players, [p * 1000 for p in periods_ms],
        args.seed,
        packets_per_player=int(_effective(args, "packets_per_player")),
        size_threshold=None if threshold in (0, "none") else int(threshold))

    comments = _config_comments([
        ("game", profile.name), ("direction", direction.value),
        ("players", ",".join(map(str, players))),
        ("periods_ms", ",".join(map(str, periods_ms))),
        ("seed", args.seed),
    ])
    path = os.path.join(args.out, "sweep.csv")
    trace_io.write_csv(path, trace_io.SWEEP_HEADER_ROW,
                       trace_io.sweep_rows(reports), comments)
    print(f"wrote {len(reports)} rows to {path}")
    return 0


def cmd_report(args):
    from .analytics import bws_asymptote
    from .codec import DEFAULT_FIELD_MODEL, expected_reduced_header

    print("per-title saving asymptotes:")
    for name, profile in BUILTIN_PROFILES.items():
        for direction in Direction:
            e_rh = expected_reduced_header(DEFAULT_FIELD_MODEL, direction)
            e_p = profile.traffic(direction).expected_payload
            asym = bws_asymptote(e_p=e_p, e_rh=e_rh)
            print(f"  {name:10s} {direction.value}: E[P]={e_p:7.2f}  "
                  f"max saving {100 * asym:5.2f} %")

    if not args.traces:
        return 0
    try:
        summary = trace_io.read_csv(os.path.join(args.traces, "summary.csv"),
                                    trace_io.SWEEP_HEADER_ROW)
        delays = trace_io.read_csv(
            os.path.join(args.traces, "delay_trace.csv"),
            trace_io.DELAY_HEADER_ROW)
    except TraceIntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(EXIT_SCHEMA)

    model = qoe.get_model(_effective(args, "qoe_model"))
    mux_ms = tuple((int(s) - int(a)) / 1000 for a, s, _ in delays)
    profile_delays = qoe.DelayProfile(
        network_delay_mean_ms=float(_effective(args, "net_delay_ms")),
        network_delay_stdev_ms=float(_effective(args, "net_jitter_ms")),
        mux_delay_samples_ms=mux_ms)
    verdict = qoe.estimate(model, profile_delays)

    print("\nmeasured runs:")
    for row in summary:
        print(f"  {row[0]} players, period {row[1]} ms, {row[2]}: "
              f"BWS {float(row[3]):.4f} measured vs {float(row[4]):.4f} "
              f"analytic; native {float(row[5]):.1f} pps -> "
              f"mux {float(row[6]):.1f} pps")
    print(f"\nQoE ({model.name}, network "
          f"{_effective(args, 'net_delay_ms')} ms mean / "
          f"{_effective(args, 'net_jitter_ms')} ms stdev): "
          f"MOS {verdict.mos:.2f} -> "
          f"{'acceptable' if verdict.acceptable else 'NOT acceptable'}")
    return 0


def cmd_profiles(args):
    if args.action != "list":
        raise ConfigError(f"unknown profiles action {args.action!r}")
    for name, profile in sorted(BUILTIN_PROFILES.items()):
        for direction in Direction:
            t = profile.traffic(direction)
            print(f"{name:10s} {direction.value}: E[P]={t.expected_payload:7.2f}  "
                  f"pps={t.packet_rate:5.2f}  ack_ratio={t.ack_ratio:.2f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gamemux",
        description="Header compression + multiplexing simulator for "
                    "TCP game traffic")
    parser.add_argument("--config", default=os.environ.get(CONFIG_ENV),
                        help="TOML config file with default options "
                             f"(or ${CONFIG_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--game", help="built-in profile name")
    run.add_argument("--profile-file", help="load game profile from TOML")
    run.add_argument("--dir", dest="direction", choices=["c2s", "s2c"])
    run.add_argument("--players", type=int, required=True)
    run.add_argument("--packets-per-player", type=int, dest="packets_per_player")
    run.add_argument("--period-ms", type=float, required=True)
    run.add_argument("--threshold", type=int,
                     help="bundle size threshold in bytes, 0 disables")
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="grid of runs")
    sweep.add_argument("--game", help="built-in profile name")
    sweep.add_argument("--profile-file")
    sweep.add_argument("--dir", dest="direction", choices=["c2s", "s2c"])
    sweep.add_argument("--players", required=True,
                       help="comma-separated player counts")
    sweep.add_argument("--periods-ms", required=True,
                       help="comma-separated periods in ms")
    sweep.add_argument("--packets-per-player", type=int,
                       dest="packets_per_player")
    sweep.add_argument("--threshold", type=int)
    sweep.add_argument("--seed", type=int, required=True)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_sweep)

    report = sub.add_parser("report", help="summarize runs")
    report.add_argument("--traces", help="directory with run outputs")
    report.add_argument("--net-delay-ms", type=float, dest="net_delay_ms")
    report.add_argument("--net-jitter-ms", type=float, dest="net_jitter_ms")
    report.add_argument("--qoe-model", dest="qoe_model")
    report.set_defaults(func=cmd_report)

    profiles = sub.add_parser("profiles", help="profile utilities")
    profiles.add_argument("action", choices=["list"])
    profiles.set_defaults(func=cmd_profiles)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = _load_config(args.config)
        return args.func(args)
    except GamemuxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
