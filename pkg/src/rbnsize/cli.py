"""Command line front end.

Machine-readable results go to stdout; the effective configuration of the
run and all diagnostics go to stderr, so every invocation can be replayed
from its own log.  Exit codes: 0 success, 2 usage, 3 I/O failure,
4 validation or parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from rbnsize import bench, codec, frames, runstats, sim
from rbnsize.energy import (
    frame_energy,
    gamma_dev,
    gamma_size,
    get_profile,
    load_device_profiles,
)

EXIT_IO = 3
EXIT_INVALID = 4


def _config_header(args: argparse.Namespace) -> None:
    shown = {k: v for k, v in vars(args).items()
             if k != "func" and v is not None}
    print(f"# rbnsize {json.dumps(shown, sort_keys=True, default=str)}",
          file=sys.stderr)


def _read_input(args) -> str:
    if getattr(args, "text", None) is not None:
        return args.text
    if getattr(args, "infile", None):
        return Path(args.infile).read_text()
    return sys.stdin.read()


# --- encode / decode ----------------------------------------------------------

def cmd_encode(args) -> int:
    text = _read_input(args).strip()
    if not text:
        print("")
        return 0
    digits = codec.encode_rbn(codec.bits_from_text(text))
    print(codec.rbn_to_text(digits, ascii_minus=args.ascii))
    return 0


def cmd_decode(args) -> int:
    text = _read_input(args).strip()
    if not text:
        print("")
        return 0
    bits = codec.decode_rbn(codec.rbn_from_text(text))
    if bits[-1] != 0:
        raise ValueError("carry slot decodes non-zero: not encoder output")
    print(codec.bits_to_text(bits[:-1]))
    return 0


# --- stats ----------------------------------------------------------------------

def cmd_stats(args) -> int:
    if args.deviation:
        rows = runstats.deviation_report(args.deviation)
        out = (runstats.deviation_to_json(rows) if args.json
               else runstats.deviation_to_csv(rows))
    else:
        table = runstats.run_count_table(args.n)
        out = runstats.table_to_json(table) if args.json else runstats.table_to_csv(table)
    if args.out:
        Path(args.out).write_text(out if out.endswith("\n") else out + "\n")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


# --- energy ---------------------------------------------------------------------

def cmd_energy(args) -> int:
    profiles = load_device_profiles(args.radios)
    if args.profile:
        profiles = {args.profile: get_profile(args.profile, args.radios)}
    if args.price_text is not None:
        profile = next(iter(profiles.values()))
        symbols = codec.rbn_from_text(args.price_text)
        breakdown = frame_energy(symbols, profile, args.mode,
                                 count_transients=args.transients)
        print(json.dumps({
            "profile": profile.name,
            "mode": args.mode,
            "symbols": len(symbols),
            "tx_uj": float(breakdown.tx_uj),
            "idle_uj": float(breakdown.idle_uj),
            "transient_uj": float(breakdown.transient_uj),
            "total_uj": float(breakdown.total_uj),
        }, indent=2))
        return 0
    rows = [
        {
            "device": p.name,
            "gamma_size_pct": round(float(gamma_size(p)) * 100, 2),
            "gamma_dev_pct": round(float(gamma_dev(p, args.n)) * 100, 2),
        }
        for p in profiles.values()
    ]
    if args.json:
        print(json.dumps({"frame_bits": args.n, "rows": rows}, indent=2))
    else:
        print("device,gamma_size_pct,gamma_dev_pct")
        for row in rows:
            print(f"{row['device']},{row['gamma_size_pct']:.2f},"
                  f"{row['gamma_dev_pct']:.2f}")
    return 0


# --- frame ------------------------------------------------------------------------

def _frame_fields(frame) -> dict:
    fields = {
        "dest": str(frame.dest),
        "src": str(frame.src),
        "checksum": f"{frame.checksum:08x}",
    }
    if isinstance(frame, frames.DataFrame):
        fields["type"] = "DATA"
        fields["length"] = frame.length
        fields["payload_hex"] = frame.payload_octets.hex()
        fields["payload_rbn"] = codec.rbn_to_text(frame.payload_digits,
                                                  ascii_minus=True)
    else:
        fields["type"] = frame.kind_name
        fields["length"] = frame.length
    return fields


def cmd_frame_build(args) -> int:
    dest = frames.Address.parse(args.dest)
    src = frames.Address.parse(args.src)
    if args.kind == "data":
        payload = bytes.fromhex(args.payload_hex or "")
        frame = frames.build_data_frame(dest, src, codec.bits_from_octets(payload))
        image = (frame.header_octets() + frame.payload_octets
                 + frame.trailer_octets())
    else:
        frame = frames.build_control_frame(
            {"rts": frames.TYPE_RTS, "cts": frames.TYPE_CTS,
             "ack": frames.TYPE_ACK}[args.kind],
            dest, src, length=args.length)
        image = (frames.PREAMBLE_OCTETS + frame.body_octets()
                 + frame.checksum.to_bytes(4, "big"))
    sidecar = frames.symbols_to_sidecar(frame.symbols())
    if args.out_hex:
        Path(args.out_hex).write_text(image.hex() + "\n")
    if args.out_symbols:
        Path(args.out_symbols).write_text(sidecar + "\n")
    print(json.dumps({"hex": image.hex(), "symbols": sidecar,
                      **_frame_fields(frame)}, indent=2))
    return 0


def _load_symbols(args):
    if args.symbols_text:
        return frames.sidecar_to_symbols(args.symbols_text)
    return frames.sidecar_to_symbols(Path(args.symbols).read_text())


def cmd_frame_parse(args) -> int:
    frame = frames.parse_frame(_load_symbols(args))
    print(json.dumps(_frame_fields(frame), indent=2))
    return 0


def cmd_frame_inspect(args) -> int:
    symbols = _load_symbols(args)
    frame = frames.parse_frame(symbols)
    fields = _frame_fields(frame)
    energized = sum(b - a for a, b in frame.energized_spans())
    for key, value in fields.items():
        print(f"{key:12s} {value}")
    print(f"{'symbols':12s} {len(symbols)}")
    print(f"{'energized':12s} {energized} ({energized / len(symbols):.1%})")
    return 0


# --- bench -------------------------------------------------------------------------

def cmd_bench_run(args) -> int:
    if args.paths:
        report = bench.analyze_suite(args.suite or "custom", args.paths,
                                     args.frame_bits)
    else:
        directory = Path(args.dir) if args.dir else bench.mini_corpus_dir()
        report = bench.analyze_dir(directory, args.frame_bits)
    if args.devices:
        rows = bench.device_report(report, load_device_profiles(args.radios))
        payload = {
            "suite": report.suite,
            "gamma_size_ideal": float(report.gamma_size_ideal),
            "gamma_rbn_ideal": float(report.gamma_rbn_ideal),
            "devices": [
                {"device": r.device,
                 "gamma_size_sim": float(r.gamma_size_sim),
                 "gamma_dev_sim": float(r.gamma_dev_sim)}
                for r in rows
            ],
        }
        print(json.dumps(payload, indent=2))
        return 0
    if args.json:
        print(json.dumps(bench.report_to_dict(report), indent=2))
    else:
        sys.stdout.write(bench.report_to_csv(report))
    return 0


def cmd_bench_sweep(args) -> int:
    data = Path(args.path).read_bytes()
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
    rows = bench.frame_size_sweep(data, sizes)
    if args.json:
        print(json.dumps([{"frame_bits": s, "gamma_rbn_ideal": float(g)}
                          for s, g in rows], indent=2))
    else:
        print("frame_bits,gamma_rbn_ideal")
        for size, gamma in rows:
            print(f"{size},{float(gamma):.6f}")
    return 0


def cmd_bench_download(args) -> int:
    extracted = bench.download_corpora(args.dest, suites=args.suites,
                                       record_checksums=args.record_checksums)
    for suite, path in extracted.items():
        print(f"{suite} -> {path}", file=sys.stderr)
    return 0


# --- simulate -----------------------------------------------------------------------

def cmd_simulate(args) -> int:
    scenario = sim.load_scenario(args.scenario)
    if args.seed is not None:
        scenario = sim.SimScenario(
            nodes=scenario.nodes, traffic=scenario.traffic,
            timing=scenario.timing, profile=scenario.profile,
            rng_seed=args.seed, duration_us=scenario.duration_us,
            comm_range=scenario.comm_range,
            link_delays_us=scenario.link_delays_us,
            count_transients=scenario.count_transients)
    metrics, trace = sim.run(scenario)
    if args.trace_out:
        Path(args.trace_out).write_text(
            "".join(e.to_line() + "\n" for e in trace))
        print(f"trace: {len(trace)} events -> {args.trace_out}", file=sys.stderr)
    print(metrics.to_json())
    return 0


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbnsize",
        description="Silent-zero redundant-binary transmission toolkit")
    parser.add_argument("--json", action="store_true",
                        help="machine JSON output where applicable")
    parser.add_argument("--profile", help="radio profile name")
    parser.add_argument("--seed", type=int, help="simulation seed override")
    parser.add_argument("--radios", help="alternate radio config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="binary text to RBN text")
    p.add_argument("--text", help="bit string, most significant first")
    p.add_argument("--infile", help="read the bit string from a file")
    p.add_argument("--ascii", action="store_true",
                   help="render -1 as T instead of a combining macron")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="RBN text back to binary text")
    p.add_argument("--text", help="digit string; accepts T for -1")
    p.add_argument("--infile")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("stats", help="run-length tables and deviation report")
    p.add_argument("--n", type=int, default=8, help="string length for the table")
    p.add_argument("--deviation", type=int, metavar="N_MAX",
                   help="emit the measured-vs-formula report for n=1..N_MAX")
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("energy", help="radio savings table and stream pricing")
    p.add_argument("--n", type=int, default=1024, help="frame bits")
    p.add_argument("--price-text", help="price this RBN/bit string instead")
    p.add_argument("--mode", default="rbn", choices=["ebt", "size", "rbn"])
    p.add_argument("--transients", action="store_true")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("frame", help="build, parse or inspect frames")
    frame_sub = p.add_subparsers(dest="frame_command", required=True)
    b = frame_sub.add_parser("build")
    b.add_argument("--kind", default="data",
                   choices=["data", "rts", "cts", "ack"])
    b.add_argument("--dest", required=True)
    b.add_argument("--src", required=True)
    b.add_argument("--payload-hex", default="")
    b.add_argument("--length", type=int, default=0,
                   help="length field for control frames")
    b.add_argument("--out-hex")
    b.add_argument("--out-symbols")
    b.set_defaults(func=cmd_frame_build)
    for name, fn in (("parse", cmd_frame_parse), ("inspect", cmd_frame_inspect)):
        q = frame_sub.add_parser(name)
        q.add_argument("--symbols", help="sidecar file, one char per symbol")
        q.add_argument("--symbols-text", help="sidecar text inline")
        q.set_defaults(func=fn)

    p = sub.add_parser("bench", help="corpus framing benchmarks")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)
    r = bench_sub.add_parser("run")
    r.add_argument("--dir", help="suite directory (default: mini corpus)")
    r.add_argument("--paths", nargs="*")
    r.add_argument("--suite", help="suite label for --paths")
    r.add_argument("--frame-bits", type=int, default=bench.DEFAULT_FRAME_BITS)
    r.add_argument("--devices", action="store_true",
                   help="apply measured fractions to the shipped radios")
    r.set_defaults(func=cmd_bench_run)
    s = bench_sub.add_parser("sweep")
    s.add_argument("path")
    s.add_argument("--sizes", help="comma separated frame sizes")
    s.set_defaults(func=cmd_bench_sweep)
    d = bench_sub.add_parser("download")
    d.add_argument("--dest", required=True)
    d.add_argument("--suites", nargs="*")
    d.add_argument("--record-checksums", action="store_true")
    d.set_defaults(func=cmd_bench_download)

    p = sub.add_parser("simulate", help="run a MAC scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trace-out", help="write the event trace here")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _config_header(args)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
