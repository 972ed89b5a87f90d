"""Command-line entry points.

    pmrsim run    --trace FILE --out FILE [--config FILE] [--script FILE]
                  [--speed F] [--listen HOST:PORT] [--ws HOST:PORT]
    pmrsim gen    --seed N --profile calm|stressed --duration-ms N --out FILE
    pmrsim crc    --hex BYTES
    pmrsim report --history FILE --out-dir DIR [--from-ms N] [--to-ms N]

Exit codes: 0 ok, 2 bad config/trace/script, 3 bind failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import SimConfig, load_config
from .device import ConfigError
from .pmr import PlanError
from .protocol import crc16
from .report import generate_report
from .server import parse_addr, serve
from .simulator import (
    ScriptError,
    SimRun,
    Simulation,
    parse_script,
    run,
    write_log,
)
from .traces import PROFILES, TraceError, gen_trace, load_trace, save_trace

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_BIND = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmrsim",
        description="Deterministic squeeze-ball relaxation trainer simulator",
    )
    parser.add_argument("--version", action="version", version=f"pmrsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replay a pressure trace through the device")
    p_run.add_argument("--trace", required=True, help="trace CSV (t_ms,pressure)")
    p_run.add_argument("--config", help="config file; defaults apply if omitted")
    p_run.add_argument("--out", required=True, help="event log output (JSON lines)")
    p_run.add_argument(
        "--script", help="button script CSV (t_ms,action) with start/cancel/silent"
    )
    p_run.add_argument(
        "--speed",
        type=float,
        default=0.0,
        help="real-time multiplier; 0 runs as fast as possible (default)",
    )
    p_run.add_argument("--listen", metavar="HOST:PORT", help="serve raw frames on TCP")
    p_run.add_argument("--ws", metavar="HOST:PORT", help="serve JSON mirror on WebSocket")
    p_run.set_defaults(func=_cmd_run)

    p_gen = sub.add_parser("gen", help="generate a synthetic pressure trace")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--profile", choices=PROFILES, required=True)
    p_gen.add_argument("--duration-ms", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_crc = sub.add_parser("crc", help="CRC-16 of hex bytes, for wire debugging")
    p_crc.add_argument("--hex", required=True, help="hex bytes, spaces allowed")
    p_crc.set_defaults(func=_cmd_crc)

    p_report = sub.add_parser("report", help="render history charts and daily CSV")
    p_report.add_argument("--history", required=True, help="history file to read")
    p_report.add_argument("--out-dir", required=True)
    p_report.add_argument("--from-ms", type=int, default=None)
    p_report.add_argument("--to-ms", type=int, default=None)
    p_report.set_defaults(func=_cmd_report)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    sim_config = load_config(args.config) if args.config else SimConfig()
    trace = load_trace(args.trace)
    script = []
    if args.script:
        script = parse_script(Path(args.script).read_text(encoding="utf-8"))

    if not args.listen and not args.ws:
        result = run(SimRun(sim_config, trace, script, speed=args.speed))
        write_log(args.out, result.log_lines)
        return EXIT_OK

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    tcp_addr = parse_addr(args.listen) if args.listen else None
    ws_addr = parse_addr(args.ws) if args.ws else None
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:

        def on_line(line: str) -> None:
            out.write(line + "\n")
            out.flush()

        sim = Simulation(
            sim_config, trace, script, on_line=on_line, keep_log=False
        )
        try:
            serve(sim, tcp_addr, ws_addr, speed=args.speed)
        except OSError as exc:
            print(f"pmrsim: cannot bind: {exc}", file=sys.stderr)
            return EXIT_BIND
        finally:
            sim.close()
    return EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    trace = gen_trace(args.seed, args.profile, args.duration_ms)
    save_trace(args.out, trace)
    print(f"wrote {len(trace)} samples to {args.out}")
    return EXIT_OK


def _cmd_crc(args: argparse.Namespace) -> int:
    try:
        data = bytes.fromhex(args.hex)
    except ValueError:
        print(f"pmrsim: not valid hex: {args.hex!r}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print(f"0x{crc16(data):04X}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    paths = generate_report(args.history, args.out_dir, args.from_ms, args.to_ms)
    for name in ("daily_csv", "levels_png", "daily_png"):
        print(f"wrote {paths[name]}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TraceError, ScriptError, PlanError, ValueError) as exc:
        print(f"pmrsim: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"pmrsim: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
