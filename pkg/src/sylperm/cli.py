"""Command-line front end.

Subcommands::

    sylperm gen --n N [--out PATH]
    sylperm per (--file PATH | --sylvester N) [--engine E] [--threads T]
    sylperm verify --n-min A --n-max B [--deep] [--threads T] [--out PATH]
    sylperm bench --n-min A --n-max B [--engines LIST]

Reports are written one JSON object per line. Exit status is 0 on success,
1 when a verification fails and 2 for usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import contextlib
import statistics
import sys
import time
from dataclasses import dataclass

from .engines import SYLVESTER_FAST_ORDERS, Engine, engine_supports, per_sylvester_fast, permanent
from .errors import ConsistencyError, MatrixParseError, SizeLimitError
from .matrix import MAX_SYLVESTER_ORDER, format_matrix, parse_matrix, sylvester
from .verify import STRUCTURE_MAX_ORDER, VerifyReport, campaign

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

AUTO = "auto"
BENCH_REPEATS = 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n_range: tuple[int, int] | None = None
    engine: str = AUTO
    input_path: str | None = None
    output_path: str | None = None
    worker_count: int | None = None  # None means one per CPU
    deep: bool = False
    sylvester_order: int | None = None
    engines: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_range is not None and self.n_range[0] > self.n_range[1]:
            raise UsageError(f"--n-min {self.n_range[0]} is above --n-max {self.n_range[1]}")
        if self.n_range is not None and self.n_range[0] < 0:
            raise UsageError("orders must be nonnegative")
        if self.worker_count is not None and self.worker_count < 1:
            raise UsageError("--threads must be at least 1")


def _threads(text: str) -> int | None:
    if text == AUTO:
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("thread count must be at least 1")
    return value


def _engine_name(text: str) -> str:
    if text == AUTO:
        return text
    try:
        return Engine(text).value
    except ValueError:
        names = ", ".join([AUTO] + [e.value for e in Engine])
        raise argparse.ArgumentTypeError(f"unknown engine {text!r} (choose from {names})") from None


def _engine_list(text: str) -> tuple[str, ...]:
    names = tuple(_engine_name(t.strip()) for t in text.split(",") if t.strip())
    if not names or AUTO in names:
        raise argparse.ArgumentTypeError("--engines takes a comma-separated list of engine names")
    return names


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sylperm", description="Exact permanents of Sylvester-Hadamard matrices.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write H_n in the matrix text format")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--out")

    per = sub.add_parser("per", help="compute one permanent")
    source = per.add_mutually_exclusive_group(required=True)
    source.add_argument("--file")
    source.add_argument("--sylvester", type=int, metavar="N")
    per.add_argument("--engine", type=_engine_name, default=AUTO)
    per.add_argument("--threads", type=_threads, default=None)

    verify = sub.add_parser("verify", help="run the verification campaign")
    verify.add_argument("--n-min", type=int, required=True)
    verify.add_argument("--n-max", type=int, required=True)
    verify.add_argument("--deep", action="store_true", help="add n = 5, minor equality and expansion checks")
    verify.add_argument("--threads", type=_threads, default=None)
    verify.add_argument("--out")

    bench = sub.add_parser("bench", help="time engines on H_n")
    bench.add_argument("--n-min", type=int, required=True)
    bench.add_argument("--n-max", type=int, required=True)
    bench.add_argument("--engines", type=_engine_list, default=tuple(e.value for e in Engine))
    return parser


def parse_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    cmd = args.subcommand
    if cmd == "gen":
        return RunConfig(cmd, n_range=(args.n, args.n), output_path=args.out)
    if cmd == "per":
        return RunConfig(cmd, engine=args.engine, input_path=args.file, worker_count=args.threads,
                         sylvester_order=args.sylvester)
    if cmd == "verify":
        return RunConfig(cmd, n_range=(args.n_min, args.n_max), worker_count=args.threads,
                         deep=args.deep, output_path=args.out)
    return RunConfig(cmd, n_range=(args.n_min, args.n_max), engines=args.engines)


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _cmd_gen(cfg: RunConfig) -> int:
    n = cfg.n_range[0]
    if n > MAX_SYLVESTER_ORDER:
        raise UsageError(f"--n is capped at {MAX_SYLVESTER_ORDER}")
    with _output(cfg.output_path) as out:
        out.write(format_matrix(sylvester(n)))
    return EXIT_OK


def _load_matrix(cfg: RunConfig, engine: str):
    if cfg.sylvester_order is not None:
        n = cfg.sylvester_order
        if not 0 <= n <= MAX_SYLVESTER_ORDER:
            raise UsageError(f"--sylvester must lie in [0, {MAX_SYLVESTER_ORDER}]")
        return sylvester(n)
    try:
        with open(cfg.input_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input_path}: {exc.strerror}") from None
    return parse_matrix(text, sign=engine == Engine.SUM_EXPANSION.value)


def _auto_engine(cfg: RunConfig) -> str:
    lo, hi = SYLVESTER_FAST_ORDERS
    if cfg.sylvester_order is not None and lo <= cfg.sylvester_order <= hi:
        return Engine.SYLVESTER_FAST.value
    return Engine.RYSER.value


def _cmd_per(cfg: RunConfig) -> int:
    engine = _auto_engine(cfg) if cfg.engine == AUTO else cfg.engine
    a = _load_matrix(cfg, engine)
    if engine == Engine.SYLVESTER_FAST.value and cfg.sylvester_order is None:
        raise UsageError("engine sylvester-fast needs --sylvester N")
    value = permanent(a, engine, workers=cfg.worker_count)
    sys.stdout.write(f"{value}\n")
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    lo, hi = cfg.n_range
    if hi > STRUCTURE_MAX_ORDER:
        raise UsageError(f"--n-max is capped at {STRUCTURE_MAX_ORDER}")
    if hi >= 5 and not cfg.deep:
        print("note: theorem checks for n = 5 need --deep", file=sys.stderr)
    failed = False
    with _output(cfg.output_path) as out:
        for report in campaign(lo, hi, deep=cfg.deep, workers=cfg.worker_count):
            out.write(report.to_json() + "\n")
            out.flush()
            failed |= not report.ok
    return EXIT_FAIL if failed else EXIT_OK


def _bench_one(engine: str, s) -> tuple[int, int]:
    def run():
        if engine == Engine.SYLVESTER_FAST.value:
            return per_sylvester_fast(s.order)
        return permanent(s, engine)

    run()
    times = []
    for _ in range(BENCH_REPEATS):
        start = time.perf_counter()
        value = run()
        times.append(time.perf_counter() - start)
    return value, int(round(statistics.median(times) * 1000))


def _cmd_bench(cfg: RunConfig) -> int:
    lo, hi = cfg.n_range
    if hi > MAX_SYLVESTER_ORDER:
        raise UsageError(f"--n-max is capped at {MAX_SYLVESTER_ORDER}")
    failed = False
    for n in range(lo, hi + 1):
        s = sylvester(n)
        reference = None
        for engine in cfg.engines:
            if not engine_supports(engine, s):
                continue
            value, ms = _bench_one(engine, s)
            if reference is None:
                reference = value
            report = VerifyReport("bench", n, s.size, "value", reference, value=value, engine=engine, elapsed_ms=ms)
            failed |= not report.ok
            sys.stdout.write(report.to_json() + "\n")
            sys.stdout.flush()
    return EXIT_FAIL if failed else EXIT_OK


_COMMANDS = {"gen": _cmd_gen, "per": _cmd_per, "verify": _cmd_verify, "bench": _cmd_bench}


def run(argv=None) -> int:
    """Run one subcommand and return the process exit status."""
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else list(argv))
        return _COMMANDS[cfg.subcommand](cfg)
    except (UsageError, MatrixParseError, SizeLimitError) as exc:
        print(f"sylperm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"sylperm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"sylperm: internal check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
