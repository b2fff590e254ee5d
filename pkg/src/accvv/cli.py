"""Command-line entry point.

Exit codes: 0 when the requested pipeline completed (failing tests are data,
not errors), 1 on usage errors, 2 on harness errors such as an unreadable
config or an unwritable output path.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import socket
import sys
from pathlib import Path
from typing import List, Optional

from accvv import __version__
from accvv.acc_parse import (
    AccError,
    ParseError,
    UnknownClause,
    UnknownDirective,
    default_keywords,
    scan_file,
    validate,
)
from accvv.config import (
    ConfigError,
    HarnessConfig,
    load_config,
    merge_configs,
    override,
    validate_config,
)
from accvv.corpus import discover, filter_cases
from accvv.exporter import ExportError, ExportPlan, write_build_file
from accvv.report import ReportError, aggregate, compare, emit, format_rate, load_report
from accvv.runner import HarnessError, run_suite
from accvv.versions import parse_version

log = logging.getLogger("accvv")

VERBOSITY = {"quiet": logging.WARNING, "normal": logging.INFO, "all": logging.DEBUG}

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _value(text: str) -> str:
    # accept the `-c=file` spelling as well as `-c file`
    return text[1:] if text.startswith("=") else text


def build_parser() -> argparse.ArgumentParser:
    # -verbose may appear before or after the subcommand; the subcommand copy
    # only overrides the top-level value when given
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-verbose", "--verbose", type=_value, choices=sorted(VERBOSITY),
                        default=argparse.SUPPRESS, help="quiet, normal or all")

    parser = _Parser(prog="accvv", description="OpenACC compiler conformance harness")
    parser.add_argument("-verbose", "--verbose", type=_value, choices=sorted(VERBOSITY),
                        default="normal", help="quiet, normal or all")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{run,compare,export,validate}")
    sub.required = True

    run = sub.add_parser("run", parents=[common], help="compile and run the test corpus")
    run.add_argument("-c", "--config", dest="configs", action="append", type=_value,
                     default=[], metavar="FILE",
                     help="configuration file; repeat (or comma-separate) to merge in order")
    run.add_argument("-o", "--output", type=_value, default="results",
                     help="report path stem; the format extension is appended")
    run.add_argument("-env", "--env", dest="env", type=_value, metavar="PATH",
                     help="write the resumable environment snapshot here")
    run.add_argument("-system", "--system", dest="system", type=_value,
                     default=socket.gethostname(), help="label for the system being used")
    run.add_argument("--compiler-id", help="label for the compiler (default: from config)")
    run.add_argument("--resume", metavar="PATH", help="resume from this snapshot")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--timeout", type=int, help="override the configured timeout (seconds)")
    run.add_argument("--each", action="store_true",
                     help="run once per config file instead of merging them")

    cmp_ = sub.add_parser("compare", parents=[common], help="compare json reports")
    cmp_.add_argument("reports", nargs="*", metavar="REPORT")
    cmp_.add_argument("-o", "--output", type=_value, help="also write the matrix as json")

    exp = sub.add_parser("export", parents=[common], help="generate a CMake build file")
    exp.add_argument("corpus")
    exp.add_argument("-o", "--output", type=_value, default="CMakeLists.txt")
    exp.add_argument("--run-prefix", default="", help="command prefix for each test run")
    exp.add_argument("--template", help="custom build-file template")

    val = sub.add_parser("validate", parents=[common],
                         help="check directive usage against a spec version")
    val.add_argument("corpus")
    val.add_argument("--version", dest="spec_version", default="3.2", metavar="MAJOR.MINOR")
    val.add_argument("--profile", default="nvidia", help="device_type keyword profile")
    return parser


def _config_paths(values: List[str]) -> List[str]:
    return [p for value in values for p in value.split(",") if p]


def compiler_id(cfg: HarnessConfig) -> str:
    names = sorted({Path(shlex.split(cmd)[0]).name
                    for lang, cmd in cfg.compilers.items()
                    if lang not in cfg.excluded_languages})
    return "+".join(names) or "unknown"


def _run_one_config(cfg: HarnessConfig, args, stem: str, env_path: Optional[str]) -> Path:
    cases = filter_cases(discover(cfg.test_dir), cfg)
    log.info("%d tests selected under %s", len(cases), cfg.test_dir)
    records, _ = run_suite(cases, cfg, workers=args.workers, snapshot_path=env_path,
                           resume=args.resume)
    report = aggregate(records, args.system, args.compiler_id or compiler_id(cfg))
    out = emit(report, cfg.output_format, stem)
    t = report.totals
    print(f"{report.compiler_id} on {report.system_label}: {t.passed}/{t.total - t.skipped} "
          f"passed ({format_rate(t.pass_rate)}), report written to {out}")
    return out


def cmd_run(args) -> int:
    paths = _config_paths(args.configs)
    if not paths:
        raise UsageError("run requires at least one -c configuration file")
    configs = [load_config(p, partial=True) for p in paths]
    if args.each:
        runs = [(validate_config(c), f"{args.output}-{Path(p).stem}", p) for c, p in zip(configs, paths)]
    else:
        merged = configs[0]
        for overlay in configs[1:]:
            merged = merge_configs(merged, overlay)
        runs = [(validate_config(merged), args.output, None)]
    for cfg, stem, source in runs:
        if args.timeout is not None:
            cfg = override(cfg, timeout=args.timeout)
        env_path = args.env
        if env_path and source is not None:
            env_path = f"{env_path}-{Path(source).stem}"
        _run_one_config(cfg, args, stem, env_path)
    return EXIT_OK


def cmd_compare(args) -> int:
    if len(args.reports) < 2:
        raise UsageError("compare requires at least two report files")
    matrix = compare([load_report(p) for p in args.reports])
    sys.stdout.write(matrix.render_txt())
    if args.output:
        import json
        try:
            Path(args.output).write_text(json.dumps(matrix.to_dict(), indent=2) + "\n")
        except OSError as exc:
            raise ReportError(f"cannot write {args.output}: {exc}") from exc
    return EXIT_OK


def cmd_export(args) -> int:
    root = Path(args.corpus)
    if not root.is_dir():
        raise ExportError(f"corpus directory {root} not found")
    template = Path(args.template).read_text(encoding="utf-8") if args.template else None
    plan = ExportPlan(root, Path(args.output), run_prefix=args.run_prefix, template=template)
    out = write_build_file(plan, discover(root))
    print(f"wrote {out}")
    return EXIT_OK


def validate_corpus(root, version, profile: str) -> List[str]:
    """One line per problem: ``path:line directive clause rule``."""
    root = Path(root)
    version = parse_version(version)
    default_keywords().allowed(profile)
    lines = []
    for case in discover(root):
        text = (root / case.path).read_text(encoding="utf-8", errors="replace")
        result = scan_file(text, case.language, case.path)
        problems = []
        for err in result.errors:
            problems.append((err.line or 0, f"{case.path}:{err.line} - - parse-error({err})"))
        for d in result.directives:
            where = f"{case.path}:{d.location.line}"
            try:
                for v in validate(d, version, profile=profile):
                    problems.append((d.location.line, str(v)))
            except UnknownClause as exc:
                problems.append((d.location.line, f"{where} {exc.directive} {exc.clause} unknown-clause"))
            except UnknownDirective as exc:
                problems.append((d.location.line, f"{where} {exc.directive} - unknown-directive"))
        lines += [text for _, text in sorted(problems, key=lambda p: p[0])]
    return lines


def cmd_validate(args) -> int:
    root = Path(args.corpus)
    if not root.is_dir():
        raise HarnessError(f"corpus directory {root} not found")
    try:
        parse_version(args.spec_version)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for line in validate_corpus(root, args.spec_version, args.profile):
        print(line)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "export": cmd_export, "validate": cmd_validate}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=VERBOSITY[args.verbose], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"accvv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, HarnessError, ReportError, ExportError, AccError, OSError) as exc:
        print(f"accvv: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
