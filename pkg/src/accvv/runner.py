"""Compile-and-run orchestration with timeouts and resumable snapshots."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import shlex
import signal
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from accvv.config import HarnessConfig, MissingCompiler
from accvv.corpus import TestCase

log = logging.getLogger(__name__)

SNAPSHOT_SCHEMA_VERSION = 1
SPAWN_FAILURE_EXIT = 127

COMPILE_STATUSES = ("ok", "error", "timeout")
EXECUTE_STATUSES = ("pass", "fail", "timeout", "skipped")
RECORD_STATUSES = ("pass", "fail", "compile_error", "timeout", "skipped")


class HarnessError(Exception):
    """Problems with the harness itself, as opposed to test outcomes."""


class SpawnError(HarnessError):
    pass


class SnapshotMismatch(HarnessError):
    pass


@dataclass(frozen=True)
class ProcessResult:
    status: str
    exit_code: Optional[int]
    duration_ms: int
    stdout: str = ""
    stderr: str = ""
    command: str = ""
    binary: Optional[str] = None

    def to_dict(self) -> dict:
        data = {
            "status": self.status,
            "exit_code": self.exit_code,
            "duration_ms": self.duration_ms,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "command": self.command,
        }
        if self.binary is not None:
            data["binary"] = self.binary
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ProcessResult":
        return cls(
            status=data["status"],
            exit_code=data.get("exit_code"),
            duration_ms=data.get("duration_ms", 0),
            stdout=data.get("stdout", ""),
            stderr=data.get("stderr", ""),
            command=data.get("command", ""),
            binary=data.get("binary"),
        )


@dataclass(frozen=True)
class RunRecord:
    case: TestCase
    compile: Optional[ProcessResult] = None
    execute: Optional[ProcessResult] = None
    skip_reason: Optional[str] = None

    @property
    def status(self) -> str:
        if self.compile is None:
            return "skipped"
        if self.compile.status == "error":
            return "compile_error"
        if self.compile.status == "timeout":
            return "timeout"
        if self.execute is None:
            return "skipped"
        return self.execute.status

    def to_dict(self) -> dict:
        return {
            "case": self.case.to_dict(),
            "status": self.status,
            "compile": self.compile.to_dict() if self.compile else None,
            "execute": self.execute.to_dict() if self.execute else None,
            "skip_reason": self.skip_reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            case=TestCase.from_dict(data["case"]),
            compile=ProcessResult.from_dict(data["compile"]) if data.get("compile") else None,
            execute=ProcessResult.from_dict(data["execute"]) if data.get("execute") else None,
            skip_reason=data.get("skip_reason"),
        )


@dataclass
class EnvSnapshot:
    config_digest: str
    cases: List[Tuple[str, bool]] = field(default_factory=list)
    records: List[RunRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SNAPSHOT_SCHEMA_VERSION,
            "kind": "snapshot",
            "config_digest": self.config_digest,
            "cases": [{"path": p, "done": d} for p, d in self.cases],
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnvSnapshot":
        return cls(
            config_digest=data["config_digest"],
            cases=[(c["path"], bool(c["done"])) for c in data.get("cases", [])],
            records=[RunRecord.from_dict(r) for r in data.get("records", [])],
        )

    def save(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp.write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise HarnessError(f"cannot write snapshot {path}: {exc}") from exc

    @classmethod
    def load(cls, path) -> "EnvSnapshot":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _kill_tree(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    except AttributeError:  # no process groups on this platform
        proc.kill()


def _spawn(args, timeout: float, *, shell: bool = False, env=None, cwd=None):
    """Run a command, killing its whole process group on timeout.

    Returns ``(exit_code, stdout, stderr, duration_ms, timed_out)``.
    """
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            args, shell=shell, env=env, cwd=cwd,
            stdin=subprocess.DEVNULL, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
            start_new_session=True,
        )
    except OSError as exc:
        raise SpawnError(str(exc)) from exc
    try:
        out, err = proc.communicate(timeout=timeout)
        timed_out = False
    except subprocess.TimeoutExpired:
        _kill_tree(proc)
        out, err = proc.communicate()
        timed_out = True
    duration = int((time.monotonic() - start) * 1000)
    return (proc.returncode, out.decode("utf-8", "replace"),
            err.decode("utf-8", "replace"), duration, timed_out)


def _hook(name: str, command: Optional[str], cfg: HarnessConfig, env: dict) -> Optional[str]:
    """Run a user hook; return a note for stderr if it failed."""
    if not command:
        return None
    try:
        code, _, err, _, timed_out = _spawn(command, cfg.timeout_seconds, shell=True, env=env)
    except SpawnError as exc:
        return f"[{name} hook] could not start: {exc}\n"
    if timed_out:
        return f"[{name} hook] timed out after {cfg.timeout_seconds}s\n"
    if code != 0:
        log.warning("%s hook exited %s", name, code)
        return f"[{name} hook] exited {code}: {err.strip()}\n"
    return None


def binary_name(case: TestCase) -> str:
    """Build-directory file name for a test's executable.

    Derived from the whole relative path so ``a.c`` and ``a.cpp`` (or equal
    names in different directories) do not collide; the hash keeps paths that
    sanitize alike, such as ``x/a.c`` and ``x_a.c``, apart.
    """
    tag = hashlib.sha1(case.path.encode("utf-8")).hexdigest()[:8]
    return re.sub(r"[^A-Za-z0-9_-]", "_", case.path) + f"-{tag}.bin"


def _hook_env(cfg: HarnessConfig, source: Path, binary: Path, workdir: Path) -> dict:
    env = dict(os.environ)
    env.update(SOURCE=str(source), BINARY=str(binary), WORKDIR=str(workdir))
    return env


def _make_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise HarnessError(f"cannot create build directory {path}: {exc}") from exc


def compile_one(case: TestCase, cfg: HarnessConfig, workdir=None) -> ProcessResult:
    compiler = cfg.compilers.get(case.language)
    if not compiler:
        raise MissingCompiler(f"no compiler configured for {case.language}")
    workdir = Path(workdir or cfg.build_dir).resolve()
    _make_dir(workdir)
    source = Path(cfg.test_dir).resolve() / case.path
    binary = workdir / binary_name(case)
    argv = [*shlex.split(compiler), *cfg.flags_for(case.language),
            str(source), "-o", str(binary)]
    command = shlex.join(argv)
    env = _hook_env(cfg, source, binary, workdir)

    notes = [_hook("pre_compile", cfg.pre_compile, cfg, env)]
    try:
        code, out, err, ms, timed_out = _spawn(argv, cfg.timeout_seconds, cwd=workdir)
    except SpawnError as exc:
        return ProcessResult("error", SPAWN_FAILURE_EXIT, 0, "",
                             f"cannot run compiler: {exc}\n", command, str(binary))
    notes.append(_hook("post_compile", cfg.post_compile, cfg, env))
    err += "".join(n for n in notes if n)
    if timed_out:
        status = "timeout"
    elif code == 0:
        status = "ok"
    else:
        status = "error"
    return ProcessResult(status, code, ms, out, err, command, str(binary))


def run_one(record: RunRecord, cfg: HarnessConfig) -> RunRecord:
    if record.compile is None or record.compile.status != "ok":
        raise ValueError(f"{record.case.path}: cannot run a test that did not compile")
    binary = Path(record.compile.binary)
    source = Path(cfg.test_dir).resolve() / record.case.path
    command = shlex.join([str(binary)])
    env = _hook_env(cfg, source, binary, binary.parent)

    notes = [_hook("pre_run", cfg.pre_run, cfg, env)]
    try:
        code, out, err, ms, timed_out = _spawn([str(binary)], cfg.timeout_seconds,
                                               cwd=binary.parent)
    except SpawnError as exc:
        result = ProcessResult("fail", SPAWN_FAILURE_EXIT, 0, "",
                               f"cannot run test binary: {exc}\n", command)
        return replace(record, execute=result)
    notes.append(_hook("post_run", cfg.post_run, cfg, env))
    err += "".join(n for n in notes if n)
    if timed_out:
        status = "timeout"
    else:
        status = "pass" if code == 0 else "fail"
    return replace(record, execute=ProcessResult(status, code, ms, out, err, command))


def run_case(case: TestCase, cfg: HarnessConfig, workdir=None) -> RunRecord:
    if case.language in cfg.excluded_languages:
        return RunRecord(case, skip_reason=f"{case.language} is excluded")
    try:
        compiled = compile_one(case, cfg, workdir)
    except MissingCompiler as exc:
        return RunRecord(case, skip_reason=str(exc))
    record = RunRecord(case, compile=compiled)
    if compiled.status == "ok":
        record = run_one(record, cfg)
    return record


def run_suite(
    cases: Sequence[TestCase],
    cfg: HarnessConfig,
    *,
    workers: int = 1,
    snapshot_path=None,
    resume=None,
    on_record: Optional[Callable[[RunRecord], None]] = None,
) -> Tuple[List[RunRecord], EnvSnapshot]:
    """Run every case and return its records sorted by path.

    ``resume`` (defaulting to ``cfg.resume_env``) names a snapshot from an
    earlier, interrupted run with the same configuration; cases it marks done
    are not run again and their records are reused as-is.  When
    ``snapshot_path`` is given, the snapshot is rewritten after every finished
    case.
    """
    workdir = Path(cfg.build_dir)
    _make_dir(workdir)

    digest = cfg.digest()
    done: Dict[str, RunRecord] = {}
    resume = resume if resume is not None else cfg.resume_env
    if resume is not None and Path(resume).exists():
        previous = EnvSnapshot.load(resume)
        if previous.config_digest != digest:
            raise SnapshotMismatch(
                f"snapshot {resume} was taken with a different configuration")
        finished = {p for p, flag in previous.cases if flag}
        done = {r.case.path: r for r in previous.records if r.case.path in finished}
        log.info("resuming: %d of %d cases already done", len(done), len(cases))

    paths = [c.path for c in cases]
    results: Dict[str, RunRecord] = {p: r for p, r in done.items() if p in set(paths)}
    pending = [c for c in cases if c.path not in results]

    def snapshot() -> EnvSnapshot:
        return EnvSnapshot(
            digest,
            [(p, p in results) for p in paths],
            [results[p] for p in sorted(results)],
        )

    def collect(record: RunRecord) -> None:
        results[record.case.path] = record
        log.info("%-8s %s", record.status, record.case.path)
        if snapshot_path is not None:
            snapshot().save(snapshot_path)
        if on_record is not None:
            on_record(record)

    if snapshot_path is not None:
        snapshot().save(snapshot_path)

    if workers <= 1:
        for case in pending:
            collect(run_case(case, cfg, workdir))
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        try:
            futures = [pool.submit(run_case, case, cfg, workdir) for case in pending]
            for future in as_completed(futures):
                collect(future.result())
        finally:
            pool.shutdown(wait=True, cancel_futures=True)

    records = [results[p] for p in sorted(results)]
    return records, snapshot()
