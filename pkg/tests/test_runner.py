import json
import time
from collections import Counter

import pytest

from accvv.config import load_config, override
from accvv.corpus import TestCase, discover
from accvv.runner import (
    EnvSnapshot,
    RunRecord,
    SnapshotMismatch,
    binary_name,
    run_case,
    run_suite,
)

from conftest import mock_config_text, write_mock_test


def make_config(tmp_path, test_dir, **extra):
    conf = tmp_path / "mock.conf"
    conf.write_text(mock_config_text(test_dir, tmp_path / "build", **extra))
    return load_config(conf)


def outcome(record):
    execute = record.execute.exit_code if record.execute else None
    return record.case.path, record.status, execute


EXPECTED = {
    "compile_error.c": "compile_error",
    "fail.c": "fail",
    "pass.c": "pass",
    "pass.cpp": "pass",
    "pass.f90": "pass",
    "timeout.c": "timeout",
}


def test_mock_corpus_statuses(tmp_path, mock_corpus):
    cfg = make_config(tmp_path, mock_corpus, timeout=1)
    records, snap = run_suite(discover(mock_corpus), cfg)
    assert {r.case.path: r.status for r in records} == EXPECTED
    assert all(done for _, done in snap.cases)
    fail = next(r for r in records if r.case.path == "fail.c")
    assert fail.execute.exit_code == 1
    err = next(r for r in records if r.case.path == "compile_error.c")
    assert err.execute is None and "error" in err.compile.stderr


def test_timeout_is_bounded(tmp_path):
    write_mock_test(tmp_path / "t", "sleeper.c", run_sleep=3)
    cfg = make_config(tmp_path, tmp_path / "t", timeout=1)
    (case,) = discover(tmp_path / "t")
    start = time.monotonic()
    record = run_case(case, cfg)
    elapsed = time.monotonic() - start
    assert record.status == "timeout"
    assert record.execute.duration_ms < 3000
    # compile and run each get the timeout; only the run should hit it
    assert elapsed < 1 + 2 + record.compile.duration_ms / 1000


def test_timeout_kills_the_whole_process_group(tmp_path):
    marker = tmp_path / "survivor"
    write_mock_test(tmp_path / "t", "ok.c")
    cfg = make_config(tmp_path, tmp_path / "t", timeout=1,
                      pre_run=f"(sleep 2; touch {marker}) & sleep 5")
    (case,) = discover(tmp_path / "t")
    record = run_case(case, cfg)
    assert record.status == "pass"
    assert "[pre_run hook] timed out" in record.execute.stderr
    time.sleep(2.5)
    assert not marker.exists()


def test_worker_counts_agree(tmp_path, mock_corpus):
    for i in range(6):
        write_mock_test(mock_corpus / "extra", f"p{i}.c", run_exit=i % 2)
    cfg = make_config(tmp_path, mock_corpus, timeout=1)
    cases = discover(mock_corpus)
    serial, _ = run_suite(cases, cfg, workers=1)
    parallel, _ = run_suite(cases, override(cfg, build_dir=tmp_path / "build8"), workers=8)
    assert Counter(map(outcome, serial)) == Counter(map(outcome, parallel))
    assert [r.case.path for r in parallel] == sorted(c.path for c in cases)


def test_skips(tmp_path):
    write_mock_test(tmp_path / "t", "a.c")
    write_mock_test(tmp_path / "t", "b.f90")
    conf = tmp_path / "c.conf"
    conf.write_text("cxx = g++\ntest_dir = t\nexclude = Fortran\n")
    cfg = load_config(conf)
    records, _ = run_suite(discover(tmp_path / "t"), cfg)
    assert [(r.case.path, r.status) for r in records] == [("a.c", "skipped"), ("b.f90", "skipped")]
    assert "no compiler" in records[0].skip_reason
    assert "excluded" in records[1].skip_reason


def test_missing_compiler_binary(tmp_path):
    write_mock_test(tmp_path / "t", "a.c")
    conf = tmp_path / "c.conf"
    conf.write_text("cc = /nonexistent/cc\ntest_dir = t\n")
    (record,) = run_suite(discover(tmp_path / "t"), load_config(conf))[0]
    assert record.status == "compile_error" and record.compile.exit_code == 127


def test_hooks_see_paths(tmp_path):
    log = tmp_path / "hook.log"
    write_mock_test(tmp_path / "t", "a.c")
    cfg = make_config(tmp_path, tmp_path / "t",
                      pre_compile=f'echo "$SOURCE" >> {log}',
                      post_run=f'echo "$BINARY" >> {log}')
    (case,) = discover(tmp_path / "t")
    assert run_case(case, cfg).status == "pass"
    source, binary = log.read_text().split()
    assert source.endswith("/t/a.c") and binary.endswith(binary_name(case))


def test_failing_hook_is_noted(tmp_path):
    write_mock_test(tmp_path / "t", "a.c")
    cfg = make_config(tmp_path, tmp_path / "t", post_compile="exit 3")
    (case,) = discover(tmp_path / "t")
    record = run_case(case, cfg)
    assert record.status == "pass"
    assert "[post_compile hook] exited 3" in record.compile.stderr


def test_binary_names_do_not_collide():
    names = {binary_name(TestCase(p, "C")) for p in ("a.c", "a.cpp", "x/a.c", "x_a.c")}
    assert len(names) == 4


def test_snapshot_round_trip(tmp_path, mock_corpus):
    cfg = make_config(tmp_path, mock_corpus, timeout=1)
    snap_path = tmp_path / "env.json"
    records, snap = run_suite(discover(mock_corpus), cfg, snapshot_path=snap_path)
    loaded = EnvSnapshot.load(snap_path)
    assert loaded.to_dict() == snap.to_dict()
    assert [RunRecord.from_dict(r.to_dict()) for r in records] == records
    assert json.loads(snap_path.read_text())["config_digest"] == cfg.digest()


class Interrupted(Exception):
    pass


def run_interrupted(cases, cfg, snap_path, after):
    seen = []

    def stop(record):
        seen.append(record)
        if len(seen) == after:
            raise Interrupted

    with pytest.raises(Interrupted):
        run_suite(cases, cfg, snapshot_path=snap_path, on_record=stop)


def test_resume_skips_finished_cases(tmp_path):
    for i in range(10):
        write_mock_test(tmp_path / "t", f"t{i}.c", run_exit=i % 3 == 0)
    cfg = make_config(tmp_path, tmp_path / "t")
    cases = discover(tmp_path / "t")
    snap_path = tmp_path / "env.json"
    run_interrupted(cases, cfg, snap_path, after=4)
    assert sum(done for _, done in EnvSnapshot.load(snap_path).cases) == 4

    ran = []
    records, snap = run_suite(cases, cfg, snapshot_path=snap_path, resume=snap_path,
                              on_record=ran.append)
    assert len(ran) == 6 and len(records) == 10
    assert all(done for _, done in snap.cases)


def test_resume_from_config_key(tmp_path):
    write_mock_test(tmp_path / "t", "a.c")
    cfg = make_config(tmp_path, tmp_path / "t")
    snap_path = tmp_path / "env.json"
    run_suite(discover(tmp_path / "t"), cfg, snapshot_path=snap_path)
    ran = []
    run_suite(discover(tmp_path / "t"), override(cfg, resume_env=snap_path), on_record=ran.append)
    assert ran == []


def test_resume_with_other_config_is_refused(tmp_path):
    write_mock_test(tmp_path / "t", "a.c")
    cfg = make_config(tmp_path, tmp_path / "t")
    snap_path = tmp_path / "env.json"
    run_suite(discover(tmp_path / "t"), cfg, snapshot_path=snap_path)
    with pytest.raises(SnapshotMismatch):
        run_suite(discover(tmp_path / "t"), override(cfg, timeout=7), resume=snap_path)


def test_compile_timeout(tmp_path):
    src = tmp_path / "t" / "slow.c"
    src.parent.mkdir()
    src.write_text("// MOCK-COMPILE: sleep 2\n")
    cfg = make_config(tmp_path, tmp_path / "t", timeout=1)
    (case,) = discover(tmp_path / "t")
    record = run_case(case, cfg)
    assert record.status == "timeout" and record.compile.status == "timeout"
    assert record.execute is None


def test_compile_error_keeps_stderr(tmp_path):
    src = tmp_path / "t" / "dt.c"
    src.parent.mkdir()
    src.write_text("// MOCK-COMPILE: fail unknown keyword radeon for device_type\n")
    (case,) = discover(tmp_path / "t")
    record = run_case(case, make_config(tmp_path, tmp_path / "t"))
    assert record.status == "compile_error" and record.compile.exit_code == 1
    assert "unknown keyword radeon" in record.compile.stderr


def test_exit_code_is_kept(tmp_path):
    write_mock_test(tmp_path / "t", "three.c", run_exit=3)
    (case,) = discover(tmp_path / "t")
    record = run_case(case, make_config(tmp_path, tmp_path / "t"))
    assert record.status == "fail" and record.execute.exit_code == 3
