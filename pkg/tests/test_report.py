import json
import re

import pytest
from hypothesis import given, strategies as st

from accvv.corpus import TestCase
from accvv.report import (
    HTML_PAYLOAD_ID,
    MATRIX_STATUSES,
    DuplicateColumn,
    ReportError,
    SuiteReport,
    aggregate,
    compare,
    emit,
    format_rate,
    html_payload,
    load_report,
    percent,
    render_html,
    render_json,
    render_txt,
)
from accvv.runner import ProcessResult, RunRecord

from conftest import GOLDEN


def record(path, status, language="C", tags=()):
    case = TestCase(path, language, tuple(tags))
    if status == "skipped":
        return RunRecord(case, skip_reason="excluded")
    if status == "compile_error":
        return RunRecord(case, ProcessResult("error", 1, 5, command=f"cc {path}"))
    compiled = ProcessResult("ok", 0, 5, command=f"cc {path} -o {path}.bin", binary=f"{path}.bin")
    if status == "timeout":
        return RunRecord(case, compiled, ProcessResult("timeout", -9, 1000))
    return RunRecord(case, compiled, ProcessResult(status, 0 if status == "pass" else 1, 3))


def synthetic(n, passes, language="C"):
    return [record(f"t{i:04d}.c", "pass" if i < passes else "fail", language) for i in range(n)]


def test_rate_examples():
    assert aggregate(synthetic(830, 664)).totals.pass_rate == 80.0
    assert aggregate(synthetic(329, 276, "Fortran")).per_language["Fortran"].pass_rate == 83.9


def test_empty_report():
    report = aggregate([])
    assert report.totals.total == 0 and format_rate(report.totals.pass_rate) == "n/a"


def test_rounding_is_half_up():
    assert percent(1, 8) == 12.5
    assert percent(1, 16) == 6.3  # 6.25
    assert percent(2, 3) == 66.7
    assert percent(0, 0) is None


def test_skipped_leave_the_denominator():
    recs = synthetic(4, 3) + [record("s.c", "skipped")]
    assert aggregate(recs).totals.pass_rate == 75.0


def test_per_group_totals():
    recs = [record("a.c", "pass", "C", ["x"]), record("b.f90", "fail", "Fortran", ["x", "y"]),
            record("c.cpp", "timeout", "C++"), record("d.c", "compile_error", "C", ["y"])]
    report = aggregate(recs)
    assert list(report.per_language) == ["C", "C++", "Fortran"]
    assert report.per_language["C"].compile_error == 1
    assert report.per_tag["x"].total == 2 and report.per_tag["y"].failed == 1


_status = st.sampled_from(["pass", "fail", "compile_error", "timeout", "skipped"])
_records = st.lists(
    st.builds(record, st.text("abc/", min_size=1, max_size=6).map(lambda s: s + ".c"), _status,
              st.sampled_from(["C", "C++", "Fortran"]),
              st.lists(st.sampled_from(["p", "q", "r"]), unique=True)),
    max_size=25, unique_by=lambda r: r.case.path)


@given(_records)
def test_totals_invariants(recs):
    report = aggregate(recs, "sys", "cc", timestamp="2026-01-01T00:00:00+00:00")
    t = report.totals
    assert t.passed + t.failed + t.compile_error + t.timeout + t.skipped == t.total == len(recs)
    for field in ("total", "passed", "failed", "compile_error", "timeout", "skipped"):
        assert sum(getattr(v, field) for v in report.per_language.values()) == getattr(t, field)
    assert all(v.total <= t.total for v in report.per_tag.values())


@given(_records)
def test_json_round_trip(recs):
    report = aggregate(recs, "sys", "cc", timestamp="2026-01-01T00:00:00+00:00")
    again = SuiteReport.from_dict(json.loads(render_json(report)))
    assert again == report
    assert render_json(again) == render_json(report)


def test_schema_version_is_checked():
    data = json.loads(render_json(aggregate([])))
    data["schema_version"] = 99
    with pytest.raises(ReportError):
        SuiteReport.from_dict(data)


def test_txt_lists_commands():
    recs = [record("a.c", "pass"), record("b.c", "compile_error")]
    text = render_txt(aggregate(recs))
    assert "cc a.c -o a.c.bin" in text and "cc b.c" in text


def test_html_payload_is_embedded_once():
    report = load_report(GOLDEN / "report.json")
    page = render_html(report)
    blocks = re.findall(rf'<script type="application/json" id="{HTML_PAYLOAD_ID}">\n(.*?)</script>',
                        page, re.S)
    assert len(blocks) == 1
    assert json.loads(blocks[0]) == html_payload(report)
    assert "<link" not in page and "src=" not in page  # self-contained


def test_golden_files():
    report = load_report(GOLDEN / "report.json")
    assert render_json(report) == (GOLDEN / "report.json").read_text()
    assert render_txt(report) == (GOLDEN / "report.txt").read_text()
    assert render_html(report) == (GOLDEN / "report.html").read_text()


def test_statuses_are_closed():
    report = load_report(GOLDEN / "report.json")
    assert {r.status for r in report.records} <= set(MATRIX_STATUSES)


def test_emit_appends_extension(tmp_path):
    report = aggregate([record("a.c", "pass")])
    assert emit(report, "txt", tmp_path / "out") == tmp_path / "out.txt"
    assert emit(report, "json", tmp_path / "out.json") == tmp_path / "out.json"
    assert load_report(tmp_path / "out.json") == report
    with pytest.raises(ReportError):
        emit(report, "yaml", tmp_path / "out")


def test_emit_unwritable(tmp_path):
    (tmp_path / "file").write_text("")
    with pytest.raises(ReportError):
        emit(aggregate([]), "json", tmp_path / "file" / "out")


def _report(system, compiler, statuses, ts="2026-01-01T00:00:00+00:00"):
    recs = [record(p, s) for p, s in statuses.items()]
    return aggregate(recs, system, compiler, timestamp=ts)


def test_compare_flags_disagreement():
    a = _report("darwin", "nvc", {"x.c": "pass", "y.c": "pass"})
    b = _report("darwin", "gcc", {"x.c": "fail", "y.c": "pass"})
    m = compare([a, b])
    assert [c.compiler_id for c in m.columns] == ["gcc", "nvc"]
    assert m.cells["x.c"] == ["fail", "pass"] and m.disagreements == ["x.c"]
    assert "x.c" in m.render_txt()


def test_compare_single_report_rate():
    a = _report("s", "c", {"x.c": "pass", "y.c": "fail", "z.c": "skipped"})
    assert compare([a]).rates == [a.totals.pass_rate] == [50.0]


def test_compare_rates():
    a = _report("s", "a", {f"{i}.c": "pass" for i in range(4)})
    b = _report("s", "b", {f"{i}.c": "pass" if i < 2 else "fail" for i in range(4)})
    assert compare([a, b]).rates == [100.0, 50.0]


def test_compare_absent_cells():
    a = _report("s", "a", {"x.c": "pass", "y.c": "fail"})
    b = _report("s", "b", {"x.c": "pass"})
    m = compare([a, b])
    assert m.cells["y.c"] == ["fail", "absent"]
    assert m.rates == [50.0, 100.0] and m.disagreements == []


def test_compare_duplicate_column():
    a = _report("s", "a", {"x.c": "pass"})
    with pytest.raises(DuplicateColumn):
        compare([a, _report("s", "a", {"x.c": "fail"})])


@given(st.permutations(["a", "b", "c"]))
def test_compare_is_permutation_invariant(order):
    reports = {k: _report("s", k, {"x.c": "pass" if k != "b" else "fail"}) for k in "abc"}
    m = compare([reports[k] for k in order])
    assert m.to_dict() == compare([reports[k] for k in "abc"]).to_dict()
