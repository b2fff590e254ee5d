import re
import shutil
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
LISTINGS = FIXTURES / "listings"
CORPUS = FIXTURES / "corpus"
GOLDEN = FIXTURES / "golden"
MOCKCC = FIXTURES / "mock" / "mockcc.py"
MOCK_CORPUS = FIXTURES / "mock" / "corpus"


def mock_config_text(test_dir, build_dir, timeout=2, **extra) -> str:
    cc = f"{sys.executable} {MOCKCC}"
    lines = [f"cc = {cc}", f"cxx = {cc}", f"fc = {cc}",
             f"test_dir = {test_dir}", f"build_dir = {build_dir}", f"timeout = {timeout}"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    return "\n".join(lines) + "\n"


@pytest.fixture
def mock_corpus(tmp_path):
    """A private copy of the mock corpus."""
    dest = tmp_path / "corpus"
    shutil.copytree(MOCK_CORPUS, dest)
    return dest


def write_mock_test(directory: Path, name: str, *, run_exit=0, run_sleep=None,
                    compile_fail=False, tags="mock", version="1.0") -> Path:
    marker = "!" if name.endswith((".f90", ".F90")) else "//"
    lines = [f"{marker} T: {tags}  V: {version}"]
    if compile_fail:
        lines.append(f"{marker} MOCK-COMPILE: fail")
    lines.append(f"{marker} MOCK-RUN: exit {run_exit}")
    if run_sleep is not None:
        lines.append(f"{marker} MOCK-RUN: sleep {run_sleep}")
    path = directory / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


# one PASS/FAIL line per acceptance criterion at the end of the run

_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    failed = report.failed or (report.when == "call" and report.skipped)
    if failed or key not in _criteria:
        _criteria[key] = "FAIL" if failed else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), outcome in sorted(_criteria.items()):
        terminalreporter.write_line(f"criterion {number:2d} {name.replace('_', ' '):<40} {outcome}")
