"""Build-file generation for running the corpus from a foreign harness.

The default template produces a CMakeLists.txt with one executable and one
``add_test`` per C/C++ source, in the style of an LLVM test-suite external
project.  Templates are plain text with two sections separated by a line that
reads ``%% stanza``: a preamble emitted once, and a stanza emitted per source
with ``{{source}}``, ``{{target}}`` and ``{{run_prefix}}`` substituted.  The
preamble may use ``{{languages}}``.

Whether a device is available when the generated tests run is left to the
consumer (e.g. lit or ``make check``).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional

from accvv import __version__
from accvv.corpus import TestCase

STANZA_MARKER = "%% stanza"
LLVM_LANGUAGES = frozenset({"C", "C++"})
_CMAKE_LANGUAGE = {"C": "C", "C++": "CXX", "Fortran": "Fortran"}


class ExportError(Exception):
    pass


class EmptyPlan(ExportError):
    pass


@dataclass(frozen=True)
class ExportPlan:
    corpus_root: Path
    output: Path = Path("CMakeLists.txt")
    languages: FrozenSet[str] = LLVM_LANGUAGES
    run_prefix: str = ""
    template: Optional[str] = None

    def __post_init__(self):
        extra = set(self.languages) - LLVM_LANGUAGES
        if extra:
            raise ExportError(f"languages not supported by the LLVM-style target: {sorted(extra)}")


def default_template() -> str:
    return resources.files("accvv").joinpath("data/cmake.template").read_text("utf-8")


def split_template(text: str):
    preamble, sep, stanza = text.partition(STANZA_MARKER + "\n")
    if not sep:
        return "", text
    return preamble, stanza


def target_name(path: str) -> str:
    return "accvv_" + re.sub(r"[^A-Za-z0-9_]", "_", path)


def corpus_digest(root: Path, cases: Iterable[TestCase]) -> str:
    h = hashlib.sha256()
    for case in cases:
        h.update(case.path.encode("utf-8") + b"\0")
        h.update((root / case.path).read_bytes())
        h.update(b"\0")
    return h.hexdigest()


def _fill(text: str, **values: str) -> str:
    for key, value in values.items():
        if not value:
            text = text.replace("{{" + key + "}} ", "")
        text = text.replace("{{" + key + "}}", value)
    return text


def export_build_file(plan: ExportPlan, cases: Iterable[TestCase]) -> str:
    root = Path(plan.corpus_root)
    selected: List[TestCase] = sorted(
        (c for c in cases if c.language in plan.languages), key=lambda c: c.path)
    if not selected:
        raise EmptyPlan(f"no {'/'.join(sorted(plan.languages))} sources to export")
    missing = [c.path for c in selected if not (root / c.path).is_file()]
    if missing:
        raise ExportError(f"sources missing under {root}: {', '.join(missing)}")
    targets = {}
    for case in selected:
        other = targets.setdefault(target_name(case.path), case.path)
        if other != case.path:
            raise ExportError(f"{other} and {case.path} map to the same target name")

    preamble, stanza = split_template(plan.template if plan.template is not None
                                      else default_template())
    languages = " ".join(_CMAKE_LANGUAGE[lang] for lang in ("C", "C++")
                         if any(c.language == lang for c in selected))
    parts = [
        f"# Generated by accvv {__version__} exporter; do not edit.\n",
        f"# corpus-digest: sha256:{corpus_digest(root, selected)}\n",
        f"# sources: {len(selected)}\n",
        "\n",
        _fill(preamble, languages=languages),
    ]
    for case in selected:
        parts.append(_fill(stanza, source=case.path, target=target_name(case.path),
                           run_prefix=plan.run_prefix))
    return "".join(parts)


def write_build_file(plan: ExportPlan, cases: Iterable[TestCase]) -> Path:
    text = export_build_file(plan, cases)
    out = Path(plan.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    return out
