"""Test discovery, header tag extraction and filtering."""

from __future__ import annotations

import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Iterable, List, Optional, Tuple

from accvv.config import HarnessConfig
from accvv.versions import Version, format_version, parse_version

log = logging.getLogger(__name__)

EXTENSIONS = {
    ".c": "C",
    ".cpp": "C++",
    ".cc": "C++",
    ".f90": "Fortran",
    ".F90": "Fortran",
}

DEFAULT_MIN_VERSION = (1, 0)

_TAGS_RE = re.compile(r"\bT:\s*(.*?)\s*(?=\bV:|\*/|$)")
_VERSION_RE = re.compile(r"\bV:\s*(\d+\.\d+)")


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    path: str
    language: str
    tags: Tuple[str, ...] = ()
    min_version: Version = DEFAULT_MIN_VERSION

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "language": self.language,
            "tags": list(self.tags),
            "min_version": format_version(self.min_version),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TestCase":
        return cls(
            path=data["path"],
            language=data["language"],
            tags=tuple(data.get("tags", ())),
            min_version=parse_version(data.get("min_version", "1.0")),
        )


@dataclass
class DiscoveryError:
    path: str
    message: str


def language_for(path) -> Optional[str]:
    return EXTENSIONS.get(PurePosixPath(path).suffix)


def header_lines(source: str) -> List[str]:
    """Return the text of the leading comment block, one entry per line."""
    out = []
    in_block = False
    for line in source.splitlines():
        s = line.strip()
        if in_block:
            end = s.find("*/")
            out.append(s if end < 0 else s[:end])
            if end >= 0:
                in_block = False
                if s[end + 2:].strip():
                    break
            continue
        if not s:
            if out:
                break
            continue
        if s.startswith("//"):
            out.append(s[2:])
        elif s.startswith("!") and not s.lower().startswith("!$acc"):
            out.append(s[1:])
        elif s.startswith("/*"):
            body = s[2:]
            end = body.find("*/")
            if end >= 0:
                out.append(body[:end])
            else:
                out.append(body)
                in_block = True
        else:
            break
    return out


def extract_header(source: str) -> Tuple[Tuple[str, ...], Version]:
    """Extract ``(tags, min_version)`` from ``T:`` / ``V:`` header markers."""
    tags: List[str] = []
    version = DEFAULT_MIN_VERSION
    for line in header_lines(source):
        line = line.strip().lstrip("*").strip()
        m = _TAGS_RE.search(line)
        if m:
            for tag in m.group(1).split(","):
                tag = tag.strip()
                if tag and tag not in tags:
                    tags.append(tag)
        m = _VERSION_RE.search(line)
        if m:
            version = parse_version(m.group(1))
    return tuple(tags), version


def discover(test_dir, errors: Optional[List[DiscoveryError]] = None) -> List[TestCase]:
    """Find every test source under ``test_dir``, sorted by relative path.

    Unreadable files are skipped and reported through ``errors``.
    """
    root = Path(test_dir)
    cases = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in filenames:
            full = Path(dirpath) / name
            language = language_for(name)
            if language is None:
                continue
            rel = full.relative_to(root).as_posix()
            try:
                text = full.read_text(encoding="utf-8", errors="replace")
            except OSError as exc:
                log.warning("cannot read %s: %s", rel, exc)
                if errors is not None:
                    errors.append(DiscoveryError(rel, str(exc)))
                continue
            tags, version = extract_header(text)
            cases.append(TestCase(rel, language, tags, version))
    cases.sort(key=lambda c: c.path)
    return cases


def _under(path: str, directory: str) -> bool:
    return PurePosixPath(path).is_relative_to(PurePosixPath(directory))


def selected(case: TestCase, cfg: HarnessConfig) -> bool:
    if cfg.dir_filter and not _under(case.path, cfg.dir_filter):
        return False
    if cfg.tag_filter and not set(case.tags) & cfg.tag_filter:
        return False
    if case.min_version > cfg.max_spec_version:
        return False
    return case.language not in cfg.excluded_languages


def filter_cases(cases: Iterable[TestCase], cfg: HarnessConfig) -> List[TestCase]:
    return [c for c in cases if selected(c, cfg)]
