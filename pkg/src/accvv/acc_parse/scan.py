"""Whole-file directive scanning."""

from __future__ import annotations

import bisect
import dataclasses
import re
from dataclasses import dataclass, field
from typing import List, Optional

from accvv.acc_parse.parser import (
    Directive,
    Location,
    ParseError,
    parse_directive,
)

# constructs followed by a structured block (or loop) they apply to
STRUCTURED = {
    "data", "host_data", "parallel", "kernels", "serial", "loop", "atomic",
    "parallel loop", "kernels loop", "serial loop",
}
# Fortran constructs closed by an explicit `!$acc end <name>`
FORTRAN_BLOCKS = {"data", "host_data", "parallel", "kernels", "serial"}

_C_PRAGMA = re.compile(r"^\s*#\s*pragma\s+acc\b")
_F_SENTINEL = re.compile(r"^\s*!\$acc\b", re.IGNORECASE)
_F_CONT = re.compile(r"^\s*!\$acc\s*&?", re.IGNORECASE)


@dataclass
class ScanResult:
    directives: List[Directive] = field(default_factory=list)
    errors: List[ParseError] = field(default_factory=list)

    def __iter__(self):
        return iter(self.directives)

    def __len__(self):
        return len(self.directives)


def _logical_lines_c(lines):
    """Yield (first_line, last_line, text) for each ``#pragma acc`` line."""
    in_comment = False
    i = 0
    while i < len(lines):
        line = lines[i]
        start_in_comment = in_comment
        in_comment = _comment_state(line, in_comment)
        if start_in_comment or not _C_PRAGMA.match(line):
            i += 1
            continue
        first = i
        text = line
        while text.rstrip().endswith("\\") and i + 1 < len(lines):
            text = text.rstrip()[:-1] + " " + lines[i + 1].strip()
            i += 1
        yield first + 1, i + 1, text
        i += 1


def _comment_state(line: str, in_comment: bool) -> bool:
    pos = 0
    while True:
        if in_comment:
            end = line.find("*/", pos)
            if end < 0:
                return True
            in_comment, pos = False, end + 2
        else:
            start = line.find("/*", pos)
            line_comment = line.find("//", pos)
            if start < 0 or (0 <= line_comment < start):
                return False
            in_comment, pos = True, start + 2


def _logical_lines_fortran(lines):
    i = 0
    while i < len(lines):
        if not _F_SENTINEL.match(lines[i]):
            i += 1
            continue
        first = i
        text = _drop_f_comment(lines[i]).rstrip()
        while text.endswith("&") and i + 1 < len(lines) and _F_SENTINEL.match(lines[i + 1]):
            i += 1
            cont = _F_CONT.sub("", _drop_f_comment(lines[i]), count=1).rstrip()
            text = text[:-1] + " " + cont
        yield first + 1, i + 1, text
        i += 1


def _drop_f_comment(line: str) -> str:
    # keep the sentinel, drop a trailing `! comment`
    m = _F_SENTINEL.match(line)
    head, rest = (line[:m.end()], line[m.end():]) if m else ("", line)
    quote = None
    for i, ch in enumerate(rest):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "!":
            return head + rest[:i]
    return line


class _CCursor:
    """Character cursor over C source that skips comments, strings and
    preprocessor lines, used to find the extent of a structured block."""

    def __init__(self, source: str):
        self.src = source
        self.starts = [0] + [m.end() for m in re.finditer(r"\n", source)]

    def line_of(self, pos: int) -> int:
        return bisect.bisect_right(self.starts, pos)

    def pos_of_line_end(self, line: int) -> int:
        return self.starts[line] if line < len(self.starts) else len(self.src)

    def skip_ws(self, pos: int) -> int:
        s = self.src
        while pos < len(s):
            if s[pos].isspace():
                pos += 1
            elif s.startswith("//", pos):
                nl = s.find("\n", pos)
                pos = len(s) if nl < 0 else nl + 1
            elif s.startswith("/*", pos):
                end = s.find("*/", pos + 2)
                pos = len(s) if end < 0 else end + 2
            else:
                break
        return pos

    def skip_pp_line(self, pos: int) -> int:
        s = self.src
        while True:
            nl = s.find("\n", pos)
            if nl < 0:
                return len(s)
            if s[pos:nl].rstrip().endswith("\\"):
                pos = nl + 1
                continue
            return nl + 1

    def skip_string(self, pos: int) -> int:
        quote = self.src[pos]
        pos += 1
        while pos < len(self.src) and self.src[pos] != quote:
            pos += 2 if self.src[pos] == "\\" else 1
        return pos + 1

    def match_group(self, pos: int) -> int:
        """``pos`` at an opening bracket; return index after its match."""
        pairs = {"(": ")", "{": "}", "[": "]"}
        stack = []
        s = self.src
        while pos < len(s):
            pos = self.skip_ws(pos)
            if pos >= len(s):
                break
            ch = s[pos]
            if ch in "\"'":
                pos = self.skip_string(pos)
                continue
            if ch == "#" and self._at_line_start(pos):
                pos = self.skip_pp_line(pos)
                continue
            if ch in pairs:
                stack.append(pairs[ch])
            elif stack and ch == stack[-1]:
                stack.pop()
                if not stack:
                    return pos + 1
            pos += 1
        return len(s)

    def _at_line_start(self, pos: int) -> bool:
        line_start = self.starts[self.line_of(pos) - 1]
        return not self.src[line_start:pos].strip()

    def word_at(self, pos: int) -> Optional[str]:
        m = re.compile(r"[A-Za-z_]\w*").match(self.src, pos)
        return m.group(0) if m else None

    def statement_end(self, pos: int) -> int:
        """Return the index just past the statement starting at/after pos."""
        s = self.src
        pos = self.skip_ws(pos)
        if pos >= len(s):
            return len(s)
        if s[pos] == "#" and self._at_line_start(pos):
            line_end = self.skip_pp_line(pos)
            text = s[pos:line_end]
            if _C_PRAGMA.match(text):
                name = _directive_name(text)
                if name in STRUCTURED:
                    return self.statement_end(line_end)
            return line_end
        if s[pos] == "{":
            return self.match_group(pos)
        word = self.word_at(pos)
        if word in ("for", "while", "switch", "if"):
            p = self.skip_ws(pos + len(word))
            if p < len(s) and s[p] == "(":
                p = self.match_group(p)
            end = self.statement_end(p)
            if word == "if":
                q = self.skip_ws(end)
                if self.word_at(q) == "else":
                    end = self.statement_end(q + 4)
            return end
        if word == "do":
            end = self.statement_end(pos + 2)
            return self.statement_end(end)  # while (...);
        # plain statement: up to ';' at depth 0
        while pos < len(s):
            pos = self.skip_ws(pos)
            if pos >= len(s):
                break
            ch = s[pos]
            if ch in "\"'":
                pos = self.skip_string(pos)
            elif ch in "({[":
                pos = self.match_group(pos)
            elif ch == ";":
                return pos + 1
            elif ch == "}":
                return pos
            else:
                pos += 1
        return len(s)


def _directive_name(text: str) -> Optional[str]:
    try:
        return parse_directive(text.replace("\\\n", " "), "C").name
    except ParseError:
        return None


def _c_end_line(cursor: _CCursor, last_line: int) -> int:
    start = cursor.pos_of_line_end(last_line)
    end = cursor.statement_end(start)
    return cursor.line_of(max(end - 1, start))


def scan_file(source: str, language: str = "C", path: Optional[str] = None) -> ScanResult:
    """Parse every directive in ``source``; malformed ones land in ``errors``."""
    lines = source.splitlines()
    result = ScanResult()
    if language == "Fortran":
        logical = _logical_lines_fortran(lines)
    else:
        logical = _logical_lines_c(lines)
    cursor = _CCursor(source) if language != "Fortran" else None
    open_blocks: List[int] = []
    for first, last, text in logical:
        try:
            d = parse_directive(text, language, Location(path, first))
        except ParseError as exc:
            exc.line = first
            result.errors.append(exc)
            continue
        if cursor is not None and d.name in STRUCTURED:
            d = dataclasses.replace(d, end_line=_c_end_line(cursor, last))
        result.directives.append(d)
        if language == "Fortran":
            if d.name in FORTRAN_BLOCKS:
                open_blocks.append(len(result.directives) - 1)
            elif d.name.startswith("end "):
                target = d.name[4:]
                for k in range(len(open_blocks) - 1, -1, -1):
                    idx = open_blocks[k]
                    if result.directives[idx].name == target:
                        result.directives[idx] = dataclasses.replace(
                            result.directives[idx], end_line=first)
                        del open_blocks[k:]
                        break
    return result
