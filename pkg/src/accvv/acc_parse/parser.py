"""OpenACC directive parsing for C/C++ (``#pragma acc``) and Fortran (``!$acc``)."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

REDUCTION_OPERATORS = ("+", "-", "*", "max", "min", "&", "|", "^", "&&", "||")
FORTRAN_REDUCTION_OPERATORS = (".and.", ".or.", ".eqv.", ".neqv.", "iand", "ior", "ieor")

# Directives that take a parenthesised argument right after their name.
DIRECTIVES_WITH_ARGS = ("routine", "wait", "cache")

COMBINABLE = ("parallel", "kernels", "serial")

_C_PREFIX = re.compile(r"^\s*#\s*pragma\s+acc\b")
_F_PREFIX = re.compile(r"^\s*!\$acc\b", re.IGNORECASE)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"^-?\d+$")
_SECTION = re.compile(r"^\s*([A-Za-z_][\w.>\-]*?)\s*((?:\[[^\[\]]*\]\s*)+)$")


class AccError(Exception):
    pass


class NotADirective(AccError):
    pass


class ParseError(AccError):
    def __init__(self, message: str, column: int, line: Optional[int] = None):
        self.column = column
        self.line = line
        self.reason = message
        super().__init__(f"column {column}: {message}")


@dataclass(frozen=True)
class Location:
    path: Optional[str] = None
    line: Optional[int] = None

    def __str__(self):
        return f"{self.path or '<source>'}:{self.line if self.line is not None else '?'}"


@dataclass(frozen=True)
class Clause:
    name: str
    args: Tuple[str, ...] = ()
    modifier: Optional[str] = None  # reduction operator
    has_parens: bool = False

    def __str__(self):
        if not self.has_parens:
            return self.name
        inner = ", ".join(self.args)
        if self.modifier is not None:
            inner = f"{self.modifier}:{inner}"
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class ArraySection:
    var: str
    bounds: Tuple[Tuple[str, Optional[str]], ...]


@dataclass(frozen=True)
class Directive:
    name: str
    clauses: Tuple[Clause, ...] = ()
    named_target: Optional[str] = None
    args: Tuple[str, ...] = ()
    language: str = "C"
    location: Location = field(default=Location(), compare=False)
    # last source line of the associated structured block, when known
    end_line: Optional[int] = field(default=None, compare=False)

    def clause(self, name: str) -> Optional[Clause]:
        for c in self.clauses:
            if c.name == name:
                return c
        return None


def array_section(arg: str) -> Optional[ArraySection]:
    """Split ``a[0:n][1:m]`` into its base name and ``(lo, len)`` bounds."""
    m = _SECTION.match(arg)
    if not m:
        return None
    bounds = []
    for part in re.findall(r"\[([^\[\]]*)\]", m.group(2)):
        if ":" in part:
            lo, length = (x.strip() for x in part.split(":", 1))
            bounds.append((lo, length))
        else:
            bounds.append((part.strip(), None))
    return ArraySection(m.group(1), tuple(bounds))


def data_var(arg: str) -> str:
    """The variable a data clause argument refers to: ``a[0:n]`` -> ``a``."""
    arg = arg.strip()
    if ":" in arg and "[" not in arg and "(" not in arg:
        # modifier form, e.g. copyin(readonly: a)
        arg = arg.split(":", 1)[1].strip()
    section = array_section(arg)
    if section:
        return section.var
    m = re.match(r"^\s*([A-Za-z_][\w%]*)\s*\(", arg)  # Fortran a(1:n)
    if m:
        return m.group(1)
    return arg


def split_args(text: str) -> List[str]:
    """Split on top-level commas, respecting brackets and quotes."""
    parts, depth, quote, start = [], 0, None, 0
    for i, ch in enumerate(text):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i].strip())
            start = i + 1
    tail = text[start:].strip()
    if tail or parts:
        parts.append(tail)
    return parts


class _Scanner:
    def __init__(self, text: str, offset: int):
        self.text = text
        self.pos = 0
        self.offset = offset  # column of text[0] in the original line, 1-based

    @property
    def column(self) -> int:
        return self.pos + self.offset

    def error(self, message, pos=None) -> ParseError:
        return ParseError(message, (self.pos if pos is None else pos) + self.offset)

    def skip(self, commas=False):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if not (ch.isspace() or (commas and ch in ",&")):
                break
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def ident(self) -> Optional[str]:
        m = _IDENT.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0)

    def peek_ident(self) -> Optional[str]:
        save = self.pos
        self.skip()
        word = self.ident()
        self.pos = save
        return word

    def group(self) -> str:
        """Consume a balanced ``( ... )`` group and return its inside."""
        open_pos = self.pos
        depth, quote = 0, None
        for i in range(self.pos, len(self.text)):
            ch = self.text[i]
            if quote:
                if ch == quote:
                    quote = None
            elif ch in "\"'":
                quote = ch
            elif ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
                if depth == 0:
                    if ch != ")":
                        raise self.error("mismatched bracket", i)
                    self.pos = i + 1
                    return self.text[open_pos + 1:i]
                if depth < 0:
                    break
        raise self.error("unbalanced parentheses", open_pos)


def _strip_comment(body: str, language: str) -> str:
    marker = "!" if language == "Fortran" else "//"
    quote = None
    for i, ch in enumerate(body):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif body.startswith(marker, i):
            return body[:i]
    return body


def directive_body(line: str, language: str) -> Tuple[str, int]:
    """Return the text after the directive prefix and its 1-based column."""
    prefix = _F_PREFIX if language == "Fortran" else _C_PREFIX
    m = prefix.match(line)
    if not m:
        raise NotADirective(f"no OpenACC directive prefix in {line.strip()!r}")
    return line[m.end():], m.end() + 1


def _parse_clause(sc: _Scanner, name: str, name_pos: int) -> Clause:
    sc.skip()
    if sc.peek() != "(":
        return Clause(name)
    paren = sc.pos
    inner = sc.group()
    if name == "reduction":
        if ":" not in inner:
            raise sc.error("reduction clause needs 'operator:variable'", paren)
        op, rest = inner.split(":", 1)
        op = op.strip()
        if op not in REDUCTION_OPERATORS and op not in FORTRAN_REDUCTION_OPERATORS:
            raise sc.error(f"unknown reduction operator {op!r}", paren + 1)
        variables = split_args(rest)
        if not variables or not all(variables):
            raise sc.error("reduction clause needs a variable", paren)
        return Clause(name, tuple(variables), op, True)
    args = split_args(inner)
    if any(not a for a in args):
        raise sc.error("empty clause argument", paren)
    for arg in args:
        section = array_section(arg)
        if section:
            for lo, length in section.bounds:
                for bound in (lo, length):
                    if bound and _INT.match(bound) and int(bound) < 0:
                        raise sc.error(f"negative array-section bound in {arg!r}", paren)
    return Clause(name, tuple(args), None, True)


def parse_directive(line: str, language: str = "C", location: Optional[Location] = None) -> Directive:
    """Parse one (already joined) directive line."""
    body, col = directive_body(line, language)
    body = _strip_comment(body, language)
    fortran = language == "Fortran"
    sc = _Scanner(body.lower() if fortran else body, col)
    sc.skip()
    start = sc.pos
    first = sc.ident()
    if first is None:
        raise sc.error("expected directive name", start)
    words = [first]
    if first == "end":
        nxt = sc.peek_ident()
        if nxt is None:
            raise sc.error("expected construct name after 'end'")
        sc.skip()
        sc.ident()
        words.append(nxt)
    if words[-1] in ("enter", "exit"):
        if sc.peek_ident() != "data":
            raise sc.error(f"expected 'data' after '{words[-1]}'")
        sc.skip()
        sc.ident()
        words.append("data")
    elif words[-1] in COMBINABLE and sc.peek_ident() == "loop":
        sc.skip()
        sc.ident()
        words.append("loop")
    name = " ".join(words)

    def original(a: int, b: int) -> str:
        return body[a:b] if fortran else sc.text[a:b]

    named_target = None
    dargs: Tuple[str, ...] = ()
    sc.skip()
    if sc.peek() == "(":
        if name not in DIRECTIVES_WITH_ARGS:
            raise sc.error(f"directive '{name}' takes no argument list")
        open_pos = sc.pos
        sc.group()
        inner = original(open_pos + 1, sc.pos - 1)
        dargs = tuple(split_args(inner))
        if name == "routine":
            if len(dargs) != 1 or not dargs[0]:
                raise sc.error("routine takes exactly one name", open_pos)
            named_target = dargs[0]
            dargs = ()

    clauses = []
    while True:
        sc.skip(commas=True)
        if sc.at_end():
            break
        cpos = sc.pos
        cname = sc.ident()
        if cname is None:
            raise sc.error(f"unexpected {sc.peek()!r}; expected a clause")
        clause = _parse_clause(sc, cname, cpos)
        if fortran and clause.has_parens:
            # re-read arguments from the original-case text
            open_pos = sc.text.index("(", cpos)
            raw = original(open_pos + 1, sc.pos - 1)
            if clause.modifier is not None:
                raw = raw.split(":", 1)[1]
            clause = Clause(clause.name, tuple(split_args(raw)), clause.modifier, True)
        clauses.append(clause)
    return Directive(name, tuple(clauses), named_target, dargs, language,
                     location or Location())


def pretty_print(d: Directive) -> str:
    prefix = "!$acc" if d.language == "Fortran" else "#pragma acc"
    head = d.name
    if d.named_target is not None:
        head += f"({d.named_target})"
    elif d.args:
        head += "(" + ", ".join(d.args) + ")"
    return " ".join([prefix, head, *(str(c) for c in d.clauses)])
