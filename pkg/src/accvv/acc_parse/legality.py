"""Per-version directive/clause legality and device_type keyword checks."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from accvv.acc_parse.parser import AccError, Directive, Location
from accvv.versions import Version, format_version, parse_version

MIN_TABLE_VERSION = (1, 0)
MAX_TABLE_VERSION = (3, 2)

DEFAULT_PROFILE = "nvidia"

RULE_DIRECTIVE_VERSION = "directive-version"
RULE_CLAUSE_VERSION = "clause-version"
RULE_DEVICE_TYPE = "device-type-keyword"


class TableError(AccError):
    pass


class UnknownDirective(AccError):
    def __init__(self, directive: str):
        self.directive = directive
        super().__init__(f"unknown directive {directive!r}")


class UnknownClause(AccError):
    def __init__(self, directive: str, clause: str):
        self.directive = directive
        self.clause = clause
        super().__init__(f"unknown clause {clause!r} on directive {directive!r}")


class UnknownProfile(AccError):
    pass


@dataclass(frozen=True)
class VersionTable:
    directives: Mapping[str, Version]
    clauses: Mapping[Tuple[str, str], Version]

    def __post_init__(self):
        for (directive, clause), version in self.clauses.items():
            if directive not in self.directives:
                raise TableError(f"{directive}.{clause}: directive {directive!r} has no entry")
            _check_range(f"{directive}.{clause}", version)
        for directive, version in self.directives.items():
            _check_range(directive, version)


@dataclass(frozen=True)
class DeviceTypeKeywords:
    profiles: Mapping[str, FrozenSet[str]]

    def __post_init__(self):
        for name, keywords in self.profiles.items():
            if not keywords:
                raise TableError(f"profile {name!r} has no keywords")

    def allowed(self, profile: str) -> FrozenSet[str]:
        try:
            return self.profiles[profile]
        except KeyError:
            raise UnknownProfile(
                f"unknown device_type profile {profile!r} "
                f"(known: {', '.join(sorted(self.profiles))})") from None


@dataclass(frozen=True)
class Violation:
    directive: str
    clause: Optional[str]
    rule: str
    message: str
    first_legal: Optional[Version] = None
    location: Location = field(default=Location(), compare=False)

    def __str__(self):
        clause = self.clause or "-"
        rule = self.rule
        if self.first_legal is not None:
            rule += f"(>={format_version(self.first_legal)})"
        return f"{self.location} {self.directive} {clause} {rule}"


def _check_range(key, version):
    if not MIN_TABLE_VERSION <= version <= MAX_TABLE_VERSION:
        raise TableError(f"{key}: version {format_version(version)} outside "
                         f"{format_version(MIN_TABLE_VERSION)}..{format_version(MAX_TABLE_VERSION)}")


def _assignments(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TableError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        yield lineno, key.strip(), value.strip()


def parse_version_table(text: str) -> VersionTable:
    directives: Dict[str, Version] = {}
    clauses: Dict[Tuple[str, str], Version] = {}
    for lineno, key, value in _assignments(text):
        try:
            version = parse_version(value)
        except ValueError as exc:
            raise TableError(f"line {lineno}: {exc}") from None
        directive, _, clause = key.partition(".")
        directive = " ".join(directive.split())
        if clause:
            clauses[(directive, clause.strip())] = version
        else:
            directives[directive] = version
    return VersionTable(directives, clauses)


def parse_device_types(text: str) -> DeviceTypeKeywords:
    profiles = {}
    for lineno, key, value in _assignments(text):
        head, _, name = key.partition(".")
        if head != "profile" or not name:
            raise TableError(f"line {lineno}: expected 'profile.<name> = keywords'")
        profiles[name.strip()] = frozenset(k.strip().lower() for k in value.split(",") if k.strip())
    return DeviceTypeKeywords(profiles)


@functools.lru_cache(maxsize=None)
def default_table() -> VersionTable:
    text = resources.files("accvv.acc_parse").joinpath("data/versions.txt").read_text("utf-8")
    return parse_version_table(text)


@functools.lru_cache(maxsize=None)
def default_keywords() -> DeviceTypeKeywords:
    text = resources.files("accvv.acc_parse").joinpath("data/device_types.txt").read_text("utf-8")
    return parse_device_types(text)


def validate(
    d: Directive,
    version: Union[str, Version],
    table: Optional[VersionTable] = None,
    keywords: Optional[DeviceTypeKeywords] = None,
    profile: str = DEFAULT_PROFILE,
) -> List[Violation]:
    """Check ``d`` against the legality table at ``version``.

    Raises :class:`UnknownDirective` / :class:`UnknownClause` when the table
    has no entry at all, which is a different thing from an illegal use.
    """
    version = parse_version(version)
    table = table or default_table()
    keywords = keywords or default_keywords()
    allowed = keywords.allowed(profile)

    if d.name not in table.directives:
        raise UnknownDirective(d.name)
    out = []
    first = table.directives[d.name]
    if version < first:
        out.append(Violation(d.name, None, RULE_DIRECTIVE_VERSION,
                             f"{d.name} requires version {format_version(first)}",
                             first, d.location))
    for clause in d.clauses:
        key = (d.name, clause.name)
        if key not in table.clauses:
            raise UnknownClause(d.name, clause.name)
        first = table.clauses[key]
        if version < first:
            out.append(Violation(
                d.name, clause.name, RULE_CLAUSE_VERSION,
                f"{clause.name} on {d.name} requires version {format_version(first)}",
                first, d.location))
        if clause.name == "device_type":
            for arg in clause.args:
                if arg.strip().lower() not in allowed:
                    out.append(Violation(
                        d.name, clause.name, RULE_DEVICE_TYPE,
                        f"device_type keyword {arg!r} not accepted by profile {profile!r}",
                        None, d.location))
    return out
