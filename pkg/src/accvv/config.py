"""Harness configuration files.

A configuration file is line oriented::

    # comments start with '#'
    cc = nvc
    flags.c = -acc=gpu -Minfo=all
    timeout = 10

Per-language values use dotted keys.  Every key that appears in a file is
remembered as *explicit*, which is what :func:`merge_configs` uses to decide
whether an overlay value wins over its base.
"""

from __future__ import annotations

import hashlib
import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Mapping, Optional, Tuple

from accvv import LANGUAGES
from accvv.versions import Version, format_version, parse_version

OUTPUT_FORMATS = ("json", "txt", "html")

DEFAULT_TIMEOUT = 10
DEFAULT_FORMAT = "json"
DEFAULT_MAX_VERSION = (3, 2)

# config key -> language for compiler commands and flag lists
COMPILER_KEYS = {"cc": "C", "cxx": "C++", "fc": "Fortran"}
FLAG_KEYS = {"flags.c": "C", "flags.cxx": "C++", "flags.fortran": "Fortran"}
HOOK_KEYS = ("pre_compile", "post_compile", "pre_run", "post_run")

# canonical order, also used by serialize_config
KEYS = (
    *COMPILER_KEYS,
    *FLAG_KEYS,
    "test_dir",
    "build_dir",
    "tags",
    "dir",
    "max_version",
    "exclude",
    "timeout",
    "format",
    *HOOK_KEYS,
    "resume_env",
)

_LANGUAGE_ALIASES = {
    "c": "C",
    "c++": "C++",
    "cxx": "C++",
    "cpp": "C++",
    "fortran": "Fortran",
    "f90": "Fortran",
}


class ConfigError(Exception):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class MissingCompiler(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class MalformedValue(ConfigError):
    pass


def parse_language(name: str) -> str:
    try:
        return _LANGUAGE_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown language {name!r}") from None


@dataclass(frozen=True)
class HarnessConfig:
    compilers: Mapping[str, str] = field(default_factory=dict)
    flags: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)
    test_dir: Path = Path(".")
    build_dir: Path = Path("build")
    tag_filter: Optional[FrozenSet[str]] = None
    dir_filter: Optional[str] = None
    max_spec_version: Version = DEFAULT_MAX_VERSION
    excluded_languages: FrozenSet[str] = frozenset()
    timeout_seconds: int = DEFAULT_TIMEOUT
    output_format: str = DEFAULT_FORMAT
    pre_compile: Optional[str] = None
    post_compile: Optional[str] = None
    pre_run: Optional[str] = None
    post_run: Optional[str] = None
    resume_env: Optional[Path] = None
    explicit: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def flags_for(self, language: str) -> Tuple[str, ...]:
        return tuple(self.flags.get(language, ()))

    def digest(self) -> str:
        """Content hash of the configuration, ignoring where to resume from."""
        items = {k: v for k, v in self.explicit.items() if k != "resume_env"}
        text = serialize_items(items)
        return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def _parse_value(key: str, raw: str, line: Optional[int]) -> Any:
    raw = raw.strip()
    try:
        if key in COMPILER_KEYS:
            if not raw:
                raise ValueError("compiler command must not be empty")
            shlex.split(raw)
            return raw
        if key in FLAG_KEYS:
            return tuple(shlex.split(raw))
        if key in ("test_dir", "build_dir"):
            if not raw:
                raise ValueError("path must not be empty")
            return raw
        if key == "tags":
            tags = frozenset(t.strip() for t in raw.split(",") if t.strip())
            return tags or None
        if key == "dir":
            return raw.strip("/") or None
        if key == "max_version":
            return parse_version(raw)
        if key == "exclude":
            return frozenset(parse_language(x) for x in raw.split(",") if x.strip())
        if key == "timeout":
            value = int(raw)
            if value < 1:
                raise ValueError("timeout must be at least 1 second")
            return value
        if key == "format":
            if raw not in OUTPUT_FORMATS:
                raise ValueError(f"format must be one of {', '.join(OUTPUT_FORMATS)}")
            return raw
        # hooks and resume_env
        return raw or None
    except ValueError as exc:
        raise MalformedValue(f"{key}: {exc}", line) from None


def _format_value(key: str, value: Any) -> str:
    if value is None:
        return ""
    if key in FLAG_KEYS:
        return shlex.join(value)
    if key == "tags":
        return ",".join(sorted(value))
    if key == "max_version":
        return format_version(value)
    if key == "exclude":
        return ",".join(lang for lang in LANGUAGES if lang in value)
    return str(value)


def serialize_items(items: Mapping[str, Any]) -> str:
    lines = [f"{key} = {_format_value(key, items[key])}" for key in KEYS if key in items]
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_config(cfg: HarnessConfig) -> str:
    return serialize_items(cfg.explicit)


def _check_compilers(items: Mapping[str, Any], lines: Mapping[str, int]) -> None:
    compiled = {COMPILER_KEYS[k] for k in COMPILER_KEYS if k in items}
    if not compiled:
        raise MissingCompiler("no compiler configured (set cc, cxx or fc)")
    for key, lang in FLAG_KEYS.items():
        if key in items and lang not in compiled:
            raise MissingCompiler(f"{key} given but no compiler for {lang}", lines.get(key))


def from_items(items: Mapping[str, Any], *, partial: bool = False,
               lines: Optional[Mapping[str, int]] = None) -> HarnessConfig:
    """Build a config from explicit key/value pairs, filling in defaults."""
    unknown = set(items) - set(KEYS)
    if unknown:
        raise UnknownKey(f"unknown key {sorted(unknown)[0]!r}")
    if not partial:
        _check_compilers(items, lines or {})

    def get(key, default=None):
        return items.get(key, default)

    def path_or_none(key):
        value = items.get(key)
        return Path(value) if value is not None else None

    return HarnessConfig(
        compilers={lang: items[k] for k, lang in COMPILER_KEYS.items() if k in items},
        flags={lang: tuple(items[k]) for k, lang in FLAG_KEYS.items() if k in items},
        test_dir=Path(get("test_dir", ".")),
        build_dir=Path(get("build_dir", "build")),
        tag_filter=get("tags"),
        dir_filter=get("dir"),
        max_spec_version=get("max_version", DEFAULT_MAX_VERSION),
        excluded_languages=get("exclude", frozenset()),
        timeout_seconds=get("timeout", DEFAULT_TIMEOUT),
        output_format=get("format", DEFAULT_FORMAT),
        pre_compile=get("pre_compile"),
        post_compile=get("post_compile"),
        pre_run=get("pre_run"),
        post_run=get("post_run"),
        resume_env=path_or_none("resume_env"),
        explicit=dict(items),
    )


def parse_config(text: str, *, partial: bool = False) -> HarnessConfig:
    """Parse configuration text.

    With ``partial=True`` the file may omit compilers; this is how overlay
    files given as later ``-c`` arguments are read.  The merged result should
    then be checked with :func:`validate_config`.
    """
    items: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise MalformedValue(f"expected 'key = value', got {stripped!r}", lineno)
        key, raw = stripped.split("=", 1)
        key = key.strip().lower()
        if key not in KEYS:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        if key in items:
            raise MalformedValue(f"duplicate key {key!r} (first set on line {lines[key]})", lineno)
        items[key] = _parse_value(key, raw, lineno)
        lines[key] = lineno
    return from_items(items, partial=partial, lines=lines)


def validate_config(cfg: HarnessConfig) -> HarnessConfig:
    _check_compilers(cfg.explicit, {})
    return cfg


def load_config(path, *, partial: bool = False) -> HarnessConfig:
    """Read a config file; relative directories resolve against its location."""
    path = Path(path)
    cfg = parse_config(path.read_text(encoding="utf-8"), partial=True)
    items = dict(cfg.explicit)
    for key in ("test_dir", "build_dir", "resume_env"):
        if items.get(key) is not None and not Path(items[key]).is_absolute():
            items[key] = str((path.parent / items[key]).resolve())
    return from_items(items, partial=partial)


def merge_configs(base: HarnessConfig, overlay: HarnessConfig) -> HarnessConfig:
    """Overlay's explicitly set keys win; everything else comes from base."""
    items = dict(base.explicit)
    items.update(overlay.explicit)
    return from_items(items, partial=True)


def override(cfg: HarnessConfig, **values: Any) -> HarnessConfig:
    """Return ``cfg`` with raw string values for the given keys replaced."""
    items = {key: _parse_value(key, str(raw), None) for key, raw in values.items()}
    return merge_configs(cfg, from_items(items, partial=True))
