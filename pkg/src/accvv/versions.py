"""MAJOR.MINOR specification versions as comparable tuples."""

import re
from typing import Tuple, Union

Version = Tuple[int, int]

_VERSION_RE = re.compile(r"^\s*(\d+)\.(\d+)\s*$")


def parse_version(value: Union[str, float, Version]) -> Version:
    """Parse ``"3.1"`` (or ``3.1`` or ``(3, 1)``) into ``(3, 1)``."""
    if isinstance(value, tuple):
        if len(value) != 2 or not all(isinstance(x, int) and x >= 0 for x in value):
            raise ValueError(f"invalid version tuple: {value!r}")
        return value
    m = _VERSION_RE.match(str(value))
    if not m:
        raise ValueError(f"invalid version {value!r}: expected MAJOR.MINOR")
    return int(m.group(1)), int(m.group(2))


def format_version(version: Version) -> str:
    return f"{version[0]}.{version[1]}"
