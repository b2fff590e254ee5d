"""OpenACC directive parsing and per-version validation."""

from accvv.acc_parse.legality import (
    DeviceTypeKeywords,
    TableError,
    UnknownClause,
    UnknownDirective,
    UnknownProfile,
    VersionTable,
    Violation,
    default_keywords,
    default_table,
    parse_device_types,
    parse_version_table,
    validate,
)
from accvv.acc_parse.parser import (
    AccError,
    ArraySection,
    Clause,
    Directive,
    Location,
    NotADirective,
    ParseError,
    array_section,
    data_var,
    parse_directive,
    pretty_print,
)
from accvv.acc_parse.scan import ScanResult, scan_file

__all__ = [
    "AccError", "ArraySection", "Clause", "DeviceTypeKeywords", "Directive",
    "Location", "NotADirective", "ParseError", "ScanResult", "TableError",
    "UnknownClause", "UnknownDirective", "UnknownProfile", "VersionTable",
    "Violation", "array_section", "data_var", "default_keywords",
    "default_table", "parse_device_types", "parse_directive",
    "parse_version_table", "pretty_print", "scan_file", "validate",
]
