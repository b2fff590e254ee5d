"""Reference-counted device data environment.

This is an executable model of the present table: which variables are
resident on the device, with how many outstanding references, and which
transfers happen at each data-clause boundary.  It is used as an oracle for
what a conforming runtime should do, including the change in behaviour for
an exit-side clause on a variable whose count is already zero (a runtime
error up to 3.0, silently ignored from 3.1 on).

Every transition is pure: :func:`apply` returns a new :class:`DataEnv` and
leaves its input untouched, so traces can be forked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, List, Mapping, Optional, Tuple, Union

from accvv.acc_parse.parser import Directive, data_var
from accvv.versions import Version, parse_version

ENTER_SCOPES = ("region_enter", "enter_data")
EXIT_SCOPES = ("region_exit", "exit_data")
SCOPES = ENTER_SCOPES + EXIT_SCOPES

LEGAL_SCOPES = {
    "copyin": ENTER_SCOPES,
    "create": ENTER_SCOPES,
    "copyout": EXIT_SCOPES,
    "delete": EXIT_SCOPES,
    "copy": ("region_enter", "region_exit"),
}
TRANSFERS = {"copyin", "copyout", "copy"}

# last version in which an exit on an absent variable is a runtime error
LAST_ERRORING_VERSION = (3, 0)

# clause -> (op at region entry, op at region exit) for structured regions
REGION_CLAUSES = {
    "copy": ("copy", "copy"),
    "copyin": ("copyin", "delete"),
    "copyout": ("create", "copyout"),
    "create": ("create", "delete"),
}
COMPUTE_CONSTRUCTS = {
    "parallel", "kernels", "serial", "loop", "atomic",
    "parallel loop", "kernels loop", "serial loop",
}


class ScopeError(ValueError):
    pass


class UnsupportedDirective(ValueError):
    pass


class EventKind(str, enum.Enum):
    ALLOC = "Alloc"
    COPYIN = "CopyIn"
    COPYOUT = "CopyOut"
    DEALLOC = "Dealloc"
    NO_ACTION = "NoAction"
    RUNTIME_ERROR = "RuntimeError"


@dataclass(frozen=True)
class DataEvent:
    kind: EventKind
    var: str
    ref_before: int
    ref_after: int

    def __str__(self):
        return f"{self.kind.value} {self.var} {self.ref_before}->{self.ref_after}"


@dataclass(frozen=True)
class PresentEntry:
    var: str
    ref_count: int
    device_value: Any = None


@dataclass(frozen=True)
class DataOp:
    kind: str
    var: str
    scope: str
    value: Any = None


@dataclass(frozen=True)
class DataEnv:
    version: Version = (3, 2)
    entries: Mapping[str, PresentEntry] = field(default_factory=dict)
    event_log: Tuple[DataEvent, ...] = ()
    # (var, before, after) for every op, including ones that change nothing
    ref_log: Tuple[Tuple[str, int, int], ...] = ()

    @classmethod
    def fresh(cls, version: Union[str, Version] = (3, 2)) -> "DataEnv":
        return cls(parse_version(version))

    def ref_count(self, var: str) -> int:
        entry = self.entries.get(var)
        return entry.ref_count if entry else 0

    def counters(self) -> dict:
        return {var: e.ref_count for var, e in self.entries.items()}

    def trace(self) -> str:
        return "".join(f"{event}\n" for event in self.event_log)


def is_present(env: DataEnv, var: str) -> bool:
    return env.ref_count(var) >= 1


def ref_trace(env: DataEnv, var: str) -> List[int]:
    """Successive counter values of ``var``, starting from 0."""
    values = [0]
    for name, before, after in env.ref_log:
        if name == var and after != before:
            values.append(after)
    return values


def _check_scope(op: DataOp) -> None:
    if op.scope not in SCOPES:
        raise ScopeError(f"unknown scope {op.scope!r}")
    if op.kind not in LEGAL_SCOPES:
        raise ScopeError(f"unknown data operation {op.kind!r}")
    if op.scope not in LEGAL_SCOPES[op.kind]:
        raise ScopeError(f"{op.kind} is not allowed at {op.scope}")


def apply(env: DataEnv, op: DataOp) -> DataEnv:
    _check_scope(op)
    entries = dict(env.entries)
    events = []
    var = op.var
    before = env.ref_count(var)
    transfers = op.kind in TRANSFERS

    if op.scope in ENTER_SCOPES:
        after = before + 1
        if before == 0:
            events.append(DataEvent(EventKind.ALLOC, var, 0, 1))
            if transfers:
                events.append(DataEvent(EventKind.COPYIN, var, 0, 1))
            entries[var] = PresentEntry(var, 1, op.value if transfers else None)
        else:
            entries[var] = replace(entries[var], ref_count=after)
    elif before == 0:
        after = 0
        kind = (EventKind.RUNTIME_ERROR if env.version <= LAST_ERRORING_VERSION
                else EventKind.NO_ACTION)
        events.append(DataEvent(kind, var, 0, 0))
    else:
        after = before - 1
        if after == 0:
            if transfers:
                events.append(DataEvent(EventKind.COPYOUT, var, before, 0))
            events.append(DataEvent(EventKind.DEALLOC, var, before, 0))
            del entries[var]
        else:
            entries[var] = replace(entries[var], ref_count=after)

    return DataEnv(env.version, entries, env.event_log + tuple(events),
                   env.ref_log + ((var, before, after),))


def apply_all(env: DataEnv, ops: Iterable[DataOp]) -> DataEnv:
    for op in ops:
        env = apply(env, op)
    return env


def _update(env: DataEnv, d: Directive) -> DataEnv:
    if_present = d.clause("if_present") is not None
    events = list(env.event_log)
    for clause in d.clauses:
        if clause.name in ("host", "self"):
            kind = EventKind.COPYOUT
        elif clause.name == "device":
            kind = EventKind.COPYIN
        else:
            continue
        for arg in clause.args:
            var = data_var(arg)
            count = env.ref_count(var)
            if count:
                events.append(DataEvent(kind, var, count, count))
            elif if_present:
                events.append(DataEvent(EventKind.NO_ACTION, var, 0, 0))
            else:
                events.append(DataEvent(EventKind.RUNTIME_ERROR, var, 0, 0))
    return replace(env, event_log=tuple(events))


def region_ops(d: Directive) -> Tuple[List[DataOp], List[DataOp]]:
    """Expand a structured construct's data clauses into entry and exit ops.

    Exit ops come back in reverse clause order so regions unwind like a stack.
    """
    enter, leave = [], []
    for clause in d.clauses:
        if clause.name not in REGION_CLAUSES:
            continue
        on_enter, on_exit = REGION_CLAUSES[clause.name]
        for arg in clause.args:
            var = data_var(arg)
            enter.append(DataOp(on_enter, var, "region_enter"))
            leave.append(DataOp(on_exit, var, "region_exit"))
    leave.reverse()
    return enter, leave


def _unstructured_ops(d: Directive, scope: str, kinds) -> List[DataOp]:
    return [DataOp(clause.name, data_var(arg), scope)
            for clause in d.clauses if clause.name in kinds
            for arg in clause.args]


def replay(env: DataEnv, directives: Iterable[Directive]) -> DataEnv:
    """Fold the data effects of a directive sequence into ``env``.

    A structured ``data`` region stays open until the first directive located
    after its ``end_line`` (or its Fortran ``end data``), and otherwise until
    the end of the sequence.  Compute constructs open and close their own
    implicit region immediately, since no data directive may appear inside.
    """
    open_regions: List[Tuple[Optional[int], List[DataOp]]] = []

    def close_top(e):
        _, leave = open_regions.pop()
        return apply_all(e, leave)

    for d in directives:
        line = d.location.line
        while open_regions and line is not None:
            end = open_regions[-1][0]
            if end is None or line <= end:
                break
            env = close_top(env)

        name = d.name
        if name == "data":
            enter, leave = region_ops(d)
            env = apply_all(env, enter)
            open_regions.append((d.end_line, leave))
        elif name == "end data":
            if open_regions:
                env = close_top(env)
        elif name == "enter data":
            env = apply_all(env, _unstructured_ops(d, "enter_data", ("copyin", "create")))
        elif name == "exit data":
            env = apply_all(env, _unstructured_ops(d, "exit_data", ("copyout", "delete")))
        elif name == "update":
            env = _update(env, d)
        elif name in COMPUTE_CONSTRUCTS:
            enter, leave = region_ops(d)
            env = apply_all(apply_all(env, enter), leave)
        elif name.startswith("end ") or name == "host_data":
            continue
        else:
            raise UnsupportedDirective(f"{name!r} has no data-environment effect to replay")

    while open_regions:
        env = close_top(env)
    return env
