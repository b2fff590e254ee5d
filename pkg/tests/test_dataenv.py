import random

import pytest
from hypothesis import given, strategies as st

from accvv.acc_parse import parse_directive, scan_file
from accvv.dataenv import (
    DataEnv,
    DataOp,
    EventKind,
    ScopeError,
    UnsupportedDirective,
    apply,
    apply_all,
    is_present,
    ref_trace,
    replay,
)

from conftest import GOLDEN, LISTINGS


class NaiveTable:
    """Straightforward reference model: a dict of counters and a flat log."""

    ENTER = {"region_enter", "enter_data"}

    def __init__(self, version):
        self.version = version
        self.count = {}
        self.log = []

    def run(self, ops):
        for op in ops:
            n = self.count.get(op.var, 0)
            moves = op.kind in ("copy", "copyin", "copyout")
            if op.scope in self.ENTER:
                if n == 0:
                    self.log.append(("Alloc", op.var))
                    if moves:
                        self.log.append(("CopyIn", op.var))
                self.count[op.var] = n + 1
            elif n == 0:
                self.log.append(("RuntimeError" if self.version <= (3, 0) else "NoAction", op.var))
            elif n == 1:
                if moves:
                    self.log.append(("CopyOut", op.var))
                self.log.append(("Dealloc", op.var))
                del self.count[op.var]
            else:
                self.count[op.var] = n - 1
        return self


# random well-scoped programs: unstructured enter/exit ops plus properly nested regions

REGION = {"copy": ("copy", "copy"), "copyin": ("copyin", "delete"),
          "copyout": ("create", "copyout"), "create": ("create", "delete")}


def random_program(rng, variables, budget, depth=0):
    ops = []
    while len(ops) < budget:
        room = budget - len(ops)
        roll = rng.random()
        if roll < 0.3 and room >= 2 and depth < 3:
            clauses = [(rng.choice(list(REGION)), rng.choice(variables))
                       for _ in range(rng.randint(1, max(1, min(3, (room - 1) // 2))))]
            enter = [DataOp(REGION[k][0], v, "region_enter") for k, v in clauses]
            leave = [DataOp(REGION[k][1], v, "region_exit") for k, v in reversed(clauses)]
            body = random_program(rng, variables, room - 2 * len(clauses), depth + 1)
            ops += enter + body + leave
        elif roll < 0.65:
            ops.append(DataOp(rng.choice(["copyin", "create"]), rng.choice(variables), "enter_data"))
        elif roll < 0.95:
            ops.append(DataOp(rng.choice(["copyout", "delete"]), rng.choice(variables), "exit_data"))
        elif ops or depth:
            break
    return ops


def program(seed):
    rng = random.Random(seed)
    variables = ["a", "b", "c", "d"][: rng.randint(1, 4)]
    return rng.choice([(3, 0), (3, 1), (3, 2), (2, 7)]), random_program(rng, variables, rng.randint(1, 20))


def compare_with_naive(version, ops):
    env = apply_all(DataEnv.fresh(version), ops)
    naive = NaiveTable(version).run(ops)
    assert env.counters() == naive.count
    assert {v for v in "abcd" if is_present(env, v)} == set(naive.count)
    assert [(e.kind.value, e.var) for e in env.event_log] == naive.log


def test_generator_is_well_scoped():
    for seed in range(200):
        _, ops = program(seed)
        assert 1 <= len(ops) <= 20
        assert len({op.var for op in ops}) <= 4


@pytest.mark.parametrize("block", range(4))
def test_against_naive_model(block):
    for seed in range(block * 250, (block + 1) * 250):
        compare_with_naive(*program(seed))


@given(st.integers(0, 2**32 - 1))
def test_against_naive_model_property(seed):
    compare_with_naive(*program(seed))


def test_apply_is_pure():
    env = DataEnv.fresh("3.1")
    after = apply(env, DataOp("copyin", "a", "enter_data"))
    assert env.counters() == {} and env.event_log == ()
    assert after.counters() == {"a": 1}


def test_nested_copy_transfers_only_at_outer_boundary():
    ops = [DataOp("copy", "a", "region_enter"), DataOp("copyin", "a", "enter_data"),
           DataOp("copyout", "a", "exit_data"), DataOp("copy", "a", "region_exit")]
    assert apply_all(DataEnv.fresh("3.2"), ops).trace().splitlines() == [
        "Alloc a 0->1", "CopyIn a 0->1", "CopyOut a 1->0", "Dealloc a 1->0"]


@pytest.mark.parametrize("version, kind", [("2.7", "RuntimeError"), ("3.0", "RuntimeError"),
                                           ("3.1", "NoAction"), ("3.2", "NoAction")])
def test_exit_on_absent_variable(version, kind):
    env = apply(DataEnv.fresh(version), DataOp("delete", "x", "exit_data"))
    assert [str(e) for e in env.event_log] == [f"{kind} x 0->0"]


@pytest.mark.parametrize("kind, scope", [("copyout", "enter_data"), ("copyin", "exit_data"),
                                         ("copy", "enter_data"), ("present", "region_enter"),
                                         ("copyin", "sideways")])
def test_illegal_scope(kind, scope):
    with pytest.raises(ScopeError):
        apply(DataEnv.fresh(), DataOp(kind, "a", scope))


def _replay_listing(name, version):
    directives = scan_file((LISTINGS / name).read_text(), "C").directives
    return replay(DataEnv.fresh(version), directives)


@pytest.mark.parametrize("version", ["3.1", "3.0"])
def test_reference_counter_zero_golden(version):
    env = _replay_listing("reference_counter_zero.c", version)
    assert env.trace() == (GOLDEN / f"reference_counter_zero-{version}.trace").read_text()
    assert ref_trace(env, "c") == [0, 1, 0]


def test_update_semantics():
    env = DataEnv.fresh("3.2")
    env = replay(env, [parse_directive("#pragma acc enter data copyin(a[0:n])"),
                       parse_directive("#pragma acc update host(a[0:n], b) if_present"),
                       parse_directive("#pragma acc update device(b)")])
    assert env.trace().splitlines()[-3:] == ["CopyOut a 1->1", "NoAction b 0->0",
                                             "RuntimeError b 0->0"]


def test_replay_rejects_unsupported():
    with pytest.raises(UnsupportedDirective):
        replay(DataEnv.fresh(), [parse_directive("#pragma acc init")])


def test_enter_exit_data_listing():
    # both exit branches are taken in straight-line replay; the second finds nothing
    env = _replay_listing("enter_exit_data.c", "3.2")
    kinds = [e.kind for e in env.event_log if e.var == "data"]
    assert kinds == [EventKind.ALLOC, EventKind.COPYIN, EventKind.COPYOUT, EventKind.DEALLOC,
                     EventKind.NO_ACTION]


def test_empty_replay_is_identity():
    env = DataEnv.fresh("3.1")
    assert replay(env, []) == env


def test_double_copyin_single_delete():
    ops = [DataOp("copyin", "a", "enter_data"), DataOp("copyin", "a", "enter_data"),
           DataOp("delete", "a", "exit_data")]
    env = apply_all(DataEnv.fresh("3.2"), ops)
    assert ref_trace(env, "a") == [0, 1, 2, 1]
    assert EventKind.DEALLOC not in [e.kind for e in env.event_log]
    assert is_present(env, "a")


def test_is_present_examples():
    env = DataEnv.fresh()
    assert not is_present(env, "a")
    env = apply(env, DataOp("copyin", "a", "enter_data"))
    assert is_present(env, "a")
    assert not is_present(apply(env, DataOp("delete", "a", "exit_data")), "a")


@given(st.integers(0, 2**32 - 1))
def test_versions_differ_only_in_zero_count_events(seed):
    _, ops = program(seed)
    old = apply_all(DataEnv.fresh("3.0"), ops)
    new = apply_all(DataEnv.fresh("3.1"), ops)
    assert old.counters() == new.counters()
    assert len(old.event_log) == len(new.event_log)
    for a, b in zip(old.event_log, new.event_log):
        if a != b:
            assert (a.kind, b.kind) == (EventKind.RUNTIME_ERROR, EventKind.NO_ACTION)
            assert (a.var, a.ref_before, a.ref_after) == (b.var, b.ref_before, b.ref_after)


@given(st.integers(0, 2**32 - 1))
def test_copyout_only_when_count_reaches_zero(seed):
    version, ops = program(seed)
    env = apply_all(DataEnv.fresh(version), ops)
    for event in env.event_log:
        if event.kind == EventKind.COPYOUT:
            assert (event.ref_before, event.ref_after) == (1, 0)
    assert all(after >= 0 for _, _, after in env.ref_log)
