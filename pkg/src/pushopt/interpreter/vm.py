"""Single-step execution and per-move runs, delegated to the compiled core.

Every call takes a population state, a member index ``p``, a compiled
program and the population view that backs ``vector.current`` and
``vector.best``. Instructions check their operands (and the room they need
on the output stacks) before touching anything, so an instruction either
runs to completion or leaves the data stacks exactly as they were.
"""

from __future__ import annotations

import numpy as np

from .._stack import VM, CodeRef, ViewRef, addr, lib

FLOAT_RAND_LO = -1.0
FLOAT_RAND_HI = 1.0
INT_RAND_LO = -10
INT_RAND_HI = 10


def push_block(vm: VM, p: int, code: CodeRef) -> None:
    """Push the program's top-level atoms onto exec, first atom on top."""
    lib().pv_push_block(vm.ref, p, code.ref)


def step(vm: VM, p: int, code: CodeRef, view: ViewRef) -> None:
    """Pop and execute one exec entry, charging one execution."""
    lib().pv_step(vm.ref, p, code.ref, view.ref)


def run_exec(vm: VM, p: int, code: CodeRef, view: ViewRef) -> int:
    """Step until the exec stack empties or the execution budget is spent."""
    return lib().pv_run_exec(vm.ref, p, code.ref, view.ref)


def run_move(vm: VM, p: int, code: CodeRef, view: ViewRef) -> int:
    """Re-seed exec with the program's atoms and run under the move budget.

    Data stacks carry over from the previous move.
    """
    return lib().pv_run_move(vm.ref, p, code.ref, view.ref)


def apply(vm: VM, p: int, op: int, code: CodeRef, view: ViewRef) -> None:
    """Execute instruction ``op`` directly on member ``p``."""
    lib().pv_apply(vm.ref, p, int(op), code.ref, view.ref)


def apply_each(vm: VM, ops, code: CodeRef, view: ViewRef) -> None:
    """Execute instruction ``ops[p]`` directly on member ``p``, for every member."""
    ops = np.ascontiguousarray(ops, dtype=np.int64)
    if ops.shape != (vm.members,):
        raise ValueError("need one opcode per member")
    lib().pv_apply_each(vm.ref, addr(ops), code.ref, view.ref)
