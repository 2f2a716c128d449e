"""Python-side handle on a single interpreter.

``InterpreterState`` wraps a one-member slice of the compiled state arrays
and exposes the stacks as plain lists for inspection and test setup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _stack as S
from ..opcodes import OPCODES
from ..vecswarm import SwarmView
from . import vm as _vm
from .program import Program, compile_program


@dataclass(frozen=True)
class ExecutionLimits:
    max_executions_per_move: int = 100
    max_program_size: int = 100

    def __post_init__(self):
        if self.max_executions_per_move < 1 or self.max_program_size < 1:
            raise ValueError("execution limits must be positive")


_EMPTY = None


def _empty_code() -> S.CodeRef:
    global _EMPTY
    if _EMPTY is None:
        _EMPTY = S.CodeRef(compile_program(Program()))
    return _EMPTY


class InterpreterState:
    """Typed stacks of one program instance.

    ``inputs`` is a sequence of floats, ints and bools; it is fixed for the
    lifetime of the state. ``seed`` starts the state's random stream (used by
    the rand, erc, urand and wrand instructions).
    """

    def __init__(self, dim: int, inputs=(), limits: ExecutionLimits | None = None,
                 seed: int = 0):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim
        self.limits = limits or ExecutionLimits()
        self.vm = S.allocate(1, dim, seed=seed)
        self.p = 0
        S.clear_member(self.vm, self.p, self.limits.max_executions_per_move)
        self.code = _empty_code()
        self._program = None
        inputs = tuple(inputs)
        if len(inputs) > S.INCAP:
            raise ValueError(f"at most {S.INCAP} inputs")
        for k, x in enumerate(inputs):
            if isinstance(x, (bool, np.bool_)):
                self.vm.inkind[self.p, k] = S.IN_BOOL
                self.vm.ini[self.p, k] = int(x)
            elif isinstance(x, (int, np.integer)):
                if abs(int(x)) >= S.INT_LIMIT:
                    raise ValueError("integer input out of range")
                self.vm.inkind[self.p, k] = S.IN_INT
                self.vm.ini[self.p, k] = int(x)
            else:
                if not np.isfinite(x):
                    raise ValueError("float inputs must be finite")
                self.vm.inkind[self.p, k] = S.IN_FLOAT
                self.vm.inf[self.p, k] = float(x)
        self.vm.n[self.p, S.NIN] = len(inputs)

    @classmethod
    def view(cls, vm: S.VM, p: int, limits: ExecutionLimits | None = None) -> "InterpreterState":
        """Wrap member ``p`` of an existing population state without copying."""
        self = cls.__new__(cls)
        self.vm = vm
        self.p = p
        self.dim = vm.dim
        self.limits = limits or ExecutionLimits(int(vm.n[p, S.LIMIT]))
        self.code = _empty_code()
        self._program = None
        return self

    def seed(self, seed: int) -> "InterpreterState":
        """Restart the random stream (shared by all members of a population state)."""
        self.vm.seed(seed)
        return self

    # -- stack views ---------------------------------------------------------

    def _size(self, slot):
        return int(self.vm.n[self.p, slot])

    @property
    def float_stack(self) -> list[float]:
        return [float(x) for x in self.vm.f[self.p, :self._size(S.NF)]]

    @property
    def integer_stack(self) -> list[int]:
        return [int(x) for x in self.vm.i[self.p, :self._size(S.NI)]]

    @property
    def boolean_stack(self) -> list[bool]:
        return [bool(x) for x in self.vm.b[self.p, :self._size(S.NB)]]

    @property
    def vector_stack(self) -> list[np.ndarray]:
        return [row.copy() for row in self.vm.v[self.p, :self._size(S.NV)]]

    @property
    def exec_depth(self) -> int:
        return self._size(S.NE)

    @property
    def exec_counter(self) -> int:
        return self._size(S.COUNT)

    @property
    def inputs(self) -> tuple:
        out = []
        for k in range(self._size(S.NIN)):
            kind = self.vm.inkind[self.p, k]
            if kind == S.IN_FLOAT:
                out.append(float(self.vm.inf[self.p, k]))
            elif kind == S.IN_BOOL:
                out.append(bool(self.vm.ini[self.p, k]))
            else:
                out.append(int(self.vm.ini[self.p, k]))
        return tuple(out)

    def snapshot(self) -> dict:
        """Copy of every data stack and the inputs, for comparisons."""
        return {
            "float": self.float_stack,
            "integer": self.integer_stack,
            "boolean": self.boolean_stack,
            "vector": [tuple(float(x) for x in v) for v in self.vector_stack],
            "input": self.inputs,
        }

    # -- setup ---------------------------------------------------------------

    def push_float(self, *xs):
        for x in xs:
            S.fpush(self.vm, self.p, float(x))
        return self

    def push_integer(self, *xs):
        for x in xs:
            S.ipush(self.vm, self.p, int(x))
        return self

    def push_boolean(self, *xs):
        for x in xs:
            S.bpush(self.vm, self.p, bool(x))
        return self

    def push_vector(self, *vs):
        for v in vs:
            v = np.asarray(v, dtype=np.float64)
            if v.shape != (self.dim,):
                raise ValueError(f"vector must have length {self.dim}")
            S.vpush(self.vm, self.p, v)
        return self

    def load_exec(self, program: Program):
        """Replace the exec stack with ``program``'s atoms (first atom on top)."""
        self.code = S.CodeRef(compile_program(program))
        self._program = program
        self.vm.n[self.p, S.NE] = 0
        self.vm.n[self.p, S.NFR] = 0
        self.vm.n[self.p, S.COUNT] = 0
        _vm.push_block(self.vm, self.p, self.code)
        return self


def _view_ref(state: InterpreterState, ctx: SwarmView | None) -> S.ViewRef:
    if ctx is None:
        ctx = SwarmView.solo(state.dim)
    if ctx.dim != state.dim:
        raise ValueError("swarm view dimension does not match the state")
    return S.ViewRef(ctx.current, ctx.best, int(ctx.self_index))


def step(state: InterpreterState, ctx: SwarmView | None = None) -> bool:
    """Execute one exec entry. Returns False once the state has halted."""
    if state.exec_depth == 0 or state.exec_counter >= state.limits.max_executions_per_move:
        return False
    _vm.step(state.vm, state.p, state.code, _view_ref(state, ctx))
    return state.exec_depth > 0 and state.exec_counter < state.limits.max_executions_per_move


def run_exec(state: InterpreterState, ctx: SwarmView | None = None) -> int:
    return int(_vm.run_exec(state.vm, state.p, state.code, _view_ref(state, ctx)))


def run_move(state: InterpreterState, program: Program, ctx: SwarmView | None = None,
             seed: int | None = None) -> InterpreterState:
    """Run ``program`` once against ``state``; data stacks persist between calls."""
    if seed is not None:
        state.seed(seed)
    if program is not state._program:
        state.code = S.CodeRef(compile_program(program))
        state._program = program
    _vm.run_move(state.vm, state.p, state.code, _view_ref(state, ctx))
    return state


def execute_instruction(state: InterpreterState, name: str,
                        ctx: SwarmView | None = None) -> InterpreterState:
    """Apply one named instruction directly (no exec-stack pop, no charge).

    Exec-manipulating instructions see the current exec stack.
    """
    try:
        op = OPCODES[name]
    except KeyError:
        raise ValueError(f"unknown instruction {name!r}") from None
    _vm.apply(state.vm, state.p, op, state.code, _view_ref(state, ctx))
    return state
