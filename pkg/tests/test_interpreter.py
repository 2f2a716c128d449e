from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pushopt.evolve import random_program
from pushopt.fixtures import FIXTURE_NAMES, fixture_text, load_fixture
from pushopt.interpreter import execute_instruction
from pushopt.interpreter.program import (Block, Instruction, ParseError, Program, parse_program,
                                         print_program)
from pushopt.interpreter.state import ExecutionLimits, InterpreterState, run_move, step
from pushopt.opcodes import EVOLVABLE_NAMES, OPCODES

INPUTS = (-5.0, 5.0, 2)


def run(text: str, dim: int = 2, inputs=INPUTS, seed: int = 0) -> InterpreterState:
    state = InterpreterState(dim, inputs=inputs, seed=seed)
    return run_move(state, parse_program(text))


def apply(state: InterpreterState, *names: str) -> InterpreterState:
    for name in names:
        execute_instruction(state, name)
    return state


# -- parsing and printing ----------------------------------------------------

def test_parse_two_tokens():
    assert parse_program("(float.sin vector.wrand)") == Program(
        (Instruction("float.sin"), Instruction("vector.wrand")))


def test_parse_f13_expression_has_nine_atoms():
    text = ("(integer.- float.sin vector.wrand integer.yankdup vector.dim* vector.- "
            "input.inall float.sin vector.-)")
    assert parse_program(text).length == 9


def test_unknown_instruction_is_rejected_with_position():
    with pytest.raises(ParseError) as err:
        parse_program("(float.foo)")
    assert err.value.token == "float.foo"
    assert err.value.position == 1


@pytest.mark.parametrize("text", ["(1 2", "1 2)", "((1) (2)"])
def test_unbalanced_parentheses(text):
    with pytest.raises(ParseError):
        parse_program(text)


def test_print_examples():
    assert print_program(Program((True, Instruction("float.+")))) == "(true float.+)"
    assert print_program(Program()) == "()"


def test_literal_kinds():
    p = parse_program("(1 1.0 -2 3e5 .5 true false (x))".replace("(x)", "(integer.+)"))
    kinds = [type(a) for a in p.items]
    assert kinds == [int, float, int, float, float, bool, bool, Block]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trip(name):
    p = load_fixture(name)
    text = print_program(p)
    assert parse_program(text) == p
    assert print_program(parse_program(text)) == text
    # the printed form keeps the published token sequence
    def tokens(t):
        return t.replace("(", " ( ").replace(")", " ) ").split()
    assert tokens(text) == tokens(fixture_text(name))


def test_floats_round_trip_exactly():
    values = [0.1, -0.0, 1e-300, 1.7976931348623157e308, 0.48999998, 1 / 3, 5.0]
    p = Program(tuple(values))
    back = parse_program(print_program(p))
    assert [math.copysign(1, v) * abs(v) for v in back.items] == values
    assert all(type(v) is float for v in back.items)


atoms = st.one_of(
    st.sampled_from(sorted(OPCODES)).map(Instruction),
    st.floats(allow_nan=False, allow_infinity=False),
    st.integers(-(2 ** 62) + 1, 2 ** 62 - 1),
    st.booleans(),
)
programs = st.recursive(st.lists(atoms, max_size=8).map(tuple),
                        lambda inner: st.lists(st.one_of(atoms, inner.map(Block)), max_size=6).map(tuple),
                        max_leaves=40).map(Program)


@given(programs)
def test_round_trip_property(p):
    assert parse_program(print_program(p)) == p


@given(st.integers(0, 2 ** 32 - 1))
def test_random_programs_round_trip(seed):
    p = random_program(np.random.default_rng(seed), 100)
    assert parse_program(print_program(p)) == p


def test_length_counts_nested_atoms():
    assert parse_program("(1 (2 (3 integer.+)) ())").length == 4


# -- step and run_move -------------------------------------------------------

def test_step_arithmetic():
    s = InterpreterState(2).load_exec(parse_program("(3 4 integer.+)"))
    for _ in range(3):
        step(s)
    assert s.integer_stack == [7]
    assert not step(s)


def test_step_insufficient_operands_is_noop():
    s = InterpreterState(2).push_integer(5).load_exec(parse_program("(integer.+)"))
    step(s)
    assert s.integer_stack == [5]
    assert s.exec_counter == 1 and s.exec_depth == 0


def test_step_unpacks_block():
    s = InterpreterState(2).load_exec(parse_program("((2 3) integer.*)"))
    step(s)
    assert s.exec_depth == 3 and s.integer_stack == []
    step(s)
    step(s)
    assert s.integer_stack == [2, 3]
    step(s)
    assert s.integer_stack == [6]
    assert s.exec_counter == 4


def test_run_move_persists_data_stacks():
    s = InterpreterState(2)
    p = parse_program("(1.0)")
    run_move(s, p)
    run_move(s, p)
    assert s.float_stack == [1.0, 1.0]


def test_run_move_halts_at_execution_limit():
    s = run_move(InterpreterState(2), parse_program("(1000000 exec.do*count (exec.noop))"))
    assert s.exec_counter == 100


def test_custom_execution_limit():
    s = InterpreterState(2, limits=ExecutionLimits(max_executions_per_move=7))
    run_move(s, parse_program("(1000 exec.do*times (1.0))"))
    assert s.exec_counter == 7


def test_empty_program_changes_nothing():
    s = InterpreterState(2, inputs=INPUTS).push_float(1.5).push_vector([1, 2])
    before = s.snapshot()
    run_move(s, Program())
    assert s.snapshot() == before and s.exec_counter == 0


def test_execution_limits_must_be_positive():
    with pytest.raises(ValueError):
        ExecutionLimits(0)
    with pytest.raises(ValueError):
        ExecutionLimits(100, 0)


# -- generic stack instructions ----------------------------------------------

def test_float_swap():
    assert apply(InterpreterState(2).push_float(1.0, 2.0), "float.swap").float_stack == [2.0, 1.0]


def test_integer_rot_brings_third_to_top():
    assert apply(InterpreterState(2).push_integer(9, 8, 7), "integer.rot").integer_stack == [8, 7, 9]


def test_stackdepth_of_empty_stack():
    assert apply(InterpreterState(2), "boolean.stackdepth").integer_stack == [0]


def test_dup_pop_flush():
    s = apply(InterpreterState(2).push_boolean(True, False), "boolean.dup")
    assert s.boolean_stack == [True, False, False]
    apply(s, "boolean.pop")
    assert s.boolean_stack == [True, False]
    apply(s, "boolean.flush")
    assert s.boolean_stack == []


def test_shove_yank_yankdup_with_clamping():
    s = InterpreterState(2).push_float(1.0, 2.0, 3.0).push_integer(1)
    assert apply(s, "float.shove").float_stack == [1.0, 3.0, 2.0]
    s.push_integer(-2)  # |i| = 2
    assert apply(s, "float.yank").float_stack == [3.0, 2.0, 1.0]
    s.push_integer(99)  # clamped to the bottom
    assert apply(s, "float.yankdup").float_stack == [3.0, 2.0, 1.0, 3.0]


def test_integer_yank_uses_top_as_index():
    s = InterpreterState(2).push_integer(10, 20, 30, 2)
    assert apply(s, "integer.yank").integer_stack == [20, 30, 10]


def test_rand_ranges():
    s = InterpreterState(2, seed=3)
    for _ in range(300):
        apply(s, "float.rand", "integer.rand", "boolean.rand")
    assert all(-1.0 <= x <= 1.0 for x in s.float_stack)
    assert set(s.integer_stack) <= set(range(-10, 11)) and len(set(s.integer_stack)) > 15
    assert set(s.boolean_stack) == {True, False}


# -- arithmetic and comparisons ----------------------------------------------

def test_float_division():
    assert apply(InterpreterState(2).push_float(6.0, 3.0), "float./").float_stack == [2.0]


def test_float_division_by_zero_is_noop():
    assert apply(InterpreterState(2).push_float(6.0, 0.0), "float./").float_stack == [6.0, 0.0]


def test_comparison_operand_order():
    # with [a, b] and b on top the result is a < b
    s = apply(InterpreterState(2).push_integer(2, 10), "integer.<")
    assert s.boolean_stack == [True] and s.integer_stack == []
    s = apply(InterpreterState(2).push_float(2.0, 10.0), "float.>")
    assert s.boolean_stack == [False]


@pytest.mark.parametrize("setup,name,expected", [
    ((-7, 2), "integer./", [-3]),
    ((-7, 3), "integer.%", [-1]),
    ((7, -3), "integer.%", [1]),
    ((7, 0), "integer./", [7, 0]),
    ((7, 0), "integer.%", [7, 0]),
    ((2, 10), "integer.pow", [1024]),
    ((2, 70), "integer.pow", [2, 70]),
    ((2 ** 40, 2 ** 30), "integer.*", [2 ** 40, 2 ** 30]),
    ((100,), "integer.ln", [4]),
    ((0,), "integer.log", [0]),
])
def test_integer_semantics(setup, name, expected):
    assert apply(InterpreterState(2).push_integer(*setup), name).integer_stack == expected


@pytest.mark.parametrize("setup,name,expected", [
    ((-1.0,), "float.ln", [-1.0]),
    ((0.0,), "float.log", [0.0]),
    ((1000.0,), "float.exp", [1000.0]),
    ((1e308, 10.0), "float.*", [1e308, 10.0]),
    ((5.5, 2.0), "float.%", [1.5]),
    ((5.5, 0.0), "float.%", [5.5, 0.0]),
    ((2.0, 3.0), "float.pow", [8.0]),
    ((-8.0, 0.5), "float.pow", [-8.0, 0.5]),
    ((4.0, 9.0), "float.min", [4.0]),
    ((3.0,), "float.neg", [-3.0]),
])
def test_float_semantics(setup, name, expected):
    assert apply(InterpreterState(2).push_float(*setup), name).float_stack == expected


def test_conversions():
    s = InterpreterState(2).push_float(-2.7).push_boolean(True).push_integer(0)
    apply(s, "integer.fromfloat")
    assert s.integer_stack == [0, -2] and s.float_stack == []
    apply(s, "float.fromboolean")
    assert s.float_stack == [1.0] and s.boolean_stack == []
    apply(s, "boolean.frominteger")
    assert s.boolean_stack == [True]
    apply(s, "boolean.frominteger")
    assert s.boolean_stack == [True, False]


def test_boolean_logic():
    s = apply(InterpreterState(2).push_boolean(True, False), "boolean.xor")
    assert s.boolean_stack == [True]
    s = apply(InterpreterState(2).push_boolean(True, False), "boolean.and", "boolean.not")
    assert s.boolean_stack == [True]


# -- exec control ------------------------------------------------------------

def test_do_times():
    assert run("(3 exec.do*times (1.0))").float_stack == [1.0, 1.0, 1.0]


def test_do_range_pushes_each_index():
    assert run("(0 2 exec.do*range (integer.dup))").integer_stack == [0, 0, 1, 1, 2, 2]


def test_do_range_counts_down():
    assert run("(3 1 exec.do*range (1.0))").integer_stack == [3, 2, 1]


def test_do_count():
    assert run("(3 exec.do*count (integer.dup))").integer_stack == [0, 0, 1, 1, 2, 2]


def test_do_count_nonpositive_skips_body():
    s = run("(0 exec.do*count (1.0) 2.0)")
    assert s.float_stack == [2.0] and s.integer_stack == []


def test_exec_if():
    assert run("(true exec.if (1.0) (2.0))").float_stack == [1.0]
    assert run("(false exec.if (1.0) (2.0))").float_stack == [2.0]


def test_exec_iflt():
    assert run("(1.0 2.0 exec.iflt (3.0) (4.0))").float_stack == [3.0]
    assert run("(2.0 1.0 exec.iflt (3.0) (4.0))").float_stack == [4.0]


def test_exec_equality_is_structural():
    assert run("(exec.= (1 2) (1 2))").boolean_stack == [True]
    assert run("(exec.= (1 2) (1 3))").boolean_stack == [False]
    assert run("(exec.= float.sin float.sin)").boolean_stack == [True]


def test_exec_noop():
    assert run("(exec.noop 1)").integer_stack == [1]


# -- input -------------------------------------------------------------------

def test_inall():
    s = run("(input.inall)")
    assert s.float_stack == [-5.0, 5.0] and s.integer_stack == [2]


def test_inallrev():
    s = run("(input.inallrev)")
    assert s.float_stack == [5.0, -5.0] and s.integer_stack == [2]


def test_index():
    assert run("(0 input.index)").float_stack == [-5.0]


def test_index_wraps_modulo_input_size():
    s = run("(5 input.index)")
    assert s.integer_stack == [2] and s.float_stack == []


def test_input_ops_with_no_inputs_are_noops():
    s = run("(input.inall input.inallrev 1 input.index)", inputs=())
    assert s.float_stack == [] and s.integer_stack == [1]


def test_inputs_never_change():
    s = run("(input.inall float.flush integer.flush 3 input.index input.inallrev float.neg)")
    assert s.inputs == INPUTS


def test_inputs_are_validated():
    with pytest.raises(ValueError):
        InterpreterState(2, inputs=(float("nan"),))
    with pytest.raises(ValueError):
        InterpreterState(2, inputs=(2 ** 63 - 1,))


# -- properties ----------------------------------------------------------------

@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 2 ** 32 - 1))
def test_run_move_is_deterministic_and_bounded(pseed, vseed):
    prog = random_program(np.random.default_rng(pseed), 60, EVOLVABLE_NAMES + ("true", "false"))
    snaps = []
    for _ in range(2):
        s = InterpreterState(3, inputs=INPUTS, seed=vseed)
        for _ in range(3):
            run_move(s, prog)
            assert s.exec_counter <= 100
            assert s.inputs == INPUTS
        snaps.append(s.snapshot())
    assert snaps[0] == snaps[1]
    for x in snaps[0]["float"]:
        assert math.isfinite(x)
    for v in snaps[0]["vector"]:
        assert len(v) == 3 and all(math.isfinite(c) for c in v)
