from .program import (
    Block, Code, Instruction, ParseError, Program, compile_program,
    parse_program, print_program,
)
from .state import (
    ExecutionLimits, InterpreterState, execute_instruction, run_exec, run_move, step,
)

__all__ = [
    "Block", "Code", "ExecutionLimits", "Instruction", "InterpreterState",
    "ParseError", "Program", "compile_program", "parse_program",
    "execute_instruction", "print_program", "run_exec", "run_move", "step",
]
