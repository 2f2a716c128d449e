"""Program representation, text format, and compilation to flat node arrays."""

from __future__ import annotations

import re
from collections import namedtuple
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from ..opcodes import NAMES, OPCODES

INT_LIMIT = 2 ** 62

# node kinds in compiled code
K_INSTR = 0
K_FLOAT = 1
K_INT = 2
K_BOOL = 3
K_BLOCK = 4

_INT_RE = re.compile(r"[-+]?\d+\Z")
_FLOAT_RE = re.compile(r"[-+]?(\d+\.\d*|\.\d+|\d+(\.\d*)?[eE][-+]?\d+|\.\d+[eE][-+]?\d+)\Z")
_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


class ParseError(ValueError):
    """Raised for malformed program text.

    ``position`` is the character offset of the offending token and
    ``token`` its text (``None`` at end of input).
    """

    def __init__(self, message: str, token: str | None = None, position: int = -1):
        self.token = token
        self.position = position
        if token is not None:
            message = f"{message}: {token!r} at offset {position}"
        super().__init__(message)


@dataclass(frozen=True)
class Instruction:
    """A named instruction atom."""

    name: str

    def __post_init__(self):
        if self.name not in OPCODES:
            raise ValueError(f"unknown instruction {self.name!r}")

    @property
    def opcode(self) -> int:
        return OPCODES[self.name]


@dataclass(frozen=True)
class Block:
    """A parenthesised group of atoms."""

    items: tuple

    def __len__(self):
        return len(self.items)


# A literal is a plain python bool, int or float.
Atom = Union[Instruction, Block, bool, int, float]


def _same_atom(a, b) -> bool:
    # bool is an int subclass and 1 == 1.0, so compare type as well as value
    if type(a) is not type(b):
        return False
    if isinstance(a, Block):
        return len(a.items) == len(b.items) and all(
            _same_atom(x, y) for x, y in zip(a.items, b.items))
    return a == b


@dataclass(frozen=True, eq=False)
class Program:
    """An ordered sequence of atoms; the genome and the executable optimiser."""

    items: tuple = ()

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return _same_atom(Block(self.items), Block(other.items))

    def __hash__(self):
        return hash(print_program(self))

    def __len__(self):
        return len(self.items)

    @property
    def length(self) -> int:
        """Number of non-block atoms, counting inside nested blocks."""
        return sum(1 for _ in self.atoms())

    def atoms(self) -> Iterator:
        stack = list(reversed(self.items))
        while stack:
            item = stack.pop()
            if isinstance(item, Block):
                stack.extend(reversed(item.items))
            else:
                yield item

    def __str__(self):
        return print_program(self)


def _literal(token: str):
    if token == "true":
        return True
    if token == "false":
        return False
    if _INT_RE.match(token):
        return int(token)
    if _FLOAT_RE.match(token):
        return float(token)
    return None


def parse_program(text: str) -> Program:
    """Parse whitespace-separated Push text into a Program.

    A single outermost pair of parentheses is taken as the program
    delimiter, so ``"(a b)"`` and ``"a b"`` give the same program.
    """
    root: list = []
    stack: list[tuple[list, int]] = []
    current = root
    for match in _TOKEN_RE.finditer(text):
        token = match.group()
        pos = match.start()
        if token == "(":
            stack.append((current, pos))
            current = []
        elif token == ")":
            if not stack:
                raise ParseError("unbalanced parentheses, unexpected", token, pos)
            parent, _ = stack.pop()
            parent.append(Block(tuple(current)))
            current = parent
        else:
            value = _literal(token)
            if value is not None:
                if isinstance(value, float) and not np.isfinite(value):
                    raise ParseError("non-finite float literal", token, pos)
                if type(value) is int and abs(value) >= INT_LIMIT:
                    raise ParseError("integer literal out of range", token, pos)
                current.append(value)
            elif token in OPCODES:
                current.append(Instruction(token))
            else:
                raise ParseError("unknown instruction", token, pos)
    if stack:
        _, pos = stack[-1]
        raise ParseError("unbalanced parentheses, unclosed", "(", pos)
    if len(root) == 1 and isinstance(root[0], Block):
        return Program(root[0].items)
    return Program(tuple(root))


def _format_atom(atom) -> str:
    if isinstance(atom, Block):
        return "(" + " ".join(_format_atom(a) for a in atom.items) + ")"
    if isinstance(atom, Instruction):
        return atom.name
    if isinstance(atom, bool):
        return "true" if atom else "false"
    if isinstance(atom, int):
        return str(atom)
    if isinstance(atom, float):
        text = repr(atom)
        if "." not in text and "e" not in text:
            text += ".0"
        return text
    raise TypeError(f"not a program atom: {atom!r}")


def print_program(program: Program) -> str:
    return _format_atom(Block(tuple(program.items)))


# ---------------------------------------------------------------------------
# compilation

Code = namedtuple("Code", "kind op fval ival cstart ccount children canon")


def compile_program(program: Program) -> Code:
    """Flatten a Program into node arrays for the compiled interpreter.

    Node 0 is the root block. ``canon`` assigns structurally equal nodes
    the same id so ``exec.=`` is a single integer comparison.
    """
    kinds: list[int] = []
    ops: list[int] = []
    fvals: list[float] = []
    ivals: list[int] = []
    cstart: list[int] = []
    ccount: list[int] = []
    children: list[int] = []
    canon: list[int] = []
    keys: dict = {}

    def add(atom) -> tuple[int, tuple]:
        idx = len(kinds)
        kinds.append(0)
        ops.append(0)
        fvals.append(0.0)
        ivals.append(0)
        cstart.append(0)
        ccount.append(0)
        canon.append(0)
        if isinstance(atom, Block):
            kinds[idx] = K_BLOCK
            sub = [add(a) for a in atom.items]
            cstart[idx] = len(children)
            ccount[idx] = len(sub)
            children.extend(s[0] for s in sub)
            key = ("b",) + tuple(s[1] for s in sub)
        elif isinstance(atom, Instruction):
            kinds[idx] = K_INSTR
            ops[idx] = atom.opcode
            key = ("i", atom.opcode)
        elif isinstance(atom, bool):
            kinds[idx] = K_BOOL
            ivals[idx] = int(atom)
            key = ("z", bool(atom))
        elif isinstance(atom, int):
            kinds[idx] = K_INT
            ivals[idx] = atom
            key = ("n", atom)
        else:
            kinds[idx] = K_FLOAT
            fvals[idx] = float(atom)
            key = ("f", float(atom))
        canon[idx] = keys.setdefault(key, len(keys))
        return idx, key

    add(Block(tuple(program.items)))
    return Code(
        np.array(kinds, dtype=np.int8),
        np.array(ops, dtype=np.int64),
        np.array(fvals, dtype=np.float64),
        np.array(ivals, dtype=np.int64),
        np.array(cstart, dtype=np.int64),
        np.array(ccount, dtype=np.int64),
        np.array(children if children else [0], dtype=np.int64),
        np.array(canon, dtype=np.int64),
    )


def instruction_name(opcode: int) -> str:
    return NAMES[opcode]
