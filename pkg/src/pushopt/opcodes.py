"""Instruction names and their integer opcodes.

Opcodes are plain module-level ints so the compiled kernels can branch on
them as constants. Generic stack instructions are laid out as
``type * 16 + generic_index``; everything else lives in fixed blocks of
ten or more starting at 100.
"""

from __future__ import annotations

# stack type ids
T_BOOL = 0
T_FLOAT = 1
T_INT = 2
T_VEC = 3
T_EXEC = 4
T_INPUT = 5

TYPE_PREFIX = {
    T_BOOL: "boolean",
    T_FLOAT: "float",
    T_INT: "integer",
    T_VEC: "vector",
    T_EXEC: "exec",
    T_INPUT: "input",
}

GENERIC_OPS = ("dup", "flush", "pop", "rand", "rot", "shove", "stackdepth",
               "swap", "yank", "yankdup")
G_DUP = 0
G_FLUSH = 1
G_POP = 2
G_RAND = 3
G_ROT = 4
G_SHOVE = 5
G_STACKDEPTH = 6
G_SWAP = 7
G_YANK = 8
G_YANKDUP = 9

GENERIC_LIMIT = 64  # opcodes below this are generic ops on bool/float/int/vector

# extras needed by the published programs; not part of the evolvable set
EXEC_DUP = T_EXEC * 16 + G_DUP
INPUT_STACKDEPTH = T_INPUT * 16 + G_STACKDEPTH

B_EQ = 100
B_AND = 101
B_FROMFLOAT = 102
B_FROMINTEGER = 103
B_NOT = 104
B_OR = 105
B_XOR = 106

X_EQ = 110
X_DOCOUNT = 111
X_DORANGE = 112
X_DOTIMES = 113
X_IF = 114
X_IFLT = 115
X_NOOP = 116

F_MOD = 120
F_MUL = 121
F_ADD = 122
F_SUB = 123
F_DIV = 124
F_LT = 125
F_EQ = 126
F_GT = 127
F_ABS = 128
F_COS = 129
F_ERC = 130
F_EXP = 131
F_FROMBOOLEAN = 132
F_FROMINTEGER = 133
F_LN = 134
F_LOG = 135
F_MAX = 136
F_MIN = 137
F_NEG = 138
F_POW = 139
F_SIN = 140
F_TAN = 141

IN_INALL = 150
IN_INALLREV = 151
IN_INDEX = 152

I_MOD = 160
I_MUL = 161
I_ADD = 162
I_SUB = 163
I_DIV = 164
I_LT = 165
I_EQ = 166
I_GT = 167
I_ABS = 168
I_ERC = 169
I_FROMBOOLEAN = 170
I_FROMFLOAT = 171
I_LN = 172
I_LOG = 173
I_MAX = 174
I_MIN = 175
I_NEG = 176
I_POW = 177

V_MUL = 180
V_DIV = 181
V_ADD = 182
V_SUB = 183
V_APPLY = 184
V_BETWEEN = 185
V_DIMADD = 186
V_DIMMUL = 187
V_DPROD = 188
V_MAG = 189
V_SCALE = 190
V_URAND = 191
V_WRAND = 192
V_ZIP = 193
V_CURRENT = 194
V_BEST = 195

# internal: the do*times continuation (a do*range that does not push the index)
X_DORANGE_NOINDEX = 199

SPECIFIC = {
    "boolean.=": B_EQ, "boolean.and": B_AND, "boolean.fromfloat": B_FROMFLOAT,
    "boolean.frominteger": B_FROMINTEGER, "boolean.not": B_NOT,
    "boolean.or": B_OR, "boolean.xor": B_XOR,
    "exec.=": X_EQ, "exec.do*count": X_DOCOUNT, "exec.do*range": X_DORANGE,
    "exec.do*times": X_DOTIMES, "exec.if": X_IF, "exec.iflt": X_IFLT,
    "exec.noop": X_NOOP,
    "float.%": F_MOD, "float.*": F_MUL, "float.+": F_ADD, "float.-": F_SUB,
    "float./": F_DIV, "float.<": F_LT, "float.=": F_EQ, "float.>": F_GT,
    "float.abs": F_ABS, "float.cos": F_COS, "float.erc": F_ERC,
    "float.exp": F_EXP, "float.fromboolean": F_FROMBOOLEAN,
    "float.frominteger": F_FROMINTEGER, "float.ln": F_LN, "float.log": F_LOG,
    "float.max": F_MAX, "float.min": F_MIN, "float.neg": F_NEG,
    "float.pow": F_POW, "float.sin": F_SIN, "float.tan": F_TAN,
    "input.inall": IN_INALL, "input.inallrev": IN_INALLREV,
    "input.index": IN_INDEX,
    "integer.%": I_MOD, "integer.*": I_MUL, "integer.+": I_ADD,
    "integer.-": I_SUB, "integer./": I_DIV, "integer.<": I_LT,
    "integer.=": I_EQ, "integer.>": I_GT, "integer.abs": I_ABS,
    "integer.erc": I_ERC, "integer.fromboolean": I_FROMBOOLEAN,
    "integer.fromfloat": I_FROMFLOAT, "integer.ln": I_LN, "integer.log": I_LOG,
    "integer.max": I_MAX, "integer.min": I_MIN, "integer.neg": I_NEG,
    "integer.pow": I_POW,
    "vector.*": V_MUL, "vector./": V_DIV, "vector.+": V_ADD, "vector.-": V_SUB,
    "vector.apply": V_APPLY, "vector.between": V_BETWEEN,
    "vector.dim+": V_DIMADD, "vector.dim*": V_DIMMUL, "vector.dprod": V_DPROD,
    "vector.mag": V_MAG, "vector.scale": V_SCALE, "vector.urand": V_URAND,
    "vector.wrand": V_WRAND, "vector.zip": V_ZIP,
    "vector.current": V_CURRENT, "vector.best": V_BEST,
}


def _build_opcodes() -> dict[str, int]:
    table = {}
    for t in (T_BOOL, T_FLOAT, T_INT, T_VEC):
        for g, name in enumerate(GENERIC_OPS):
            table[f"{TYPE_PREFIX[t]}.{name}"] = t * 16 + g
    table["exec.dup"] = EXEC_DUP
    table["input.stackdepth"] = INPUT_STACKDEPTH
    table.update(SPECIFIC)
    return table


OPCODES: dict[str, int] = _build_opcodes()
NAMES: dict[int, str] = {v: k for k, v in OPCODES.items()}

# Names that appear in published programs but are not in the evolvable set.
EXTRA_NAMES = frozenset({"exec.dup", "input.stackdepth"})

# The evolvable instruction set (everything except the extras); `true` and
# `false` are literals and are added by the program generator.
EVOLVABLE_NAMES: tuple[str, ...] = tuple(
    sorted(n for n in OPCODES if n not in EXTRA_NAMES))
