"""Memory layout of interpreter states and the binding to the compiled core.

Every state array has a leading member axis so a whole population lives in
one set of arrays; a lone interpreter is simply a population of one. The
arrays are owned by numpy and handed to the C library by pointer.
"""

from __future__ import annotations

import os
import ctypes as C

import numpy as np

from . import _pvcore

# Data stacks get fixed headroom plus room for what the harness pushes each
# move, so a run never fills them unless the program itself floods a stack.
# Pushes onto a full stack are dropped.
HEADROOM = 1024
VHEADROOM = 128
ECAP = 1024
FRCAP = 64
INCAP = 16

# slots of the per-member size table
NF = 0
NI = 1
NB = 2
NV = 3
NE = 4
NFR = 5
NIN = 6
COUNT = 7
LIMIT = 8
NSLOTS = 9

# frame metadata slots (vector.apply / vector.zip in progress)
FR_BODY_NODE = 0
FR_BODY_VAL = 1
FR_INDEX = 2
FR_MODE = 3
FR_MARK = 4
FR_SLOTS = 5

# exec entries: node >= 0 is a compiled program node, otherwise one of these
DYN_INT = -1
DYN_OP = -2
DYN_FRAME = -3

# input value kinds
IN_FLOAT = 0
IN_INT = 1
IN_BOOL = 2

INT_LIMIT = 2 ** 62
BIG = np.finfo(np.float64).max

# flags returned by a member's move
MV_EVALUATED = 1
MV_HAS_POINT = 2
MV_IMPROVED = 4


# ---------------------------------------------------------------------------
# library

_i64 = C.c_int64
_ptr = C.c_void_p


class _StateStruct(C.Structure):
    _fields_ = [(name, _i64) for name in
                ("members", "dim", "fcap", "icap", "bcap", "vcap", "ecap", "frcap", "incap")] + \
               [(name, _ptr) for name in
                ("f", "i", "b", "v", "exn", "exv", "frv", "frw", "frm", "inkind", "inf", "ini",
                 "n", "rng")]


class _CodeStruct(C.Structure):
    _fields_ = [("nodes", _i64)] + [(name, _ptr) for name in
                                    ("kind", "op", "fval", "ival", "cstart", "ccount",
                                     "children", "canon")]


class _ViewStruct(C.Structure):
    _fields_ = [("popsize", _i64), ("cur", _ptr), ("best", _ptr), ("self_index", _i64)]


class _LandStruct(C.Structure):
    _fields_ = [("fid", _i64), ("dim", _i64)] + [(name, _ptr) for name in
                                                 ("a", "b", "alpha", "shift", "scale", "flip",
                                                  "lower", "upper", "buf")]


class _SwarmStruct(C.Structure):
    _fields_ = [("popsize", _i64), ("dim", _i64)] + [(name, _ptr) for name in
                                                     ("cur", "best", "value", "bestval",
                                                      "pstate", "point")] + [("steps", _i64)]


class _TraceStruct(C.Structure):
    _fields_ = [("rows", _ptr), ("values", _ptr), ("points", _ptr), ("row", _i64)]


def _load():
    lib = C.CDLL(os.environ.get("PUSHOPT_CORE_LIB") or _pvcore.__file__)
    P = C.POINTER
    sigs = {
        "pv_seed": (None, [_ptr, C.c_uint64]),
        "pv_uniform": (C.c_double, [_ptr]),
        "pv_randint": (_i64, [_ptr, _i64, _i64]),
        "pv_normal": (C.c_double, [_ptr]),
        "pv_push_block": (None, [P(_StateStruct), _i64, P(_CodeStruct)]),
        "pv_step": (None, [P(_StateStruct), _i64, P(_CodeStruct), P(_ViewStruct)]),
        "pv_run_exec": (_i64, [P(_StateStruct), _i64, P(_CodeStruct), P(_ViewStruct)]),
        "pv_run_move": (_i64, [P(_StateStruct), _i64, P(_CodeStruct), P(_ViewStruct)]),
        "pv_apply": (None, [P(_StateStruct), _i64, _i64, P(_CodeStruct), P(_ViewStruct)]),
        "pv_apply_each": (None, [P(_StateStruct), _ptr, P(_CodeStruct), P(_ViewStruct)]),
        "pv_evaluate_many": (_i64, [P(_LandStruct), _ptr, _i64, _ptr]),
        "pv_init_member": (None, [P(_StateStruct), _i64, P(_LandStruct), P(_SwarmStruct), _ptr, _i64]),
        "pv_member_move": (_i64, [P(_StateStruct), _i64, _i64, P(_CodeStruct), P(_LandStruct),
                                  P(_SwarmStruct)]),
        "pv_run_repeat": (_i64, [P(_StateStruct), P(_CodeStruct), P(_LandStruct), P(_SwarmStruct),
                                 _i64, _i64, _ptr, _i64, P(_TraceStruct), _ptr]),
    }
    for name, (res, args) in sigs.items():
        fn = getattr(lib, name)
        fn.restype = res
        fn.argtypes = args
    size = _i64.in_dll(lib, "pv_layout_size").value
    layout = tuple((_i64 * size).in_dll(lib, "pv_layout"))
    _check_layout(layout)
    return lib


def _check_layout(layout):
    from . import benchmarks as B
    from . import opcodes as O
    from .interpreter import program as Pg
    expected = (
        NF, NI, NB, NV, NE, NFR, NIN, COUNT, LIMIT, NSLOTS,
        FR_BODY_NODE, FR_BODY_VAL, FR_INDEX, FR_MODE, FR_MARK, FR_SLOTS,
        DYN_INT, DYN_OP, DYN_FRAME, IN_FLOAT, IN_INT, IN_BOOL,
        Pg.K_INSTR, Pg.K_FLOAT, Pg.K_INT, Pg.K_BOOL, Pg.K_BLOCK,
        O.EXEC_DUP, O.INPUT_STACKDEPTH, O.GENERIC_LIMIT,
        O.B_EQ, O.B_XOR, O.X_EQ, O.X_NOOP, O.F_MOD, O.F_TAN, O.IN_INALL, O.IN_INDEX,
        O.I_MOD, O.I_POW, O.V_MUL, O.V_BEST, O.X_DORANGE_NOINDEX,
        B.F1, B.F9, B.F12, B.F13, B.F14,
    )
    if layout != expected:
        raise ImportError("compiled core is out of date with the Python constants; rebuild the package")


_LIB = None


def lib():
    global _LIB
    if _LIB is None:
        _LIB = _load()
    return _LIB


def addr(a: np.ndarray) -> int:
    return a.ctypes.data


# ---------------------------------------------------------------------------
# state

def capacities(moves: int = 0):
    """(float, integer, boolean, vector) stack sizes for a run of ``moves`` moves."""
    m = max(int(moves), 0)
    return HEADROOM + 4 * m, HEADROOM + 8 * m, HEADROOM + 4 * m, VHEADROOM + 2 * m


class VM:
    """Stacks of ``members`` interpreters over ``dim``-vectors, plus one RNG stream."""

    def __init__(self, members: int, dim: int, moves: int = 0, seed: int = 0):
        fcap, icap, bcap, vcap = capacities(moves)
        self.members = members
        self.dim = dim
        self.f = np.zeros((members, fcap))
        self.i = np.zeros((members, icap), dtype=np.int64)
        self.b = np.zeros((members, bcap), dtype=np.int8)
        self.v = np.zeros((members, vcap, dim))
        self.exn = np.zeros((members, ECAP), dtype=np.int64)
        self.exv = np.zeros((members, ECAP), dtype=np.int64)
        self.frv = np.zeros((members, FRCAP, dim))
        self.frw = np.zeros((members, FRCAP, dim))
        self.frm = np.zeros((members, FRCAP, FR_SLOTS), dtype=np.int64)
        self.inkind = np.zeros((members, INCAP), dtype=np.int8)
        self.inf = np.zeros((members, INCAP))
        self.ini = np.zeros((members, INCAP), dtype=np.int64)
        self.n = np.zeros((members, NSLOTS), dtype=np.int64)
        self.rng = np.zeros(4, dtype=np.uint64)
        self.struct = _StateStruct(
            members, dim, fcap, icap, bcap, vcap, ECAP, FRCAP, INCAP,
            *(addr(getattr(self, k)) for k in
              ("f", "i", "b", "v", "exn", "exv", "frv", "frw", "frm", "inkind", "inf", "ini",
               "n", "rng")))
        self.ref = C.byref(self.struct)
        self.seed(seed)

    def seed(self, seed: int) -> None:
        lib().pv_seed(addr(self.rng), int(seed) & 0xFFFFFFFFFFFFFFFF)


def allocate(members: int, dim: int, moves: int = 0, seed: int = 0) -> VM:
    return VM(members, dim, moves, seed)


def clear_member(vm: VM, p: int, limit: int) -> None:
    vm.n[p, :] = 0
    vm.n[p, LIMIT] = limit


def fpush(vm: VM, p: int, x: float) -> None:
    k = vm.n[p, NF]
    if k < vm.f.shape[1]:
        vm.f[p, k] = x
        vm.n[p, NF] = k + 1


def ipush(vm: VM, p: int, x: int) -> None:
    k = vm.n[p, NI]
    if k < vm.i.shape[1]:
        vm.i[p, k] = x
        vm.n[p, NI] = k + 1


def bpush(vm: VM, p: int, x: bool) -> None:
    k = vm.n[p, NB]
    if k < vm.b.shape[1]:
        vm.b[p, k] = 1 if x else 0
        vm.n[p, NB] = k + 1


def vpush(vm: VM, p: int, x) -> None:
    k = vm.n[p, NV]
    if k < vm.v.shape[1]:
        vm.v[p, k, :] = x
        vm.n[p, NV] = k + 1


# ---------------------------------------------------------------------------
# other structures passed to the core; each keeps its arrays alive

class CodeRef:
    """A compiled program as seen by the core."""

    def __init__(self, code):
        self.code = code
        self.struct = _CodeStruct(len(code.kind), *(addr(a) for a in code))
        self.ref = C.byref(self.struct)


class ViewRef:
    """Current and best points of the population, as seen by member ``self_index``."""

    def __init__(self, cur: np.ndarray, best: np.ndarray, self_index: int = 0):
        self.cur = np.ascontiguousarray(cur, dtype=np.float64)
        self.best = np.ascontiguousarray(best, dtype=np.float64)
        self.struct = _ViewStruct(self.cur.shape[0], addr(self.cur), addr(self.best), int(self_index))
        self.ref = C.byref(self.struct)


def _f64(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float64)


class LandRef:
    """Landscape function id, instance data, transform and bounds."""

    def __init__(self, fid, a, b, alpha, shift, scale, flip, lower, upper):
        self.arrays = [_f64(x) for x in (a, b, alpha, shift, scale, flip, lower, upper)]
        dim = self.arrays[3].shape[0]
        self.buf = np.empty(dim)
        self.dim = dim
        self.struct = _LandStruct(int(fid), dim, *(addr(x) for x in self.arrays), addr(self.buf))
        self.ref = C.byref(self.struct)

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = _f64(xs).reshape(-1, self.dim)
        out = np.empty(xs.shape[0])
        if lib().pv_evaluate_many(self.ref, addr(xs), xs.shape[0], addr(out)) != 0:
            raise MemoryError("landscape evaluation could not allocate scratch space")
        return out


class SwarmRef:
    """Per-member points and values plus the population best."""

    def __init__(self, popsize: int, dim: int):
        self.cur = np.zeros((popsize, dim))
        self.best = np.zeros((popsize, dim))
        self.value = np.zeros(popsize)
        self.bestval = np.zeros(popsize)
        self.pstate = np.array([np.inf, 0.0])
        self.point = np.zeros(dim)
        self.struct = _SwarmStruct(popsize, dim, addr(self.cur), addr(self.best), addr(self.value),
                                   addr(self.bestval), addr(self.pstate), addr(self.point), 0)
        self.ref = C.byref(self.struct)

    @property
    def steps(self) -> int:
        return int(self.struct.steps)


class TraceRef:
    """Row buffers for a traced run."""

    def __init__(self, rows: np.ndarray, values: np.ndarray, points: np.ndarray):
        self.rows, self.values, self.points = rows, values, points
        self.struct = _TraceStruct(addr(rows), addr(values), addr(points), 0)
        self.ref = C.byref(self.struct)
