"""Running a population of persistent Push programs against a landscape.

One repeat initialises every member (one evaluation each), then performs
``moves`` sweeps over the members in index order. Each member receives the
move number, its own index and the index of the population best on its
integer stack, runs the program once, and the top of its vector stack is
taken (without popping) as its next search point. Fitness is the mean over
repeats of the best value found.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _stack as S
from .benchmarks import Landscape, TransformedLandscape, TransformSpec, land_ref, sample_transform
from .interpreter.program import Program, compile_program
from .interpreter.state import ExecutionLimits, InterpreterState
from .vecswarm import SwarmView

SENTINEL = S.BIG  # pushed in place of +infinity after an out-of-bounds move

TRACE_COLUMNS = ("repeat", "move", "member", "value", "improved", "in_bounds")


@dataclass(frozen=True)
class RunConfig:
    popsize: int
    moves: int
    repeats: int = 10
    seed: int = 0
    exec_limit: int = 100
    # count the initial evaluations against the budget by dropping the last sweep
    init_charged: bool = False

    def __post_init__(self):
        for name in ("popsize", "moves", "repeats", "exec_limit"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def budget(self) -> int:
        return self.popsize * self.moves

    @property
    def sweeps(self) -> int:
        """Number of move sweeps actually run after initialisation."""
        return self.moves - 1 if self.init_charged else self.moves


# ---------------------------------------------------------------------------
# helpers

def _as_code(program) -> S.CodeRef:
    if isinstance(program, S.CodeRef):
        return program
    if isinstance(program, Program):
        return S.CodeRef(compile_program(program))
    return S.CodeRef(program)  # an already compiled Code


def _split(landscape):
    if isinstance(landscape, TransformedLandscape):
        return landscape.base, landscape.spec
    return landscape, TransformSpec.identity(landscape.dim)


def initial_points(rng: np.random.Generator, landscape, popsize: int) -> np.ndarray:
    """Uniform random in-bounds starting points, one row per member."""
    lo, hi = np.asarray(landscape.lower), np.asarray(landscape.upper)
    return lo + (hi - lo) * rng.random((popsize, landscape.dim))


@dataclass
class MemberState:
    """Read-only snapshot of one member of a SwarmRun."""

    index: int
    point: np.ndarray
    value: float
    best: np.ndarray
    bestval: float
    program_state: InterpreterState


class SwarmRun:
    """Step-by-step state of one repeat of the move loop.

    Use :meth:`init_members` once, then :meth:`move` up to ``moves`` times.
    ``evaluate_optimiser`` runs whole repeats in one compiled call instead.
    Without explicit ``init_points`` the starting points are drawn from
    ``seed``, as are the program's own random numbers.
    """

    def __init__(self, program: Program, landscape, popsize: int, seed: int = 0,
                 limits: ExecutionLimits | None = None, moves: int = 1000):
        self.program = program
        self.code = _as_code(program)
        self.landscape = landscape
        self.popsize = popsize
        self.limits = limits or ExecutionLimits()
        base, spec = _split(landscape)
        self.land = land_ref(base, spec)
        D = landscape.dim
        self.vm = S.allocate(popsize, D, moves, seed=seed)  # moves only sizes the stacks
        self.swarm = S.SwarmRef(popsize, D)
        self.m = 0
        self.evaluations = 0
        self.seed = seed
        self.initialised = False

    cur = property(lambda self: self.swarm.cur)
    best = property(lambda self: self.swarm.best)
    value = property(lambda self: self.swarm.value)
    bestval = property(lambda self: self.swarm.bestval)
    pstate = property(lambda self: self.swarm.pstate)

    @property
    def pbest(self) -> float:
        return float(self.swarm.pstate[0])

    @property
    def pbestindex(self) -> int:
        return int(self.swarm.pstate[1])

    def view(self, p: int) -> SwarmView:
        return SwarmView(self.cur.copy(), self.best.copy(), p)

    def member(self, p: int) -> MemberState:
        return MemberState(p, self.cur[p].copy(), float(self.value[p]), self.best[p].copy(),
                           float(self.bestval[p]), InterpreterState.view(self.vm, p, self.limits))

    def _init(self, p: int, point) -> None:
        point = np.ascontiguousarray(point, dtype=np.float64)
        if point.shape != (self.landscape.dim,):
            raise ValueError("initial point has the wrong dimension")
        S.lib().pv_init_member(self.vm.ref, p, self.land.ref, self.swarm.ref, S.addr(point),
                               self.limits.max_executions_per_move)
        self.evaluations += 1

    def init_members(self, init_points=None):
        D = self.landscape.dim
        if init_points is None:
            pts = initial_points(np.random.default_rng(self.seed), self.landscape, self.popsize)
        else:
            pts = np.asarray(init_points, dtype=np.float64).reshape(-1, D)
        for p in range(self.popsize):
            self._init(p, pts[p % pts.shape[0]])
        self.initialised = True
        return self

    def move(self) -> list[dict]:
        """One sweep over all members; returns a record per member."""
        if not self.initialised:
            raise RuntimeError("init_members() must be called first")
        self.m += 1
        records = []
        fn = S.lib().pv_member_move
        for p in range(self.popsize):
            flags = fn(self.vm.ref, p, self.m, self.code.ref, self.land.ref, self.swarm.ref)
            inb = bool(flags & S.MV_EVALUATED)
            self.evaluations += int(inb)
            records.append(dict(
                move=self.m, member=p,
                value=float(self.value[p]) if inb else SENTINEL,
                improved=bool(flags & S.MV_IMPROVED), in_bounds=inb,
                point=self.swarm.point.copy() if flags & S.MV_HAS_POINT else None,
                pbest=self.pbest, pbestindex=self.pbestindex))
        return records


def init_member(p: int, run: SwarmRun, init_point=None) -> MemberState:
    """Initialise member ``p`` of ``run`` (one evaluation).

    Without ``init_point`` a uniform in-bounds point is drawn from the run's seed.
    """
    if init_point is None:
        rng = np.random.default_rng([run.seed, p])
        init_point = initial_points(rng, run.landscape, 1)[0]
    run._init(p, init_point)
    return run.member(p)


def swarm_move(run: SwarmRun) -> SwarmRun:
    run.move()
    return run


def repeat_seeds(seed: int, repeats: int, *stream: int) -> np.ndarray:
    """Three uint32 seeds per repeat: interpreter RNG, transform, initial points."""
    ss = np.random.SeedSequence([int(seed), *map(int, stream)])
    return ss.generate_state(3 * repeats).reshape(repeats, 3)


@dataclass
class TraceRecord:
    repeat: int
    move: int
    member: int
    value: float
    improved: bool
    in_bounds: bool
    point: tuple


@dataclass
class FitnessReport:
    fitness: float
    pbests: list[float]
    evaluations: list[int]
    seeds: list[int]
    config: dict
    landscape: str
    dim: int
    transforms: bool
    pbest_history: list[list[float]] = field(default_factory=list)
    steps: list[int] = field(default_factory=list)  # interpreter steps per repeat
    trace: np.ndarray | None = None       # int columns: repeat, move, member, improved, in_bounds
    trace_values: np.ndarray | None = None
    trace_points: np.ndarray | None = None

    def records(self) -> list[TraceRecord]:
        if self.trace is None:
            return []
        return [TraceRecord(int(r[0]), int(r[1]), int(r[2]), float(v), bool(r[3]), bool(r[4]),
                            tuple(float(x) for x in pt))
                for r, v, pt in zip(self.trace, self.trace_values, self.trace_points)]

    def to_dict(self) -> dict:
        return {
            "landscape": self.landscape,
            "dim": self.dim,
            "transforms": self.transforms,
            "config": self.config,
            "seeds": self.seeds,
            "pbests": self.pbests,
            "evaluations": self.evaluations,
            "mean": self.fitness,
        }

    def write_trace_csv(self, fh) -> None:
        if self.trace is None:
            raise ValueError("report carries no trace")
        D = self.trace_points.shape[1]
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(TRACE_COLUMNS) + [f"x{d}" for d in range(D)])
        for r, v, pt in zip(self.trace, self.trace_values, self.trace_points):
            writer.writerow([int(r[0]), int(r[1]), int(r[2]), repr(float(v)), int(r[3]), int(r[4])]
                            + [repr(float(x)) for x in pt])

    def trace_csv(self) -> str:
        buf = io.StringIO()
        self.write_trace_csv(buf)
        return buf.getvalue()


def evaluate_optimiser(program, landscape: Landscape, config: RunConfig, transforms: bool = True,
                       trace: bool = False, stream: tuple = (), init_points=None) -> FitnessReport:
    """Mean best value over ``config.repeats`` independent optimisation runs.

    With ``transforms`` on, each repeat sees a freshly sampled translate/scale/flip
    of ``landscape``. ``stream`` extends the seed so that different callers
    (e.g. GP individuals) get independent random streams from one master seed.
    ``init_points`` (rows reused cyclically) replaces the random starting points.
    """
    if isinstance(landscape, TransformedLandscape):
        raise TypeError("pass the base landscape; transforms are sampled per repeat")
    code = _as_code(program)
    R, P, M, D = config.repeats, config.popsize, config.sweeps, landscape.dim
    seeds = repeat_seeds(config.seed, R, *stream)
    fixed = None
    if init_points is not None:
        fixed = np.asarray(init_points, dtype=np.float64).reshape(-1, D)
        fixed = np.ascontiguousarray(fixed[np.arange(P) % fixed.shape[0]])
    rows = R * P * (M + 1) if trace else 0
    trace_i = np.zeros((rows, 5), dtype=np.int64)
    trace_v = np.zeros(rows)
    trace_x = np.zeros((rows, D))
    history = np.zeros((R, M + 1))
    pbests, evals, steps = [], [], []
    vm = S.allocate(P, D, M)
    swarm = S.SwarmRef(P, D)
    run_repeat = S.lib().pv_run_repeat
    for r in range(R):
        vm_seed, t_seed, i_seed = (int(x) for x in seeds[r])
        if transforms:
            spec = sample_transform(np.random.default_rng(t_seed), landscape)
        else:
            spec = TransformSpec.identity(D)
        land = land_ref(landscape, spec)
        pts = fixed if fixed is not None else initial_points(np.random.default_rng(i_seed), landscape, P)
        tr = None
        if trace:
            block = slice(r * P * (M + 1), (r + 1) * P * (M + 1))
            tr = S.TraceRef(trace_i[block], trace_v[block], trace_x[block])
        vm.seed(vm_seed)
        hist = history[r]
        ev = run_repeat(vm.ref, code.ref, land.ref, swarm.ref, M, config.exec_limit, S.addr(pts), r,
                        tr.ref if tr is not None else None, S.addr(hist))
        pbests.append(float(swarm.pstate[0]))
        evals.append(int(ev))
        steps.append(swarm.steps)
    return FitnessReport(
        fitness=float(np.mean(pbests)), pbests=pbests, evaluations=evals,
        seeds=[int(s) for s in seeds[:, 0]], config=asdict(config), landscape=landscape.name,
        dim=D, transforms=transforms, pbest_history=history.tolist(), steps=steps,
        trace=trace_i if trace else None, trace_values=trace_v if trace else None,
        trace_points=trace_x if trace else None)


def trace_run(program, landscape: Landscape, config: RunConfig, transforms: bool = False,
              stream: tuple = ()) -> FitnessReport:
    """evaluate_optimiser with one record per member per move (plus the inits)."""
    return evaluate_optimiser(program, landscape, config, transforms=transforms, trace=True,
                              stream=stream)
