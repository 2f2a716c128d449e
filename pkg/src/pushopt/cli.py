"""Command-line front end: evolve, eval, trace, show and bench.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(unreadable or unparsable program, empty program file).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .benchmarks import LANDSCAPE_NAMES, make_landscape
from .evolve import EvolutionConfig, random_program, run_to_dir
from .fixtures import FIXTURE_NAMES, fixture_text
from .interpreter.program import Block, Instruction, ParseError, Program, parse_program, print_program
from .metaeval import SENTINEL, RunConfig, evaluate_optimiser

ENV_OUTPUT_DIR = "PUSHOPT_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "pushopt-runs"
DEFAULT_SPLIT = (50, 20)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# profiles

_SPLIT_RE = re.compile(r"\s*(\d+)\s*[x×*]\s*(\d+)\s*\Z")


def parse_split(text: str) -> tuple[int, int]:
    m = _SPLIT_RE.match(text)
    if not m:
        raise UsageError(f"split must look like POPSIZExMOVES (e.g. 50x20), got {text!r}")
    popsize, moves = int(m.group(1)), int(m.group(2))
    if popsize < 1 or moves < 1:
        raise UsageError("split sizes must be positive")
    return popsize, moves


def resolve_split(split: str | None, budget: int | None) -> tuple[int, int]:
    """Population size and moves from a split and/or a budget; they must agree."""
    if split is not None:
        popsize, moves = parse_split(split)
        if budget is not None and popsize * moves != budget:
            raise UsageError(f"split {popsize}x{moves} gives {popsize * moves} evaluations, "
                             f"not the budget of {budget}")
        return popsize, moves
    if budget is None:
        return DEFAULT_SPLIT
    if budget < 1:
        raise UsageError("budget must be positive")
    popsize = DEFAULT_SPLIT[0]
    if budget % popsize:
        raise UsageError(f"budget {budget} is not a multiple of {popsize}; give --split")
    return popsize, budget // popsize


@dataclass(frozen=True)
class RunProfile:
    command: str
    landscape: str
    dim: int
    popsize: int
    moves: int
    repeats: int
    transforms: bool
    seed: int = 0
    program_path: str | None = None
    output_dir: str | None = None

    def __post_init__(self):
        if self.landscape not in LANDSCAPE_NAMES:
            raise UsageError(f"unknown landscape {self.landscape!r}; valid names: "
                             f"{', '.join(LANDSCAPE_NAMES)}")
        if self.dim < 1:
            raise UsageError("dimension must be >= 1")
        if self.repeats < 1:
            raise UsageError("repeats must be positive")

    @property
    def budget(self) -> int:
        return self.popsize * self.moves

    @property
    def split(self) -> str:
        return f"{self.popsize}x{self.moves}"

    def run_config(self) -> RunConfig:
        return RunConfig(self.popsize, self.moves, self.repeats, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunProfile":
        return cls(**d)


def output_base() -> Path:
    return Path(os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR)


def _on_off(text: str) -> bool:
    t = text.lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on or off, got {text!r}")


# ---------------------------------------------------------------------------
# programs

def read_program(ref: str) -> tuple[Program, str]:
    """Load a program from a file path or ``fixture:NAME``; returns it with its text."""
    if ref.startswith("fixture:"):
        name = ref.split(":", 1)[1]
        try:
            text = fixture_text(name)
        except KeyError as e:
            raise DataError(str(e.args[0])) from None
    else:
        try:
            text = Path(ref).read_text()
        except OSError as e:
            raise DataError(f"cannot read program {ref}: {e.strerror}") from None
    if not text.strip():
        raise DataError(f"program {ref} is empty")
    try:
        return parse_program(text), text
    except ParseError as e:
        raise DataError(f"cannot parse {ref}: {e}") from None


def _fixture_landscape(ref: str) -> str | None:
    if ref.startswith("fixture:") and ref.split(":", 1)[1] in FIXTURE_NAMES:
        return ref.split(":", 1)[1]
    return None


def atom_histogram(program: Program) -> Counter:
    hist: Counter = Counter()
    for atom in program.atoms():
        if isinstance(atom, Instruction):
            hist[atom.name] += 1
        elif isinstance(atom, bool):
            hist["<boolean literal>"] += 1
        elif isinstance(atom, int):
            hist["<integer literal>"] += 1
        else:
            hist["<float literal>"] += 1
    return hist


def _depth(items, level=0) -> int:
    return max([level] + [_depth(a.items, level + 1) for a in items if isinstance(a, Block)])


# ---------------------------------------------------------------------------
# commands

def _profile(args, command: str, repeats_default: int, transforms_default: bool) -> RunProfile:
    landscape = args.landscape or _fixture_landscape(getattr(args, "program", "") or "")
    if landscape is None:
        raise UsageError("--landscape is required unless the program is a fixture")
    popsize, moves = resolve_split(args.split, args.budget)
    return RunProfile(
        command=command, landscape=landscape, dim=args.dim, popsize=popsize, moves=moves,
        repeats=args.repeats if args.repeats is not None else repeats_default,
        transforms=args.transforms if args.transforms is not None else transforms_default,
        seed=args.seed, program_path=getattr(args, "program", None),
        output_dir=args.output_dir)


_EVOLVE_FLAGS = ("gp_popsize", "generations", "tournament_size", "max_program_size",
                 "exec_limit", "crossover_rate", "mutation_rate", "reproduction_rate",
                 "elitism", "reeval_repeats")


def evolution_config(args) -> EvolutionConfig:
    """Merge an optional JSON config with explicitly given flags (flags win)."""
    base: dict = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise UsageError(f"cannot read config {args.config}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"config {args.config} is not valid JSON: {e}") from None
        if not isinstance(base, dict):
            raise UsageError("config must be a JSON object")
    split = base.pop("split", None)
    budget = base.pop("budget", None)
    if args.split is not None:
        split = args.split
    if args.budget is not None:
        budget = args.budget
    if split is not None or budget is not None:
        base["popsize"], base["moves"] = resolve_split(split, budget)
    for name in ("landscape", "dim", "repeats", "transforms", "seed") + _EVOLVE_FLAGS:
        value = getattr(args, name)
        if value is not None:
            base[name] = value
    try:
        return EvolutionConfig.from_dict(base)
    except (TypeError, ValueError) as e:
        raise UsageError(f"invalid configuration: {e}") from None


def cmd_evolve(args) -> int:
    config = evolution_config(args)
    if args.output_dir:
        out = Path(args.output_dir)
    else:
        out = output_base() / (f"evolve-{config.landscape}-{config.dim}d-"
                               f"{config.popsize}x{config.moves}-seed{config.seed}")
    echo = None if args.quiet else print
    t0 = time.perf_counter()
    result = run_to_dir(config, out, jobs=args.jobs, echo=echo)
    print(f"best-of-run (generation {result.best_generation}, training fitness "
          f"{result.best_fitness:.6g}): {print_program(result.best)}")
    if result.reevaluation is not None:
        print(f"reevaluated mean error over {config.reeval_repeats} untransformed runs: "
              f"{result.reevaluation.fitness:.6g}")
    print(f"artifacts written to {out} ({time.perf_counter() - t0:.1f} s)")
    return EXIT_OK


def cmd_eval(args) -> int:
    profile = _profile(args, "eval", 25, False)
    program, _ = read_program(args.program)
    landscape = make_landscape(profile.landscape, profile.dim)
    report = evaluate_optimiser(program, landscape, profile.run_config(),
                                transforms=profile.transforms)
    data = {"profile": profile.to_dict(), "program": print_program(program), **report.to_dict()}
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(f"{profile.landscape} D={profile.dim} split {profile.split} "
              f"transforms {'on' if profile.transforms else 'off'} seed {profile.seed}")
        print(f"mean error over {profile.repeats} runs: {report.fitness:.6g}")
        for r, (e, n) in enumerate(zip(report.pbests, report.evaluations)):
            print(f"  run {r:2d}: error {e:.6g}  ({n} evaluations)")
    if profile.output_dir:
        out = Path(profile.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "eval-report.json").write_text(json.dumps(data, indent=2) + "\n")
    return EXIT_OK


def trace_summary(report) -> dict:
    values = report.trace_values
    ok = values < SENTINEL
    out = {"rows": int(len(values)), "evaluated_rows": int(ok.sum()),
           "in_bounds_rows": int(report.trace[:, 4].sum())}
    if ok.any():
        k = int(np.flatnonzero(ok)[np.argmin(values[ok])])
        row = report.trace[k]
        out.update(best_value=float(values[k]),
                   best_point=[float(x) for x in report.trace_points[k]],
                   best_repeat=int(row[0]), best_move=int(row[1]), best_member=int(row[2]))
    out["mean_error"] = report.fitness
    return out


def cmd_trace(args) -> int:
    profile = _profile(args, "trace", 1, False)
    program, _ = read_program(args.program)
    landscape = make_landscape(profile.landscape, profile.dim)
    report = evaluate_optimiser(program, landscape, profile.run_config(),
                                transforms=profile.transforms, trace=True)
    summary = trace_summary(report)
    if args.output:
        csv_path = Path(args.output)
    else:
        out = Path(profile.output_dir) if profile.output_dir else output_base()
        csv_path = out / f"trace-{profile.landscape}-{profile.dim}d-{profile.split}-seed{profile.seed}.csv"
    if str(csv_path) == "-":
        report.write_trace_csv(sys.stdout)
    else:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", newline="") as fh:
            report.write_trace_csv(fh)
        summary_path = csv_path.with_suffix(".summary.json")
        summary_path.write_text(json.dumps({"profile": profile.to_dict(), **summary}, indent=2) + "\n")
        print(f"trace: {csv_path} ({summary['rows']} rows)")
        print(f"summary: {summary_path}")
        if "best_value" in summary:
            pt = ", ".join(f"{x:.6g}" for x in summary["best_point"])
            print(f"best value {summary['best_value']:.6g} at ({pt})")
    return EXIT_OK


def cmd_show(args) -> int:
    program, _ = read_program(args.program)
    hist = atom_histogram(program)
    if args.json:
        print(json.dumps({"program": print_program(program), "atoms": program.length,
                          "depth": _depth(program.items), "histogram": dict(hist)}, indent=2))
        return EXIT_OK
    print(print_program(program))
    print(f"atoms: {program.length}")
    print(f"block depth: {_depth(program.items)}")
    print("instruction histogram:")
    for name, n in sorted(hist.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"  {n:4d}  {name}")
    return EXIT_OK


def run_bench(landscape: str = "f9", dim: int = 10, split: tuple[int, int] = DEFAULT_SPLIT,
              repeats: int = 10, programs: int = 20, seed: int = 0) -> dict:
    """Interpreter throughput over the published programs plus random ones."""
    rng = np.random.default_rng(seed)
    progs = [parse_program(fixture_text(n)) for n in FIXTURE_NAMES]
    progs += [random_program(rng, 100) for _ in range(programs)]
    L = make_landscape(landscape, dim)
    config = RunConfig(split[0], split[1], repeats, seed)
    evaluate_optimiser(progs[0], L, RunConfig(split[0], 1, 1, seed))  # warm-up
    steps = evals = 0
    t0 = time.perf_counter()
    for k, prog in enumerate(progs):
        rep = evaluate_optimiser(prog, L, config, stream=(k,))
        steps += sum(rep.steps)
        evals += sum(rep.evaluations)
    dt = time.perf_counter() - t0
    return {"programs": len(progs), "landscape": landscape, "dim": dim,
            "split": f"{split[0]}x{split[1]}", "repeats": repeats, "steps": steps,
            "evaluations": evals, "seconds": dt, "steps_per_second": steps / dt,
            "evaluations_per_second": evals / dt,
            "fitness_evaluations_per_second": len(progs) / dt}


def cmd_bench(args) -> int:
    if args.landscape is not None and args.landscape not in LANDSCAPE_NAMES:
        raise UsageError(f"unknown landscape {args.landscape!r}; valid names: "
                         f"{', '.join(LANDSCAPE_NAMES)}")
    split = resolve_split(args.split, args.budget)
    res = run_bench(args.landscape or "f9", args.dim, split, args.repeats or 10,
                    args.programs, args.seed)
    if args.json:
        print(json.dumps(res, indent=2))
    else:
        print(f"{res['programs']} programs on {res['landscape']} D={res['dim']}, "
              f"split {res['split']}, {res['repeats']} repeats")
        print(f"interpreter steps: {res['steps']} in {res['seconds']:.2f} s")
        print(f"steps/sec: {res['steps_per_second']:.4g}")
        print(f"landscape evaluations/sec: {res['evaluations_per_second']:.4g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _profile_flags(p: argparse.ArgumentParser, dim_default: int = 10):
    p.add_argument("-l", "--landscape", default=None,
                   help=f"benchmark landscape ({', '.join(LANDSCAPE_NAMES)})")
    p.add_argument("-d", "--dim", type=int, default=dim_default, help="problem dimension")
    p.add_argument("--budget", type=int, default=None, help="function evaluations per run")
    p.add_argument("--split", default=None, help="POPSIZExMOVES, must multiply to the budget")
    p.add_argument("--repeats", type=int, default=None, help="optimisation runs to average")
    p.add_argument("--transforms", type=_on_off, default=None, metavar="on|off",
                   help="randomly translate, scale and flip the landscape per run")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("-o", "--output-dir", default=None,
                   help=f"output directory (default ${ENV_OUTPUT_DIR} or ./{DEFAULT_OUTPUT_DIR})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pushopt", description="Evolve and analyse Push optimisers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="evolve an optimiser with Push GP")
    _profile_flags(p, dim_default=None)
    p.set_defaults(seed=None)
    p.add_argument("--config", help="JSON file of evolution settings (flags override it)")
    p.add_argument("--gp-popsize", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--tournament-size", type=int)
    p.add_argument("--max-program-size", type=int)
    p.add_argument("--exec-limit", type=int)
    p.add_argument("--crossover-rate", type=float)
    p.add_argument("--mutation-rate", type=float)
    p.add_argument("--reproduction-rate", type=float)
    p.add_argument("--elitism", type=int)
    p.add_argument("--reeval-repeats", type=int)
    p.add_argument("-j", "--jobs", type=int, default=1,
                   help="worker processes for fitness evaluation (never changes results)")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_evolve)

    for name, func, help_ in (("eval", cmd_eval, "evaluate a program (25 untransformed runs)"),
                              ("trace", cmd_trace, "write a per-move CSV trace of a run")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("program", help="program file, or fixture:NAME")
        _profile_flags(p)
        if name == "trace":
            p.add_argument("--output", help="CSV path ('-' for stdout)")
        else:
            p.add_argument("--json", action="store_true", help="print the report as JSON")
        p.set_defaults(func=func)

    p = sub.add_parser("show", help="pretty-print a program with static statistics")
    p.add_argument("program", help="program file, or fixture:NAME")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("bench", help="measure interpreter steps per second")
    _profile_flags(p)
    p.add_argument("--programs", type=int, default=20, help="random programs besides the fixtures")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"pushopt {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"pushopt {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
