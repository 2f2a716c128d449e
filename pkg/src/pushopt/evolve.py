"""Push GP: evolving optimiser programs against their mean optimisation error.

Every random draw flows from the master seed. Variation uses one stream;
each fitness evaluation gets its own stream keyed by (generation, index), so
results do not depend on how evaluations are spread over worker processes.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .benchmarks import DEFAULT_F12_SEED, LANDSCAPE_NAMES, make_landscape
from .interpreter.program import Block, Instruction, Program, parse_program, print_program
from .metaeval import FitnessReport, RunConfig, evaluate_optimiser
from .opcodes import EVOLVABLE_NAMES

FLOAT_ERC_RANGE = (-1.0, 1.0)
INT_ERC_RANGE = (-10, 10)
ERC_SIGMA = 0.1  # literal perturbation, as a fraction of the ERC range

DEFAULT_INSTRUCTIONS: tuple[str, ...] = EVOLVABLE_NAMES + ("true", "false")

# streams split off the master seed
VARIATION_STREAM = 0
FITNESS_STREAM = 1
REEVAL_STREAM = 2


@dataclass(frozen=True)
class EvolutionConfig:
    """GP parameters plus the fitness measurement they evolve against."""

    landscape: str = "f9"
    dim: int = 10
    popsize: int = 50          # optimiser population (split = popsize x moves)
    moves: int = 20
    repeats: int = 10
    transforms: bool = True
    gp_popsize: int = 200
    generations: int = 50
    tournament_size: int = 5
    max_program_size: int = 100
    exec_limit: int = 100
    crossover_rate: float = 0.5
    mutation_rate: float = 0.4
    reproduction_rate: float = 0.1
    elitism: int = 1
    reeval_repeats: int = 25
    init_charged: bool = False
    f12_seed: int = DEFAULT_F12_SEED
    seed: int = 0
    instructions: tuple[str, ...] = DEFAULT_INSTRUCTIONS

    def __post_init__(self):
        if self.landscape not in LANDSCAPE_NAMES:
            raise ValueError(f"unknown landscape {self.landscape!r}; valid names: "
                             f"{', '.join(LANDSCAPE_NAMES)}")
        for name in ("dim", "popsize", "moves", "repeats", "gp_popsize", "generations",
                     "tournament_size", "max_program_size", "exec_limit", "reeval_repeats"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        rates = (self.crossover_rate, self.mutation_rate, self.reproduction_rate)
        if any(r < 0 or r > 1 for r in rates) or not math.isclose(sum(rates), 1.0, abs_tol=1e-9):
            raise ValueError("variation rates must lie in [0, 1] and sum to 1")
        if not 0 <= self.elitism <= self.gp_popsize:
            raise ValueError("elitism must be between 0 and gp_popsize")
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if not self.instructions:
            raise ValueError("instruction set is empty")
        for name in self.instructions:
            _token_atom(name)  # validates

    @property
    def budget(self) -> int:
        return self.popsize * self.moves

    def run_config(self, repeats: int | None = None) -> RunConfig:
        return RunConfig(self.popsize, self.moves, self.repeats if repeats is None else repeats,
                         self.seed, self.exec_limit, self.init_charged)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["instructions"] = list(self.instructions)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvolutionConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        d = dict(d)
        if "instructions" in d:
            d["instructions"] = tuple(d["instructions"])
        return cls(**d)


@dataclass
class Individual:
    genome: Program
    fitness: float = math.inf
    evaluated: bool = False


# ---------------------------------------------------------------------------
# genome construction and variation

def _token_atom(name: str):
    if name == "true":
        return True
    if name == "false":
        return False
    return Instruction(name)


def random_atom(rng: np.random.Generator, instructions: Sequence[str] = DEFAULT_INSTRUCTIONS):
    """One uniformly chosen atom; erc instructions become literal constants."""
    name = instructions[rng.integers(len(instructions))]
    if name == "float.erc":
        return float(rng.uniform(*FLOAT_ERC_RANGE))
    if name == "integer.erc":
        return int(rng.integers(INT_ERC_RANGE[0], INT_ERC_RANGE[1] + 1))
    return _token_atom(name)


def random_program(rng: np.random.Generator, size_budget: int = 100,
                   instructions: Sequence[str] = DEFAULT_INSTRUCTIONS) -> Program:
    """A flat program with length uniform in [1, size_budget]."""
    if size_budget < 1:
        raise ValueError("size budget must be >= 1")
    n = int(rng.integers(1, size_budget + 1))
    return Program(tuple(random_atom(rng, instructions) for _ in range(n)))


def _is_number(atom) -> bool:
    return type(atom) in (int, float)


def _perturb(atom, rng: np.random.Generator):
    if type(atom) is float:
        lo, hi = FLOAT_ERC_RANGE
        return float(atom + rng.normal(0.0, ERC_SIGMA * (hi - lo)))
    lo, hi = INT_ERC_RANGE
    r = int(round(atom + rng.normal(0.0, ERC_SIGMA * (hi - lo))))
    return max(min(r, 2 ** 62 - 1), -(2 ** 62 - 1))


def _fit(items: list, max_size: int) -> tuple:
    """Drop trailing items until the atom count is within ``max_size``."""
    while items and Program(tuple(items)).length > max_size:
        items.pop()
    return tuple(items)


MUTATIONS = ("replace", "insert", "delete")


def mutate(genome: Program, rng: np.random.Generator, max_size: int = 100,
           instructions: Sequence[str] = DEFAULT_INSTRUCTIONS) -> Program:
    """Point replacement, insertion or deletion at a uniform position.

    A replaced numeric literal is perturbed with Gaussian noise instead of
    redrawn half the time. Insertion into a full genome and deletion from a
    genome of one atom leave it unchanged.
    """
    items = list(genome.items)
    kind = MUTATIONS[rng.integers(3)]
    if kind == "insert":
        if genome.length >= max_size:
            return genome
        pos = int(rng.integers(len(items) + 1))
        items.insert(pos, random_atom(rng, instructions))
    elif kind == "delete":
        if len(items) <= 1:
            return genome
        del items[int(rng.integers(len(items)))]
    else:
        if not items:
            return genome
        pos = int(rng.integers(len(items)))
        if _is_number(items[pos]) and rng.random() < 0.5:
            items[pos] = _perturb(items[pos], rng)
        else:
            items[pos] = random_atom(rng, instructions)
    return Program(_fit(items, max_size))


def crossover(a: Program, b: Program, rng: np.random.Generator, max_size: int = 100) -> Program:
    """One-point crossover: a prefix of ``a`` then a suffix of ``b``, truncated."""
    cut_a = int(rng.integers(len(a.items) + 1))
    cut_b = int(rng.integers(len(b.items) + 1))
    return Program(_fit(list(a.items[:cut_a]) + list(b.items[cut_b:]), max_size))


def tournament_select(population: Sequence[Individual], k: int,
                      rng: np.random.Generator) -> Individual:
    """Best of ``k`` uniform draws with replacement; ties go to the earliest draw."""
    if not population:
        raise ValueError("empty population")
    picks = rng.integers(len(population), size=k)
    best = population[picks[0]]
    for i in picks[1:]:
        if population[i].fitness < best.fitness:
            best = population[i]
    return best


# ---------------------------------------------------------------------------
# fitness

@lru_cache(maxsize=8)
def _landscape(name: str, dim: int, f12_seed: int):
    return make_landscape(name, dim, f12_seed)


def program_fitness(genome: Program, config: EvolutionConfig, generation: int, index: int) -> float:
    """Training fitness of one individual; a pure function of its arguments."""
    L = _landscape(config.landscape, config.dim, config.f12_seed)
    rep = evaluate_optimiser(genome, L, config.run_config(), transforms=config.transforms,
                             stream=(FITNESS_STREAM, generation, index))
    return rep.fitness


def _fitness_job(args):
    text, config, generation, index = args
    return program_fitness(parse_program(text), config, generation, index)


def reevaluate(genome: Program, config: EvolutionConfig) -> FitnessReport:
    """Untransformed reevaluation over ``config.reeval_repeats`` runs."""
    L = _landscape(config.landscape, config.dim, config.f12_seed)
    return evaluate_optimiser(genome, L, config.run_config(config.reeval_repeats),
                              transforms=False, stream=(REEVAL_STREAM,))


def baseline_reevaluation(config: EvolutionConfig) -> FitnessReport:
    """The empty program under exactly the reevaluation streams of ``config``."""
    return reevaluate(Program(), config)


# ---------------------------------------------------------------------------
# the generational loop

@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    median_fitness: float
    best_so_far: float
    best_length: int
    best_genome: str
    operators: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class EvolutionResult:
    config: EvolutionConfig
    best: Program
    best_fitness: float
    best_generation: int
    history: list[GenerationRecord]
    reevaluation: FitnessReport | None
    evaluations: int
    operator_counts: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {
            "best_genome": print_program(self.best),
            "best_length": self.best.length,
            "best_training_fitness": self.best_fitness,
            "best_generation": self.best_generation,
            "optimiser_evaluations": self.evaluations,
            "operator_counts": self.operator_counts,
            "config": self.config.to_dict(),
        }
        if self.reevaluation is not None:
            out["reevaluation"] = self.reevaluation.to_dict()
        return out


class _Evaluator:
    """Maps fitness jobs over an optional process pool, preserving order."""

    def __init__(self, jobs: int):
        self.jobs = max(1, int(jobs))
        self.pool = ProcessPoolExecutor(self.jobs) if self.jobs > 1 else None

    def __call__(self, genomes: list[Program], config: EvolutionConfig, generation: int) -> list[float]:
        if self.pool is None:
            return [program_fitness(g, config, generation, i) for i, g in enumerate(genomes)]
        args = [(print_program(g), config, generation, i) for i, g in enumerate(genomes)]
        chunk = max(1, len(args) // (4 * self.jobs))
        return list(self.pool.map(_fitness_job, args, chunksize=chunk))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def _breed(population: list[Individual], config: EvolutionConfig, rng: np.random.Generator,
           counts: dict) -> list[Program]:
    order = sorted(range(len(population)), key=lambda i: (population[i].fitness, i))
    nxt = [population[i].genome for i in order[:config.elitism]]
    thresholds = np.cumsum([config.crossover_rate, config.mutation_rate])
    k = config.tournament_size
    while len(nxt) < config.gp_popsize:
        u = rng.random()
        if u < thresholds[0]:
            a = tournament_select(population, k, rng).genome
            b = tournament_select(population, k, rng).genome
            child = crossover(a, b, rng, config.max_program_size)
            counts["crossover"] += 1
        elif u < thresholds[1]:
            child = mutate(tournament_select(population, k, rng).genome, rng,
                           config.max_program_size, config.instructions)
            counts["mutation"] += 1
        else:
            child = tournament_select(population, k, rng).genome
            counts["reproduction"] += 1
        nxt.append(child)
    return nxt


def evolve(config: EvolutionConfig, jobs: int = 1, log: Callable[[GenerationRecord], None] | None = None,
           initial: Sequence[Program] | None = None, reevaluate_best: bool = True) -> EvolutionResult:
    """Run the generational loop and return the best-of-run program.

    Every individual, elites included, is re-measured each generation on fresh
    streams. The best of run is the lowest training fitness ever measured.
    """
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, VARIATION_STREAM]))
    genomes = list(initial or [])[:config.gp_popsize]
    for g in genomes:
        if g.length > config.max_program_size:
            raise ValueError("seeded genome exceeds the program size limit")
    while len(genomes) < config.gp_popsize:
        genomes.append(random_program(rng, config.max_program_size, config.instructions))
    evaluator = _Evaluator(jobs)
    history: list[GenerationRecord] = []
    best, best_fit, best_gen = genomes[0], math.inf, 0
    counts = {"crossover": 0, "mutation": 0, "reproduction": 0}
    evaluations = 0
    try:
        for gen in range(config.generations):
            fits = evaluator(genomes, config, gen)
            evaluations += len(genomes)
            population = [Individual(g, f, True) for g, f in zip(genomes, fits)]
            i_best = min(range(len(population)), key=lambda i: (population[i].fitness, i))
            if population[i_best].fitness < best_fit:
                best, best_fit, best_gen = population[i_best].genome, population[i_best].fitness, gen
            before = dict(counts)
            if gen + 1 < config.generations:
                genomes = _breed(population, config, rng, counts)
            rec = GenerationRecord(
                generation=gen,
                best_fitness=float(population[i_best].fitness),
                mean_fitness=float(np.mean(fits)),
                median_fitness=float(np.median(fits)),
                best_so_far=float(best_fit),
                best_length=population[i_best].genome.length,
                best_genome=print_program(population[i_best].genome),
                operators={k: counts[k] - before[k] for k in counts},
            )
            history.append(rec)
            if log is not None:
                log(rec)
    finally:
        evaluator.close()
    reeval = reevaluate(best, config) if reevaluate_best else None
    return EvolutionResult(config, best, float(best_fit), best_gen, history, reeval, evaluations,
                           counts)


# ---------------------------------------------------------------------------
# artifacts

LOG_NAME = "generations.jsonl"
BEST_NAME = "best.push"
REEVAL_NAME = "reevaluation.json"
CONFIG_NAME = "config.json"
SUMMARY_NAME = "summary.json"


def run_to_dir(config: EvolutionConfig, out_dir: str | os.PathLike, jobs: int = 1,
               echo: Callable[[str], None] | None = None) -> EvolutionResult:
    """``evolve`` writing its config, generation log, best genome and reports."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / CONFIG_NAME).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
    with open(out / LOG_NAME, "w") as fh:
        def log(rec: GenerationRecord):
            fh.write(rec.to_json() + "\n")
            fh.flush()
            if echo is not None:
                echo(f"gen {rec.generation:3d}  best {rec.best_fitness:.6g}  "
                     f"mean {rec.mean_fitness:.6g}  best-so-far {rec.best_so_far:.6g}")
        result = evolve(config, jobs=jobs, log=log)
    (out / BEST_NAME).write_text(print_program(result.best) + "\n")
    if result.reevaluation is not None:
        (out / REEVAL_NAME).write_text(json.dumps(result.reevaluation.to_dict(), indent=2) + "\n")
    (out / SUMMARY_NAME).write_text(json.dumps(result.summary(), indent=2) + "\n")
    return result


def load_log(path: str | os.PathLike) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


__all__ = [
    "Block", "DEFAULT_INSTRUCTIONS", "EvolutionConfig", "EvolutionResult", "GenerationRecord",
    "Individual", "baseline_reevaluation", "crossover", "evolve", "load_log", "mutate",
    "program_fitness", "random_atom", "random_program", "reevaluate", "run_to_dir",
    "tournament_select",
]
