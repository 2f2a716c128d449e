"""The ten acceptance checks, shared by the acceptance suite and module tests.

Each check returns ``(passed, detail)``; ``detail`` is a one-line summary of
what was measured.
"""

from __future__ import annotations

import contextlib
import io
import json
import tempfile
import time
from pathlib import Path

import numpy as np

import oracles
from fuzzing import run_fuzz
from pushopt.benchmarks import LANDSCAPE_NAMES, TransformedLandscape, make_landscape, sample_transform
from pushopt.evolve import (EvolutionConfig, baseline_reevaluation, evolve, random_program)
from pushopt.fixtures import FIXTURE_NAMES, fixture_text, load_fixture
from pushopt.interpreter.program import parse_program, print_program
from pushopt.metaeval import RunConfig, SwarmRun, evaluate_optimiser, trace_run

# ---------------------------------------------------------------------------
# 1. interpreter conformance


def check_fuzz(applications: int = 10 ** 6):
    rep = run_fuzz(applications)
    ok = rep.total_violations == 0 and rep.seconds < 60 and rep.applications >= applications
    return ok, (f"{rep.applications} applications in {rep.seconds:.1f} s; violations: "
                f"depth {rep.depth_violations}, type {rep.type_violations}, "
                f"non-finite {rep.nonfinite}, input {rep.input_mutations}, "
                f"no-op {rep.noop_violations}, footprint {rep.footprint_violations}")


# ---------------------------------------------------------------------------
# 2. fixture round trip


def check_fixtures():
    problems = []
    for name in FIXTURE_NAMES:
        text = fixture_text(name)
        p = parse_program(text)
        printed = print_program(p)
        again = parse_program(printed)
        if again != p or print_program(again) != printed:
            problems.append(f"{name}: round trip differs")
            continue
        run = SwarmRun(p, make_landscape(name, 2), popsize=5, seed=1, moves=1)
        run.init_members()
        records = run.move()
        if len(records) != 5 or run.m != 1:
            problems.append(f"{name}: move did not complete")
    return not problems, "; ".join(problems) or f"{len(FIXTURE_NAMES)} fixtures round-trip and move on 2-D"


# ---------------------------------------------------------------------------
# 3. hand-traced run of the move loop

GOLDEN_PROGRAM = "(vector.best -0.5 vector.scale vector.+)"
GOLDEN_INIT = [[3.0, 4.0], [1.0, -2.0]]
# (repeat, move, member, value, improved, in_bounds, point), traced by hand:
# each member proposes its stack-top vector plus -0.5 times the population
# best point; improvement is judged against the member's previous value.
GOLDEN_TRACE = [
    (0, 0, 0, 25.0, True, True, (3.0, 4.0)),
    (0, 0, 1, 5.0, True, True, (1.0, -2.0)),
    (0, 1, 0, 31.25, False, True, (2.5, 5.0)),        # (3,4) + (-0.5, 1)
    (0, 1, 1, 1.25, True, True, (0.5, -1.0)),         # (1,-2) + (-0.5, 1)
    (0, 2, 0, 27.8125, True, True, (2.75, 4.5)),      # reminded best (3,4) + (-0.25, 0.5)
    (0, 2, 1, 0.3125, True, True, (0.25, -0.5)),
    (0, 3, 0, 29.453125, False, True, (2.625, 4.75)),  # (2.75,4.5) + (-0.125, 0.25)
    (0, 3, 1, 0.078125, True, True, (0.125, -0.25)),
]
GOLDEN_PBEST = [5.0, 1.25, 0.3125, 0.078125]


def golden_report():
    return evaluate_optimiser(parse_program(GOLDEN_PROGRAM), make_landscape("f1", 2),
                              RunConfig(popsize=2, moves=3, repeats=1), transforms=False,
                              trace=True, init_points=GOLDEN_INIT)


def check_golden():
    rep = golden_report()
    got = [(r.repeat, r.move, r.member, r.value, r.improved, r.in_bounds, r.point)
           for r in rep.records()]
    ok = (got == GOLDEN_TRACE and rep.pbest_history == [GOLDEN_PBEST]
          and rep.evaluations == [8] and rep.fitness == GOLDEN_PBEST[-1])
    detail = "8 records, pbest 5 -> 1.25 -> 0.3125 -> 0.078125" if ok else f"got {got}"
    return ok, detail


# ---------------------------------------------------------------------------
# 4. landscapes against independent implementations


def landscape_errors(points: int = 10 ** 5, dim: int = 10, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = {}
    for name in LANDSCAPE_NAMES:
        L = make_landscape(name, dim)
        x = L.lower + (L.upper - L.lower) * rng.random((points, dim))
        got = L.evaluate_many(x)
        want = oracles.evaluate(name, x, L)
        worst[name] = float(np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-300)))
    return worst


def optimum_identities():
    """Every identity is (description, holds)."""
    out = []
    for name in LANDSCAPE_NAMES:
        for dim in (1, 2, 3, 10, 30):
            L = make_landscape(name, dim)
            out.append((f"{name} D={dim} optimum", L.evaluate(L.optimum_location) == L.optimum_value))
    out.append(("f1 (3,4) = 25", make_landscape("f1", 2).evaluate([3, 4]) == 25.0))
    out.append(("f9 (1,1) = 2", make_landscape("f9", 2).evaluate([1, 1]) == 2.0))
    return out


def check_landscapes():
    worst = landscape_errors()
    ids = optimum_identities()
    failed = [d for d, ok in ids if not ok]
    ok = all(v <= 1e-10 for v in worst.values()) and not failed
    err = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"max relative error on 1e5 points: {err}; identities failed: {failed or 'none'}"


# ---------------------------------------------------------------------------
# 5. transforms


def transform_errors(count: int = 1000, dim: int = 5, seed: int = 0):
    rng = np.random.default_rng(seed)
    stats = {}
    for name in LANDSCAPE_NAMES:
        L = make_landscape(name, dim)
        half = (L.upper - L.lower) / 2
        rel, opt, trans = 0.0, 0.0, 0.0
        for _ in range(count):
            spec = sample_transform(rng, L)
            tl = TransformedLandscape(L, spec)
            x = L.lower + (L.upper - L.lower) * rng.random(dim)
            want = oracles.evaluate(name, oracles.phi(x, spec.translation, spec.scale, spec.flip), L)[0]
            got = tl.evaluate(x)
            rel = max(rel, abs(got - want) / max(abs(want), 1e-300))
            opt = max(opt, abs(tl.evaluate(tl.optimum_location) - L.optimum_value))
            trans = max(trans, float(np.max(np.abs(spec.translation) / half)))
        stats[name] = (rel, opt, trans)
    return stats


def check_transforms():
    stats = transform_errors()
    ok = all(r <= 1e-10 and o <= 1e-9 and t <= 0.5 for r, o, t in stats.values())
    parts = ", ".join(f"{k} rel {r:.0e} opt {o:.0e} |t|/half {t:.3f}" for k, (r, o, t) in stats.items())
    return ok, parts


# ---------------------------------------------------------------------------
# 6. desk-scale evolution


DESK = dict(landscape="f9", dim=2, popsize=5, moves=20, gp_popsize=50, generations=20,
            transforms=True)


def desk_runs(seeds=range(20)):
    evolved, baseline, oracle_gap = [], [], 0.0
    t0 = time.perf_counter()
    for s in seeds:
        config = EvolutionConfig(seed=s, **DESK)
        res = evolve(config)
        evolved.append(res.reevaluation.fitness)
        L = make_landscape(config.landscape, config.dim)
        want, _ = oracles.empty_program_baseline(L, config.popsize, config.reeval_repeats, s, (2,))
        baseline.append(want)
        oracle_gap = max(oracle_gap, abs(baseline_reevaluation(config).fitness - want))
    return evolved, baseline, oracle_gap, time.perf_counter() - t0


def check_desk_evolution():
    evolved, baseline, gap, seconds = desk_runs()
    ratio = np.median(baseline) / max(np.median(evolved), 1e-300)
    ok = ratio >= 10 and seconds < 300 and gap < 1e-9
    return ok, (f"median reevaluated error {np.median(evolved):.4g} vs empty-program "
                f"{np.median(baseline):.4g} (ratio {ratio:.1f}, need >= 10); "
                f"{seconds:.0f} s for 20 seeds; baseline oracle gap {gap:.1e}")


# ---------------------------------------------------------------------------
# 7. qualitative behaviour of the published F13 and F9 programs


def proposals(report):
    """Per repeat and member: (move, proposal, member best before the move, base point).

    The base point is the vector the program finds on top of its stack: the
    member's best after a non-improving evaluated move, else its last proposal.
    """
    recs = report.records()
    out = []
    state = {}
    for r in recs:
        key = (r.repeat, r.member)
        pt = np.array(r.point)
        if r.move == 0:
            state[key] = dict(best=pt, bestval=r.value, base=pt)
            continue
        st = state[key]
        if not np.isnan(pt).any():
            out.append((r.repeat, r.member, r.move, pt, st["best"].copy(), st["base"].copy()))
            st["base"] = pt
        if r.in_bounds:
            if r.value < st["bestval"]:
                st["best"], st["bestval"] = pt, r.value
            if not r.improved:
                st["base"] = st["best"]
    return out


def f13_axis_fractions(splits=((50, 20), (1, 1000)), repeats: int = 10):
    L = make_landscape("f13", 2)
    out = {}
    for P, M in splits:
        rows = proposals(trace_run(load_fixture("f13"), L, RunConfig(P, M, repeats)))
        vs_best = np.mean([np.sum(pt != best) == 1 for _, _, _, pt, best, _ in rows])
        vs_base = np.mean([np.sum(pt != base) <= 1 for _, _, _, pt, _, base in rows])
        out[f"{P}x{M}"] = (float(vs_best), float(vs_base))
    return out


def f9_alternation(repeats: int = 10, radius: float = 1.0):
    """Near-best versus random proposals of the one-point F9 optimiser.

    A proposal is near when every coordinate is within ``radius`` of the
    best-seen point (the published program's steps are sines of the move
    number, so at most 1 per axis).
    """
    rows = proposals(trace_run(load_fixture("f9"), make_landscape("f9", 2), RunConfig(1, 1000, repeats)))
    near_frac, switch_frac, far_spread = [], [], []
    for r in range(repeats):
        mine = [(pt, best) for rep, _, _, pt, best, _ in rows if rep == r]
        near = np.array([np.max(np.abs(pt - best)) <= radius for pt, best in mine])
        near_frac.append(near.mean())
        switch_frac.append(np.mean(near[1:] != near[:-1]))
        far = np.array([pt for (pt, _), n in zip(mine, near) if not n])
        far_spread.append(float(np.std(far)) if len(far) else 0.0)
    return float(np.mean(near_frac)), float(np.mean(switch_frac)), float(np.mean(far_spread))


def check_behaviour():
    fr = f13_axis_fractions()
    near, switches, spread = f9_alternation()
    f13_ok = all(vs_best == 1.0 for vs_best, _ in fr.values())
    f9_ok = 0.25 <= near <= 0.75 and switches >= 0.25
    f13_txt = ", ".join(f"{k}: {b:.0%} single-axis vs best ({s:.0%} vs stack base)" for k, (b, s) in fr.items())
    return f13_ok and f9_ok, (f"F13 {f13_txt} [{'ok' if f13_ok else 'FAIL'}]; F9 near-best "
                              f"{near:.0%}, class switches {switches:.0%} of moves, random-sample "
                              f"spread {spread:.2f} [{'ok' if f9_ok else 'FAIL'}]")


# ---------------------------------------------------------------------------
# 8. budget accounting


def budget_cases(n: int = 100, seed: int = 0):
    rng = np.random.default_rng(seed)
    for k in range(n):
        name = LANDSCAPE_NAMES[rng.integers(len(LANDSCAPE_NAMES))]
        dim = int(rng.integers(1, 11))
        config = RunConfig(int(rng.integers(1, 21)), int(rng.integers(1, 41)), int(rng.integers(1, 4)),
                           seed=int(rng.integers(2 ** 31)))
        yield (random_program(rng, 100), make_landscape(name, dim), config, bool(rng.random() < 0.5))


def check_budget():
    bad = []
    for k, (prog, L, config, transforms) in enumerate(budget_cases()):
        rep = evaluate_optimiser(prog, L, config, transforms=transforms, trace=True)
        cap = config.popsize * (config.moves + 1)
        for r in range(config.repeats):
            hist = np.array(rep.pbest_history[r])
            rows = rep.trace[rep.trace[:, 0] == r]
            all_in = bool(rows[:, 4].all())
            if rep.evaluations[r] > cap or np.any(np.diff(hist) > 0) \
                    or (rep.evaluations[r] == cap) != all_in or rep.evaluations[r] != rows[:, 4].sum():
                bad.append(k)
    return not bad, f"100 random programs/configs; violating cases: {sorted(set(bad)) or 'none'}"


# ---------------------------------------------------------------------------
# 9. reproducibility across parallelism


REPRO_ARGS = ["evolve", "-l", "f1", "-d", "2", "--budget", "100", "--split", "5x20", "--seed", "7",
              "--gp-popsize", "24", "--generations", "4", "--repeats", "4", "-q"]


def check_reproducibility():
    from pushopt.cli import main
    with tempfile.TemporaryDirectory() as tmp, contextlib.redirect_stdout(io.StringIO()):
        logs = []
        for jobs in (1, 3):
            out = Path(tmp) / f"jobs{jobs}"
            code = main(REPRO_ARGS + ["--jobs", str(jobs), "-o", str(out)])
            if code != 0:
                return False, f"evolve exited with {code}"
            logs.append((out / "generations.jsonl").read_bytes())
        n = len(logs[0].splitlines())
        ok = logs[0] == logs[1] and n == 4
        return ok, f"--jobs 1 and --jobs 3 logs {'identical' if logs[0] == logs[1] else 'DIFFER'} ({n} generations)"


# ---------------------------------------------------------------------------
# 10. throughput


def table1_projection(programs: int = 8, seed: int = 0):
    """Seconds for one full-scale training run (200 x 50 GP), extrapolated from random programs."""
    rng = np.random.default_rng(seed)
    L = make_landscape("f9", 10)
    config = RunConfig(50, 20, 10, seed)
    t0 = time.perf_counter()
    for k in range(programs):
        evaluate_optimiser(random_program(rng, 100), L, config, stream=(k,))
    per_eval = (time.perf_counter() - t0) / programs
    return per_eval * 200 * 50


def check_throughput():
    from pushopt.cli import run_bench
    res = run_bench()
    hours = table1_projection() / 3600
    ok = res["steps_per_second"] >= 1e7
    return ok, (f"bench: {res['steps_per_second']:.3g} steps/s single-threaded; projected full-scale "
                f"run (200 x 50, 10 repeats, 1E+3 FEs, D=10): {hours:.2f} h on one core")


CRITERIA = [
    (1, "interpreter conformance (fuzz)", check_fuzz),
    (2, "fixture round-trip", check_fixtures),
    (3, "hand-traced golden run", check_golden),
    (4, "landscape correctness", check_landscapes),
    (5, "transform semantics", check_transforms),
    (6, "desk-scale evolution efficacy", check_desk_evolution),
    (7, "qualitative behaviour (F13 cross, F9 alternation)", check_behaviour),
    (8, "budget accounting", check_budget),
    (9, "reproducibility across --jobs", check_reproducibility),
    (10, "throughput", check_throughput),
]


def summary_json(results) -> str:
    return json.dumps([{"criterion": n, "name": name, "passed": ok, "detail": d}
                       for n, name, ok, d in results], indent=2)
