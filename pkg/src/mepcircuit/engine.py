"""Steady-state MEP evolution.

Randomness comes exclusively from ``random.Random`` (Mersenne Twister,
seeded with the run seed), so a (params, seed) pair reproduces the full
trace on any platform.

One *generation* is ``population_size // 2`` mating events. Each event picks
two parents by binary tournament, recombines them with probability
``crossover_probability`` (otherwise clones them), mutates both offspring,
and lets the better offspring replace the current worst individual if it is
strictly better.
"""

from __future__ import annotations

import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

from .circuit import Netlist, extract_circuit, gate_count, shortest_perfect_circuit
from .evaluate import (FitnessReport, RegressionCase, fitness_regression, full_mask,
                       hamming_per_gene, input_bits)
from .genome import PrimitiveSet, Terminal, random_chromosome, random_gene


@dataclass(frozen=True)
class EvolutionParams:
    population_size: int
    chromosome_length: int
    generations: int
    crossover_probability: float = 0.9
    mutations_per_chromosome: int = 5
    p_function: float = 0.5
    stop_on_success: bool = True
    seed: int = 0
    # "exact": exactly mutations_per_chromosome events per offspring;
    # "expected": each symbol slot flips with probability m / slots.
    mutation_mode: str = "exact"

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.chromosome_length < 1:
            raise ValueError("chromosome_length must be >= 1")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError("crossover_probability must be in [0, 1]")
        if not 0.0 <= self.p_function <= 1.0:
            raise ValueError("p_function must be in [0, 1]")
        if self.mutations_per_chromosome < 0:
            raise ValueError("mutations_per_chromosome must be >= 0")
        if self.mutation_mode not in ("exact", "expected"):
            raise ValueError(f"unknown mutation_mode {self.mutation_mode!r}")


class Individual(NamedTuple):
    chromosome: tuple
    fitness: FitnessReport


# --------------------------------------------------------------------------
# targets


class BooleanTarget:
    """Hamming fitness against a truth table."""

    def __init__(self, table):
        outputs = getattr(table, "outputs", table)
        self.table = table
        self.n = outputs.n
        self.bits = outputs.bits
        self._mask = full_mask(self.n)
        self._columns = [input_bits(j, self.n) for j in range(self.n)]

    def __call__(self, c) -> FitnessReport:
        return FitnessReport.from_per_gene(
            hamming_per_gene(c, self.bits, self.n, self._columns, self._mask))


class RegressionTarget:
    """Sum of absolute errors over regression cases."""

    def __init__(self, cases: Sequence[RegressionCase]):
        if not cases:
            raise ValueError("need at least one regression case")
        self.cases = list(cases)

    def __call__(self, c) -> FitnessReport:
        return fitness_regression(c, self.cases)


def as_target(target):
    if isinstance(target, (BooleanTarget, RegressionTarget)):
        return target
    if isinstance(target, (list, tuple)):
        return RegressionTarget(target)
    return BooleanTarget(target)


# --------------------------------------------------------------------------
# operators


def tournament_select(fitnesses: Sequence, rng: random.Random) -> int:
    """Binary tournament over a list of fitness values (lower is better)."""
    size = len(fitnesses)
    i, j = rng.randrange(size), rng.randrange(size)
    if fitnesses[i] < fitnesses[j]:
        return i
    if fitnesses[j] < fitnesses[i]:
        return j
    return i if rng.random() < 0.5 else j


def crossover_with_mask(p1: Sequence, p2: Sequence, mask: Sequence[int]) -> tuple[tuple, tuple]:
    """``mask[i]`` is the parent (1 or 2) that offspring 1 takes gene i from."""
    if not len(p1) == len(p2) == len(mask):
        raise ValueError("parents and mask must have equal length")
    o1, o2 = [], []
    for g1, g2, m in zip(p1, p2, mask):
        if m == 1:
            o1.append(g1)
            o2.append(g2)
        elif m == 2:
            o1.append(g2)
            o2.append(g1)
        else:
            raise ValueError(f"mask entries must be 1 or 2, got {m!r}")
    return tuple(o1), tuple(o2)


def uniform_crossover(p1: Sequence, p2: Sequence, rng: random.Random) -> tuple[tuple, tuple]:
    if len(p1) != len(p2):
        raise ValueError("parents differ in length")
    mask = [1 if rng.random() < 0.5 else 2 for _ in range(len(p1))]
    return crossover_with_mask(p1, p2, mask)


class MutationEvent(NamedTuple):
    """Overwrite one symbol slot.

    ``slot`` 0 is the gene head and ``value`` is the new gene; slots 1 and 2
    are the argument pointers and ``value`` is the new 1-based index.
    """

    position: int
    slot: int
    value: object


def apply_mutation(c: Sequence, events: Sequence[MutationEvent]) -> tuple:
    genes = list(c)
    for position, slot, value in events:
        if slot == 0:
            genes[position - 1] = value
        else:
            gene = genes[position - 1]
            if type(gene) is Terminal:
                raise ValueError(f"gene {position} is a terminal and has no argument slots")
            genes[position - 1] = gene._replace(**{f"arg{slot}": value})
    return tuple(genes)


def _slots(c: Sequence) -> list[tuple[int, int]]:
    out = []
    for pos, gene in enumerate(c, start=1):
        out.append((pos, 0))
        if type(gene) is not Terminal:
            out.append((pos, 1))
            out.append((pos, 2))
    return out


def _pick_slot(c: Sequence, rng: random.Random) -> tuple[int, int]:
    # same ordering as _slots(), without materializing the list
    n_func = sum(1 for g in c if type(g) is not Terminal)
    r = rng.randrange(len(c) + 2 * n_func)
    for pos, gene in enumerate(c, start=1):
        if r == 0:
            return pos, 0
        if type(gene) is Terminal:
            r -= 1
        elif r <= 2:
            return pos, r
        else:
            r -= 3
    raise AssertionError("slot index out of range")


def _redraw(pos: int, slot: int, pset: PrimitiveSet, rng: random.Random,
            p_function: float) -> MutationEvent:
    if slot == 0:
        return MutationEvent(pos, 0, random_gene(pos, pset, rng, p_function))
    return MutationEvent(pos, slot, rng.randint(1, pos - 1))


def mutate(c: Sequence, params: EvolutionParams, pset: PrimitiveSet,
           rng: random.Random) -> tuple:
    """Re-randomize symbol slots (gene heads or argument pointers).

    A head mutation redraws the whole gene, so gene 1 always stays a
    terminal. Slots are drawn uniformly with replacement from the slots of
    the chromosome as it stands after the previous event.
    """
    c = tuple(c)
    m = params.mutations_per_chromosome
    if params.mutation_mode == "exact":
        for _ in range(m):
            pos, slot = _pick_slot(c, rng)
            c = apply_mutation(c, [_redraw(pos, slot, pset, rng, params.p_function)])
        return c
    slots = _slots(c)
    rate = m / len(slots)
    for pos, slot in slots:
        if rng.random() < rate:
            # a head redraw earlier in this pass may have removed the argument slot
            if slot and type(c[pos - 1]) is Terminal:
                continue
            c = apply_mutation(c, [_redraw(pos, slot, pset, rng, params.p_function)])
    return c


# --------------------------------------------------------------------------
# runs


@dataclass
class RunResult:
    success: bool
    best_fitness: float
    best_individual: Individual
    best_gene: int
    first_hit_generation: int | None
    evaluations: int
    seed: int
    generations_run: int = 0
    history: list = field(default_factory=list, repr=False)


def steady_state_run(params: EvolutionParams, pset: PrimitiveSet, target,
                     rng: random.Random | None = None, initial_population=None,
                     observer=None) -> RunResult:
    """Evolve one population.

    ``initial_population`` optionally supplies chromosomes to seed the
    population (the rest is random). ``observer(generation, population)``
    is called after initialization and after every generation.
    ``history`` on the result holds the best fitness at those points.
    """
    if rng is None:
        rng = random.Random(params.seed)
    evaluate = as_target(target)
    size = params.population_size
    chromosomes = list(initial_population or [])[:size]
    while len(chromosomes) < size:
        chromosomes.append(
            random_chromosome(params.chromosome_length, pset, rng, params.p_function))
    population = [Individual(c, evaluate(c)) for c in chromosomes]
    fits = [ind.fitness.best_fitness for ind in population]
    evaluations = size

    best_idx = fits.index(min(fits))
    best = population[best_idx]
    first_hit = 0 if best.fitness.best_fitness == 0 else None
    history = [best.fitness.best_fitness]
    if observer:
        observer(0, population)

    generation = 0
    done = first_hit is not None and params.stop_on_success
    while not done and generation < params.generations:
        generation += 1
        for _ in range(size // 2):
            p1 = population[tournament_select(fits, rng)].chromosome
            p2 = population[tournament_select(fits, rng)].chromosome
            if rng.random() < params.crossover_probability:
                o1, o2 = uniform_crossover(p1, p2, rng)
            else:
                o1, o2 = p1, p2
            o1 = mutate(o1, params, pset, rng)
            o2 = mutate(o2, params, pset, rng)
            f1, f2 = evaluate(o1), evaluate(o2)
            evaluations += 2
            child = Individual(o1, f1) if f1.best_fitness <= f2.best_fitness else Individual(o2, f2)
            cf = child.fitness.best_fitness

            worst_fit = max(fits)
            if cf < worst_fit:
                worst = fits.index(worst_fit)
                population[worst] = child
                fits[worst] = cf
            if cf < best.fitness.best_fitness:
                best = child
                if cf == 0 and first_hit is None:
                    first_hit = generation
                    if params.stop_on_success:
                        done = True
                        break
        history.append(best.fitness.best_fitness)
        if observer:
            observer(generation, population)

    return RunResult(
        success=best.fitness.best_fitness == 0,
        best_fitness=best.fitness.best_fitness,
        best_individual=best,
        best_gene=best.fitness.best_gene,
        first_hit_generation=first_hit,
        evaluations=evaluations,
        seed=params.seed,
        generations_run=generation,
        history=history,
    )


# --------------------------------------------------------------------------
# batches


@dataclass
class RunRecord:
    run_id: int
    seed: int
    success: bool
    best_fitness: float
    first_hit_generation: int | None
    best_gene: int
    evaluations: int
    best_gene_gates: int | None
    shortest: Netlist | None
    chromosome: tuple = field(repr=False, default=())

    @property
    def gate_count(self) -> int | None:
        return None if self.shortest is None else gate_count(self.shortest)


@dataclass
class BatchStats:
    runs: int
    successes: int
    min_gates: int | None
    median_gates: float | None
    max_gates: int | None
    mean_first_hit: float | None
    records: list

    def summary(self) -> dict:
        return {
            "runs": self.runs,
            "successes": self.successes,
            "min_gates": self.min_gates,
            "median_gates": self.median_gates,
            "max_gates": self.max_gates,
            "mean_first_hit_generation": self.mean_first_hit,
        }


def _record(run_id: int, result: RunResult, target) -> RunRecord:
    shortest = best_gates = None
    table = getattr(target, "table", None)
    c = result.best_individual.chromosome
    if table is not None:
        n = getattr(table, "outputs", table).n
        best_gates = gate_count(extract_circuit(c, result.best_gene, n))
        if result.success:
            shortest = shortest_perfect_circuit(c, table)
    return RunRecord(run_id, result.seed, result.success, result.best_fitness,
                     result.first_hit_generation, result.best_gene, result.evaluations,
                     best_gates, shortest, c)


def _one_run(args) -> RunRecord:
    run_id, params, pset, target = args
    result = steady_state_run(params, pset, target)
    return _record(run_id, result, target)


def aggregate(records: Sequence[RunRecord]) -> BatchStats:
    records = sorted(records, key=lambda r: r.run_id)
    wins = [r for r in records if r.success]
    gates = [r.gate_count for r in wins if r.gate_count is not None]
    hits = [r.first_hit_generation for r in wins if r.first_hit_generation is not None]
    return BatchStats(
        runs=len(records),
        successes=len(wins),
        min_gates=min(gates) if gates else None,
        median_gates=statistics.median(gates) if gates else None,
        max_gates=max(gates) if gates else None,
        mean_first_hit=statistics.fmean(hits) if hits else None,
        records=records,
    )


def run_batch(params: EvolutionParams, pset: PrimitiveSet, target, n_runs: int,
              base_seed: int | None = None, workers: int = 1) -> BatchStats:
    """Independent runs seeded base_seed, base_seed + 1, ...; records sorted by run id."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if base_seed is None:
        base_seed = params.seed
    target = as_target(target)
    jobs = [(r, replace(params, seed=base_seed + r), pset, target) for r in range(n_runs)]
    if workers > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_one_run, jobs))
    else:
        records = [_one_run(job) for job in jobs]
    return aggregate(records)

