"""Multi Expression Programming for evolving gate-level circuits.

Modules:

* ``genome``    genes, chromosomes, primitive sets, random construction
* ``evaluate``  bit-parallel single-pass evaluation and fitness
* ``knapsack``  subset-sum oracle, truth tables and their file format
* ``engine``    steady-state evolution and seeded batches
* ``circuit``   netlist extraction, gate counting, verification, DOT export
* ``cli``       command-line experiment harness
"""

from .circuit import Netlist, extract_circuit, gate_count, shortest_perfect_circuit, verify
from .engine import BatchStats, EvolutionParams, RunResult, run_batch, steady_state_run
from .evaluate import (FitnessReport, RegressionCase, TruthVector, evaluate_boolean,
                       fitness_boolean, fitness_regression)
from .genome import Function, PrimitiveSet, Terminal, gate_set, random_chromosome, validate
from .knapsack import KnapsackInstance, TruthTable, generate_truth_table, subset_sum_oracle

__version__ = "0.1.0"
