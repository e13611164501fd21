"""
rkld-wf: phase retrieval by Wirtinger flow on the reverse Kullback-Leibler divergence.

Subpackages:
    core        errors, seeded streams, phase-invariant distance, eigensolver
    models      measurement operators, problem generation, loss landscapes
    init        spectral initialization (classical and RKLD weights)
    losses      loss values and Wirtinger gradients
    truncation  per-iteration robust index masks
    solver      gradient-descent driver and presets
    metrics     ARE, success probability, SNR, correlation
    harness     seeded Monte-Carlo experiments
    cli_io      command line, configuration documents, file formats
"""

__version__ = "0.1.0"

from .models import ProblemInstance, generate_problem
from .solver import SolverConfig, SolverResult, preset, run

__all__ = [
    "__version__",
    "ProblemInstance",
    "generate_problem",
    "SolverConfig",
    "SolverResult",
    "preset",
    "run",
]
