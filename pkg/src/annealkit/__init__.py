"""annealkit: quantum-annealing simulation and scaling-analysis toolkit."""

__version__ = "0.1.0"
