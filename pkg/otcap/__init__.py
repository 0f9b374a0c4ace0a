"""
Capacity- and sparsity-constrained optimal transport.

A solver library and benchmark CLI for discrete optimal transport with:
- Classic Kantorovich solves and p-Wasserstein distances
- Time-parameterized transport under per-step capacity matrices, including
  the uniform-plan reformulation for constant costs and capacities
- Per-source sparsity (l0) budgets via importance-score heuristic search,
  an exhaustive oracle and a random baseline
- A built-in bounded-variable simplex engine behind a pluggable LP backend
"""

__version__ = "0.1.0"
