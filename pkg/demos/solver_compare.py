"""Sparse LU and temporal diagonalization give the same slab solutions.

Timings are for the whole march and include factorization.
"""
import time

import numpy as np

from eset.convergence import ManufacturedProblem
from eset.marching import march

problem = ManufacturedProblem(eps=0.08, M=128, T=1.2)
finals = {}
for solver in ("sparse", "diagonalized"):
    spec = problem.spec(N=4, scheme="picard", picard_iters=2, solver=solver)
    start = time.perf_counter()
    slab, _ = march(problem.initial(), spec, problem.space, [(0.01, 120)])
    finals[solver] = slab.end_state()
    print(f"{solver:>12}: {time.perf_counter() - start:.2f}s, L2 error {problem.error(slab.end_state())[0]:.3e}")
a, b = finals["sparse"], finals["diagonalized"]
print(f"relative difference {np.linalg.norm(a - b) / np.linalg.norm(a):.2e}")
