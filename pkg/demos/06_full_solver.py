"""The full pipeline on a random instance: dual ascent + greedy proposals
+ fusion, with a convergence trace you can plot.

The incumbent energy only moves down, the bound only up; the run stops as
soon as the two meet (proved optimum) or the batch budget runs out.
"""

import io

import numpy as np

import qapfuse as qf

rng = np.random.default_rng(42)
n, L = 12, 12
candidates = [list(range(L)) for _ in range(n)]
unary = [np.append(rng.uniform(-5, 5, L), 0.0) for _ in range(n)]
pairwise = {(u, v): rng.uniform(-2, 2, (L + 1, L + 1))
            for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35}
problem = qf.Problem(n, L, candidates, unary, pairwise)
print(problem)

config = qf.SolverConfig(max_batches=200, batch_size=1, greedy_generations=2, seed=0)
outcome = qf.solve(problem, config)

print(f"best energy:   {outcome.best_energy:.4f}")
print(f"dual bound:    {outcome.final_dual_bound:.4f}")
print(f"gap:           {outcome.gap:.2e}")
print(f"proved optimal: {outcome.proved_optimal}")
print(f"assignment:    {outcome.best}")

# The trace is CSV, ready for any plotting tool.
buffer = io.StringIO()
qf.write_trace(outcome.trace, buffer)
lines = buffer.getvalue().splitlines()
print(f"\ntrace: {len(lines) - 1} records; first and last few:")
for line in lines[:4] + ["..."] + lines[-3:]:
    print(" ", line)

improvements = [r for r in outcome.trace if r.event == "improved"]
print(f"\nincumbent improved {len(improvements)} times:")
for r in improvements[:8]:
    print(f"  sweep {r.iteration:3d}: energy {r.best_energy:9.4f}"
          f"  (bound {r.dual_bound:9.4f})")
