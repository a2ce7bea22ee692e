"""Build a small graph-matching instance by hand and evaluate assignments.

Three feature points on the left must be matched to three candidate points
on the right.  Each node may also stay unmatched (the dummy label, -1).
Feasibility means no right point is used twice.
"""

import numpy as np

import qapfuse as qf

# Node u's candidate labels, its unary costs (one per candidate, dummy last),
# and pairwise cost tables per edge (dummy row/column last).
candidates = [[0, 1], [0, 1, 2], [2]]
unary = [
    np.array([-2.0, 0.5, 0.0]),        # node 0: label 0 looks good
    np.array([1.0, -1.5, 0.3, 0.0]),   # node 1: label 1 looks good
    np.array([-1.0, 0.0]),             # node 2: only label 2 possible
]
pairwise = {
    (0, 1): np.array([[ 0.0, -1.0, 0.0, 0.0],
                      [ 0.5,  0.0, 0.0, 0.0],
                      [ 0.0,  0.0, 0.0, 0.0]]),
    (1, 2): np.zeros((4, 2)),
}
problem = qf.Problem(3, 3, candidates, unary, pairwise)
print(problem)

x = np.array([0, 1, 2])
print("assignment", x, "energy:", qf.energy(problem, x),
      "feasible:", qf.is_feasible(problem, x))

clash = np.array([0, 0, 2])
print("assignment", clash, "energy:", qf.energy(problem, clash),
      "feasible:", qf.is_feasible(problem, clash))

print("all-dummy energy:", qf.energy(problem, qf.all_dummy(problem)))

# A reparametrization moves cost between the matching side, the edges and
# the assignment side without changing any total energy.
repar = qf.Reparametrization(problem)
repar.set_label_msg(0, np.array([3.0, -1.0]))
repar.set_edge_msg(0, 1, np.array([0.5, 0.5, 0.5]))
decomposed = 0.0
for u in range(problem.num_nodes):
    decomposed += qf.reparametrized_unary(problem, repar, u, int(x[u]))
    decomposed += qf.lap_unary(problem, repar, u, int(x[u]))
for u, v in problem.edges:
    decomposed += qf.reparametrized_pairwise(problem, repar, u, v, int(x[u]), int(x[v]))
print("decomposed total:", decomposed, "(equals the plain energy)")
