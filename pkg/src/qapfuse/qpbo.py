"""Roof duality (QPBO) for binary pairwise energies, via max-flow.

The energy is doubled into a submodular surrogate over one "copy" and one
"anti-copy" node per variable: submodular tables land on (copy, copy) and
(anti, anti), supermodular ones on the mixed pairs with one argument
complemented, which flips the submodularity defect's sign.  Each half gets
half the original cost, so the surrogate agrees with the energy whenever
anti = 1 - copy.  The surrogate is solved exactly by min-cut; its value is
a lower bound on the binary minimum (tight when everything is submodular),
and variables whose copy and anti-copy end up on opposite cut sides carry
persistent labels: some optimal labeling agrees with all of them at once.

Max-flow is a level-graph augmenting-path implementation with double
capacities; fusion subproblems are small, so sophisticated flow codes are
unnecessary here.  Arcs count as saturated below a 1e-12 residual.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

_EPS = 1e-12


class MaxFlow:
    """Residual network with paired forward/backward arcs (Dinic's
    level-graph scheme: repeated BFS layering plus DFS blocking flows)."""

    def __init__(self, num_nodes):
        self.head = [[] for _ in range(num_nodes)]
        self.to = []
        self.cap = []

    def add_arc(self, a, b, capacity):
        if capacity <= 0.0:
            return
        self.head[a].append(len(self.to))
        self.to.append(b)
        self.cap.append(float(capacity))
        self.head[b].append(len(self.to))
        self.to.append(a)
        self.cap.append(0.0)

    def _levels(self, source, sink):
        level = [-1] * len(self.head)
        level[source] = 0
        queue = deque([source])
        while queue:
            a = queue.popleft()
            for arc in self.head[a]:
                b = self.to[arc]
                if level[b] < 0 and self.cap[arc] > _EPS:
                    level[b] = level[a] + 1
                    queue.append(b)
        return level if level[sink] >= 0 else None

    def _augment(self, source, sink, level, cursor):
        # Iterative DFS in the level graph; returns one augmentation.
        path = []
        a = source
        while True:
            if a == sink:
                bottleneck = min(self.cap[arc] for arc in path)
                for arc in path:
                    self.cap[arc] -= bottleneck
                    self.cap[arc ^ 1] += bottleneck
                return bottleneck
            arcs = self.head[a]
            advanced = False
            while cursor[a] < len(arcs):
                arc = arcs[cursor[a]]
                b = self.to[arc]
                if self.cap[arc] > _EPS and level[b] == level[a] + 1:
                    path.append(arc)
                    a = b
                    advanced = True
                    break
                cursor[a] += 1
            if advanced:
                continue
            if not path:
                return 0.0
            # dead end: retreat and skip the arc that led here
            arc = path.pop()
            a = self.to[arc ^ 1]
            cursor[a] += 1

    def max_flow(self, source, sink):
        total = 0.0
        while True:
            level = self._levels(source, sink)
            if level is None:
                return total
            cursor = [0] * len(self.head)
            while True:
                pushed = self._augment(source, sink, level, cursor)
                if pushed <= 0.0:
                    break
                total += pushed

    def source_side(self, source):
        """Nodes reachable from the source in the residual network."""
        seen = [False] * len(self.head)
        seen[source] = True
        queue = deque([source])
        while queue:
            a = queue.popleft()
            for arc in self.head[a]:
                b = self.to[arc]
                if not seen[b] and self.cap[arc] > _EPS:
                    seen[b] = True
                    queue.append(b)
        return seen


@dataclass
class QpboResult:
    """Partial labeling with persistency.

    ``labels[i]`` is 0 or 1 for certified variables and -1 for unlabeled
    ones; ``flow_value`` is the roof-dual lower bound on the binary energy
    (including any constant passed in).
    """
    labels: np.ndarray
    flow_value: float

    @property
    def persistency_certified(self):
        return self.labels >= 0


class _Builder:
    """Collects halved energy terms as cut arcs; x = 1 means sink side.

    Unary weights and parallel arcs are accumulated first and materialized
    once, which keeps the flow network small.
    """

    def __init__(self, num_vars):
        self.num_nodes = 2 + 2 * num_vars
        self.constant = 0.0
        self.node_weight = [0.0] * self.num_nodes
        self.pair_arcs = {}

    def unary(self, node, when_zero, when_one):
        # cost(x) = when_zero + (when_one - when_zero) * x
        self.constant += when_zero
        self.node_weight[node] += when_one - when_zero

    def pairwise(self, node_a, node_b, t00, t01, t10, t11):
        # Standard decomposition; requires a submodular table.
        self.constant += t00
        self.unary(node_a, 0.0, t10 - t00)
        self.unary(node_b, 0.0, t11 - t10)
        defect = t01 + t10 - t00 - t11
        assert defect >= -1e-9, "pairwise table routed to the wrong copy pair"
        if defect > 0.0:
            key = (node_a, node_b)
            self.pair_arcs[key] = self.pair_arcs.get(key, 0.0) + defect

    def build_graph(self):
        graph = MaxFlow(self.num_nodes)
        for node, w in enumerate(self.node_weight):
            if w >= 0.0:
                graph.add_arc(0, node, w)
            else:
                self.constant += w
                graph.add_arc(node, 1, -w)
        for (a, b), capacity in self.pair_arcs.items():
            graph.add_arc(a, b, capacity)
        return graph


def roof_duality(num_vars, unary, pairwise, constant=0.0):
    """Solve the roof-dual relaxation of a binary pairwise energy.

    ``unary`` is an array of shape (num_vars, 2); ``pairwise`` maps
    ``(i, j)`` with i < j to a 2x2 cost table; ``constant`` is added to the
    reported bound.  Returns a :class:`QpboResult`.
    """
    unary = np.asarray(unary, dtype=np.float64)
    build = _Builder(num_vars)
    build.constant += constant

    def copy_node(i):
        return 2 + 2 * i

    def anti_node(i):
        return 3 + 2 * i

    for i in range(num_vars):
        c0, c1 = unary[i] / 2.0
        build.unary(copy_node(i), c0, c1)
        build.unary(anti_node(i), c1, c0)

    for (i, j), table in pairwise.items():
        t00, t01, t10, t11 = (float(table[0, 0]) / 2.0, float(table[0, 1]) / 2.0,
                              float(table[1, 0]) / 2.0, float(table[1, 1]) / 2.0)
        if t01 + t10 - t00 - t11 >= 0.0:
            # Submodular: straight copy and fully complemented anti-copy.
            build.pairwise(copy_node(i), copy_node(j), t00, t01, t10, t11)
            build.pairwise(anti_node(i), anti_node(j), t11, t10, t01, t00)
        else:
            # Supermodular: complement one side on each half.
            build.pairwise(copy_node(i), anti_node(j), t01, t00, t11, t10)
            build.pairwise(anti_node(i), copy_node(j), t10, t11, t00, t01)

    graph = build.build_graph()
    flow = graph.max_flow(0, 1)
    reachable = graph.source_side(0)

    labels = np.full(num_vars, -1, dtype=np.int64)
    for i in range(num_vars):
        from_copy = 0 if reachable[copy_node(i)] else 1
        from_anti = 1 if reachable[anti_node(i)] else 0
        if from_copy == from_anti:
            labels[i] = from_copy
    return QpboResult(labels=labels, flow_value=build.constant + flow)
