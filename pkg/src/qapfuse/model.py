"""Graph-matching (quadratic assignment) problem model.

An instance is an undirected graph whose nodes pick labels from per-node
candidate sets drawn from a global label pool.  Every node may instead take
the distinguished dummy label (sentinel ``DUMMY``), meaning "unassigned".
Costs are real-valued: one unary cost per node and candidate (plus dummy),
one dense pairwise table per edge over both endpoints' candidates (plus
dummy).  An assignment is *feasible* when no non-dummy label is used by two
distinct nodes; the dummy may repeat freely.

Assignments are plain integer numpy arrays of length ``num_nodes`` holding
global label ids, with ``DUMMY`` (= -1) for the dummy.

:class:`Reparametrization` holds the dual variables: per-edge message
vectors in both directions (shifting cost between node unaries and edge
tables) and per-node label messages (shifting cost between the matching
side and the linear-assignment side).  Every assignment's total energy is
invariant under them; see :func:`reparametrized_unary`,
:func:`reparametrized_pairwise` and :func:`lap_unary`.

All costs are doubles.  Cost magnitudes are assumed to stay comfortably
inside double range; overflow behaviour is undefined.
"""

import numpy as np

DUMMY = -1


class Problem:
    """Immutable quadratic-assignment instance.

    Parameters
    ----------
    num_nodes, num_labels:
        Sizes of the node set and the global label pool.
    candidate_labels:
        Per node, a strictly increasing sequence of global label ids.
    unary:
        Per node, a cost vector of length ``len(candidate_labels[u]) + 1``;
        the trailing entry is the dummy cost.
    pairwise:
        Mapping ``(u, v) -> table`` with ``u < v`` and table shape
        ``(k_u + 1, k_v + 1)``; dummy row/column last.  Missing edges simply
        have no table.

    The instance is safe to share across threads after construction.
    """

    def __init__(self, num_nodes, num_labels, candidate_labels, unary, pairwise=None):
        if num_nodes < 0 or num_labels < 0:
            raise ValueError("negative sizes")
        if len(candidate_labels) != num_nodes or len(unary) != num_nodes:
            raise ValueError("candidate_labels/unary must have one entry per node")

        self.num_nodes = int(num_nodes)
        self.num_labels = int(num_labels)

        self.candidate_labels = []
        self.unary = []
        self._label_pos = []
        for u in range(num_nodes):
            cand = np.asarray(candidate_labels[u], dtype=np.int64)
            if cand.size and (cand.min() < 0 or cand.max() >= num_labels):
                raise ValueError(f"node {u}: candidate label out of range")
            if cand.size and not np.all(np.diff(cand) > 0):
                raise ValueError(f"node {u}: candidate labels must be strictly increasing")
            costs = np.asarray(unary[u], dtype=np.float64).copy()
            if costs.shape != (cand.size + 1,):
                raise ValueError(f"node {u}: unary vector must have {cand.size + 1} entries (dummy last)")
            if not np.all(np.isfinite(costs)):
                raise ValueError(f"node {u}: non-finite unary cost")
            self.candidate_labels.append(cand)
            self.unary.append(costs)
            self._label_pos.append({int(s): i for i, s in enumerate(cand)})

        self.pairwise = {}
        for (u, v), table in sorted((pairwise or {}).items()):
            if not (0 <= u < v < num_nodes):
                raise ValueError(f"bad edge ({u}, {v}): need 0 <= u < v < num_nodes")
            if (u, v) in self.pairwise:
                raise ValueError(f"duplicate edge ({u}, {v})")
            t = np.asarray(table, dtype=np.float64).copy()
            want = (self.num_candidates(u) + 1, self.num_candidates(v) + 1)
            if t.shape != want:
                raise ValueError(f"edge ({u}, {v}): table shape {t.shape}, expected {want}")
            if not np.all(np.isfinite(t)):
                raise ValueError(f"edge ({u}, {v}): non-finite pairwise cost")
            self.pairwise[(u, v)] = t
        self.edges = sorted(self.pairwise)

        self.neighbors = [[] for _ in range(num_nodes)]
        for u, v in self.edges:
            self.neighbors[u].append(v)
            self.neighbors[v].append(u)
        for lst in self.neighbors:
            lst.sort()

        # label_owners[s] = [(node, local index), ...] for every node whose
        # candidate set contains the global label s.
        self.label_owners = {}
        for u, cand in enumerate(self.candidate_labels):
            for i, s in enumerate(cand):
                self.label_owners.setdefault(int(s), []).append((u, i))

        self._big_cost = None

    def num_candidates(self, u):
        return self.candidate_labels[u].size

    def dummy_index(self, u):
        """Row/column index of the dummy in node u's cost vectors."""
        return self.candidate_labels[u].size

    def local_index(self, u, s):
        """Map a global label (or DUMMY) to node u's local index."""
        if s == DUMMY:
            return self.candidate_labels[u].size
        try:
            return self._label_pos[u][int(s)]
        except KeyError:
            raise ValueError(f"label {s} is not a candidate of node {u}") from None

    def owners(self, s):
        return self.label_owners.get(int(s), [])

    def pairwise_table(self, u, v):
        """Cost table oriented as (u-labels, v-labels) for edge {u, v}."""
        if u < v:
            return self.pairwise[(u, v)]
        return self.pairwise[(v, u)].T

    @property
    def uniqueness_big_cost(self):
        """Penalty larger than any possible energy difference.

        1 + the sum of all cost magnitudes: since two assignments select
        disjoint-or-shared table entries, their energy difference is bounded
        by that sum, so one active penalty always dominates.
        """
        if self._big_cost is None:
            total = sum(float(np.abs(c).sum()) for c in self.unary)
            total += sum(float(np.abs(t).sum()) for t in self.pairwise.values())
            self._big_cost = 1.0 + total
        return self._big_cost

    def __repr__(self):
        return (f"Problem(num_nodes={self.num_nodes}, num_labels={self.num_labels}, "
                f"num_edges={len(self.edges)})")


def all_dummy(problem):
    """The all-dummy assignment (always feasible)."""
    return np.full(problem.num_nodes, DUMMY, dtype=np.int64)


def validate_assignment(problem, x):
    """Raise ValueError unless x is a domain-valid assignment array."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (problem.num_nodes,):
        raise ValueError(f"assignment must have {problem.num_nodes} entries")
    for u, s in enumerate(x):
        if s != DUMMY and int(s) not in problem._label_pos[u]:
            raise ValueError(f"node {u}: label {s} not in its candidate set")
    return x


def energy(problem, x):
    """Total cost of an assignment: unary sum plus pairwise sum.

    Feasibility is not required; only domain validity is checked.
    """
    x = validate_assignment(problem, x)
    total = 0.0
    for u in range(problem.num_nodes):
        total += problem.unary[u][problem.local_index(u, x[u])]
    for (u, v), table in problem.pairwise.items():
        total += table[problem.local_index(u, x[u]), problem.local_index(v, x[v])]
    return float(total)


def is_feasible(problem, x):
    """True iff no non-dummy label is used by two distinct nodes."""
    x = validate_assignment(problem, x)
    seen = set()
    for s in x:
        if s == DUMMY:
            continue
        if int(s) in seen:
            return False
        seen.add(int(s))
    return True


class Reparametrization:
    """Dual variables over a Problem; total energy of any assignment is
    invariant under them.

    edge_msg[(u, v)]:
        one vector per ordered edge direction, length k_u + 1 (dummy last);
        both directions exist for every edge.
    label_msg[u]:
        vector of length k_u + 1; the dummy entry is pinned to half the
        node's dummy cost, so the assignment-side dummy cost is always 0.

    Mutate through :meth:`set_edge_msg` / :meth:`set_label_msg` (or the dual
    update routines) so the cached per-node message sums stay consistent.
    A Reparametrization is an independently owned mutable value; it is not
    internally synchronized.
    """

    def __init__(self, problem):
        self.problem = problem
        self.edge_msg = {}
        for u, v in problem.edges:
            self.edge_msg[(u, v)] = np.zeros(problem.num_candidates(u) + 1)
            self.edge_msg[(v, u)] = np.zeros(problem.num_candidates(v) + 1)
        self.label_msg = []
        for u in range(problem.num_nodes):
            msg = np.zeros(problem.num_candidates(u) + 1)
            msg[-1] = problem.unary[u][-1] / 2.0
            self.label_msg.append(msg)
        # Cached sum of outgoing edge messages per node.
        self._msg_sum = [np.zeros(problem.num_candidates(u) + 1)
                         for u in range(problem.num_nodes)]

    def copy(self):
        dup = Reparametrization.__new__(Reparametrization)
        dup.problem = self.problem
        dup.edge_msg = {k: v.copy() for k, v in self.edge_msg.items()}
        dup.label_msg = [v.copy() for v in self.label_msg]
        dup._msg_sum = [v.copy() for v in self._msg_sum]
        return dup

    def msg_sum(self, u):
        return self._msg_sum[u]

    def set_edge_msg(self, u, v, values):
        values = np.asarray(values, dtype=np.float64)
        old = self.edge_msg[(u, v)]
        if values.shape != old.shape:
            raise ValueError("edge message has wrong length")
        self._msg_sum[u] += values - old
        self.edge_msg[(u, v)] = values.copy()

    def set_label_msg(self, u, values):
        """Set the real-label entries of node u's label message (dummy pinned)."""
        values = np.asarray(values, dtype=np.float64)
        k = self.problem.num_candidates(u)
        if values.shape != (k,):
            raise ValueError("label message must cover the real candidates only")
        self.label_msg[u][:k] = values


def reparametrized_unary_vector(problem, repar, u):
    """Matching-side unary view at node u: theta/2 + label message - edge messages."""
    return problem.unary[u] / 2.0 + repar.label_msg[u] - repar.msg_sum(u)


def reparametrized_pairwise_table(problem, repar, u, v):
    """Edge table plus both incoming edge messages, oriented (u-labels, v-labels)."""
    table = problem.pairwise_table(u, v)
    return table + repar.edge_msg[(u, v)][:, None] + repar.edge_msg[(v, u)][None, :]


def lap_unary_vector(problem, repar, u):
    """Assignment-side unary view at node u: theta/2 - label message.

    The dummy entry is identically zero because the dummy label message is
    pinned to half the dummy cost.
    """
    return problem.unary[u] / 2.0 - repar.label_msg[u]


def reparametrized_unary(problem, repar, u, s):
    return float(reparametrized_unary_vector(problem, repar, u)[problem.local_index(u, s)])


def reparametrized_pairwise(problem, repar, u, v, s, t):
    table = reparametrized_pairwise_table(problem, repar, u, v)
    return float(table[problem.local_index(u, s), problem.local_index(v, t)])


def lap_unary(problem, repar, u, s):
    return float(lap_unary_vector(problem, repar, u)[problem.local_index(u, s)])
