"""Shared test utilities: random instance generators and independent
oracles (exhaustive enumeration, re-summation, pairwise scans).

The oracles deliberately re-walk the raw problem data with plain Python
loops so they share no code path with the library routines they check.
"""

import itertools

import numpy as np

from qapfuse import DUMMY, Problem, Reparametrization


def random_problem(rng, max_nodes=5, max_labels=4, cost_range=9,
                   edge_prob=0.6, min_nodes=1, integer=True, dummy_cost=None):
    """Random instance: each node gets a random candidate subset of a
    global label pool, integer (or uniform) costs in [-cost_range, cost_range]."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    num_labels = int(rng.integers(1, max_labels + 1))

    def cost(size=None):
        if integer:
            return rng.integers(-cost_range, cost_range + 1, size=size).astype(float)
        return rng.uniform(-cost_range, cost_range, size=size)

    candidates = []
    unary = []
    for u in range(n):
        k = int(rng.integers(0, num_labels + 1))
        cand = sorted(rng.choice(num_labels, size=k, replace=False).tolist()) if k else []
        candidates.append(cand)
        vec = cost(size=k + 1)
        if dummy_cost is not None:
            vec[-1] = dummy_cost
        unary.append(vec)

    pairwise = {}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                pairwise[(u, v)] = cost(size=(len(candidates[u]) + 1,
                                              len(candidates[v]) + 1))
    return Problem(n, num_labels, candidates, unary, pairwise)


def random_assignment(problem, rng):
    """Domain-valid assignment, not necessarily feasible."""
    x = np.empty(problem.num_nodes, dtype=np.int64)
    for u in range(problem.num_nodes):
        options = [DUMMY] + [int(s) for s in problem.candidate_labels[u]]
        x[u] = options[int(rng.integers(len(options)))]
    return x


def random_feasible_assignment(problem, rng):
    """Feasible assignment: random order, random unused label or dummy."""
    x = np.full(problem.num_nodes, DUMMY, dtype=np.int64)
    used = set()
    for u in rng.permutation(problem.num_nodes):
        options = [DUMMY] + [int(s) for s in problem.candidate_labels[u]
                             if int(s) not in used]
        pick = options[int(rng.integers(len(options)))]
        x[u] = pick
        if pick != DUMMY:
            used.add(pick)
    return x


def random_reparametrization(problem, rng, scale=3.0):
    repar = Reparametrization(problem)
    for u, v in problem.edges:
        repar.set_edge_msg(u, v, rng.uniform(-scale, scale, problem.num_candidates(u) + 1))
        repar.set_edge_msg(v, u, rng.uniform(-scale, scale, problem.num_candidates(v) + 1))
    for u in range(problem.num_nodes):
        k = problem.num_candidates(u)
        if k:
            repar.set_label_msg(u, rng.uniform(-scale, scale, k))
    return repar


def energy_by_resummation(problem, x):
    """Independent energy oracle: plain-loop walk over all cost terms."""
    total = 0.0
    for u in range(problem.num_nodes):
        cand = [int(s) for s in problem.candidate_labels[u]]
        idx = len(cand) if x[u] == DUMMY else cand.index(int(x[u]))
        total += float(problem.unary[u][idx])
    for (u, v), table in problem.pairwise.items():
        cu = [int(s) for s in problem.candidate_labels[u]]
        cv = [int(s) for s in problem.candidate_labels[v]]
        iu = len(cu) if x[u] == DUMMY else cu.index(int(x[u]))
        iv = len(cv) if x[v] == DUMMY else cv.index(int(x[v]))
        total += float(table[iu, iv])
    return total


def feasible_by_pairwise_scan(x):
    """O(n^2) feasibility oracle."""
    n = len(x)
    for u in range(n):
        for v in range(u + 1, n):
            if x[u] == x[v] != DUMMY:
                return False
    return True


def enumerate_assignments(problem):
    """All domain-valid assignments (feasible or not)."""
    domains = [[DUMMY] + [int(s) for s in problem.candidate_labels[u]]
               for u in range(problem.num_nodes)]
    for combo in itertools.product(*domains):
        yield np.array(combo, dtype=np.int64)


def enumerate_feasible(problem):
    """All feasible assignments, by pruned recursion over nodes."""
    n = problem.num_nodes
    x = np.full(n, DUMMY, dtype=np.int64)

    def rec(u, used):
        if u == n:
            yield x.copy()
            return
        x[u] = DUMMY
        yield from rec(u + 1, used)
        for s in problem.candidate_labels[u]:
            s = int(s)
            if s not in used:
                x[u] = s
                used.add(s)
                yield from rec(u + 1, used)
                used.discard(s)
                x[u] = DUMMY

    yield from rec(0, set())


def brute_force_optimum(problem):
    """(optimal energy, one optimal assignment) by feasible enumeration."""
    best_value, best = np.inf, None
    for x in enumerate_feasible(problem):
        value = energy_by_resummation(problem, x)
        if value < best_value:
            best_value, best = value, x
    return best_value, best


def lap_optimum_by_enumeration(instance):
    """Exact LAP optimum over all partial injections (recursion, <= 7 nodes)."""
    n = instance.num_nodes

    def rec(u, used):
        if u == n:
            return 0.0
        best = rec(u + 1, used)  # dummy
        for i, s in enumerate(instance.candidate_labels[u]):
            s = int(s)
            if s not in used:
                used.add(s)
                best = min(best, float(instance.costs[u][i]) + rec(u + 1, used))
                used.discard(s)
        return best

    return rec(0, set())


def restricted_space_optimum(problem, x1, x2):
    """(optimal energy, count of feasible solutions) of the fusion search
    space {x1_u, x2_u} per node, by direct enumeration."""
    free = [u for u in range(problem.num_nodes) if x1[u] != x2[u]]
    best, count = np.inf, 0
    x = np.asarray(x1, dtype=np.int64).copy()
    for code in range(2 ** len(free)):
        for pos, u in enumerate(free):
            x[u] = x2[u] if (code >> pos) & 1 else x1[u]
        if feasible_by_pairwise_scan(x):
            count += 1
            best = min(best, energy_by_resummation(problem, x))
    return best, count


def restricted_space_optimum_pruned(problem, x1, x2):
    """Same contract as restricted_space_optimum but via depth-first
    recursion with used-label pruning and incremental energy, viable up to
    ~16 free nodes.  Still independent of the fusion machinery.

    Nodes are placed one at a time; each placement pays its unary cost plus
    edges to already-placed nodes, so every term is counted exactly once.
    """
    n = problem.num_nodes
    free = [u for u in range(n) if x1[u] != x2[u]]
    x = np.asarray(x1, dtype=np.int64).copy()
    cand = [[int(s) for s in problem.candidate_labels[u]] for u in range(n)]
    placed = set()

    def local(u):
        return len(cand[u]) if x[u] == DUMMY else cand[u].index(int(x[u]))

    def place_cost(u):
        total = float(problem.unary[u][local(u)])
        for v in problem.neighbors[u]:
            if v in placed:
                total += float(problem.pairwise_table(u, v)[local(u), local(v)])
        return total

    used = set()
    base = 0.0
    for u in range(n):
        if x1[u] == x2[u]:
            base += place_cost(u)
            placed.add(u)
            if x1[u] != DUMMY:
                used.add(int(x1[u]))

    best = [np.inf]
    count = [0]

    def rec(pos, acc):
        if pos == len(free):
            count[0] += 1
            best[0] = min(best[0], acc)
            return
        u = free[pos]
        for s in (int(x1[u]), int(x2[u])):
            if s != DUMMY and s in used:
                continue
            x[u] = s
            cost = place_cost(u)
            placed.add(u)
            if s != DUMMY:
                used.add(s)
            rec(pos + 1, acc + cost)
            if s != DUMMY:
                used.discard(s)
            placed.discard(u)

    rec(0, base)
    return best[0], count[0]


def enumerate_binary_energies(num_vars, unary, tables, constant=0.0):
    """All 2^k energies of a binary pairwise problem, as a dict bits->value."""
    energies = {}
    for code in range(2 ** num_vars):
        bits = tuple((code >> i) & 1 for i in range(num_vars))
        value = constant
        for i in range(num_vars):
            value += float(unary[i][bits[i]])
        for (i, j), table in tables.items():
            value += float(table[bits[i], bits[j]])
        energies[bits] = value
    return energies


def geometric_matching_instance(seed, n=12, noise=0.05, outliers=2):
    """Keypoint-matching style instance: two 2D point clouds related by a
    rigid motion plus noise, pairwise costs rewarding distance-preserving
    pairs, a few outlier labels, and expensive dummies.  Returns the
    problem and the planted matching."""
    rng = np.random.default_rng(seed)
    left = rng.uniform(0, 10, (n, 2))
    angle = rng.uniform(0, 2 * np.pi)
    rot = np.array([[np.cos(angle), -np.sin(angle)],
                    [np.sin(angle), np.cos(angle)]])
    right = left @ rot.T + rng.uniform(2, 4, 2) + rng.normal(0, noise, (n, 2))
    right = np.vstack([right, rng.uniform(-5, 15, (outliers, 2))])
    perm = rng.permutation(n + outliers)
    right = right[perm]
    planted = np.argsort(perm)[:n].astype(np.int64)

    num_labels = n + outliers
    candidates = [list(range(num_labels))] * n
    unary = [np.append(np.zeros(num_labels), 50.0) for _ in range(n)]
    pairwise = {}
    for u in range(n):
        for v in range(u + 1, n):
            du = np.linalg.norm(left[u] - left[v])
            ds = np.linalg.norm(right[:, None, :] - right[None, :, :], axis=2)
            table = np.zeros((num_labels + 1, num_labels + 1))
            table[:num_labels, :num_labels] = np.minimum(np.abs(du - ds), 5.0) - 2.0
            np.fill_diagonal(table[:num_labels, :num_labels], 0.0)
            pairwise[(u, v)] = table
    return Problem(n, num_labels, candidates, unary, pairwise), planted


def random_dd_text(rng, max_left=4, max_right=5):
    """Random well-formed .dd file text plus its expected structure."""
    n_left = int(rng.integers(1, max_left + 1))
    n_right = int(rng.integers(1, max_right + 1))
    pairs = [(u, s) for u in range(n_left) for s in range(n_right)]
    rng.shuffle(pairs)
    n_assign = int(rng.integers(1, len(pairs) + 1))
    chosen = pairs[:n_assign]
    lines = []
    for aid, (u, s) in enumerate(chosen):
        cost = round(float(rng.uniform(-10, 10)), 3)
        lines.append(f"a {aid} {u} {s} {cost}")
    edges = []
    for i in range(n_assign):
        for j in range(i + 1, n_assign):
            if chosen[i][0] != chosen[j][0] and rng.random() < 0.4:
                cost = round(float(rng.uniform(-10, 10)), 3)
                edges.append(f"e {i} {j} {cost}")
    header = f"p {n_left} {n_right} {n_assign} {len(edges)}"
    body = [header] + lines + edges
    if rng.random() < 0.5:
        body.insert(0, "c generated test instance")
    return "\n".join(body) + "\n"
