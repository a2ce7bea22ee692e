import io

import numpy as np
import pytest

import qapfuse as qf
from helpers import (
    brute_force_optimum,
    geometric_matching_instance,
    random_assignment,
    random_feasible_assignment,
    random_problem,
)


class TestSolve:
    def test_single_node_proved_optimal(self):
        p = qf.Problem(1, 1, [[0]], [np.array([-1.0, 0.0])])
        outcome = qf.solve(p, qf.SolverConfig(max_batches=3))
        assert outcome.proved_optimal
        assert outcome.best_energy == -1.0
        assert np.array_equal(outcome.best, [0])

    def test_regression_bar_and_sandwich(self):
        # 100 seeds of 4-node/4-label instances, exact fusion, 50 batches:
        # the optimum must be found in at least 95 runs and the
        # bound/energy sandwich must hold at every trace record.
        rng = np.random.default_rng(5)
        hits = 0
        for seed in range(100):
            p = random_problem(rng, max_nodes=4, max_labels=4, min_nodes=4)
            opt, _ = brute_force_optimum(p)
            cfg = qf.SolverConfig(max_batches=50, seed=seed, fusion_mode="exact")
            outcome = qf.solve(p, cfg)
            tol = 1e-9 * max(1.0, abs(opt))
            if outcome.best_energy <= opt + tol:
                hits += 1
            assert outcome.best_energy >= opt - tol
            assert outcome.final_dual_bound <= opt + 1e-6
            for record in outcome.trace:
                assert record.dual_bound - 1e-6 <= opt
                if record.best_energy is not None:
                    assert record.best_energy >= opt - tol
        assert hits >= 95

    def test_monotone_trace(self):
        rng = np.random.default_rng(11)
        for seed in range(10):
            p = random_problem(rng, max_nodes=5)
            outcome = qf.solve(p, qf.SolverConfig(max_batches=10, seed=seed))
            bounds = [r.dual_bound for r in outcome.trace]
            energies = [r.best_energy for r in outcome.trace
                        if r.best_energy is not None]
            times = [r.elapsed_seconds for r in outcome.trace]
            assert all(b2 >= b1 - 1e-7 for b1, b2 in zip(bounds, bounds[1:]))
            assert all(e2 <= e1 + 1e-9 for e1, e2 in zip(energies, energies[1:]))
            assert all(t2 >= t1 for t1, t2 in zip(times, times[1:]))
            assert outcome.final_dual_bound <= outcome.best_energy + 1e-6
            assert qf.is_feasible(p, outcome.best)

    def test_identical_runs_identical_traces(self):
        rng = np.random.default_rng(12)
        p = random_problem(rng, max_nodes=5, min_nodes=4)
        cfg = qf.SolverConfig(max_batches=8, seed=3)
        first = qf.solve(p, cfg)
        second = qf.solve(p, cfg)
        buf1, buf2 = io.StringIO(), io.StringIO()
        qf.write_trace(first.trace, buf1)
        qf.write_trace(second.trace, buf2)
        assert buf1.getvalue() == buf2.getvalue()

    def test_lap_primal_heuristic(self):
        rng = np.random.default_rng(13)
        p = random_problem(rng, max_nodes=5, min_nodes=4)
        cfg = qf.SolverConfig(max_batches=10, primal_heuristic="lap",
                              fusion_mode="exact")
        outcome = qf.solve(p, cfg)
        assert qf.is_feasible(p, outcome.best)
        assert any(r.event == "lap" for r in outcome.trace)
        opt, _ = brute_force_optimum(p)
        assert outcome.final_dual_bound <= opt + 1e-6

    def test_time_budget_stops_early(self):
        rng = np.random.default_rng(14)
        p = random_problem(rng, max_nodes=5, min_nodes=5, edge_prob=1.0)
        cfg = qf.SolverConfig(max_batches=10**9, time_budget_seconds=0.05)
        outcome = qf.solve(p, cfg)  # must return promptly
        assert outcome.trace

    @pytest.mark.parametrize("field,value", [
        ("max_batches", 0), ("batch_size", 0), ("greedy_generations", -1),
        ("fusion_mode", "ilp"), ("primal_heuristic", "bp"),
        ("time_budget_seconds", 0.0),
    ])
    def test_config_validation(self, field, value):
        cfg = qf.SolverConfig(**{field: value})
        with pytest.raises(ValueError):
            cfg.validate()

    def test_geometric_matching_recovers_planted_solution(self):
        # Wide-baseline-style instances: the solver must match or beat the
        # planted matching's energy and certify optimality via the bound.
        for seed in range(3):
            problem, planted = geometric_matching_instance(seed)
            planted_energy = qf.energy(problem, planted)
            outcome = qf.solve(problem, qf.SolverConfig(max_batches=400, seed=seed))
            assert outcome.best_energy <= planted_energy + 1e-9
            assert outcome.proved_optimal
            assert np.array_equal(outcome.best, planted)

    def test_planted_optimum_through_dd_pipeline(self):
        # 20-point instance with a dominant diagonal written in .dd form:
        # the planted matching is provably optimal (any deviation forfeits
        # far more than the noise can repay), and the solver must find and
        # certify exactly that energy.
        rng = np.random.default_rng(123)
        n = 20
        header = []
        pair_lines = []
        ids = {}
        planted = 0.0
        aid = 0
        for u in range(n):
            for s in range(n):
                cost = -100.0 if u == s else float(np.round(rng.uniform(-1, 1), 3))
                if u == s:
                    planted += cost
                header.append(f"a {aid} {u} {s} {cost}")
                ids[(u, s)] = aid
                aid += 1
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < 0.3:
                    c = float(np.round(rng.uniform(-0.5, 0.0), 3))
                    pair_lines.append(f"e {ids[(u, u)]} {ids[(v, v)]} {c}")
                    planted += c
        text = "\n".join([f"p {n} {n} {n * n} {len(pair_lines)}"]
                         + header + pair_lines) + "\n"
        problem = qf.to_problem(qf.parse_dd(text))
        assert qf.energy(problem, np.arange(n, dtype=np.int64)) == pytest.approx(planted)
        outcome = qf.solve(problem, qf.SolverConfig(max_batches=50, seed=0))
        assert outcome.best_energy == pytest.approx(planted, abs=1e-9)
        assert outcome.proved_optimal
        assert np.array_equal(outcome.best, np.arange(n))


class TestFuseSequence:
    def test_single_proposal_returned_unchanged(self):
        rng = np.random.default_rng(21)
        p = random_problem(rng, max_nodes=5, min_nodes=3)
        x = random_feasible_assignment(p, rng)
        final, steps = qf.fuse_sequence(p, [x])
        assert np.array_equal(final, x)
        assert steps == [(0, qf.energy(p, x), qf.energy(p, x))]

    def test_repeated_proposal_is_idempotent(self):
        rng = np.random.default_rng(22)
        p = random_problem(rng, max_nodes=5, min_nodes=3)
        x = random_feasible_assignment(p, rng)
        final, steps = qf.fuse_sequence(p, [x] * 10)
        assert np.array_equal(final, x)
        incumbent_energies = [s[2] for s in steps]
        assert len(set(incumbent_energies)) == 1

    def test_prefix_monotone_and_below_every_proposal(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            p = random_problem(rng, max_nodes=5, min_nodes=5)
            proposals = [random_feasible_assignment(p, rng) for _ in range(20)]
            final, steps = qf.fuse_sequence(p, proposals, mode="exact")
            incumbent = [s[2] for s in steps]
            assert all(b <= a + 1e-9 for a, b in zip(incumbent, incumbent[1:]))
            final_energy = incumbent[-1]
            assert all(final_energy <= qf.energy(p, x) + 1e-9 for x in proposals)
            assert qf.is_feasible(p, final)

    def test_infeasible_prefix_falls_back_to_dummy_seed(self):
        p = qf.Problem(2, 1, [[0], [0]],
                       [np.array([-1.0, 0.0]), np.array([-2.0, 0.0])])
        bad = np.array([0, 0])
        final, steps = qf.fuse_sequence(p, [bad])
        assert qf.is_feasible(p, final)
        # the infeasible proposal is still scored in the step record
        assert steps[0][1] == qf.energy(p, bad)

    def test_empty_sequence_rejected(self):
        p = qf.Problem(1, 1, [[0]], [np.array([0.0, 0.0])])
        with pytest.raises(ValueError):
            qf.fuse_sequence(p, [])
