"""Full pipeline: dual ascent sweeps, primal proposals, fusion moves.

Each batch runs a fixed number of ascent sweeps; between the edge phase
and the node/label phase of every sweep the configured primal heuristic
(randomized greedy on reparametrized costs, or the exact assignment-side
LAP solution) emits proposals, and each proposal is immediately fused into
the incumbent.  The incumbent's energy is non-increasing, the dual bound
non-decreasing, and the run stops on batch count, wall-clock budget, or a
proved optimum (relative gap below 1e-6).

Traces are deterministic given the seed: elapsed time in trace records is
a work-proportional virtual clock by default (so identical runs produce
byte-identical trace files), while the time budget always uses the wall
clock.  Pass ``trace_clock=time.perf_counter`` to record real time
instead, at the cost of reproducible traces.
"""

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dualbca import DualState, sweep
from .greedy import OriginalCosts, greedy_assignment
from .lap import LapInstance, solve_lap
from .model import all_dummy, energy, is_feasible, validate_assignment
from .ddio import SolverTraceRecord
from .fusion import fuse

OPTIMALITY_TOLERANCE = 1e-6

# Virtual trace clock: accumulated table-entry operations over this rate
# give "seconds"; deterministic, monotone, roughly work-proportional.
_WORK_RATE = 5.0e7


@dataclass
class SolverConfig:
    """Run parameters; counts must be >= 1, the seed drives every random
    choice (greedy node order and fusion improvement order)."""
    max_batches: int = 50000
    batch_size: int = 1
    greedy_generations: int = 1
    time_budget_seconds: Optional[float] = None
    seed: int = 0
    fusion_mode: str = "qpbo-i"
    primal_heuristic: str = "greedy"

    def validate(self):
        for name in ("max_batches", "batch_size", "greedy_generations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.fusion_mode not in ("qpbo-i", "exact"):
            raise ValueError(f"unknown fusion mode {self.fusion_mode!r}")
        if self.primal_heuristic not in ("greedy", "lap"):
            raise ValueError(f"unknown primal heuristic {self.primal_heuristic!r}")
        if self.time_budget_seconds is not None and self.time_budget_seconds <= 0:
            raise ValueError("time budget must be positive")


@dataclass
class SolveOutcome:
    best: np.ndarray
    best_energy: float
    final_dual_bound: float
    gap: float
    trace: list
    proved_optimal: bool


class _VirtualClock:
    def __init__(self):
        self.work = 0.0

    def advance(self, units):
        self.work += units

    def read(self):
        return self.work / _WORK_RATE


def _problem_work(problem):
    pair = sum(t.size for t in problem.pairwise.values())
    un = sum(c.size for c in problem.unary)
    return pair, un


def solve(problem, config=None, *, trace_clock=None):
    """Run the full solver on a problem; returns a SolveOutcome."""
    config = config or SolverConfig()
    config.validate()
    rng = np.random.default_rng(config.seed)
    wall_start = time.perf_counter()

    pair_work, unary_work = _problem_work(problem)
    vclock = None
    if trace_clock is None:
        vclock = _VirtualClock()
        now = vclock.read
    else:
        start = trace_clock()
        now = lambda: trace_clock() - start

    trace = []
    state = DualState.initial(problem)

    def record(event, best):
        trace.append(SolverTraceRecord(
            iteration=state.sweep_counter, elapsed_seconds=now(),
            dual_bound=state.dual_bound, best_energy=best, event=event))

    incumbent = greedy_assignment(OriginalCosts(problem), rng)
    best_energy = energy(problem, incumbent)
    if vclock is not None:
        vclock.advance(unary_work + pair_work / 4)
    record("greedy", best_energy)

    def proved():
        gap = best_energy - state.dual_bound
        return gap <= OPTIMALITY_TOLERANCE * max(1.0, abs(best_energy))

    proposal_fn = None
    proposal_event = "greedy"
    if config.primal_heuristic == "lap":
        proposal_event = "lap"

        def proposal_fn(p, repar, _rng):
            return solve_lap(LapInstance.from_reparametrization(p, repar))[0]

    def handle_proposal(proposal):
        nonlocal incumbent, best_energy
        if vclock is not None:
            vclock.advance(unary_work + pair_work / 4)
        record(proposal_event, best_energy)
        fused = fuse(problem, incumbent, proposal, mode=config.fusion_mode, rng=rng)
        fused_energy = energy(problem, fused)
        if vclock is not None:
            vclock.advance(16.0 * problem.num_nodes + 64.0)
        if fused_energy < best_energy:
            incumbent, best_energy = fused, fused_energy
            record("improved", best_energy)
        else:
            record("fusion", best_energy)

    def observe(phase):
        if phase == "proposal":
            return  # handle_proposal already recorded it
        if vclock is not None:
            vclock.advance(pair_work if phase == "edge-sweep" else 2.0 * unary_work)
        record(phase, best_energy)

    done = proved()
    for _ in range(config.max_batches):
        if done:
            break
        if (config.time_budget_seconds is not None
                and time.perf_counter() - wall_start > config.time_budget_seconds):
            break
        for _ in range(config.batch_size):
            sweep(problem, state, emit=handle_proposal, rng=rng,
                  num_proposals=config.greedy_generations,
                  proposal_fn=proposal_fn, observer=observe)
        done = proved()

    gap = best_energy - state.dual_bound
    return SolveOutcome(best=incumbent, best_energy=best_energy,
                        final_dual_bound=state.dual_bound, gap=gap,
                        trace=trace, proved_optimal=proved())


def fuse_sequence(problem, proposals, mode="qpbo-i", rng=0):
    """Fuse a proposal list one after another into a single assignment.

    The incumbent starts from the first feasible proposal (all-dummy if
    none is feasible) and every proposal is fused in order.  Returns the
    final assignment plus per-step records
    ``(step, proposal_energy, incumbent_energy)``; incumbent energies are
    non-increasing.
    """
    proposals = [validate_assignment(problem, x) for x in proposals]
    if not proposals:
        raise ValueError("need at least one proposal")
    rng = np.random.default_rng(rng)

    incumbent = None
    for x in proposals:
        if is_feasible(problem, x):
            incumbent = x.copy()
            break
    if incumbent is None:
        incumbent = all_dummy(problem)

    steps = []
    for index, x in enumerate(proposals):
        incumbent = fuse(problem, incumbent, x, mode=mode, rng=rng)
        steps.append((index, energy(problem, x), energy(problem, incumbent)))
    return incumbent, steps
