"""Graph matching / quadratic assignment solving.

Combines a monotone dual block-coordinate-ascent lower bound, randomized
greedy proposal generation on reparametrized costs, and QPBO-based fusion
moves that monotonically improve a feasible incumbent.  Ships with the
`.dd` instance format, an exact desk-scale fusion oracle, linear
assignment solving, and deterministic convergence traces.
"""

from .model import (
    DUMMY,
    Problem,
    Reparametrization,
    all_dummy,
    energy,
    is_feasible,
    lap_unary,
    lap_unary_vector,
    reparametrized_pairwise,
    reparametrized_pairwise_table,
    reparametrized_unary,
    reparametrized_unary_vector,
    validate_assignment,
)
from .ddio import (
    DdAssignment,
    DdInstance,
    DdPairwiseTerm,
    ParseError,
    SolverTraceRecord,
    parse_dd,
    parse_proposals,
    read_trace,
    to_problem,
    write_dd,
    write_proposals,
    write_trace,
)
from .greedy import (
    OriginalCosts,
    ReparametrizedCosts,
    greedy_assignment,
    greedy_on_reparametrized,
)
from .lap import LapInstance, label_min_term, solve_lap
from .dualbca import (
    DualState,
    dual_bound,
    sweep,
    update_edge_messages,
    update_label_messages,
    update_node_messages,
)
from .qpbo import MaxFlow, QpboResult, roof_duality
from .fusion import (
    FusionProblem,
    build_fusion,
    count_bound,
    fuse,
    solve_qpbo,
)
from .solver import SolveOutcome, SolverConfig, fuse_sequence, solve

__version__ = "0.1.0"

__all__ = [
    "DUMMY", "Problem", "Reparametrization", "all_dummy", "energy", "is_feasible",
    "lap_unary", "lap_unary_vector", "reparametrized_pairwise",
    "reparametrized_pairwise_table", "reparametrized_unary",
    "reparametrized_unary_vector", "validate_assignment",
    "DdAssignment", "DdInstance", "DdPairwiseTerm", "ParseError",
    "SolverTraceRecord", "parse_dd", "parse_proposals", "read_trace",
    "to_problem", "write_dd", "write_proposals", "write_trace",
    "OriginalCosts", "ReparametrizedCosts", "greedy_assignment",
    "greedy_on_reparametrized",
    "LapInstance", "label_min_term", "solve_lap",
    "DualState", "dual_bound", "sweep", "update_edge_messages",
    "update_label_messages", "update_node_messages",
    "MaxFlow", "QpboResult", "roof_duality",
    "FusionProblem", "build_fusion", "count_bound", "fuse", "solve_qpbo",
    "SolveOutcome", "SolverConfig", "fuse_sequence", "solve",
]
