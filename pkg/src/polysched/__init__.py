"""polysched: a configurable iterative polyhedral scheduler.

Given a static-control kernel description (the mini-SCoP JSON format),
the scheduler computes semantics-preserving affine loop transformations
(fusion, distribution, interchange, skewing, shifting, tiling) driven by
selectable cost functions, custom affine constraints, directives, and
dynamic strategies; results are checked by an enumeration oracle.
"""

from .config import (
    Config,
    Directive,
    DimensionPlan,
    SchedulingState,
    auto_vectorize_detect,
    config_from_dict,
    effective_directives,
    lower_constraint,
    parse_config,
    parse_constraint_expr,
    preset_config,
)
from .deps import (
    Dependence,
    DependenceGraph,
    compute_dependences,
    default_context,
    dependences_to_json,
    emit_dependences,
    is_empty,
    parse_dependences,
    scc_condense,
)
from .errors import PolyschedError
from .ilp import IlpProblem, IlpSolution, IlpVariable, solve_lex_min
from .rational import Rat, RatMatrix, orthogonal_complement, rank
from .scheduler import (
    blf_coefficients,
    contiguity_coefficients,
    detect_parallel,
    distribute_dim,
    remove_satisfied,
    schedule,
)
from .scop import (
    Access,
    Polyhedron,
    PolyRow,
    Schedule,
    ScheduleRow,
    Scop,
    Statement,
    TileIter,
    emit_schedule,
    emit_scop,
    initial_as_schedule,
    parse_schedule,
    parse_scop,
    schedule_to_json,
    scop_to_json,
)
from .tiling import tile, wavefront_skew
from .verify import (
    InstanceTrace,
    Report,
    check_injective,
    enumerate_dates,
    print_loops,
    verify_legality,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
