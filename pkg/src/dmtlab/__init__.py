"""Diversity-multiplexing tradeoff engine for half-duplex relay networks."""

__version__ = "0.1.0"

from .closed_form import (  # noqa: E402
    DdfCaseRow,
    DmtCurve,
    OutOfRegimeError,
    Scheme,
    ddf_case_table,
    dmt_ddf,
    dmt_full_duplex,
    dmt_parallel_ddf_bounds,
    dmt_parallel_optimal,
    dmt_parallel_static_qmf,
    dmt_static_qmf,
    dmt_theorem1,
)
from .exponents import (  # noqa: E402
    ChannelProfile,
    ExponentPoint,
    GridSpec,
    objective_s,
    rate_hd,
    rate_parallel,
)
from .solvers import (  # noqa: E402
    ScheduleRule,
    SolverResult,
    best_static_qmf,
    solve_ddf,
    solve_full_duplex,
    solve_global_csi,
    solve_local_csi,
    solve_parallel_dqmf,
    solve_parallel_global,
    solve_parallel_local_csi,
    solve_parallel_static,
    solve_static_qmf,
)
