"""Prize-collecting Steiner tree solvers and subgraph extraction."""

from graphguide.pcst.approx import BACKEND, growth_backends, solve_approx  # noqa: F401
from graphguide.pcst.exact import EXACT_EDGE_LIMIT, solve_exact  # noqa: F401
from graphguide.pcst.extract import (  # noqa: F401
    PcstConfig,
    Subgraph,
    build_instance,
    extract_subgraph,
    is_connected,
    solve_instance,
)
from graphguide.pcst.instance import (  # noqa: F401
    FoldMap,
    InstanceTooLargeError,
    PcstInstance,
    PcstSolution,
    fold_edge_prizes,
    solution_value,
)
