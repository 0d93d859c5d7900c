"""Electrical-network tools for random walk traces: voltages, Green functions,
expected crossing counts, level-set surgery and trace recurrence diagnostics."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .network import (  # noqa: F401
    BaryTree,
    BirthDeath,
    Exhaustion,
    Lattice,
    Network,
    NetworkFamily,
    Wedge,
    ball_network,
    build_finite,
    collapse_boundary,
    load_network,
    make_family,
    random_network,
    save_network,
)
from .harmonic import (  # noqa: F401
    CurrentFlow,
    HarmonicReport,
    LevelCut,
    VoltageField,
    dirichlet_energy,
    divergence,
    effective_conductance,
    effective_resistance,
    flow_energy,
    green_function,
    harmonic_report,
    level_cut,
    nash_williams_bound,
    solve_voltage,
    superlevel_set,
    unit_current_flow,
)
from .walk import (  # noqa: F401
    CrossingCounts,
    ResistanceProfile,
    WalkPath,
    crossing_counts,
    expected_crossings_analytic,
    make_rng,
    monte_carlo_expected_crossings,
    resistance_profile,
    run_on_family,
    run_until_absorbed,
    step,
    trace_network,
)
from .transforms import (  # noqa: F401
    SubdivisionRecord,
    bounded_factor_check,
    delete_vertices,
    doob_transform,
    straddle_reweight,
    subdivide_edge,
    subdivide_level,
)
