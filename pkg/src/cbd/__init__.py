"""Contextuality analysis of finite systems of measurements.

Two independent routes to the contextuality measure: an exact linear program
over all couplings of the system, and the closed form for cyclic systems of
binary measurements.
"""
from .connection import ConnectionMaxEq, max_eq_binary, max_eq_connection, max_eq_oracle
from .coupling import (
    ContextualityReport,
    CouplingSolution,
    Method,
    build_coupling_lp,
    contextuality_measure,
    independent_coupling,
    max_eq_system,
    verify_description,
)
from .cyclic import (
    CyclicStructure,
    NotCyclic,
    cyclic_criterion,
    cyclic_measure,
    detect_cyclic,
    s_odd,
    s_odd_oracle,
)
from .errors import *  # noqa: F401,F403
from .ingest import (
    EstimationReport,
    TrialRecord,
    estimate_from_trials,
    parse_system,
    read_trials_csv,
    serialize_system,
)
from .lp import LinearProgram, LpStatus, LpVerdict, solve
from .model import (
    Alphabet,
    Bunch,
    Connection,
    System,
    build_system,
    connection_of,
    is_consistently_connected,
)

__version__ = "0.1.0"
