"""Round-based WSN clustering protocol simulator.

Implements LEACH, SEP, TEEN and DEEC cluster-head election over the
first-order radio energy model, with the ACH minimum-distance CH
demotion filter available as a composable option on every protocol.
"""

from .ach import ChCandidate, ach_filter, pairwise_min_distance
from .config import ExperimentSpec, parse_config, write_resolved_config
from .energy import EnergyModel, Position, distance
from .engine import (
    ClusterAssignment,
    ConfigError,
    NetworkConfig,
    Node,
    RoundMetrics,
    Simulation,
    SimulationResult,
    associate,
    deploy,
    run_simulation,
)
from .experiment import (
    CSV_HEADER,
    RunSummary,
    SummaryStats,
    format_metrics_csv,
    run_csv_path,
    run_experiment,
    summarize,
)
from .protocols import (
    NodeElectionState,
    ProtocolKind,
    ProtocolSpec,
    deec_probability,
    deec_threshold,
    elect_candidates,
    epoch_length,
    is_eligible,
    leach_threshold,
    network_average_energy,
    sep_probability,
    teen_should_transmit,
)

__all__ = [
    "CSV_HEADER",
    "ChCandidate",
    "ClusterAssignment",
    "ConfigError",
    "EnergyModel",
    "ExperimentSpec",
    "NetworkConfig",
    "Node",
    "NodeElectionState",
    "Position",
    "ProtocolKind",
    "ProtocolSpec",
    "RoundMetrics",
    "RunSummary",
    "Simulation",
    "SimulationResult",
    "SummaryStats",
    "ach_filter",
    "associate",
    "deec_probability",
    "deec_threshold",
    "deploy",
    "distance",
    "elect_candidates",
    "epoch_length",
    "format_metrics_csv",
    "is_eligible",
    "leach_threshold",
    "network_average_energy",
    "pairwise_min_distance",
    "parse_config",
    "run_csv_path",
    "run_experiment",
    "run_simulation",
    "sep_probability",
    "summarize",
    "teen_should_transmit",
    "write_resolved_config",
]

__version__ = "0.1.0"
