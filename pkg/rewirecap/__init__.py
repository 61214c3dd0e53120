"""
rewirecap package initializer
"""

__version__ = "0.1.0"

# Configuration
from .config import (
    EnvConfig,
    GraphDefaults,
    CentralityConfig,
    RewireDefaults,
    TrafficDefaults,
    SweepDefaults,
    OutputConfig,
    LogConfig,
    RejectReasons,
    ExitCodes,
    Messages,
)

# Errors
from .exceptions import (
    RewireCapError,
    ConfigurationError,
    DataError,
    DisconnectedGraphError,
    NumericError,
    ConvergenceError,
    UndefinedCorrelationError,
    DegenerateCoreError,
    ZeroBetweennessError,
)

# Graphs and measures
from .graph_core import NetworkBuilder, GraphUtils, DegreeDistribution, LoadReport
from .centrality import Centrality, CentralityBundle, EdgeCorrelation
from .meso_structure import MesoStructure, CorePartition, RichClubProfile

# Rewiring
from .rewiring import Rewiring, RewireConfig, RewireReport, StrategyScores

# Traffic
from .traffic import Traffic, TrafficParams, TrafficState, UtilizationProfile
from .packet_sim import PacketSimulator, PacketSimState, Packet

# Experiments
from .metrics import Metrics, MetricsRow
from .pipeline import ExperimentConfig, ExperimentPipeline, NetworkSource, run_experiment
from .plots import emit_plots
from .commands import RewireCapCommands
