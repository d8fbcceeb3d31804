"""Deterministic task-placement simulator for a three-tier vehicular edge platform."""

from .errors import CapacityError, ConfigError, VecSimError, WorkloadError
from .infrastructure import (
    CapacityLedger,
    Layer,
    NodeSpec,
    Platform,
    PlatformConfig,
    build_platform,
)
from .metrics import MetricsReport, cost, nmd, privacy, qor, qos, summarize
from .oracle import MAX_ORACLE_TASKS, OracleResult, brute_force_best
from .policy import (
    Assignment,
    ExecutionMode,
    PolicyKind,
    lsbts_assign,
    pvec_assign,
    random_assign,
)
from .simengine import (
    SimOptions,
    TaskOutcome,
    TraceReport,
    canonical_trace_bytes,
    processing_time,
    replay_assignments,
    run,
)
from .workload import (
    AccuracyClass,
    BUILTIN_WORKLOADS,
    GenParams,
    PrivacyClass,
    RealTimeClass,
    TaskSpec,
    WorkloadSpec,
    builtin_workload,
    canonical_workload_bytes,
    generate_workload,
    load_workload,
    save_workload,
)

__version__ = "0.1.0"
