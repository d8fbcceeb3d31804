"""Deterministic sequential executor.

Tasks are dispatched to the selected policy in (arrival_time, task_id)
order; each runs on the earliest-free core of its assigned node, FIFO per
core, with link latency charged once for upload and once for result
return.  Outcomes record end-to-end timing and privacy bookkeeping.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import ConfigError
from .infrastructure import CapacityLedger, Layer, NodeSpec, Platform
from .policy import ExecutionMode, PolicyKind, lsbts_assign, pvec_assign, random_assign
from .workload import PrivacyClass, RealTimeClass, TaskSpec, WorkloadSpec

__all__ = [
    "SimOptions",
    "TaskOutcome",
    "TraceReport",
    "processing_time",
    "run",
    "replay_assignments",
    "trace_to_dict",
    "outcome_to_dict",
    "canonical_trace_bytes",
]


@dataclass(frozen=True)
class SimOptions:
    """Engine and metric knobs for one run."""

    approx_fraction: float = 0.1  # effective-size multiplier in approximate mode
    approx_accuracy: float = 0.95  # result accuracy credited to approximate outcomes
    bc_overhead: float = 0.2  # lsbts consensus latency surcharge, seconds
    privacy_weighting: str = "count"  # "count" or "work"
    nmd_scope: str = "all"  # "all" or "exclude_soft"
    trace: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.approx_fraction <= 1.0:
            raise ConfigError(f"approx_fraction must be in (0, 1], got {self.approx_fraction}")
        if not 0.0 <= self.approx_accuracy <= 1.0:
            raise ConfigError(f"approx_accuracy must be in [0, 1], got {self.approx_accuracy}")
        if self.bc_overhead < 0:
            raise ConfigError(f"bc_overhead must be >= 0, got {self.bc_overhead}")
        if self.privacy_weighting not in ("count", "work"):
            raise ConfigError(f"privacy_weighting must be 'count' or 'work', got {self.privacy_weighting!r}")
        if self.nmd_scope not in ("all", "exclude_soft"):
            raise ConfigError(f"nmd_scope must be 'all' or 'exclude_soft', got {self.nmd_scope!r}")


@dataclass(frozen=True)
class TaskOutcome:
    """Simulated result of one task.

    ``start`` is when a core was seized (never before arrival); ``finish``
    adds processing, round-trip link latency, and any consensus surcharge.
    ``processing_hours`` is pure compute time only.  ``privacy_preserved``
    means the task counts at full weight in the privacy numerator (always
    true on the user layer; cloud outcomes instead contribute through the
    K coefficient by layer).
    """

    task_id: int
    layer: Layer
    node_id: int
    mode: ExecutionMode
    start: float
    finish: float
    processing_hours: float
    deadline_met: bool
    privacy_preserved: bool
    rt_class: RealTimeClass
    size: float


@dataclass(frozen=True)
class TraceReport:
    """Complete record of one run: one outcome per task, optional event log."""

    policy: str
    workload: str
    seed: int
    outcomes: tuple
    events: tuple = ()


def processing_time(task: TaskSpec, node: NodeSpec, mode: ExecutionMode,
                    approx_fraction: float = 0.1) -> float:
    """Seconds of pure compute: approximate mode shrinks the effective size."""
    factor = approx_fraction if mode is ExecutionMode.APPROXIMATE else 1.0
    return task.size * factor / node.speed


def _check_owners(platform: Platform, workload: WorkloadSpec) -> None:
    for task in workload.tasks:
        if task.owner_vehicle >= platform.vehicle_count:
            raise ConfigError(
                f"task {task.task_id}: owner_vehicle {task.owner_vehicle} out of range "
                f"for platform with {platform.vehicle_count} vehicles"
            )


def _simulate(platform: Platform, workload: WorkloadSpec, assign_fn, opts: SimOptions,
              policy_label: str, seed: int, lsbts: bool) -> TraceReport:
    ledger = CapacityLedger(platform)
    outcomes = []
    events = []
    for task in workload.tasks:
        t = task.arrival_time
        assignment = assign_fn(task, ledger, t)
        node = platform.node(assignment.node_id)
        proc = processing_time(task, node, assignment.mode, opts.approx_fraction)
        exec_start = max(t, ledger.earliest_free(node))
        core = ledger.admit(node, task, exec_start, proc)
        surcharge = opts.bc_overhead if lsbts and task.privacy is not PrivacyClass.PUBLIC else 0.0
        finish = exec_start + proc + 2.0 * node.link_latency + surcharge
        preserved = node.layer is Layer.USER_LAYER or (
            lsbts and task.privacy is not PrivacyClass.PUBLIC
        )
        outcomes.append(
            TaskOutcome(
                task_id=task.task_id,
                layer=node.layer,
                node_id=node.node_id,
                mode=assignment.mode,
                start=exec_start,
                finish=finish,
                processing_hours=proc / 3600.0,
                deadline_met=finish <= task.deadline,
                privacy_preserved=preserved,
                rt_class=task.rt_class,
                size=task.size,
            )
        )
        if opts.trace:
            events.append((t, f"dispatch task {task.task_id} -> node {node.node_id} ({node.layer.value})"))
            events.append((exec_start, f"start task {task.task_id} on node {node.node_id} core {core}"))
            events.append((finish, f"finish task {task.task_id} on node {node.node_id}"))
    events.sort(key=lambda e: e[0])  # stable: ties keep dispatch order
    return TraceReport(
        policy=policy_label,
        workload=workload.name,
        seed=seed,
        outcomes=tuple(outcomes),
        events=tuple(events),
    )


def run(platform: Platform, workload: WorkloadSpec, kind: PolicyKind, seed: int,
        opts: SimOptions | None = None) -> TraceReport:
    """Execute one full simulation under the given policy, deterministically in all inputs."""
    if not isinstance(kind, PolicyKind):
        raise ConfigError(f"unknown policy kind {kind!r}")
    opts = opts if opts is not None else SimOptions()
    _check_owners(platform, workload)
    if kind is PolicyKind.PVEC:
        assign_fn = lambda task, ledger, t: pvec_assign(task, platform, ledger, t)
    elif kind is PolicyKind.RANDOM:
        rng = random.Random(seed)
        assign_fn = lambda task, ledger, t: random_assign(task, platform, rng)
    else:
        assign_fn = lambda task, ledger, t: lsbts_assign(task, platform, ledger, t)
    return _simulate(platform, workload, assign_fn, opts, policy_label=kind.value,
                     seed=seed, lsbts=kind is PolicyKind.LSBTS)


def replay_assignments(platform: Platform, workload: WorkloadSpec, assignments,
                       opts: SimOptions | None = None) -> TraceReport:
    """Re-simulate a fixed assignment vector (one Assignment per task) under standard semantics."""
    opts = opts if opts is not None else SimOptions()
    _check_owners(platform, workload)
    by_task = {a.task_id: a for a in assignments}
    if len(by_task) != len(workload.tasks) or any(t.task_id not in by_task for t in workload.tasks):
        raise ValueError("assignments must cover every task exactly once")

    def assign_fn(task, ledger, t):
        a = by_task[task.task_id]
        if platform.node(a.node_id).layer is not a.layer:
            raise ValueError(f"assignment for task {a.task_id}: node {a.node_id} is not in layer {a.layer}")
        return a

    return _simulate(platform, workload, assign_fn, opts, policy_label="replay",
                     seed=0, lsbts=False)


def outcome_to_dict(outcome: TaskOutcome) -> dict:
    return {
        "task_id": outcome.task_id,
        "layer": outcome.layer.value,
        "node_id": outcome.node_id,
        "mode": outcome.mode.value,
        "start": outcome.start,
        "finish": outcome.finish,
        "processing_hours": outcome.processing_hours,
        "deadline_met": outcome.deadline_met,
        "privacy_preserved": outcome.privacy_preserved,
        "rt": outcome.rt_class.value,
        "size": outcome.size,
    }


def trace_to_dict(trace: TraceReport) -> dict:
    doc = {
        "policy": trace.policy,
        "workload": trace.workload,
        "seed": trace.seed,
        "outcomes": [outcome_to_dict(o) for o in trace.outcomes],
    }
    if trace.events:
        doc["events"] = [[t, label] for t, label in trace.events]
    return doc


def canonical_trace_bytes(trace: TraceReport) -> bytes:
    return (json.dumps(trace_to_dict(trace), sort_keys=True, separators=(",", ":")) + "\n").encode()
