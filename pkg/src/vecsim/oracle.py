"""Exhaustive-search allocator for tiny instances.

Enumerates every per-task (layer, mode) choice, simulates each vector
through the engine, and returns the assignment vector with the highest
composite service quality.  Intended to bound the gap of the heuristic
policies and to validate the metrics pipeline end to end; capped at 12
tasks because the search space grows as fast as 6^n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .infrastructure import Layer, Platform
from .metrics import summarize
from .policy import Assignment, ExecutionMode
from .simengine import SimOptions, _simulate, replay_assignments
from .workload import AccuracyClass, PrivacyClass, WorkloadSpec

__all__ = ["OracleResult", "brute_force_best", "MAX_ORACLE_TASKS"]

MAX_ORACLE_TASKS = 12


@dataclass(frozen=True)
class OracleResult:
    best_qos: float
    best_assignment: tuple
    evaluated: int


def _layer_options(task, honor_privacy: bool):
    if not honor_privacy:
        return (Layer.USER_LAYER, Layer.RSU, Layer.CLOUD)
    if task.privacy is PrivacyClass.PRIVATE:
        return (Layer.USER_LAYER,)
    if task.privacy is PrivacyClass.RESTRICTED:
        return (Layer.USER_LAYER, Layer.CLOUD)
    return (Layer.USER_LAYER, Layer.RSU, Layer.CLOUD)


def _mode_options(task):
    if task.accuracy is AccuracyClass.APPROXIMATE:
        return (ExecutionMode.ACCURATE, ExecutionMode.APPROXIMATE)
    return (ExecutionMode.ACCURATE,)


def brute_force_best(platform: Platform, workload: WorkloadSpec, honor_privacy: bool = True,
                     opts: SimOptions | None = None) -> OracleResult:
    """Best (layer, mode) vector by exhaustive search; ties pick the first
    vector in canonical option order, which is the lexicographically smallest.

    The user layer always means the owner's OBU; ``honor_privacy`` only
    controls whether privacy classes restrict the layer choices.
    """
    opts = opts if opts is not None else SimOptions()
    n = len(workload.tasks)
    if n == 0:
        raise ValueError("oracle is undefined on an empty workload (no QoS)")
    if n > MAX_ORACLE_TASKS:
        raise ValueError(f"instance too large for the oracle: {n} tasks (cap {MAX_ORACLE_TASKS})")

    per_task = [
        [(layer, mode) for layer in _layer_options(task, honor_privacy) for mode in _mode_options(task)]
        for task in workload.tasks
    ]

    # Within a layer the engine picks the node deterministically, so a
    # vector of (layer, mode) pairs fully determines the trace.
    def node_for(task, layer, ledger):
        if layer is Layer.USER_LAYER:
            return platform.obu(task.owner_vehicle)
        nodes = platform.rsus if layer is Layer.RSU else platform.cloud_nodes
        return min(nodes, key=lambda nd: (ledger.earliest_free(nd), nd.node_id))

    best_qos = None
    best_vector = None
    evaluated = 0
    for vector in itertools.product(*per_task):
        choices = dict(zip((t.task_id for t in workload.tasks), vector))

        def assign_fn(task, ledger, t):
            layer, mode = choices[task.task_id]
            node = node_for(task, layer, ledger)
            return Assignment(task.task_id, node.layer, node.node_id, mode)

        trace = _simulate(platform, workload, assign_fn, opts, policy_label="oracle",
                          seed=0, lsbts=False)
        score = summarize(trace, platform, opts).qos
        evaluated += 1
        if best_qos is None or score > best_qos:
            best_qos = score
            best_vector = tuple(
                Assignment(o.task_id, o.layer, o.node_id, o.mode) for o in trace.outcomes
            )
    return OracleResult(best_qos=best_qos, best_assignment=best_vector, evaluated=evaluated)


def verify_best(platform: Platform, workload: WorkloadSpec, result: OracleResult,
                opts: SimOptions | None = None) -> float:
    """Re-simulate the winning vector through the public replay path; returns its QoS."""
    opts = opts if opts is not None else SimOptions()
    trace = replay_assignments(platform, workload, result.best_assignment, opts)
    return summarize(trace, platform, opts).qos
