"""Allocation policies mapping each task to a layer, node, and execution mode.

Three policies are provided: the privacy/deadline class table policy
(pvec), a uniform-random baseline that ignores confidentiality, and a
deadline-greedy linear-search baseline that models blockchain-style
privacy with a latency surcharge (lsbts).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .infrastructure import CapacityLedger, Layer, NodeSpec, Platform
from .workload import AccuracyClass, PrivacyClass, RealTimeClass, TaskSpec

__all__ = [
    "ExecutionMode",
    "PolicyKind",
    "Assignment",
    "pvec_assign",
    "random_assign",
    "lsbts_assign",
]


class ExecutionMode(enum.Enum):
    """Accurate processing runs the full task; approximate shrinks its effective size."""

    ACCURATE = "accurate"
    APPROXIMATE = "approximate"


class PolicyKind(enum.Enum):
    PVEC = "pvec"
    RANDOM = "random"
    LSBTS = "lsbts"


@dataclass(frozen=True)
class Assignment:
    """Policy output for one task.  ``layer`` always matches the node's layer."""

    task_id: int
    layer: Layer
    node_id: int
    mode: ExecutionMode


def _mode_for(task: TaskSpec) -> ExecutionMode:
    # Approximate mode is only ever applied to tasks that tolerate it.
    if task.accuracy is AccuracyClass.APPROXIMATE:
        return ExecutionMode.APPROXIMATE
    return ExecutionMode.ACCURATE


def _least_busy(nodes, ledger: CapacityLedger) -> NodeSpec:
    return min(nodes, key=lambda n: (ledger.earliest_free(n), n.node_id))


def pvec_assign(task: TaskSpec, platform: Platform, ledger: CapacityLedger, t: float) -> Assignment:
    """Class-table placement.

    Private work never leaves the owner's OBU.  Restricted work avoids
    RSUs: hard deadlines stay on the OBU, firm deadlines stay there only
    while the OBU has a free core (else cloud), soft deadlines go to the
    cloud.  Public work runs on the least-loaded RSU for hard/firm
    deadlines and on the cloud for soft ones.  Approximate-tolerant tasks
    always run in approximate mode.
    """
    mode = _mode_for(task)
    if task.privacy is PrivacyClass.PRIVATE:
        node = platform.obu(task.owner_vehicle)
    elif task.privacy is PrivacyClass.RESTRICTED:
        if task.rt_class is RealTimeClass.HARD:
            node = platform.obu(task.owner_vehicle)
        elif task.rt_class is RealTimeClass.FIRM:
            if ledger.available(Layer.USER_LAYER, task.owner_vehicle, t):
                node = platform.obu(task.owner_vehicle)
            else:
                node = _least_busy(platform.cloud_nodes, ledger)
        else:
            node = _least_busy(platform.cloud_nodes, ledger)
    else:
        if task.rt_class is RealTimeClass.SOFT:
            node = _least_busy(platform.cloud_nodes, ledger)
        else:
            node = _least_busy(platform.rsus, ledger)
    return Assignment(task.task_id, node.layer, node.node_id, mode)


def random_assign(task: TaskSpec, platform: Platform, rng: random.Random) -> Assignment:
    """Uniform layer choice that ignores privacy classes; never approximates."""
    layer = rng.choice((Layer.USER_LAYER, Layer.RSU, Layer.CLOUD))
    if layer is Layer.USER_LAYER:
        node = platform.obu(task.owner_vehicle)
    elif layer is Layer.RSU:
        node = rng.choice(platform.rsus)
    else:
        node = rng.choice(platform.cloud_nodes)
    return Assignment(task.task_id, node.layer, node.node_id, ExecutionMode.ACCURATE)


def lsbts_assign(task: TaskSpec, platform: Platform, ledger: CapacityLedger, t: float) -> Assignment:
    """Linear search in fixed order: owner OBU, RSUs by id, then cloud.

    Picks the first node whose estimated completion (queue wait plus
    accurate processing time; the estimator ignores link latency and the
    consensus surcharge) meets the deadline; falls back to the cloud when
    none does.  Never approximates.
    """
    candidates = (platform.obu(task.owner_vehicle),) + platform.rsus + platform.cloud_nodes
    chosen = None
    for node in candidates:
        est_start = max(t, ledger.earliest_free(node))
        if est_start + task.size / node.speed <= task.deadline:
            chosen = node
            break
    if chosen is None:
        chosen = _least_busy(platform.cloud_nodes, ledger)
    return Assignment(task.task_id, chosen.layer, chosen.node_id, ExecutionMode.ACCURATE)
