"""Task model and deterministic synthetic workload generation.

A workload is a batch of vehicular application tasks, each classified along
three independent dimensions: privacy (public / restricted / private),
real-time strictness (soft / firm / hard), and accuracy tolerance
(accurate / approximate).  Three builtin mixes are provided — healthcare,
e-transport, e-business — along with a general generator and a JSON file
format for interchange.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import WorkloadError

__all__ = [
    "PrivacyClass",
    "RealTimeClass",
    "AccuracyClass",
    "TaskSpec",
    "WorkloadSpec",
    "GenParams",
    "BUILTIN_WORKLOADS",
    "builtin_workload",
    "generate_workload",
    "load_workload",
    "save_workload",
    "workload_to_dict",
    "workload_from_dict",
    "canonical_workload_bytes",
    "class_tally",
]


class PrivacyClass(enum.Enum):
    """Confidentiality requirement of a task."""

    PUBLIC = "public"
    RESTRICTED = "restricted"
    PRIVATE = "private"


class RealTimeClass(enum.Enum):
    """Deadline strictness of a task."""

    SOFT = "soft"
    FIRM = "firm"
    HARD = "hard"


class AccuracyClass(enum.Enum):
    """Whether a task's result may be computed approximately."""

    ACCURATE = "accurate"
    APPROXIMATE = "approximate"


@dataclass(frozen=True)
class TaskSpec:
    """One schedulable task owned by a vehicle.

    ``size`` is abstract compute demand in work-units; ``deadline`` is an
    absolute time in seconds and must lie strictly after ``arrival_time``.
    """

    task_id: int
    owner_vehicle: int
    size: float
    privacy: PrivacyClass
    rt_class: RealTimeClass
    accuracy: AccuracyClass
    arrival_time: float
    deadline: float

    def __post_init__(self) -> None:
        if self.size <= 0:
            raise WorkloadError(f"task {self.task_id}: size must be > 0, got {self.size}")
        if self.owner_vehicle < 0:
            raise WorkloadError(f"task {self.task_id}: owner_vehicle must be >= 0")
        if self.arrival_time < 0:
            raise WorkloadError(f"task {self.task_id}: arrival_time must be >= 0")
        if not self.deadline > self.arrival_time:
            raise WorkloadError(
                f"task {self.task_id}: deadline ({self.deadline}) must be greater "
                f"than arrival_time ({self.arrival_time})"
            )


def class_tally(tasks: Iterable[TaskSpec]) -> dict:
    """Tally tasks per (privacy, rt, accuracy) cell."""
    counts: dict = {}
    for t in tasks:
        key = (t.privacy, t.rt_class, t.accuracy)
        counts[key] = counts.get(key, 0) + 1
    return counts


@dataclass(frozen=True)
class WorkloadSpec:
    """An ordered batch of tasks plus its per-class tallies."""

    name: str
    tasks: tuple = ()
    class_counts: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen = set()
        prev_key = None
        for t in self.tasks:
            if t.task_id in seen:
                raise WorkloadError(f"duplicate task_id {t.task_id} in workload {self.name!r}")
            seen.add(t.task_id)
            key = (t.arrival_time, t.task_id)
            if prev_key is not None and key < prev_key:
                raise WorkloadError(
                    f"workload {self.name!r}: tasks not ordered by (arrival_time, task_id) "
                    f"at task {t.task_id}"
                )
            prev_key = key
        if self.class_counts != class_tally(self.tasks):
            raise WorkloadError(f"workload {self.name!r}: class_counts do not match tasks")

    @classmethod
    def build(cls, name: str, tasks: Iterable[TaskSpec]) -> "WorkloadSpec":
        """Sort tasks canonically, tally classes, and validate invariants."""
        ordered = tuple(sorted(tasks, key=lambda t: (t.arrival_time, t.task_id)))
        return cls(name=name, tasks=ordered, class_counts=class_tally(ordered))

    def count(self, privacy=None, rt=None, accuracy=None) -> int:
        """Count tasks matching the given class filters (None matches all)."""
        return sum(
            1
            for t in self.tasks
            if (privacy is None or t.privacy is privacy)
            and (rt is None or t.rt_class is rt)
            and (accuracy is None or t.accuracy is accuracy)
        )


@dataclass(frozen=True)
class GenParams:
    """Knobs for synthetic workload generation.

    Class shares are fractions of ``n_tasks``; the privacy and real-time
    dimensions each must not sum above 1.  ``restricted_share=None`` applies
    the default rule (half the Private count, drawn from non-Private tasks);
    ``firm_share=None`` splits the non-Hard remainder 50/50 with Soft.

    Sizes are log-uniform over ``size_range``.  Deadlines are
    ``arrival + size / reference_speed * slack`` with slack drawn uniformly
    from the per-class range.  ``arrival_window=0`` puts every arrival at
    t=0; a positive window draws arrivals uniformly from it.
    """

    n_tasks: int = 1000
    n_vehicles: int = 100
    private_share: float = 0.2
    restricted_share: float | None = None
    hard_share: float = 0.15
    firm_share: float | None = None
    approx_share: float = 0.6
    size_range: tuple = (50.0, 500.0)
    reference_speed: float = 25.0
    hard_slack: tuple = (1.2, 2.0)
    firm_slack: tuple = (2.0, 5.0)
    soft_slack: tuple = (5.0, 20.0)
    arrival_window: float = 0.0
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.n_tasks < 0:
            raise WorkloadError(f"n_tasks must be >= 0, got {self.n_tasks}")
        if self.n_vehicles < 1:
            raise WorkloadError(f"n_vehicles must be >= 1, got {self.n_vehicles}")
        for fname in ("private_share", "hard_share", "approx_share"):
            v = getattr(self, fname)
            if not 0.0 <= v <= 1.0:
                raise WorkloadError(f"{fname} must be in [0, 1], got {v}")
        for fname in ("restricted_share", "firm_share"):
            v = getattr(self, fname)
            if v is not None and not 0.0 <= v <= 1.0:
                raise WorkloadError(f"{fname} must be in [0, 1], got {v}")
        if self.restricted_share is not None and self.private_share + self.restricted_share > 1.0 + 1e-9:
            raise WorkloadError(
                f"privacy shares sum above 1: private={self.private_share} "
                f"restricted={self.restricted_share}"
            )
        if self.firm_share is not None and self.hard_share + self.firm_share > 1.0 + 1e-9:
            raise WorkloadError(
                f"real-time shares sum above 1: hard={self.hard_share} firm={self.firm_share}"
            )
        lo, hi = self.size_range
        if not (0 < lo <= hi):
            raise WorkloadError(f"size_range must satisfy 0 < lo <= hi, got {self.size_range}")
        if self.reference_speed <= 0:
            raise WorkloadError(f"reference_speed must be > 0, got {self.reference_speed}")
        for fname in ("hard_slack", "firm_slack", "soft_slack"):
            slo, shi = getattr(self, fname)
            if not (0 < slo <= shi):
                raise WorkloadError(f"{fname} must satisfy 0 < lo <= hi, got {(slo, shi)}")
        if self.arrival_window < 0:
            raise WorkloadError(f"arrival_window must be >= 0, got {self.arrival_window}")


# Builtin mixes: total tasks, private count, hard real-time count.
BUILTIN_WORKLOADS = {
    "healthcare": (1500, 300, 200),
    "e-transport": (1000, 150, 250),
    "e-business": (1500, 250, 250),
}


def _share_count(share: float, n: int) -> int:
    return int(round(share * n))


def generate_workload(params: GenParams, seed: int) -> WorkloadSpec:
    """Generate a workload honoring the requested class mix, deterministically in (params, seed)."""
    n = params.n_tasks
    rng = random.Random(seed)

    private_count = _share_count(params.private_share, n)
    if params.restricted_share is None:
        restricted_count = min(private_count // 2, n - private_count)
    else:
        restricted_count = _share_count(params.restricted_share, n)
        if private_count + restricted_count > n:
            raise WorkloadError(
                f"privacy counts exceed n_tasks: {private_count} private + "
                f"{restricted_count} restricted > {n}"
            )
    hard_count = _share_count(params.hard_share, n)
    if params.firm_share is None:
        firm_count = (n - hard_count) // 2
    else:
        firm_count = _share_count(params.firm_share, n)
        if hard_count + firm_count > n:
            raise WorkloadError(
                f"real-time counts exceed n_tasks: {hard_count} hard + {firm_count} firm > {n}"
            )
    approx_count = _share_count(params.approx_share, n)

    # The three dimensions are drawn independently so every class cell can
    # be populated (overlap between private and hard is permitted).
    privacy = [PrivacyClass.PUBLIC] * n
    order = list(range(n))
    rng.shuffle(order)
    for i in order[:private_count]:
        privacy[i] = PrivacyClass.PRIVATE
    for i in order[private_count : private_count + restricted_count]:
        privacy[i] = PrivacyClass.RESTRICTED

    rt = [RealTimeClass.SOFT] * n
    order = list(range(n))
    rng.shuffle(order)
    for i in order[:hard_count]:
        rt[i] = RealTimeClass.HARD
    for i in order[hard_count : hard_count + firm_count]:
        rt[i] = RealTimeClass.FIRM

    accuracy = [AccuracyClass.ACCURATE] * n
    order = list(range(n))
    rng.shuffle(order)
    for i in order[:approx_count]:
        accuracy[i] = AccuracyClass.APPROXIMATE

    slack_range = {
        RealTimeClass.HARD: params.hard_slack,
        RealTimeClass.FIRM: params.firm_slack,
        RealTimeClass.SOFT: params.soft_slack,
    }
    log_lo, log_hi = math.log(params.size_range[0]), math.log(params.size_range[1])

    tasks = []
    for tid in range(n):
        size = math.exp(rng.uniform(log_lo, log_hi))
        arrival = rng.uniform(0.0, params.arrival_window) if params.arrival_window > 0 else 0.0
        slack = rng.uniform(*slack_range[rt[tid]])
        deadline = arrival + size / params.reference_speed * slack
        owner = rng.randrange(params.n_vehicles)
        tasks.append(
            TaskSpec(
                task_id=tid,
                owner_vehicle=owner,
                size=size,
                privacy=privacy[tid],
                rt_class=rt[tid],
                accuracy=accuracy[tid],
                arrival_time=arrival,
                deadline=deadline,
            )
        )
    return WorkloadSpec.build(params.name, tasks)


def builtin_workload(name: str, params: GenParams | None = None, seed: int = 0) -> WorkloadSpec:
    """Generate one of the builtin mixes; ``params`` supplies everything but the class counts."""
    if name not in BUILTIN_WORKLOADS:
        raise WorkloadError(
            f"unknown workload {name!r}: valid names are {', '.join(sorted(BUILTIN_WORKLOADS))}"
        )
    total, private, hard = BUILTIN_WORKLOADS[name]
    base = params if params is not None else GenParams()
    spec = replace(
        base,
        name=name,
        n_tasks=total,
        private_share=private / total,
        hard_share=hard / total,
    )
    return generate_workload(spec, seed)


# --- file format -----------------------------------------------------------

_TASK_KEYS = {"id", "owner", "size", "privacy", "rt", "accuracy", "arrival", "deadline"}


def workload_to_dict(workload: WorkloadSpec) -> dict:
    return {
        "name": workload.name,
        "tasks": [
            {
                "id": t.task_id,
                "owner": t.owner_vehicle,
                "size": t.size,
                "privacy": t.privacy.value,
                "rt": t.rt_class.value,
                "accuracy": t.accuracy.value,
                "arrival": t.arrival_time,
                "deadline": t.deadline,
            }
            for t in workload.tasks
        ],
    }


def _parse_enum(cls, value, position: str, fname: str):
    try:
        return cls(value)
    except ValueError:
        valid = "|".join(m.value for m in cls)
        raise WorkloadError(f"{position}: invalid {fname} {value!r} (expected {valid})") from None


def _parse_number(value, position: str, fname: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise WorkloadError(f"{position}: field {fname!r} must be a number, got {value!r}")
    return float(value)


def workload_from_dict(doc, source: str = "<memory>") -> WorkloadSpec:
    """Validate and build a WorkloadSpec from a parsed workload document."""
    if not isinstance(doc, dict):
        raise WorkloadError(f"{source}: workload document must be an object")
    unknown = set(doc) - {"name", "tasks"}
    if unknown:
        raise WorkloadError(f"{source}: unknown top-level keys {sorted(unknown)}")
    name = doc.get("name")
    if not isinstance(name, str):
        raise WorkloadError(f"{source}: field 'name' must be a string")
    records = doc.get("tasks")
    if not isinstance(records, list):
        raise WorkloadError(f"{source}: field 'tasks' must be a list")

    tasks = []
    for i, rec in enumerate(records):
        position = f"{source}: tasks[{i}]"
        if not isinstance(rec, dict):
            raise WorkloadError(f"{position}: task record must be an object")
        missing = _TASK_KEYS - set(rec)
        if missing:
            raise WorkloadError(f"{position}: missing keys {sorted(missing)}")
        unknown = set(rec) - _TASK_KEYS
        if unknown:
            raise WorkloadError(f"{position}: unknown keys {sorted(unknown)}")
        if isinstance(rec["id"], bool) or not isinstance(rec["id"], int):
            raise WorkloadError(f"{position}: field 'id' must be an integer")
        if isinstance(rec["owner"], bool) or not isinstance(rec["owner"], int):
            raise WorkloadError(f"{position}: field 'owner' must be an integer")
        tasks.append(
            TaskSpec(
                task_id=rec["id"],
                owner_vehicle=rec["owner"],
                size=_parse_number(rec["size"], position, "size"),
                privacy=_parse_enum(PrivacyClass, rec["privacy"], position, "privacy"),
                rt_class=_parse_enum(RealTimeClass, rec["rt"], position, "rt"),
                accuracy=_parse_enum(AccuracyClass, rec["accuracy"], position, "accuracy"),
                arrival_time=_parse_number(rec["arrival"], position, "arrival"),
                deadline=_parse_number(rec["deadline"], position, "deadline"),
            )
        )
    return WorkloadSpec.build(name, tasks)


def canonical_workload_bytes(workload: WorkloadSpec) -> bytes:
    """Canonical serialization: tasks sorted by (arrival, id), keys sorted, compact."""
    return (json.dumps(workload_to_dict(workload), sort_keys=True, separators=(",", ":")) + "\n").encode()


def save_workload(workload: WorkloadSpec, path) -> None:
    with open(path, "wb") as fh:
        fh.write(canonical_workload_bytes(workload))


def load_workload(path) -> WorkloadSpec:
    """Load a workload file, rejecting (never repairing) invalid records."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise WorkloadError(f"{path}: parse failure at line {exc.lineno} column {exc.colno}") from exc
    return workload_from_dict(doc, source=str(path))
