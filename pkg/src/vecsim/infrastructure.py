"""Tiered platform model: per-vehicle OBUs, shared RSUs, and a cloud pool.

The platform is immutable once built.  The per-run CapacityLedger tracks
core busy-until times and enforces the admission rule that used resources
never exceed available resources on any layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import enum

from .errors import CapacityError, ConfigError


class Layer(enum.Enum):
    """Where a task executes: a vehicle's own OBU, a roadside unit, or the cloud."""

    USER_LAYER = "user_layer"
    RSU = "rsu"
    CLOUD = "cloud"


@dataclass(frozen=True)
class NodeSpec:
    """A processing node.  ``vehicle`` is set exactly for user-layer OBUs."""

    node_id: int
    layer: Layer
    speed: float  # work-units per second
    cores: int
    link_latency: float  # one-way seconds to reach the node
    vehicle: int | None = None

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ConfigError(f"node {self.node_id}: speed must be > 0, got {self.speed}")
        if self.cores < 1:
            raise ConfigError(f"node {self.node_id}: cores must be >= 1, got {self.cores}")
        if self.link_latency < 0:
            raise ConfigError(f"node {self.node_id}: link_latency must be >= 0")
        if self.layer is Layer.USER_LAYER and self.vehicle is None:
            raise ConfigError(f"node {self.node_id}: user-layer node requires a vehicle index")
        if self.layer is not Layer.USER_LAYER and self.vehicle is not None:
            raise ConfigError(f"node {self.node_id}: only user-layer nodes carry a vehicle index")


@dataclass(frozen=True)
class PlatformConfig:
    """Shape of the tiered platform; defaults follow the evaluation setup."""

    vehicles: int = 100
    obu_speed: float = 25.0
    rsu_count: int = 6
    rsu_speed: float = 100.0
    rsu_cores: int = 4
    cloud_speed: float = 200.0
    cloud_cores: int = 16
    elastic: bool = False
    latency_rsu: float = 0.05
    latency_cloud: float = 0.5
    srp: float = 0.959  # server rent price, dollars per hour
    k_cloud: float = 1.0  # cloud privacy coefficient


@dataclass(frozen=True)
class Platform:
    """The node inventory plus cloud pricing and privacy coefficient."""

    nodes: tuple
    srp: float
    k_cloud: float
    elastic: bool = False
    _by_id: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _obus: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _rsus: tuple = field(init=False, repr=False, compare=False, default=())
    _cloud: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        if self.srp < 0:
            raise ConfigError(f"srp must be >= 0, got {self.srp}")
        if not 0.0 <= self.k_cloud <= 1.0:
            raise ConfigError(f"k_cloud must be in [0, 1], got {self.k_cloud}")
        by_id, obus = {}, {}
        rsus, cloud = [], []
        for node in self.nodes:
            if node.node_id in by_id:
                raise ConfigError(f"duplicate node_id {node.node_id}")
            by_id[node.node_id] = node
            if node.layer is Layer.USER_LAYER:
                if node.vehicle in obus:
                    raise ConfigError(f"vehicle {node.vehicle} has more than one OBU")
                obus[node.vehicle] = node
            elif node.layer is Layer.RSU:
                rsus.append(node)
            else:
                cloud.append(node)
        if not obus:
            raise ConfigError("platform has no user layer (no OBU nodes)")
        if not cloud:
            raise ConfigError("platform has no cloud pool")
        rsus.sort(key=lambda n: n.node_id)
        cloud.sort(key=lambda n: n.node_id)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_obus", obus)
        object.__setattr__(self, "_rsus", tuple(rsus))
        object.__setattr__(self, "_cloud", tuple(cloud))

    @property
    def vehicle_count(self) -> int:
        return len(self._obus)

    @property
    def rsus(self) -> tuple:
        return self._rsus

    @property
    def cloud_nodes(self) -> tuple:
        return self._cloud

    def node(self, node_id: int) -> NodeSpec:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise ConfigError(f"unknown node_id {node_id}") from None

    def obu(self, vehicle: int) -> NodeSpec:
        try:
            return self._obus[vehicle]
        except KeyError:
            raise ConfigError(f"no OBU for vehicle {vehicle}") from None


def _positive(value, fname: str):
    if value <= 0:
        raise ConfigError(f"{fname} must be > 0, got {value}")
    return value


def build_platform(config: PlatformConfig) -> Platform:
    """Construct the platform: one OBU per vehicle, the RSU pool, one cloud pool."""
    _positive(config.vehicles, "vehicles")
    _positive(config.obu_speed, "obu_speed")
    _positive(config.rsu_count, "rsu_count")
    _positive(config.rsu_speed, "rsu_speed")
    _positive(config.rsu_cores, "rsu_cores")
    _positive(config.cloud_speed, "cloud_speed")
    _positive(config.cloud_cores, "cloud_cores")
    if config.latency_rsu < 0:
        raise ConfigError(f"latency_rsu must be >= 0, got {config.latency_rsu}")
    if config.latency_cloud < 0:
        raise ConfigError(f"latency_cloud must be >= 0, got {config.latency_cloud}")

    nodes = [
        NodeSpec(node_id=v, layer=Layer.USER_LAYER, speed=config.obu_speed, cores=1,
                 link_latency=0.0, vehicle=v)
        for v in range(config.vehicles)
    ]
    base = config.vehicles
    nodes.extend(
        NodeSpec(node_id=base + i, layer=Layer.RSU, speed=config.rsu_speed,
                 cores=config.rsu_cores, link_latency=config.latency_rsu)
        for i in range(config.rsu_count)
    )
    nodes.append(
        NodeSpec(node_id=base + config.rsu_count, layer=Layer.CLOUD, speed=config.cloud_speed,
                 cores=config.cloud_cores, link_latency=config.latency_cloud)
    )
    return Platform(nodes=tuple(nodes), srp=config.srp, k_cloud=config.k_cloud,
                    elastic=config.elastic)


class CapacityLedger:
    """Per-core busy-until bookkeeping for a single simulation run.

    Admission requires a free core, so simultaneously running tasks never
    exceed a node's core count (used <= available on every layer, with
    equality meaning full occupancy).
    """

    def __init__(self, platform: Platform) -> None:
        self.platform = platform
        self._busy = {n.node_id: [0.0] * n.cores for n in platform.nodes}
        self.admitted_work = {layer: 0.0 for layer in Layer}
        self.admitted_seconds = {n.node_id: 0.0 for n in platform.nodes}

    def core_times(self, node_id: int) -> tuple:
        return tuple(self._busy[node_id])

    def _elastic(self, node: NodeSpec) -> bool:
        return self.platform.elastic and node.layer is Layer.CLOUD

    def earliest_free(self, node: NodeSpec) -> float:
        """Earliest instant at which some core of the node is free."""
        if self._elastic(node):
            return 0.0
        return min(self._busy[node.node_id])

    def available(self, layer: Layer, vehicle: int | None = None, t: float = 0.0) -> bool:
        """True iff an eligible node in the layer has an idle core at time t.

        For the user layer only the owner vehicle's OBU is eligible.
        """
        if layer is Layer.USER_LAYER:
            if vehicle is None:
                raise ValueError("user-layer availability requires a vehicle index")
            return min(self._busy[self.platform.obu(vehicle).node_id]) <= t
        if vehicle is not None:
            raise ValueError("vehicle index only applies to user-layer queries")
        if layer is Layer.CLOUD and self.platform.elastic:
            return True
        candidates = self.platform.rsus if layer is Layer.RSU else self.platform.cloud_nodes
        return any(min(self._busy[n.node_id]) <= t for n in candidates)

    def admit(self, node: NodeSpec, task, start: float, duration: float,
              work: float | None = None) -> int:
        """Occupy one free core of ``node`` for [start, start + duration); returns the core index."""
        if duration < 0:
            raise ValueError(f"duration must be >= 0, got {duration}")
        cores = self._busy[node.node_id]
        free = [i for i, busy in enumerate(cores) if busy <= start]
        if not free:
            if not self._elastic(node):
                raise CapacityError(
                    f"no free core on node {node.node_id} at t={start} "
                    f"(task {getattr(task, 'task_id', task)})"
                )
            cores.append(0.0)
            free = [len(cores) - 1]
        core = min(free, key=lambda i: (cores[i], i))
        cores[core] = start + duration
        self.admitted_work[node.layer] += work if work is not None else duration * node.speed
        self.admitted_seconds[node.node_id] += duration
        return core
