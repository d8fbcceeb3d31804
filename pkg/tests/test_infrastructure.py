import random

import pytest

import vecsim as v
from vecsim.infrastructure import CapacityLedger


def test_default_platform_shape(default_platform):
    p = default_platform
    assert p.vehicle_count == 100
    assert len(p.rsus) == 6
    assert len(p.cloud_nodes) == 1
    cloud = p.cloud_nodes[0]
    assert cloud.cores == 16
    assert p.srp == 0.959
    assert p.k_cloud == 1.0


def test_default_speeds_and_latencies(default_platform):
    p = default_platform
    assert p.obu(0).speed == 25.0 and p.obu(0).cores == 1 and p.obu(0).link_latency == 0.0
    assert p.rsus[0].speed == 100.0 and p.rsus[0].cores == 4 and p.rsus[0].link_latency == 0.05
    assert p.cloud_nodes[0].speed == 200.0 and p.cloud_nodes[0].link_latency == 0.5


def test_one_obu_per_vehicle(default_platform):
    vehicles = {n.vehicle for n in default_platform.nodes if n.layer is v.Layer.USER_LAYER}
    assert vehicles == set(range(100))


@pytest.mark.parametrize("field,value", [
    ("vehicles", 0), ("obu_speed", 0.0), ("rsu_count", 0), ("rsu_speed", -1.0),
    ("rsu_cores", 0), ("cloud_speed", 0.0), ("cloud_cores", 0),
])
def test_nonpositive_config_rejected_naming_field(field, value):
    cfg = v.PlatformConfig(**{field: value})
    with pytest.raises(v.ConfigError, match=field):
        v.build_platform(cfg)


def test_bad_k_and_srp_rejected():
    with pytest.raises(v.ConfigError, match="k_cloud"):
        v.build_platform(v.PlatformConfig(k_cloud=1.5))
    with pytest.raises(v.ConfigError, match="srp"):
        v.build_platform(v.PlatformConfig(srp=-0.1))


def test_node_spec_layer_vehicle_consistency():
    with pytest.raises(v.ConfigError, match="vehicle"):
        v.NodeSpec(node_id=0, layer=v.Layer.USER_LAYER, speed=1.0, cores=1, link_latency=0.0)
    with pytest.raises(v.ConfigError, match="vehicle"):
        v.NodeSpec(node_id=0, layer=v.Layer.RSU, speed=1.0, cores=1, link_latency=0.0, vehicle=3)


# --- availability --------------------------------------------------------------

def test_idle_platform_available_everywhere(small_platform):
    ledger = CapacityLedger(small_platform)
    assert ledger.available(v.Layer.USER_LAYER, vehicle=0, t=0.0)
    assert ledger.available(v.Layer.RSU, t=0.0)
    assert ledger.available(v.Layer.CLOUD, t=0.0)


def test_busy_obu_not_available_until_free(small_platform, mk_task):
    ledger = CapacityLedger(small_platform)
    ledger.admit(small_platform.obu(0), mk_task(), start=0.0, duration=10.0)
    assert not ledger.available(v.Layer.USER_LAYER, vehicle=0, t=5.0)
    assert ledger.available(v.Layer.USER_LAYER, vehicle=0, t=10.0)


def test_other_idle_obus_do_not_count_for_owner(small_platform, mk_task):
    # privacy rule: only the owner's OBU is eligible on the user layer
    ledger = CapacityLedger(small_platform)
    ledger.admit(small_platform.obu(0), mk_task(), start=0.0, duration=10.0)
    assert not ledger.available(v.Layer.USER_LAYER, vehicle=0, t=5.0)
    assert ledger.available(v.Layer.USER_LAYER, vehicle=1, t=5.0)


def test_available_vehicle_argument_contract(small_platform):
    ledger = CapacityLedger(small_platform)
    with pytest.raises(ValueError):
        ledger.available(v.Layer.USER_LAYER, t=0.0)
    with pytest.raises(ValueError):
        ledger.available(v.Layer.RSU, vehicle=0, t=0.0)


# --- admission ------------------------------------------------------------------

def test_admit_sets_busy_until(small_platform, mk_task):
    ledger = CapacityLedger(small_platform)
    node = small_platform.obu(0)
    core = ledger.admit(node, mk_task(), start=1.0, duration=2.0)
    assert core == 0
    assert ledger.core_times(node.node_id) == (3.0,)


def test_second_admission_on_busy_core_rejected(small_platform, mk_task):
    ledger = CapacityLedger(small_platform)
    node = small_platform.obu(0)
    ledger.admit(node, mk_task(tid=0), start=0.0, duration=2.0)
    with pytest.raises(v.CapacityError, match=f"node {node.node_id}"):
        ledger.admit(node, mk_task(tid=1), start=0.0, duration=2.0)


def test_sixteen_parallel_cloud_admissions(default_platform, mk_task):
    ledger = CapacityLedger(default_platform)
    cloud = default_platform.cloud_nodes[0]
    for i in range(16):
        ledger.admit(cloud, mk_task(tid=i), start=0.0, duration=1.0)
    with pytest.raises(v.CapacityError):
        ledger.admit(cloud, mk_task(tid=16), start=0.0, duration=1.0)


def test_elastic_cloud_grows_past_core_count(mk_task):
    p = v.build_platform(v.PlatformConfig(cloud_cores=2, elastic=True))
    ledger = CapacityLedger(p)
    cloud = p.cloud_nodes[0]
    for i in range(5):
        ledger.admit(cloud, mk_task(tid=i), start=0.0, duration=1.0)
    assert len(ledger.core_times(cloud.node_id)) == 5
    assert ledger.available(v.Layer.CLOUD, t=0.0)
    assert ledger.earliest_free(cloud) == 0.0


def test_earliest_free_is_min_over_cores(small_platform, mk_task):
    ledger = CapacityLedger(small_platform)
    cloud = small_platform.cloud_nodes[0]  # 2 cores
    ledger.admit(cloud, mk_task(tid=0), start=0.0, duration=4.0)
    assert ledger.earliest_free(cloud) == 0.0
    ledger.admit(cloud, mk_task(tid=1), start=0.0, duration=2.0)
    assert ledger.earliest_free(cloud) == 2.0


def test_conservation_of_admitted_durations(small_platform, mk_task):
    # total busy-interval length equals the sum of admitted durations
    rng = random.Random(0)
    ledger = CapacityLedger(small_platform)
    node = small_platform.cloud_nodes[0]
    total = 0.0
    t = 0.0
    for i in range(50):
        d = rng.uniform(0.1, 3.0)
        t = max(t, ledger.earliest_free(node))
        ledger.admit(node, mk_task(tid=i), start=t, duration=d)
        total += d
    assert ledger.admitted_seconds[node.node_id] == pytest.approx(total, rel=1e-12)
    # per-layer admitted work defaults to duration * speed
    assert ledger.admitted_work[v.Layer.CLOUD] == pytest.approx(total * node.speed, rel=1e-12)


def test_busy_until_never_decreases(small_platform, mk_task):
    rng = random.Random(1)
    ledger = CapacityLedger(small_platform)
    node = small_platform.obu(1)
    last = 0.0
    for i in range(20):
        start = max(rng.uniform(0, 5) + last, ledger.earliest_free(node))
        ledger.admit(node, mk_task(tid=i), start=start, duration=rng.uniform(0.1, 1.0))
        now = ledger.core_times(node.node_id)[0]
        assert now >= last
        last = now
