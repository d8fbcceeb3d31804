import math
import random

import pytest

import vecsim as v
from vecsim.oracle import verify_best

PRIV = v.PrivacyClass
RT = v.RealTimeClass
ACC = v.AccuracyClass

_SLACK = {RT.HARD: (1.2, 2.0), RT.FIRM: (2.0, 5.0), RT.SOFT: (5.0, 20.0)}


def random_instance(seed, max_tasks=5, distinct_owners=True):
    """Tiny seeded instance; distinct owners keep every OBU uncontended."""
    rng = random.Random(seed)
    n = rng.randint(1, max_tasks)
    vehicles = n if distinct_owners else max(2, n // 2)
    tasks = []
    for i in range(n):
        size = math.exp(rng.uniform(math.log(50.0), math.log(500.0)))
        privacy = rng.choice(list(PRIV))
        rt = rng.choice(list(RT))
        accuracy = rng.choice(list(ACC))
        deadline = size / 25.0 * rng.uniform(*_SLACK[rt])
        owner = i if distinct_owners else rng.randrange(vehicles)
        tasks.append(v.TaskSpec(i, owner, size, privacy, rt, accuracy, 0.0, deadline))
    platform = v.build_platform(v.PlatformConfig(vehicles=vehicles, rsu_count=2))
    return platform, v.WorkloadSpec.build(f"inst-{seed}", tasks)


def test_single_private_task_matches_pvec(small_platform, mk_task):
    task = mk_task(tid=0, owner=0, size=25.0, privacy=PRIV.PRIVATE, rt=RT.HARD, deadline=5.0)
    w = v.WorkloadSpec.build("one", [task])
    result = v.brute_force_best(small_platform, w, honor_privacy=True)
    assert result.evaluated == 1
    from vecsim.infrastructure import CapacityLedger

    expected = v.pvec_assign(task, small_platform, CapacityLedger(small_platform), 0.0)
    assert result.best_assignment == (expected,)


def test_empty_instance_rejected(small_platform):
    with pytest.raises(ValueError, match="empty"):
        v.brute_force_best(small_platform, v.WorkloadSpec.build("none", []))


def test_oversized_instance_rejected_naming_cap(mk_task):
    platform = v.build_platform(v.PlatformConfig(vehicles=13))
    tasks = [mk_task(tid=i, owner=i) for i in range(13)]
    with pytest.raises(ValueError, match="12"):
        v.brute_force_best(platform, v.WorkloadSpec.build("big", tasks))


def test_evaluated_counts_the_option_product(small_platform, mk_task):
    tasks = [
        mk_task(tid=0, privacy=PRIV.PUBLIC, accuracy=ACC.APPROXIMATE),   # 3 layers x 2 modes
        mk_task(tid=1, privacy=PRIV.RESTRICTED, accuracy=ACC.ACCURATE),  # 2 layers x 1 mode
        mk_task(tid=2, privacy=PRIV.PRIVATE, accuracy=ACC.APPROXIMATE),  # 1 layer x 2 modes
    ]
    w = v.WorkloadSpec.build("w", tasks)
    assert v.brute_force_best(small_platform, w, honor_privacy=True).evaluated == 6 * 2 * 2
    assert v.brute_force_best(small_platform, w, honor_privacy=False).evaluated == 6 * 3 * 6


def test_unconstrained_search_never_scores_below_constrained(small_platform, mk_task):
    tasks = [
        mk_task(tid=0, privacy=PRIV.PRIVATE, size=400.0, rt=RT.HARD, deadline=20.0),
        mk_task(tid=1, privacy=PRIV.RESTRICTED, size=100.0, rt=RT.FIRM, deadline=12.0),
    ]
    w = v.WorkloadSpec.build("w", tasks)
    constrained = v.brute_force_best(small_platform, w, honor_privacy=True)
    unconstrained = v.brute_force_best(small_platform, w, honor_privacy=False)
    assert unconstrained.best_qos >= constrained.best_qos


def test_honor_privacy_restricts_layers(small_platform, mk_task):
    task = mk_task(tid=0, privacy=PRIV.RESTRICTED)
    w = v.WorkloadSpec.build("w", [task])
    result = v.brute_force_best(small_platform, w, honor_privacy=True)
    assert result.evaluated == 2  # user layer or cloud, never RSU
    for a in result.best_assignment:
        assert a.layer is not v.Layer.RSU


def test_consistency_resimulation_reproduces_best_qos(small_platform, mk_task):
    tasks = [
        mk_task(tid=0, owner=0, size=100.0, privacy=PRIV.PUBLIC, rt=RT.HARD,
                deadline=6.0, accuracy=ACC.APPROXIMATE),
        mk_task(tid=1, owner=1, size=200.0, privacy=PRIV.RESTRICTED, rt=RT.FIRM, deadline=25.0),
        mk_task(tid=2, owner=0, size=50.0, privacy=PRIV.PRIVATE, rt=RT.SOFT, deadline=30.0),
    ]
    w = v.WorkloadSpec.build("w", tasks)
    result = v.brute_force_best(small_platform, w, honor_privacy=False)
    assert verify_best(small_platform, w, result) == result.best_qos


def test_dominance_over_policies_on_distinct_owner_instances():
    for seed in range(12):
        platform, w = random_instance(seed, distinct_owners=True)
        best = v.brute_force_best(platform, w, honor_privacy=False)
        for kind in v.PolicyKind:
            score = v.summarize(v.run(platform, w, kind, seed), platform).qos
            assert best.best_qos >= score - 1e-12, (seed, kind)


def test_dominance_over_pvec_and_random_with_owner_contention():
    # superset search space and identical engine semantics make this a theorem
    for seed in range(8):
        platform, w = random_instance(100 + seed, distinct_owners=False)
        best = v.brute_force_best(platform, w, honor_privacy=False)
        for kind in (v.PolicyKind.PVEC, v.PolicyKind.RANDOM):
            score = v.summarize(v.run(platform, w, kind, seed), platform).qos
            assert best.best_qos >= score - 1e-12, (seed, kind)


def test_tie_break_is_lexicographically_smallest(small_platform, mk_task):
    # both orderings of two identical tasks on an uncontended platform tie;
    # the first enumerated vector (user layer, accurate) must win
    tasks = [mk_task(tid=0, owner=0, size=50.0, deadline=1e9),
             mk_task(tid=1, owner=1, size=50.0, deadline=1e9)]
    w = v.WorkloadSpec.build("w", tasks)
    result = v.brute_force_best(small_platform, w, honor_privacy=False)
    for a in result.best_assignment:
        assert a.layer is v.Layer.USER_LAYER
        assert a.mode is v.ExecutionMode.ACCURATE
