import pytest

import vecsim as v


@pytest.fixture(scope="session")
def default_platform():
    return v.build_platform(v.PlatformConfig())


@pytest.fixture
def small_platform():
    """2 vehicles (OBU ids 0-1), 2 single-core RSUs (ids 2-3), cloud id 4."""
    return v.build_platform(
        v.PlatformConfig(vehicles=2, rsu_count=2, rsu_cores=1, cloud_cores=2)
    )


@pytest.fixture
def mk_task():
    def make(tid=0, owner=0, size=100.0, privacy=v.PrivacyClass.PUBLIC,
             rt=v.RealTimeClass.SOFT, accuracy=v.AccuracyClass.ACCURATE,
             arrival=0.0, deadline=1e9):
        return v.TaskSpec(
            task_id=tid,
            owner_vehicle=owner,
            size=size,
            privacy=privacy,
            rt_class=rt,
            accuracy=accuracy,
            arrival_time=arrival,
            deadline=deadline,
        )

    return make
