import numpy as np
import pytest

from amaflow import (
    SolveConfig,
    example_problem,
    example_reference,
    example_schedule,
    example_start,
)


@pytest.fixture(scope="session")
def ex_problem():
    return example_problem()


@pytest.fixture(scope="session")
def ex_reference():
    return example_reference()


@pytest.fixture(scope="session")
def ex_start():
    return example_start()


@pytest.fixture(scope="session")
def ex_sched_c025():
    return example_schedule("c025", 0.99)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def quick_cfg():
    return SolveConfig(max_iters=20000, tol_kkt=1e-6, tol_feas=1e-6, record_every=100)
