import pytest

from modiagen import build_core_table, build_weighted_table


@pytest.fixture(scope="session")
def core_8_3():
    return build_core_table(8, 3)


@pytest.fixture(scope="session")
def core_10_2():
    return build_core_table(10, 2)


@pytest.fixture(scope="session")
def weighted_10_3_2():
    return build_weighted_table(10, 3, 2)


@pytest.fixture(scope="session")
def weighted_8_2_2():
    return build_weighted_table(8, 2, 2)
