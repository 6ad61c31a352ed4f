import numpy as np
import pytest

from dualfield import load_character_table, su2_dual, torus_dual


@pytest.fixture(scope="session")
def su2():
    return su2_dual()


@pytest.fixture(scope="session")
def torus():
    return torus_dual()


@pytest.fixture(scope="session")
def s3():
    return load_character_table("s3")


@pytest.fixture(scope="session")
def c2():
    return load_character_table("c2")


@pytest.fixture(scope="session")
def c3():
    return load_character_table("c3")


@pytest.fixture(scope="session")
def c5():
    return load_character_table("c5")


@pytest.fixture(scope="session")
def q8():
    return load_character_table("q8")


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
