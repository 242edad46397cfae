import numpy as np
import pytest

from vstrips.field import Field


@pytest.fixture(name="f3")
def fixture_f3() -> Field:
    return Field(3)


@pytest.fixture(name="f7")
def fixture_f7() -> Field:
    return Field(7)


@pytest.fixture(name="f8")
def fixture_f8() -> Field:
    return Field.from_order(8)


@pytest.fixture(name="f9")
def fixture_f9() -> Field:
    return Field.from_order(9)


@pytest.fixture(name="rng")
def fixture_rng() -> np.random.Generator:
    return np.random.default_rng(1234)
