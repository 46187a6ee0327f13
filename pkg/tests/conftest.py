import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ibflow.grid import GridSpec, ScalarField, VectorField


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spec8():
    return GridSpec(8, 8, 0.1)


def random_scalar(spec, rng) -> ScalarField:
    return ScalarField(spec, rng.standard_normal(spec.shape))


def random_vector(spec, rng) -> VectorField:
    return VectorField.from_arrays(
        spec, rng.standard_normal(spec.shape), rng.standard_normal(spec.shape)
    )
