import numpy as np
import pytest

from geostiff import robot


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def anthro3r():
    return robot.bundled_model("anthro3r")


@pytest.fixture(scope="session")
def iiwa7():
    return robot.bundled_model("iiwa7")


def random_q(rng, model, scale=1.5):
    """Random configuration within limits (scaled down to stay comfortably inside)."""
    limits = model.limits()
    lo, hi = limits[:, 0], limits[:, 1]
    q = rng.uniform(np.maximum(lo, -scale), np.minimum(hi, scale))
    return q
