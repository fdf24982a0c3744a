"""Pytest configuration and fixtures."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.models import HyperParams, SpecLimits
from app.services.datagen import default_shape, generate
from app.services.storage import LocalModelStore, ModelStore
from app.services.trainer import fit, train

# Tighter than the service default for tests that look at the pairwise solver alone.
FIXTURE_TOL = 1e-9


@pytest.fixture
def client():
    """Create a test client for the FastAPI app."""
    return TestClient(app)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square_spec():
    """Specification box [-4, 4]^2."""
    return SpecLimits(names=["x", "y"], lsl=[-4.0, -4.0], usl=[4.0, 4.0])


@pytest.fixture(scope="session")
def disk_window():
    """2000 points uniform on the disk of radius 2 at the origin."""
    return generate(default_shape("disk", n=2000, seed=7))


@pytest.fixture(scope="session")
def disk_model(disk_window):
    """Hard-margin model of the disk with the median-heuristic bandwidth."""
    model, source = fit(disk_window, outlier_fraction=1e-6)
    assert source == "heuristic"
    return model


@pytest.fixture(scope="session")
def small_disk_model():
    """Quick model on 300 disk points, s = 2 (wide enough that the origin is inside)."""
    window = generate(default_shape("disk", n=300, seed=3))
    return train(window, HyperParams(bandwidth=2.0, outlier_fraction=1e-6))


@pytest.fixture
def tmp_model_store(tmp_path):
    """Model store writing into the test's temporary directory."""
    return ModelStore(LocalModelStore(tmp_path / "models"))


@pytest.fixture
def sample_train_request():
    """Sample training request for testing."""
    window = generate(default_shape("disk", n=120, seed=11))
    return {
        "observations": window.observations.tolist(),
        "column_names": ["x", "y"],
        "bandwidth": 2.0,
        "outlier_fraction": 1e-6,
    }
