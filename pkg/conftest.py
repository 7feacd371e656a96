"""Shared pytest setup: testing configuration and the src/ import path."""
import os
import sys
from pathlib import Path

os.environ.setdefault('ENVIRONMENT', 'testing')

# Add src directory to Python path for imports
src_dir = Path(__file__).parent / 'src'
if str(src_dir) not in sys.path:
    sys.path.insert(0, str(src_dir))

import numpy as np
import pytest

from controllers.state_controller import ghz, pure_density, w_state


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def bell():
    """|phi+><phi+| on two qubits."""
    return pure_density(np.array([1, 0, 0, 1]) / np.sqrt(2), [2, 2])


@pytest.fixture
def ghz3():
    return ghz(2, 3)


@pytest.fixture
def w3():
    return w_state(3)
