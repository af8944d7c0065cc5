import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from rclust.dataio import synth_dataset  # noqa: E402
from rclust.randkit import derive_stream  # noqa: E402


@pytest.fixture(scope="session")
def sine_dataset():
    return synth_dataset("blobs-sine", 40, 128, 2, derive_stream(7, "fixture"))


@pytest.fixture(scope="session")
def noise_dataset():
    return synth_dataset("white-noise", 12, 200, 1, derive_stream(3, "fixture"))
