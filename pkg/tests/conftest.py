import numpy as np
import pytest

from fbmcrw import EnsembleConfig, replication_seed, simulate_fbm


def replicate(measure, steps: int, walks: int, seed: int,
              count: int) -> np.ndarray:
    """`count` independent trajectories, one per row."""
    rows = np.empty((count, steps + 1))
    for rep in range(count):
        cfg = EnsembleConfig(measure, steps, walks,
                             replication_seed(seed, rep))
        rows[rep] = simulate_fbm(cfg).values
    return rows


@pytest.fixture
def tmp_report(tmp_path):
    return str(tmp_path / "report.txt")
