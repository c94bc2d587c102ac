import time

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def desk_run(tmp_path_factory):
    """500-sample N=L=20 dataset with a CNN trained on its train split."""
    from uavloc.harness.dataset import DatasetTemplate, generate_dataset
    from uavloc.learning import DatasetSplit, TrainConfig, save_model, train_cnn

    tic = time.perf_counter()
    ds = generate_dataset(500, DatasetTemplate(n_spots=20, meas_per_spot=20), seed=1)
    split = DatasetSplit.random(len(ds), seed=0)
    model = train_cnn(list(zip(ds.phis(), ds.tracks)), split, TrainConfig(seed=0))
    elapsed = time.perf_counter() - tic
    path = save_model(model, tmp_path_factory.mktemp("models") / "cnn20.npz")
    return {"dataset": ds, "split": split, "model": model, "path": path, "seconds": elapsed}
