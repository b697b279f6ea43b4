import subprocess
import sys

import pytest


def export_samples(out_dir, n, seed, count):
    """Produce training samples through the solver's public CLI, the file
    interface this package consumes."""
    subprocess.run(
        [
            sys.executable,
            "-m",
            "cgroute.cli",
            "generate",
            "--n", str(n),
            "--seed", str(seed),
            "--out", str(out_dir),
            "--count", str(count),
        ],
        check=True,
        capture_output=True,
    )
    return out_dir


@pytest.fixture(scope="session")
def dataset_n5(tmp_path_factory):
    return export_samples(tmp_path_factory.mktemp("d5"), n=5, seed=77, count=4)


@pytest.fixture(scope="session")
def dataset_n12(tmp_path_factory):
    return export_samples(tmp_path_factory.mktemp("d12"), n=12, seed=88, count=14)


@pytest.fixture(scope="session")
def dataset_n20(tmp_path_factory):
    return export_samples(tmp_path_factory.mktemp("d20"), n=20, seed=99, count=50)
