import json

import numpy as np

from heatnet.cli import main
from heatnet.hmap_io import read_matrix


class TestTrainCommand:
    def test_train_writes_checkpoint(self, dataset_n5, tmp_path, capsys):
        out = tmp_path / "model.pt"
        rc = main(
            [
                "train",
                "--data", str(dataset_n5),
                "--out", str(out),
                "--epochs", "2",
                "--batch-size", "2",
                "--width", "16",
                "--depth", "1",
                "--heads", "2",
            ]
        )
        assert rc == 0
        assert out.exists()
        assert "epoch 0" in capsys.readouterr().out


class TestEmitCommand:
    def test_end_to_end(self, dataset_n5, tmp_path):
        model_path = tmp_path / "model.pt"
        main(
            [
                "train",
                "--data", str(dataset_n5),
                "--out", str(model_path),
                "--epochs", "1",
                "--batch-size", "4",
                "--width", "16",
                "--depth", "1",
                "--heads", "2",
            ]
        )
        sample = dataset_n5 / "sample_00000"
        duals = json.loads((sample / "duals.json").read_text())
        duals_path = tmp_path / "duals.jsonl"
        duals_path.write_text(json.dumps(duals) + "\n" + json.dumps([0.0] * 6) + "\n")
        out_dir = tmp_path / "maps"
        rc = main(
            [
                "emit",
                "--model", str(model_path),
                "--instance", str(sample / "instance.json"),
                "--duals", str(duals_path),
                "--out-dir", str(out_dir),
            ]
        )
        assert rc == 0
        T = read_matrix(out_dir / "iter_000001.hmap")
        assert T.shape == (6, 6)
        assert np.allclose(T.sum(axis=1), 1.0, atol=1e-6)
