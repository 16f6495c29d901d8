import hashlib
import json

import numpy as np

from loopsim.store import MANIFEST_NAME, RunManifest, RunStore, write_json, write_table


class TestTables:
    def test_header_and_precision(self, tmp_path):
        path = write_table(tmp_path / "nested" / "t.csv", ("t", "i"), [[1e-9, 1.0 / 3.0], [2e-9, 2.0 / 3.0]])
        lines = path.read_text().splitlines()
        assert lines[0] == "t,i"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data[0, 1] == 1.0 / 3.0
        assert data.shape == (2, 2)

    def test_empty_table_keeps_header(self, tmp_path):
        path = write_table(tmp_path / "empty.csv", ("neuron", "t_fire"), [])
        assert path.read_text() == "neuron,t_fire\n"

    def test_json_handles_numpy(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"b": np.float64(0.5), "a": np.arange(3)})
        assert json.loads(path.read_text()) == {"a": [0, 1, 2], "b": 0.5}
        assert path.read_text().index('"a"') < path.read_text().index('"b"')


class TestRunStore:
    def test_manifest_lists_outputs_with_digests(self, tmp_path):
        store = RunStore(tmp_path)
        table = store.table("x.csv", ("x",), [[1.0], [2.0]])
        store.json("summary.json", {"ok": True})
        store.adopt([table])
        store.manifest(RunManifest(preset="demo", config_hash="abc", seed=1, version="1.0.0"))

        manifest = store.read_manifest()
        assert manifest["preset"] == "demo"
        assert [o["file"] for o in manifest["outputs"]] == ["x.csv", "summary.json"]
        digest = hashlib.sha256(table.read_bytes()).hexdigest()
        assert manifest["outputs"][0]["sha256"] == digest
        assert (tmp_path / MANIFEST_NAME).exists()

    def test_no_manifest_yet(self, tmp_path):
        assert RunStore(tmp_path / "fresh").read_manifest() is None
