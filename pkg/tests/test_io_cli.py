import json

import numpy as np
import pytest

import hodgedec as hd
from hodgedec import io
from hodgedec.cli import main
from hodgedec.errors import ChecksumError
from hodgedec.simplicial import Cochain


@pytest.fixture()
def small_mesh(tmp_path, discretize):
    mesh, cx, stars = discretize(1.0, 1.0, 0.2)
    path = tmp_path / "mesh.json"
    io.save_mesh(mesh, path)
    return mesh, cx, stars, path


class TestFiles:
    def test_mesh_roundtrip(self, small_mesh):
        mesh, _, _, path = small_mesh
        loaded = io.load_mesh(path)
        np.testing.assert_array_equal(loaded.vertices, mesh.vertices)
        np.testing.assert_array_equal(loaded.triangles, mesh.triangles)
        assert loaded.curvature == mesh.curvature
        assert io.mesh_checksum(loaded) == io.mesh_checksum(mesh)

    def test_cochain_roundtrip(self, small_mesh, tmp_path, rng):
        mesh, cx, _, _ = small_mesh
        c = Cochain(1, rng.standard_normal(cx.num_edges))
        path = tmp_path / "form.json"
        io.save_cochain(c, mesh, path)
        loaded = io.load_cochain(path, mesh)
        assert loaded.degree == 1
        np.testing.assert_array_equal(loaded.values, c.values)

    def test_checksum_mismatch_rejected(self, small_mesh, tmp_path, rng):
        mesh, cx, _, _ = small_mesh
        c = Cochain(1, rng.standard_normal(cx.num_edges))
        path = tmp_path / "form.json"
        io.save_cochain(c, mesh, path)
        other = hd.ball_mesh(1.0, 1.0, 0.25)
        with pytest.raises(ChecksumError):
            io.load_cochain(path, other)


class TestCli:
    def test_mesh_then_decompose_then_stream(self, tmp_path):
        mesh_path = tmp_path / "m.json"
        assert main(["mesh", "--curvature", "1", "--radius", "1", "--edge", "0.2",
                     "--out", str(mesh_path)]) == 0
        split_path = tmp_path / "split.json"
        assert main(["decompose", "--mesh", str(mesh_path), "--form", "builtin:mixed",
                     "--space", "h1", "--seed", "2", "--out", str(split_path)]) == 0
        report = json.loads(split_path.read_text())
        assert report["diagnostics"]["reconstruction_residual"] <= 1e-8
        assert report["diagnostics"]["orthogonality"]["defect"] <= 1e-8
        stream_path = tmp_path / "stream.json"
        assert main(["stream", "--mesh", str(mesh_path), "--form", "builtin:coexact",
                     "--seed", "2", "--out", str(stream_path)]) == 0
        stream = json.loads(stream_path.read_text())
        assert stream["residual"] <= 1e-10

    def test_verify_tensor_passes(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        assert main(["verify-tensor", "--max-dim", "4", "--trials", "10", "--seed", "7",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["all_passed"] is True
        assert len(payload["results"]) == 3 + 4 + 5  # every (N, k) pair up to N=4
        printed = capsys.readouterr().out
        assert "N=4 k=2" in printed

    def test_unknown_command_is_validation_error(self, capsys):
        assert main(["frobnicate"]) == 1
        assert main(["decompose", "--no-such-flag"]) == 1
        assert main([]) == 1

    def test_checksum_mismatch_exit_code(self, tmp_path, rng):
        mesh_a = tmp_path / "a.json"
        mesh_b = tmp_path / "b.json"
        main(["mesh", "--curvature", "0", "--radius", "1", "--edge", "0.2", "--out", str(mesh_a)])
        main(["mesh", "--curvature", "0", "--radius", "1", "--edge", "0.25", "--out", str(mesh_b)])
        mesh = io.load_mesh(mesh_a)
        cx = hd.build_complex(mesh)
        form_path = tmp_path / "form.json"
        io.save_cochain(Cochain(1, np.zeros(cx.num_edges)), mesh, form_path)
        code = main(["decompose", "--mesh", str(mesh_b), "--form", str(form_path),
                     "--out", str(tmp_path / "out.json")])
        assert code == 1

    def test_deterministic_reports_are_byte_identical(self, tmp_path):
        mesh_path = tmp_path / "m.json"
        main(["mesh", "--curvature", "1", "--radius", "1", "--edge", "0.2",
              "--out", str(mesh_path)])
        path = tmp_path / "report.json"
        outs = []
        for _ in range(2):
            assert main(["decompose", "--mesh", str(mesh_path), "--form", "builtin:mixed",
                         "--seed", "5", "--deterministic", "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
        assert b"wall_clock" not in outs[0]

    def test_mesh_output_is_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        for p in (p1, p2):
            main(["mesh", "--curvature", "1", "--radius", "1.2", "--edge", "0.15",
                  "--out", str(p)])
        assert p1.read_bytes() == p2.read_bytes()

    def test_convergence_csv(self, tmp_path):
        out = tmp_path / "conv.csv"
        assert main(["convergence", "--curvature", "1", "--radius", "1.5", "--levels", "2",
                     "--edge", "0.2", "--form", "builtin:dx", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[:2] == ["level", "h"]
        assert "delta_residual_input" in header
        rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
        assert len(rows) == 2
        r0 = float(rows[0]["delta_residual_input"])
        r1 = float(rows[1]["delta_residual_input"])
        assert r1 < r0

    def test_truncate_distances_decrease(self, tmp_path):
        out = tmp_path / "trunc.json"
        assert main(["truncate", "--radii", "1.1,1.3,1.5", "--curvature", "1",
                     "--radius", "3", "--edge", "0.15", "--form", "builtin:dx",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        dists = [row["distance"] for row in payload["distances"]]
        assert dists[0] > dists[1] > dists[2]

    def test_truncate_rejects_oversized_cutoff(self, tmp_path):
        code = main(["truncate", "--radii", "2.0", "--curvature", "1",
                     "--radius", "3", "--edge", "0.15", "--form", "builtin:dx",
                     "--out", str(tmp_path / "t.json")])
        assert code == 1
