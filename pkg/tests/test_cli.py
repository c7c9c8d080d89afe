import numpy as np
import pytest

import peakann as pk
from peakann.cli import main
from peakann.data import read_labels, write_fvecs, write_labels
from conftest import FIG_COORDS


@pytest.fixture()
def fig_file(tmp_path):
    path = tmp_path / "fig.fvecs"
    write_fvecs(FIG_COORDS, path)
    return path


def run(argv):
    return main([str(a) for a in argv])


def parse_kv(capsys):
    out = capsys.readouterr().out
    pairs = {}
    for line in out.strip().splitlines():
        key, _, val = line.partition("=")
        pairs[key] = val
    return pairs


class TestClusterCommand:
    def test_figure_threshold_run(self, fig_file, tmp_path, capsys):
        out = tmp_path / "labels.txt"
        code = run([
            "cluster", "--input", fig_file, "--index", "bruteforce", "--k", "1",
            "--density", "kth", "--center", "threshold", "--delta-min", "2.5",
            "--rho-min", "0.70710678", "--output", out,
        ])
        assert code == 0
        assert list(read_labels(out)) == [1, 1, 1, 3, 4, 3]
        kv = parse_kv(capsys)
        assert kv["n_clusters"] == "3"
        assert kv["n_noise"] == "1"
        assert "stage_index_s" in kv
        assert "stage_unionfind_pct" in kv
        assert "total_s" in kv

    def test_vamana_run_prints_metrics(self, tmp_path, capsys):
        pts, labels = pk.generate_gaussian(pk.GaussianSpec(n=400, c=4, d=128, seed=2))
        vec = tmp_path / "g.fvecs"
        truth = tmp_path / "g.labels"
        write_fvecs(pts, vec)
        write_labels(labels, truth)
        code = run([
            "cluster", "--input", vec, "--index", "vamana", "--k", "8", "--L", "16",
            "--Ld", "16", "--R", "16", "--alpha", "1.1", "--center", "product",
            "--nc", "4", "--truth", truth, "--seed", "7",
        ])
        assert code == 0
        kv = parse_kv(capsys)
        assert float(kv["ari"]) > 0.99
        assert 0.0 <= float(kv["homogeneity"]) <= 1.0
        assert 0.0 <= float(kv["completeness"]) <= 1.0

    def test_missing_input_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["cluster", "--input", tmp_path / "absent.fvecs", "--center", "product", "--nc", "2"])
        assert exc.value.code == 2

    def test_center_parameter_required(self, fig_file):
        with pytest.raises(SystemExit) as exc:
            run(["cluster", "--input", fig_file, "--center", "threshold"])
        assert exc.value.code == 2

    def test_bad_beam_config_exits_2(self, fig_file):
        with pytest.raises(SystemExit) as exc:
            run(["cluster", "--input", fig_file, "--center", "product", "--nc", "2",
                 "--k", "8", "--L", "4"])
        assert exc.value.code == 2

    def test_threads_do_not_change_bruteforce_labels(self, tmp_path):
        pts, _ = pk.generate_gaussian(pk.GaussianSpec(n=300, c=3, d=8, seed=4))
        vec = tmp_path / "t.fvecs"
        write_fvecs(pts, vec)
        outs = []
        for t, name in ((1, "a.txt"), (4, "b.txt")):
            out = tmp_path / name
            code = run([
                "cluster", "--input", vec, "--index", "bruteforce", "--k", "4",
                "--center", "product", "--nc", "3", "--threads", t, "--output", out,
            ])
            assert code == 0
            outs.append(read_labels(out))
        assert np.array_equal(outs[0], outs[1])

    def test_state_dump_and_reapply(self, tmp_path, capsys):
        pts, _ = pk.generate_gaussian(pk.GaussianSpec(n=200, c=4, d=8, seed=5))
        vec = tmp_path / "s.fvecs"
        write_fvecs(pts, vec)
        state = tmp_path / "state.npz"
        full_out = tmp_path / "full.txt"
        assert run([
            "cluster", "--input", vec, "--index", "bruteforce", "--k", "4",
            "--center", "product", "--nc", "4", "--state-out", state, "--output", full_out,
        ]) == 0
        # reapply with a different policy, then with the original one
        re_out = tmp_path / "re.txt"
        assert run([
            "cluster", "--state-in", state, "--center", "product", "--nc", "2", "--output", re_out,
        ]) == 0
        assert len(np.unique(read_labels(re_out))) == 2
        same_out = tmp_path / "same.txt"
        assert run([
            "cluster", "--state-in", state, "--center", "product", "--nc", "4", "--output", same_out,
        ]) == 0
        assert np.array_equal(read_labels(same_out), read_labels(full_out))


class TestExactCommand:
    def test_matches_bruteforce_cluster(self, tmp_path):
        pts, _ = pk.generate_gaussian(pk.GaussianSpec(n=150, c=3, d=8, seed=6))
        vec = tmp_path / "e.fvecs"
        write_fvecs(pts, vec)
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        assert run(["exact", "--input", vec, "--k", "4", "--center", "product", "--nc", "3",
                    "--output", a]) == 0
        assert run(["cluster", "--input", vec, "--index", "bruteforce", "--k", "4", "--threshold", "0",
                    "--center", "product", "--nc", "3", "--output", b]) == 0
        assert np.array_equal(read_labels(a), read_labels(b))

    def test_exact_has_no_index_flags(self, tmp_path, fig_file):
        with pytest.raises(SystemExit) as exc:
            run(["exact", "--input", fig_file, "--center", "product", "--nc", "2", "--R", "16"])
        assert exc.value.code == 2


class TestScoreCommand:
    def test_identical_files(self, tmp_path, capsys):
        path = tmp_path / "l.txt"
        write_labels(np.array([0, 0, 1, 1]), path)
        assert run(["score", path, path]) == 0
        kv = parse_kv(capsys)
        assert kv["ari"] == "1.0"

    def test_minus_half_example(self, tmp_path, capsys):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        write_labels(np.array([0, 0, 1, 1]), a)
        write_labels(np.array([0, 1, 0, 1]), b)
        assert run(["score", a, b]) == 0
        kv = parse_kv(capsys)
        assert kv["ari"] == "-0.5"

    def test_mismatched_lengths_exit_2(self, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        write_labels(np.array([0, 0, 1]), a)
        write_labels(np.array([0, 1]), b)
        with pytest.raises(SystemExit) as exc:
            run(["score", a, b])
        assert exc.value.code == 2

    def test_missing_file_exit_2(self, tmp_path):
        a = tmp_path / "a.txt"
        write_labels(np.array([0, 1]), a)
        with pytest.raises(SystemExit) as exc:
            run(["score", a, tmp_path / "nope.txt"])
        assert exc.value.code == 2


class TestGenCommand:
    def test_writes_vectors_and_labels(self, tmp_path, capsys):
        prefix = tmp_path / "data"
        assert run(["gen", "--n", "60", "--c", "3", "--d", "8", "--seed", "1", "--out", prefix]) == 0
        pts = pk.read_vectors(f"{prefix}.fvecs")
        labels = read_labels(f"{prefix}.labels")
        assert (pts.n, pts.d) == (60, 8)
        assert labels.shape == (60,)

    def test_deterministic(self, tmp_path):
        p1 = tmp_path / "d1"
        p2 = tmp_path / "d2"
        for p in (p1, p2):
            assert run(["gen", "--n", "40", "--c", "2", "--d", "4", "--seed", "3", "--out", p]) == 0
        b1 = (tmp_path / "d1.fvecs").read_bytes()
        b2 = (tmp_path / "d2.fvecs").read_bytes()
        assert b1 == b2

    def test_f32bin_output(self, tmp_path):
        prefix = tmp_path / "bin"
        assert run(["gen", "--n", "20", "--c", "2", "--d", "4", "--format", "f32bin", "--out", prefix]) == 0
        assert pk.read_vectors(f"{prefix}.f32bin").n == 20

    def test_c_greater_than_n_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["gen", "--n", "3", "--c", "5", "--out", tmp_path / "x"])
        assert exc.value.code == 2


def test_corrupt_input_exits_2(tmp_path):
    bad = tmp_path / "bad.fvecs"
    bad.write_bytes(b"\x02\x00\x00\x00\x00")
    code = run(["cluster", "--input", bad, "--center", "product", "--nc", "2"])
    assert code == 2
