import json

import numpy as np
import pytest

from platoonnet.cli import (DEFAULT_CONFIG, build_params, load_config, main,
                            run_op, tv_distance)
from platoonnet.mcp_counts import DiscretePMF


def read_csv(path):
    meta, header, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                meta.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return meta, header, rows


class TestConfig:
    def test_defaults_convert_to_per_meter(self):
        params = build_params(load_config())
        assert params.lambda_r == pytest.approx(0.002)
        assert params.lam == pytest.approx(0.005)

    def test_unknown_key_rejected(self, tmp_path):
        bad = tmp_path / "cfg.json"
        bad.write_text(json.dumps({"lambda_r": 2.0}))
        with pytest.raises(SystemExit):
            load_config(str(bad))

    def test_file_overrides(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"m": 15.0, "a_m": 150.0}))
        cfg = load_config(str(cfg_path))
        assert cfg["m"] == 15.0
        assert cfg["a_m"] == 150.0
        assert cfg["lambda_r_per_km"] == DEFAULT_CONFIG["lambda_r_per_km"]

    def test_cli_overrides_win(self):
        cfg = load_config(None, {"master_seed": 1, "replications": None})
        assert cfg["master_seed"] == 1
        assert cfg["replications"] == DEFAULT_CONFIG["replications"]


class TestTvDistance:
    def test_identical_is_zero(self):
        p = DiscretePMF(np.array([0.5, 0.5]), 0.0)
        assert tv_distance(p, p) == 0.0

    def test_disjoint_is_one(self):
        p = DiscretePMF(np.array([1.0]), 0.0)
        q = DiscretePMF(np.array([0.0, 1.0]), 0.0)
        assert tv_distance(p, q) == pytest.approx(1.0)

    def test_symmetric(self):
        p = DiscretePMF(np.array([0.7, 0.3]), 0.0)
        q = DiscretePMF(np.array([0.2, 0.5, 0.3]), 0.0)
        assert tv_distance(p, q) == pytest.approx(tv_distance(q, p))


class TestOps:
    def test_scalar_op(self):
        out = dict(run_op("active_prob_npts", load_config()))
        # gamma = 2.5: 1 - 4 / (2.5 + 2)^2
        assert out["value"] == pytest.approx(1.0 - 16.0 / 81.0, rel=1e-10)

    def test_moment_op(self):
        out = dict(run_op("moments_typical_pts", load_config()))
        assert out["mean"] == pytest.approx(2.5, rel=1e-9)
        assert set(out) == {"mean", "variance", "third_moment", "skewness"}

    def test_pmf_op_normalizes(self):
        out = run_op("pmf_typical_npts", load_config())
        masses = np.array([v for _, v in out])
        assert masses[0] == pytest.approx(16.0 / 81.0, rel=1e-10)
        assert masses.sum() == pytest.approx(1.0, abs=1e-4)

    def test_unknown_op(self):
        with pytest.raises(SystemExit, match="unknown op"):
            run_op("nope", load_config())


class TestMain:
    def test_figure_5_csv(self, tmp_path):
        out = tmp_path / "fig5.csv"
        assert main(["figure", "5", "--out", str(out)]) == 0
        meta, header, rows = read_csv(out)
        assert header == ["u", "p_off_PTS", "p_off_NPTS"]
        assert len(rows) == len(DEFAULT_CONFIG["u_values"])
        assert any("master_seed" in line for line in meta)
        assert any("figure 5" in line for line in meta)
        for _, p_pts, p_npts in rows:
            assert float(p_pts) > float(p_npts)

    def test_figure_reproducible(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["figure", "5", "--seed", "9", "--out", str(a)])
        main(["figure", "5", "--seed", "9", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_op_to_stdout(self, capsys):
        assert main(["op", "moments_typical_npts", "--out", "-"]) == 0
        text = capsys.readouterr().out
        assert "mean" in text and text.startswith("#")

    def test_simulate_reproducible(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "load_typical", "--traffic", "NPTS",
                "--reps", "500", "--seed", "3"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
        _, header, rows = read_csv(a)
        masses = np.array([float(v) for _, v in
                           (r for r in rows)], dtype=float)
        assert masses.sum() == pytest.approx(1.0, abs=1e-12)

    def test_simulate_coverage_fields(self, tmp_path):
        out = tmp_path / "cov.csv"
        main(["simulate", "coverage", "--traffic", "NPTS",
              "--reps", "100", "--out", str(out)])
        _, _, rows = read_csv(out)
        got = {name: float(val) for name, val in rows}
        assert 0.0 <= got["value"] <= 1.0
        assert got["n"] == 100
        assert got["std_error"] > 0.0

    def test_bad_figure_number(self):
        with pytest.raises(SystemExit):
            main(["figure", "12"])

    def test_validate_exit_codes(self, tmp_path):
        # a deliberately tiny run with a huge tolerance must pass ...
        out = tmp_path / "val.csv"
        code = main(["validate", "--reps", "300", "--tolerance", "0.9",
                     "--out", str(out)])
        assert code == 0
        _, header, rows = read_csv(out)
        assert header == ["check", "gap", "status"]
        names = {r[0] for r in rows}
        assert "load_typical_PTS" in names
        assert "connectivity_NPTS" in names
        assert "coverage_PTS" in names
        assert all(r[2] == "PASS" for r in rows)
        # ... and an impossible tolerance must fail
        code = main(["validate", "--reps", "300", "--tolerance", "1e-9",
                     "--out", str(out)])
        assert code == 1
