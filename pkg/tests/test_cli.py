import json

import numpy as np
import pytest

from mpsim.cli import main
from mpsim.experiments import ConfigError, model_from_dict, model_to_dict, preset_config
from mpsim.models import BlockIndependent, Iid, Tensor


@pytest.fixture()
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("MPSIM_OUTPUT_DIR", str(tmp_path))
    return tmp_path


SMALL_CONFIG = {
    "model": {"kind": "iid", "p": 60, "law": "std_normal", "m": 240},
    "comparison": {"lambda": 0.25, "sigma2": 1.0},
    "seed": 3,
    "histogram_bins": 30,
}


def _write_config(tmp_path, cfg=None):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg or SMALL_CONFIG), encoding="utf-8")
    return path


class TestSimulate:
    def test_config_file_run(self, outdir, tmp_path, capsys):
        cfg = _write_config(tmp_path)
        assert main(["simulate", "--config", str(cfg)]) == 0
        for name in ("eigenvalues.csv", "histogram.csv", "theory.csv", "result.json"):
            assert (outdir / name).exists()
        result = json.loads((outdir / "result.json").read_text())
        assert result["config"]["seed"] == 3
        assert result["config"]["p"] == 60
        assert "ks_distance" in capsys.readouterr().out

    def test_histogram_integrates_to_one(self, outdir, tmp_path):
        cfg = _write_config(tmp_path)
        main(["simulate", "--config", str(cfg)])
        hist = np.loadtxt(outdir / "histogram.csv", delimiter=",", skiprows=1)
        mass = np.sum((hist[:, 1] - hist[:, 0]) * hist[:, 2])
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_byte_identical_reruns(self, tmp_path):
        cfg = _write_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        main(["simulate", "--config", str(cfg), "--out", str(a)])
        main(["simulate", "--config", str(cfg), "--out", str(b)])
        assert (a / "eigenvalues.csv").read_bytes() == (b / "eigenvalues.csv").read_bytes()
        assert (a / "histogram.csv").read_bytes() == (b / "histogram.csv").read_bytes()

    def test_seed_flag_overrides_file(self, tmp_path):
        cfg = _write_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        main(["simulate", "--config", str(cfg), "--out", str(a), "--seed", "99"])
        main(["simulate", "--config", str(cfg), "--out", str(b)])
        assert (a / "eigenvalues.csv").read_bytes() != (b / "eigenvalues.csv").read_bytes()
        assert json.loads((a / "result.json").read_text())["config"]["seed"] == 99

    def test_bins_flag(self, outdir, tmp_path):
        cfg = _write_config(tmp_path)
        main(["simulate", "--config", str(cfg), "--bins", "17"])
        hist = (outdir / "histogram.csv").read_text().strip().splitlines()
        assert len(hist) == 18  # header + bins

    def test_preset_desk_scale(self, outdir):
        assert main(["simulate", "--preset", "figure1a", "--scale", "1/100"]) == 0
        result = json.loads((outdir / "result.json").read_text())
        assert result["config"]["p"] == 40
        assert result["config"]["m"] == 160

    def test_lf_line_endings(self, outdir, tmp_path):
        cfg = _write_config(tmp_path)
        main(["simulate", "--config", str(cfg)])
        raw = (outdir / "eigenvalues.csv").read_bytes()
        assert b"\r" not in raw
        assert raw.startswith(b"eigenvalue\n")

    def test_missing_source_is_usage_error(self, outdir, capsys):
        assert main(["simulate"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_json_config(self, tmp_path, outdir):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert main(["simulate", "--config", str(bad)]) == 2

    def test_unknown_model_kind(self, tmp_path, outdir):
        cfg = _write_config(
            tmp_path, {"model": {"kind": "nope", "m": 1}, "comparison": {"lambda": 1.0}}
        )
        assert main(["simulate", "--config", str(cfg)]) == 2


class TestDensity:
    def test_csv_shape(self, outdir):
        assert main(["density", "--lam", "0.25", "--points", "50"]) == 0
        lines = (outdir / "density.csv").read_text().strip().splitlines()
        assert lines[0] == "x,density"
        assert len(lines) == 51

    def test_matches_closed_form(self, outdir):
        main(["density", "--lam", "1.0", "--grid-min", "2.0", "--grid-max", "2.0",
              "--points", "1", "--out", "one.csv"])
        x, dens = np.loadtxt(outdir / "one.csv", delimiter=",", skiprows=1)
        assert dens == pytest.approx(1 / (2 * np.pi), abs=1e-10)

    def test_mixture_route(self, outdir):
        assert main(["density", "--lam", "0.25", "--mixture", "0.5:0.5,1.5:0.5",
                     "--points", "40", "--out", "mix.csv"]) == 0
        data = np.loadtxt(outdir / "mix.csv", delimiter=",", skiprows=1)
        assert data.shape == (40, 2)
        assert np.all(data[:, 1] >= 0)

    def test_bad_mixture_weights(self, outdir):
        assert main(["density", "--lam", "0.25", "--mixture", "1.0:0.7,2.0:0.7"]) == 2


class TestVerification:
    def test_census_csv_and_exit(self, outdir):
        assert main(["census", "--n", "5", "--d", "2"]) == 0
        lines = (outdir / "census_n5_d2.csv").read_text().strip().splitlines()
        assert lines[0] == "w,v,r,enumerated,formula,match"
        assert all(line.endswith(",true") for line in lines[1:])

    def test_lemmas_report(self, outdir, capsys):
        assert main(["lemmas", "--max-n", "12", "--out", "lemmas.json"]) == 0
        report = json.loads((outdir / "lemmas.json").read_text())
        assert report["passed"] is True
        assert {c["name"] for c in report["checks"]} >= {
            "binomial_bound_chain", "log_concavity", "decay", "stability", "diag_sum",
        }
        err = capsys.readouterr().err
        assert "PASS binomial_bound_chain" in err

    def test_verify_census_suite(self, outdir):
        assert main(["verify", "census", "--n", "5", "--d", "2"]) == 0

    def test_verify_yaskov_suite(self, outdir):
        assert main(["verify", "yaskov", "--samples", "4000", "--seed", "0"]) == 0

    def test_verify_varbounds_suite(self, outdir):
        assert main(["verify", "varbounds", "--samples", "500", "--seed", "1"]) == 0


class TestFigures:
    def test_renders_png_alongside_csv(self, outdir):
        assert main(["figures", "1a", "--scale", "1/100"]) == 0
        fig_dir = outdir / "figure1a"
        png = fig_dir / "figure1a.png"
        assert png.exists() and png.stat().st_size > 1000
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        for name in ("eigenvalues.csv", "histogram.csv", "theory.csv", "result.json"):
            assert (fig_dir / name).exists()


class TestConfigRoundTrip:
    def test_model_dict_round_trip(self):
        for spec in (
            {"kind": "iid", "p": 7, "law": "rademacher", "m": 3},
            {"kind": "tensor", "n": 6, "d": 2, "law": "uniform_sqrt3", "m": 4},
            {
                "kind": "block",
                "blocks": [
                    {"kind": "gaussian_hermite", "count": 2},
                    {"kind": "basis_vector", "size": 5, "count": 1},
                    {"kind": "iid_block", "size": 3, "law": "std_normal", "count": 1},
                ],
                "m": 9,
            },
        ):
            model = model_from_dict(spec)
            assert model_from_dict(model_to_dict(model)) == model

    def test_model_kinds(self):
        assert isinstance(model_from_dict({"kind": "iid", "p": 2, "m": 1}), Iid)
        assert isinstance(
            model_from_dict({"kind": "tensor", "n": 4, "d": 2, "m": 1}), Tensor
        )
        blk = model_from_dict(
            {"kind": "block", "blocks": [{"kind": "xor_triple", "count": 2}], "m": 1}
        )
        assert isinstance(blk, BlockIndependent) and blk.p == 6

    def test_unknown_block_kind(self):
        with pytest.raises(ConfigError):
            model_from_dict(
                {"kind": "block", "blocks": [{"kind": "mystery"}], "m": 1}
            )

    def test_preset_geometry(self):
        from fractions import Fraction

        full = preset_config("figure1a", scale=Fraction(1))
        assert full["model"]["blocks"][0]["count"] == 2000
        assert full["model"]["m"] == 16_000
        fig2 = preset_config("figure2", scale=Fraction(1))
        assert fig2["model"]["n"] == 145
        assert fig2["model"]["m"] == 2 * 10440

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset_config("figure9")
