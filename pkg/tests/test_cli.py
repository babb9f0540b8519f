import json

import numpy as np
import pytest

from minkhull.cli import (EXIT_CONFIG, EXIT_HULL, EXIT_OK, EXIT_VIOLATIONS, EXIT_WORD_CAP,
                          ConfigError, ExperimentConfig, main)
from minkhull.io import read_off
from minkhull.lorentz import mink_sq

VERIFY_CHECKS = {"bilipschitz", "cat0_spot", "chord_tangent", "cone_angles", "f_function",
                 "fmax_integral", "gauss_bonnet", "lower_bound_argument", "projection_estimate",
                 "quotient_cross_check", "short_displacement", "translation_length_bound"}


def write_config(tmp_path, **kw):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(kw))
    return str(p)


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.group == "genus2_octagon" and cfg.seeds == {"kind": "single_point"}

    @pytest.mark.parametrize("bad", [{"steiner_density": 0}, {"domain_radius": -1.0},
                                     {"seeds": {"kind": "nope"}}, {"rng_seed": -3},
                                     {"seeds": {"kind": "hyperboloid_sample", "c": 2}}])
    def test_invalid(self, bad):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(bad)

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"colour": "red"})

    def test_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, steiner_density=-1)
        assert main(["hull", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_CONFIG

    def test_seed_file(self, tmp_path):
        seeds = tmp_path / "seeds.json"
        seeds.write_text(json.dumps([[0.0, 0.0, 1.5]]))
        cfg = write_config(tmp_path, seeds={"kind": "file", "path": str(seeds)})
        out = tmp_path / "o"
        assert main(["hull", "--config", cfg, "--out", str(out)]) == EXIT_OK
        v, _ = read_off((out / "mesh.off").read_text())
        np.testing.assert_allclose(np.sqrt(-mink_sq(v)), 1.5, rtol=1e-7)


class TestHull:
    def test_single_point_outputs(self, cli_runs):
        root, codes = cli_runs
        assert codes["hull", "a"] == EXIT_OK
        out = root / "hull" / "a"
        v, faces = read_off((out / "mesh.off").read_text())
        np.testing.assert_allclose(np.sqrt(-mink_sq(v)), 1.0, atol=1e-9)
        ab = json.loads((out / "alpha_beta.json").read_text())
        assert ab["alpha"] == pytest.approx(1.0) and ab["rng_seed"] == 0
        faces_json = json.loads((out / "faces.json").read_text())
        assert faces_json["euler_characteristic"] == -2
        cm = json.loads((out / "cone_metric.json").read_text())
        assert set(cm) == {"triangles", "gluing"}

    def test_manifest(self, cli_runs):
        root, _ = cli_runs
        m = json.loads((root / "hull" / "a" / "manifest.json").read_text())
        assert m["command"] == "hull" and m["config"]["rng_seed"] == 0
        assert {"group", "hull", "mesh"} <= set(m["wall_time_s"])
        assert "version" in m

    def test_reruns_identical(self, cli_runs):
        root, _ = cli_runs
        for cmd, names in (("hull", ["mesh.off", "faces.json", "cone_metric.json", "alpha_beta.json"]),
                           ("verify", ["bounds.json"])):
            for name in names:
                assert (root / cmd / "a" / name).read_bytes() == (root / cmd / "b" / name).read_bytes()

    def test_hyperboloid_sample(self, tmp_path):
        cfg = write_config(tmp_path, seeds={"kind": "hyperboloid_sample", "c": 2.0, "density": 200})
        out = tmp_path / "o"
        assert main(["hull", "--config", cfg, "--out", str(out)]) == EXIT_OK
        ab = json.loads((out / "alpha_beta.json").read_text())
        assert ab["alpha"] == pytest.approx(2.0, abs=1e-9)
        assert 2.0 <= ab["beta"] <= 2.25

    def test_domain_too_small(self, tmp_path):
        cfg = write_config(tmp_path, domain_radius=1.0)
        assert main(["hull", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_HULL


class TestVerify:
    def test_default_passes(self, cli_runs):
        root, codes = cli_runs
        assert codes["verify", "a"] == EXIT_OK
        reports = json.loads((root / "verify" / "a" / "bounds.json").read_text())
        names = [r["name"] for r in reports]
        assert sorted(names) == sorted(VERIFY_CHECKS) and len(names) == len(set(names))
        assert all(r["violations"] == 0 for r in reports)

    def test_negative_control(self, tmp_path):
        cfg = write_config(tmp_path, n_pairs=16, n_path_pairs=4, n_cat0_triangles=2)
        out = tmp_path / "o"
        assert main(["verify", "--config", cfg, "--out", str(out), "--negative-control"]) == EXIT_VIOLATIONS
        reports = json.loads((out / "bounds.json").read_text())
        bad = [r["name"] for r in reports if r["violations"]]
        assert bad == ["translation_length_bound_control"]

    def test_word_cap(self, tmp_path):
        cfg = write_config(tmp_path, n_pairs=4, n_path_pairs=2, n_cat0_triangles=2,
                           seeds={"kind": "hyperboloid_sample", "c": 2.0, "density": 50})
        code = main(["verify", "--config", cfg, "--word-cap", "1", "--out", str(tmp_path / "o")])
        assert code == EXIT_WORD_CAP


class TestConverge:
    def test_one_step(self, tmp_path):
        cfg = write_config(tmp_path, ladder=[40], ladder_points=4)
        out = tmp_path / "o"
        assert main(["converge", "--config", cfg, "--out", str(out)]) == EXIT_OK
        summary = json.loads((out / "converge.json").read_text())
        assert summary["verdict"] is None and len(summary["gaps"]) == 1
        assert (out / "gaps.csv").read_text().startswith("step,density")

    def test_verdict_values(self, tmp_path):
        cfg = write_config(tmp_path, ladder=[30, 90], ladder_points=4)
        out = tmp_path / "o"
        assert main(["converge", "--config", cfg, "--out", str(out)]) == EXIT_OK
        summary = json.loads((out / "converge.json").read_text())
        assert summary["verdict"] in ("decreasing", "non-monotone")


def test_spectrum(tmp_path):
    cfg = write_config(tmp_path, spectrum_max_word=2)
    out = tmp_path / "o"
    assert main(["spectrum", "--config", cfg, "--out", str(out)]) == EXIT_OK
    rows = (out / "spectrum.csv").read_text().strip().splitlines()
    assert rows[0] == "word,translation_length"
    # 8 letters, then 8 * 7 reduced words of length two
    assert len(rows) == 1 + 8 + 56
    gens = [float(r.split(",")[1]) for r in rows[1:9]]
    np.testing.assert_allclose(gens, gens[0], atol=1e-9)
