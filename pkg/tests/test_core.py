from pathlib import Path

import pytest

import main
from src.core import core
import src.modules.Measurements as Measurements
from src.modules.Measurements import Mode
from src.modules.Reconstruction import Settings
from src.modules.Relations import RankStrategy

BASE_DIR = Path(__file__).parent

experiment_loop = BASE_DIR / "configs" / "experiment_loop.json"
experiment_minimal = BASE_DIR / "configs" / "experiment_minimal.json"
experiment_invalid = BASE_DIR / "configs" / "experiment_invalid.json"
dataset_malformed = BASE_DIR / "configs" / "dataset_malformed.json"
dataset_line = BASE_DIR / "configs" / "dataset_line.json"
dataset_noise = BASE_DIR / "configs" / "dataset_noise.json"
configuration_triangle = BASE_DIR / "configs" / "configuration_triangle.json"
ensemble_base = BASE_DIR / "configs" / "ensemble_base.json"


def generate(spec, directory):
    paths = {name: directory / f"{name}.json" for name in ("dataset", "truth", "ensemble", "labeling")}
    assert core.cmd_gen(spec, paths["dataset"], paths["truth"], paths["ensemble"], paths["labeling"]) == 0
    return paths


def test_helper_clean_experiment():
    spec = core.helper_clean_experiment(core.load_json(experiment_loop))
    assert spec == core.ExperimentSpec(
        Points=6, Dim=2, Mode=Mode.LOOP, Seeds=core.Seeds(Config=1, Ensemble=2, Shuffle=3), Extra=3)

    with pytest.raises(core.InvalidSpec):
        core.helper_clean_experiment(core.load_json(experiment_invalid))


def test_reconstruction_settings():
    spec = core.helper_clean_experiment(core.load_json(experiment_loop))
    assert not core.reconstruction_settings(spec).RestrictedEnsemble

    base_only = core.helper_clean_experiment({**core.load_json(experiment_loop), "extra": 0,
                                              "rank_strategy": "distinct", "tol": 1e-8})
    settings = core.reconstruction_settings(base_only, workers=2)
    assert settings.RestrictedEnsemble
    assert settings.Strategy == RankStrategy.DISTINCT
    assert settings.Tol == 1e-8
    assert settings.Workers == 2

    with pytest.raises(core.InvalidSpec):
        core.reconstruction_settings(core.helper_clean_experiment(
            {**core.load_json(experiment_minimal), "rank_strategy": "distinct"}))


def test_helper_clean_ensemble():
    ensemble = core.helper_clean_ensemble(core.load_json(ensemble_base), 4)
    assert ensemble.Mode == Mode.LOOP
    assert len(ensemble) == 6
    base = Measurements.canonical_matrix(Measurements.CanonicalKind.BASE, 2)
    assert tuple(f.Multiplicities for f in ensemble.Functionals) == base.Entries

    assert core.helper_clean_ensemble([{"path": [1, 2]}, {"path": [2, 3, 2]}], 3).Mode == Mode.PATH


def test_gen_counts(tmp_path):
    spec = core.helper_clean_experiment(core.load_json(experiment_loop))
    paths = generate(spec, tmp_path)
    data = core.helper_clean_dataset(core.load_json(paths["dataset"]))
    assert len(data) == 6 + 2 * 3 + 3
    assert data.Mode == Mode.LOOP

    space = core.helper_clean_experiment(
        {"points": 6, "dim": 3, "mode": "loop", "extra": 3, "seeds": {"config": 0, "ensemble": 0, "shuffle": 0}})
    paths = generate(space, tmp_path / "space")
    assert len(core.load_json(paths["dataset"])["values"]) == 10 + 4 + 3


def test_gen_files_agree(tmp_path):
    spec = core.helper_clean_experiment(core.load_json(experiment_loop))
    paths = generate(spec, tmp_path)
    data = core.helper_clean_dataset(core.load_json(paths["dataset"]))
    truth = core.helper_clean_configuration(core.load_json(paths["truth"]))
    ensemble = core.helper_clean_ensemble(core.load_json(paths["ensemble"]), truth.n)
    labeling = core.helper_clean_labeling(core.load_json(paths["labeling"]))

    assert len(ensemble) == len(data) == len(labeling)
    for k, path in labeling.items():
        value = Measurements.apply_functional(Measurements.functional_from_path(path, truth.n), truth)
        assert data.Values[k] == pytest.approx(value, rel=1e-12)


def test_gen_is_deterministic(tmp_path):
    spec = core.helper_clean_experiment(core.load_json(experiment_loop))
    first = generate(spec, tmp_path / "first")
    second = generate(spec, tmp_path / "second")
    for name in first:
        assert first[name].read_bytes() == second[name].read_bytes()


def test_gen_rejects_too_many_distractors(tmp_path):
    spec = core.helper_clean_experiment(
        {"points": 4, "dim": 2, "mode": "path", "extra": 5, "max_hops": 1,
         "seeds": {"config": 0, "ensemble": 0, "shuffle": 0}})
    assert core.cmd_gen(spec, tmp_path / "d.json", tmp_path / "t.json", tmp_path / "e.json") == core.EXIT_INVALID_SPEC


def test_round_trip(tmp_path, capsys):
    spec = core.helper_clean_experiment(core.load_json(experiment_loop))
    paths = generate(spec, tmp_path)
    recovered = tmp_path / "recovered.json"
    explained = tmp_path / "explained.json"

    assert core.cmd_reconstruct(paths["dataset"], recovered, explained, Settings()) == core.EXIT_OK
    assert core.cmd_verify(paths["truth"], recovered) == core.EXIT_OK
    assert capsys.readouterr().out.startswith("matched scale=1 ")

    data = core.helper_clean_dataset(core.load_json(paths["dataset"]))
    cfg = core.helper_clean_configuration(core.load_json(recovered))
    for k, path in core.helper_clean_labeling(core.load_json(explained)).items():
        value = Measurements.apply_functional(Measurements.functional_from_path(path, cfg.n), cfg)
        assert data.Values[k] == pytest.approx(value, rel=1e-6)


def test_round_trip_scaled(tmp_path, capsys):
    spec = core.helper_clean_experiment({**core.load_json(experiment_loop), "points": 5, "extra": 0, "scale": 2})
    paths = generate(spec, tmp_path)
    assert core.helper_clean_dataset(core.load_json(paths["dataset"])).Bound == 4

    recovered = tmp_path / "recovered.json"
    assert core.cmd_reconstruct(paths["dataset"], recovered, tmp_path / "explained.json", Settings()) == 0
    assert core.cmd_verify(paths["truth"], recovered) == core.EXIT_OK
    assert capsys.readouterr().out.startswith("matched scale=2 ")


def test_reconstruct_malformed(tmp_path):
    out = tmp_path / "recovered.json"
    explained = tmp_path / "explained.json"
    assert core.cmd_reconstruct(dataset_malformed, out, explained, Settings()) == core.EXIT_MALFORMED
    assert core.cmd_reconstruct(tmp_path / "missing.json", out, explained, Settings()) == core.EXIT_MALFORMED

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert core.cmd_reconstruct(garbage, out, explained, Settings()) == core.EXIT_MALFORMED
    assert not out.exists()


def test_reconstruct_invalid_spec(tmp_path):
    out = tmp_path / "recovered.json"
    explained = tmp_path / "explained.json"
    assert core.cmd_reconstruct(dataset_line, out, explained, Settings()) == core.EXIT_INVALID_SPEC

    space = tmp_path / "space.json"
    core.write_json(space, {"dim": 3, "bound": 2, "mode": "loop", "values": [1.0, 2.0, 3.0]})
    assert core.cmd_reconstruct(space, out, explained, Settings(), plot=tmp_path / "plot.svg") == core.EXIT_INVALID_SPEC
    assert not (tmp_path / "plot.svg").exists()


def test_reconstruct_no_base(tmp_path):
    out = tmp_path / "recovered.json"
    assert core.cmd_reconstruct(dataset_noise, out, tmp_path / "explained.json", Settings()) == core.EXIT_NO_BASE
    assert not out.exists()


def test_reconstruct_plot(tmp_path):
    spec = core.helper_clean_experiment(core.load_json(experiment_minimal))
    paths = generate(spec, tmp_path)
    plot = tmp_path / "plots" / "recovered.svg"
    assert core.cmd_reconstruct(paths["dataset"], tmp_path / "recovered.json", tmp_path / "explained.json",
                                Settings(), plot=plot) == core.EXIT_OK
    assert "<svg" in plot.read_text(encoding="utf-8")


def test_verify(tmp_path, capsys):
    scaled = tmp_path / "scaled.json"
    core.write_json(scaled, {"dim": 2, "points": [[0, 8], [0, 0], [6, 0]]})
    assert core.cmd_verify(configuration_triangle, scaled) == core.EXIT_OK
    assert capsys.readouterr().out.startswith("matched scale=2 ")

    other = tmp_path / "other.json"
    core.write_json(other, {"dim": 2, "points": [[0, 0], [1, 0], [0, 1]]})
    assert core.cmd_verify(configuration_triangle, other) == core.EXIT_MISMATCH
    assert capsys.readouterr().out.startswith("unmatched points=3 max_residual=")

    space = tmp_path / "space.json"
    core.write_json(space, {"dim": 3, "points": [[0, 0, 0], [3, 0, 0], [0, 4, 0]]})
    assert core.cmd_verify(configuration_triangle, space) == core.EXIT_MALFORMED
    assert core.cmd_verify(configuration_triangle, tmp_path / "missing.json") == core.EXIT_MALFORMED


def test_main(tmp_path, capsys):
    dataset = tmp_path / "dataset.json"
    truth = tmp_path / "truth.json"
    recovered = tmp_path / "recovered.json"

    assert main.main(["--quiet", "gen", "-j", str(experiment_minimal), "--seed-config", "4",
                      "--out", str(dataset), "--truth-out", str(truth),
                      "--ensemble-out", str(tmp_path / "ensemble.json")]) == 0
    assert core.load_json(dataset)["mode"] == "path"

    assert main.main(["--quiet", "reconstruct", str(dataset), "--out", str(recovered),
                      "--labeling-out", str(tmp_path / "explained.json")]) == 0
    assert main.main(["--quiet", "verify", str(truth), str(recovered)]) == 0
    assert capsys.readouterr().out.startswith("matched scale=1 ")


def test_main_rejects(tmp_path):
    out = ["--out", str(tmp_path / "d.json"), "--truth-out", str(tmp_path / "t.json"),
           "--ensemble-out", str(tmp_path / "e.json")]
    assert main.main(["--quiet", "gen", "-j", str(experiment_invalid)] + out) == core.EXIT_INVALID_SPEC
    assert main.main(["--quiet", "gen", "-j", str(experiment_minimal), "--dim", "1"] + out) == core.EXIT_INVALID_SPEC
    assert main.main(["--quiet", "gen", "-j", str(tmp_path / "missing.json")] + out) == core.EXIT_MALFORMED
    assert not (tmp_path / "d.json").exists()

    assert main.main(["--quiet", "reconstruct", str(dataset_noise), "--rank-strategy", "distinct"]) == \
        core.EXIT_INVALID_SPEC
    assert main.main(["--quiet", "reconstruct", str(dataset_malformed)]) == core.EXIT_MALFORMED

    with pytest.raises(SystemExit):
        main.main(["gen", "--mode", "ring"])
