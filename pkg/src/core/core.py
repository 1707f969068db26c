from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional
import json
import logging

from schema import SchemaError

from src.modules.Geometry import Configuration, GeometryError
from src.modules.Measurements import (
    DataSet,
    MeasurementEnsemble,
    MeasurementError,
    Mode,
    Path as VertexPath,
    build_trilateration_ensemble,
    functional_from_path,
    measure,
    random_configuration,
    scale_ensemble,
)
from src.modules.Reconstruction import NoBaseFound, ReconstructionResult, Settings, reconstruct, verify
from src.modules.Relations import RankStrategy
from src.schemas import Configurations, DataSets, Ensembles, Labelings, experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_NO_BASE = 2
EXIT_MALFORMED = 3
EXIT_INVALID_SPEC = 4


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class Seeds:
    Config: int
    Ensemble: int
    Shuffle: int


@dataclass(frozen=True)
class ExperimentSpec:
    Points: int
    Dim: int
    Mode: Mode
    Seeds: Seeds
    Extra: int = 0
    MaxHops: int = 4
    Bound: int = 2
    Scale: int = 1
    Tol: float = 1e-9
    RankStrategy: Optional[RankStrategy] = None
    Drop: float = 0.0


def load_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as file:
        return json.load(file)


def write_json(path: Path, data: Any):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(data, file, indent=2)
        file.write("\n")
    logger.info(f"Wrote {path}")


def helper_clean_experiment(data: dict[str, Any]) -> ExperimentSpec:
    try:
        spec = experiment.validate(data)
    except SchemaError as error:
        raise InvalidSpec(str(error)) from error
    seeds = spec["seeds"]
    return ExperimentSpec(
        Points=spec["points"],
        Dim=spec["dim"],
        Mode=Mode(spec["mode"]),
        Seeds=Seeds(Config=seeds["config"], Ensemble=seeds["ensemble"], Shuffle=seeds["shuffle"]),
        Extra=spec["extra"],
        MaxHops=spec["max_hops"],
        Bound=spec["bound"],
        Scale=spec["scale"],
        Tol=spec["tol"],
        RankStrategy=RankStrategy(spec["rank_strategy"]) if spec["rank_strategy"] else None,
        Drop=spec["drop"],
    )


def reconstruction_settings(spec: ExperimentSpec, workers: int = 1) -> Settings:
    """Settings for reconstructing a simulated experiment. Only loop data without distractors is restricted."""
    try:
        return Settings(
            Tol=spec.Tol,
            Strategy=spec.RankStrategy,
            RestrictedEnsemble=spec.Mode == Mode.LOOP and spec.Extra == 0 and spec.Scale == 1,
            Workers=workers,
        )
    except ValueError as error:
        raise InvalidSpec(str(error)) from error


def helper_clean_dataset(data: dict[str, Any]) -> DataSet:
    data = DataSets.validate(data)
    return DataSet(
        Dim=data["dim"],
        Bound=data["bound"],
        Mode=Mode(data["mode"]),
        Values=tuple(data["values"]),
    )


def helper_clean_configuration(data: dict[str, Any]) -> Configuration:
    data = Configurations.validate(data)
    return Configuration(Dim=data["dim"], Points=tuple(tuple(point) for point in data["points"]))


def helper_clean_ensemble(data: list[dict[str, Any]], n: int) -> MeasurementEnsemble:
    data = Ensembles.validate(data)
    paths = [VertexPath(tuple(entry["path"])) for entry in data]
    mode = Mode.LOOP if all(path.is_loop for path in paths) else Mode.PATH
    return MeasurementEnsemble(
        Mode=mode,
        Functionals=[functional_from_path(path, n) for path in paths],
        Provenance=paths,
    )


def helper_clean_labeling(data: list[dict[str, Any]]) -> dict[int, VertexPath]:
    data = Labelings.validate(data)
    return {entry["value"]: VertexPath(tuple(entry["path"])) for entry in data}


def dataset_to_dict(data: DataSet) -> dict[str, Any]:
    return {"dim": data.Dim, "bound": data.Bound, "mode": data.Mode.value, "values": list(data.Values)}


def configuration_to_dict(cfg: Configuration) -> dict[str, Any]:
    return {"dim": cfg.Dim, "points": [list(point) for point in cfg.Points]}


def ensemble_to_list(ensemble: MeasurementEnsemble) -> list[dict[str, Any]]:
    if ensemble.Provenance is None:
        raise MeasurementError("Only ensembles built from paths can be written")
    return [{"path": list(path.Vertices)} for path in ensemble.Provenance]


def labeling_to_list(result: ReconstructionResult) -> list[dict[str, Any]]:
    return [{"value": e.ValueIndex, "path": list(e.Path.Vertices)} for e in result.Labeling]


def simulate(spec: ExperimentSpec) -> tuple[Configuration, MeasurementEnsemble, DataSet, list[int]]:
    cfg = random_configuration(spec.Points, spec.Dim, spec.Seeds.Config)
    ensemble = build_trilateration_ensemble(
        spec.Points, spec.Dim, spec.Mode,
        extra=spec.Extra, max_hops=spec.MaxHops, rng_seed=spec.Seeds.Ensemble, bound=spec.Bound,
    )
    if spec.Scale > 1:
        ensemble = scale_ensemble(ensemble, spec.Scale)
    data, labeling = measure(ensemble, cfg, spec.Seeds.Shuffle, spec.Drop)
    return cfg, ensemble, data, labeling


def cmd_gen(spec: ExperimentSpec, dataset_out: Path, config_out: Path, ensemble_out: Path,
            labeling_out: Optional[Path] = None) -> int:
    try:
        cfg, ensemble, data, labeling = simulate(spec)
    except (MeasurementError, GeometryError) as error:
        logger.error(f"Invalid experiment: {error}")
        return EXIT_INVALID_SPEC

    write_json(dataset_out, dataset_to_dict(data))
    write_json(config_out, configuration_to_dict(cfg))
    write_json(ensemble_out, ensemble_to_list(ensemble))
    if labeling_out:
        write_json(labeling_out, [
            {"value": k, "path": list(ensemble.Provenance[index].Vertices)}
            for k, index in enumerate(labeling)
        ])
    logger.info(f"Generated {len(data)} {spec.Mode.value} values for {spec.Points} points in R^{spec.Dim}")
    return EXIT_OK


def cmd_reconstruct(dataset_path: Path, config_out: Path, labeling_out: Path, settings: Settings,
                    plot: Optional[Path] = None, bound: Optional[int] = None) -> int:
    try:
        data = helper_clean_dataset(load_json(dataset_path))
        if bound is not None:
            data = DataSet(Dim=data.Dim, Bound=bound, Mode=data.Mode, Values=data.Values)
    except (OSError, json.JSONDecodeError, SchemaError, MeasurementError) as error:
        logger.error(f"Malformed data set {dataset_path}: {error}")
        return EXIT_MALFORMED

    if data.Dim < 2:
        logger.error(f"Reconstruction needs d >= 2, data set has d={data.Dim}")
        return EXIT_INVALID_SPEC
    if plot is not None and data.Dim != 2:
        logger.error(f"--plot draws d=2 reconstructions only, data set has d={data.Dim}")
        return EXIT_INVALID_SPEC

    try:
        result = reconstruct(data, settings)
    except NoBaseFound as error:
        logger.error(str(error))
        return EXIT_NO_BASE

    write_json(config_out, configuration_to_dict(result.Configuration))
    write_json(labeling_out, labeling_to_list(result))
    if plot is not None:
        from src.modules.Plots import plot_reconstruction
        plot_reconstruction(result, plot)
    return EXIT_OK


def cmd_verify(truth_path: Path, recovered_path: Path, tol: float = 1e-7, max_scale: int = 8) -> int:
    try:
        truth = helper_clean_configuration(load_json(truth_path))
        recovered = helper_clean_configuration(load_json(recovered_path))
    except (OSError, json.JSONDecodeError, SchemaError, GeometryError) as error:
        logger.error(f"Malformed configuration: {error}")
        return EXIT_MALFORMED
    if truth.Dim != recovered.Dim:
        logger.error(f"Dimension mismatch: truth d={truth.Dim}, recovered d={recovered.Dim}")
        return EXIT_MALFORMED

    verdict = verify(truth, recovered, tol, max_scale)
    if verdict.Matched:
        print(f"matched scale={verdict.Scale} max_residual={verdict.MaxResidual:.3e} "
              f"relabeling={list(verdict.Relabeling)}")
        return EXIT_OK
    print(f"unmatched points={recovered.n} max_residual={verdict.MaxResidual:.3e}")
    return EXIT_MISMATCH
