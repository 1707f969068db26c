from __future__ import annotations
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence
import logging

import numpy as np

from src.modules.Geometry import Configuration, edge_count, edge_index, edge_pairs, measure_all_lengths

logger = logging.getLogger(__name__)


class MeasurementError(ValueError):
    pass


class CoincidentPoints(MeasurementError):
    pass


class Mode(Enum):
    PATH = "path"
    LOOP = "loop"


class CanonicalKind(Enum):
    BASE = "base"
    TRILAT = "trilat"


@dataclass(frozen=True)
class Path:
    Vertices: tuple[int, ...]

    def __post_init__(self):
        vertices = tuple(int(v) for v in self.Vertices)
        if len(vertices) < 2:
            raise MeasurementError(f"A path needs at least two vertices, got {list(vertices)}")
        if min(vertices) < 1:
            raise MeasurementError(f"Vertices are 1-based, got {list(vertices)}")
        for a, b in zip(vertices, vertices[1:]):
            if a == b:
                raise MeasurementError(f"Vertex {a} immediately repeated in {list(vertices)}")
        object.__setattr__(self, "Vertices", vertices)

    @property
    def is_loop(self) -> bool:
        return len(self.Vertices) >= 3 and self.Vertices[0] == self.Vertices[-1]

    @property
    def hops(self) -> int:
        return len(self.Vertices) - 1

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.Vertices)) + "]"


@dataclass(frozen=True)
class LengthFunctional:
    Vertices: int
    Multiplicities: tuple[int, ...]

    def __post_init__(self):
        multiplicities = tuple(int(m) for m in self.Multiplicities)
        if len(multiplicities) != edge_count(self.Vertices):
            raise MeasurementError(
                f"Functional on K_{self.Vertices} needs {edge_count(self.Vertices)} entries, got {len(multiplicities)}")
        if any(m < 0 for m in multiplicities):
            raise MeasurementError("Multiplicities must be nonnegative")
        object.__setattr__(self, "Multiplicities", multiplicities)

    @property
    def bound(self) -> int:
        return max(self.Multiplicities, default=0)

    def is_zero(self) -> bool:
        return not any(self.Multiplicities)

    def vector(self) -> np.ndarray:
        return np.array(self.Multiplicities, dtype=float)

    def scaled(self, s: int) -> LengthFunctional:
        return LengthFunctional(self.Vertices, tuple(s * m for m in self.Multiplicities))


@dataclass
class MeasurementEnsemble:
    Mode: Mode
    Functionals: list[LengthFunctional]
    Provenance: Optional[list[Path]] = None

    def __post_init__(self):
        if not self.Functionals:
            return
        sizes = {f.Vertices for f in self.Functionals}
        if len(sizes) != 1:
            raise MeasurementError(f"Functionals mix vertex counts {sorted(sizes)}")
        if self.Provenance is None:
            return
        if len(self.Provenance) != len(self.Functionals):
            raise MeasurementError("Provenance must list one path per functional")
        if self.Mode == Mode.LOOP:
            for path in self.Provenance:
                if not path.is_loop:
                    raise MeasurementError(f"Loop ensemble contains open path {path}")

    @property
    def Vertices(self) -> int:
        return self.Functionals[0].Vertices if self.Functionals else 0

    @property
    def Bound(self) -> int:
        return max((f.bound for f in self.Functionals), default=0)

    def matrix(self) -> np.ndarray:
        return np.array([f.Multiplicities for f in self.Functionals], dtype=float).reshape(
            len(self.Functionals), edge_count(self.Vertices))

    def __len__(self) -> int:
        return len(self.Functionals)


@dataclass(frozen=True)
class DataSet:
    Dim: int
    Bound: int
    Mode: Mode
    Values: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.Dim < 1:
            raise MeasurementError(f"Dimension must be positive, got {self.Dim}")
        if self.Bound < 1:
            raise MeasurementError(f"Bound must be positive, got {self.Bound}")
        values = tuple(float(v) for v in self.Values)
        for value in values:
            if not np.isfinite(value) or value <= 0.0:
                raise MeasurementError(f"Data values must be positive and finite, got {value}")
        object.__setattr__(self, "Values", values)

    def array(self) -> np.ndarray:
        return np.array(self.Values, dtype=float)

    def __len__(self) -> int:
        return len(self.Values)


@dataclass(frozen=True)
class CanonicalMatrix:
    Kind: CanonicalKind
    Dim: int
    Entries: tuple[tuple[int, ...], ...]
    Paths: tuple[Path, ...]

    @property
    def size(self) -> int:
        return len(self.Entries)

    def array(self) -> np.ndarray:
        return np.array(self.Entries, dtype=float)


def functional_from_path(path: Path | Sequence[int], n: int) -> LengthFunctional:
    if not isinstance(path, Path):
        path = Path(tuple(path))
    if max(path.Vertices) > n:
        raise MeasurementError(f"Path {path} leaves K_{n}")
    counts = Counter(edge_index(a, b) for a, b in zip(path.Vertices, path.Vertices[1:]))
    return LengthFunctional(n, tuple(counts.get(k, 0) for k in range(edge_count(n))))


def apply_functional(f: LengthFunctional, cfg: Configuration) -> float:
    if f.Vertices != cfg.n:
        raise MeasurementError(f"Functional on K_{f.Vertices} applied to {cfg.n} points")
    if cfg.n < 2:
        return 0.0
    return float(f.vector() @ measure_all_lengths(cfg))


def base_paths(d: int) -> tuple[Path, ...]:
    """Pings and triangles of K_{d+2} through vertex 1, grouped by largest vertex."""
    paths: list[Path] = []
    for m in range(2, d + 3):
        paths.append(Path((1, m, 1)))
        paths.extend(Path((1, j, m, 1)) for j in range(2, m))
    return tuple(paths)


def trilateration_paths(d: int, anchors: Sequence[int], target: int, mode: Mode) -> tuple[Path, ...]:
    """Connections from `target` to d+1 `anchors`; in loop mode anchors[0] closes every loop."""
    if len(anchors) != d + 1:
        raise MeasurementError(f"Trilateration needs {d + 1} anchors, got {len(anchors)}")
    if mode == Mode.PATH:
        return tuple(Path((a, target)) for a in anchors)
    root = anchors[0]
    return (Path((root, target, root)),) + tuple(Path((root, a, target, root)) for a in anchors[1:])


@lru_cache(maxsize=None)
def canonical_matrix(kind: CanonicalKind, d: int) -> CanonicalMatrix:
    if d < 2:
        raise MeasurementError(f"Canonical matrices need d >= 2, got {d}")
    n = d + 2
    if kind == CanonicalKind.BASE:
        paths = base_paths(d)
    else:
        edges = tuple(Path(pair) for pair in edge_pairs(d + 1))
        paths = edges + trilateration_paths(d, tuple(range(1, d + 2)), n, Mode.LOOP)
    entries = tuple(functional_from_path(path, n).Multiplicities for path in paths)
    return CanonicalMatrix(Kind=kind, Dim=d, Entries=entries, Paths=paths)


def random_configuration(n: int, d: int, seed: int) -> Configuration:
    rng = np.random.default_rng(seed)
    return Configuration.from_array(rng.random((n, d)))


def _random_walk(rng: np.random.Generator, n: int, mode: Mode, max_hops: int) -> Path:
    if mode == Mode.PATH:
        hops = int(rng.integers(1, max_hops + 1))
        vertices = [int(rng.integers(1, n + 1))]
        for _ in range(hops):
            options = [v for v in range(1, n + 1) if v != vertices[-1]]
            vertices.append(int(rng.choice(options)))
        return Path(tuple(vertices))

    hops = int(rng.integers(2, max_hops + 1))
    vertices = [1]
    for step in range(hops - 1):
        last_inner = step == hops - 2
        options = [v for v in range(1, n + 1) if v != vertices[-1] and not (last_inner and v == 1)]
        vertices.append(int(rng.choice(options)))
    vertices.append(1)
    return Path(tuple(vertices))


def build_trilateration_ensemble(n: int, d: int, mode: Mode, extra: int = 0, max_hops: int = 4,
                                 rng_seed: int = 0, bound: int = 2) -> MeasurementEnsemble:
    """
    Ensemble allowing for trilateration: a base K_{d+2} on vertices 1..d+2, one
    trilateration sequence per further vertex and `extra` random distractors,
    in random order.
    """
    if d < 2:
        raise MeasurementError(f"Dimension must be at least 2, got {d}")
    if n < d + 2:
        raise MeasurementError(f"Need at least {d + 2} points in R^{d}, got {n}")
    if extra < 0:
        raise MeasurementError(f"Distractor count must be nonnegative, got {extra}")
    min_hops = 2 if mode == Mode.LOOP else 1
    if extra and max_hops < min_hops:
        raise MeasurementError(f"{mode.value} distractors need max_hops >= {min_hops}")

    rng = np.random.default_rng(rng_seed)

    if mode == Mode.PATH:
        paths = [Path(pair) for pair in edge_pairs(d + 2)]
    else:
        paths = list(base_paths(d))

    for j in range(d + 3, n + 1):
        if mode == Mode.PATH:
            anchors = sorted(int(a) for a in rng.choice(np.arange(1, j), size=d + 1, replace=False))
        else:
            others = sorted(int(a) for a in rng.choice(np.arange(2, j), size=d, replace=False))
            anchors = [1] + others
        paths.extend(trilateration_paths(d, anchors, j, mode))

    seen = {functional_from_path(path, n).Multiplicities for path in paths}
    attempts = 0
    added = 0
    while added < extra:
        attempts += 1
        if attempts > 1000 * extra:
            raise MeasurementError(f"Could not draw {extra} distinct distractors on K_{n}")
        path = _random_walk(rng, n, mode, max_hops)
        functional = functional_from_path(path, n)
        if functional.bound > bound or functional.Multiplicities in seen:
            continue
        seen.add(functional.Multiplicities)
        paths.append(path)
        added += 1

    order = rng.permutation(len(paths))
    provenance = [paths[i] for i in order]
    ensemble = MeasurementEnsemble(
        Mode=mode,
        Functionals=[functional_from_path(path, n) for path in provenance],
        Provenance=provenance,
    )
    longest = max(path.hops for path in provenance)
    logger.debug(f"Built {mode.value} ensemble on K_{n} in R^{d}: {len(ensemble)} functionals, "
                 f"bound {ensemble.Bound}, longest walk {longest} hops")
    return ensemble


def measure(ensemble: MeasurementEnsemble, cfg: Configuration, shuffle_seed: int,
            drop: float = 0.0) -> tuple[DataSet, list[int]]:
    """
    Evaluate every functional on `cfg` and shuffle the values.

    The second element maps each data value to the index of the functional that
    produced it and exists for verification only.
    """
    if ensemble.Vertices != cfg.n:
        raise MeasurementError(f"Ensemble on K_{ensemble.Vertices} measured on {cfg.n} points")
    if not 0.0 <= drop < 1.0:
        raise MeasurementError(f"Drop fraction must lie in [0, 1), got {drop}")
    lengths = measure_all_lengths(cfg)
    if lengths.size and lengths.min() <= 0.0:
        raise CoincidentPoints("Configuration has coincident points")

    values = ensemble.matrix() @ lengths
    rng = np.random.default_rng(shuffle_seed)
    order = rng.permutation(len(values))
    keep = len(values) - int(round(drop * len(values)))
    order = order[:keep]

    labeling = [int(i) for i in order]
    bound = max((ensemble.Functionals[i].bound for i in labeling), default=1)
    data = DataSet(Dim=cfg.Dim, Bound=max(bound, 1), Mode=ensemble.Mode, Values=tuple(values[order]))
    logger.info(f"Measured {len(data)} values ({len(values) - keep} dropped), bound {data.Bound}")
    return data, labeling


def scale_path(path: Path, s: int) -> Path:
    """Traverse every edge of `path` s times: repetition for loops, back-and-forth otherwise."""
    if s < 1:
        raise MeasurementError(f"Scale must be a positive integer, got {s}")
    vertices = list(path.Vertices)
    if path.is_loop:
        return Path(tuple(vertices[:-1] * s + [vertices[0]]))
    result = list(vertices)
    for k in range(1, s):
        segment = vertices[::-1] if k % 2 else vertices
        result.extend(segment[1:])
    return Path(tuple(result))


def scale_ensemble(ensemble: MeasurementEnsemble, s: int) -> MeasurementEnsemble:
    if s < 1:
        raise MeasurementError(f"Scale must be a positive integer, got {s}")
    provenance = None
    if ensemble.Provenance is not None:
        provenance = [scale_path(path, s) for path in ensemble.Provenance]
    return MeasurementEnsemble(
        Mode=ensemble.Mode,
        Functionals=[f.scaled(s) for f in ensemble.Functionals],
        Provenance=provenance,
    )


def merge_datasets(*datasets: DataSet) -> DataSet:
    if not datasets:
        raise MeasurementError("Nothing to merge")
    first = datasets[0]
    for data in datasets[1:]:
        if data.Dim != first.Dim or data.Mode != first.Mode:
            raise MeasurementError("Merged data sets must share dimension and mode")
    return DataSet(
        Dim=first.Dim,
        Bound=max(data.Bound for data in datasets),
        Mode=first.Mode,
        Values=tuple(v for data in datasets for v in data.Values),
    )
