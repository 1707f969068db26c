from __future__ import annotations
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Iterable, Optional, Sequence
import logging

import numpy as np

from src.modules.Geometry import (
    Configuration,
    GeometryError,
    align_onto,
    edge_index,
    edge_pairs,
    embed_simplex,
    frame_embedding,
    measure_all_lengths,
    realizability,
    separation_ratio,
)
from src.modules.Measurements import (
    CanonicalKind,
    CanonicalMatrix,
    DataSet,
    Mode,
    Path,
    apply_functional,
    base_paths,
    canonical_matrix,
    functional_from_path,
)
from src.modules.Relations import RankStrategy
from src.modules.Varieties import certify_rank, membership_L

logger = logging.getLogger(__name__)


class NoBaseFound(LookupError):
    pass


class CertificateError(AssertionError):
    pass


@dataclass
class Settings:
    Tol: float = 1e-9
    RelationTol: float = 1e-12
    CoincidenceTol: float = 1e-6
    LookupSlack: float = 1e-6
    CertificateTol: float = 1e-7
    Strategy: Optional[RankStrategy] = None
    RestrictedEnsemble: bool = False
    MaxValue: Optional[float] = None
    Workers: int = 1

    def __post_init__(self):
        for name in ("Tol", "RelationTol", "CoincidenceTol", "LookupSlack", "CertificateTol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.Strategy == RankStrategy.DISTINCT and not self.RestrictedEnsemble:
            raise ValueError("Distinct-values rank test needs RestrictedEnsemble")
        if self.Workers < 1:
            raise ValueError(f"Workers must be at least 1, got {self.Workers}")


@dataclass(frozen=True)
class CandidateBase:
    ValueIndices: tuple[int, ...]
    Embedded: Configuration
    Matrix: Optional[CanonicalMatrix]
    Order: int = 0


@dataclass(frozen=True)
class TrilaterationStep:
    Anchors: tuple[int, ...]
    Point: int
    ValueIndices: tuple[int, ...]


@dataclass(frozen=True)
class Explanation:
    ValueIndex: int
    Value: float
    Path: Path


@dataclass
class PartialReconstruction:
    Points: np.ndarray
    Consumed: dict[int, Path] = field(default_factory=dict)
    History: list[TrilaterationStep] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.Points)


@dataclass
class ReconstructionResult:
    Configuration: Configuration
    Labeling: list[Explanation]
    Base: CandidateBase
    History: list[TrilaterationStep]

    @property
    def ExplainedCount(self) -> int:
        return len(self.Labeling)

    @property
    def ScaleRank(self) -> float:
        """Total edge length; orders equal-size results by relative scale."""
        if self.Configuration.n < 2:
            return 0.0
        return float(measure_all_lengths(self.Configuration).sum())


@dataclass(frozen=True)
class VerifyVerdict:
    Matched: bool
    Relabeling: Optional[tuple[int, ...]]
    Scale: Optional[int]
    MaxResidual: float


class _ValueTable:
    """Available data values sorted ascending, with range lookups by value."""

    def __init__(self, values: np.ndarray, available: Iterable[int], slack: float):
        available = np.fromiter(available, dtype=int)
        order = np.argsort(values[available], kind="stable")
        self.Original = available[order]
        self.Sorted = values[self.Original]
        self.Slack = slack

    def __len__(self) -> int:
        return len(self.Sorted)

    def between(self, lo: float, hi: float) -> range:
        start = int(np.searchsorted(self.Sorted, lo * (1.0 - self.Slack), side="left"))
        stop = int(np.searchsorted(self.Sorted, hi * (1.0 + self.Slack), side="right"))
        return range(start, max(start, stop))

    def near(self, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        start = np.searchsorted(self.Sorted, targets * (1.0 - self.Slack), side="left")
        stop = np.searchsorted(self.Sorted, targets * (1.0 + self.Slack), side="right")
        return start, stop


def _available(data: DataSet, settings: Settings, exclude: Iterable[int] = ()) -> list[int]:
    excluded = set(exclude)
    return [i for i, v in enumerate(data.Values)
            if i not in excluded and (settings.MaxValue is None or v <= settings.MaxValue)]


def _sphere_points(anchors: np.ndarray, radii: np.ndarray, slack: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Both intersection points of d spheres in R^d, vectorized over rows of `radii`.

    `anchors` holds d centers; returns (plus, minus, valid).
    """
    origin = anchors[0]
    offsets = anchors[1:] - origin
    A = 2.0 * offsets
    rhs = radii[:, :1] ** 2 - radii[:, 1:] ** 2 + np.sum(offsets ** 2, axis=1)
    _, singular, vt = np.linalg.svd(A, full_matrices=True)
    if singular[-1] < slack * max(singular[0], np.finfo(float).tiny):
        empty = np.zeros((len(radii), anchors.shape[1]))
        return empty, empty, np.zeros(len(radii), dtype=bool)
    normal = vt[-1]
    base = rhs @ np.linalg.pinv(A).T
    height_sq = radii[:, 0] ** 2 - np.sum(base ** 2, axis=1)
    valid = height_sq >= -slack * radii[:, 0] ** 2
    height = np.sqrt(np.clip(height_sq, 0.0, None))[:, None]
    return origin + base + height * normal, origin + base - height * normal, valid


class _BaseSearch:
    """
    Enumerates base tuples with symmetry breaking.

    Vertices 1..d form a frame searched depth-first in edge order. Vertices d+1 and
    d+2 are each placed from their d values to the frame, then pairs of placements
    are joined on the single remaining value, predicted by distance and looked up
    in the sorted table. In loop mode pings ascend with the vertex label. In path
    mode edge 12 is the shortest, the edges at vertex 1 ascend and l13 precedes l23.
    """

    def __init__(self, data: DataSet, settings: Settings):
        self.Data = data
        self.Settings = settings
        self.d = data.Dim
        self.Loop = data.Mode == Mode.LOOP
        self.Values = data.array()
        self.Table = _ValueTable(self.Values, _available(data, settings), settings.LookupSlack)
        self.Pairs = edge_pairs(self.d + 2)
        self.FrameSlots = comb(self.d, 2)
        self.Found: list[tuple[int, ...]] = []
        self.Seen: set[frozenset[int]] = set()

    def run(self, first: Iterable[int]) -> list[tuple[int, ...]]:
        for position in first:
            length = self._length(position, True)
            if length > 0:
                self._extend(1, [position], [length])
        return self.Found

    def _length(self, position: int, ping: bool, l1j: float = 0.0, l1m: float = 0.0) -> float:
        value = float(self.Table.Sorted[position])
        if not self.Loop:
            return value
        if ping:
            return value / 2.0
        return value - l1j - l1m

    def _to_value(self, length, ping: bool, l1j=0.0, l1m=0.0):
        if not self.Loop:
            return length
        if ping:
            return 2.0 * length
        return length + l1j + l1m

    def _between(self, l1j: float, l1m: float) -> range:
        return self.Table.between(self._to_value(abs(l1j - l1m), False, l1j, l1m),
                                  self._to_value(l1j + l1m, False, l1j, l1m))

    def _floor(self, j: int, m: int, pos12: int, pos13: int) -> int:
        if self.Loop:
            return -1
        if (j, m) == (2, 3):
            return pos13
        return pos12

    def _extend(self, k: int, positions: list[int], lengths: list[float]):
        if k == self.FrameSlots:
            self._place(positions, lengths)
            return
        j, m = self.Pairs[k]
        used = set(positions)
        if j == 1:
            span: Iterable[int] = range(positions[edge_index(1, m - 1)] + 1, len(self.Table))
            l1j = l1m = 0.0
            floor = -1
        else:
            l1j, l1m = lengths[edge_index(1, j)], lengths[edge_index(1, m)]
            span = self._between(l1j, l1m)
            floor = self._floor(j, m, positions[0], positions[edge_index(1, 3)])
        for position in span:
            if position in used or position <= floor:
                continue
            length = self._length(position, j == 1, l1j, l1m)
            if length <= 0.0:
                continue
            positions.append(position)
            lengths.append(length)
            if j != m - 1 or realizability(np.square(lengths), m, self.d, self.Settings.Tol)[0]:
                self._extend(k + 1, positions, lengths)
            positions.pop()
            lengths.pop()

    def _gather(self, j: int, own: list[int], radii: list[float], used: set[int], frame: list[float],
                floor: int, out: list[tuple[tuple[int, ...], tuple[float, ...]]]):
        if j > self.d:
            out.append((tuple(own), tuple(radii)))
            return
        l1j, r = frame[edge_index(1, j)], radii[0]
        for position in self._between(l1j, r):
            if position in used or position in own or position <= floor:
                continue
            length = self._length(position, False, l1j, r)
            if length <= 0.0:
                continue
            own.append(position)
            radii.append(length)
            self._gather(j + 1, own, radii, used, frame, floor, out)
            own.pop()
            radii.pop()

    def _place(self, positions: list[int], lengths: list[float]):
        d, tol = self.d, self.Settings.Tol
        try:
            frame = frame_embedding(np.square(lengths), d, d, tol)
        except GeometryError:
            return

        used = set(positions)
        floor = self._floor(1, d + 1, positions[0], -1)
        placements: list[tuple[tuple[int, ...], tuple[float, ...]]] = []
        for first in range(positions[edge_index(1, d)] + 1, len(self.Table)):
            if first in used:
                continue
            r = self._length(first, True)
            if r > 0.0:
                self._gather(2, [first], [r], used, lengths, floor, placements)
        if len(placements) < 2:
            return

        own = np.array([p for p, _ in placements], dtype=int)
        radii = np.array([r for _, r in placements])
        plus, minus, valid = _sphere_points(frame, radii, tol)
        own, radii, plus, minus = own[valid], radii[valid], plus[valid], minus[valid]

        # Reflection through the frame hyperplane fixes vertex d+1 on the plus side.
        lower = np.ones(len(own), dtype=bool)
        if not self.Loop and d == 2:
            lower = own[:, 1] > own[:, 0]
        rows = np.flatnonzero(lower)
        if rows.size == 0:
            return
        ascending = own[rows, 0][:, None] < own[None, :, 0]

        for solution in (plus, minus):
            predicted = np.linalg.norm(plus[rows][:, None, :] - solution[None, :, :], axis=2)
            if self.Loop:
                predicted = predicted + radii[rows, 0][:, None] + radii[None, :, 0]
            start, stop = self.Table.near(predicted.ravel())
            for flat in np.flatnonzero(ascending.ravel() & (stop > start)):
                a, b = divmod(int(flat), len(own))
                taken = used | set(own[rows[a]].tolist()) | set(own[b].tolist())
                if len(taken) != len(used) + 2 * d:
                    continue
                for position in range(start[flat], stop[flat]):
                    if position not in taken and position > floor:
                        self._record(positions + own[rows[a]].tolist() + own[b].tolist() + [position])

    def _record(self, chosen: list[int]):
        original = tuple(int(self.Table.Original[p]) for p in chosen)
        key = frozenset(original)
        if key not in self.Seen:
            self.Seen.add(key)
            self.Found.append(original)


def _validate_base(indices: tuple[int, ...], data: DataSet, settings: Settings,
                   order: int) -> Optional[CandidateBase]:
    d = data.Dim
    w = data.array()[list(indices)]
    matrix = canonical_matrix(CanonicalKind.BASE, d) if data.Mode == Mode.LOOP else None
    verdict = membership_L(w, matrix, d, settings.Tol)
    if not verdict.Member:
        logger.debug(f"Tuple {indices} rejected: residual {verdict.CmResidual:.3e}")
        return None
    if not certify_rank(w, matrix, d, data.Bound, settings.Strategy, settings.Tol,
                        settings.RelationTol, settings.RestrictedEnsemble):
        logger.debug(f"Tuple {indices} rejected: rational rank below {len(w)}")
        return None
    try:
        embedded = embed_simplex(np.square(verdict.RecoveredLengths), d, settings.Tol)
    except GeometryError as error:
        logger.debug(f"Tuple {indices} rejected: {error}")
        return None
    if separation_ratio(embedded.array()) <= settings.CoincidenceTol:
        logger.debug(f"Tuple {indices} rejected: coincident points")
        return None
    return CandidateBase(ValueIndices=indices, Embedded=embedded, Matrix=matrix, Order=order)


def _search_chunk(data: DataSet, settings: Settings, first: list[int]) -> list[tuple[int, ...]]:
    return _BaseSearch(data, settings).run(first)


def find_candidate_bases(data: DataSet, settings: Optional[Settings] = None) -> list[CandidateBase]:
    settings = settings or Settings()
    d = data.Dim
    if d < 2:
        raise ValueError(f"Reconstruction needs d >= 2, got {d}")
    if len(data) < comb(d + 2, 2):
        return []

    search = _BaseSearch(data, settings)
    positions = list(range(len(search.Table)))
    if settings.Workers > 1 and len(positions) > 1:
        chunks = [positions[i::settings.Workers] for i in range(settings.Workers)]
        with ProcessPoolExecutor(max_workers=settings.Workers) as executor:
            parts = list(executor.map(_search_chunk, [data] * len(chunks), [settings] * len(chunks), chunks))
        rank = {int(original): position for position, original in enumerate(search.Table.Original)}
        tuples: list[tuple[int, ...]] = []
        seen: set[frozenset[int]] = set()
        merged = sorted((t for part in parts for t in part), key=lambda t: rank[t[0]])
        for t in merged:
            if frozenset(t) not in seen:
                seen.add(frozenset(t))
                tuples.append(t)
    else:
        tuples = search.run(positions)

    bases: list[CandidateBase] = []
    for indices in tuples:
        base = _validate_base(indices, data, settings, len(bases))
        if base is not None:
            bases.append(base)
    logger.info(f"Found {len(bases)} candidate bases among {len(tuples)} consistent tuples")
    return bases


def _base_paths(data: DataSet) -> tuple[Path, ...]:
    if data.Mode == Mode.LOOP:
        return base_paths(data.Dim)
    return tuple(Path(pair) for pair in edge_pairs(data.Dim + 2))


def start_partial(base: CandidateBase, data: DataSet) -> PartialReconstruction:
    return PartialReconstruction(
        Points=base.Embedded.array(),
        Consumed=dict(zip(base.ValueIndices, _base_paths(data))),
    )


def _accept_point(partial: PartialReconstruction, point: np.ndarray, settings: Settings) -> bool:
    points = np.vstack([partial.Points, point])
    diameter = float(measure_all_lengths(points).max())
    gaps = np.linalg.norm(partial.Points - point, axis=1)
    return bool(gaps.min() > settings.CoincidenceTol * diameter)


def _try_anchors(partial: PartialReconstruction, data: DataSet, settings: Settings,
                 anchors: tuple[int, ...], indices: tuple[int, ...]) -> Optional[PartialReconstruction]:
    d = data.Dim
    loop = data.Mode == Mode.LOOP
    located = partial.Points[list(anchors)]
    w = np.concatenate([measure_all_lengths(located), data.array()[list(indices)]])
    matrix = canonical_matrix(CanonicalKind.TRILAT, d) if loop else None

    verdict = membership_L(w, matrix, d, settings.Tol)
    if not verdict.Member:
        return None
    if not certify_rank(w, matrix, d, data.Bound, settings.Strategy, settings.Tol,
                        settings.RelationTol, settings.RestrictedEnsemble):
        logger.debug(f"Trilateration from {anchors} rejected: rational rank below {len(w)}")
        return None
    try:
        simplex = embed_simplex(np.square(verdict.RecoveredLengths), d, settings.Tol).array()
        point = align_onto(simplex[:d + 1], located, simplex[d + 1], settings.Tol)
    except GeometryError as error:
        logger.debug(f"Trilateration from {anchors} rejected: {error}")
        return None
    if not _accept_point(partial, point, settings):
        logger.debug(f"Trilateration from {anchors} re-found a located point")
        return None

    new = partial.n + 1
    labels = [a + 1 for a in anchors]
    if loop:
        root = labels[0]
        paths = [Path((root, new, root))] + [Path((root, r, new, root)) for r in labels[1:]]
    else:
        paths = [Path((r, new)) for r in labels]
    consumed = dict(partial.Consumed)
    consumed.update(zip(indices, paths))
    step = TrilaterationStep(Anchors=tuple(labels), Point=new, ValueIndices=indices)
    return PartialReconstruction(
        Points=np.vstack([partial.Points, point]),
        Consumed=consumed,
        History=partial.History + [step],
    )


def trilaterate_step(partial: PartialReconstruction, data: DataSet,
                     settings: Optional[Settings] = None) -> Optional[PartialReconstruction]:
    """
    Locate one more point from d+1 located anchors, or None when no data tuple does.

    Loop tuples root every loop at the first anchor; the first d anchors fix two
    mirror candidates and the remaining anchor is predicted and looked up.
    """
    settings = settings or Settings()
    d = data.Dim
    loop = data.Mode == Mode.LOOP
    count = partial.n
    if count < d + 1:
        return None
    table = _ValueTable(data.array(), _available(data, settings, partial.Consumed), settings.LookupSlack)
    if len(table) < d + 1:
        return None

    points = partial.Points
    distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)

    for root in range(count):
        others = [i for i in range(count) if i != root]
        for companions in combinations(others, d - 1):
            if not loop and companions and companions[0] < root:
                continue
            sphere = (root,) + companions
            targets = [i for i in others if i not in companions]
            if not targets:
                continue
            for first in range(len(table)):
                value = float(table.Sorted[first])
                r = value / 2.0 if loop else value
                result = _search_companions(partial, data, settings, table, distances,
                                            sphere, targets, first, r)
                if result is not None:
                    return result
    return None


def _search_companions(partial: PartialReconstruction, data: DataSet, settings: Settings,
                       table: _ValueTable, distances: np.ndarray, sphere: tuple[int, ...],
                       targets: list[int], first: int, r: float) -> Optional[PartialReconstruction]:
    d = data.Dim
    loop = data.Mode == Mode.LOOP
    root = sphere[0]

    def value_range(k: int) -> range:
        lo, hi = abs(distances[root, k] - r), distances[root, k] + r
        if loop:
            lo, hi = lo + distances[root, k] + r, hi + distances[root, k] + r
        return table.between(lo, hi)

    pools = [[p for p in value_range(k) if p != first] for k in sphere[1:]]
    if any(not pool for pool in pools):
        return None

    combos = [c for c in product(*pools) if len(set(c)) == len(c)] if pools else [()]
    if not combos:
        return None
    chosen = np.array(combos, dtype=int).reshape(len(combos), d - 1)
    radii = np.empty((len(combos), d))
    radii[:, 0] = r
    for column, k in enumerate(sphere[1:], start=1):
        values = table.Sorted[chosen[:, column - 1]]
        radii[:, column] = values - distances[root, k] - r if loop else values

    anchors = partial.Points[list(sphere)]
    plus, minus, valid = _sphere_points(anchors, radii, settings.Tol)
    valid &= np.all(radii > 0.0, axis=1)

    for solution in (plus, minus):
        for k in targets:
            predicted = np.linalg.norm(solution - partial.Points[k], axis=1)
            values = predicted + distances[root, k] + r if loop else predicted
            start, stop = table.near(values)
            for row in np.flatnonzero(valid & (stop > start)):
                taken = {first, *chosen[row].tolist()}
                for position in range(start[row], stop[row]):
                    if position in taken:
                        continue
                    positions = (first, *chosen[row].tolist(), position)
                    indices = tuple(int(table.Original[p]) for p in positions)
                    grown = _try_anchors(partial, data, settings, sphere + (k,), indices)
                    if grown is not None:
                        return grown
    return None


def _certify(result: ReconstructionResult, settings: Settings):
    for explanation in result.Labeling:
        functional = functional_from_path(explanation.Path, result.Configuration.n)
        predicted = apply_functional(functional, result.Configuration)
        if abs(predicted - explanation.Value) > settings.CertificateTol * explanation.Value:
            raise CertificateError(
                f"Path {explanation.Path} predicts {predicted!r} for value {explanation.ValueIndex} "
                f"= {explanation.Value!r}")


def grow(base: CandidateBase, data: DataSet, settings: Optional[Settings] = None) -> ReconstructionResult:
    settings = settings or Settings()
    partial = start_partial(base, data)
    while (extended := trilaterate_step(partial, data, settings)) is not None:
        partial = extended
        logger.debug(f"Base {base.Order}: located point {partial.n} from {partial.History[-1].Anchors}")

    labeling = [Explanation(ValueIndex=i, Value=data.Values[i], Path=path)
                for i, path in sorted(partial.Consumed.items())]
    result = ReconstructionResult(
        Configuration=Configuration.from_array(partial.Points),
        Labeling=labeling,
        Base=base,
        History=partial.History,
    )
    _certify(result, settings)
    return result


def _grow_task(base: CandidateBase, data: DataSet, settings: Settings) -> ReconstructionResult:
    return grow(base, data, settings)


def reconstruct(data: DataSet, settings: Optional[Settings] = None) -> ReconstructionResult:
    """
    Largest reconstruction over all candidate bases; among equal sizes the
    smallest total edge length wins, then the earliest base.
    """
    settings = settings or Settings()
    if data.Dim < 2:
        raise ValueError(f"Reconstruction needs d >= 2, got {data.Dim}")

    bases = find_candidate_bases(data, settings)
    if not bases:
        raise NoBaseFound(f"No candidate base among {len(data)} values")

    if settings.Workers > 1 and len(bases) > 1:
        with ProcessPoolExecutor(max_workers=settings.Workers) as executor:
            results = list(executor.map(_grow_task, bases, [data] * len(bases), [settings] * len(bases)))
    else:
        results = [grow(base, data, settings) for base in bases]

    best = min(results, key=lambda r: (-r.Configuration.n, r.ScaleRank, r.Base.Order))
    logger.info(f"Reconstructed {best.Configuration.n} points explaining {best.ExplainedCount} of "
                f"{len(data)} values from base {best.Base.Order} ({len(bases)} bases)")
    return best


def _match(truth: np.ndarray, found: np.ndarray, scale: int, tol: float) -> Optional[list[int]]:
    """Vertex assignment found[i] -> truth[assignment[i]] with matching scaled distances."""
    count = len(found)
    target = np.linalg.norm(found[:, None] - found[None, :], axis=2)
    source = scale * np.linalg.norm(truth[:, None] - truth[None, :], axis=2)
    limit = tol * max(float(target.max()), np.finfo(float).tiny)
    assignment: list[int] = []

    def consistent(i: int, candidate: int) -> bool:
        return all(abs(source[candidate, assignment[j]] - target[i, j]) <= limit for j in range(i))

    def backtrack(i: int) -> bool:
        if i == count:
            return True
        for candidate in range(len(truth)):
            if candidate in assignment or not consistent(i, candidate):
                continue
            assignment.append(candidate)
            if backtrack(i + 1):
                return True
            assignment.pop()
        return False

    if count <= 9:
        return assignment if backtrack(0) else None

    # exhaustive on a frame, then greedy by distance profile
    frame = min(count, found.shape[1] + 1)
    sub = _match(truth, found[:frame], scale, tol)
    if sub is None:
        return None
    assignment = list(sub)
    for i in range(frame, count):
        errors = [np.inf if c in assignment else
                  max(abs(source[c, assignment[j]] - target[i, j]) for j in range(i))
                  for c in range(len(truth))]
        best = int(np.argmin(errors))
        if errors[best] > limit:
            return None
        assignment.append(best)
    return assignment


def verify(truth: Configuration, found: Configuration | ReconstructionResult,
           tol: float = 1e-7, max_scale: int = 8) -> VerifyVerdict:
    """Search a relabeling and integer scale s with s * truth congruent to the reconstruction."""
    if isinstance(found, ReconstructionResult):
        found = found.Configuration
    if found.Dim != truth.Dim or found.n > truth.n:
        return VerifyVerdict(False, None, None, float("inf"))

    truth_points, found_points = truth.array(), found.array()
    found_lengths = measure_all_lengths(found) if found.n > 1 else np.zeros(0)
    best = float("inf")
    for scale in range(1, max_scale + 1):
        assignment = _match(truth_points, found_points, scale, tol)
        if assignment is None:
            continue
        relabeling = tuple(a + 1 for a in assignment)
        if found.n < 2:
            return VerifyVerdict(True, relabeling, scale, 0.0)
        scaled = truth.subset(relabeling).scaled(scale)
        residual = float(np.max(np.abs(measure_all_lengths(scaled) - found_lengths)) / found_lengths.max())
        if residual <= tol:
            return VerifyVerdict(True, relabeling, scale, residual)
        best = min(best, residual)
    return VerifyVerdict(False, None, None, best)
