from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
from math import comb, sqrt
from typing import Optional, Sequence
import logging

from scipy.linalg import cholesky, orthogonal_procrustes, solve_triangular
import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_TOL: float = 1e-9


class GeometryError(ValueError):
    pass


class NotRealizable(GeometryError):
    pass


class Degenerate(GeometryError):
    pass


class AnchorsDegenerate(GeometryError):
    pass


class NotCongruent(GeometryError):
    pass


@dataclass(frozen=True)
class Configuration:
    Dim: int
    Points: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if self.Dim < 1:
            raise GeometryError(f"Dimension must be positive, got {self.Dim}")
        if len(self.Points) < 1:
            raise GeometryError("A configuration needs at least one point")
        points = tuple(tuple(float(c) for c in point) for point in self.Points)
        for index, point in enumerate(points, start=1):
            if len(point) != self.Dim:
                raise GeometryError(
                    f"Point {index} has {len(point)} coordinates, expected {self.Dim}")
        object.__setattr__(self, "Points", points)

    @classmethod
    def from_array(cls, array: np.ndarray) -> Configuration:
        array = np.atleast_2d(np.asarray(array, dtype=float))
        return cls(Dim=array.shape[1], Points=tuple(map(tuple, array)))

    @property
    def n(self) -> int:
        return len(self.Points)

    def array(self) -> np.ndarray:
        return np.array(self.Points, dtype=float)

    def scaled(self, s: float) -> Configuration:
        return Configuration.from_array(s * self.array())

    def subset(self, vertices: Sequence[int]) -> Configuration:
        """Sub-configuration on 1-based `vertices`, in the given order."""
        for vertex in vertices:
            _check_vertex(self, vertex)
        return Configuration(Dim=self.Dim, Points=tuple(self.Points[v - 1] for v in vertices))

    def diameter(self) -> float:
        if self.n < 2:
            return 0.0
        return float(measure_all_lengths(self).max())


@dataclass(frozen=True)
class EdgeIndexing:
    """Edges of K_n grouped by larger endpoint: 12, 13, 23, 14, 24, 34, ..."""
    Vertices: int

    @property
    def Count(self) -> int:
        return edge_count(self.Vertices)

    @property
    def Edges(self) -> tuple[tuple[int, int], ...]:
        return edge_pairs(self.Vertices)

    def index(self, i: int, j: int) -> int:
        if not (1 <= i <= self.Vertices and 1 <= j <= self.Vertices):
            raise IndexError(f"Edge ({i}, {j}) outside K_{self.Vertices}")
        return edge_index(i, j)

    def pair(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.Count:
            raise IndexError(f"Flat edge index {k} outside K_{self.Vertices}")
        return self.Edges[k]


def edge_count(n: int) -> int:
    return comb(n, 2)


def edge_index(i: int, j: int) -> int:
    """0-based flat position of the edge {i, j} (1-based vertices)."""
    if i == j:
        raise IndexError(f"Edge ({i}, {j}) is a loop")
    a, b = min(i, j), max(i, j)
    return comb(b - 1, 2) + (a - 1)


@lru_cache(maxsize=None)
def edge_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, m) for m in range(2, n + 1) for i in range(1, m))


@lru_cache(maxsize=None)
def _edge_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.array(edge_pairs(n), dtype=int).reshape(-1, 2) - 1
    return pairs[:, 0], pairs[:, 1]


def _check_vertex(cfg: Configuration, vertex: int):
    if not 1 <= vertex <= cfg.n:
        raise IndexError(f"Vertex {vertex} outside 1..{cfg.n}")


def squared_distance(cfg: Configuration, i: int, j: int) -> float:
    _check_vertex(cfg, i)
    _check_vertex(cfg, j)
    diff = np.subtract(cfg.Points[i - 1], cfg.Points[j - 1])
    return float(diff @ diff)


def squared_lengths(points: Configuration | np.ndarray) -> np.ndarray:
    array = points.array() if isinstance(points, Configuration) else np.asarray(points, dtype=float)
    first, second = _edge_arrays(len(array))
    diff = array[first] - array[second]
    return np.einsum("ij,ij->i", diff, diff)


def measure_all_lengths(points: Configuration | np.ndarray) -> np.ndarray:
    """LengthVector in EdgeIndexing order."""
    return np.sqrt(squared_lengths(points))


def cayley_menger_matrix(sq: Sequence[float], d: int) -> np.ndarray:
    sq = np.asarray(sq, dtype=float)
    expected = edge_count(d + 2)
    if sq.shape != (expected,):
        raise GeometryError(f"Expected {expected} squared lengths for d={d}, got {sq.size}")

    from_first = np.array([sq[edge_index(1, a + 2)] for a in range(d + 1)])
    G = np.empty((d + 1, d + 1))
    for a in range(d + 1):
        G[a, a] = 2.0 * from_first[a]
        for b in range(a + 1, d + 1):
            G[a, b] = G[b, a] = from_first[a] + from_first[b] - sq[edge_index(a + 2, b + 2)]
    return G


def cayley_menger_det(sq: Sequence[float], d: int) -> float:
    return float(np.linalg.det(cayley_menger_matrix(sq, d)))


def normalized_cayley_menger(sq: Sequence[float], d: int) -> float:
    """det / (mean squared length)^(d+1); scale free."""
    det = cayley_menger_det(sq, d)
    scale = float(np.mean(np.abs(sq)))
    if scale == 0.0:
        return 0.0
    return det / scale ** (d + 1)


def is_cayley_menger_zero(sq: Sequence[float], d: int, tol: float = DEFAULT_TOL) -> bool:
    return abs(normalized_cayley_menger(sq, d)) < tol


def gram_matrix(sq: Sequence[float], count: int) -> np.ndarray:
    """Gram matrix of points 2..count relative to point 1."""
    sq = np.asarray(sq, dtype=float)
    if sq.shape != (edge_count(count),):
        raise GeometryError(f"Expected {edge_count(count)} squared lengths for {count} points")
    from_first = np.array([sq[edge_index(1, a + 2)] for a in range(count - 1)])
    gram = np.empty((count - 1, count - 1))
    for a in range(count - 1):
        gram[a, a] = from_first[a]
        for b in range(a + 1, count - 1):
            gram[a, b] = gram[b, a] = 0.5 * (
                from_first[a] + from_first[b] - sq[edge_index(a + 2, b + 2)])
    return gram


def realizability(sq: Sequence[float], count: int, dim: int, tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """(psd, rank_ok) for the Gram matrix of `count` points against dimension `dim`."""
    if count < 2:
        return True, True
    eigenvalues = np.linalg.eigvalsh(gram_matrix(sq, count))[::-1]
    scale = max(float(eigenvalues[0]), float(np.mean(np.abs(sq))), np.finfo(float).tiny)
    slack = sqrt(tol) * scale
    psd = bool(eigenvalues[-1] >= -slack)
    rank_ok = bool(np.all(np.abs(eigenvalues[dim:]) <= slack))
    return psd, rank_ok


def _sequential_frame(coords: np.ndarray, dim: int, floor: float) -> np.ndarray:
    """Coordinates of `coords` in the basis Gram-Schmidt builds from its rows in order, skipping dependent rows."""
    basis: list[np.ndarray] = []
    for row in coords:
        residual = row - sum(((row @ b) * b for b in basis), np.zeros_like(row))
        norm = float(np.linalg.norm(residual))
        if norm > floor:
            basis.append(residual / norm)
        if len(basis) == dim:
            break
    frame = np.zeros((len(coords), dim))
    if basis:
        frame[:, :len(basis)] = coords @ np.array(basis).T
    return frame


def frame_embedding(sq: Sequence[float], count: int, dim: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Embed `count` points with squared lengths `sq` into R^dim.

    Point 1 sits at the origin, point 2 on the positive first axis, point 3 in
    the upper half-plane of axes 1-2 and so on; points beyond dim+1 are solved
    against that frame. When the leading points are affinely dependent the
    frame is taken from the next independent points instead.
    """
    psd, rank_ok = realizability(sq, count, dim, tol)
    if not (psd and rank_ok):
        raise NotRealizable(f"Squared lengths of {count} points are not realizable in R^{dim}")

    points = np.zeros((count, dim))
    if count == 1:
        return points

    gram = gram_matrix(sq, count)
    pivots = min(count - 1, dim)
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    scale = max(float(eigenvalues[-1]), np.finfo(float).tiny)
    if eigenvalues[-pivots] < tol * scale:
        raise Degenerate(f"Points span fewer than {pivots} dimensions")

    leading = gram[:pivots, :pivots]
    try:
        L = cholesky(leading, lower=True)
        if np.min(np.diag(L)) ** 2 < tol * scale:
            raise np.linalg.LinAlgError("leading frame is singular")
    except np.linalg.LinAlgError:
        logger.debug(f"Leading {pivots + 1} points are affinely dependent, using a later frame")
        top = eigenvalues[-pivots:]
        coords = eigenvectors[:, -pivots:] * np.sqrt(np.clip(top, 0.0, None))
        points[1:] = _sequential_frame(coords, dim, sqrt(tol * scale))
        return points

    points[1:pivots + 1, :pivots] = L
    if count - 1 > pivots:
        rest = solve_triangular(L, gram[:pivots, pivots:], lower=True)
        points[pivots + 1:, :pivots] = rest.T
    return points


def embed_simplex(sq: Sequence[float], d: int, tol: float = DEFAULT_TOL) -> Configuration:
    residual = normalized_cayley_menger(sq, d)
    if abs(residual) >= tol:
        raise NotRealizable(f"Cayley-Menger residual {residual:.3e} exceeds {tol:.1e}")
    points = frame_embedding(sq, d + 2, d, tol)
    logger.debug(f"Embedded {d + 2}-point simplex in R^{d} (residual {residual:.3e})")
    return Configuration.from_array(points)


def _check_pair(a: Configuration, b: Configuration):
    if a.Dim != b.Dim or a.n != b.n:
        raise GeometryError(f"Configurations differ in shape: {a.n}x{a.Dim} vs {b.n}x{b.Dim}")


def are_congruent(a: Configuration, b: Configuration, tol: float = DEFAULT_TOL) -> bool:
    _check_pair(a, b)
    if a.n < 2:
        return True
    la, lb = measure_all_lengths(a), measure_all_lengths(b)
    scale = max(float(la.max()), float(lb.max()), np.finfo(float).tiny)
    return bool(np.all(np.abs(la - lb) <= tol * scale))


def are_similar_ordered(a: Configuration, b: Configuration, tol: float = DEFAULT_TOL) -> Optional[float]:
    _check_pair(a, b)
    if a.n < 2:
        raise GeometryError("Similarity needs at least two points")
    la, lb = measure_all_lengths(a), measure_all_lengths(b)
    norm = float(la @ la)
    if norm == 0.0:
        return None
    s = float(la @ lb) / norm
    if s <= 0.0:
        return None
    scale = max(float(lb.max()), np.finfo(float).tiny)
    if np.all(np.abs(lb - s * la) <= tol * scale):
        return s
    return None


def align_onto(anchor_src: np.ndarray, anchor_dst: np.ndarray, extra: np.ndarray,
               tol: float = DEFAULT_TOL) -> np.ndarray:
    """Image of `extra` under the isometry taking `anchor_src` onto `anchor_dst`."""
    src = np.atleast_2d(np.asarray(anchor_src, dtype=float))
    dst = np.atleast_2d(np.asarray(anchor_dst, dtype=float))
    if src.shape != dst.shape:
        raise GeometryError(f"Anchor shapes differ: {src.shape} vs {dst.shape}")
    count, dim = src.shape
    if count < dim + 1:
        raise AnchorsDegenerate(f"{count} anchors cannot span R^{dim}")

    src_center, dst_center = src.mean(axis=0), dst.mean(axis=0)
    src_local, dst_local = src - src_center, dst - dst_center

    singular = np.linalg.svd(src_local, compute_uv=False)
    if singular[0] == 0.0 or singular[dim - 1] < sqrt(tol) * singular[0]:
        raise AnchorsDegenerate(f"Anchors span fewer than {dim} dimensions")

    rotation, _ = orthogonal_procrustes(src_local, dst_local)
    misfit = float(np.max(np.abs(src_local @ rotation - dst_local)))
    if misfit > sqrt(tol) * singular[0]:
        raise NotCongruent(f"Anchors are not congruent (misfit {misfit:.3e})")

    return (np.asarray(extra, dtype=float) - src_center) @ rotation + dst_center


def separation_ratio(points: np.ndarray) -> float:
    """Minimum pairwise distance over diameter; 1.0 for a single point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) < 2:
        return 1.0
    lengths = measure_all_lengths(points)
    diameter = float(lengths.max())
    if diameter == 0.0:
        return 0.0
    return float(lengths.min()) / diameter
