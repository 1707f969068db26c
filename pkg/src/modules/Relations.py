from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from math import gamma, pi
from typing import Optional, Sequence
import logging

import numpy as np
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMError

logger = logging.getLogger(__name__)

DEFAULT_RELATION_TOL: float = 1e-12
BRUTE_BUDGET: int = 4_000_000


class SearchBudgetExceeded(RuntimeError):
    pass


class ReductionFailed(ArithmeticError):
    pass


class RelationKind(Enum):
    INDEPENDENT = "independent"
    RELATION = "relation"


class RankStrategy(Enum):
    BRUTE = "brute"
    REDUCED = "reduced"
    DISTINCT = "distinct"


@dataclass(frozen=True)
class RelationCertificate:
    Kind: RelationKind
    Coefficients: Optional[tuple[int, ...]]
    BoundUsed: int

    @property
    def is_relation(self) -> bool:
        return self.Kind == RelationKind.RELATION

    def residual(self, w: Sequence[float]) -> float:
        if self.Coefficients is None:
            raise ValueError("Independent certificates carry no coefficients")
        return float(np.dot(np.asarray(self.Coefficients, dtype=float), np.asarray(w, dtype=float)))


def _independent(bound: int) -> RelationCertificate:
    return RelationCertificate(RelationKind.INDEPENDENT, None, max(1, int(bound)))


def _prepare(w: Sequence[float]) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    if w.size < 2:
        raise ValueError(f"Relation search needs at least two values, got {w.size}")
    return w


@lru_cache(maxsize=8)
def _coefficient_grid(k: int, bound: int) -> np.ndarray:
    """Integer vectors in [-bound, bound]^k with first nonzero entry positive, ordered by (max|c|, entries)."""
    axis = np.arange(-bound, bound + 1)
    grid = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    nonzero = grid != 0
    leading = nonzero.argmax(axis=1)
    keep = nonzero.any(axis=1) & (grid[np.arange(len(grid)), leading] > 0)
    grid = grid[keep]
    grid = grid[np.argsort(np.abs(grid).max(axis=1), kind="stable")]
    grid.setflags(write=False)
    return grid


def brute_search_size(k: int, coeff_bound: int) -> int:
    return ((2 * coeff_bound + 1) ** k - 1) // 2


def find_integer_relation_brute(w: Sequence[float], coeff_bound: int,
                                tol: float = DEFAULT_RELATION_TOL) -> RelationCertificate:
    w = _prepare(w)
    if coeff_bound < 1:
        raise ValueError(f"Coefficient bound must be positive, got {coeff_bound}")
    scale = float(np.max(np.abs(w)))
    if not np.isfinite(scale * coeff_bound):
        raise ValueError("Values overflow the coefficient bound")
    size = brute_search_size(w.size, coeff_bound)
    if size > BRUTE_BUDGET:
        raise SearchBudgetExceeded(
            f"{size} coefficient vectors for k={w.size}, bound {coeff_bound} exceed budget {BRUTE_BUDGET}")

    grid = _coefficient_grid(w.size, coeff_bound)
    residuals = np.abs(grid @ w)
    hits = np.flatnonzero(residuals < tol * coeff_bound * scale)
    if hits.size == 0:
        return _independent(coeff_bound)
    coefficients = tuple(int(c) for c in grid[hits[0]])
    logger.debug(f"Brute relation {coefficients} (residual {residuals[hits[0]]:.3e})")
    return RelationCertificate(RelationKind.RELATION, coefficients, coeff_bound)


def lll_reduce(basis: Sequence[Sequence[int]]) -> list[list[int]]:
    """LLL reduction (delta = 3/4) of the rows of an integer basis."""
    rows = [[int(x) for x in row] for row in basis]
    if not rows:
        return rows
    matrix = DomainMatrix.from_Matrix(sympy.Matrix(rows))
    if matrix.rank() < len(rows):
        raise ReductionFailed("Basis vectors are linearly dependent")
    try:
        reduced = matrix.lll(delta=QQ(3, 4)).to_Matrix()
    except (DMError, ZeroDivisionError) as error:
        raise ReductionFailed(f"Basis cannot be reduced: {error}") from error
    return [[int(x) for x in reduced.row(i)] for i in range(reduced.rows)]


def precision_horizon(k: int, tol: float) -> float:
    """Largest relation norm for which chance relations at `tol` stay rarer than 1 in 1000."""
    ball = pi ** (k / 2) / gamma(k / 2 + 1)
    return (1e-3 / (2.0 * ball * tol)) ** (1.0 / k)


def find_integer_relation_reduced(w: Sequence[float], norm_bound: float,
                                  tol: float = DEFAULT_RELATION_TOL) -> RelationCertificate:
    w = _prepare(w)
    if not np.all(np.isfinite(w)):
        raise ReductionFailed("Values must be finite")
    scale = float(np.max(np.abs(w)))
    if scale == 0.0:
        raise ReductionFailed("All values are zero")
    if norm_bound <= 0:
        raise ValueError(f"Norm bound must be positive, got {norm_bound}")

    k = w.size
    x = w / scale
    weight = 1.0 / tol
    basis = [[int(i == j) for j in range(k)] + [int(round(weight * x[i]))] for i in range(k)]
    reduced = lll_reduce(basis)

    horizon = precision_horizon(k, tol)
    bound_used = min(float(norm_bound), horizon)
    if bound_used < norm_bound:
        logger.debug(f"Norm bound {norm_bound:g} capped at precision horizon {horizon:.1f} for k={k}")
    accept = min(2.0 ** ((k - 1) / 2) * bound_used, horizon)

    for row in reduced:
        c = np.array(row[:k], dtype=float)
        norm = float(np.linalg.norm(c))
        if norm == 0.0 or norm > accept:
            continue
        if abs(float(c @ x)) < tol * norm:
            coefficients = tuple(int(v) for v in row[:k])
            if next(v for v in coefficients if v != 0) < 0:
                coefficients = tuple(-v for v in coefficients)
            logger.debug(f"Reduced relation {coefficients}")
            return RelationCertificate(RelationKind.RELATION, coefficients, max(1, int(bound_used)))
    return _independent(bound_used)


def _embed(coefficients: tuple[int, ...], subset: Sequence[int], k: int) -> tuple[int, ...]:
    full = [0] * k
    for index, c in zip(subset, coefficients):
        full[index] = c
    return tuple(full)


def rational_rank_at_least(w: Sequence[float], target: int, b: int,
                           strategy: RankStrategy = RankStrategy.BRUTE,
                           tol: float = DEFAULT_RELATION_TOL,
                           restricted: bool = False) -> tuple[bool, Optional[RelationCertificate]]:
    """
    Whether some `target`-subset of `w` admits no bounded integer relation.

    Returns the verdict with the certificate of the deciding subset; relation
    coefficients are laid out over all of `w`.
    """
    w = np.asarray(w, dtype=float).ravel()
    k = w.size
    if target > k:
        raise ValueError(f"Rank target {target} exceeds {k} values")
    if b < 1:
        raise ValueError(f"Bound must be positive, got {b}")

    if strategy == RankStrategy.DISTINCT:
        if not restricted:
            raise ValueError("Distinct-values rank test needs a pings-and-triangles-only ensemble")
        order = np.argsort(w, kind="stable")
        gaps = np.diff(w[order])
        close = np.flatnonzero(np.abs(gaps) <= tol * max(float(np.max(np.abs(w))), 1.0))
        if close.size:
            i, j = sorted((int(order[close[0]]), int(order[close[0] + 1])))
            coefficients = tuple(1 if t == i else -1 if t == j else 0 for t in range(k))
            return False, RelationCertificate(RelationKind.RELATION, coefficients, 1)
        return True, _independent(1)

    if target <= 0:
        return True, None
    if target == 1:
        return bool(np.any(w != 0.0)), None

    bound = b ** (target - 1)
    certificate: Optional[RelationCertificate] = None
    for subset in combinations(range(k), target):
        values = w[list(subset)]
        if strategy == RankStrategy.BRUTE:
            certificate = find_integer_relation_brute(values, bound, tol)
        else:
            certificate = find_integer_relation_reduced(values, float(bound), tol)
        if not certificate.is_relation:
            return True, certificate
        certificate = RelationCertificate(
            RelationKind.RELATION, _embed(certificate.Coefficients, subset, k), certificate.BoundUsed)
    return False, certificate
