from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Optional, Sequence
import logging

import numpy as np
import sympy

from src.modules.Geometry import DEFAULT_TOL, edge_index, normalized_cayley_menger, realizability
from src.modules.Measurements import CanonicalKind, CanonicalMatrix, canonical_matrix
from src.modules.Relations import (
    DEFAULT_RELATION_TOL,
    RankStrategy,
    SearchBudgetExceeded,
    find_integer_relation_brute,
    find_integer_relation_reduced,
    rational_rank_at_least,
)

logger = logging.getLogger(__name__)


class StratumType(Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"


@dataclass(frozen=True)
class MembershipVerdict:
    Member: bool
    RecoveredLengths: Optional[tuple[float, ...]]
    CmResidual: float


@dataclass(frozen=True)
class SingularityVerdict:
    """
    Witness layout per stratum type:
    I   -> signs (s13, s23, s14, s24, s34)
    II  -> (a, b, s, t) for the collapsed edge ab and the signs of its two equations
    III -> the vanishing triangle (a, b, c)
    """
    Singular: bool
    Stratum: Optional[StratumType] = None
    Witness: Optional[tuple[int, ...]] = None


@lru_cache(maxsize=None)
def _exact_matrix(kind: CanonicalKind, d: int) -> sympy.Matrix:
    return sympy.Matrix(canonical_matrix(kind, d).Entries)


@lru_cache(maxsize=None)
def exact_determinant(kind: CanonicalKind, d: int) -> int:
    return int(_exact_matrix(kind, d).det())


@lru_cache(maxsize=None)
def canonical_inverse(kind: CanonicalKind, d: int) -> np.ndarray:
    """N^{-1} by exact rational elimination, converted once to floats."""
    inverse = _exact_matrix(kind, d).inv()
    array = np.array(inverse.tolist(), dtype=float)
    array.setflags(write=False)
    logger.debug(f"Cached exact inverse of {kind.value} matrix for d={d}")
    return array


def membership_L(w: Sequence[float], matrix: Optional[CanonicalMatrix], d: int,
                 tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Whether `w` is N applied to the unsquared edge lengths of a real (d+2)-point configuration; `matrix=None` means identity."""
    w = np.asarray(w, dtype=float).ravel()
    if matrix is not None and matrix.Dim != d:
        raise ValueError(f"Matrix for d={matrix.Dim} used with d={d}")
    size = comb(d + 2, 2) if matrix is None else matrix.size
    if w.size != size:
        raise ValueError(f"Expected {size} values for d={d}, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise ValueError("Values must be finite")

    if matrix is None:
        u = w.copy()
    else:
        u = canonical_inverse(matrix.Kind, d) @ w

    sq = u * u
    residual = normalized_cayley_menger(sq, d)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    member = bool(np.all(u > tol * scale)) and abs(residual) < tol
    if member:
        psd, rank_ok = realizability(sq, d + 2, d, tol)
        member = psd and rank_ok
    return MembershipVerdict(
        Member=member,
        RecoveredLengths=tuple(float(x) for x in u) if member else None,
        CmResidual=float(residual),
    )


@lru_cache(maxsize=None)
def singular_strata() -> tuple[tuple[StratumType, tuple[int, ...], np.ndarray], ...]:
    def row(*terms: tuple[int, int, int]) -> np.ndarray:
        coefficients = np.zeros(6)
        for sign, i, j in terms:
            coefficients[edge_index(i, j)] = sign
        return coefficients

    strata: list[tuple[StratumType, tuple[int, ...], np.ndarray]] = []
    for s13, s23, s14, s24, s34 in product((1, -1), repeat=5):
        equations = np.stack([
            row((1, 1, 2), (-s13, 1, 3), (s23, 2, 3)),
            row((1, 1, 2), (-s14, 1, 4), (s24, 2, 4)),
            row((s13, 1, 3), (-s14, 1, 4), (s34, 3, 4)),
        ])
        strata.append((StratumType.TYPE_I, (s13, s23, s14, s24, s34), equations))

    for a, b in ((i, j) for j in range(2, 5) for i in range(1, j)):
        c, e = (v for v in range(1, 5) if v not in (a, b))
        for s, t in product((1, -1), repeat=2):
            equations = np.stack([
                row((1, a, b)),
                row((1, a, c), (-s, b, c)),
                row((1, a, e), (-t, b, e)),
            ])
            strata.append((StratumType.TYPE_II, (a, b, s, t), equations))

    for triangle in combinations(range(1, 5), 3):
        a, b, c = triangle
        equations = np.stack([row((1, a, b)), row((1, a, c)), row((1, b, c))])
        strata.append((StratumType.TYPE_III, triangle, equations))

    return tuple(strata)


def is_singular_L24(l: Sequence[float], tol: float = DEFAULT_TOL) -> SingularityVerdict:
    l = np.asarray(l, dtype=float).ravel()
    if l.size != 6:
        raise ValueError(f"Expected 6 edge lengths, got {l.size}")
    threshold = tol * float(np.max(np.abs(l)))
    for stratum, witness, equations in singular_strata():
        if np.all(np.abs(equations @ l) <= threshold):
            return SingularityVerdict(True, stratum, witness)
    return SingularityVerdict(False)


def rank6_shortcut(w: Sequence[float], matrix: Optional[CanonicalMatrix], b: int,
                   tol: float = DEFAULT_TOL, relation_tol: float = DEFAULT_RELATION_TOL,
                   strategy: RankStrategy = RankStrategy.BRUTE, d: int = 2,
                   restricted: bool = False) -> bool:
    """Rational rank 6 of a planar base tuple from rank 3 of its first three values plus non-singularity."""
    if d != 2 or (matrix is not None and matrix.Dim != 2):
        raise ValueError("The rank-6 shortcut only applies to d=2")
    w = np.asarray(w, dtype=float).ravel()
    verdict = membership_L(w, matrix, 2, tol)
    if not verdict.Member:
        return False
    singularity = is_singular_L24(verdict.RecoveredLengths, tol)
    if singularity.Singular:
        logger.debug(f"Recovered lengths lie on a type {singularity.Stratum.value} stratum {singularity.Witness}")
        return False
    if strategy == RankStrategy.DISTINCT:
        independent, _ = rational_rank_at_least(w, 6, b, strategy, relation_tol, restricted)
    else:
        independent, _ = rational_rank_at_least(w[:3], 3, b, strategy, relation_tol)
    return independent


def default_strategy(d: int) -> RankStrategy:
    return RankStrategy.BRUTE if d == 2 else RankStrategy.REDUCED


def certify_rank(w: Sequence[float], matrix: Optional[CanonicalMatrix], d: int, b: int,
                 strategy: Optional[RankStrategy] = None, tol: float = DEFAULT_TOL,
                 relation_tol: float = DEFAULT_RELATION_TOL, restricted: bool = False) -> bool:
    """Full rational rank D of a consistent tuple: the shortcut for d=2, a direct test above."""
    strategy = strategy or default_strategy(d)
    if d == 2:
        return rank6_shortcut(w, matrix, b, tol, relation_tol, strategy, restricted=restricted)

    w = np.asarray(w, dtype=float).ravel()
    if strategy == RankStrategy.DISTINCT:
        independent, _ = rational_rank_at_least(w, w.size, b, strategy, relation_tol, restricted)
        return independent
    bound = b ** (w.size - 1)
    if strategy == RankStrategy.BRUTE:
        try:
            return not find_integer_relation_brute(w, bound, relation_tol).is_relation
        except SearchBudgetExceeded:
            logger.debug(f"Brute rank test for k={w.size} exceeds budget, reducing instead")
    return not find_integer_relation_reduced(w, float(bound), relation_tol).is_relation
