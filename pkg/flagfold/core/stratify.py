# -*- coding: utf-8 -*-
"""
Flag types, the coarser-than order, cells of the stratification and the
horizontal projection.

Index pairs are 0-based: the pair ``(i, j)`` addresses entry ``B[i, j]``.
"""

from itertools import accumulate
from typing import FrozenSet, List, NamedTuple, Tuple, Union

import numpy as np

from .errors import InvalidInputError, NumericalError
from .flagcore import FlagRep, FlagType, check_flag_type, type_of
from .utils import DEFAULT_ZERO_TOL, check_skew

BlockIndexSet = FrozenSet[Tuple[int, int]]


class CellKey(NamedTuple):
    K: FrozenSet[int]
    flag_type: FlagType


def cut_points(parts: FlagType) -> Tuple[int, ...]:
    return tuple(accumulate(parts))


def coarser(J: Union[FlagType, List[int]], I: Union[FlagType, List[int]]) -> bool:
    J = check_flag_type(J)
    I = check_flag_type(I)
    if sum(J) != sum(I):
        raise InvalidInputError(f"Problem! Types {J} and {I} partition different integers.")
    # I is obtained from J by merging consecutive parts
    return set(cut_points(I)).issubset(cut_points(J))


def _cell_type(K: FrozenSet[int], n: int) -> FlagType:
    levels = sorted(k + 1 for k in K)
    if levels[-1] != n:
        levels.append(n)
    return tuple(int(p) for p in np.diff([0] + levels))


def project_flag(rep: FlagRep, J: Union[FlagType, List[int]], I: Union[FlagType, List[int]]) -> FlagRep:
    """
    Forget the levels of a type ``J`` flag that are not levels of ``I``.

    The frame is kept. The weight of each dropped level moves to the next
    retained level, so the result has type ``I`` and the same total weight.
    """
    n = rep.mu.size
    J = check_flag_type(J, n)
    I = check_flag_type(I, n)
    if not coarser(J, I):
        raise InvalidInputError(f"Problem! {J} is not finer than {I}.")
    targets = np.array(cut_points(I)) - 1
    mu = np.zeros(n)
    for index, weight in enumerate(rep.mu):
        mu[targets[np.searchsorted(targets, index)]] += weight
    return FlagRep(mu, rep.frame.copy())


def flag_projectors(frame: np.ndarray, I: Union[FlagType, List[int]]) -> List[np.ndarray]:
    frame = np.asarray(frame, dtype=float)
    I = check_flag_type(I, frame.shape[0])
    return [frame[:, :d] @ frame[:, :d].T for d in cut_points(I)]


def block_indices(I: Union[FlagType, List[int]]) -> BlockIndexSet:
    I = check_flag_type(I)
    pairs = set()
    start = 0
    for part in I:
        for i in range(start, start + part):
            for j in range(i + 1, start + part):
                pairs.add((i, j))
        start += part
    return frozenset(pairs)


def block_mask(I: Union[FlagType, List[int]]) -> np.ndarray:
    I = check_flag_type(I)
    labels = np.repeat(np.arange(len(I)), I)
    return labels[:, None] == labels[None, :]


def horizontal_project(B: np.ndarray, I: Union[FlagType, List[int]]) -> np.ndarray:
    B = check_skew(B)
    mask = block_mask(check_flag_type(I, B.shape[0]))
    return np.where(mask, 0.0, B)


def cell_of(mu: Union[List[float], np.ndarray], zero_tol: float = DEFAULT_ZERO_TOL) -> CellKey:
    mu = np.asarray(mu, dtype=float)
    K = frozenset(int(k) for k in np.flatnonzero(mu > zero_tol))
    if len(K) == 0:
        raise InvalidInputError(f"Problem! All weights are below {zero_tol}.")
    flag_type = _cell_type(K, mu.size)
    if flag_type != type_of(mu, zero_tol):
        raise NumericalError(f"Problem! Cell type {flag_type} disagrees with type_of for {mu}.")
    return CellKey(K, flag_type)


def cell_barycentre(K: FrozenSet[int], n: int) -> np.ndarray:
    if len(K) == 0 or max(K) >= n or min(K) < 0:
        raise InvalidInputError(f"Problem! Invalid cell {sorted(K)} for n={n}.")
    mu = np.zeros(n)
    mu[sorted(K)] = 1.0 / len(K)
    return mu
