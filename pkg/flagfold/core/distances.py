# -*- coding: utf-8 -*-
"""
Distances between weighted flags.
"""

from typing import Union, List

import numpy as np
import scipy.linalg

from .constants import ANGLE_SNAP
from .errors import InvalidInputError
from .flagcore import FlagRep
from .utils import as_matrix, check_orthonormal


def euclidean_distance(A: np.ndarray, B: np.ndarray) -> float:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise InvalidInputError(f"Problem! Shapes {A.shape} and {B.shape} differ.")
    return float(np.linalg.norm(A - B, "fro"))


def principal_angles(E: Union[List, np.ndarray], F: Union[List, np.ndarray]) -> np.ndarray:
    """
    Principal angles between span(E) and span(F), largest first.

    Angles below ANGLE_SNAP are set to 0, so identical spans give exactly 0.
    """
    E = check_orthonormal(E, label="E")
    F = check_orthonormal(F, label="F")
    if E.shape[0] != F.shape[0]:
        raise InvalidInputError("Problem! Subspaces live in different ambient spaces.")
    angles = scipy.linalg.subspace_angles(E, F)
    angles = np.clip(angles, 0.0, np.pi / 2)
    angles[angles < ANGLE_SNAP] = 0.0
    return np.sort(angles)[::-1]


def grassmann_distance(E: Union[List, np.ndarray], F: Union[List, np.ndarray], normalized: bool = False) -> float:
    E = check_orthonormal(E, label="E")
    F = check_orthonormal(F, label="F")
    if E.shape != F.shape:
        raise InvalidInputError(f"Problem! Subspace dimensions {E.shape[1]} and {F.shape[1]} differ.")
    distance = float(np.sqrt(np.sum(principal_angles(E, F) ** 2)))
    if normalized:
        distance /= np.sqrt(E.shape[1])
    return distance


def _level_distances(X: FlagRep, Y: FlagRep) -> np.ndarray:
    n = X.mu.size
    if Y.mu.size != n:
        raise InvalidInputError("Problem! Flags live in different dimensions.")
    weight = np.minimum(X.mu, Y.mu)
    levels = np.zeros(n)
    # the n-th spans are both the whole space
    for i in range(n - 1):
        if weight[i] > 0:
            levels[i] = grassmann_distance(X.frame[:, : i + 1], Y.frame[:, : i + 1], normalized=True)
    return levels


def krakus_distance(X: FlagRep, Y: FlagRep) -> float:
    levels = _level_distances(X, Y)
    return float(np.sum(np.abs(X.mu - Y.mu) + np.minimum(X.mu, Y.mu) * levels))


def conic_distance(X: FlagRep, Y: FlagRep) -> float:
    levels = np.minimum(_level_distances(X, Y), np.pi)
    squares = X.mu**2 + Y.mu**2 - 2.0 * X.mu * Y.mu * np.cos(levels)
    return float(np.sqrt(max(np.sum(squares), 0.0)))
