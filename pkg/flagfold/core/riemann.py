# -*- coding: utf-8 -*-
"""
The pinched metric on weighted flags.

For a tangent vector ``(alpha, B)`` at ``(mu, U)``, with ``B = U^T U'`` skew,

    g = sum_k alpha_k beta_k + 2 sum_{i<j} f(mu_{i->j})^2 b_ij c_ij

where ``mu_{i->j}`` keeps the entries ``i..j-1`` of ``mu`` and zeroes the rest
(0-based ``i < j``). The factor 2 counts both ``b_ij`` and ``b_ji``, so the
frame part is the Frobenius pairing of the pinched velocities. The pinch
``f`` vanishes only at 0, which collapses the frame directions that a lower
stratum cannot see.
"""

from abc import ABC, abstractmethod
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .constants import FRAME_WEIGHT, ORTHO_TOL, SKEW_TOL, SUM_TOL
from .errors import InvalidInputError
from .flagcore import FlagType, check_flag_type, type_of
from .stratify import block_indices, cell_of, horizontal_project
from .utils import DEFAULT_ZERO_TOL, as_vector, check_skew, skew_part, upper_pairs


class PinchFunction(ABC):
    name: str = "custom"

    @abstractmethod
    def __call__(self: "PinchFunction", nu: np.ndarray) -> float:
        pass

    @abstractmethod
    def gradient(self: "PinchFunction", nu: np.ndarray) -> np.ndarray:
        pass

    def evaluate_many(self: "PinchFunction", nus: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Values and gradients for a stack of vectors, one per row."""
        values = np.array([self(nu) for nu in nus])
        grads = np.array([self.gradient(nu) for nu in nus])
        return values, grads

    def values_many(self: "PinchFunction", nus: np.ndarray) -> np.ndarray:
        return np.array([self(nu) for nu in nus])


class NormPinch(PinchFunction):
    """``f(nu) = scale * |nu|``."""

    def __init__(self: "NormPinch", scale: float = 0.25, name: Optional[str] = None) -> None:
        if scale <= 0:
            raise InvalidInputError(f"Problem! Pinch scale must be positive, got {scale}.")
        self._scale = float(scale)
        self.name = name if name is not None else f"norm*{scale:g}"

    @property
    def scale(self: "NormPinch") -> float:
        return self._scale

    def __call__(self: "NormPinch", nu: np.ndarray) -> float:
        return self._scale * float(np.linalg.norm(nu))

    def gradient(self: "NormPinch", nu: np.ndarray) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        norm = np.linalg.norm(nu)
        if norm == 0:
            raise InvalidInputError("Problem! The pinch gradient is undefined at 0.")
        return self._scale * nu / norm

    def evaluate_many(self: "NormPinch", nus: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        norms = np.linalg.norm(nus, axis=1)
        if np.any(norms == 0):
            raise InvalidInputError("Problem! The pinch gradient is undefined at 0.")
        return self._scale * norms, self._scale * nus / norms[:, None]

    def values_many(self: "NormPinch", nus: np.ndarray) -> np.ndarray:
        return self._scale * np.linalg.norm(nus, axis=1)


class CallablePinch(PinchFunction):
    """User supplied pinch: any ``f`` continuous, vanishing only at 0."""

    def __init__(self: "CallablePinch", value: Callable[[np.ndarray], float], gradient: Callable[[np.ndarray], np.ndarray], name: str = "custom") -> None:
        self._value = value
        self._gradient = gradient
        self.name = name

    def __call__(self: "CallablePinch", nu: np.ndarray) -> float:
        return float(self._value(np.asarray(nu, dtype=float)))

    def gradient(self: "CallablePinch", nu: np.ndarray) -> np.ndarray:
        return np.asarray(self._gradient(np.asarray(nu, dtype=float)), dtype=float)


def default_pinch() -> PinchFunction:
    return NormPinch(0.25, name="quarter-norm")


PINCH_NAMES = ("quarter-norm", "norm")


def pinch_by_name(name: str) -> PinchFunction:
    if name == "quarter-norm":
        return default_pinch()
    if name == "norm":
        return NormPinch(1.0, name="norm")
    raise InvalidInputError(f"Problem! Invalid pinch {name}. Choose from {', '.join(PINCH_NAMES)}.")


class TangentVector(NamedTuple):
    alpha: np.ndarray
    B: np.ndarray


def make_tangent(alpha: Union[List[float], np.ndarray], B: Union[List[List[float]], np.ndarray]) -> TangentVector:
    alpha = as_vector(alpha, "alpha")
    if abs(alpha.sum()) > SUM_TOL:
        raise InvalidInputError(f"Problem! alpha sums to {alpha.sum():.3e}, not 0.")
    B = check_skew(B)
    if B.shape[0] != alpha.size:
        raise InvalidInputError("Problem! alpha and B sizes differ.")
    return TangentVector(alpha, B)


def mu_slice(mu: np.ndarray, i: int, j: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if not 0 <= i < j <= mu.size - 1:
        raise InvalidInputError(f"Problem! Invalid slice ({i}, {j}) for n={mu.size}.")
    sliced = np.zeros_like(mu)
    sliced[i:j] = mu[i:j]
    return sliced


def slice_masks(n: int) -> np.ndarray:
    """Row p selects entries ``i_p..j_p - 1`` for the p-th pair of ``upper_pairs(n)``."""
    rows, cols = upper_pairs(n)
    index = np.arange(n)
    return (index[None, :] >= rows[:, None]) & (index[None, :] < cols[:, None])


def pair_pinch(mu: np.ndarray, f: PinchFunction) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    return f.values_many(slice_masks(mu.size) * mu[None, :])


def metric_eval(mu: np.ndarray, T1: TangentVector, T2: TangentVector, f: Optional[PinchFunction] = None, zero_tol: float = DEFAULT_ZERO_TOL) -> float:
    if f is None:
        f = default_pinch()
    mu = np.asarray(mu, dtype=float)
    n = mu.size
    for tangent in (T1, T2):
        if tangent.alpha.size != n or tangent.B.shape != (n, n):
            raise InvalidInputError("Problem! Tangent and weights sizes differ.")
        if abs(tangent.alpha.sum()) > SUM_TOL or np.max(np.abs(tangent.B + tangent.B.T)) > SKEW_TOL:
            raise InvalidInputError("Problem! Invalid tangent vector.")
    for i, j in block_indices(type_of(mu, zero_tol)):
        if abs(T1.B[i, j]) > SKEW_TOL or abs(T2.B[i, j]) > SKEW_TOL:
            raise InvalidInputError(f"Problem! Frame velocity has entry ({i}, {j}) inside a block of the flag type.")
    rows, cols = upper_pairs(n)
    weights = FRAME_WEIGHT * pair_pinch(mu, f) ** 2
    return float(np.dot(T1.alpha, T2.alpha) + np.sum(weights * T1.B[rows, cols] * T2.B[rows, cols]))


def metric_tensor(mu: np.ndarray, f: Optional[PinchFunction] = None, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """
    Gram matrix of the metric in the smooth frame of the cell of ``mu``.

    The frame is ``e_k - e_{k0}`` for ``k`` in the support except its last
    element ``k0``, followed by the elementary skew matrices ``X^{ij}`` for the
    pairs outside the diagonal blocks of the cell's type.
    """
    if f is None:
        f = default_pinch()
    mu = np.asarray(mu, dtype=float)
    n = mu.size
    cell = cell_of(mu, zero_tol)
    support = sorted(cell.K)
    blocked = block_indices(cell.flag_type)
    pairs = [(i, j) for i, j in zip(*upper_pairs(n)) if (i, j) not in blocked]

    simplex = np.ones((len(support) - 1, len(support) - 1)) + np.eye(len(support) - 1)
    frame_part = FRAME_WEIGHT * np.diag([f(mu_slice(mu, int(i), int(j))) ** 2 for i, j in pairs])
    gram = np.zeros((simplex.shape[0] + len(pairs),) * 2)
    gram[: simplex.shape[0], : simplex.shape[0]] = simplex
    gram[simplex.shape[0]:, simplex.shape[0]:] = frame_part
    return gram


def discrete_velocities(mus: np.ndarray, frames: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mus = np.asarray(mus, dtype=float)
    frames = np.asarray(frames, dtype=float)
    if h <= 0:
        raise InvalidInputError(f"Problem! Time step must be positive, got {h}.")
    if mus.ndim != 2 or mus.shape[0] < 2:
        raise InvalidInputError("Problem! A path needs at least two samples.")
    if frames.shape != (mus.shape[0], mus.shape[1], mus.shape[1]):
        raise InvalidInputError("Problem! Frames do not match the weight samples.")
    steps = frames[1:] - frames[:-1]
    if np.max(np.linalg.norm(steps, axis=(1, 2))) > 1.0:
        raise InvalidInputError("Problem! Consecutive frames are too far apart.")
    for U in frames:
        if np.linalg.norm(U.T @ U - np.eye(U.shape[0])) > np.sqrt(ORTHO_TOL):
            raise InvalidInputError("Problem! A frame along the path is not orthogonal.")
    mu_dot = (mus[1:] - mus[:-1]) / h
    B = np.array([skew_part(U.T @ dU) for U, dU in zip(frames[:-1], steps)]) / h
    midpoints = 0.5 * (mus[1:] + mus[:-1])
    return midpoints, mu_dot, B


def _speeds_squared(
    mus: np.ndarray, frames: np.ndarray, h: float, f: Optional[PinchFunction], flag_type: Optional[Union[FlagType, List[int]]]
) -> np.ndarray:
    midpoints, mu_dot, B = discrete_velocities(mus, frames, h)
    n = mus.shape[1]
    if flag_type is not None:
        flag_type = check_flag_type(flag_type, n)
        B = np.array([horizontal_project(b, flag_type) for b in B])
    rows, cols = upper_pairs(n)
    if f is None:
        weights = np.ones((midpoints.shape[0], rows.size))
    else:
        weights = np.array([pair_pinch(mu, f) ** 2 for mu in midpoints])
    return np.sum(mu_dot**2, axis=1) + FRAME_WEIGHT * np.sum(weights * B[:, rows, cols] ** 2, axis=1)


def path_length(
    mus: np.ndarray,
    frames: np.ndarray,
    h: float,
    f: Optional[PinchFunction] = None,
    flag_type: Optional[Union[FlagType, List[int]]] = None,
    pinched: bool = True,
) -> float:
    """
    Length of a sampled path ``t_p = p h``.

    Parameters
    ----------
    mus : array (N, n)
    frames : array (N, n, n)
    h : float
    f : PinchFunction, optional
        Defaults to ``f(nu) = |nu| / 4``.
    flag_type : tuple, optional
        Project frame velocities onto the horizontal space of this type.
    pinched : bool
        With ``False`` every pinch factor is 1 (the unpinched metric).
    """
    if pinched and f is None:
        f = default_pinch()
    speeds = _speeds_squared(mus, frames, h, f if pinched else None, flag_type)
    return float(np.sum(np.sqrt(speeds)) * h)


def path_energy(
    mus: np.ndarray,
    frames: np.ndarray,
    h: float,
    f: Optional[PinchFunction] = None,
    flag_type: Optional[Union[FlagType, List[int]]] = None,
    pinched: bool = True,
) -> float:
    if pinched and f is None:
        f = default_pinch()
    speeds = _speeds_squared(mus, frames, h, f if pinched else None, flag_type)
    return float(0.5 * np.sum(speeds) * h)
