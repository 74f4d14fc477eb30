# -*- coding: utf-8 -*-
"""
Point cloud flagfolds and varifolds.

A point cloud flagfold is a finite sum of atoms ``m * delta_x (x) delta_S``
where ``S`` is a trace-one positive semidefinite matrix. A point cloud
d-varifold replaces ``S`` by a d-plane, stored as an orthonormal d-frame.
Atoms are kept in arrays; every reduction sums them in storage order.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.spatial import cKDTree

from .constants import JACOBIAN_TOL, volume_unit_ball
from .errors import DegenerateMapError, EmptyNeighborhoodError, InvalidInputError
from .fields import MapWithJacobian, VectorFieldWithJacobian
from .flagcore import check_cov, decompose, dimension, embed_grassmannian, renormalize_cov, sbar
from .utils import CHUNK_SIZE, DEFAULT_ZERO_TOL, as_vector, check_orthonormal, parallel_map

logger = logging.getLogger(__name__)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class PointCloudFlagfold:
    """
    Finite flagfold ``sum_i m_i delta_{x_i} (x) delta_{S_i}``.

    Parameters
    ----------
    positions : array (N, n)
    covariances : array (N, n, n)
        Each a valid trace-one positive semidefinite matrix.
    masses : array (N,)
        Nonnegative.
    """

    def __init__(self: "PointCloudFlagfold", positions: np.ndarray, covariances: np.ndarray, masses: np.ndarray, validate: bool = True) -> None:
        positions = np.array(positions, dtype=float)
        covariances = np.array(covariances, dtype=float)
        masses = np.array(masses, dtype=float).reshape(-1)
        count = masses.size
        if positions.ndim != 2 or covariances.ndim != 3 or positions.shape[0] != count or covariances.shape[0] != count:
            raise InvalidInputError("Problem! positions, covariances and masses disagree in length.")
        if count and covariances.shape[1:] != (positions.shape[1], positions.shape[1]):
            raise InvalidInputError("Problem! covariances must be n x n for positions in R^n.")
        if np.any(masses < 0):
            raise InvalidInputError("Problem! Masses must be nonnegative.")
        if validate:
            for S in covariances:
                check_cov(S)
        self._positions = _readonly(positions)
        self._covariances = _readonly(covariances)
        self._masses = _readonly(masses)

    @property
    def positions(self: "PointCloudFlagfold") -> np.ndarray:
        return self._positions

    @property
    def covariances(self: "PointCloudFlagfold") -> np.ndarray:
        return self._covariances

    @property
    def masses(self: "PointCloudFlagfold") -> np.ndarray:
        return self._masses

    @property
    def n(self: "PointCloudFlagfold") -> int:
        return self._positions.shape[1]

    def __len__(self: "PointCloudFlagfold") -> int:
        return self._masses.size

    def total_mass(self: "PointCloudFlagfold") -> float:
        return float(np.sum(self._masses))

    def to_json(self: "PointCloudFlagfold") -> List[Dict[str, Any]]:
        return [{"x": x.tolist(), "S": S.tolist(), "m": float(m)} for x, S, m in zip(self._positions, self._covariances, self._masses)]

    @staticmethod
    def from_json(data: List[Dict[str, Any]]) -> "PointCloudFlagfold":
        if not isinstance(data, list) or len(data) == 0:
            raise InvalidInputError("Problem! A flagfold is a non-empty JSON array of {x, S, m}.")
        try:
            positions = [as_vector(atom["x"], "x") for atom in data]
            covariances = [renormalize_cov(atom["S"]) for atom in data]
            masses = [float(atom.get("m", 1.0)) for atom in data]
        except (KeyError, TypeError) as err:
            raise InvalidInputError(f"Problem! Invalid flagfold atom: {err}") from err
        return PointCloudFlagfold(np.array(positions), np.array(covariances), np.array(masses))

    @staticmethod
    def concatenate(parts: Sequence["PointCloudFlagfold"], n: int) -> "PointCloudFlagfold":
        parts = [part for part in parts if len(part)]
        if not parts:
            return PointCloudFlagfold(np.zeros((0, n)), np.zeros((0, n, n)), np.zeros(0))
        return PointCloudFlagfold(
            np.concatenate([part.positions for part in parts]),
            np.concatenate([part.covariances for part in parts]),
            np.concatenate([part.masses for part in parts]),
            validate=False,
        )


class PointCloudVarifold:
    """Finite d-varifold ``sum_i m_i delta_{x_i} (x) delta_{P_i}``, ``P_i`` given by orthonormal d-frames."""

    def __init__(self: "PointCloudVarifold", positions: np.ndarray, frames: np.ndarray, masses: np.ndarray, d: int, validate: bool = True) -> None:
        positions = np.array(positions, dtype=float)
        frames = np.array(frames, dtype=float)
        masses = np.array(masses, dtype=float).reshape(-1)
        count = masses.size
        if positions.ndim != 2 or positions.shape[0] != count or frames.shape[0] != count:
            raise InvalidInputError("Problem! positions, frames and masses disagree in length.")
        n = positions.shape[1]
        if not 1 <= d <= n:
            raise InvalidInputError(f"Problem! Varifold dimension {d} out of range for n={n}.")
        if count and frames.shape[1:] != (n, d):
            raise InvalidInputError(f"Problem! frames must be {n} x {d}.")
        if np.any(masses < 0):
            raise InvalidInputError("Problem! Masses must be nonnegative.")
        if validate:
            for E in frames:
                check_orthonormal(E)
        self._positions = _readonly(positions)
        self._frames = _readonly(frames.reshape(count, n, d))
        self._masses = _readonly(masses)
        self._d = int(d)

    @property
    def positions(self: "PointCloudVarifold") -> np.ndarray:
        return self._positions

    @property
    def frames(self: "PointCloudVarifold") -> np.ndarray:
        return self._frames

    @property
    def masses(self: "PointCloudVarifold") -> np.ndarray:
        return self._masses

    @property
    def d(self: "PointCloudVarifold") -> int:
        return self._d

    @property
    def n(self: "PointCloudVarifold") -> int:
        return self._positions.shape[1]

    def __len__(self: "PointCloudVarifold") -> int:
        return self._masses.size

    def total_mass(self: "PointCloudVarifold") -> float:
        return float(np.sum(self._masses))

    def projectors(self: "PointCloudVarifold") -> np.ndarray:
        return np.einsum("aik,ajk->aij", self._frames, self._frames)


def mass(W: Union[PointCloudFlagfold, PointCloudVarifold]) -> Tuple[np.ndarray, np.ndarray]:
    if len(W) == 0:
        return np.zeros((0, W.n)), np.zeros(0)
    points, inverse = np.unique(W.positions, axis=0, return_inverse=True)
    merged = np.zeros(points.shape[0])
    np.add.at(merged, inverse.reshape(-1), W.masses)
    return points, merged


def disintegrate(W: PointCloudFlagfold) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """For every distinct position: the position, its covariances and their probabilities."""
    points, inverse = np.unique(W.positions, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    result = []
    for index, x in enumerate(points):
        members = np.flatnonzero(inverse == index)
        weights = W.masses[members]
        total = weights.sum()
        probabilities = weights / total if total > 0 else np.full(members.size, 1.0 / members.size)
        result.append((x, W.covariances[members], probabilities))
    return result


def indicator_kernel(r: np.ndarray) -> np.ndarray:
    return (np.abs(r) < 1.0).astype(float)


def smooth_kernel(r: np.ndarray) -> np.ndarray:
    r = np.abs(r)
    inside = r < 1.0
    out = np.zeros_like(r, dtype=float)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


KERNELS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {"indicator": indicator_kernel, "smooth": smooth_kernel}


def kernel_by_name(name: str) -> Callable[[np.ndarray], np.ndarray]:
    if name not in KERNELS:
        raise InvalidInputError(f"Problem! Invalid kernel {name}. Choose from {', '.join(KERNELS)}.")
    return KERNELS[name]


def local_covariance(
    points: np.ndarray,
    masses: Optional[np.ndarray],
    x: np.ndarray,
    eta: float,
    kernel: Union[str, Callable[[np.ndarray], np.ndarray]] = "indicator",
) -> np.ndarray:
    """
    Normalized local covariance of a weighted point set around ``x``.

    Parameters
    ----------
    points : array (N, n)
    masses : array (N,), optional
        Defaults to unit masses.
    x : array (n,)
    eta : float
        Neighbourhood radius.
    kernel : str or callable
        Even nonnegative profile on (-1, 1): "indicator" or "smooth".

    Returns
    -------
    array (n, n)
        ``sum w m z z^T / sum w m |z|^2`` with ``z = (y - x) / eta``.
    """
    if eta <= 0:
        raise InvalidInputError(f"Problem! eta must be positive, got {eta}.")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x = as_vector(x, "x")
    masses = np.ones(points.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    if isinstance(kernel, str):
        kernel = kernel_by_name(kernel)
    z = (points - x[None, :]) / eta
    sq = np.sum(z * z, axis=1)
    weights = kernel(np.sqrt(sq)) * masses
    denominator = np.dot(weights, sq)
    if not denominator > 0:
        raise EmptyNeighborhoodError(f"Problem! No mass within eta={eta} of {x} off the centre.")
    numerator = (z * weights[:, None]).T @ z
    S = numerator / denominator
    return 0.5 * (S + S.T)


def pca_flagfold(
    points: np.ndarray,
    masses: Optional[np.ndarray],
    eta: float,
    kernel: Union[str, Callable[[np.ndarray], np.ndarray]] = "indicator",
) -> PointCloudFlagfold:
    """Flagfold carrying the local covariance at every sample; isolated samples are dropped."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    masses = np.ones(points.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    if isinstance(kernel, str):
        kernel = kernel_by_name(kernel)
    tree = cKDTree(points)
    chunks = [np.arange(start, min(start + CHUNK_SIZE, points.shape[0])) for start in range(0, points.shape[0], CHUNK_SIZE)]

    def job(indices: np.ndarray) -> List[Optional[np.ndarray]]:
        result = []
        for index in indices:
            neighbours = tree.query_ball_point(points[index], eta)
            try:
                result.append(local_covariance(points[neighbours], masses[neighbours], points[index], eta, kernel))
            except EmptyNeighborhoodError:
                result.append(None)
        return result

    covariances = [S for chunk in parallel_map(job, chunks, desc="local pca", total=len(chunks)) for S in chunk]
    keep = np.array([S is not None for S in covariances], dtype=bool)
    if not keep.any():
        raise EmptyNeighborhoodError(f"Problem! Every sample is isolated at eta={eta}.")
    if not keep.all():
        logger.warning("dropped %d isolated samples at eta=%g", int((~keep).sum()), eta)
    kept = np.array([S for S in covariances if S is not None])
    return PointCloudFlagfold(points[keep], kept, masses[keep], validate=False)


def varifold_to_flagfold(V: PointCloudVarifold) -> PointCloudFlagfold:
    covariances = V.projectors() / V.d
    return PointCloudFlagfold(V.positions, covariances, V.masses, validate=False)


def flagfold_to_varifolds(W: PointCloudFlagfold, d: int, zero_tol: float = DEFAULT_ZERO_TOL) -> PointCloudVarifold:
    n = W.n
    if not 1 <= d <= n:
        raise InvalidInputError(f"Problem! Varifold dimension {d} out of range for n={n}.")
    positions, frames, masses = [], [], []
    for x, S, m in zip(W.positions, W.covariances, W.masses):
        rep = decompose(S)
        if rep.mu[d - 1] > zero_tol:
            positions.append(x)
            frames.append(rep.frame[:, :d])
            masses.append(m * rep.mu[d - 1])
    return PointCloudVarifold(np.array(positions).reshape(-1, n), np.array(frames).reshape(-1, n, d), np.array(masses), d, validate=False)


def flagfold_to_all_varifolds(W: PointCloudFlagfold, zero_tol: float = DEFAULT_ZERO_TOL) -> Dict[int, PointCloudVarifold]:
    return {d: flagfold_to_varifolds(W, d, zero_tol) for d in range(1, W.n + 1)}


def varifolds_to_flagfold(varifolds: Union[Dict[int, PointCloudVarifold], Sequence[PointCloudVarifold]]) -> PointCloudFlagfold:
    if isinstance(varifolds, dict):
        varifolds = [varifolds[d] for d in sorted(varifolds)]
    if not varifolds:
        raise InvalidInputError("Problem! No varifolds given.")
    n = varifolds[0].n
    return PointCloudFlagfold.concatenate([varifold_to_flagfold(V) for V in varifolds], n)


def is_rectifiable_support(W: PointCloudFlagfold, zero_tol: float = DEFAULT_ZERO_TOL) -> bool:
    # every atom carries a single plane
    for S in W.covariances:
        if np.sum(decompose(S).mu > zero_tol) != 1:
            return False
    return True


def dimension_field(W: PointCloudFlagfold, x: np.ndarray, atol: float = 0.0) -> float:
    x = as_vector(x, "x")
    here = np.all(np.abs(W.positions - x[None, :]) <= atol, axis=1)
    weights = W.masses[here]
    if not weights.sum() > 0:
        raise InvalidInputError(f"Problem! No mass at {x}.")
    dims = np.array([dimension(decompose(S).mu) for S in W.covariances[here]])
    return float(np.dot(weights, dims) / weights.sum())


def jacobian_factor(M: np.ndarray) -> float:
    """d-Jacobian ``sqrt(det(M^T M))`` of an n x d matrix."""
    gram = M.T @ M
    return float(np.sqrt(max(np.linalg.det(gram), 0.0)))


def _image_plane(DPhi: np.ndarray, E: np.ndarray) -> Tuple[np.ndarray, float]:
    M = DPhi @ E
    J = jacobian_factor(M)
    if J <= JACOBIAN_TOL:
        raise DegenerateMapError(f"Problem! The map collapses a {E.shape[1]}-plane (Jacobian {J:.3e}).")
    Q, _ = scipy.linalg.qr(M, mode="economic")
    return Q, J


def _map_jacobian(phi: MapWithJacobian, x: np.ndarray) -> np.ndarray:
    DPhi = np.asarray(phi.jacobian(x), dtype=float)
    if abs(np.linalg.det(DPhi)) <= JACOBIAN_TOL:
        raise DegenerateMapError(f"Problem! The map is not invertible at {x}.")
    return DPhi


def pushforward(W: PointCloudFlagfold, phi: MapWithJacobian, zero_tol: float = DEFAULT_ZERO_TOL) -> PointCloudFlagfold:
    positions, covariances, masses = [], [], []
    for x, S, m in zip(W.positions, W.covariances, W.masses):
        DPhi = _map_jacobian(phi, x)
        image = np.asarray(phi.value(x), dtype=float)
        rep = decompose(S)
        for k in np.flatnonzero(rep.mu > zero_tol):
            Q, J = _image_plane(DPhi, rep.frame[:, : k + 1])
            positions.append(image)
            covariances.append(Q @ Q.T / (k + 1))
            masses.append(m * rep.mu[k] * J)
    n = W.n
    return PointCloudFlagfold(np.array(positions).reshape(-1, n), np.array(covariances).reshape(-1, n, n), np.array(masses), validate=False)


def pushforward_varifold(V: PointCloudVarifold, phi: MapWithJacobian) -> PointCloudVarifold:
    positions, frames, masses = [], [], []
    for x, E, m in zip(V.positions, V.frames, V.masses):
        DPhi = _map_jacobian(phi, x)
        Q, J = _image_plane(DPhi, E)
        positions.append(np.asarray(phi.value(x), dtype=float))
        frames.append(Q)
        masses.append(m * J)
    n, d = V.n, V.d
    return PointCloudVarifold(np.array(positions).reshape(-1, n), np.array(frames).reshape(-1, n, d), np.array(masses), d, validate=False)


def first_variation(W: PointCloudFlagfold, X: VectorFieldWithJacobian) -> float:
    total = 0.0
    for x, S, m in zip(W.positions, W.covariances, W.masses):
        total += m * float(np.sum(sbar(S) * np.asarray(X.jacobian(x), dtype=float).T))
    return total


def varifold_first_variation(V: PointCloudVarifold, X: VectorFieldWithJacobian) -> float:
    total = 0.0
    for x, P, m in zip(V.positions, V.projectors(), V.masses):
        total += m * float(np.sum(P * np.asarray(X.jacobian(x), dtype=float).T))
    return total


def _ball_masses(W: Union[PointCloudFlagfold, PointCloudVarifold], x: np.ndarray, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise InvalidInputError("Problem! radii must be positive and increasing.")
    distances = np.linalg.norm(W.positions - x[None, :], axis=1)
    inside = distances[None, :] <= radii[:, None]
    return radii, inside


def monotonicity_ratio(W: PointCloudFlagfold, x: np.ndarray, d_star: float, Lambda: float, radii: Sequence[float]) -> np.ndarray:
    """``exp(Lambda rho) rho^{-d_star} ||W||(B_rho(x))`` for every radius; closed balls."""
    x = as_vector(x, "x")
    radii, inside = _ball_masses(W, x, radii)
    masses = inside.astype(float) @ W.masses
    return np.exp(Lambda * radii) * radii ** (-float(d_star)) * masses


def density_ratio(W: PointCloudFlagfold, x: np.ndarray, d_star: float, Lambda: float, radii: Sequence[float]) -> np.ndarray:
    """Monotonicity ratio over the volume of the unit ``d_star``-ball: 1 on a unit-density ``d_star``-plane."""
    return monotonicity_ratio(W, x, d_star, Lambda, radii) / volume_unit_ball(float(d_star))


def monotonicity_excess(W: PointCloudFlagfold, x: np.ndarray, d_star: float, radii: Sequence[float]) -> np.ndarray:
    """``int_{B_rho(x)} (dim - d_star) d||W||``; nonnegative values are required by the monotonicity formula."""
    x = as_vector(x, "x")
    radii, inside = _ball_masses(W, x, radii)
    dims = np.array([dimension(decompose(S).mu) for S in W.covariances])
    return inside.astype(float) @ (W.masses * (dims - float(d_star)))


def grassmannian_flagfold(positions: np.ndarray, basis: np.ndarray, masses: Union[float, np.ndarray]) -> PointCloudFlagfold:
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    S = embed_grassmannian(basis)
    count = positions.shape[0]
    masses = np.broadcast_to(np.asarray(masses, dtype=float), (count,))
    return PointCloudFlagfold(positions, np.broadcast_to(S, (count,) + S.shape), masses, validate=False)


def sample_plane_grid(spacing: float, half_width: float, n: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """Grid on the (x_1, x_2)-plane of R^n, masses ``spacing^2`` (unit density)."""
    ticks = spacing * np.arange(-int(round(half_width / spacing)), int(round(half_width / spacing)) + 1)
    u, v = np.meshgrid(ticks, ticks, indexing="ij")
    points = np.zeros((u.size, n))
    points[:, 0] = u.reshape(-1)
    points[:, 1] = v.reshape(-1)
    return points, np.full(u.size, spacing**2)


def sample_line_grid(spacing: float, half_width: float, n: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """Grid on the x_1-axis of R^n, masses ``spacing`` (unit density)."""
    ticks = spacing * np.arange(-int(round(half_width / spacing)), int(round(half_width / spacing)) + 1)
    points = np.zeros((ticks.size, n))
    points[:, 0] = ticks
    return points, np.full(ticks.size, spacing)


def sample_cylinder(rng: np.random.Generator, count: int, radius: float, height: float) -> np.ndarray:
    """Uniform samples in the solid cylinder of given radius around the x_3-axis, |x_3| <= height."""
    r = radius * np.sqrt(rng.random(count))
    angle = 2.0 * np.pi * rng.random(count)
    z = height * (2.0 * rng.random(count) - 1.0)
    return np.column_stack([r * np.cos(angle), r * np.sin(angle), z])


def sample_sphere(rng: np.random.Generator, count: int, n: int, radius: float = 1.0) -> np.ndarray:
    directions = rng.standard_normal((count, n))
    return radius * directions / np.linalg.norm(directions, axis=1, keepdims=True)


def sample_line(rng: np.random.Generator, count: int, direction: np.ndarray, half_length: float = 1.0) -> np.ndarray:
    direction = as_vector(direction, "direction")
    direction = direction / np.linalg.norm(direction)
    return half_length * (2.0 * rng.random(count) - 1.0)[:, None] * direction[None, :]
