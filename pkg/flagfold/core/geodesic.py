# -*- coding: utf-8 -*-
"""
Geodesic shooting for the pinched metric on the open cell of weighted flags.

The scheme is explicit Euler on the weights and a group exponential on the
frame,

    B^p       from the conserved momentum U_0 C_0 U_0^T
    mu^{p+1}  = mu^p + h mu'^p
    mu'^{p+1} = mu'^p + h mu''(mu^p, B^p)
    U^{p+1}   = U^p exp(h B^p)

so the momentum ``U C U^T`` is conserved up to the orthogonality of ``U``.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import h5py
import numpy as np
import scipy.linalg

from .constants import DRIFT_TOL, FRAME_WEIGHT, STATE_ORTHO_TOL, STATE_SUM_TOL, sqrt3
from .distances import principal_angles
from .errors import InvalidInputError, SingularPinchError
from .flagcore import FlagRep, check_cov, decompose, mu_to_lambda
from .riemann import PinchFunction, default_pinch, slice_masks
from .utils import DEFAULT_MU_MIN, DEFAULT_SINGULAR_TOL, SHOW_PROGRESS, as_matrix, as_vector, check_orthonormal, check_skew, progress, upper_pairs

logger = logging.getLogger(__name__)

__version__ = "1"


class Termination(Enum):
    HORIZON_REACHED = "horizon_reached"
    BOUNDARY_HIT = "boundary_hit"
    STEP_FAILURE = "step_failure"

    @staticmethod
    def parse(predicate: str) -> "Termination":
        for reason in Termination:
            if reason.value == predicate:
                return reason
        raise ValueError(f"Invalid termination {predicate}.")


class GeodesicState(NamedTuple):
    t: float
    mu: np.ndarray
    mu_dot: np.ndarray
    U: np.ndarray
    B: np.ndarray
    C0: np.ndarray


class Trajectory(NamedTuple):
    states: List[GeodesicState]
    termination: Termination
    h: float

    @property
    def times(self: "Trajectory") -> np.ndarray:
        return np.array([state.t for state in self.states])

    @property
    def mus(self: "Trajectory") -> np.ndarray:
        return np.array([state.mu for state in self.states])

    @property
    def mu_dots(self: "Trajectory") -> np.ndarray:
        return np.array([state.mu_dot for state in self.states])

    @property
    def frames(self: "Trajectory") -> np.ndarray:
        return np.array([state.U for state in self.states])

    @property
    def velocities(self: "Trajectory") -> np.ndarray:
        return np.array([state.B for state in self.states])

    @property
    def final(self: "Trajectory") -> GeodesicState:
        return self.states[-1]


def _pair_pinch_and_gradient(mu: np.ndarray, f: PinchFunction) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    masks = slice_masks(mu.size)
    values, grads = f.evaluate_many(masks * mu[None, :])
    return values, grads, masks


def _check_interior(mu: np.ndarray, threshold: float = 0.0) -> None:
    if np.any(mu <= threshold):
        raise InvalidInputError(f"Problem! Weights {mu} touch the boundary (threshold {threshold}).")


def mu_acceleration(mu: np.ndarray, B: np.ndarray, f: Optional[PinchFunction] = None) -> np.ndarray:
    """
    Second derivative of the weights along a geodesic.

    With ``T_l = 2 sum_{i <= l < j} f(mu_{i->j}) d_l f(mu_{i->j}) b_ij^2``, the 2
    being the frame weight of the metric, the acceleration is ``mean(T) - T``,
    which sums to zero.
    """
    if f is None:
        f = default_pinch()
    mu = as_vector(mu, "mu")
    B = check_skew(B)
    _check_interior(mu)
    values, grads, masks = _pair_pinch_and_gradient(mu, f)
    rows, cols = upper_pairs(mu.size)
    coefficients = values * B[rows, cols] ** 2
    T = FRAME_WEIGHT * np.sum(coefficients[:, None] * grads * masks, axis=0)
    return np.mean(T) - T


def momentum_from_velocity(mu: np.ndarray, B: np.ndarray, f: Optional[PinchFunction] = None) -> np.ndarray:
    if f is None:
        f = default_pinch()
    n = mu.size
    rows, cols = upper_pairs(n)
    values = f.values_many(slice_masks(n) * mu[None, :])
    C = np.zeros((n, n))
    C[rows, cols] = values**2 * B[rows, cols]
    return C - C.T


def _velocity_from_momentum(mu: np.ndarray, M: np.ndarray, f: PinchFunction, singular_tol: float) -> np.ndarray:
    n = mu.size
    rows, cols = upper_pairs(n)
    values = f.values_many(slice_masks(n) * mu[None, :])
    # pairs without momentum keep b_ij = 0 whatever the pinch
    active = M[rows, cols] != 0.0
    singular = active & (values < singular_tol)
    if np.any(singular):
        low = int(np.flatnonzero(singular)[np.argmin(values[singular])])
        raise SingularPinchError(f"Problem! Pinch f(mu_({rows[low]}->{cols[low]})) = {values[low]:.3e} is below {singular_tol:.1e}.")
    B = np.zeros((n, n))
    B[rows[active], cols[active]] = M[rows[active], cols[active]] / values[active] ** 2
    return B - B.T


def recover_B(
    mu: np.ndarray,
    U: np.ndarray,
    U0: np.ndarray,
    C0: np.ndarray,
    f: Optional[PinchFunction] = None,
    singular_tol: float = DEFAULT_SINGULAR_TOL,
) -> np.ndarray:
    if f is None:
        f = default_pinch()
    mu = as_vector(mu, "mu")
    U = as_matrix(U, "U")
    U0 = as_matrix(U0, "U0")
    C0 = check_skew(C0, label="C0")
    K0 = U0 @ C0 @ U0.T
    return _velocity_from_momentum(mu, U.T @ K0 @ U, f, singular_tol)


def _rodrigues(A: np.ndarray) -> np.ndarray:
    w = np.array([A[2, 1], A[0, 2], A[1, 0]])
    theta = np.linalg.norm(w)
    A2 = A @ A
    if theta < 1e-6:
        a = 1.0 - theta**2 / 6.0 + theta**4 / 120.0
        b = 0.5 - theta**2 / 24.0 + theta**4 / 720.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * A + b * A2


def expm_skew(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        c, s = np.cos(A[1, 0]), np.sin(A[1, 0])
        return np.array([[c, -s], [s, c]])
    if n == 3:
        return _rodrigues(A)
    return scipy.linalg.expm(A)


def _upper_entries_to_matrix(B0: Any, n: int) -> np.ndarray:
    if isinstance(B0, dict):
        B = np.zeros((n, n))
        for key, value in B0.items():
            i, j = (int(part) for part in str(key).split(","))
            if not 1 <= i < j <= n:
                raise InvalidInputError(f"Problem! Invalid B0 entry {key}.")
            B[i - 1, j - 1] = float(value)
        return B - B.T
    B0 = np.array(B0, dtype=float)
    if B0.ndim == 2:
        return check_skew(B0, label="B0")
    rows, cols = upper_pairs(n)
    if B0.size != rows.size:
        raise InvalidInputError(f"Problem! B0 needs {rows.size} upper-triangle entries, got {B0.size}.")
    B = np.zeros((n, n))
    B[rows, cols] = B0
    return B - B.T


def initial_state(
    mu0: Union[Sequence[float], np.ndarray],
    mu_dot0: Union[Sequence[float], np.ndarray],
    U0: Optional[Union[Sequence[Sequence[float]], np.ndarray]] = None,
    B0: Optional[Any] = None,
    f: Optional[PinchFunction] = None,
) -> GeodesicState:
    if f is None:
        f = default_pinch()
    mu0 = as_vector(mu0, "mu0")
    n = mu0.size
    mu_dot0 = as_vector(mu_dot0, "mu_dot0")
    if mu_dot0.size != n:
        raise InvalidInputError("Problem! mu0 and mu_dot0 sizes differ.")
    if abs(mu0.sum() - 1.0) > STATE_SUM_TOL or abs(mu_dot0.sum()) > STATE_SUM_TOL:
        raise InvalidInputError("Problem! mu0 must sum to 1 and mu_dot0 to 0.")
    _check_interior(mu0)
    U0 = np.eye(n) if U0 is None else check_orthonormal(as_matrix(U0, "U0"), label="U0")
    if U0.shape != (n, n):
        raise InvalidInputError("Problem! U0 must be n x n.")
    B = np.zeros((n, n)) if B0 is None else _upper_entries_to_matrix(B0, n)
    C0 = momentum_from_velocity(mu0, B, f)
    return GeodesicState(0.0, mu0, mu_dot0, U0, B, C0)


def _drift(mu: np.ndarray, mu_dot: np.ndarray, U: np.ndarray) -> float:
    return max(abs(mu.sum() - 1.0), abs(mu_dot.sum()), float(np.linalg.norm(U.T @ U - np.eye(U.shape[0]))))


def shoot(
    init: GeodesicState,
    h: float,
    N: int,
    f: Optional[PinchFunction] = None,
    mu_min: float = DEFAULT_MU_MIN,
    singular_tol: float = DEFAULT_SINGULAR_TOL,
    show_progress: bool = SHOW_PROGRESS,
) -> Trajectory:
    """
    Integrate a geodesic from ``init`` for at most ``N`` steps of size ``h``.

    Parameters
    ----------
    init : GeodesicState
        Start point, see ``initial_state``. Its ``C0`` is the conserved
        momentum; ``init.B`` is recomputed from it.
    h : float
        Time step.
    N : int
        Maximal number of steps.
    f : PinchFunction, optional
        Defaults to ``f(nu) = |nu| / 4``.
    mu_min : float
        Stop (``boundary_hit``) as soon as a weight is at or below this.
    singular_tol : float
        Pinch values below this end the run with ``step_failure``.

    Returns
    -------
    Trajectory
    """
    if f is None:
        f = default_pinch()
    if not h > 0:
        raise InvalidInputError(f"Problem! Time step must be positive, got {h}.")
    if N < 0:
        raise InvalidInputError(f"Problem! Number of steps must be nonnegative, got {N}.")
    mu = as_vector(init.mu, "mu0").copy()
    mu_dot = as_vector(init.mu_dot, "mu_dot0").copy()
    U = np.array(init.U, dtype=float)
    C0 = check_skew(init.C0, label="C0")
    if np.any(mu <= mu_min):
        raise InvalidInputError(f"Problem! Initial weights {mu} must all exceed mu_min={mu_min}.")
    if _drift(mu, mu_dot, U) > STATE_SUM_TOL:
        raise InvalidInputError("Problem! Invalid initial state.")

    K0 = U @ C0 @ U.T
    states: List[GeodesicState] = []
    termination = Termination.HORIZON_REACHED
    for p in progress(range(N + 1), desc="shooting", total=N + 1, enabled=show_progress):
        try:
            B = _velocity_from_momentum(mu, U.T @ K0 @ U, f, singular_tol)
        except SingularPinchError as err:
            logger.warning("%s", err)
            termination = Termination.STEP_FAILURE
            break
        states.append(GeodesicState(p * h, mu.copy(), mu_dot.copy(), U.copy(), B, C0))
        if p == N:
            break
        if np.any(mu <= mu_min):
            logger.info("boundary reached at t=%g, mu=%s", p * h, mu)
            termination = Termination.BOUNDARY_HIT
            break
        acceleration = mu_acceleration(mu, B, f)
        mu = mu + h * mu_dot
        mu_dot = mu_dot + h * acceleration
        U = U @ expm_skew(h * B)
        if _drift(mu, mu_dot, U) > DRIFT_TOL:
            logger.warning("invariant drift above %g at t=%g", DRIFT_TOL, (p + 1) * h)
            termination = Termination.STEP_FAILURE
            break
    return Trajectory(states, termination, h)


def conserved_momentum(state: GeodesicState, f: Optional[PinchFunction] = None) -> np.ndarray:
    C = momentum_from_velocity(np.asarray(state.mu, dtype=float), np.asarray(state.B, dtype=float), f)
    return state.U @ C @ state.U.T


def check_state(state: GeodesicState) -> None:
    if abs(np.sum(state.mu) - 1.0) > STATE_SUM_TOL or abs(np.sum(state.mu_dot)) > STATE_SUM_TOL:
        raise InvalidInputError("Problem! State weights or weight velocity off the simplex.")
    if np.linalg.norm(state.U.T @ state.U - np.eye(state.U.shape[0])) > STATE_ORTHO_TOL:
        raise InvalidInputError("Problem! State frame is not orthogonal.")


def euclidean_geodesic(A0: np.ndarray, A1: np.ndarray, N: int) -> List[FlagRep]:
    A0 = check_cov(A0)
    A1 = check_cov(A1)
    if A0.shape != A1.shape:
        raise InvalidInputError("Problem! Endpoints live in different dimensions.")
    if N < 1:
        raise InvalidInputError("Problem! Need at least one step.")
    return [decompose((1.0 - p / N) * A0 + (p / N) * A1) for p in range(N + 1)]


def ellipsoid_frames(traj: Union[Trajectory, Sequence[FlagRep]]) -> List[Tuple[np.ndarray, np.ndarray]]:
    reps = _as_reps(traj)
    if reps and reps[0].mu.size != 3:
        raise InvalidInputError("Problem! Ellipsoids are drawn for n = 3 only.")
    # axes are the frame columns
    return [(rep.frame.copy(), np.sqrt(3.0 * lambda_of(rep.mu))) for rep in reps]


def angle_diagnostics(traj: Union[Trajectory, Sequence[FlagRep]]) -> np.ndarray:
    reps = _as_reps(traj)
    if not reps:
        return np.zeros((0, 2))
    if reps[0].mu.size < 2:
        raise InvalidInputError("Problem! Angle diagnostics need n >= 2.")
    first = reps[0].frame
    angles = np.zeros((len(reps), 2))
    for p, rep in enumerate(reps):
        angles[p, 0] = principal_angles(first[:, :1], rep.frame[:, :1])[0]
        angles[p, 1] = principal_angles(first[:, :2], rep.frame[:, :2])[0]
    return angles


def lambda_of(mu: np.ndarray) -> np.ndarray:
    # integrated weights drift off the simplex by rounding
    weights = np.clip(np.asarray(mu, dtype=float), 0.0, None)
    return mu_to_lambda(weights / weights.sum())


def _as_reps(traj: Union[Trajectory, Sequence[FlagRep]]) -> List[FlagRep]:
    if isinstance(traj, Trajectory):
        return [FlagRep(state.mu, state.U) for state in traj.states]
    return list(traj)


def simplex_coordinates(mu: np.ndarray) -> np.ndarray:
    mu = np.atleast_2d(np.asarray(mu, dtype=float))
    if mu.shape[1] != 3:
        raise InvalidInputError("Problem! Simplex coordinates are planar for n = 3 only.")
    corners = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, sqrt3]])
    return mu @ corners


def closest_approach(traj: Union[Trajectory, Sequence[FlagRep]], target: Sequence[float]) -> Tuple[int, float]:
    mus = np.array([rep.mu for rep in _as_reps(traj)])
    gaps = np.max(np.abs(mus - np.asarray(target, dtype=float)[None, :]), axis=1)
    index = int(np.argmin(gaps))
    return index, float(gaps[index])


def trajectory_columns(n: int) -> List[str]:
    columns = ["t"]
    columns += [f"mu_{k}" for k in range(1, n + 1)]
    columns += [f"lambda_{k}" for k in range(1, n + 1)]
    columns += [f"U_{i}{j}" if n < 10 else f"U_{i}_{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    columns += ["theta1", "theta2"]
    return columns


def trajectory_table(traj: Union[Trajectory, Sequence[FlagRep]], times: Optional[Sequence[float]] = None) -> Tuple[List[str], np.ndarray]:
    reps = _as_reps(traj)
    n = reps[0].mu.size
    if times is None:
        times = traj.times if isinstance(traj, Trajectory) else np.linspace(0.0, 1.0, len(reps))
    angles = angle_diagnostics(reps)
    rows = []
    for t, rep, theta in zip(times, reps, angles):
        lam = lambda_of(rep.mu)
        rows.append(np.concatenate(([t], rep.mu, lam, rep.frame.reshape(-1), theta)))
    return trajectory_columns(n), np.array(rows)


def save_trajectory(traj: Trajectory, path: Union[str, Path], f: Optional[PinchFunction] = None, mu_min: Optional[float] = None) -> Path:
    if f is None:
        f = default_pinch()
    path = Path(path)
    with h5py.File(path, "w") as data:
        data.create_dataset("params/h", data=traj.h)
        data.create_dataset("params/pinch", data=f.name)
        if mu_min is not None:
            data.create_dataset("params/mu_min", data=mu_min)
        data.create_dataset("params/C0", data=traj.states[0].C0)
        data.create_dataset("output/t", data=traj.times)
        data.create_dataset("output/mu", data=traj.mus)
        data.create_dataset("output/mu_dot", data=traj.mu_dots)
        data.create_dataset("output/lambda", data=np.array([lambda_of(mu) for mu in traj.mus]))
        data.create_dataset("output/U", data=traj.frames)
        data.create_dataset("output/B", data=traj.velocities)
        data.create_dataset("output/theta", data=angle_diagnostics(traj))
        data.create_dataset("header/termination", data=traj.termination.value)
        data.create_dataset("header/version", data=__version__)
    return path


def load_trajectory(path: Union[str, Path]) -> Trajectory:
    with h5py.File(path, "r") as data:
        h = float(np.array(data["params/h"]))
        C0 = np.array(data["params/C0"])
        times = np.array(data["output/t"])
        mus = np.array(data["output/mu"])
        mu_dots = np.array(data["output/mu_dot"])
        frames = np.array(data["output/U"])
        velocities = np.array(data["output/B"])
        termination = data["header/termination"][()]
    if isinstance(termination, bytes):
        termination = termination.decode()
    states = [GeodesicState(float(t), mu, mu_dot, U, B, C0) for t, mu, mu_dot, U, B in zip(times, mus, mu_dots, frames, velocities)]
    for state in states:
        check_state(state)
    return Trajectory(states, Termination.parse(str(termination)), h)


def run_summary(traj: Trajectory) -> Dict[str, Any]:
    final = traj.final
    return {"termination": traj.termination.value, "steps": len(traj.states) - 1, "t_final": final.t, "mu_final": final.mu.tolist()}
