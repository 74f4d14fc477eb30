# -*- coding: utf-8 -*-
"""
Weighted flags and trace-one positive semidefinite matrices.

A weighted flag is stored as a pair ``(mu, frame)``: ``mu`` lives in the
simplex and ``frame`` is an orthogonal matrix whose first ``k`` columns span
the ``k``-th space of the flag. The eigenvalues of the associated matrix are
``lambda_k = sum_{i >= k} mu_i / i``.
"""

import logging
from typing import Any, Dict, NamedTuple, Optional, Tuple, Union, List

import numpy as np
import scipy.linalg
from scipy.stats import ortho_group

from .constants import ORTHO_TOL, PSD_CLAMP, SIGN_TOL, SUM_TOL
from .errors import EigenSolverError, InvalidInputError
from .utils import DEFAULT_ZERO_TOL, as_matrix, check_orthonormal, check_simplex, check_symmetric, sym_part

logger = logging.getLogger(__name__)

FlagType = Tuple[int, ...]


class FlagRep(NamedTuple):
    mu: np.ndarray
    frame: np.ndarray

    @property
    def n(self: "FlagRep") -> int:
        return self.mu.size

    def to_json(self: "FlagRep") -> Dict[str, Any]:
        return {"mu": self.mu.tolist(), "frame": self.frame.tolist()}

    @staticmethod
    def from_json(data: Dict[str, Any]) -> "FlagRep":
        if "mu" not in data or "frame" not in data:
            raise InvalidInputError("Problem! A flag needs both 'mu' and 'frame'.")
        return make_flag(data["mu"], data["frame"])


def make_flag(mu: Union[List[float], np.ndarray], frame: Optional[Union[List[List[float]], np.ndarray]] = None) -> FlagRep:
    mu = check_simplex(mu, label="mu")
    n = mu.size
    if frame is None:
        frame = np.eye(n)
    frame = check_orthonormal(as_matrix(frame, "frame"), label="frame")
    if frame.shape[0] != n:
        raise InvalidInputError(f"Problem! frame is {frame.shape[0]}x{frame.shape[0]} but mu has {n} entries.")
    return FlagRep(mu, frame)


def check_eigenweights(lam: Union[List[float], np.ndarray], tol: float = SUM_TOL) -> np.ndarray:
    lam = check_simplex(lam, tol=tol, label="lambda")
    if np.any(np.diff(lam) > tol):
        raise InvalidInputError(f"Problem! lambda must be nonincreasing: {lam}.")
    return lam


def check_flag_type(parts: Union[List[int], Tuple[int, ...], np.ndarray], n: Optional[int] = None) -> FlagType:
    parts = tuple(int(p) for p in parts)
    if len(parts) == 0 or min(parts) < 1:
        raise InvalidInputError(f"Problem! Invalid flag type {parts}.")
    if n is not None and sum(parts) != n:
        raise InvalidInputError(f"Problem! Flag type {parts} does not partition {n}.")
    return parts


def check_cov(S: Union[List[List[float]], np.ndarray], tol: float = SUM_TOL) -> np.ndarray:
    S = check_symmetric(as_matrix(S, "S"), label="S")
    if abs(np.trace(S) - 1.0) > tol:
        raise InvalidInputError(f"Problem! trace(S) = {np.trace(S):.17g}, not 1.")
    return S


def lambda_to_mu(lam: Union[List[float], np.ndarray]) -> np.ndarray:
    lam = check_eigenweights(lam)
    n = lam.size
    mu = np.arange(1, n + 1) * (lam - np.append(lam[1:], 0.0))
    return np.clip(mu, 0.0, None)


def mu_to_lambda(mu: Union[List[float], np.ndarray]) -> np.ndarray:
    mu = check_simplex(mu, label="mu")
    n = mu.size
    ratio = mu / np.arange(1, n + 1)
    # lambda_k = sum_{i >= k} mu_i / i
    return np.cumsum(ratio[::-1])[::-1]


def type_of(mu: Union[List[float], np.ndarray], zero_tol: float = DEFAULT_ZERO_TOL) -> FlagType:
    mu = np.asarray(mu, dtype=float)
    if zero_tol < 0:
        raise InvalidInputError("Problem! zero_tol must be nonnegative.")
    n = mu.size
    levels = np.flatnonzero(mu > zero_tol) + 1
    if levels.size == 0:
        raise InvalidInputError(f"Problem! All weights are below {zero_tol}.")
    parts = np.diff(np.concatenate(([0], levels)))
    if levels[-1] < n:
        parts = np.append(parts, n - levels[-1])
    return tuple(int(p) for p in parts)


def eigenweights_of(S: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        values, vectors = scipy.linalg.eigh(sym_part(S))
    except (np.linalg.LinAlgError, ValueError) as err:
        raise EigenSolverError(f"Problem! Eigen-solver failed: {err}") from err
    values = values[::-1]
    vectors = vectors[:, ::-1]
    if values[-1] < -PSD_CLAMP:
        raise InvalidInputError(f"Problem! S has eigenvalue {values[-1]:.3e} < 0.")
    if values[-1] < 0:
        logger.info("clamping eigenvalue %.3e to zero", values[-1])
    values = np.clip(values, 0.0, None)
    values = values / values.sum()
    # eigh sorts, but clipping and renormalization keep the order
    return values, vectors


def decompose(S: Union[List[List[float]], np.ndarray], zero_tol: float = DEFAULT_ZERO_TOL, canonical: bool = False) -> FlagRep:
    """
    Weighted flag of a trace-one positive semidefinite matrix.

    Parameters
    ----------
    S : array
        Symmetric, trace one, eigenvalues above -1e-10.
    zero_tol : float
        Eigenvalue gaps at or below this are clusters; the basis inside a
        cluster is whatever the eigen-solver returns.
    canonical : bool
        Flip frame columns to the canonical sign (reproducible output only).

    Returns
    -------
    FlagRep
    """
    if zero_tol < 0:
        raise InvalidInputError("Problem! zero_tol must be nonnegative.")
    S = check_cov(S)
    lam, frame = eigenweights_of(S)
    n = lam.size
    mu = np.clip(np.arange(1, n + 1) * (lam - np.append(lam[1:], 0.0)), 0.0, None)
    if canonical:
        frame = canonical_signs(frame)
    return FlagRep(mu, frame)


def compose(rep: FlagRep) -> np.ndarray:
    lam = mu_to_lambda(rep.mu)
    U = rep.frame
    if np.linalg.norm(U.T @ U - np.eye(U.shape[1])) > ORTHO_TOL:
        raise InvalidInputError("Problem! frame is not orthogonal.")
    return sym_part((U * lam) @ U.T)


def canonical_signs(U: np.ndarray) -> np.ndarray:
    U = np.array(U, dtype=float)
    for col in range(U.shape[1]):
        nonzero = np.flatnonzero(np.abs(U[:, col]) > SIGN_TOL)
        if nonzero.size and U[nonzero[0], col] < 0:
            U[:, col] = -U[:, col]
    return U


def dimension(mu: Union[List[float], np.ndarray]) -> float:
    mu = np.asarray(mu, dtype=float)
    return float(np.dot(np.arange(1, mu.size + 1), mu))


def sbar(S: Union[List[List[float]], np.ndarray]) -> np.ndarray:
    rep = decompose(S)
    # eigenvalue i of S-bar is sum_{k >= i} mu_k
    levels = np.cumsum(rep.mu[::-1])[::-1]
    return sym_part((rep.frame * levels) @ rep.frame.T)


def embed_grassmannian(basis: Union[List[List[float]], np.ndarray]) -> np.ndarray:
    E = check_orthonormal(basis, label="basis")
    return sym_part(E @ E.T) / E.shape[1]


def grassmannian_flag(basis: Union[List[List[float]], np.ndarray]) -> FlagRep:
    E = check_orthonormal(basis, label="basis")
    n, d = E.shape
    complement = scipy.linalg.null_space(E.T)
    mu = np.zeros(n)
    mu[d - 1] = 1.0
    return FlagRep(mu, np.hstack([E, complement]) if d < n else E)


def sample_cov(rng: np.random.Generator, n: int, sparsity: float = 0.0) -> np.ndarray:
    # sparsity zeroes weights at random, creating repeated eigenvalues
    mu = rng.dirichlet(np.ones(n))
    if sparsity > 0:
        keep = rng.random(n) >= sparsity
        if not keep.any():
            keep[rng.integers(n)] = True
        mu = np.where(keep, mu, 0.0)
        mu = mu / mu.sum()
    U = ortho_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1))
    return compose(FlagRep(mu, U))


def cov_to_json(S: np.ndarray) -> List[List[float]]:
    return np.asarray(S, dtype=float).tolist()


def renormalize_cov(S: Union[List[List[float]], np.ndarray], tol: float = 1e-9) -> np.ndarray:
    # text round trips keep 12 digits, so the trace is only 1 up to rounding
    S = sym_part(as_matrix(S, "S"))
    trace = np.trace(S)
    if abs(trace - 1.0) > tol:
        raise InvalidInputError(f"Problem! trace(S) = {trace:.17g}, not 1.")
    return check_cov(S / trace)


def cov_from_json(data: Any) -> np.ndarray:
    if isinstance(data, dict):
        data = data.get("S", data.get("matrix"))
    return renormalize_cov(data)
