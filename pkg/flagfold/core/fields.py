# -*- coding: utf-8 -*-
"""
Vector fields and maps with analytic Jacobians.

Every field and map works on a single point ``x`` of shape ``(n,)``. Bump
profiles use ``psi(r) = (1 - r^2)^3`` on ``r < 1``, which is C^2 with
compact support.
"""

from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import InvalidInputError
from .utils import as_matrix, as_vector


class VectorFieldWithJacobian(NamedTuple):
    value: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    name: str = "field"


class MapWithJacobian(NamedTuple):
    value: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    name: str = "map"


def _bump(r: float) -> float:
    return (1.0 - r * r) ** 3 if r < 1.0 else 0.0


def _bump_slope_over_r(r: float) -> float:
    # psi'(r) / r, finite at r = 0
    return -6.0 * (1.0 - r * r) ** 2 if r < 1.0 else 0.0


def affine_field(A: Union[Sequence[Sequence[float]], np.ndarray], b: Optional[Union[Sequence[float], np.ndarray]] = None) -> VectorFieldWithJacobian:
    A = as_matrix(A, "A")
    b = np.zeros(A.shape[0]) if b is None else as_vector(b, "b")

    def value(x: np.ndarray) -> np.ndarray:
        return A @ x + b

    def jacobian(x: np.ndarray) -> np.ndarray:
        return A.copy()

    return VectorFieldWithJacobian(value, jacobian, "affine")


def constant_field(b: Union[Sequence[float], np.ndarray]) -> VectorFieldWithJacobian:
    b = as_vector(b, "b")
    return affine_field(np.zeros((b.size, b.size)), b)


def radial_field(center: Union[Sequence[float], np.ndarray], radius: float) -> VectorFieldWithJacobian:
    """``X(y) = psi(|y - c| / radius) (y - c)``, the test field of the monotonicity formula."""
    center = as_vector(center, "center")
    if radius <= 0:
        raise InvalidInputError(f"Problem! radius must be positive, got {radius}.")

    def value(x: np.ndarray) -> np.ndarray:
        z = x - center
        return _bump(np.linalg.norm(z) / radius) * z

    def jacobian(x: np.ndarray) -> np.ndarray:
        z = x - center
        r = np.linalg.norm(z) / radius
        return _bump(r) * np.eye(center.size) + _bump_slope_over_r(r) / radius**2 * np.outer(z, z)

    return VectorFieldWithJacobian(value, jacobian, "radial")


def bump_field(component: int, center: Union[Sequence[float], np.ndarray], radius: float, amplitude: float = 1.0) -> VectorFieldWithJacobian:
    """``X(y) = amplitude * psi(|y - c| / radius) e_component`` (0-based component)."""
    center = as_vector(center, "center")
    if radius <= 0:
        raise InvalidInputError(f"Problem! radius must be positive, got {radius}.")
    if not 0 <= component < center.size:
        raise InvalidInputError(f"Problem! component {component} out of range for n={center.size}.")
    direction = np.zeros(center.size)
    direction[component] = 1.0

    def value(x: np.ndarray) -> np.ndarray:
        return amplitude * _bump(np.linalg.norm(x - center) / radius) * direction

    def jacobian(x: np.ndarray) -> np.ndarray:
        z = x - center
        r = np.linalg.norm(z) / radius
        gradient = _bump_slope_over_r(r) / radius**2 * z
        return amplitude * np.outer(direction, gradient)

    return VectorFieldWithJacobian(value, jacobian, "bump")


def identity_map(n: int) -> MapWithJacobian:
    return linear_map(np.eye(n))


def linear_map(A: Union[Sequence[Sequence[float]], np.ndarray], b: Optional[Union[Sequence[float], np.ndarray]] = None) -> MapWithJacobian:
    A = as_matrix(A, "A")
    b = np.zeros(A.shape[0]) if b is None else as_vector(b, "b")

    def value(x: np.ndarray) -> np.ndarray:
        return A @ x + b

    def jacobian(x: np.ndarray) -> np.ndarray:
        return A.copy()

    return MapWithJacobian(value, jacobian, "linear")


def scaling_map(n: int, c: float) -> MapWithJacobian:
    return linear_map(c * np.eye(n))


def flow_map(X: VectorFieldWithJacobian, t: float) -> MapWithJacobian:
    """First-order flow ``x + t X(x)`` used to differentiate mass."""

    def value(x: np.ndarray) -> np.ndarray:
        return x + t * X.value(x)

    def jacobian(x: np.ndarray) -> np.ndarray:
        J = t * X.jacobian(x)
        return np.eye(J.shape[0]) + J

    return MapWithJacobian(value, jacobian, "flow")


def finite_difference_jacobian(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    columns = []
    for k in range(x.size):
        shift = np.zeros_like(x)
        shift[k] = step
        columns.append((func(x + shift) - func(x - shift)) / (2.0 * step))
    return np.array(columns).T


def field_by_name(name: str, n: int, **params) -> VectorFieldWithJacobian:
    center = params.get("center")
    center = np.zeros(n) if center is None else as_vector(center, "center")
    if center.size != n:
        raise InvalidInputError(f"Problem! center must have {n} entries.")
    if name == "affine":
        A = params.get("matrix")
        if A is None:
            raise InvalidInputError("Problem! The affine field needs a matrix.")
        A = as_matrix(A, "matrix")
        if A.shape != (n, n):
            raise InvalidInputError(f"Problem! matrix must be {n}x{n}.")
        return affine_field(A, params.get("offset"))
    if name == "radial":
        return radial_field(center, float(params.get("radius", 1.0)))
    if name == "bump":
        return bump_field(int(params.get("component", 1)) - 1, center, float(params.get("radius", 1.0)), float(params.get("amplitude", 1.0)))
    raise InvalidInputError(f"Problem! Invalid field {name}. Choose from affine, radial, bump.")
