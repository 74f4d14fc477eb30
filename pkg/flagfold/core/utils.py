# -*- coding: utf-8 -*-
"""
Configuration, validation helpers and table I/O shared across flagfold.
"""

# Built-in imports
import os
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

# Third party imports
import numpy as np
import pandas as pd
from dotenv import load_dotenv
from tqdm import tqdm

from .constants import FLOAT_FORMAT, MU_MIN, ORTHO_TOL, SINGULAR_TOL, SKEW_TOL, SUM_TOL, SYM_TOL, ZERO_TOL
from .errors import InvalidInputError

T = TypeVar("T")
R = TypeVar("R")

# load env file to os.environ and can be access from os.getenv()
load_dotenv()

DEFAULT_ZERO_TOL = float(os.getenv("FLAGFOLD_ZERO_TOL", str(ZERO_TOL)))
DEFAULT_MU_MIN = float(os.getenv("FLAGFOLD_MU_MIN", str(MU_MIN)))
DEFAULT_SINGULAR_TOL = float(os.getenv("FLAGFOLD_SINGULAR_TOL", str(SINGULAR_TOL)))
PARALLEL_JOBS = int(os.getenv("FLAGFOLD_PARALLEL_JOBS", "4"))
# number of sample points handled by one PCA work item
CHUNK_SIZE = int(os.getenv("FLAGFOLD_CHUNK_SIZE", "4096"))
SHOW_PROGRESS = os.getenv("FLAGFOLD_PROGRESS", "0").strip().lower() in ("1", "true", "yes")
OUTPUT_DIR = Path(os.getenv("FLAGFOLD_OUTPUT_DIR", "flagfold-output"))


def as_vector(value: Union[Sequence[float], np.ndarray], label: str = "vector") -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"Problem! {label} must be a non-empty 1-d array, got shape {arr.shape}.")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"Problem! {label} has non-finite entries.")
    return arr


def as_matrix(value: Union[Sequence[Sequence[float]], np.ndarray], label: str = "matrix", square: bool = True) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 2 or (square and arr.shape[0] != arr.shape[1]):
        raise InvalidInputError(f"Problem! {label} must be a {'square ' if square else ''}matrix, got shape {arr.shape}.")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"Problem! {label} has non-finite entries.")
    return arr


def check_simplex(mu: np.ndarray, tol: float = SUM_TOL, label: str = "weights") -> np.ndarray:
    mu = as_vector(mu, label)
    if np.any(mu < -tol):
        raise InvalidInputError(f"Problem! {label} has negative entries: {mu}.")
    if abs(mu.sum() - 1.0) > tol:
        raise InvalidInputError(f"Problem! {label} sum to {mu.sum():.17g}, not 1.")
    return mu


def check_skew(B: np.ndarray, tol: float = SKEW_TOL, label: str = "B") -> np.ndarray:
    B = as_matrix(B, label)
    if np.max(np.abs(B + B.T), initial=0.0) > tol:
        raise InvalidInputError(f"Problem! {label} is not skew-symmetric.")
    return B


def check_symmetric(S: np.ndarray, tol: float = SYM_TOL, label: str = "S") -> np.ndarray:
    S = as_matrix(S, label)
    if np.max(np.abs(S - S.T), initial=0.0) > tol:
        raise InvalidInputError(f"Problem! {label} is not symmetric.")
    return S


def check_orthonormal(E: np.ndarray, tol: float = ORTHO_TOL, label: str = "frame") -> np.ndarray:
    E = np.array(E, dtype=float)
    if E.ndim == 1:
        E = E[:, None]
    E = as_matrix(E, label, square=False)
    if E.shape[1] > E.shape[0]:
        raise InvalidInputError(f"Problem! {label} has more columns than rows.")
    if np.linalg.norm(E.T @ E - np.eye(E.shape[1])) > tol:
        raise InvalidInputError(f"Problem! {label} columns are not orthonormal.")
    return E


def skew_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A - A.T)


def sym_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def upper_pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def parallel_map(job: Callable[[T], R], items: Iterable[T], desc: Optional[str] = None, total: Optional[int] = None) -> List[R]:
    # results come back in submission order
    with ThreadPoolExecutor(max_workers=PARALLEL_JOBS, thread_name_prefix="flagfold_worker") as pool:
        results = pool.map(job, items)
        return list(progress(results, desc=desc, total=total))


def progress(iterable: Iterable[T], desc: Optional[str] = None, total: Optional[int] = None, enabled: Optional[bool] = None) -> Iterable[T]:
    if enabled is None:
        enabled = SHOW_PROGRESS
    if not enabled:
        return iterable
    return tqdm(iterable, desc=desc, total=total, ascii=True, leave=False)


def format_number(value: float) -> str:
    return FLOAT_FORMAT % value


def write_table(columns: List[str], rows: Union[np.ndarray, List[List[float]]], path: Optional[Union[str, Path]] = None) -> str:
    frame = pd.DataFrame(np.asarray(rows, dtype=float).reshape(-1, len(columns)), columns=columns)
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text)
    return text


def read_point_table(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    frame = pd.read_csv(path)
    coords = [col for col in frame.columns if str(col).startswith("x_")]
    if len(coords) == 0:
        raise InvalidInputError(f"Problem! {path} has no x_1..x_n columns.")
    coords = sorted(coords, key=lambda col: int(str(col)[2:]))
    points = frame[coords].to_numpy(dtype=float)
    if "mass" in frame.columns:
        masses = frame["mass"].to_numpy(dtype=float)
    else:
        masses = np.ones(points.shape[0])
    if np.any(masses < 0):
        raise InvalidInputError("Problem! Negative masses in point table.")
    return points, masses


def to_jsonable(value: Any) -> Any:
    # floats keep 12 significant digits
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(FLOAT_FORMAT % value)
    if isinstance(value, np.integer):
        return value.item()
    if isinstance(value, dict):
        return {key: to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    return value


def dump_json(value: Any, path: Optional[Union[str, Path]] = None) -> str:
    text = json.dumps(to_jsonable(value), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_json(source: Union[str, Path]) -> Any:
    # accepts a path or an inline JSON document
    text = str(source)
    if text.lstrip().startswith(("[", "{")):
        return json.loads(text)
    return json.loads(Path(source).read_text())
