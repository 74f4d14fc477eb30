# -*- coding: utf-8 -*-
"""
Command line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 unknown
subcommand. Tables go to ``--out`` or stdout; notes and errors go to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from colorama import Fore, Style, just_fix_windows_console

from .data_dir import prepare_output_file
from .distances import conic_distance, euclidean_distance, grassmann_distance, krakus_distance
from .errors import EmptyNeighborhoodError, InvalidInputError, NumericalError
from .fields import field_by_name
from .flagcore import cov_from_json, decompose, dimension, mu_to_lambda, type_of
from .geodesic import Termination, ellipsoid_frames, euclidean_geodesic, initial_state, run_summary, save_trajectory, shoot, trajectory_table
from .measures import (
    PointCloudFlagfold,
    density_ratio,
    first_variation,
    flagfold_to_all_varifolds,
    monotonicity_excess,
    monotonicity_ratio,
    pca_flagfold,
    sample_cylinder,
    sample_line,
    sample_sphere,
    varifold_first_variation,
)
from .riemann import PINCH_NAMES, pinch_by_name
from .utils import DEFAULT_MU_MIN, DEFAULT_SINGULAR_TOL, DEFAULT_ZERO_TOL, dump_json, load_json, read_point_table, write_table

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

COMMANDS = ("geodesic", "decompose", "distance", "pca", "firstvar", "monotonicity", "euclid-geodesic")
DEFAULT_FORMAT = {
    "geodesic": "csv",
    "decompose": "json",
    "distance": "json",
    "pca": "json",
    "firstvar": "json",
    "monotonicity": "csv",
    "euclid-geodesic": "csv",
}

logger = logging.getLogger(__name__)


def note(message: str) -> None:
    print(f"{Fore.GREEN}{message}{Style.RESET_ALL}", file=sys.stderr)


def warn(message: str) -> None:
    print(f"{Fore.YELLOW}{message}{Style.RESET_ALL}", file=sys.stderr)


def error(message: str) -> None:
    print(f"{Fore.RED}{message}{Style.RESET_ALL}", file=sys.stderr)


class RunConfig:
    """Parameters from an optional JSON file, overridden by explicit flags."""

    def __init__(self: "RunConfig", args: argparse.Namespace) -> None:
        self._file: Dict[str, Any] = {}
        if getattr(args, "config", None) is not None:
            loaded = load_json(args.config)
            if not isinstance(loaded, dict):
                raise InvalidInputError("Problem! The config file must hold a JSON object.")
            self._file = loaded
        self._args = args

    def get(self: "RunConfig", key: str, default: Any = None, parse: Optional[Callable[[Any], Any]] = None) -> Any:
        value = getattr(self._args, key, None)
        if value is not None:
            return parse(value) if parse is not None else value
        return self._file.get(key, default)

    def require(self: "RunConfig", key: str, parse: Optional[Callable[[Any], Any]] = None) -> Any:
        value = self.get(key, None, parse)
        if value is None:
            raise InvalidInputError(f"Problem! Missing parameter '{key}'.")
        return value


def _inline(value: str) -> Any:
    return load_json(value)


def _positive(value: Any, label: str) -> float:
    value = float(value)
    if not value > 0:
        raise InvalidInputError(f"Problem! {label} must be positive, got {value}.")
    return value


def _emit(text: str, args: argparse.Namespace, default_name: str) -> None:
    if args.out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = prepare_output_file(args.out, default_name)
    path.write_text(text if text.endswith("\n") else text + "\n")
    note(f"wrote {path}")


def _fmt(args: argparse.Namespace) -> str:
    return args.format if args.format is not None else DEFAULT_FORMAT[args.command]


def cmd_geodesic(args: argparse.Namespace, config: RunConfig) -> int:
    f = pinch_by_name(config.get("pinch", "quarter-norm"))
    mu0 = config.require("mu0", _inline)
    mu_dot0 = config.require("mu_dot0", _inline)
    n = config.get("n", len(mu0))
    if int(n) != len(mu0):
        raise InvalidInputError(f"Problem! n={n} but mu0 has {len(mu0)} entries.")
    init = initial_state(mu0, mu_dot0, config.get("U0", None, _inline), config.get("B0", None, _inline), f)
    h = _positive(config.require("h"), "h")
    N = int(config.require("N"))
    mu_min = float(config.get("mu_min", DEFAULT_MU_MIN))
    singular_tol = float(config.get("singular_tol", DEFAULT_SINGULAR_TOL))
    traj = shoot(init, h, N, f, mu_min=mu_min, singular_tol=singular_tol)
    if not traj.states:
        raise NumericalError("Problem! The initial state is already singular.")

    summary = run_summary(traj)
    fmt = _fmt(args)
    if fmt == "h5":
        path = save_trajectory(traj, prepare_output_file(args.out, "geodesic.h5"), f, mu_min)
        note(f"wrote {path}")
    else:
        columns, rows = trajectory_table(traj)
        if fmt == "csv":
            _emit(write_table(columns, rows), args, "geodesic.csv")
            if args.out is not None:
                # the table has no room for the termination reason
                sidecar = Path(args.out).with_suffix(".summary.json")
                dump_json(summary, sidecar)
                note(f"wrote {sidecar}")
        else:
            _emit(dump_json({"metadata": summary, "columns": columns, "rows": rows}), args, "geodesic.json")
    ellipsoids = config.get("ellipsoids")
    if ellipsoids is not None:
        data = [{"axes": axes.T, "lengths": lengths} for axes, lengths in ellipsoid_frames(traj)]
        dump_json(data, prepare_output_file(ellipsoids, "ellipsoids.json"))

    if traj.termination == Termination.STEP_FAILURE:
        error(f"termination: {traj.termination.value} at t={summary['t_final']:.6g}")
        return EXIT_NUMERICAL
    note(f"termination: {traj.termination.value} at t={summary['t_final']:.6g}")
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace, config: RunConfig) -> int:
    S = cov_from_json(config.require("matrix", _inline))
    zero_tol = float(config.get("zero_tol", DEFAULT_ZERO_TOL))
    rep = decompose(S, zero_tol, canonical=True)
    lam = mu_to_lambda(rep.mu / rep.mu.sum())
    if _fmt(args) == "csv":
        rows = np.column_stack([np.arange(1, rep.mu.size + 1), rep.mu, lam])
        _emit(write_table(["k", "mu", "lambda"], rows), args, "decompose.csv")
    else:
        payload = {"mu": rep.mu, "lambda": lam, "frame": rep.frame, "type": list(type_of(rep.mu, zero_tol)), "dimension": dimension(rep.mu)}
        _emit(dump_json(payload), args, "decompose.json")
    return EXIT_OK


def cmd_distance(args: argparse.Namespace, config: RunConfig) -> int:
    kind = config.get("kind", "euclidean")
    A = cov_from_json(config.require("a", _inline))
    B = cov_from_json(config.require("b", _inline))
    if A.shape != B.shape:
        raise InvalidInputError("Problem! Matrices have different sizes.")
    if kind == "euclidean":
        value = euclidean_distance(A, B)
    elif kind == "grassmann":
        d = int(config.require("dim"))
        if not 1 <= d <= A.shape[0]:
            raise InvalidInputError(f"Problem! dim must lie in [1, {A.shape[0]}].")
        value = grassmann_distance(decompose(A).frame[:, :d], decompose(B).frame[:, :d], normalized=bool(config.get("normalized", False)))
    elif kind == "krakus":
        value = krakus_distance(decompose(A), decompose(B))
    elif kind == "conic":
        value = conic_distance(decompose(A), decompose(B))
    else:
        raise InvalidInputError(f"Problem! Invalid distance kind {kind}.")
    if _fmt(args) == "csv":
        _emit(f"kind,distance\n{kind},{value:.12g}\n", args, "distance.csv")
    else:
        _emit(dump_json({"kind": kind, "distance": value}), args, "distance.json")
    return EXIT_OK


def _demo_points(config: RunConfig) -> np.ndarray:
    demo = config.get("demo")
    seed = config.get("seed")
    if seed is None:
        raise InvalidInputError("Problem! Sampling demos need --seed.")
    rng = np.random.default_rng(int(seed))
    samples = int(config.get("samples", 10000))
    if demo == "cylinder":
        return sample_cylinder(rng, samples, float(config.get("radius", 0.05)), float(config.get("height", 1.0)))
    if demo == "sphere":
        return sample_sphere(rng, samples, 3, float(config.get("radius", 1.0)))
    if demo == "line":
        return sample_line(rng, samples, np.array([1.0, 0.0, 0.0]), float(config.get("height", 1.0)))
    raise InvalidInputError(f"Problem! Invalid demo {demo}. Choose from cylinder, sphere, line.")


def cmd_pca(args: argparse.Namespace, config: RunConfig) -> int:
    eta = _positive(config.require("eta"), "eta")
    if config.get("demo") is not None:
        points = _demo_points(config)
        masses = np.ones(points.shape[0])
    else:
        points, masses = read_point_table(config.require("points"))
    W = pca_flagfold(points, masses, eta, config.get("kernel", "indicator"))
    if _fmt(args) == "csv":
        n = W.n
        mus = np.array([decompose(S).mu for S in W.covariances])
        dims = mus @ np.arange(1, n + 1)
        rows = np.column_stack([W.positions, W.masses, dims, mus])
        columns = [f"x_{k}" for k in range(1, n + 1)] + ["mass", "dimension"] + [f"mu_{k}" for k in range(1, n + 1)]
        _emit(write_table(columns, rows), args, "flagfold.csv")
    else:
        _emit(dump_json(W.to_json()), args, "flagfold.json")
    return EXIT_OK


def _load_flagfold(config: RunConfig) -> PointCloudFlagfold:
    return PointCloudFlagfold.from_json(load_json(config.require("flagfold")))


def cmd_firstvar(args: argparse.Namespace, config: RunConfig) -> int:
    W = _load_flagfold(config)
    name = config.get("field", "radial")
    X = field_by_name(
        name,
        W.n,
        center=config.get("center", None, _inline),
        radius=config.get("radius", 1.0),
        component=config.get("component", 1),
        amplitude=config.get("amplitude", 1.0),
        matrix=config.get("matrix", None, _inline),
        offset=config.get("offset", None, _inline),
    )
    value = first_variation(W, X)
    split = {str(d): varifold_first_variation(V, X) for d, V in flagfold_to_all_varifolds(W).items()}
    if _fmt(args) == "csv":
        _emit(f"field,first_variation\n{name},{value:.12g}\n", args, "firstvar.csv")
    else:
        _emit(dump_json({"field": name, "first_variation": value, "by_dimension": split}), args, "firstvar.json")
    return EXIT_OK


def cmd_monotonicity(args: argparse.Namespace, config: RunConfig) -> int:
    W = _load_flagfold(config)
    x = np.array(config.require("x", _inline), dtype=float)
    if x.shape != (W.n,):
        raise InvalidInputError(f"Problem! x must have {W.n} entries.")
    d_star = float(config.require("d_star"))
    Lambda = float(config.get("Lambda", 0.0))
    radii = np.array(config.require("radii", _inline), dtype=float)
    ratios = monotonicity_ratio(W, x, d_star, Lambda, radii)
    if _fmt(args) == "csv":
        _emit(write_table(["radius", "ratio"], np.column_stack([radii, ratios])), args, "monotonicity.csv")
    else:
        excess = monotonicity_excess(W, x, d_star, radii)
        density = density_ratio(W, x, d_star, Lambda, radii)
        _emit(dump_json({"radius": radii, "ratio": ratios, "density": density, "excess": excess}), args, "monotonicity.json")
    return EXIT_OK


def cmd_euclid_geodesic(args: argparse.Namespace, config: RunConfig) -> int:
    A0 = cov_from_json(config.require("a", _inline))
    A1 = cov_from_json(config.require("b", _inline))
    N = int(config.get("N", 100))
    reps = euclidean_geodesic(A0, A1, N)
    columns, rows = trajectory_table(reps, times=np.arange(N + 1) / N)
    if _fmt(args) == "csv":
        _emit(write_table(columns, rows), args, "euclid-geodesic.csv")
    else:
        _emit(dump_json({"columns": columns, "rows": rows}), args, "euclid-geodesic.json")
    return EXIT_OK


HANDLERS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "geodesic": cmd_geodesic,
    "decompose": cmd_decompose,
    "distance": cmd_distance,
    "pca": cmd_pca,
    "firstvar": cmd_firstvar,
    "monotonicity": cmd_monotonicity,
    "euclid-geodesic": cmd_euclid_geodesic,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for sampling demos")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "h5"), default=None)
    common.add_argument("--config", default=None, help="JSON file of parameters; flags override it")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="flagfold", description="Weighted flags, pinched geodesics and flagfolds.")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")

    geo = sub.add_parser("geodesic", parents=[common], help="shoot a geodesic")
    geo.add_argument("--mu0", default=None, help="initial weights, JSON list")
    geo.add_argument("--mu-dot0", dest="mu_dot0", default=None, help="initial weight velocity, JSON list")
    geo.add_argument("--U0", default=None, help="initial frame, JSON matrix")
    geo.add_argument("--B0", default=None, help="initial frame velocity: matrix, upper-triangle list or {\"i,j\": b}")
    geo.add_argument("--h", type=float, default=None)
    geo.add_argument("--steps", dest="N", type=int, default=None)
    geo.add_argument("--mu-min", dest="mu_min", type=float, default=None)
    geo.add_argument("--singular-tol", dest="singular_tol", type=float, default=None)
    geo.add_argument("--pinch", choices=PINCH_NAMES, default=None)
    geo.add_argument("--ellipsoids", default=None, help="also write ellipsoid axes and lengths (JSON)")

    dec = sub.add_parser("decompose", parents=[common], help="eigen-decompose a trace-one PSD matrix")
    dec.add_argument("--matrix", default=None, help="JSON matrix or path")
    dec.add_argument("--zero-tol", dest="zero_tol", type=float, default=None)

    dist = sub.add_parser("distance", parents=[common], help="distance between two weighted flags")
    dist.add_argument("--kind", choices=("euclidean", "grassmann", "krakus", "conic"), default=None)
    dist.add_argument("--a", default=None, help="JSON matrix or path")
    dist.add_argument("--b", default=None, help="JSON matrix or path")
    dist.add_argument("--dim", type=int, default=None, help="subspace dimension for grassmann")
    dist.add_argument("--normalized", action="store_true", default=None)

    pca = sub.add_parser("pca", parents=[common], help="local covariance flagfold of a point cloud")
    pca.add_argument("--points", default=None, help="CSV with x_1..x_n[,mass]")
    pca.add_argument("--demo", choices=("cylinder", "sphere", "line"), default=None)
    pca.add_argument("--samples", type=int, default=None)
    pca.add_argument("--radius", type=float, default=None)
    pca.add_argument("--height", type=float, default=None)
    pca.add_argument("--eta", type=float, default=None)
    pca.add_argument("--kernel", choices=("indicator", "smooth"), default=None)

    fv = sub.add_parser("firstvar", parents=[common], help="first variation of a flagfold")
    fv.add_argument("--flagfold", default=None, help="flagfold JSON path")
    fv.add_argument("--field", choices=("affine", "radial", "bump"), default=None)
    fv.add_argument("--center", default=None, help="JSON list")
    fv.add_argument("--radius", type=float, default=None)
    fv.add_argument("--component", type=int, default=None, help="1-based component of the bump field")
    fv.add_argument("--amplitude", type=float, default=None)
    fv.add_argument("--matrix", default=None, help="JSON matrix of the affine field")
    fv.add_argument("--offset", default=None, help="JSON list, affine offset")

    mono = sub.add_parser("monotonicity", parents=[common], help="monotonicity ratio around a point")
    mono.add_argument("--flagfold", default=None, help="flagfold JSON path")
    mono.add_argument("--x", default=None, help="JSON list")
    mono.add_argument("--d-star", dest="d_star", type=float, default=None)
    mono.add_argument("--Lambda", type=float, default=None)
    mono.add_argument("--radii", default=None, help="JSON list, increasing")

    euc = sub.add_parser("euclid-geodesic", parents=[common], help="straight segment between two matrices")
    euc.add_argument("--a", default=None, help="JSON matrix or path")
    euc.add_argument("--b", default=None, help="JSON matrix or path")
    euc.add_argument("--steps", dest="N", type=int, default=None)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    just_fix_windows_console()
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if argv and argv[0] in ("-h", "--help"):
        parser.print_help()
        return EXIT_OK
    if not argv or argv[0] not in COMMANDS:
        parser.print_usage(sys.stderr)
        error(f"unknown subcommand: {argv[0] if argv else '(none)'}")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_INVALID

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.format == "h5" and args.command != "geodesic":
        error("--format h5 is only available for geodesic")
        return EXIT_INVALID
    try:
        config = RunConfig(args)
        return HANDLERS[args.command](args, config)
    except (InvalidInputError, EmptyNeighborhoodError) as err:
        error(str(err))
        return EXIT_INVALID
    except NumericalError as err:
        error(str(err))
        return EXIT_NUMERICAL
    except (ValueError, TypeError, KeyError, OSError) as err:
        error(f"Problem! {err}")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
