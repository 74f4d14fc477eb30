# -*- coding: utf-8 -*-
"""
Geodesic shooting, its invariants and the trajectory diagnostics.

The runs below use the initial data of the reference rotation, symmetric,
boundary and straight-line geodesics kept under misc/.
"""

import pytest

ROTATION = dict(mu0=[0.98, 0.01, 0.01], mu_dot0=[-1.0, 1.0, 0.0], B0={"1,2": 0.05, "2,3": 0.0, "1,3": 0.5})
SYMMETRIC = dict(mu0=[1 / 3, 1 / 3, 1 / 3], mu_dot0=[1.0, -0.5, -0.5], B0={"1,2": 5.0, "2,3": 0.0, "1,3": 0.0})
BOUNDARY = dict(mu0=[0.499, 0.499, 0.002], mu_dot0=[0.15, -0.5, 0.35], B0={"1,2": 0.5, "2,3": 0.0, "1,3": 0.1})
STRAIGHT = dict(mu0=[0.98, 0.01, 0.01], mu_dot0=[-1.0, 0.0, 1.0], B0=None)


def _run(data, h=0.001, N=2000, **kwargs):
    from flagfold.core.geodesic import initial_state, shoot

    return shoot(initial_state(data["mu0"], data["mu_dot0"], B0=data["B0"]), h, N, **kwargs)


def test_expm_skew():
    import numpy as np
    import scipy.linalg
    from flagfold.core.geodesic import expm_skew

    for n in (2, 3, 4, 6):
        assert np.array_equal(expm_skew(np.zeros((n, n))), np.eye(n))

    phi = 0.8
    A = phi * np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(expm_skew(A), [[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]], atol=1e-15)

    rng = np.random.default_rng(6)
    for n in (2, 3, 4, 5):
        for _ in range(50):
            A = rng.standard_normal((n, n))
            A = A - A.T
            A = A / max(np.linalg.norm(A, 2), 1.0)
            E = expm_skew(A)
            assert np.linalg.norm(E @ expm_skew(-A) - np.eye(n)) <= 1e-13
            assert np.linalg.norm(E.T @ E - np.eye(n)) <= 1e-13
            assert np.linalg.norm(E - scipy.linalg.expm(A)) <= 1e-12


def test_expm_skew_small_angles():
    import numpy as np
    import scipy.linalg
    from flagfold.core.geodesic import expm_skew

    A = np.array([[0.0, -3e-7, 1e-7], [3e-7, 0.0, -2e-7], [-1e-7, 2e-7, 0.0]])
    assert np.allclose(expm_skew(A), scipy.linalg.expm(A), atol=1e-15)


def test_mu_acceleration():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.geodesic import mu_acceleration

    assert np.array_equal(mu_acceleration(np.array([0.2, 0.3, 0.5]), np.zeros((3, 3))), np.zeros(3))

    rng = np.random.default_rng(12)
    for n in (2, 3, 5):
        for _ in range(100):
            mu = rng.dirichlet(np.ones(n))
            A = rng.standard_normal((n, n))
            acc = mu_acceleration(mu, A - A.T)
            assert abs(acc.sum()) <= 1e-12
            # the last weight is in no slice, so it only feels the mean
            assert acc[-1] >= 0

    with pytest.raises(InvalidInputError):
        mu_acceleration(np.array([1.0, 0.0]), np.zeros((2, 2)))


def test_mu_acceleration_single_pair():
    import numpy as np
    from flagfold.core.geodesic import mu_acceleration

    mu = np.array([0.4, 0.35, 0.25])
    B = np.zeros((3, 3))
    B[0, 1], B[1, 0] = 2.0, -2.0
    # pair (0, 1) only sees mu_0: T = 2 (f f')(mu_0) b^2 = 2 * mu_0 / 16 * 4
    T0 = 2.0 * 0.4 / 16.0 * 4.0
    assert np.allclose(mu_acceleration(mu, B), [T0 / 3 - T0, T0 / 3, T0 / 3])


def test_recover_B():
    import numpy as np
    from flagfold.core.errors import SingularPinchError
    from flagfold.core.geodesic import momentum_from_velocity, recover_B
    from scipy.stats import ortho_group

    rng = np.random.default_rng(14)
    mu = rng.dirichlet(np.ones(4))
    A = rng.standard_normal((4, 4))
    B = A - A.T
    C0 = momentum_from_velocity(mu, B)
    U0 = ortho_group.rvs(4, random_state=rng)
    assert np.allclose(recover_B(mu, U0, U0, C0), B, atol=1e-10)
    assert np.array_equal(recover_B(mu, U0, U0, np.zeros((4, 4))), np.zeros((4, 4)))

    with pytest.raises(SingularPinchError):
        recover_B(np.array([1e-9, 0.5, 0.5 - 1e-9]), np.eye(3), np.eye(3), C0[:3, :3])


def test_initial_state_B0_formats():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.geodesic import initial_state

    from_dict = initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0=ROTATION["B0"])
    from_list = initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0=[0.05, 0.5, 0.0])
    matrix = np.array([[0.0, 0.05, 0.5], [-0.05, 0.0, 0.0], [-0.5, 0.0, 0.0]])
    from_matrix = initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0=matrix)
    assert np.array_equal(from_dict.B, matrix)
    assert np.array_equal(from_list.B, matrix)
    assert np.array_equal(from_matrix.C0, from_dict.C0)

    with pytest.raises(InvalidInputError):
        initial_state([0.5, 0.5, 0.1], [0.0, 0.0, 0.0])
    with pytest.raises(InvalidInputError):
        initial_state([0.5, 0.5, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(InvalidInputError):
        initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0={"3,1": 1.0})
    with pytest.raises(InvalidInputError):
        initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0=[1.0, 2.0])


def test_shoot_rejects_bad_arguments():
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.geodesic import initial_state, shoot

    init = initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0=ROTATION["B0"])
    with pytest.raises(InvalidInputError):
        shoot(init, 0.0, 10)
    with pytest.raises(InvalidInputError):
        shoot(init, 0.001, -1)
    with pytest.raises(InvalidInputError):
        shoot(init, 0.001, 10, mu_min=0.05)


def test_straight_line_run():
    import numpy as np
    from flagfold.core.geodesic import Termination

    traj = _run(STRAIGHT)
    assert traj.termination == Termination.BOUNDARY_HIT
    mu0, mu_dot0 = np.array(STRAIGHT["mu0"]), np.array(STRAIGHT["mu_dot0"])
    for state in traj.states:
        assert np.array_equal(state.U, np.eye(3))
        assert np.allclose(state.mu, mu0 + state.t * mu_dot0, atol=1e-12)
        assert np.array_equal(state.mu_dot, mu_dot0)

    index = int(np.argmin(np.abs(traj.times - 0.979)))
    assert abs(traj.times[index] - 0.979) <= 0.001
    assert np.max(np.abs(traj.states[index].mu - [0.001, 0.01, 0.989])) <= 1e-3


def _column_sign_gap(U, reference):
    import numpy as np

    U, reference = np.asarray(U), np.asarray(reference)
    return max(min(np.max(np.abs(U[:, k] - reference[:, k])), np.max(np.abs(U[:, k] + reference[:, k]))) for k in range(U.shape[1]))


def test_rotation_run_passes_target():
    from flagfold.core.geodesic import Termination, closest_approach

    traj = _run(ROTATION)
    index, gap = closest_approach(traj, [0.028, 0.95, 0.023])
    assert gap <= 5e-3
    assert 0 < index < len(traj.states) - 1
    U = [[0.039, 0.738, 0.674], [-0.997, 0.072, -0.021], [-0.064, -0.671, 0.739]]
    assert _column_sign_gap(traj.states[index].U, U) <= 5e-3
    # the first weight drains right after the target
    assert traj.termination == Termination.BOUNDARY_HIT
    assert traj.times[-1] < 1.0


def test_boundary_run_passes_target():
    from flagfold.core.geodesic import closest_approach

    traj = _run(BOUNDARY)
    index, gap = closest_approach(traj, [0.643, 0.008, 0.349])
    assert gap <= 5e-3
    U = [[0.921, 0.118, 0.371], [-0.372, 0.549, 0.749], [-0.115, -0.827, 0.55]]
    assert _column_sign_gap(traj.states[index].U, U) <= 5e-3


def test_symmetric_run_reaches_line():
    import numpy as np
    from flagfold.core.geodesic import Termination

    traj = _run(SYMMETRIC)
    assert traj.termination == Termination.BOUNDARY_HIT
    for state in traj.states:
        assert state.mu[1] == state.mu[2]
        assert np.array_equal(state.U[:, 2], [0.0, 0.0, 1.0])
        assert np.array_equal(state.U[2, :], [0.0, 0.0, 1.0])
    assert traj.final.mu[0] >= 0.99


def test_invariants_along_runs():
    import numpy as np
    from flagfold.core.geodesic import check_state, conserved_momentum

    for data in (ROTATION, SYMMETRIC, BOUNDARY, STRAIGHT):
        traj = _run(data, N=10000)
        K0 = conserved_momentum(traj.states[0])
        for state in traj.states:
            check_state(state)
            assert abs(state.mu.sum() - 1.0) <= 1e-9
            assert abs(state.mu_dot.sum()) <= 1e-10
            assert np.linalg.norm(state.U.T @ state.U - np.eye(3)) <= 1e-8
            assert np.linalg.norm(conserved_momentum(state) - K0) <= 1e-11
        # the last weight is convex for a norm pinch
        assert np.all(np.diff(traj.mus[:, 2], 2) >= -1e-12)


def test_conserved_momentum_at_start():
    import numpy as np
    from flagfold.core.geodesic import conserved_momentum, initial_state

    init = initial_state(ROTATION["mu0"], ROTATION["mu_dot0"], B0=ROTATION["B0"])
    assert np.allclose(conserved_momentum(init), init.U @ init.C0 @ init.U.T)

    traj = _run(STRAIGHT)
    for state in traj.states:
        assert np.array_equal(conserved_momentum(state), np.zeros((3, 3)))


def test_step_halving():
    import numpy as np

    T = 0.5
    finals = []
    for h in (0.004, 0.002, 0.001, 0.0005, 0.00025):
        traj = _run(ROTATION, h=h, N=int(round(T / h)))
        state = traj.final
        assert np.isclose(state.t, T)
        finals.append(np.concatenate([state.mu, state.U.reshape(-1)]))
    errors = [np.linalg.norm(finals[p] - finals[p + 1]) for p in range(4)]
    for p in range(3):
        assert 1.5 <= errors[p] / errors[p + 1] <= 2.5


def test_single_pair_closed_form():
    import numpy as np
    import scipy.integrate
    import scipy.linalg
    from flagfold.core.geodesic import initial_state, shoot
    from flagfold.core.riemann import default_pinch, mu_slice

    f = default_pinch()
    h = 0.001
    init = initial_state([0.5, 0.3, 0.2], [-0.2, 0.1, 0.1], B0={"1,3": 0.5})
    traj = shoot(init, h, 500)
    weights = np.array([1.0 / f(mu_slice(state.mu, 0, 2)) ** 2 for state in traj.states])
    for p in (100, 250, len(traj.states) - 1):
        s = scipy.integrate.trapezoid(weights[: p + 1], dx=h)
        expected = scipy.linalg.expm(s * init.C0) @ init.U
        assert np.linalg.norm(traj.states[p].U - expected) <= 10 * h


def test_singular_pinch_ends_with_step_failure():
    from flagfold.core.geodesic import Termination

    traj = _run(ROTATION, singular_tol=10.0)
    assert traj.termination == Termination.STEP_FAILURE
    assert traj.states == []


def test_euclidean_geodesic():
    import numpy as np
    from flagfold.core.flagcore import compose, decompose
    from flagfold.core.geodesic import euclidean_geodesic

    A = np.diag([0.5, 0.3, 0.2])
    for rep in euclidean_geodesic(A, A, 4):
        assert np.allclose(compose(rep), A)

    theta = np.pi / 3
    u = np.array([np.cos(theta), np.sin(theta)])
    reps = euclidean_geodesic(np.diag([1.0, 0.0]), np.outer(u, u), 2)
    assert len(reps) == 3
    lam = np.sort(np.linalg.eigvalsh(compose(reps[1])))[::-1]
    assert np.allclose(lam, [0.5 * (1 + abs(np.cos(theta))), 0.5 * (1 - abs(np.cos(theta)))], atol=1e-12)
    assert np.allclose(decompose(compose(reps[1])).mu, reps[1].mu)


def test_euclidean_geodesic_leaves_low_dimensions():
    import numpy as np
    import scipy.linalg
    from flagfold.core.flagcore import FlagRep, compose
    from flagfold.core.geodesic import euclidean_geodesic, lambda_of

    frame_estimate = np.array([[0.039, 0.738, 0.674], [-0.997, 0.072, -0.021], [-0.064, -0.671, 0.739]])
    U1 = scipy.linalg.polar(frame_estimate)[0]
    target = np.array([0.028, 0.95, 0.023])
    A0 = compose(FlagRep(np.array([0.98, 0.01, 0.01]), np.eye(3)))
    A1 = compose(FlagRep(target / target.sum(), U1))
    reps = euclidean_geodesic(A0, A1, 50)
    third = np.array([lambda_of(rep.mu)[2] for rep in reps])
    assert third[1:-1].max() > 2 * max(third[0], third[-1])


def test_ellipsoid_frames():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.flagcore import FlagRep
    from flagfold.core.geodesic import ellipsoid_frames

    reps = [FlagRep(np.array(mu), np.eye(3)) for mu in ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])]
    (axes, segment), (_, disk), (_, sphere) = ellipsoid_frames(reps)
    assert np.array_equal(axes, np.eye(3))
    assert np.allclose(segment, [np.sqrt(3), 0.0, 0.0])
    assert np.allclose(disk, [np.sqrt(1.5), np.sqrt(1.5), 0.0])
    assert np.allclose(sphere, [1.0, 1.0, 1.0])

    with pytest.raises(InvalidInputError):
        ellipsoid_frames([FlagRep(np.array([0.5, 0.5]), np.eye(2))])


def test_angle_diagnostics():
    import numpy as np
    from flagfold.core.geodesic import angle_diagnostics, initial_state, shoot

    straight = _run(STRAIGHT)
    assert np.array_equal(angle_diagnostics(straight), np.zeros((len(straight.states), 2)))

    init = initial_state([0.4, 0.35, 0.25], [0.0, 0.0, 0.0], B0={"1,2": 1.0})
    angles = angle_diagnostics(shoot(init, 0.001, 300))
    assert np.array_equal(angles[0], [0.0, 0.0])
    assert np.all(np.diff(angles[:, 0]) > 0)
    assert np.array_equal(angles[:, 1], np.zeros(angles.shape[0]))


def test_trajectory_table_columns():
    from flagfold.core.geodesic import trajectory_columns, trajectory_table

    columns, rows = trajectory_table(_run(STRAIGHT, N=10))
    assert columns[:4] == ["t", "mu_1", "mu_2", "mu_3"]
    assert columns[7:10] == ["U_11", "U_12", "U_13"]
    assert columns[-2:] == ["theta1", "theta2"]
    assert rows.shape == (11, 18)
    assert trajectory_columns(10)[-3] == "U_10_10"


def test_trajectory_h5_round_trip(tmp_path):
    import numpy as np
    from flagfold.core.geodesic import load_trajectory, save_trajectory

    traj = _run(ROTATION, N=50)
    path = save_trajectory(traj, tmp_path / "rotation.h5", mu_min=1e-3)
    again = load_trajectory(path)
    assert again.termination == traj.termination
    assert again.h == traj.h
    assert np.array_equal(again.mus, traj.mus)
    assert np.array_equal(again.frames, traj.frames)


def test_load_trajectory_rejects_damaged_archive(tmp_path):
    import h5py
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.geodesic import load_trajectory, save_trajectory

    path = save_trajectory(_run(ROTATION, N=20), tmp_path / "rotation.h5")
    with h5py.File(path, "r+") as data:
        data["output/U"][5] = 2.0 * data["output/U"][5]
    with pytest.raises(InvalidInputError):
        load_trajectory(path)

    path = save_trajectory(_run(ROTATION, N=20), tmp_path / "weights.h5")
    with h5py.File(path, "r+") as data:
        data["output/mu"][3] = [0.5, 0.5, 0.5]
    with pytest.raises(InvalidInputError):
        load_trajectory(path)


def test_termination_parse():
    from flagfold.core.geodesic import Termination

    assert Termination.parse("boundary_hit") == Termination.BOUNDARY_HIT
    with pytest.raises(ValueError):
        Termination.parse("finished")


def test_simplex_coordinates():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.geodesic import simplex_coordinates

    assert np.allclose(simplex_coordinates(np.eye(3)), [[-1.0, 0.0], [1.0, 0.0], [0.0, np.sqrt(3)]])
    assert np.allclose(simplex_coordinates([1 / 3, 1 / 3, 1 / 3]), [[0.0, np.sqrt(3) / 3]])
    with pytest.raises(InvalidInputError):
        simplex_coordinates([0.5, 0.5])
