# -*- coding: utf-8 -*-
import pytest


def test_coarser():
    from flagfold.core.stratify import coarser

    assert coarser((2, 1, 1), (2, 2))
    assert coarser((1, 1), (2,))
    assert not coarser((2, 1), (1, 2))
    assert coarser((1, 2), (1, 2))


def test_coarser_rejects_mismatch():
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.stratify import coarser

    with pytest.raises(InvalidInputError):
        coarser((1, 1), (3,))
    with pytest.raises(InvalidInputError):
        coarser((0, 2), (2,))


def _compositions(n):
    from itertools import combinations

    types = []
    for size in range(n):
        for cuts in combinations(range(1, n), size):
            bounds = (0,) + cuts + (n,)
            types.append(tuple(b - a for a, b in zip(bounds[:-1], bounds[1:])))
    return types


def test_coarser_is_a_partial_order():
    from flagfold.core.stratify import coarser

    for n in range(1, 7):
        types = _compositions(n)
        assert len(types) == 2 ** (n - 1)
        for J in types:
            assert coarser(J, J)
            assert coarser(J, (n,))
            assert coarser((1,) * n, J)
            for I in types:
                if coarser(J, I) and coarser(I, J):
                    assert I == J
                if n <= 5 and coarser(J, I):
                    assert all(coarser(J, K) for K in types if coarser(I, K))


def test_project_flag_example():
    import numpy as np
    from flagfold.core.flagcore import FlagRep, type_of
    from flagfold.core.stratify import flag_projectors, project_flag

    rep = FlagRep(np.array([0.0, 0.5, 0.3, 0.2]), np.eye(4))
    assert type_of(rep.mu) == (2, 1, 1)
    projected = project_flag(rep, (2, 1, 1), (2, 2))
    assert np.allclose(projected.mu, [0.0, 0.5, 0.0, 0.5])
    assert type_of(projected.mu) == (2, 2)
    spans = flag_projectors(projected.frame, (2, 2))
    assert np.allclose(spans[0], np.diag([1.0, 1.0, 0.0, 0.0]))
    assert np.allclose(spans[1], np.eye(4))


def test_project_flag_identity_and_composition():
    import numpy as np
    from flagfold.core.flagcore import FlagRep
    from flagfold.core.stratify import flag_projectors, project_flag
    from scipy.stats import ortho_group

    rng = np.random.default_rng(21)
    for _ in range(20):
        rep = FlagRep(rng.dirichlet(np.ones(4)), ortho_group.rvs(4, random_state=rng))
        same = project_flag(rep, (1, 1, 1, 1), (1, 1, 1, 1))
        assert np.array_equal(same.mu, rep.mu) and np.array_equal(same.frame, rep.frame)

        two_steps = project_flag(project_flag(rep, (1, 1, 1, 1), (2, 1, 1)), (2, 1, 1), (2, 2))
        direct = project_flag(rep, (1, 1, 1, 1), (2, 2))
        assert np.allclose(two_steps.mu, direct.mu, atol=1e-15)
        for P, Q in zip(flag_projectors(two_steps.frame, (2, 2)), flag_projectors(direct.frame, (2, 2))):
            assert np.allclose(P, Q, atol=1e-12)


def test_project_flag_rejects_finer_target():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.flagcore import FlagRep
    from flagfold.core.stratify import project_flag

    with pytest.raises(InvalidInputError):
        project_flag(FlagRep(np.array([0.0, 1.0, 0.0]), np.eye(3)), (2, 1), (1, 2))


def test_block_indices():
    from flagfold.core.stratify import block_indices

    assert block_indices((1, 1, 1)) == frozenset()
    assert block_indices((1, 2)) == frozenset({(1, 2)})
    assert block_indices((2, 1)) == frozenset({(0, 1)})
    assert block_indices((3,)) == frozenset({(0, 1), (0, 2), (1, 2)})


def test_horizontal_project():
    import numpy as np
    from flagfold.core.stratify import block_indices, horizontal_project

    rng = np.random.default_rng(2)
    A = rng.standard_normal((4, 4))
    B = A - A.T
    assert np.array_equal(horizontal_project(B, (1, 1, 1, 1)), B)
    assert np.array_equal(horizontal_project(B, (4,)), np.zeros((4, 4)))

    for I in ((2, 2), (1, 3), (2, 1, 1)):
        removed = B - horizontal_project(B, I)
        support = {(i, j) for i, j in zip(*np.nonzero(removed)) if i < j}
        assert support == set(block_indices(I))


def test_cell_of():
    import numpy as np
    from flagfold.core.stratify import cell_of

    cell = cell_of([0.5, 0.5, 0.0])
    assert cell.K == frozenset({0, 1})
    assert cell.flag_type == (1, 1, 1)

    cell = cell_of([0, 0, 1 / 6, 1 / 2, 0, 1 / 3, 0])
    assert cell.K == frozenset({2, 3, 5})
    assert cell.flag_type == (3, 1, 2, 1)

    rng = np.random.default_rng(4)
    mu = rng.dirichlet(np.ones(5))
    assert cell_of(mu).K == frozenset(range(5))


def test_cell_barycentre():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.stratify import cell_barycentre, cell_of

    mu = cell_barycentre(frozenset({0, 2}), 3)
    assert np.allclose(mu, [0.5, 0.0, 0.5])
    assert cell_of(mu).K == frozenset({0, 2})
    with pytest.raises(InvalidInputError):
        cell_barycentre(frozenset({3}), 3)


def test_block_indices_count():
    from flagfold.core.stratify import block_indices

    for n in range(1, 7):
        for flag_type in _compositions(n):
            pairs = block_indices(flag_type)
            assert len(pairs) == sum(p * (p - 1) // 2 for p in flag_type)
            assert all(0 <= i < j < n for i, j in pairs)


def test_horizontal_project_is_an_orthogonal_projection():
    import numpy as np
    from flagfold.core.stratify import horizontal_project

    rng = np.random.default_rng(23)
    for n in (2, 3, 5):
        for flag_type in _compositions(n):
            for _ in range(5):
                A, C = rng.standard_normal((2, n, n))
                B, D = A - A.T, C - C.T
                a, b = rng.standard_normal(2)
                P = horizontal_project(B, flag_type)
                assert np.array_equal(P, -P.T)
                assert np.array_equal(horizontal_project(P, flag_type), P)
                assert np.allclose(horizontal_project(a * B + b * D, flag_type), a * P + b * horizontal_project(D, flag_type), atol=1e-12)
                # the removed part is Frobenius-orthogonal to every projected matrix
                assert abs(np.sum((B - P) * horizontal_project(D, flag_type))) <= 1e-12
