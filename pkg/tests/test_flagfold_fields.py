# -*- coding: utf-8 -*-
import pytest


def _assert_jacobian(X, x, rtol=1e-5):
    import numpy as np
    from flagfold.core.fields import finite_difference_jacobian

    exact = X.jacobian(x)
    numeric = finite_difference_jacobian(X.value, x)
    assert np.linalg.norm(numeric - exact) <= rtol * max(np.linalg.norm(exact), 1.0)


def test_affine_field():
    import numpy as np
    from flagfold.core.fields import affine_field, constant_field

    A = np.array([[1.0, 2.0], [-0.5, 0.3]])
    X = affine_field(A, [1.0, -1.0])
    assert np.allclose(X.value(np.array([1.0, 1.0])), [4.0, -1.2])
    assert np.array_equal(X.jacobian(np.zeros(2)), A)
    assert np.array_equal(constant_field([3.0, 4.0]).jacobian(np.ones(2)), np.zeros((2, 2)))


def test_field_jacobians_match_finite_differences():
    import numpy as np
    from flagfold.core.fields import affine_field, bump_field, radial_field

    rng = np.random.default_rng(31)
    fields = (
        affine_field(rng.standard_normal((3, 3)), rng.standard_normal(3)),
        radial_field([0.1, -0.2, 0.0], 0.8),
        bump_field(2, [0.0, 0.3, -0.1], 0.6, amplitude=2.0),
    )
    for X in fields:
        for _ in range(50):
            _assert_jacobian(X, 0.5 * rng.standard_normal(3))


def test_fields_vanish_outside_support():
    import numpy as np
    from flagfold.core.fields import bump_field, radial_field

    far = np.array([2.0, 0.0, 0.0])
    for X in (radial_field(np.zeros(3), 1.0), bump_field(0, np.zeros(3), 1.0)):
        assert np.array_equal(X.value(far), np.zeros(3))
        assert np.array_equal(X.jacobian(far), np.zeros((3, 3)))


def test_radial_field_near_centre():
    import numpy as np
    from flagfold.core.fields import radial_field

    X = radial_field(np.zeros(2), 1.0)
    assert np.allclose(X.jacobian(np.zeros(2)), np.eye(2))
    assert np.array_equal(X.value(np.zeros(2)), np.zeros(2))


def test_maps():
    import numpy as np
    from flagfold.core.fields import flow_map, identity_map, linear_map, radial_field, scaling_map

    x = np.array([0.3, -0.2, 0.1])
    assert np.array_equal(identity_map(3).value(x), x)
    assert np.array_equal(scaling_map(3, 2.0).jacobian(x), 2.0 * np.eye(3))
    assert np.allclose(linear_map(np.eye(3), [1.0, 0.0, 0.0]).value(x), x + [1.0, 0.0, 0.0])

    phi = flow_map(radial_field(np.zeros(3), 1.0), 0.1)
    _assert_jacobian(phi, x)
    assert np.allclose(flow_map(radial_field(np.zeros(3), 1.0), 0.0).jacobian(x), np.eye(3))


def test_field_by_name():
    import numpy as np
    from flagfold.core.errors import InvalidInputError
    from flagfold.core.fields import field_by_name

    assert field_by_name("radial", 3, radius=0.5).name == "radial"
    # components are 1-based on the command line
    X = field_by_name("bump", 2, component=2, radius=1.0)
    assert np.allclose(X.value(np.zeros(2)), [0.0, 1.0])
    assert field_by_name("affine", 2, matrix=[[1.0, 0.0], [0.0, 1.0]]).name == "affine"

    with pytest.raises(InvalidInputError):
        field_by_name("vortex", 3)
    with pytest.raises(InvalidInputError):
        field_by_name("affine", 3)
    with pytest.raises(InvalidInputError):
        field_by_name("affine", 3, matrix=np.eye(2))
    with pytest.raises(InvalidInputError):
        field_by_name("radial", 3, center=[0.0, 0.0])
    with pytest.raises(InvalidInputError):
        field_by_name("radial", 3, radius=0.0)
    with pytest.raises(InvalidInputError):
        field_by_name("bump", 3, component=4)
