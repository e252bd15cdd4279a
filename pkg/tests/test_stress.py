import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manifold_mds.errors import DegenerateDistanceError, StructuralError, TraceError
from manifold_mds.stress import (
    DistanceMatrix,
    Scheme,
    StressTrace,
    WeightScheme,
    build_A,
    build_C,
    embedded_distances,
    majorization_value,
    make_weights,
    stress,
    stress_trace_db,
)


def naive_stress(Z, d, w, M=1.0):
    total = 0.0
    n = len(Z)
    for i in range(n):
        for j in range(i):
            total += w[i][j] * (np.linalg.norm(Z[i] - Z[j]) - d[i][j]) ** 2
    return M * total


def random_instance(rng, n, p, scheme):
    X = rng.standard_normal((n, p + 1))
    D = DistanceMatrix(embedded_distances(X))
    return D, make_weights(scheme, D)


def test_distance_matrix_invariants():
    with pytest.raises(StructuralError):
        DistanceMatrix([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(StructuralError):
        DistanceMatrix([[1.0, 1.0], [1.0, 0.0]])
    with pytest.raises(StructuralError):
        DistanceMatrix([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(StructuralError):
        DistanceMatrix(np.zeros((2, 3)))
    D = DistanceMatrix([[0.0, 1.0], [1.0 + 1e-15, 0.0]])
    assert np.array_equal(D.values, D.values.T)


def test_kruskal_weights():
    D = DistanceMatrix(embedded_distances(np.random.default_rng(0).standard_normal((5, 2))))
    S = make_weights("kruskal", D)
    assert S.M == 1.0
    off = ~np.eye(5, dtype=bool)
    assert np.all(S.W[off] == 1.0)


def test_sammon_weights_two_points():
    S = make_weights("sammon", DistanceMatrix([[0.0, 4.0], [4.0, 0.0]]))
    assert S.M == 0.25
    assert S.W[0, 1] == S.W[1, 0] == 0.25


def test_dkm_weights_two_points():
    S = make_weights(Scheme.DKM, DistanceMatrix([[0.0, 2.0], [2.0, 0.0]]))
    assert S.M == 1.0
    assert S.W[0, 1] == 0.25


@pytest.mark.parametrize("scheme", ["sammon", "dkm"])
def test_zero_distance_rejected(scheme):
    D = DistanceMatrix([[0, 1, 2], [1, 0, 0], [2, 0, 0]])
    with pytest.raises(DegenerateDistanceError) as info:
        make_weights(scheme, D)
    assert set(info.value.pair) == {1, 2}
    make_weights("kruskal", D)


def test_custom_weights():
    D = DistanceMatrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    W = np.array([[0, 2, 3], [2, 0, 4], [3, 4, 0]], dtype=float)
    S = make_weights("custom", D, weights=W)
    assert S.variant is Scheme.CUSTOM
    np.testing.assert_array_equal(S.W, W)
    with pytest.raises(StructuralError):
        make_weights("custom", D, weights=W.T + np.eye(3) - np.triu(np.ones((3, 3)), 1))
    with pytest.raises(StructuralError):
        WeightScheme("custom", 1.0, -W)


def test_stress_examples():
    X = np.random.default_rng(1).standard_normal((6, 2))
    D = DistanceMatrix(embedded_distances(X))
    assert stress(X, D, make_weights("dkm", D)) == pytest.approx(0.0, abs=1e-25)

    D2 = DistanceMatrix([[0.0, 1.0], [1.0, 0.0]])
    assert stress([[0.0, 0.0], [2.0, 0.0]], D2, make_weights("kruskal", D2)) == 1.0


@pytest.mark.parametrize("scheme", ["kruskal", "sammon", "dkm"])
def test_stress_matches_double_loop(scheme):
    rng = np.random.default_rng(2)
    D, S = random_instance(rng, 4, 2, scheme)
    Z = rng.standard_normal((4, 2))
    expected = naive_stress(Z, D.values, S.W, S.M)
    assert stress(Z, D, S) == pytest.approx(expected, rel=1e-13)
    assert stress(Z, D, S, normalized=False) == pytest.approx(expected / S.M, rel=1e-13)


def test_sammon_stress_matches_direct_formula():
    rng = np.random.default_rng(3)
    for _ in range(20):
        D, S = random_instance(rng, 7, 2, "sammon")
        Z = rng.standard_normal((7, 2))
        d = D.values
        E = embedded_distances(Z)
        i, j = np.tril_indices(7, -1)
        direct = np.sum((E[i, j] - d[i, j]) ** 2 / d[i, j]) / np.sum(d[i, j])
        assert abs(stress(Z, D, S) - direct) <= 1e-12


def test_stress_rigid_motion_invariance():
    rng = np.random.default_rng(4)
    for p in (2, 3):
        D, S = random_instance(rng, 9, p, "dkm")
        Z = rng.standard_normal((9, p))
        R, _ = np.linalg.qr(rng.standard_normal((p, p)))
        c = rng.standard_normal(p)
        assert abs(stress(Z @ R.T + c, D, S) - stress(Z, D, S)) <= 1e-9


def test_build_A_examples():
    S2 = WeightScheme("kruskal", 1.0, np.ones((2, 2)))
    np.testing.assert_array_equal(build_A(S2), [[1.0, -1.0], [-1.0, 1.0]])
    A3 = build_A(WeightScheme("kruskal", 1.0, np.ones((3, 3))))
    np.testing.assert_array_equal(np.diag(A3), [2.0, 2.0, 2.0])
    assert np.all(A3[~np.eye(3, dtype=bool)] == -1.0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 15))
def test_build_A_is_laplacian(seed, n):
    rng = np.random.default_rng(seed)
    W = rng.uniform(0.01, 5.0, (n, n))
    A = build_A(WeightScheme("custom", 1.0, W + W.T))
    assert np.array_equal(A, A.T)
    assert np.max(np.abs(A.sum(axis=1))) <= 1e-12 * np.abs(A).max()
    assert np.linalg.eigvalsh(A).min() >= -1e-10
    np.testing.assert_allclose(A @ np.ones(n), 0.0, atol=1e-12 * np.abs(A).max())


def test_build_C_examples():
    X = np.random.default_rng(5).standard_normal((5, 2))
    D = DistanceMatrix(embedded_distances(X))
    S = make_weights("sammon", D)
    np.testing.assert_allclose(build_C(X, D, S), build_A(S), atol=1e-12)

    D2 = DistanceMatrix([[0.0, 3.0], [3.0, 0.0]])
    C = build_C([[0.0], [1.0]], D2, make_weights("kruskal", D2))
    np.testing.assert_allclose(C, [[3.0, -3.0], [-3.0, 3.0]])


def test_build_C_row_sums_and_coincident_guard():
    rng = np.random.default_rng(6)
    D, S = random_instance(rng, 8, 2, "dkm")
    U = rng.standard_normal((8, 2))
    C = build_C(U, D, S)
    assert np.max(np.abs(C.sum(axis=1))) <= 1e-12
    U[3] = U[5]
    C = build_C(U, D, S)
    assert C[3, 5] == 0.0 and C[5, 3] == 0.0
    assert np.all(np.isfinite(C))


def test_majorization_touches_at_anchor():
    rng = np.random.default_rng(7)
    D, S = random_instance(rng, 6, 2, "kruskal")
    U = rng.standard_normal((6, 2))
    assert majorization_value(U, U, D, S) == pytest.approx(stress(U, D, S, normalized=False), abs=1e-9)


def test_majorization_all_zero():
    D = DistanceMatrix(np.zeros((3, 3)))
    S = make_weights("kruskal", D)
    Z = np.zeros((3, 2))
    assert majorization_value(Z, Z, D, S) == 0.0


@pytest.mark.parametrize("scheme", ["kruskal", "sammon", "dkm"])
def test_majorization_bound_random(scheme):
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(2, 16))
        p = int(rng.integers(1, 4))
        D, S = random_instance(rng, n, p, scheme)
        Z = rng.standard_normal((n, p))
        U = rng.standard_normal((n, p))
        phi_z = stress(Z, D, S, normalized=False)
        assert majorization_value(Z, U, D, S) + 1e-9 >= phi_z
        assert abs(majorization_value(U, U, D, S) - stress(U, D, S, normalized=False)) <= 1e-9


def test_majorization_bound_with_coincident_anchor():
    rng = np.random.default_rng(9)
    D, S = random_instance(rng, 6, 2, "dkm")
    U = rng.standard_normal((6, 2))
    U[1] = U[4]
    for _ in range(20):
        Z = rng.standard_normal((6, 2))
        assert majorization_value(Z, U, D, S) + 1e-9 >= stress(Z, D, S, normalized=False)


def test_stress_trace_db():
    np.testing.assert_array_equal(stress_trace_db([2.0, 2.0, 2.0]), [0.0, 0.0, 0.0])
    np.testing.assert_allclose(stress_trace_db([1.0, 0.1]), [0.0, -10.0], atol=1e-14)
    np.testing.assert_allclose(stress_trace_db([4.0, 1.0]), [0.0, -6.020599913279624], atol=1e-14)
    with pytest.raises(TraceError):
        stress_trace_db([0.0, 0.0])
    with pytest.raises(TraceError):
        stress_trace_db([])


def test_stress_trace_object():
    t = StressTrace.from_values([3.0, 2.0, 1.0])
    assert t.db[0] == 0.0
    assert np.all(np.diff(t.db) <= 0)
    assert StressTrace.from_values([0.0]).db is None
