"""Acceptance criteria.

Each test checks one criterion at its fixed tolerance and records a one-line
PASS/FAIL verdict; the verdicts are printed at the end of the pytest run (see
conftest.py) or when this file is executed directly.
"""

import numpy as np
import pytest
from scipy.stats import spearmanr

from manifold_mds import datasets
from manifold_mds.manifolds import (
    ManifoldKind,
    ManifoldPoint,
    distance,
    random_point,
    so_exp,
    so_log,
)
from manifold_mds.solver import (
    GivenInit,
    RandomInit,
    SolverConfig,
    embed,
    optimal_step,
    procrustes_align,
    quadratic_descent,
)
from manifold_mds.stress import (
    DistanceMatrix,
    embedded_distances,
    majorization_value,
    make_weights,
    stress,
)

RESULTS = {}
SCHEMES = ("kruskal", "sammon", "dkm")


def record(number, name, ok, detail):
    RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}"
    print(RESULTS[number])
    assert ok, detail


def spearman(a, b):
    return spearmanr(a, b).correlation


def upper(M):
    i, j = np.triu_indices(M.shape[0], 1)
    return M[i, j]


def planar_problem():
    """Ten uniform points in the unit square, as in the perturbed-start toy run."""
    dataset, X = datasets.planar(10, seed=0)
    return dataset.D, X


def test_01_majorization_soundness():
    rng = np.random.default_rng(1)
    worst_bound = worst_touch = 0.0
    for k in range(100):
        n = int(rng.integers(2, 21))
        p = 2 + k % 2
        scheme = SCHEMES[k % 3]
        D = DistanceMatrix(embedded_distances(rng.standard_normal((n, p + 2))))
        S = make_weights(scheme, D)
        Z = rng.standard_normal((n, p))
        U = rng.standard_normal((n, p))
        worst_bound = max(worst_bound, stress(Z, D, S, normalized=False) - majorization_value(Z, U, D, S))
        worst_touch = max(worst_touch, abs(stress(U, D, S, normalized=False) - majorization_value(U, U, D, S)))
    ok = worst_bound <= 1e-9 and worst_touch <= 1e-9
    record(1, "majorization soundness", ok,
           f"max Phi(Z)-Psi(Z;U) = {worst_bound:.2e}, max |Phi(U)-Psi(U;U)| = {worst_touch:.2e} (tol 1e-9)")


def test_02_monotone_stress():
    kinds = [
        ManifoldKind.special_orthogonal(3),
        ManifoldKind.sphere(3),
        ManifoldKind.spd(3),
        ManifoldKind.special_unitary(2),
    ]
    worst = -np.inf
    runs = 0
    for kind in kinds:
        rng = np.random.default_rng(kind.q + 100 * len(kind.tag.value))
        for k in range(50):
            n = int(rng.integers(4, 16))
            points = [random_point(kind, rng) for _ in range(n)]
            D = datasets.ManifoldPoints(kind, datasets.default_labels(n), points).distances()
            r = embed(D, make_weights(SCHEMES[k % 3], D), SolverConfig(p=2 + k % 2, init=RandomInit(k)))
            worst = max(worst, float(np.max(np.diff(r.trace.values))))
            runs += 1
    record(2, "monotone stress", worst <= 1e-9,
           f"{runs} runs, largest per-step increase {worst:.2e} (tol 1e-9)")


def test_03_step_size_correction():
    rng = np.random.default_rng(3)
    failures = 0
    for _ in range(100):
        n = int(rng.integers(2, 16))
        M = rng.standard_normal((n, n))
        A = M @ M.T
        b = rng.standard_normal(n)
        x = rng.standard_normal(n)

        def phi(z):
            return z @ A @ z + z @ b

        g = 2 * A @ x + b
        s = optimal_step(A, g)
        base = phi(x - s * g)
        ok = base <= phi(x - 2 * s * g)
        ok &= base <= phi(x - (s + 1e-4 * s) * g)
        ok &= base <= phi(x - (s - 1e-4 * s) * g)
        failures += not ok
    record(3, "step-size correction (factor 1/2)", failures == 0,
           f"{100 - failures}/100 quadratics with phi(x-sg) <= phi(x-2sg) and <= phi(x-(s+-1e-4 s)g)")


def test_04_inner_solver_oracle():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(30):
        n = int(rng.integers(2, 16))
        M = rng.standard_normal((n, n))
        A = M @ M.T + 0.5 * np.eye(n)
        b = rng.standard_normal(n)
        exact = np.linalg.solve(2 * A, -b)
        x = quadratic_descent(A, b, np.zeros(n), inner_max=500000, inner_tol=1e-14)
        worst = max(worst, np.linalg.norm(x - exact) / np.linalg.norm(exact))
    record(4, "inner solver vs direct solve", worst <= 1e-6,
           f"max relative 2-norm error {worst:.2e} over 30 instances (tol 1e-6)")


def test_05_perturbed_start_recovery():
    D, X = planar_problem()
    rng = np.random.default_rng(5)
    Z0 = X + 1e-2 * rng.standard_normal(X.shape)
    lines = []
    ok = True
    # default tolerances for Kruskal; DKM needs a finer stop rule to go below -80 dB
    for scheme, tol in (("kruskal", 1e-9), ("dkm", 1e-12)):
        r = embed(D, make_weights(scheme, D), SolverConfig(init=GivenInit(Z0), outer_tol=tol, outer_max=500))
        rms = procrustes_align(r.Z, X).rms
        db = float(r.trace.db[-1])
        ok &= rms <= 1e-4 and db <= -80 and r.outer_iterations <= 500
        lines.append(f"{scheme}: RMS {rms:.1e}, {db:.1f} dB in {r.outer_iterations} its")
    record(5, "planar perturbed start", ok, "; ".join(lines) + " (tol RMS 1e-4, -80 dB)")


def test_06_random_start_distances():
    D, X = planar_problem()
    worst = 0.0
    rms = []
    runs = 0
    for scheme, restarts in (("kruskal", 10), ("dkm", 20)):
        S = make_weights(scheme, D)
        for seed in range(5):
            r = embed(D, S, SolverConfig(init=RandomInit(seed), restarts=restarts))
            worst = max(worst, float(np.max(np.abs(embedded_distances(r.Z) - D.values))))
            rms.append(procrustes_align(r.Z, X).rms)
            runs += 1
    record(6, "planar random start", worst <= 1e-3,
           f"{runs} runs, max |D_out - D_in| = {worst:.1e} (tol 1e-3), aligned RMS max {max(rms):.1e}")


def test_07_sphere_rank_correlation():
    rhos = []
    for seed in range(10):
        dataset = datasets.sphere(15, 3, seed=seed)
        D = dataset.distances()
        r = embed(D, make_weights("dkm", D), SolverConfig(init=RandomInit(seed), restarts=10))
        rhos.append(spearman(upper(D.values), upper(embedded_distances(r.Z))))
    rhos = np.array(rhos)
    bad = [f"seed {s}: {v:.3f}" for s, v in enumerate(rhos) if v < 0.9]
    record(7, "S^3 -> R^2 rank correlation", not bad,
           f"min {rhos.min():.3f}, mean {rhos.mean():.3f} over 10 seeds (each >= 0.9 required)"
           + (f"; below: {', '.join(bad)}" if bad else ""))


def test_08_cities():
    c = datasets.cities()
    la, sf, ny = (c.labels.index(s) for s in ("Los Angeles", "San Francisco", "New York"))
    S = make_weights("dkm", c.D)
    held = 0
    for seed in range(10):
        E = embedded_distances(embed(c.D, S, SolverConfig(init=RandomInit(seed))).Z)
        held += E[la, sf] < E[la, ny] and E[sf, ny] > E[la, sf]
    record(8, "cities LA/SF/NY", held == 10, f"relation holds in {held}/10 runs")


def test_09_geometry_suite():
    kinds = [
        ManifoldKind.special_orthogonal(3),
        ManifoldKind.special_orthogonal(5),
        ManifoldKind.sphere(3),
        ManifoldKind.spd(3),
        ManifoldKind.special_unitary(2),
    ]
    rng = np.random.default_rng(9)
    tri = sym_ok = True
    sphere_ok = True
    for kind in kinds:
        for _ in range(200):
            x, y, z = (random_point(kind, rng) for _ in range(3))
            dxy = distance(x, y)
            sym_ok &= dxy == distance(y, x) and dxy >= 0
            tri &= distance(x, z) <= dxy + distance(y, z) + 1e-9
            if kind.tag.value == "S":
                sphere_ok &= 0.0 <= dxy <= np.pi

    SO3 = ManifoldKind.special_orthogonal(4)
    SPD3 = ManifoldKind.spd(3)
    bi = aff = rt = 0.0
    for _ in range(100):
        r, x, y = (random_point(SO3, rng) for _ in range(3))
        d = distance(x, y)
        bi = max(bi, abs(distance(ManifoldPoint(SO3, r.data @ x.data), ManifoldPoint(SO3, r.data @ y.data)) - d))
        bi = max(bi, abs(distance(ManifoldPoint(SO3, x.data @ r.data), ManifoldPoint(SO3, y.data @ r.data)) - d))

        p, q = random_point(SPD3, rng), random_point(SPD3, rng)
        a = rng.standard_normal((3, 3)) + np.eye(3)
        ap, aq = a @ p.data @ a.T, a @ q.data @ a.T
        moved = distance(ManifoldPoint(SPD3, 0.5 * (ap + ap.T)), ManifoldPoint(SPD3, 0.5 * (aq + aq.T)))
        d = distance(p, q)
        aff = max(aff, abs(moved - d) / (1 + d))

        m = random_point(SO3, rng)
        if np.max(np.abs(np.angle(np.linalg.eigvals(m.data)))) <= np.pi - 0.1:
            back = so_exp(ManifoldPoint(SO3, np.eye(4)), so_log(m))
            rt = max(rt, float(np.max(np.abs(back.data - m.data))))

    ok = tri and sym_ok and sphere_ok and bi <= 1e-8 and aff <= 1e-8 and rt <= 1e-9
    record(9, "geometry suite", ok,
           f"symmetry exact: {sym_ok}, triangle: {tri}, sphere range: {sphere_ok}, "
           f"SO bi-invariance {bi:.1e}, SPD affine {aff:.1e} (tol 1e-8), exp(log) {rt:.1e} (tol 1e-9)")


def test_10_trajectory():
    negative = 0
    rhos = []
    for seed in range(10):
        dataset = datasets.trajectory(q=9, steps=200, keep=20, decay=0.97, seed=seed)
        D = dataset.distances()
        r = embed(D, make_weights("dkm", D), SolverConfig(p=3, init=RandomInit(seed)))
        gaps = np.linalg.norm(np.diff(r.Z, axis=0), axis=1)
        rho = spearman(gaps, np.arange(len(gaps)))
        rhos.append(rho)
        negative += rho < 0
    record(10, "SO(9) -> R^3 convergent trajectory", negative >= 9,
           f"gap/index correlation negative in {negative}/10 seeds (max {max(rhos):.3f})")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
