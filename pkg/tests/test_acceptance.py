"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Every tolerance is pinned here, not configured.
"""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from gaborinv.cli import main as cli_main
from gaborinv.density import (
    LatticePoints,
    density_transform_check,
    equidistribution_diagnostic,
    lower_density_empirical,
    omega_density_formula,
    omega_spec,
)
from gaborinv.gabor import (
    FiniteGaborSystem,
    canonical_dual,
    cross_frame_operator,
    frame_operator_direct,
    frame_operator_walnut,
    janssen_representation,
    periodized_gaussian,
    tf_shift,
)
from gaborinv.invariance import (
    criteria_engine,
    dft_vector_relation,
    scan_invariance,
)
from gaborinv.lattice import (
    Lattice2D,
    RationalMatrix2x2,
    SeparableLattice,
    as_fraction,
    order_in_lattice,
    reduce_invariant_shift,
)
from gaborinv.symplectic import (
    covariance_residual,
    metaplectic_from_generators,
    transport_system,
)

GOLDEN = (math.sqrt(5) - 1) / 2


def _report(num: int, name: str, ok: bool, elapsed: float, limit: float, detail: str):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    print(f"[criterion {num:2d}] {status}  {name}  ({elapsed:.2f}s < {limit:.0f}s)  {detail}")
    assert ok, f"criterion {num}: {detail}"
    assert elapsed < limit, f"criterion {num} exceeded {limit}s ({elapsed:.2f}s)"


def positive_system():
    L, a, b = 144, 12, 8
    g0 = periodized_gaussian(L, np.pi)
    w = g0 + tf_shift(g0, a // 2, 0)
    return FiniteGaborSystem(L, a, b, w / np.linalg.norm(w))


def negative_system():
    return FiniteGaborSystem(120, 12, 12, periodized_gaussian(120, np.pi))


def test_criterion_01_reduction_exactness():
    t0 = time.perf_counter()
    rng = random.Random(13571137)
    checked = 0
    ok = True
    detail = "1000 reductions exact"
    while checked < 1000:
        m = rng.randint(2, 50)
        r, s = rng.randint(0, m - 1), rng.randint(0, m - 1)
        if (r, s) == (0, 0):
            continue
        a = Fraction(rng.randint(1, 10), rng.randint(1, 10))
        b = Fraction(rng.randint(1, 10), rng.randint(1, 10))
        res = reduce_invariant_shift(a, b, r, s, m)
        shift = (
            (s * b / m, Fraction(r) * a / m)
            if res.fourier_swap
            else (r * a / m, Fraction(s) * b / m)
        )
        exact = (
            res.B.det() == 1
            and res.B.apply(shift) == (Fraction(res.d) * res.alpha / res.m, 0)
            and 1 <= res.d < res.m
            and Lattice2D(res.B @ res.input_lattice().basis).same_lattice(
                SeparableLattice(res.alpha, res.beta).as_lattice()
            )
        )
        if not exact:
            ok, detail = False, f"violation at (a={a}, b={b}, r={r}, s={s}, m={m})"
            break
        checked += 1
    _report(1, "reduction identities, zero tolerance", ok, time.perf_counter() - t0, 2.0, detail)


def test_criterion_02_walnut_equals_direct():
    t0 = time.perf_counter()
    sys = FiniteGaborSystem(144, 12, 8, periodized_gaussian(144, np.pi))
    S_direct = frame_operator_direct(sys)
    S_walnut, _ = frame_operator_walnut(sys)
    rel = np.linalg.norm(S_walnut - S_direct) / np.linalg.norm(S_direct)
    _report(2, "Walnut form == direct frame operator", rel < 1e-10,
            time.perf_counter() - t0, 1.0, f"rel err {rel:.2e} < 1e-10")


def test_criterion_03_janssen_equals_cross():
    t0 = time.perf_counter()
    L, a, b, nu = 144, 12, 8, 2
    sys = FiniteGaborSystem(L, a, b, periodized_gaussian(L, np.pi))
    gamma = canonical_dual(sys, 1e-8).gamma
    t_step, f_step = L // b, nu * L // a
    S_cross = cross_frame_operator(gamma, sys.window, t_step, f_step)
    S_janssen, _, _ = janssen_representation(gamma, sys.window, t_step, f_step)
    rel = np.linalg.norm(S_janssen - S_cross) / np.linalg.norm(S_cross)
    _report(3, "Janssen form == cross-frame operator", rel < 1e-8,
            time.perf_counter() - t0, 2.0, f"rel err {rel:.2e} < 1e-8")


def test_criterion_04_criteria_positive_case():
    t0 = time.perf_counter()
    rep = criteria_engine(positive_system(), 2, tol=1e-6, rank_tol=1e-8)
    worst_proj = max(rep.projection_residuals.values())
    ok = (
        rep.res_i < 1e-8
        and max(rep.res_ii) < 1e-8
        and rep.res_iv < 1e-8
        and rep.rank_sum == rep.joint_rank
        and worst_proj < 1e-8
        and rep.verdict == "all_hold"
    )
    detail = (
        f"res_i {rep.res_i:.1e}, res_ii {max(rep.res_ii):.1e}, "
        f"res_iv {rep.res_iv:.1e}, ranks {rep.rank_sum}=={rep.joint_rank}, "
        f"proj {worst_proj:.1e}"
    )
    _report(4, "duality criteria all hold (two-bump window)", ok,
            time.perf_counter() - t0, 10.0, detail)


def test_criterion_05_negative_case_and_scan():
    t0 = time.perf_counter()
    sys = negative_system()
    rep = criteria_engine(sys, 2, tol=1e-6, rank_tol=1e-8)
    scan = scan_invariance(sys, refinement=4, tol=1e-6)
    inset = set(scan.invariant_set)
    r_in = max(r for p, r in zip(scan.tested_points, scan.residuals) if p in inset)
    r_out = min(r for p, r in zip(scan.tested_points, scan.residuals) if p not in inset)
    gap = r_out / r_in
    ok = (
        rep.frame.is_riesz_sequence
        and rep.res_i > 1e-3
        and rep.res_iv > 1e-3
        and rep.verdict == "all_fail"
        and rep.verdict_consistent
        and inset == set(scan.lattice_points)
        and scan.verdict == "subset_of_refined_lattice"
        and scan.verdict_m == 1
        and gap >= 1e3
    )
    detail = (
        f"riesz {rep.frame.is_riesz_sequence}, res_i {rep.res_i:.1e} > 1e-3, "
        f"res_iv {rep.res_iv:.1e} > 1e-3, invariant set == lattice, gap {gap:.1e}"
    )
    _report(5, "Gaussian negative case: criteria fail, invariant set = lattice",
            ok, time.perf_counter() - t0, 30.0, detail)


def test_criterion_06_dft_vector_identity():
    t0 = time.perf_counter()
    r_pos = dft_vector_relation(positive_system(), 2)
    r_neg = dft_vector_relation(negative_system(), 2)
    ok = r_pos < 1e-8 and r_neg < 1e-8
    _report(6, "DFT-vector identity on both systems", ok,
            time.perf_counter() - t0, 5.0, f"residuals {r_pos:.1e}, {r_neg:.1e} < 1e-8")


def test_criterion_07_metaplectic_covariance():
    t0 = time.perf_counter()
    mats = [
        [[0, -1], [1, 0]],
        [[1, 0], [1, 1]],
        [[1, 0], [3, 1]],
        [[-2, -1], [1, 0]],
    ]
    worst = 0.0
    for L in (5, 7, 9, 15):
        for B in mats:
            op = metaplectic_from_generators(B, L)
            worst = max(
                worst,
                max(covariance_residual(op, (t, m)) for t in range(L) for m in range(L)),
            )
    # negative control: chirp missing the (L+1)/2 half-inverse phase
    L = 7
    bad = np.diag(np.exp(1j * np.pi * np.arange(L) ** 2 / L))
    good = metaplectic_from_generators([[1, 0], [1, 1]], L)
    corrupted = type(good)(matrix=good.matrix, unitary=bad, L=L, factors=good.factors)
    control = max(
        covariance_residual(corrupted, (t, m)) for t in range(L) for m in range(L)
    )
    ok = worst < 1e-10 and control > 1e-2
    _report(7, "metaplectic covariance, exhaustive + negative control", ok,
            time.perf_counter() - t0, 5.0,
            f"worst {worst:.1e} < 1e-10, control {control:.1e} > 1e-2")


def test_criterion_08_invariant_set_transport():
    t0 = time.perf_counter()
    tol = 1e-6
    J = [[0, -1], [1, 0]]

    def transported_matches(sys):
        rep = scan_invariance(sys, refinement=4, tol=tol)
        op = metaplectic_from_generators(J, sys.L)
        moved = transport_system(op, sys)
        rep2 = scan_invariance(moved, refinement=4, tol=tol)
        mapped = {
            tuple(int(x) % sys.L for x in op.matrix @ np.array(p))
            for p in rep.invariant_set
        }
        if mapped != set(rep2.invariant_set):
            return False, "set mismatch"
        bad = [p for p in mapped if rep2.residual_of(p) >= 10 * tol]
        return not bad, f"{len(mapped)} points at 10*tol"

    ok1, d1 = transported_matches(positive_system())
    # proper-span variant: the invariance pattern is nontrivial
    L, a, b = 144, 12, 8
    g0 = periodized_gaussian(L, np.pi)
    w = sum(tf_shift(g0, 6 * j, 0) for j in range(L // 6))
    sys2 = FiniteGaborSystem(L, a, b, w / np.linalg.norm(w))
    ok2, d2 = transported_matches(sys2)
    _report(8, "DFT transport maps the invariant set pointwise", ok1 and ok2,
            time.perf_counter() - t0, 10.0, f"criterion-4 system: {d1}; periodic window: {d2}")


def test_criterion_09_beurling_density():
    t0 = time.perf_counter()
    alpha, beta, nu = 1.5, 5 / 7, 2
    omega = omega_spec(alpha, beta, nu)
    errs = []
    for part in omega.members:
        est = lower_density_empirical(part, [200.0], probe_grid=16)[0]
        errs.append(abs(est.theta - est.analytic) / est.analytic)
    transform_ok = True
    for B in (
        np.array([[1.0, 1.0], [0.0, 1.0]]),
        np.array([[2.0, 0.0], [0.0, 0.5]]),
        np.array([[2.0, 1.0], [1.0, 1.0]]),
    ):
        lhs, rhs = density_transform_check(LatticePoints(np.eye(2)), B, 100.0, 8)
        transform_ok &= abs(lhs - rhs) / rhs < 0.05
    grid_ok = all(
        omega_density_formula(ab, 1.0, nv) >= math.sqrt(2.0) - 1e-12
        for ab in np.linspace(0.05, 5.0, 20)
        for nv in range(2, 7)
    )
    ok = max(errs) < 0.05 and transform_ok and grid_ok
    _report(9, "density estimates, transform law, omega bound", ok,
            time.perf_counter() - t0, 10.0,
            f"component errs {max(errs):.3f} < 5%, transform ok {transform_ok}, "
            f"bound >= sqrt(2) on 100-point grid {grid_ok}")


def test_criterion_10_equidistribution():
    t0 = time.perf_counter()
    cell = SeparableLattice(1, 1)
    cov, disc4 = equidistribution_diagnostic((1.0, math.sqrt(2.0)), cell, GOLDEN, 10**4)
    _, disc2 = equidistribution_diagnostic((1.0, math.sqrt(2.0)), cell, GOLDEN, 10**2)
    cov_rat, _ = equidistribution_diagnostic((1.0, 0.0), cell, GOLDEN, 10**4)
    ok = cov < 0.05 and disc4 < disc2 and cov_rat > 0.1
    _report(10, "equidistribution diagnostic", ok, time.perf_counter() - t0, 2.0,
            f"covering {cov:.3f} < 0.05, discrepancy {disc4:.2e} < {disc2:.2e}, "
            f"rational control {cov_rat:.2f} > 0.1")


def test_criterion_11_order_finding():
    t0 = time.perf_counter()
    unit = Lattice2D(RationalMatrix2x2([[1, 0], [0, 1]]))
    fracs = [
        Fraction(p, q) for q in range(1, 21) for p in range(q) if math.gcd(p, q) == 1
    ]
    ns = np.arange(1, 421)
    ok, detail = True, f"{len(fracs) ** 2} pairs match the scan"
    for z1 in fracs:
        p1, q1 = z1.numerator, z1.denominator
        hit1 = (ns * p1) % q1 == 0
        for z2 in fracs:
            p2, q2 = z2.numerator, z2.denominator
            brute = int(ns[hit1 & ((ns * p2) % q2 == 0)][0])
            got = order_in_lattice((z1, z2), unit, 420)
            if got != brute:
                ok, detail = False, f"mismatch at ({z1}, {z2}): {got} vs {brute}"
                break
        if not ok:
            break
    _report(11, "exact order == brute-force scan (denominators <= 20)", ok,
            time.perf_counter() - t0, 1.0, detail)


def test_criterion_12_cli_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    args = [
        "criteria", "--L", "120", "--a", "12", "--b", "12",
        "--nu", "2", "--window", "gaussian",
    ]
    d1, d2 = tmp_path / "run1", tmp_path / "run2"
    code1 = cli_main(args + ["--output-dir", str(d1)])
    code2 = cli_main(args + ["--output-dir", str(d2)])
    capsys.readouterr()  # swallow the CLI stdout; the files are what we compare
    same = (d1 / "criteria_result.json").read_bytes() == (
        d2 / "criteria_result.json"
    ).read_bytes()
    same_csv = (d1 / "orthogonality_table.csv").read_bytes() == (
        d2 / "orthogonality_table.csv"
    ).read_bytes()
    ok = code1 == 0 and code2 == 0 and same and same_csv
    _report(12, "CLI determinism: byte-identical reruns", ok,
            time.perf_counter() - t0, 5.0,
            f"exit codes {code1},{code2}; JSON identical {same}; CSV identical {same_csv}")
