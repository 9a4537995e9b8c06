"""Acceptance criteria, one test per criterion, at their declared tolerances.

Each test prints a single PASS line when it completes; pinned constants live
next to the criterion they gate.  Run with `pytest -v` (or `-s` to see the
lines inline).
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from besov_tree.params import SpaceParams
from besov_tree.boundary import (
    AlphaSequence,
    alpha_block_sum,
    build_pyramid,
    dyadic_energy,
    random_sign_function,
    random_uniform_fn,
    read_boundary_fn,
    write_boundary_fn,
)
from besov_tree.extension import whitney_extend
from besov_tree.measures import ahlfors_check, doubling_scan, weight_integral
from besov_tree.suites import (
    ExperimentConfig,
    alpha_extension_scan,
    block_inequality_violation,
    cstar_of,
    emit_report,
    exam_strict_rows,
    extension_energy_scan,
    gagliardo_scan,
    interval_drift,
    log_example_rows,
    nonlinearity_witness,
    norm_equiv_scan,
    run_suite,
)
from besov_tree.treefn import read_treefn, trace, write_treefn, random_treefn

LOG2 = math.log(2.0)


def _report(k, detail):
    print(f"ACCEPTANCE {k}: PASS — {detail}")


def test_criterion_1_round_trip_exactness():
    P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=1.0, p=1.0, depth=12)
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        f = random_uniform_fn(2, 12, rng)
        g = trace(whitney_extend(f, P))
        worst = max(worst, float(np.abs(g.values - f.values).max()))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-12, f"round-trip error {worst}"
    assert elapsed < 10.0, f"round-trip runtime {elapsed:.2f}s"
    _report(1, f"max err {worst:.1e}, {elapsed:.2f}s for 200 functions")


def test_criterion_2_alternating_sign_identities():
    lam, N = 1.0, 16
    f = random_sign_function(lam, N)
    # per-level inner sums equal n^-2 exactly
    worst = 0.0
    for n in range(1, N + 1):
        inner = alpha_block_sum(f, n, n - 1)
        worst = max(worst, abs(inner - 1.0 / n**2))
    assert worst <= 1e-12, f"level sums off by {worst}"
    # truncated theta=0, p=1, lam=1 energy equals H_16 (independent oracle)
    P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=lam, p=1.0, depth=N)
    rep = dyadic_energy(f, P, theta=0.0, p=1.0, lam=lam)
    H16 = float(sum(Fraction(1, n) for n in range(1, N + 1)))
    assert abs(H16 - 3.3807289932289932) < 1e-12
    assert abs(rep.total - H16) <= 1e-9, f"energy {rep.total} vs H16 {H16}"
    # every level contributes at least 1/n (divergence of the dense energy)
    assert all(c >= 1.0 / n - 1e-12 for n, c in rep.per_level)
    # sparse blocks obey the quadratic-mean bound and the geometric tail
    A = AlphaSequence.geometric(2, N)
    levels = A.usable(N)
    for n, (prev, cur) in enumerate(zip(levels, levels[1:]), start=1):
        block = alpha_block_sum(f, cur, prev)
        cs = math.fsum(1.0 / i ** (2 * lam + 2) for i in range(prev + 1, cur + 1)) ** 0.5
        assert block <= cs + 1e-12, f"block {cur}: {block} > {cs}"
        term = float(cur) ** lam * block
        geo = 2.0**lam * 2.0 ** ((1.0 - n) / 2.0)
        assert term <= geo + 1e-12, f"term {cur}: {term} > {geo}"
    _report(2, f"H16 = {H16:.10f} matched to {abs(rep.total - H16):.1e}")


def test_criterion_3_block_inequality_constant_one():
    N = 12
    A = AlphaSequence.geometric(2, N)
    rng = np.random.default_rng(77)
    worst = -math.inf
    for _ in range(200):
        f = random_uniform_fn(2, N, rng)
        worst = max(worst, block_inequality_violation(f, A))
    assert worst <= 1e-12, f"block inequality violated by {worst}"
    _report(3, f"worst excess {worst:.2e} over 200 functions")


def test_criterion_4_extension_energy_comparability():
    cases = {
        "borderline p=1": SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=1.0, p=1.0, depth=12),
        "theta=0.75 p=2": SpaceParams(K=2, eps=LOG2, beta=1.5 * LOG2, lam=1.0, p=2.0, depth=12),
    }
    details = []
    for name, P in cases.items():
        rows, per_depth = extension_energy_scan(P, (10, 12), seed=41)
        assert rows, "no ratio cases generated"
        cstar = cstar_of(per_depth)
        drift = interval_drift(per_depth)
        assert cstar <= 50.0, f"{name}: C* = {cstar}"
        assert drift < 0.25, f"{name}: interval drift {drift}"
        details.append(f"{name}: C*={cstar:.2f}, drift={drift:.1%}")
    _report(4, "; ".join(details))


def test_criterion_5_double_integral_comparability():
    P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=0.0, p=1.0, depth=12)
    rows, per_combo = norm_equiv_scan(
        P, thetas=(0.3, 0.5, 0.7), ps=(1.0, 2.0), depths=(8, 10, 12), samples=100, seed=5
    )
    assert rows
    worst_spread = 0.0
    worst_drift = 0.0
    for combo, per_depth in per_combo.items():
        lo = min(v[0] for v in per_depth.values())
        hi = max(v[1] for v in per_depth.values())
        worst_spread = max(worst_spread, hi / lo)
        worst_drift = max(worst_drift, interval_drift(per_depth))
        assert hi / lo <= 50.0, f"combo {combo}: spread {hi / lo}"
        assert interval_drift(per_depth) < 0.25, f"combo {combo}: drift"
    _report(5, f"worst spread {worst_spread:.2f}, worst drift {worst_drift:.1%}")


def test_criterion_6_doubling_and_ahlfors():
    P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=1.0, depth=12)
    D_PIN, A_PIN = 8.0, 8.0
    rng = np.random.default_rng(66)
    worst_doubling = 1.0
    for N in (10, 12):
        rows, worst = doubling_scan(500, P, rng, depth=N)
        assert all(r[2] > 0 for r in rows)
        worst_doubling = max(worst_doubling, worst)
    assert 1.0 <= worst_doubling <= D_PIN, f"doubling {worst_doubling}"
    lo, hi = math.inf, -math.inf
    for N in (10, 12):
        res = ahlfors_check(500, P, rng, depth=N)
        lo, hi = min(lo, res.min_ratio), max(hi, res.max_ratio)
    assert 1.0 / A_PIN <= lo and hi <= A_PIN, f"ahlfors [{lo}, {hi}]"
    assert P.Q == 1.0  # exact for K = 2, eps = log 2
    _report(6, f"doubling <= {worst_doubling:.3f} (pin {D_PIN}), "
               f"ahlfors in [{lo:.3f}, {hi:.3f}] (pin {A_PIN}), Q = 1 exactly")


def test_criterion_7_log_example_divergence():
    P = SpaceParams(K=2, eps=LOG2, beta=3 * LOG2, lam=0.75, p=2.0, depth=12)
    rows, info = log_example_rows(P, (8, 12))
    emp, ref, trace_12, _ = info[12]
    assert emp <= 1.2 * ref, f"gradient tail {emp} vs 1.2 * {ref}"
    assert trace_12 == pytest.approx(math.log(13.0), rel=1e-14)
    assert trace_12 > 2.5
    trace_8 = info[8][2]
    assert trace_12 > trace_8  # grows with depth
    _report(7, f"tail {emp:.3f} <= 1.2*{ref:.3f}, trace {trace_12:.4f} > 2.5")


def test_criterion_8_layered_extension():
    P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=0.0, p=1.0, depth=16)
    NORM_PIN = 20.0
    rng = np.random.default_rng(99)
    rows, worst_ratio, trace_err, failures = gagliardo_scan(P, 100, rng)
    assert len(rows) == 100
    assert failures == 0, f"{failures} schedule failures"
    assert trace_err <= 1e-15, f"trace mismatch {trace_err}"
    assert worst_ratio <= NORM_PIN, f"norm ratio {worst_ratio}"
    defect, label = nonlinearity_witness(P, rng)
    assert defect > 1e-8, "no nonlinearity witness found"
    _report(8, f"100 schedules, norm ratio <= {worst_ratio:.2f} (pin {NORM_PIN}), "
               f"nonlinear defect {defect:.2e} ({label})")


def test_criterion_9_sparse_extension_bound():
    P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=1.0, p=1.0, depth=16)
    RATIO_PIN, SEQ_PIN = 20.0, 10.0
    rows, per_depth, (c_lo, c_hi) = alpha_extension_scan(P, (8, 12, 16), seed=13)
    assert rows
    worst = max(per_depth.values())
    assert worst <= RATIO_PIN, f"gradient-mass ratio {worst}"
    drift = interval_drift({d: (w, w) for d, w in per_depth.items()})
    assert drift < 0.25, f"ratio drift across depths {drift}"
    assert 1.0 / SEQ_PIN <= c_lo and c_hi <= SEQ_PIN, f"seq equivalence [{c_lo}, {c_hi}]"
    _report(9, f"mass ratio <= {worst:.2f} (pin {RATIO_PIN}), drift {drift:.1%}, "
               f"base-2/base-3 energies in [{c_lo:.2f}, {c_hi:.2f}] (pin {SEQ_PIN})")


def test_criterion_10_infrastructure(tmp_path):
    # (a) identical seeds give byte-identical CSV reports
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report(run_suite(ExperimentConfig(suite="ahlfors", samples=25, seed=3)), a)
    emit_report(run_suite(ExperimentConfig(suite="ahlfors", samples=25, seed=3)), b)
    assert a.read_bytes() == b.read_bytes()
    # (b) boundary / tree function files round-trip losslessly
    rng = np.random.default_rng(1)
    f = build_pyramid(rng.normal(scale=1e3, size=2**8) * 10.0 ** rng.integers(-8, 8, 2**8), 2)
    fp = tmp_path / "f.txt"
    write_boundary_fn(f, fp)
    assert np.array_equal(read_boundary_fn(fp).values, f.values)
    u = random_treefn(2, 6, rng)
    up = tmp_path / "u.txt"
    write_treefn(u, up)
    v = read_treefn(up)
    assert all(np.array_equal(v.level(n), u.level(n)) for n in range(7))
    # (c) quadrature agrees with the lam = 0 closed forms to 1e-12 relative
    worst = 0.0
    for beta in (1.5 * LOG2, 2 * LOG2, 3.0):
        P0 = SpaceParams(K=2, eps=LOG2, beta=beta, lam=0.0, depth=4)
        for aa, bb in ((0.0, 1.0), (2.0, 2.75), (5.0, 9.0), (0.3, 0.31)):
            closed = (math.exp(-beta * aa) - math.exp(-beta * bb)) / beta
            got = weight_integral(aa, bb, P0)
            worst = max(worst, abs(got - closed) / closed)
    assert worst <= 1e-12, f"quadrature self-check {worst}"
    _report(10, f"byte-identical reports, lossless files, quad self-check {worst:.1e}")
