import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from besov_tree.params import SpaceParams
from besov_tree.boundary import (
    AlphaSequence,
    alpha_block_sum,
    alpha_energy,
    build_pyramid,
    double_integral_energy,
    dyadic_energy,
    indicator_fn,
    lip_constant_of_level_values,
    lipschitz_approximation,
    lp_norm,
    random_martingale_fn,
    random_sign_function,
    random_uniform_fn,
    read_boundary_fn,
    write_boundary_fn,
)
from besov_tree.suites import block_inequality_violation

LOG2 = math.log(2.0)
P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=1.0, p=1.0, depth=6)


def small_fn(K=2, N=3):
    return st.lists(
        st.floats(-8, 8, allow_nan=False, allow_infinity=False),
        min_size=K**N,
        max_size=K**N,
    ).map(lambda v: build_pyramid(v, K))


# ---------------------------------------------------------------------------
# pyramid


def test_pyramid_constant():
    f = build_pyramid([3.5] * 8, 2)
    for n in range(4):
        assert np.all(f.level(n) == 3.5)


def test_pyramid_two_cells():
    f = build_pyramid([1.0, 0.0], 2)
    assert f.mean == 0.5


def test_pyramid_wrong_length():
    with pytest.raises(ValueError):
        build_pyramid([1.0, 2.0, 3.0], 2)


@given(small_fn())
def test_pyramid_parent_is_child_mean(f):
    for n in range(f.depth):
        kids = f.level(n + 1).reshape(-1, 2).mean(axis=1)
        assert np.allclose(f.level(n), kids, rtol=0, atol=0)


@given(small_fn())
def test_pyramid_root_is_global_mean(f):
    direct = float(np.sum(f.values)) * 2.0 ** (-f.depth)
    assert f.mean == pytest.approx(direct, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------------------
# lp norm


def test_lp_norm_examples():
    f = build_pyramid([-2.0] * 16, 2)
    assert lp_norm(f, 3.0) == pytest.approx(2.0, rel=1e-13)
    g = indicator_fn(2, 4, 2, 1)
    assert lp_norm(g, 2.0) == pytest.approx(2.0 ** (-2 / 2.0), rel=1e-13)
    assert lp_norm(g, 1.0) == pytest.approx(0.25, rel=1e-13)
    with pytest.raises(ValueError):
        lp_norm(g, 0.5)


@given(small_fn())
def test_lp_norm_direct_oracle(f):
    direct = (sum(abs(float(v)) ** 2 for v in f.values) / 8.0) ** 0.5
    assert lp_norm(f, 2.0) == pytest.approx(direct, rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------------------
# level-sum energy


def test_dyadic_energy_constant_is_zero():
    f = build_pyramid([5.0] * 64, 2)
    assert dyadic_energy(f, P).total == 0.0


@pytest.mark.parametrize("N", [1, 3])
@pytest.mark.parametrize("p,theta", [(1.0, 0.0), (2.0, 0.5), (1.5, 0.3)])
def test_dyadic_energy_depth1_indicator(N, p, theta):
    # only level 1 contributes: two cells with nu = 1/2 and gaps 1/2
    PN = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=0.0, p=p, theta=theta, depth=N)
    f = indicator_fn(2, N, 1, 0)
    expect = math.exp(PN.eps * theta * p) * 2.0 ** (-p)
    assert dyadic_energy(f, PN).total == pytest.approx(expect, rel=1e-12)


def test_dyadic_energy_sign_example_levels():
    f = random_sign_function(1.0, 8)
    rep = dyadic_energy(f, P, theta=0.0, p=1.0, lam=1.0)
    for n, contrib in rep.per_level:
        assert contrib == pytest.approx(1.0 / n, abs=1e-12)
    assert rep.total == pytest.approx(sum(1.0 / n for n in range(1, 9)), abs=1e-11)


@given(small_fn(), st.sampled_from([0.5, 2.0, -1.5]))
def test_dyadic_energy_homogeneity(f, c):
    for p in (1.0, 2.0):
        a = dyadic_energy(f, P, theta=0.2, p=p, lam=1.0).total
        gs = build_pyramid(c * f.values, 2)
        b = dyadic_energy(gs, P, theta=0.2, p=p, lam=1.0).total
        assert b == pytest.approx(abs(c) ** p * a, rel=1e-12, abs=1e-12)


@given(small_fn(), small_fn())
def test_dyadic_energy_seminorm_triangle(f, g):
    p = 2.0
    fg = build_pyramid(f.values + g.values, 2)
    ef = dyadic_energy(f, P, theta=0.4, p=p, lam=0.0).total ** (1 / p)
    eg = dyadic_energy(g, P, theta=0.4, p=p, lam=0.0).total ** (1 / p)
    efg = dyadic_energy(fg, P, theta=0.4, p=p, lam=0.0).total ** (1 / p)
    assert efg <= ef + eg + 1e-10


@given(small_fn())
def test_energy_vanishes_iff_constant(f):
    e = dyadic_energy(f, P, theta=0.0, p=1.0, lam=0.0).total
    constant = np.all(f.values == f.values[0])
    assert (e == 0.0) == bool(constant)


def test_dyadic_energy_validation():
    f = build_pyramid([1.0, 0.0], 2)
    with pytest.raises(ValueError):
        dyadic_energy(f, P, theta=1.0)
    with pytest.raises(ValueError):
        dyadic_energy(f, P, p=0.9)


# ---------------------------------------------------------------------------
# sparse-level energy


def test_alpha_sequence_validation():
    with pytest.raises(ValueError):
        AlphaSequence(alpha=(0, 1), c0=2.0, c1=2.0)
    with pytest.raises(ValueError):
        AlphaSequence(alpha=(1, 2, 3), c0=2.0, c1=2.0)  # ratio 3/2 below c0
    with pytest.raises(ValueError):
        AlphaSequence(alpha=(1, 2), c0=1.0, c1=2.0)
    A = AlphaSequence.geometric(2, 16)
    assert A.alpha == (1, 2, 4, 8, 16)
    assert A.usable(12) == (1, 2, 4, 8)
    B = AlphaSequence.geometric(3, 10)
    assert B.alpha == (1, 3, 9)


def test_alpha_energy_constant_zero_and_lam_guard():
    f = build_pyramid([2.0] * 64, 2)
    A = AlphaSequence.geometric(2, 6)
    assert alpha_energy(f, A, 1.0).total == 0.0
    with pytest.raises(ValueError):
        alpha_energy(f, A, 0.0)


def test_alpha_energy_sign_example_cs_bound():
    lam = 1.0
    f = random_sign_function(lam, 8)
    A = AlphaSequence.geometric(2, 8)
    levels = A.usable(8)
    for prev, cur in zip(levels, levels[1:]):
        block = alpha_block_sum(f, cur, prev)
        cs = sum(1.0 / i ** (2 * lam + 2) for i in range(prev + 1, cur + 1)) ** 0.5
        assert block <= cs + 1e-12


@given(small_fn(K=2, N=4))
def test_block_inequality_constant_one(f):
    A = AlphaSequence.geometric(2, 4)
    assert block_inequality_violation(f, A) <= 1e-12


def test_sign_function_identities():
    lam = 1.5
    N = 7
    f = random_sign_function(lam, N)
    # level-n means are the partial sums of the leading digits
    v = f.level(3)
    idx = 5  # digits 1,0,1
    expect = -1.0 / 1 ** (lam + 1) + 1.0 / 2 ** (lam + 1) - 1.0 / 3 ** (lam + 1)
    assert v[idx] == pytest.approx(expect, abs=1e-14)
    # parent gaps are n^-(lam+1) exactly
    for n in range(1, N + 1):
        gaps = np.abs(f.level(n) - np.repeat(f.level(n - 1), 2))
        assert np.allclose(gaps, n ** -(lam + 1.0), rtol=0, atol=1e-13)
    # all values bounded by zeta(lam + 1)
    bound = sum(i ** -(lam + 1.0) for i in range(1, 10000))
    assert np.abs(f.values).max() <= bound
    with pytest.raises(ValueError):
        random_sign_function(0.0, 3)


# ---------------------------------------------------------------------------
# double-integral energy


def _brute_double_integral(f, Pb, theta, p):
    K, N = f.K, f.depth
    vals = f.values
    total = 0.0
    for i in range(K**N):
        di = [(i // K**(N - 1 - j)) % K for j in range(N)]
        for j in range(K**N):
            if i == j:
                continue
            dj = [(j // K**(N - 1 - t)) % K for t in range(N)]
            k = 0
            while di[k] == dj[k]:
                k += 1
            d = 2.0 / Pb.eps * math.exp(-Pb.eps * k)
            total += (
                K ** (-2 * N)
                * abs(vals[i] - vals[j]) ** p
                / (d ** (theta * p) * K ** (-k))
            )
    return total


@pytest.mark.parametrize("K,N", [(2, 3), (3, 2)])
@pytest.mark.parametrize("p", [1.0, 2.0, 1.5])
def test_double_integral_bruteforce_oracle(K, N, p):
    Pb = SpaceParams(K=K, eps=LOG2, beta=math.log(K) + LOG2, lam=0.0, depth=N)
    f = random_uniform_fn(K, N, np.random.default_rng(17))
    fast = double_integral_energy(f, Pb, theta=0.45, p=p).total
    slow = _brute_double_integral(f, Pb, 0.45, p)
    assert fast == pytest.approx(slow, rel=1e-12)


def test_double_integral_hand_value():
    P1 = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=0.0, p=1.0, theta=0.5, depth=1)
    f = build_pyramid([1.0, 0.0], 2)
    d = 2.0 / LOG2
    expect = 2 * (0.5 * 0.5) * 1.0 / (d**0.5 * 1.0)
    assert double_integral_energy(f, P1).total == pytest.approx(expect, rel=1e-14)


def test_double_integral_constant_and_validation():
    f = build_pyramid([4.0] * 8, 2)
    assert double_integral_energy(f, P, theta=0.5, p=1.0).total == 0.0
    with pytest.raises(ValueError):
        double_integral_energy(f, P, theta=0.0, p=1.0)


# ---------------------------------------------------------------------------
# Lipschitz approximation


def test_lipschitz_level0_is_constant():
    f = random_uniform_fn(2, 5, np.random.default_rng(0))
    g, lip = lipschitz_approximation(f, 0, 10.0, P)
    assert np.all(g.values == g.values[0])
    assert lip == 0.0


def test_lipschitz_projection_idempotent():
    base = indicator_fn(2, 6, 2, 1)
    g, _ = lipschitz_approximation(base, 2, 5.0, P)
    assert np.array_equal(g.values, base.values)
    g2, _ = lipschitz_approximation(base, 4, 5.0, P)
    assert np.array_equal(g2.values, base.values)


def test_lipschitz_error_convergence():
    # the alternating-sign function improves monotonically and hits zero
    f = random_sign_function(1.0, 7)
    Pf = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=1.0, p=1.0, depth=7)
    T = float(np.abs(f.values).max())
    errs = []
    for m in range(8):
        g, _ = lipschitz_approximation(f, m, T, Pf)
        errs.append(lp_norm(build_pyramid(f.values - g.values, 2), 1.0))
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    assert errs[-1] == 0.0
    # random data still converges to zero at full resolution
    h = random_uniform_fn(2, 6, np.random.default_rng(2))
    g, _ = lipschitz_approximation(h, 6, float(np.abs(h.values).max()), P)
    assert np.array_equal(g.values, h.values)


def test_lip_constant_two_cells():
    # cells (1, 0) at level 1 split at the root: LIP = 1 * (eps/2)
    lip = lip_constant_of_level_values(np.array([1.0, 0.0]), 2, LOG2)
    assert lip == pytest.approx(LOG2 / 2.0, rel=1e-14)


def test_lip_constant_bruteforce():
    rng = np.random.default_rng(3)
    for K, m in ((2, 4), (3, 3)):
        vals = rng.uniform(-2, 2, K**m)
        lip = lip_constant_of_level_values(vals, K, LOG2)
        worst = 0.0
        for i in range(K**m):
            di = [(i // K**(m - 1 - t)) % K for t in range(m)]
            for j in range(i + 1, K**m):
                dj = [(j // K**(m - 1 - t)) % K for t in range(m)]
                k = 0
                while di[k] == dj[k]:
                    k += 1
                d = 2.0 / LOG2 * math.exp(-LOG2 * k)
                worst = max(worst, abs(vals[i] - vals[j]) / d)
        assert lip == pytest.approx(worst, rel=1e-12)


def test_lipschitz_validation():
    f = build_pyramid([1.0, 0.0], 2)
    with pytest.raises(ValueError):
        lipschitz_approximation(f, 5, 1.0, P)
    with pytest.raises(ValueError):
        lipschitz_approximation(f, 0, 0.0, P)


# ---------------------------------------------------------------------------
# martingale family sanity and file format


def test_martingale_family_shape():
    f = random_martingale_fn(2, 5, 1.0, np.random.default_rng(1))
    assert f.depth == 5 and f.values.size == 32


@given(f=small_fn(K=2, N=3))
def test_boundary_file_roundtrip(tmp_path_factory, f):
    path = tmp_path_factory.mktemp("bf") / "f.txt"
    write_boundary_fn(f, path)
    g = read_boundary_fn(path)
    assert g.K == f.K and g.depth == f.depth
    assert np.array_equal(g.values, f.values)


def test_boundary_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2 2\n1.0 2.0\n")
    with pytest.raises(ValueError):
        read_boundary_fn(p)
    p.write_text("2\n")
    with pytest.raises(ValueError):
        read_boundary_fn(p)
