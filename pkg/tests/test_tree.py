import math

import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from besov_tree.params import SpaceParams
from besov_tree.tree import (
    EdgeRef,
    VertexPath,
    boundary_distance,
    dist_to_boundary,
    metric_distance,
    segment_length,
)

LOG2 = math.log(2.0)
P = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, lam=0.0, depth=12)
P3 = SpaceParams(K=3, eps=0.4, beta=math.log(3.0) + 0.3, lam=0.5, depth=8)


def digits_strategy(K, max_len):
    return st.lists(st.integers(0, K - 1), min_size=0, max_size=max_len).map(tuple)


def test_vertexpath_basics():
    r = VertexPath.root()
    assert r.depth == 0
    v = r.child(1).child(0)
    assert v.digits == (1, 0)
    assert v.parent().digits == (1,)
    assert v.ancestor(1) == v.parent()
    with pytest.raises(ValueError):
        r.parent()
    with pytest.raises(ValueError):
        EdgeRef(r)
    assert EdgeRef(v).level == 2


@given(digits_strategy(3, 6))
def test_index_roundtrip(digs):
    v = VertexPath(digs)
    idx = v.index(3)
    assert VertexPath.from_index(3, v.depth, idx) == v


def test_metric_examples():
    r = VertexPath.root()
    v = VertexPath((0,))
    assert metric_distance(r, v, P) == pytest.approx((1 - math.exp(-LOG2)) / LOG2, rel=1e-15)
    assert metric_distance(v, v, P) == 0.0
    deep = VertexPath((1,) * 12)
    # distance to a deep vertex approaches 1/eps; never exceeds diam/2 from root
    assert metric_distance(r, deep, P) == pytest.approx(1.0 / LOG2, rel=1e-3)
    assert metric_distance(r, deep, P) < 1.0 / LOG2
    # two deep branches approach diam X = 2/eps
    other = VertexPath((0,) * 12)
    d = metric_distance(deep, other, P)
    assert d < 2.0 / LOG2 and d == pytest.approx(2.0 / LOG2, rel=1e-3)


def test_vertex_validation():
    with pytest.raises(ValueError):
        metric_distance(VertexPath((0,) * 13), VertexPath.root(), P)
    with pytest.raises(ValueError):
        metric_distance(VertexPath((5,)), VertexPath.root(), P3)


@given(digits_strategy(2, 8), digits_strategy(2, 8), digits_strategy(2, 8))
def test_triangle_inequality(a, b, c):
    Ps = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, depth=8)
    x, y, z = VertexPath(a), VertexPath(b), VertexPath(c)
    dxy = metric_distance(x, y, Ps)
    assert dxy <= metric_distance(x, z, Ps) + metric_distance(z, y, Ps) + 1e-12 * (1 + dxy)
    assert dxy == pytest.approx(metric_distance(y, x, Ps), abs=0)


@given(digits_strategy(2, 8), digits_strategy(2, 8), st.data())
def test_geodesic_additivity(a, b, data):
    Ps = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, depth=8)
    x, y = VertexPath(a), VertexPath(b)
    k = x.common_prefix_len(y)
    # w runs along [x, meet] then [meet, y]
    chain = [x.ancestor(i) for i in range(x.depth, k - 1, -1)]
    chain += [y.ancestor(i) for i in range(k + 1, y.depth + 1)]
    w = data.draw(st.sampled_from(chain))
    lhs = metric_distance(x, y, Ps)
    rhs = metric_distance(x, w, Ps) + metric_distance(w, y, Ps)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_boundary_distance_examples():
    xi = VertexPath((0,) * 12)
    assert boundary_distance(xi, xi, P) == 0.0
    zeta = VertexPath((1,) + (0,) * 11)
    assert boundary_distance(xi, zeta, P) == pytest.approx(2.0 / LOG2, rel=1e-15)
    zeta2 = VertexPath((0, 0, 1) + (0,) * 9)
    assert boundary_distance(xi, zeta2, P) == pytest.approx(
        2.0 / LOG2 * math.exp(-LOG2 * 2), rel=1e-15
    )
    with pytest.raises(ValueError):
        boundary_distance(VertexPath((0,) * 3), VertexPath((0,) * 4), P)


@given(st.integers(0, 5), st.integers(6, 12))
def test_boundary_distance_is_proxy_limit(k, N):
    # proxies of depth N splitting at level k sit within 2 exp(-eps N)/eps
    # of the closed-form boundary distance
    Ps = SpaceParams(K=2, eps=LOG2, beta=2 * LOG2, depth=N)
    xi = VertexPath((0,) * N)
    zeta = VertexPath((0,) * k + (1,) + (0,) * (N - k - 1))
    dprox = metric_distance(xi, zeta, Ps)
    dlim = boundary_distance(xi, zeta, Ps)
    assert abs(dprox - dlim) <= 2.0 * math.exp(-LOG2 * N) / LOG2 + 1e-15


def test_dist_to_boundary_examples():
    r = VertexPath.root()
    assert dist_to_boundary(r, P) == pytest.approx(1.0 / LOG2, rel=1e-15)
    v = VertexPath((1, 0, 1))
    assert dist_to_boundary(v, P) == pytest.approx(1.0 / (8.0 * LOG2), rel=1e-15)
    # oracle: adaptive quadrature of the metric density tail
    tail, _ = quad(lambda t: math.exp(-LOG2 * t), 3, 200)
    assert dist_to_boundary(v, P) == pytest.approx(tail, rel=1e-10)


def test_segment_length_closed_form():
    assert segment_length(2.0, 2.0, LOG2) == 0.0
    assert segment_length(0.0, math.inf, LOG2) == pytest.approx(1 / LOG2, rel=1e-15)
    with pytest.raises(ValueError):
        segment_length(2.0, 1.0, LOG2)
