"""The weighted tree measure, ball measures, and the uniform boundary measure.

The tree carries the measure with density exp(-beta*t) * (t+C)^lam against the
graph parameter t on every edge.  Because beta > log K the full (infinite)
tree has finite measure, and downward-complete sets can be summed level by
level with a geometric remainder bound.  Ball measures are computed exactly
(up to quadrature tolerance) from the decomposition of a ball into a segment
of the ancestor line plus half-balls hanging off each ancestor; the "modeled"
columns are the closed-form comparison values whose ratios the test suites
track.

The boundary measure nu is fixed as the uniform Bernoulli measure,
nu(cylinder at level n) = K^-n exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .params import SpaceParams
from .tree import VertexPath, EdgeRef, segment_length, validate_vertex

_QUAD_EPSREL = 1e-12
_TAIL_REL = 1e-16


def weight_density(t: float, P: SpaceParams) -> float:
    return math.exp(-P.beta * t) * (t + P.C) ** P.lam


def weight_integral(a: float, b: float, P: SpaceParams) -> float:
    """Integral of exp(-beta*t)(t+C)^lam over [a, b] by adaptive quadrature.

    b = inf is allowed; the integrand decays like exp(-beta*t) so the
    improper integral converges for every lam.  Long finite windows are split
    at integer breakpoints: the integrand then spans few orders of magnitude
    per panel and the relative tolerance is honest on each.
    """
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    f = lambda t: math.exp(-P.beta * t) * (t + P.C) ** P.lam
    if math.isinf(b):
        val, _ = quad(f, a, np.inf, epsabs=1e-300, epsrel=_QUAD_EPSREL, limit=300)
        return val
    if b - a <= 2.0:
        val, _ = quad(f, a, b, epsabs=1e-300, epsrel=_QUAD_EPSREL, limit=300)
        return val
    cuts = [a] + [float(t) for t in range(math.ceil(a), math.floor(b) + 1) if a < t < b] + [b]
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        val, _ = quad(f, lo, hi, epsabs=1e-300, epsrel=_QUAD_EPSREL, limit=300)
        pieces.append(val)
    return math.fsum(pieces)


@lru_cache(maxsize=None)
def level_integral(P: SpaceParams, n: int) -> float:
    """Measure of a single edge in the band [n, n+1] (cached)."""
    return weight_integral(float(n), float(n + 1), P)


def edge_measure(e: EdgeRef, P: SpaceParams) -> float:
    """Measure of the edge into ``e.child``; equals level_integral at its band."""
    validate_vertex(e.child, P)
    return level_integral(P, e.level - 1)


@lru_cache(maxsize=None)
def subtree_measure(P: SpaceParams, depth: int) -> float:
    """Measure of the full infinite subtree below a vertex at the given depth.

    Level sums with a geometric remainder: the term ratio is bounded by
    K*exp(-beta) times a polynomial correction that tends to 1, so once the
    bound drops below 1 the tail is dominated by a geometric series.
    """
    q0 = P.K * math.exp(-P.beta)
    acc = 0.0
    j = 0
    while True:
        term = P.K ** (j + 1) * level_integral(P, depth + j)
        acc += term
        if P.lam > 0:
            grow = ((depth + j + 1 + P.C) / (depth + j + P.C)) ** P.lam
        else:
            grow = 1.0
        q = q0 * grow
        if q < 1.0 and term * q / (1.0 - q) <= _TAIL_REL * acc:
            return acc
        j += 1
        if j > 100_000:  # pragma: no cover - beta > log K guarantees termination
            raise RuntimeError("subtree measure did not converge")


def mu_total(P: SpaceParams) -> float:
    """Measure of the whole infinite tree."""
    return subtree_measure(P, 0)


def mu_truncated(P: SpaceParams, depth: int | None = None) -> float:
    """Measure of the tree truncated at the given depth (default P.depth)."""
    N = P.depth if depth is None else depth
    return math.fsum(P.K**n * level_integral(P, n - 1) for n in range(1, N + 1))


def mu_geodesic(z: VertexPath, x: VertexPath, P: SpaceParams) -> float:
    """Measure of the ancestor-line geodesic [z, x] (z must be an ancestor of x)."""
    if not z.is_ancestor_of(x):
        raise ValueError("first argument must be an ancestor of the second")
    return weight_integral(z.depth, x.depth, P)


@dataclass(frozen=True)
class MeasureEstimate:
    """An exactly computed measure next to its closed-form comparison value."""

    exact: float
    modeled: float

    @property
    def ratio(self) -> float:
        if self.modeled > 0.0:
            return self.exact / self.modeled
        return math.inf


@dataclass(frozen=True)
class BallSpec:
    center: VertexPath
    radius: float


def _half_ball_exact(depth: int, r: float, P: SpaceParams) -> float:
    """Exact measure of {y >= z : d(z, y) < r} for a vertex z at the given depth."""
    if r <= 0.0:
        return 0.0
    t = P.eps * r * math.exp(P.eps * depth)  # r / dist-to-boundary
    if t >= 1.0 - 1e-12:
        return subtree_measure(P, depth)
    rho = -math.log1p(-t) / P.eps
    jmax = int(math.floor(rho + 1e-15))
    acc = 0.0
    for j in range(jmax):
        acc += P.K ** (j + 1) * level_integral(P, depth + j)
    if rho - jmax > 1e-13:  # skip degenerate slivers at integer rho
        acc += P.K ** (jmax + 1) * weight_integral(depth + jmax, depth + rho, P)
    return acc


def half_ball_measure(z: VertexPath, r: float, P: SpaceParams) -> MeasureEstimate:
    """Downward half-ball measure, exact versus exp((eps-beta)|z|) r (|z|+C)^lam."""
    validate_vertex(z, P)
    if r <= 0.0:
        raise ValueError("radius must be positive")
    exact = _half_ball_exact(z.depth, r, P)
    modeled = math.exp((P.eps - P.beta) * z.depth) * r * (z.depth + P.C) ** P.lam
    return MeasureEstimate(exact=exact, modeled=modeled)


def _pivot_depth(depth_x: int, r: float, P: SpaceParams) -> float:
    """Depth of the shallowest point of the ancestor line inside B(x, r)."""
    return max(depth_x - math.log1p(P.eps * r * math.exp(P.eps * depth_x)) / P.eps, 0.0)


def _ball_modeled(depth_x: int, r: float, P: SpaceParams) -> float:
    if depth_x <= math.log(2.0) / P.eps:
        return r
    R0 = math.exp(-P.eps * depth_x) / P.eps
    if r <= R0:
        return math.exp((P.eps - P.beta) * depth_x) * r * (depth_x + P.C) ** P.lam
    z = _pivot_depth(depth_x, r, P)
    return r ** (P.beta / P.eps) * (z + P.C) ** P.lam


def ball_measure(b: BallSpec, P: SpaceParams) -> MeasureEstimate:
    """Exact measure of the metric ball B(center, radius) on the infinite tree.

    Decomposition: the part of the ancestor line within reach, the half-ball
    below the center, and for each proper ancestor the (K-1)/K share of the
    half-ball at the remaining radius (the share through the child leading
    back to the center is already accounted for).
    """
    x, r = b.center, b.radius
    validate_vertex(x, P)
    if not 0.0 < r <= 2.0 * P.diam:
        raise ValueError(f"radius must lie in (0, {2.0 * P.diam:.6g}], got {r}")
    a = x.depth
    exact = _half_ball_exact(a, r, P)
    exact += weight_integral(_pivot_depth(a, r, P), float(a), P)
    share = (P.K - 1) / P.K
    for j in range(1, a + 1):
        rem = r - segment_length(a - j, a, P.eps)
        if rem <= 0.0:
            break
        exact += share * _half_ball_exact(a - j, rem, P)
    return MeasureEstimate(exact=exact, modeled=_ball_modeled(a, r, P))


# ---------------------------------------------------------------------------
# Uniform boundary measure


def nu_cylinder(v: VertexPath, P: SpaceParams) -> float:
    """nu of the cylinder below v: exactly K^-|v|."""
    validate_vertex(v, P)
    return float(P.K) ** (-v.depth)


@lru_cache(maxsize=16)
def _digit_matrix(K: int, N: int) -> np.ndarray:
    idx = np.arange(K**N)
    digs = np.empty((K**N, N), dtype=np.int16)
    rem = idx.copy()
    for pos in range(N - 1, -1, -1):
        digs[:, pos] = rem % K
        rem //= K
    digs.setflags(write=False)
    return digs


def boundary_ball_nu_counting(xi: VertexPath, r: float, P: SpaceParams) -> float:
    """nu(B(xi, r)) by counting depth-|xi| cylinders inside the ball.

    Exact whenever r is at least the diameter of a single cell, i.e.
    r >= 2 exp(-eps*N)/eps, since then every cell lies entirely in or out.
    """
    N = xi.depth
    validate_vertex(xi, P)
    digs = _digit_matrix(P.K, N)
    own = np.asarray(xi.digits, dtype=np.int16)
    mism = digs != own[None, :]
    any_mism = mism.any(axis=1)
    split = np.where(any_mism, mism.argmax(axis=1), N)
    d = 2.0 / P.eps * np.exp(-P.eps * split)
    d[split == N] = 0.0
    return float(np.count_nonzero(d < r)) * float(P.K) ** (-N)


def boundary_ball_nu(r: float, P: SpaceParams, depth: int | None = None) -> float:
    """Closed form for nu(B(xi, r)): the cylinder at the coarsest split level
    strictly inside radius r (independent of the center xi)."""
    N = P.depth if depth is None else depth
    if r <= 0.0:
        raise ValueError("radius must be positive")
    k = math.floor(math.log(2.0 / (P.eps * r)) / P.eps) + 1
    k = min(max(k, 0), N)
    return float(P.K) ** (-k)


@dataclass(frozen=True)
class AhlforsResult:
    min_ratio: float
    max_ratio: float
    Q: float
    rows: tuple[tuple[int, float, float, float, float], ...]
    """Rows are (center_depth, radius, exact, modeled, ratio) with
    modeled = r^Q."""


def ahlfors_check(samples: int, P: SpaceParams, rng=None, depth: int | None = None) -> AhlforsResult:
    """Sample boundary balls and return the range of nu(B)/r^Q.

    Radii are drawn log-uniformly from [2 exp(-eps*N)/eps, diam], the window
    on which cylinder counting is exact at truncation depth N.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    N = P.depth if depth is None else depth
    rng = np.random.default_rng(0) if rng is None else rng
    r_lo = 2.0 * math.exp(-P.eps * N) / P.eps
    r_hi = P.diam
    rows = []
    lo, hi = math.inf, -math.inf
    for _ in range(samples):
        xi = VertexPath(tuple(int(d) for d in rng.integers(0, P.K, size=N)))
        u = rng.uniform()
        r = r_lo * (r_hi / r_lo) ** u
        nu = boundary_ball_nu_counting(xi, r, P)
        modeled = r**P.Q
        ratio = nu / modeled
        lo = min(lo, ratio)
        hi = max(hi, ratio)
        rows.append((N, r, nu, modeled, ratio))
    return AhlforsResult(min_ratio=lo, max_ratio=hi, Q=P.Q, rows=tuple(rows))


def doubling_scan(samples: int, P: SpaceParams, rng=None, depth: int | None = None):
    """Sample (center, radius) pairs and measure mu(B(x,2r))/mu(B(x,r)).

    Returns (rows, max_doubling_ratio); rows carry one line per ball,
    (center_depth, radius, exact, modeled, ratio), radii r and 2r paired in
    consecutive rows.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    N = P.depth if depth is None else depth
    rng = np.random.default_rng(0) if rng is None else rng
    r_lo = 0.5 * math.exp(-P.eps * N) / P.eps
    r_hi = P.diam
    rows = []
    worst = 1.0
    for _ in range(samples):
        d = int(rng.integers(0, N + 1))
        x = VertexPath(tuple(int(t) for t in rng.integers(0, P.K, size=d)))
        u = rng.uniform()
        r = r_lo * (r_hi / r_lo) ** u
        m1 = ball_measure(BallSpec(x, r), P)
        m2 = ball_measure(BallSpec(x, 2.0 * r), P)
        rows.append((d, r, m1.exact, m1.modeled, m1.ratio))
        rows.append((d, 2.0 * r, m2.exact, m2.modeled, m2.ratio))
        worst = max(worst, m2.exact / m1.exact)
    return rows, worst
