"""Boundary functions and dyadic energies.

A boundary function at truncation depth N is piecewise constant on the K^N
level-N cylinders.  Its mean pyramid (cell means at every coarser level) is
exact because the boundary measure is uniform: a parent mean is the plain
arithmetic mean of its K children.

Three energies live here:

* the level-weighted parent/child energy with weights exp(eps*n*theta*p) * n^lam,
* the sparse-level variant that jumps between levels alpha(n-1) -> alpha(n),
* the discretized double-integral seminorm over pairs of level-N cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import SpaceParams
from .reporting import EnergyReport, fmt


@dataclass(frozen=True)
class BoundaryFn:
    """Cell values on level-N cylinders plus the full mean pyramid."""

    K: int
    depth: int
    pyramid: tuple[np.ndarray, ...]

    @property
    def values(self) -> np.ndarray:
        return self.pyramid[self.depth]

    def level(self, n: int) -> np.ndarray:
        return self.pyramid[n]

    @property
    def mean(self) -> float:
        return float(self.pyramid[0][0])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def build_pyramid(values, K: int) -> BoundaryFn:
    """Bottom-up averaging of K^N cell values; O(K^N)."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("values must be a nonempty 1-d array")
    N = round(math.log(arr.size) / math.log(K))
    if K**N != arr.size:
        raise ValueError(f"length {arr.size} is not a power of K={K}")
    levels: list[np.ndarray] = [None] * (N + 1)
    levels[N] = _freeze(arr)
    for n in range(N - 1, -1, -1):
        levels[n] = _freeze(levels[n + 1].reshape(-1, K).mean(axis=1))
    return BoundaryFn(K=K, depth=N, pyramid=tuple(levels))


def lp_norm(f: BoundaryFn, p: float) -> float:
    """L^p norm against the uniform boundary measure."""
    if p < 1.0:
        raise ValueError("p must be >= 1")
    vals = f.values
    nu = float(f.K) ** (-f.depth)
    return float((nu * np.abs(vals) ** p).sum() ** (1.0 / p))


def _repeat(parent: np.ndarray, K: int) -> np.ndarray:
    return np.repeat(parent, K)


def dyadic_energy(
    f: BoundaryFn,
    P: SpaceParams,
    *,
    theta: float | None = None,
    p: float | None = None,
    lam: float | None = None,
) -> EnergyReport:
    """Level-weighted parent/child energy.

    total = sum over n of exp(eps*n*theta*p) * n^lam * sum over level-n cells
    of nu(cell) * |mean - parent mean|^p.  Keyword overrides allow sweeping
    exponents without rebuilding params.
    """
    theta = P.theta if theta is None else theta
    p = P.p if p is None else p
    lam = P.lam if lam is None else lam
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"theta must lie in [0, 1), got {theta}")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    per_level = []
    for n in range(1, f.depth + 1):
        diff = np.abs(f.level(n) - _repeat(f.level(n - 1), f.K))
        inner = float(f.K) ** (-n) * float((diff**p).sum())
        weight = math.exp(P.eps * n * theta * p) * n**lam
        per_level.append((n, weight * inner))
    total = math.fsum(c for _, c in per_level)
    return EnergyReport(per_level=tuple(per_level), total=total, params=P)


@dataclass(frozen=True)
class AlphaSequence:
    """A sparse level sequence alpha(0) < alpha(1) < ... with bounded ratios."""

    alpha: tuple[int, ...]
    c0: float
    c1: float

    def __post_init__(self):
        if len(self.alpha) < 1 or self.alpha[0] < 1:
            raise ValueError("need alpha(0) >= 1")
        if not 1.0 < self.c0 <= self.c1:
            raise ValueError("need 1 < c0 <= c1")
        for a, b in zip(self.alpha, self.alpha[1:]):
            if not (a < b):
                raise ValueError("alpha must be strictly increasing")
            ratio = b / a
            if not (self.c0 - 1e-12 <= ratio <= self.c1 + 1e-12):
                raise ValueError(
                    f"ratio alpha(n+1)/alpha(n) = {ratio} outside [{self.c0}, {self.c1}]"
                )

    @classmethod
    def geometric(cls, base: int, max_level: int) -> "AlphaSequence":
        """alpha(n) = base^n, listed up to max_level."""
        if base < 2:
            raise ValueError("base must be >= 2")
        terms = []
        val = 1
        while val <= max_level:
            terms.append(val)
            val *= base
        if not terms:
            raise ValueError("max_level too small for any usable term")
        return cls(alpha=tuple(terms), c0=float(base), c1=float(base))

    def usable(self, depth: int) -> tuple[int, ...]:
        return tuple(a for a in self.alpha if a <= depth)


def default_alpha(max_level: int) -> AlphaSequence:
    return AlphaSequence.geometric(2, max_level)


def alpha_energy(f: BoundaryFn, A: AlphaSequence, lam: float) -> EnergyReport:
    """Sparse-level energy: blocks jump from level alpha(n-1) to alpha(n).

    total = sum over usable n >= 1 of alpha(n)^lam * sum over level-alpha(n)
    cells of nu(cell) * |mean - ancestor mean at level alpha(n-1)|.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive for the sparse-level energy")
    levels = A.usable(f.depth)
    per_level = []
    for prev, cur in zip(levels, levels[1:]):
        diff = np.abs(f.level(cur) - np.repeat(f.level(prev), f.K ** (cur - prev)))
        inner = float(f.K) ** (-cur) * float(diff.sum())
        per_level.append((cur, cur**lam * inner))
    total = math.fsum(c for _, c in per_level)
    return EnergyReport(per_level=tuple(per_level), total=total, params=None)


def alpha_block_sum(f: BoundaryFn, level: int, ancestor_level: int) -> float:
    """sum over level cells of nu * |mean - ancestor mean| (no level weight)."""
    diff = np.abs(
        f.level(level) - np.repeat(f.level(ancestor_level), f.K ** (level - ancestor_level))
    )
    return float(f.K) ** (-level) * float(diff.sum())


# ---------------------------------------------------------------------------
# Double-integral seminorm over pairs of level-N cells


def _pair_power_sums(values: np.ndarray, K: int, N: int, p: float) -> list[float]:
    """S_k = sum over level-k cells of the ordered pairwise |v_i - v_j|^p sum
    among the leaves below the cell, for k = 0..N."""
    M = values.size
    out = []
    for k in range(N + 1):
        m = K ** (N - k)
        groups = values.reshape(-1, m)
        if m == 1:
            out.append(0.0)
        elif p == 2.0:
            s1 = groups.sum(axis=1)
            s2 = (groups**2).sum(axis=1)
            out.append(float((2.0 * m * s2 - 2.0 * s1**2).sum()))
        elif p == 1.0:
            srt = np.sort(groups, axis=1)
            coef = 2.0 * (2.0 * np.arange(m) - (m - 1))
            out.append(float(np.einsum("ij,j->", srt, coef)))
        else:
            if M * m > 1 << 24:
                raise ValueError(
                    "generic p is only supported for K^N * K^(N-k) <= 2^24; "
                    "use p in {1, 2} at this depth"
                )
            acc = 0.0
            for g in groups:
                acc += float((np.abs(g[:, None] - g[None, :]) ** p).sum())
            out.append(acc)
    return out


def double_integral_energy(
    f: BoundaryFn,
    P: SpaceParams,
    *,
    theta: float | None = None,
    p: float | None = None,
) -> EnergyReport:
    """Discretized double-integral seminorm (p-th power).

    All mass of a level-N cell sits at its cell mean; a pair of distinct
    cells splitting at level k contributes
    nu^2 * |v_i - v_j|^p / (d_k^{theta p} * K^-k) with d_k the visual distance
    at split level k.  Diagonal pairs contribute 0.  Per-level rows are
    indexed by the split level.
    """
    theta = P.theta if theta is None else theta
    p = P.p if p is None else p
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    K, N = f.K, f.depth
    S = _pair_power_sums(f.values, K, N, float(p))
    nu_sq = float(K) ** (-2 * N)
    per_level = []
    for k in range(N):
        d_k = 2.0 / P.eps * math.exp(-P.eps * k)
        weight = nu_sq * float(K) ** k / d_k ** (theta * p)
        per_level.append((k, weight * (S[k] - S[k + 1])))
    total = math.fsum(c for _, c in per_level)
    return EnergyReport(per_level=tuple(per_level), total=total, params=P)


# ---------------------------------------------------------------------------
# Named functions and approximation


def random_sign_function(lam: float, depth: int, seed: int = 0) -> BoundaryFn:
    """The binary-tree test function with cell values sum_i (-1)^digit_i / i^(lam+1).

    Deterministic given the digits; the seed argument is reserved for other
    randomized test-function generators and is unused here.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    N = depth
    idx = np.arange(2**N, dtype=np.int64)
    vals = np.zeros(2**N)
    for i in range(1, N + 1):
        bit = (idx >> (N - i)) & 1
        vals += (1.0 - 2.0 * bit) / float(i) ** (lam + 1.0)
    return build_pyramid(vals, 2)


def lip_constant_of_level_values(values: np.ndarray, K: int, eps: float) -> float:
    """Exact Lipschitz constant (visual metric) of a level-m cell-constant function.

    For cells splitting exactly at level l every representative pair sits at
    the same distance (2/eps) exp(-eps*l), so the supremum is a finite max
    over split levels of the largest cross-child spread.
    """
    m = round(math.log(values.size) / math.log(K))
    if K**m != values.size:
        raise ValueError("values length must be a power of K")
    if m == 0:
        return 0.0
    lip = 0.0
    mx = values.astype(float)
    mn = values.astype(float)
    for lvl in range(m - 1, -1, -1):
        gmx = mx.reshape(-1, K)
        gmn = mn.reshape(-1, K)
        spread = 0.0
        for c in range(K):
            others_min = np.min(np.delete(gmn, c, axis=1), axis=1)
            spread = max(spread, float((gmx[:, c] - others_min).max()))
        lip = max(lip, spread * (eps / 2.0) * math.exp(eps * lvl))
        mx = gmx.max(axis=1)
        mn = gmn.min(axis=1)
    return lip


def lipschitz_approximation(f: BoundaryFn, level: int, T: float, P: SpaceParams):
    """Level-`level` dyadic average of f clamped to [-T, T], re-expanded to depth N.

    Returns the approximation together with its exact Lipschitz constant with
    respect to the visual metric of P.
    """
    if not 0 <= level <= f.depth:
        raise ValueError(f"level must lie in [0, {f.depth}]")
    if T <= 0.0:
        raise ValueError("T must be positive")
    clamped = np.clip(f.values, -T, T)
    means = build_pyramid(clamped, f.K).level(level)
    leaves = np.repeat(means, f.K ** (f.depth - level))
    g = build_pyramid(leaves, f.K)
    lip = lip_constant_of_level_values(means, f.K, P.eps)
    return g, lip


# ---------------------------------------------------------------------------
# Random test-function families


def random_uniform_fn(K: int, depth: int, rng) -> BoundaryFn:
    """Independent uniform [0, 1) cell values."""
    return build_pyramid(rng.uniform(0.0, 1.0, size=K**depth), K)


def random_martingale_fn(K: int, depth: int, s: float, rng) -> BoundaryFn:
    """Dyadic martingale with level-n increments scaled by n^-s."""
    vals = np.full(1, rng.uniform(-1.0, 1.0))
    for n in range(1, depth + 1):
        vals = np.repeat(vals, K) + float(n) ** (-s) * rng.uniform(-1.0, 1.0, size=K**n)
    return build_pyramid(vals, K)


def indicator_fn(K: int, depth: int, level: int, index: int) -> BoundaryFn:
    """Indicator of a single level-`level` cylinder."""
    if not 1 <= level <= depth:
        raise ValueError("level must lie in [1, depth]")
    vals = np.zeros(K**depth)
    span = K ** (depth - level)
    vals[index * span : (index + 1) * span] = 1.0
    return build_pyramid(vals, K)


# ---------------------------------------------------------------------------
# Text file format: "K N" header line, then K^N values in lexicographic order


def write_boundary_fn(f: BoundaryFn, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"{f.K} {f.depth}\n")
            vals = f.values
            for start in range(0, vals.size, 16):
                fh.write(" ".join(fmt(float(v)) for v in vals[start : start + 16]))
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write boundary function to {path}: {exc}") from exc


def read_boundary_fn(path) -> BoundaryFn:
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: expected 'K N' header")
    K, N = int(tokens[0]), int(tokens[1])
    vals = [float(t) for t in tokens[2:]]
    if len(vals) != K**N:
        raise ValueError(f"{path}: expected {K**N} values, found {len(vals)}")
    return build_pyramid(vals, K)
