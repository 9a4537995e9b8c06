"""Extension operators from the boundary into the tree.

Three constructions:

* mean extension ("Whitney"): vertex value = cell mean at every level, affine
  along every edge.  Linear, and the trace returns the input exactly.
* sparse-level extension: cell means are read only on a sparse level sequence;
  the function is constant along descending geodesics between consecutive
  sparse levels except on the final edge, where it ramps to the next mean.
* layered extension ("Gagliardo type"): glue mean extensions of clamped dyadic
  averages across depth layers with piecewise-affine cutoffs in the distance
  to the boundary.  Bounded but deliberately non-linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import SpaceParams
from .boundary import (
    AlphaSequence,
    BoundaryFn,
    build_pyramid,
    lipschitz_approximation,
    lp_norm,
)
from .measures import level_integral
from .reporting import fmt
from .treefn import TreeFn, from_levels, newtonian_norm


class DepthTooSmallError(ValueError):
    """Raised when no admissible layer schedule fits within the truncation depth."""


def _check_compatible(f: BoundaryFn, P: SpaceParams) -> None:
    if f.K != P.K or f.depth != P.depth:
        raise ValueError(
            f"boundary function (K={f.K}, N={f.depth}) does not match params "
            f"(K={P.K}, N={P.depth})"
        )


def whitney_extend(f: BoundaryFn, P: SpaceParams) -> TreeFn:
    """Vertex values = cell means at every level; affine edges; linear in f."""
    _check_compatible(f, P)
    return TreeFn(K=f.K, depth=f.depth, levels=f.pyramid)


def alpha_extend(f: BoundaryFn, A: AlphaSequence, P: SpaceParams) -> TreeFn:
    """Means read at levels 0, alpha(0), alpha(1), ...; constant in between.

    Between consecutive sparse levels the value rides unchanged down each
    geodesic and jumps affinely on the final edge into the next sparse level,
    so the per-edge secant reproduces the intended gradient exactly (zero on
    interior edges).  Sparse levels beyond the truncation depth are dropped.
    """
    _check_compatible(f, P)
    active = {0} | set(A.usable(f.depth))
    levels: list[np.ndarray] = [f.level(0)]
    for n in range(1, f.depth + 1):
        if n in active:
            levels.append(f.level(n))
        else:
            levels.append(np.repeat(levels[-1], f.K))
    return from_levels(levels, f.K)


def alpha_gradient_l1_mass(f: BoundaryFn, A: AlphaSequence, P: SpaceParams) -> float:
    """Integral of the gradient magnitude of the sparse-level extension.

    Only the final edges into each usable sparse level carry gradient; the
    sum is taken on the truncated tree.
    """
    _check_compatible(f, P)
    from .treefn import edge_length

    total = 0.0
    prev = 0
    for lvl in A.usable(f.depth):
        d = edge_length(P, lvl)
        diff = np.abs(f.level(lvl) - np.repeat(f.level(prev), f.K ** (lvl - prev)))
        total += float(diff.sum()) / d * level_integral(P, lvl - 1)
        prev = lvl
    return total


# ---------------------------------------------------------------------------
# Layered extension


@dataclass(frozen=True)
class LayerSchedule:
    """Radii, cutoff levels and budgets of the layered extension stages.

    Stage 1 is the zero function; stage k >= 2 is the clamped level-m_k dyadic
    average of the data.  rho[k] is the stage radius (drawn from the grid
    {exp(-eps*n)/eps}), levels[k] its integer depth, and the budget is
    sum(rho_k * lip_k) which is kept below c_budget * |f|_p by construction.
    """

    rho: tuple[float, ...]
    levels: tuple[int, ...]
    lip_bounds: tuple[float, ...]
    lp_gaps: tuple[float, ...]
    stage_levels: tuple[int, ...]
    clamp: float
    budget: float
    c_budget: float
    fnorm: float

    def __post_init__(self):
        for a, b in zip(self.rho, self.rho[1:]):
            if not b <= a / 2.0 + 1e-15 * a:
                raise ValueError("stage radii must at least halve")
        for a, b in zip(self.levels, self.levels[1:]):
            if not a < b:
                raise ValueError("cutoff levels must strictly increase")
        if self.budget > self.c_budget * self.fnorm + 1e-12 * (1.0 + self.fnorm):
            raise ValueError("layer budget exceeds its cap")

    @property
    def stages(self) -> int:
        return len(self.rho)

    def csv_rows(self):
        rows = []
        for k in range(self.stages):
            rows.append(
                (k + 1, self.rho[k], self.levels[k], self.lip_bounds[k], self.lp_gaps[k])
            )
        return rows

    def to_csv_text(self) -> str:
        lines = ["k,rho_k,level,lip_bound,stage_lp_gap"]
        for row in self.csv_rows():
            lines.append(",".join(fmt(v) for v in row))
        lines.append(f"# budget = {fmt(self.budget)}")
        lines.append(f"# c_budget = {fmt(self.c_budget)}")
        lines.append(f"# fnorm = {fmt(self.fnorm)}")
        return "\n".join(lines) + "\n"


def _cutoff(level: int, rho_hi: float, rho_lo: float, P: SpaceParams) -> float:
    """The layer cutoff at integer depth `level`: 0 at depth of rho_hi, 1 at rho_lo."""
    dist = math.exp(-P.eps * level) / P.eps
    return min(max((rho_hi - dist) / (rho_hi - rho_lo), 0.0), 1.0)


def gagliardo_extend(f: BoundaryFn, P: SpaceParams, c_budget: float = 8.0):
    """Layered extension of boundary data; returns (tree function, schedule).

    Stages are clamped dyadic averages chosen so consecutive stage gaps decay
    like 2^(2-k) * |f|_p; radii are picked greedily from the admissible grid,
    each stage spending at most half the remaining Lipschitz budget.  Raises
    :class:`DepthTooSmallError` when the schedule cannot fit above depth N.
    """
    _check_compatible(f, P)
    K, N, p = f.K, f.depth, P.p
    fnorm = lp_norm(f, p)
    zero = build_pyramid(np.zeros(K**N), K)
    if fnorm == 0.0:
        schedule = LayerSchedule(
            rho=(1.0 / P.eps,),
            levels=(0,),
            lip_bounds=(0.0,),
            lp_gaps=(0.0,),
            stage_levels=(-1,),
            clamp=0.0,
            budget=0.0,
            c_budget=c_budget,
            fnorm=0.0,
        )
        return whitney_extend(zero, P), schedule

    clamp = float(np.abs(f.values).max())

    approx_cache: dict[int, tuple[BoundaryFn, float]] = {}

    def stage_at(m: int) -> tuple[BoundaryFn, float]:
        if m not in approx_cache:
            approx_cache[m] = lipschitz_approximation(f, m, clamp, P)
        return approx_cache[m]

    def err_at(m: int) -> float:
        g, _ = stage_at(m)
        gap = build_pyramid(f.values - g.values, K)
        return lp_norm(gap, p)

    # stage selection: strictly increasing averaging levels hitting the
    # geometric error thresholds 2^(1-k) |f|_p
    stage_levels = [-1]  # stage 1 is identically zero
    stage_fns = [zero]
    lips = [0.0]
    k = 2
    m_prev = -1
    while True:
        thresh = 2.0 ** (1 - k) * fnorm
        m = m_prev + 1
        while m < N and err_at(m) > thresh:
            m += 1
        g, lip = stage_at(m)
        stage_levels.append(m)
        stage_fns.append(g)
        lips.append(lip)
        m_prev = m
        if err_at(m) <= 1e-15 * fnorm:
            break
        k += 1

    gaps = [0.0]
    for j in range(1, len(stage_fns)):
        diff = build_pyramid(stage_fns[j].values - stage_fns[j - 1].values, K)
        gaps.append(lp_norm(diff, p))
    for j in range(1, len(gaps)):
        # consecutive-stage decay guaranteed by the threshold selection
        assert gaps[j] <= 2.0 ** (2 - j) * fnorm * (1.0 + 1e-9), (j, gaps[j], fnorm)

    # radius schedule: halving grid steps plus the Lipschitz budget
    hstep = max(1, math.ceil(math.log(2.0) / P.eps - 1e-12))
    cut_levels = [0]
    remaining = c_budget * fnorm
    budget = 0.0
    for j in range(1, len(stage_fns)):
        cap = remaining / 2.0
        n_req = cut_levels[-1] + hstep
        if lips[j] > 0.0:
            need = -math.log(P.eps * cap / lips[j]) / P.eps
            n_req = max(n_req, math.ceil(need - 1e-12))
        if n_req > N:
            raise DepthTooSmallError(
                f"depth too small for layer schedule: stage {j + 1} needs cutoff "
                f"level {n_req} > N={N} (lip={lips[j]:.3g}, cap={cap:.3g})"
            )
        cut_levels.append(n_req)
        spend = math.exp(-P.eps * n_req) / P.eps * lips[j]
        budget += spend
        remaining -= spend

    rho = tuple(math.exp(-P.eps * n) / P.eps for n in cut_levels)
    schedule = LayerSchedule(
        rho=rho,
        levels=tuple(cut_levels),
        lip_bounds=tuple(lips),
        lp_gaps=tuple(gaps),
        stage_levels=tuple(stage_levels),
        clamp=clamp,
        budget=budget,
        c_budget=c_budget,
        fnorm=fnorm,
    )

    # band assembly: between cutoff levels n_k and n_{k+1} blend stage k into
    # stage k+1 with the distance-to-boundary cutoff; below the last cutoff
    # the final stage rules alone.
    S = len(stage_fns)
    levels_out: list[np.ndarray] = []
    for lvl in range(N + 1):
        kband = 0
        while kband + 1 < S and cut_levels[kband + 1] <= lvl:
            kband += 1
        if kband == S - 1:
            levels_out.append(stage_fns[S - 1].level(lvl))
        else:
            psi = _cutoff(lvl, rho[kband], rho[kband + 1], P)
            levels_out.append(
                (1.0 - psi) * stage_fns[kband].level(lvl)
                + psi * stage_fns[kband + 1].level(lvl)
            )
    return from_levels(levels_out, K), schedule


# ---------------------------------------------------------------------------
# Decay checks for the mean extension below a given level


@dataclass(frozen=True)
class LayerCheckReport:
    lhs_lp: float
    rhs_lp: float
    lhs_grad: float
    rhs_grad: float
    lip: float

    @property
    def ratio_lp(self) -> float:
        return self.lhs_lp / self.rhs_lp if self.rhs_lp > 0 else math.inf

    @property
    def ratio_grad(self) -> float:
        return self.lhs_grad / self.rhs_grad if self.rhs_grad > 0 else (
            0.0 if self.lhs_grad == 0.0 else math.inf
        )


def lemma_layer_checks(f: BoundaryFn, n: int, P: SpaceParams) -> LayerCheckReport:
    """Integrals of the mean extension below depth n versus their decay bounds.

    Both integrals use the unweighted measure (lam = 0).  The comparison
    values are r_n^{(beta - log K)/eps} times |f|_p^p and LIP(f)^p
    respectively, with r_n = 2 exp(-eps*n)/eps.
    """
    if not 0 <= n <= f.depth:
        raise ValueError(f"n must lie in [0, {f.depth}]")
    from dataclasses import replace

    from .boundary import lip_constant_of_level_values

    _check_compatible(f, P)
    P0 = replace(P, lam=0.0, C=None)
    u = whitney_extend(f, P0)
    nn = newtonian_norm(u, P0)
    # edges with both endpoints at depth >= n are those into child levels >= n+1
    lhs_lp = math.fsum(nn.lp_pp_levels[n:])
    lhs_grad = math.fsum(nn.grad_pp_levels[n:])
    r_n = 2.0 * math.exp(-P.eps * n) / P.eps
    expo = (P.beta - math.log(P.K)) / P.eps
    lip = lip_constant_of_level_values(f.values, f.K, P.eps)
    rhs_lp = r_n**expo * lp_norm(f, P.p) ** P.p
    rhs_grad = r_n**expo * lip**P.p
    return LayerCheckReport(
        lhs_lp=lhs_lp, rhs_lp=rhs_lp, lhs_grad=lhs_grad, rhs_grad=rhs_grad, lip=lip
    )
