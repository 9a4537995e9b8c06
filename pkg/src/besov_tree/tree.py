"""Geometry of the truncated K-ary tree.

Vertices are base-K digit strings (the root is the empty string); a vertex of
depth n doubles as the index of a level-n cylinder on the boundary.  The
uniformized metric re-weights each unit edge by exp(-eps*t) in the graph
parameter t, so every edge integral has the closed form
(exp(-eps*a) - exp(-eps*b))/eps.  No quadrature is used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import SpaceParams


@dataclass(frozen=True)
class VertexPath:
    """A vertex as a digit string over {0, ..., K-1}; root is the empty tuple."""

    digits: tuple[int, ...] = ()

    @classmethod
    def root(cls) -> "VertexPath":
        return cls(())

    @classmethod
    def from_index(cls, K: int, level: int, index: int) -> "VertexPath":
        """Vertex at the given level with lexicographic index."""
        if not 0 <= index < K**level:
            raise ValueError(f"index {index} out of range for level {level}")
        digs = []
        for pos in range(level - 1, -1, -1):
            digs.append((index // K**pos) % K)
        return cls(tuple(digs))

    @property
    def depth(self) -> int:
        return len(self.digits)

    def parent(self) -> "VertexPath":
        if not self.digits:
            raise ValueError("root has no parent")
        return VertexPath(self.digits[:-1])

    def child(self, digit: int) -> "VertexPath":
        return VertexPath(self.digits + (digit,))

    def ancestor(self, level: int) -> "VertexPath":
        if not 0 <= level <= self.depth:
            raise ValueError(f"no ancestor at level {level}")
        return VertexPath(self.digits[:level])

    def index(self, K: int) -> int:
        idx = 0
        for d in self.digits:
            idx = idx * K + d
        return idx

    def common_prefix_len(self, other: "VertexPath") -> int:
        k = 0
        for a, b in zip(self.digits, other.digits):
            if a != b:
                break
            k += 1
        return k

    def is_ancestor_of(self, other: "VertexPath") -> bool:
        return other.digits[: self.depth] == self.digits


@dataclass(frozen=True)
class EdgeRef:
    """The edge [parent(child), child]; graph parameter runs over [level-1, level]."""

    child: VertexPath

    def __post_init__(self):
        if self.child.depth < 1:
            raise ValueError("an edge needs a non-root child vertex")

    @property
    def level(self) -> int:
        return self.child.depth


def validate_vertex(v: VertexPath, P: SpaceParams) -> None:
    if v.depth > P.depth:
        raise ValueError(f"vertex depth {v.depth} exceeds truncation depth {P.depth}")
    for d in v.digits:
        if not 0 <= d < P.K:
            raise ValueError(f"digit {d} out of range for K={P.K}")


def segment_length(a: float, b: float, eps: float) -> float:
    """Metric length of the ancestor-line segment between graph parameters a <= b."""
    if b < a:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if math.isinf(b):
        return math.exp(-eps * a) / eps
    return (math.exp(-eps * a) - math.exp(-eps * b)) / eps


def metric_distance(x: VertexPath, y: VertexPath, P: SpaceParams) -> float:
    """Uniformized distance between two vertices (exact, edgewise closed form)."""
    validate_vertex(x, P)
    validate_vertex(y, P)
    k = x.common_prefix_len(y)
    return segment_length(k, x.depth, P.eps) + segment_length(k, y.depth, P.eps)


def boundary_distance(xi: VertexPath, zeta: VertexPath, P: SpaceParams) -> float:
    """Visual-metric distance between two boundary proxies of equal depth.

    With k the length of the longest common prefix the distance is
    (2/eps) * exp(-eps*k);  identical proxies sit at distance 0 by the
    truncation convention.
    """
    if xi.depth != zeta.depth:
        raise ValueError(
            f"depth mismatch: {xi.depth} vs {zeta.depth} (boundary proxies must "
            "share their truncation depth)"
        )
    validate_vertex(xi, P)
    validate_vertex(zeta, P)
    if xi.digits == zeta.digits:
        return 0.0
    k = xi.common_prefix_len(zeta)
    return 2.0 / P.eps * math.exp(-P.eps * k)


def dist_to_boundary(x: VertexPath, P: SpaceParams) -> float:
    """Tail length of the ray below x: exp(-eps*|x|)/eps."""
    validate_vertex(x, P)
    return math.exp(-P.eps * x.depth) / P.eps


def split_distance(k: int, eps: float) -> float:
    """Boundary distance of two rays whose digits first differ after k steps."""
    return 2.0 / eps * math.exp(-eps * k)
