"""Parameter bundle for the weighted K-ary tree and its Cantor boundary.

Everything downstream (metric, measures, energies, operators) is driven by a
single immutable :class:`SpaceParams`.  The branching number ``K``, the metric
decay ``eps`` and the measure decay ``beta`` must satisfy ``K >= 2``,
``eps > 0`` and ``beta > log K``; otherwise the tree measure is not finite /
doubling and nothing below makes sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def c_lower_bound(K: int, eps: float, beta: float, lam: float) -> float:
    """Smallest admissible weight-shift constant for the given exponents."""
    return max(2.0 * abs(lam) / (beta - math.log(K)), 2.0 * math.log(4.0) / eps)


@dataclass(frozen=True)
class SpaceParams:
    """Exponents and truncation depth of the weighted tree model.

    ``C is None`` resolves to :func:`c_lower_bound` (the smallest value for
    which the comparison estimates hold);  explicit values below that bound
    are rejected.  ``theta is None`` resolves to the smoothness forced by the
    other exponents, ``1 - (beta - log K)/(eps*p)``, clamped to 0 when the
    integrability exponent sits below the borderline.
    """

    K: int
    eps: float
    beta: float
    lam: float = 0.0
    C: float | None = None
    p: float = 1.0
    theta: float | None = None
    depth: int = 12

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 2:
            raise ValueError(f"K must be an integer >= 2, got {self.K!r}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.beta > math.log(self.K):
            raise ValueError(
                f"beta must exceed log K = {math.log(self.K):.6g}, got {self.beta}"
            )
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not (isinstance(self.depth, int) and self.depth >= 1):
            raise ValueError(f"depth must be an integer >= 1, got {self.depth!r}")
        bound = c_lower_bound(self.K, self.eps, self.beta, self.lam)
        if self.C is None:
            object.__setattr__(self, "C", bound)
        elif self.C < bound * (1.0 - 1e-12):
            raise ValueError(
                f"C={self.C} violates the lower bound {bound:.12g} for these exponents"
            )
        if self.theta is None:
            forced = 1.0 - (self.beta - math.log(self.K)) / (self.eps * self.p)
            object.__setattr__(self, "theta", max(forced, 0.0))
        elif not (0.0 <= self.theta < 1.0):
            raise ValueError(f"theta must lie in [0, 1), got {self.theta}")

    @property
    def Q(self) -> float:
        """Conformal dimension of the boundary, log K / eps."""
        return math.log(self.K) / self.eps

    @property
    def borderline_p(self) -> float:
        """The integrability exponent at which the forced smoothness hits 0."""
        return (self.beta - math.log(self.K)) / self.eps

    @property
    def is_borderline(self) -> bool:
        return abs(self.p - self.borderline_p) <= 1e-12 * max(1.0, self.p)

    @property
    def diam(self) -> float:
        """Diameter of the tree (and of its boundary) in the uniformized metric."""
        return 2.0 / self.eps

    @classmethod
    def desk_default(cls, depth: int = 12, **kw) -> "SpaceParams":
        """Binary tree with eps = log 2 (so Q = 1) and beta = 2 log 2."""
        args = dict(K=2, eps=math.log(2.0), beta=2.0 * math.log(2.0), depth=depth)
        args.update(kw)
        return cls(**args)


_PARAM_KEYS = {"K", "eps", "beta", "lambda", "C", "p", "theta", "depth"}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; '#' starts a comment, blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ValueError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def params_from_mapping(mapping: dict[str, str]) -> SpaceParams:
    unknown = set(mapping) - _PARAM_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for req in ("K", "eps", "beta", "lambda", "p", "depth"):
        if req not in mapping:
            raise ValueError(f"missing required config key {req!r}")
    return SpaceParams(
        K=int(mapping["K"]),
        eps=float(mapping["eps"]),
        beta=float(mapping["beta"]),
        lam=float(mapping["lambda"]),
        C=float(mapping["C"]) if "C" in mapping else None,
        p=float(mapping["p"]),
        theta=float(mapping["theta"]) if "theta" in mapping else None,
        depth=int(mapping["depth"]),
    )


def load_params(path) -> SpaceParams:
    """Load :class:`SpaceParams` from a plain-text key=value config file."""
    with open(path, "r", encoding="utf-8") as fh:
        return params_from_mapping(parse_config_text(fh.read()))
