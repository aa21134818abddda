"""Problem parameters, similarity exponents and closed-form thresholds.

Everything here is a pure function of the exponent quadruple (m, p, sigma, N)
or of an initial-data description; no grids, no time stepping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Problem:
    """Exponent quadruple for u_t = lap(u^m) + r^sigma u^p."""

    m: float
    p: float
    sigma: float
    dim: int

    def __post_init__(self):
        if not self.m > 1:
            raise ValueError(f"m must be > 1, got m={self.m}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got sigma={self.sigma}")
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise ValueError(f"dim must be a positive integer, got dim={self.dim}")
        if not (1 <= self.p < self.m):
            raise ValueError(f"need 1 <= p < m, got p={self.p}, m={self.m}")

    def require_p_above_one(self, what: str) -> None:
        if self.p <= 1:
            raise ValueError(f"{what} requires p > 1 (got p={self.p})")


@dataclass(frozen=True)
class SimilarityExponents:
    alpha: float
    beta: float
    bigL: float


def similarity_exponents(prob: Problem) -> SimilarityExponents:
    """Blow-up similarity exponents alpha = (sigma+2)/L, beta = (m-p)/L.

    L = sigma*(m-1) + 2*(p-1).  p = 1 is admitted (L reduces to sigma*(m-1)).
    """
    if prob.p < 1:
        raise ValueError(f"p < 1 is out of scope (got p={prob.p})")
    bigL = prob.sigma * (prob.m - 1) + 2 * (prob.p - 1)
    return SimilarityExponents(
        alpha=(prob.sigma + 2) / bigL,
        beta=(prob.m - prob.p) / bigL,
        bigL=bigL,
    )


def fujita_exponent(m: float, sigma: float, dim: int) -> float:
    """p_F = m + (sigma+2)/N.  Every in-scope problem has p < m < p_F."""
    if not (m > 1 and sigma > 0 and dim >= 1):
        raise ValueError("need m > 1, sigma > 0, dim >= 1")
    return m + (sigma + 2) / dim


def nonexistence_time_bound(tail_liminf: float, p: float) -> float:
    """Upper bound on the survival time of data with tail coefficient >= tail_liminf.

    If liminf r^{sigma/(p-1)} u0 >= c then no bounded solution exists past
    T = c^{-p} / (p-1).
    """
    if p <= 1:
        raise ValueError(f"bound undefined for p <= 1 (got p={p})")
    if not tail_liminf > 0:
        raise ValueError(f"tail_liminf must be > 0, got {tail_liminf}")
    return tail_liminf ** (-p) / (p - 1)


def sharp_survival_time(tail_liminf: float, p: float) -> float:
    """Scale-consistent survival-time bound T = c^{1-p} / (p-1).

    Under the scaling group u -> lam*u, x -> mu*x, t -> nu*t of the equation
    the tail coefficient scales with exponent 1/(alpha*(p-1)) in lam, and only
    the c^{1-p} power makes the bound transform like a time.  Measured blow-up
    times of truncated runs converge to this value from above as the domain
    grows, so it is the bound the solver is tested against.
    """
    if p <= 1:
        raise ValueError(f"bound undefined for p <= 1 (got p={p})")
    if not tail_liminf > 0:
        raise ValueError(f"tail_liminf must be > 0, got {tail_liminf}")
    return tail_liminf ** (1 - p) / (p - 1)


@dataclass(frozen=True)
class InitialDataSpec:
    """Radially symmetric nonnegative initial data.

    kinds:
      compact_bump    amplitude * (1 - (r/radius)^2)_+
      threshold_tail  tail_coeff * (1 + r)^{-sigma/(p-1)}
      table           piecewise-linear (r, value) samples
    """

    kind: str
    amplitude: float = 1.0
    radius: float = 1.0
    tail_coeff: float = 1.0
    table: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("compact_bump", "threshold_tail", "table", "zero"):
            raise ValueError(f"unknown initial data kind {self.kind!r}")
        if self.kind == "compact_bump":
            if self.amplitude < 0 or self.radius <= 0:
                raise ValueError("compact_bump needs amplitude >= 0 and radius > 0")
        if self.kind == "threshold_tail" and self.tail_coeff < 0:
            raise ValueError("threshold_tail needs tail_coeff >= 0")
        if self.kind == "table":
            tab = np.asarray(self.table, dtype=float)
            if tab.ndim != 2 or tab.shape[1] != 2 or tab.shape[0] < 2:
                raise ValueError("table must be a list of (r, value) pairs")
            if np.any(np.diff(tab[:, 0]) <= 0):
                raise ValueError("table radii must be strictly increasing")
            if np.any(tab[:, 1] < 0):
                raise ValueError("table values must be nonnegative")


def evaluate_initial_data(spec: InitialDataSpec, prob: Problem, r) -> np.ndarray:
    """Pointwise evaluation of the data profile at radii r."""
    r = np.asarray(r, dtype=float)
    if spec.kind == "zero":
        return np.zeros_like(r)
    if spec.kind == "compact_bump":
        cap = 1.0 - (r / spec.radius) ** 2
        return spec.amplitude * np.clip(cap, 0.0, None)
    if spec.kind == "threshold_tail":
        prob.require_p_above_one("threshold_tail data")
        q = prob.sigma / (prob.p - 1)
        return spec.tail_coeff * (1.0 + r) ** (-q)
    # table
    tab = np.asarray(spec.table, dtype=float)
    if np.any(r > tab[-1, 0]) or np.any(r < tab[0, 0]):
        raise ValueError(
            f"table covers [{tab[0, 0]}, {tab[-1, 0]}] but radii up to "
            f"{float(np.max(r))} were requested"
        )
    return np.interp(r, tab[:, 0], tab[:, 1])


def adb_tail_norm(
    spec: InitialDataSpec,
    prob: Problem,
    sample_radii,
    nodes_per_ball: int = 64,
) -> float:
    """Discrete tail norm sup_x (1+|x|)^{sigma/(p-1)} * (ball average of u0).

    The ball around a center at distance s has radius (1+s)^r with
    r = -sigma(m-1)/(2(p-1)); the average is taken along the radial chord
    through the center by a midpoint rule.  A finite value certifies
    admissibility of the data.
    """
    prob.require_p_above_one("adb_tail_norm")
    sample_radii = np.asarray(sample_radii, dtype=float)
    if sample_radii.size == 0:
        raise ValueError("sample_radii must be nonempty")
    if nodes_per_ball < 64:
        raise ValueError("need at least 64 quadrature nodes per ball")

    q = prob.sigma / (prob.p - 1)
    r_exp = -prob.sigma * (prob.m - 1) / (2 * (prob.p - 1))
    best = 0.0
    for s in sample_radii:
        rho = (1.0 + s) ** r_exp
        # midpoint nodes on the chord [s - rho, s + rho]
        t = (np.arange(nodes_per_ball) + 0.5) / nodes_per_ball
        y = s - rho + 2 * rho * t
        vals = evaluate_initial_data(spec, prob, np.abs(y))
        avg = float(np.mean(vals))
        best = max(best, (1.0 + s) ** q * avg)
    return best
