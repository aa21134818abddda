"""Explicit finite-difference evolution of radial solutions.

Cell-centered grid r_i = (i + 1/2) h, conservation-form discretization of
(1/r^{N-1}) (r^{N-1} (u^m)')' with zero flux at the origin and homogeneous
Dirichlet value at r_max.  Forward Euler in time with an adaptive stability
bound; negative values are clamped to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import InitialDataSpec, Problem, evaluate_initial_data

C_DIFF = 0.25
C_REAC = 0.1
EPS_DT = 1e-30
EPS_SUPP = 1e-10
DEFAULT_DT_MAX = 1e-3


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    cells: int

    @property
    def h(self) -> float:
        return self.r_max / self.cells

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.cells) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.cells + 1) * self.h


def make_grid(r_max: float, cells: int) -> RadialGrid:
    if not r_max > 0:
        raise ValueError(f"r_max must be > 0, got {r_max}")
    if cells < 16:
        raise ValueError(f"need at least 16 cells, got {cells}")
    return RadialGrid(r_max=float(r_max), cells=int(cells))


@dataclass
class RadialState:
    grid: RadialGrid
    t: float
    u: np.ndarray
    blown_up: bool = False

    def sup(self) -> float:
        return float(np.max(self.u)) if self.u.size else 0.0


def sample_initial_data(spec: InitialDataSpec, grid: RadialGrid, prob: Problem) -> RadialState:
    u = evaluate_initial_data(spec, prob, grid.r)
    return RadialState(grid=grid, t=0.0, u=np.asarray(u, dtype=float))


def _omega(dim: int) -> float:
    """Surface area of the unit sphere in R^N."""
    return 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)


def radial_mass(state: RadialState, prob: Problem) -> float:
    r = state.grid.r
    return _omega(prob.dim) * float(np.sum(state.u * r ** (prob.dim - 1)) * state.grid.h)


def reaction_diffusion_rhs(
    state: RadialState,
    prob: Problem,
    diffusion: bool = True,
    reaction: bool = True,
) -> np.ndarray:
    """Discrete lap(u^m) + r^sigma u^p at the cell centers."""
    grid = state.grid
    u = state.u
    h = grid.h
    r = grid.r
    rhs = np.zeros_like(u)
    if diffusion:
        w = u ** prob.m
        faces = grid.faces
        flux = np.zeros(grid.cells + 1)
        # interior faces: centered gradient of u^m
        flux[1:-1] = faces[1:-1] ** (prob.dim - 1) * (w[1:] - w[:-1]) / h
        # origin: symmetry => zero flux; outer face: Dirichlet value 0 at r_max
        flux[-1] = faces[-1] ** (prob.dim - 1) * (0.0 - w[-1]) / (h / 2)
        rhs += (flux[1:] - flux[:-1]) / (r ** (prob.dim - 1) * h)
    if reaction:
        rhs += r ** prob.sigma * u ** prob.p
    return rhs


def stable_dt(
    state: RadialState,
    prob: Problem,
    dt_max: float = DEFAULT_DT_MAX,
) -> float:
    u_max = state.sup()
    h = state.grid.h
    dt_diff = C_DIFF * h * h / (prob.m * u_max ** (prob.m - 1) + EPS_DT)
    reac_rate = float(np.max(state.grid.r ** prob.sigma * state.u ** (prob.p - 1)))
    dt_reac = C_REAC / (reac_rate + EPS_DT)
    return min(dt_diff, dt_reac, dt_max)


def step_explicit(
    state: RadialState,
    prob: Problem,
    dt: float,
    diffusion: bool = True,
    reaction: bool = True,
) -> RadialState:
    if state.blown_up:
        raise ValueError("cannot step a blown-up state")
    u_new = state.u + dt * reaction_diffusion_rhs(state, prob, diffusion, reaction)
    if not np.all(np.isfinite(u_new)):
        return RadialState(grid=state.grid, t=state.t + dt, u=state.u.copy(), blown_up=True)
    np.clip(u_new, 0.0, None, out=u_new)
    return RadialState(grid=state.grid, t=state.t + dt, u=u_new)


def support_radius(state: RadialState, eps_supp: float = EPS_SUPP) -> float:
    above = np.nonzero(state.u > eps_supp)[0]
    if above.size == 0:
        return 0.0
    return float(state.grid.r[above[-1]])


@dataclass
class RunReport:
    problem: Problem
    grid: RadialGrid
    times: list = field(default_factory=list)
    sup_norm: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    zeta: list = field(default_factory=list)
    termination: str = "reached_t_end"
    blowup_time_estimate: float | None = None
    blowup_time_ci: tuple | None = None
    snapshots: list = field(default_factory=list)  # (t, u array) pairs, optional
    final: RadialState | None = None

    def final_state(self) -> RadialState | None:
        if self.final is not None:
            return RadialState(grid=self.final.grid, t=self.final.t, u=self.final.u.copy())
        if not self.snapshots:
            return None
        t, u = self.snapshots[-1]
        return RadialState(grid=self.grid, t=t, u=u.copy())


def evolve(
    prob: Problem,
    spec: InitialDataSpec | None,
    grid: RadialGrid,
    t_end: float,
    u_cap: float = 1e6,
    *,
    state0: RadialState | None = None,
    cadence: float = 0.01,
    sup_growth_factor: float = 1.05,
    record_states: bool = False,
    eps_supp: float = EPS_SUPP,
    dt_max: float = DEFAULT_DT_MAX,
    diffusion: bool = True,
    reaction: bool = True,
    fit_alpha: float | None = None,
) -> RunReport:
    """Run forward Euler with adaptive dt until t_end, blow-up or domain exhaustion.

    Rows are recorded every `cadence` time units and additionally whenever the
    sup norm grows by `sup_growth_factor` (so the blow-up fit has samples in
    every decade).  The zeta-based `domain_exhausted` termination only applies
    to data that starts compactly supported inside 0.9 r_max; tail data is run
    as a truncated Dirichlet approximation.
    """
    if state0 is None:
        state = sample_initial_data(spec, grid, prob)
    else:
        state = RadialState(grid=state0.grid, t=state0.t, u=state0.u.copy())
        grid = state0.grid
    if not u_cap > state.sup():
        raise ValueError("u_cap must exceed the initial sup norm")

    report = RunReport(problem=prob, grid=grid)
    zeta0 = support_radius(state, eps_supp)
    watch_domain = zeta0 < 0.9 * grid.r_max

    def record(st: RadialState):
        report.times.append(st.t)
        report.sup_norm.append(st.sup())
        report.mass.append(radial_mass(st, prob))
        report.zeta.append(support_radius(st, eps_supp))
        if record_states:
            report.snapshots.append((st.t, st.u.copy()))

    record(state)
    next_record_t = cadence
    next_record_sup = max(state.sup(), EPS_DT) * sup_growth_factor

    while True:
        if state.t >= t_end - 1e-15:
            report.termination = "reached_t_end"
            break
        if state.sup() >= u_cap:
            report.termination = "blowup_detected"
            break
        if watch_domain and support_radius(state, eps_supp) >= 0.9 * grid.r_max:
            report.termination = "domain_exhausted"
            break
        dt = min(stable_dt(state, prob, dt_max), t_end - state.t)
        state = step_explicit(state, prob, dt, diffusion=diffusion, reaction=reaction)
        if state.blown_up:
            report.termination = "blowup_detected"
            record(state)
            break
        if state.t >= next_record_t or state.sup() >= next_record_sup:
            record(state)
            next_record_t = state.t + cadence
            next_record_sup = max(state.sup(), EPS_DT) * sup_growth_factor

    if report.times[-1] != state.t:
        record(state)
    report.final = state

    if report.termination == "blowup_detected" and fit_alpha is not None:
        try:
            t_hat, ci = estimate_blowup_time(report, fit_alpha)
            report.blowup_time_estimate = t_hat
            report.blowup_time_ci = ci
        except ValueError:
            pass
    return report


def estimate_blowup_time(report: RunReport, alpha: float) -> tuple[float, tuple[float, float]]:
    """Extrapolate T from the ansatz sup ~ (T - t)^{-alpha}.

    Linear fit of sup^{-1/alpha} against t over the final decade of sup-norm
    growth; the confidence interval comes from separate fits over the two
    final half-decades.
    """
    if report.termination != "blowup_detected":
        raise ValueError("report did not terminate with blowup_detected")
    t = np.asarray(report.times)
    s = np.asarray(report.sup_norm)
    s_max = float(np.max(s))
    s0 = s[0]
    if s_max < 10 * max(s0, EPS_DT):
        raise ValueError("sup norm never exceeded 10x its initial value")

    def fit(lo: float, hi: float) -> float:
        mask = (s >= lo) & (s <= hi) & (s > 0)
        if np.count_nonzero(mask) < 3:
            raise ValueError("insufficient samples in fit window")
        y = s[mask] ** (-1.0 / alpha)
        b, a = np.polyfit(t[mask], y, 1)
        if b >= 0:
            raise ValueError("sup norm not growing over fit window")
        return -a / b

    mask_decade = s >= s_max / 10
    if np.count_nonzero(mask_decade) < 10:
        raise ValueError("need >= 10 samples in the final decade of growth")
    t_hat = fit(s_max / 10, s_max)
    half = s_max / math.sqrt(10)
    t_lo = fit(s_max / 10, half)
    t_hi = fit(half, s_max)
    ci = (min(t_lo, t_hi), max(t_lo, t_hi))
    return t_hat, ci


@dataclass(frozen=True)
class OrderingReport:
    max_violation: float
    passed: bool
    tol: float


def verify_ordering(report_low: RunReport, report_high: RunReport, tol: float) -> OrderingReport:
    """Max over shared snapshots of (u - v)_+ for runs with u0 <= v0."""
    if report_low.grid != report_high.grid:
        raise ValueError("runs use different grids")
    if not report_low.snapshots or not report_high.snapshots:
        raise ValueError("verify_ordering needs runs with record_states=True")
    n = min(len(report_low.snapshots), len(report_high.snapshots))
    worst = 0.0
    for (t_u, u), (t_v, v) in zip(report_low.snapshots[:n], report_high.snapshots[:n]):
        if abs(t_u - t_v) > 1e-12 * (1 + abs(t_u)):
            raise ValueError(f"snapshot cadences differ: {t_u} vs {t_v}")
        worst = max(worst, float(np.max(u - v, initial=0.0)))
    return OrderingReport(max_violation=worst, passed=worst <= tol, tol=tol)


def evolve_pair(
    prob: Problem,
    spec_low: InitialDataSpec,
    spec_high: InitialDataSpec,
    grid: RadialGrid,
    t_end: float,
    u_cap: float = 1e6,
    *,
    record_every: int = 50,
    dt_max: float = DEFAULT_DT_MAX,
) -> tuple[RunReport, RunReport]:
    """Evolve two runs in lockstep (shared dt) so snapshots align exactly."""
    lo = sample_initial_data(spec_low, grid, prob)
    hi = sample_initial_data(spec_high, grid, prob)
    if np.any(lo.u > hi.u):
        raise ValueError("spec_low must be <= spec_high nodewise")
    rep_lo = RunReport(problem=prob, grid=grid)
    rep_hi = RunReport(problem=prob, grid=grid)

    def record():
        for rep, st in ((rep_lo, lo), (rep_hi, hi)):
            rep.times.append(st.t)
            rep.sup_norm.append(st.sup())
            rep.mass.append(radial_mass(st, prob))
            rep.zeta.append(support_radius(st))
            rep.snapshots.append((st.t, st.u.copy()))

    record()
    n_steps = 0
    while True:
        if lo.t >= t_end - 1e-15:
            rep_lo.termination = rep_hi.termination = "reached_t_end"
            break
        if max(lo.sup(), hi.sup()) >= u_cap:
            rep_lo.termination = rep_hi.termination = "blowup_detected"
            break
        dt = min(stable_dt(lo, prob, dt_max), stable_dt(hi, prob, dt_max), t_end - lo.t)
        lo = step_explicit(lo, prob, dt)
        hi = step_explicit(hi, prob, dt)
        if lo.blown_up or hi.blown_up:
            rep_lo.termination = rep_hi.termination = "blowup_detected"
            break
        n_steps += 1
        if n_steps % record_every == 0:
            record()
    if rep_lo.times[-1] != lo.t and not (lo.blown_up or hi.blown_up):
        record()
    return rep_lo, rep_hi
