"""Stationary Dirichlet profiles and the associated phase-plane analysis.

The radial stationary equation
    (W^m)'' + (N-1)/r (W^m)' + r^sigma W^p = 0
is integrated directly in (V, G) = (W^m, (W^m)') from a series start at the
origin; every profile vanishes at a finite first zero R0.  The logarithmic
substitution Y = r W'/W, Z = r^{sigma+2} W^{p-m}/m, eta = ln r turns the same
equation into the autonomous system
    Y' = -(N-2) Y - m Y^2 - Z,    Z' = Z (sigma + 2 - (m-p) Y),
whose orbit out of the origin is computed here as an independent
cross-check of the profile integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import Problem

W_FLOOR = 1e-12
RTOL = 1e-10
Z_CAP = 1e6
Z0 = 1e-6


@dataclass
class StationaryProfile:
    prob: Problem
    D: float
    r_grid: np.ndarray
    W: np.ndarray
    R0: float

    def __call__(self, r) -> np.ndarray:
        return np.interp(np.asarray(r, dtype=float), self.r_grid, self.W, right=0.0)

    def w0(self) -> float:
        return float(self.W[0])


@dataclass
class PhaseOrbit:
    prob: Problem
    eta_grid: np.ndarray
    Y: np.ndarray
    Z: np.ndarray


@dataclass
class OrbitAsymptotics:
    slope: float
    expected_slope: float
    K: float
    theta: float

    def theta_exceeds_two(self) -> bool:
        return self.theta > 2.0


@dataclass(frozen=True)
class CriticalPoint:
    Y: float
    Z: float
    eigenvalues: tuple[float, float]
    kind: str


def _series_coefficient(prob: Problem) -> float:
    return (prob.m - prob.p) / ((prob.dim + prob.sigma) * (prob.sigma + 2))


def integrate_stationary_profile(
    prob: Problem,
    D: float,
    r_cap: float = 1e4,
    n_points: int = 12000,
) -> StationaryProfile:
    """Profile with W(0) = D^{1/(m-p)} from the series
    W ~ [D - (m-p)/((N+sigma)(sigma+2)) r^{sigma+2}]^{1/(m-p)}.

    Integration runs until W^m crosses a floor; the first zero R0 is then
    fixed by inverse linear extrapolation, which is exact to leading order
    because the contact is transversal in W^m.
    """
    prob.require_p_above_one("stationary profile")
    if not D > 0:
        raise ValueError(f"need D > 0, got {D}")
    m, p, sigma, n = prob.m, prob.p, prob.sigma, prob.dim
    kappa = _series_coefficient(prob)
    # start where the dropped series correction is far below tolerance
    r_start = (1e-8 * D / kappa) ** (1.0 / (sigma + 2))
    inner = D - kappa * r_start ** (sigma + 2)
    w_s = inner ** (1.0 / (m - p))
    wp_s = -(r_start ** (sigma + 1) / (n + sigma)) * inner ** ((1 + p - m) / (m - p))
    v_s = w_s ** m
    g_s = m * w_s ** (m - 1) * wp_s

    def rhs(r, y):
        v, g = y
        v = max(v, 0.0)
        dg = -r ** sigma * v ** (p / m)
        if n > 1:
            dg -= (n - 1) / r * g
        return (g, dg)

    def ev_floor(r, y):
        return y[0] - W_FLOOR ** m

    ev_floor.terminal = True
    ev_floor.direction = -1

    sol = solve_ivp(
        rhs, (r_start, r_cap), (v_s, g_s),
        method="RK45", rtol=RTOL, atol=1e-14 * v_s + 1e-300,
        events=[ev_floor], dense_output=True,
    )
    if sol.status == -1:
        raise RuntimeError(f"stationary integration failed: {sol.message}")
    if not len(sol.t_events[0]):
        raise RuntimeError(
            f"no zero of W found below r_cap={r_cap:g}; tolerance failure"
        )
    r_ev = float(sol.t_events[0][0])
    v_ev, g_ev = sol.y_events[0][0]
    R0 = r_ev - v_ev / g_ev

    r = np.linspace(r_start, r_ev, n_points)
    W = np.clip(sol.sol(r)[0], 0.0, None) ** (1.0 / m)
    r_grid = np.concatenate(([0.0], r, [R0]))
    W_tab = np.concatenate(([D ** (1.0 / (m - p))], W, [0.0]))
    return StationaryProfile(prob=prob, D=D, r_grid=r_grid, W=W_tab, R0=float(R0))


def rescale_stationary(base: StationaryProfile, R: float) -> StationaryProfile:
    """W_R(r) = R^{(sigma+2)/(m-p)} W_base(r/R); first zero R * R0(base)."""
    if not R > 0:
        raise ValueError(f"need R > 0, got {R}")
    prob = base.prob
    scale = R ** ((prob.sigma + 2) / (prob.m - prob.p))
    return StationaryProfile(
        prob=prob,
        D=base.D * R ** (prob.sigma + 2),
        r_grid=R * base.r_grid,
        W=scale * base.W,
        R0=R * base.R0,
    )


def unit_stationary_profile(prob: Problem) -> StationaryProfile:
    """Profile normalized to first zero 1, by the exact scaling relation
    D(R) = D * R^{sigma+2} applied to a reference integration at D = 1."""
    ref = integrate_stationary_profile(prob, 1.0)
    D1 = ref.R0 ** (-(prob.sigma + 2))
    unit = integrate_stationary_profile(prob, D1)
    return unit


def stationary_residual(
    profile: StationaryProfile,
    w_rel_floor: float = 1e-6,
    edge_cells: int = 16,
) -> float:
    """Max finite-difference residual of the stationary ODE on the uniform
    interior of the tabulation, normalized by (1 + max W^p).

    Cells next to the contact are skipped: V = W^m is only C^{1+2/m} there
    and the centered stencil loses its order.
    """
    prob = profile.prob
    r, W = profile.r_grid, profile.W
    dr = np.diff(r)
    h = float(np.median(dr))
    uniform = np.nonzero(np.abs(dr - h) < 1e-9 * h)[0]
    i0, i1 = uniform[0], uniform[-1] + 1
    ru, Wu = r[i0:i1 + 1], W[i0:i1 + 1]
    V = Wu ** prob.m
    d1 = (V[2:] - V[:-2]) / (2 * h)
    d2 = (V[2:] - 2 * V[1:-1] + V[:-2]) / h ** 2
    mid_r, mid_W = ru[1:-1], Wu[1:-1]
    res = d2 + (prob.dim - 1) / mid_r * d1 + mid_r ** prob.sigma * mid_W ** prob.p
    interior = mid_W > w_rel_floor * profile.w0()
    interior[:4] = False
    interior[-edge_cells:] = False
    return float(np.max(np.abs(res[interior])) / (1 + profile.w0() ** prob.p))


def phase_critical_points(prob: Problem) -> list[CriticalPoint]:
    """P0 = (0,0) and P1 = (-(N-2)/m, 0) with eigenvalue classification.

    For N = 2 the two points merge into a degenerate saddle-node; for N < 3
    the sign-based classification is reported but carries no saddle/node
    dichotomy.
    """
    m, p, sigma, n = prob.m, prob.p, prob.sigma, prob.dim

    def jac_eigs(y):
        j = np.array([
            [-(n - 2) - 2 * m * y, -1.0],
            [0.0, sigma + 2 - (m - p) * y],
        ])
        return tuple(sorted(float(e.real) for e in np.linalg.eigvals(j)))

    def kind_from(eigs, merged):
        if merged:
            return "degenerate_saddle_node"
        lo, hi = eigs
        if lo < 0 < hi:
            return "saddle"
        if lo > 0:
            return "unstable_node"
        if hi < 0:
            return "stable_node"
        return "degenerate"

    y1 = -(n - 2) / m
    merged = n == 2
    points = [CriticalPoint(0.0, 0.0, jac_eigs(0.0), kind_from(jac_eigs(0.0), merged))]
    if not merged:
        points.append(CriticalPoint(y1, 0.0, jac_eigs(y1), kind_from(jac_eigs(y1), False)))
    return points


def phase_orbit_from_P0(
    prob: Problem,
    z0: float = Z0,
    z_cap: float = Z_CAP,
    n_points: int = 4000,
) -> PhaseOrbit:
    """Orbit leaving the origin along Y ~ -Z/(N+sigma), integrated in the
    log variable zeta = ln Z (monotone along the orbit since Y < 0 keeps
    dZ/deta >= (sigma+2) Z > 0), until Z reaches z_cap."""
    prob.require_p_above_one("phase orbit")
    m, p, sigma, n = prob.m, prob.p, prob.sigma, prob.dim

    def rhs(zeta, y):
        Y, eta = y
        Z = math.exp(zeta)
        dZdeta = sigma + 2 - (m - p) * Y
        dY = (-(n - 2) * Y - m * Y ** 2 - Z) / dZdeta
        return (dY, 1.0 / dZdeta)

    zeta0, zeta1 = math.log(z0), math.log(z_cap)
    y0 = -z0 / (n + sigma)
    sol = solve_ivp(
        rhs, (zeta0, zeta1), (y0, 0.0),
        method="RK45", rtol=RTOL, atol=1e-14, dense_output=True,
    )
    if sol.status != 0:
        raise RuntimeError(f"orbit integration failed: {sol.message}")
    zeta = np.linspace(zeta0, zeta1, n_points)
    Y, eta = sol.sol(zeta)
    Z = np.exp(zeta)
    if np.any(Y >= 0):
        raise RuntimeError("orbit left the region Y < 0; step-size failure")
    isocline = -(n - 2) * Y - m * Y ** 2
    if np.any(Z[1:] <= isocline[1:]):
        raise RuntimeError("orbit fell below the isocline Z = -(N-2)Y - mY^2")
    return PhaseOrbit(prob=prob, eta_grid=eta, Y=Y, Z=Z)


def check_orbit_asymptotics(orbit: PhaseOrbit) -> OrbitAsymptotics:
    """Fit log(-Y) against log(Z) over the final decade of the orbit.

    The expected far-field law is Y ~ -K Z^{m/(m-p)}; the exponent
    theta = m(sigma+2)/(m-p) certifies theta > 2, which forces every
    stationary profile to a finite first zero.
    """
    prob = orbit.prob
    z_max = float(orbit.Z[-1])
    if z_max < 1e3:
        raise ValueError(f"orbit only reaches Z = {z_max:g} < 1e3; range insufficient")
    sel = orbit.Z >= z_max / 10
    if np.count_nonzero(sel) < 10:
        raise ValueError("too few samples in the final decade")
    slope, intercept = np.polyfit(np.log(orbit.Z[sel]), np.log(-orbit.Y[sel]), 1)
    theta = prob.m * (prob.sigma + 2) / (prob.m - prob.p)
    return OrbitAsymptotics(
        slope=float(slope),
        expected_slope=prob.m / (prob.m - prob.p),
        K=float(np.exp(intercept)),
        theta=theta,
    )


def phase_map(
    profile: StationaryProfile,
    w_rel_floor: float = 1e-2,
    y_cap: float = 10.0,
) -> PhaseOrbit:
    """Map a stationary profile through Y = r W'/W, Z = r^{sigma+2} W^{p-m}/m,
    eta = ln r, on the interior of its tabulation.

    Samples are dropped once W nears zero or |Y| exceeds y_cap: both blow up
    at the contact, where the change of variables is singular and no finite
    stencil can certify the system residual.
    """
    prob = profile.prob
    r, W = profile.r_grid, profile.W
    dr = np.diff(r)
    h = float(np.median(dr))
    uniform = np.nonzero(np.abs(dr - h) < 1e-9 * h)[0]
    i0, i1 = uniform[0], uniform[-1] + 1
    ru, Wu = r[i0:i1 + 1], W[i0:i1 + 1]
    Wp = (Wu[2:] - Wu[:-2]) / (2 * h)
    mid_r, mid_W = ru[1:-1], Wu[1:-1]
    keep = mid_W > w_rel_floor * profile.w0()
    Y_all = np.where(keep, mid_r * Wp / np.where(keep, mid_W, 1.0), np.inf)
    keep &= np.abs(Y_all) < y_cap
    mid_r, mid_W, Wp = mid_r[keep], mid_W[keep], Wp[keep]
    Y = mid_r * Wp / mid_W
    Z = mid_r ** (prob.sigma + 2) * mid_W ** (prob.p - prob.m) / prob.m
    return PhaseOrbit(prob=prob, eta_grid=np.log(mid_r), Y=Y, Z=Z)


def phase_system_residual(orbit: PhaseOrbit) -> float:
    """Max residual of the autonomous (Y, Z) system along a tabulated curve,
    with eta-derivatives taken by central differences; normalized by
    (1 + |rhs|) pointwise."""
    prob = orbit.prob
    m, p, sigma, n = prob.m, prob.p, prob.sigma, prob.dim
    eta, Y, Z = orbit.eta_grid, orbit.Y, orbit.Z
    dY = np.gradient(Y, eta)[1:-1]
    dZ = np.gradient(Z, eta)[1:-1]
    Ym, Zm = Y[1:-1], Z[1:-1]
    rhs_Y = -(n - 2) * Ym - m * Ym ** 2 - Zm
    rhs_Z = Zm * (sigma + 2 - (m - p) * Ym)
    res_Y = np.abs(dY - rhs_Y) / (1 + np.abs(rhs_Y))
    res_Z = np.abs(dZ - rhs_Z) / (1 + np.abs(rhs_Z))
    return float(max(np.max(res_Y), np.max(res_Z)))


def majorizing_stationary(
    unit: StationaryProfile,
    sup_u0: float,
    R0_data: float,
    refine: float = 1.1,
) -> StationaryProfile:
    """Smallest rescaling W_R in a geometric scan with R > R0_data and
    W_R >= sup_u0 nodewise on [0, R0_data]."""
    if not (sup_u0 > 0 and R0_data > 0):
        raise ValueError("need sup_u0 > 0 and R0_data > 0")
    if not 0.99 < unit.R0 < 1.01:
        raise ValueError(f"expected a unit profile (R0 ~ 1), got R0 = {unit.R0:g}")
    r_check = np.linspace(0.0, R0_data, 512)
    R = R0_data * refine
    for _ in range(10000):
        cand = rescale_stationary(unit, R)
        if np.all(cand(r_check) >= sup_u0):
            return cand
        R *= refine
    raise RuntimeError("no majorizing rescaling found; scan exhausted")
