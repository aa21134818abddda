"""Self-similar profiles f(xi) and the space-time functions built from them.

The profile equation
    (f^m)'' + (N-1)/xi (f^m)' - alpha f + beta xi f' + xi^sigma f^p = 0
is integrated as a first-order system in (v, g) = (f^m, (f^m)'), which keeps
degenerate interfaces regular except for the integrable beta*xi*f' term.
Shooting over interface positions produces the compactly supported blow-up
subsolution; the monotone decreasing branch gives the propagation-bounding
supersolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .core import Problem, similarity_exponents

F_FLOOR = 1e-12      # tabulated profiles treat f below this as zero
F_START = 1e-5       # profile height at which interface-ansatz launches start
RTOL = 1e-8


class BracketError(RuntimeError):
    """Shooting search failed to bracket; carries the scanned range."""

    def __init__(self, message: str, scanned: tuple[float, float]):
        super().__init__(f"{message} (scanned range {scanned[0]:g}..{scanned[1]:g})")
        self.scanned = scanned


@dataclass
class SelfSimilarProfile:
    prob: Problem
    role: str  # subsolution_compact | origin_regular | decreasing_interface | combined_min
    xi_grid: np.ndarray
    f: np.ndarray
    xi1: float | None = None
    xi2: float | None = None
    a: float | None = None
    D: float | None = None

    def __call__(self, xi) -> np.ndarray:
        """Linear interpolation, zero outside the tabulated range."""
        return np.interp(np.asarray(xi, dtype=float), self.xi_grid, self.f, left=0.0, right=0.0)

    def max_f(self) -> float:
        return float(np.max(self.f))


@dataclass
class SelfSimilarFunction:
    profile: SelfSimilarProfile
    T: float
    t_offset: float = 0.0


def _rhs(prob: Problem):
    exps = similarity_exponents(prob)
    alpha, beta = exps.alpha, exps.beta
    m, p, sigma, n = prob.m, prob.p, prob.sigma, prob.dim

    def rhs(xi, y):
        v, g = y
        v = max(v, 0.0)
        f = v ** (1.0 / m)
        fp = g / (m * v ** ((m - 1.0) / m)) if v > 0 else 0.0
        dg = alpha * f - beta * xi * fp - xi ** sigma * v ** (p / m)
        if n > 1:
            dg -= (n - 1) / xi * g
        return (g, dg)

    return rhs


def _integrate(prob, y0, xi0, xi1, events):
    v_scale = max(abs(y0[0]), 1.0)
    sol = solve_ivp(
        _rhs(prob),
        (xi0, xi1),
        y0,
        method="RK45",
        rtol=RTOL,
        atol=1e-14 * v_scale + 1e-30,
        events=events,
        dense_output=True,
    )
    if sol.status == -1:
        raise RuntimeError(f"profile integration failed: {sol.message}")
    return sol


def _floor_event(prob: Problem):
    v_floor = F_START ** prob.m / 100.0

    def ev(xi, y):
        return y[0] - v_floor

    ev.terminal = True
    ev.direction = -1
    return ev


def _slope_event(direction: float, terminal: bool):
    def ev(xi, y):
        return y[1]

    ev.terminal = terminal
    ev.direction = direction
    return ev


def _interface_from_event(sol, event_idx: int) -> float:
    """Extrapolate the true zero of v from the floor event using v' = g."""
    xi_ev = float(sol.t_events[event_idx][0])
    v_ev, g_ev = sol.y_events[event_idx][0]
    return xi_ev - v_ev / g_ev


def degenerate_front_slope(prob: Problem, xi_int: float) -> float:
    """Leading coefficient s in f^{m-1} ~ s (xi_int - xi) at a degenerate contact."""
    exps = similarity_exponents(prob)
    return (prob.m - 1) * exps.beta * xi_int / prob.m


def interface_start(prob: Problem, xi_int: float, contact: str, slope_param: float | None):
    """(delta, v, g) just inside an interface from the local contact ansatz."""
    m = prob.m
    if contact == "degenerate":
        s = slope_param if slope_param is not None else degenerate_front_slope(prob, xi_int)
        # keep the launch offset well inside the interface; for small xi_int
        # the front slope is small and the nominal-height offset can exceed
        # xi_int itself
        delta = min(F_START ** (m - 1) / s, 0.01 * xi_int)
        v = (s * delta) ** (m / (m - 1))
        g = -(m / (m - 1)) * s * (s * delta) ** (1.0 / (m - 1))
        return delta, v, g
    if contact == "transversal":
        if slope_param is None or slope_param <= 0:
            raise ValueError("transversal contact needs a positive slope_param c = (f^m)'")
        delta = min(F_START ** m / slope_param, 0.01 * xi_int)
        return delta, slope_param * delta, slope_param
    raise ValueError(f"unknown contact kind {contact!r}")


def integrate_profile_from_interface(
    prob: Problem,
    xi_int: float,
    slope_param: float | None = None,
    contact: str = "degenerate",
    direction: str = "inward",
    xi_stop: float | None = None,
    f_cap: float = 1e6,
    stop_on_local_min: bool = False,
    stop_on_any_extremum: bool = False,
):
    """Raw profile branch launched just inside an interface.

    Returns (sol, outcome): 'hit_zero' (f reached the floor again), 'turned'
    (requested extremum event fired), 'capped' (f exceeded f_cap) or
    'ran_out' (reached xi_stop).
    """
    if not xi_int > 0:
        raise ValueError("interface position must be positive")
    sgn = -1.0 if direction == "inward" else 1.0
    delta, v0, g0 = interface_start(prob, xi_int, contact, slope_param)
    if direction == "outward":
        g0 = abs(g0)
    xi_start = xi_int + sgn * delta
    if xi_stop is None:
        xi_stop = 1e-4 * xi_int if direction == "inward" else 100.0 * xi_int

    ev_floor = _floor_event(prob)
    ev_cap = lambda xi, y: y[0] - f_cap ** prob.m
    ev_cap.terminal = True
    ev_cap.direction = 1
    events = [ev_floor, ev_cap]
    if stop_on_local_min:
        # local minimum of f after the hump: in solver time g crosses zero
        # downward (inward march) or upward (outward march)
        events.append(_slope_event(+1.0 if direction == "outward" else -1.0, True))
    elif stop_on_any_extremum:
        events.append(_slope_event(0.0, True))

    sol = _integrate(prob, (v0, g0), xi_start, xi_stop, events)
    if len(sol.t_events[0]):
        # a floor crossing is only a genuine transversal zero if g is steep
        # compared with the slowly-varying decay mode beta*xi*f' = alpha*f -
        # xi^sigma*f^p; branches captured by that mode (the only way a miss
        # reaches the floor when p = 1) count as 'decayed'
        xi_ev = float(sol.t_events[0][0])
        v_ev, g_ev = sol.y_events[0][0]
        exps = similarity_exponents(prob)
        f_ev = max(v_ev, 0.0) ** (1.0 / prob.m)
        rate = prob.m * (exps.alpha - xi_ev ** prob.sigma * f_ev ** (prob.p - 1))
        rate /= exps.beta * xi_ev
        if rate < 0 and v_ev > 0 and 0.2 < (g_ev / v_ev) / rate < 5.0:
            return sol, "decayed"
        return sol, "hit_zero"
    if len(sol.t_events[1]):
        return sol, "capped"
    if len(events) > 2 and len(sol.t_events[2]):
        return sol, "turned"
    return sol, "ran_out"


def _tabulate(sol, prob, n_points: int = 2000) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = min(sol.t[0], sol.t[-1]), max(sol.t[0], sol.t[-1])
    xi = np.linspace(lo, hi, n_points)
    v = np.clip(sol.sol(xi)[0], 0.0, None)
    return xi, v ** (1.0 / prob.m)


def integrate_profile_from_origin(
    prob: Problem,
    a: float,
    xi_max: float = 50.0,
) -> SelfSimilarProfile:
    """Profile with f(0) = a, f'(0) = 0, from the series f ~ a + alpha a^{2-m}/(2mN) xi^2.

    Tabulation runs from the origin past the first maximum xi1(a) until f
    falls to the floor or xi_max is reached.
    """
    if not a > 0:
        raise ValueError(f"origin value must be positive, got a={a}")
    exps = similarity_exponents(prob)
    m, n = prob.m, prob.dim
    c2 = exps.alpha * a ** (2 - m) / (2 * m * n)
    xi_s = 1e-6
    f_s = a + c2 * xi_s ** 2
    g_s = (exps.alpha * a / n) * xi_s

    ev_floor = _floor_event(prob)
    ev_max = _slope_event(-1.0, False)
    sol = _integrate(prob, (f_s ** m, g_s), xi_s, xi_max, [ev_floor, ev_max])
    xi, f = _tabulate(sol, prob)
    xi_grid = np.concatenate(([0.0], xi))
    f_tab = np.concatenate(([a], f))
    xi1 = float(sol.t_events[1][0]) if len(sol.t_events[1]) else None
    if len(sol.t_events[0]):
        xi_zero = _interface_from_event(sol, 0)
        xi_grid = np.concatenate((xi_grid, [xi_zero]))
        f_tab = np.concatenate((f_tab, [0.0]))
    return SelfSimilarProfile(
        prob=prob, role="origin_regular", xi_grid=xi_grid, f=f_tab, a=a, xi1=xi1
    )


def _classify_inward_from_outer(prob: Problem, xi2: float):
    """Inward branch from a degenerate contact at xi2: does it land on an
    inner transversal zero (compact hump) or turn back upward?"""
    sol, outcome = integrate_profile_from_interface(
        prob, xi2, contact="degenerate", direction="inward", stop_on_local_min=True
    )
    return sol, outcome


def find_compact_subsolution_profile(
    prob: Problem,
    xi2_range: tuple[float, float] = (0.05, 200.0),
    scan_points: int = 40,
    bisect_tol: float = 1e-10,
) -> SelfSimilarProfile:
    """Compactly supported hump profile: zero at xi1 with (f^m)' > 0, degenerate
    contact at xi2, positive in between.

    Shooting over the outer interface position: scan a geometric ladder of
    trial xi2, locate the smallest value whose inward branch lands on an inner
    zero, and sharpen the transition edge by bisection.
    """
    lo, hi = xi2_range
    trials = np.geomspace(lo, hi, scan_points)
    last_miss = None
    first_hit = None
    for xi2 in trials:
        _, outcome = _classify_inward_from_outer(prob, xi2)
        if outcome == "hit_zero":
            first_hit = xi2
            break
        last_miss = xi2
    if first_hit is None:
        raise BracketError("no trial outer interface produced an inner zero", xi2_range)

    if last_miss is not None:
        a, b = last_miss, first_hit
        while b - a > bisect_tol * b:
            mid = 0.5 * (a + b)
            _, outcome = _classify_inward_from_outer(prob, mid)
            if outcome == "hit_zero":
                b = mid
            else:
                a = mid
        # step slightly inside the hit region so the inner contact is robustly
        # transversal
        xi2 = b * (1 + 1e-6)
    else:
        xi2 = first_hit

    sol, outcome = _classify_inward_from_outer(prob, xi2)
    if outcome != "hit_zero":
        raise BracketError("bisection edge lost the inner zero", xi2_range)
    xi1 = _interface_from_event(sol, 0)
    xi, f = _tabulate(sol, prob)
    keep = xi > xi1
    xi_grid = np.concatenate(([xi1], xi[keep], [xi2]))
    f_tab = np.concatenate(([0.0], f[keep], [0.0]))
    order = np.argsort(xi_grid)
    return SelfSimilarProfile(
        prob=prob,
        role="subsolution_compact",
        xi_grid=xi_grid[order],
        f=f_tab[order],
        xi1=float(xi1),
        xi2=float(xi2),
    )


def inner_contact_slope(profile: SelfSimilarProfile) -> float:
    """One-sided estimate of (f^m)' at the inner interface of a compact profile."""
    xi, f = profile.xi_grid, profile.f
    i = np.searchsorted(xi, profile.xi1) + 1
    return float((f[i + 1] ** profile.prob.m - f[i] ** profile.prob.m) / (xi[i + 1] - xi[i]))


def _front_extrapolated_zero(sol, prob: Problem, xi2_guess: float) -> float:
    """Outer interface from the degenerate front ansatz: f^{m-1} is linear
    near the contact, so fit it on a small-height window past the hump and
    take the nearby root.  More accurate than the floor-crossing event, which
    fires late on branches that skim the front with near-zero slope."""
    lo, hi = min(sol.t[0], sol.t[-1]), max(sol.t[0], sol.t[-1])
    xi = np.linspace(lo, hi, 200001)
    v = np.clip(sol.sol(xi)[0], 0.0, None)
    w = v ** ((prob.m - 1) / prob.m)
    xi_peak = xi[np.argmax(w)]
    w_max = float(np.max(w))
    # the window sits above the height where a bisected near-separatrix
    # branch departs from the front, but low enough for the linear ansatz
    sel = (w > 3e-3 * w_max) & (w < 3e-2 * w_max) & (xi > xi_peak)
    if np.count_nonzero(sel) < 8:
        sel = (w > 1e-3 * w_max) & (w < 1e-1 * w_max) & (xi > xi_peak)
    if np.count_nonzero(sel) < 8:
        return xi2_guess
    coeffs = np.polyfit(xi[sel], w[sel], 2)
    roots = np.roots(coeffs)
    roots = roots[np.isreal(roots)].real
    if roots.size == 0:
        b, a = np.polyfit(xi[sel], w[sel], 1)
        return float(-a / b)
    return float(roots[np.argmin(np.abs(roots - xi2_guess))])


def find_compact_profile_by_slope(
    prob: Problem,
    xi1: float,
    c_range: tuple[float, float] = (1e-4, 1e4),
    scan_points: int = 60,
    bisect_tol: float = 1e-12,
    xi_stop: float = 50.0,
) -> SelfSimilarProfile:
    """Independent parameterization of the compact hump: shoot outward from a
    transversal contact at xi1 over the slope c = (f^m)'(xi1+), bisecting to
    the degenerate landing.

    Undershoot: the branch misses zero, either turning back up or decaying
    onto the algebraic tail all the way to xi_stop.  Overshoot: it crosses
    zero with (f^m)' still negative.  The separatrix lands with a degenerate
    outer contact.  Tail-bound undershoots force tiny steps, so the scan runs
    from large c down: overshoots classify quickly and only the single trial
    past the bracket edge pays the tail cost.
    """

    def classify(c):
        sol, outcome = integrate_profile_from_interface(
            prob, xi1, slope_param=c, contact="transversal", direction="outward",
            stop_on_local_min=True, xi_stop=max(xi_stop, 10.0 * xi1),
        )
        return sol, outcome

    c_under = None
    c_over = None
    for c in np.geomspace(c_range[1], c_range[0], scan_points):
        _, outcome = classify(c)
        if outcome == "hit_zero":
            c_over = c
        elif outcome != "capped":
            c_under = c
            break
    if c_under is None or c_over is None:
        raise BracketError("slope shooting found no undershoot/overshoot bracket", c_range)

    a, b = (c_under, c_over) if c_under < c_over else (c_over, c_under)
    hit_is_high = c_over > c_under
    while b - a > bisect_tol * b:
        mid = 0.5 * (a + b)
        _, outcome = classify(mid)
        if (outcome == "hit_zero") == hit_is_high:
            b = mid
        else:
            a = mid
    # evaluate on the overshoot side so the branch actually reaches zero
    c_star = b if hit_is_high else a
    sol, outcome = classify(c_star)
    if outcome != "hit_zero":
        # nudge further into the overshoot side
        c_star = c_star * (1 + 1e-9) if hit_is_high else c_star * (1 - 1e-9)
        sol, outcome = classify(c_star)
    if outcome != "hit_zero":
        raise BracketError("slope bisection edge lost the outer zero", c_range)
    xi2 = _front_extrapolated_zero(sol, prob, _interface_from_event(sol, 0))
    xi, f = _tabulate(sol, prob)
    keep = (xi < xi2) & (f > 0)
    xi_grid = np.concatenate(([xi1], xi[keep], [xi2]))
    f_tab = np.concatenate(([0.0], f[keep], [0.0]))
    order = np.argsort(xi_grid)
    return SelfSimilarProfile(
        prob=prob,
        role="subsolution_compact",
        xi_grid=xi_grid[order],
        f=f_tab[order],
        xi1=float(xi1),
        xi2=float(xi2),
    )


def find_decreasing_supersolution_profile(
    prob: Problem,
    xi0: float,
    xi_min_factor: float = 1e-4,
) -> SelfSimilarProfile:
    """Monotone decreasing profile with a degenerate interface at xi0.

    For N >= 3 the inner end is fitted against the f ~ D xi^{-(N-2)/m}
    asymptote; for N = 1 the origin value a = f(0) is recorded.  A branch
    that turns non-monotone before reaching small xi means xi0 is beyond the
    admissible interface range and raises ValueError('xi0_out_of_range').
    """
    sol, outcome = integrate_profile_from_interface(
        prob, xi0, contact="degenerate", direction="inward",
        xi_stop=xi0 * xi_min_factor, stop_on_any_extremum=True, f_cap=1e12,
    )
    if outcome == "turned" or outcome == "hit_zero":
        raise ValueError(f"xi0_out_of_range: branch from xi0={xi0:g} is not monotone")
    xi, f = _tabulate(sol, prob)
    order = np.argsort(xi)
    xi, f = xi[order], f[order]
    xi_grid = np.concatenate((xi, [xi0]))
    f_tab = np.concatenate((f, [0.0]))
    a = None
    D = None
    n = prob.dim
    if n == 1:
        # extend flat to the origin with the smallest-xi value
        a = float(f_tab[0])
        xi_grid = np.concatenate(([0.0], xi_grid))
        f_tab = np.concatenate(([a], f_tab))
    elif n >= 3:
        lo = xi[0]
        sel = xi <= lo * 10
        D = float(np.median(f[sel] * xi[sel] ** ((n - 2) / prob.m)))
    return SelfSimilarProfile(
        prob=prob,
        role="decreasing_interface",
        xi_grid=xi_grid,
        f=f_tab,
        xi2=float(xi0),
        a=a,
        D=D,
    )


def estimate_interface_range(
    prob: Problem,
    scan: tuple[float, float] = (1e-2, 1e3),
    points: int = 31,
) -> float:
    """Empirical upper bound for admissible decreasing-interface positions:
    largest xi0 in a geometric scan whose inward branch stays monotone."""
    best = None
    for xi0 in np.geomspace(scan[0], scan[1], points):
        try:
            find_decreasing_supersolution_profile(prob, xi0)
        except ValueError:
            break
        best = xi0
    if best is None:
        raise BracketError("no monotone decreasing branch found", scan)
    return float(best)


def build_fsp_supersolution(
    prob: Problem,
    sup_u: float,
    zeta0: float,
    t_offset: float = 0.0,
    margin: float = 1.2,
    xi_big: float | None = None,
) -> SelfSimilarFunction:
    """Compactly supported supersolution min{f1, f2} dominating a state with
    sup norm sup_u and support radius zeta0.

    f1 is the origin-regular profile with f1(0) = margin * sup_u, f2 the
    decreasing profile with interface at xi0 = min(Xi_est/2, xi1(a)); the
    time-depth tau < 1 is halved until the initial support strictly covers
    zeta0 and the initial height clears sup_u.
    """
    if not (sup_u > 0 and zeta0 > 0):
        raise ValueError("need sup_u > 0 and zeta0 > 0")
    a = margin * sup_u
    f1 = integrate_profile_from_origin(prob, a)
    if f1.xi1 is None:
        raise RuntimeError("origin profile found no first maximum")
    if xi_big is None:
        xi_big = estimate_interface_range(prob)
    xi0 = min(xi_big / 2, f1.xi1)
    f2 = find_decreasing_supersolution_profile(prob, xi0)

    # pointwise min of the two branches; both are supersolutions, so the min
    # is one as well, and the self-similar time depth tau supplies any height
    # the crossing structure cannot
    xi_lo = f2.xi_grid[1] if prob.dim > 1 else 0.0
    xi_common = np.linspace(xi_lo, xi0, 4000)
    f_tab = np.minimum(f1(xi_common), f2(xi_common))
    combined = SelfSimilarProfile(
        prob=prob, role="combined_min", xi_grid=xi_common, f=f_tab,
        xi1=None, xi2=xi0, a=float(f_tab[0]), D=f2.D,
    )

    exps = similarity_exponents(prob)
    f_origin = float(f_tab[0])
    tau = 1.0
    for _ in range(200):
        supp_ok = xi0 * tau ** (-exps.beta) > zeta0 * (1 + 1e-9)
        height = tau ** (-exps.alpha) * min(
            f_origin, float(combined(zeta0 * tau ** exps.beta))
        )
        if supp_ok and height > sup_u * (1 + 1e-9):
            return SelfSimilarFunction(profile=combined, T=tau, t_offset=t_offset)
        tau *= 0.5
    raise RuntimeError("no admissible tau found in (0, 1]")


def selfsimilar_eval(fn: SelfSimilarFunction, r, t: float) -> np.ndarray:
    """(T + t_offset - t)^{-alpha} f(r (T + t_offset - t)^{beta}), zero outside
    the profile support."""
    rem = fn.T + fn.t_offset - t
    if t < fn.t_offset or rem <= 0:
        raise ValueError(
            f"t={t} outside validity window [{fn.t_offset}, {fn.t_offset + fn.T})"
        )
    exps = similarity_exponents(fn.profile.prob)
    r = np.asarray(r, dtype=float)
    return rem ** (-exps.alpha) * fn.profile(r * rem ** exps.beta)


def profile_residual(
    profile: SelfSimilarProfile,
    f_floor: float = F_FLOOR,
    edge_cells: int = 12,
) -> float:
    """Max finite-difference residual of the profile ODE, normalized by
    (1 + max f^p).

    Evaluated on the profile's own uniform tabulation where f > f_floor.
    A few cells next to each contact point are skipped: f' is unbounded
    there and no fixed-step stencil can represent it.
    """
    prob = profile.prob
    exps = similarity_exponents(prob)
    xi, f = profile.xi_grid, profile.f
    # use the interior uniform portion of the tabulation (endpoints may be
    # pinned interface values off the uniform lattice)
    dx = np.diff(xi)
    h = float(np.median(dx))
    uniform = np.nonzero(np.abs(dx - h) < 1e-9 * h)[0]
    i0, i1 = uniform[0], uniform[-1] + 1
    xi_u, fu = xi[i0:i1 + 1], f[i0:i1 + 1]
    v = fu ** prob.m
    d1v = (v[2:] - v[:-2]) / (2 * h)
    d2v = (v[2:] - 2 * v[1:-1] + v[:-2]) / h ** 2
    d1f = (fu[2:] - fu[:-2]) / (2 * h)
    mid_xi, mid_f = xi_u[1:-1], fu[1:-1]
    res = (
        d2v
        + (prob.dim - 1) / mid_xi * d1v
        - exps.alpha * mid_f
        + exps.beta * mid_xi * d1f
        + mid_xi ** prob.sigma * mid_f ** prob.p
    )
    interior = mid_f > f_floor
    interior[:edge_cells] = False
    interior[len(interior) - edge_cells:] = False
    # also drop the neighborhood of any interior contact (combined profiles)
    near_zero = mid_f <= f_floor
    for shift in range(1, edge_cells + 1):
        interior &= ~np.roll(near_zero, shift)
        interior &= ~np.roll(near_zero, -shift)
    if not np.any(interior):
        return float("nan")
    return float(np.max(np.abs(res[interior])) / (1 + profile.max_f() ** prob.p))
