"""Shooting engine for the radial profile equation

    U'' + b(r) U' + f(U) = 0,    U(R) = M, U'(R) = 0,

with event detection for the zeros of U on both sides of the core radius R.
The engine is generic in the first-order coefficient b, which may have simple
poles at the interval endpoints (r = 0 for the radial equation, both focal
radii for the isoparametric reduction); integration then starts from a
second-order Taylor state at a small offset from the pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, NoZeroFound, NotAdmissible, StepFailure
from .nonlinearity import Nonlinearity
from .spaceform import SpaceForm

_ZERO_FLOOR = 1e-13  # inward integration floor above a pole at the left endpoint


@dataclass(frozen=True)
class CauchyData:
    """Core radius R (location of the maximum) and maximum value M > 0."""
    R: float
    M: float

    def __post_init__(self):
        if not self.M > 0:
            raise DomainError(f"maximum value must be positive, got M = {self.M}")
        if self.R < 0:
            raise DomainError(f"core radius must be nonnegative, got R = {self.R}")


@dataclass(frozen=True)
class SolveOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    r_max_cap: float = 200.0      # outward span past R on unbounded intervals
    eps_start: Optional[float] = None  # startup offset; default 1e-6 (scaled down near poles)
    zero_tol: float = 1e-11       # |U| acceptance at refined zeros, relative to M
    u_growth_cap: float = 1e6     # |U| > cap * max(1, M) aborts a runaway leg
    max_step: float = math.inf


@dataclass
class StartState:
    r0: float
    u0: float
    du0: float
    b1: float  # pole residue of b (0 at a regular start)


def pole_residue(b: Callable[[float], float], pole: float, side: int,
                 scale: float = 1.0) -> float:
    """Numeric limit of (r - pole) * b(r) from the given side (+1: above)."""
    def g(tau):
        return side * tau * b(pole + side * tau)
    t0 = 1e-4 * scale
    val = (4.0 * g(t0 / 2.0) - g(t0)) / 3.0  # removes the O(tau^2) term
    if not math.isfinite(val):
        raise DomainError("coefficient limit at the pole is not finite")
    return val


def _pole_start(b, f: Nonlinearity, M: float, pole: float, side: int,
                eps: float, scale: float = 1.0) -> StartState:
    b1 = pole_residue(b, pole, side, scale)
    fM = f(M)
    u0 = M - fM * eps * eps / (2.0 * (1.0 + b1))
    du0 = -side * fM * eps / (1.0 + b1)
    return StartState(pole + side * eps, u0, du0, b1)


def _regular_start(f: Nonlinearity, R: float, M: float, side: int, eps: float) -> StartState:
    fM = f(M)
    return StartState(R + side * eps, M - fM * eps * eps / 2.0, -side * fM * eps, 0.0)


def singular_start(sf_or_b, f: Nonlinearity, cd: CauchyData,
                   eps: float = 1e-6) -> StartState:
    """Taylor startup state next to a coefficient pole.

    Accepts a SpaceForm (radial coefficient, pole at r = 0 or at r_bar for
    k > 0) or a bare coefficient callable with its pole at cd.R.
    """
    if eps <= 0:
        raise DomainError("startup offset must be positive")
    if isinstance(sf_or_b, SpaceForm):
        sf = sf_or_b
        b = sf.radial_coefficient
        if cd.R == 0.0:
            return _pole_start(b, f, cd.M, 0.0, +1, eps)
        if sf.k > 0 and abs(cd.R - sf.r_bar) < 1e-12 * sf.r_bar:
            return _pole_start(b, f, cd.M, sf.r_bar, -1, eps, scale=sf.r_bar)
        raise DomainError("singular start requires R at a pole of the coefficient")
    return _pole_start(sf_or_b, f, cd.M, cd.R, +1, eps)


class ModelProfile:
    """Dense numerical solution of the profile equation with its zeros.

    Evaluation goes through the integrator's dense output away from the
    core and through the startup Taylor patch inside the offset band around
    the core (and next to a singular start pole).
    """

    def __init__(self, b, f, cauchy, opts, sf=None):
        self.sf: Optional[SpaceForm] = sf
        self.b = b
        self.f = f
        self.cauchy = cauchy
        self.opts = opts
        self.r_minus: Optional[float] = None
        self.r_plus: Optional[float] = None
        self.dU_minus: Optional[float] = None
        self.dU_plus: Optional[float] = None
        self.r_minus_err: Optional[float] = None  # zero-location error estimates
        self.r_plus_err: Optional[float] = None
        self.admissible: bool = False
        self.failure: Optional[str] = None
        self.nodes: np.ndarray = np.empty((0, 3))
        self._segments = []         # (lo, hi, OdeSolution)
        self._taylor = None         # (center, fM, one_plus_b1, lo, hi)
        self._eps = None

    # -- evaluation ------------------------------------------------------------

    def _eval_scalar(self, r):
        c, fM, opb, lo, hi = self._taylor
        if lo <= r <= hi:
            d = r - c
            return (self.cauchy.M - fM * d * d / (2.0 * opb),
                    -fM * d / opb)
        for (a, bnd, sol) in self._segments:
            if a - 1e-12 <= r <= bnd + 1e-12:
                u, du = sol(min(max(r, a), bnd))
                return float(u), float(du)
        raise DomainError(f"radius {r} outside the computed profile range")

    def u(self, r):
        if np.ndim(r) == 0:
            return self._eval_scalar(float(r))[0]
        return np.array([self._eval_scalar(float(x))[0] for x in np.asarray(r).ravel()])

    def du(self, r):
        if np.ndim(r) == 0:
            return self._eval_scalar(float(r))[1]
        return np.array([self._eval_scalar(float(x))[1] for x in np.asarray(r).ravel()])

    def d2u(self, r):
        """U'' recovered from the equation itself."""
        u, du = self._eval_scalar(float(r))
        return -self.b(float(r)) * du - self.f(u)

    @property
    def r_lo(self):
        return min(a for a, _, _ in self._segments) if self._segments else self._taylor[3]

    @property
    def r_hi(self):
        return max(bnd for _, bnd, _ in self._segments) if self._segments else self._taylor[4]

    def branch_interval(self, sign: str):
        """Radial interval of the monotone branch ('plus' or 'minus')."""
        R = self.cauchy.R
        if sign == "plus":
            if self.r_plus is None:
                raise DomainError("profile has no outer zero")
            return (R, self.r_plus)
        if sign == "minus":
            if self.r_minus is None:
                raise DomainError("profile has no inner zero")
            return (self.r_minus, R)
        raise DomainError(f"sign must be 'plus' or 'minus', got {sign!r}")

    def summary(self) -> dict:
        out = {
            "R": self.cauchy.R, "M": self.cauchy.M,
            "r_minus": self.r_minus, "r_plus": self.r_plus,
            "dU_minus": self.dU_minus, "dU_plus": self.dU_plus,
            "admissible": self.admissible,
        }
        if self.failure:
            out["failure"] = self.failure
        if self.sf is not None:
            out["n"] = self.sf.n
            out["k"] = self.sf.k
        out["f"] = self.f.describe()
        return out


def _run_leg(b, f, start: StartState, target: float, opts: SolveOptions, M: float):
    """Integrate one leg, stopping at the first zero of U, a vanishing of U',
    runaway growth, or the target endpoint."""

    def rhs(r, y):
        return (y[1], -b(r) * y[1] - f(y[0]))

    def ev_zero(r, y):
        return y[0]
    ev_zero.terminal = True
    ev_zero.direction = -1

    def ev_turn(r, y):
        return y[1]
    ev_turn.terminal = True
    ev_turn.direction = 0

    cap = opts.u_growth_cap * max(1.0, M)

    def ev_growth(r, y):
        return y[0] - cap
    ev_growth.terminal = True
    ev_growth.direction = 1

    sol = solve_ivp(rhs, (start.r0, target), (start.u0, start.du0),
                    method="RK45", rtol=opts.rtol, atol=opts.atol,
                    dense_output=True, events=(ev_zero, ev_turn, ev_growth),
                    max_step=opts.max_step)
    if sol.status == -1:
        raise StepFailure(f"integrator failed: {sol.message}")
    return sol


def _refine_zero(sol, t_event, opts, M):
    """One explicit bracketing pass on the dense output around the event."""
    ts = sol.t
    uvals = sol.sol(ts)[0]
    pos = np.nonzero(uvals > 0)[0]
    if pos.size == 0:
        return t_event
    t_lo = ts[pos[-1]]
    t_hi = t_event
    f_lo = float(sol.sol(t_lo)[0])
    f_hi = float(sol.sol(t_hi)[0])
    if f_lo * f_hi < 0:
        r = brentq(lambda t: float(sol.sol(t)[0]), min(t_lo, t_hi), max(t_lo, t_hi),
                   xtol=1e-15, rtol=8.9e-16)
        return r
    return t_event


def solve_generic(b: Callable[[float], float], f: Nonlinearity, cd: CauchyData,
                  interval: tuple, opts: SolveOptions = SolveOptions(),
                  singular_lo: bool = False, singular_hi: bool = False,
                  sf: Optional[SpaceForm] = None, strict: bool = True) -> ModelProfile:
    """Shoot from the Cauchy data in both directions inside `interval`.

    `singular_lo` / `singular_hi` declare simple poles of b at the interval
    endpoints. With `strict`, failures raise (the exception carries the
    partial profile); otherwise the profile is returned with `.failure` set.
    """
    lo, hi = float(interval[0]), float(interval[1])
    R, M = cd.R, cd.M
    if not (lo <= R < hi) and not (singular_hi and abs(R - hi) <= 1e-12 * max(1.0, abs(hi))):
        raise DomainError(f"core radius {R} outside the interval [{lo}, {hi})")

    prof = ModelProfile(b, f, cd, opts, sf=sf)
    width = (hi - lo) if math.isfinite(hi) else 1.0
    eps_base = opts.eps_start if opts.eps_start is not None else 1e-6 * min(1.0, width)

    at_lo_pole = singular_lo and abs(R - lo) <= _ZERO_FLOOR
    at_hi_pole = singular_hi and math.isfinite(hi) and abs(R - hi) <= 1e-12 * max(1.0, abs(hi))
    if singular_lo and not at_lo_pole and R - lo < 100 * _ZERO_FLOOR:
        raise DomainError(f"core radius {R} too close to the pole at {lo} to resolve")

    fM = f(M)
    legs = []  # (side, StartState)
    if at_lo_pole:
        st = _pole_start(b, f, M, lo, +1, eps_base, scale=min(1.0, width))
        legs.append((+1, st))
        prof._taylor = (lo, fM, 1.0 + st.b1, lo, st.r0)
    elif at_hi_pole:
        st = _pole_start(b, f, M, hi, -1, eps_base, scale=min(1.0, width))
        legs.append((-1, st))
        prof._taylor = (hi, fM, 1.0 + st.b1, st.r0, hi)
    else:
        gap = min(R - lo, hi - R) if math.isfinite(hi) else R - lo
        eps = min(eps_base, gap / 100.0) if gap > 0 else eps_base
        legs.append((+1, _regular_start(f, R, M, +1, eps)))
        legs.append((-1, _regular_start(f, R, M, -1, eps)))
        prof._taylor = (R, fM, 1.0, R - eps, R + eps)
        prof._eps = eps

    if fM <= 0:
        prof.failure = f"core is not a strict local maximum: f(M) = {fM} <= 0"

    pole_eps_hi = max(1e-9, 1e-12 * abs(hi)) if math.isfinite(hi) else 0.0
    nodes = [(R, M, 0.0)]
    diagnostics = []

    for side, st in legs:
        if side > 0:
            target = (hi - pole_eps_hi) if singular_hi else min(hi, R + opts.r_max_cap)
        else:
            target = lo + _ZERO_FLOOR if singular_lo else lo
        sol = _run_leg(b, f, st, target, opts, M)
        a, bnd = (min(st.r0, sol.t[-1]), max(st.r0, sol.t[-1]))
        prof._segments.append((a, bnd, sol.sol))
        uu, duu = sol.sol(sol.t)
        nodes.extend(zip(sol.t.tolist(), uu.tolist(), duu.tolist()))

        if sol.t_events[0].size:  # zero of U
            rz = _refine_zero(sol, sol.t_events[0][0], opts, M)
            uz, duz = (float(v) for v in sol.sol(rz))
            # stall threshold scales with the slope: what matters is the
            # radius error |U|/|U'|, not |U| itself
            if abs(uz) > opts.zero_tol * max(1.0, M) * (1.0 + abs(duz)):
                diagnostics.append(f"zero refinement stalled at r={rz} (|U|={abs(uz)})")
            # location error ~ (accumulated value error of U at the zero) / slope
            err = (opts.rtol * M + opts.atol + abs(uz)) / max(abs(duz), 1e-300)
            if side > 0:
                prof.r_plus, prof.dU_plus, prof.r_plus_err = rz, duz, err
            else:
                prof.r_minus, prof.dU_minus, prof.r_minus_err = rz, duz, err
        elif sol.t_events[1].size:  # U' vanished with U still positive
            rt = sol.t_events[1][0]
            ut = float(sol.sol(rt)[0])
            diagnostics.append(
                f"derivative vanished before the zero at r={rt} (U={ut}); profile turns")
        elif sol.t_events[2].size:  # runaway growth
            diagnostics.append(f"profile grew past {opts.u_growth_cap} * max(1, M); aborted leg")
        else:
            if singular_hi and side > 0:
                diagnostics.append(
                    f"reached the singular endpoint r={hi} with U > 0; no zero on the plus side")
            elif side > 0:
                diagnostics.append(
                    f"no sign change of U before the cap r={target} (r_max_cap={opts.r_max_cap})")
            else:
                diagnostics.append(f"no sign change of U down to r={target}")

    nodes.sort(key=lambda row: row[0])
    prof.nodes = np.array(nodes)

    if at_lo_pole:
        have_zeros = prof.r_plus is not None
    elif at_hi_pole:
        have_zeros = prof.r_minus is not None
    else:
        have_zeros = prof.r_plus is not None and prof.r_minus is not None
    if prof.failure is None and diagnostics:
        prof.failure = "; ".join(diagnostics)
    if prof.failure is None and have_zeros:
        prof.admissible = True
    elif prof.failure is None:
        prof.failure = "missing boundary zero"

    if strict and not prof.admissible:
        msg = prof.failure or "profile not admissible"
        if "no sign change" in msg or "singular endpoint" in msg:
            raise NoZeroFound(msg, profile=prof)
        raise NotAdmissible(msg, profile=prof)
    return prof


def solve_profile(sf: SpaceForm, f: Nonlinearity, cd: CauchyData,
                  opts: SolveOptions = SolveOptions(), strict: bool = True) -> ModelProfile:
    """Radial model profile on the space form (coefficient (n-1) cot_k)."""
    if cd.M > 0 and sf.k > 0 and not (0 <= cd.R < sf.r_bar):
        raise DomainError(f"core radius {cd.R} outside [0, r_bar = {sf.r_bar})")
    return solve_generic(sf.radial_coefficient, f, cd, (0.0, sf.r_bar), opts,
                         singular_lo=True, singular_hi=sf.k > 0, sf=sf, strict=strict)


def reflect_profile_check(sf: SpaceForm, f: Nonlinearity, cd: CauchyData,
                          opts: SolveOptions = SolveOptions(), samples: int = 41) -> float:
    """Max |U_R(r) - U_{r_bar - R}(r_bar - r)| over a shared grid (k > 0 only)."""
    if sf.k <= 0:
        raise DomainError("reflection symmetry requires k > 0")
    p1 = solve_profile(sf, f, cd, opts)
    p2 = solve_profile(sf, f, CauchyData(sf.r_bar - cd.R, cd.M), opts)
    lo = max(p1.r_lo, sf.r_bar - p2.r_hi)
    hi = min(p1.r_hi, sf.r_bar - p2.r_lo)
    rs = np.linspace(lo, hi, samples)
    return float(max(abs(p1.u(r) - p2.u(sf.r_bar - r)) for r in rs))
