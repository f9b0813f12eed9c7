"""Closed-form bound quantities evaluated on model profiles: branch inverses,
the model squared gradient, the lambda/mu coefficient pair, curvature bounds
for the boundary and top level set, area and isoperimetric ratios, the
distance-to-boundary lower bound, and hot-spot distance bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError, QuadratureError
from .ode import ModelProfile
from .spaceform import SpaceForm

_CHI_SAMPLES = 2001


class ComparisonPair:
    """One monotone branch of an admissible model profile.

    sign='plus' is the outer branch [R, r_plus] (profile decreasing in r),
    sign='minus' the inner branch [r_minus, R]. The value-to-radius inverse
    chi is available both as bracketed root finding on the dense profile
    (chi_inverse) and as a cached monotone interpolant (chi_fast).
    """

    def __init__(self, profile: ModelProfile, sign: str):
        if sign not in ("plus", "minus"):
            raise DomainError(f"sign must be 'plus' or 'minus', got {sign!r}")
        if not profile.admissible:
            raise DomainError(f"profile is not admissible: {profile.failure}")
        if sign == "minus" and profile.r_minus is None:
            raise DomainError("minus branch requires a positive core radius")
        if profile.sf is None:
            raise DomainError("comparison pairs need the ambient space form")
        self.profile = profile
        self.sign = sign
        self.sf: SpaceForm = profile.sf
        self.R = profile.cauchy.R
        self.M = profile.cauchy.M
        lo, hi = profile.branch_interval(sign)
        self.r_boundary = lo if sign == "minus" else hi
        self._lo, self._hi = lo, hi
        self._chi_cache = None

    # -- chi: value -> radius on this branch ---------------------------------------

    def chi_inverse(self, s: float) -> float:
        """Radius with U(radius) = s, by bracketed root finding."""
        if not (0.0 <= s < self.M):
            raise DomainError(f"level value {s} outside [0, M = {self.M})")
        lo, hi = self._lo, self._hi
        if s == 0.0:
            return self.r_boundary
        # keep the bracket away from the exact core where U - s may not change sign
        shrink = 1e-13 * max(1.0, abs(hi))
        a, b = lo, hi
        if self.sign == "plus":
            a = a + shrink
        else:
            b = b - shrink
        g = lambda r: self.profile.u(r) - s
        ga, gb = g(a), g(b)
        if ga * gb > 0:
            # s extremely close to M: the radius is next to the core
            if abs(s - self.M) < 1e-12 * max(1.0, self.M):
                return self.R
            raise DomainError(f"level {s} not bracketed on the {self.sign} branch")
        return brentq(g, a, b, xtol=1e-14, rtol=8.9e-16)

    def _build_chi_cache(self):
        lo, hi = self._lo, self._hi
        rs = np.linspace(lo, hi, _CHI_SAMPLES)
        us = self.profile.u(rs)
        if self.sign == "plus":
            rs, us = rs[::-1], us[::-1]  # ascending in u
        us, idx = np.unique(us, return_index=True)
        self._chi_cache = PchipInterpolator(us, rs[idx], extrapolate=False)

    def chi_fast(self, s):
        """Monotone-interpolant version of chi_inverse (cached)."""
        if self._chi_cache is None:
            self._build_chi_cache()
        x = self._chi_cache.x
        # the cached value range misses [0, M] by rounding at both ends
        tol = 1e-10 * max(1.0, self.M)
        s_cl = np.clip(s, x[0], x[-1])
        if np.any(np.abs(np.asarray(s) - s_cl) > tol):
            raise DomainError("level value outside the cached branch range")
        val = self._chi_cache(s_cl)
        return float(val) if np.ndim(s) == 0 else np.asarray(val)

    # -- pointwise quantities --------------------------------------------------------

    def model_gradient(self, s: float) -> float:
        """The model squared gradient at level s: U'(chi(s))^2; vanishes at
        the critical level s = M."""
        if s == self.M:
            return 0.0
        return self.profile.du(self.chi_inverse(s)) ** 2

    def lambda_of_r(self, r: float) -> float:
        """(-U'' + cot_k U') / U'^2, with U'' taken from the equation."""
        self._check_interior(r)
        du = self.profile.du(r)
        if du == 0.0:
            raise DomainError("lambda undefined where U' vanishes (core radius)")
        d2 = self.profile.d2u(r)
        return (-d2 + self.sf.cotk(r) * du) / (du * du)

    def mu_of_r(self, r: float) -> float:
        """f'(U) - n k + ((n+2)/n) lambda f(U)."""
        u = self.profile.u(r)
        lam = self.lambda_of_r(r)
        n, k = self.sf.n, self.sf.k
        return self.profile.f.d(u) - n * k + (n + 2.0) / n * lam * self.profile.f(u)

    def fbeta_weight(self, r: float) -> float:
        """(s_k(r) / U'(r))^(2 (n-1)/n), the weight of the comparison function."""
        du = self.profile.du(r)
        if du == 0.0:
            raise DomainError("weight undefined at the core radius")
        n = self.sf.n
        return (self.sf.sk(r) / abs(du)) ** (2.0 * (n - 1.0) / n)

    def _check_interior(self, r):
        lo, hi = self._lo, self._hi
        if not (lo <= r <= hi):
            raise DomainError(f"radius {r} outside the branch [{lo}, {hi}]")


# module-level forms matching the operation surface -----------------------------------

def chi_inverse(pair: ComparisonPair, s: float) -> float:
    return pair.chi_inverse(s)


def model_gradient_W(pair: ComparisonPair, s: float) -> float:
    return pair.model_gradient(s)


def lambda_of_r(pair: ComparisonPair, r: float) -> float:
    return pair.lambda_of_r(r)


def mu_of_r(pair: ComparisonPair, r: float) -> float:
    return pair.mu_of_r(r)


@dataclass
class MuScanReport:
    min_mu: float
    argmin: float
    all_nonnegative: bool
    tol: float
    grid_size: int


def mu_sign_scan(pair: ComparisonPair, grid=None, npoints: int = 400,
                 core_exclusion: float = 0.05, edge_exclusion: float = 1e-4,
                 tol: float = 1e-8) -> MuScanReport:
    """Minimum of mu over the branch grid.

    The default grid excludes a larger band near the core than near the
    boundary: lambda is a 0/0 ratio at the core and its floating-point noise
    grows like (distance)^-3 there, while it is well conditioned at the
    boundary where U' is bounded away from zero.
    """
    if grid is None:
        lo, hi = pair._lo, pair._hi
        w = hi - lo
        if pair.sign == "plus":
            a, b = lo + core_exclusion * w, hi - edge_exclusion * w
        else:
            a, b = lo + edge_exclusion * w, hi - core_exclusion * w
        grid = np.linspace(a, b, npoints)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("empty scan grid")
    vals = np.array([pair.mu_of_r(float(r)) for r in grid])
    i = int(np.argmin(vals))
    return MuScanReport(min_mu=float(vals[i]), argmin=float(grid[i]),
                        all_nonnegative=bool(vals[i] >= -tol), tol=tol,
                        grid_size=grid.size)


def mu_at_boundary(pair: ComparisonPair, rel_offset: float = 1e-3) -> float:
    """Boundary value of mu by one-sided Richardson extrapolation (3 nodes)."""
    rb = pair.r_boundary
    w = pair._hi - pair._lo
    d = rel_offset * w
    sgn = -1.0 if pair.sign == "plus" else 1.0
    m1 = pair.mu_of_r(rb + sgn * d)
    m2 = pair.mu_of_r(rb + sgn * 2 * d)
    m3 = pair.mu_of_r(rb + sgn * 4 * d)
    return (8.0 * m1 - 6.0 * m2 + m3) / 3.0


@dataclass
class CurvatureBounds:
    boundary_H_bound: float
    maxset_H_bound: Optional[float]


def curvature_bounds(pair: ComparisonPair) -> CurvatureBounds:
    """Mean-curvature bounds (inner orientation): at the extremal boundary
    point, and along a regular top level set (the latter needs R > 0)."""
    sf = pair.sf
    if pair.sign == "plus":
        boundary = sf.cotk(pair.profile.r_plus) if pair.profile.r_plus < sf.r_bar \
            else -math.inf
        maxset = -sf.cotk(pair.R) if pair.R > 0 else None
    else:
        boundary = -sf.cotk(pair.profile.r_minus)
        maxset = sf.cotk(pair.R) if pair.R > 0 else None
    return CurvatureBounds(boundary_H_bound=boundary, maxset_H_bound=maxset)


def area_ratio_factor(pair: ComparisonPair, t: float) -> float:
    """(s_k(R) / s_k(chi(t)))^(n-1): top-level-set area against the t level set."""
    if pair.R <= 0:
        raise DomainError("area factor needs a hypersurface top level set (R > 0)")
    if not (0.0 <= t < pair.M):
        raise DomainError(f"level value {t} outside [0, M)")
    sf = pair.sf
    return (sf.sk(pair.R) / sf.sk(pair.chi_inverse(t))) ** (sf.n - 1)


def isoperimetric_model_ratio(pair: ComparisonPair) -> float:
    """Volume-to-top-area ratio of the model branch:
    integral of s_k^(n-1) over the branch, divided by s_k(R)^(n-1)."""
    if pair.R <= 0:
        raise DomainError("isoperimetric ratio needs R > 0")
    sf = pair.sf
    lo, hi = pair._lo, pair._hi
    val, err = quad(lambda r: sf.sk(r) ** (sf.n - 1), lo, hi,
                    epsabs=1e-14, epsrel=1e-12, limit=300)
    if not math.isfinite(val):
        raise QuadratureError("volume quadrature failed")
    return val / sf.sk(pair.R) ** (sf.n - 1)


def isoperimetric_coarea_ratio(pair: ComparisonPair) -> float:
    """Same ratio computed through the level-value parameterization:
    integral over t of s_k(chi(t))^(n-1) / |U'(chi(t))|, with the square-root
    substitution t = M - w^2 removing the endpoint singularity at t = M."""
    if pair.R <= 0:
        raise DomainError("isoperimetric ratio needs R > 0")
    sf, M = pair.sf, pair.M
    t_cap = M * (1.0 - 1e-15)

    def integrand(w):
        t = min(max(M - w * w, 0.0), t_cap)
        r = pair.chi_inverse(t)
        du = abs(pair.profile.du(r))
        if du == 0.0:
            return 0.0
        return sf.sk(r) ** (sf.n - 1) / du * 2.0 * w

    val, err = quad(integrand, 0.0, math.sqrt(M), epsabs=1e-13, epsrel=1e-10, limit=400)
    if not math.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
        raise QuadratureError(f"coarea quadrature failed (err={err})")
    return val / sf.sk(pair.R) ** (sf.n - 1)


def serrin_lower_bound(sf: SpaceForm, d: float) -> float:
    """(2/n) s_k(d/2)^2 / s_k'(d): pointwise value floor at distance d from
    the boundary. For k > 0 the formula needs s_k'(d) > 0, i.e. d < r_bar/2."""
    if d < 0:
        raise DomainError("distance must be nonnegative")
    if d == 0:
        return 0.0
    dsk = sf.dsk(d)
    if dsk <= 0:
        raise DomainError(f"s_k'(d) = {dsk} <= 0 at d = {d}; the bound needs d < r_bar/2")
    return (2.0 / sf.n) * sf.sk(d / 2.0) ** 2 / dsk


@dataclass
class HotspotBounds:
    raw: float
    normalized: float
    strict: bool
    distance_bound: Optional[float] = None


def hotspot_bounds(pair: ComparisonPair, r_Omega: Optional[float] = None) -> HotspotBounds:
    """Distance of the maximum set from the boundary.

    raw: the branch width (r_plus - R, resp. R - r_minus). normalized: raw
    divided by sqrt((2/n) M + k M^2); multiplied by tan_k(r_Omega)/n it gives
    the distance lower bound. The minus branch version is strict.
    """
    sf, M = pair.sf, pair.M
    if pair.sign == "plus":
        # the spherical cap hypothesis constrains the branch touching r_plus
        if sf.k > 0 and pair.profile.r_plus > 0.5 * sf.r_bar + 1e-12:
            raise DomainError("hot-spot bound needs r_plus <= r_bar / 2 when k > 0")
        raw = pair.profile.r_plus - pair.R
    else:
        raw = pair.R - pair.profile.r_minus
    denom_sq = (2.0 / sf.n) * M + sf.k * M * M
    if denom_sq <= 0:
        raise DomainError("normalization sqrt((2/n)M + kM^2) is not real")
    normalized = raw / math.sqrt(denom_sq)
    dist = None
    if r_Omega is not None:
        dist = sf.tank(r_Omega) / sf.n * normalized
    return HotspotBounds(raw=raw, normalized=normalized,
                         strict=pair.sign == "minus", distance_bound=dist)


def bound_report(pair: ComparisonPair, r_Omega: Optional[float] = None) -> dict:
    """JSON-ready bound summary for one comparison pair."""
    cb = curvature_bounds(pair)
    hs = hotspot_bounds(pair, r_Omega)
    try:
        mu_scan = mu_sign_scan(pair)
        mu_min = mu_scan.min_mu
    except DomainError:
        mu_min = None
    report = {
        "sign": pair.sign,
        "R": pair.R,
        "M": pair.M,
        "r_minus": pair.profile.r_minus,
        "r_plus": pair.profile.r_plus,
        "curvature_bounds": {
            "boundary_H_bound": cb.boundary_H_bound,
            "maxset_H_bound": cb.maxset_H_bound,
        },
        "iso_ratio": isoperimetric_model_ratio(pair) if pair.R > 0 else None,
        "hotspot_raw": hs.raw,
        "hotspot_normalized": hs.normalized,
        "mu_min": mu_min,
    }
    if r_Omega is not None:
        report["hotspot_distance_bound"] = hs.distance_bound
    return report
