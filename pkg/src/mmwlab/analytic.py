"""Analytic downlink model: LOS statistics, SIR coverage, cell load, rate.

The network is a homogeneous PPP of BSs over a Boolean field of rectangular
blockages. A bias beta in [0, 1] contracts each building wall; BSs that see
a contracted wall under at least their beamwidth lock their beam onto that
wall ("dedicated" BSs), which thins main-lobe interference for everyone
else. All closed forms below assume the mean-LOS-disk approximation of the
blockage process.

Inputs use the ScenarioParams units (densities per km^2, meters, radians,
linear gains); conversion to per-m^2 happens inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erf

_PER_KM2_TO_M2 = 1e-6


class DomainError(ValueError):
    """Parameter combination outside the model's admissible domain."""


class InfiniteLosDistance(DomainError):
    """Zero blockage density: the mean LOS distance is unbounded."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to meet the requested tolerance."""

    def __init__(self, message: str, achieved_abs_err: float):
        super().__init__(message)
        self.achieved_abs_err = achieved_abs_err


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdiv: int = 200


_DEFAULT_QUAD = QuadratureSettings()


def _quad(f, a: float, b: float, settings: QuadratureSettings) -> float:
    if b <= a:
        return 0.0
    out = integrate.quad(f, a, b, epsabs=settings.abs_tol,
                         epsrel=settings.rel_tol, limit=settings.max_subdiv,
                         full_output=1)
    if len(out) > 3:
        raise QuadratureError(
            f"quadrature did not converge on [{a:g}, {b:g}]; "
            f"achieved abs error {out[1]:.3e}", achieved_abs_err=float(out[1]))
    return float(out[0])


# ---------------------------------------------------------------------------
# LOS statistics and densities


def los_distance(lambda_ell: float, d_l: float, d_w: float) -> float:
    """Mean LOS distance [m] of the rectangle field.

    lambda_ell is per km^2; d_l, d_w in meters.
    """
    if lambda_ell < 0 or d_l < 0 or d_w < 0 or d_l + d_w <= 0:
        raise DomainError("building density and footprint must be nonnegative, "
                          "with a positive perimeter")
    if lambda_ell == 0:
        raise InfiniteLosDistance("lambda_ell = 0 gives an unbounded LOS distance")
    lam = lambda_ell * _PER_KM2_TO_M2
    return math.pi * math.sqrt(2.0 * math.exp(-lam * d_l * d_w)) / (2.0 * lam * (d_l + d_w))


def effective_mainlobe_radius(r_l: float, theta: float, beta: float, d_l: float) -> float:
    """Radius [m] within which a BS can lock onto a beta-contracted wall.

    Shrinks linearly with the bias: r_l - beta*d_l/(2*tan(theta/2)),
    floored at zero.
    """
    if not 0.0 < theta < math.pi:
        raise DomainError(f"beamwidth must lie in (0, pi), got {theta}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"bias must lie in [0, 1], got {beta}")
    if r_l < 0 or d_l < 0:
        raise DomainError("r_l and d_l must be nonnegative")
    return max(r_l - beta * d_l / (2.0 * math.tan(theta / 2.0)), 0.0)


def ue_densities(lambda_u: float, gamma_c: float, lambda_ell: float,
                 d_l: float, d_w: float, d_c: float) -> tuple[float, float]:
    """(near-band, elsewhere) UE densities [1/km^2] for concentration gamma_c.

    B is the area fraction of the near-building band, I the indoor
    fraction; both must leave room for open space (B + I < 1).
    """
    lam_ell = lambda_ell * _PER_KM2_TO_M2
    b_frac = 2.0 * lam_ell * (d_l + d_w) * d_c
    i_frac = lam_ell * d_l * d_w
    if b_frac <= 0:
        raise DomainError("near-band fraction must be positive")
    if b_frac + i_frac >= 1.0:
        raise DomainError(
            f"band + indoor fractions must stay below 1, got {b_frac + i_frac:.4f}")
    lam_n = lambda_u * gamma_c * (1.0 - i_frac) / b_frac
    lam_r = lambda_u * (1.0 - gamma_c) * (1.0 - i_frac) / (1.0 - b_frac - i_frac)
    return lam_n, lam_r


def mainlobe_thinning_prob(theta: float, gain_ratio: float, alpha: float) -> float:
    """Equivalent main-lobe interferer fraction for isotropically pointed BSs.

    gain_ratio is g_s/g_m. The side-lobe population is folded in through
    the displacement exponent 2/alpha.
    """
    if not 0.0 < theta <= 2.0 * math.pi:
        raise DomainError(f"beamwidth must lie in (0, 2*pi], got {theta}")
    if not 0.0 < gain_ratio <= 1.0:
        raise DomainError(f"g_s/g_m must lie in (0, 1], got {gain_ratio}")
    if alpha < 2.0:
        raise DomainError(f"alpha must be >= 2, got {alpha}")
    w = theta / (2.0 * math.pi)
    return w + (1.0 - w) * gain_ratio ** (2.0 / alpha)


def region1_dbs_fraction(theta: float) -> float:
    """Probability that a BS right next to a wall is dedicated, clamped to 1.

    The raw expression exceeds 1 for narrow beams; it is a probability, so
    values above 1 are truncated.
    """
    if not 0.0 < theta < math.pi:
        raise DomainError(f"beamwidth must lie in (0, pi), got {theta}")
    s, c = math.sin(theta), math.cos(theta)
    raw = ((math.pi - theta) ** 2 / (4.0 * s * s) + c / (4.0 * s)) \
        * (8.0 * math.tan(theta / 2.0) ** 2 / math.pi)
    return min(max(raw, 0.0), 1.0)


def region1_interferer_prob(theta: float, p_a: float) -> float:
    """Main-lobe interferer probability right next to the serving wall."""
    if not 0.0 <= p_a <= 1.0:
        raise DomainError(f"p_a must lie in [0, 1], got {p_a}")
    q = region1_dbs_fraction(theta)
    return q * (1.0 - p_a) + p_a


def rayleigh_kernel(a: float, b: float, x: float, lambda_b: float) -> float:
    """Closed form of int_a^b pi*lam_b*r*exp(-(pi/2)*lam_b*r^2*x) dr.

    lambda_b per km^2; a, b in meters; x a positive dimensionless factor.
    """
    if a < 0 or b < a:
        raise DomainError("need 0 <= a <= b")
    if x <= 0:
        raise DomainError(f"x must be positive, got {x}")
    lam = lambda_b * _PER_KM2_TO_M2
    k = (math.pi / 2.0) * lam * x
    return (math.exp(-k * a * a) - math.exp(-k * b * b)) / x


# ---------------------------------------------------------------------------
# SIR coverage


def _band_integral(lo: float, hi: float, half_alpha: float) -> float:
    """int_lo^hi du / (1 + u^(alpha/2)), exact log form at alpha = 2."""
    if hi <= lo:
        return 0.0
    if half_alpha == 1.0:
        return math.log1p(hi) - math.log1p(lo)
    total = 0.0
    cut = 1e8
    if lo < cut:
        part = integrate.quad(lambda u: 1.0 / (1.0 + u ** half_alpha),
                              lo, min(hi, cut), epsabs=1e-14, epsrel=1e-11,
                              limit=200)[0]
        total += part
    if hi > cut:
        # Two-term power-law tail of the integrand beyond the cut.
        def tail(x):
            return x ** (1.0 - half_alpha) / (half_alpha - 1.0) \
                - x ** (1.0 - 2.0 * half_alpha) / (2.0 * half_alpha - 1.0)
        total += tail(max(lo, cut)) - tail(hi)
    return total


def noise_power_dbm(params) -> float:
    """Thermal noise power over the system bandwidth, with noise figure."""
    return -174.0 + 10.0 * math.log10(params.bandwidth_w) + params.noise_figure_db


def snr_factor(params, r: float) -> float:
    """Rayleigh SNR survival exp(-t*sigma^2*r^alpha/(P*g_m)) at distance r."""
    sigma2_mw = 10.0 ** (noise_power_dbm(params) / 10.0)
    p_mw = 10.0 ** (params.tx_power_dbm / 10.0)
    return math.exp(-params.t * sigma2_mw * r ** params.alpha / (p_mw * params.g_m))


def _coverage_pieces(params, beta: float):
    """Shared geometry for the coverage integrals."""
    r_l = los_distance(params.lambda_ell, params.d_l, params.d_w)
    r_b = effective_mainlobe_radius(r_l, params.theta, beta, params.d_l)
    lam_b = params.lambda_b * _PER_KM2_TO_M2
    half_alpha = params.alpha / 2.0
    t2a = params.t ** (2.0 / params.alpha)
    p_a = mainlobe_thinning_prob(params.theta, params.g_s / params.g_m, params.alpha)
    gs_mult = (params.g_s * params.t / params.g_m) ** (2.0 / params.alpha)
    return r_l, r_b, lam_b, half_alpha, t2a, p_a, gs_mult


def coverage_far(params, beta: float,
                 settings: QuadratureSettings = _DEFAULT_QUAD,
                 with_noise: bool = False) -> float:
    """SIR coverage P(SIR > t) of a typical open-space UE, clamped to [0, 1].

    Serving BS is the nearest in the mean-LOS disk; interferers closer
    than the dedicated-BS radius are beam-thinned, farther ones are
    side-lobe only.
    """
    r_l, r_b, lam_b, ha, t2a, p_a, gs_mult = _coverage_pieces(params, beta)

    def noise_mult(r):
        return snr_factor(params, r) if with_noise else 1.0

    def inner(r):
        if r <= 0.0:
            return 0.0
        u0 = 1.0 / t2a
        u_edge = r_l * r_l / (r * r * t2a)
        if r <= r_b:
            u_b = r_b * r_b / (r * r * t2a)
            bands = p_a * t2a * _band_integral(u0, u_b, ha) \
                + gs_mult * _band_integral(u_b, u_edge, ha)
        else:
            bands = gs_mult * _band_integral(u0, u_edge, ha)
        return 2.0 * math.pi * lam_b * r \
            * math.exp(-math.pi * lam_b * r * r * (1.0 + bands)) * noise_mult(r)

    val = _quad(inner, 0.0, r_b, settings) + _quad(inner, r_b, r_l, settings)
    return min(max(val, 0.0), 1.0)


def coverage_near(params, beta: float,
                  settings: QuadratureSettings = _DEFAULT_QUAD,
                  with_noise: bool = False) -> float:
    """SIR coverage of a typical wall-attached UE, clamped to [0, 1].

    The UE sees a half-disk of radius r_l. Interferers within r_1 of the
    UE include dedicated BSs locked onto the UE's own wall (main-lobe with
    probability p_ell); the middle ring is beam-thinned; the far ring is
    side-lobe only.
    """
    r_l, r_b, lam_b, ha, t2a, p_a, gs_mult = _coverage_pieces(params, beta)
    r_eff = max(r_b, r_l / 2.0)
    r_1 = min(r_l - r_b, r_l / 2.0)
    p_ell = region1_interferer_prob(params.theta, p_a)

    def noise_mult(r):
        return snr_factor(params, r) if with_noise else 1.0

    def inner(r):
        if r <= 0.0:
            return 0.0
        rr = r * r
        u0 = 1.0 / t2a
        u1 = max(r_eff * r_eff, rr) / (rr * t2a)
        u_edge = r_l * r_l / (rr * t2a)
        if r <= r_1:
            u2 = r_1 * r_1 / (rr * t2a)
            bands = p_ell * t2a * _band_integral(u0, u2, ha) \
                + p_a * t2a * _band_integral(u2, u1, ha) \
                + gs_mult * _band_integral(u1, u_edge, ha)
        else:
            bands = p_a * t2a * _band_integral(u0, u1, ha) \
                + gs_mult * _band_integral(u1, u_edge, ha)
        return math.pi * lam_b * r \
            * math.exp(-(math.pi / 2.0) * lam_b * rr * (1.0 + bands)) * noise_mult(r)

    val = _quad(inner, 0.0, r_1, settings) + _quad(inner, r_1, r_l, settings)
    return min(max(val, 0.0), 1.0)


def coverage(params, beta: float,
             settings: QuadratureSettings = _DEFAULT_QUAD,
             with_noise: bool = False) -> float:
    """Population SIR coverage: gamma_c-weighted mix of both UE classes."""
    gc = params.gamma_c
    s_n = coverage_near(params, beta, settings, with_noise) if gc > 0.0 else 0.0
    s_r = coverage_far(params, beta, settings, with_noise) if gc < 1.0 else 0.0
    return min(max(gc * s_n + (1.0 - gc) * s_r, 0.0), 1.0)


def coverage_with_noise(params, beta: float,
                        settings: QuadratureSettings = _DEFAULT_QUAD) -> float:
    """SINR coverage under the independent signal/noise split."""
    return coverage(params, beta, settings, with_noise=True)


# ---------------------------------------------------------------------------
# Cell load and rate


def observed_cell_area(params, beta: float) -> tuple[float, float]:
    """(A_c, A_r) [m^2]: mean open-space cell area of a typical non-dedicated
    BS, and the part of it that lies outside every near-building band.

    Both are floored at the dedicated-radius disk; A_r never exceeds A_c.
    """
    r_l = los_distance(params.lambda_ell, params.d_l, params.d_w)
    r_b = effective_mainlobe_radius(r_l, params.theta, beta, params.d_l)
    lam_b = params.lambda_b * _PER_KM2_TO_M2
    b_dl = beta * params.d_l
    d_c = params.d_c

    shave_c = math.pi * lam_b * r_l * (r_l ** 2 - r_b ** 2) \
        - (2.0 / 3.0) * math.pi * lam_b * (r_l ** 3 - r_b ** 3)
    a_c = max(math.pi * r_b ** 2, math.pi * r_l ** 2 - (b_dl / 2.0) * shave_c)

    rp = max(r_l - d_c, 0.0)
    if d_c > r_l - r_b:
        a_r = math.pi * rp ** 2
    else:
        shave_r = rp * (rp ** 2 - r_b ** 2) \
            - (2.0 / 3.0) * (rp ** 3 - (r_b - d_c) ** 3)
        a_r = max(math.pi * r_b ** 2,
                  math.pi * rp ** 2 - (b_dl * math.pi * lam_b / 2.0) * shave_r)
    return a_c, min(a_r, a_c)


def mean_load_far(params, beta: float, literal_load_trigger: bool = False) -> float:
    """Mean number of open-space UEs served by the typical non-dedicated BS.

    When the dedicated radius shrinks below the mean 6th-neighbor distance
    the surviving cells expand and absorb near-band UEs; otherwise the
    typical cell keeps its share of open-space UEs. The trigger distance
    uses the BS density by default; `literal_load_trigger` switches it to
    the UE density.
    """
    r_l = los_distance(params.lambda_ell, params.d_l, params.d_w)
    r_b = effective_mainlobe_radius(r_l, params.theta, beta, params.d_l)
    lam_n_km2, lam_r_km2 = ue_densities(params.lambda_u, params.gamma_c,
                                        params.lambda_ell, params.d_l,
                                        params.d_w, params.d_c)
    lam_b = params.lambda_b * _PER_KM2_TO_M2
    trigger_density = (params.lambda_u if literal_load_trigger
                       else params.lambda_b) * _PER_KM2_TO_M2
    if r_b < 0.68 / math.sqrt(trigger_density):
        if r_b <= 0.0:
            raise DomainError(
                "dedicated radius reached zero: bias beyond the admissible range "
                "for the expanded-cell load formula")
        a_c, a_r = observed_cell_area(params, beta)
        lam_n = lam_n_km2 * _PER_KM2_TO_M2
        lam_r = lam_r_km2 * _PER_KM2_TO_M2
        return 1.28 * ((a_c - a_r) * lam_n + a_r * lam_r) \
            / (math.pi * lam_b * r_b ** 2)
    return 1.28 * lam_r_km2 / params.lambda_b


def _c1(x: float, lam_b: float) -> float:
    """int_0^x pi*lam_b*r^2*exp(-pi*lam_b*r^2/2) dr, closed form."""
    return erf(x * math.sqrt(math.pi * lam_b / 2.0)) / math.sqrt(2.0 * lam_b) \
        - x * math.exp(-math.pi * lam_b * x * x / 2.0)


def _half_disk_weight(a: float, b: float, lam_b: float) -> float:
    """P(a <= nearest half-disk BS distance <= b)."""
    return math.exp(-math.pi * lam_b * a * a / 2.0) \
        - math.exp(-math.pi * lam_b * b * b / 2.0)


def mean_load_near(params, beta: float, literal_load_trigger: bool = False) -> float:
    """Mean number of UEs sharing the typical wall-attached UE's serving BS.

    Mixes the open-space load (when the serving BS is far) with the strip
    of near-band and open-space UEs captured by a wall-locked beam of
    width beta*d_l.
    """
    r_l = los_distance(params.lambda_ell, params.d_l, params.d_w)
    r_b = effective_mainlobe_radius(r_l, params.theta, beta, params.d_l)
    n_r = mean_load_far(params, beta, literal_load_trigger)
    lam_b = params.lambda_b * _PER_KM2_TO_M2
    lam_n_km2, lam_r_km2 = ue_densities(params.lambda_u, params.gamma_c,
                                        params.lambda_ell, params.d_l,
                                        params.d_w, params.d_c)
    lam_n = lam_n_km2 * _PER_KM2_TO_M2
    lam_r = lam_r_km2 * _PER_KM2_TO_M2
    d_c = params.d_c
    r_1 = min(r_l - r_b, r_l / 2.0)

    strip = lam_n * _c1(d_c, lam_b) \
        + (d_c * lam_n - d_c * lam_r / 2.0) * _half_disk_weight(d_c, r_1, lam_b) \
        + lam_r * (_c1(r_1, lam_b) - _c1(d_c, lam_b))
    num = _half_disk_weight(r_1, r_l, lam_b) * n_r + 0.64 * beta * params.d_l * strip
    return num / (1.0 - math.exp(-math.pi * lam_b * r_l * r_l / 2.0))


def average_rate(params, beta: float,
                 settings: QuadratureSettings = _DEFAULT_QUAD,
                 literal_load_trigger: bool = False,
                 log_base: float = 2.0) -> float:
    """Mean per-UE rate [bit/s]: load-shared spectral efficiency at the
    coverage threshold, mixed over the two UE classes."""
    spectral = math.log(1.0 + params.t) / math.log(log_base)
    w = params.bandwidth_w
    gc = params.gamma_c
    noisy = params.include_noise
    total = 0.0
    if gc > 0.0:
        s_n = coverage_near(params, beta, settings, with_noise=noisy)
        n_n = mean_load_near(params, beta, literal_load_trigger)
        total += w * gc * s_n * spectral / (1.0 + n_n)
    if gc < 1.0:
        s_r = coverage_far(params, beta, settings, with_noise=noisy)
        n_r = mean_load_far(params, beta, literal_load_trigger)
        total += w * (1.0 - gc) * s_r * spectral / (1.0 + n_r)
    return total


# ---------------------------------------------------------------------------
# Bias optimization

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization on [a, b] to width `tol`."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
    xm = (a + b) / 2.0
    return xm, f(xm)


def _grid_refine_max(f, lo: float, hi: float,
                     n_grid: int = 201, tol: float = 1e-4) -> tuple[float, float]:
    """Uniform grid scan plus golden-section refinement around the best cell.

    Returns the better of the refined point and the best grid point, so
    exact grid endpoints survive when the optimum sits on the boundary.
    """
    xs = np.linspace(lo, hi, n_grid)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, n_grid - 1)]
    xr, vr = _golden_max(f, float(a), float(b), tol)
    if vr > vals[i]:
        return xr, vr
    return float(xs[i]), float(vals[i])


def optimal_bias_coverage(params,
                          settings: QuadratureSettings = _DEFAULT_QUAD) -> tuple[float, float]:
    """(beta*, S*) maximizing population coverage.

    Beyond beta = tan(theta/2)*r_l/d_l the wall-attached coverage freezes
    while the open-space one keeps rising, so when that knee lies inside
    [0, 1] only the knee segment and the endpoint beta = 1 can host the
    maximum.
    """
    def f(b):
        return coverage(params, b, settings)

    r_l = los_distance(params.lambda_ell, params.d_l, params.d_w)
    knee = math.tan(params.theta / 2.0) * r_l / params.d_l
    if knee < 1.0:
        bx, vx = _grid_refine_max(f, 0.0, knee)
        v_end = f(1.0)
        if v_end > vx:
            return 1.0, v_end
        return bx, vx
    return _grid_refine_max(f, 0.0, 1.0)


def optimal_bias_rate(params,
                      settings: QuadratureSettings = _DEFAULT_QUAD,
                      literal_load_trigger: bool = False) -> tuple[float, float]:
    """(beta*, rate*) maximizing the average per-UE rate.

    In the lightly loaded regime (lambda_u/lambda_b < 1e-3) the load terms
    vanish and the rate optimum collapses onto the coverage optimum. Bias
    values whose load model leaves the admissible domain are skipped.
    """
    if params.lambda_u / params.lambda_b < 1e-3:
        beta_s, _ = optimal_bias_coverage(params, settings)
        return beta_s, average_rate(params, beta_s, settings, literal_load_trigger)

    def f(b):
        try:
            return average_rate(params, b, settings, literal_load_trigger)
        except DomainError:
            return -math.inf

    beta_r, rate_r = _grid_refine_max(f, 0.0, 1.0)
    if not math.isfinite(rate_r):
        raise DomainError("rate objective undefined across the whole bias range")
    return beta_r, rate_r


# ---------------------------------------------------------------------------
# Report

ANALYTIC_CSV_COLUMNS = [
    "beta", "r_l", "r_beta", "lambda_n", "lambda_r", "p_a", "p_ell",
    "s_n", "s_r", "s", "n_n", "n_r", "rate",
]


@dataclass(frozen=True)
class AnalyticReport:
    beta: float
    r_l: float
    r_beta: float
    lambda_n: float
    lambda_r: float
    p_a: float
    p_ell: float
    s_n: float
    s_r: float
    s: float
    n_n: float
    n_r: float
    rate: float
    snr_factor: float | None = None

    def csv_row(self) -> list[float]:
        return [getattr(self, c) for c in ANALYTIC_CSV_COLUMNS]


def analytic_report(params, beta: float | None = None,
                    settings: QuadratureSettings = _DEFAULT_QUAD,
                    literal_load_trigger: bool = False) -> AnalyticReport:
    """Evaluate the full analytic chain at one bias point."""
    b = params.beta if beta is None else beta
    r_l = los_distance(params.lambda_ell, params.d_l, params.d_w)
    r_b = effective_mainlobe_radius(r_l, params.theta, b, params.d_l)
    lam_n, lam_r = ue_densities(params.lambda_u, params.gamma_c,
                                params.lambda_ell, params.d_l,
                                params.d_w, params.d_c)
    p_a = mainlobe_thinning_prob(params.theta, params.g_s / params.g_m, params.alpha)
    p_ell = region1_interferer_prob(params.theta, p_a)
    noisy = params.include_noise
    s_n = coverage_near(params, b, settings, with_noise=noisy)
    s_r = coverage_far(params, b, settings, with_noise=noisy)
    s = min(max(params.gamma_c * s_n + (1.0 - params.gamma_c) * s_r, 0.0), 1.0)
    n_n = mean_load_near(params, b, literal_load_trigger)
    n_r = mean_load_far(params, b, literal_load_trigger)
    spectral = math.log2(1.0 + params.t)
    rate = params.bandwidth_w * (params.gamma_c * s_n * spectral / (1.0 + n_n)
                                 + (1.0 - params.gamma_c) * s_r * spectral / (1.0 + n_r))
    ratio = None
    if noisy:
        s_clean = coverage(params, b, settings, with_noise=False)
        ratio = s / s_clean if s_clean > 0 else 1.0
    return AnalyticReport(beta=b, r_l=r_l, r_beta=r_b, lambda_n=lam_n,
                          lambda_r=lam_r, p_a=p_a, p_ell=p_ell, s_n=s_n,
                          s_r=s_r, s=s, n_n=n_n, n_r=n_r, rate=rate,
                          snr_factor=ratio)
