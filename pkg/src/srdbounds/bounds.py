"""Lower bounds on the sampling rate needed for approximate support recovery.

Closed-form noiseless bounds, implicit noisy bounds solved numerically,
genie-aided bounds maximized over the revealed fraction, simplified scaling
shapes, and curve helpers (``best_lower``, ``alpha_curve``).

Every evaluator returns the largest sampling rate that the corresponding
necessary condition rules out, i.e. a lower bound on the achievable rate at
the requested distortion.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, truncate
from .ratefun import SourceParams, delta, info_G, info_V, rate_R, source_functionals

log = logging.getLogger(__name__)

RHO_GRID_POINTS = 2000
RHO_GRID_FLOOR = 1e-8
RHO_RANGE_CAP = 1e9
BISECTION_STEPS = 80
BETA_GRID_POINTS = 200
BETA_REFINE_RTOL = 1e-6


class BoundId(str, enum.Enum):
    """Identifies which necessary condition produced a bound value."""

    T1_NOISELESS = "t1_noiseless"
    P2_NOISELESS_IID = "p2_noiseless_iid"
    T3_NOISELESS_IID_F = "t3_noiseless_iid_f"
    C1_TEST = "c1_test"
    P3_GENERAL = "p3_general"
    T2_GENIE = "t2_genie"
    P4_IID = "p4_iid"
    P5_IID_GAUSSIAN = "p5_iid_gaussian"
    P6_IID_ENTROPY = "p6_iid_entropy"
    T4_IID_GENIE = "t4_iid_genie"
    S_COR_THM2 = "s_cor_thm2"
    S_NOISELESS_SIMPLE = "s_noiseless_simple"
    P7_SHAPE = "p7_shape"
    P8_SHAPE = "p8_shape"


@dataclass(frozen=True)
class ImplicitSolveReport:
    """Outcome of solving one implicit rate inequality.

    ``rho_lower`` is the reported lower bound, ``bracket`` the final interval
    around the crossing, ``residual`` the defining deficit evaluated at
    ``rho_lower``.  ``diagnostic`` is set when the scan range was exhausted
    with the inequality still violated (the bound is then at least the range
    end).
    """

    rho_lower: float
    crossings_found: int
    bracket: tuple[float, float]
    residual: float
    diagnostic: str | None = None


@dataclass
class BoundCurve:
    """A computed curve of bound values with its solver metadata."""

    bound: BoundId
    source: SourceParams
    axis: str
    points: list[tuple[float, float]]
    solver_meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Vectorized twins of the scalar rate functions (hot path of the solvers)
# ---------------------------------------------------------------------------


def _xi_vec(r, gamma):
    sr = np.sqrt(r)
    s1 = np.sqrt(gamma * (sr + 1.0) ** 2 + 1.0)
    s2 = np.sqrt(gamma * (sr - 1.0) ** 2 + 1.0)
    return 4.0 * gamma * gamma * r / (s1 + s2) ** 2


def _info_g_vec(r, gamma):
    if gamma == 0.0:
        return np.zeros_like(np.asarray(r, dtype=float))
    x = _xi_vec(r, gamma)
    return 0.5 * (r * np.log1p(gamma - x) + np.log1p(r * gamma - x) - x / gamma)


def _delta_vec(r):
    r = np.asarray(r, dtype=float)
    out = np.ones_like(r)
    inner = r < 1.0
    out[inner] = np.exp((1.0 - 1.0 / r[inner]) * np.log1p(-r[inner]))
    return out


def _info_v_vec(r, gamma):
    r = np.asarray(r, dtype=float)
    if gamma == 0.0:
        return np.zeros_like(r)
    low = np.minimum(r, 1.0)
    high = np.maximum(r, 1.0)
    val_low = 0.5 * r * np.log1p(gamma * _delta_vec(low) / math.e)
    val_high = 0.5 * np.log1p(r * gamma * _delta_vec(1.0 / high) / math.e)
    return np.where(r <= 1.0, val_low, val_high)


# ---------------------------------------------------------------------------
# Implicit-inequality solver
# ---------------------------------------------------------------------------


def _solve_implicit(deficit_vec, deficit_scalar, omega: float) -> ImplicitSolveReport:
    """Largest rate at which the deficit is still negative (bound violated).

    The deficit is LHS - RHS of the defining inequality; achievable rates have
    nonnegative deficit, so the lower bound is the last negative-to-nonnegative
    crossing on an ascending log grid, refined by bisection.  The scan range
    grows geometrically while the inequality is still violated at its end; the
    deficit of every supported bound eventually turns positive, so this
    terminates well before the hard cap except for pathological inputs.
    """
    hi = max(8.0, 40.0 * omega)
    while True:
        grid = np.geomspace(RHO_GRID_FLOOR, hi, RHO_GRID_POINTS)
        vals = deficit_vec(grid)
        neg = vals < 0.0
        if neg[-1] and hi < RHO_RANGE_CAP:
            hi = min(hi * 100.0, RHO_RANGE_CAP)
            continue
        break
    crossings = int(np.count_nonzero(neg[:-1] & ~neg[1:]))
    if not neg.any():
        # Not even the smallest rate in range is ruled out.
        return ImplicitSolveReport(0.0, 0, (0.0, RHO_GRID_FLOOR), float(vals[0]))
    if neg[-1]:
        return ImplicitSolveReport(
            float(grid[-1]),
            crossings,
            (float(grid[-1]), math.inf),
            float(vals[-1]),
            diagnostic="range-exceeded: inequality still violated at scan end",
        )
    if crossings > 1:
        log.warning(
            "implicit solve found %d crossings; keeping the largest violated rate",
            crossings,
        )
    last_neg = int(np.nonzero(neg)[0][-1])
    lo, hi_b = float(grid[last_neg]), float(grid[last_neg + 1])
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi_b)
        if mid == lo or mid == hi_b:
            break
        if deficit_scalar(mid) < 0.0:
            lo = mid
        else:
            hi_b = mid
    return ImplicitSolveReport(lo, crossings, (lo, hi_b), deficit_scalar(lo))


# ---------------------------------------------------------------------------
# Noiseless bounds
# ---------------------------------------------------------------------------


def t1_noiseless(omega: float, alpha: float) -> float:
    """Noiseless rate-distortion tradeoff for the unconstrained source."""
    _check_args(omega, alpha)
    if alpha >= 1.0 - omega:
        return 0.0
    return omega - omega / (1.0 - omega) * alpha


def p2_noiseless_iid(omega: float, alpha: float) -> float:
    """Noiseless tradeoff restricted to i.i.d. matrices (no rate sharing)."""
    _check_args(omega, alpha)
    if alpha >= 1.0 - omega:
        return 0.0
    return omega


def c1_test(source: SourceParams, alpha: float) -> bool:
    """True when the full rate ``omega`` stays necessary for this source."""
    r = rate_R(source.omega, alpha)
    return source.theta > delta(source.omega) * math.exp(-2.0 * r / source.omega)


def t3_noiseless_iid(source: SourceParams, alpha: float) -> float:
    """Noiseless i.i.d.-matrix bound for a source with a density.

    Returns the supremum of rates below ``omega`` ruled out by the
    entropy-power condition; 0 for sources without a density.
    """
    omega = source.omega
    _check_args(omega, alpha)
    theta = source.theta
    if theta == 0.0:
        log.debug("t3: source has no density; noiseless bound degenerates to 0")
        return 0.0
    r_target = rate_R(omega, alpha)
    if r_target == 0.0:
        return 0.0
    log_inv_theta = math.log(1.0 / theta)

    def deficit_scalar(rho):
        val = 0.5 * rho * (
            log_inv_theta + math.log(delta(rho)) - math.log(delta(rho / omega))
        )
        return val - r_target

    if deficit_scalar(omega * (1.0 - 1e-12)) < 0.0:
        return omega

    grid = np.linspace(omega * 1e-6, omega * (1.0 - 1e-12), 4000)
    vals = np.array([deficit_scalar(r) for r in grid])
    neg = vals < 0.0
    if not neg.any():
        return 0.0
    last_neg = int(np.nonzero(neg)[0][-1])
    lo = float(grid[last_neg])
    hi = float(grid[min(last_neg + 1, len(grid) - 1)])
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if deficit_scalar(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def s_noiseless_simple(source: SourceParams, alpha: float) -> float:
    """Closed-form noiseless bound min{omega, 2R / (1 + log(1/theta))}."""
    _check_args(source.omega, alpha)
    if source.theta == 0.0:
        return 0.0
    r = rate_R(source.omega, alpha)
    return min(source.omega, 2.0 * r / (1.0 + math.log(1.0 / source.theta)))


# ---------------------------------------------------------------------------
# Noisy bounds, arbitrary matrices
# ---------------------------------------------------------------------------


def p3_general(source: SourceParams, alpha: float) -> float:
    """Mutual-information bound valid for any sampling matrix."""
    _check_args(source.omega, alpha)
    if source.variance <= 0:
        raise ValueError("source variance must be positive")
    r = rate_R(source.omega, alpha)
    if r == 0.0:
        return 0.0
    return 2.0 * r / math.log1p(source.variance)


def _genie_params(source: SourceParams, beta: float):
    """Effective (prefactor, sparsity rate, variance, entropy power) after a
    genie reveals the largest ``1 - beta`` fraction of nonzero values."""
    omega = source.omega
    tr = truncate(source.dist, beta)
    om_b = beta * omega
    pref = 1.0 - (1.0 - beta) * omega
    v_eff = om_b * (1.0 - om_b) * tr.mean**2 + om_b * tr.variance
    if tr.diff_entropy is None:
        vh_eff = 0.0
    else:
        vh_eff = om_b * math.exp(2.0 * tr.diff_entropy) / (2.0 * math.pi * math.e)
    return pref, om_b, v_eff, vh_eff


def _beta_grid(alpha: float) -> np.ndarray:
    lo = max(1e-12, alpha * 1e-9)
    offsets = np.geomspace(lo, 1.0 - alpha, BETA_GRID_POINTS - 1)
    grid = np.concatenate(([alpha], alpha + offsets))
    grid[-1] = 1.0
    return grid


def _golden_max(f, lo: float, hi: float, rtol: float = BETA_REFINE_RTOL):
    """Golden-section maximization with relative interval tolerance."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * max(abs(a), abs(b), 1e-300):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc > fd else d
    return x, max(fc, fd)


def t2_genie(source: SourceParams, alpha: float) -> tuple[float, float]:
    """Genie bound for any matrix, maximized over the retained fraction.

    Returns the bound and the maximizing retained fraction ``beta_star``.
    """
    omega = source.omega
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    _check_args(omega, alpha)

    def objective(beta):
        pref, om_b, v_eff, _ = _genie_params(source, beta)
        r = rate_R(om_b / pref, min(alpha / beta, 1.0))
        if r == 0.0:
            return 0.0
        return 2.0 * pref * r / math.log1p(v_eff)

    grid = _beta_grid(alpha)
    vals = np.array([objective(b) for b in grid])
    best = int(np.argmax(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    beta_star, val = _golden_max(objective, lo, hi)
    if vals[best] >= val:
        beta_star, val = float(grid[best]), float(vals[best])
    return val, beta_star


# ---------------------------------------------------------------------------
# Noisy bounds, i.i.d. matrices
# ---------------------------------------------------------------------------


def p4_iid(source: SourceParams, alpha: float) -> ImplicitSolveReport:
    """Log-determinant bound for i.i.d. matrices (unique crossing)."""
    _check_args(source.omega, alpha)
    if source.variance <= 0:
        raise ValueError("source variance must be positive")
    r_target = rate_R(source.omega, alpha)
    if r_target == 0.0:
        return ImplicitSolveReport(0.0, 0, (0.0, 0.0), 0.0)
    v = source.variance

    def vec(rho):
        return _info_g_vec(rho, v) - r_target

    return _solve_implicit(vec, lambda rho: info_G(rho, v) - r_target, source.omega)


def p5_gaussian(source: SourceParams, alpha: float) -> ImplicitSolveReport:
    """Strengthened i.i.d. bound when the values are Gaussian."""
    _check_args(source.omega, alpha)
    if not source.is_gaussian():
        raise ValueError("p5 requires a Gaussian value distribution")
    omega = source.omega
    r_target = rate_R(omega, alpha)
    if r_target == 0.0:
        return ImplicitSolveReport(0.0, 0, (0.0, 0.0), 0.0)
    v = source.variance
    cond_gamma = omega * source.dist.variance

    def vec(rho):
        return _info_g_vec(rho, v) - r_target - omega * _info_g_vec(rho / omega, cond_gamma)

    def scal(rho):
        return info_G(rho, v) - r_target - omega * info_G(rho / omega, cond_gamma)

    return _solve_implicit(vec, scal, omega)


def p6_entropy(source: SourceParams, alpha: float) -> ImplicitSolveReport:
    """Entropy-power strengthened i.i.d. bound for any density.

    Also cross-checks that the closed-form simplification never exceeds the
    solved bound.
    """
    _check_args(source.omega, alpha)
    if source.entropy_power <= 0.0:
        raise ValueError("p6 requires a distribution with a density; use p4 instead")
    omega = source.omega
    r_target = rate_R(omega, alpha)
    if r_target == 0.0:
        return ImplicitSolveReport(0.0, 0, (0.0, 0.0), 0.0)
    v = source.variance
    vh = source.entropy_power

    def vec(rho):
        return _info_g_vec(rho, v) - r_target - omega * _info_v_vec(rho / omega, vh)

    def scal(rho):
        return info_G(rho, v) - r_target - omega * info_V(rho / omega, vh)

    report = _solve_implicit(vec, scal, omega)
    simple = s_cor_thm2(source, alpha)
    if simple > report.rho_lower * (1.0 + 1e-9) + 1e-12:
        log.warning(
            "simplified bound %.6g exceeds solved p6 bound %.6g", simple, report.rho_lower
        )
    return report


def s_cor_thm2(source: SourceParams, alpha: float) -> float:
    """Closed-form (weaker) version of the entropy-power bound.

    The defining inequality references min(rho, omega) on its right side; the
    implied bound is the unique fixed point, which has two explicit branches.
    """
    _check_args(source.omega, alpha)
    r = rate_R(source.omega, alpha)
    if r == 0.0:
        return 0.0
    big_l = math.log1p(source.variance)
    c = math.log1p(source.entropy_power / math.e)
    saturated = (2.0 * r + source.omega * c) / big_l
    if saturated >= source.omega:
        return saturated
    return 2.0 * r / (big_l - c)


def t4_genie_iid(source: SourceParams, alpha: float) -> tuple[ImplicitSolveReport, float]:
    """Genie-aided entropy-power bound for i.i.d. matrices.

    Maximizes the solved rate over the retained fraction ``beta``; returns the
    best solve report and ``beta_star``.
    """
    omega = source.omega
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    _check_args(omega, alpha)

    def solve_for(beta) -> ImplicitSolveReport | None:
        try:
            pref, om_b, v_eff, vh_eff = _genie_params(source, beta)
        except (ValueError, ArithmeticError) as exc:
            log.warning("t4: skipping beta=%g (%s)", beta, exc)
            return None
        r_target = rate_R(om_b / pref, min(alpha / beta, 1.0))
        if r_target == 0.0 and vh_eff == 0.0:
            return ImplicitSolveReport(0.0, 0, (0.0, 0.0), 0.0)
        om_t = om_b / pref

        def vec(rho):
            lhs = _info_g_vec(rho / pref, v_eff)
            rhs = r_target + om_t * _info_v_vec(rho / om_b, vh_eff)
            return lhs - rhs

        def scal(rho):
            return (
                info_G(rho / pref, v_eff)
                - r_target
                - om_t * info_V(rho / om_b, vh_eff)
            )

        return _solve_implicit(vec, scal, omega)

    grid = _beta_grid(alpha)
    reports = [solve_for(b) for b in grid]
    values = np.array([-math.inf if rep is None else rep.rho_lower for rep in reports])
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]

    def value_of(beta):
        rep = solve_for(beta)
        return -math.inf if rep is None else rep.rho_lower

    beta_star, val = _golden_max(value_of, lo, hi)
    if values[best] >= val:
        beta_star = float(grid[best])
        return reports[best], beta_star
    return solve_for(beta_star), beta_star


# ---------------------------------------------------------------------------
# Scaling shapes
# ---------------------------------------------------------------------------


def p7_shape(source: SourceParams, alpha: float, power: float) -> float:
    """Small-distortion shape alpha*omega*log(1/(alpha*omega)) / log(1+alpha^(2L+1)P).

    The distribution-dependent constant is normalized to 1, so only the shape
    is meaningful.
    """
    if not 0.0 < alpha < 0.25:
        raise ValueError(f"alpha must lie in (0, 1/4), got {alpha}")
    from .distributions import decay_rate

    big_l = decay_rate(source.dist)
    x = alpha * source.omega
    return x * math.log(1.0 / x) / math.log1p(alpha ** (2.0 * big_l + 1.0) * power)


def p8_shape(source: SourceParams, alpha: float, power: float) -> tuple[float, bool]:
    """High-SNR excess-rate shape omega + omega*log(1/omega)/log(1+P).

    The boolean reports whether the entropy-power condition that makes the
    full rate necessary holds for this source and distortion.
    """
    if not 0.0 < alpha < 0.25:
        raise ValueError(f"alpha must lie in (0, 1/4), got {alpha}")
    omega = source.omega
    value = omega + omega * math.log(1.0 / omega) / math.log1p(power)
    r = rate_R(omega, alpha)
    condition = source.theta > math.exp(1.0 - r / omega)
    return value, condition


# ---------------------------------------------------------------------------
# Aggregation and curves
# ---------------------------------------------------------------------------

ANY_MATRIX_BOUNDS = (BoundId.P3_GENERAL, BoundId.T2_GENIE)
IID_EXTRA_BOUNDS = (
    BoundId.P4_IID,
    BoundId.P5_IID_GAUSSIAN,
    BoundId.P6_IID_ENTROPY,
    BoundId.T4_IID_GENIE,
    BoundId.T3_NOISELESS_IID_F,
)


def evaluate_bound(
    source: SourceParams, bound: BoundId, alpha: float
) -> tuple[float, float | None]:
    """Evaluate one bound; returns (rho, beta_star or None).

    Raises ValueError for bounds inapplicable to the source (no density, not
    Gaussian); ``best_lower`` routes around those automatically.
    """
    if bound is BoundId.T1_NOISELESS:
        return t1_noiseless(source.omega, alpha), None
    if bound is BoundId.P2_NOISELESS_IID:
        return p2_noiseless_iid(source.omega, alpha), None
    if bound is BoundId.T3_NOISELESS_IID_F:
        return t3_noiseless_iid(source, alpha), None
    if bound is BoundId.P3_GENERAL:
        return p3_general(source, alpha), None
    if bound is BoundId.T2_GENIE:
        val, beta = t2_genie(source, alpha)
        return val, beta
    if bound is BoundId.P4_IID:
        return p4_iid(source, alpha).rho_lower, None
    if bound is BoundId.P5_IID_GAUSSIAN:
        return p5_gaussian(source, alpha).rho_lower, None
    if bound is BoundId.P6_IID_ENTROPY:
        return p6_entropy(source, alpha).rho_lower, None
    if bound is BoundId.T4_IID_GENIE:
        rep, beta = t4_genie_iid(source, alpha)
        return rep.rho_lower, beta
    if bound is BoundId.S_COR_THM2:
        return s_cor_thm2(source, alpha), None
    if bound is BoundId.S_NOISELESS_SIMPLE:
        return s_noiseless_simple(source, alpha), None
    if bound is BoundId.P7_SHAPE:
        return p7_shape(source, alpha, source.power), None
    if bound is BoundId.P8_SHAPE:
        return p8_shape(source, alpha, source.power)[0], None
    raise ValueError(f"bound {bound} is not an evaluatable rate bound")


def best_lower(
    source: SourceParams, alpha: float, matrix_class: str = "iid"
) -> tuple[float, BoundId]:
    """Strongest applicable lower bound and its identity.

    ``matrix_class="any"`` uses bounds valid for every sampling matrix;
    ``"iid"`` adds the i.i.d.-matrix bounds (a superset, hence never weaker).
    Bounds requiring a density or Gaussian values are skipped when the source
    does not qualify.
    """
    if matrix_class not in ("any", "iid"):
        raise ValueError(f"matrix_class must be 'any' or 'iid', got {matrix_class}")
    candidates = list(ANY_MATRIX_BOUNDS)
    if matrix_class == "iid":
        candidates += list(IID_EXTRA_BOUNDS)
    best_val, best_id = -math.inf, None
    for bound in candidates:
        if bound is BoundId.P5_IID_GAUSSIAN and not source.is_gaussian():
            continue
        if bound is BoundId.P6_IID_ENTROPY and source.entropy_power <= 0.0:
            continue
        val, _ = evaluate_bound(source, bound, alpha)
        if val > best_val:
            best_val, best_id = val, bound
    return best_val, best_id


def alpha_curve(
    source: SourceParams,
    bound: BoundId,
    rho_grid: list[float],
    alpha_floor: float = 1e-6,
) -> BoundCurve:
    """Invert a bound to distortion-versus-rate: for each rate, the smallest
    distortion whose bound does not exceed it.

    Rates where the bound fails to be monotone across the bisection bracket
    are omitted with a diagnostic entry in ``solver_meta``.
    """
    points: list[tuple[float, float]] = []
    meta: dict = {"omitted": [], "alpha_floor": alpha_floor, "beta_star": {}}

    def rho_of(alpha):
        return evaluate_bound(source, bound, alpha)

    for rho in sorted(rho_grid):
        lo, hi = alpha_floor, 1.0 - 1e-9
        val_lo, _ = rho_of(lo)
        val_hi, _ = rho_of(hi)
        if val_lo < val_hi:
            meta["omitted"].append((rho, "non-monotone bracket"))
            continue
        if val_lo <= rho:
            points.append((rho, 0.0))
            continue
        if val_hi > rho:
            meta["omitted"].append((rho, "bound exceeds rho on full range"))
            continue
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            val_mid, beta = rho_of(mid)
            if val_mid <= rho:
                hi = mid
            else:
                lo = mid
        val_hi, beta = rho_of(hi)
        meta["beta_star"][rho] = beta
        points.append((rho, hi))
    return BoundCurve(bound, source, "alpha_vs_rho", points, meta)


def source_at_snr(dist: DistributionSpec, omega: float, snr_db: float) -> SourceParams:
    """Scale a distribution to the per-sample SNR (dB) and wrap it as a source."""
    from .distributions import scale_to_power

    power = 10.0 ** (snr_db / 10.0)
    return source_functionals(omega, scale_to_power(dist, omega, power))


def _check_args(omega: float, alpha: float) -> None:
    if not 0.0 < omega <= 0.5:
        raise ValueError(f"omega must lie in (0, 0.5], got {omega}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
