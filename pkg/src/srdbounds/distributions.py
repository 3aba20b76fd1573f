"""Nonzero-value distributions: moments, magnitude truncation, decay rate.

Four parametric families are supported, all with finite positive power and no
probability mass at zero.  ``truncate`` keeps the smallest-magnitude fraction
``beta`` of a distribution and returns its mean, variance, and differential
entropy in closed form; ``truncate_oracle`` recomputes the same quantities by
adaptive quadrature (or exact atom summation) and by Monte Carlo so the closed
forms can be checked independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize, stats

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
SQRT3 = math.sqrt(3.0)


class AccuracyError(RuntimeError):
    """Raised when a numerical oracle cannot reach the requested tolerance."""


# ---------------------------------------------------------------------------
# Distribution specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """Gaussian nonzero values with the given mean and variance."""

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValueError(f"variance must be positive and finite, got {self.variance}")
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")


@dataclass(frozen=True)
class Uniform:
    """Continuous uniform nonzero values with nonnegative mean.

    The support is the interval ``mean ± sqrt(3 * variance)``.
    """

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValueError(f"variance must be positive and finite, got {self.variance}")
        if not (self.mean >= 0 and math.isfinite(self.mean)):
            raise ValueError(f"mean must be nonnegative and finite, got {self.mean}")


@dataclass(frozen=True)
class PointMass:
    """Symmetric two-magnitude discrete values.

    Mass ``1 - outer_mass`` sits at magnitude ``sqrt(floor_sq)`` and mass
    ``outer_mass`` at the larger magnitude that brings the power up to
    ``power``.  With ``limit=True`` the outer atoms carry vanishing mass
    (``outer_mass`` is ignored): every truncation with ``beta < 1`` then keeps
    only the floor atoms.
    """

    floor_sq: float
    power: float
    outer_mass: float = 0.0
    limit: bool = False

    def __post_init__(self):
        if not (self.power > 0 and math.isfinite(self.power)):
            raise ValueError(f"power must be positive and finite, got {self.power}")
        if not 0 < self.floor_sq <= self.power:
            raise ValueError(
                f"floor_sq must lie in (0, power]; got {self.floor_sq} with power {self.power}"
            )
        if not self.limit:
            if not 0 < self.outer_mass < 1:
                raise ValueError(f"outer_mass must lie in (0, 1), got {self.outer_mass}")
            if self.power - (1 - self.outer_mass) * self.floor_sq < 0:
                raise ValueError("outer atom squared magnitude would be negative")

    @property
    def outer_sq(self) -> float:
        """Squared magnitude of the outer atoms (infinite in the limit case)."""
        if self.limit:
            return math.inf
        return (self.power - (1 - self.outer_mass) * self.floor_sq) / self.outer_mass


@dataclass(frozen=True)
class SlicedGaussian:
    """Gaussian magnitudes shifted away from zero by a hard floor.

    A draw is ``Z + sign(Z) * floor`` with ``Z`` zero-mean Gaussian of variance
    ``slice_variance``, so the support excludes ``(-floor, floor)``.
    """

    floor: float
    slice_variance: float

    def __post_init__(self):
        if not (self.floor > 0 and math.isfinite(self.floor)):
            raise ValueError(f"floor must be positive and finite, got {self.floor}")
        if not (self.slice_variance > 0 and math.isfinite(self.slice_variance)):
            raise ValueError(
                f"slice_variance must be positive and finite, got {self.slice_variance}"
            )

    @property
    def power(self) -> float:
        b = self.floor
        sz = math.sqrt(self.slice_variance)
        return b * b + 2.0 * b * sz * SQRT_2_OVER_PI + self.slice_variance


DistributionSpec = Gaussian | Uniform | PointMass | SlicedGaussian


# ---------------------------------------------------------------------------
# Result records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Moments:
    """Mean, variance, second moment, and differential entropy of a distribution.

    ``diff_entropy`` is ``None`` for distributions without a density.
    """

    mean: float
    variance: float
    second_moment: float
    diff_entropy: float | None


@dataclass(frozen=True)
class TruncationResult:
    """Moments of the smallest-magnitude fraction ``beta`` of a distribution.

    ``threshold`` is the magnitude cutoff: in standardized units for Gaussian
    and sliced-Gaussian variants (the kept region is ``|x| <= sigma * t`` and
    ``|x| <= floor + slice_sigma * t`` respectively), absolute otherwise.
    """

    beta: float
    threshold: float
    mean: float
    variance: float
    diff_entropy: float | None

    @property
    def second_moment(self) -> float:
        return self.mean * self.mean + self.variance


@dataclass(frozen=True)
class OracleTruncation:
    """Truncated moments recomputed by an independent numerical route.

    Error fields are absolute-error estimates for quadrature and standard
    errors for Monte Carlo; ``entropy_err`` is ``None`` when the oracle does
    not estimate entropy (Monte Carlo, discrete variants).
    """

    result: TruncationResult
    mean_err: float
    variance_err: float
    entropy_err: float | None


# ---------------------------------------------------------------------------
# Gaussian tail function and its inverse
# ---------------------------------------------------------------------------


def q_function(x: float) -> float:
    """Upper-tail probability of a standard Gaussian."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def q_inverse(p: float) -> float:
    """Inverse of ``q_function`` on (0, 1), bisection-initialized Newton.

    Iterates until ``|q_function(x) - p| <= 1e-13``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    lo, hi = -10.0, 10.0
    # q_function is decreasing, so the sign convention is f(lo) > 0 > f(hi).
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(60):
        err = q_function(x) - p
        if abs(err) <= 1e-13:
            return x
        step = err / _phi(x)
        x_new = x + step
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        if q_function(x_new) > p:
            lo = x_new
        else:
            hi = x_new
        x = x_new
    if abs(q_function(x) - p) > 1e-13:
        raise AccuracyError(f"q_inverse failed to converge for p={p}")
    return x


def _phi(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def moments(dist: DistributionSpec) -> Moments:
    """Exact mean, variance, second moment, and entropy of a distribution."""
    if isinstance(dist, Gaussian):
        h = 0.5 * math.log(2.0 * math.pi * math.e * dist.variance)
        return Moments(dist.mean, dist.variance, dist.mean**2 + dist.variance, h)
    if isinstance(dist, Uniform):
        h = 0.5 * math.log(12.0 * dist.variance)
        return Moments(dist.mean, dist.variance, dist.mean**2 + dist.variance, h)
    if isinstance(dist, PointMass):
        # Atoms are placed symmetrically, so the mean vanishes and the
        # variance equals the power regardless of outer_mass.
        return Moments(0.0, dist.power, dist.power, None)
    if isinstance(dist, SlicedGaussian):
        h = 0.5 * math.log(2.0 * math.pi * math.e * dist.slice_variance)
        return Moments(0.0, dist.power, dist.power, h)
    raise TypeError(f"unsupported distribution {dist!r}")


# ---------------------------------------------------------------------------
# Truncation (closed forms)
# ---------------------------------------------------------------------------


def _gaussian_r(t: float, beta: float) -> float:
    """Variance fraction kept when a standard Gaussian is cut at |x| <= t."""
    return 1.0 - (t / beta) * SQRT_2_OVER_PI * math.exp(-0.5 * t * t)


def truncate(dist: DistributionSpec, beta: float) -> TruncationResult:
    """Closed-form moments of the smallest-magnitude fraction ``beta``.

    ``beta = 1`` reproduces the untruncated moments exactly; ``beta = 0`` is a
    domain error.  The Gaussian closed form requires a zero mean.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")

    if isinstance(dist, Gaussian):
        if dist.mean != 0.0:
            raise ValueError("closed-form truncation requires a zero-mean Gaussian")
        if beta == 1.0:
            m = moments(dist)
            return TruncationResult(1.0, math.inf, 0.0, dist.variance, m.diff_entropy)
        t = q_inverse(0.5 * (1.0 - beta))
        r = _gaussian_r(t, beta)
        var = r * dist.variance
        h = 0.5 * (math.log(2.0 * math.pi * beta * beta * dist.variance) + r)
        return TruncationResult(beta, t, 0.0, var, h)

    if isinstance(dist, Uniform):
        a = dist.mean - SQRT3 * math.sqrt(dist.variance)
        b = dist.mean + SQRT3 * math.sqrt(dist.variance)
        width = beta * (b - a)
        if a >= 0:
            lo, hi = a, a + width
        elif width <= -2 * a:
            lo, hi = -0.5 * width, 0.5 * width
        else:
            lo, hi = a, a + width
        mean = 0.5 * (lo + hi)
        var = beta * beta * dist.variance
        h = 0.5 * math.log(12.0 * var)
        return TruncationResult(beta, hi, mean, var, h)

    if isinstance(dist, PointMass):
        b = math.sqrt(dist.floor_sq)
        if dist.limit:
            if beta == 1.0:
                return TruncationResult(1.0, math.inf, 0.0, dist.power, None)
            return TruncationResult(beta, b, 0.0, dist.floor_sq, None)
        eps = dist.outer_mass
        if beta <= 1.0 - eps:
            return TruncationResult(beta, b, 0.0, dist.floor_sq, None)
        var = dist.power - (1.0 - beta) * (1.0 - eps) / (beta * eps) * (
            dist.power - dist.floor_sq
        )
        return TruncationResult(beta, math.sqrt(dist.outer_sq), 0.0, var, None)

    if isinstance(dist, SlicedGaussian):
        sz2 = dist.slice_variance
        sz = math.sqrt(sz2)
        if beta == 1.0:
            t, r, r_tilde = math.inf, 1.0, SQRT_2_OVER_PI
        else:
            t = q_inverse(0.5 * (1.0 - beta))
            r = _gaussian_r(t, beta)
            r_tilde = SQRT_2_OVER_PI * (-math.expm1(-0.5 * t * t)) / beta
        var = dist.floor**2 + r * sz2 + 2.0 * dist.floor * sz * r_tilde
        h = 0.5 * (math.log(2.0 * math.pi * beta * beta * sz2) + r)
        return TruncationResult(beta, t, 0.0, var, h)

    raise TypeError(f"unsupported distribution {dist!r}")


# ---------------------------------------------------------------------------
# Truncation oracles
# ---------------------------------------------------------------------------


def _density_and_support(dist):
    """Density callable and support intervals for the continuous variants."""
    if isinstance(dist, Gaussian):
        f = stats.norm(loc=dist.mean, scale=math.sqrt(dist.variance))
        return f.pdf, f.cdf, [(-math.inf, math.inf)]
    if isinstance(dist, Uniform):
        a = dist.mean - SQRT3 * math.sqrt(dist.variance)
        b = dist.mean + SQRT3 * math.sqrt(dist.variance)
        f = stats.uniform(loc=a, scale=b - a)
        return f.pdf, f.cdf, [(a, b)]
    if isinstance(dist, SlicedGaussian):
        b = dist.floor
        core = stats.norm(loc=0.0, scale=math.sqrt(dist.slice_variance))

        def pdf(x):
            ax = np.abs(x)
            return np.where(ax >= b, core.pdf(ax - b), 0.0)

        def cdf(x):
            # X = Z + sign(Z) * b, so the CDF is flat on (-b, b) at 1/2.
            x = np.asarray(x, dtype=float)
            return np.where(x >= b, core.cdf(x - b), np.where(x <= -b, core.cdf(x + b), 0.5))

        return pdf, cdf, [(-math.inf, -b), (b, math.inf)]
    raise ValueError(f"no density for {dist!r}")


def _magnitude_quantile(dist, beta: float) -> float:
    """Absolute threshold t with Pr{|X| <= t} = beta, found by bracketed root."""
    _, cdf, _ = _density_and_support(dist)

    def mass(t):
        return float(cdf(t) - cdf(-t))

    hi = 1.0
    while mass(hi) < beta and hi < 1e12:
        hi *= 2.0
    return float(optimize.brentq(lambda t: mass(t) - beta, 0.0, hi, xtol=1e-14, rtol=1e-15))


def _quadrature_oracle(dist, beta: float) -> OracleTruncation:
    if isinstance(dist, PointMass):
        return _atom_oracle(dist, beta)
    pdf, _, support = _density_and_support(dist)
    t = math.inf if beta == 1.0 else _magnitude_quantile(dist, beta)

    pieces = []
    for lo, hi in support:
        lo_c, hi_c = max(lo, -t), min(hi, t)
        if lo_c < hi_c:
            pieces.append((lo_c, hi_c))

    def integrate_f(g):
        total, err = 0.0, 0.0
        for lo, hi in pieces:
            val, e = integrate.quad(g, lo, hi, limit=200, epsabs=1e-12, epsrel=1e-12)
            total += val
            err += e
        return total, err

    mass, mass_err = integrate_f(pdf)
    if abs(mass - beta) > 1e-7:
        raise AccuracyError(f"quadrature mass {mass} missed beta {beta}")
    m1, e1 = integrate_f(lambda x: x * pdf(x))
    m2, e2 = integrate_f(lambda x: x * x * pdf(x))
    neg_ent, e3 = integrate_f(lambda x: pdf(x) * math.log(max(pdf(x), 1e-300)))
    mean = m1 / beta
    var = m2 / beta - mean * mean
    # Truncated density is pdf/beta on the kept region.
    h = math.log(beta) - neg_ent / beta
    return OracleTruncation(
        TruncationResult(beta, t, mean, var, h),
        mean_err=e1 / beta,
        variance_err=e2 / beta,
        entropy_err=e3 / beta,
    )


def _atom_oracle(dist: PointMass, beta: float) -> OracleTruncation:
    """Truncated moments from the finite atom list, in exact rational
    arithmetic over the squared magnitudes (floats convert losslessly)."""
    if dist.limit:
        if beta == 1.0:
            res = TruncationResult(1.0, math.inf, 0.0, dist.power, None)
        else:
            res = TruncationResult(beta, math.sqrt(dist.floor_sq), 0.0, dist.floor_sq, None)
        return OracleTruncation(res, 0.0, 0.0, None)
    # The regime boundary is decided in float arithmetic (matching the public
    # contract); the moments within a regime are exact rationals.
    if beta <= 1.0 - dist.outer_mass:
        res = TruncationResult(beta, math.sqrt(dist.floor_sq), 0.0, dist.floor_sq, None)
        return OracleTruncation(res, 0.0, 0.0, None)
    b2 = Fraction(dist.floor_sq)
    power = Fraction(dist.power)
    eps = Fraction(dist.outer_mass)
    beta_f = Fraction(beta)
    outer_sq = (power - (1 - eps) * b2) / eps
    m2 = (1 - eps) * b2 + (beta_f - (1 - eps)) * outer_sq
    var = float(m2 / beta_f)
    res = TruncationResult(beta, math.sqrt(float(outer_sq)), 0.0, var, None)
    return OracleTruncation(res, 0.0, 0.0, None)


def _montecarlo_oracle(dist, beta: float, budget: int, seed: int) -> OracleTruncation:
    # Batch means: each batch truncates its own draws, so the reported
    # standard errors include the threshold-selection noise, not just the
    # within-sample spread.
    batches = 25
    per_batch = max(budget // batches, 10)
    rng = np.random.Generator(np.random.Philox(key=seed))
    means, variances, thresholds = [], [], []
    for _ in range(batches):
        x = sample_values(dist, per_batch, rng)
        keep = max(1, int(math.floor(beta * per_batch)))
        order = np.argsort(np.abs(x), kind="stable")
        kept = x[order[:keep]]
        means.append(float(np.mean(kept)))
        variances.append(float(np.var(kept, ddof=1)) if keep > 1 else 0.0)
        thresholds.append(float(np.abs(kept[-1])))
    mean = float(np.mean(means))
    var = float(np.mean(variances))
    se_mean = float(np.std(means, ddof=1) / math.sqrt(batches))
    se_var = float(np.std(variances, ddof=1) / math.sqrt(batches))
    return OracleTruncation(
        TruncationResult(beta, float(np.mean(thresholds)), mean, var, None),
        mean_err=se_mean,
        variance_err=se_var,
        entropy_err=None,
    )


def truncate_oracle(
    dist: DistributionSpec,
    beta: float,
    method: str = "quadrature",
    budget: int = 1_000_000,
    seed: int = 0,
) -> OracleTruncation:
    """Recompute truncated moments independently of the closed forms.

    ``method="quadrature"`` integrates the density over the kept magnitude
    region (exact atom summation for the discrete variant); ``"montecarlo"``
    keeps the empirically smallest ``beta`` fraction of ``budget`` draws.
    Intended for verification against :func:`truncate`.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if method == "quadrature":
        return _quadrature_oracle(dist, beta)
    if method == "montecarlo":
        return _montecarlo_oracle(dist, beta, budget, seed)
    raise ValueError(f"unknown oracle method {method!r}")


# ---------------------------------------------------------------------------
# Sampling, decay rate, power scaling
# ---------------------------------------------------------------------------


def sample_values(dist: DistributionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw i.i.d. values.  The limiting point-mass draws only its floor atoms."""
    if isinstance(dist, Gaussian):
        return dist.mean + math.sqrt(dist.variance) * rng.standard_normal(size)
    if isinstance(dist, Uniform):
        half = SQRT3 * math.sqrt(dist.variance)
        return dist.mean + half * (2.0 * rng.random(size) - 1.0)
    if isinstance(dist, PointMass):
        signs = rng.choice([-1.0, 1.0], size=size)
        if dist.limit:
            return signs * math.sqrt(dist.floor_sq)
        outer = rng.random(size) < dist.outer_mass
        mags = np.where(outer, math.sqrt(dist.outer_sq), math.sqrt(dist.floor_sq))
        return signs * mags
    if isinstance(dist, SlicedGaussian):
        z = math.sqrt(dist.slice_variance) * rng.standard_normal(size)
        return z + np.sign(z) * dist.floor
    raise TypeError(f"unsupported distribution {dist!r}")


def decay_rate(dist: DistributionSpec) -> float:
    """How fast mass near zero vanishes: 0 for supports bounded away from zero,
    1 when the density is positive and flat through the origin."""
    if isinstance(dist, Gaussian):
        return 1.0
    if isinstance(dist, Uniform):
        return 1.0 if dist.mean**2 <= 3.0 * dist.variance else 0.0
    if isinstance(dist, (PointMass, SlicedGaussian)):
        return 0.0
    raise TypeError(f"unsupported distribution {dist!r}")


def scale_to_power(dist: DistributionSpec, omega: float, target_power: float) -> DistributionSpec:
    """Rescale so the vector-source power ``omega * E[X^2]`` equals the target.

    Scaling is linear in the values, so the decay rate and all shape ratios
    are preserved.
    """
    if not 0.0 < omega <= 0.5:
        raise ValueError(f"omega must lie in (0, 0.5], got {omega}")
    if not target_power > 0:
        raise ValueError(f"target power must be positive, got {target_power}")
    c2 = target_power / (omega * moments(dist).second_moment)
    c = math.sqrt(c2)
    if isinstance(dist, Gaussian):
        return Gaussian(c * dist.mean, c2 * dist.variance)
    if isinstance(dist, Uniform):
        return Uniform(c * dist.mean, c2 * dist.variance)
    if isinstance(dist, PointMass):
        return replace(dist, floor_sq=c2 * dist.floor_sq, power=c2 * dist.power)
    if isinstance(dist, SlicedGaussian):
        return SlicedGaussian(c * dist.floor, c2 * dist.slice_variance)
    raise TypeError(f"unsupported distribution {dist!r}")
