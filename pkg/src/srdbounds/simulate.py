"""Desk-scale support-recovery experiments.

Stochastic sparse sources, unit-row-power sampling matrices (i.i.d. Gaussian
or the column-zeroing rate-sharing construction), exhaustive maximum-likelihood
recovery over all candidate supports, and the two-stage rate-sharing decoder.
Problem sizes are capped so the exhaustive search stays tractable; the point is
bound verification, not scalable estimation.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .distributions import DistributionSpec, sample_values, scale_to_power
from .montecarlo import BudgetError, trial_rng

SPAN_RTOL = 1e-9
MAX_SUPPORTS = 1_000_000


class MultipleMinimalSupportsError(RuntimeError):
    """Stage-1 recovery found several minimal spanning supports (declared error)."""


@dataclass(frozen=True)
class SimConfig:
    """One recovery experiment: dimensions, source, channel, matrix, trials.

    ``snr_db=None`` runs noiseless.  With noise, the value distribution is
    rescaled so the per-sample SNR equals ``10^(snr_db/10)`` against unit
    noise.  ``epsilon`` is the rate-sharing slack (only used by that matrix).
    """

    n: int
    omega: float
    dist: DistributionSpec
    rho: float
    snr_db: float | None = None
    matrix: str = "iid_gaussian"
    epsilon: float = 0.1
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 8 <= self.n <= 28:
            raise ValueError(f"n must lie in [8, 28], got {self.n}")
        if not 0.0 < self.omega <= 0.5:
            raise ValueError(f"omega must lie in (0, 0.5], got {self.omega}")
        if self.k < 1:
            raise ValueError("k = floor(omega * n) must be at least 1")
        if self.m < 1:
            raise ValueError("m = ceil(rho * n) must be at least 1")
        if math.comb(self.n, self.k) > MAX_SUPPORTS:
            raise BudgetError(
                f"C({self.n},{self.k}) = {math.comb(self.n, self.k)} supports "
                f"exceed the exhaustive-search budget {MAX_SUPPORTS}"
            )
        if self.matrix not in ("iid_gaussian", "rate_sharing"):
            raise ValueError(f"unknown matrix kind {self.matrix!r}")
        if self.matrix == "rate_sharing":
            if not 0.0 <= self.epsilon < 1.0:
                raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
            if self.rho >= self.omega:
                raise ValueError(
                    "rate sharing targets rho < omega; "
                    f"got rho={self.rho}, omega={self.omega}"
                )
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    @property
    def k(self) -> int:
        return int(math.floor(self.omega * self.n))

    @property
    def m(self) -> int:
        return int(math.ceil(self.rho * self.n))

    def effective_dist(self) -> DistributionSpec:
        if self.snr_db is None:
            return self.dist
        return scale_to_power(self.dist, self.omega, 10.0 ** (self.snr_db / 10.0))


@dataclass(frozen=True)
class SimOutcome:
    """One trial: achieved distortion and the ML residual diagnostics."""

    trial: int
    distortion: float
    exact: bool
    residual_min: float
    runner_up_gap: float


@dataclass
class SimSummary:
    """Aggregate over completed trials, with declared errors counted apart."""

    trials: int
    completed: int
    declared_errors: int
    mean_distortion: float
    distortion_se: float
    exact_rate: float
    success_rate_alpha: dict = field(default_factory=dict)
    truncated: bool = False


@dataclass(frozen=True)
class SampleDraw:
    """Samples, the matrix that produced them, and the zeroed column set
    (rate-sharing only)."""

    y: np.ndarray
    matrix: np.ndarray
    zeroed: np.ndarray | None = None


def support_distortion(s, s_hat) -> float:
    """Fraction of the true support missed by an equal-size estimate."""
    s, s_hat = set(s), set(s_hat)
    if len(s_hat) != len(s):
        raise ValueError("estimate must have the same size as the true support")
    return 1.0 - len(s & s_hat) / len(s)


def draw_source(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Sparse vector with a uniform size-k support and i.i.d. nonzero values."""
    dist = config.effective_dist()
    x = np.zeros(config.n)
    support = np.sort(rng.choice(config.n, size=config.k, replace=False))
    x[support] = sample_values(dist, config.k, rng)
    return x


def sample(x: np.ndarray, config: SimConfig, rng: np.random.Generator) -> SampleDraw:
    """Noisy linear samples of x under the configured matrix ensemble.

    Matrix entries have variance 1/n so each row has unit expected power; the
    rate-sharing ensemble zeroes a random column subset of size
    ceil((1 - (1-eps) * rho / omega) * n).
    """
    n, m = config.n, config.m
    mat = rng.standard_normal((m, n)) / math.sqrt(n)
    zeroed = None
    if config.matrix == "rate_sharing":
        u_size = int(math.ceil((1.0 - (1.0 - config.epsilon) * config.rho / config.omega) * n))
        u_size = min(max(u_size, 0), n)
        zeroed = np.sort(rng.choice(n, size=u_size, replace=False))
        mat[:, zeroed] = 0.0
    y = mat @ x
    if config.snr_db is not None:
        y = y + rng.standard_normal(m)
    return SampleDraw(y, mat, zeroed)


@lru_cache(maxsize=8)
def _support_array(n: int, k: int) -> np.ndarray:
    arr = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=k * math.comb(n, k),
    )
    arr = arr.reshape(-1, k)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MLResult:
    """Best support under exhaustive least-squares search plus diagnostics."""

    support: tuple[int, ...]
    residual_min: float
    runner_up_gap: float


def exhaustive_ml(y: np.ndarray, mat: np.ndarray, k: int) -> MLResult:
    """Search all size-k supports for the smallest projection residual.

    Residuals come from batched Gram solves; supports whose Gram system is
    numerically singular fall back to a least-squares projection onto the
    actual column span.  Ties resolve to the lexicographically smallest
    support (the supports are enumerated in lexicographic order).
    """
    n = mat.shape[1]
    supports = _support_array(n, k)
    gram_full = mat.T @ mat
    corr = mat.T @ y
    norm_y = float(y @ y)

    g = gram_full[supports[:, :, None], supports[:, None, :]]
    b = corr[supports]
    with np.errstate(all="ignore"):
        try:
            coef = np.linalg.solve(g, b[..., None])[..., 0]
            quad = np.einsum("ij,ij->i", coef, b)
        except np.linalg.LinAlgError:
            quad = np.full(len(supports), np.nan)
    residuals = norm_y - quad

    bad = ~np.isfinite(residuals) | (residuals < -1e-6 * max(norm_y, 1.0))
    if bad.any():
        for idx in np.nonzero(bad)[0]:
            cols = mat[:, supports[idx]]
            fit, *_ = np.linalg.lstsq(cols, y, rcond=None)
            residuals[idx] = float(np.sum((y - cols @ fit) ** 2))
    residuals = np.maximum(residuals, 0.0)

    best = int(np.argmin(residuals))
    best_val = float(residuals[best])
    if len(residuals) > 1:
        runner_up = float(np.partition(residuals, 1)[1])
    else:
        runner_up = best_val
    return MLResult(tuple(int(i) for i in supports[best]), best_val, runner_up - best_val)


def rate_sharing_recover(
    y: np.ndarray,
    mat: np.ndarray,
    k: int,
    zeroed: np.ndarray,
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """Two-stage decoder for the rate-sharing ensemble.

    Stage 1 finds the smallest support inside the live columns whose span
    contains y (exact search over subset sizes); several minimal spanning
    supports raise :class:`MultipleMinimalSupportsError`.  Stage 2 fills the
    remaining indices uniformly at random from the zeroed set.
    """
    n = mat.shape[1]
    live = sorted(set(range(n)) - set(int(i) for i in zeroed))
    norm_y = math.sqrt(float(y @ y))
    if norm_y == 0.0:
        stage1: tuple[int, ...] = ()
    else:
        stage1 = None
        for size in range(1, min(len(live), mat.shape[0], k) + 1):
            spanning = []
            for cand in itertools.combinations(live, size):
                cols = mat[:, cand]
                fit, *_ = np.linalg.lstsq(cols, y, rcond=None)
                resid = math.sqrt(float(np.sum((y - cols @ fit) ** 2)))
                if resid <= SPAN_RTOL * norm_y:
                    spanning.append(cand)
                    if len(spanning) > 1:
                        break
            if len(spanning) == 1:
                stage1 = spanning[0]
                break
            if len(spanning) > 1:
                raise MultipleMinimalSupportsError(
                    f"{len(spanning)}+ spanning supports of size {size}"
                )
        if stage1 is None:
            raise MultipleMinimalSupportsError(
                "no unique minimal spanning support within the live columns"
            )
    fill = rng.choice(np.asarray(zeroed), size=k - len(stage1), replace=False)
    return tuple(sorted(set(stage1) | set(int(i) for i in fill)))


def run_experiment(
    config: SimConfig, time_budget_s: float | None = None
) -> tuple[list[SimOutcome], SimSummary]:
    """Run all trials; deterministic given (config, seed).

    Declared rate-sharing errors are excluded from the distortion mean and
    counted in ``declared_errors``.  A time budget, when given, may truncate
    the trial list (flagged in the summary).
    """
    outcomes: list[SimOutcome] = []
    declared = 0
    start = time.monotonic()
    truncated = False
    for trial in range(config.trials):
        if time_budget_s is not None and time.monotonic() - start > time_budget_s:
            truncated = True
            break
        rng = trial_rng(config.seed, trial)
        x = draw_source(config, rng)
        true_support = tuple(int(i) for i in np.nonzero(x)[0])
        drawn = sample(x, config, rng)
        if config.matrix == "rate_sharing":
            try:
                est = rate_sharing_recover(drawn.y, drawn.matrix, config.k, drawn.zeroed, rng)
            except MultipleMinimalSupportsError:
                declared += 1
                continue
            resid_min, gap = math.nan, math.nan
        else:
            ml = exhaustive_ml(drawn.y, drawn.matrix, config.k)
            est = ml.support
            resid_min, gap = ml.residual_min, ml.runner_up_gap
        dist = support_distortion(true_support, est)
        outcomes.append(SimOutcome(trial, dist, dist == 0.0, resid_min, gap))

    dists = np.array([o.distortion for o in outcomes]) if outcomes else np.array([math.nan])
    completed = len(outcomes)
    se = float(np.std(dists, ddof=1) / math.sqrt(completed)) if completed > 1 else math.inf
    summary = SimSummary(
        trials=config.trials,
        completed=completed,
        declared_errors=declared,
        mean_distortion=float(np.mean(dists)),
        distortion_se=se,
        exact_rate=sum(o.exact for o in outcomes) / completed if completed else math.nan,
        truncated=truncated,
    )
    return outcomes, summary


def success_rate(outcomes: list[SimOutcome], alpha: float) -> float:
    """Fraction of completed trials with distortion at most alpha."""
    if not outcomes:
        return math.nan
    return sum(o.distortion <= alpha for o in outcomes) / len(outcomes)


def discrete_single_sample_demo(
    n: int = 10, k: int = 3, trials: int = 50, seed: int = 0
) -> float:
    """Toy: one Gaussian sample suffices for a known +-1 alphabet.

    Exhaustively inverts the scalar projection over all supports and sign
    patterns; returns the exact-recovery rate (1.0 up to float ties).
    """
    if n > 12:
        raise ValueError("demo is capped at n = 12")
    exact = 0
    patterns = [
        (support, signs)
        for support in itertools.combinations(range(n), k)
        for signs in itertools.product((-1.0, 1.0), repeat=k)
    ]
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        row = rng.standard_normal(n)
        support = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
        signs = rng.choice([-1.0, 1.0], size=k)
        y = float(row[list(support)] @ signs)
        best, best_err = None, math.inf
        for cand, cand_signs in patterns:
            err = abs(float(row[list(cand)] @ np.asarray(cand_signs)) - y)
            if err < best_err:
                best, best_err = cand, err
        exact += best == support
    return exact / trials
