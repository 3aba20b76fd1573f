"""Monte-Carlo and combinatorial verification of the asymptotic claims.

Random-matrix log-determinant and determinant-power limits, rank-deficiency
decay for discrete matrix entries, exact pattern-counting with covering-number
brackets, and the truncated-power ratio scan.  All routines are reproducible:
per-trial randomness comes from a counter-based generator keyed by
``seed XOR trial``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionSpec, decay_rate, moments, truncate
from .ratefun import info_G


class BudgetError(ValueError):
    """Raised when an exact enumeration would exceed the desk-scale budget."""


@dataclass(frozen=True)
class MCConfig:
    """Dimensions, aspect ratio, SNR, trial count, and seed for a matrix study."""

    n: int = 400
    r: float = 1.0
    gamma: float = 1.0
    trials: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"n must be at least 8, got {self.n}")
        if self.r <= 0:
            raise ValueError(f"aspect ratio must be positive, got {self.r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.m < 1:
            raise ValueError("m = round(r * n) must be at least 1")

    @property
    def m(self) -> int:
        return int(round(self.r * self.n))


@dataclass(frozen=True)
class MCEstimate:
    """A Monte-Carlo mean with its standard error and distance to the target."""

    mean: float
    std_error: float
    trials: int
    target: float
    relative_gap: float
    rejected: int = 0


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Deterministic per-trial stream: counter-based generator keyed by
    seed XOR trial, so results do not depend on execution order."""
    key = (int(seed) ^ int(trial)) & ((1 << 128) - 1)
    return np.random.Generator(np.random.Philox(key=key))


def _estimate(values: np.ndarray, target: float, rejected: int = 0) -> MCEstimate:
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(len(values))) if len(values) > 1 else math.inf
    gap = abs(mean - target) / max(abs(target), 1e-12)
    return MCEstimate(mean, se, len(values), target, gap, rejected)


# ---------------------------------------------------------------------------
# Random-matrix limits
# ---------------------------------------------------------------------------


def _gram_logdet(mat: np.ndarray, gamma: float) -> float:
    """log det(I + (gamma/n) M M^T) through a Cholesky factor of the smaller
    Gram orientation."""
    m, n = mat.shape
    if m <= n:
        gram = np.eye(m) + (gamma / n) * (mat @ mat.T)
    else:
        gram = np.eye(n) + (gamma / n) * (mat.T @ mat)
    chol = np.linalg.cholesky(gram)
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def mp_logdet(config: MCConfig) -> MCEstimate:
    """Sample (1/2n) log det(I + (gamma/n) M M^T) for i.i.d. standard Gaussian
    M and compare with the asymptotic log-determinant rate."""
    n, m, gamma = config.n, config.m, config.gamma
    values = np.empty(config.trials)
    rejected = 0
    for trial in range(config.trials):
        rng = trial_rng(config.seed, trial)
        while True:
            mat = rng.standard_normal((m, n))
            try:
                val = _gram_logdet(mat, gamma)
            except np.linalg.LinAlgError:
                rejected += 1
                continue
            if math.isfinite(val):
                break
            rejected += 1
        values[trial] = val / (2.0 * n)
    return _estimate(values, info_G(m / n, gamma), rejected)


def det_power(config: MCConfig) -> MCEstimate:
    """Sample |(1/m) M^T M|^(1/n) in the log domain (sum of log singular
    values) and compare with its almost-sure limit, defined for r >= 1."""
    n, m = config.n, config.m
    r = m / n
    if r < 1.0:
        raise ValueError(f"det_power requires aspect ratio >= 1, got {r}")
    if r == 1.0:
        target = 1.0 / math.e
    else:
        target = (r / (r - 1.0)) ** (r - 1.0) / math.e
    values = np.empty(config.trials)
    rejected = 0
    for trial in range(config.trials):
        rng = trial_rng(config.seed, trial)
        while True:
            mat = rng.standard_normal((m, n))
            sv = np.linalg.svd(mat, compute_uv=False)
            if np.all(sv > 0) and np.all(np.isfinite(sv)):
                break
            rejected += 1
        logdet = 2.0 * float(np.sum(np.log(sv))) - n * math.log(m)
        values[trial] = math.exp(logdet / n)
    return _estimate(values, target, rejected)


# ---------------------------------------------------------------------------
# Rank deficiency of discrete submatrices
# ---------------------------------------------------------------------------


def _int_rank(mat: list[list[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    a = [row[:] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    prev_pivot = 1
    row = 0
    for col in range(cols):
        pivot_row = next((i for i in range(row, rows) if a[i][col] != 0), None)
        if pivot_row is None:
            continue
        a[row], a[pivot_row] = a[pivot_row], a[row]
        pivot = a[row][col]
        for i in range(row + 1, rows):
            for j in range(col + 1, cols):
                a[i][j] = (a[i][j] * pivot - a[i][col] * a[row][j]) // prev_pivot
            a[i][col] = 0
        prev_pivot = pivot
        rank += 1
        row += 1
        if row == rows:
            break
    return rank


def rank_deficiency(
    n: int, omega: float, entry_law: str = "rademacher", trials: int = 2000, seed: int = 0
) -> float:
    """Empirical probability that a k x k i.i.d. submatrix is rank deficient,
    with k = floor(omega * n).  Exact integer elimination decides rank for the
    rademacher law; the Gaussian law uses floating-point rank."""
    k = int(math.floor(omega * n))
    if not 1 <= k <= n:
        raise ValueError(f"k = floor(omega * n) = {k} out of range for n = {n}")
    if entry_law not in ("gaussian", "rademacher"):
        raise ValueError(f"entry_law must be 'gaussian' or 'rademacher', got {entry_law}")
    deficient = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        if entry_law == "gaussian":
            mat = rng.standard_normal((k, k))
            if np.linalg.matrix_rank(mat) < k:
                deficient += 1
        else:
            mat = rng.choice([-1, 1], size=(k, k)).astype(int).tolist()
            if _int_rank(mat) < k:
                deficient += 1
    return deficient / trials


# ---------------------------------------------------------------------------
# Pattern counting and covering brackets
# ---------------------------------------------------------------------------


def n_tilde(n: int, k: int, alpha: float) -> int:
    """Exact number of size-k supports within relative-overlap distortion
    alpha of a fixed size-k support (big-integer arithmetic)."""
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, n], got {k}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    swaps = int(math.floor(alpha * k))
    return sum(math.comb(k, a) * math.comb(n - k, a) for a in range(swaps + 1))


def _support_neighbors(n: int, k: int, alpha: float):
    """Lexicographic support list plus flattened neighbor lists (CSR layout)."""
    supports = list(itertools.combinations(range(n), k))
    index = {s: i for i, s in enumerate(supports)}
    swaps = int(math.floor(alpha * k))
    flat: list[int] = []
    offsets = [0]
    universe = set(range(n))
    for s in supports:
        s_set = set(s)
        rest = sorted(universe - s_set)
        mine: list[int] = []
        for a in range(swaps + 1):
            for out in itertools.combinations(s, a):
                base = s_set.difference(out)
                for inn in itertools.combinations(rest, a):
                    mine.append(index[tuple(sorted(base.union(inn)))])
        flat.extend(mine)
        offsets.append(len(flat))
    return supports, np.asarray(flat, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def covering_bracket(n: int, k: int, alpha: float, seed: int = 0) -> tuple[int, int]:
    """Lower and upper bracket on the smallest covering of all size-k supports
    at distortion alpha.

    Lower end is the exact counting quotient ceil(C(n,k) / n_tilde); upper end
    is the size of a greedy cover (most uncovered supports first, ties to the
    lexicographically smallest).  ``seed`` is reserved; the greedy cover is
    deterministic.
    """
    if n > 24:
        raise ValueError(f"exhaustive support enumeration requires n <= 24, got {n}")
    total = math.comb(n, k)
    if total > 200_000:
        raise BudgetError(f"C({n},{k}) = {total} exceeds the enumeration budget")
    lower = -(-total // n_tilde(n, k, alpha))
    _, flat, offsets = _support_neighbors(n, k, alpha)
    uncovered = np.ones(total, dtype=bool)
    cover_size = 0
    while uncovered.any():
        # reduceat needs an integer view: summing booleans would saturate.
        counts = np.add.reduceat(uncovered[flat].astype(np.int64), offsets[:-1])
        choice = int(np.argmax(counts))
        uncovered[flat[offsets[choice] : offsets[choice + 1]]] = False
        cover_size += 1
    return lower, cover_size


# ---------------------------------------------------------------------------
# Truncated-power ratio
# ---------------------------------------------------------------------------


def power_ratio_scan(
    dist: DistributionSpec, omega: float, beta_grid
) -> list[tuple[float, float]]:
    """[P(omega, F_beta) / P(omega, F)] / beta^(2L) over the grid.

    Bounded above and below by positive constants for every supported
    distribution; callers assert the boundedness.
    """
    big_l = decay_rate(dist)
    base = omega * moments(dist).second_moment
    out = []
    for beta in beta_grid:
        tr = truncate(dist, beta)
        ratio = (omega * tr.second_moment / base) / beta ** (2.0 * big_l)
        out.append((float(beta), float(ratio)))
    return out
