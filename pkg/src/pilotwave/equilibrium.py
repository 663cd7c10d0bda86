"""Born-rule sampling and statistical equivariance checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import kstwobign

from .fields import Grid1D, WaveState, density
from .guidance import Ensemble, run_trajectories
from .propagator import EvolutionRecord

__all__ = [
    "GridDistribution",
    "EquivarianceReport",
    "sample_born",
    "ks_distance",
    "ks_threshold",
    "equivariance_report",
    "verify_equivariance",
]


class GridDistribution:
    """Probability law whose density is linear between grid nodes.

    The periodic closing cell [x_{n-1}, x_max] interpolates back to node 0.
    """

    def __init__(self, grid: Grid1D, rho: np.ndarray):
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (grid.n,):
            raise ValueError(f"density must have shape ({grid.n},)")
        if np.any(rho < 0):
            raise ValueError("density must be non-negative")
        total = rho.sum() * grid.dx
        if not total > 0:
            raise ValueError("density has zero norm")
        self.grid = grid
        self.nodes = np.append(grid.x, grid.x_max)
        self.rho = np.append(rho, rho[0]) / total
        cell_mass = 0.5 * (self.rho[:-1] + self.rho[1:]) * grid.dx
        self.cdf_nodes = np.concatenate([[0.0], np.cumsum(cell_mass)])
        self.cdf_nodes /= self.cdf_nodes[-1]

    @property
    def cell_probabilities(self) -> np.ndarray:
        return np.diff(self.cdf_nodes)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        g = self.grid
        xc = np.clip(x, g.x_min, g.x_max)
        k = np.minimum(((xc - g.x_min) // g.dx).astype(int), g.n - 1)
        s = xc - self.nodes[k]
        r0, r1 = self.rho[k], self.rho[k + 1]
        out = self.cdf_nodes[k] + r0 * s + 0.5 * (r1 - r0) * s**2 / g.dx
        return np.clip(out, 0.0, 1.0)

    def ppf(self, u):
        """Exact inverse of :meth:`cdf` on (0, 1)."""
        u = np.asarray(u, dtype=float)
        g = self.grid
        k = np.clip(np.searchsorted(self.cdf_nodes, u, side="right") - 1, 0, g.n - 1)
        r = u - self.cdf_nodes[k]
        r0, r1 = self.rho[k], self.rho[k + 1]
        # root of r0*s + (r1-r0)*s^2/(2dx) = r, in the cancellation-free form
        disc = np.sqrt(np.maximum(r0**2 + 2.0 * r * (r1 - r0) / g.dx, 0.0))
        denom = r0 + disc
        s = np.divide(2.0 * r, denom, out=np.zeros_like(r), where=denom > 0)
        return self.nodes[k] + np.clip(s, 0.0, g.dx)


@dataclass(frozen=True)
class EquivarianceReport:
    check_times: list[float]
    ks_statistics: list[float]
    sample_count: int
    threshold: float
    alpha: float

    @property
    def passed(self) -> bool:
        return all(d < self.threshold for d in self.ks_statistics)

    @property
    def max_statistic(self) -> float:
        return max(self.ks_statistics)

    def as_dict(self) -> dict:
        return {
            "check_times": [float(t) for t in self.check_times],
            "ks_statistics": [float(d) for d in self.ks_statistics],
            "sample_count": self.sample_count,
            "threshold": self.threshold,
            "alpha": self.alpha,
            "passed": self.passed,
        }


def sample_born(state: WaveState, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` positions from |psi|^2 by inverse-CDF transform."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    dist = GridDistribution(state.grid, density(state))
    u = np.random.default_rng(seed).random(count)
    return state.grid.wrap(dist.ppf(u))


def ks_distance(samples: Sequence[float], reference_cdf: Callable) -> float:
    """Kolmogorov-Smirnov statistic sup |F_empirical - F_reference|."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("samples must be non-empty")
    f = np.asarray(reference_cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_threshold(count: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value, e.g. 1.628/sqrt(n) at alpha = 0.01."""
    return float(kstwobign.isf(alpha) / np.sqrt(count))


def equivariance_report(
    ensemble: Ensemble,
    evolution: EvolutionRecord,
    check_times: Sequence[float],
    alpha: float = 0.01,
) -> EquivarianceReport:
    """Compare ensemble positions at each check time with |psi(., t)|^2."""
    stats = []
    for t in check_times:
        i = evolution.index_of_time(t)
        dist = GridDistribution(evolution.grid, density(evolution.state(i)))
        stats.append(ks_distance(ensemble.positions[:, i], dist.cdf))
    return EquivarianceReport(
        [float(t) for t in check_times], stats, len(ensemble), ks_threshold(len(ensemble), alpha), alpha
    )


def verify_equivariance(
    evolution: EvolutionRecord,
    count: int,
    seed: int,
    check_times: Sequence[float],
    alpha: float = 0.01,
) -> EquivarianceReport:
    if count < 1000:
        raise ValueError(f"count must be >= 1000 for a meaningful KS test, got {count}")
    x0 = sample_born(evolution.state(0), count, seed)
    ensemble = run_trajectories(x0, evolution, master_seed=seed)
    return equivariance_report(ensemble, evolution, check_times, alpha)
