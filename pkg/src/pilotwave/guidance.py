"""Velocity fields from the wave function and trajectory integration.

The velocity at a node is ``Im(psi* . dpsi/dx) / (psi* . psi)`` with the dot
product running over spinor components and the derivative taken spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .fields import Grid1D, WaveState, spectral_derivative

if TYPE_CHECKING:
    from .propagator import EvolutionRecord

__all__ = [
    "RHO_FLOOR",
    "Trajectory",
    "Ensemble",
    "current",
    "velocity_field",
    "velocity_from_arrays",
    "periodic_spline",
    "advance_trajectory",
    "run_trajectories",
]

# relative to max(rho); below this the guiding ratio is 0/0 in practice
RHO_FLOOR = 1e-14


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.positions):
            raise ValueError("times and positions differ in length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")


@dataclass(frozen=True)
class Ensemble:
    """Trajectories sharing one time lattice; ``positions[i, k]`` is X_i(t_k)."""

    times: np.ndarray
    positions: np.ndarray
    master_seed: int | None = None
    evolution: "EvolutionRecord | None" = None

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def trajectories(self) -> Iterator[Trajectory]:
        for row in self.positions:
            yield Trajectory(self.times, row)

    @property
    def initial(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def final(self) -> np.ndarray:
        return self.positions[:, -1]

    def at_time(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        return self.positions[:, i]


def _current_arrays(grid: Grid1D, comps: np.ndarray) -> np.ndarray:
    # Im(psi* psi') = re*im' - im*re'; real states give exactly zero
    re, im = comps.real, comps.imag
    j = re * spectral_derivative(grid, im) - im * spectral_derivative(grid, re)
    return j.sum(axis=0) if j.shape[0] > 1 else j[0]


def current(state: WaveState) -> np.ndarray:
    """Probability current J = Im(psi* . dpsi/dx) at every node."""
    return _current_arrays(state.grid, state.components)


def _fill_below_floor(values: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """Replace entries where ``ok`` is False by the nearest ok entry (periodic)."""
    if ok.all():
        return values
    good = np.flatnonzero(ok)
    if good.size == 0:
        return np.zeros_like(values)
    n = values.size
    bad = np.flatnonzero(~ok)
    pos = np.searchsorted(good, bad)
    right = good[pos % good.size]
    left = good[pos - 1]
    d_right = (right - bad) % n
    d_left = (bad - left) % n
    out = values.copy()
    out[bad] = np.where(d_left <= d_right, values[left], values[right])
    return out


def velocity_from_arrays(grid: Grid1D, comps: np.ndarray) -> np.ndarray:
    comps = np.asarray(comps)
    if comps.ndim == 1:
        comps = comps[None, :]
    rho = np.abs(comps[0]) ** 2
    for c in comps[1:]:
        rho = rho + np.abs(c) ** 2
    j = _current_arrays(grid, comps)
    ok = rho >= RHO_FLOOR * rho.max() if rho.max() > 0 else np.zeros(rho.shape, bool)
    v = np.zeros_like(j)
    np.divide(j, rho, out=v, where=ok)
    return _fill_below_floor(v, ok)


def velocity_field(state: WaveState) -> np.ndarray:
    """Guiding velocity at every node.

    Nodes with rho < RHO_FLOOR * max(rho) take the velocity of the nearest node
    above the floor, so the field is always finite.
    """
    return velocity_from_arrays(state.grid, state.components)


def periodic_spline(grid: Grid1D, values: np.ndarray) -> CubicSpline:
    nodes = np.append(grid.x, grid.x_max)
    return CubicSpline(nodes, np.append(values, values[0]), bc_type="periodic")


def _rk4(x, h, grid, s0, s1):
    """One RK4 step; the field at t + h/2 is the mean of the endpoint fields."""
    def mid(y):
        return 0.5 * (s0(y) + s1(y))

    k1 = s0(x)
    k2 = mid(grid.wrap(x + 0.5 * h * k1))
    k3 = mid(grid.wrap(x + 0.5 * h * k2))
    k4 = s1(grid.wrap(x + h * k3))
    return grid.wrap(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def advance_trajectory(x, v_now: np.ndarray, v_next: np.ndarray, dt: float, grid: Grid1D):
    """Advance position(s) ``x`` by one step through node-sampled velocity fields.

    ``v_now`` and ``v_next`` are the fields at t and t + dt.  Space uses a
    periodic cubic spline, time is linear between the two fields.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    s0 = periodic_spline(grid, np.asarray(v_now, dtype=float))
    s1 = periodic_spline(grid, np.asarray(v_next, dtype=float))
    out = _rk4(grid.wrap(x), dt, grid, s0, s1)
    return float(out) if np.ndim(out) == 0 else out


def run_trajectories(
    initial_positions: Sequence[float],
    evolution: "EvolutionRecord",
    master_seed: int | None = None,
    chunk_size: int | None = None,
) -> Ensemble:
    """Integrate one trajectory per initial position over the stored lattice.

    Trajectories are independent; ``chunk_size`` only bounds working memory
    and never changes the result.
    """
    if len(evolution) == 0:
        raise ValueError("evolution record is empty")
    grid = evolution.grid
    x0 = np.asarray(initial_positions, dtype=float)
    if np.any((x0 < grid.x_min) | (x0 >= grid.x_max)):
        raise ValueError("initial positions must lie in [x_min, x_max)")
    n_t = len(evolution)
    out = np.empty((x0.size, n_t))
    out[:, 0] = x0
    if n_t > 1 and x0.size:
        h = evolution.sample_dt
        chunks = [slice(0, x0.size)] if not chunk_size else [
            slice(i, i + chunk_size) for i in range(0, x0.size, chunk_size)
        ]
        s_prev = periodic_spline(grid, velocity_from_arrays(grid, evolution.psi[0]))
        for k in range(1, n_t):
            s_next = periodic_spline(grid, velocity_from_arrays(grid, evolution.psi[k]))
            for sl in chunks:
                out[sl, k] = _rk4(out[sl, k - 1], h, grid, s_prev, s_next)
            s_prev = s_next
    times = np.array(evolution.times)
    return Ensemble(times, out, master_seed, evolution)
