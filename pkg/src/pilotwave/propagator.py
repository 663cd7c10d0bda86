"""Time evolution under i d/dt psi = (-1/2 d^2/dx^2 + V) psi.

The numerical propagator is symmetric (Strang) split-step Fourier: half a
potential phase, a full kinetic phase in the spectral basis, half a potential
phase.  Closed-form free Gaussians are provided as oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as spfft

from .fields import Grid1D, Potential, WaveState, density, norm_squared, spectral_derivative
from .guidance import current

__all__ = [
    "EvolutionRecord",
    "split_step_evolve",
    "strang_steps",
    "analytic_free_gaussian",
    "analytic_free_packet",
    "continuity_residual",
]

NORM_TOL = 1e-8


@dataclass(frozen=True)
class EvolutionRecord:
    """Stored snapshots of one evolution.

    ``psi`` has shape ``(len(times), ncomp, n)``; ``dt`` is the propagation step
    and ``store_every`` the number of steps between stored snapshots.
    """

    grid: Grid1D
    times: np.ndarray
    psi: np.ndarray
    potential: Potential
    dt: float
    store_every: int

    @property
    def sample_dt(self) -> float:
        return self.dt * self.store_every

    @property
    def ncomp(self) -> int:
        return self.psi.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def state(self, index: int) -> WaveState:
        return WaveState(self.grid, self.psi[index], float(self.times[index]))

    @property
    def states(self) -> list[WaveState]:
        return [self.state(i) for i in range(len(self))]

    def index_of_time(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not on the stored lattice")
        return i

    def norm_drift(self) -> float:
        norms = np.sum(np.abs(self.psi) ** 2, axis=(1, 2)) * self.grid.dx
        return float(np.max(np.abs(norms - 1.0)))


def strang_steps(psi: np.ndarray, grid: Grid1D, v: np.ndarray | None, dt: float, steps: int) -> np.ndarray:
    """Apply ``steps`` Strang steps to ``psi`` (shape ``(ncomp, n)``).

    ``v`` is the per-component potential array or None for a free particle.
    """
    kinetic = np.exp(-0.5j * grid.k**2 * dt)
    half = None if v is None else np.exp(-0.5j * v * dt)
    out = np.array(psi, dtype=complex)
    for _ in range(steps):
        if half is not None:
            out *= half
        out = spfft.ifft(spfft.fft(out, axis=-1) * kinetic, axis=-1)
        if half is not None:
            out *= half
    return out


def split_step_evolve(
    initial: WaveState,
    potential: Potential,
    dt: float,
    steps: int,
    store_every: int = 1,
) -> EvolutionRecord:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if store_every < 1:
        raise ValueError(f"store_every must be >= 1, got {store_every}")
    if steps % store_every:
        raise ValueError(f"store_every={store_every} does not divide steps={steps}")
    nrm = norm_squared(initial)
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state is not normalized (norm^2 = {nrm:.12g})")

    grid = initial.grid
    ncomp = initial.components.shape[0]
    v = None
    if not potential.is_free:
        v = potential.values(grid, ncomp)
        vmax = float(np.max(np.abs(v)))
        if dt * vmax > np.pi:
            raise ValueError(f"dt*max|V| = {dt * vmax:.3g} exceeds pi; reduce dt")

    n_store = steps // store_every + 1
    psi = np.empty((n_store, ncomp, grid.n), dtype=complex)
    psi[0] = initial.components
    latest = initial.components
    for i in range(1, n_store):
        latest = strang_steps(latest, grid, v, dt, store_every)
        psi[i] = latest
    times = initial.time + dt * store_every * np.arange(n_store)
    psi.setflags(write=False)
    times.setflags(write=False)
    return EvolutionRecord(grid, times, psi, potential, float(dt), int(store_every))


def analytic_free_gaussian(x, t):
    """Free evolution of pi^-1/4 exp(-x^2/2) (principal branch square root)."""
    x = np.asarray(x, dtype=float)
    z = 1.0 + 1j * np.asarray(t, dtype=float)
    return z**-0.5 * np.pi**-0.25 * np.exp(-(x**2) / (2 * z))


def analytic_free_packet(x, t, center=0.0, width=2**-0.5, k0=0.0):
    """Free evolution of a normalized Gaussian packet.

    At t = 0 the packet is ``(2 pi width^2)^-1/4 exp(-(x-center)^2/(4 width^2) + i k0 x)``,
    so ``width`` is the standard deviation of its density.
    """
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    s = 1.0 + 1j * t / (2 * width**2)
    xi = x - center - k0 * t
    norm = (2 * np.pi * width**2) ** -0.25
    return norm * s**-0.5 * np.exp(-(xi**2) / (4 * width**2 * s) + 1j * k0 * x - 0.5j * k0**2 * t)


def continuity_residual(record: EvolutionRecord, t_index: int) -> float:
    """max |d rho/dt + dJ/dx| at an interior stored time.

    The time derivative is a central difference across neighbouring stored
    snapshots; the space derivative is spectral.
    """
    if not 0 < t_index < len(record) - 1:
        raise IndexError(f"t_index must be interior to (0, {len(record) - 1}), got {t_index}")
    h = record.sample_dt
    drho = (density(record.state(t_index + 1)) - density(record.state(t_index - 1))) / (2 * h)
    dj = spectral_derivative(record.grid, current(record.state(t_index))).real
    return float(np.max(np.abs(drho + dj)))
