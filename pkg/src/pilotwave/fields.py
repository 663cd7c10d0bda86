"""Grids, scalar/spinor wave functions and their spectral representation.

Units are dimensionless with hbar = 1 and m = 1.  Every field lives on a
uniform periodic lattice: node ``n`` is identified with node ``0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft as spfft

__all__ = [
    "Grid1D",
    "WaveState",
    "Potential",
    "make_grid",
    "norm_squared",
    "density",
    "fourier_transform",
    "inverse_fourier_transform",
    "spectral_derivative",
]


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {self.n}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dp(self) -> float:
        return 2 * np.pi / self.length

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wave numbers in FFT order."""
        k = 2 * np.pi * spfft.fftfreq(self.n, d=self.dx)
        k.setflags(write=False)
        return k

    @cached_property
    def p(self) -> np.ndarray:
        """Momentum nodes 2*pi*j/L for j in [-n/2, n/2), ascending."""
        p = self.dp * np.arange(-self.n // 2, self.n // 2)
        p.setflags(write=False)
        return p

    def wrap(self, x):
        """Map positions into [x_min, x_max)."""
        w = self.x_min + np.mod(np.asarray(x, dtype=float) - self.x_min, self.length)
        # mod can round up to exactly L for tiny negative offsets
        return np.where(w >= self.x_max, self.x_min, w)

    def index_of(self, x: float) -> int:
        """Nearest node to ``x`` (periodic)."""
        return int(np.rint((self.wrap(x) - self.x_min) / self.dx)) % self.n


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n))


@dataclass(frozen=True)
class WaveState:
    """Snapshot of a scalar or two-component (spinor) wave function.

    ``components`` has shape ``(1, n)`` for a scalar state and ``(2, n)`` for a
    spinor ``(psi_up, psi_down)``.  The array is read-only.
    """

    grid: Grid1D
    components: np.ndarray
    time: float = 0.0
    kind: str = field(init=False)

    def __post_init__(self):
        comps = np.array(self.components, dtype=complex, copy=True)
        if comps.ndim == 1:
            comps = comps[None, :]
        if comps.ndim != 2 or comps.shape[0] not in (1, 2):
            raise ValueError(f"expected 1 or 2 components, got shape {comps.shape}")
        if comps.shape[1] != self.grid.n:
            raise ValueError(f"component length {comps.shape[1]} != grid.n {self.grid.n}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "kind", "scalar" if comps.shape[0] == 1 else "spinor")
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def scalar(cls, grid: Grid1D, psi, time: float = 0.0) -> "WaveState":
        return cls(grid, np.asarray(psi)[None, :], time)

    @classmethod
    def spinor(cls, grid: Grid1D, up, down, time: float = 0.0) -> "WaveState":
        return cls(grid, np.stack([np.asarray(up), np.asarray(down)]), time)

    @classmethod
    def from_amplitudes(cls, grid: Grid1D, psi, c1: complex, c2: complex, time: float = 0.0):
        """Spinor ``(c1*psi, c2*psi)`` sharing one spatial profile."""
        psi = np.asarray(psi, dtype=complex)
        return cls.spinor(grid, c1 * psi, c2 * psi, time)

    @property
    def psi(self) -> np.ndarray:
        """The scalar wave function; only valid for scalar states."""
        if self.kind != "scalar":
            raise ValueError("psi is only defined for scalar states")
        return self.components[0]

    @property
    def magnitude(self) -> np.ndarray:
        """R in the polar form psi = R exp(iS), per component."""
        return np.abs(self.components)

    @property
    def phase(self) -> np.ndarray:
        """S in the polar form psi = R exp(iS), per component (principal branch)."""
        return np.angle(self.components)

    def normalized(self) -> "WaveState":
        nrm = norm_squared(self)
        if nrm == 0:
            raise ValueError("cannot normalize a zero state")
        return WaveState(self.grid, self.components / np.sqrt(nrm), self.time)

    def with_time(self, time: float) -> "WaveState":
        return WaveState(self.grid, self.components, time)


@dataclass(frozen=True)
class Potential:
    """Spin-diagonal external potential.

    ``free`` is V = 0.  ``linear_sg`` models a Stern-Gerlach gradient along z:
    V_up(z) = -orientation * gradient * z and V_down(z) = +orientation * gradient * z,
    so the up component is pushed toward ``orientation``.
    """

    form: str = "free"
    gradient: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        if self.form == "free":
            if self.gradient != 0.0:
                raise ValueError("free potential takes no gradient")
        elif self.form == "linear_sg":
            if not self.gradient > 0:
                raise ValueError(f"linear_sg gradient must be > 0, got {self.gradient}")
            if self.orientation not in (1, -1):
                raise ValueError(f"orientation must be +1 or -1, got {self.orientation}")
        else:
            raise ValueError(f"unknown potential form {self.form!r}")

    @classmethod
    def free(cls) -> "Potential":
        return cls()

    @classmethod
    def linear_sg(cls, gradient: float, orientation: int = 1) -> "Potential":
        return cls("linear_sg", float(gradient), int(orientation))

    @property
    def is_free(self) -> bool:
        return self.form == "free"

    def values(self, grid: Grid1D, ncomp: int) -> np.ndarray:
        """Potential per component on the grid, shape ``(ncomp, n)``."""
        if self.is_free:
            return np.zeros((ncomp, grid.n))
        if ncomp != 2:
            raise ValueError("linear_sg potential requires a spinor state")
        up = -self.orientation * self.gradient * grid.x
        down = self.orientation * self.gradient * grid.x
        return np.stack([up, down])


def norm_squared(state: WaveState) -> float:
    return float(np.sum(np.abs(state.components) ** 2) * state.grid.dx)


def density(state: WaveState) -> np.ndarray:
    """rho = sum over components of |psi_c|^2 at each node."""
    rho = np.abs(state.components[0]) ** 2
    for comp in state.components[1:]:
        rho = rho + np.abs(comp) ** 2
    return rho


def fourier_transform(state: WaveState) -> tuple[np.ndarray, np.ndarray]:
    """Unitary transform to the momentum lattice.

    Returns ``(p, psi_hat)`` with ``p`` ascending and
    ``psi_hat(p) = (2*pi)^-1/2 * integral psi(x) exp(-i p x) dx``, so that
    ``sum |psi_hat|^2 dp == sum |psi|^2 dx``.
    """
    if state.kind != "scalar":
        raise ValueError("momentum analysis is defined for scalar states only")
    g = state.grid
    raw = spfft.fftshift(spfft.fft(state.psi))
    return g.p.copy(), raw * np.exp(-1j * g.p * g.x_min) * g.dx / np.sqrt(2 * np.pi)


def inverse_fourier_transform(grid: Grid1D, psi_hat: np.ndarray, time: float = 0.0) -> WaveState:
    raw = np.asarray(psi_hat) * np.exp(1j * grid.p * grid.x_min) * np.sqrt(2 * np.pi) / grid.dx
    return WaveState.scalar(grid, spfft.ifft(spfft.ifftshift(raw)), time)


def spectral_derivative(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    """d/dx along the last axis; the unpaired Nyquist mode is dropped.

    Real input gives an exactly real result.
    """
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return spectral_derivative(grid, values.real) + 1j * spectral_derivative(grid, values.imag)
    k = 2 * np.pi * spfft.rfftfreq(grid.n, d=grid.dx)
    k[-1] = 0.0
    return spfft.irfft(1j * k * spfft.rfft(values, axis=-1), n=grid.n, axis=-1)
