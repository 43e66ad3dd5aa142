"""Continuous phase-estimation POVM over correlated qudit states.

The measurement {E(theta)} resolves the phase angle of a state whose
amplitudes carry the gradient exp(i*j*theta_v).  Its outcome density is

    p(theta) = sin^2(D*(theta - theta_v)/2) / (2*pi*D * sin^2((theta - theta_v)/2))

on [0, 2*pi), with the removable singularity at theta = theta_v filled
by its limit D^2 / (2*pi*D).  Sampling uses inverse transform over a
65536-interval tabulated CDF of the centered density; the table is
built once per dimension and shifted by theta_v at draw time, so one
uniform draw yields one sample.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import DomainError, ParameterError
from ..rng import Rng

TABLE_POINTS = 1 << 16

_TWO_PI = 2.0 * np.pi
_SINGULARITY_EPS = 1e-8


def phase_povm_density(theta, dim: int, theta_v: float = 0.0):
    """Outcome density p(theta); vectorized over theta.

    Values where |sin((theta - theta_v)/2)| < 1e-8 take the limit value
    dim^2 (before the 1/(2*pi*dim) prefactor).
    """
    if dim < 1:
        raise ParameterError("dimension must be >= 1")
    u = np.asarray(theta, dtype=float) - theta_v
    half = np.sin(u / 2.0)
    small = np.abs(half) < _SINGULARITY_EPS
    safe = np.where(small, 1.0, half)
    kernel = np.where(small, float(dim) ** 2, np.sin(dim * u / 2.0) ** 2 / safe**2)
    out = kernel / (_TWO_PI * dim)
    return float(out) if np.isscalar(theta) else out


@lru_cache(maxsize=32)
def phase_povm_table(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(grid, cdf) for the centered density; grid has 65537 points on [0, 2*pi]."""
    if dim < 1:
        raise ParameterError("dimension must be >= 1")
    grid = np.linspace(0.0, _TWO_PI, TABLE_POINTS + 1)
    dens = phase_povm_density(grid, dim)
    steps = np.diff(grid)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * steps)])
    total = cdf[-1]
    if abs(total - 1.0) > 1e-4:
        raise DomainError(f"tabulated density mass {total!r} is not close to 1")
    cdf /= total
    cdf[-1] = 1.0
    grid.setflags(write=False)
    cdf.setflags(write=False)
    return grid, cdf


def sample_phase_povm(dim: int, theta_v: float, rng: Rng, size: int | None = None):
    """Draw outcome angles in [0, 2*pi) for a state with phase angle theta_v.

    Consumes exactly one uniform per sample.  Returns a float when size
    is None, else an ndarray of length size.
    """
    if size is not None and size < 1:
        raise ParameterError("size must be positive when given")
    grid, cdf = phase_povm_table(dim)
    u = rng.random(size if size is not None else 1)
    u = np.atleast_1d(u)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.clip(idx, 1, TABLE_POINTS)
    c0, c1 = cdf[idx - 1], cdf[idx]
    frac = (u - c0) / np.maximum(c1 - c0, 1e-300)
    centered = grid[idx - 1] + frac * (grid[idx] - grid[idx - 1])
    shifted = np.mod(centered + theta_v, _TWO_PI)
    return float(shifted[0]) if size is None else shifted
