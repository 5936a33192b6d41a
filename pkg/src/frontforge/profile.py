"""Heteroclinic profiles on a truncated uniform grid.

Nodes are ``phi_i = -M + i h`` with ``h = 1 / (2k)``, so the half-unit shifts
used by the averaging operator and the centred difference are exact index
shifts of ``k`` nodes.  Outside ``[-M, M]`` a profile is extended by its
constant limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import isotonic_regression

from .errors import BadParams, NoCrossing

#: Descents larger than this trigger a monotone projection in :func:`enforce_cone`.
DESCENT_TOL = 1e-14


@dataclass(frozen=True)
class Grid:
    h: float = 0.05
    M: float = 40.0
    k: int = field(init=False)
    n: int = field(init=False)

    def __post_init__(self):
        if not (self.h > 0 and self.M > 0):
            raise BadParams(f"grid needs h > 0 and M > 0, got h={self.h}, M={self.M}")
        k = round(1.0 / (2.0 * self.h))
        if k < 2 or abs(1.0 / (2.0 * self.h) - k) > 1e-9:
            raise BadParams(f"h must equal 1/(2k) for an integer k >= 2, got h={self.h}")
        half = self.M * 2 * k
        if abs(half - round(half)) > 1e-9:
            raise BadParams(f"M/h must be an integer, got M={self.M}, h={self.h}")
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "h", 1.0 / (2 * k))
        object.__setattr__(self, "n", 2 * int(round(half)) + 1)

    @property
    def center(self) -> int:
        """Index of the node at phi = 0."""
        return (self.n - 1) // 2

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.n) - self.center) * self.h

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights over [-M, M]."""
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass
class Profile:
    grid: Grid
    values: np.ndarray
    left_limit: float = -1.0
    right_limit: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise BadParams(f"profile needs {self.grid.n} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise BadParams("profile values must be finite")

    @property
    def phi(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values, left_limit=None, right_limit=None) -> "Profile":
        return Profile(self.grid, values,
                       self.left_limit if left_limit is None else left_limit,
                       self.right_limit if right_limit is None else right_limit)

    def padded(self, width: int) -> np.ndarray:
        return np.concatenate([np.full(width, self.left_limit), self.values,
                               np.full(width, self.right_limit)])

    def __call__(self, phi):
        """Piecewise-linear interpolant with constant extension."""
        return np.interp(phi, self.grid.nodes, self.values,
                         left=self.left_limit, right=self.right_limit)


def from_function(grid: Grid, func, left_limit=-1.0, right_limit=1.0) -> Profile:
    return Profile(grid, func(grid.nodes), left_limit, right_limit)


def shock_profile(grid: Grid) -> Profile:
    return Profile(grid, np.sign(grid.nodes), -1.0, 1.0)


def _kernel(grid: Grid) -> np.ndarray:
    kern = np.full(2 * grid.k + 1, grid.h)
    kern[0] = kern[-1] = 0.5 * grid.h
    return kern


def average(u: Profile) -> Profile:
    """Unit-window moving integral, exact for the piecewise-linear interpolant."""
    k = u.grid.k
    vals = np.convolve(u.padded(k), _kernel(u.grid), mode="valid")
    return u.with_values(vals)


def nabla(u: Profile) -> Profile:
    """Centred unit difference ``u(phi + 1/2) - u(phi - 1/2)``; limits become 0."""
    k = u.grid.k
    p = u.padded(k)
    return Profile(u.grid, p[2 * k:] - p[:-2 * k], 0.0, 0.0)


def l2_deviation(u: Profile) -> float:
    """Trapezoid L2 norm of ``W_sh - u`` over [-M, M]."""
    diff = np.sign(u.grid.nodes) - u.values
    return float(np.sqrt(u.grid.integrate(diff * diff)))


def shift_nodes(u: Profile, s: int) -> Profile:
    """Return ``v`` with ``v[i] = u[i - s]``; vacated nodes take the limit values."""
    s = int(s)
    if s == 0:
        return u.with_values(u.values.copy())
    n = u.grid.n
    if abs(s) >= n:
        fill = u.left_limit if s > 0 else u.right_limit
        return u.with_values(np.full(n, fill))
    if s > 0:
        vals = np.concatenate([np.full(s, u.left_limit), u.values[:n - s]])
    else:
        vals = np.concatenate([u.values[-s:], np.full(-s, u.right_limit)])
    return u.with_values(vals)


def crossing_index(u: Profile) -> int:
    """Index ``c`` of the last node before the first positive value."""
    pos = u.values > 0.0
    if not pos.any() or pos[0]:
        raise NoCrossing("profile does not change sign on [-M, M]")
    return int(np.argmax(pos)) - 1


def pin(u: Profile):
    """Shift by whole nodes so that ``u(0) <= 0 < u(h)``.

    Returns the pinned profile and the applied shift ``s`` (``new[i] = old[i - s]``).
    """
    s = u.grid.center - crossing_index(u)
    return shift_nodes(u, s), s


def enforce_cone(u: Profile):
    """Nearest nondecreasing profile with values between the limits.

    Pool-adjacent-violators runs only if some descent exceeds ``DESCENT_TOL``;
    clipping afterwards keeps the result the exact L2 projection onto the cone.
    Returns ``(profile, largest correction)``.
    """
    lo, hi = u.left_limit, u.right_limit
    vals = u.values
    if vals.size > 1 and np.max(vals[:-1] - vals[1:]) > DESCENT_TOL:
        vals = isotonic_regression(vals, increasing=True).x
    vals = np.clip(vals, lo, hi)
    correction = float(np.max(np.abs(vals - u.values))) if vals.size else 0.0
    return u.with_values(vals), correction


def is_monotone(u: Profile, tol: float = 0.0) -> bool:
    return bool(np.all(np.diff(u.values) >= -tol))
