"""Direct simulation of a finite atomic chain.

Atoms ``alpha = 0..N-1`` obey ``x''_alpha = Phi'(r_alpha) - Phi'(r_{alpha-1})``
with strains ``r_alpha = x_{alpha+1} - x_alpha``.  The chain ends see ghost
strains frozen at ``r-`` (left) and ``r+`` (right), i.e. constant end forces.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import BadParams, Instability, MismatchedShock
from .profile import Profile, average
from .psystem import ShockData

BLOWUP = 1e6


@dataclass
class ChainState:
    time: float
    positions: np.ndarray
    velocities: np.ndarray
    r_minus: float
    r_plus: float
    boundary_work: float = 0.0
    origin: float = 0.0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        if self.positions.shape != self.velocities.shape or self.positions.ndim != 1:
            raise BadParams("positions and velocities must be 1-d arrays of equal length")
        if self.positions.size < 2:
            raise BadParams("a chain needs at least two atoms")

    @property
    def n_atoms(self) -> int:
        return self.positions.size

    @property
    def strains(self) -> np.ndarray:
        return np.diff(self.positions)

    def copy(self) -> "ChainState":
        return replace(self, positions=self.positions.copy(), velocities=self.velocities.copy())


@dataclass
class TWDeviation:
    shape_error: float
    speed_fit: float
    energy_drift: float

    def to_dict(self) -> dict:
        return {"shape_error": self.shape_error, "speed_fit": self.speed_fit,
                "energy_drift": self.energy_drift}


def _from_strains(r: np.ndarray, v: np.ndarray, r_minus, r_plus, origin) -> ChainState:
    x = np.concatenate([[0.0], np.cumsum(r)])
    return ChainState(0.0, x, np.asarray(v, dtype=float), float(r_minus), float(r_plus), 0.0, float(origin))


def denormalize_front(w: Profile, s: ShockData, np_=None, rtol: float = 1e-9):
    """Strain and velocity profiles ``R``, ``V`` of the lattice front encoded by ``w``.

    ``V = <v> + [[v]] W / 2`` and ``R(phi) = <r> + [[r]] (A W)(phi + 1/2) / 2``,
    both as piecewise-linear interpolants with constant extension.

    Raises
    ------
    MismatchedShock
        If ``np_`` (the normalized potential ``w`` was computed for) was not
        built from the strains and speed of ``s``.
    """
    if np_ is not None:
        ok = (np.isclose(np_.r_mean, s.r_mean, rtol=rtol, atol=rtol)
              and np.isclose(np_.r_jump, s.r_jump, rtol=rtol, atol=rtol)
              and np.isclose(np_.dphi_jump, s.sigma**2 * s.r_jump, rtol=1e-7, atol=1e-9))
        if not ok:
            raise MismatchedShock(
                f"profile was computed for r in [{np_.r_mean - np_.r_jump / 2:.6g}, "
                f"{np_.r_mean + np_.r_jump / 2:.6g}], shock has r- = {s.r_minus:.6g}, r+ = {s.r_plus:.6g}")
    aw = average(w)
    phi = w.grid.nodes

    def R(x):
        y = np.interp(np.asarray(x, dtype=float) + 0.5, phi, aw.values,
                      left=w.left_limit, right=w.right_limit)
        return s.r_mean + 0.5 * s.r_jump * y

    def V(x):
        y = np.interp(np.asarray(x, dtype=float), phi, w.values, left=w.left_limit, right=w.right_limit)
        return s.v_mean + 0.5 * s.v_jump * y

    return R, V


def tw_residual(R, V, sigma: float, phi, h: float = 1e-3) -> float:
    """Sup of ``sigma R'(phi) + V(phi + 1) - V(phi)`` with a centred difference for ``R'``."""
    phi = np.asarray(phi, dtype=float)
    dr = (R(phi + h) - R(phi - h)) / (2.0 * h)
    return float(np.max(np.abs(sigma * dr + V(phi + 1.0) - V(phi))))


def init_riemann(s: ShockData, N: int = 2000, smoothing: float = 0.0) -> ChainState:
    """Step data from ``(r-, v-)`` to ``(r+, v+)`` at the chain midpoint.

    With ``smoothing > 0`` the step is replaced by a tanh ramp of that width
    (in atoms).
    """
    if N < 100:
        raise BadParams(f"N must be at least 100, got {N}")
    mid = 0.5 * N
    xs = np.arange(N - 1) + 0.5 - mid
    xv = np.arange(N) - mid

    def ramp(x):
        if smoothing > 0.0:
            return np.tanh(x / smoothing)
        return np.where(x < 0.0, -1.0, 1.0)

    r = s.r_mean + 0.5 * s.r_jump * ramp(xs)
    v = s.v_mean + 0.5 * s.v_jump * ramp(xv)
    return _from_strains(r, v, s.r_minus, s.r_plus, mid)


def init_front(R, V, s: ShockData, N: int = 2000) -> ChainState:
    """Sample the travelling wave at ``t = 0``: ``r_alpha = R(alpha - N/2)``, ``v_alpha = V(alpha - N/2)``."""
    mid = 0.5 * N
    alpha = np.arange(N, dtype=float)
    r = R(alpha[:-1] - mid)
    v = V(alpha - mid)
    return _from_strains(r, v, s.r_minus, s.r_plus, mid)


def _accel(p, x, fm, fp):
    f = np.asarray(p.derivative(np.diff(x), 1), dtype=float)
    a = np.empty_like(x)
    a[1:-1] = f[1:] - f[:-1]
    a[0] = f[0] - fm
    a[-1] = fp - f[-1]
    return a


def step(state: ChainState, p, dt: float = 0.01, n_steps: int = 1) -> ChainState:
    """Advance ``n_steps`` velocity-Verlet steps; returns a new state.

    ``boundary_work`` accumulates the work of the constant ghost-strain end
    forces, so ``energy - boundary_work`` is the conserved combination.
    """
    if not dt > 0.0:
        raise BadParams(f"dt must be positive, got {dt}")
    fm = float(p.derivative(state.r_minus, 1))
    fp = float(p.derivative(state.r_plus, 1))
    x, v = state.positions.copy(), state.velocities.copy()
    work = state.boundary_work
    a = _accel(p, x, fm, fp)
    for _ in range(int(n_steps)):
        v += 0.5 * dt * a
        dx0, dx1 = dt * v[0], dt * v[-1]
        x += dt * v
        work += fp * dx1 - fm * dx0
        a = _accel(p, x, fm, fp)
        v += 0.5 * dt * a
        if not np.all(np.abs(v) <= BLOWUP):
            raise Instability(f"velocity exceeded {BLOWUP:g} at t = {state.time:.6g}")
    return replace(state, time=state.time + n_steps * dt, positions=x, velocities=v, boundary_work=work)


def reverse(state: ChainState) -> ChainState:
    """Flip all velocities; stepping a reversed state retraces the trajectory."""
    return replace(state, positions=state.positions.copy(), velocities=-state.velocities,
                   boundary_work=-state.boundary_work)


def conserved_quantities(state: ChainState, p):
    """``(energy, momentum)`` with energy ``sum v^2/2 + sum Phi(r)`` over the interior strains."""
    e = 0.5 * float(np.dot(state.velocities, state.velocities))
    e += float(np.sum(p.derivative(state.strains, 0)))
    return e, float(np.sum(state.velocities))


def simulate(state: ChainState, p, dt: float = 0.01, t_end: float = 10.0, n_snapshots: int = 11):
    """Integrate to ``t_end`` and return ``n_snapshots`` equally spaced states (including both ends)."""
    total = int(round((t_end - state.time) / dt))
    if total < 0:
        raise BadParams("t_end lies before the current time")
    marks = np.unique(np.round(np.linspace(0, total, n_snapshots)).astype(int))
    snaps = [state.copy()]
    done = 0
    for m in marks[1:]:
        state = step(state, p, dt, m - done)
        done = m
        snaps.append(state.copy())
    return snaps


def crossing_position(state: ChainState, level: float, guess: float | None = None) -> float:
    """Atom coordinate (relative to ``origin``) where the strain crosses ``level``.

    Strain ``r_alpha`` is located at ``alpha``.  Among several crossings the
    one nearest to ``guess`` is returned.
    """
    d = state.strains - level
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) <= 0)[0]
    idx = idx[d[idx] != d[idx + 1]]
    if idx.size == 0:
        return float("nan")
    pos = idx + d[idx] / (d[idx] - d[idx + 1]) - state.origin
    if guess is None:
        return float(pos[np.argmin(np.abs(pos))])
    return float(pos[np.argmin(np.abs(pos - guess))])


def measured_speed(snapshots, level: float, sigma_guess: float = 0.0) -> float:
    t = np.array([s.time for s in snapshots])
    pos = np.array([crossing_position(s, level, sigma_guess * (s.time - t[0])) for s in snapshots])
    ok = np.isfinite(pos)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(t[ok], pos[ok], 1)[0])


def tw_deviation(snapshots, R, sigma: float, p=None) -> TWDeviation:
    """Compare chain snapshots with the travelling wave ``r_alpha(t) = R(alpha - origin - sigma t)``."""
    if len(snapshots) < 2:
        raise BadParams("need at least two snapshots")
    first = snapshots[0]
    shape = 0.0
    for s in snapshots:
        alpha = np.arange(s.n_atoms - 1, dtype=float)
        shape = max(shape, float(np.max(np.abs(s.strains - R(alpha - s.origin - sigma * s.time)))))
    level = 0.5 * (first.r_minus + first.r_plus)
    speed = measured_speed(snapshots, level, sigma)
    drift = 0.0
    if p is not None:
        e0 = conserved_quantities(first, p)[0] - first.boundary_work
        scale = max(abs(e0), 1e-300)
        drift = max(abs(conserved_quantities(s, p)[0] - s.boundary_work - e0) / scale for s in snapshots)
    return TWDeviation(shape, speed, drift)


def transition_is_monotone(state: ChainState, level: float, half_width: int = 10,
                           tol: float = 1e-9) -> bool:
    """Whether strains change monotonically (up to ``tol``) within ``half_width`` atoms of the crossing."""
    c = crossing_position(state, level)
    if not np.isfinite(c):
        return False
    i = int(round(c + state.origin))
    seg = state.strains[max(i - half_width, 0): i + half_width + 1]
    d = np.diff(seg)
    return bool(np.all(d >= -tol) or np.all(d <= tol))


def write_snapshots(path, snapshots):
    """CSV with columns t, alpha, r, v; the last atom reports the right ghost strain."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["t", "alpha", "r", "v"])
        for s in snapshots:
            r = np.append(s.strains, s.r_plus)
            for a in range(s.n_atoms):
                wr.writerow([format(s.time, ".17g"), a, format(float(r[a]), ".17g"),
                             format(float(s.velocities[a]), ".17g")])
