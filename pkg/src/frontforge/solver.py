"""Fixed-point map, action functionals and the gradient-flow iteration for fronts.

The front equation for a normalized potential reads ``W = T[W]`` with
``T[W] = A Phi'(A W)``.  It is the Euler-Lagrange equation of the action

    L(W) = int 1/2 W^2 - Phi(A W)  -  (same integrand at W_sh)

and the explicit Euler step ``W <- (1 - lam) W + lam T[W]`` decreases ``L``
by at least ``lam (1 - lam/2) ||W - T[W]||^2`` whenever ``Phi`` is convex on
the visited range.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BadParams, Indeterminate, NoCrossing, OutOfDomain, PotentialDomain
from .potential import OVERSHOOT_BAND, _g_unchecked
from .profile import (Grid, Profile, average, crossing_index, enforce_cone, pin,
                      shock_profile)

log = logging.getLogger(__name__)

CONVERGED = "Converged"
TRAVELLING_SHIFT = "TravellingShift"
PLATEAU = "Plateau"
MAX_ITER = "MaxIter"

#: Relative residual change below which the residual counts as stagnant.
STAGNATION_TOL = 1e-3
#: Half-width of the value band that defines plateau nodes.
PLATEAU_BAND = 0.05
#: Tail deviation at the domain ends beyond which the truncation is no longer trusted.
BOUNDARY_TOL = 1e-8


@dataclass
class SolverConfig:
    lam: float = 1.0
    tol: float = 1e-10
    max_iter: int = 10000
    pin_every: int = 1
    diag_window: int = 50

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise BadParams(f"lambda must lie in (0, 1], got {self.lam}")
        if not self.tol > 0.0:
            raise BadParams(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1 or self.pin_every < 0 or self.diag_window < 2:
            raise BadParams("max_iter >= 1, pin_every >= 0 and diag_window >= 2 required")


@dataclass
class HistoryEntry:
    residual: float
    action: float
    crossing: int
    total_shift: int
    plateau_counts: tuple = ()


@dataclass
class FrontResult:
    profile: Profile
    residual: float
    action: float
    action_sharp: float
    iterations: int
    outcome: str
    history: list = field(default_factory=list)
    shifts: list = field(default_factory=list)
    config: SolverConfig = field(default_factory=SolverConfig)
    metadata: dict = field(default_factory=dict)
    max_correction: float = 0.0

    def summary(self) -> dict:
        return {
            "outcome": self.outcome,
            "residual": self.residual,
            "action": self.action,
            "action_sharp": self.action_sharp,
            "iterations": self.iterations,
            "max_cone_correction": self.max_correction,
            "shifts": list(self.shifts),
            "diagnosis": dict(self.metadata),
            "config": asdict(self.config),
        }


def _check_band(w: Profile):
    if np.max(np.abs(w.values)) > OVERSHOOT_BAND:
        raise PotentialDomain(
            f"profile values reach {np.max(np.abs(w.values)):.6g}, outside [-{OVERSHOOT_BAND}, {OVERSHOOT_BAND}]")


def apply_T(np_, w: Profile) -> Profile:
    """``T[W] = A Phi'(A W)``; the limits of ``w`` are carried over."""
    _check_band(w)
    aw = average(w)
    force = aw.with_values(np_.derivative(aw.values, 1),
                           left_limit=np_.derivative(w.left_limit, 1),
                           right_limit=np_.derivative(w.right_limit, 1))
    out = average(force)
    return out.with_values(out.values, w.left_limit, w.right_limit)


def residual(np_, w: Profile) -> float:
    d = w.values - apply_T(np_, w).values
    return float(np.sqrt(w.grid.integrate(d * d)))


def _lagrangian_density(np_, w: Profile) -> np.ndarray:
    return 0.5 * w.values**2 - np_.derivative(average(w).values, 0)


def action(np_, w: Profile) -> float:
    """Discrete action relative to the shock profile on the same grid.

    The reference term uses the discrete average of ``W_sh``, so ``L(W_sh) = 0``
    holds exactly on every grid.
    """
    ref = _lagrangian_density(np_, shock_profile(w.grid))
    return w.grid.integrate(_lagrangian_density(np_, w) - ref)


def action_sharp(np_, w: Profile) -> float:
    """``L#(W) = int g(W)``."""
    if np.max(np.abs(w.values)) > 1.0 + 1e-12:
        raise OutOfDomain("action_sharp needs profile values in [-1, 1]")
    return w.grid.integrate(_g_unchecked(np_, np.clip(w.values, -1.0, 1.0)))


def euler_step(np_, w: Profile, lam: float) -> Profile:
    if not 0.0 < lam <= 1.0:
        raise BadParams(f"lambda must lie in (0, 1], got {lam}")
    tw = apply_T(np_, w)
    new = tw if lam == 1.0 else w.with_values((1.0 - lam) * w.values + lam * tw.values)
    return enforce_cone(new)[0]


def _plateau_counts(w: Profile, levels) -> tuple:
    return tuple(int(np.count_nonzero(np.abs(w.values - c) < PLATEAU_BAND)) for c in levels)


def _safe_crossing(w: Profile) -> int:
    try:
        return crossing_index(w)
    except NoCrossing:
        return -1


def solve_front(np_, cfg: SolverConfig | None = None, grid: Grid | None = None,
                initial: Profile | None = None, callback=None) -> FrontResult:
    """Run the Euler iteration from ``initial`` (default ``W_sh``).

    The recorded action is the action along the unpinned trajectory: each
    pinning shift is compensated by the exact change of ``L`` it causes, so
    the history is comparable across pinnings even when ``L`` is not shift
    invariant.
    """
    cfg = cfg or SolverConfig()
    grid = grid or (initial.grid if initial is not None else Grid())
    w = initial if initial is not None else shock_profile(grid)
    w = enforce_cone(w)[0]
    levels = np_.interior_fixed_points()

    offset = 0.0
    total_shift = 0
    shifts, history = [], []
    max_corr = 0.0
    outcome, meta = None, {}
    stop_reason = "max_iter"
    current_action = action(np_, w)
    it = 0
    for it in range(cfg.max_iter + 1):
        tw = apply_T(np_, w)
        d = tw.values - w.values
        res = float(np.sqrt(grid.integrate(d * d)))
        history.append(HistoryEntry(res, current_action + offset, _safe_crossing(w),
                                    total_shift, _plateau_counts(w, levels)))
        if callback is not None:
            callback(it, w, history[-1])
        if res <= cfg.tol:
            outcome = CONVERGED
            break
        if it == cfg.max_iter:
            break
        tail = max(abs(w.values[0] - w.left_limit), abs(w.values[-1] - w.right_limit))
        if tail > BOUNDARY_TOL:
            stop_reason = "boundary"
            log.info("profile reached the domain boundary after %d iterations", it)
            break
        new = tw if cfg.lam == 1.0 else w.with_values(w.values + cfg.lam * d)
        w, corr = enforce_cone(new)
        max_corr = max(max_corr, corr)
        current_action = action(np_, w)
        if cfg.pin_every and (it + 1) % cfg.pin_every == 0:
            try:
                pinned, s = pin(w)
            except NoCrossing:
                s = 0
            else:
                if s:
                    pinned_action = action(np_, pinned)
                    offset += current_action - pinned_action
                    current_action = pinned_action
                    w = pinned
            total_shift += s
            shifts.append(int(s))

    if outcome is None:
        try:
            outcome, meta = diagnose(history, np_, cfg, shifts)
        except Indeterminate as exc:
            outcome, meta = MAX_ITER, {"reason": str(exc)}
    meta["stop_reason"] = "tol" if outcome == CONVERGED else stop_reason
    return FrontResult(
        profile=w,
        residual=history[-1].residual,
        action=action(np_, w),
        action_sharp=action_sharp(np_, w),
        iterations=it,
        outcome=outcome,
        history=history,
        shifts=shifts,
        config=cfg,
        metadata=meta,
        max_correction=max_corr,
    )


def diagnose(history, np_, cfg: SolverConfig, shifts=()):
    """Classify an iteration history; returns ``(outcome, metadata)``.

    Raises :class:`Indeterminate` when no pattern matches.
    """
    if not history:
        raise Indeterminate("empty history")
    if history[-1].residual <= cfg.tol:
        return CONVERGED, {}
    n = cfg.diag_window
    if len(history) < n:
        raise Indeterminate(f"history shorter than the diagnosis window ({len(history)} < {n})")
    window = history[-n:]

    levels = np_.interior_fixed_points()
    for j, level in enumerate(levels):
        if any(len(e.plateau_counts) <= j for e in window):
            continue
        counts = np.array([e.plateau_counts[j] for e in window])
        if np.all(np.diff(counts) >= 0) and counts[-1] > counts[0]:
            return PLATEAU, {
                "plateau_level": level,
                "plateau_nodes": int(counts[-1]),
                "growth_nodes_per_iteration": float(counts[-1] - counts[0]) / (n - 1),
            }

    res = np.array([e.residual for e in window])
    stagnant = (res.max() - res.min()) < STAGNATION_TOL * res.max()
    recent = np.asarray(shifts[-(n - 1):]) if len(shifts) else np.zeros(0, dtype=int)
    nonzero = recent[recent != 0]
    if stagnant and nonzero.size and (np.all(nonzero > 0) or np.all(nonzero < 0)):
        return TRAVELLING_SHIFT, {
            "drift_nodes_per_iteration": float(nonzero.sum()) / max(recent.size, 1),
            "drift_sign": int(np.sign(nonzero[0])),
        }
    raise Indeterminate("no convergence, travelling shift or plateau pattern detected")

