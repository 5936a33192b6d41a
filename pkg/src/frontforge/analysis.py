"""Tail decay rates of fronts and bundled verification of computed fronts.

Linearizing the front equation at the asymptotic state +-1 gives
``W~ = lam A^2 W~`` and, for ``W~ = exp(-tau phi)``, the characteristic
equation ``tau^2 = 2 lam (cosh(tau) - 1)``.  For ``0 < lam < 1`` its only
positive root is the tail decay rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientPoints, NonPositive, OutOfDomain, PotentialDomain, Sonic
from .potential import _g_unchecked, area_bound_constants
from .profile import Profile
from .solver import CONVERGED, action, action_sharp, residual

DEFAULT_BAND = (1e-8, 1e-2)
MIN_FIT_POINTS = 8


def _rho_minus_one(tau: float, lam: float) -> float:
    """``lam * 2 (cosh tau - 1) / tau^2 - 1``, accurate near tau = 0."""
    if tau < 1e-4:
        rho = 1.0 + tau * tau / 12.0
    else:
        rho = math.expm1(tau) ** 2 / (math.exp(tau) * tau * tau) if tau < 700 else math.inf
    return lam * rho - 1.0


def decay_rate(lam: float, tol: float = 1e-12) -> float:
    """Positive root of ``tau^2 = 2 lam (cosh tau - 1)`` for ``0 < lam < 1``."""
    if lam <= 0.0:
        raise NonPositive(f"lambda must be positive, got {lam}")
    if lam >= 1.0 - 1e-12:
        raise Sonic(f"lambda = {lam} is sonic; the decay root merges with zero")
    lo, hi = 0.0, 1.0
    while _rho_minus_one(hi, lam) < 0.0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _rho_minus_one(mid, lam) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fit_tail(w: Profile, side: str = "right", band=DEFAULT_BAND) -> float:
    """Least-squares decay rate of ``|W_sh - W|`` over nodes whose deviation lies in ``band``."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    phi = w.grid.nodes
    if side == "right":
        mask = phi > 0.0
        dev = np.abs(w.right_limit - w.values)
    else:
        mask = phi < 0.0
        dev = np.abs(w.values - w.left_limit)
    lo, hi = band
    mask &= (dev >= lo) & (dev <= hi)
    if np.count_nonzero(mask) < MIN_FIT_POINTS:
        raise InsufficientPoints(
            f"only {np.count_nonzero(mask)} nodes with deviation in [{lo:g}, {hi:g}] on the {side}")
    slope = np.polyfit(phi[mask], np.log(dev[mask]), 1)[0]
    return float(-slope if side == "right" else slope)


@dataclass
class DecayReport:
    tau_plus_pred: float
    tau_minus_pred: float
    tau_plus_fit: float
    tau_minus_fit: float
    fit_window: tuple
    relative_error: tuple

    def to_dict(self) -> dict:
        return {
            "tau_plus_pred": self.tau_plus_pred,
            "tau_minus_pred": self.tau_minus_pred,
            "tau_plus_fit": self.tau_plus_fit,
            "tau_minus_fit": self.tau_minus_fit,
            "fit_window": list(self.fit_window),
            "relative_error": list(self.relative_error),
        }


def _maybe(func, *args):
    try:
        return func(*args)
    except (Sonic, NonPositive, InsufficientPoints):
        return float("nan")


def decay_report(np_, w: Profile, band=DEFAULT_BAND) -> DecayReport:
    tp, tm = _maybe(decay_rate, np_.lambda_plus), _maybe(decay_rate, np_.lambda_minus)
    fp, fm = _maybe(fit_tail, w, "right", band), _maybe(fit_tail, w, "left", band)
    return DecayReport(tp, tm, fp, fm, tuple(band), (abs(fp - tp) / tp, abs(fm - tm) / tm))


def pinned_deviation(w: Profile) -> np.ndarray:
    """``W~`` measured against the endpoint on the pinned side (phi <= 0 -> -1)."""
    return np.where(w.grid.nodes <= 0.0, w.left_limit, w.right_limit) - w.values


def strict_increase_margin(w: Profile, floor: float = 1e-10) -> float:
    """Smallest node-to-node increment where the profile is resolved away from its limits."""
    core = np.minimum(np.abs(w.values - w.left_limit), np.abs(w.right_limit - w.values)) >= floor
    pairs = core[:-1] & core[1:]
    if not pairs.any():
        return float("-inf")
    return float(np.diff(w.values)[pairs].min())


@dataclass
class Check:
    passed: bool
    value: float
    bound: object
    note: str = ""

    def to_dict(self) -> dict:
        return {"passed": self.passed, "value": self.value, "bound": self.bound, "note": self.note}


@dataclass
class VerificationReport:
    checks: dict = field(default_factory=dict)
    decay: DecayReport | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {k: c.to_dict() for k, c in self.checks.items()},
            "decay": self.decay.to_dict() if self.decay else None,
        }


def verify_front(np_, result, tol: float | None = None, decay_tol: float = 0.10,
                 band=DEFAULT_BAND) -> VerificationReport:
    """Re-check a computed front: residual, monotonicity, action bounds, tail decay."""
    w = result.profile
    h = w.grid.h
    tol = result.config.tol if tol is None else tol
    rep = VerificationReport()

    try:
        res = residual(np_, w)
    except PotentialDomain as exc:
        rep.checks["residual"] = Check(False, float("nan"), tol, str(exc))
    else:
        rep.checks["residual"] = Check(res <= tol * (1 + 1e-6), res, tol)

    margin = strict_increase_margin(w)
    rep.checks["strictly_increasing"] = Check(margin > 0.0, margin, 0.0)

    try:
        diff = abs(action(np_, w) - action_sharp(np_, w))
    except (OutOfDomain, PotentialDomain) as exc:
        rep.checks["action_gap"] = Check(False, float("nan"), 4.0 + 10.0 * h, str(exc))
    else:
        rep.checks["action_gap"] = Check(diff <= 4.0 + 10.0 * h, diff, 4.0 + 10.0 * h)

    c_lo, c_hi = area_bound_constants(np_)
    dev = pinned_deviation(w)
    norm2 = w.grid.integrate(dev * dev)
    sharp_pinned = w.grid.integrate(_g_unchecked(np_, np.clip(w.values, -1.0, 1.0)))
    ok = c_lo * norm2 - 1e-12 <= sharp_pinned <= c_hi * norm2 + 1e-12
    rep.checks["sharp_bounds"] = Check(bool(ok), sharp_pinned, [c_lo * norm2, c_hi * norm2])

    rep.decay = decay_report(np_, w, band)
    for side, err in zip(("right", "left"), rep.decay.relative_error):
        passed = bool(np.isfinite(err) and err <= decay_tol)
        rep.checks[f"decay_{side}"] = Check(passed, err, decay_tol, "relative error of fitted rate")

    if result.outcome != CONVERGED:
        rep.checks["outcome"] = Check(False, float("nan"), CONVERGED, result.outcome)
    return rep


def plateau_value(w: Profile, flat_tol: float = 1e-3, margin: float = 0.1) -> float:
    """Median value over flat nodes away from both limits, or nan if there are none.

    A node is flat when its centred slope is below ``flat_tol``.
    """
    v = w.values
    slope = np.abs(np.gradient(v, w.grid.h))
    inner = (v > w.left_limit + margin) & (v < w.right_limit - margin)
    sel = inner & (slope < flat_tol)
    return float(np.median(v[sel])) if sel.any() else float("nan")
