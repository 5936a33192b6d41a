"""Shock algebra of the p-system: jump conditions, shock types, conservative-shock curves.

A shock connecting ``(r-, v-)`` to ``(r+, v+)`` with speed ``sigma`` satisfies

    sigma [[r]] + [[v]] = 0,     sigma [[v]] + [[Phi'(r)]] = 0,

and it conserves energy iff ``J(r-, r+) = [[Phi]] - [[r]] <Phi'> = 0``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ComplexSoundSpeed, CorrectorDiverged, DegenerateJump, NonHyperbolic

#: Residual bound for points on a conservative-shock curve.
CURVE_TOL = 1e-10
#: |sigma| and a sound speed closer than this count as equal.
SONIC_TOL = 1e-9
BISECT_TOL = 1e-12

_GL_T, _GL_W = np.polynomial.legendre.leggauss(48)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


class ShockType(str, enum.Enum):
    LAX = "Lax"
    RAREFACTION = "Rarefaction"
    SUPERSONIC = "Supersonic"
    SUBSONIC = "Subsonic"
    SONIC = "Sonic"


@dataclass(frozen=True)
class ShockData:
    r_minus: float
    r_plus: float
    v_minus: float
    v_plus: float
    sigma: float

    @property
    def r_jump(self) -> float:
        return self.r_plus - self.r_minus

    @property
    def v_jump(self) -> float:
        return self.v_plus - self.v_minus

    @property
    def r_mean(self) -> float:
        return 0.5 * (self.r_plus + self.r_minus)

    @property
    def v_mean(self) -> float:
        return 0.5 * (self.v_plus + self.v_minus)

    @property
    def branch(self) -> int:
        return 2 if self.sigma > 0 else 1

    def galilean(self, c: float) -> "ShockData":
        """The same shock seen from a frame moving with velocity ``-c``."""
        return ShockData(self.r_minus, self.r_plus, self.v_minus + c, self.v_plus + c, self.sigma)

    def to_dict(self) -> dict:
        return {"r_minus": self.r_minus, "r_plus": self.r_plus, "v_minus": self.v_minus,
                "v_plus": self.v_plus, "sigma": self.sigma}


def energy_residual(p, r_minus: float, r_plus: float) -> float:
    """``J(r-, r+) = [[Phi]] - [[r]] <Phi'>``; zero iff the jump can conserve energy."""
    d = r_plus - r_minus
    dphi = p.derivative(r_plus, 0) - p.derivative(r_minus, 0)
    mean_force = 0.5 * (p.derivative(r_plus, 1) + p.derivative(r_minus, 1))
    return float(dphi - d * mean_force)


def jump_residuals(p, s: ShockData) -> dict:
    """Mass, momentum and energy jump residuals of ``s`` (all zero for a conservative shock)."""
    f_m, f_p = p.derivative(s.r_minus, 1), p.derivative(s.r_plus, 1)
    e_m = 0.5 * s.v_minus**2 + p.derivative(s.r_minus, 0)
    e_p = 0.5 * s.v_plus**2 + p.derivative(s.r_plus, 0)
    return {
        "mass": float(s.sigma * s.r_jump + s.v_jump),
        "momentum": float(s.sigma * s.v_jump + (f_p - f_m)),
        "energy": float(s.sigma * (e_p - e_m) + (f_p * s.v_plus - f_m * s.v_minus)),
    }


def complete_shock(p, r_minus: float, r_plus: float, v_minus: float = 0.0,
                   branch: int = 2) -> ShockData:
    """Speed and right velocity of the ``branch``-shock through the given strains.

    Parameters
    ----------
    p : potential
        Anything with ``derivative(r, n)``.
    r_minus, r_plus : float
        Asymptotic strains.
    v_minus : float
        Left velocity.
    branch : {1, 2}
        1-shocks travel left (``sigma < 0``), 2-shocks right.

    Returns
    -------
    ShockData
    """
    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch}")
    d = r_plus - r_minus
    if d == 0.0:
        raise DegenerateJump("r_minus == r_plus")
    ratio = (p.derivative(r_plus, 1) - p.derivative(r_minus, 1)) / d
    if not ratio > 0.0:
        raise NonHyperbolic(f"[[Phi']]/[[r]] = {ratio:.6g} <= 0")
    sigma = math.sqrt(ratio) * (1.0 if branch == 2 else -1.0)
    return ShockData(float(r_minus), float(r_plus), float(v_minus), float(v_minus - sigma * d), sigma)


def sound_speed(p, r: float) -> float:
    c2 = float(p.derivative(r, 2))
    if c2 < 0.0:
        raise ComplexSoundSpeed(f"Phi''({r:.6g}) = {c2:.6g} < 0")
    return math.sqrt(c2)


def classify(p, s: ShockData) -> ShockType:
    """Shock type from the signed speed and the signed sound speeds at ``r-`` and ``r+``."""
    sign = 1.0 if s.sigma > 0 else -1.0
    lam_m, lam_p = sign * sound_speed(p, s.r_minus), sign * sound_speed(p, s.r_plus)
    a = abs(s.sigma)
    if abs(a - abs(lam_m)) <= SONIC_TOL or abs(a - abs(lam_p)) <= SONIC_TOL:
        return ShockType.SONIC
    if a > abs(lam_m) and a > abs(lam_p):
        return ShockType.SUPERSONIC
    if a < abs(lam_m) and a < abs(lam_p):
        return ShockType.SUBSONIC
    if lam_m > s.sigma > lam_p:
        return ShockType.LAX
    return ShockType.RAREFACTION


def _bisect(f, a, b, tol=BISECT_TOL):
    fa = f(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def turning_points(p, interval=(-1.0, 1.0), n_grid: int = 401):
    """Sign changes of ``Phi'''`` in ``interval``.

    Returns a list of ``(r_star, kind)`` with ``kind`` ``"convex_concave"``
    where ``Phi''`` has a local maximum and ``"concave_convex"`` at a minimum.
    Identically vanishing ``Phi'''`` produces no turning points.
    """
    a, b = map(float, interval)
    if not a < b:
        raise ValueError(f"need a < b, got {interval}")
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    x = np.linspace(a, b, n_grid)
    f3 = np.asarray(p.derivative(x, 3), dtype=float)
    scale = max(float(np.max(np.abs(f3))), 1e-300)
    sgn = np.where(np.abs(f3) <= 1e-13 * scale, 0, np.sign(f3)).astype(int)
    out = []
    i = 0
    while i < n_grid - 1:
        if sgn[i] == 0:
            i += 1
            continue
        j = i + 1
        while j < n_grid and sgn[j] == 0:
            j += 1
        if j == n_grid:
            break
        if sgn[j] != sgn[i]:
            if j == i + 1:
                root = _bisect(lambda r: float(p.derivative(r, 3)), x[i], x[j])
            else:
                root = 0.5 * (x[i + 1] + x[j - 1])
            kind = "convex_concave" if sgn[i] > 0 else "concave_convex"
            out.append((float(root), kind))
        i = j
    return out


def _k_and_grad(p, m: float, d: float):
    """``K = J / d^3`` and its gradient in midpoint/jump coordinates."""
    x = m + (_GL_T - 0.5) * d
    base = _GL_W * _GL_T * (1.0 - _GL_T)
    f3 = np.asarray(p.derivative(x, 3), dtype=float)
    f4 = np.asarray(p.derivative(x, 4), dtype=float)
    k = -0.5 * float(np.dot(base, f3))
    dk_dm = -0.5 * float(np.dot(base, f4))
    dk_dd = -0.5 * float(np.dot(base * (_GL_T - 0.5), f4))
    return k, np.array([dk_dm, dk_dd])


@dataclass
class ShockCurve:
    """Points ``(r-, r+)`` on one branch pair of ``J = 0`` through a turning point."""

    seed: float
    points: list = field(default_factory=list)
    truncated: bool = False
    message: str = ""

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, 2)

    def rows(self, p):
        """CSV rows: r_minus, r_plus, J_residual, sigma_branch2, type."""
        out = []
        for rm, rp in self.points:
            j = energy_residual(p, rm, rp)
            if rm == rp:
                out.append((rm, rp, j, math.sqrt(max(float(p.derivative(rm, 2)), 0.0)), ShockType.SONIC.value))
                continue
            try:
                s = complete_shock(p, rm, rp, 0.0, 2)
                sig, kind = s.sigma, classify(p, s).value
            except (NonHyperbolic, ComplexSoundSpeed) as exc:
                sig, kind = float("nan"), type(exc).__name__
            out.append((rm, rp, j, sig, kind))
        return out

def _fmt(x: float) -> str:
    return format(x, ".17g")


CURVE_COLUMNS = ["r_minus", "r_plus", "J_residual", "sigma_branch2", "type", "curve"]


def write_curves_csv(path, p, curves):
    """One row per traced point; the trailing ``curve`` column numbers the curves."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CURVE_COLUMNS)
        for cid, curve in enumerate(curves):
            for row in curve.rows(p):
                wr.writerow([_fmt(v) if isinstance(v, float) else v for v in row] + [cid])


def _correct(p, pred, normal, max_iter=30):
    """Newton for ``K(pred + s n) = 0`` in the scalar ``s``."""
    s = 0.0
    for _ in range(max_iter):
        x = pred + s * normal
        k, g = _k_and_grad(p, *x)
        slope = float(np.dot(g, normal))
        if slope == 0.0 or not math.isfinite(slope):
            return None
        ds = -k / slope
        s += ds
        if abs(ds) < 1e-14:
            x = pred + s * normal
            return x
    return None


def _trace_one(p, seed, direction, step, max_points, bounds, min_step):
    """Continue from ``(m, d) = (seed, 0)`` into ``d * direction > 0``."""
    lo, hi = bounds
    x = np.array([seed, 0.0])
    tangent = np.array([0.0, float(direction)])
    pts = []
    h = step
    while len(pts) < max_points:
        pred = x + h * tangent
        normal = np.array([-tangent[1], tangent[0]])
        new = _correct(p, pred, normal)
        ok = new is not None and np.linalg.norm(new - x) <= 2.0 * h
        if ok:
            rm, rp = new[0] - 0.5 * new[1], new[0] + 0.5 * new[1]
            ok = abs(energy_residual(p, rm, rp)) <= CURVE_TOL
        if not ok:
            h *= 0.5
            if h < min_step:
                return pts, True, f"corrector failed near (m, d) = ({x[0]:.6g}, {x[1]:.6g})"
            continue
        if new[1] * direction <= 0.0:
            # back on the diagonal: another turning point closes the curve
            return pts, False, "returned to diagonal"
        rm, rp = new[0] - 0.5 * new[1], new[0] + 0.5 * new[1]
        if not (lo <= rm <= hi and lo <= rp <= hi):
            return pts, False, "left bounds"
        tangent = (new - x) / np.linalg.norm(new - x)
        x = new
        pts.append((float(rm), float(rp)))
        h = min(step, 2.0 * h)
    return pts, False, "max_points"


def trace_curve(p, seed: float, step: float = 0.02, max_points: int = 2000,
                bounds=(-math.inf, math.inf), strict: bool = False) -> ShockCurve:
    """Trace ``J(r-, r+) = 0`` from the diagonal point ``(seed, seed)``.

    The curve is continued in both directions away from the diagonal using a
    secant predictor and a Newton corrector along the normal, applied to
    ``J / [[r]]^3`` (which has no trivial zero set on the diagonal). Each
    direction stops at ``max_points``, at ``bounds`` or when the curve
    returns to the diagonal.

    Parameters
    ----------
    strict : bool
        Raise :class:`CorrectorDiverged` instead of returning a curve flagged
        as truncated.
    """
    if not step > 0.0:
        raise ValueError(f"step must be positive, got {step}")
    curve = ShockCurve(seed=float(seed))
    halves, notes = [], []
    for direction in (-1.0, 1.0):
        pts, trunc, msg = _trace_one(p, float(seed), direction, step, max_points, bounds, step * 1e-6)
        halves.append(pts)
        notes.append(msg)
        if trunc:
            curve.truncated = True
            if strict:
                raise CorrectorDiverged(msg)
    curve.points = halves[0][::-1] + [(float(seed), float(seed))] + halves[1]
    curve.message = "; ".join(notes)
    return curve


def coordinate_extrema(curve: ShockCurve):
    """Indices where ``r-`` or ``r+`` has a strict local extremum along the curve."""
    a = curve.array
    out = []
    for col, name in ((0, "r_minus"), (1, "r_plus")):
        dv = np.diff(a[:, col])
        for i in range(len(dv) - 1):
            if dv[i] * dv[i + 1] < 0:
                out.append((i + 1, name))
    return sorted(out)
