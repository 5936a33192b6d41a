"""Interaction potentials, normalization by shock data, and assumption checks.

A potential is stored in closed form as a polynomial plus trigonometric terms
in the shifted argument ``x = r + shift``, so derivatives of every order are
exact.  The normalized potential rescales a potential with respect to a pair
of asymptotic strains such that the front problem has states -1 and +1 and
unit speed::

    Phi_hat(w) = 4 / ([[Phi']] [[r]]) * Phi(<r> + [[r]] w / 2) - 2 <Phi'> / [[Phi']] * w
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .errors import BadParams, NonHyperbolic, OutOfDomain

#: Tolerances used by :func:`check_assumptions`.
TOL_N = 1e-12
TOL_C = 1e-10
TOL_E = 1e-10
TOL_S = 1e-12
TOL_A = 1e-12

#: Normalized potentials are evaluated without complaint up to this band.
OVERSHOOT_BAND = 1.05

_COS_CYCLE = ((np.cos, 1.0), (np.sin, -1.0), (np.cos, -1.0), (np.sin, 1.0))
_SIN_CYCLE = ((np.sin, 1.0), (np.cos, 1.0), (np.sin, -1.0), (np.cos, -1.0))


@dataclass(frozen=True)
class TrigTerm:
    amp: float
    freq: float
    kind: str = "cos"

    def __post_init__(self):
        if self.kind not in ("cos", "sin"):
            raise BadParams(f"trig kind must be 'cos' or 'sin', got {self.kind!r}")

    def derivative(self, x, n):
        func, sign = (_COS_CYCLE if self.kind == "cos" else _SIN_CYCLE)[n % 4]
        return sign * self.amp * self.freq**n * func(self.freq * x)


@dataclass(frozen=True)
class PotentialSpec:
    """Closed-form potential ``Phi(r) = sum c_i x^i + sum a cos|sin(b x)``, ``x = r + shift``."""

    poly_coeffs: tuple = (0.0, 0.0, 0.5)
    trig_terms: tuple = ()
    shift: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "poly_coeffs", tuple(float(c) for c in self.poly_coeffs))
        terms = tuple(t if isinstance(t, TrigTerm) else TrigTerm(*t) for t in self.trig_terms)
        object.__setattr__(self, "trig_terms", terms)
        object.__setattr__(self, "shift", float(self.shift))

    def derivative(self, r, n=0):
        """n-th derivative of the potential at ``r`` (any ``n >= 0``)."""
        x = np.asarray(r, dtype=float) + self.shift
        coeffs = np.asarray(self.poly_coeffs, dtype=float)
        if n > 0:
            coeffs = P.polyder(coeffs, n) if coeffs.size > n else np.zeros(1)
        out = P.polyval(x, coeffs) if coeffs.size else np.zeros_like(x)
        for term in self.trig_terms:
            out = out + term.derivative(x, n)
        return out if np.ndim(out) else float(out)

    def __call__(self, r):
        return self.derivative(r, 0)

    def to_dict(self) -> dict:
        return {
            "poly": list(self.poly_coeffs),
            "trig": [{"amp": t.amp, "freq": t.freq, "kind": t.kind} for t in self.trig_terms],
            "shift": self.shift,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PotentialSpec":
        try:
            poly = [float(c) for c in data.get("poly", [])]
            trig = [TrigTerm(float(t["amp"]), float(t["freq"]), t.get("kind", "cos"))
                    for t in data.get("trig", [])]
            shift = float(data.get("shift", 0.0))
        except (TypeError, KeyError, ValueError) as exc:
            raise BadParams(f"malformed potential specification: {exc}") from exc
        return cls(tuple(poly), tuple(trig), shift)


def evaluate(p, r, order=0):
    """Return Phi(r), Phi'(r) or Phi''(r) for ``order`` 0, 1 or 2."""
    if order not in (0, 1, 2):
        raise BadParams(f"order must be 0, 1 or 2, got {order}")
    return p.derivative(r, order)


@dataclass(frozen=True)
class NormalizedPotential:
    """Potential rescaled so the front connects -1 to +1 with unit speed.

    ``base`` is any object exposing ``derivative(x, n)``, including another
    :class:`NormalizedPotential`.
    """

    base: object
    r_mean: float
    r_jump: float
    dphi_mean: float
    dphi_jump: float
    lambda_minus: float = field(default=float("nan"))
    lambda_plus: float = field(default=float("nan"))
    name: str = ""

    @property
    def _scale(self):
        return 4.0 / (self.dphi_jump * self.r_jump)

    def derivative(self, w, n=0):
        w = np.asarray(w, dtype=float)
        x = self.r_mean + 0.5 * self.r_jump * w
        out = self._scale * (0.5 * self.r_jump) ** n * np.asarray(self.base.derivative(x, n))
        if n == 0:
            out = out - 2.0 * self.dphi_mean / self.dphi_jump * w
        elif n == 1:
            out = out - 2.0 * self.dphi_mean / self.dphi_jump
        return out if np.ndim(out) else float(out)

    def __call__(self, w):
        return self.derivative(w, 0)

    @property
    def energy_gap(self) -> float:
        """Phi_hat(1) - Phi_hat(-1); zero iff the source shock conserves energy."""
        return self.derivative(1.0) - self.derivative(-1.0)

    def interior_fixed_points(self, n_grid=4001):
        """Solutions of Phi_hat'(w) = w strictly inside (-1, 1)."""
        return interior_fixed_points(self, n_grid)

    def to_dict(self) -> dict:
        base = self.base.to_dict() if hasattr(self.base, "to_dict") else repr(self.base)
        return {
            "name": self.name,
            "base": base,
            "r_mean": self.r_mean,
            "r_jump": self.r_jump,
            "dphi_mean": self.dphi_mean,
            "dphi_jump": self.dphi_jump,
            "lambda_minus": self.lambda_minus,
            "lambda_plus": self.lambda_plus,
        }


def build_normalized(p, r_minus: float, r_plus: float, name: str = "") -> NormalizedPotential:
    if r_minus == r_plus:
        raise NonHyperbolic("r_minus == r_plus: no jump to normalize")
    r_mean = 0.5 * (r_plus + r_minus)
    r_jump = r_plus - r_minus
    d_minus, d_plus = p.derivative(r_minus, 1), p.derivative(r_plus, 1)
    dphi_jump = d_plus - d_minus
    if not dphi_jump * r_jump > 0:
        raise NonHyperbolic(
            f"[[Phi']] * [[r]] = {dphi_jump * r_jump:.3g} <= 0 for r- = {r_minus}, r+ = {r_plus}")
    out = NormalizedPotential(p, r_mean, r_jump, 0.5 * (d_plus + d_minus), dphi_jump, name=name)
    return NormalizedPotential(
        p, r_mean, r_jump, out.dphi_mean, dphi_jump,
        lambda_minus=out.derivative(-1.0, 2), lambda_plus=out.derivative(1.0, 2), name=name)


def _g_unchecked(np_, w):
    w = np.asarray(w, dtype=float)
    return np_.derivative(-1.0) - np_.derivative(w) + 0.5 * w * w - 0.5


def g_area(np_, w):
    """Signed area ``g(w) = Phi(-1) - Phi(w) + w^2/2 - 1/2`` between identity and force."""
    if np.any(np.abs(np.asarray(w, dtype=float)) > 1.0 + 1e-12):
        raise OutOfDomain("g_area is defined on [-1, 1] only")
    out = _g_unchecked(np_, np.clip(w, -1.0, 1.0))
    return out if np.ndim(out) else float(out)


def area_bound_constants(np_, n_samples: int = 2001):
    """Constants with ``c_lo d(w)^2 <= g(w) <= c_hi d(w)^2`` on [-1, 1].

    ``d(w)`` is the distance to the endpoint on the same side of zero
    (``1 + w`` for ``w <= 0``, ``1 - w`` for ``w > 0``).  The endpoint limits
    ``g''(+-1) / 2 = (1 - Phi''(+-1)) / 2`` are included.
    """
    w = np.linspace(-1.0, 1.0, n_samples)[1:-1]
    dist = np.where(w <= 0.0, 1.0 + w, 1.0 - w)
    ratio = _g_unchecked(np_, w) / dist**2
    ends = 0.5 * (1.0 - np.array([np_.derivative(-1.0, 2), np_.derivative(1.0, 2)]))
    ratio = np.concatenate([ratio, ends])
    return float(ratio.min()), float(ratio.max())


def interior_fixed_points(np_, n_grid: int = 4001):
    w = np.linspace(-1.0, 1.0, n_grid)[1:-1]
    f = np_.derivative(w, 1) - w
    roots = list(w[f == 0.0])
    func = lambda x: np_.derivative(x, 1) - x  # noqa: E731
    for i in np.nonzero(f[:-1] * f[1:] < 0)[0]:
        roots.append(brentq(func, w[i], w[i + 1], xtol=1e-14))
    return sorted(float(r) for r in roots if abs(r) < 1.0 - 1e-6)


@dataclass
class AssumptionReport:
    flags: dict
    worst_violation: dict
    sample_count: int

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def failed(self):
        return [k for k, ok in self.flags.items() if not ok]

    def to_dict(self) -> dict:
        return {
            "flags": {k: ("pass" if v else "fail") for k, v in self.flags.items()},
            "worst_violation": {k: {"w": w, "magnitude": m}
                                for k, (w, m) in self.worst_violation.items()},
            "sample_count": self.sample_count,
        }


def check_assumptions(np_, n_samples: int = 2001) -> AssumptionReport:
    if n_samples < 3:
        raise BadParams("n_samples must be >= 3")
    w = np.linspace(-1.0, 1.0, n_samples)
    phi, dphi, ddphi = (np.asarray(np_.derivative(w, n)) for n in (0, 1, 2))
    flags, worst = {}, {}

    finite = np.isfinite(phi) & np.isfinite(dphi) & np.isfinite(ddphi)
    flags["R"] = bool(finite.all())
    worst["R"] = (float(w[~finite][0]), float("inf")) if not finite.all() else (0.0, 0.0)

    n_err = np.array([abs(dphi[0] + 1.0), abs(dphi[-1] - 1.0)])
    i = int(np.argmax(n_err))
    flags["N"] = bool(n_err.max() <= TOL_N)
    worst["N"] = ((-1.0, 1.0)[i], float(n_err[i]))

    i = int(np.argmin(ddphi))
    flags["C"] = bool(ddphi[i] >= -TOL_C)
    worst["C"] = (float(w[i]), float(max(0.0, -ddphi[i])))

    gap = float(phi[-1] - phi[0])
    flags["E"] = bool(abs(gap) <= TOL_E)
    worst["E"] = (1.0, abs(gap))

    ends = np.array([ddphi[0], ddphi[-1]])
    i = int(np.argmax(ends))
    flags["S"] = bool(ends.max() < 1.0 - TOL_S)
    worst["S"] = ((-1.0, 1.0)[i], float(max(0.0, ends[i] - 1.0)))

    g = _g_unchecked(np_, w[1:-1])
    i = int(np.argmin(g))
    flags["A"] = bool(g[i] > -TOL_A)
    worst["A"] = (float(w[1:-1][i]), float(max(0.0, -g[i])))

    return AssumptionReport(flags, worst, n_samples)


# -- canonical potentials ---------------------------------------------------------

BUILTINS = ("cubic_force", "tilted", "concave_convex", "figure2")


def _require(cond, msg):
    if not cond:
        raise BadParams(msg)


def builtin_spec(name: str, params: Sequence[float] = ()) -> PotentialSpec:
    """Closed-form :class:`PotentialSpec` for a named test potential.

    cubic_force(beta):        Phi'(w) = w + beta (w - w^3),                 0 < beta <= 1/2
    tilted(beta, delta):      Phi'(w) = w + beta (w - w^3) + delta (1 - w^2)
    concave_convex(beta):     Phi'(w) = w - beta (w - w^3),                 0 < beta <= 1
    figure2():                Phi(r + 1) = r + r^2/2 + r^3/20 - cos(2r)/4 + sin(3r)/10
    """
    params = [float(x) for x in params]
    if name == "cubic_force":
        _require(len(params) == 1, "cubic_force takes one parameter (beta)")
        (beta,) = params
        _require(0.0 < beta <= 0.5, f"cubic_force needs 0 < beta <= 1/2 for convexity, got {beta}")
        return PotentialSpec((0.0, 0.0, 0.5 + 0.5 * beta, 0.0, -0.25 * beta))
    if name == "tilted":
        _require(len(params) == 2, "tilted takes two parameters (beta, delta)")
        beta, delta = params
        # Phi'' = 1 + beta - 3 beta w^2 - 2 delta w is concave in w: minimum at w = +-1.
        _require(beta >= 0.0 and 1.0 - 2.0 * beta - 2.0 * abs(delta) >= -1e-12,
                 f"tilted({beta}, {delta}) is not convex on [-1, 1]")
        return PotentialSpec((0.0, delta, 0.5 + 0.5 * beta, -delta / 3.0, -0.25 * beta))
    if name == "concave_convex":
        _require(len(params) == 1, "concave_convex takes one parameter (beta)")
        (beta,) = params
        _require(0.0 < beta <= 1.0, f"concave_convex needs 0 < beta <= 1 for convexity, got {beta}")
        return PotentialSpec((0.0, 0.0, 0.5 - 0.5 * beta, 0.0, 0.25 * beta))
    if name == "figure2":
        _require(not params, "figure2 takes no parameters")
        return PotentialSpec((0.0, 1.0, 0.5, 0.05),
                             (TrigTerm(-0.25, 2.0, "cos"), TrigTerm(0.1, 3.0, "sin")),
                             shift=-1.0)
    raise BadParams(f"unknown builtin potential {name!r}; choose from {BUILTINS}")


def builtin(name: str, params: Iterable[float] = ()) -> NormalizedPotential:
    """Normalized form of a named potential family (asymptotic states -1, +1)."""
    if name == "figure2":
        raise BadParams("figure2 is not a normalized family; use builtin_spec('figure2')")
    params = tuple(float(x) for x in params)
    label = f"{name}({', '.join(f'{x:g}' for x in params)})"
    return build_normalized(builtin_spec(name, params), -1.0, 1.0, name=label)
