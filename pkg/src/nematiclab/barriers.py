"""Closed-form barrier families for the axisymmetric angle equation and the
ordered-triple comparison harness.

Three families, with b = 3|lambda2|/lambda1:

  super   2 arctan( r exp(b t) / c)
  sub     2 arctan(-r exp(b t) / c)
  eta     2 arctan( r / beta(t)),   beta' = -beta^(2/3)

The concentration clock solves in closed form,
beta(t)^(1/3) = beta0^(1/3) - t/3, vanishing at t0 = 3 beta0^(1/3).

Residuals are evaluated from hand-derived closed forms of the defect

  lambda1 (f_t + r f_r) - f_rr - f_r/r + sin(2f)/(2 r^2)
      + 3 lambda2 sin(f) cos(f),

never by numerically differentiating the barrier, so the sign properties
carry no truncation noise.  The bubble profile annihilates the spatial
operator at every scale, leaving

  super:  (2 r c e^{bt} / (c^2 + r^2 e^{2bt})) (lambda1 (1+b)
              + 3 lambda2 cos f)            >= 0 always,
  eta:    (2 r / (beta^2 + r^2)) (lambda1 beta' + lambda1 beta
              + 3 lambda2 beta cos f)       <= 0 whenever
              beta0^(1/3) < lambda1 / (lambda1 + 3 |lambda2|).

The sub family mirrors super with flipped sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .axisym import RunTrace
from .coeffs import LeslieCoefficients

BarrierKind = Literal["super", "sub", "eta"]


@dataclass(frozen=True)
class BetaClock:
    """beta(t) = (beta0^(1/3) - t/3)^3, strictly decreasing, gone at t0."""

    beta0: float

    def __post_init__(self):
        if self.beta0 <= 0.0:
            raise ValueError("beta0 must be positive")

    @property
    def t0(self) -> float:
        return 3.0 * self.beta0 ** (1.0 / 3.0)

    def beta(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t >= self.t0):
            raise ValueError(f"clock expired: t >= t0 = {self.t0:.6g}")
        return (self.beta0 ** (1.0 / 3.0) - t / 3.0) ** 3

    def beta_prime(self, t):
        return -self.beta(t) ** (2.0 / 3.0)


@dataclass(frozen=True)
class BarrierSpec:
    kind: BarrierKind
    c: float = 1.0  # super/sub width
    b: float = 0.0  # super/sub sharpening exponent, 3|lambda2|/lambda1
    beta0: float = 1.0  # eta clock start

    def clock(self) -> BetaClock:
        return BetaClock(self.beta0)


def supersolution(c: float, coeffs: LeslieCoefficients) -> BarrierSpec:
    if c <= 0.0:
        raise ValueError("c must be positive")
    return BarrierSpec("super", c=c, b=3.0 * abs(coeffs.lambda2) / coeffs.lambda1)


def subsolution(c: float, coeffs: LeslieCoefficients) -> BarrierSpec:
    if c <= 0.0:
        raise ValueError("c must be positive")
    return BarrierSpec("sub", c=c, b=3.0 * abs(coeffs.lambda2) / coeffs.lambda1)


def eta_barrier(
    beta0: float, coeffs: LeslieCoefficients, strict: bool = True
) -> BarrierSpec:
    """The concentrating family; by default the clock constraint
    beta0^(1/3) < lambda1/(lambda1 + 3|lambda2|) is enforced.  Pass
    strict=False only to build deliberately invalid negative controls."""
    if beta0 <= 0.0:
        raise ValueError("beta0 must be positive")
    limit = coeffs.lambda1 / (coeffs.lambda1 + 3.0 * abs(coeffs.lambda2))
    if strict and not beta0 ** (1.0 / 3.0) < limit:
        raise ValueError(
            f"beta0^(1/3) = {beta0 ** (1 / 3):.6g} must be < "
            f"lambda1/(lambda1+3|lambda2|) = {limit:.6g}"
        )
    return BarrierSpec("eta", beta0=beta0)


def barrier_value(spec: BarrierSpec, r, t):
    """Barrier value at (r, t); broadcasts over array arguments."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    # arctan saturates, so an overflowing exponential is benign; guard the
    # 0 * inf corner at the origin explicitly
    if spec.kind in ("super", "sub"):
        with np.errstate(over="ignore", invalid="ignore"):
            u = r * np.exp(spec.b * t) / spec.c
        u = np.where(np.asarray(r) == 0.0, 0.0, u)
        sign = 1.0 if spec.kind == "super" else -1.0
        return sign * 2.0 * np.arctan(u)
    beta = spec.clock().beta(t)
    return 2.0 * np.arctan(r / beta)


def barrier_residual(spec: BarrierSpec, coeffs: LeslieCoefficients, r, t):
    """Closed-form defect of the barrier; r = 0 gives 0 by continuity."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    l1, l2 = coeffs.lambda1, coeffs.lambda2
    if spec.kind in ("super", "sub"):
        # prefactor written to stay finite when exp(2bt) overflows: an inf
        # exponential collapses it to the correct limit 0
        with np.errstate(over="ignore"):
            ebt = np.exp(spec.b * t)
            pref = 2.0 * r * spec.c / (spec.c**2 / ebt + r**2 * ebt)
        cosf = np.cos(barrier_value(spec, r, t))
        bracket = l1 * (1.0 + spec.b) + 3.0 * l2 * cosf
        sign = 1.0 if spec.kind == "super" else -1.0
        return sign * pref * bracket
    clock = spec.clock()
    beta = clock.beta(t)
    pref = 2.0 * r / (beta**2 + r**2)
    cosf = np.cos(barrier_value(spec, r, t))
    return pref * (l1 * clock.beta_prime(t) + l1 * beta + 3.0 * l2 * beta * cosf)


# ---------------------------------------------------------------------------
# ordered-triple comparison harness


@dataclass(frozen=True)
class OrderingReport:
    """Worst signed violations of sub <= phi <= super over a full trace.
    Positive numbers are violations; the report passes when both stay at or
    below the discretisation tolerance."""

    passed: bool
    tolerance: float
    lower_worst: float
    lower_at: tuple[float, float]  # (t, r)
    upper_worst: float
    upper_at: tuple[float, float]

    def as_dict(self) -> dict:
        def clean(v):
            return None if not np.isfinite(v) else v

        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "lower_worst": clean(self.lower_worst),
            "lower_at_t": self.lower_at[0],
            "lower_at_r": self.lower_at[1],
            "upper_worst": clean(self.upper_worst),
            "upper_at_t": self.upper_at[0],
            "upper_at_r": self.upper_at[1],
        }


def check_ordering(
    sub: BarrierSpec | None, trace: RunTrace, sup: BarrierSpec | None
) -> OrderingReport:
    """Scan every snapshot and node of a simulation for violations of
    sub <= phi <= super.  Either side may be None to check a one-sided
    bound (no member of the bounded families dominates data exceeding pi,
    so blow-up runs only carry the lower bound).

    Requires the ordering to hold at t = 0 and on r in {0, 1} within the
    tolerance 10 (dr^2 + dt); a violated precondition means the harness was
    misconfigured and raises instead of reporting a comparison failure.
    """
    if sub is None and sup is None:
        raise ValueError("need at least one barrier")
    grid = trace.grid
    tol = 10.0 * (grid.dr**2 + trace.params.dt)
    r = grid.r[np.newaxis, :]
    t = trace.times[:, np.newaxis]
    phi = trace.phis

    neg_inf = np.full_like(phi, -np.inf)
    low_viol = (barrier_value(sub, r, t) - phi) if sub is not None else neg_inf
    up_viol = (phi - barrier_value(sup, r, t)) if sup is not None else neg_inf

    precondition = max(
        float(np.max(low_viol[0])),
        float(np.max(up_viol[0])),
        float(np.max(low_viol[:, [0, -1]])),
        float(np.max(up_viol[:, [0, -1]])),
    )
    if precondition > tol:
        raise ValueError(
            "ordering precondition fails at t=0 or on the boundary "
            f"(worst {precondition:.3e} > tol {tol:.3e})"
        )

    li = np.unravel_index(int(np.argmax(low_viol)), low_viol.shape)
    ui = np.unravel_index(int(np.argmax(up_viol)), up_viol.shape)
    lower_worst = float(low_viol[li])
    upper_worst = float(up_viol[ui])
    return OrderingReport(
        passed=max(lower_worst, upper_worst) <= tol,
        tolerance=tol,
        lower_worst=lower_worst,
        lower_at=(float(trace.times[li[0]]), float(grid.r[li[1]])),
        upper_worst=upper_worst,
        upper_at=(float(trace.times[ui[0]]), float(grid.r[ui[1]])),
    )
