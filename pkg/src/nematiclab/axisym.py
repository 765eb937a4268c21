"""Finite-difference evolution of the reduced axisymmetric director-angle
equation

    lambda1 (phi_t + r phi_r) = phi_rr + phi_r/r - sin(2 phi)/(2 r^2)
                                 - 3 lambda2 sin(phi) cos(phi)

on r in [0, 1] with Dirichlet data phi(0, t) = 0 and phi(1, t) frozen at its
initial value.  The background flow is static: v(r) = r, w(z) = -2z.

Discretisation: second-order central differences on a uniform node grid
r_i = i/n.  Two time integrators:

  * ``explicit``       classical RK4 on the full right-hand side, with the
                       diffusive step guard dt <= 0.25 dr^2 lambda1;
  * ``semi_implicit``  Crank-Nicolson on the linear operator
                       phi_rr + phi_r/r via a tridiagonal solve, everything
                       else explicit.  The singular reaction
                       -sin(2 phi)/(2 r^2) has Jacobian -cos(2 phi)/r^2,
                       which at the first node is as stiff as diffusion, so
                       its damping part (cos(2 phi) > 0) is folded into the
                       tridiagonal diagonal; this keeps the scheme
                       first-order consistent while removing the near-origin
                       step restriction.

The origin node carries the Dirichlet value phi = 0, so the singular terms
are never evaluated at r = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.linalg import solve_banded

from .coeffs import LeslieCoefficients
from .errors import SolverHalt

_trapz = np.trapezoid

Scheme = Literal["semi_implicit", "explicit"]


# ---------------------------------------------------------------------------
# grids and states


@dataclass(frozen=True)
class RadialGrid:
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 16:
            raise ValueError("need at least 16 cells")

    @property
    def dr(self) -> float:
        return 1.0 / self.n_cells

    @cached_property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_cells + 1)


@dataclass
class RadialState:
    grid: RadialGrid
    phi: np.ndarray
    t: float = 0.0

    def validate(self) -> None:
        if self.phi.shape != (self.grid.n_cells + 1,):
            raise ValueError("phi length does not match grid")
        if self.phi[0] != 0.0:
            raise ValueError("origin value must be 0")
        if not np.all(np.isfinite(self.phi)):
            raise ValueError("non-finite entries in phi")

    @property
    def boundary_value(self) -> float:
        return float(self.phi[-1])


def make_state(grid: RadialGrid, phi0, t: float = 0.0) -> RadialState:
    """Build a state from an array or a callable phi0(r); pins phi(0) = 0."""
    phi = np.asarray(phi0(grid.r) if callable(phi0) else phi0, dtype=float).copy()
    phi[0] = 0.0
    state = RadialState(grid, phi, t)
    state.validate()
    return state


# ---------------------------------------------------------------------------
# static background flow


@dataclass(frozen=True)
class StaticFields:
    """The closed-form background velocity v(r) = r, w(z) = -2z."""

    def v(self, r):
        return np.asarray(r, dtype=float) + 0.0

    def w(self, z):
        return -2.0 * np.asarray(z, dtype=float)

    def divergence_residual(self, r: float, z: float, h: float = 1e-5) -> float:
        """Check (1/r)(r v)_r + w_z by central differences; exact for the
        closed forms up to rounding."""
        rv = lambda x: x * self.v(x)
        d_rv = (rv(r + h) - rv(r - h)) / (2.0 * h)
        d_w = (self.w(z + h) - self.w(z - h)) / (2.0 * h)
        return float(d_rv / r + d_w)


def static_fields() -> StaticFields:
    return StaticFields()


# ---------------------------------------------------------------------------
# initial-data presets


def initial_profile(grid: RadialGrid, preset: str, **params) -> np.ndarray:
    """Named initial angles on the grid nodes.

    linear                  phi0 = r
    scaled_linear           phi0 = amplitude * r
    bubble                  phi0 = 2 arctan(r / beta0)
    bubble_linear_max       pointwise max of bubble and scaled_linear
    table                   linear interpolation of (r, phi) pairs
    """
    r = grid.r
    if preset == "linear":
        _expect_params(preset, params, set())
        return r.copy()
    if preset == "scaled_linear":
        _expect_params(preset, params, {"amplitude"})
        return params["amplitude"] * r
    if preset == "bubble":
        _expect_params(preset, params, {"beta0"})
        beta0 = params["beta0"]
        if beta0 <= 0:
            raise ValueError("beta0 must be positive")
        return 2.0 * np.arctan(r / beta0)
    if preset == "bubble_linear_max":
        _expect_params(preset, params, {"beta0", "amplitude"})
        beta0 = params["beta0"]
        if beta0 <= 0:
            raise ValueError("beta0 must be positive")
        return np.maximum(2.0 * np.arctan(r / beta0), params["amplitude"] * r)
    if preset == "table":
        _expect_params(preset, params, {"points"})
        pts = sorted(params["points"])
        rs = np.array([p[0] for p in pts], dtype=float)
        phis = np.array([p[1] for p in pts], dtype=float)
        if rs[0] > 0.0 or rs[-1] < 1.0:
            raise ValueError("table must cover [0, 1]")
        return np.interp(r, rs, phis)
    raise ValueError(f"unknown preset {preset!r}")


def _expect_params(preset: str, params: dict, expected: set) -> None:
    if set(params) != expected:
        raise ValueError(
            f"preset {preset!r} takes parameters {sorted(expected)}, got {sorted(params)}"
        )


# ---------------------------------------------------------------------------
# solver parameters


@dataclass(frozen=True)
class SolverParams:
    dt: float
    scheme: Scheme = "semi_implicit"
    t_end: float = 1.0
    clip_guard: float | None = None  # default 0.5/dr, resolved per grid

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.scheme not in ("semi_implicit", "explicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def check_stability(self, grid: RadialGrid, c: LeslieCoefficients) -> None:
        if self.scheme == "explicit":
            bound = 0.25 * grid.dr**2 * c.lambda1
            if self.dt > bound:
                raise ValueError(
                    f"explicit scheme needs dt <= 0.25*dr^2*lambda1 = {bound:.3e}"
                )

    def guard_for(self, grid: RadialGrid) -> float:
        return 0.5 / grid.dr if self.clip_guard is None else self.clip_guard


def default_dt(grid: RadialGrid, c: LeslieCoefficients, scheme: Scheme) -> float:
    if scheme == "explicit":
        return min(0.25 * grid.dr**2 * c.lambda1, 1e-5)
    return 1e-4


# ---------------------------------------------------------------------------
# spatial operators


def _phi_r(phi: np.ndarray, dr: float) -> np.ndarray:
    """Second-order first derivative on all nodes (one-sided at the ends)."""
    out = np.empty_like(phi)
    out[1:-1] = (phi[2:] - phi[:-2]) / (2.0 * dr)
    out[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dr)
    out[-1] = (3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / (2.0 * dr)
    return out


def max_gradient(state: RadialState) -> float:
    return float(np.max(np.abs(_phi_r(state.phi, state.grid.dr))))


def rhs(state: RadialState, c: LeslieCoefficients) -> np.ndarray:
    """phi_t at the interior nodes i = 1..n-1."""
    grid = state.grid
    phi = state.phi
    dr = grid.dr
    r = grid.r[1:-1]
    p = phi[1:-1]
    d1 = (phi[2:] - phi[:-2]) / (2.0 * dr)
    d2 = (phi[2:] - 2.0 * p + phi[:-2]) / dr**2
    reaction = -np.sin(2.0 * p) / (2.0 * r**2) - 3.0 * c.lambda2 * np.sin(p) * np.cos(p)
    return (d2 + d1 / r + reaction) / c.lambda1 - r * d1


def _explicit_terms(phi: np.ndarray, grid: RadialGrid, c: LeslieCoefficients) -> np.ndarray:
    """Interior contributions handled outside the tridiagonal solve."""
    dr = grid.dr
    r = grid.r[1:-1]
    p = phi[1:-1]
    d1 = (phi[2:] - phi[:-2]) / (2.0 * dr)
    reaction = -np.sin(2.0 * p) / (2.0 * r**2) - 3.0 * c.lambda2 * np.sin(p) * np.cos(p)
    return reaction / c.lambda1 - r * d1


def step(state: RadialState, c: LeslieCoefficients, p: SolverParams) -> RadialState:
    """Advance one time step; boundary values are reimposed."""
    p.check_stability(state.grid, c)
    if p.scheme == "explicit":
        new_phi = _step_rk4(state, c, p.dt)
    else:
        new_phi = _step_cn(state, c, p.dt)
    if not np.all(np.isfinite(new_phi)):
        raise SolverHalt("non-finite field", state.t + p.dt)
    return RadialState(state.grid, new_phi, state.t + p.dt)


def _step_rk4(state: RadialState, c: LeslieCoefficients, dt: float) -> np.ndarray:
    grid = state.grid
    phi = state.phi

    def f(ph: np.ndarray) -> np.ndarray:
        return rhs(RadialState(grid, ph, state.t), c)

    k1 = f(phi)
    ph2 = phi.copy()
    ph2[1:-1] += 0.5 * dt * k1
    k2 = f(ph2)
    ph3 = phi.copy()
    ph3[1:-1] += 0.5 * dt * k2
    k3 = f(ph3)
    ph4 = phi.copy()
    ph4[1:-1] += dt * k3
    k4 = f(ph4)
    out = phi.copy()
    out[1:-1] += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out[0] = 0.0
    out[-1] = phi[-1]
    return out


def _step_cn(state: RadialState, c: LeslieCoefficients, dt: float) -> np.ndarray:
    grid = state.grid
    phi = state.phi
    dr = grid.dr
    r = grid.r[1:-1]
    n = grid.n_cells
    theta = dt / (2.0 * c.lambda1)

    lower = 1.0 / dr**2 - 1.0 / (2.0 * dr * r)
    diag = np.full(n - 1, -2.0 / dr**2)
    upper = 1.0 / dr**2 + 1.0 / (2.0 * dr * r)

    interior = phi[1:-1]
    l_phi = diag * interior
    l_phi[:-1] += upper[:-1] * interior[1:]
    l_phi[1:] += lower[1:] * interior[:-1]
    # boundary columns: phi(0) = 0 contributes nothing; phi(1) is constant
    bvec = np.zeros(n - 1)
    bvec[-1] = upper[-1] * phi[-1]

    # Damping part of the singular reaction Jacobian, cos(2 phi)/r^2 where
    # positive, goes on the diagonal (and on the right so fixed points stay
    # zeros of rhs): without it the first node is as stiff as diffusion and
    # the splitting would need dt = O(dr^2).
    damp = np.maximum(np.cos(2.0 * interior), 0.0) / (c.lambda1 * r**2)

    rhs_vec = (
        interior * (1.0 + dt * damp)
        + theta * (l_phi + 2.0 * bvec)
        + dt * _explicit_terms(phi, grid, c)
    )

    ab = np.zeros((3, n - 1))
    ab[0, 1:] = -theta * upper[:-1]
    ab[1, :] = 1.0 - theta * diag + dt * damp
    ab[2, :-1] = -theta * lower[1:]
    if not np.all(np.isfinite(rhs_vec)):
        raise SolverHalt("non-finite field", state.t)
    try:
        new_interior = solve_banded((1, 1), ab, rhs_vec)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise SolverHalt(f"tridiagonal solve breakdown: {exc}", state.t)

    out = phi.copy()
    out[1:-1] = new_interior
    out[0] = 0.0
    out[-1] = phi[-1]
    return out


# ---------------------------------------------------------------------------
# energies


def energy(state: RadialState) -> tuple[float, float, float]:
    """(e_total, e_grad, e_sin): trapezoidal quadrature over [0, 1] of
    phi_r^2 * r and sin^2(phi)/r; the second integrand extends to 0 at the
    origin by continuity."""
    grid = state.grid
    r = grid.r
    d1 = _phi_r(state.phi, grid.dr)
    grad_integrand = d1**2 * r
    sin_integrand = np.empty_like(r)
    sin_integrand[0] = 0.0
    sin_integrand[1:] = np.sin(state.phi[1:]) ** 2 / r[1:]
    e_grad = float(_trapz(grad_integrand, r))
    e_sin = float(_trapz(sin_integrand, r))
    return e_grad + e_sin, e_grad, e_sin


def local_energy(state: RadialState, R: float) -> float:
    """Trapezoidal quadrature of phi_r^2 r over [0, R]."""
    grid = state.grid
    dr = grid.dr
    if R < 2.0 * dr:
        raise ValueError(f"R = {R} unresolvable: need R >= 2*dr = {2 * dr}")
    if R > 1.0:
        raise ValueError("R must lie in (0, 1]")
    r = grid.r
    integrand = _phi_r(state.phi, dr) ** 2 * r
    k = int(np.floor(R / dr + 1e-12))
    total = float(_trapz(integrand[: k + 1], r[: k + 1]))
    if k < grid.n_cells and R > r[k]:
        # partial trapezoid on the clipped last interval
        frac = (R - r[k]) / dr
        f_r = integrand[k] + frac * (integrand[k + 1] - integrand[k])
        total += 0.5 * (integrand[k] + f_r) * (R - r[k])
    return total


# ---------------------------------------------------------------------------
# full simulation with snapshot recording


@dataclass
class RunTrace:
    """Snapshots of one simulation, including the initial state and the
    state at halt or t_end."""

    grid: RadialGrid
    params: SolverParams
    coeffs: LeslieCoefficients
    times: np.ndarray
    phis: np.ndarray  # shape (n_snapshots, n_nodes)
    halted: bool = False
    halt_reason: str | None = None

    @property
    def n_snapshots(self) -> int:
        return len(self.times)

    def state(self, i: int) -> RadialState:
        return RadialState(self.grid, self.phis[i], float(self.times[i]))

    def states(self):
        return (self.state(i) for i in range(self.n_snapshots))

    def final_state(self) -> RadialState:
        return self.state(self.n_snapshots - 1)


def simulate(
    state0: RadialState,
    c: LeslieCoefficients,
    p: SolverParams,
    snapshot_stride: int = 1,
) -> RunTrace:
    """March to t_end, recording every ``snapshot_stride``-th state.

    Halts (without raising) when max|phi_r| exceeds the gradient guard or the
    field goes non-finite; the offending state is the last snapshot.
    """
    state0.validate()
    p.check_stability(state0.grid, c)
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be >= 1")
    guard = p.guard_for(state0.grid)

    times = [state0.t]
    phis = [state0.phi.copy()]
    halted = False
    halt_reason = None

    state = state0
    n_steps = int(round((p.t_end - state0.t) / p.dt))
    if max_gradient(state) > guard:
        halted, halt_reason = True, "gradient guard"
        n_steps = 0
    for k in range(1, n_steps + 1):
        try:
            state = step(state, c, p)
        except SolverHalt as halt:
            halted, halt_reason = True, halt.reason
            break
        record = (k % snapshot_stride == 0) or (k == n_steps)
        if max_gradient(state) > guard:
            halted, halt_reason = True, "gradient guard"
            record = True
        if record:
            times.append(state.t)
            phis.append(state.phi.copy())
        if halted:
            break

    return RunTrace(
        grid=state0.grid,
        params=p,
        coeffs=c,
        times=np.asarray(times),
        phis=np.asarray(phis),
        halted=halted,
        halt_reason=halt_reason,
    )
