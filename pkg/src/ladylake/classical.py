"""Classical min-max terminal-angle game: controls, value, and barrier.

L maximizes the angular separation theta_f at the moment she reaches the
shore while M minimizes it.  The equilibrium heading exists only for
r >= mu; from the antipodal radius the guaranteed separation is
escape_angle(params), which is positive iff mu exceeds critical_mu().
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import ControlPair, DomainError, GameParams, PolarState, RegionError
from .rootfind import bisect


class BarrierSide(enum.Enum):
    ABOVE = "Above"
    ON = "On"
    BELOW = "Below"


@dataclass(frozen=True)
class ClassicalSolution:
    """Equilibrium terminal angle and controls at a query state."""

    value: float
    heading: ControlPair
    omega: float = 1.0


@dataclass(frozen=True)
class BarrierPoint:
    r: float
    theta: float


def classical_heading(state: PolarState, params: GameParams) -> ControlPair:
    """Equilibrium heading for L: away from the tangent to the mu-circle.

    Undefined for r < mu, where L has angular-rate advantage and the
    min-time game takes over.
    """
    mu = params.mu
    if state.r < mu - 1e-15:
        raise RegionError(f"classical heading undefined for r = {state.r} < mu = {mu}")
    r = max(state.r, mu)
    sin_psi = mu / r
    cos_psi = math.sqrt(max(0.0, 1.0 - sin_psi * sin_psi))
    return ControlPair(cos_psi, sin_psi, 1.0)


def classical_value(state: PolarState, params: GameParams) -> float:
    """Equilibrium terminal angle theta_f from (r, theta), r >= mu."""
    mu = params.mu
    if state.r < mu - 1e-15:
        raise RegionError(f"classical value undefined for r = {state.r} < mu = {mu}")
    r = max(state.r, mu)
    return (
        state.theta
        - math.sqrt(1.0 / mu**2 - 1.0)
        + math.acos(mu)
        + math.sqrt(max(0.0, r * r / mu**2 - 1.0))
        - math.acos(min(1.0, mu / r))
    )


def escape_angle(params: GameParams) -> float:
    """Guaranteed terminal separation when starting from the antipodal point.

    May be negative below the critical speed ratio.
    """
    mu = params.mu
    return math.pi - math.sqrt(1.0 / mu**2 - 1.0) + math.acos(mu)


def critical_mu(params: GameParams | None = None) -> float:
    """Speed ratio at which the guaranteed escape angle vanishes.

    Found by bracketing plus bisection; the game literature's five printed
    digits (about 0.21723) serve only as a cross-check.
    """
    tol = params.tol_root if params is not None else 1e-12

    def f(mu: float) -> float:
        return math.pi - math.sqrt(1.0 / mu**2 - 1.0) + math.acos(mu)

    return bisect(f, 1e-6, 1.0 - 1e-9, tol)


def barrier_theta(r: float, params: GameParams) -> float:
    """Angle of the barrier trajectory from the antipodal point, r in [mu, 1]."""
    mu = params.mu
    if not mu - 1e-12 <= r <= 1.0 + 1e-12:
        raise DomainError(f"barrier defined on [mu, 1], got r = {r}")
    r = min(max(r, mu), 1.0)
    return math.pi - math.sqrt(max(0.0, r * r / mu**2 - 1.0)) + math.acos(min(1.0, mu / r))


def barrier_slope(r: float, params: GameParams) -> float:
    """d(theta)/dr along the barrier: -sqrt(r^2 - mu^2) / (mu r)."""
    mu = params.mu
    if not mu - 1e-12 <= r <= 1.0 + 1e-12:
        raise DomainError(f"barrier defined on [mu, 1], got r = {r}")
    r = min(max(r, mu), 1.0)
    return -math.sqrt(max(0.0, r * r - mu * mu)) / (mu * r)


def semipermeability_residual(slope: float, r: float, params: GameParams) -> float:
    """min over omega, max over psi of the normal flow through a curve
    theta = C(r) with dC/dr = slope at radius r.

    The normal is (-slope, 1); L's maximizer aligns her velocity with it
    and M's minimizer is omega = 1.
    """
    mu = params.mu
    g = -slope
    denom = math.sqrt(g * g + 1.0 / (r * r))
    cos_psi = g / denom
    sin_psi = 1.0 / (r * denom)
    return g * mu * cos_psi + mu / r * sin_psi - 1.0


def barrier_residual(r: float, params: GameParams) -> float:
    """Semipermeability residual of the barrier itself; ~0 for r in (mu, 1]."""
    mu = params.mu
    if not mu < r <= 1.0 + 1e-12:
        raise DomainError(f"residual defined on (mu, 1], got r = {r}")
    r = min(r, 1.0)
    return semipermeability_residual(barrier_slope(r, params), r, params)


def classify_vs_barrier(state: PolarState, params: GameParams) -> BarrierSide:
    """Locate a state relative to the barrier curve, within tol_event."""
    mu = params.mu
    if state.r < mu:
        if (
            abs(state.r - mu) <= params.tol_event
            and abs(state.theta - math.pi) <= params.tol_event
        ):
            return BarrierSide.ON
        return BarrierSide.BELOW
    b = barrier_theta(state.r, params)
    if abs(state.theta - b) <= params.tol_event:
        return BarrierSide.ON
    return BarrierSide.ABOVE if state.theta > b else BarrierSide.BELOW


def solve_classical(state: PolarState, params: GameParams) -> ClassicalSolution:
    """Bundle the classical equilibrium controls and value at a state."""
    heading = classical_heading(state, params)
    return ClassicalSolution(classical_value(state, params), heading, 1.0)
