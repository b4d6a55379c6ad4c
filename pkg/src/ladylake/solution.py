"""Whole-state-space dispatch: region labels, equilibrium controls, value.

Above the barrier the classical terminal-angle solution applies; below it
the state space is split by the line theta = r/mu into focal-line and
universal-line tributary regions of the min-time game.  The two games
have incomparable payoffs, so the advice carries a value kind instead of
a merged scalar.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import classical, focal, universal
from .model import ControlPair, GameParams, LakeGameError, PolarState, RegionError


class Region(str, enum.Enum):
    ABOVE_BARRIER = "AboveBarrier"
    ON_BARRIER = "OnBarrier"
    FOCAL_LINE = "FocalLine"
    UNIVERSAL_LINE = "UniversalLine"
    FOCAL_TRIBUTARY = "FocalTributary"
    UNIVERSAL_TRIBUTARY = "UniversalTributary"
    ANTIPODAL_POINT = "AntipodalPoint"
    SHORE = "Shore"


class ValueKind(str, enum.Enum):
    TIME_TO_E = "TimeToE"
    TERMINAL_ANGLE = "TerminalAngle"


# Snap radius for the antipodal point, looser than tol_event so that
# states specified with fewer printed digits of pi still classify as the
# terminal point; the value is continuous to within ~2e-3 over this band.
E_SNAP = 1e-6


@dataclass(frozen=True)
class StrategyAdvice:
    region: Region
    controls: ControlPair
    value: float
    value_kind: ValueKind
    entry: focal.EntrySolution | None = None


def classify(state: PolarState, params: GameParams) -> Region:
    """Assign exactly one region label to a canonical state."""
    tol = params.tol_event
    mu = params.mu
    if state.r >= 1.0 - tol:
        return Region.SHORE
    if abs(state.r - mu) <= E_SNAP and abs(state.theta - math.pi) <= E_SNAP:
        return Region.ANTIPODAL_POINT
    if state.r >= mu:
        side = classical.classify_vs_barrier(state, params)
        if side is classical.BarrierSide.ON:
            return Region.ON_BARRIER
        if side is classical.BarrierSide.ABOVE:
            return Region.ABOVE_BARRIER
    if abs(state.theta - math.pi) <= tol and state.r < mu:
        return Region.FOCAL_LINE
    if state.theta <= tol:
        return Region.UNIVERSAL_LINE
    if state.theta <= state.r / mu:
        return Region.UNIVERSAL_TRIBUTARY
    return Region.FOCAL_TRIBUTARY


def advise(
    state: PolarState, params: GameParams, omega_now: float | None = None
) -> StrategyAdvice:
    """Equilibrium controls and value at a state.

    omega_now is required only on the focal line, where L's control
    reacts to M's instantaneous rate.
    """
    region = classify(state, params)
    if region is Region.SHORE:
        # Game over for the classical payoff; the realized separation is theta.
        controls = classical.classical_heading(state, params)
        return StrategyAdvice(region, controls, state.theta, ValueKind.TERMINAL_ANGLE)
    if region is Region.ANTIPODAL_POINT:
        controls = ControlPair(0.0, 1.0, 1.0)
        return StrategyAdvice(region, controls, 0.0, ValueKind.TIME_TO_E)
    if region in (Region.ABOVE_BARRIER, Region.ON_BARRIER):
        sol = classical.solve_classical(state, params)
        return StrategyAdvice(region, sol.heading, sol.value, ValueKind.TERMINAL_ANGLE)
    if region is Region.FOCAL_LINE:
        if omega_now is None:
            raise RegionError("omega_now is required on the focal line")
        controls = focal.fl_control(state, omega_now, params)
        value = focal.time_on_focal_line(state.r, params)
        return StrategyAdvice(region, controls, value, ValueKind.TIME_TO_E)
    if region is Region.UNIVERSAL_LINE:
        controls = universal.ul_control(state, params)
        value = 0.5 * math.pi + state.r / params.mu
        return StrategyAdvice(region, controls, value, ValueKind.TIME_TO_E)
    if region is Region.UNIVERSAL_TRIBUTARY:
        controls = universal.ul_tributary_heading(state, params)
        value = universal.time_to_antipode(state, params)
        return StrategyAdvice(region, controls, value, ValueKind.TIME_TO_E)
    entry = focal.solve_entry(state, params)
    phase = (
        focal.Phase.PRE_TANGENT
        if entry.case is focal.EntryCase.ONE
        else focal.Phase.POST_TANGENT
    )
    controls = focal.tributary_heading(state, entry.s, phase, params)
    return StrategyAdvice(
        Region.FOCAL_TRIBUTARY, controls, entry.total_time, ValueKind.TIME_TO_E, entry
    )


@dataclass(frozen=True)
class GridCell:
    r: float
    theta: float
    region: Region | None
    value: float | None
    value_kind: ValueKind | None
    error: str | None = None


def value_grid(params: GameParams, n_r: int, n_theta: int) -> list[GridCell]:
    """advise() on a uniform grid over (eps_r, 1] x [0, pi].

    Per-cell failures are captured in the cell record; the grid never
    aborts.
    """
    if n_r < 2 or n_theta < 2:
        raise ValueError("grid sizes must be >= 2")
    cells = []
    for i in range(n_r):
        r = params.eps_r + (1.0 - params.eps_r) * (i + 1) / n_r
        for j in range(n_theta):
            theta = math.pi * j / (n_theta - 1)
            state = PolarState(r, theta)
            try:
                adv = advise(state, params, omega_now=1.0)
                cells.append(
                    GridCell(r, theta, adv.region, adv.value, adv.value_kind)
                )
            except LakeGameError as exc:
                try:
                    region = classify(state, params)
                except LakeGameError:
                    region = None
                cells.append(GridCell(r, theta, region, None, None, str(exc)))
    return cells
