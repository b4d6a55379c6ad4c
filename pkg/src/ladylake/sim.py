"""Closed-loop forward simulation of the relative dynamics.

Fixed-step RK4 with feedback strategies for both agents and bisection
event refinement: focal-line entry, origin passage, antipodal arrival,
shore exit, and barrier crossings.  The integrated state is kept in the
canonical half-plane; crossings of theta = 0 or pi either snap onto the
singular line (equilibrium play) or mirror the frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import classical, focal
from .model import (
    ControlPair,
    DomainError,
    GameParams,
    LakeGameError,
    NoRootError,
    PolarState,
    RegionError,
    reflect_controls,
)
from .rootfind import bisect

_PI = math.pi

# Antipodal arrival threshold on mu - r while on the focal line.  The
# approach is tangential (r' -> 0), so an exact crossing never occurs;
# triggering here costs less than 1e-4 in arrival time.
E_ARRIVE = 1e-9

# Radial slack for flipping the tributary heading sign at the
# closest-approach circle, which is also touched tangentially.
_TANGENCY_SLACK = 1e-7


@dataclass(frozen=True)
class StrategySpec:
    """Pluggable behavior for one side.

    kinds: equilibrium (either side), constant_omega / switching_omega
    (man only), fixed_heading / perturbed_equilibrium (lady only).
    """

    side: str
    kind: str
    value: float = 0.0
    period: float = 0.0
    heading: tuple[float, float] | None = None
    delta_psi: float = 0.0

    def __post_init__(self) -> None:
        if self.side not in ("lady", "man"):
            raise DomainError(f"side must be 'lady' or 'man', got {self.side}")
        kinds_lady = ("equilibrium", "fixed_heading", "perturbed_equilibrium")
        kinds_man = ("equilibrium", "constant_omega", "switching_omega")
        allowed = kinds_lady if self.side == "lady" else kinds_man
        if self.kind not in allowed:
            raise DomainError(f"kind {self.kind} not allowed for side {self.side}")
        if self.kind == "constant_omega" and abs(self.value) > 1.0:
            raise DomainError(f"|omega| must be <= 1, got {self.value}")
        if self.kind == "switching_omega" and self.period <= 0.0:
            raise DomainError("switching period must be positive")
        if self.kind == "fixed_heading":
            if self.heading is None:
                raise DomainError("fixed_heading needs a heading")
            c, s = self.heading
            if abs(c * c + s * s - 1.0) > 1e-9:
                raise DomainError("fixed heading must be a unit vector")

    @staticmethod
    def equilibrium(side: str) -> "StrategySpec":
        return StrategySpec(side, "equilibrium")

    @staticmethod
    def constant_omega(value: float) -> "StrategySpec":
        return StrategySpec("man", "constant_omega", value=value)

    @staticmethod
    def switching_omega(period: float) -> "StrategySpec":
        return StrategySpec("man", "switching_omega", period=period)

    @staticmethod
    def fixed_heading(cos_psi: float, sin_psi: float) -> "StrategySpec":
        return StrategySpec("lady", "fixed_heading", heading=(cos_psi, sin_psi))

    @staticmethod
    def perturbed(delta_psi: float) -> "StrategySpec":
        return StrategySpec("lady", "perturbed_equilibrium", delta_psi=delta_psi)


@dataclass
class Trajectory:
    """Recorded closed-loop run.

    Controls are in the true (unmirrored) frame; theta is canonical.
    outcome is 'reached_e', 'reached_shore', or 'timeout'.
    """

    t: list[float] = field(default_factory=list)
    r: list[float] = field(default_factory=list)
    theta: list[float] = field(default_factory=list)
    man_angle: list[float] = field(default_factory=list)
    mirror: list[int] = field(default_factory=list)
    cos_psi: list[float] = field(default_factory=list)
    sin_psi: list[float] = field(default_factory=list)
    omega: list[float] = field(default_factory=list)
    events: list[tuple[float, str]] = field(default_factory=list)
    outcome: str = "timeout"
    theta_f: float | None = None
    t_final: float = 0.0

    def cartesian(self) -> list[tuple[float, float, float, float]]:
        out = []
        for r, th, al, mir in zip(self.r, self.theta, self.man_angle, self.mirror):
            ang = al + (-th if mir else th)
            out.append(
                (r * math.cos(ang), r * math.sin(ang), math.cos(al), math.sin(al))
            )
        return out


class _EquilibriumLady:
    """State-feedback equilibrium heading with a warm-started entry solve.

    The focal-line entry radius is a constant of the equilibrium motion,
    so between steps it is refined locally around the previous value and
    a full grid scan is only a fallback.
    """

    frame_fixed = False
    snap_to_fl = True
    is_equilibrium = True

    def __init__(self, params: GameParams) -> None:
        self.params = params
        self.s: float | None = None
        self.phase: focal.Phase | None = None
        self.phase_flipped = False

    def reset(self) -> None:
        self.s = None
        self.phase = None

    def _full_solve(self, r: float, th: float) -> float:
        entry = focal.solve_entry(PolarState(min(r, 1.0), min(th, _PI)), self.params)
        self.s = entry.s
        self.phase = (
            focal.Phase.PRE_TANGENT
            if entry.case is focal.EntryCase.ONE
            else focal.Phase.POST_TANGENT
        )
        return entry.s

    def _resolve_s(self, r: float, th: float) -> float:
        if self.s is None:
            return self._full_solve(r, th)
        # The entry radius is a constant of the equilibrium motion, so a
        # failed local refinement (possible right at the tangency circle,
        # where the cached value sits on the domain edge) keeps the cache
        # rather than rescanning, which would flip the phase spuriously.
        mu = self.params.mu
        case = (
            focal.EntryCase.ONE
            if self.phase is focal.Phase.PRE_TANGENT
            else focal.EntryCase.TWO
        )
        hi = min(mu, math.sqrt(mu * r))
        lo = r if case is focal.EntryCase.TWO else 0.0
        if hi <= lo:
            return self.s

        def f(s: float) -> float:
            t_lady, t_man = focal._times(r, th, s, case, mu)
            return t_lady - t_man

        s0 = min(max(self.s, lo), hi)
        w = 1e-6
        while True:
            a, b = max(lo, s0 - w), min(hi, s0 + w)
            try:
                fa, fb = f(a), f(b)
            except DomainError:
                return self.s
            if fa == 0.0 or fb == 0.0 or math.copysign(1.0, fa) != math.copysign(1.0, fb):
                self.s = float(bisect(f, a, b, self.params.tol_root, fa=fa, fb=fb))
                return self.s
            if a <= lo and b >= hi:
                return self.s
            w *= 8.0

    def __call__(
        self, t: float, r: float, th: float, omega_now: float | None
    ) -> tuple[float, float]:
        mu = self.params.mu
        r = min(max(r, self.params.eps_r), 1.0)
        th = min(max(th, 0.0), _PI)
        if omega_now is not None:
            # On the focal line: cancel theta drift against M's current rate.
            sin_psi = min(1.0, max(-1.0, omega_now * r / mu))
            return math.sqrt(max(0.0, 1.0 - sin_psi * sin_psi)), sin_psi
        if r >= mu:
            b = classical.barrier_theta(r, self.params)
            if th >= b - 1e-12:
                sin_psi = mu / r
                return math.sqrt(max(0.0, 1.0 - sin_psi * sin_psi)), sin_psi
        if th <= r / mu:
            self.reset()
            return -1.0, 0.0
        s = self._resolve_s(r, th)
        a = s * s / mu
        if self.phase is focal.Phase.PRE_TANGENT and r <= a + _TANGENCY_SLACK:
            self.phase = focal.Phase.POST_TANGENT
            self.phase_flipped = True
        sin_psi = min(1.0, s * s / (mu * max(r, a)))
        cos_mag = math.sqrt(max(0.0, 1.0 - sin_psi * sin_psi))
        if self.phase is focal.Phase.PRE_TANGENT:
            return -cos_mag, sin_psi
        return cos_mag, sin_psi


class _PerturbedLady:
    """Equilibrium heading rotated by a fixed angle off the focal line.

    On the line itself the exact reactive control is played so that the
    arrival at the antipodal point stays well defined.
    """

    frame_fixed = False
    snap_to_fl = True
    is_equilibrium = False

    def __init__(self, params: GameParams, delta_psi: float) -> None:
        self.inner = _EquilibriumLady(params)
        self.cos_d = math.cos(delta_psi)
        self.sin_d = math.sin(delta_psi)

    @property
    def s(self):
        return self.inner.s

    @property
    def phase(self):
        return self.inner.phase

    @property
    def phase_flipped(self):
        return self.inner.phase_flipped

    @phase_flipped.setter
    def phase_flipped(self, v):
        self.inner.phase_flipped = v

    def reset(self) -> None:
        self.inner.reset()

    def __call__(self, t, r, th, omega_now):
        c, s = self.inner(t, r, th, omega_now)
        if omega_now is not None:
            return c, s
        return c * self.cos_d - s * self.sin_d, s * self.cos_d + c * self.sin_d


class _FixedLady:
    frame_fixed = True
    snap_to_fl = False
    is_equilibrium = False
    s = None
    phase = None
    phase_flipped = False

    def __init__(self, heading: tuple[float, float]) -> None:
        self.heading = heading

    def reset(self) -> None:
        pass

    def __call__(self, t, r, th, omega_now):
        return self.heading


class _EquilibriumMan:
    frame_fixed = False
    is_equilibrium = True

    def __init__(self, params: GameParams) -> None:
        self.tol = params.tol_event

    def __call__(self, t, r, th):
        return 0.0 if th <= self.tol else 1.0


class _ConstantMan:
    frame_fixed = True
    is_equilibrium = False

    def __init__(self, value: float) -> None:
        self.value = value

    def __call__(self, t, r, th):
        return self.value


class _SwitchingMan:
    frame_fixed = True
    is_equilibrium = False

    def __init__(self, period: float) -> None:
        self.period = period

    def __call__(self, t, r, th):
        return 1.0 if int(t / self.period) % 2 == 0 else -1.0


def _make_lady(spec: StrategySpec, params: GameParams):
    if spec.side != "lady":
        raise DomainError("lady strategy required")
    if spec.kind == "equilibrium":
        return _EquilibriumLady(params)
    if spec.kind == "perturbed_equilibrium":
        return _PerturbedLady(params, spec.delta_psi)
    return _FixedLady(spec.heading)


def _make_man(spec: StrategySpec, params: GameParams):
    if spec.side != "man":
        raise DomainError("man strategy required")
    if spec.kind == "equilibrium":
        return _EquilibriumMan(params)
    if spec.kind == "constant_omega":
        return _ConstantMan(spec.value)
    return _SwitchingMan(spec.period)


def simulate(
    initial: PolarState,
    lady: StrategySpec,
    man: StrategySpec,
    dt: float = 1e-4,
    t_max: float = 20.0,
    params: GameParams | None = None,
) -> Trajectory:
    """Integrate the closed loop from an initial canonical state.

    Controls are re-evaluated from the current state at every RK4 stage;
    M's instantaneous rate is passed to L's strategy only while the state
    sits on the focal line.
    """
    if params is None:
        raise DomainError("params is required")
    if dt <= 0.0 or t_max <= 0.0:
        raise DomainError("dt and t_max must be positive")
    mu = params.mu
    tol = params.tol_event
    lady_s = _make_lady(lady, params)
    man_s = _make_man(man, params)

    r, th, alpha = initial.r, initial.theta, 0.0
    sign = 1.0
    mode_fl = abs(th - _PI) <= tol and r <= mu + tol
    traj = Trajectory()

    def eval_controls(tt: float, rr: float, thh: float) -> tuple[float, float, float]:
        """Canonical (cos_psi, sin_psi, omega) at a trial state."""
        om = man_s(tt, rr, thh)
        if man_s.frame_fixed:
            om *= sign
        om = min(1.0, max(-1.0, om))
        if mode_fl:
            c, s_ = lady_s(tt, rr, thh, om)
        else:
            c, s_ = lady_s(tt, rr, thh, None)
        if lady_s.frame_fixed and sign < 0.0:
            s_ = -s_
        return c, s_, om

    def deriv(tt: float, rr: float, thh: float) -> tuple[float, float, float]:
        c, s_, om = eval_controls(tt, rr, thh)
        rr_safe = max(abs(rr), 1e-12)
        dth = (mu / rr_safe * s_ if s_ != 0.0 else 0.0) - om
        return mu * c, dth, sign * om

    def rk4(tt, rr, thh, al, h):
        d1r, d1t, d1a = deriv(tt, rr, thh)
        d2r, d2t, d2a = deriv(tt + 0.5 * h, rr + 0.5 * h * d1r, thh + 0.5 * h * d1t)
        d3r, d3t, d3a = deriv(tt + 0.5 * h, rr + 0.5 * h * d2r, thh + 0.5 * h * d2t)
        d4r, d4t, d4a = deriv(tt + h, rr + h * d3r, thh + h * d3t)
        return (
            rr + h / 6.0 * (d1r + 2.0 * d2r + 2.0 * d3r + d4r),
            thh + h / 6.0 * (d1t + 2.0 * d2t + 2.0 * d3t + d4t),
            al + h / 6.0 * (d1a + 2.0 * d2a + 2.0 * d3a + d4a),
        )

    def record(tt, rr, thh, al):
        c, s_, om = eval_controls(tt, rr, thh)
        true = reflect_controls(
            ControlPair(c, min(1.0, max(-1.0, s_)), om), sign < 0.0
        )
        traj.t.append(tt)
        traj.r.append(rr)
        traj.theta.append(thh)
        traj.man_angle.append(al)
        traj.mirror.append(1 if sign < 0.0 else 0)
        traj.cos_psi.append(true.cos_psi)
        traj.sin_psi.append(true.sin_psi)
        traj.omega.append(true.omega)

    t = 0.0
    if abs(r - mu) <= tol and abs(th - _PI) <= tol:
        record(t, r, th, alpha)
        traj.outcome = "reached_e"
        traj.events.append((0.0, "reached_e"))
        traj.t_final = 0.0
        return traj
    if r >= 1.0 - tol:
        record(t, r, th, alpha)
        traj.outcome = "reached_shore"
        traj.theta_f = th
        traj.events.append((0.0, "shore_exit"))
        traj.t_final = 0.0
        return traj

    record(t, r, th, alpha)
    while t < t_max - 1e-12:
        h = min(dt, t_max - t)
        s_event = lady_s.s
        phase_event = lady_s.phase
        try:
            r1, th1, al1 = rk4(t, r, th, alpha, h)
        except LakeGameError:
            traj.events.append((t, "strategy_error"))
            break
        if not (math.isfinite(r1) and math.isfinite(th1)):
            raise LakeGameError(f"integration produced NaN at t = {t}")

        # Event functions over the trial step; earliest crossing wins.
        candidates: list[tuple[float, str]] = []

        def locate(g, kind: str) -> None:
            g0, g1 = g(r, th), g(r1, th1)
            if g0 > 0.0 >= g1:
                def gg(sigma: float) -> float:
                    rr, thh, _ = rk4(t, r, th, alpha, sigma)
                    return g(rr, thh)

                lo_s, hi_s = 0.0, h
                glo = g0
                for _ in range(60):
                    if hi_s - lo_s <= tol:
                        break
                    mid = 0.5 * (lo_s + hi_s)
                    gm = gg(mid)
                    if gm > 0.0:
                        lo_s, glo = mid, gm
                    else:
                        hi_s = mid
                candidates.append((hi_s, kind))

        locate(lambda rr, thh: 1.0 - rr, "shore_exit")
        if not mode_fl:
            locate(lambda rr, thh: rr - params.eps_r, "origin_passage")
            locate(lambda rr, thh: thh, "ul_cross")
            locate(lambda rr, thh: _PI - thh, "fl_cross")
            if (
                s_event is not None
                and phase_event is focal.Phase.POST_TANGENT
                and lady_s.snap_to_fl
            ):
                locate(lambda rr, thh: s_event - rr, "fl_cross")
        else:
            locate(lambda rr, thh: (mu - rr) - E_ARRIVE, "reached_e")
        if r >= mu and r1 >= mu and not mode_fl:
            b0 = classical.barrier_theta(min(r, 1.0), params)
            b1 = classical.barrier_theta(min(r1, 1.0), params)
            d0, d1 = th - b0, th1 - b1
            if d0 != 0.0 and math.copysign(1.0, d0) != math.copysign(1.0, d1):
                traj.events.append((t + 0.5 * h, "barrier_crossing"))

        if lady_s.phase_flipped:
            traj.events.append((t + h, "tangency"))
            lady_s.phase_flipped = False

        if not candidates:
            t += h
            r, th, alpha = r1, min(max(th1, 0.0), _PI), al1
            record(t, r, th, alpha)
            continue

        sigma, kind = min(candidates)
        re, te, ae = rk4(t, r, th, alpha, sigma)
        t += sigma
        te = min(max(te, 0.0), _PI)
        if kind == "shore_exit":
            r, th, alpha = min(re, 1.0), te, ae
            record(t, r, th, alpha)
            traj.events.append((t, "shore_exit"))
            traj.outcome = "reached_shore"
            traj.theta_f = th
            break
        if kind == "reached_e":
            r, th, alpha = re, te, ae
            record(t, r, th, alpha)
            traj.events.append((t, "reached_e"))
            traj.outcome = "reached_e"
            break
        if kind == "origin_passage":
            th_new = _PI - te
            if abs(th_new - _PI) <= 1e-6:
                th_new = _PI
            r, th, alpha = params.eps_r, th_new, ae
            mode_fl = abs(th - _PI) <= tol
            lady_s.reset()
            traj.events.append((t, "origin_passage"))
            record(t, r, th, alpha)
            continue
        if kind == "ul_cross":
            if man_s.is_equilibrium and lady_s.snap_to_fl:
                r, th, alpha = re, 0.0, ae
                traj.events.append((t, "ul_entry"))
            else:
                r, th, alpha = re, abs(te), ae
                sign = -sign
                traj.events.append((t, "reflection"))
            record(t, r, th, alpha)
            continue
        # fl_cross
        if lady_s.snap_to_fl and re < mu + tol:
            r, th, alpha = min(re, mu), _PI, ae
            mode_fl = True
            lady_s.reset()
            traj.events.append((t, "fl_entry"))
        else:
            r, th, alpha = re, min(2.0 * _PI - te, _PI) if te > _PI else te, ae
            sign = -sign
            traj.events.append((t, "reflection"))
        record(t, r, th, alpha)
        if abs(r - mu) <= tol and abs(th - _PI) <= tol:
            traj.events.append((t, "reached_e"))
            traj.outcome = "reached_e"
            break

    traj.t_final = t
    if traj.outcome == "timeout" and traj.events and traj.events[-1][1] == "strategy_error":
        pass
    return traj


@dataclass(frozen=True)
class DeviationRow:
    side: str
    label: str
    time: float
    margin: float
    outcome: str


def deviation_report(
    initial: PolarState,
    params: GameParams,
    deltas: tuple[float, ...] = (0.05, -0.05),
    dt: float = 1e-3,
    t_max: float = 20.0,
    man_deviations: tuple[StrategySpec, ...] | None = None,
) -> tuple[float, list[DeviationRow]]:
    """Saddle check around equilibrium play from a below-barrier start.

    L-deviations should not arrive earlier than equilibrium, M-deviations
    should not make feedback-L arrive later; both margins are reported so
    that a pass is margin >= -tolerance.
    """
    eq = simulate(
        initial,
        StrategySpec.equilibrium("lady"),
        StrategySpec.equilibrium("man"),
        dt,
        t_max,
        params,
    )
    t_eq = eq.t_final
    rows: list[DeviationRow] = []
    for d in deltas:
        run = simulate(
            initial, StrategySpec.perturbed(d), StrategySpec.equilibrium("man"), dt, t_max, params
        )
        # A run that never reaches E certainly did not arrive early; score
        # it at the horizon so the margin stays finite and JSON-safe.
        t_eff = run.t_final if run.outcome == "reached_e" else t_max
        rows.append(
            DeviationRow("lady", f"delta_psi={d:+g}", run.t_final, t_eff - t_eq, run.outcome)
        )
    if man_deviations is None:
        man_deviations = (
            StrategySpec.constant_omega(0.8),
            StrategySpec.constant_omega(0.0),
            StrategySpec.switching_omega(0.2),
        )
    for spec in man_deviations:
        label = spec.kind + (
            f"={spec.value:g}" if spec.kind == "constant_omega" else f"(period={spec.period:g})"
            if spec.kind == "switching_omega"
            else ""
        )
        run = simulate(
            initial, StrategySpec.equilibrium("lady"), spec, dt, t_max, params
        )
        t_eff = run.t_final if run.outcome == "reached_e" else t_max
        rows.append(
            DeviationRow("man", label, run.t_final, t_eq - t_eff, run.outcome)
        )
    return t_eq, rows


def integrate_classical_fan(
    r0: np.ndarray, theta0: np.ndarray, params: GameParams, dt: float = 1e-4
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized closed-loop run of many classical equilibrium trajectories.

    All states must start at r >= mu; integration stops at the shore with
    the crossing refined per trajectory.  Returns (theta_f, t_f).
    """
    mu = params.mu
    r = np.array(r0, dtype=float)
    th = np.array(theta0, dtype=float)
    if np.any(r < mu - 1e-12):
        raise RegionError("classical fan requires r >= mu")

    def d(rr):
        s = mu / np.maximum(rr, mu)
        return mu * np.sqrt(np.clip(1.0 - s * s, 0.0, None)), s * s - 1.0

    def d_scalar(rr):
        s = mu / max(rr, mu)
        return mu * math.sqrt(max(0.0, 1.0 - s * s)), s * s - 1.0

    n = r.shape[0]
    theta_f = np.full(n, np.nan)
    t_f = np.full(n, np.nan)
    active = np.ones(n, dtype=bool)
    t = 0.0
    max_steps = int(20.0 / dt) + 1
    for _ in range(max_steps):
        if not active.any():
            break
        ra, tha = r[active], th[active]
        k1r, k1t = d(ra)
        k2r, k2t = d(ra + 0.5 * dt * k1r)
        k3r, k3t = d(ra + 0.5 * dt * k2r)
        k4r, k4t = d(ra + dt * k3r)
        rn = ra + dt / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r)
        thn = tha + dt / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t)
        crossed = rn >= 1.0
        if crossed.any():
            idx_local = np.nonzero(crossed)[0]
            idx_global = np.nonzero(active)[0][idx_local]
            for i_l, i_g in zip(idx_local, idx_global):
                rr0, th0_ = float(ra[i_l]), float(tha[i_l])
                lo, hi = 0.0, dt
                for _ in range(60):
                    if hi - lo <= params.tol_event:
                        break
                    mid = 0.5 * (lo + hi)
                    k1 = d_scalar(rr0)
                    k2 = d_scalar(rr0 + 0.5 * mid * k1[0])
                    k3 = d_scalar(rr0 + 0.5 * mid * k2[0])
                    k4 = d_scalar(rr0 + mid * k3[0])
                    rmid = rr0 + mid / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
                    if rmid < 1.0:
                        lo = mid
                    else:
                        hi = mid
                sig = 0.5 * (lo + hi)
                k1 = d_scalar(rr0)
                k2r_, k2t_ = d_scalar(rr0 + 0.5 * sig * k1[0])
                k3r_, k3t_ = d_scalar(rr0 + 0.5 * sig * k2r_)
                k4r_, k4t_ = d_scalar(rr0 + sig * k3r_)
                theta_f[i_g] = th0_ + sig / 6.0 * (k1[1] + 2 * k2t_ + 2 * k3t_ + k4t_)
                t_f[i_g] = t + sig
            keep = ~crossed
            sub = np.nonzero(active)[0]
            r[sub[keep]] = rn[keep]
            th[sub[keep]] = thn[keep]
            active[sub[~keep]] = False
        else:
            r[active] = rn
            th[active] = thn
        t += dt
    return theta_f, t_f
