"""Command-line interface: solve, flowfield, simulate, verify, critical-mu.

Emits JSON to stdout for point queries and reports, CSV for trajectory
and flowfield samples, and self-contained static SVG 1.1 for figures.
Exit codes: 0 success, 1 verification threshold failure, 2 domain or
argument errors, 3 file I/O errors.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

from . import classical, focal, universal, verify
from .model import (
    DomainError,
    GameParams,
    LakeGameError,
    PolarState,
    canonicalize,
)
from .sim import StrategySpec, deviation_report, simulate
from .solution import Region, advise

_PI = math.pi

# Shared plot geometry so tests can invert the pixel mapping.
SVG_W = 800
SVG_H = 600
SVG_PAD = 40
CART_SPAN = 2.2  # Cartesian frames cover [-1.1, 1.1] in both axes.


def polar_to_px(r: float, theta: float) -> tuple[float, float]:
    """(r, theta) rectangle -> SVG pixels; theta up the page."""
    x = SVG_PAD + r * (SVG_W - 2 * SVG_PAD)
    y = SVG_H - SVG_PAD - theta / _PI * (SVG_H - 2 * SVG_PAD)
    return x, y


def px_to_polar(x: float, y: float) -> tuple[float, float]:
    r = (x - SVG_PAD) / (SVG_W - 2 * SVG_PAD)
    theta = (SVG_H - SVG_PAD - y) / (SVG_H - 2 * SVG_PAD) * _PI
    return r, theta


def cart_to_px(x: float, y: float) -> tuple[float, float]:
    scale = (min(SVG_W, SVG_H) - 2 * SVG_PAD) / CART_SPAN
    return SVG_W / 2 + x * scale, SVG_H / 2 - y * scale


def px_to_cart(px: float, py: float) -> tuple[float, float]:
    scale = (min(SVG_W, SVG_H) - 2 * SVG_PAD) / CART_SPAN
    return (px - SVG_W / 2) / scale, (SVG_H / 2 - py) / scale


def _fmt(v: float) -> str:
    return format(v, ".12g")


_SVG_STYLE = """\
  <style>
    polyline { fill: none; stroke-width: 1; }
    .FocalTributary { stroke: #1f77b4; }
    .UniversalTributary { stroke: #2ca02c; }
    .Classical { stroke: #1f77b4; }
    .barrier { stroke: #d62728; stroke-width: 2; }
    .focal-line { stroke: #9467bd; stroke-width: 2; }
    .universal-line { stroke: #8c564b; stroke-width: 2; }
    .partition { stroke: #7f7f7f; stroke-dasharray: 4 3; }
    .lady-path { stroke: #1f77b4; stroke-width: 1.5; }
    .man-path { stroke: #ff7f0e; stroke-width: 1.5; }
    .lake { fill: none; stroke: #333333; }
    .start-marker { fill: none; stroke: #333333; }
  </style>
"""


def _svg_document(body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">\n'
    )
    return head + _SVG_STYLE + "\n".join(body) + "\n</svg>\n"


def _polyline(points: list[tuple[float, float]], cls: str) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'  <polyline class="{cls}" points="{pts}" />'


def _parse_mu(value: float) -> GameParams:
    if not 0.0 < value < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {value}")
    return GameParams(value)


def parse_strategy(side: str, text: str) -> StrategySpec:
    """Strategy mini-language: eq | constant:W | switching:T | fixed:C,S |
    perturbed:D."""
    if text == "eq":
        return StrategySpec.equilibrium(side)
    kind, sep, arg = text.partition(":")
    try:
        if kind == "constant" and sep:
            return StrategySpec.constant_omega(float(arg))
        if kind == "switching" and sep:
            return StrategySpec.switching_omega(float(arg))
        if kind == "fixed" and sep:
            c, s = (float(v) for v in arg.split(","))
            return StrategySpec.fixed_heading(c, s)
        if kind == "perturbed" and sep:
            return StrategySpec.perturbed(float(arg))
    except ValueError as exc:
        raise DomainError(f"bad strategy argument in {text!r}: {exc}") from exc
    raise DomainError(f"unknown strategy spec {text!r}")


def cmd_solve(args: argparse.Namespace) -> int:
    params = _parse_mu(args.mu)
    state, _ = canonicalize(args.r, args.theta)
    adv = advise(state, params, omega_now=args.omega_now)
    out = {
        "region": adv.region.value,
        "cos_psi": adv.controls.cos_psi,
        "sin_psi": adv.controls.sin_psi,
        "omega": adv.controls.omega,
        "omega_arbitrary": adv.controls.omega_arbitrary,
        "value": adv.value,
        "value_kind": adv.value_kind.value,
        "entry": None,
    }
    if adv.entry is not None:
        out["entry"] = {
            "s": adv.entry.s,
            "case": adv.entry.case.value,
            "t_L": adv.entry.t_lady,
            "t_M": adv.entry.t_man,
        }
    print(json.dumps(out, indent=2))
    return 0


def cmd_critical_mu(args: argparse.Namespace) -> int:
    print(json.dumps({"critical_mu": classical.critical_mu()}, indent=2))
    return 0


def _classical_trajectory(theta0: float, params: GameParams, n: int) -> list[tuple[float, float]]:
    """Closed-form classical equilibrium path seeded at (mu, theta0).

    Terminal-angle conservation gives theta as an explicit function of r,
    so the sampled path ends exactly on the shore.
    """
    mu = params.mu
    pts = []
    for k in range(n):
        r = mu + (1.0 - mu) * k / (n - 1)
        theta = (
            theta0
            - math.sqrt(max(0.0, r * r / (mu * mu) - 1.0))
            + math.acos(min(1.0, mu / r))
        )
        pts.append((r, theta))
    return pts


def _fl_tributary_path(s: float, params: GameParams, n: int) -> list[tuple[float, float]]:
    """Retrograde tributary samples truncated to the below-barrier region."""
    mu = params.mu
    pts = []
    tau = 0.0
    dtau = 4.0 / n
    for _ in range(2 * n):
        smp = focal.flowfield_sample(s, tau, params)
        # Allow a rounding ulp past theta = pi at the entry point itself.
        if smp.r >= 1.0 or not -1e-9 <= smp.theta <= _PI + 1e-9:
            break
        theta = min(max(smp.theta, 0.0), _PI)
        if smp.r >= mu and theta > classical.barrier_theta(smp.r, params):
            break
        pts.append((smp.r, theta))
        tau += dtau
    return pts


def _flowfield_paths(game: str, params: GameParams, n_s: int, n_ul: int, n_pts: int):
    """(class, points) pairs for one flowfield figure."""
    mu = params.mu
    paths: list[tuple[str, list[tuple[float, float]]]] = []
    barrier = [
        (mu + (1.0 - mu) * k / (n_pts - 1), None) for k in range(n_pts)
    ]
    barrier = [(r, classical.barrier_theta(r, params)) for r, _ in barrier]
    if game == "classical":
        for k in range(1, n_s + 1):
            theta0 = _PI * k / n_s
            paths.append(("Classical", _classical_trajectory(theta0, params, n_pts)))
        paths.append(("barrier", barrier))
        return paths
    lo, hi = 0.02 * mu, 0.999 * mu
    for k in range(n_s):
        s = lo * (hi / lo) ** (k / (n_s - 1))
        pts = _fl_tributary_path(s, params, n_pts)
        if len(pts) >= 2:
            paths.append(("FocalTributary", pts))
    for k in range(n_ul):
        r_exit = 0.9 * k / n_ul
        pts = []
        for j in range(n_pts):
            tau = _PI * j / (n_pts - 1)
            smp = universal.flowfield_sample(tau, params, r_exit)
            if smp.r >= 1.0 or smp.theta > _PI:
                break
            if smp.r >= mu and smp.theta > classical.barrier_theta(smp.r, params):
                break
            pts.append((smp.r, smp.theta))
        if len(pts) >= 2:
            paths.append(("UniversalTributary", pts))
    paths.append(("focal-line", [(params.eps_r, _PI), (mu, _PI)]))
    paths.append(("universal-line", [(0.0, 0.0), (1.0, 0.0)]))
    paths.append(("partition", [(0.0, 0.0), (mu * _PI, _PI)]))
    paths.append(("barrier", barrier))
    return paths


def cmd_flowfield(args: argparse.Namespace) -> int:
    params = _parse_mu(args.mu)
    paths = _flowfield_paths(args.game, params, args.s_grid, args.ul_grid, args.samples)
    if args.out.endswith(".svg"):
        body = []
        for cls, pts in paths:
            body.append(_polyline([polar_to_px(r, th) for r, th in pts], cls))
        text = _svg_document(body)
    else:
        buf = io.StringIO()
        buf.write("trajectory,kind,r,theta\n")
        for idx, (cls, pts) in enumerate(paths):
            for r, th in pts:
                buf.write(f"{idx},{cls},{_fmt(r)},{_fmt(th)}\n")
        text = buf.getvalue()
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 3
    return 0


def _trajectory_csv(traj) -> str:
    buf = io.StringIO()
    buf.write("t,r,theta,x_L,y_L,x_M,y_M,cos_psi,sin_psi,omega\n")
    cart = traj.cartesian()
    for k in range(len(traj.t)):
        xl, yl, xm, ym = cart[k]
        row = (
            traj.t[k], traj.r[k], traj.theta[k], xl, yl, xm, ym,
            traj.cos_psi[k], traj.sin_psi[k], traj.omega[k],
        )
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    for t, kind in traj.events:
        buf.write(f"# event,{_fmt(t)},{kind}\n")
    return buf.getvalue()


def _simulate_svg(traj) -> str:
    cart = traj.cartesian()
    lady = [cart_to_px(x, y) for x, y, _, _ in cart]
    man = [cart_to_px(xm, ym) for _, _, xm, ym in cart]
    cx, cy = cart_to_px(0.0, 0.0)
    rim, _ = cart_to_px(1.0, 0.0)
    body = [
        f'  <circle class="lake" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(rim - cx)}" />',
        _polyline(lady, "lady-path"),
        _polyline(man, "man-path"),
    ]
    for x, y in (lady[0], man[0]):
        body.append(
            f'  <circle class="start-marker" cx="{_fmt(x)}" cy="{_fmt(y)}" r="5" />'
        )
    return _svg_document(body)


def cmd_simulate(args: argparse.Namespace) -> int:
    params = _parse_mu(args.mu)
    state, _ = canonicalize(args.r0, args.theta0)
    lady = parse_strategy("lady", args.lady)
    man = parse_strategy("man", args.man)
    traj = simulate(state, lady, man, dt=args.dt, t_max=args.t_max, params=params)
    csv_text = _trajectory_csv(traj)
    try:
        if args.out is None:
            sys.stdout.write(csv_text)
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        if args.svg is not None:
            with open(args.svg, "w", encoding="utf-8") as fh:
                fh.write(_simulate_svg(traj))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    params = _parse_mu(args.mu)
    mu = params.mu
    hji = verify.hji_sweep(params, args.grid, args.grid)
    barrier = verify.barrier_sweep(params, 1000)
    starts = [
        PolarState(0.5 * mu, 2.8),
        PolarState(0.5 * mu, min(0.4, 0.8 * 0.5)),
        PolarState(min(1.5 * mu, 0.9), 2.0),
    ]
    saddle = []
    saddle_pass = True
    for st in starts:
        t_eq, rows = deviation_report(st, params, dt=args.dt)
        entry = {
            "r": st.r,
            "theta": st.theta,
            "t_eq": t_eq,
            "rows": [
                {
                    "side": row.side,
                    "label": row.label,
                    "time": row.time,
                    "margin": row.margin,
                    "outcome": row.outcome,
                }
                for row in rows
            ],
        }
        saddle.append(entry)
        saddle_pass &= all(row.margin >= -1e-3 for row in rows)
    report = {
        "mu": mu,
        "hji": {
            "max_abs_residual": hji.max_abs_residual,
            "worst_state": list(hji.worst_state) if hji.worst_state else None,
            "n_samples": hji.n_samples,
            "threshold": 1e-3,
            "pass": hji.max_abs_residual < 1e-3,
        },
        "barrier": {
            "max_abs_residual": barrier,
            "threshold": 1e-10,
            "pass": barrier < 1e-10,
        },
        "saddle": {"starts": saddle, "threshold": 1e-3, "pass": saddle_pass},
    }
    report["pass"] = (
        report["hji"]["pass"] and report["barrier"]["pass"] and saddle_pass
    )
    print(json.dumps(report, indent=2))
    return 0 if report["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ladylake",
        description="Lady-in-the-lake differential game solver",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="equilibrium controls and value at a state")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--omega-now", type=float, default=1.0,
                   help="M's current turn rate (used only on the focal line)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("flowfield", help="equilibrium flowfield figure or CSV")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--game", choices=("classical", "time"), default="time")
    p.add_argument("--s-grid", type=int, default=20)
    p.add_argument("--ul-grid", type=int, default=10)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--out", required=True, help=".svg or .csv path")
    p.set_defaults(func=cmd_flowfield)

    p = sub.add_parser("simulate", help="closed-loop simulation to CSV/SVG")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--lady", default="eq",
                   help="eq | fixed:C,S | perturbed:D")
    p.add_argument("--man", default="eq",
                   help="eq | constant:W | switching:T")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--svg", default=None, help="optional Cartesian SVG path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run verification sweeps, emit JSON report")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("critical-mu", help="critical speed ratio")
    p.set_defaults(func=cmd_critical_mu)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except LakeGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
