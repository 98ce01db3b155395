"""Command-line front end.

Subcommands render phase-portrait data, separatrices, the collision
orbit, the asymptotic action-angle chart, secular averages, the
verification suites, two-centre trajectories and the three-body
experiment, writing CSV and JSON files.  Output is deterministic for a
fixed configuration; files are written atomically (temp + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dynamics, portrait, secular, verify
from .errors import DomainError
from .kepler import MassParams

_FMT = "%.17g"


def _max_threads() -> int:
    env = os.environ.get("EULER_LIB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_FMT % float(v) for v in row))
    return "\n".join(lines) + "\n"


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_config(args) -> None:
    """Overlay values from a JSON config file; explicit flags win."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        cfg = json.load(fh)
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and attr in args._defaulted:
            setattr(args, attr, value)


class _TrackDefaults(argparse.ArgumentParser):
    """Records which args kept their defaults, so config files can fill them."""

    def parse_args(self, *a, **kw):
        ns = super().parse_args(*a, **kw)
        defaulted = set()
        for action in self._get_all_actions():
            if action.dest != "help" and getattr(ns, action.dest, None) == action.default:
                defaulted.add(action.dest)
        ns._defaulted = defaulted
        return ns

    def _get_all_actions(self):
        out = list(self._actions)
        for action in self._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    out.extend(sub._actions)
        return out


def _masses_from(args) -> MassParams:
    return MassParams(m=args.mass_m, M=args.mass_M, Mprime=args.mass_Mprime,
                      m0=args.mass_m0)


def _add_mass_flags(p):
    p.add_argument("--mass-m", type=float, default=0.5)
    p.add_argument("--mass-M", type=float, default=2.0)
    p.add_argument("--mass-Mprime", type=float, default=2.0)
    p.add_argument("--mass-m0", type=float, default=1.0)


def cmd_portrait(args) -> int:
    out = Path(args.out)
    delta = args.delta
    lo, hi = portrait.admissible_range(delta)
    if args.levels == "auto":
        interior = np.linspace(lo, hi, args.n_levels + 2)[1:-1]
        levels = list(interior)
    else:
        levels = [float(tok) for tok in args.levels.split(",")]
    manifest = {"delta": delta, "admissible_range": [lo, hi],
                "levels": {}, "s0_exists": delta < 2.0}

    cps = [
        {"gbar": c.gbar, "Ghat": c.Ghat, "value": c.value, "kind": c.kind,
         "note": c.note}
        for c in portrait.critical_points(delta)
    ]
    _write_json(out / "critical_points.json", {"delta": delta, "points": cps})

    def one_level(ehat):
        label = portrait.classify_regime(delta, ehat)
        _, _, gmin, gmax = portrait.g_roots(ehat, delta)
        rows = []
        for G in np.linspace(gmin, gmax, args.n_samples):
            try:
                gp, gm = portrait.level_branch(ehat, delta, G)
            except DomainError:
                continue
            rows.append((gp, G, 1, ehat))
            rows.append((gm, G, -1, ehat))
            rows.append((gp, -G, 1, ehat))
            rows.append((gm, -G, -1, ehat))
        return label, rows

    failures = {}
    with ThreadPoolExecutor(max_workers=_max_threads()) as pool:
        jobs = {}
        for ehat in levels:
            try:
                portrait.PortraitSpec(delta, ehat)
            except DomainError as exc:
                failures[f"{ehat:.6g}"] = str(exc)
                continue
            jobs[ehat] = pool.submit(one_level, ehat)
        for i, (ehat, job) in enumerate(jobs.items()):
            label, rows = job.result()
            name = f"level_{i:03d}.csv"
            _atomic_write(out / name,
                          _csv(["gbar", "Ghat", "branch", "ehat"], rows))
            manifest["levels"][name] = {"ehat": ehat, "regime": label.tag,
                                        "curve": label.curve, "note": label.note}
    sep = portrait.separatrices(delta, args.n_samples)
    if sep.s0 is not None:
        _atomic_write(out / "S0.csv", _csv(["gbar", "Ghat"], sep.s0))
    s1 = np.concatenate([sep.s1_horizontal, sep.s1_vertical])
    _atomic_write(out / "S1.csv", _csv(["gbar", "Ghat"], s1))
    manifest["errors"] = failures
    _write_json(out / "manifest.json", manifest)
    print(f"portrait: wrote {len(manifest['levels'])} levels to {out}")
    if failures:
        for lvl, msg in failures.items():
            print(f"  level {lvl}: {msg}", file=sys.stderr)
    return 0


def cmd_separatrix(args) -> int:
    out = Path(args.out)
    sep = portrait.separatrices(args.delta, args.n_samples)
    if sep.s0 is not None:
        _atomic_write(out / "S0.csv", _csv(["gbar", "Ghat"], sep.s0))
    else:
        print("separatrix: S0 absent (delta >= 2)")
    s1 = np.concatenate([sep.s1_horizontal, sep.s1_vertical])
    _atomic_write(out / "S1.csv", _csv(["gbar", "Ghat"], s1))
    print(f"separatrix: wrote curves for delta={args.delta} to {out}")
    return 0


def cmd_collision_orbit(args) -> int:
    sigma = math.sqrt(args.delta * (2.0 - args.delta))
    span = args.span / (sigma * args.L)
    ts = np.linspace(args.t0 - span, args.t0 + span, args.n_samples)
    G, gb = portrait.collision_orbit(args.delta, args.L, ts, t0=args.t0,
                                     branch_sign=args.branch)
    rows = np.column_stack([ts, G, gb])
    _atomic_write(Path(args.out), _csv(["t", "G", "gbar"], rows))
    print(f"collision-orbit: wrote {len(ts)} samples to {args.out}")
    return 0


def cmd_action_angle(args) -> int:
    Gcal = portrait.aa_action(args.Lcal, args.Ecal)
    rows = []
    for gamma in np.linspace(0.0, 2.0 * math.pi, args.n_samples, endpoint=False):
        L, G, ell, gbar = portrait.aa_transform(args.Lcal, Gcal, args.lam, gamma)
        rows.append((gamma, L, G, ell, gbar))
    _atomic_write(Path(args.out),
                  _csv(["gamma", "L", "G", "ell", "gbar"], rows))
    print(f"action-angle: Gcal={_FMT % Gcal}; wrote {args.out}")
    return 0


def cmd_average(args) -> int:
    masses = _masses_from(args)
    q = secular.QuadratureSpec(nodes=args.nodes, tol=args.tol)
    U = secular.average_potential(args.r, args.L, args.Theta, args.G,
                                  args.gbar, masses, q)
    from .hamiltonians import e0_in_k
    e0 = e0_in_k(args.L, args.G, args.Theta, args.r, args.gbar, masses)
    result = {"U": U, "E0": e0}
    if args.Theta ** 2 <= e0 <= args.L ** 2:
        Ecal, Ical = secular.ei_params(args.L, args.Theta, e0)
        a = args.L ** 2 / (masses.m ** 2 * masses.M)
        F = secular.f_tilde(args.r, a, Ecal, Ical, q)
        result.update({"Ecal": Ecal, "Ical": Ical, "f_tilde": F,
                       "identity_residual": masses.m * masses.Mprime * F + U})
    if args.out:
        _write_json(Path(args.out), result)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    names = [args.suite] if args.suite else None
    results = verify.run_suites(names=names, points=args.points, seed=args.seed)
    report = {"suites": [r.to_dict() for r in results],
              "passed": all(r.passed for r in results)}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.json and args.json != "-":
        _atomic_write(Path(args.json), text)
    else:
        sys.stdout.write(text)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.name}: {status} (residual {r.residual:.3e} < {r.threshold:g})",
              file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_integrate_2c(args) -> int:
    masses = _masses_from(args)
    cfg = dynamics.IntegratorConfig(rel_tol=args.rtol, abs_tol=args.atol,
                                    t_end=args.t_end, sample_dt=args.sample_dt)
    y0 = [args.L, args.ell, args.G, args.gbar, args.Theta, args.theta,
          args.R, args.r]
    res = dynamics.integrate("two_centre", y0, masses, cfg)
    rows = np.column_stack([res.t, res.states, res.diagnostics["H"],
                            res.diagnostics["E"]])
    header = ["t", *res.fields, "J", "E"]
    _atomic_write(Path(args.out), _csv(header, rows))
    print(f"integrate-2c: {res.reason}; wrote {len(res.t)} samples to {args.out}")
    return 0


def cmd_experiment(args) -> int:
    out = Path(args.out)
    initial = dynamics.EXPERIMENT_INITIAL
    if args.C != initial.C:
        initial = dynamics.ThreeBodyState(R=initial.R, r=initial.r,
                                          L=initial.L, ell=initial.ell,
                                          G=initial.G, gbar=initial.gbar,
                                          C=args.C)
    cfg = dynamics.IntegratorConfig(rel_tol=args.rtol, abs_tol=args.atol,
                                    t_end=args.t_end, sample_dt=args.sample_dt)
    res, summary = dynamics.run_paper_experiment(cfg, initial=initial)
    idx = {name: i for i, name in enumerate(res.fields)}
    L = res.states[:, idx["L"]]
    G = res.states[:, idx["G"]]
    gb = res.states[:, idx["gbar"]]
    rr = res.states[:, idx["r"]]
    masses = dynamics.EXPERIMENT_MASSES
    a = L ** 2 / (masses.m ** 2 * masses.M)
    e0hat = (G / L) ** 2 + (rr / a) * np.sqrt(1 - (G / L) ** 2) * np.cos(gb)
    if args.project:
        cols = {"g-G": (gb, G, ["gbar", "G"]),
                "l-L": (res.states[:, idx["ell"]], L, ["ell", "L"]),
                "r-R": (rr, res.states[:, idx["R"]], ["r", "R"])}
        x, y, header = cols[args.project]
        _atomic_write(out, _csv(header, np.column_stack([x, y])))
        print(f"experiment: wrote projection {args.project} to {out}")
        return 0
    rows = np.column_stack([res.t, res.states[:, idx["R"]], rr, L,
                            res.states[:, idx["ell"]], G, gb,
                            res.diagnostics["H"], e0hat])
    _atomic_write(out, _csv(["t", "R", "r", "L", "ell", "G", "gbar", "H",
                             "E0hat"], rows))
    _write_json(out.with_suffix(".summary.json"), {
        "a": summary.a, "delta": summary.delta,
        "equilibrium_r": summary.equilibrium_r,
        "energy_drift": summary.energy_drift,
        "r": {"min": summary.r_min, "mean": summary.r_mean,
              "max": summary.r_max},
        "gbar_range": [summary.gbar_min, summary.gbar_max],
        "reason": summary.reason,
    })
    print(f"experiment: {summary.reason}; drift {summary.energy_drift:.3e}; "
          f"wrote {out}")
    return 0


def build_parser() -> _TrackDefaults:
    p = _TrackDefaults(prog="twocentre",
                       description="Two-centre problem numerics in K-coordinates")
    p.add_argument("--config", help="JSON config file; explicit flags win")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("portrait", help="level curves of the planar portrait")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--levels", default="auto",
                   help="'auto' or comma-separated level values")
    q.add_argument("--n-levels", type=int, default=9)
    q.add_argument("--n-samples", type=int, default=200)
    q.add_argument("--out", default="portrait_out")
    q.set_defaults(func=cmd_portrait)

    q = sub.add_parser("separatrix", help="S0/S1 separatrix curves")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--n-samples", type=int, default=400)
    q.add_argument("--out", default="separatrix_out")
    q.set_defaults(func=cmd_separatrix)

    q = sub.add_parser("collision-orbit", help="closed-form S0 motion")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--L", type=float, default=1.0)
    q.add_argument("--t0", type=float, default=0.0)
    q.add_argument("--span", type=float, default=5.0,
                   help="half-width in units of 1/(sigma*L)")
    q.add_argument("--branch", type=int, choices=(1, -1), default=1)
    q.add_argument("--n-samples", type=int, default=1001)
    q.add_argument("--out", default="collision_orbit.csv")
    q.set_defaults(func=cmd_collision_orbit)

    q = sub.add_parser("action-angle", help="asymptotic action-angle chart")
    q.add_argument("--Lcal", type=float, default=1.0)
    q.add_argument("--Ecal", type=float, required=True)
    q.add_argument("--lam", type=float, default=0.0)
    q.add_argument("--n-samples", type=int, default=256)
    q.add_argument("--out", default="action_angle.csv")
    q.set_defaults(func=cmd_action_angle)

    q = sub.add_parser("average", help="secular average and kernel identity")
    q.add_argument("--r", type=float, required=True)
    q.add_argument("--L", type=float, required=True)
    q.add_argument("--G", type=float, required=True)
    q.add_argument("--Theta", type=float, default=0.0)
    q.add_argument("--gbar", type=float, default=0.0)
    q.add_argument("--nodes", type=int, default=64)
    q.add_argument("--tol", type=float, default=1e-13)
    q.add_argument("--out", default="")
    _add_mass_flags(q)
    q.set_defaults(func=cmd_average)

    q = sub.add_parser("verify", help="run the invariant suites")
    q.add_argument("--suite", choices=sorted(verify.ALL_SUITES))
    q.add_argument("--points", type=int)
    q.add_argument("--seed", type=int)
    q.add_argument("--json", help="report path, or '-' for stdout")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("integrate-2c", help="two-centre trajectory")
    q.add_argument("--L", type=float, default=1.0)
    q.add_argument("--ell", type=float, default=0.0)
    q.add_argument("--G", type=float, default=0.7)
    q.add_argument("--gbar", type=float, default=0.0)
    q.add_argument("--Theta", type=float, default=0.0)
    q.add_argument("--theta", type=float, default=0.0)
    q.add_argument("--R", type=float, default=0.0)
    q.add_argument("--r", type=float, default=3.0)
    q.add_argument("--t-end", type=float, default=10.0)
    q.add_argument("--sample-dt", type=float, default=0.05)
    q.add_argument("--rtol", type=float, default=1e-12)
    q.add_argument("--atol", type=float, default=1e-12)
    q.add_argument("--out", default="two_centre.csv")
    _add_mass_flags(q)
    q.set_defaults(func=cmd_integrate_2c)

    q = sub.add_parser("experiment", help="the three-body experiment")
    q.add_argument("--C", type=float, default=dynamics.EXPERIMENT_INITIAL.C)
    q.add_argument("--t-end", type=float, default=0.5)
    q.add_argument("--sample-dt", type=float, default=2e-4)
    q.add_argument("--rtol", type=float, default=1e-13)
    q.add_argument("--atol", type=float, default=1e-13)
    q.add_argument("--project", choices=("g-G", "l-L", "r-R"))
    q.add_argument("--out", default="experiment.csv")
    q.set_defaults(func=cmd_experiment)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _load_config(args)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
