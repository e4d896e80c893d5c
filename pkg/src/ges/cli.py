"""The `ges` command-line driver.

One reproducible entry point over the library: omega approximations,
attraction diagnostics, invariant suites, the spectral-flow analysis
actions, uniform (symbol-family) runs, and invariance checks.  All
outputs are deterministic functions of the configuration and the seed:
JSON is written with sorted keys and schema version 1, CSV columns are
fixed, floats are printed in shortest round-trip form, and the worker
count never changes results (order-preserving reductions only).

Exit codes:
    0   converged / attracts / suite passed / matches expectations
    1   verify suite violation (also: an analysis action found one)
    2   inconclusive or not converged
    3   fails where the system registry expected an attractor
    64  usage errors (unknown system/suite, bad flags, bad config)
    65  malformed forcing description
    70  numerical blow-up during integration
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import BlowUpError, ForcingFormatError, UnsupportedError, UsageError
from .evolution import energy_inequality_check
from .omega import (AttractionReport, OmegaApprox, PullbackSchedule,
                    attraction_diagnostic, invariance_check, omega_pullback)
from .symbols import SymbolFamily, union_inclusion_check
from .systems import SYSTEM_IDS, make_system
from .systems.heat import band_witness
from .systems.nse import LAMBDA_1, ForcingProfile, absorbing_entry_time
from .util import fmt_float
from .verify import SUITES, invariance_plan, report_lines, run_suite

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INCONCLUSIVE = 2
EXIT_FAILS_EXPECTED = 3
EXIT_USAGE = 64
EXIT_FORCING = 65
EXIT_BLOWUP = 70


@dataclass
class ExperimentConfig:
    """Run parameters shared by the experiment subcommands."""

    system: str = "heat"
    metric: str = "weak"
    t0: float = 0.0
    delta: float = 1.0
    rho: float = 1.6
    n: int = 16
    eps_net: float = 0.05
    tol: float = 1e-3
    n_seeds: int = 24
    branches: str = "all"
    seed: int = 0
    out: str = "."
    threads: int | None = None

    def __post_init__(self):
        if self.eps_net <= 0 or self.tol <= 0 or self.delta <= 0:
            raise UsageError("tolerances and schedule spacing must be positive")
        if self.n < 3:
            raise UsageError("a schedule needs at least three tiers")
        if self.rho <= 1:
            raise UsageError("geometric ratio must exceed 1")
        if self.metric not in ("strong", "weak"):
            raise UsageError(f"unknown metric {self.metric!r}")

    @classmethod
    def build(cls, args: argparse.Namespace) -> "ExperimentConfig":
        """CLI flags override config-file values override defaults."""
        file_vals = {}
        if getattr(args, "config", None):
            try:
                file_vals = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config file: {exc}") from exc
            if not isinstance(file_vals, dict):
                raise UsageError("config file must hold a JSON object")
        kw = {}
        for f in fields(cls):
            cli_val = getattr(args, f.name, None)
            if cli_val is not None:
                kw[f.name] = cli_val
            elif f.name in file_vals:
                kw[f.name] = file_vals[f.name]
        # system-aware schedule defaults: the spectral flow is integrated
        # numerically, so an unasked-for 16-tier geometric schedule would
        # run for hours; everything else is closed-form and stays deep
        if kw.get("system") == "nse":
            kw.setdefault("n", 6)
            kw.setdefault("n_seeds", 6)
        cfg = cls(**kw)
        return cfg

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def schedule(self) -> PullbackSchedule:
        return PullbackSchedule.geometric(self.t0, self.delta, self.rho, self.n)


def _write(out_dir: str, name: str, text: str) -> Path:
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _profile_tail(values: np.ndarray) -> np.ndarray:
    return values[-max(2, values.size // 2):]


def _omega_exit(om: OmegaApprox, expected_attractor: bool, tol: float) -> int:
    if om.converged:
        return EXIT_OK
    vals = om.profile_values()
    half = _profile_tail(vals)
    # demonstrated failure = the survivor set is empty, or the profile
    # actually grows over its last half; a plateau above tol (a net
    # resolution floor) stays inconclusive
    growing = (np.all(np.isfinite(half))
               and half[-1] >= max(2.0 * half[0], 2.0 * tol))
    if (growing or not om.points) and expected_attractor:
        return EXIT_FAILS_EXPECTED
    return EXIT_INCONCLUSIVE


def _attract_exit(rep: AttractionReport, expected_attractor: bool) -> int:
    if rep.verdict == "attracts":
        return EXIT_OK
    if rep.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_FAILS_EXPECTED if expected_attractor else EXIT_OK


# ---------------------------------------------------------------------------
# subcommands


def cmd_omega(args) -> int:
    cfg = ExperimentConfig.build(args)
    fam = make_system(cfg.system)
    om = omega_pullback(fam, cfg.schedule(), n_seeds=cfg.n_seeds,
                        metric=cfg.metric, eps_net=cfg.eps_net, tol=cfg.tol,
                        rng=cfg.rng(), branches=cfg.branches,
                        workers=cfg.threads)
    jp = _write(cfg.out, f"omega_{cfg.system}_{cfg.metric}.json", om.to_json())
    cp = _write(cfg.out, f"profile_{cfg.system}_{cfg.metric}.csv",
                om.profile_csv())
    final = om.profile[-1][1] if om.profile else float("nan")
    print(f"omega {cfg.system} {cfg.metric}: converged={om.converged} "
          f"points={len(om.points)} final={fmt_float(final)}"
          + (f" note={om.note!r}" if om.note else ""))
    print(f"wrote {jp} and {cp}")
    expected = bool(fam.expectations.get(f"{cfg.metric}_attractor", False))
    return _omega_exit(om, expected, cfg.tol)


def cmd_attract(args) -> int:
    cfg = ExperimentConfig.build(args)
    fam = make_system(cfg.system)
    sched = cfg.schedule()
    if args.target == "zero":
        target = [fam.space.zero_state()]
    else:  # "omega"
        target = omega_pullback(fam, sched, n_seeds=cfg.n_seeds,
                                metric=cfg.metric, eps_net=cfg.eps_net,
                                tol=cfg.tol, rng=cfg.rng(),
                                branches=cfg.branches,
                                workers=cfg.threads).points
        if not target:
            print("omega approximation is empty; nothing to attract to")
            return EXIT_INCONCLUSIVE
    seeds = None
    if args.witness:
        if cfg.system != "heat":
            raise UsageError("--witness seeds exist for the heat system only")
        seeds = lambda s: [band_witness(fam.space, sched.t, s)[1]]
    rep = attraction_diagnostic(fam, sched, target, seeds=seeds,
                                n_seeds=cfg.n_seeds, metric=cfg.metric,
                                tol=cfg.tol, rng=cfg.rng(),
                                branches=cfg.branches, workers=cfg.threads)
    jp = _write(cfg.out, f"attract_{cfg.system}_{cfg.metric}.json",
                rep.to_json())
    cp = _write(cfg.out, f"attract_{cfg.system}_{cfg.metric}.csv",
                rep.profile_csv())
    print(f"attract {cfg.system} {cfg.metric} -> {args.target}: {rep.verdict} "
          f"final={fmt_float(rep.profile[-1][1])}")
    print(f"wrote {jp} and {cp}")
    expected = bool(fam.expectations.get(f"{cfg.metric}_attractor", False))
    return _attract_exit(rep, expected)


def cmd_verify(args) -> int:
    cfg = ExperimentConfig.build(args)
    rep = run_suite(args.suite, seed=cfg.seed, workers=cfg.threads,
                    system=getattr(args, "system", None))
    jp = _write(cfg.out, f"verify_{args.suite}.json", rep.to_json())
    for line in report_lines(rep):
        print(line)
    print(f"wrote {jp}")
    return EXIT_OK if rep.verdict == "pass" else EXIT_VIOLATION


def cmd_nse(args) -> int:
    cfg = ExperimentConfig.build(args)
    forcing = (ForcingProfile.load(args.forcing) if args.forcing else None)
    fam = make_system("nse", nu=args.nu, kmax=args.kmax, forcing=forcing,
                      ball_convention=args.ball_convention)
    rng = cfg.rng()
    action = args.action

    if action == "info":
        eps_list = [0.25, 0.5, 1.0]
        normality = fam.forcing.normality_check(eps_list)
        entry = None
        radius = fam.absorbing_set_radius()
        if radius > 0.5:
            entry = absorbing_entry_time(radius, fam.nu)
        obj = {
            "schema": 1, "kind": "nse-info", "nu": fam.nu,
            "kmax": fam.basis.kmax, "retained_modes": int(fam.basis.m),
            "forcing": fam.forcing.to_dict(),
            "hermitian_forcing": fam.forcing.is_hermitian(),
            "l2b_bound": fam.l2b_bound, "absorbing_radius": fam.radius,
            "ball_convention": fam.ball_convention,
            "absorbing_norm_radius": radius,
            "entry_time_from_2R": entry,
            "normality": [[e, d] for e, d in normality],
        }
        jp = _write(cfg.out, "nse_info.json", json.dumps(obj, sort_keys=True))
        print(f"modes={fam.basis.m} l2b={fmt_float(fam.l2b_bound)} "
              f"R={fmt_float(fam.radius)}")
        for e, d in normality:
            print(f"normality eps={fmt_float(e)} delta={fmt_float(d)}")
        print(f"wrote {jp}")
        return EXIT_OK

    if action == "energy":
        x = fam.sample_states(1, rng)[0]
        traj = fam.energy_sample(0.0, x, 1.0, n=8001)
        eps, delta = fam.forcing.normality_check([0.25])[0]
        rep = energy_inequality_check(traj, nu=fam.nu, eps=eps, delta=delta,
                                      integral_tol=1e-6)
        lines = ["t,norm,vnorm_sq,force_pair"]
        for i in range(traj.times.size):
            lines.append(f"{fmt_float(traj.times[i])},{fmt_float(traj.norms[i])},"
                         f"{fmt_float(traj.vnorm_sq[i])},"
                         f"{fmt_float(traj.force_pair[i])}")
        cp = _write(cfg.out, "nse_energy.csv", "\n".join(lines) + "\n")
        obj = {"schema": 1, "kind": "nse-energy", "verdict": rep.verdict,
               "max_residual": rep.max_residual, "grid_spacing": rep.grid_spacing,
               "violations": len(rep.violations)}
        jp = _write(cfg.out, "nse_energy.json", json.dumps(obj, sort_keys=True))
        print(f"energy balance: {rep.verdict} "
              f"max_residual={fmt_float(rep.max_residual)}")
        print(f"wrote {jp} and {cp}")
        return EXIT_OK if rep.verdict == "holds" else EXIT_VIOLATION

    if action == "absorbing":
        radius = fam.absorbing_set_radius()
        horizon = (absorbing_entry_time(radius, fam.nu) + 1.0
                   if radius > 0.5 else 3.0)
        grid = np.linspace(0.0, horizon, 41)
        seeds = fam.sample_states(cfg.n_seeds if cfg.n_seeds <= 8 else 5, rng,
                                  radius=2.0 * radius if radius > 0 else None)
        bound_const = fam.l2b_bound / (fam.nu * (1.0 - np.exp(-fam.nu * LAMBDA_1)))
        lines = ["t,seed,norm"]
        worst = -np.inf
        for i, x in enumerate(seeds):
            states = fam.evolve(0.0, x, list(grid))
            norms = np.array([fam.space.strong_norm(u) for u in states])
            for tv, nv in zip(grid, norms):
                lines.append(f"{fmt_float(tv)},{i},{fmt_float(nv)}")
            sq = norms ** 2
            for a in range(grid.size):
                decay = sq[a] * np.exp(-fam.nu * LAMBDA_1 * (grid[a:] - grid[a]))
                worst = max(worst, float((sq[a:] - decay - bound_const).max()))
        cp = _write(cfg.out, "nse_absorbing.csv", "\n".join(lines) + "\n")
        ok = worst <= 1e-6
        obj = {"schema": 1, "kind": "nse-absorbing", "seeds": len(seeds),
               "horizon": float(horizon), "max_violation": worst,
               "verdict": "holds" if ok else "violated"}
        jp = _write(cfg.out, "nse_absorbing.json", json.dumps(obj, sort_keys=True))
        print(f"absorbing inequality: {'holds' if ok else 'violated'} "
              f"max_violation={fmt_float(worst)}")
        print(f"wrote {jp} and {cp}")
        return EXIT_OK if ok else EXIT_VIOLATION

    # action == "omega"
    om = omega_pullback(fam, cfg.schedule(), n_seeds=cfg.n_seeds,
                        metric=cfg.metric, eps_net=cfg.eps_net, tol=cfg.tol,
                        rng=rng, workers=cfg.threads)
    jp = _write(cfg.out, f"omega_nse_{cfg.metric}.json", om.to_json())
    cp = _write(cfg.out, f"profile_nse_{cfg.metric}.csv", om.profile_csv())
    final = om.profile[-1][1] if om.profile else float("nan")
    print(f"omega nse {cfg.metric}: converged={om.converged} "
          f"points={len(om.points)} final={fmt_float(final)}")
    print(f"wrote {jp} and {cp}")
    return _omega_exit(om, True, cfg.tol)


def cmd_uniform(args) -> int:
    cfg = ExperimentConfig.build(args)
    if args.family:
        try:
            family_obj = json.loads(Path(args.family).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read family config: {exc}") from exc
        symfam = SymbolFamily.from_config(family_obj)
    else:
        base = cfg.system if cfg.system != "heat" else "forced-scalar"
        symfam = SymbolFamily.phase_family(base, count=args.count)
    base_fam = symfam.system(symfam.symbols[0])
    if symfam.base_id == "forced-scalar":
        seeds = [base_fam.space.state([0], [v])
                 for v in np.linspace(-1.5, 1.5, cfg.n_seeds)]
    else:
        seeds = base_fam.sample_states(min(cfg.n_seeds, 6), cfg.rng())
    rep = union_inclusion_check(symfam, seeds, t0=cfg.t0,
                                schedule=cfg.schedule(), metric=cfg.metric,
                                eps_net=cfg.eps_net, tol=cfg.tol,
                                workers=cfg.threads)
    obj = {
        "schema": 1, "kind": "uniform-inclusion", "base": symfam.base_id,
        "symbols": len(symfam.symbols), "t0": rep.t0, "metric": rep.metric,
        "eps_net": rep.eps_net, "union_in_uniform": rep.union_in_uniform,
        "uniform_in_union": rep.uniform_in_union, "threshold": rep.threshold,
        "closed_sample": rep.closed_sample, "all_converged": rep.all_converged,
        "equal": rep.equal, "verdict": rep.verdict, "note": rep.note,
    }
    jp = _write(cfg.out, f"uniform_{symfam.base_id}.json",
                json.dumps(obj, sort_keys=True))
    print(f"uniform {symfam.base_id} ({len(symfam.symbols)} symbols): "
          f"{rep.verdict} union_in_uniform={fmt_float(rep.union_in_uniform)} "
          f"reverse={fmt_float(rep.uniform_in_union)} equal={rep.equal}")
    print(f"wrote {jp}")
    if rep.verdict == "included":
        return EXIT_OK
    if rep.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_FAILS_EXPECTED


def cmd_invariance(args) -> int:
    cfg = ExperimentConfig.build(args)
    fam = make_system(cfg.system)
    rng = cfg.rng()
    rows = invariance_plan(fam, rng)
    want_for = {"semi": "semi-invariant", "quasi": "quasi-invariant",
                "full": "invariant"}
    name, family, kind, want, labels = rows[0]
    if args.kind:
        kind, want = args.kind, want_for[args.kind]
        if cfg.system == "bump" and kind != "semi":
            # quasi needs the threading labels from the canonical plan
            name, family, _, _, labels = rows[-1]
            want = want_for[kind]
    depth = 10.0 if cfg.system == "nse" else 40.0
    budget = 8 if cfg.system == "nse" else 24
    rep = invariance_check(fam, family, kind=kind, window=(0.0, 2.0),
                           tol=max(cfg.tol, 0.05), labels=labels,
                           pull_depth=depth, budget=budget, rng=cfg.rng(),
                           workers=cfg.threads)
    jp = _write(cfg.out, f"invariance_{cfg.system}_{kind}.json", rep.to_json())
    print(f"invariance {cfg.system} {kind}: {rep.verdict}")
    print(f"wrote {jp}")
    if rep.verdict == want:
        return EXIT_OK
    if rep.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_FAILS_EXPECTED


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); route to 64
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--out", help="output directory (default: current)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--tol", type=float, help="convergence tolerance")
    p.add_argument("--threads", type=int, help="worker count (or GES_THREADS)")


def _add_experiment(p: argparse.ArgumentParser, with_system=True) -> None:
    _add_common(p)
    if with_system:
        p.add_argument("--system", choices=SYSTEM_IDS, help="model system id")
    p.add_argument("--metric", choices=("strong", "weak"))
    p.add_argument("--t0", type=float, help="evaluation time")
    p.add_argument("--delta", type=float, help="schedule base spacing")
    p.add_argument("--rho", type=float, help="schedule geometric ratio")
    p.add_argument("--n", type=int, help="schedule tier count")
    p.add_argument("--eps-net", dest="eps_net", type=float,
                   help="net resolution")
    p.add_argument("--n-seeds", dest="n_seeds", type=int,
                   help="ensemble seed count")
    p.add_argument("--branches", choices=("all", "first"))


def build_parser() -> _Parser:
    top = _Parser(prog="ges", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("omega", help="pullback omega approximation",
                       description="Approximate the pullback omega-limit of "
                                   "a seed ensemble and write JSON + CSV.")
    _add_experiment(p)
    p.set_defaults(fn=cmd_omega)

    p = sub.add_parser("attract", help="attraction diagnostic")
    _add_experiment(p)
    p.add_argument("--target", choices=("zero", "omega"), default="zero")
    p.add_argument("--witness", action="store_true",
                   help="use depth-dependent band witnesses (heat only)")
    p.set_defaults(fn=cmd_attract)

    p = sub.add_parser("verify", help="run a named invariant suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--system", choices=SYSTEM_IDS,
                   help="restrict the suite to one system")
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("nse", help="spectral-flow analysis actions")
    p.add_argument("action", choices=("info", "energy", "absorbing", "omega"))
    p.add_argument("--forcing", help="forcing description JSON file")
    p.add_argument("--nu", type=float, default=1.0, help="viscosity")
    p.add_argument("--kmax", type=int, default=4, help="Galerkin cutoff")
    p.add_argument("--ball-convention", choices=("radius", "norm-squared"),
                   default="radius", dest="ball_convention")
    _add_experiment(p, with_system=False)
    p.set_defaults(fn=cmd_nse, system="nse")

    p = sub.add_parser("uniform", help="symbol-family uniform omega runs")
    _add_experiment(p)
    p.add_argument("--family", help="symbol family config JSON file")
    p.add_argument("--count", type=int, default=32,
                   help="phase sample count when --family is not given")
    p.set_defaults(fn=cmd_uniform)

    p = sub.add_parser("invariance", help="invariance of the canonical family")
    _add_experiment(p)
    p.add_argument("--kind", choices=("semi", "quasi", "full"))
    p.set_defaults(fn=cmd_invariance)
    return top


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ForcingFormatError as exc:
        print(f"forcing error: {exc}", file=sys.stderr)
        return EXIT_FORCING
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
