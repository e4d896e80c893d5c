"""Named invariant suites behind `ges verify`.

Each suite re-checks a package-level contract on freshly generated,
seed-deterministic data and reports machine-readable results.  Suites
are intentionally small: the heavyweight sweeps live in the test suite,
while these runs are the quick reproducible health checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .evolution import TrajectorySample, compose_check, energy_inequality_check
from .omega import PullbackSchedule, invariance_check, tracking_check
from .space import DualMetricSpace, epsilon_net
from .symbols import SymbolFamily, union_inclusion_check
from .systems import make_system
from .systems.bump import bump_state
from .systems.heat import high_band_seed
from .util import fmt_float

SUITES = ("metrics", "inclusion", "energy", "invariance", "tracking",
          "uniform", "all")


@dataclass
class CheckResult:
    name: str
    ok: bool
    info: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    results: list[CheckResult]
    verdict: str  # "pass" | "fail"

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1,
            "kind": "verify",
            "suite": self.suite,
            "seed": self.seed,
            "verdict": self.verdict,
            "results": [{"name": r.name, "ok": r.ok, "info": r.info}
                        for r in self.results],
        }, sort_keys=True)


def _lattice_space() -> DualMetricSpace:
    return DualMetricSpace(tag="verify-lattice", index_dim=1,
                           truncation_radius=32, ball_radius=None)


def _sparse_states(space: DualMetricSpace, rng: np.random.Generator, count: int):
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        idx = rng.choice(np.arange(-20, 21), size=n, replace=False)
        out.append(space.state(np.sort(idx), rng.normal(size=n)))
    return out


def suite_metrics(seed: int, workers: int | None = None) -> list[CheckResult]:
    space = _lattice_space()
    rng = np.random.default_rng(seed)
    res = []

    def unit(k: int):
        return space.state([k], [1.0])

    zero = space.zero_state()
    worked = {
        "weak e0 vs 0": (space.weak_dist(unit(0), zero), 0.5),
        "weak e3 vs 0": (space.weak_dist(unit(3), zero), 0.0625),
        "weak e5 vs 0": (space.weak_dist(unit(5), zero), 0.015625),
        "weak e9 vs 0": (space.weak_dist(unit(9), zero), 0.0009765625),
        "strong e0 vs e1": (space.strong_dist(unit(0), unit(1)), math.sqrt(2.0)),
    }
    for name, (got, want) in worked.items():
        res.append(CheckResult(name, abs(got - want) <= 1e-12,
                               {"got": got, "want": want}))

    states = _sparse_states(space, rng, 24)
    sym = tri = ident = ctrl = 0.0
    for i, a in enumerate(states):
        ident = max(ident, space.weak_dist(a, a), space.strong_dist(a, a))
        for b in states[i + 1:]:
            dw, dwr = space.weak_dist(a, b), space.weak_dist(b, a)
            sym = max(sym, abs(dw - dwr))
            ctrl = max(ctrl, dw - 3.0 * space.strong_dist(a, b))
    for a, b, c in zip(states[:8], states[8:16], states[16:24]):
        for m in ("strong", "weak"):
            tri = max(tri, space.dist(a, c, m)
                      - space.dist(a, b, m) - space.dist(b, c, m))
    res.append(CheckResult("identity", ident == 0.0, {"max": ident}))
    res.append(CheckResult("symmetry", sym == 0.0, {"max": sym}))
    res.append(CheckResult("triangle", tri <= 1e-12, {"max_violation": tri}))
    res.append(CheckResult("strong controls weak (x3)", ctrl <= 1e-12,
                           {"max_excess": ctrl}))

    small = space.with_truncation(8)
    tail = small.weak_tail_bound()
    worst = 0.0
    for a, b in zip(states[:8], states[8:16]):
        worst = max(worst, abs(small.weak_dist(a, b) - space.weak_dist(a, b)))
    res.append(CheckResult("truncation honesty", worst <= tail,
                           {"max_gap": worst, "tail_bound": tail}))

    net = epsilon_net(space, [zero, unit(9)], 0.01, "weak")
    res.append(CheckResult("net absorbs weak-tiny point", len(net) == 1,
                           {"kept": len(net)}))
    return res


def suite_inclusion(seed: int, workers: int | None = None,
                    system: str | None = None) -> list[CheckResult]:
    plans = [("single", 25, 1e-6), ("bump", 25, 1e-6), ("heat", 25, 1e-6),
             ("branch2", 25, 1e-6), ("forced-scalar", 25, 1e-6),
             ("nse", 2, 1e-5)]
    if system is not None:
        plans = [p for p in plans if p[0] == system]
        if not plans:
            raise UsageError(
                f"no composition contract registered for system {system!r}")
    res = []
    for sys_id, draws, tol in plans:
        fam = make_system(sys_id)
        rng = np.random.default_rng(seed)
        span = 1.5 if sys_id == "nse" else 20.0
        worst = 0.0
        for _ in range(draws):
            r, s, t = np.sort(rng.uniform(-span, 0.0, size=3))
            seeds = fam.sample_states(2, rng)
            worst = max(worst, compose_check(fam, seeds, r, s, t))
        res.append(CheckResult(f"compose {sys_id}", worst <= tol,
                               {"draws": draws, "max_semidist": worst,
                                "tol": tol}))
    return res


def suite_energy(seed: int, workers: int | None = None,
                 system: str | None = None) -> list[CheckResult]:
    res = []
    if system in (None, "heat"):
        fam = make_system("heat")
        rng = np.random.default_rng(seed)
        grid = np.arange(-5.0, 0.01, 0.25)
        worst = -math.inf
        for x in fam.sample_states(10, rng):
            states = fam.evolve(-5.0, x, grid)
            traj = TrajectorySample.from_states(fam.space, grid, states)
            rep = energy_inequality_check(traj, eps=1e-12, delta=2.0)
            worst = max(worst, rep.max_residual)
            if rep.verdict != "holds":
                res.append(CheckResult("heat norm decay", False,
                                       {"max_residual": rep.max_residual}))
                break
        else:
            res.append(CheckResult("heat norm decay", True,
                                   {"max_residual": worst}))
    if system in (None, "nse"):
        fam = make_system("nse")
        rng = np.random.default_rng(seed)
        x = fam.sample_states(1, rng)[0]
        traj = fam.energy_sample(0.0, x, 1.0, n=8001)
        # the windowed-norm tolerance comes from the forcing's normality
        # relation: over a window of length delta the force can raise the
        # norm by at most eps, so the pair (eps, delta(eps)) is the valid
        # windowed inequality for a forced system
        eps, delta = fam.forcing.normality_check([0.25])[0]
        rep = energy_inequality_check(traj, nu=fam.nu, eps=eps, delta=delta,
                                      integral_tol=1e-6)
        res.append(CheckResult("nse energy balance", rep.verdict == "holds",
                               {"max_residual": rep.max_residual,
                                "integral_tol": 1e-6, "eps": eps,
                                "delta": delta,
                                "grid_spacing": rep.grid_spacing}))
    if not res:
        raise UsageError(f"no energy contract registered for system {system!r}")
    return res


def invariance_plan(fam, rng: np.random.Generator) -> list[tuple]:
    """(check name, set family, kind, expected verdict, quasi labels)
    rows for the system's canonical invariant family."""
    sys_id = fam.system_id
    if sys_id in ("heat", "branch2"):
        zero = fam.space.zero_state()
        return [(f"{sys_id} zero family full", lambda t: [zero], "full",
                 "invariant", None)]
    if sys_id == "forced-scalar":
        return [("forced-scalar orbit full",
                 lambda t: [fam.scalar(fam.particular(t))], "full",
                 "invariant", None)]
    if sys_id == "single":
        return [("single trajectory full", lambda t: [fam.trajectory(t)],
                 "full", "invariant", None)]
    if sys_id == "bump":
        shifts = np.linspace(-12.0, 12.0, 25)
        zero = fam.space.zero_state()

        def manifold(t):
            return [bump_state(fam.space, float(r), t) for r in shifts]

        def with_zero(t):
            return manifold(t) + [zero]

        # labels anchor one ensemble trajectory through each set member at
        # the window end (label = position at t_max = 2), plus a far
        # escapee to thread the weak-limit zero point
        labels = list(2.0 - shifts) + [14.0]
        return [("bump manifold semi", manifold, "semi", "semi-invariant",
                 None),
                ("bump manifold+0 quasi", with_zero, "quasi",
                 "quasi-invariant", labels)]
    if sys_id == "nse":
        from .omega import omega_pullback
        sched = PullbackSchedule.geometric(0.0, n=6)
        om = omega_pullback(fam, sched, seeds=fam.sample_states(4, rng))
        if not om.points:
            raise UsageError("nse omega approximation came back empty")
        pts = om.points
        return [("nse omega points full", lambda t: pts, "full", "invariant",
                 None)]
    raise UsageError(f"no canonical invariant family for system {sys_id!r}")


def suite_invariance(seed: int, workers: int | None = None,
                     system: str | None = None) -> list[CheckResult]:
    plans = ["heat", "forced-scalar", "bump"] if system is None else [system]
    res = []
    for sys_id in plans:
        fam = make_system(sys_id)
        rng = np.random.default_rng(seed)
        depth = 10.0 if sys_id == "nse" else 40.0
        budget = 8 if sys_id == "nse" else 24
        for name, family, kind, want, labels in invariance_plan(fam, rng):
            rep = invariance_check(fam, family, kind=kind, window=(0.0, 2.0),
                                   tol=0.05, labels=labels, pull_depth=depth,
                                   budget=budget,
                                   rng=np.random.default_rng(seed),
                                   workers=workers)
            res.append(CheckResult(name, rep.verdict == want,
                                   {"verdict": rep.verdict, "expected": want,
                                    "max_semi_dev": max(rep.semi_dev,
                                                        default=0.0),
                                    "quasi_unmatched": rep.quasi_unmatched}))
    if system is None:
        fam = make_system("forced-scalar")
        off = fam.scalar(0.75)
        rep = invariance_check(fam, lambda t: [off], kind="semi",
                               window=(0.0, 2.0), tol=0.05)
        res.append(CheckResult("off-point family fails semi",
                               rep.verdict == "fails",
                               {"verdict": rep.verdict,
                                "max_semi_dev": max(rep.semi_dev,
                                                    default=0.0)}))
    return res


def suite_tracking(seed: int, workers: int | None = None,
                   system: str | None = None) -> list[CheckResult]:
    plans = ["heat", "single", "bump", "forced-scalar"] if system is None else [system]
    res = []
    for sys_id in plans:
        fam = make_system(sys_id)
        rng = np.random.default_rng(seed)
        sched = PullbackSchedule.geometric(0.0, n=10)
        if sys_id == "heat":
            seeds = lambda s: [high_band_seed(fam.space, np.random.default_rng(seed + k))
                               for k in range(3)]
        elif sys_id == "bump":
            shifts = np.linspace(-6.0, 6.0, 8)
            seeds = lambda s: [bump_state(fam.space, float(r), s) for r in shifts]
        elif sys_id == "forced-scalar":
            seeds = lambda s: [fam.scalar(fam.particular(s))]
        else:
            seeds = None
        rep = tracking_check(fam, sched, horizon=2.0, eps=5e-2, seeds=seeds,
                             rng=np.random.default_rng(seed), workers=workers)
        res.append(CheckResult(f"tracking {sys_id}", rep.verdict == "holds",
                               {"verdict": rep.verdict,
                                "max_weak_sup": max(rep.weak_sups)}))
    return res


def suite_uniform(seed: int, workers: int | None = None,
                  system: str | None = None) -> list[CheckResult]:
    base = system if system is not None else "forced-scalar"
    if base != "forced-scalar":
        raise UsageError("the quick uniform suite covers 'forced-scalar' only")
    symfam = SymbolFamily.phase_family(base, count=32)
    space = symfam.system(0.0).space
    seeds = [space.state([0], [v]) for v in np.linspace(-1.5, 1.5, 8)]
    rep = union_inclusion_check(symfam, seeds, t0=0.0,
                                schedule=PullbackSchedule.geometric(0.0, n=10),
                                eps_net=0.05, workers=workers)
    return [CheckResult("union inside uniform", rep.verdict == "included",
                        {"semidist": rep.union_in_uniform,
                         "threshold": rep.threshold, "verdict": rep.verdict}),
            CheckResult("equality on closed sample", rep.equal,
                        {"reverse_semidist": rep.uniform_in_union,
                         "closed_sample": rep.closed_sample,
                         "note": rep.note})]


_SUITE_FNS = {
    "metrics": suite_metrics,
    "inclusion": suite_inclusion,
    "energy": suite_energy,
    "invariance": suite_invariance,
    "tracking": suite_tracking,
    "uniform": suite_uniform,
}


def run_suite(suite: str, seed: int = 0, workers: int | None = None,
              system: str | None = None) -> SuiteReport:
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    names = [s for s in SUITES if s != "all"] if suite == "all" else [suite]
    results: list[CheckResult] = []
    for name in names:
        fn = _SUITE_FNS[name]
        if name == "metrics":
            results.extend(fn(seed, workers))
        else:
            results.extend(fn(seed, workers, system=system))
    verdict = "pass" if all(r.ok for r in results) else "fail"
    return SuiteReport(suite, seed, results, verdict)


def report_lines(rep: SuiteReport) -> list[str]:
    lines = []
    for r in rep.results:
        status = "ok " if r.ok else "FAIL"
        detail = ", ".join(f"{k}={fmt_float(v) if isinstance(v, float) else v}"
                           for k, v in sorted(r.info.items()))
        lines.append(f"[{status}] {r.name}" + (f" ({detail})" if detail else ""))
    lines.append(f"suite {rep.suite}: {rep.verdict}")
    return lines
