"""Pullback omega-limit approximation and the attractor diagnostics.

The pullback omega-limit of a seed set A at evaluation time t is
approximated from a finite schedule of start times s_1 > s_2 > ...
reaching ever deeper into the past.  Each tier contributes the image
P(t, s_i) A of a finite seed ensemble; candidate points are collected
deepest tier first and thinned to a greedy epsilon net; a candidate
drawn from tier j survives when it lies within eps_net of some member
of every strictly deeper tier's image and is supported by at least two
tiers overall (single-depth visitors are escaping noise).  The
attraction profile records, per tier, how far the tier's image sits
from the surviving points, and the run is declared converged when the
profile ends at or below tol and is non-increasing over its last
third.  When nothing survives, the profile instead records each tier's
drift from the shallowest image and the note says so.

Diagnostics built on the same ensembles:

* attraction_diagnostic -- does P(t, s_i)A approach a given target set
* minimality_check      -- a candidate attractor contains the computed
                           omega points and carries no stray excess
* pac_check             -- pullback asymptotic compactness vote on
                           sampled trajectories plus the system's own
                           adversarial sequence when it registers one
* invariance_check      -- semi / quasi / full invariance of a given
                           family of sets over a time window
* tracking_check        -- trajectories started deep in the past are
                           matched by registered complete trajectories
* forward_omega         -- the forward-time analogue for autonomous
                           systems, sharing the net and survival rules
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import UnsupportedError, UsageError
from .evolution import TrajectoryFamily, pullback_image
from .space import (CoeffState, PackedSet, net_rows, pack_states, set_semidist,
                    state_from_json, state_to_json)
from .util import fmt_float


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class PullbackSchedule:
    """Evaluation time plus a strictly decreasing ladder of start times."""

    t: float
    starts: tuple[float, ...]

    def __post_init__(self):
        if len(self.starts) < 3:
            raise UsageError("schedule needs at least three start times")
        arr = np.asarray(self.starts, dtype=np.float64)
        if np.any(np.diff(arr) >= 0):
            raise UsageError("start times must decrease strictly")
        if arr[0] > self.t:
            raise UsageError("the shallowest start must not exceed t")

    @classmethod
    def geometric(cls, t: float, delta: float = 1.0, rho: float = 1.6,
                  n: int = 16) -> "PullbackSchedule":
        """Start times t - delta * rho**i for i = 1..n."""
        if delta <= 0 or rho <= 1:
            raise UsageError("need delta > 0 and rho > 1")
        return cls(float(t),
                   tuple(float(t) - delta * rho ** i for i in range(1, n + 1)))

    @classmethod
    def linear(cls, t: float, step: float = 1.0, n: int = 12) -> "PullbackSchedule":
        if step <= 0:
            raise UsageError("need step > 0")
        return cls(float(t), tuple(float(t) - step * (i + 1) for i in range(n)))

    def depths(self) -> np.ndarray:
        return self.t - np.asarray(self.starts)


def _tier_seeds(fam: TrajectoryFamily, seeds, labels, n_seeds: int,
                rng: np.random.Generator | None, t: float,
                starts: Sequence[float]) -> list[list[CoeffState]]:
    """One seed list per start time.

    A fixed seed collection is reused verbatim at every depth.  With
    labels (given, or drawn once from the family), seed_for pins each
    label to the same trajectory regardless of how deep the start sits.
    """
    if seeds is not None:
        seeds = list(seeds)
        if not seeds:
            raise UsageError("empty seed collection")
        return [seeds for _ in starts]
    if labels is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        labels = fam.seed_labels(n_seeds, rng)
    labels = list(labels)
    if not labels:
        raise UsageError("empty label collection")
    return [[fam.seed_for(lab, s, t) for lab in labels] for s in starts]


# ---------------------------------------------------------------------------
# omega approximation


@dataclass
class OmegaApprox:
    """Finite approximation of a pullback omega-limit set at one time."""

    system_id: str
    t: float
    metric: str
    eps_net: float
    tol: float
    points: list[CoeffState]
    profile: list[tuple[float, float]]  # (start time, semidist of tier image)
    converged: bool
    note: str = ""

    def profile_values(self) -> np.ndarray:
        return np.array([d for _, d in self.profile])

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1,
            "kind": "omega",
            "system": self.system_id,
            "t": self.t,
            "metric": self.metric,
            "eps_net": self.eps_net,
            "tol": self.tol,
            "converged": self.converged,
            "note": self.note,
            "points": [state_to_json(p) for p in self.points],
            "profile": [[s, d] for s, d in self.profile],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OmegaApprox":
        obj = json.loads(text)
        if obj.get("kind") != "omega":
            raise UsageError("not an omega approximation record")
        return cls(obj["system"], float(obj["t"]), obj["metric"],
                   float(obj["eps_net"]), float(obj["tol"]),
                   [state_from_json(p) for p in obj["points"]],
                   [(float(s), float(d)) for s, d in obj["profile"]],
                   bool(obj["converged"]), obj.get("note", ""))

    def profile_csv(self) -> str:
        lines = ["s,semidist,metric,system,t"]
        for s, d in self.profile:
            lines.append(f"{fmt_float(s)},{fmt_float(d)},{self.metric},"
                         f"{self.system_id},{fmt_float(self.t)}")
        return "\n".join(lines) + "\n"


def _profile_converged(values: np.ndarray, tol: float) -> bool:
    if values.size == 0 or not np.isfinite(values[-1]) or values[-1] > tol:
        return False
    k = max(2, values.size // 3)
    tail = values[-k:]
    slack = max(0.1 * tol, 1e-12)
    return bool(np.all(np.diff(tail) <= slack))


def _net_and_survive(packed: PackedSet, tier_rows: list[np.ndarray],
                     eps_net: float, metric: str) -> list[int]:
    """Greedy net over all tiers, deepest first, then the survival filter.

    A netted candidate from tier j must come within eps_net of every
    strictly deeper tier's image, and must be eps_net-supported by at
    least two tiers in total.  The second clause is what lets the
    surviving set be empty: a point visited at a single depth only
    (the escaping-trajectory signature) is noise, not a limit point.
    """
    n_tiers = len(tier_rows)
    deepest_first = np.concatenate(tier_rows[::-1])
    net = net_rows(packed, deepest_first, eps_net, metric)
    tier_of = np.empty(packed.n_states, dtype=np.int64)
    for j, rows in enumerate(tier_rows):
        tier_of[rows] = j
    survivors = []
    for row in net:
        me = np.array([row])
        src = int(tier_of[row])
        ok = all(packed.cross(me, tier_rows[j], metric).min() <= eps_net + 1e-12
                 for j in range(src + 1, n_tiers))
        if ok and src == n_tiers - 1:
            ok = any(packed.cross(me, tier_rows[j], metric).min()
                     <= eps_net + 1e-12 for j in range(n_tiers - 1))
        if ok:
            survivors.append(row)
    return survivors


def _omega_from_tiers(system_id: str, space, tier_states, tick_values,
                      t_report: float, metric: str, eps_net: float,
                      tol: float, note: str) -> OmegaApprox:
    all_states: list[CoeffState] = []
    tier_rows: list[np.ndarray] = []
    pos = 0
    for states in tier_states:
        tier_rows.append(np.arange(pos, pos + len(states)))
        all_states.extend(states)
        pos += len(states)
    packed = pack_states(space, all_states)
    survivors = _net_and_survive(packed, tier_rows, eps_net, metric)

    if survivors:
        keep = np.asarray(survivors)
        vals = [packed.semidist(rows, keep, metric) for rows in tier_rows]
        points = [packed.state(r) for r in survivors]
    else:
        # nothing persisted across depths; report each tier's drift from
        # the shallowest image so escaping dynamics show up as divergence
        vals = [packed.semidist(rows, tier_rows[0], metric)
                for rows in tier_rows]
        points = []
        note = (note + "; " if note else "") + "no convergence at this depth"
    profile = [(float(s), float(d)) for s, d in zip(tick_values, vals)]
    converged = bool(survivors) and _profile_converged(np.asarray(vals), tol)
    return OmegaApprox(system_id, float(t_report), metric, float(eps_net),
                       float(tol), points, profile, converged, note)


def omega_pullback(fam: TrajectoryFamily, schedule: PullbackSchedule,
                   seeds: Sequence[CoeffState] | None = None,
                   labels: Sequence | None = None,
                   n_seeds: int = 24, metric: str = "weak",
                   eps_net: float = 0.05, tol: float = 1e-3,
                   rng: np.random.Generator | None = None,
                   branches: str = "all", workers: int | None = None,
                   note: str = "") -> OmegaApprox:
    """Approximate the pullback omega-limit of a seed family at time t.

    Candidates are the union of the tier images P(t, s_i)A, visited
    deepest tier first and thinned by a greedy eps_net net in the chosen
    metric; survival and the convergence flag follow the rules in the
    module docstring.  Seeds may be a fixed state list; otherwise labels
    (given or freshly drawn) are anchored through fam.seed_for per tier.
    An empty surviving set is reported in the note, not raised.
    """
    if metric not in ("strong", "weak"):
        raise UsageError(f"unknown metric {metric!r}")
    if eps_net <= 0 or tol <= 0:
        raise UsageError("eps_net and tol must be positive")
    t, starts = schedule.t, schedule.starts
    tier_seed_lists = _tier_seeds(fam, seeds, labels, n_seeds, rng, t, starts)
    tier_states = [
        pullback_image(fam, tier_seed, t, s, branches=branches,
                       workers=workers).states()
        for s, tier_seed in zip(starts, tier_seed_lists)
    ]
    return _omega_from_tiers(fam.system_id, fam.space, tier_states, starts,
                             t, metric, eps_net, tol, note)


def forward_omega(fam: TrajectoryFamily, t0: float,
                  seeds: Sequence[CoeffState], delta: float = 1.0,
                  rho: float = 1.6, n: int = 10, metric: str = "weak",
                  eps_net: float = 0.05, tol: float = 1e-3,
                  branches: str = "all", workers: int | None = None) -> OmegaApprox:
    """Forward-time omega approximation for autonomous systems.

    Images are taken at horizons t0 + delta * rho**i for i = 1..n from a
    fixed seed set; the net, survival and convergence rules match
    omega_pullback with 'deepest' meaning the farthest horizon.  Profile
    rows carry the horizon times.
    """
    if not fam.autonomous:
        raise UsageError("forward omega limits need an autonomous system")
    if delta <= 0 or rho <= 1 or n < 3:
        raise UsageError("need delta > 0, rho > 1 and at least three horizons")
    seeds = list(seeds)
    if not seeds:
        raise UsageError("empty seed collection")
    horizons = [t0 + delta * rho ** i for i in range(1, n + 1)]
    tier_states = [pullback_image(fam, seeds, h, t0, branches=branches,
                                  workers=workers).states() for h in horizons]
    return _omega_from_tiers(fam.system_id, fam.space, tier_states, horizons,
                             horizons[-1], metric, eps_net, tol, "")


# ---------------------------------------------------------------------------
# attraction


@dataclass
class AttractionReport:
    system_id: str
    metric: str
    tol: float
    profile: list[tuple[float, float]]
    verdict: str  # "attracts" | "fails" | "inconclusive"

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1, "kind": "attraction", "system": self.system_id,
            "metric": self.metric, "tol": self.tol,
            "profile": [[s, d] for s, d in self.profile],
            "verdict": self.verdict,
        }, sort_keys=True)

    def profile_csv(self) -> str:
        lines = ["s,semidist,metric,system,t"]
        for s, d in self.profile:
            lines.append(f"{fmt_float(s)},{fmt_float(d)},{self.metric},"
                         f"{self.system_id},")
        return "\n".join(lines) + "\n"


def attraction_diagnostic(fam: TrajectoryFamily, schedule: PullbackSchedule,
                          target: Sequence[CoeffState],
                          seeds=None, labels: Sequence | None = None,
                          n_seeds: int = 16,
                          metric: str = "weak", tol: float = 1e-3,
                          rng: np.random.Generator | None = None,
                          branches: str = "all",
                          workers: int | None = None) -> AttractionReport:
    """Measure whether P(t, s_i) A approaches a given target set.

    seeds may be a fixed state collection, a callable s -> list of seeds
    for depth-dependent witnesses, or None for anchored sampled labels.
    Verdicts: 'attracts' when the whole last third of the profile sits
    at or below tol with a non-increasing trend, 'fails' when the whole
    last half stays at or above 2 tol, and 'inconclusive' otherwise.
    """
    target = list(target)
    if not target:
        raise UsageError("empty target set")
    t, starts = schedule.t, schedule.starts
    if callable(seeds):
        tier_seed_lists = [list(seeds(s)) for s in starts]
    else:
        tier_seed_lists = _tier_seeds(fam, seeds, labels, n_seeds, rng, t, starts)

    profile = []
    for s, tier_seed in zip(starts, tier_seed_lists):
        ens = pullback_image(fam, tier_seed, t, s, branches=branches,
                             workers=workers)
        profile.append((float(s),
                        set_semidist(fam.space, ens.states(), target, metric)))

    vals = np.array([d for _, d in profile])
    third = vals[-max(2, vals.size // 3):]
    half = vals[-max(2, vals.size // 2):]
    slack = max(0.1 * tol, 1e-12)
    if np.all(third <= tol) and np.all(np.diff(third) <= slack):
        verdict = "attracts"
    elif np.all(half >= 2.0 * tol):
        verdict = "fails"
    else:
        verdict = "inconclusive"
    return AttractionReport(fam.system_id, metric, float(tol), profile, verdict)


# ---------------------------------------------------------------------------
# minimality


@dataclass
class MinimalityReport:
    contained: bool
    containment_gap: float
    excess_indices: list[int]
    max_excess: float
    verdict: str  # "minimal" | "not-containing" | "excess-points"


def minimality_check(fam: TrajectoryFamily, candidate: Sequence[CoeffState],
                     omega: OmegaApprox, metric: str | None = None,
                     tol: float | None = None) -> MinimalityReport:
    """Check a candidate attractor against the computed omega points.

    Containment: every omega point lies within tol of the candidate (the
    omega set is the minimal attracting family, so anything attracting
    must contain it).  Excess: candidate points farther than 2 eps_net
    from the omega points are flagged as non-minimal surplus.
    """
    candidate = list(candidate)
    if not candidate:
        raise UsageError("empty candidate set")
    if not omega.points:
        raise UsageError("minimality against an empty omega approximation")
    metric = metric if metric is not None else omega.metric
    cap = tol if tol is not None else omega.tol + omega.eps_net
    gap = set_semidist(fam.space, omega.points, candidate, metric)
    packed = pack_states(fam.space, candidate + omega.points)
    nc = len(candidate)
    d = packed.cross(np.arange(nc), np.arange(nc, packed.n_states), metric)
    per_point = d.min(axis=1)
    excess = [int(i) for i in np.nonzero(per_point > 2.0 * omega.eps_net)[0]]
    contained = gap <= cap
    if contained and not excess:
        verdict = "minimal"
    elif not contained:
        verdict = "not-containing"
    else:
        verdict = "excess-points"
    return MinimalityReport(contained, float(gap), excess,
                            float(per_point.max()), verdict)


# ---------------------------------------------------------------------------
# pullback asymptotic compactness


@dataclass
class PACSequenceReport:
    kind: str  # "sampled" | "adversarial"
    best_cluster: int
    cluster_min: int
    min_tail_separation: float
    separated_2tol: bool
    cauchy: bool


@dataclass
class PACReport:
    system_id: str
    tol: float
    sequences: list[PACSequenceReport]
    verdict: str  # "PAC-consistent" | "PAC-violated"

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1, "kind": "pac", "system": self.system_id,
            "tol": self.tol, "verdict": self.verdict,
            "sequences": [{
                "kind": r.kind, "best_cluster": r.best_cluster,
                "cluster_min": r.cluster_min,
                "min_tail_separation": r.min_tail_separation,
                "separated_2tol": r.separated_2tol, "cauchy": r.cauchy,
            } for r in self.sequences],
        }, sort_keys=True)


def _cluster_stats(fam: TrajectoryFamily, points: list[CoeffState],
                   tol: float) -> tuple[int, float]:
    packed = pack_states(fam.space, points)
    n = packed.n_states
    rows = np.arange(n)
    d = packed.cross(rows, rows, "strong")
    best = 1
    for a in range(n):
        best = max(best, int(np.sum(d[a, a:] <= tol)))
    tail = rows[10:] if n > 11 else rows[n // 2:]
    if tail.size >= 2:
        sub = d[np.ix_(tail, tail)]
        min_sep = float(np.min(sub[np.triu_indices(tail.size, k=1)]))
    else:
        min_sep = math.inf
    return best, min_sep


def pac_check(fam: TrajectoryFamily, schedule: PullbackSchedule,
              tol: float = 0.4, sample_size: int = 10,
              cluster_frac: float = 1.0 / 3.0,
              rng: np.random.Generator | None = None,
              include_adversarial: bool = True,
              workers: int | None = None) -> PACReport:
    """Pullback asymptotic compactness vote in the strong metric.

    Each sampled sequence takes one anchored seed label and collects
    u_i = P(t, s_i) x_i across the schedule; the system's registered
    adversarial sequence joins when present.  A sequence passes when
    some anchor point has at least cluster_min later points within tol
    of it (a Cauchy cluster at that resolution).  The verdict is
    PAC-consistent only if every sequence passes.  The minimum pairwise
    separation over the deep indices is reported per sequence, with a
    flag for full 2-tol separation (the clean violation certificate).
    """
    if sample_size < 10:
        raise UsageError("need at least 10 sampled sequences")
    t, starts = schedule.t, schedule.starts
    n = len(starts)
    cluster_min = max(3, math.ceil(n * cluster_frac))
    rng = rng if rng is not None else np.random.default_rng(0)
    reports: list[PACSequenceReport] = []

    def run(kind: str, seeds_per_tier: list[CoeffState]):
        points = []
        for s, x in zip(starts, seeds_per_tier):
            points.append(pullback_image(fam, [x], t, s, branches="first",
                                         workers=workers).states()[0])
        best, min_sep = _cluster_stats(fam, points, tol)
        reports.append(PACSequenceReport(kind, best, cluster_min, min_sep,
                                         min_sep >= 2.0 * tol,
                                         best >= cluster_min))

    labels = fam.seed_labels(sample_size, rng)
    for lab in labels:
        run("sampled", [fam.seed_for(lab, s, t) for s in starts])
    if include_adversarial:
        adv = fam.adversarial_sequence(t, starts)
        if adv is not None:
            run("adversarial", list(adv))

    verdict = ("PAC-consistent" if all(r.cauchy for r in reports)
               else "PAC-violated")
    return PACReport(fam.system_id, float(tol), reports, verdict)


# ---------------------------------------------------------------------------
# invariance of a family of sets


@dataclass
class InvarianceReport:
    system_id: str
    kind: str
    metric: str
    times: list[float]
    semi_dev: list[float]
    quasi_unmatched: int
    tol: float
    verdict: str  # "invariant" | "semi-invariant" | "quasi-invariant"
    #             # | "fails" | "inconclusive"

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1, "kind": "invariance", "system": self.system_id,
            "check": self.kind, "metric": self.metric, "times": self.times,
            "semi_dev": self.semi_dev, "quasi_unmatched": self.quasi_unmatched,
            "tol": self.tol, "verdict": self.verdict,
        }, sort_keys=True)


def invariance_check(fam: TrajectoryFamily,
                     set_family: Callable[[float], Sequence[CoeffState]],
                     kind: str = "full",
                     window: tuple[float, float] = (0.0, 2.0),
                     grid_n: int = 5, metric: str = "weak", tol: float = 0.05,
                     pull_depth: float = 40.0, budget: int = 24,
                     labels: Sequence | None = None,
                     rng: np.random.Generator | None = None,
                     branches: str = "all",
                     workers: int | None = None) -> InvarianceReport:
    """Invariance of a family of sets B(t) over a sampled window.

    semi: for consecutive grid times s < t, the forward image of B(s)
    must sit within tol of B(t) (semidist, per step).

    quasi: every b in B(t) must be approached by some deep-pullback
    ensemble member that also stays within tol of B(s) at every sampled
    s between the window start and t.  The ensemble is evolved from
    window_start - pull_depth using `budget` anchored labels; an
    unmatched b renders the quasi side inconclusive, never a failure
    (sampling cannot prove the absence of a threading trajectory).

    full: both sides; verdict 'invariant' when both pass.
    """
    if kind not in ("semi", "quasi", "full"):
        raise UsageError("kind must be semi, quasi or full")
    if grid_n < 2:
        raise UsageError("invariance needs at least two grid times")
    lo, hi = window
    if hi <= lo:
        raise UsageError("empty invariance window")
    times = [lo + (hi - lo) * k / (grid_n - 1) for k in range(grid_n)]
    sets = [list(set_family(tau)) for tau in times]
    for tau, b in zip(times, sets):
        if not b:
            raise UsageError(f"set family is empty at t={tau}")

    semi_dev: list[float] = []
    semi_ok = True
    if kind in ("semi", "full"):
        for k in range(len(times) - 1):
            img = pullback_image(fam, sets[k], times[k + 1], times[k],
                                 branches=branches, workers=workers).states()
            semi_dev.append(set_semidist(fam.space, img, sets[k + 1], metric))
        semi_ok = max(semi_dev) <= tol

    quasi_unmatched = 0
    quasi_ok = True
    if kind in ("quasi", "full"):
        s_deep = lo - pull_depth
        tier = _tier_seeds(fam, None, labels, budget, rng, times[-1],
                           [s_deep])[0]
        trajs = []
        for x in tier:
            nb = fam.branch_count(s_deep, x) if branches == "all" else 1
            for b in range(nb):
                trajs.append(fam.evolve(s_deep, x, times, branch=b))
        for j in range(len(times)):
            for b_pt in sets[j]:
                matched = False
                for traj in trajs:
                    if fam.space.dist(traj[j], b_pt, metric) > tol:
                        continue
                    if all(set_semidist(fam.space, [traj[i]], sets[i], metric)
                           <= tol for i in range(j)):
                        matched = True
                        break
                if not matched:
                    quasi_unmatched += 1
        quasi_ok = quasi_unmatched == 0

    if kind == "semi":
        verdict = "semi-invariant" if semi_ok else "fails"
    elif kind == "quasi":
        verdict = "quasi-invariant" if quasi_ok else "inconclusive"
    else:
        if not semi_ok:
            verdict = "fails"
        elif quasi_ok:
            verdict = "invariant"
        else:
            verdict = "inconclusive"
    return InvarianceReport(fam.system_id, kind, metric,
                            [float(x) for x in times],
                            [float(x) for x in semi_dev],
                            quasi_unmatched, float(tol), verdict)


# ---------------------------------------------------------------------------
# tracking by complete trajectories


@dataclass
class TrackingReport:
    system_id: str
    eps: float
    horizon: float
    deep_starts: list[float]
    weak_sups: list[float]   # per started trajectory: best weak sup match
    strong_sups: list[float] | None
    verdict: str  # "holds" | "fails"

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1, "kind": "tracking", "system": self.system_id,
            "eps": self.eps, "horizon": self.horizon,
            "deep_starts": self.deep_starts, "weak_sups": self.weak_sups,
            "strong_sups": self.strong_sups, "verdict": self.verdict,
        }, sort_keys=True)


def tracking_check(fam: TrajectoryFamily, schedule: PullbackSchedule,
                   horizon: float = 2.0, eps: float = 5e-2,
                   seeds=None, count: int = 3, grid_n: int = 9,
                   n_complete: int = 8, strong: bool = False,
                   rng: np.random.Generator | None = None,
                   workers: int | None = None,
                   deep_tiers: int = 2) -> TrackingReport:
    """Trajectories started deep in the past are eps-tracked by some
    registered complete trajectory.

    For each of the schedule's deep_tiers deepest start times s', test
    trajectories run on a grid over [s', s' + horizon]; each must have a
    complete trajectory within eps in the weak sup metric there.  With
    strong=True (for systems whose compactness certificate licenses it)
    the same matching is also required pointwise in the strong metric.
    seeds: fixed list, or a callable s' -> seed list, or None to use the
    family's canonical sampler.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    trajs = fam.complete_trajectories(n_complete, rng)
    if not trajs:
        raise UnsupportedError(
            f"system {fam.system_id!r} registers no complete trajectories")
    deep_starts = list(schedule.starts[-deep_tiers:])
    weak_sups: list[float] = []
    strong_sups: list[float] = []
    for s_deep in deep_starts:
        if callable(seeds):
            started = list(seeds(s_deep))
        elif seeds is not None:
            started = list(seeds)
        else:
            started = fam.sample_states(count, rng)
        grid = [s_deep + horizon * k / (grid_n - 1) for k in range(grid_n)]
        complete_vals = [[v(tau) for tau in grid] for v in trajs]
        for x in started:
            nb = fam.branch_count(s_deep, x)
            for b in range(nb):
                u = fam.evolve(s_deep, x, grid, branch=b)
                best_w = math.inf
                best_s = math.inf
                for vvals in complete_vals:
                    wsup = max(fam.space.weak_dist(a, v)
                               for a, v in zip(u, vvals))
                    ssup = max(fam.space.strong_dist(a, v)
                               for a, v in zip(u, vvals))
                    if wsup < best_w:
                        best_w = wsup
                    if ssup < best_s:
                        best_s = ssup
                weak_sups.append(float(best_w))
                strong_sups.append(float(best_s))
    ok = max(weak_sups) <= eps
    if strong:
        ok = ok and max(strong_sups) <= eps
    return TrackingReport(fam.system_id, float(eps), float(horizon),
                          [float(s) for s in deep_starts], weak_sups,
                          strong_sups if strong else None,
                          "holds" if ok else "fails")
