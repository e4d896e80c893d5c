"""Spectral Galerkin truncation of 3-D incompressible flow on the torus.

Convention: period 2pi in every direction, so the leading Stokes
eigenvalue is lambda_1 = 1 and the eigenvalue of wave vector k is
|k|^2.  The energy norm is |u|^2 = sum_k |u_hat_k|^2 over the retained
modes (mirrors included), the dissipation form is ||u||^2 =
sum |k|^2 |u_hat_k|^2, and the dual forcing norm is
||g||_{V'}^2 = sum |g_hat_k|^2 / |k|^2.

The retained mode set is {k in Z^3 : 0 < |k| <= kmax} (Euclidean
radius).  Velocity coefficients are complex 3-vectors, divergence-free
(k . u_hat_k = 0) and Hermitian (u_hat_{-k} = conj(u_hat_k)), so the
underlying field is real.  The advection term is the sharply truncated
convolution with Leray projection, which conserves energy exactly:
Re sum conj(u_hat_k) . B_k = 0 at machine precision.

Forcing is a finite list of modes, each a complex scalar law on the
canonical transverse unit direction of its wave vector; exactly the
listed modes are driven, so a real (Hermitian) force must list both k
and -k explicitly.  All forcing norms run over the listed modes only.
The sliding-window bound sup_t int_t^{t+1} ||g||_{V'}^2 defines the
absorbing radius

    R = 2 ||g||_{Lb}^2 / (nu (1 - exp(-nu lambda_1))),

and the source convention takes X = {|u| <= R} verbatim even though R
bounds the squared norm; ball_convention="norm-squared" switches to the
dimensionally consistent {|u|^2 <= R}.  The space's hard ball cap sits
at 2R (at least 1 for vanishing forcing) so absorbing-entry sweeps from
|u(s)| <= 2R stay admissible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .. import kernels
from ..errors import BlowUpError, ForcingFormatError, UsageError
from ..evolution import TrajectoryFamily, TrajectorySample
from ..space import CoeffState, DualMetricSpace

LAMBDA_1 = 1.0


# ---------------------------------------------------------------------------
# mode table


class SpectralBasis:
    """Mode bookkeeping for one Galerkin cutoff: lookup tables, the
    convolution pair list, and mirror indices."""

    def __init__(self, kmax: int):
        self.kmax = int(kmax)
        modes = []
        for kx in range(-kmax, kmax + 1):
            for ky in range(-kmax, kmax + 1):
                for kz in range(-kmax, kmax + 1):
                    if 0 < kx * kx + ky * ky + kz * kz <= kmax * kmax:
                        modes.append((kx, ky, kz))
        modes.sort()
        self.modes = np.array(modes, dtype=np.int64)
        self.m = self.modes.shape[0]
        self.kvec = self.modes.astype(np.float64)
        self.ksq = (self.kvec ** 2).sum(axis=1)
        self._row = {tuple(k): i for i, k in enumerate(modes)}
        self.mirror = np.array([self._row[(-k[0], -k[1], -k[2])] for k in modes],
                               dtype=np.int64)
        out_l, p_l, q_l = [], [], []
        for o, ko in enumerate(modes):
            for p, kp in enumerate(modes):
                q = (ko[0] - kp[0], ko[1] - kp[1], ko[2] - kp[2])
                r = self._row.get(q)
                if r is not None:
                    out_l.append(o)
                    p_l.append(p)
                    q_l.append(r)
        self.pair_out = np.array(out_l, dtype=np.int64)
        self.pair_p = np.array(p_l, dtype=np.int64)
        self.pair_q = np.array(q_l, dtype=np.int64)

    def row(self, k) -> int:
        r = self._row.get((int(k[0]), int(k[1]), int(k[2])))
        if r is None:
            raise UsageError(f"mode {tuple(k)} outside the Galerkin cutoff {self.kmax}")
        return r

    def transverse_unit(self, k) -> np.ndarray:
        """Canonical real unit vector perpendicular to k, equal for +-k."""
        rep = max(tuple(int(c) for c in k), tuple(-int(c) for c in k))
        a = np.array([1.0, 0.0, 0.0])
        if rep[1] == 0 and rep[2] == 0:
            a = np.array([0.0, 1.0, 0.0])
        e = np.cross(np.asarray(rep, dtype=float), a)
        return e / np.linalg.norm(e)


@lru_cache(maxsize=8)
def get_basis(kmax: int) -> SpectralBasis:
    return SpectralBasis(kmax)


# ---------------------------------------------------------------------------
# forcing


@dataclass(frozen=True)
class ForcingMode:
    k: tuple[int, int, int]
    amp: complex
    kind: str = "const"  # const | sin | sampled
    omega: float = 0.0
    phase: float = 0.0
    times: tuple = ()
    values: tuple = ()

    def envelope(self, t) -> np.ndarray:
        """Complex coefficient law c(t); vectorised over t."""
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "const":
            return np.full(t.shape, self.amp, dtype=np.complex128)
        if self.kind == "sin":
            return self.amp * np.sin(self.omega * t + self.phase)
        re = np.interp(t, self.times, [v.real for v in self.values])
        im = np.interp(t, self.times, [v.imag for v in self.values])
        return self.amp * (re + 1j * im)


class ForcingProfile:
    """Finite-mode forcing; exactly the listed modes are driven.

    The field carries g_hat_k = c_k(t) e1(k) on each listed k, with
    e1(k) the canonical transverse unit direction (equal for +-k), so
    ||g(t)||_{V'}^2 = sum over listed modes of |c_k(t)|^2 / |k|^2.
    A real-valued force lists both k and -k with conjugate amplitudes.
    An empty mode list is the zero force.
    """

    def __init__(self, entries: Sequence[ForcingMode]):
        self.entries = list(entries)
        seen = set()
        for e in self.entries:
            if e.k == (0, 0, 0):
                raise ForcingFormatError("forcing on the mean mode is not allowed")
            if e.k in seen:
                raise ForcingFormatError(f"mode {e.k} listed twice")
            seen.add(e.k)
            if e.kind not in ("const", "sin", "sampled"):
                raise ForcingFormatError(f"unknown time law {e.kind!r}")
            if e.kind == "sampled" and (len(e.times) < 2 or len(e.times) != len(e.values)):
                raise ForcingFormatError("sampled law needs matching times/values, >= 2")

    def vprime_norm_sq(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        total = np.zeros(t.shape)
        for e in self.entries:
            ksq = float(e.k[0] ** 2 + e.k[1] ** 2 + e.k[2] ** 2)
            total += np.abs(e.envelope(t)) ** 2 / ksq
        return total

    def dense(self, t: float, basis: SpectralBasis) -> np.ndarray:
        g = np.zeros((basis.m, 3), dtype=np.complex128)
        for e in self.entries:
            g[basis.row(e.k)] += complex(e.envelope(t)) * basis.transverse_unit(e.k)
        return g

    def is_hermitian(self) -> bool:
        """Whether the listed modes pair off so the force field is real."""
        by_k = {e.k: e for e in self.entries}
        probe = np.linspace(0.0, 3.0, 7)
        for e in self.entries:
            m = by_k.get((-e.k[0], -e.k[1], -e.k[2]))
            if m is None:
                return False
            if np.abs(m.envelope(probe) - np.conj(e.envelope(probe))).max() > 1e-12:
                return False
        return True

    def is_static(self) -> bool:
        return all(e.kind == "const" for e in self.entries)

    # -- window bounds -------------------------------------------------------

    def translational_bound(self, window: tuple[float, float] = (0.0, 4.0),
                            dt: float = 1e-3) -> float:
        """sup over t in the window of int_t^{t+1} ||g||_{V'}^2, trapezoid."""
        lo, hi = window
        if hi <= lo:
            raise UsageError("empty window")
        if self.is_static():
            return float(self.vprime_norm_sq(lo))
        m = int(round(1.0 / dt))
        grid = lo + dt * np.arange(int(math.ceil((hi - lo) / dt)) + m + 1)
        f = self.vprime_norm_sq(grid)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * dt * (f[1:] + f[:-1]))])
        sums = cum[m:] - cum[:-m]
        return float(sums.max())

    def window_integral_sup(self, delta: float, window=(0.0, 4.0),
                            dt: float = 1e-3) -> float:
        """sup over t of int_t^{t+delta} ||g||_{V'}^2."""
        lo, hi = window
        if self.is_static():
            return float(self.vprime_norm_sq(lo)) * delta
        grid = np.arange(lo, hi + 1.0 + dt, dt)
        f = self.vprime_norm_sq(grid)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(grid) * (f[1:] + f[:-1]))])
        starts = np.arange(lo, hi, dt)
        vals = np.interp(starts + delta, grid, cum) - np.interp(starts, grid, cum)
        return float(vals.max())

    def normality_check(self, eps_list: Sequence[float], window=(0.0, 4.0),
                        dt: float = 1e-3, delta_cap: float = 1.0,
                        iters: int = 40) -> list[tuple[float, float]]:
        """Largest delta <= delta_cap with sup_t int_t^{t+delta} <= eps,
        found by bisection for each eps.  All finite-mode profiles here
        are normal, so every eps receives a positive delta."""
        out = []
        for eps in eps_list:
            if eps <= 0:
                raise UsageError("eps must be positive")
            if self.window_integral_sup(delta_cap, window, dt) <= eps:
                out.append((float(eps), float(delta_cap)))
                continue
            lo_d, hi_d = 0.0, delta_cap
            for _ in range(iters):
                mid = 0.5 * (lo_d + hi_d)
                if self.window_integral_sup(mid, window, dt) <= eps:
                    lo_d = mid
                else:
                    hi_d = mid
            out.append((float(eps), float(lo_d)))
        return out

    # -- serialization ---------------------------------------------------------

    @classmethod
    def from_dict(cls, obj: dict) -> "ForcingProfile":
        if not isinstance(obj, dict) or "modes" not in obj:
            raise ForcingFormatError("forcing file must be an object with 'modes'")
        if not isinstance(obj["modes"], list):
            raise ForcingFormatError("'modes' must be a list (empty means zero force)")
        entries = []
        for raw in obj["modes"]:
            try:
                k = tuple(int(c) for c in raw["k"])
                if len(k) != 3:
                    raise ForcingFormatError("mode k must have three components")
                amp_raw = raw["amp"]
                amp = complex(amp_raw[0], amp_raw[1])
                tspec = raw.get("time", {"kind": "const"})
                kind = tspec["kind"]
                entries.append(ForcingMode(
                    k=k, amp=amp, kind=kind,
                    omega=float(tspec.get("omega", 0.0)),
                    phase=float(tspec.get("phase", 0.0)),
                    times=tuple(float(x) for x in tspec.get("times", ())),
                    values=tuple(complex(v[0], v[1]) for v in tspec.get("values", ())),
                ))
            except ForcingFormatError:
                raise
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise ForcingFormatError(f"malformed forcing mode: {exc}") from exc
        return cls(entries)

    @classmethod
    def load(cls, path) -> "ForcingProfile":
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ForcingFormatError(f"cannot read forcing file: {exc}") from exc
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        modes = []
        for e in self.entries:
            tspec: dict = {"kind": e.kind}
            if e.kind == "sin":
                tspec.update(omega=e.omega, phase=e.phase)
            if e.kind == "sampled":
                tspec.update(times=list(e.times),
                             values=[[v.real, v.imag] for v in e.values])
            modes.append({"k": list(e.k), "amp": [e.amp.real, e.amp.imag],
                          "time": tspec})
        return {"modes": modes}


def default_forcing() -> ForcingProfile:
    """Constant real forcing on the lowest mode pair, scaled so the
    translational bound sup_t int_t^{t+1} ||g||_{V'}^2 is exactly 1."""
    amp = complex(1.0 / math.sqrt(2.0))
    return ForcingProfile([ForcingMode(k=(1, 0, 0), amp=amp),
                           ForcingMode(k=(-1, 0, 0), amp=amp)])


def absorbing_radius(l2b_bound: float, nu: float, lam1: float = LAMBDA_1) -> float:
    """R = 2 ||g||_{Lb}^2 / (nu (1 - exp(-nu lam1)))."""
    if nu <= 0 or lam1 <= 0:
        raise UsageError("nu and lambda_1 must be positive")
    return 2.0 * l2b_bound / (nu * (1.0 - math.exp(-nu * lam1)))


def absorbing_entry_time(radius: float, nu: float, lam1: float = LAMBDA_1) -> float:
    """Upper bound on the time for |u(s)| <= 2R sweeps to enter {|u| <= R}."""
    r = radius
    if r * r <= r / 2.0:
        raise UsageError("absorbing set is empty under this convention")
    return math.log(4.0 * r * r / (r * r - r / 2.0)) / (nu * lam1)


# ---------------------------------------------------------------------------
# the system


def make_nse_space(ball_radius: float, kmax: int, tag: str = "nse") -> DualMetricSpace:
    return DualMetricSpace(tag=tag, index_dim=3, component_dim=3,
                           truncation_radius=2 * kmax, ball_radius=ball_radius)


class NSESystem(TrajectoryFamily):
    system_id = "nse"
    autonomous = False  # true only for static forcing; keep the general contract
    expectations = {"weak_attractor": True, "strong_attractor": True}

    def __init__(self, nu: float = 1.0, forcing: ForcingProfile | None = None,
                 kmax: int = 4, rtol: float = 1e-8, atol: float = 1e-11,
                 ball_convention: str = "radius"):
        if ball_convention not in ("radius", "norm-squared"):
            raise UsageError("ball_convention must be 'radius' or 'norm-squared'")
        self.nu = float(nu)
        self.forcing = forcing if forcing is not None else default_forcing()
        self.basis = get_basis(kmax)
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.ball_convention = ball_convention
        self.l2b_bound = self.forcing.translational_bound()
        self.radius = absorbing_radius(self.l2b_bound, self.nu)
        for e in self.forcing.entries:
            self.basis.row(e.k)  # forcing must live inside the cutoff
        ball = max(2.0 * self.absorbing_set_radius(), 1.0)
        super().__init__(make_nse_space(ball, kmax))
        self.autonomous = self.forcing.is_static()
        self._g_static = (self.forcing.dense(0.0, self.basis)
                          if self.forcing.is_static() else None)

    # -- conventions ------------------------------------------------------------

    def absorbing_set_radius(self) -> float:
        """Norm radius of the absorbing set X.

        The source convention uses R itself as the norm bound; the
        'norm-squared' flag switches to sqrt(R) for {|u|^2 <= R}.
        """
        return self.radius if self.ball_convention == "radius" else math.sqrt(self.radius)

    # -- state packing ------------------------------------------------------------

    def dense_values(self, x: CoeffState) -> np.ndarray:
        self.space.check_member(x)
        v = np.zeros((self.basis.m, 3), dtype=np.complex128)
        for row_idx, row_val in zip(x.idx, x.val):
            v[self.basis.row(row_idx)] = row_val
        return v

    def state_from_dense(self, v: np.ndarray) -> CoeffState:
        return self.space.state(self.basis.modes, v)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Leray projection plus Hermitian symmetrisation of a dense field."""
        kd = (v * self.basis.kvec).sum(axis=1) / self.basis.ksq
        v = v - kd[:, None] * self.basis.kvec
        return 0.5 * (v + np.conj(v[self.basis.mirror]))

    # -- dynamics -----------------------------------------------------------------

    def g_dense(self, t: float) -> np.ndarray:
        if self._g_static is not None:
            return self._g_static
        return self.forcing.dense(t, self.basis)

    def rhs_dense(self, t: float, v: np.ndarray) -> np.ndarray:
        adv = kernels.nse_bilinear(v, self.basis.kvec, self.basis.pair_out,
                                   self.basis.pair_p, self.basis.pair_q)
        return -self.nu * self.basis.ksq[:, None] * v + adv + self.g_dense(t)

    def rhs(self, x: CoeffState, t: float = 0.0) -> CoeffState:
        """Instantaneous d/dt of a (divergence-free) coefficient state."""
        return self.state_from_dense(self.rhs_dense(t, self.dense_values(x)))

    def bilinear(self, x: CoeffState) -> CoeffState:
        """The projected advection term alone (as it enters the right side)."""
        v = self.dense_values(x)
        adv = kernels.nse_bilinear(v, self.basis.kvec, self.basis.pair_out,
                                   self.basis.pair_p, self.basis.pair_q)
        return self.state_from_dense(adv)

    def evolve(self, s, x, ts, branch=0):
        if branch != 0:
            raise UsageError("single-valued system has only branch 0")
        ts = [float(t) for t in ts]
        if any(t < s for t in ts):
            raise UsageError("sample times must not precede the start time")
        v0 = self.dense_values(x)
        if max(ts) == s:
            return [self.state_from_dense(v0) for _ in ts]

        m = self.basis.m

        def fun(t, y):
            return self.rhs_dense(t, y.reshape(m, 3)).ravel()

        t_eval = sorted(set(ts))
        sol = solve_ivp(fun, (s, max(ts)), v0.ravel(), method="RK45",
                        rtol=self.rtol, atol=self.atol, t_eval=t_eval,
                        dense_output=False)
        if not sol.success:
            raise BlowUpError(f"integration failed: {sol.message}")
        by_time = {tv: self.state_from_dense(sol.y[:, i].reshape(m, 3))
                   for i, tv in enumerate(t_eval)}
        return [by_time[t] for t in ts]

    # -- energy functionals ----------------------------------------------------------

    def energy_norms(self, v: np.ndarray, t: float) -> tuple[float, float, float]:
        """(|u|^2, ||u||^2, <g, u>) of a dense field at time t."""
        esq = float((np.abs(v) ** 2).sum())
        vsq = float((self.basis.ksq[:, None] * np.abs(v) ** 2).sum())
        pair = float(np.real(np.conj(self.g_dense(t)) * v).sum())
        return esq, vsq, pair

    def energy_sample(self, s: float, x: CoeffState, t_hi: float,
                      n: int = 2001) -> TrajectorySample:
        """Integrate once and sample the three energy functionals densely."""
        grid = np.linspace(s, t_hi, n)
        m = self.basis.m

        def fun(t, y):
            return self.rhs_dense(t, y.reshape(m, 3)).ravel()

        sol = solve_ivp(fun, (s, t_hi), self.dense_values(x).ravel(), method="RK45",
                        rtol=self.rtol, atol=self.atol, t_eval=grid)
        if not sol.success:
            raise BlowUpError(f"integration failed: {sol.message}")
        norms = np.empty(n)
        vsq = np.empty(n)
        pair = np.empty(n)
        for i, t in enumerate(grid):
            v = sol.y[:, i].reshape(m, 3)
            esq, vs, pr = self.energy_norms(v, t)
            norms[i] = math.sqrt(esq)
            vsq[i] = vs
            pair[i] = pr
        return TrajectorySample(grid, norms, vnorm_sq=vsq, force_pair=pair)

    # -- sampling -----------------------------------------------------------------

    def sample_states(self, count, rng, radius: float | None = None,
                      active_kmax: int = 2):
        """Random divergence-free real fields on the low modes, scaled to a
        strong norm between 0.2 and 1.0 of the given radius (default: the
        absorbing set radius)."""
        cap = radius if radius is not None else self.absorbing_set_radius()
        if cap <= 0:
            cap = 1.0  # zero forcing: sample the unit ball instead
        rows = np.where(self.basis.ksq <= active_kmax ** 2)[0]
        out = []
        for _ in range(count):
            v = np.zeros((self.basis.m, 3), dtype=np.complex128)
            v[rows] = rng.normal(size=(rows.size, 3)) + 1j * rng.normal(size=(rows.size, 3))
            v = self.project(v)
            nrm = math.sqrt((np.abs(v) ** 2).sum())
            v *= rng.uniform(0.2, 1.0) * cap / nrm
            out.append(self.state_from_dense(v))
        return out

    def incompressibility_defect(self, x: CoeffState) -> float:
        v = self.dense_values(x)
        num = np.abs((v * self.basis.kvec).sum(axis=1))
        den = np.sqrt(self.basis.ksq) * np.sqrt((np.abs(v) ** 2).sum(axis=1)) + 1e-300
        return float((num / den).max())
