"""Model systems: exact flows, witness constructions, spectral invariants.

Frozen oracle values:
* diffusion multiplier e^(-1/4) = 0.7788007830714049 for xi = 1/2, 1 unit
* witness band table: elapsed 1.0 -> band 0, ln2/2 -> 1, 2.0 -> 0, 4.0 -> -1
* travelling profile at position 1/2: (1, 1)/sqrt(2)
* absorbing radius at unit window bound, nu = 1: 2/(1 - e^-1)
  = 3.163953413738653, and it scales linearly in the window bound
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from ges.errors import ForcingFormatError, UsageError
from ges.evolution import pullback_image
from ges.systems import (
    BranchSystem,
    BumpSystem,
    ForcedScalarSystem,
    ForcingMode,
    ForcingProfile,
    HeatSystem,
    LineSystem,
    NSESystem,
    SYSTEM_IDS,
    SingleTrajectorySystem,
    absorbing_entry_time,
    absorbing_radius,
    band_profile,
    band_witness,
    bump_state,
    default_forcing,
    get_basis,
    heat_evolve,
    high_band_seed,
    make_bump_space,
    make_heat_space,
    make_system,
)
from ges.systems.branch import RATES
from ges.systems.line import make_line_space


# ---------------------------------------------------------------------------
# registry


def test_registry_lists_all_seven_systems():
    assert SYSTEM_IDS == ("branch2", "bump", "forced-scalar", "heat", "line",
                          "nse", "single")
    assert isinstance(make_system("heat"), HeatSystem)
    with pytest.raises(UsageError, match="unknown system"):
        make_system("vortex")


def test_attractor_expectations_registry():
    want = {
        "heat": (True, False),
        "bump": (True, False),
        "line": (False, False),
        "single": (True, True),
        "branch2": (True, True),
        "forced-scalar": (True, True),
        "nse": (True, True),
    }
    for sid, (weak, strong) in want.items():
        cls = type(make_system(sid)) if sid != "nse" else NSESystem
        assert cls.expectations["weak_attractor"] is weak, sid
        assert cls.expectations["strong_attractor"] is strong, sid


# ---------------------------------------------------------------------------
# diffusion on the line


class TestHeat:
    space = make_heat_space()

    def test_exact_multiplier(self):
        # slot 32 sits at xi = 1/2; one unit of elapsed time scales the
        # coefficient by e^(-1/4)
        x = self.space.state([32], [1.0])
        y = heat_evolve(self.space, x, 0.0, 1.0)
        assert float(y.val[0, 0].real) == pytest.approx(
            0.7788007830714049, abs=1e-15)

    def test_backward_evolution_rejected(self):
        x = self.space.state([32], [1.0])
        with pytest.raises(UsageError, match="forward"):
            heat_evolve(self.space, x, 0.0, -1.0)

    @pytest.mark.parametrize("elapsed,band", [
        (1.0, 0), (math.log(2.0) / 2.0, 1), (2.0, 0), (4.0, -1)])
    def test_witness_band_table(self, elapsed, band):
        j, seed = band_witness(self.space, 0.0, -elapsed)
        assert j == band
        assert self.space.strong_norm(seed) == pytest.approx(1.0, abs=1e-12)
        evolved = heat_evolve(self.space, seed, -elapsed, 0.0)
        assert self.space.strong_norm(evolved) >= 0.5 - 1e-6

    def test_witness_support_sits_in_the_band(self):
        j, seed = band_witness(self.space, 0.0, -1.0)
        xi = np.abs(seed.idx[:, 0]) * self.space.grid_spacing
        assert xi.min() >= 2.0 ** (j - 1) - self.space.grid_spacing
        assert xi.max() <= math.sqrt(math.log(2.0)) + 1e-12

    def test_disjoint_witnesses_do_not_overlap(self):
        _, a = band_witness(self.space, 0.0, -1.0, disjoint=True)
        _, b = band_witness(self.space, 0.0, -math.log(2.0) / 2.0, disjoint=True)
        assert not (set(a.idx[:, 0].tolist()) & set(b.idx[:, 0].tolist()))

    def test_witness_below_grid_resolution_rejected(self):
        with pytest.raises(UsageError, match="grid"):
            band_witness(self.space, 0.0, -1e9)

    def test_norm_nonincreasing_along_solutions(self):
        fam = HeatSystem()
        seed = band_profile(fam.space, 2, np.random.default_rng(0))
        traj = fam.evolve(0.0, seed, np.linspace(0.0, 3.0, 13))
        norms = [fam.space.strong_norm(u) for u in traj]
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_high_band_pullback_norm_bound(self):
        # support above xi_min forces decay at least e^(xi_min^2 (s - t))
        fam = HeatSystem()
        seed = high_band_seed(fam.space, np.random.default_rng(1))
        for depth in (0.05, 0.1, 0.2):
            out = pullback_image(fam, [seed], 0.0, -depth).states()[0]
            assert fam.space.strong_norm(out) <= math.exp(-64.0 * depth) + 1e-12

    def test_high_band_seed_is_weakly_negligible(self):
        fam = HeatSystem()
        seed = high_band_seed(fam.space, np.random.default_rng(2))
        assert fam.space.strong_norm(seed) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(seed.idx[:, 0]).min() * fam.space.grid_spacing >= 8.0
        assert fam.space.weak_dist(seed, fam.space.zero_state()) < 0.01

    def test_adversarial_spikes_disjoint_and_persistent(self):
        fam = HeatSystem()
        starts = [-1.0, -1.01, -2.0, -4.0]  # two nearly equal depths
        seeds = fam.adversarial_sequence(0.0, starts)
        slots = [abs(int(s.idx[1, 0])) for s in seeds]
        assert len(set(slots)) == len(slots)
        for s, x in zip(starts, seeds):
            out = fam.evolve(s, x, [0.0])[0]
            assert fam.space.strong_norm(out) >= 0.5 - 1e-9

    def test_adversarial_validation(self):
        fam = HeatSystem()
        with pytest.raises(UsageError):
            fam.adversarial_sequence(0.0, [1.0])
        with pytest.raises(UsageError, match="too deep"):
            fam.adversarial_sequence(0.0, [-1e9])


# ---------------------------------------------------------------------------
# travelling profile


class TestBump:
    space = make_bump_space()

    def test_half_step_profile(self):
        st = bump_state(self.space, 0.0, 0.5)
        assert st.idx[:, 0].tolist() == [0, 1]
        inv = 1.0 / math.sqrt(2.0)
        assert st.val[:, 0].real.tolist() == pytest.approx([inv, inv], abs=1e-15)

    def test_integer_position_is_a_coordinate_vector(self):
        st = bump_state(self.space, 0.0, 3.0)
        assert st.idx[:, 0].tolist() == [3, 4]
        assert st.val[:, 0].real.tolist() == pytest.approx([1.0, 0.0], abs=1e-15)

    def test_unit_norm_everywhere(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            r, t = rng.uniform(-20, 20), rng.uniform(-20, 20)
            st = bump_state(self.space, r, t)
            assert self.space.strong_norm(st) == pytest.approx(1.0, abs=1e-12)

    def test_weak_distance_to_zero_decays_with_position(self):
        zero = self.space.zero_state()
        for tau in (8.3, 12.7, 20.0):
            st = bump_state(self.space, 0.0, tau)
            n = math.floor(tau)
            assert self.space.weak_dist(st, zero) <= 3.0 * 2.0 ** (-n + 1)

    def test_evolution_slides_exactly(self):
        fam = BumpSystem()
        x = bump_state(fam.space, -1.25, 0.0)
        out = fam.evolve(0.0, x, [2.5])[0]
        assert fam.space.strong_dist(out, bump_state(fam.space, -1.25, 2.5)) == 0.0

    def test_label_names_the_position_at_evaluation_time(self):
        fam = BumpSystem()
        seed = fam.seed_for(5.0, -3.0, 0.0)
        out = fam.evolve(-3.0, seed, [0.0])[0]
        want = bump_state(fam.space, -5.0, 0.0)  # position 5 at t = 0
        assert fam.space.strong_dist(out, want) <= 1e-12

    def test_off_manifold_seeds_rejected(self):
        fam = BumpSystem()
        bad = [
            fam.space.state([0], [0.9]),             # not unit
            fam.space.state([0, 2], [0.8, 0.6]),     # non-adjacent slots
            fam.space.state([0], [1.0j]),            # complex
            fam.space.state([0, 1], [-0.8, 0.6]),    # negative component
        ]
        for x in bad:
            with pytest.raises(UsageError):
                fam.evolve(0.0, x, [1.0])

    def test_complete_trajectories_are_deterministic_shifts(self):
        fam = BumpSystem()
        trajs = fam.complete_trajectories(8, np.random.default_rng(0))
        assert len(trajs) == 8
        first = trajs[0](0.0)
        last = trajs[-1](0.0)
        assert fam.space.strong_dist(first, bump_state(fam.space, -6.0, 0.0)) == 0.0
        assert fam.space.strong_dist(last, bump_state(fam.space, 6.0, 0.0)) == 0.0

    def test_adversarial_profiles_yield_far_apart_images(self):
        fam = BumpSystem()
        seeds = fam.adversarial_sequence(0.0, [-1.0, -2.0, -3.0])
        images = [fam.evolve(s, x, [0.0])[0]
                  for s, x in zip([-1.0, -2.0, -3.0], seeds)]
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                assert fam.space.strong_dist(images[i], images[j]) >= 1.0


def test_single_trajectory_ignores_the_seed():
    fam = SingleTrajectorySystem()
    rng = np.random.default_rng(0)
    a, b = fam.sample_states(2, rng)
    ta = fam.evolve(0.0, a, [1.3])[0]
    tb = fam.evolve(0.0, b, [1.3])[0]
    assert fam.space.strong_dist(ta, tb) == 0.0
    assert fam.space.strong_dist(ta, fam.trajectory(1.3)) == 0.0


# ---------------------------------------------------------------------------
# drifting line


class TestLine:
    def test_solution_is_elapsed_time(self):
        fam = LineSystem()
        out = fam.evolve(-3.0, fam.scalar(7.0), [0.0, 1.0])
        assert float(out[0].val[0, 0].real) == 3.0
        assert float(out[1].val[0, 0].real) == 4.0

    def test_weak_metric_coincides_with_strong(self):
        space = make_line_space()
        a, b = space.state([0], [1.0]), space.state([0], [4.0])
        assert space.weak_dist(a, b) == space.strong_dist(a, b) == 3.0


# ---------------------------------------------------------------------------
# two-rate decay


class TestBranch:
    def test_rates(self):
        assert RATES == (1.0, 2.0)
        fam = BranchSystem()
        x = fam.space.state([1], [0.5])
        for b, rate in enumerate(RATES):
            out = fam.evolve(0.0, x, [2.0], branch=b)[0]
            assert float(out.val[0, 0].real) == pytest.approx(
                0.5 * math.exp(-2.0 * rate), rel=1e-15)

    def test_branch_out_of_range(self):
        fam = BranchSystem()
        with pytest.raises(UsageError, match="branch"):
            fam.evolve(0.0, fam.space.state([0], [0.5]), [1.0], branch=2)

    def test_branch_count(self):
        fam = BranchSystem()
        assert fam.branch_count(0.0, fam.space.state([0], [0.5])) == 2


# ---------------------------------------------------------------------------
# phase-forced scalar relaxation


class TestForcedScalar:
    def test_closed_form_solution(self):
        fam = ForcedScalarSystem()
        s, u0, t = -2.0, 0.7, 1.5
        out = fam.evolve(s, fam.scalar(u0), [t])[0]
        want = math.exp(-(t - s)) * (u0 - fam.particular(s)) + fam.particular(t)
        assert float(out.val[0, 0].real) == pytest.approx(want, abs=1e-15)

    def test_particular_solution_is_complete(self):
        fam = ForcedScalarSystem(sigma=0.8)
        for s, t in ((-5.0, -1.0), (0.0, 3.0)):
            out = fam.evolve(s, fam.scalar(fam.particular(s)), [t])[0]
            assert float(out.val[0, 0].real) == pytest.approx(
                fam.particular(t), abs=1e-12)

    def test_shift_moves_the_phase(self):
        fam = ForcedScalarSystem(sigma=0.3)
        moved = fam.shifted(1.0)
        assert moved.sigma == pytest.approx(1.3)
        assert moved.particular(0.5) == pytest.approx(fam.particular(1.5))

    def test_scalar_states_live_on_slot_zero(self):
        fam = ForcedScalarSystem()
        with pytest.raises(UsageError, match="index 0"):
            fam.evolve(0.0, fam.space.state([1], [0.5]), [1.0])


# ---------------------------------------------------------------------------
# spectral Galerkin flow


@pytest.fixture(scope="module")
def nse():
    return NSESystem()


@pytest.fixture(scope="module")
def nse_free():
    return NSESystem(forcing=ForcingProfile([]))


class TestNSEStructure:
    def test_mode_count_and_truncation(self, nse):
        assert nse.basis.m == 256
        assert nse.space.truncation_radius == 8
        assert nse.space.index_dim == 3 and nse.space.component_dim == 3

    def test_bilinear_conserves_energy(self, nse):
        rng = np.random.default_rng(5)
        for x in nse.sample_states(3, rng):
            v = nse.dense_values(x)
            adv = nse.dense_values(nse.bilinear(x))
            pairing = float(np.real(np.conj(v) * adv).sum())
            assert abs(pairing) <= 1e-10

    def test_forcing_outside_cutoff_rejected(self):
        prof = ForcingProfile([ForcingMode(k=(9, 0, 0), amp=1.0)])
        with pytest.raises(UsageError, match="cutoff"):
            NSESystem(forcing=prof)

    def test_dense_roundtrip(self, nse):
        x = nse.sample_states(1, np.random.default_rng(6))[0]
        back = nse.state_from_dense(nse.dense_values(x))
        assert nse.space.strong_dist(x, back) == 0.0

    def test_sample_states_are_solenoidal(self, nse):
        for x in nse.sample_states(3, np.random.default_rng(7)):
            assert nse.incompressibility_defect(x) <= 1e-12

    def test_ball_convention_flag(self):
        assert NSESystem(ball_convention="norm-squared").absorbing_set_radius() \
            == pytest.approx(math.sqrt(absorbing_radius(1.0, 1.0)), rel=1e-9)
        with pytest.raises(UsageError, match="ball_convention"):
            NSESystem(ball_convention="diameter")


class TestNSEFlow:
    def test_single_mode_decays_at_the_stokes_rate(self, nse_free):
        basis = nse_free.basis
        e1 = basis.transverse_unit((1, 0, 0))
        v = np.zeros((basis.m, 3), dtype=np.complex128)
        v[basis.row((1, 0, 0))] = 0.3 * e1
        v[basis.row((-1, 0, 0))] = 0.3 * e1
        x = nse_free.state_from_dense(v)
        t = 0.7
        out = nse_free.evolve(0.0, x, [t])[0]
        want = math.sqrt(2.0) * 0.3 * math.exp(-nse_free.nu * 1.0 * t)
        assert nse_free.space.strong_norm(out) == pytest.approx(want, rel=1e-7)

    def test_unforced_norm_nonincreasing(self, nse_free):
        x = nse_free.sample_states(1, np.random.default_rng(8))[0]
        grid = np.linspace(0.0, 1.0, 5)
        traj = nse_free.evolve(0.0, x, grid)
        norms = [nse_free.space.strong_norm(u) for u in traj]
        assert all(a >= b - 1e-10 for a, b in zip(norms, norms[1:]))

    def test_incompressibility_preserved(self, nse):
        x = nse.sample_states(1, np.random.default_rng(9))[0]
        out = nse.evolve(0.0, x, [1.0])[0]
        assert nse.incompressibility_defect(out) <= 1e-8

    def test_reality_condition_preserved(self, nse):
        x = nse.sample_states(1, np.random.default_rng(10))[0]
        v = nse.dense_values(nse.evolve(0.0, x, [0.5])[0])
        assert np.abs(v[nse.basis.mirror] - np.conj(v)).max() <= 1e-9

    def test_backward_time_rejected(self, nse):
        x = nse.sample_states(1, np.random.default_rng(11))[0]
        with pytest.raises(UsageError, match="precede"):
            nse.evolve(0.0, x, [-0.5])


class TestAbsorbing:
    def test_radius_examples(self):
        assert absorbing_radius(0.0, 1.0) == 0.0
        assert absorbing_radius(1.0, 1.0) == pytest.approx(
            3.163953413738653, abs=1e-15)
        assert absorbing_radius(2.0, 1.0) == pytest.approx(
            2.0 * absorbing_radius(1.0, 1.0), rel=1e-15)
        with pytest.raises(UsageError):
            absorbing_radius(1.0, 0.0)

    def test_entry_time(self):
        r = absorbing_radius(1.0, 1.0)
        assert absorbing_entry_time(r, 1.0) == pytest.approx(
            1.558305421877021, abs=1e-12)
        with pytest.raises(UsageError, match="empty"):
            absorbing_entry_time(0.4, 1.0)

    def test_default_system_quantities(self, nse):
        assert nse.l2b_bound == pytest.approx(1.0, rel=1e-12)
        assert nse.radius == pytest.approx(3.163953413738653, rel=1e-12)
        assert nse.space.ball_radius == pytest.approx(2.0 * nse.radius, rel=1e-12)


class TestForcing:
    def test_default_forcing_window_bound_is_one(self):
        assert default_forcing().translational_bound() == pytest.approx(
            1.0, rel=1e-12)

    def test_static_bound_is_instantaneous_norm(self):
        prof = ForcingProfile([ForcingMode(k=(2, 0, 0), amp=2.0)])
        # |amp|^2 / |k|^2 = 4/4 = 1
        assert prof.translational_bound() == pytest.approx(1.0, rel=1e-12)

    def test_sinusoidal_bound_quadrature_oracle(self):
        # sin^2 over a full period averages to 1/2
        prof = ForcingProfile([ForcingMode(k=(1, 0, 0), amp=1.0, kind="sin",
                                           omega=2.0 * math.pi)])
        assert prof.translational_bound() == pytest.approx(0.5, abs=1e-5)

    def test_normality_zero_force_gets_the_cap(self):
        assert ForcingProfile([]).normality_check([0.1]) == [(0.1, 1.0)]

    def test_normality_generous_eps_gets_the_cap(self):
        assert default_forcing().normality_check([2.0]) == [(2.0, 1.0)]

    def test_normality_delta_scales_as_eps_over_magnitude(self):
        # static force with ||g||_{V'}^2 = 2: delta(eps) = eps / 2
        prof = ForcingProfile([ForcingMode(k=(1, 0, 0), amp=math.sqrt(2.0))])
        (eps, delta), = prof.normality_check([0.5])
        assert delta == pytest.approx(0.25, abs=1e-6)

    def test_default_normality_table(self):
        out = default_forcing().normality_check([0.25, 0.5, 1.0])
        for (eps, delta), want in zip(out, (0.25, 0.5, 1.0)):
            assert delta == pytest.approx(want, abs=1e-6)

    def test_window_integral_static(self):
        assert default_forcing().window_integral_sup(0.3) == pytest.approx(
            0.3, rel=1e-12)

    def test_hermitian_detection(self):
        assert default_forcing().is_hermitian()
        lone = ForcingProfile([ForcingMode(k=(1, 0, 0), amp=1.0)])
        assert not lone.is_hermitian()
        a = complex(0.2, 0.7)
        good = ForcingProfile([ForcingMode(k=(1, 2, 0), amp=a),
                               ForcingMode(k=(-1, -2, 0), amp=a.conjugate())])
        assert good.is_hermitian()
        bad = ForcingProfile([ForcingMode(k=(1, 2, 0), amp=a),
                              ForcingMode(k=(-1, -2, 0), amp=a)])
        assert not bad.is_hermitian()

    def test_roundtrip_through_dict(self):
        prof = ForcingProfile([
            ForcingMode(k=(1, 0, 0), amp=complex(0.5, -0.25), kind="sin",
                        omega=1.5, phase=0.4),
            ForcingMode(k=(0, 1, 0), amp=1.0, kind="sampled",
                        times=(0.0, 1.0), values=(0.0 + 0j, 1.0 + 0j)),
        ])
        back = ForcingProfile.from_dict(prof.to_dict())
        probe = np.linspace(0.0, 2.0, 9)
        for e0, e1 in zip(prof.entries, back.entries):
            assert e0.k == e1.k
            assert np.allclose(e0.envelope(probe), e1.envelope(probe))

    def test_empty_mode_list_is_zero_force(self):
        prof = ForcingProfile.from_dict({"modes": []})
        assert prof.vprime_norm_sq(0.0) == 0.0
        assert prof.is_static()

    @pytest.mark.parametrize("obj", [
        {},                                                   # no modes key
        {"modes": "nope"},                                    # not a list
        {"modes": [{"k": [1, 0], "amp": [1, 0]}]},            # short k
        {"modes": [{"k": [0, 0, 0], "amp": [1, 0]}]},         # mean mode
        {"modes": [{"k": [1, 0, 0], "amp": [1, 0]},
                   {"k": [1, 0, 0], "amp": [1, 0]}]},         # duplicate
        {"modes": [{"k": [1, 0, 0], "amp": [1, 0],
                    "time": {"kind": "ramp"}}]},              # unknown law
        {"modes": [{"k": [1, 0, 0], "amp": [1, 0],
                    "time": {"kind": "sampled", "times": [0.0],
                             "values": [[0.0, 0.0]]}}]},      # short sample
        {"modes": [{"k": [1, 0, 0], "amp": 1.0}]},            # amp not a pair
    ])
    def test_malformed_forcing_rejected(self, obj):
        with pytest.raises(ForcingFormatError):
            ForcingProfile.from_dict(obj)

    def test_transverse_unit_is_orthogonal_and_mirror_stable(self):
        basis = get_basis(4)
        for k in ((1, 0, 0), (1, 2, 0), (2, 1, 2), (0, 0, 3)):
            e = basis.transverse_unit(k)
            assert abs(float(np.dot(e, np.asarray(k, float)))) <= 1e-12
            assert np.allclose(e, basis.transverse_unit(tuple(-c for c in k)))
            assert np.linalg.norm(e) == pytest.approx(1.0, abs=1e-12)
