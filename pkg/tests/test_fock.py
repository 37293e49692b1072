"""Truncated Fock engine: heralded state, loss channel, basis changes,
mode reductions, and their agreement with the closed forms.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from heraldsim.analytic import apply_loss, fidelity_optimal, fixed_mode_distribution
from heraldsim.errors import (
    CutoffExceeded,
    GridMismatch,
    InvalidDensity,
    ModesNotOrthogonal,
    NotUnitary,
    OutOfRange,
    SpanDeficit,
)
from heraldsim.fock import (
    ModeRegister,
    MultimodeState,
    apply_loss_channel,
    basis_tuples,
    build_heralded_state,
    change_mode_basis,
    check_density,
    decomposition_coeffs,
    density_matrix_from_json,
    density_matrix_to_json,
    loss_channel_single,
    photon_distribution,
    reduce_to_mode,
    reduce_to_mode_pair,
)
from heraldsim.modes import (
    extend_orthonormal_basis,
    make_symmetric_antisymmetric,
    make_trigger_mode,
    overlap,
)

from conftest import ETA, GAMMA, MID, herald_times

# (1 + I)/(1 - I) at 40 ns: amplitude ratio of the two-photon components
AMPLITUDE_RATIO_40NS = 1.01981861368


def heralded_scene(grid, delta_t):
    """Trigger modes, adapted pair, and the heralded state on [g1, h2]."""
    t1, t2 = herald_times(delta_t)
    g1 = make_trigger_mode(t1, GAMMA, grid)
    g2 = make_trigger_mode(t2, GAMMA, grid)
    f1, f2 = make_symmetric_antisymmetric(g1, g2)
    register = ModeRegister(modes=tuple(extend_orthonormal_basis([g1, g2], grid, 2)))
    state = build_heralded_state(register, g1, g2)
    return g1, g2, f1, f2, state


class TestBasisTuples:
    def test_two_modes_cutoff_two(self):
        assert basis_tuples(2, 2) == [
            (0, 0),
            (0, 1),
            (0, 2),
            (1, 0),
            (1, 1),
            (2, 0),
        ]

    def test_counts(self):
        # total occupation <= n_max over m modes: C(m + n_max, m) states
        assert len(basis_tuples(3, 2)) == math.comb(5, 3)
        assert len(basis_tuples(1, 4)) == 5


class TestModeRegister:
    def test_rejects_non_orthonormal(self, grid, pair40):
        g1, g2 = pair40  # overlap ~ 0.0098 > 1e-8
        with pytest.raises(ModesNotOrthogonal):
            ModeRegister(modes=(g1, g2))

    def test_rejects_empty(self):
        with pytest.raises(OutOfRange):
            ModeRegister(modes=())

    def test_rejects_mixed_grids(self, grid):
        from heraldsim.modes import default_grid

        a = make_trigger_mode(MID, GAMMA, grid)
        b = make_trigger_mode(MID, GAMMA, default_grid(dt=0.2e-9))
        with pytest.raises(GridMismatch):
            ModeRegister(modes=(a, b))

    def test_accepts_adapted_pair(self, pair40):
        f1, f2 = make_symmetric_antisymmetric(*pair40)
        assert len(ModeRegister(modes=(f1, f2))) == 2


class TestDecompositionCoeffs:
    def test_orthogonalized_register(self, grid, pair40):
        g1, g2 = pair40
        ov = overlap(g1, g2)
        register = ModeRegister(modes=tuple(extend_orthonormal_basis([g1, g2], grid, 2)))
        coeffs = decomposition_coeffs(register, g1, g2)
        np.testing.assert_allclose(coeffs.alpha, [1.0, 0.0], atol=1e-9)
        np.testing.assert_allclose(
            coeffs.beta, [ov, math.sqrt(1.0 - ov * ov)], atol=1e-9
        )
        np.testing.assert_allclose(
            coeffs.matrix, np.outer(coeffs.alpha, coeffs.beta), atol=1e-15
        )
        assert abs(coeffs.residual1) < 1e-9
        assert abs(coeffs.residual2) < 1e-9

    def test_residual_outside_span(self, grid, pair40):
        g1, g2 = pair40
        f1, _ = make_symmetric_antisymmetric(g1, g2)
        register = ModeRegister(modes=(f1,))
        coeffs = decomposition_coeffs(register, g1, g2)
        ov = overlap(g1, g2)
        # each trigger leaves (1 - I)/2 of its mass outside the f1 span
        assert coeffs.residual1 == pytest.approx((1.0 - ov) / 2.0, abs=1e-9)


class TestBuildHeraldedState:
    def test_amplitudes_on_adapted_pair(self, pair40):
        g1, g2 = pair40
        ov = overlap(g1, g2)
        f1, f2 = make_symmetric_antisymmetric(g1, g2)
        register = ModeRegister(modes=(f1, f2))
        state = build_heralded_state(register, g1, g2)
        norm = 2.0 * (1.0 + ov * ov)
        i20 = state.index_of((2, 0))
        i02 = state.index_of((0, 2))
        i11 = state.index_of((1, 1))
        assert state.rho[i20, i20].real == pytest.approx((1 + ov) ** 2 / norm, abs=1e-10)
        assert state.rho[i02, i02].real == pytest.approx((1 - ov) ** 2 / norm, abs=1e-10)
        assert abs(state.rho[i11, i11]) < 1e-12
        # opposite signs of the two components
        assert state.rho[i20, i02].real == pytest.approx(
            -(1 - ov * ov) / norm, abs=1e-10
        )

    def test_amplitude_ratio_frozen(self, pair40):
        g1, g2 = pair40
        f1, f2 = make_symmetric_antisymmetric(g1, g2)
        state = build_heralded_state(ModeRegister(modes=(f1, f2)), g1, g2)
        i20 = state.index_of((2, 0))
        i02 = state.index_of((0, 2))
        ratio = math.sqrt(state.rho[i20, i20].real / state.rho[i02, i02].real)
        # discrete overlap differs from the continuum value by < 1e-4
        assert ratio == pytest.approx(AMPLITUDE_RATIO_40NS, abs=1e-3)

    def test_zero_delay_pure_two_photon(self, grid):
        g = make_trigger_mode(MID, GAMMA, grid)
        register = ModeRegister(modes=(g,))
        state = build_heralded_state(register, g, g)
        i2 = state.index_of((2,))
        assert state.rho[i2, i2].real == pytest.approx(1.0, abs=1e-12)

    def test_span_deficit(self, pair40):
        g1, g2 = pair40
        f1, _ = make_symmetric_antisymmetric(g1, g2)
        with pytest.raises(SpanDeficit):
            build_heralded_state(ModeRegister(modes=(f1,)), g1, g2)

    def test_cutoff_guard(self, pair40):
        g1, g2 = pair40
        f1, f2 = make_symmetric_antisymmetric(g1, g2)
        with pytest.raises(CutoffExceeded):
            build_heralded_state(ModeRegister(modes=(f1, f2)), g1, g2, n_max=1)


class TestLossChannel:
    def test_identity_at_unit_transmission(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        out = apply_loss_channel(state, 1.0)
        np.testing.assert_allclose(out.rho, state.rho, atol=1e-14)

    def test_two_photon_through_loss(self, grid):
        g = make_trigger_mode(MID, GAMMA, grid)
        state = build_heralded_state(ModeRegister(modes=(g,)), g, g)
        lossy = apply_loss_channel(state, ETA)
        np.testing.assert_allclose(
            np.real(np.diag(lossy.rho)), [0.0576, 0.3648, 0.5776], atol=1e-12
        )

    @pytest.mark.parametrize("eta", [0.0, 0.3, 0.76, 1.0])
    def test_trace_preserved(self, grid, eta):
        *_, state = heralded_scene(grid, 40e-9)
        lossy = apply_loss_channel(state, eta)
        assert np.trace(lossy.rho).real == pytest.approx(1.0, abs=1e-12)

    def test_purity_non_increasing(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        lossy = apply_loss_channel(state, 0.5)
        purity = lambda r: float(np.real(np.trace(r @ r)))
        assert purity(lossy.rho) <= purity(state.rho) + 1e-12

    def test_bad_transmission(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        with pytest.raises(OutOfRange):
            apply_loss_channel(state, 1.5)

    def test_single_mode_channel_trace(self):
        rho = np.diag([0.1, 0.2, 0.7]).astype(complex)
        out = loss_channel_single(rho, 0.37)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-14)
        with pytest.raises(OutOfRange):
            loss_channel_single(rho, -0.1)


class TestChangeModeBasis:
    def test_identity_rotation(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        out = change_mode_basis(state, np.eye(2))
        np.testing.assert_allclose(out.rho, state.rho, atol=1e-12)

    def test_rotation_to_adapted_pair(self, grid):
        g1, g2, f1, f2, state = heralded_scene(grid, 40e-9)
        ov = overlap(g1, g2)
        c = math.sqrt((1 + ov) / 2)
        s = math.sqrt((1 - ov) / 2)
        # rows express (f1, f2) in the register basis (g1, h2)
        rotated = change_mode_basis(state, np.array([[c, s], [s, -c]]))
        norm = 2.0 * (1.0 + ov * ov)
        diag = np.real(np.diag(rotated.rho))
        i20 = rotated.index_of((2, 0))
        i02 = rotated.index_of((0, 2))
        i11 = rotated.index_of((1, 1))
        assert diag[i20] == pytest.approx((1 + ov) ** 2 / norm, abs=1e-10)
        assert diag[i02] == pytest.approx((1 - ov) ** 2 / norm, abs=1e-10)
        assert abs(diag[i11]) < 1e-10
        # the register's mode functions were recombined accordingly
        assert overlap(rotated.register.modes[0], f1) == pytest.approx(1.0, abs=1e-9)

    def test_involution_returns_state(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        u = np.array([[0.6, 0.8], [0.8, -0.6]])
        back = change_mode_basis(change_mode_basis(state, u), u)
        np.testing.assert_allclose(back.rho, state.rho, atol=1e-10)

    def test_total_photon_number_invariant(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        u = np.array([[0.6, 0.8], [0.8, -0.6]])
        rotated = change_mode_basis(state, u)

        def mean_total(st):
            occ = np.array([sum(t) for t in st.basis], dtype=float)
            return float(occ @ np.real(np.diag(st.rho)))

        assert mean_total(rotated) == pytest.approx(mean_total(state), abs=1e-10)
        assert mean_total(state) == pytest.approx(2.0, abs=1e-10)

    def test_rejects_non_orthogonal(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        with pytest.raises(NotUnitary):
            change_mode_basis(state, np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_rejects_complex(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        u = np.array([[1j, 0.0], [0.0, 1.0]])
        with pytest.raises(NotUnitary):
            change_mode_basis(state, u)

    def test_rejects_wrong_shape(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        with pytest.raises(NotUnitary):
            change_mode_basis(state, np.eye(3))


class TestReduceToMode:
    def test_zero_delay_adapted_mode_is_pure(self, grid):
        g = make_trigger_mode(MID, GAMMA, grid)
        state = build_heralded_state(ModeRegister(modes=(g,)), g, g)
        rho = reduce_to_mode(state, g)
        np.testing.assert_allclose(np.real(np.diag(rho)), [0.0, 0.0, 1.0], atol=1e-12)

    def test_adapted_mode_weights(self, grid):
        g1, g2, f1, f2, state = heralded_scene(grid, 40e-9)
        ov = overlap(g1, g2)
        f_plus, f_minus = fidelity_optimal(ov)
        diag = np.real(np.diag(reduce_to_mode(state, f1)))
        np.testing.assert_allclose(diag, [f_minus, 0.0, f_plus], atol=1e-10)

    def test_fixed_mode_weights(self, grid):
        g1, g2, *_, state = heralded_scene(grid, 40e-9)
        ov = overlap(g1, g2)
        diag = np.real(np.diag(reduce_to_mode(state, g1)))
        np.testing.assert_allclose(diag, fixed_mode_distribution(ov).probs, atol=1e-10)

    def test_orthogonal_mode_sees_vacuum(self, grid):
        g1, g2, *_, state = heralded_scene(grid, 40e-9)
        far = extend_orthonormal_basis([g1, g2], grid, 3)[2]
        diag = np.real(np.diag(reduce_to_mode(state, far)))
        np.testing.assert_allclose(diag, [1.0, 0.0, 0.0], atol=1e-10)

    def test_rejects_unnormalized(self, grid):
        g1, g2, *_, state = heralded_scene(grid, 40e-9)
        from heraldsim.modes import ModeFunction

        half = ModeFunction(grid=grid, samples=0.5 * g1.samples)
        with pytest.raises(GridMismatch):
            reduce_to_mode(state, half)


class TestOracleEquivalence:
    def test_reduced_distributions_match_closed_forms(self, grid):
        # dual-route check at several delays, lossless and lossy
        rng = np.random.default_rng(7)
        for delta_ns in rng.uniform(0.5, 60.0, size=5):
            g1, g2, f1, f2, state = heralded_scene(grid, delta_ns * 1e-9)
            ov = overlap(g1, g2)
            f_plus, f_minus = fidelity_optimal(ov)
            np.testing.assert_allclose(
                np.real(np.diag(reduce_to_mode(state, f1))),
                [f_minus, 0.0, f_plus],
                atol=1e-10,
            )
            np.testing.assert_allclose(
                np.real(np.diag(reduce_to_mode(state, g1))),
                fixed_mode_distribution(ov).probs,
                atol=1e-10,
            )
            lossy = apply_loss_channel(state, ETA)
            np.testing.assert_allclose(
                np.real(np.diag(reduce_to_mode(lossy, g1))),
                apply_loss(fixed_mode_distribution(ov), ETA).probs,
                atol=1e-10,
            )

    def test_pair_reduction_marginals(self, grid):
        g1, g2, f1, f2, state = heralded_scene(grid, 40e-9)
        rho_pair = reduce_to_mode_pair(state, f1, f2).reshape(3, 3, 3, 3)
        marg_a = np.einsum("ikjk->ij", rho_pair)
        marg_b = np.einsum("kikj->ij", rho_pair)
        np.testing.assert_allclose(marg_a, reduce_to_mode(state, f1), atol=1e-10)
        np.testing.assert_allclose(marg_b, reduce_to_mode(state, f2), atol=1e-10)

    def test_pair_reduction_rejects_overlapping(self, grid):
        g1, g2, f1, f2, state = heralded_scene(grid, 40e-9)
        with pytest.raises(ModesNotOrthogonal):
            reduce_to_mode_pair(state, g1, g2)


class TestStateValidation:
    def test_multimode_state_shape_guard(self, pair40):
        f1, f2 = make_symmetric_antisymmetric(*pair40)
        register = ModeRegister(modes=(f1, f2))
        with pytest.raises(InvalidDensity):
            MultimodeState(register=register, n_max=2, rho=np.eye(4) / 4.0)

    def test_multimode_state_cutoff_guard(self, pair40):
        f1, f2 = make_symmetric_antisymmetric(*pair40)
        register = ModeRegister(modes=(f1, f2))
        with pytest.raises(CutoffExceeded):
            MultimodeState(register=register, n_max=1, rho=np.eye(3) / 3.0)

    def test_check_density_guards(self):
        with pytest.raises(InvalidDensity):
            check_density(np.diag([0.6, 0.6]).astype(complex))
        bad_h = np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex)
        with pytest.raises(InvalidDensity):
            check_density(bad_h)
        neg = np.array([[1.2, 0.0], [0.0, -0.2]], dtype=complex)
        with pytest.raises(InvalidDensity):
            check_density(neg)

    def test_photon_distribution_from_density(self):
        d = photon_distribution(np.diag([0.25, 0.25, 0.5]).astype(complex))
        np.testing.assert_allclose(d.probs, [0.25, 0.25, 0.5], atol=1e-15)


class TestDensityMatrixJson:
    def test_round_trip_exact(self, grid):
        *_, state = heralded_scene(grid, 40e-9)
        rho = reduce_to_mode(apply_loss_channel(state, ETA), state.register.modes[0])
        back = density_matrix_from_json(density_matrix_to_json(rho))
        np.testing.assert_array_equal(back, rho)

    def test_complex_entries_preserved(self):
        rho = np.array([[0.5, 0.1j], [-0.1j, 0.5]], dtype=complex)
        back = density_matrix_from_json(density_matrix_to_json(rho))
        np.testing.assert_array_equal(back, rho)
