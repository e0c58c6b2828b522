import numpy as np
import pytest

from dbac_lab import qmath
from dbac_lab.baselines import (
    MixednessState,
    PolarizedQubit,
    cem_round_closed,
    cem_round_simulated,
    hbac_step,
    mixedness_of,
    ppa_round,
    target_polarization,
    thermal_qubit,
)
from dbac_lab.dbac import dbac_step_exact
from dbac_lab.errors import ContractViolationError
from dbac_lab.states import DensityMatrix, PureState, pseudo_pure, rx_init

from conftest import random_unitary


def _product_register(*eps):
    return DensityMatrix(qmath.kron_all([thermal_qubit(e).matrix for e in eps]))


class TestThermalQubit:
    def test_full_polarization(self):
        assert np.allclose(thermal_qubit(1.0).matrix, np.diag([1.0, 0.0]))

    def test_zero_polarization(self):
        assert np.allclose(thermal_qubit(0.0).matrix, np.eye(2) / 2)

    def test_formula(self):
        assert np.allclose(thermal_qubit(0.3).matrix, np.diag([0.65, 0.35]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ContractViolationError):
            thermal_qubit(1.2)


class TestPpaRound:
    def test_zero_polarization_stays_zero(self):
        out = ppa_round(_product_register(0.0, 0.0, 0.0))
        assert abs(target_polarization(out)) < 1e-14

    def test_pure_ground_unchanged(self):
        out = ppa_round(_product_register(1.0, 1.0, 1.0))
        assert abs(target_polarization(out) - 1.0) < 1e-13

    def test_small_polarization_gain(self):
        eps = 1e-3
        out = ppa_round(_product_register(eps, eps, eps))
        assert abs(target_polarization(out) / eps - 1.5) < 1e-4

    @pytest.mark.parametrize("eps", [0.05, 0.2, 0.5])
    def test_equal_bias_closed_form(self, eps):
        out = ppa_round(_product_register(eps, eps, eps))
        assert target_polarization(out) == pytest.approx((3 * eps - eps**3) / 2, abs=1e-13)

    def test_distinct_bias_closed_form(self):
        a, b, c = 0.2, 0.05, 0.11
        out = ppa_round(_product_register(a, b, c))
        assert target_polarization(out) == pytest.approx((a + b + c - a * b * c) / 2, abs=1e-13)

    def test_unitary_spectrum_preserved(self, rng):
        reg = _product_register(0.3, 0.1, 0.25)
        out = ppa_round(reg)
        before = np.sort(np.linalg.eigvalsh(reg.matrix))
        after = np.sort(np.linalg.eigvalsh(out.matrix))
        assert np.abs(before - after).max() < 1e-11

    def test_polarization_never_decreases_for_equal_bias(self):
        for eps in np.linspace(0, 1, 21):
            out = ppa_round(_product_register(eps, eps, eps))
            assert target_polarization(out) >= eps - 1e-12

    def test_dimension_checked(self):
        with pytest.raises(Exception):
            ppa_round(DensityMatrix(np.eye(4) / 4))


class TestHbacStep:
    def test_all_zero_forever(self):
        reg = [PolarizedQubit(0.0)] * 3
        for _ in range(4):
            reg = hbac_step(reg, 0.0)
        assert all(q.eps == 0 for q in reg)

    def test_rounds_monotone_and_bounded(self):
        reg = [PolarizedQubit(0.0)] * 3
        prev = 0.0
        for _ in range(12):
            reg = hbac_step(reg, 0.1)
            assert reg[0].eps >= prev - 1e-12
            assert reg[0].eps <= 1.0
            prev = reg[0].eps

    def test_steady_state_fixed_point(self):
        # target polarization 2 eb / (1 + eb^2) is invariant under another round
        eb = 0.2
        steady = 2 * eb / (1 + eb * eb)
        reg = [PolarizedQubit(steady), PolarizedQubit(eb), PolarizedQubit(eb)]
        out = hbac_step(reg, eb)
        assert out[0].eps == pytest.approx(steady, abs=1e-12)
        assert [q.eps for q in out[1:]] == [eb, eb]

    def test_converges_to_steady_state(self):
        eb = 0.1
        reg = [PolarizedQubit(0.0)] * 3
        for _ in range(60):
            reg = hbac_step(reg, eb)
        assert reg[0].eps == pytest.approx(2 * eb / (1 + eb * eb), abs=1e-9)

    @pytest.mark.parametrize("eps_t,eps_b", [(0.0, 0.1), (0.1, 0.1), (0.15, 0.3), (0.4, 0.5)])
    def test_never_decreases_when_bath_at_least_target(self, eps_t, eps_b):
        reg = [PolarizedQubit(eps_t), PolarizedQubit(eps_b), PolarizedQubit(eps_b)]
        out = hbac_step(reg, eps_b)
        assert out[0].eps >= eps_t - 1e-12

    def test_register_size_checked(self):
        with pytest.raises(ContractViolationError):
            hbac_step([PolarizedQubit(0.1)] * 2, 0.1)


class TestCemClosed:
    def test_pure_input(self):
        out = cem_round_closed(0.0)
        assert out == {"x_next": 0.0, "p_success": 1.0}

    def test_half_mixedness(self):
        out = cem_round_closed(0.5)
        assert out["x_next"] == pytest.approx(0.3846153846, abs=1e-10)
        assert out["p_success"] == pytest.approx(0.8125, abs=1e-15)

    def test_small_x_halves(self):
        for x in (1e-3, 1e-5):
            assert cem_round_closed(x)["x_next"] / x == pytest.approx(0.5, abs=2 * x)

    def test_strict_decrease(self):
        for x in np.linspace(0.01, 0.99, 40):
            assert cem_round_closed(x)["x_next"] < x

    def test_domain_checked(self):
        with pytest.raises(ContractViolationError):
            cem_round_closed(1.0)


class TestCemSimulated:
    def _state(self, x, psi=None):
        psi = psi or PureState.from_vector(np.array([0.6, 0.8j]))
        return MixednessState(x, psi).density()

    def test_pure_state_passes_through(self):
        psi = rx_init(1.1)
        out = cem_round_simulated(psi.density())
        assert out["p_success"] == pytest.approx(1.0, abs=1e-12)
        assert np.abs(out["rho_next"].matrix - psi.density().matrix).max() < 1e-12

    def test_maximally_mixed_boundary(self):
        out = cem_round_simulated(DensityMatrix(np.eye(2) / 2))
        assert out["p_success"] == pytest.approx(0.75, abs=1e-12)

    @pytest.mark.parametrize("x", np.arange(0.1, 0.95, 0.1))
    def test_agrees_with_closed_form(self, x):
        x = float(round(x, 10))
        closed = cem_round_closed(x)
        sim = cem_round_simulated(self._state(x))
        assert abs(mixedness_of(sim["rho_next"]) - closed["x_next"]) < 1e-12
        assert abs(sim["p_success"] - closed["p_success"]) < 1e-12

    def test_failure_branch_weight(self):
        for x in (0.2, 0.6, 0.9):
            sim = cem_round_simulated(self._state(x))
            assert 1 - sim["p_success"] == pytest.approx((2 * x - x * x) / 4, abs=1e-12)

    def test_output_commutes_with_input(self):
        rho = self._state(0.4)
        out = cem_round_simulated(rho)["rho_next"]
        comm = rho.matrix @ out.matrix - out.matrix @ rho.matrix
        assert np.abs(comm).max() < 1e-11

    def test_pure_part_preserved(self, rng):
        psi = PureState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2))
        rho = self._state(0.3, psi)
        out = cem_round_simulated(rho)["rho_next"]
        # dominant eigenvector of the output is still psi
        w, v = np.linalg.eigh(out.matrix)
        top = v[:, np.argmax(w)]
        assert abs(np.vdot(top, psi.amplitudes)) ** 2 > 1 - 1e-10


class TestCoherentVsMixednessContrast:
    def test_unitary_cooling_leaves_mixedness_untouched(self, rng):
        # conjugating a pseudo-pure state by the cooling step moves the pure
        # part only: the mixing weight p is invariant, unlike the two-copy round
        p = 0.3
        psi = rx_init(1.3)
        stepped = dbac_step_exact(psi, np.pi / 4)
        u = random_unitary(rng)  # any unitary keeps the identity part fixed
        before = pseudo_pure(p, psi)
        after = DensityMatrix(u @ before.matrix @ u.conj().T)
        target = pseudo_pure(p, PureState.from_vector(u @ psi.amplitudes))
        assert np.abs(after.matrix - target.matrix).max() < 1e-13
        assert mixedness_of(after) == pytest.approx(mixedness_of(before), abs=1e-12)
        # while the interferential round strictly reduces mixedness
        reduced = cem_round_simulated(before)["rho_next"]
        assert mixedness_of(reduced) < mixedness_of(before) - 1e-3
