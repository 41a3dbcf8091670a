import numpy as np
import pytest

import oracles
import qetsim as q
from qetsim.chain import CALIBRATION_TOL, window_sites
from qetsim.pauli import PauliTerm, apply, commutator, expectation, to_matrix

from conftest import random_state


class TestBuildIsing:
    def test_decoupled_chain(self):
        model = q.build_ising(4, 1.0, 0.0)
        dense = to_matrix(model.total, 4)
        e0, g = oracles.ground_vector(dense)
        assert e0 == pytest.approx(-4.0, abs=1e-12)
        assert np.argmax(np.abs(g)) == 0  # all spins up

    def test_bond_coefficients_periodic(self):
        model = q.build_ising(4, 0.0, 1.0)
        want = oracles.ising_matrix(4, 0.0, 1.0, "periodic")
        assert np.max(np.abs(to_matrix(model.total, 4) - want)) < 1e-12

    def test_bond_coefficients_open(self):
        model = q.build_ising(5, 0.5, 1.3, boundary="open")
        want = oracles.ising_matrix(5, 0.5, 1.3, "open")
        assert np.max(np.abs(to_matrix(model.total, 5) - want)) < 1e-12
        assert model.local_terms[0].support == {0, 1}
        assert model.local_terms[4].support == {3, 4}

    def test_near_critical_solvers_agree(self):
        model = q.build_ising(8, 1.0, 1.0)
        dense = q.dense_spectrum(model)
        krylov = q.krylov_ground(model)
        assert dense.eigenvalues[0] == pytest.approx(krylov.eigenvalues[0], abs=1e-8)

    def test_too_small_chain_rejected(self):
        with pytest.raises(ValueError, match="3 sites"):
            q.build_ising(2, 1.0, 1.0)


class TestBuildCustom:
    def test_reproduces_ising(self):
        reference = q.build_ising(6, 1.0, 0.7)
        custom = q.build_custom(
            6, 1, lambda n: reference.local_terms[n], boundary="periodic"
        )
        assert np.max(np.abs(
            to_matrix(custom.total, 6) - to_matrix(reference.total, 6)
        )) < 1e-13

    def test_exactly_local_control_model(self):
        model = q.separable_control(6)
        cal, spec = q.solve_and_calibrate(model)
        assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-10)
        assert all(abs(s + 1.0) < 1e-10 for s in cal.shifts)

    def test_random_local_terms_calibrate(self):
        rng = np.random.default_rng(2024)

        def factory(n):
            sites = (n - 1, n, n + 1)
            terms = []
            for _ in range(3):
                picked = rng.choice(3, size=rng.integers(1, 4), replace=False)
                factors = {int(sites[k]) % 6: "xyz"[rng.integers(3)] for k in picked}
                terms.append(PauliTerm(float(rng.standard_normal()), factors))
            return q.OperatorSum(tuple(terms))

        model = q.build_custom(6, 1, factory)
        cal, spec = q.solve_and_calibrate(model)
        worst = max(abs(expectation(spec.ground, t).real) for t in cal.local_terms)
        assert worst < CALIBRATION_TOL
        assert apply(cal.total, spec.ground).norm < 1e-7
        assert spec.eigenvalues[0] > -1e-8

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            q.build_custom(4, 1, lambda n: 1j * q.sigma("x", n) if n == 2 else q.sigma("z", n))

    def test_support_violation_rejected(self):
        with pytest.raises(ValueError, match="window"):
            q.build_custom(
                6, 1, lambda n: q.sigma("x", n) * q.sigma("x", (n + 3) % 6),
                boundary="periodic",
            )


class TestCalibrate:
    def test_product_ground_state_shift(self, separable8):
        cal, spec = separable8
        assert all(s == pytest.approx(-1.0, abs=1e-12) for s in cal.shifts)
        # shifted term is -sigma^z + 1
        term = cal.local_terms[0]
        keys = {t.factors: t.coefficient for t in term.terms}
        assert keys[()] == pytest.approx(1.0)
        assert keys[((0, "z"),)] == pytest.approx(-1.0)

    def test_expectations_vanish(self, critical8):
        cal, spec = critical8
        worst = max(abs(expectation(spec.ground, t).real) for t in cal.local_terms)
        assert worst < CALIBRATION_TOL

    def test_periodic_shifts_uniform(self, critical8):
        cal, _ = critical8
        assert max(cal.shifts) - min(cal.shifts) < 1e-9

    def test_rejects_non_eigenstate(self):
        model = q.build_ising(6, 1.0, 1.0)
        with pytest.raises(ValueError, match="eigenstate"):
            q.calibrate(model, random_state(6, 7))

    def test_ground_annihilated(self, critical8):
        cal, spec = critical8
        assert apply(cal.total, spec.ground).norm < 1e-7


class TestEnergyOperators:
    def test_localized_energy_window(self, critical8):
        cal, _ = critical8
        got = q.localized_energy(cal, 3)
        want = cal.local_terms[2] + cal.local_terms[3] + cal.local_terms[4]
        assert (got - want).terms == ()

    def test_localized_energy_vanishes_on_ground(self, critical8):
        cal, spec = critical8
        for n in range(8):
            assert abs(expectation(spec.ground, q.localized_energy(cal, n)).real) < 1e-9

    def test_window_commutes_with_distant_spins(self, critical8):
        cal, _ = critical8
        window = q.localized_energy(cal, 3)
        for m in range(8):
            if q.site_distance(cal, m, 3) > 2 * cal.interaction_range:
                for axis in "xyz":
                    assert commutator(window, q.sigma(axis, m)).terms == ()

    def test_region_full_chain_is_total(self, critical8):
        cal, _ = critical8
        region = q.region_energy(cal, q.RegionSpec(0, 7))
        assert (region - cal.total).terms == ()

    def test_region_expectation_vanishes_on_ground(self, critical8):
        cal, spec = critical8
        value = expectation(spec.ground, q.region_energy(cal, q.RegionSpec(2, 5)))
        assert abs(value.real) < 1e-9

    def test_disjoint_regions_add_up(self):
        cal, _ = q.solve_and_calibrate(q.build_ising(6, 1.0, 0.8), method="dense")
        psi = random_state(6, 55)
        left = expectation(psi, q.region_energy(cal, q.RegionSpec(0, 2)))
        right = expectation(psi, q.region_energy(cal, q.RegionSpec(3, 5)))
        whole = expectation(psi, cal.total)
        assert abs(left + right - whole) < 1e-10

    def test_region_width_guard(self, critical8):
        cal, _ = critical8
        with pytest.raises(ValueError, match="width"):
            q.region_energy(cal, q.RegionSpec(3, 3))

    def test_requires_calibration(self):
        model = q.build_ising(6, 1.0, 1.0)
        with pytest.raises(ValueError, match="calibrated"):
            q.localized_energy(model, 2)


class TestInvariants:
    def test_term_additivity(self, critical8):
        cal, _ = critical8
        psi = random_state(8, 66)
        total = sum(expectation(psi, t) for t in cal.local_terms)
        assert abs(total - expectation(psi, cal.total)) < 1e-10

    def test_nonnegative_spectrum(self, critical8):
        cal, spec = critical8
        assert spec.eigenvalues[0] > -1e-8
        for seed in range(5):
            psi = random_state(8, 600 + seed)
            assert expectation(psi, cal.total).real >= -1e-8

    def test_correlation_witness_z_probe(self, critical8):
        # the library records the witnessing pair; a z probe two or more
        # sites away sees the entanglement clearly
        cal, spec = critical8
        witnesses = {
            (n, m): q.correlation_witness(cal, spec.ground, n, m, axis="z")
            for n in range(8)
            for m in range(8)
            if q.site_distance(cal, n, m) >= 2
        }
        best_pair = max(witnesses, key=witnesses.get)
        assert witnesses[best_pair] > 1e-3

    def test_correlation_witness_x_probe_vanishes(self, critical8):
        # spin-flip parity of the chain forces every term to be even while
        # a single distant sigma^x is odd, so this witness is exactly zero;
        # the z probe above is the one that certifies entanglement
        cal, spec = critical8
        worst = max(
            q.correlation_witness(cal, spec.ground, n, m, axis="x")
            for n in range(8)
            for m in range(8)
            if q.site_distance(cal, n, m) >= 2
        )
        assert worst < 1e-10

    def test_eigenstate_obstruction(self, critical8):
        cal, spec = critical8
        for n in range(8):
            term = cal.local_terms[n]
            mean = expectation(spec.ground, term).real
            moved = apply(term, spec.ground)
            deviation = np.linalg.norm(
                moved.amplitudes - mean * spec.ground.amplitudes
            )
            assert deviation > 1e-3

    def test_window_sites_clipping(self):
        open_model = q.build_ising(6, 1.0, 1.0, boundary="open")
        assert window_sites(open_model, 0) == (0, 1)
        ring = q.build_ising(6, 1.0, 1.0)
        assert window_sites(ring, 0) == (0, 1, 5)
