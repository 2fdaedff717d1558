import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscbath import sma
from helpers import random_density, random_hermitian, random_orthonormal_basis


def rotated_basis_2d(theta):
    vectors = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]],
        dtype=complex,
    )
    return sma.LabeledBasis(("u0", "u1"), vectors)


class TestLabeledBasis:
    def test_standard_basis(self):
        basis = sma.LabeledBasis.standard(3)
        assert basis.size == 3
        assert basis.ambient_dim == 3
        assert np.array_equal(basis.vector("1"), np.array([0, 1, 0], dtype=complex))

    def test_rejects_non_orthonormal(self):
        vecs = np.array([[1.0, 0.9], [0.0, 0.1]], dtype=complex)
        with pytest.raises(ValueError, match="orthonormal"):
            sma.LabeledBasis(("a", "b"), vecs)

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError, match="unique"):
            sma.LabeledBasis(("a", "a"), np.eye(2, dtype=complex))

    def test_unknown_label(self):
        basis = sma.LabeledBasis.standard(2)
        with pytest.raises(ValueError, match="unknown"):
            basis.vector("nope")


class TestComposition:
    def test_same_basis_chained_labels(self):
        basis = sma.LabeledBasis.standard(3)
        m1 = sma.symbol(basis, "0", "1")
        m2 = sma.symbol(basis, "1", "2")
        overlap, result = sma.compose(m1, m2)
        assert overlap == pytest.approx(1.0)
        assert (result.left_label, result.right_label) == ("0", "2")
        assert np.max(np.abs(m1.matrix @ m2.matrix - overlap * result.matrix)) < 1e-15

    def test_same_basis_orthogonal_labels(self):
        basis = sma.LabeledBasis.standard(3)
        m1 = sma.symbol(basis, "0", "1")
        m2 = sma.symbol(basis, "2", "0")
        overlap, _ = sma.compose(m1, m2)
        assert overlap == 0.0
        assert np.max(np.abs(m1.matrix @ m2.matrix)) == 0.0

    def test_rotated_bases_overlap_is_cosine(self):
        theta = 0.3
        plain = sma.LabeledBasis.standard(2)
        rotated = rotated_basis_2d(theta)
        overlap, _ = sma.compose(sma.symbol(plain, "0", "0"), sma.symbol(rotated, "u0", "u1"))
        assert overlap == pytest.approx(math.cos(theta), abs=1e-15)

    def test_dimension_mismatch(self):
        m1 = sma.symbol(sma.LabeledBasis.standard(2), "0", "1")
        m2 = sma.symbol(sma.LabeledBasis.standard(3), "0", "1")
        with pytest.raises(ValueError, match="dimension"):
            sma.compose(m1, m2)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 8))
    def test_composition_rule_random_bases(self, seed, dim):
        rng = np.random.default_rng(seed)
        basis1 = random_orthonormal_basis(dim, dim, rng, prefix="a")
        basis2 = random_orthonormal_basis(dim, dim, rng, prefix="b")
        labels1 = rng.choice(dim, size=2)
        labels2 = rng.choice(dim, size=2)
        m1 = sma.symbol(basis1, f"a{labels1[0]}", f"a{labels1[1]}")
        m2 = sma.symbol(basis2, f"b{labels2[0]}", f"b{labels2[1]}")
        overlap, result = sma.compose(m1, m2)
        assert np.max(np.abs(m1.matrix @ m2.matrix - overlap * result.matrix)) < 1e-13

    def test_adjoint_swaps_labels(self):
        basis = sma.LabeledBasis.standard(2)
        m = sma.symbol(basis, "0", "1")
        assert np.max(np.abs(m.adjoint().matrix - m.matrix.conj().T)) == 0.0


class TestOperatorReconstruction:
    def test_identity_elements_give_projector(self, rng):
        basis = random_orthonormal_basis(5, 3, rng)
        x = sma.operator_from_elements(basis, np.eye(3))
        # projector onto the span: x @ v = v for basis vectors
        assert np.max(np.abs(x @ x - x)) < 1e-13
        assert np.max(np.abs(x @ basis.vectors - basis.vectors)) < 1e-13

    def test_complete_basis_identity(self, rng):
        basis = random_orthonormal_basis(4, 4, rng)
        x = sma.operator_from_elements(basis, np.eye(4))
        assert np.max(np.abs(x - np.eye(4))) < 1e-13

    def test_diagonal_elements_build_spectral_form(self):
        basis = sma.LabeledBasis.standard(3)
        eigenvalues = np.diag([1.0, 2.0, -1.0])
        x = sma.operator_from_elements(basis, eigenvalues)
        assert np.max(np.abs(x - eigenvalues)) == 0.0

    def test_round_trip(self, rng):
        basis = random_orthonormal_basis(6, 6, rng)
        elements = random_hermitian(6, rng)
        x = sma.operator_from_elements(basis, elements)
        back = np.array(
            [
                [sma.matrix_element(x, basis, li, lj) for lj in basis.labels]
                for li in basis.labels
            ]
        )
        assert np.max(np.abs(back - elements)) < 1e-12

    def test_explicit_symbol_sum_agrees(self, rng):
        basis = random_orthonormal_basis(3, 3, rng)
        elements = random_hermitian(3, rng)
        x = sma.operator_from_elements(basis, elements)
        explicit = sum(
            elements[i, j] * sma.symbol(basis, basis.labels[i], basis.labels[j]).matrix
            for i in range(3)
            for j in range(3)
        )
        assert np.max(np.abs(x - explicit)) < 1e-13

    def test_dimension_mismatch(self):
        basis = sma.LabeledBasis.standard(3)
        with pytest.raises(ValueError, match="shape"):
            sma.operator_from_elements(basis, np.eye(4))


class TestMatrixElement:
    def test_identity_gives_delta(self):
        basis = sma.LabeledBasis.standard(4)
        eye = np.eye(4, dtype=complex)
        assert sma.matrix_element(eye, basis, "1", "1") == pytest.approx(1.0)
        assert sma.matrix_element(eye, basis, "1", "2") == pytest.approx(0.0, abs=1e-15)

    def test_symbol_operator_gives_double_delta(self):
        basis = sma.LabeledBasis.standard(4)
        x = sma.symbol(basis, "2", "3").matrix
        assert sma.matrix_element(x, basis, "2", "3") == pytest.approx(1.0)
        assert sma.matrix_element(x, basis, "3", "2") == pytest.approx(0.0, abs=1e-15)
        assert sma.matrix_element(x, basis, "2", "2") == pytest.approx(0.0, abs=1e-15)

    def test_trace_form_equals_sandwich(self, rng):
        basis = random_orthonormal_basis(5, 5, rng)
        x = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        for li in ("v0", "v3"):
            for lj in ("v1", "v4"):
                via_trace = sma.matrix_element(x, basis, li, lj)
                sandwich = np.vdot(basis.vector(li), x @ basis.vector(lj))
                assert abs(via_trace - sandwich) < 1e-13

    def test_unknown_label(self):
        basis = sma.LabeledBasis.standard(2)
        with pytest.raises(ValueError, match="unknown"):
            sma.matrix_element(np.eye(2), basis, "0", "7")


class TestResolutionOfIdentity:
    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 8))
    def test_diagonal_symbols_sum_to_identity(self, seed, dim):
        rng = np.random.default_rng(seed)
        basis = random_orthonormal_basis(dim, dim, rng)
        total = sum(sma.symbol(basis, lab, lab).matrix for lab in basis.labels)
        assert np.max(np.abs(total - np.eye(dim))) < 1e-13


class TestDensityOperator:
    def test_pure_state_projector(self):
        basis = sma.LabeledBasis.standard(3)
        rho = sma.density_operator(basis, [0.0, 1.0, 0.0])
        assert np.max(np.abs(rho @ rho - rho)) < 1e-15
        assert np.trace(rho) == pytest.approx(1.0)

    def test_uniform_weights_maximally_mixed(self):
        basis = sma.LabeledBasis.standard(4)
        rho = sma.density_operator(basis, np.full(4, 0.25))
        assert np.max(np.abs(rho - np.eye(4) / 4)) < 1e-15

    def test_boltzmann_weights_reproduce_elements(self):
        weights = np.exp(-0.7 * np.arange(5))
        weights /= weights.sum()
        basis = sma.LabeledBasis.standard(5)
        rho = sma.density_operator(basis, weights)
        for i, li in enumerate(basis.labels):
            for j, lj in enumerate(basis.labels):
                expected = weights[i] if i == j else 0.0
                assert abs(sma.matrix_element(rho, basis, li, lj) - expected) < 1e-14

    def test_always_unit_trace_and_positive(self, rng):
        basis = random_orthonormal_basis(6, 6, rng)
        weights = rng.random(6)
        weights /= weights.sum()
        rho = sma.density_operator(basis, weights)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12

    def test_invalid_weights_rejected(self):
        basis = sma.LabeledBasis.standard(2)
        with pytest.raises(ValueError, match="nonnegative"):
            sma.density_operator(basis, [-0.1, 1.1])
        with pytest.raises(ValueError, match="sum"):
            sma.density_operator(basis, [0.3, 0.3])


class TestStatisticalMean:
    def test_identity_observable(self, rng):
        rho = random_density(5, rng)
        assert sma.statistical_mean(rho, np.eye(5)) == pytest.approx(1.0, abs=1e-12)

    def test_number_eigenstate(self):
        dim = 6
        n_op = np.diag(np.arange(dim)).astype(complex)
        for n in (0, 3, 5):
            rho = np.zeros((dim, dim), dtype=complex)
            rho[n, n] = 1.0
            assert sma.statistical_mean(rho, n_op) == pytest.approx(float(n), abs=1e-13)

    def test_thermal_mixture_weighted_sum(self):
        weights = np.exp(-0.5 * np.arange(8))
        weights /= weights.sum()
        basis = sma.LabeledBasis.standard(8)
        rho = sma.density_operator(basis, weights)
        n_op = np.diag(np.arange(8)).astype(complex)
        expected = float(np.sum(np.arange(8) * weights))
        assert sma.statistical_mean(rho, n_op) == pytest.approx(expected, rel=1e-12)

    def test_rejects_non_hermitian_observable(self, rng):
        rho = random_density(3, rng)
        bad = np.array([[0, 1], [0, 0]])
        with pytest.raises(ValueError, match="shape"):
            sma.statistical_mean(rho, bad)
        bad3 = np.zeros((3, 3), dtype=complex)
        bad3[0, 1] = 1.0
        with pytest.raises(ValueError, match="Hermitian"):
            sma.statistical_mean(rho, bad3)

    def test_rejects_bad_density_matrix(self, rng):
        a = random_hermitian(3, rng)
        with pytest.raises(ValueError, match="trace"):
            sma.statistical_mean(2.0 * np.eye(3), a)
        not_positive = np.diag([1.5, -0.5, 0.0]).astype(complex)
        with pytest.raises(ValueError, match="positive"):
            sma.statistical_mean(not_positive, a)
