"""Frequency functional, residuals, and system validation."""

import numpy as np
import pytest

from obskit import (
    DomainError,
    ShapeError,
    SpectralSystem,
    StateVector,
    frequency,
    frequency_report,
    key_identity_gap,
    observed_energy_sq,
    residual,
    residual_shifted,
)


def random_system(rng, n, lam_lo=1.0, lam_hi=40.0, repeats=False):
    lam = np.sort(rng.uniform(lam_lo, lam_hi, size=n))
    if repeats and n >= 4:
        lam[1] = lam[0]
        lam[-1] = lam[-2]
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    gram = b.conj().T @ b / n
    return SpectralSystem(eigenvalues=lam, gram=gram)


def random_state(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


class TestSystemValidation:
    def test_accepts_valid_system(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 2.0, 5.0], gram=np.eye(3))
        assert sys_.size == 3
        assert sys_.lambda_min == 1.0
        assert sys_.lambda_max == 5.0

    def test_rejects_nonpositive_eigenvalue(self):
        with pytest.raises(DomainError, match="strictly positive"):
            SpectralSystem(eigenvalues=[0.0, 1.0], gram=np.eye(2))
        with pytest.raises(DomainError, match="strictly positive"):
            SpectralSystem(eigenvalues=[-1.0, 1.0], gram=np.eye(2))

    def test_rejects_unsorted_eigenvalues(self):
        with pytest.raises(DomainError, match="sorted"):
            SpectralSystem(eigenvalues=[2.0, 1.0], gram=np.eye(2))

    def test_permits_repeated_eigenvalues(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 1.0, 2.0], gram=np.eye(3))
        assert list(sys_.distinct_eigenvalues()) == [1.0, 2.0]

    def test_rejects_gram_shape_mismatch(self):
        with pytest.raises(ShapeError, match="gram must be"):
            SpectralSystem(eigenvalues=[1.0, 2.0], gram=np.eye(3))

    def test_rejects_non_hermitian_gram_naming_offender(self):
        gram = np.eye(3, dtype=complex)
        gram[0, 2] = 1j
        gram[2, 0] = 1j  # should be -1j
        with pytest.raises(DomainError, match=r"G\[0\]\[2\]"):
            SpectralSystem(eigenvalues=[1.0, 2.0, 3.0], gram=gram)

    def test_rejects_indefinite_gram(self):
        gram = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(DomainError, match="positive semidefinite"):
            SpectralSystem(eigenvalues=[1.0, 2.0], gram=gram)

    def test_accepts_zero_gram(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 2.0], gram=np.zeros((2, 2)))
        assert observed_energy_sq([1.0, 1.0], sys_) == 0.0

    def test_arrays_are_read_only_copies(self):
        lam = np.array([1.0, 2.0])
        sys_ = SpectralSystem(eigenvalues=lam, gram=np.eye(2))
        lam[0] = 99.0  # caller's array stays independent
        assert sys_.lambda_min == 1.0
        with pytest.raises(ValueError):
            sys_.eigenvalues[0] = 3.0


class TestStateVector:
    def test_basis_vector(self):
        z = StateVector.basis(1, 3)
        assert z.norm_sq == 1.0
        assert len(z) == 3
        assert z.coefficients[1] == 1.0

    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(ShapeError):
            StateVector(np.zeros(0))
        with pytest.raises(DomainError):
            StateVector(np.array([np.nan + 0j]))

    def test_dimension_mismatch_is_shape_error(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 2.0], gram=np.eye(2))
        with pytest.raises(ShapeError, match="2 modes"):
            frequency([1.0, 0.0, 0.0], sys_)

    def test_zero_vector_is_domain_error(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 2.0], gram=np.eye(2))
        with pytest.raises(DomainError, match="zero"):
            frequency([0.0, 0.0], sys_)


class TestFrequency:
    def test_basis_vectors_give_eigenvalues(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 2.5, 7.0], gram=np.eye(3))
        for k, lam in enumerate([1.0, 2.5, 7.0]):
            assert frequency(StateVector.basis(k, 3), sys_) == pytest.approx(lam, abs=1e-14)

    def test_equal_weight_mean(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 2.0], gram=np.eye(2))
        assert frequency([1.0, 1.0], sys_) == pytest.approx(1.5, abs=1e-15)

    def test_within_spectral_hull(self):
        rng = np.random.default_rng(11)
        sys_ = random_system(rng, 12)
        for _ in range(200):
            z = random_state(rng, 12)
            lam = frequency(z, sys_)
            assert sys_.lambda_min - 1e-12 <= lam <= sys_.lambda_max + 1e-12

    def test_scale_invariance(self):
        rng = np.random.default_rng(12)
        sys_ = random_system(rng, 8)
        z = random_state(rng, 8)
        base = frequency(z, sys_)
        for c in [3.0, 1e-8, 1e8, 2.0 - 1.5j]:
            assert frequency(c * z, sys_) == pytest.approx(base, rel=1e-12)


class TestResidual:
    def test_basis_vector_residual_zero(self):
        rng = np.random.default_rng(13)
        sys_ = random_system(rng, 10)
        for k in range(10):
            assert residual(StateVector.basis(k, 10), sys_) <= 1e-12

    def test_two_mode_arithmetic(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 3.0], gram=np.eye(2))
        # mean 2, second moment 5, gap 1
        assert residual([1.0, 1.0], sys_) == pytest.approx(1.0, abs=1e-13)

    def test_moment_and_shifted_forms_agree(self):
        rng = np.random.default_rng(14)
        sys_ = random_system(rng, 10)
        for _ in range(100):
            z = random_state(rng, 10)
            a = residual(z, sys_)
            b = residual_shifted(z, sys_)
            assert a == pytest.approx(b, rel=1e-10, abs=1e-12)

    def test_nonnegative_up_to_roundoff(self):
        rng = np.random.default_rng(15)
        sys_ = random_system(rng, 16, repeats=True)
        for _ in range(500):
            z = random_state(rng, 16)
            rep = frequency_report(z, sys_)
            assert rep.residual >= -1e-12 * rep.lambda_z**2

    def test_zero_on_repeated_eigenvalue_group(self):
        sys_ = SpectralSystem(eigenvalues=[2.0, 2.0, 5.0], gram=np.eye(3))
        z = np.array([1.0 + 1j, -0.5, 0.0])
        assert residual_shifted(z, sys_) <= 1e-14
        assert abs(frequency(z, sys_) - 2.0) <= 1e-14


class TestKeyIdentity:
    def test_exact_two_mode_case(self):
        sys_ = SpectralSystem(eigenvalues=[1.0, 3.0], gram=np.eye(2))
        assert key_identity_gap([1.0, 1.0], 0.0, sys_) <= 1e-14

    def test_zero_defect_convention(self):
        sys_ = SpectralSystem(eigenvalues=[4.0, 5.0], gram=np.eye(2))
        assert key_identity_gap(StateVector.basis(0, 2), 4.0, sys_) == 0.0

    def test_random_states_and_shifts(self):
        rng = np.random.default_rng(16)
        sys_ = random_system(rng, 10)
        for _ in range(50):
            z = random_state(rng, 10)
            lam = rng.uniform(-10.0, 80.0)
            assert key_identity_gap(z, lam, sys_) <= 1e-10

    def test_minimizer_at_frequency(self):
        rng = np.random.default_rng(17)
        sys_ = random_system(rng, 9)
        z = random_state(rng, 9)
        lam_z = frequency(z, sys_)
        from obskit.spectral import shifted_norm_sq

        at_min = shifted_norm_sq(z, sys_, lam_z)
        for lam in np.linspace(sys_.lambda_min - 5, sys_.lambda_max + 5, 101):
            assert shifted_norm_sq(z, sys_, float(lam)) >= at_min - 1e-10 * (1 + at_min)


class TestObservedEnergy:
    def test_identity_gram_returns_norm(self):
        rng = np.random.default_rng(18)
        sys_ = SpectralSystem(eigenvalues=np.arange(1.0, 7.0), gram=np.eye(6))
        z = random_state(rng, 6)
        assert observed_energy_sq(z, sys_) == pytest.approx(
            float(np.vdot(z, z).real), rel=1e-13
        )

    def test_matches_quadratic_form(self):
        rng = np.random.default_rng(19)
        sys_ = random_system(rng, 7)
        z = random_state(rng, 7)
        u = z.conj()
        direct = float((u.conj() @ (sys_.gram @ u)).real)
        assert observed_energy_sq(z, sys_) == pytest.approx(direct, rel=1e-12)

    def test_nonnegative(self):
        rng = np.random.default_rng(20)
        sys_ = random_system(rng, 7)
        for _ in range(50):
            assert observed_energy_sq(random_state(rng, 7), sys_) >= 0.0
