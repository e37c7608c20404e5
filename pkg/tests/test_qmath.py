import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tempocorr import qmath
from tempocorr.errors import (
    DimensionMismatch,
    NormTooLarge,
    NotHermitian,
    NotTracePreserving,
    ParamOutOfRange,
    SpectrumOutOfRange,
    WrongDimension,
)
from tempocorr.qmath import (
    DensityMatrix,
    apply_instrument,
    bloch_to_density,
    density_to_bloch,
    effect_from_params,
    ketbra,
    random_density_matrix,
    random_instrument,
    validate_effect,
    validate_instrument,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
ZERO2 = np.zeros((2, 2), dtype=complex)


class TestValidateEffect:
    def test_identity_is_valid(self):
        e = validate_effect(np.eye(2))
        assert np.allclose(e.matrix, np.eye(2))

    def test_eigenvalue_above_one_rejected(self):
        with pytest.raises(SpectrumOutOfRange):
            validate_effect(np.diag([1.5, 0.0]))

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(SpectrumOutOfRange):
            validate_effect(np.diag([-0.1, 0.5]))

    def test_non_hermitian_rejected(self):
        with pytest.raises(NotHermitian):
            validate_effect(np.array([[0.5, 0.3], [0.0, 0.5]]))

    def test_biased_z_effect_spectrum(self):
        # eigenvalues of (1 + 0.9 sigma_z)/2 are (1 +- 0.9)/2, frozen from the
        # 2x2 quadratic formula
        e = validate_effect(0.5 * (np.eye(2) + 0.9 * qmath.SIGMA_Z))
        vals = qmath.hermitian_eigenvalues(e.matrix)
        assert np.allclose(vals, [0.05, 0.95], atol=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(WrongDimension):
            validate_effect(np.zeros((2, 3)))


class TestValidateInstrument:
    def test_projective(self):
        inst = validate_instrument([[ketbra(0, 0, 2)], [ketbra(1, 1, 2)]])
        assert inst.n_outcomes == 2
        assert np.allclose(inst.effects[0].matrix, ketbra(0, 0, 2))

    def test_flip_with_fixed_outcome(self):
        # trivial measurement: always result 0, but the state is flipped
        inst = validate_instrument([[X], [ZERO2]])
        assert np.allclose(inst.effects[0].matrix, np.eye(2))
        assert np.allclose(inst.effects[1].matrix, ZERO2)

    def test_incomplete_rejected(self):
        with pytest.raises(NotTracePreserving):
            validate_instrument([[ketbra(0, 0, 2)]])

    def test_multi_kraus_outcome(self):
        # measure-and-prepare: any input collapses to |0><0| with probability 1
        inst = validate_instrument([[ketbra(0, 0, 2), ketbra(0, 1, 2)]])
        assert np.allclose(inst.effects[0].matrix, np.eye(2))

    def test_mixed_dims_rejected(self):
        with pytest.raises(DimensionMismatch):
            validate_instrument([[np.eye(2)], [np.zeros((3, 3))]])


class TestApplyInstrument:
    def test_projective_on_plus_state(self):
        plus = DensityMatrix(np.full((2, 2), 0.5, dtype=complex))
        inst = validate_instrument([[ketbra(0, 0, 2)], [ketbra(1, 1, 2)]])
        out = apply_instrument(plus, inst, 0)
        assert out.probability == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(out.post_state.matrix, ketbra(0, 0, 2))

    def test_flip_branch(self):
        inst = validate_instrument([[X], [ZERO2]])
        out = apply_instrument(DensityMatrix(ketbra(0, 0, 2)), inst, 0)
        assert out.probability == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(out.post_state.matrix, ketbra(1, 1, 2))

    def test_zero_probability_branch_has_no_post_state(self):
        inst = validate_instrument([[X], [ZERO2]])
        out = apply_instrument(DensityMatrix(ketbra(0, 0, 2)), inst, 1)
        assert out.probability == pytest.approx(0.0, abs=1e-12)
        assert out.post_state is None

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            dim = int(rng.integers(2, 5))
            rho = random_density_matrix(rng, dim)
            inst = random_instrument(rng, dim, int(rng.integers(2, 4)))
            probs = [apply_instrument(rho, inst, r).probability for r in range(inst.n_outcomes)]
            assert all(-1e-12 <= p <= 1 + 1e-9 for p in probs)
            assert sum(probs) == pytest.approx(1.0, abs=1e-9)

    def test_probability_matches_induced_effect(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            dim = int(rng.integers(2, 5))
            rho = random_density_matrix(rng, dim)
            inst = random_instrument(rng, dim, 2, kraus_per_outcome=2)
            for r in range(2):
                via_effect = float((inst.effects[r].matrix @ rho.matrix).trace().real)
                assert apply_instrument(rho, inst, r).probability == pytest.approx(
                    via_effect, abs=1e-12
                )

    def test_dimension_mismatch(self):
        inst = validate_instrument([[X], [ZERO2]])
        with pytest.raises(DimensionMismatch):
            apply_instrument(DensityMatrix(np.eye(3) / 3), inst, 0)


class TestBloch:
    def test_north_pole(self):
        assert np.allclose(bloch_to_density([0, 0, 1]).matrix, ketbra(0, 0, 2))

    def test_center_is_maximally_mixed(self):
        assert np.allclose(bloch_to_density([0, 0, 0]).matrix, np.eye(2) / 2)

    def test_norm_above_one_rejected(self):
        with pytest.raises(NormTooLarge):
            bloch_to_density([1.0, 0.5, 0.0])

    def test_density_to_bloch_needs_qubit(self):
        with pytest.raises(WrongDimension):
            density_to_bloch(DensityMatrix(np.eye(3) / 3))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
    def test_round_trip(self, components):
        v = np.asarray(components)
        norm = np.linalg.norm(v)
        if norm > 1:
            v = v / norm
        back = density_to_bloch(bloch_to_density(v))
        assert np.max(np.abs(back - v)) < 1e-12

    def test_purity(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            v = rng.normal(size=3)
            v *= rng.uniform() / np.linalg.norm(v)
            rho = bloch_to_density(v).matrix
            purity = float((rho @ rho).trace().real)
            assert purity == pytest.approx((1 + np.dot(v, v)) / 2, abs=1e-12)


class TestEffectFromParams:
    def test_projector_case(self):
        e = effect_from_params(0.5, 1.0, [0, 0, 1])
        assert np.allclose(e.matrix, ketbra(0, 0, 2))

    def test_boundary_matches_rank1_complement_form(self):
        # at a = 1/(1+b) with b = p/(2-p) the effect is ((2-p) id + p n.sigma)/2
        rng = np.random.default_rng(10)
        for p in (0.0, 0.3, 0.725, 1.0):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            b = p / (2 - p)
            e = effect_from_params(1.0 / (1.0 + b), b, axis)
            direct = 0.5 * (
                (2 - p) * np.eye(2) + p * np.einsum("i,ijk->jk", axis, qmath.PAULI)
            )
            assert np.allclose(e.matrix, direct, atol=1e-12)

    def test_zero_effect(self):
        e = effect_from_params(0.0, 0.7, [1, 0, 0])
        assert np.allclose(e.matrix, ZERO2)

    def test_complement_rank_at_boundary(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            b = rng.uniform()
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            e = effect_from_params(1.0 / (1.0 + b), b, axis)
            complement = np.eye(2) - e.matrix
            vals = qmath.hermitian_eigenvalues(complement)
            assert abs(vals[0]) < 1e-12  # rank <= 1

    def test_out_of_range(self):
        with pytest.raises(ParamOutOfRange):
            effect_from_params(0.9, 0.5, [0, 0, 1])  # a > 1/(1+b)
        with pytest.raises(ParamOutOfRange):
            effect_from_params(0.3, 1.2, [0, 0, 1])
        with pytest.raises(ParamOutOfRange):
            effect_from_params(0.3, 0.5, [0, 0, 2])
