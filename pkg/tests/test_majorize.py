import numpy as np
import pytest

from qmajor.majorize import (
    MajorizationError,
    TChain,
    TTransform,
    apply_t_chain,
    as_prob_vector,
    check_schur_inequalities,
    horn_orthogonal,
    is_majorized_by,
    majorization_violation,
    schur_value,
    t_transform_chain,
    unitary_to_stochastic,
)
from qmajor.numkernel import ValidationError, random_unitary

from conftest import mix_down


class TestIsMajorizedBy:
    def test_uniform_below_everything(self):
        assert is_majorized_by([1 / 3, 1 / 3, 1 / 3], [0.5, 0.25, 0.25])

    def test_reflexive(self, rng):
        y = rng.dirichlet(np.ones(5))
        assert is_majorized_by(y, y)

    def test_first_partial_sum_fails(self):
        # sorted partial sums: 0.6 > 0.5 at k=1
        assert not is_majorized_by([0.6, 0.4], [0.5, 0.5])
        assert majorization_violation([0.6, 0.4], [0.5, 0.5]) == (1, 0.6, 0.5)

    def test_zero_padding(self):
        assert is_majorized_by([1 / 3, 1 / 3, 1 / 3], [0.5, 0.5])
        assert not is_majorized_by([0.5, 0.5], [1 / 3, 1 / 3, 1 / 3])

    def test_total_mismatch(self):
        assert not is_majorized_by([0.4, 0.4], [0.5, 0.5])

    def test_negative_entry_rejected(self):
        with pytest.raises(ValidationError, match="negative"):
            is_majorized_by([-0.2, 1.2], [0.5, 0.5])


class TestTTransform:
    def test_validation(self):
        with pytest.raises(ValidationError):
            TTransform(i=1, k=1, t=0.5)
        with pytest.raises(ValidationError):
            TTransform(i=0, k=1, t=1.5)

    def test_matrix_and_lift_agree(self):
        tr = TTransform(i=0, k=2, t=0.3)
        m = tr.matrix(4)
        g = tr.orthogonal_lift(4)
        assert np.allclose(g * g, m, atol=1e-15)
        assert np.allclose(g @ g.T, np.eye(4), atol=1e-15)


class TestTransformChain:
    def test_two_level_split(self):
        chain = t_transform_chain([0.5, 0.5], [1, 0])
        assert len(chain) == 1
        (tr,) = chain.transforms
        assert (tr.i, tr.k) == (0, 1)
        # 0.5 = t * 1 + (1 - t) * 0 forces t = 0.5
        assert tr.t == pytest.approx(0.5, abs=1e-15)
        assert apply_t_chain(chain, [1, 0]) == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_three_level_chain_values(self):
        x = [0.4, 0.35, 0.25]
        y = [0.6, 0.3, 0.1]
        chain = t_transform_chain(x, y)
        assert [(tr.i, tr.k) for tr in chain.transforms] == [(0, 1), (1, 2)]
        assert chain.transforms[0].t == pytest.approx(1 / 3, abs=1e-12)
        assert chain.transforms[1].t == pytest.approx(0.625, abs=1e-12)
        assert np.max(np.abs(apply_t_chain(chain, y) - np.array(x))) <= 1e-10

    def test_identical_vectors_give_empty_chain(self, rng):
        y = rng.dirichlet(np.ones(4))
        chain = t_transform_chain(y, y)
        assert len(chain) == 0
        assert apply_t_chain(chain, y) == pytest.approx(list(y), abs=1e-15)

    def test_precondition_failure_reports_partial_sum(self):
        with pytest.raises(MajorizationError, match="k=1") as exc:
            t_transform_chain([0.75, 0.25], [0.5, 0.5])
        assert exc.value.k == 1
        assert exc.value.lhs == pytest.approx(0.75)

    def test_length_bound_and_round_trip(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 14))
            y = rng.dirichlet(np.ones(d))
            x = mix_down(y, rng)
            chain = t_transform_chain(x, y)
            assert len(chain) <= d - 1
            assert np.max(np.abs(apply_t_chain(chain, y) - x)) <= 1e-10

    def test_unsorted_inputs(self):
        x = [0.25, 0.4, 0.35]
        y = [0.1, 0.6, 0.3]
        chain = t_transform_chain(x, y)
        assert np.max(np.abs(apply_t_chain(chain, y) - np.array(x))) <= 1e-12

    def test_permutation_pair_needs_no_transforms(self):
        x = [0.0, 0.5, 0.3, 0.2]
        y = [0.2, 0.3, 0.5, 0.0]
        chain = t_transform_chain(x, y)
        assert len(chain) == 0
        assert apply_t_chain(chain, y) == pytest.approx(x, abs=0)


class TestApplyTChain:
    def test_empty_chain_is_identity(self):
        chain = TChain.plain([], 3)
        y = [0.2, 0.5, 0.3]
        assert apply_t_chain(chain, y) == pytest.approx(y, abs=0)

    def test_single_averaging(self):
        chain = TChain.plain([TTransform(i=0, k=1, t=0.5)], 2)
        assert apply_t_chain(chain, [1, 0]) == pytest.approx([0.5, 0.5])

    def test_preserves_total_and_nonnegativity(self, rng):
        for _ in range(30):
            d = int(rng.integers(2, 9))
            y = rng.dirichlet(np.ones(d))
            transforms = [
                TTransform(*sorted(rng.choice(d, 2, replace=False)), t=rng.random())
                for _ in range(5)
            ]
            out = apply_t_chain(TChain.plain(transforms, d), y)
            assert np.all(out >= 0)
            assert out.sum() == pytest.approx(1.0, abs=1e-12)

    def test_converse_direction(self, rng):
        # anything produced by averaging transforms is majorized by the input
        for _ in range(50):
            d = int(rng.integers(2, 10))
            y = rng.dirichlet(np.ones(d))
            x = mix_down(y, rng, rounds=int(rng.integers(1, 3 * d)))
            assert is_majorized_by(x, y)

    def test_dimension_mismatch(self):
        chain = TChain.plain([TTransform(i=0, k=1, t=0.5)], 2)
        with pytest.raises(ValidationError, match="exceeds"):
            apply_t_chain(chain, [0.2, 0.3, 0.5])


class TestHornOrthogonal:
    def test_two_level_exact(self):
        witness = horn_orthogonal([0.5, 0.5], [1, 0])
        r = np.sqrt(0.5)
        assert np.allclose(witness.orthogonal, [[r, -r], [r, r]], atol=1e-15)
        assert np.allclose(witness.doubly_stochastic, 0.5 * np.ones((2, 2)), atol=1e-15)
        assert witness.doubly_stochastic @ [1, 0] == pytest.approx([0.5, 0.5])

    def test_identity_case(self):
        witness = horn_orthogonal([1, 0, 0], [1, 0, 0])
        assert np.array_equal(witness.orthogonal, np.eye(3))

    def test_three_level_invariants(self):
        x = np.array([0.4, 0.35, 0.25])
        y = np.array([0.6, 0.3, 0.1])
        witness = horn_orthogonal(x, y)
        w = witness.orthogonal
        assert np.linalg.norm(w @ w.T - np.eye(3)) <= 1e-10
        assert np.allclose(witness.doubly_stochastic, w * w)
        assert np.max(np.abs(witness.doubly_stochastic @ y - x)) <= 1e-9

    def test_random_pairs(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 20))
            y = rng.dirichlet(np.ones(d))
            x = mix_down(y, rng)
            witness = horn_orthogonal(x, y)
            w = witness.orthogonal
            dmat = witness.doubly_stochastic
            assert np.linalg.norm(w @ w.T - np.eye(d)) <= 1e-10
            assert np.max(np.abs(dmat @ y - x)) <= 1e-9
            assert np.max(np.abs(dmat.sum(axis=0) - 1)) <= 1e-9
            assert np.max(np.abs(dmat.sum(axis=1) - 1)) <= 1e-9

    def test_rejects_non_majorized(self):
        with pytest.raises(MajorizationError):
            horn_orthogonal([0.75, 0.25], [0.5, 0.5])

    def test_permutation_pair_gives_permutation_witness(self):
        x = [0.2, 0.5, 0.3]
        y = [0.5, 0.3, 0.2]
        witness = horn_orthogonal(x, y)
        d = witness.doubly_stochastic
        assert np.array_equal(np.sort(d, axis=None), np.sort(np.eye(3), axis=None))
        assert d @ y == pytest.approx(x, abs=0)


class TestUnitaryToStochastic:
    def test_identity(self):
        assert np.array_equal(unitary_to_stochastic(np.eye(3)), np.eye(3))

    def test_hadamard_type(self):
        r = np.sqrt(0.5)
        d = unitary_to_stochastic([[r, r], [r, -r]])
        assert np.allclose(d, 0.5 * np.ones((2, 2)), atol=1e-12)

    def test_unit_phases(self):
        u = np.diag(np.exp(1j * np.array([0.3, -1.2, 2.5])))
        assert np.allclose(unitary_to_stochastic(u), np.eye(3), atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError, match="unitarity"):
            unitary_to_stochastic([[1, 1], [0, 1]])

    def test_forward_majorization(self, rng):
        # mixing any distribution through squared unitary moduli only
        # disorders it
        for trial in range(50):
            d = int(rng.integers(2, 9))
            u = random_unitary(d, seed=trial)
            y = rng.dirichlet(np.ones(d))
            x = unitary_to_stochastic(u) @ y
            assert is_majorized_by(x, y, tol=1e-10)


class TestSchurValue:
    def test_point_distribution_entropy(self):
        assert schur_value("neg_entropy", [1, 0]) == 0.0

    def test_power_sum(self):
        assert schur_value("power_sum", [0.5, 0.5], k=2) == pytest.approx(0.5)

    def test_neg_max(self):
        assert schur_value("neg_max", [0.7, 0.3]) == pytest.approx(-0.7)

    def test_errors(self):
        with pytest.raises(ValidationError, match="unknown"):
            schur_value("entropy", [0.5, 0.5])
        with pytest.raises(ValidationError, match="k"):
            schur_value("power_sum", [0.5, 0.5])
        with pytest.raises(ValidationError, match="k"):
            schur_value("power_sum", [0.5, 0.5], k=0.5)


class TestSchurInequalities:
    def test_split_is_more_disordered(self):
        report = check_schur_inequalities([0.5, 0.5], [1, 0])
        assert report.passed
        by_name = {e.name: e for e in report.entries}
        assert by_name["neg_entropy"].value_x == pytest.approx(-np.log(2))
        assert by_name["neg_entropy"].value_y == 0.0

    def test_equal_vectors_are_tight(self, rng):
        y = rng.dirichlet(np.ones(4))
        report = check_schur_inequalities(y, y)
        for entry in report.entries:
            assert entry.value_x == pytest.approx(entry.value_y, abs=1e-12)

    def test_power_sum_values(self):
        report = check_schur_inequalities([1 / 3, 1 / 3, 1 / 3], [0.5, 0.3, 0.2])
        entry = {e.name: e for e in report.entries}["power_sum[k=2]"]
        assert entry.value_x == pytest.approx(1 / 3)
        assert entry.value_y == pytest.approx(0.38)  # 0.25 + 0.09 + 0.04

    def test_precondition(self):
        with pytest.raises(MajorizationError):
            check_schur_inequalities([0.75, 0.25], [0.5, 0.5])

    def test_never_violated_on_random_pairs(self, rng):
        for _ in range(50):
            d = int(rng.integers(2, 9))
            y = rng.dirichlet(np.ones(d))
            x = mix_down(y, rng)
            assert check_schur_inequalities(x, y).passed


class TestProbVector:
    def test_clips_tiny_negative(self):
        w = as_prob_vector([1.0 + 1e-10, -1e-10])
        assert w[1] == 0.0

    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError, match="sum"):
            as_prob_vector([0.6, 0.6])
