import numpy as np
import pytest

import refdata
from conftest import build_model, random_sequence
from mtdchain import (
    Alphabet,
    FullMarkovModel,
    InvalidSymbol,
    ModelTooLarge,
    MtdModel,
    Sequence,
    ShapeMismatch,
    full_transition_matrix,
    index_to_word,
    random_full_markov,
    random_mtd,
    sample_sequence,
    sequence_loglik,
    transition_prob,
    word_to_index,
)
from mtdchain.model import history_rows


class TestAlphabet:
    def test_basic(self, dna):
        assert dna.size == 4
        assert dna.index("g") == 2
        assert dna.decode([3, 0]) == ["t", "a"]
        assert list(dna.encode("cat")) == [1, 0, 3]

    def test_rejects_duplicates_and_tiny(self):
        with pytest.raises(ValueError):
            Alphabet(("a", "a"))
        with pytest.raises(ValueError):
            Alphabet(("a",))

    def test_unknown_symbol(self, dna):
        with pytest.raises(InvalidSymbol):
            dna.index("n")
        with pytest.raises(InvalidSymbol):
            dna.check_index(4)


class TestWordIndex:
    def test_oldest_first_base_q(self):
        # "ac" over q=4 reads as the numeral 0*4 + 1
        assert word_to_index([0, 1], 4) == 1
        assert word_to_index([1, 0], 4) == 4
        assert index_to_word(4, 2, 4) == (1, 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        q = int(rng.integers(2, 6))
        k = int(rng.integers(1, 8))
        for _ in range(50):
            word = tuple(int(x) for x in rng.integers(0, q, size=k))
            assert index_to_word(word_to_index(word, q), k, q) == word

    def test_out_of_range(self):
        with pytest.raises(InvalidSymbol):
            word_to_index([0, 4], 4)


class TestMtdModelValidation:
    def test_phi_must_be_simplex(self, dna):
        u = np.full((4, 4), 0.25)
        with pytest.raises(ValueError):
            MtdModel(dna, 2, 1, [0.6, 0.6], [u, u])
        with pytest.raises(ValueError):
            MtdModel(dna, 2, 1, [-0.1, 1.1], [u, u])

    def test_rows_must_be_stochastic(self, dna):
        bad = np.full((4, 4), 0.25)
        bad = bad.copy()
        bad[0, 0] = 0.5
        with pytest.raises(ValueError):
            MtdModel(dna, 2, 1, [0.5, 0.5], [np.full((4, 4), 0.25), bad])

    def test_single_matrix_requires_l1(self, dna):
        with pytest.raises(ValueError):
            MtdModel(dna, 3, 2, [0.5, 0.5], [np.full((16, 4), 0.25)], variant="single_matrix")

    def test_matrix_count(self, dna):
        u = np.full((4, 4), 0.25)
        with pytest.raises(ShapeMismatch):
            MtdModel(dna, 2, 1, [0.5, 0.5], [u])


class TestTransitionProb:
    def test_printed_example(self, equiv_model_a):
        # history (a, a), next letter t: 0.3*0.4 + 0.7*0.7
        assert transition_prob(equiv_model_a, [0, 0], 3) == pytest.approx(0.61, abs=1e-12)

    def test_single_component_is_its_matrix(self, dna):
        rng = np.random.default_rng(3)
        mat = rng.random((16, 4))
        mat /= mat.sum(axis=1, keepdims=True)
        model = MtdModel(dna, 2, 2, [1.0], [mat])
        for h in range(16):
            hist = index_to_word(h, 2, 4)
            for j in range(4):
                assert transition_prob(model, hist, j) == pytest.approx(mat[h, j], abs=1e-15)

    def test_identical_components_collapse(self, dna):
        rng = np.random.default_rng(4)
        p = rng.random((4, 4))
        p /= p.sum(axis=1, keepdims=True)
        model = MtdModel(dna, 2, 1, [0.5, 0.5], [p, p])
        for i2 in range(4):
            for i1 in range(4):
                for j in range(4):
                    assert transition_prob(model, [i2, i1], j) == pytest.approx(
                        0.5 * p[i1, j] + 0.5 * p[i2, j], abs=1e-15
                    )

    def test_errors(self, equiv_model_a):
        with pytest.raises(ShapeMismatch):
            transition_prob(equiv_model_a, [0], 0)
        with pytest.raises(InvalidSymbol):
            transition_prob(equiv_model_a, [0, 4], 0)
        with pytest.raises(InvalidSymbol):
            transition_prob(equiv_model_a, [0, 0], 9)

    @pytest.mark.parametrize("seed", range(8))
    def test_rows_normalize(self, seed):
        rng = np.random.default_rng(seed)
        q = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        l = int(rng.integers(1, m + 1))
        model = random_mtd(q, m, l, seed=seed)
        for h in range(q**m):
            hist = index_to_word(h, m, q)
            total = sum(transition_prob(model, hist, j) for j in range(q))
            assert total == pytest.approx(1.0, abs=1e-12)


class TestFullTransitionMatrix:
    def test_pewee_anchor(self, pewee_em):
        table = full_transition_matrix(pewee_em).table
        assert table[word_to_index([0, 0], 3), 0] == pytest.approx(0.75305, abs=1e-12)

    def test_equivalent_pair_same_table(self, equiv_model_a, equiv_model_b):
        ta = full_transition_matrix(equiv_model_a).table
        tb = full_transition_matrix(equiv_model_b).table
        assert np.abs(ta - tb).max() < 1e-12
        assert np.abs(ta - refdata.EQUIV_TABLE).max() < 0.005

    def test_order_one_single_component(self, dna):
        rng = np.random.default_rng(5)
        mat = rng.random((4, 4))
        mat /= mat.sum(axis=1, keepdims=True)
        model = MtdModel(dna, 1, 1, [1.0], [mat])
        assert np.abs(full_transition_matrix(model).table - mat).max() < 1e-15

    def test_size_guard(self):
        model = random_mtd(10, 8, 1, seed=0)
        with pytest.raises(ModelTooLarge):
            full_transition_matrix(model)

    @pytest.mark.parametrize("seed", range(6))
    def test_lag_difference_identity(self, seed):
        # changing only the lag-g letter moves the row by phi_g * matrix row gap
        rng = np.random.default_rng(seed)
        q = int(rng.integers(2, 4))
        m = int(rng.integers(2, 4))
        model = random_mtd(q, m, 1, seed=seed + 100)
        table = full_transition_matrix(model).table
        for g in range(1, m + 1):
            for _ in range(10):
                h = int(rng.integers(0, q**m))
                ig = (h // q ** (g - 1)) % q
                ig2 = int(rng.integers(0, q))
                h2 = h + (ig2 - ig) * q ** (g - 1)
                expected = model.phi[g - 1] * (
                    model.matrices[g - 1][ig] - model.matrices[g - 1][ig2]
                )
                assert np.abs((table[h] - table[h2]) - expected).max() < 1e-12


class TestSequenceLoglik:
    def test_uniform_model(self, dna):
        model = MtdModel(dna, 2, 1, [0.4, 0.6], [np.full((4, 4), 0.25)] * 2)
        seq = random_sequence(dna, 100, 0)
        assert sequence_loglik(model, seq) == pytest.approx(-98 * np.log(4), abs=1e-9)

    def test_empty_sum_contract(self, equiv_model_a, dna):
        seq = Sequence(dna, [0, 1])
        with pytest.warns(RuntimeWarning, match="no scored position"):
            assert sequence_loglik(equiv_model_a, seq) == 0.0

    def test_equivalent_pair_same_loglik(self, equiv_model_a, equiv_model_b, dna):
        seq = random_sequence(dna, 200, 11)
        la = sequence_loglik(equiv_model_a, seq)
        lb = sequence_loglik(equiv_model_b, seq)
        assert la == pytest.approx(lb, abs=1e-9)
        # oracle: score with the expanded dense table
        dense = full_transition_matrix(equiv_model_a)
        assert la == pytest.approx(sequence_loglik(dense, seq), abs=1e-9)

    def test_zero_probability_sentinel(self, song):
        pi1 = np.array([[1.0, 0.0, 0.0]] * 3)
        pi2 = np.array([[1.0, 0.0, 0.0]] * 3)
        model = MtdModel(song, 2, 1, [0.5, 0.5], [pi1, pi2])
        seq = Sequence(song, [0, 0, 1])
        with pytest.warns(RuntimeWarning, match="zero transition probability"):
            assert sequence_loglik(model, seq) == float("-inf")

    def test_full_markov_equivalence_at_l_equals_m(self, dna):
        rng = np.random.default_rng(21)
        mat = rng.random((16, 4))
        mat /= mat.sum(axis=1, keepdims=True)
        mtd = MtdModel(dna, 2, 2, [1.0], [mat])
        dense = FullMarkovModel(dna, 2, mat)
        for seed in range(5):
            seq = random_sequence(dna, 80, seed)
            assert sequence_loglik(mtd, seq) == pytest.approx(
                sequence_loglik(dense, seq), abs=1e-12
            )


class TestSampleSequence:
    def test_deterministic(self, equiv_model_a):
        s1 = sample_sequence(equiv_model_a, 500, seed=9)
        s2 = sample_sequence(equiv_model_a, 500, seed=9)
        assert np.array_equal(s1.data, s2.data)

    def test_point_mass_rows(self, song):
        # every row sends mass to phrase (row index + 1) mod 3 via lag 1
        pi = np.zeros((3, 3))
        for i in range(3):
            pi[i, (i + 1) % 3] = 1.0
        model = MtdModel(song, 2, 1, [1.0, 0.0], [pi, pi])
        seq = sample_sequence(model, 10, seed=1, init=[0, 0])
        expected = [0, 0]
        while len(expected) < 10:
            expected.append((expected[-1] + 1) % 3)
        assert list(seq.data) == expected

    def test_length_equals_order(self, equiv_model_a):
        seq = sample_sequence(equiv_model_a, 2, seed=4)
        assert len(seq) == 2

    def test_prefix_validation(self, equiv_model_a):
        with pytest.raises(ShapeMismatch):
            sample_sequence(equiv_model_a, 10, seed=0, init=[0])
        with pytest.raises(ShapeMismatch):
            sample_sequence(equiv_model_a, 1, seed=0)

    def test_empirical_conditional_frequencies(self, equiv_model_a):
        # law of large numbers against the expanded table
        n = 10**6
        seq = sample_sequence(equiv_model_a, n, seed=13)
        table = full_transition_matrix(equiv_model_a).table
        q = 4
        words = np.zeros(n - 2, dtype=np.int64)
        for off in range(3):
            words = words * q + seq.data[off : n - 2 + off]
        counts = np.zeros((16, 4))
        np.add.at(counts, (words // q, words % q), 1.0)
        visits = counts.sum(axis=1)
        assert (visits >= 10**4).all()
        rows = counts / visits[:, None]
        tv = np.abs(rows - table).sum(axis=1)
        assert tv.max() < 0.01


class TestRandomMtd:
    @pytest.mark.parametrize("variant,l", [("general", 1), ("general", 2), ("single_matrix", 1)])
    def test_invariants(self, variant, l):
        model = random_mtd(3, 3, l, variant=variant, seed=5)
        assert model.phi.min() > 0
        assert abs(model.phi.sum() - 1.0) < 1e-12
        for mat in model.matrices:
            assert mat.min() > 0
            assert np.abs(mat.sum(axis=1) - 1.0).max() < 1e-12

    def test_seed_determinism(self):
        a = random_mtd(4, 2, 1, seed=77)
        b = random_mtd(4, 2, 1, seed=77)
        assert a == b

    def test_seed_collisions(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            s1, s2 = rng.integers(0, 2**31, size=2)
            if s1 == s2:
                continue
            a = random_mtd(3, 2, 1, seed=int(s1))
            b = random_mtd(3, 2, 1, seed=int(s2))
            gap = max(
                np.abs(a.phi - b.phi).max(),
                max(np.abs(x - y).max() for x, y in zip(a.matrices, b.matrices)),
            )
            assert gap > 1e-6

    def test_random_full_markov(self):
        model = random_full_markov(4, 3, seed=2)
        assert model.table.shape == (64, 4)
        assert model.table.min() > 0


class TestSamplingLoglikConsistency:
    def test_entropy_rate(self, equiv_model_a):
        # mean per-letter log-likelihood of samples ~ -(conditional entropy)
        from mtdchain import stationary_histories

        table = full_transition_matrix(equiv_model_a).table
        mu = stationary_histories(equiv_model_a)
        entropy = -float((mu[:, None] * table * np.log(table)).sum())
        n = 10**4
        means = []
        for seed in range(50):
            seq = sample_sequence(equiv_model_a, n, seed=seed)
            means.append(sequence_loglik(equiv_model_a, seq) / (n - 2))
        means = np.array(means)
        sem = means.std(ddof=1) / np.sqrt(len(means))
        assert abs(means.mean() + entropy) < 3 * sem
