"""
IBMモデル1/2・ビタビアライメント・対称化のテスト
"""

import random

import numpy as np
import pytest

from src.exceptions import DataError, ValidationError
from src.models.alignment import (
    GROW_DIAG,
    GROW_DIAG_FINAL,
    GROW_DIAG_FINAL_AND,
    HEURISTICS,
    INTERSECTION,
    NULL,
    UNION,
    AlignmentMatrix,
    LexicalTable,
)
from src.services.alignment_service import AlignmentService
from src.storage.repositories.model_repository import ModelRepository
from src.utils.prob_utils import ProbUtils

TWO_PAIRS = [(["b", "c"], ["y", "z"]), (["b"], ["y"])]


@pytest.fixture
def service():
    return AlignmentService()


def monotone_corpus(count=10, seed=5):
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        length = rng.choice((3, 4))
        words = rng.sample(range(8), length)
        pairs.append(([f"w{k}" for k in words], [f"v{k}" for k in words]))
    return pairs


class TestIbm1:
    def test_translation_probability_grows(self, service):
        values = []
        for iterations in range(1, 6):
            table, _ = service.train_ibm1(TWO_PAIRS, iterations)
            values.append(table.prob("b", "y"))
            if iterations >= 2:
                assert table.prob("b", "y") > table.prob("b", "z")
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_single_pair_posterior(self, service):
        pairs = [(["a"], ["x"])]
        initial = service.initial_lexical_table(pairs)
        posteriors = service.alignment_posteriors(["a"], ["x"], initial)
        np.testing.assert_allclose(posteriors, [[0.5, 0.5]])
        table, _ = service.train_ibm1(pairs, 1)
        assert table.prob("a", "x") == 1.0
        assert table.prob(NULL, "x") == 1.0

    def test_zero_iterations(self, service):
        with pytest.raises(ValidationError):
            service.train_ibm1(TWO_PAIRS, 0)

    def test_empty_corpus(self, service):
        with pytest.raises(DataError, match="empty corpus"):
            service.train_ibm1([], 5)

    def test_likelihood_non_decreasing(self, service):
        _, lls = service.train_ibm1(monotone_corpus(), 6)
        assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))

    def test_rows_normalized(self, service):
        table, _ = service.train_ibm1(monotone_corpus(), 3)
        assert ProbUtils.rows_normalized(table.t, lambda key: key[0])

    def test_pair_order_invariance(self, service):
        pairs = monotone_corpus()
        forward, forward_ll = service.train_ibm1(pairs, 3)
        backward, backward_ll = service.train_ibm1(list(reversed(pairs)), 3)
        assert forward.t == backward.t
        assert forward_ll == backward_ll


class TestIbm2:
    def test_needs_initialization(self, service):
        with pytest.raises(ValidationError):
            service.train_ibm2(TWO_PAIRS, 3, init=None)

    def test_zero_iterations(self, service):
        table, _ = service.train_ibm1(TWO_PAIRS, 2)
        with pytest.raises(ValidationError):
            service.train_ibm2(TWO_PAIRS, 0, init=table)

    def test_monotone_corpus_concentrates_on_diagonal(self, service):
        pairs = monotone_corpus()
        model = service.train_direction(pairs, 5, 5)
        for length in (3, 4):
            for j in range(length):
                row = [model.distortion.prob(i, j, length, length) for i in range(length)]
                assert int(np.argmax(row)) == j
                assert row[j] > 1.0 / (length + 1)

    def test_invariants(self, service):
        model = service.train_direction(monotone_corpus(), 3, 4)
        lls = model.ibm2_log_likelihoods
        assert len(lls) == 4
        assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))
        assert ProbUtils.rows_normalized(model.lexical.t, lambda key: key[0])
        assert ProbUtils.rows_normalized(model.distortion.a, lambda key: key[1:])


class TestViterbi:
    def test_learned_link(self, service):
        table, _ = service.train_ibm1(TWO_PAIRS + [(["c"], ["z"])], 5)
        assert table.prob("b", "y") > table.prob(NULL, "y")
        assert service.viterbi_align(["b"], ["y"], table).links == {(0, 0)}

    def test_tie_with_null_leaves_word_unaligned(self, service):
        table, _ = service.train_ibm1([(["a"], ["x"])], 1)
        assert table.prob("a", "x") == table.prob(NULL, "x")
        assert service.viterbi_align(["a"], ["x"], table).links == frozenset()

    def test_tie_between_words_takes_first(self, service):
        table = LexicalTable(t={("a", "x"): 0.4, ("b", "x"): 0.4, (NULL, "x"): 0.2})
        assert service.viterbi_align(["b", "a"], ["x"], table).links == {(0, 0)}

    def test_all_oov_target(self, service):
        table, _ = service.train_ibm1(TWO_PAIRS, 5)
        assert service.viterbi_align(["b", "c"], ["p", "q"], table).links == frozenset()

    def test_deterministic(self, service):
        model = service.train_direction(monotone_corpus(), 3, 3)
        src, tgt = monotone_corpus()[0]
        first = service.viterbi_align(src, tgt, model.lexical, model.distortion)
        for _ in range(3):
            assert service.viterbi_align(src, tgt, model.lexical, model.distortion) == first

    def test_monotone_alignment_recovered(self, service):
        pairs = monotone_corpus(count=30)
        forward = service.train_direction(pairs, 5, 5)
        reverse = service.train_direction([(t, s) for s, t in pairs], 5, 5)
        for (src, _), alignment in zip(pairs, service.align_corpus(pairs, forward, reverse)):
            assert alignment.links == {(k, k) for k in range(len(src))}


class TestSymmetrize:
    def test_grow_diag_adds_diagonal_neighbor(self):
        fwd = AlignmentMatrix.of({(0, 0), (1, 1)}, 2, 2)
        rev = AlignmentMatrix.of({(0, 0)}, 2, 2)
        assert AlignmentService.symmetrize(fwd, rev, INTERSECTION).links == {(0, 0)}
        assert AlignmentService.symmetrize(fwd, rev, UNION).links == {(0, 0), (1, 1)}
        assert AlignmentService.symmetrize(fwd, rev, GROW_DIAG_FINAL_AND).links == {(0, 0), (1, 1)}

    @pytest.mark.parametrize("heuristic", HEURISTICS)
    def test_identical_inputs(self, heuristic):
        a = AlignmentMatrix.of({(0, 1), (1, 0), (2, 2), (2, 3)}, 3, 4)
        assert AlignmentService.symmetrize(a, a, heuristic) == a

    def test_final_variants(self):
        # (2,2) は近傍外で両端とも未対応なので final 段階でのみ追加される
        fwd = AlignmentMatrix.of({(0, 0), (2, 2)}, 3, 3)
        rev = AlignmentMatrix.of({(0, 0), (0, 1)}, 3, 3)
        assert AlignmentService.symmetrize(fwd, rev, GROW_DIAG).links == {(0, 0), (0, 1)}
        assert AlignmentService.symmetrize(fwd, rev, GROW_DIAG_FINAL_AND).links == {(0, 0), (0, 1), (2, 2)}

        # (2,0) は目的言語側が対応済み: final は追加、final-and は追加しない
        fwd = AlignmentMatrix.of({(0, 0), (2, 2)}, 3, 3)
        rev = AlignmentMatrix.of({(0, 0), (2, 0)}, 3, 3)
        assert AlignmentService.symmetrize(fwd, rev, GROW_DIAG_FINAL_AND).links == {(0, 0), (2, 2)}
        assert AlignmentService.symmetrize(fwd, rev, GROW_DIAG_FINAL).links == {(0, 0), (2, 0), (2, 2)}

    def test_random_containment(self):
        rng = random.Random(11)
        for _ in range(200):
            rows, cols = rng.randint(1, 6), rng.randint(1, 6)
            cells = [(i, j) for i in range(rows) for j in range(cols)]
            fwd = AlignmentMatrix.of(rng.sample(cells, rng.randint(0, len(cells))), rows, cols)
            rev = AlignmentMatrix.of(rng.sample(cells, rng.randint(0, len(cells))), rows, cols)
            inter = fwd.links & rev.links
            union = fwd.links | rev.links
            grown = AlignmentService.symmetrize(fwd, rev, GROW_DIAG).links
            gdfa = AlignmentService.symmetrize(fwd, rev, GROW_DIAG_FINAL_AND).links
            gdf = AlignmentService.symmetrize(fwd, rev, GROW_DIAG_FINAL).links
            assert inter <= grown <= gdfa <= union
            assert grown <= gdf <= union

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            AlignmentService.symmetrize(AlignmentMatrix.of(set(), 2, 2), AlignmentMatrix.of(set(), 2, 3))

    def test_unknown_heuristic(self):
        a = AlignmentMatrix.of(set(), 1, 1)
        with pytest.raises(ValidationError):
            AlignmentService.symmetrize(a, a, "grow")

    def test_link_outside_matrix(self):
        with pytest.raises(ValidationError):
            AlignmentMatrix.of({(2, 0)}, 2, 2)


class TestFiles:
    def test_pharaoh_round_trip(self, tmp_path):
        alignments = [
            AlignmentMatrix.of({(0, 0), (1, 2), (2, 1)}, 3, 3),
            AlignmentMatrix.of(set(), 1, 2),
        ]
        repository = ModelRepository()
        path = tmp_path / "aligned.grow-diag-final-and"
        repository.save_alignments(path, alignments)
        assert path.read_text(encoding="utf-8") == "0-0 1-2 2-1\n\n"
        assert repository.load_alignments(path, [(3, 3), (1, 2)]) == alignments

    def test_tables_round_trip(self, tmp_path, service):
        model = service.train_direction(monotone_corpus(), 2, 2)
        repository = ModelRepository()
        repository.save_lexical(tmp_path / "lex.s2t", model.lexical)
        repository.save_distortion(tmp_path / "ibm2.s2t", model.distortion)
        assert repository.load_lexical(tmp_path / "lex.s2t").t == model.lexical.t
        assert repository.load_distortion(tmp_path / "ibm2.s2t").a == model.distortion.a
