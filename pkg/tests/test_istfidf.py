import csv
import json
import math
import random
from itertools import combinations

import pytest

from oracles import batch_tfidf_similarities
from streamorg.errors import DuplicateDocumentError, UnknownDocumentError
from streamorg.istfidf import IncrementalTfIdf
from synth import random_corpus_tokens


class TestProcessDocument:
    def test_first_document(self):
        engine = IncrementalTfIdf()
        touched = engine.add_document("d1", ["cat", "cat", "dog"])
        assert touched == set()
        assert engine.document_count == 1
        assert engine.term_frequency("d1", "cat") == 2
        assert engine.document_frequency("cat") == 1
        assert engine.similarity_snapshot() == {}

    def test_idf_zero_shared_term_drops_below_threshold(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["cat", "cat", "dog"])
        touched = engine.add_document("d2", ["cat"])
        assert touched == {"d1"}
        # idf(cat) = ln(2/2) = 0 so the only shared coordinate contributes 0
        assert engine.weight("d2", "cat") == 0.0
        assert engine.similarity_snapshot() == {}
        assert engine.similarity("d1", "d2") == 0.0

    def test_disjoint_documents_store_nothing(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["cat"])
        touched = engine.add_document("d2", ["fish"])
        assert touched == set()
        assert engine.similarity("d1", "d2") == 0.0
        assert engine.similarity_snapshot() == {}

    def test_duplicate_id_rejected(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["a"])
        with pytest.raises(DuplicateDocumentError):
            engine.add_document("d1", ["b"])

    def test_empty_document_tolerated(self):
        engine = IncrementalTfIdf()
        assert engine.add_document("d1", []) == set()
        assert engine.document_count == 1
        engine.add_document("d2", ["a"])
        assert engine.similarity("d1", "d2") == 0.0


class TestExtendDocument:
    def test_empty_extension_is_a_no_op(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["a"])
        before = engine.similarity_snapshot()
        assert engine.extend_document("d1", []) == set()
        assert engine.similarity_snapshot() == before
        assert engine.term_frequency("d1", "a") == 1

    def test_existing_term_keeps_df(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["a"])
        engine.extend_document("d1", ["a"])
        assert engine.term_frequency("d1", "a") == 2
        assert engine.document_frequency("a") == 1

    def test_new_term_grows_vocabulary(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["a"])
        before = engine.term_count
        engine.extend_document("d1", ["b"])
        assert engine.document_frequency("b") == 1
        assert engine.term_count == before + 1

    def test_unknown_doc_rejected(self):
        engine = IncrementalTfIdf()
        with pytest.raises(UnknownDocumentError):
            engine.extend_document("ghost", ["a"])


class TestWeight:
    def test_closed_form(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["cat", "cat"])
        engine.add_document("d2", ["dog"])
        # tf=2, p=2, df=1
        assert engine.weight("d1", "cat") == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_term_in_all_docs_weighs_zero(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["cat"])
        engine.add_document("d2", ["cat"])
        assert engine.weight("d1", "cat") == 0.0

    def test_absent_term_weighs_zero(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["cat"])
        assert engine.weight("d1", "dog") == 0.0

    def test_unknown_doc(self):
        engine = IncrementalTfIdf()
        with pytest.raises(UnknownDocumentError):
            engine.weight("nope", "cat")


class TestSimilarity:
    def test_identical_distinctive_docs(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["alpha", "beta"])
        engine.add_document("d2", ["alpha", "beta"])
        engine.add_document("d3", ["gamma"])
        engine.full_refresh()  # idf grew with d3; bring the pair up to date
        assert engine.similarity("d1", "d2") == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self):
        engine = IncrementalTfIdf(similarity_threshold=0.0)
        engine.add_document("d1", ["a", "b"])
        engine.add_document("d2", ["a", "c"])
        engine.add_document("d3", ["d"])
        assert engine.similarity("d1", "d2") == engine.similarity("d2", "d1")

    def test_three_doc_value_matches_batch_oracle(self):
        tokens = {"d1": ["a", "b"], "d2": ["a", "c"], "d3": ["d"]}
        engine = IncrementalTfIdf(similarity_threshold=0.0)
        for doc_id, toks in tokens.items():
            engine.add_document(doc_id, toks)
        engine.full_refresh()
        expected = batch_tfidf_similarities(tokens, 0.0)
        assert engine.similarity("d1", "d2") == pytest.approx(
            expected[("d1", "d2")], abs=1e-12
        )

    def test_unknown_doc(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["a"])
        with pytest.raises(UnknownDocumentError):
            engine.similarity("d1", "d2")


class TestTopKeywords:
    def test_fewer_terms_than_requested(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["a", "b", "c"])
        assert len(engine.top_keywords("d1", 8)) == 3

    def test_tie_breaks_lexicographically(self):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["b", "a"])
        engine.add_document("d2", ["z"])
        keywords = [t for t, _ in engine.top_keywords("d1")]
        assert keywords == ["a", "b"]

    def test_sorted_by_weight(self):
        engine = IncrementalTfIdf()
        # a appears 3x, c 2x, b 1x; df equal, so weights order a > c > b
        engine.add_document("d1", ["a", "a", "a", "c", "c", "b"])
        engine.add_document("d2", ["unrelated"])
        top2 = [t for t, _ in engine.top_keywords("d1", 2)]
        assert top2 == ["a", "c"]


class TestIncrementalMatchesBatch:
    def test_random_streams_with_full_refresh(self):
        rng = random.Random(42)
        for _ in range(30):
            tokens = random_corpus_tokens(rng, max_docs=15, max_vocab=25, max_len=25)
            engine = IncrementalTfIdf()
            for doc_id, toks in tokens.items():
                engine.add_document(doc_id, toks)
            engine.full_refresh()
            expected = batch_tfidf_similarities(tokens, engine.threshold)
            assert engine.similarity_snapshot().keys() == expected.keys()
            for pair, value in expected.items():
                assert engine.similarity(*pair) == pytest.approx(value, abs=1e-9)

    def test_streams_with_extensions(self):
        rng = random.Random(43)
        for _ in range(20):
            vocab = [f"t{i}" for i in range(rng.randint(2, 20))]
            final_tokens: dict[str, list[str]] = {}
            engine = IncrementalTfIdf()
            for j in range(rng.randint(2, 10)):
                doc_id = f"d{j}"
                first = [rng.choice(vocab) for _ in range(rng.randint(0, 15))]
                engine.add_document(doc_id, first)
                final_tokens[doc_id] = list(first)
                if rng.random() < 0.5:
                    extra = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
                    engine.extend_document(doc_id, extra)
                    final_tokens[doc_id] += extra
            engine.full_refresh()
            expected = batch_tfidf_similarities(final_tokens, engine.threshold)
            for a, b in combinations(sorted(final_tokens), 2):
                assert engine.similarity(a, b) == pytest.approx(
                    expected.get((a, b), 0.0), abs=1e-9
                )


class TestLocalityAndAccounting:
    def test_touched_set_is_exactly_the_sharers(self):
        rng = random.Random(44)
        tokens = random_corpus_tokens(rng, max_docs=12, max_vocab=15, max_len=15)
        engine = IncrementalTfIdf()
        seen: dict[str, set[str]] = {}
        for doc_id, toks in tokens.items():
            expected_sharers = {
                other for other, terms in seen.items() if terms & set(toks)
            }
            touched = engine.add_document(doc_id, toks)
            assert touched == expected_sharers
            assert engine.last_touched == expected_sharers | {doc_id}
            seen[doc_id] = set(toks)

    def test_edge_count_equals_distinct_token_totals(self):
        rng = random.Random(45)
        tokens = random_corpus_tokens(rng, max_docs=10, max_vocab=20, max_len=30)
        engine = IncrementalTfIdf()
        for doc_id, toks in tokens.items():
            engine.add_document(doc_id, toks)
        assert engine.edge_count == sum(len(set(t)) for t in tokens.values())

    def test_stored_pairs_share_a_term_and_respect_threshold(self):
        rng = random.Random(46)
        tokens = random_corpus_tokens(rng, max_docs=15, max_vocab=10, max_len=20)
        engine = IncrementalTfIdf()
        for doc_id, toks in tokens.items():
            engine.add_document(doc_id, toks)
        for (a, b), s in engine.similarity_snapshot().items():
            assert set(tokens[a]) & set(tokens[b])
            assert engine.threshold <= s <= 1.0

    def test_df_recount(self):
        rng = random.Random(47)
        tokens = random_corpus_tokens(rng, max_docs=10, max_vocab=15, max_len=20)
        engine = IncrementalTfIdf()
        for doc_id, toks in tokens.items():
            engine.add_document(doc_id, toks)
        vocabulary = {t for toks in tokens.values() for t in toks}
        for term in vocabulary:
            recount = sum(1 for toks in tokens.values() if term in toks)
            assert engine.document_frequency(term) == recount


class TestSnapshotExport:
    def test_csv_and_sidecar(self, tmp_path):
        engine = IncrementalTfIdf()
        engine.add_document("d1", ["alpha", "beta"])
        engine.add_document("d2", ["alpha", "beta"])
        engine.add_document("d3", ["gamma"])
        out = tmp_path / "snapshot.csv"
        engine.export_snapshot(out)

        with out.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["doc_a"] == "d1" and rows[0]["doc_b"] == "d2"
        assert float(rows[0]["similarity"]) == pytest.approx(1.0)

        meta = json.loads((tmp_path / "snapshot.meta.json").read_text())
        assert meta == {
            "documents": 3,
            "terms": 3,
            "similarity_threshold": 0.12,
        }
