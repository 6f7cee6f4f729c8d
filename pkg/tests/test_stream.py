import pytest

from streamorg.errors import ConfigError, CorpusError, DuplicateDocumentError
from streamorg.stream import (
    CheckpointPlan,
    Document,
    EventKind,
    ingest_corpus,
    ods_events,
    sds_events,
)


def write(tmp_path, name, content):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return path


class TestIngestJsonl:
    def test_three_records_in_order(self, tmp_path):
        path = write(
            tmp_path,
            "c.jsonl",
            '{"id": "a", "text": "one", "label": "x"}\n'
            '{"id": "b", "text": "two"}\n'
            '{"id": "c", "text": "three", "label": "y"}\n',
        )
        docs = ingest_corpus(path)
        assert [d.id for d in docs] == ["a", "b", "c"]
        assert docs[0] == Document("a", "one", "x")
        assert docs[1].label is None

    def test_malformed_line_names_line_number(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"id": "a", "text": "t"}\nnot json\n')
        with pytest.raises(CorpusError, match="line 2"):
            ingest_corpus(path)

    def test_duplicate_id_raises_at_second_occurrence(self, tmp_path):
        path = write(
            tmp_path,
            "c.jsonl",
            '{"id": "d1", "text": "x"}\n{"id": "d1", "text": "y"}\n',
        )
        with pytest.raises(DuplicateDocumentError, match="line 2"):
            ingest_corpus(path)

    def test_missing_id_rejected(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"text": "x"}\n')
        with pytest.raises(CorpusError, match="line 1"):
            ingest_corpus(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"id": "a", "text": "x"}\n\n')
        assert len(ingest_corpus(path)) == 1


class TestIngestCsv:
    def test_roundtrip(self, tmp_path):
        path = write(
            tmp_path,
            "c.csv",
            'id,text,label\na,"hello, world",x\nb,,\n',
        )
        docs = ingest_corpus(path, "csv")
        assert docs[0] == Document("a", "hello, world", "x")
        assert docs[1] == Document("b", "", None)  # empty text tolerated

    def test_duplicate_id(self, tmp_path):
        path = write(tmp_path, "c.csv", "id,text,label\nd1,x,\nd1,y,\n")
        with pytest.raises(DuplicateDocumentError):
            ingest_corpus(path, "csv")

    def test_missing_header(self, tmp_path):
        path = write(tmp_path, "c.csv", "name,body\na,b\n")
        with pytest.raises(CorpusError, match="header"):
            ingest_corpus(path, "csv")

    def test_unknown_format(self, tmp_path):
        path = write(tmp_path, "c.csv", "id,text\na,b\n")
        with pytest.raises(ConfigError):
            ingest_corpus(path, "xml")


class TestOdsEvents:
    def test_one_new_event_per_document(self):
        corpus = [Document("d1", "a"), Document("d2", "b")]
        events = list(ods_events(corpus))
        assert [(e.kind, e.doc_id) for e in events] == [
            (EventKind.NEW, "d1"),
            (EventKind.NEW, "d2"),
        ]

    def test_empty_corpus(self):
        assert list(ods_events([])) == []

    def test_no_extend_events(self):
        corpus = [Document(f"d{i}", "text here") for i in range(40)]
        assert all(e.kind is EventKind.NEW for e in ods_events(corpus))

    def test_deterministic_from_same_file(self, tmp_path):
        path = write(
            tmp_path,
            "c.jsonl",
            '{"id": "a", "text": "one two"}\n{"id": "b", "text": "three"}\n',
        )
        first = list(ods_events(ingest_corpus(path)))
        second = list(ods_events(ingest_corpus(path)))
        assert first == second


class TestSdsEvents:
    def test_first_chunk_new_rest_extend(self):
        corpus = [Document("d1", "a b c d")]
        events = list(sds_events(corpus, parts=2))
        assert events[0].kind is EventKind.NEW
        assert all(e.kind is EventKind.EXTEND for e in events[1:])
        joined = " ".join(e.text for e in events)
        assert joined.split() == ["a", "b", "c", "d"]

    def test_extend_only_after_new(self):
        corpus = [Document("d1", "a b"), Document("d2", "c d")]
        seen = set()
        for event in sds_events(corpus, parts=2):
            if event.kind is EventKind.EXTEND:
                assert event.doc_id in seen
            else:
                assert event.doc_id not in seen
                seen.add(event.doc_id)

    def test_empty_text_single_new(self):
        events = list(sds_events([Document("d1", "")], parts=3))
        assert [(e.kind, e.text) for e in events] == [(EventKind.NEW, "")]

    def test_parts_cap(self):
        events = list(sds_events([Document("d1", "a b c d e f")], parts=3))
        assert len(events) == 3


class TestCheckpointPlan:
    def test_fires_on_multiples(self):
        plan = CheckpointPlan(25, 30)
        assert plan.fires(25)
        assert not plan.fires(26)
        assert not plan.fires(775)  # beyond the 30th checkpoint

    def test_checkpoints_over_750_docs(self):
        plan = CheckpointPlan(25, 30)
        fired = [i for i in range(1, 751) if plan.fires(i)]
        assert fired == [25 * c for c in range(1, 31)]
        assert len(fired) == 30

    def test_exactly_count_checkpoints_on_long_stream(self):
        plan = CheckpointPlan(3, 4)
        fired = [i for i in range(1, 100) if plan.fires(i)]
        assert len(fired) == plan.count

    def test_checkpoint_number(self):
        plan = CheckpointPlan(25, 30)
        assert plan.checkpoint_number(50) == 2
        with pytest.raises(ValueError):
            plan.checkpoint_number(51)

    def test_validation(self):
        with pytest.raises(ConfigError):
            CheckpointPlan(0, 30)
        with pytest.raises(ConfigError):
            CheckpointPlan(25, 0)
        with pytest.raises(ConfigError):
            CheckpointPlan(25, 3, class_counts=(1, 2))
        with pytest.raises(ConfigError):
            CheckpointPlan(25, 2, class_counts=(1, 0))

    def test_class_counts_coerced_to_tuple(self):
        plan = CheckpointPlan(5, 3, class_counts=[2, 3, 4])
        assert plan.class_counts == (2, 3, 4)

    def test_index_must_be_positive(self):
        with pytest.raises(ValueError):
            CheckpointPlan(5, 3).fires(0)
