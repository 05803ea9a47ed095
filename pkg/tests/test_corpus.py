"""Tests for TSV ingestion, stats, note retrieval and keyword search."""
from __future__ import annotations

import csv
import random

import pytest

from medtextkit import corpus
from medtextkit.corpus import (
    Corpus,
    IndexStoreError,
    IngestError,
    NoteNotFoundError,
    SchemaError,
    ingest,
)
from medtextkit.textproc import tokenize

HEADER = ["ROW_ID", "SUBJECT_ID", "HADM_ID", "CATEGORY", "TEXT"]

# Three notes, two patients; bodies hold 2/1/1 sentences.
FIXTURE_ROWS = [
    ["1", "1", "100", "Discharge summary",
     "Patient admitted with chest pain. Started on aspirin."],
    ["2", "1", "101", "Nursing", "Resting comfortably overnight."],
    ["3", "2", "", "Radiology", "Seen on [**2144-4-21**] for imaging."],
]


def write_tsv(path, rows, header=HEADER):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter="\t", quotechar='"')
        writer.writerow(header)
        writer.writerows(rows)


@pytest.fixture
def fixture_index(tmp_path):
    tsv = tmp_path / "notes.tsv"
    write_tsv(tsv, FIXTURE_ROWS)
    index_dir = tmp_path / "index"
    stats = ingest(tsv, index_dir)
    return index_dir, stats


class TestIngest:
    def test_fixture_stats(self, fixture_index):
        _, stats = fixture_index
        assert (stats.patients, stats.documents, stats.sentences) == (2, 3, 4)

    def test_header_only(self, tmp_path):
        tsv = tmp_path / "empty.tsv"
        write_tsv(tsv, [])
        stats = ingest(tsv, tmp_path / "ix")
        assert (stats.patients, stats.documents, stats.sentences) == (0, 0, 0)

    def test_missing_text_column(self, tmp_path):
        tsv = tmp_path / "bad.tsv"
        write_tsv(tsv, [], header=["ROW_ID", "SUBJECT_ID", "CATEGORY"])
        with pytest.raises(SchemaError) as err:
            ingest(tsv, tmp_path / "ix")
        assert err.value.column == "TEXT"

    def test_header_case_insensitive(self, tmp_path):
        tsv = tmp_path / "lower.tsv"
        write_tsv(tsv, [["9", "3", "", "Note", "Short note."]],
                  header=[h.lower() for h in HEADER])
        stats = ingest(tsv, tmp_path / "ix")
        assert stats.documents == 1

    def test_duplicate_row_id(self, tmp_path):
        tsv = tmp_path / "dup.tsv"
        write_tsv(tsv, [FIXTURE_ROWS[0], FIXTURE_ROWS[0]])
        with pytest.raises(IngestError, match="duplicate ROW_ID 1"):
            ingest(tsv, tmp_path / "ix")

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(OSError):
            ingest(tmp_path / "absent.tsv", tmp_path / "ix")

    def test_multiline_quoted_text(self, tmp_path):
        body = "Line one of the note.\nLine two continues.\n\nFinal line."
        tsv = tmp_path / "multi.tsv"
        write_tsv(tsv, [["7", "4", "", "Note", body]])
        index_dir = tmp_path / "ix"
        ingest(tsv, index_dir)
        assert corpus.get_note(index_dir, "7").text == body

    def test_reingest_replaces(self, fixture_index, tmp_path):
        index_dir, _ = fixture_index
        tsv = tmp_path / "second.tsv"
        write_tsv(tsv, [["10", "5", "", "Note", "Replacement corpus."]])
        stats = ingest(tsv, index_dir)
        assert stats.documents == 1
        assert corpus.stats(index_dir).documents == 1
        with pytest.raises(NoteNotFoundError):
            corpus.get_note(index_dir, "1")


class TestStats:
    def test_matches_ingest(self, fixture_index):
        index_dir, stats = fixture_index
        assert corpus.stats(index_dir) == stats

    def test_missing_index(self, tmp_path):
        with pytest.raises(IndexStoreError):
            corpus.stats(tmp_path / "nowhere")

    def test_version_check(self, fixture_index):
        index_dir, _ = fixture_index
        meta = index_dir / "meta.json"
        meta.write_text(meta.read_text().replace('"version": 1', '"version": 99'))
        with pytest.raises(IndexStoreError, match="incompatible"):
            corpus.stats(index_dir)

    def test_generation_mismatch(self, fixture_index, tmp_path):
        index_dir, _ = fixture_index
        # Splice the meta file from a second ingest into the first index.
        other_tsv = tmp_path / "other.tsv"
        write_tsv(other_tsv, FIXTURE_ROWS)
        other_dir = tmp_path / "other-ix"
        ingest(other_tsv, other_dir)
        (index_dir / "meta.json").write_text((other_dir / "meta.json").read_text())
        with pytest.raises(IndexStoreError, match="different ingest"):
            Corpus.open(index_dir)


class TestGetNote:
    def test_round_trip(self, fixture_index):
        index_dir, _ = fixture_index
        record = corpus.get_note(index_dir, "1")
        assert record.text == FIXTURE_ROWS[0][4]
        assert record.subject_id == "1"
        assert record.hadm_id == "100"
        assert record.category == "Discharge summary"

    def test_deid_brackets_preserved(self, fixture_index):
        index_dir, _ = fixture_index
        assert corpus.get_note(index_dir, "3").text == "Seen on [**2144-4-21**] for imaging."

    def test_missing_hadm_is_none(self, fixture_index):
        index_dir, _ = fixture_index
        assert corpus.get_note(index_dir, "3").hadm_id is None

    def test_unknown_id(self, fixture_index):
        index_dir, _ = fixture_index
        with pytest.raises(NoteNotFoundError):
            corpus.get_note(index_dir, "999")


class TestGetPatientNotes:
    def test_all_notes_ordered(self, fixture_index):
        index_dir, _ = fixture_index
        records = corpus.get_patient_notes(index_dir, "1")
        assert [r.row_id for r in records] == ["1", "2"]

    def test_limit(self, fixture_index):
        index_dir, _ = fixture_index
        records = corpus.get_patient_notes(index_dir, "1", limit=1)
        assert [r.row_id for r in records] == ["1"]

    def test_unknown_subject(self, fixture_index):
        index_dir, _ = fixture_index
        assert corpus.get_patient_notes(index_dir, "404") == []


class TestSearch:
    def test_and_semantics(self, fixture_index):
        index_dir, _ = fixture_index
        hits = corpus.search(index_dir, "chest pain")
        assert [rid for rid, _ in hits] == ["1"]

    def test_absent_term(self, fixture_index):
        index_dir, _ = fixture_index
        assert corpus.search(index_dir, "zebra") == []

    def test_empty_query_rejected(self, fixture_index):
        index_dir, _ = fixture_index
        with pytest.raises(ValueError):
            corpus.search(index_dir, "... !!")

    def test_tf_length_normalized_ranking(self, tmp_path):
        rows = [
            # Note A: "pain" twice in 6 tokens -> 2/6.
            ["1", "1", "", "Note", "Chest pain. Pain severe at night."],
            # Note B: "pain" once in 8 tokens -> 1/8.
            ["2", "1", "", "Note", "Some mild pain reported by the patient today."],
        ]
        tsv = tmp_path / "rank.tsv"
        write_tsv(tsv, rows)
        index_dir = tmp_path / "ix"
        ingest(tsv, index_dir)
        hits = corpus.search(index_dir, "pain")
        assert [rid for rid, _ in hits] == ["1", "2"]
        assert hits[0][1] == pytest.approx(2 / 6)
        assert hits[1][1] == pytest.approx(1 / 8)

    def test_tie_breaks_to_lower_row_id(self, tmp_path):
        rows = [
            ["12", "1", "", "Note", "aspirin given"],
            ["2", "1", "", "Note", "aspirin given"],
        ]
        tsv = tmp_path / "tie.tsv"
        write_tsv(tsv, rows)
        index_dir = tmp_path / "ix"
        ingest(tsv, index_dir)
        hits = corpus.search(index_dir, "aspirin")
        assert [rid for rid, _ in hits] == ["2", "12"]

    def test_limit_applies(self, tmp_path):
        rows = [[str(i), "1", "", "Note", "fever noted"] for i in range(1, 25)]
        tsv = tmp_path / "many.tsv"
        write_tsv(tsv, rows)
        index_dir = tmp_path / "ix"
        ingest(tsv, index_dir)
        assert len(corpus.search(index_dir, "fever")) == 10
        assert len(corpus.search(index_dir, "fever", limit=24)) == 24


VOCAB = [
    "chest", "pain", "fever", "cough", "aspirin", "warfarin", "glucose",
    "insulin", "renal", "cardiac", "nausea", "dyspnea", "edema", "sepsis",
]


def synthetic_corpus(rng: random.Random, n: int) -> list[list[str]]:
    rows = []
    for i in range(1, n + 1):
        n_sents = rng.randint(1, 4)
        sents = []
        for _ in range(n_sents):
            words = [rng.choice(VOCAB) for _ in range(rng.randint(3, 9))]
            sents.append(" ".join(words).capitalize() + ".")
        rows.append([str(i), str(rng.randint(1, n // 3 + 1)), "", "Note", " ".join(sents)])
    return rows


class TestSearchSoundnessCompleteness:
    def test_against_full_scan(self, tmp_path):
        rng = random.Random(77)
        rows = synthetic_corpus(rng, 200)
        tsv = tmp_path / "synthetic.tsv"
        write_tsv(tsv, rows)
        index_dir = tmp_path / "ix"
        ingest(tsv, index_dir)
        handle = Corpus.open(index_dir)
        text_by_id = {row[0]: row[4] for row in rows}
        for _ in range(25):
            terms = rng.sample(VOCAB, rng.randint(1, 3))
            query = " ".join(terms)
            hits = handle.search(query, limit=200)
            hit_ids = {rid for rid, _ in hits}
            scan_ids = {
                rid
                for rid, text in text_by_id.items()
                if all(t in tokenize(text) for t in terms)
            }
            assert hit_ids == scan_ids

    def test_reproducible_ingest(self, tmp_path):
        rng = random.Random(78)
        rows = synthetic_corpus(rng, 50)
        tsv = tmp_path / "synthetic.tsv"
        write_tsv(tsv, rows)
        first_dir, second_dir = tmp_path / "ix1", tmp_path / "ix2"
        first, second = ingest(tsv, first_dir), ingest(tsv, second_dir)
        assert first == second
        assert corpus.search(first_dir, "chest pain", limit=50) == corpus.search(
            second_dir, "chest pain", limit=50
        )
