"""Clinical-note corpus store: TSV ingestion, stats, ID lookup and keyword
search over an embedded inverted index.

The input is a NOTEEVENTS-style TSV (tab-delimited, RFC-4180 quoting, so
note bodies may span lines inside quoted cells) with at least ROW_ID,
SUBJECT_ID, CATEGORY and TEXT columns; HADM_ID is optional. Ingestion
writes a self-contained index directory: a record file, a postings file and
a metadata file, each stamped with a magic header, format version and a
shared generation id. Files are staged and swapped in, so readers never see
a half-written index; after ingest the directory is immutable.

Ranking is length-normalized term frequency: the sum of the distinct query
terms' frequencies in a note divided by the note's token count, with AND
semantics over query terms and ties broken toward the lower row id.
"""
from __future__ import annotations

import json
import os
import uuid
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from medtextkit import textproc

__all__ = [
    "Corpus",
    "CorpusStats",
    "IndexStoreError",
    "IngestError",
    "NoteNotFoundError",
    "NoteRecord",
    "SchemaError",
    "get_note",
    "get_patient_notes",
    "ingest",
    "search",
    "stats",
]

MAGIC = "medtextkit-index"
VERSION = 1

_NOTES_FILE = "notes.jsonl"
_POSTINGS_FILE = "postings.json"
_META_FILE = "meta.json"

_REQUIRED_COLUMNS = ("ROW_ID", "SUBJECT_ID", "CATEGORY", "TEXT")


class SchemaError(ValueError):
    """The TSV header lacks a required column."""

    def __init__(self, column: str):
        super().__init__(f"TSV is missing required column {column}")
        self.column = column


class IngestError(ValueError):
    """A data row cannot be ingested (duplicate id, malformed row)."""


class IndexStoreError(RuntimeError):
    """The index directory is missing, corrupt, or of an incompatible version."""


class NoteNotFoundError(KeyError):
    """No note with the requested id exists in the corpus."""

    def __init__(self, row_id: str):
        super().__init__(row_id)
        self.row_id = row_id


@dataclass(frozen=True)
class NoteRecord:
    row_id: str
    subject_id: str
    hadm_id: str | None
    category: str
    text: str


@dataclass(frozen=True)
class CorpusStats:
    patients: int
    documents: int
    sentences: int


def _id_key(row_id: str) -> tuple[int, int | str]:
    """Total order over ids: numeric ids numerically, then others lexically."""
    if row_id.isdigit():
        return (0, int(row_id))
    return (1, row_id)


def _header(generation: str) -> dict:
    return {"magic": MAGIC, "version": VERSION, "generation": generation}


def _check_header(header: dict, path: Path) -> str:
    if not isinstance(header, dict) or header.get("magic") != MAGIC:
        raise IndexStoreError(f"{path} is not a medtextkit index file")
    if header.get("version") != VERSION:
        raise IndexStoreError(
            f"{path} has incompatible index version {header.get('version')!r}"
        )
    generation = header.get("generation")
    if not isinstance(generation, str):
        raise IndexStoreError(f"{path} lacks a generation stamp")
    return generation


def _write_swapped(path: Path, write) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        write(f)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def ingest(tsv_path: str | Path, index_dir: str | Path) -> CorpusStats:
    """Ingest a NOTEEVENTS-style TSV into ``index_dir``, replacing any prior index."""
    import csv

    index_dir = Path(index_dir)
    index_dir.mkdir(parents=True, exist_ok=True)

    notes: list[NoteRecord] = []
    seen: set[str] = set()
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_tokens: dict[str, int] = {}
    subjects: set[str] = set()
    sentence_count = 0

    with open(tsv_path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f, delimiter="\t", quotechar='"')
        try:
            header_row = next(reader)
        except StopIteration:
            raise SchemaError(_REQUIRED_COLUMNS[0]) from None
        positions = {name.strip().upper(): i for i, name in enumerate(header_row)}
        for column in _REQUIRED_COLUMNS:
            if column not in positions:
                raise SchemaError(column)
        hadm_pos = positions.get("HADM_ID")

        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < len(header_row):
                raise IngestError(f"row at line {line_no} has too few columns")
            row_id = row[positions["ROW_ID"]].strip()
            if not row_id:
                raise IngestError(f"row at line {line_no} has an empty ROW_ID")
            if row_id in seen:
                raise IngestError(f"duplicate ROW_ID {row_id}")
            seen.add(row_id)
            hadm = row[hadm_pos].strip() if hadm_pos is not None else ""
            record = NoteRecord(
                row_id=row_id,
                subject_id=row[positions["SUBJECT_ID"]].strip(),
                hadm_id=hadm or None,
                category=row[positions["CATEGORY"]],
                text=row[positions["TEXT"]],
            )
            notes.append(record)
            subjects.add(record.subject_id)
            tokens = textproc.tokenize(record.text)
            doc_tokens[row_id] = len(tokens)
            for token, tf in sorted(Counter(tokens).items()):
                postings.setdefault(token, []).append((row_id, tf))
            sentence_count += len(textproc.split_sentences(record.text))

    notes.sort(key=lambda r: _id_key(r.row_id))
    for plist in postings.values():
        plist.sort(key=lambda entry: _id_key(entry[0]))

    result = CorpusStats(
        patients=len(subjects), documents=len(notes), sentences=sentence_count
    )
    generation = uuid.uuid4().hex
    header = _header(generation)

    def write_notes(f) -> None:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for record in notes:
            f.write(
                json.dumps(
                    {
                        "row_id": record.row_id,
                        "subject_id": record.subject_id,
                        "hadm_id": record.hadm_id,
                        "category": record.category,
                        "text": record.text,
                        "tokens": doc_tokens[record.row_id],
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )

    def write_postings(f) -> None:
        doc = dict(_header(generation))
        doc["postings"] = {t: [[rid, tf] for rid, tf in pl] for t, pl in postings.items()}
        json.dump(doc, f, sort_keys=True, ensure_ascii=False)

    def write_meta(f) -> None:
        doc = dict(_header(generation))
        doc["stats"] = {
            "patients": result.patients,
            "documents": result.documents,
            "sentences": result.sentences,
        }
        json.dump(doc, f, sort_keys=True)

    # Meta goes last: its generation stamp is the commit point.
    _write_swapped(index_dir / _NOTES_FILE, write_notes)
    _write_swapped(index_dir / _POSTINGS_FILE, write_postings)
    _write_swapped(index_dir / _META_FILE, write_meta)
    return result


class Corpus:
    """Read handle over an ingested index directory."""

    def __init__(
        self,
        stats: CorpusStats,
        notes: dict[str, NoteRecord],
        doc_tokens: dict[str, int],
        postings: dict[str, list[tuple[str, int]]],
    ):
        self._stats = stats
        self._notes = notes
        self._doc_tokens = doc_tokens
        self._postings = postings
        by_subject: dict[str, list[str]] = {}
        for record in notes.values():
            by_subject.setdefault(record.subject_id, []).append(record.row_id)
        for ids in by_subject.values():
            ids.sort(key=_id_key)
        self._by_subject = by_subject

    @classmethod
    def open(cls, index_dir: str | Path) -> Corpus:
        index_dir = Path(index_dir)
        meta_path = index_dir / _META_FILE
        if not meta_path.is_file():
            raise IndexStoreError(f"no index at {index_dir} (missing {_META_FILE})")
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise IndexStoreError(f"cannot read {meta_path}: {exc}") from exc
        generation = _check_header(meta, meta_path)
        raw_stats = meta.get("stats") or {}
        stats = CorpusStats(
            patients=int(raw_stats.get("patients", 0)),
            documents=int(raw_stats.get("documents", 0)),
            sentences=int(raw_stats.get("sentences", 0)),
        )

        notes: dict[str, NoteRecord] = {}
        doc_tokens: dict[str, int] = {}
        notes_path = index_dir / _NOTES_FILE
        try:
            with open(notes_path, "r", encoding="utf-8") as f:
                first = f.readline()
                if _check_header(json.loads(first), notes_path) != generation:
                    raise IndexStoreError(f"{notes_path} belongs to a different ingest")
                for line in f:
                    obj = json.loads(line)
                    record = NoteRecord(
                        row_id=obj["row_id"],
                        subject_id=obj["subject_id"],
                        hadm_id=obj["hadm_id"],
                        category=obj["category"],
                        text=obj["text"],
                    )
                    notes[record.row_id] = record
                    doc_tokens[record.row_id] = obj["tokens"]
        except (OSError, ValueError, KeyError) as exc:
            raise IndexStoreError(f"corrupt index file {notes_path}: {exc}") from exc

        postings_path = index_dir / _POSTINGS_FILE
        try:
            doc = json.loads(postings_path.read_text(encoding="utf-8"))
            if _check_header(doc, postings_path) != generation:
                raise IndexStoreError(f"{postings_path} belongs to a different ingest")
            postings = {
                token: [(rid, tf) for rid, tf in plist]
                for token, plist in doc["postings"].items()
            }
        except (OSError, ValueError, KeyError) as exc:
            raise IndexStoreError(f"corrupt index file {postings_path}: {exc}") from exc

        return cls(stats, notes, doc_tokens, postings)

    def stats(self) -> CorpusStats:
        return self._stats

    def get_note(self, row_id: str) -> NoteRecord:
        try:
            return self._notes[str(row_id)]
        except KeyError:
            raise NoteNotFoundError(str(row_id)) from None

    def get_patient_notes(self, subject_id: str, limit: int | None = None) -> list[NoteRecord]:
        ids = self._by_subject.get(str(subject_id), [])
        if limit is not None:
            ids = ids[:limit]
        return [self._notes[rid] for rid in ids]

    def search(self, query: str, limit: int = 10) -> list[tuple[str, float]]:
        """Ranked AND search: every hit contains every query token."""
        terms = sorted(set(textproc.tokenize(query)))
        if not terms:
            raise ValueError("query contains no searchable tokens")
        tf_by_doc: dict[str, int] | None = None
        for term in terms:
            plist = self._postings.get(term)
            if not plist:
                return []
            term_tfs = dict(plist)
            if tf_by_doc is None:
                tf_by_doc = dict(term_tfs)
            else:
                tf_by_doc = {
                    rid: total + term_tfs[rid]
                    for rid, total in tf_by_doc.items()
                    if rid in term_tfs
                }
            if not tf_by_doc:
                return []
        assert tf_by_doc is not None
        ranked = sorted(
            ((rid, tf / self._doc_tokens[rid]) for rid, tf in tf_by_doc.items()),
            key=lambda hit: (-hit[1], _id_key(hit[0])),
        )
        return ranked[:limit]


def stats(index_dir: str | Path) -> CorpusStats:
    """Corpus statistics of an ingested index."""
    return Corpus.open(index_dir).stats()


def get_note(index_dir: str | Path, row_id: str) -> NoteRecord:
    """Fetch one note by its row id, byte-exact as ingested."""
    return Corpus.open(index_dir).get_note(row_id)


def get_patient_notes(
    index_dir: str | Path, subject_id: str, limit: int | None = None
) -> list[NoteRecord]:
    """A patient's notes ordered by row id ascending."""
    return Corpus.open(index_dir).get_patient_notes(subject_id, limit)


def search(index_dir: str | Path, query: str, limit: int = 10) -> list[tuple[str, float]]:
    """Keyword search; see :meth:`Corpus.search`."""
    return Corpus.open(index_dir).search(query, limit)
