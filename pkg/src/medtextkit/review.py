"""Clinician review workflow: sample generated answers, collect
four-criterion Likert ratings over HTTP, and report means plus binarized
percentage-agreement between raters.

Ratings land in an append-only log; the latest submission per
(rater, item) wins, so resubmission is a safe correction mechanism and a
crashed session never corrupts earlier ratings.
"""
from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from medtextkit import metrics
from medtextkit.harness import EvalReport
from medtextkit.metrics import LIKERT_CRITERIA

__all__ = [
    "ItemNotFoundError",
    "RatingLog",
    "RatingRecord",
    "RatingValidationError",
    "ReviewItem",
    "ReviewReport",
    "ReviewService",
    "RUBRIC",
    "build_report",
    "create_app",
    "sample_items",
]

LOG_MAGIC = "medtextkit-ratings"
LOG_VERSION = 1


class RatingValidationError(ValueError):
    """A rating payload is malformed; ``criterion`` names the offending field."""

    def __init__(self, criterion: str, message: str):
        super().__init__(message)
        self.criterion = criterion


class ItemNotFoundError(KeyError):
    """The rated item is not part of this review session."""

    def __init__(self, item_id: str):
        super().__init__(item_id)
        self.item_id = item_id


@dataclass(frozen=True)
class ReviewItem:
    """One sampled answer put in front of the raters."""

    item_id: str
    question: str
    generated_answer: str
    reference_answer: str | None = None
    show_reference: bool = True

    def to_api_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "question": self.question,
            "generated_answer": self.generated_answer,
            "reference_answer": self.reference_answer if self.show_reference else None,
            "show_reference": self.show_reference,
        }


@dataclass(frozen=True)
class RatingRecord:
    """One rater's judgment of one item on the four criteria (1..5)."""

    item_id: str
    rater_id: str
    readability: int
    relevancy: int
    accuracy: int
    completeness: int
    submitted_at: float

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "rater_id": self.rater_id,
            "readability": self.readability,
            "relevancy": self.relevancy,
            "accuracy": self.accuracy,
            "completeness": self.completeness,
            "submitted_at": self.submitted_at,
        }


@dataclass(frozen=True)
class ReviewReport:
    """Aggregate of all live ratings."""

    means: dict[str, float]
    iaa: dict[str, float] | None
    iaa_omitted: bool
    n_items: int
    n_raters: int
    completion: dict[str, float]
    binarization_threshold: int = 3

    def to_dict(self) -> dict:
        return {
            "means": self.means,
            "iaa": self.iaa,
            "iaa_omitted": self.iaa_omitted,
            "n_items": self.n_items,
            "n_raters": self.n_raters,
            "completion": self.completion,
            "binarization_threshold": self.binarization_threshold,
        }


# Rating rubric served to the review console; anchor texts render beside the
# score controls (1 = worst, 5 = best).
RUBRIC: dict = {
    "scale": [1, 2, 3, 4, 5],
    "criteria": [
        {
            "name": "readability",
            "title": "Readability",
            "description": "How clear and well-formed the generated answer is, judged on its own.",
            "anchors": {
                "1": "Poor: hard to follow throughout, with pervasive grammatical problems and little structure.",
                "2": "Below average: frequent awkward or ungrammatical passages interrupt the flow.",
                "3": "Average: understandable overall, though wording and structure stumble in places.",
                "4": "Good: clean and well organized, with only minor rough edges.",
                "5": "Excellent: effortless to read, well structured, natural phrasing throughout.",
            },
        },
        {
            "name": "relevancy",
            "title": "Relevancy",
            "description": "How directly the answer speaks to the question that was asked.",
            "anchors": {
                "1": "Poor: the answer is about something else entirely.",
                "2": "Below average: touches the question but wanders into unrelated material.",
                "3": "Average: on topic overall, though the focus drifts.",
                "4": "Good: stays on topic with only small digressions.",
                "5": "Excellent: every part of the answer bears on the question.",
            },
        },
        {
            "name": "accuracy",
            "title": "Accuracy",
            "description": "Whether the medical content of the answer is correct and trustworthy.",
            "anchors": {
                "1": "Poor: the information given is wrong or badly misleading.",
                "2": "Below average: several claims are incorrect or misleading.",
                "3": "Average: broadly right, but with clear errors.",
                "4": "Good: correct apart from minor slips.",
                "5": "Excellent: fully correct and dependable.",
            },
        },
        {
            "name": "completeness",
            "title": "Completeness",
            "description": "How much of the question the answer covers, judged against the reference answer.",
            "anchors": {
                "1": "Poor: leaves out nearly everything the reference answer covers.",
                "2": "Below average: covers part of the question but drops several key points.",
                "3": "Average: covers the essentials but stays thin.",
                "4": "Good: nearly complete, missing only small details.",
                "5": "Excellent: covers every aspect the reference answer does.",
            },
        },
    ],
}


def sample_items(
    report: EvalReport,
    n: int,
    seed: int,
    show_reference: bool = True,
) -> list[ReviewItem]:
    """Sample ``n`` completed items from an answer-generation report.

    Uniform without replacement, deterministic for a seed; the sample is
    returned sorted by item id.
    """
    completed = [r for r in report.items if "error" not in r]
    if n > len(completed):
        raise ValueError(
            f"cannot sample {n} items from {len(completed)} completed records"
        )
    rng = random.Random(seed)
    pool = list(completed)
    for i in range(len(pool) - 1, 0, -1):
        j = rng.randrange(i + 1)
        pool[i], pool[j] = pool[j], pool[i]
    chosen = sorted(pool[:n], key=lambda r: r["id"])
    items = []
    for record in chosen:
        references = record.get("references") or []
        reference = references[0] if references else record.get("reference")
        items.append(
            ReviewItem(
                item_id=record["id"],
                question=record.get("question") or record.get("source") or "",
                generated_answer=record.get("generated", ""),
                reference_answer=reference,
                show_reference=show_reference,
            )
        )
    return items


def items_to_json(items: list[ReviewItem]) -> str:
    return json.dumps(
        [
            {
                "item_id": i.item_id,
                "question": i.question,
                "generated_answer": i.generated_answer,
                "reference_answer": i.reference_answer,
                "show_reference": i.show_reference,
            }
            for i in items
        ],
        indent=2,
        sort_keys=True,
        ensure_ascii=False,
    )


def items_from_json(text: str) -> list[ReviewItem]:
    return [
        ReviewItem(
            item_id=obj["item_id"],
            question=obj["question"],
            generated_answer=obj["generated_answer"],
            reference_answer=obj.get("reference_answer"),
            show_reference=obj.get("show_reference", True),
        )
        for obj in json.loads(text)
    ]


class RatingLog:
    """Append-only JSONL rating store with last-write-wins compaction."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            header = {"magic": LOG_MAGIC, "version": LOG_VERSION}
            self.path.write_text(json.dumps(header) + "\n", encoding="utf-8")

    def append(self, record: RatingRecord) -> None:
        line = json.dumps(record.to_dict(), sort_keys=True) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line)
                f.flush()

    def all_records(self) -> list[RatingRecord]:
        """Every logged record in arrival order."""
        with self._lock:
            lines = self.path.read_text(encoding="utf-8").splitlines()
        if not lines:
            return []
        header = json.loads(lines[0])
        if header.get("magic") != LOG_MAGIC or header.get("version") != LOG_VERSION:
            raise ValueError(f"{self.path} is not a compatible rating log")
        records = []
        for line in lines[1:]:
            if not line.strip():
                continue
            obj = json.loads(line)
            records.append(
                RatingRecord(
                    item_id=obj["item_id"],
                    rater_id=obj["rater_id"],
                    readability=obj["readability"],
                    relevancy=obj["relevancy"],
                    accuracy=obj["accuracy"],
                    completeness=obj["completeness"],
                    submitted_at=obj["submitted_at"],
                )
            )
        return records

    def live_records(self) -> list[RatingRecord]:
        """One record per (rater, item): latest submitted_at, arrival breaking ties."""
        live: dict[tuple[str, str], RatingRecord] = {}
        for record in self.all_records():
            key = (record.rater_id, record.item_id)
            current = live.get(key)
            if current is None or record.submitted_at >= current.submitted_at:
                live[key] = record
        return [live[key] for key in sorted(live)]


def build_report(
    records: list[RatingRecord],
    assigned_items: int | None = None,
    threshold: int = 3,
) -> ReviewReport:
    """Aggregate live rating records into a ReviewReport.

    IAA per criterion is the percentage agreement over each rater pair's
    co-rated items (mean over pairs when there are more than two raters);
    it is omitted when no pair co-rated anything.
    """
    if not records:
        raise ValueError("at least one rating is required")
    means = metrics.likert_summary(records)
    raters = sorted({r.rater_id for r in records})
    items = sorted({r.item_id for r in records})
    by_rater: dict[str, dict[str, RatingRecord]] = {}
    for record in records:
        by_rater.setdefault(record.rater_id, {})[record.item_id] = record

    pair_agreements: dict[str, list[float]] = {c: [] for c in LIKERT_CRITERIA}
    any_pair = False
    for rater_a, rater_b in combinations(raters, 2):
        co_rated = sorted(set(by_rater[rater_a]) & set(by_rater[rater_b]))
        if not co_rated:
            continue
        any_pair = True
        for criterion in LIKERT_CRITERIA:
            vec_a = [getattr(by_rater[rater_a][i], criterion) for i in co_rated]
            vec_b = [getattr(by_rater[rater_b][i], criterion) for i in co_rated]
            pair_agreements[criterion].append(
                metrics.percentage_agreement(vec_a, vec_b, threshold)
            )

    iaa = None
    if any_pair:
        iaa = {
            criterion: sum(values) / len(values)
            for criterion, values in pair_agreements.items()
        }
    denominator = assigned_items if assigned_items else len(items)
    completion = {
        rater: (len(by_rater[rater]) / denominator if denominator else 0.0)
        for rater in raters
    }
    return ReviewReport(
        means=means,
        iaa=iaa,
        iaa_omitted=iaa is None,
        n_items=len(items),
        n_raters=len(raters),
        completion=completion,
        binarization_threshold=threshold,
    )


class ReviewService:
    """Review session state: the sampled items plus the rating log."""

    def __init__(self, items: list[ReviewItem], log: RatingLog):
        self.items = {item.item_id: item for item in items}
        self.log = log

    def pending_for(self, rater_id: str) -> list[ReviewItem]:
        rated = {
            record.item_id
            for record in self.log.live_records()
            if record.rater_id == rater_id
        }
        return [
            self.items[item_id]
            for item_id in sorted(self.items)
            if item_id not in rated
        ]

    def submit(self, payload: dict) -> RatingRecord:
        """Validate and persist one rating payload."""
        item_id = payload.get("item_id")
        if not isinstance(item_id, str) or not item_id:
            raise RatingValidationError("item_id", "item_id must be a non-empty string")
        rater_id = payload.get("rater_id")
        if not isinstance(rater_id, str) or not rater_id:
            raise RatingValidationError("rater_id", "rater_id must be a non-empty string")
        if item_id not in self.items:
            raise ItemNotFoundError(item_id)
        scores = {}
        for criterion in LIKERT_CRITERIA:
            value = payload.get(criterion)
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise RatingValidationError(
                    criterion, f"{criterion} must be an integer in 1..5, got {value!r}"
                )
            scores[criterion] = value
        record = RatingRecord(
            item_id=item_id, rater_id=rater_id, submitted_at=time.time(), **scores
        )
        self.log.append(record)
        return record

    def report(self, threshold: int = 3) -> ReviewReport:
        return build_report(
            self.log.live_records(), assigned_items=len(self.items), threshold=threshold
        )


def create_app(service: ReviewService, ui_dir: str | Path | None = None):
    """FastAPI application over a ReviewService."""
    app = FastAPI(title="medtextkit review console")

    @app.get("/api/items")
    def get_items(rater_id: str) -> list[dict]:
        return [item.to_api_dict() for item in service.pending_for(rater_id)]

    @app.post("/api/ratings")
    async def post_rating(request: Request) -> JSONResponse:
        try:
            payload = await request.json()
        except Exception:
            return JSONResponse(
                {"error": "validation-error", "criterion": None, "detail": "body is not JSON"},
                status_code=400,
            )
        if not isinstance(payload, dict):
            return JSONResponse(
                {"error": "validation-error", "criterion": None,
                 "detail": "body must be a JSON object"},
                status_code=400,
            )
        try:
            record = service.submit(payload)
        except RatingValidationError as exc:
            return JSONResponse(
                {"error": "validation-error", "criterion": exc.criterion, "detail": str(exc)},
                status_code=400,
            )
        except ItemNotFoundError as exc:
            return JSONResponse(
                {"error": "not-found", "detail": f"unknown item {exc.item_id!r}"},
                status_code=404,
            )
        return JSONResponse({"status": "ok", "item_id": record.item_id})

    @app.get("/api/report")
    def get_report() -> dict:
        try:
            return service.report().to_dict()
        except ValueError:
            return {
                "means": None,
                "iaa": None,
                "iaa_omitted": True,
                "n_items": 0,
                "n_raters": 0,
                "completion": {},
                "binarization_threshold": 3,
            }

    @app.get("/api/rubric")
    def get_rubric() -> dict:
        return RUBRIC

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
