"""Tests for the review workflow: sampling, rating log, report, HTTP API."""
from __future__ import annotations

import random
import threading

import pytest
from fastapi.testclient import TestClient

from medtextkit import metrics, review
from medtextkit.backends import TemplateAnswerBackend
from medtextkit.harness import AnswerGenItem, run_answer_gen
from medtextkit.review import (
    RatingLog,
    RatingRecord,
    ReviewItem,
    ReviewService,
    build_report,
    create_app,
    sample_items,
)


def make_report(n: int = 10):
    items = [
        AnswerGenItem(f"q{i:03d}", f"question number {i} about dosing", (f"reference {i}",))
        for i in range(n)
    ]
    return run_answer_gen(items, TemplateAnswerBackend())


def record(item_id, rater_id, scores=(5, 5, 5, 5), at=0.0) -> RatingRecord:
    readability, relevancy, accuracy, completeness = scores
    return RatingRecord(
        item_id=item_id, rater_id=rater_id, readability=readability,
        relevancy=relevancy, accuracy=accuracy, completeness=completeness,
        submitted_at=at,
    )


class TestSampleItems:
    def test_sample_size_and_order(self):
        report = make_report(20)
        items = sample_items(report, 5, seed=7)
        assert len(items) == 5
        ids = [i.item_id for i in items]
        assert ids == sorted(ids)

    def test_full_sample(self):
        report = make_report(4)
        assert len(sample_items(report, 4, seed=1)) == 4

    def test_same_seed_same_sample(self):
        report = make_report(30)
        assert sample_items(report, 10, seed=3) == sample_items(report, 10, seed=3)

    def test_oversample_rejected(self):
        report = make_report(3)
        with pytest.raises(ValueError):
            sample_items(report, 4, seed=0)

    def test_blinding_flag(self):
        report = make_report(3)
        hidden = sample_items(report, 2, seed=0, show_reference=False)
        assert all(not item.show_reference for item in hidden)
        assert all(item.reference_answer for item in hidden)  # stored, not shown


class TestRatingLog:
    def test_append_and_read(self, tmp_path):
        log = RatingLog(tmp_path / "ratings.jsonl")
        log.append(record("a", "r1", at=1.0))
        log.append(record("b", "r1", at=2.0))
        assert len(log.all_records()) == 2

    def test_last_write_wins(self, tmp_path):
        log = RatingLog(tmp_path / "ratings.jsonl")
        log.append(record("a", "r1", scores=(1, 1, 1, 1), at=1.0))
        log.append(record("a", "r1", scores=(5, 4, 3, 2), at=2.0))
        live = log.live_records()
        assert len(live) == 1
        assert live[0].readability == 5

    def test_tie_on_timestamp_keeps_later_arrival(self, tmp_path):
        log = RatingLog(tmp_path / "ratings.jsonl")
        log.append(record("a", "r1", scores=(1, 1, 1, 1), at=5.0))
        log.append(record("a", "r1", scores=(2, 2, 2, 2), at=5.0))
        assert log.live_records()[0].readability == 2

    def test_reopen_persists(self, tmp_path):
        path = tmp_path / "ratings.jsonl"
        RatingLog(path).append(record("a", "r1", at=1.0))
        assert len(RatingLog(path).all_records()) == 1

    def test_incompatible_log_rejected(self, tmp_path):
        path = tmp_path / "ratings.jsonl"
        path.write_text('{"magic": "other", "version": 9}\n')
        with pytest.raises(ValueError):
            RatingLog(path).all_records()

    def test_concurrent_appends_all_land(self, tmp_path):
        log = RatingLog(tmp_path / "ratings.jsonl")

        def submit(rater: str):
            for i in range(20):
                log.append(record(f"i{i}", rater, at=float(i)))

        threads = [threading.Thread(target=submit, args=(f"r{t}",)) for t in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(log.all_records()) == 80
        assert len(log.live_records()) == 80


class TestBuildReport:
    def test_two_raters_identical(self, tmp_path):
        records = [
            record("a", "r1", scores=(5, 4, 3, 2), at=1.0),
            record("a", "r2", scores=(5, 4, 3, 2), at=1.0),
        ]
        report = build_report(records)
        assert report.iaa == {c: 1.0 for c in metrics.LIKERT_CRITERIA}
        assert report.means["readability"] == 5.0
        assert report.n_raters == 2
        assert not report.iaa_omitted

    def test_hand_vector_iaa(self):
        # Readability vectors A=[5,4,2,3] / B=[5,2,3,3] -> 0.5 at threshold 3.
        a_scores = [5, 4, 2, 3]
        b_scores = [5, 2, 3, 3]
        records = []
        for i, (a, b) in enumerate(zip(a_scores, b_scores)):
            records.append(record(f"i{i}", "ra", scores=(a, 3, 3, 3), at=1.0))
            records.append(record(f"i{i}", "rb", scores=(b, 3, 3, 3), at=1.0))
        report = build_report(records)
        assert report.iaa["readability"] == 0.5
        assert report.iaa["relevancy"] == 1.0

    def test_iaa_bitwise_matches_metrics_function(self):
        rng = random.Random(4)
        n = 25
        vecs = {
            rater: {c: [rng.randint(1, 5) for _ in range(n)] for c in metrics.LIKERT_CRITERIA}
            for rater in ("ra", "rb")
        }
        records = []
        for i in range(n):
            for rater in ("ra", "rb"):
                records.append(
                    record(f"i{i:02d}", rater, at=1.0,
                           scores=tuple(vecs[rater][c][i] for c in metrics.LIKERT_CRITERIA))
                )
        report = build_report(records)
        for criterion in metrics.LIKERT_CRITERIA:
            expected = metrics.percentage_agreement(
                vecs["ra"][criterion], vecs["rb"][criterion]
            )
            assert report.iaa[criterion] == expected

    def test_no_corated_items_omits_iaa(self):
        records = [
            record("a", "r1", at=1.0),
            record("b", "r2", at=1.0),
        ]
        report = build_report(records)
        assert report.iaa is None
        assert report.iaa_omitted
        assert report.means["readability"] == 5.0

    def test_single_rater_omits_iaa(self):
        report = build_report([record("a", "r1", at=1.0)])
        assert report.iaa_omitted

    def test_three_raters_mean_pairwise(self):
        records = [
            record("a", "r1", scores=(5, 5, 5, 5), at=1.0),
            record("a", "r2", scores=(5, 5, 5, 5), at=1.0),
            record("a", "r3", scores=(1, 1, 1, 1), at=1.0),
        ]
        report = build_report(records)
        # Pairs: (r1,r2)=1.0, (r1,r3)=0.0, (r2,r3)=0.0 -> mean 1/3.
        assert report.iaa["readability"] == pytest.approx(1 / 3)

    def test_order_invariance(self):
        rng = random.Random(11)
        base = []
        for i in range(12):
            for rater in ("r1", "r2"):
                base.append(record(
                    f"i{i:02d}", rater, at=float(i),
                    scores=tuple(rng.randint(1, 5) for _ in range(4)),
                ))
        reference = build_report(base)
        for _ in range(100):
            shuffled = list(base)
            rng.shuffle(shuffled)
            assert build_report(shuffled).means == reference.means

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_report([])


@pytest.fixture
def service(tmp_path):
    items = [
        ReviewItem(f"q{i}", f"question {i}", f"generated answer {i}",
                   reference_answer=f"reference {i}")
        for i in range(3)
    ]
    return ReviewService(items, RatingLog(tmp_path / "log.jsonl"))


@pytest.fixture
def client(service):
    return TestClient(create_app(service))


def rating_payload(item_id="q0", rater_id="ra", **overrides):
    payload = {
        "item_id": item_id, "rater_id": rater_id,
        "readability": 5, "relevancy": 5, "accuracy": 5, "completeness": 5,
    }
    payload.update(overrides)
    return payload


class TestHttpApi:
    def test_items_pending(self, client):
        response = client.get("/api/items", params={"rater_id": "ra"})
        assert response.status_code == 200
        items = response.json()
        assert [i["item_id"] for i in items] == ["q0", "q1", "q2"]
        assert items[0]["reference_answer"] == "reference 0"

    def test_submit_and_queue_shrinks(self, client):
        response = client.post("/api/ratings", json=rating_payload("q0"))
        assert response.status_code == 200
        remaining = client.get("/api/items", params={"rater_id": "ra"}).json()
        assert [i["item_id"] for i in remaining] == ["q1", "q2"]
        # A different rater still sees all three.
        other = client.get("/api/items", params={"rater_id": "rb"}).json()
        assert len(other) == 3

    def test_double_submit_yields_one_record(self, client, service):
        client.post("/api/ratings", json=rating_payload("q0", readability=2))
        client.post("/api/ratings", json=rating_payload("q0", readability=4))
        live = service.log.live_records()
        assert len(live) == 1
        assert live[0].readability == 4

    def test_validation_error_names_criterion(self, client):
        response = client.post("/api/ratings", json=rating_payload(relevancy=6))
        assert response.status_code == 400
        body = response.json()
        assert body["error"] == "validation-error"
        assert body["criterion"] == "relevancy"

    def test_unknown_item_404(self, client):
        response = client.post("/api/ratings", json=rating_payload("zz"))
        assert response.status_code == 404
        assert response.json()["error"] == "not-found"

    def test_report_round_trip(self, client):
        for item_id in ("q0", "q1"):
            client.post("/api/ratings", json=rating_payload(item_id, "ra"))
            client.post("/api/ratings", json=rating_payload(item_id, "rb", readability=4))
        report = client.get("/api/report").json()
        assert report["means"]["readability"] == 4.5
        assert report["iaa"]["readability"] == 1.0
        assert report["n_raters"] == 2
        assert report["completion"]["ra"] == pytest.approx(2 / 3)

    def test_report_before_any_rating(self, client):
        report = client.get("/api/report").json()
        assert report["means"] is None
        assert report["iaa_omitted"] is True

    def test_rubric_served(self, client):
        rubric = client.get("/api/rubric").json()
        names = [c["name"] for c in rubric["criteria"]]
        assert names == list(metrics.LIKERT_CRITERIA)
        for criterion in rubric["criteria"]:
            assert set(criterion["anchors"]) == {"1", "2", "3", "4", "5"}

    def test_blinded_items_hide_reference(self, tmp_path):
        items = [ReviewItem("q0", "q", "answer", reference_answer="ref",
                            show_reference=False)]
        service = ReviewService(items, RatingLog(tmp_path / "log2.jsonl"))
        client = TestClient(create_app(service))
        payload = client.get("/api/items", params={"rater_id": "ra"}).json()
        assert payload[0]["reference_answer"] is None


def test_sampled_review_flow_end_to_end(tmp_path):
    report = make_report(8)
    items = sample_items(report, 5, seed=42)
    service = ReviewService(items, RatingLog(tmp_path / "flow.jsonl"))
    client = TestClient(create_app(service))
    for rater in ("ra", "rb"):
        pending = client.get("/api/items", params={"rater_id": rater}).json()
        assert len(pending) == 5
        for item in pending:
            response = client.post(
                "/api/ratings", json=rating_payload(item["item_id"], rater)
            )
            assert response.status_code == 200
        assert client.get("/api/items", params={"rater_id": rater}).json() == []
    summary = client.get("/api/report").json()
    assert summary["n_items"] == 5
    assert summary["completion"] == {"ra": 1.0, "rb": 1.0}
    assert summary["iaa"] == {c: 1.0 for c in metrics.LIKERT_CRITERIA}
