"""Tests for the stub backends and the HTTP backend protocol handling."""
from __future__ import annotations

import pytest

from medtextkit.backends import (
    BackendError,
    EchoBackend,
    GenerationRequest,
    HttpBackend,
    LeadKBackend,
    OptionScoreRequest,
    OverlapScorerBackend,
    ProtocolError,
    TemplateAnswerBackend,
    argmax,
    health_check,
    make_backend,
)

DOC = "First sentence here. Second one follows. Third closes it."


def gen(prompt: str, task: str = "simplify", max_new_tokens: int = 256) -> GenerationRequest:
    return GenerationRequest(task=task, prompt=prompt, max_new_tokens=max_new_tokens)


class TestRequests:
    def test_generation_request_validation(self):
        with pytest.raises(ValueError):
            GenerationRequest(task="qa", prompt="x", max_new_tokens=0)
        with pytest.raises(ValueError):
            GenerationRequest(task="qa", prompt="x", temperature=-0.1)
        with pytest.raises(ValueError):
            GenerationRequest(task="invent", prompt="x")

    def test_option_request_needs_two(self):
        with pytest.raises(ValueError):
            OptionScoreRequest("q", ("only",))


class TestStubs:
    def test_echo_strips_task_prefix(self):
        response = EchoBackend().generate(
            gen("simplify: Auscultation reveals wheezing.")
        )
        assert response.text == "Auscultation reveals wheezing."
        assert response.model_id == "stub-echo"

    def test_echo_without_prefix(self):
        assert EchoBackend().generate(gen("no prefix here")).text == "no prefix here"

    def test_echo_truncates_to_token_budget(self):
        response = EchoBackend().generate(gen("simplify: one two three four", max_new_tokens=2))
        assert response.text == "one two"

    def test_lead_k_returns_first_sentences(self):
        from medtextkit.textproc import split_sentences

        response = LeadKBackend(1).generate(gen(f"summarize: {DOC}", task="summarize"))
        assert response.text == split_sentences(DOC)[0].text

        response2 = LeadKBackend(2).generate(gen(f"summarize: {DOC}", task="summarize"))
        assert response2.text == "First sentence here. Second one follows."

    def test_template_answer(self):
        response = TemplateAnswerBackend().generate(
            gen("qa: What treats migraines? Give detail.", task="qa")
        )
        assert response.text == "answer: What treats migraines?"

    def test_overlap_scorer_no_overlap_ties_to_first(self):
        scores = OverlapScorerBackend().score_options(
            OptionScoreRequest("which organ pumps blood", ("the heart", "the femur"))
        )
        assert scores == [0.0, 0.0]
        assert argmax(scores) == 0

    def test_overlap_scorer_counts_shared_content_tokens(self):
        scores = OverlapScorerBackend().score_options(
            OptionScoreRequest(
                "blood pressure medication",
                ("controls blood pressure", "treats fungal infection"),
            )
        )
        assert scores == [2.0, 0.0]
        assert argmax(scores) == 0

    def test_overlap_scorer_uses_context(self):
        scores = OverlapScorerBackend().score_options(
            OptionScoreRequest(
                "what was given",
                ("aspirin was given", "warfarin was given"),
                context="the patient received aspirin",
            )
        )
        assert scores[0] > scores[1]

    def test_identical_options_tie(self):
        scores = OverlapScorerBackend().score_options(
            OptionScoreRequest("aspirin dose", ("aspirin", "aspirin"))
        )
        assert scores[0] == scores[1]
        assert argmax(scores) == 0

    def test_stub_determinism(self):
        request = gen("qa: What treats migraines?", task="qa")
        first = TemplateAnswerBackend().generate(request)
        second = TemplateAnswerBackend().generate(request)
        assert first == second

    def test_stub_health(self):
        assert health_check(EchoBackend()).ok


class TestHttpBackend:
    def test_generate_round_trip(self, fixture_server):
        fixture_server.script = lambda path, payload: ("json", {"text": "ok", "model_id": "m"})
        backend = HttpBackend(fixture_server.url)
        response = backend.generate(gen("simplify: text"))
        assert (response.text, response.model_id) == ("ok", "m")
        path, payload = fixture_server.calls[0]
        assert path == "/v1/generate"
        assert payload == {
            "task": "simplify",
            "prompt": "simplify: text",
            "max_new_tokens": 256,
            "temperature": 0.0,
        }

    def test_optional_fields_serialized(self, fixture_server):
        fixture_server.script = lambda path, payload: ("json", {"text": "x", "model_id": "m"})
        backend = HttpBackend(fixture_server.url)
        backend.generate(
            GenerationRequest(
                task="translate", prompt="translate: hi", stop=("\n",), target_language="fr"
            )
        )
        _, payload = fixture_server.calls[0]
        assert payload["stop"] == ["\n"]
        assert payload["target_language"] == "fr"

    def test_score_options_round_trip(self, fixture_server):
        fixture_server.script = lambda path, payload: ("json", {"scores": [0.5, 1.5]})
        backend = HttpBackend(fixture_server.url)
        scores = backend.score_options(OptionScoreRequest("q", ("a", "b")))
        assert scores == [0.5, 1.5]
        path, payload = fixture_server.calls[0]
        assert path == "/v1/score_options"
        assert payload == {"question": "q", "context": None, "options": ["a", "b"]}

    def test_http_error_carries_status_and_body(self, fixture_server):
        fixture_server.script = lambda path, payload: ("status", 500, "boom interior")
        backend = HttpBackend(fixture_server.url)
        with pytest.raises(BackendError) as err:
            backend.generate(gen("x"))
        assert err.value.status == 500
        assert "boom" in err.value.body
        # HTTP statuses are never retried.
        assert len(fixture_server.calls) == 1

    def test_4xx_not_retried(self, fixture_server):
        fixture_server.script = lambda path, payload: ("status", 400, "bad request")
        backend = HttpBackend(fixture_server.url)
        with pytest.raises(BackendError) as err:
            backend.generate(gen("x"))
        assert err.value.status == 400
        assert len(fixture_server.calls) == 1

    def test_malformed_body_is_protocol_error(self, fixture_server):
        fixture_server.script = lambda path, payload: ("raw", "this is not json {")
        backend = HttpBackend(fixture_server.url)
        with pytest.raises(ProtocolError):
            backend.generate(gen("x"))

    def test_missing_fields_is_protocol_error(self, fixture_server):
        fixture_server.script = lambda path, payload: ("json", {"text": 7})
        backend = HttpBackend(fixture_server.url)
        with pytest.raises(ProtocolError):
            backend.generate(gen("x"))

    def test_wrong_score_count_is_protocol_error(self, fixture_server):
        fixture_server.script = lambda path, payload: ("json", {"scores": [1.0]})
        backend = HttpBackend(fixture_server.url)
        with pytest.raises(ProtocolError):
            backend.score_options(OptionScoreRequest("q", ("a", "b")))

    def test_transport_error_retried_within_budget(self, fixture_server):
        fixture_server.script = lambda path, payload: ("drop",)
        backend = HttpBackend(fixture_server.url, max_retries=2)
        with pytest.raises(BackendError) as err:
            backend.generate(gen("x"))
        assert err.value.status is None
        assert "transport failure" in str(err.value)
        # 1 initial attempt + at most 2 retries.
        assert len(fixture_server.calls) == 3

    def test_timeout_retried_and_reported(self, fixture_server):
        fixture_server.script = lambda path, payload: ("sleep", 0.6, {"text": "x", "model_id": "m"})
        backend = HttpBackend(fixture_server.url, timeout=0.1, max_retries=1)
        with pytest.raises(BackendError):
            backend.generate(gen("x"))
        assert len(fixture_server.calls) == 2

    def test_recovery_after_one_drop(self, fixture_server):
        state = {"n": 0}

        def script(path, payload):
            state["n"] += 1
            if state["n"] == 1:
                return ("drop",)
            return ("json", {"text": "recovered", "model_id": "m"})

        fixture_server.script = script
        backend = HttpBackend(fixture_server.url, max_retries=2)
        assert backend.generate(gen("x")).text == "recovered"

    def test_health_ok(self, fixture_server):
        fixture_server.script = lambda path, payload: ("json", {"text": "p", "model_id": "m"})
        assert HttpBackend(fixture_server.url).health().ok

    def test_health_status_500(self, fixture_server):
        fixture_server.script = lambda path, payload: ("status", 500, "down")
        status = HttpBackend(fixture_server.url).health()
        assert not status.ok
        assert status.reason == "status 500"

    def test_health_closed_port(self):
        status = HttpBackend("http://127.0.0.1:9").health()
        assert not status.ok
        assert "transport failure" in status.reason

    def test_in_flight_requests_are_capped(self, fixture_server):
        import threading

        active = {"now": 0, "peak": 0}
        lock = threading.Lock()

        def script(path, payload):
            import time

            with lock:
                active["now"] += 1
                active["peak"] = max(active["peak"], active["now"])
            time.sleep(0.05)
            with lock:
                active["now"] -= 1
            return ("json", {"text": "x", "model_id": "m"})

        fixture_server.script = script
        backend = HttpBackend(fixture_server.url, max_in_flight=2)
        threads = [
            threading.Thread(target=lambda: backend.generate(gen("x")))
            for _ in range(8)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert active["peak"] <= 2


class TestMakeBackend:
    def test_stub_names(self):
        assert make_backend("echo").model_id == "stub-echo"
        assert make_backend("lead-2").model_id == "stub-lead-2"
        assert make_backend("template-answer").model_id == "stub-template-answer"
        assert make_backend("overlap-scorer").model_id == "stub-overlap"

    def test_url(self):
        backend = make_backend("http://127.0.0.1:9")
        assert isinstance(backend, HttpBackend)

    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            make_backend("mystery")
        with pytest.raises(ValueError):
            make_backend("lead-x")
