"""Dataset loading, split protocols and runners for the six evaluation
pipelines (multiple-choice QA, answer generation, single- and multi-document
summarization, simplification, translation).

Datasets are newline-delimited JSON, one record per line, with per-task
schemas (see TASK_FIELDS). Runners produce an EvalReport whose aggregate
metrics are exactly recomputable from its per-item records; reports are
deterministic given a stub backend and a seed, and serialize to canonical
JSON so equal runs are byte-identical.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Sequence, Union

from medtextkit import metrics, textproc, textrank
from medtextkit.backends import (
    Backend,
    BackendError,
    GenerationRequest,
    OptionScoreRequest,
    argmax,
)
from medtextkit.textrank import RankConfig

__all__ = [
    "AnswerGenItem",
    "DatasetSchemaError",
    "DatasetParseError",
    "DuplicateIdError",
    "EvalItem",
    "EvalReport",
    "McqaItem",
    "RunConfig",
    "SimplifyItem",
    "SplitConfig",
    "SplitResult",
    "SummMultiItem",
    "SummSingleItem",
    "TASKS",
    "TextRankEngine",
    "TranslateItem",
    "compare_translation",
    "item_to_dict",
    "load_dataset",
    "load_report",
    "run_answer_gen",
    "run_mcqa",
    "run_simplification",
    "run_summarization",
    "run_translation",
    "split",
    "verify_report",
    "write_dataset",
]

TASKS = ("mcqa", "answer_gen", "summ_single", "summ_multi", "simplify", "translate")

# Exact line-record field names per task (optional fields marked with "?").
TASK_FIELDS = {
    "mcqa": ("id", "question", "context?", "options", "answer_index"),
    "answer_gen": ("id", "question", "reference_answers"),
    "summ_single": ("id", "document", "reference_summary"),
    "summ_multi": ("id", "documents", "reference_summary"),
    "simplify": ("id", "source", "reference"),
    "translate": ("id", "source", "reference", "src_lang", "tgt_lang"),
}

# Fixed prompt templates, one per backend task tag; the version string is
# recorded in every report so prompts are reproducible.
PROMPT_TEMPLATE_VERSION = "v1"
PROMPT_TEMPLATES = {
    "qa": "qa: {payload}",
    "summarize": "summarize: {payload}",
    "simplify": "simplify: {payload}",
    "translate": "translate: {payload}",
}

MULTI_DOC_SEPARATOR = "\n\n"

_ROUGE_KEYS = (
    "rouge1_precision", "rouge1_recall", "rouge1_f1",
    "rouge2_precision", "rouge2_recall", "rouge2_f1",
    "rougeL_precision", "rougeL_recall", "rougeL_f1",
)


class DatasetParseError(ValueError):
    """A dataset line is not valid JSON."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DatasetSchemaError(ValueError):
    """A dataset record violates its task schema."""

    def __init__(self, line: int, field_name: str, message: str):
        super().__init__(f"line {line}: field {field_name!r}: {message}")
        self.line = line
        self.field = field_name


class DuplicateIdError(ValueError):
    """Two dataset records share an id."""

    def __init__(self, line: int, item_id: str):
        super().__init__(f"line {line}: duplicate id {item_id!r}")
        self.line = line
        self.item_id = item_id


@dataclass(frozen=True)
class McqaItem:
    id: str
    question: str
    options: tuple[str, ...]
    answer_index: int
    context: str | None = None


@dataclass(frozen=True)
class AnswerGenItem:
    id: str
    question: str
    reference_answers: tuple[str, ...]


@dataclass(frozen=True)
class SummSingleItem:
    id: str
    document: str
    reference_summary: str


@dataclass(frozen=True)
class SummMultiItem:
    id: str
    documents: tuple[str, ...]
    reference_summary: str


@dataclass(frozen=True)
class SimplifyItem:
    id: str
    source: str
    reference: str


@dataclass(frozen=True)
class TranslateItem:
    id: str
    source: str
    reference: str
    src_lang: str
    tgt_lang: str


EvalItem = Union[
    McqaItem, AnswerGenItem, SummSingleItem, SummMultiItem, SimplifyItem, TranslateItem
]

_ITEM_TYPES = {
    "mcqa": McqaItem,
    "answer_gen": AnswerGenItem,
    "summ_single": SummSingleItem,
    "summ_multi": SummMultiItem,
    "simplify": SimplifyItem,
    "translate": TranslateItem,
}


# ----------------------------------------------------------------------------
# Dataset loading
# ----------------------------------------------------------------------------


def _need_str(obj: dict, key: str, line: int, nonempty: bool = True) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise DatasetSchemaError(line, key, f"expected a string, got {type(value).__name__}")
    if nonempty and not value:
        raise DatasetSchemaError(line, key, "must be non-empty")
    return value


def _need_str_list(obj: dict, key: str, line: int, min_len: int = 1) -> tuple[str, ...]:
    value = obj.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise DatasetSchemaError(line, key, "expected a list of strings")
    if len(value) < min_len:
        raise DatasetSchemaError(line, key, f"needs at least {min_len} entries")
    if any(not v for v in value):
        raise DatasetSchemaError(line, key, "entries must be non-empty")
    return tuple(value)


def _parse_item(task: str, obj: dict, line: int) -> EvalItem:
    item_id = _need_str(obj, "id", line)
    if task == "mcqa":
        options = _need_str_list(obj, "options", line, min_len=2)
        answer = obj.get("answer_index")
        if not isinstance(answer, int) or isinstance(answer, bool):
            raise DatasetSchemaError(line, "answer_index", "expected an integer")
        if not 0 <= answer < len(options):
            raise DatasetSchemaError(
                line, "answer_index", f"{answer} out of range for {len(options)} options"
            )
        context = obj.get("context")
        if context is not None and not isinstance(context, str):
            raise DatasetSchemaError(line, "context", "expected a string or null")
        return McqaItem(item_id, _need_str(obj, "question", line), options, answer, context)
    if task == "answer_gen":
        return AnswerGenItem(
            item_id,
            _need_str(obj, "question", line),
            _need_str_list(obj, "reference_answers", line),
        )
    if task == "summ_single":
        return SummSingleItem(
            item_id,
            _need_str(obj, "document", line),
            _need_str(obj, "reference_summary", line),
        )
    if task == "summ_multi":
        return SummMultiItem(
            item_id,
            _need_str_list(obj, "documents", line),
            _need_str(obj, "reference_summary", line),
        )
    if task == "simplify":
        return SimplifyItem(
            item_id, _need_str(obj, "source", line), _need_str(obj, "reference", line)
        )
    if task == "translate":
        return TranslateItem(
            item_id,
            _need_str(obj, "source", line),
            _need_str(obj, "reference", line),
            _need_str(obj, "src_lang", line),
            _need_str(obj, "tgt_lang", line),
        )
    raise ValueError(f"unknown task {task!r}, expected one of {TASKS}")


def load_dataset(path: str | Path, task: str) -> list[EvalItem]:
    """Load and validate a newline-delimited dataset for ``task``."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}, expected one of {TASKS}")
    items: list[EvalItem] = []
    seen: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError as exc:
                raise DatasetParseError(line_no, str(exc)) from exc
            if not isinstance(obj, dict):
                raise DatasetParseError(line_no, "record is not a JSON object")
            item = _parse_item(task, obj, line_no)
            if item.id in seen:
                raise DuplicateIdError(line_no, item.id)
            seen[item.id] = line_no
            items.append(item)
    return items


def item_to_dict(item: EvalItem) -> dict:
    """Line-record dict for an item (inverse of the loader)."""
    out: dict[str, Any] = {}
    for f in fields(item):
        value = getattr(item, f.name)
        if isinstance(value, tuple):
            value = list(value)
        if value is None and f.name == "context":
            continue
        out[f.name] = value
    return out


def write_dataset(path: str | Path, items: Sequence[EvalItem]) -> None:
    """Write items as newline-delimited JSON."""
    with open(path, "w", encoding="utf-8") as f:
        for item in items:
            f.write(json.dumps(item_to_dict(item), sort_keys=True, ensure_ascii=False) + "\n")


# ----------------------------------------------------------------------------
# Split protocol
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitConfig:
    """Train/test ratio split with an optional validation carve-out."""

    ratio: float = 0.85
    seed: int = 0
    carve_validation: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"ratio must be in (0, 1), got {self.ratio}")
        if self.carve_validation is not None and self.carve_validation < 1:
            raise ValueError("carve_validation must be >= 1 when given")


@dataclass(frozen=True)
class SplitResult:
    train: list
    test: list
    validation: list | None = None


def _fisher_yates(items: Sequence, seed: int) -> list:
    rng = random.Random(seed)
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def split(items: Sequence, config: SplitConfig) -> SplitResult:
    """Deterministic shuffled split: train = first floor(ratio * n) items.

    ``carve_validation`` items are moved from the train tail into a
    validation set.
    """
    if len(items) < 2:
        raise ValueError("need at least two items to split")
    shuffled = _fisher_yates(items, config.seed)
    train_n = int(config.ratio * len(shuffled))
    train = shuffled[:train_n]
    test = shuffled[train_n:]
    validation = None
    if config.carve_validation is not None:
        if config.carve_validation >= len(train):
            raise ValueError(
                f"cannot carve {config.carve_validation} validation items "
                f"from a train split of {len(train)}"
            )
        validation = train[-config.carve_validation:]
        train = train[: -config.carve_validation]
    return SplitResult(train, test, validation)


# ----------------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------------


@dataclass
class EvalReport:
    """Machine-readable result of one evaluation run."""

    task: str
    dataset_id: str
    model_id: str
    n_items: int
    completed: int
    failed: int
    metrics: dict[str, float | None]
    items: list[dict]
    config: dict
    seed: int | None = None

    @property
    def partial(self) -> bool:
        return self.failed > 0

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "dataset_id": self.dataset_id,
            "model_id": self.model_id,
            "n_items": self.n_items,
            "completed": self.completed,
            "failed": self.failed,
            "partial": self.partial,
            "metrics": self.metrics,
            "items": self.items,
            "config": self.config,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def from_dict(cls, obj: dict) -> EvalReport:
        return cls(
            task=obj["task"],
            dataset_id=obj["dataset_id"],
            model_id=obj["model_id"],
            n_items=obj["n_items"],
            completed=obj["completed"],
            failed=obj["failed"],
            metrics=obj["metrics"],
            items=obj["items"],
            config=obj["config"],
            seed=obj.get("seed"),
        )


def load_report(path: str | Path) -> EvalReport:
    """Read an EvalReport back from its JSON serialization."""
    return EvalReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ----------------------------------------------------------------------------
# Runner machinery
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by all runners."""

    max_new_tokens: int = 1024
    temperature: float = 0.0
    parallelism: int = 4
    summary_sentences: int = 3
    seed: int | None = None


@dataclass
class TextRankEngine:
    """Native extractive engine usable wherever a summarization backend is."""

    k: int = 3
    rank_config: RankConfig = field(default_factory=RankConfig)

    @property
    def model_id(self) -> str:
        return f"textrank-k{self.k}"

    def summarize(self, document: str) -> tuple[str, list[int]]:
        sentences = textproc.split_sentences(document)
        if not sentences:
            return "", []
        indices = textrank.select_indices(list(sentences), self.k, self.rank_config)
        return " ".join(sentences[i].text for i in indices), indices


def _prompt(task_tag: str, payload: str) -> str:
    return PROMPT_TEMPLATES[task_tag].format(payload=payload)


def _rouge_scores(generated: str, references: Sequence[str]) -> dict[str, float]:
    cand = textproc.tokenize(generated)
    refs = [textproc.tokenize(r) for r in references]
    r1 = metrics.rouge_n(cand, refs, 1)
    r2 = metrics.rouge_n(cand, refs, 2)
    rl = metrics.rouge_l(cand, refs)
    return {
        "rouge1_precision": r1.precision, "rouge1_recall": r1.recall, "rouge1_f1": r1.f1,
        "rouge2_precision": r2.precision, "rouge2_recall": r2.recall, "rouge2_f1": r2.f1,
        "rougeL_precision": rl.precision, "rougeL_recall": rl.recall, "rougeL_f1": rl.f1,
    }


def _fkgl_or_none(text: str) -> float | None:
    try:
        return metrics.fkgl(text).fkgl
    except ValueError:
        return None


def _run_items(
    items: Sequence[EvalItem],
    worker: Callable[[EvalItem], dict],
    parallelism: int,
) -> list[dict]:
    """Run the per-item worker with bounded parallelism; failures become
    error records. Results come back sorted by item id."""

    def guarded(item: EvalItem) -> dict:
        try:
            return worker(item)
        except BackendError as exc:
            return {"id": item.id, "error": str(exc)}

    if parallelism <= 1 or len(items) <= 1:
        records = [guarded(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(guarded, items))
    return sorted(records, key=lambda r: r["id"])


def _mean(values: Sequence[float]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def _mean_of(records: list[dict], key: str) -> float | None:
    return _mean([r["scores"][key] for r in records])


def _base_config(config: RunConfig, task_tag: str | None = None) -> dict:
    snapshot: dict[str, Any] = {
        "max_new_tokens": config.max_new_tokens,
        "temperature": config.temperature,
        "parallelism": config.parallelism,
    }
    if task_tag is not None:
        snapshot["prompt_template"] = PROMPT_TEMPLATES[task_tag]
        snapshot["prompt_template_version"] = f"{task_tag}-{PROMPT_TEMPLATE_VERSION}"
    return snapshot


def _assemble(
    task: str,
    dataset_id: str,
    model_id: str,
    records: list[dict],
    agg: Callable[[list[dict]], dict],
    config_snapshot: dict,
    seed: int | None,
    n_items: int,
) -> EvalReport:
    completed = [r for r in records if "error" not in r]
    report_metrics = agg(completed) if completed else {}
    return EvalReport(
        task=task,
        dataset_id=dataset_id,
        model_id=model_id,
        n_items=n_items,
        completed=len(completed),
        failed=n_items - len(completed),
        metrics=report_metrics,
        items=records,
        config=config_snapshot,
        seed=seed,
    )


# ----------------------------------------------------------------------------
# Task runners
# ----------------------------------------------------------------------------


def run_mcqa(
    items: Sequence[McqaItem],
    backend: Backend,
    config: RunConfig = RunConfig(),
    dataset_id: str = "dataset",
) -> EvalReport:
    """Score options per item; prediction is the argmax; aggregate is accuracy."""

    def worker(item: McqaItem) -> dict:
        scores = backend.score_options(
            OptionScoreRequest(item.question, item.options, item.context)
        )
        predicted = argmax(scores)
        return {
            "id": item.id,
            "predicted_index": predicted,
            "option_scores": scores,
            "answer_index": item.answer_index,
            "correct": predicted == item.answer_index,
        }

    records = _run_items(items, worker, config.parallelism)

    def agg(completed: list[dict]) -> dict:
        return {
            "accuracy": metrics.accuracy(
                [r["predicted_index"] for r in completed],
                [r["answer_index"] for r in completed],
            )
        }

    return _assemble(
        "mcqa", dataset_id, backend.model_id, records, agg,
        _base_config(config), config.seed, len(items),
    )


def _rouge_agg(completed: list[dict]) -> dict:
    return {key: _mean_of(completed, key) for key in _ROUGE_KEYS}


def run_answer_gen(
    items: Sequence[AnswerGenItem],
    backend: Backend,
    config: RunConfig = RunConfig(),
    dataset_id: str = "dataset",
) -> EvalReport:
    """Generate an answer per question; aggregate mean ROUGE-1/2/L (best
    reference per item)."""

    def worker(item: AnswerGenItem) -> dict:
        response = backend.generate(
            GenerationRequest(
                task="qa",
                prompt=_prompt("qa", item.question),
                max_new_tokens=config.max_new_tokens,
                temperature=config.temperature,
            )
        )
        return {
            "id": item.id,
            "question": item.question,
            "generated": response.text,
            "references": list(item.reference_answers),
            "scores": _rouge_scores(response.text, item.reference_answers),
        }

    records = _run_items(items, worker, config.parallelism)
    return _assemble(
        "answer_gen", dataset_id, backend.model_id, records, _rouge_agg,
        _base_config(config, "qa"), config.seed, len(items),
    )


def run_summarization(
    items: Sequence[SummSingleItem] | Sequence[SummMultiItem],
    engine: Backend | TextRankEngine,
    mode: str = "single",
    config: RunConfig = RunConfig(),
    dataset_id: str = "dataset",
) -> EvalReport:
    """Summarize per item (backend or native TextRank); aggregate mean ROUGE.

    Multi-document items are concatenated with a blank-line separator before
    single-pass summarization.
    """
    if mode not in ("single", "multi"):
        raise ValueError(f"mode must be 'single' or 'multi', got {mode!r}")
    is_textrank = isinstance(engine, TextRankEngine)

    def document_of(item) -> str:
        if mode == "multi":
            return MULTI_DOC_SEPARATOR.join(item.documents)
        return item.document

    def worker(item) -> dict:
        document = document_of(item)
        record = {"id": item.id, "reference": item.reference_summary}
        if is_textrank:
            generated, indices = engine.summarize(document)
            record["selected_indices"] = indices
        else:
            response = engine.generate(
                GenerationRequest(
                    task="summarize",
                    prompt=_prompt("summarize", document),
                    max_new_tokens=config.max_new_tokens,
                    temperature=config.temperature,
                )
            )
            generated = response.text
        record["generated"] = generated
        record["scores"] = _rouge_scores(generated, [item.reference_summary])
        return record

    records = _run_items(items, worker, config.parallelism)
    snapshot = _base_config(config, None if is_textrank else "summarize")
    snapshot["mode"] = mode
    if is_textrank:
        snapshot["summary_sentences"] = engine.k
    task = "summ_multi" if mode == "multi" else "summ_single"
    return _assemble(
        task, dataset_id, engine.model_id, records, _rouge_agg,
        snapshot, config.seed, len(items),
    )


def run_simplification(
    items: Sequence[SimplifyItem],
    backend: Backend,
    config: RunConfig = RunConfig(),
    dataset_id: str = "dataset",
) -> EvalReport:
    """Simplify per item; ROUGE against the reference plus FKGL readability
    for source, generated and reference text."""

    def worker(item: SimplifyItem) -> dict:
        response = backend.generate(
            GenerationRequest(
                task="simplify",
                prompt=_prompt("simplify", item.source),
                max_new_tokens=config.max_new_tokens,
                temperature=config.temperature,
            )
        )
        scores = _rouge_scores(response.text, [item.reference])
        scores["fkgl_source"] = _fkgl_or_none(item.source)
        scores["fkgl_generated"] = _fkgl_or_none(response.text)
        scores["fkgl_reference"] = _fkgl_or_none(item.reference)
        return {
            "id": item.id,
            "source": item.source,
            "generated": response.text,
            "reference": item.reference,
            "scores": scores,
        }

    records = _run_items(items, worker, config.parallelism)

    def agg(completed: list[dict]) -> dict:
        out = _rouge_agg(completed)
        for key in ("fkgl_source", "fkgl_generated", "fkgl_reference"):
            out[key] = _mean(
                [r["scores"][key] for r in completed if r["scores"][key] is not None]
            )
        return out

    return _assemble(
        "simplify", dataset_id, backend.model_id, records, agg,
        _base_config(config, "simplify"), config.seed, len(items),
    )


def run_translation(
    items: Sequence[TranslateItem],
    backend: Backend,
    config: RunConfig = RunConfig(),
    dataset_id: str = "dataset",
) -> EvalReport:
    """Translate per item; aggregate is corpus BLEU pooled over all pairs."""
    pairs = {(item.src_lang, item.tgt_lang) for item in items}
    if len(pairs) > 1:
        raise ValueError(f"one run must cover a single language pair, got {sorted(pairs)}")

    def worker(item: TranslateItem) -> dict:
        response = backend.generate(
            GenerationRequest(
                task="translate",
                prompt=_prompt("translate", item.source),
                max_new_tokens=config.max_new_tokens,
                temperature=config.temperature,
                target_language=item.tgt_lang,
            )
        )
        return {
            "id": item.id,
            "source": item.source,
            "generated": response.text,
            "reference": item.reference,
        }

    records = _run_items(items, worker, config.parallelism)

    def agg(completed: list[dict]) -> dict:
        bleu = metrics.corpus_bleu(
            [textproc.tokenize(r["generated"]) for r in completed],
            [textproc.tokenize(r["reference"]) for r in completed],
        )
        return {"bleu": bleu.bleu, "brevity_penalty": bleu.brevity_penalty}

    snapshot = _base_config(config, "translate")
    if pairs:
        src, tgt = next(iter(pairs))
        snapshot["language_pair"] = f"{src}-{tgt}"
    return _assemble(
        "translate", dataset_id, backend.model_id, records, agg,
        snapshot, config.seed, len(items),
    )


def compare_translation(
    items: Sequence[TranslateItem],
    backend: Backend,
    baseline: Backend,
    config: RunConfig = RunConfig(),
    dataset_id: str = "dataset",
) -> dict:
    """Two-backend translation comparison: BLEU of each plus the delta
    (backend minus baseline)."""
    report = run_translation(items, backend, config, dataset_id)
    baseline_report = run_translation(items, baseline, config, dataset_id)
    bleu = report.metrics.get("bleu")
    baseline_bleu = baseline_report.metrics.get("bleu")
    delta = None
    if bleu is not None and baseline_bleu is not None:
        delta = bleu - baseline_bleu
    return {
        "dataset_id": dataset_id,
        "model_id": backend.model_id,
        "baseline_model_id": baseline.model_id,
        "bleu": bleu,
        "baseline_bleu": baseline_bleu,
        "bleu_delta": delta,
        "reports": {"model": report.to_dict(), "baseline": baseline_report.to_dict()},
    }


# ----------------------------------------------------------------------------
# Report verification
# ----------------------------------------------------------------------------


def verify_report(report: EvalReport) -> list[str]:
    """Recompute aggregates from the per-item records.

    Returns a list of discrepancy descriptions; an empty list means the
    report is internally consistent.
    """
    problems: list[str] = []
    completed = [r for r in report.items if "error" not in r]
    failed = [r for r in report.items if "error" in r]
    if report.completed != len(completed):
        problems.append(f"completed count {report.completed} != {len(completed)}")
    if report.failed != len(failed):
        problems.append(f"failed count {report.failed} != {len(failed)}")
    if report.n_items != len(report.items):
        problems.append(f"n_items {report.n_items} != {len(report.items)}")
    if [r["id"] for r in report.items] != sorted(r["id"] for r in report.items):
        problems.append("items are not sorted by id")

    expected: dict[str, float | None] = {}
    if not completed:
        expected = {}
    elif report.task == "mcqa":
        expected["accuracy"] = metrics.accuracy(
            [r["predicted_index"] for r in completed],
            [r["answer_index"] for r in completed],
        )
    elif report.task == "translate":
        bleu = metrics.corpus_bleu(
            [textproc.tokenize(r["generated"]) for r in completed],
            [textproc.tokenize(r["reference"]) for r in completed],
        )
        expected = {"bleu": bleu.bleu, "brevity_penalty": bleu.brevity_penalty}
    else:
        expected = {key: _mean_of(completed, key) for key in _ROUGE_KEYS}
        if report.task == "simplify":
            for key in ("fkgl_source", "fkgl_generated", "fkgl_reference"):
                expected[key] = _mean(
                    [r["scores"][key] for r in completed if r["scores"][key] is not None]
                )

    if report.metrics != expected:
        problems.append(
            f"aggregate metrics do not match recomputation: "
            f"report={report.metrics} recomputed={expected}"
        )
    return problems
