"""Command-line entry point exposing every capability of the toolkit.

Exit codes: 0 success, 1 operational error (one-line diagnostic on stderr),
2 usage error. Structured output (--format json) always prints raw scores
in [0, 1]; human output scales ROUGE/BLEU by 100 to match the usual
presentation of those metrics.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from medtextkit import corpus, harness, metrics, review, textproc, textrank
from medtextkit.backends import Backend, BackendError, HttpBackend, make_backend

ENV_BACKEND_URL = "MEDTEXTKIT_BACKEND_URL"
ENV_AUTH_TOKEN = "MEDTEXTKIT_AUTH_TOKEN"


@dataclass
class CliConfig:
    """Backend/runtime settings resolved from flags, environment and config file.

    Flags win over environment variables, which win over the config file.
    """

    backend_url: str | None = None
    auth_token: str | None = None
    timeout: float = 30.0
    parallelism: int = 4
    seed: int | None = None

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> CliConfig:
        file_values: dict = {}
        config_path = getattr(args, "config", None)
        if config_path:
            file_values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        values = cls(
            backend_url=file_values.get("backend_url"),
            auth_token=file_values.get("auth_token"),
            timeout=float(file_values.get("timeout", 30.0)),
            parallelism=int(file_values.get("parallelism", 4)),
            seed=file_values.get("seed"),
        )
        if os.environ.get(ENV_BACKEND_URL):
            values.backend_url = os.environ[ENV_BACKEND_URL]
        if os.environ.get(ENV_AUTH_TOKEN):
            values.auth_token = os.environ[ENV_AUTH_TOKEN]
        if getattr(args, "backend_url", None):
            values.backend_url = args.backend_url
        if getattr(args, "timeout", None) is not None:
            values.timeout = args.timeout
        if getattr(args, "parallelism", None) is not None:
            values.parallelism = args.parallelism
        if getattr(args, "seed", None) is not None:
            values.seed = args.seed
        return values


def _p100(value: float) -> str:
    return f"{100.0 * value:.2f}"


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False))


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


# ----------------------------------------------------------------------------
# Corpus commands
# ----------------------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    stats = corpus.ingest(args.tsv, args.index)
    payload = {
        "patients": stats.patients,
        "documents": stats.documents,
        "sentences": stats.sentences,
    }
    if args.format == "json":
        _emit_json(payload)
    else:
        print(
            f"ingested {stats.documents} notes from {stats.patients} patients "
            f"({stats.sentences} sentences) into {args.index}"
        )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    stats = corpus.stats(args.index)
    payload = {
        "patients": stats.patients,
        "documents": stats.documents,
        "sentences": stats.sentences,
    }
    if args.format == "json":
        _emit_json(payload)
    else:
        print(
            f"patients={stats.patients} documents={stats.documents} "
            f"sentences={stats.sentences}"
        )
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    hits = corpus.search(args.index, args.query, args.limit)
    if args.format == "json":
        _emit_json([{"row_id": rid, "score": score} for rid, score in hits])
    else:
        for rid, score in hits:
            print(f"{rid}\t{score:.6f}")
    return 0


def cmd_get_note(args: argparse.Namespace) -> int:
    record = corpus.get_note(args.index, args.row_id)
    if args.format == "json":
        _emit_json(
            {
                "row_id": record.row_id,
                "subject_id": record.subject_id,
                "hadm_id": record.hadm_id,
                "category": record.category,
                "text": record.text,
            }
        )
    else:
        sys.stdout.write(record.text)
        if not record.text.endswith("\n"):
            sys.stdout.write("\n")
    return 0


def cmd_get_patient(args: argparse.Namespace) -> int:
    records = corpus.get_patient_notes(args.index, args.subject_id, args.limit)
    if args.format == "json":
        _emit_json(
            [
                {
                    "row_id": r.row_id,
                    "subject_id": r.subject_id,
                    "hadm_id": r.hadm_id,
                    "category": r.category,
                    "text": r.text,
                }
                for r in records
            ]
        )
    else:
        for r in records:
            print(f"{r.row_id}\t{r.category}\t{len(r.text)} chars")
    return 0


# ----------------------------------------------------------------------------
# Summarize / metric commands
# ----------------------------------------------------------------------------


def cmd_summarize(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    if args.max_words is not None:
        k = textrank.budget_to_sentence_count(text, args.max_words)
        if k == 0:
            print("", end="")
            return 0
    else:
        k = args.sentences
    summary = textrank.extract_summary(text, k)
    print(summary)
    return 0


def _metric_rouge(args: argparse.Namespace) -> int:
    candidates = _read_lines(args.candidates)
    references = _read_lines(args.references)
    if len(candidates) != len(references):
        raise ValueError(
            f"candidates has {len(candidates)} lines, references {len(references)}"
        )
    if not candidates:
        raise ValueError("input files are empty")
    sums: dict[str, dict[str, float]] = {
        name: {"precision": 0.0, "recall": 0.0, "f1": 0.0}
        for name in ("rouge1", "rouge2", "rougeL")
    }
    for cand_text, ref_text in zip(candidates, references):
        cand = textproc.tokenize(cand_text)
        ref = [textproc.tokenize(ref_text)]
        for name, score in (
            ("rouge1", metrics.rouge_n(cand, ref, 1)),
            ("rouge2", metrics.rouge_n(cand, ref, 2)),
            ("rougeL", metrics.rouge_l(cand, ref)),
        ):
            sums[name]["precision"] += score.precision
            sums[name]["recall"] += score.recall
            sums[name]["f1"] += score.f1
    n = len(candidates)
    result = {
        name: {part: total / n for part, total in parts.items()}
        for name, parts in sums.items()
    }
    if args.format == "json":
        _emit_json(result)
    else:
        for label, name in (("R-1", "rouge1"), ("R-2", "rouge2"), ("R-L", "rougeL")):
            r = result[name]
            print(
                f"{label}  P={_p100(r['precision'])} R={_p100(r['recall'])} "
                f"F1={_p100(r['f1'])}"
            )
    return 0


def _metric_bleu(args: argparse.Namespace) -> int:
    candidates = [textproc.tokenize(t) for t in _read_lines(args.candidates)]
    references = [textproc.tokenize(t) for t in _read_lines(args.references)]
    score = metrics.corpus_bleu(candidates, references)
    if args.format == "json":
        _emit_json(
            {
                "bleu": score.bleu,
                "brevity_penalty": score.brevity_penalty,
                "precisions": list(score.precisions),
                "candidate_len": score.candidate_len,
                "reference_len": score.reference_len,
            }
        )
    else:
        print(f"BLEU={_p100(score.bleu)} BP={score.brevity_penalty:.4f}")
    return 0


def _metric_fkgl(args: argparse.Namespace) -> int:
    score = metrics.fkgl(_read_text(args.input))
    if args.format == "json":
        _emit_json(
            {
                "fkgl": score.fkgl,
                "words": score.words,
                "sentences": score.sentences,
                "syllables": score.syllables,
            }
        )
    else:
        print(
            f"FKGL={score.fkgl:.2f} words={score.words} "
            f"sentences={score.sentences} syllables={score.syllables}"
        )
    return 0


def _read_int_lines(path: str) -> list[int]:
    return [int(line) for line in _read_lines(path) if line.strip()]


def _metric_accuracy(args: argparse.Namespace) -> int:
    value = metrics.accuracy(_read_int_lines(args.predictions), _read_int_lines(args.gold))
    if args.format == "json":
        _emit_json({"accuracy": value})
    else:
        print(f"accuracy={value:.4f}")
    return 0


def _metric_agreement(args: argparse.Namespace) -> int:
    value = metrics.percentage_agreement(
        _read_int_lines(args.rater_a), _read_int_lines(args.rater_b), args.threshold
    )
    if args.format == "json":
        _emit_json({"percentage_agreement": value, "threshold": args.threshold})
    else:
        print(f"agreement={value:.4f} (threshold {args.threshold})")
    return 0


def cmd_metric(args: argparse.Namespace) -> int:
    handlers = {
        "rouge": _metric_rouge,
        "bleu": _metric_bleu,
        "fkgl": _metric_fkgl,
        "accuracy": _metric_accuracy,
        "agreement": _metric_agreement,
    }
    return handlers[args.metric_name](args)


# ----------------------------------------------------------------------------
# Split / eval commands
# ----------------------------------------------------------------------------


def cmd_split(args: argparse.Namespace) -> int:
    items = harness.load_dataset(args.dataset, args.task)
    config = harness.SplitConfig(
        ratio=args.ratio, seed=args.seed, carve_validation=args.carve
    )
    result = harness.split(items, config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_dataset(out_dir / "train.jsonl", result.train)
    harness.write_dataset(out_dir / "test.jsonl", result.test)
    summary = {
        "train": len(result.train),
        "test": len(result.test),
        "ratio": args.ratio,
        "seed": args.seed,
    }
    if result.validation is not None:
        harness.write_dataset(out_dir / "validation.jsonl", result.validation)
        summary["validation"] = len(result.validation)
    if args.format == "json":
        _emit_json(summary)
    else:
        parts = [f"train={summary['train']}", f"test={summary['test']}"]
        if "validation" in summary:
            parts.append(f"validation={summary['validation']}")
        parts.append(f"seed={args.seed}")
        print(" ".join(parts))
    return 0


def _build_backend(args: argparse.Namespace, config: CliConfig) -> Backend:
    spec = getattr(args, "backend", None)
    if spec is None:
        if not config.backend_url:
            raise ValueError(
                "no backend configured: pass --backend, --backend-url, "
                f"set {ENV_BACKEND_URL}, or put backend_url in the config file"
            )
        spec = config.backend_url
    backend = make_backend(
        spec,
        auth_token=config.auth_token,
        timeout=config.timeout,
        max_in_flight=config.parallelism,
    )
    if isinstance(backend, HttpBackend):
        status = backend.health()
        if not status.ok:
            raise BackendError(f"backend unreachable: {status.reason}")
    return backend


def cmd_eval(args: argparse.Namespace) -> int:
    config = CliConfig.resolve(args)
    items = harness.load_dataset(args.dataset, args.task)
    run_config = harness.RunConfig(
        max_new_tokens=args.max_new_tokens,
        temperature=args.temperature,
        parallelism=config.parallelism,
        summary_sentences=args.sentences,
        seed=config.seed,
    )
    dataset_id = Path(args.dataset).stem

    if args.task == "translate" and args.baseline:
        backend = _build_backend(args, config)
        baseline = make_backend(
            args.baseline, auth_token=config.auth_token, timeout=config.timeout
        )
        comparison = harness.compare_translation(
            items, backend, baseline, run_config, dataset_id
        )
        if args.out:
            Path(args.out).write_text(
                json.dumps(comparison, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
        if args.format == "json":
            _emit_json(comparison)
        else:
            delta = comparison["bleu_delta"]
            print(
                f"BLEU {comparison['model_id']}={_p100(comparison['bleu'])} "
                f"baseline {comparison['baseline_model_id']}="
                f"{_p100(comparison['baseline_bleu'])} "
                f"delta={100.0 * delta:+.2f}"
            )
        return 0

    if args.task in ("summ_single", "summ_multi") and args.engine == "textrank":
        engine: Backend | harness.TextRankEngine = harness.TextRankEngine(k=args.sentences)
    else:
        engine = _build_backend(args, config)

    if args.task == "mcqa":
        report = harness.run_mcqa(items, engine, run_config, dataset_id)
    elif args.task == "answer_gen":
        report = harness.run_answer_gen(items, engine, run_config, dataset_id)
    elif args.task == "summ_single":
        report = harness.run_summarization(items, engine, "single", run_config, dataset_id)
    elif args.task == "summ_multi":
        report = harness.run_summarization(items, engine, "multi", run_config, dataset_id)
    elif args.task == "simplify":
        report = harness.run_simplification(items, engine, run_config, dataset_id)
    else:
        report = harness.run_translation(items, engine, run_config, dataset_id)

    if args.out:
        report.save(args.out)
    if args.format == "json":
        print(report.to_json())
    else:
        print(
            f"task={report.task} dataset={report.dataset_id} model={report.model_id} "
            f"items={report.n_items} completed={report.completed} failed={report.failed}"
        )
        for name in sorted(report.metrics):
            value = report.metrics[name]
            if value is None:
                continue
            if name.startswith(("rouge", "bleu")) or name == "brevity_penalty":
                print(f"  {name}={_p100(value)}")
            else:
                print(f"  {name}={value:.4f}")
    return 0


# ----------------------------------------------------------------------------
# Review commands
# ----------------------------------------------------------------------------


def cmd_review_sample(args: argparse.Namespace) -> int:
    report = harness.load_report(args.report)
    items = review.sample_items(
        report, args.n, args.seed, show_reference=not args.hide_reference
    )
    text = review.items_to_json(items)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {len(items)} review items to {args.out} (seed={args.seed})")
    else:
        print(text)
    return 0


def cmd_review_serve(args: argparse.Namespace) -> int:
    import uvicorn

    items = review.items_from_json(Path(args.items).read_text(encoding="utf-8"))
    service = review.ReviewService(items, review.RatingLog(args.log))
    app = review.create_app(service, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_review_report(args: argparse.Namespace) -> int:
    log = review.RatingLog(args.log)
    assigned = args.assigned
    if args.items:
        assigned = len(review.items_from_json(Path(args.items).read_text(encoding="utf-8")))
    report = review.build_report(log.live_records(), assigned_items=assigned)
    if args.format == "json":
        _emit_json(report.to_dict())
    else:
        for criterion in metrics.LIKERT_CRITERIA:
            line = f"{criterion:<13} mean={report.means[criterion]:.2f}"
            if report.iaa is not None:
                line += f" iaa={report.iaa[criterion]:.2f}"
            print(line)
        if report.iaa_omitted:
            print("iaa omitted: no co-rated items")
        print(f"items={report.n_items} raters={report.n_raters}")
    return 0


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("human", "json"), default="human",
        help="output format (default: human)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medtextkit",
        description="Medical text generation evaluation, summarization, "
        "search and review tooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="index a NOTEEVENTS-style TSV")
    p.add_argument("--tsv", required=True)
    p.add_argument("--index", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--index", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("search", help="keyword search over the corpus")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--limit", type=int, default=10)
    _add_format(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("get-note", help="fetch one note by row id")
    p.add_argument("--index", required=True)
    p.add_argument("--row-id", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_get_note)

    p = sub.add_parser("get-patient", help="fetch a patient's notes")
    p.add_argument("--index", required=True)
    p.add_argument("--subject-id", required=True)
    p.add_argument("--limit", type=int, default=None)
    _add_format(p)
    p.set_defaults(func=cmd_get_patient)

    p = sub.add_parser("summarize", help="extractive summary of a text")
    p.add_argument("--input", default=None, help="input file ('-' or omit for stdin)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sentences", type=int, default=3, help="sentence budget")
    group.add_argument("--max-words", type=int, default=None, help="word budget")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("metric", help="compute a single metric from files")
    msub = p.add_subparsers(dest="metric_name", required=True)
    mp = msub.add_parser("rouge", help="line-paired ROUGE-1/2/L")
    mp.add_argument("--candidates", required=True)
    mp.add_argument("--references", required=True)
    _add_format(mp)
    mp.set_defaults(func=cmd_metric)
    mp = msub.add_parser("bleu", help="corpus BLEU over line pairs")
    mp.add_argument("--candidates", required=True)
    mp.add_argument("--references", required=True)
    _add_format(mp)
    mp.set_defaults(func=cmd_metric)
    mp = msub.add_parser("fkgl", help="readability of a text file")
    mp.add_argument("--input", default=None)
    _add_format(mp)
    mp.set_defaults(func=cmd_metric)
    mp = msub.add_parser("accuracy", help="accuracy over index files")
    mp.add_argument("--predictions", required=True)
    mp.add_argument("--gold", required=True)
    _add_format(mp)
    mp.set_defaults(func=cmd_metric)
    mp = msub.add_parser("agreement", help="binarized percentage agreement")
    mp.add_argument("--rater-a", required=True)
    mp.add_argument("--rater-b", required=True)
    mp.add_argument("--threshold", type=int, default=3)
    _add_format(mp)
    mp.set_defaults(func=cmd_metric)

    p = sub.add_parser("split", help="deterministic train/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--task", required=True, choices=harness.TASKS)
    p.add_argument("--ratio", type=float, default=0.85)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--carve", type=int, default=None, help="validation items carved from train")
    p.add_argument("--out-dir", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("eval", help="run one evaluation pipeline")
    p.add_argument("task", choices=harness.TASKS)
    p.add_argument("--dataset", required=True)
    p.add_argument("--backend", default=None, help="stub name or server URL")
    p.add_argument("--backend-url", default=None, help="inference server base URL")
    p.add_argument("--baseline", default=None, help="baseline backend (translate only)")
    p.add_argument("--engine", choices=("backend", "textrank"), default="backend")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-new-tokens", type=int, default=1024)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--sentences", type=int, default=3, help="textrank sentence budget")
    p.add_argument("--out", default=None, help="write the report here")
    _add_format(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("review", help="clinician review workflow")
    rsub = p.add_subparsers(dest="review_command", required=True)
    rp = rsub.add_parser("sample", help="sample items from an eval report")
    rp.add_argument("--report", required=True)
    rp.add_argument("-n", type=int, required=True)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--hide-reference", action="store_true")
    rp.add_argument("--out", default=None)
    rp.set_defaults(func=cmd_review_sample)
    rp = rsub.add_parser("serve", help="serve the review API (and optional UI)")
    rp.add_argument("--items", required=True)
    rp.add_argument("--log", required=True)
    rp.add_argument("--host", default="127.0.0.1")
    rp.add_argument("--port", type=int, default=8800)
    rp.add_argument("--ui-dir", default=None)
    rp.set_defaults(func=cmd_review_serve)
    rp = rsub.add_parser("report", help="aggregate a rating log")
    rp.add_argument("--log", required=True)
    rp.add_argument("--items", default=None, help="items file, for completion fractions")
    rp.add_argument("--assigned", type=int, default=None)
    _add_format(rp)
    rp.set_defaults(func=cmd_review_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except corpus.NoteNotFoundError as exc:
        print(f"error: note {exc.row_id} not found", file=sys.stderr)
        return 1
    except review.ItemNotFoundError as exc:
        print(f"error: review item {exc.item_id} not found", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
