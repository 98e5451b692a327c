"""Single entry point exposing the pipeline as composable subcommands.

Stages communicate through files so each can be rerun independently:

  detect      rank artifact n-grams and emit the report CSV
  synthesize  select anchors, run the LLM pipeline, write the contrast set
  sample      build per-epoch balanced training mixtures
  evaluate    score a prediction file (accuracy, consistency, baselines)
  verify      audit a contrast file's pairing + neutralization

Every run writes a manifest echoing the resolved config, tool version, and
input digests. Exit codes: 0 success, 2 usage/input error, 3 integrity
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .artifact_stats import accumulate_counts, emit_artifact_report, rank_top_k
from .corpus import LABEL_ORDER, Label, load_dataset, ngram_text, write_dataset
from .errors import ContrastKitError, IntegrityError
from .evaluation import (
    EvalReport,
    audit_contrast_set,
    evaluate_predictions,
    load_predictions,
    neutralization_report,
    rule_baseline_predictions,
    scaling_curve,
    write_predictions,
)
from .sampler import MixConfig, build_all_epochs, emit_epoch_files
from .synthesis import (
    HttpChatTransport,
    LlmClient,
    LlmEndpointConfig,
    MockTransport,
    generate_contrast_set,
    select_anchors,
)
from .util import parse_kv_config, sha256_file

_FORMAT_CHOICES = ("auto", "jsonl", "tsv")


def _infer_format(path, flag: str) -> str:
    if flag != "auto":
        return flag
    suffix = Path(path).suffix.lower()
    return "tsv" if suffix in (".tsv", ".txt") else "jsonl"


def _load(path, format_flag: str = "auto"):
    return load_dataset(path, format=_infer_format(path, format_flag))


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: dict, extra=None):
    payload = {
        "tool": {"name": "contrastkit", "version": __version__},
        "command": command,
        "config": config,
        "input_digests": {str(p): sha256_file(p) for p in inputs.values()},
    }
    if extra:
        payload.update(extra)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _parse_labels(value: str) -> list:
    if value == "all":
        return list(LABEL_ORDER)
    return [Label.from_string(value)]


def cmd_detect(args) -> int:
    dataset = _load(args.data, args.format)
    counts = accumulate_counts(dataset, args.ngram_order, field=args.field)
    rankings = {
        label: rank_top_k(
            counts, label, args.top_k, metric=args.metric, min_joint=args.min_joint
        )
        for label in _parse_labels(args.label)
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "artifact_report.csv"
    emit_artifact_report(rankings, args.metric, report_path)
    _write_manifest(
        out_dir,
        "detect",
        {
            "data": str(args.data),
            "format": args.format,
            "ngram_order": args.ngram_order,
            "field": args.field,
            "metric": args.metric,
            "top_k": args.top_k,
            "min_joint": args.min_joint,
            "label": args.label,
            "skipped_unlabeled": dataset.skipped_unlabeled,
        },
        {"data": args.data},
        extra={"outputs": [report_path.name]},
    )
    for label, entries in rankings.items():
        for rank, s in enumerate(entries, start=1):
            print(
                f"{label.value:13s} #{rank:<3d} {ngram_text(s.ngram):24s} "
                f"{args.metric}={getattr(s, args.metric):.4f} joint={s.joint_count}"
            )
    return 0


def _endpoint_from_config(kv: dict, prefix: str, role: str, overrides: dict) -> LlmEndpointConfig:
    def pick(key: str, default):
        flag_value = overrides.get(key)
        if flag_value is not None:
            return flag_value
        raw = kv.get(f"{prefix}.{key}")
        if raw is None:
            return default
        if isinstance(default, int):
            return int(raw)
        return raw

    return LlmEndpointConfig(
        role=role,
        model_id=pick("model_id", f"{role}-model"),
        base_url=pick("base_url", ""),
        api_key_env=pick("api_key_env", ""),
        max_retries=pick("max_retries", 3),
        backoff_base_ms=pick("backoff_base_ms", 250),
        timeout_ms=pick("timeout_ms", 60000),
        max_concurrency=pick("max_concurrency", 4),
    )


def _build_clients(args):
    """Generator + judge panel, either mock-backed or HTTP-backed."""
    if args.mock:
        table = MockTransport.from_jsonl(args.mock)
        generator_config = LlmEndpointConfig(role="generator", model_id="mock-generator")
        judges = []
        for i in range(args.panel_size):
            config = LlmEndpointConfig(role="judge", model_id=f"mock-judge-{i + 1}")
            judges.append(LlmClient(config, table, sleeper=lambda _s: None))
        return LlmClient(generator_config, table, sleeper=lambda _s: None), judges

    kv = parse_kv_config(args.endpoints) if args.endpoints else {}
    overrides = {
        "model_id": args.generator_model,
        "base_url": args.generator_base_url,
        "api_key_env": args.generator_api_key_env,
    }
    generator_config = _endpoint_from_config(kv, "generator", "generator", overrides)
    generator = LlmClient(generator_config, HttpChatTransport(generator_config))
    judges = []
    index = 1
    while any(k.startswith(f"judge.{index}.") for k in kv):
        config = _endpoint_from_config(kv, f"judge.{index}", "judge", {})
        judges.append(LlmClient(config, HttpChatTransport(config)))
        index += 1
    if not judges:
        raise ContrastKitError(
            "no judges configured: pass --mock or an --endpoints file with judge.N.* keys"
        )
    return generator, judges


def cmd_synthesize(args) -> int:
    dataset = _load(args.data, args.format)
    counts = accumulate_counts(dataset, args.ngram_order)
    scored = []
    for label in LABEL_ORDER:
        scored.extend(
            rank_top_k(counts, label, args.top_k, metric=args.metric, min_joint=args.min_joint)
        )
    scored.sort(
        key=lambda s: (-getattr(s, args.metric), -s.joint_count, ngram_text(s.ngram))
    )
    rankings = scored[: args.top_k]
    anchor_set = select_anchors(dataset, rankings, args.top_k, args.per_ngram, args.seed)
    generator, judges = _build_clients(args)
    result = generate_contrast_set(anchor_set, generator, judges, seed=args.seed)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    contrast = result.to_dataset(name="contrast")
    write_dataset(contrast, out_dir / "contrast.jsonl")
    result.write_rejections(out_dir / "rejections.jsonl")
    _write_manifest(
        out_dir,
        "synthesize",
        {
            "data": str(args.data),
            "format": args.format,
            "ngram_order": args.ngram_order,
            "metric": args.metric,
            "min_joint": args.min_joint,
            "top_k": args.top_k,
            "per_ngram": args.per_ngram,
            "seed": args.seed,
            "panel_size": len(judges),
            "mock_table": str(args.mock) if args.mock else None,
        },
        {"data": args.data},
        extra={
            "endpoints": [generator.config.public_dict()]
            + [j.config.public_dict() for j in judges],
            "ranked_ngrams": [
                {"ngram": ngram_text(s.ngram), "label": s.label.value}
                for s in rankings
            ],
            "quota_shortfalls": anchor_set.shortfalls,
            "anchors_selected": len(anchor_set),
            "pairs_accepted": len(result.pairs),
            "rejections": len(result.rejections),
            "outputs": ["contrast.jsonl", "rejections.jsonl"],
        },
    )
    print(
        f"anchors={len(anchor_set)} accepted_pairs={len(result.pairs)} "
        f"rejected={len(result.rejections)} examples={len(contrast)}"
    )
    return 0


def cmd_sample(args) -> int:
    contrast = _load(args.contrast)
    pool = _load(args.pool, args.format)
    config = MixConfig(
        base_seed=args.seed,
        epochs=args.epochs,
        exclude_anchor_ids=not args.include_anchors,
    )
    mixes = build_all_epochs(contrast, pool, config)
    out_dir = Path(args.out)
    emit_epoch_files(
        mixes,
        out_dir,
        config,
        extra={
            "tool": {"name": "contrastkit", "version": __version__},
            "command": "sample",
            "input_digests": {
                str(args.contrast): sha256_file(args.contrast),
                str(args.pool): sha256_file(args.pool),
            },
        },
    )
    for mixed, manifest in mixes:
        print(
            f"epoch_{manifest.epoch}.jsonl n={len(mixed)} digest={manifest.output_digest[:12]}"
        )
    return 0


def _print_report(title: str, report: EvalReport) -> None:
    print(f"== {title} ==")
    print(f"n                 {report.n}")
    print(f"coverage          {report.coverage:.4f}" + ("" if report.full_coverage else "  (PARTIAL)"))
    print(f"accuracy          {report.accuracy:.4f}")
    for label, value in report.per_class_accuracy.items():
        print(f"  {label.value:15s} {value:.4f}")
    if report.n_pairs is not None:
        print(f"pairs             {report.n_pairs}")
        print(f"consistency       {report.consistency:.4f}")


def cmd_evaluate(args) -> int:
    gold = _load(args.gold)
    preds = load_predictions(args.predictions)
    report = evaluate_predictions(gold, preds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"report": report.to_dict()}
    _print_report("predictions", report)

    if args.hypothesis_only_baseline:
        if not args.train:
            raise ContrastKitError("--hypothesis-only-baseline requires --train")
        train = _load(args.train, args.format)
        counts = accumulate_counts(train, args.ngram_order)
        baseline_preds = rule_baseline_predictions(counts, gold)
        write_predictions(baseline_preds, out_dir / "hypothesis_only_predictions.jsonl")
        baseline_report = evaluate_predictions(gold, baseline_preds)
        payload["hypothesis_only_baseline"] = baseline_report.to_dict()
        _print_report("hypothesis-only rule baseline", baseline_report)

    if args.scaling:
        points = []
        point_entries = json.loads(Path(args.scaling).read_text(encoding="utf-8"))
        for entry in point_entries:
            orig = _report_from_json(entry["original_report"])
            contrast = _report_from_json(entry["contrast_report"])
            points.append((entry["n"], orig, contrast))
        (out_dir / "scaling.csv").write_text(scaling_curve(points), encoding="utf-8")

    (out_dir / "report.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _write_manifest(
        out_dir,
        "evaluate",
        {
            "gold": str(args.gold),
            "predictions": str(args.predictions),
            "hypothesis_only_baseline": args.hypothesis_only_baseline,
            "train": str(args.train) if args.train else None,
            "ngram_order": args.ngram_order,
            "scaling": str(args.scaling) if args.scaling else None,
        },
        {"gold": args.gold, "predictions": args.predictions},
        extra={"outputs": ["report.json"]},
    )
    return 0


def _report_from_json(path):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    body = data.get("report", data)
    return EvalReport(
        n=body["n"],
        accuracy=body["accuracy"],
        per_class_accuracy={},
        coverage=body.get("coverage", 1.0),
        n_pairs=body.get("n_pairs"),
        consistency=body.get("consistency"),
    )


def cmd_verify(args) -> int:
    contrast = _load(args.contrast)
    problems = audit_contrast_set(contrast)
    if problems:
        for problem in problems:
            print(f"FAIL: {problem}")
        raise IntegrityError(f"{len(problems)} integrity problem(s) found")

    artifacts = []
    seen = set()
    for ex in contrast:
        if ex.provenance.value == "original" and ex.artifact_ngram is not None:
            key = (ex.artifact_ngram, ex.label)
            if key not in seen:
                seen.add(key)
                artifacts.append(key)
    original_counts = None
    if args.train:
        train = _load(args.train, args.format)
        original_counts = accumulate_counts(train, args.ngram_order)
    report = neutralization_report(original_counts, contrast, artifacts)
    print(f"PASS: {len(contrast)} examples, {len(contrast) // 2} pairs")
    print(f"{'ngram':24s} {'label':13s} {'original':>9s} {'contrast':>9s}")
    for row in report.rows:
        orig = "-" if row.original_p is None else f"{row.original_p:.4f}"
        cont = "missing" if row.contrast_p is None else f"{row.contrast_p:.4f}"
        print(f"{ngram_text(row.ngram):24s} {row.label.value:13s} {orig:>9s} {cont:>9s}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "neutralization.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        inputs = {"contrast": args.contrast}
        if args.train:
            inputs["train"] = args.train
        _write_manifest(
            out_dir,
            "verify",
            {
                "contrast": str(args.contrast),
                "train": str(args.train) if args.train else None,
                "ngram_order": args.ngram_order,
            },
            inputs,
            extra={"outputs": ["neutralization.json"], "pairs": len(contrast) // 2},
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contrastkit",
        description="Artifact detection, contrast-set synthesis, balanced "
        "sampling, and paired-consistency evaluation for NLI datasets.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="rank artifact n-grams, emit report CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=_FORMAT_CHOICES, default="auto")
    p.add_argument("--out", required=True)
    p.add_argument("--ngram-order", type=int, default=2)
    p.add_argument("--field", choices=("hypothesis", "premise", "both"), default="hypothesis")
    p.add_argument("--metric", choices=("lmi", "lf_lmi"), default="lf_lmi")
    p.add_argument("--top-k", type=int, default=15)
    p.add_argument("--min-joint", type=int, default=20)
    p.add_argument("--label", default="all")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("synthesize", help="generate + judge a contrast set")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=_FORMAT_CHOICES, default="auto")
    p.add_argument("--out", required=True)
    p.add_argument("--ngram-order", type=int, default=2)
    p.add_argument("--metric", choices=("lmi", "lf_lmi"), default="lf_lmi")
    p.add_argument("--min-joint", type=int, default=20)
    p.add_argument("--top-k", type=int, required=True)
    p.add_argument("--per-ngram", type=int, required=True, help="anchor quota m per n-gram")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mock", help="mock-table jsonl for deterministic offline runs")
    p.add_argument("--panel-size", type=int, default=2, help="judge count under --mock")
    p.add_argument("--endpoints", help="key=value endpoint config file")
    p.add_argument("--generator-model", dest="generator_model")
    p.add_argument("--generator-base-url", dest="generator_base_url")
    p.add_argument("--generator-api-key-env", dest="generator_api_key_env")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("sample", help="emit per-epoch balanced mixtures")
    p.add_argument("--contrast", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--format", choices=_FORMAT_CHOICES, default="auto")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--include-anchors",
        action="store_true",
        help="allow anchor ids to be re-drawn into the original subset",
    )
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="score a prediction file")
    p.add_argument("--gold", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=_FORMAT_CHOICES, default="auto")
    p.add_argument("--hypothesis-only-baseline", action="store_true")
    p.add_argument("--train", help="training data for the rule baseline counts")
    p.add_argument("--ngram-order", type=int, default=2)
    p.add_argument("--scaling", help="json list of {n, original_report, contrast_report}")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("verify", help="audit a contrast file")
    p.add_argument("--contrast", required=True)
    p.add_argument("--train", help="original training data for baseline P(l|w)")
    p.add_argument("--format", choices=_FORMAT_CHOICES, default="auto")
    p.add_argument("--ngram-order", type=int, default=2)
    p.add_argument("--out", help="persist the audit (neutralization.json + manifest)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return 3
    except ContrastKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
