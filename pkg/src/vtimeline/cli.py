"""Command-line entry point.

Subcommands map 1:1 onto module operations: probe | windows | sample-plan |
audit | agreement | features | train | predict | timeline | evaluate | grid |
serve | export. Machine-readable JSON goes to stdout or --out; report-style
subcommands additionally write CSV tables and PNG figures when --outdir is
given. Exit codes: 0 success, 2 validation/usage error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .annotation import (
    AXES,
    CONTEXT_LABELS,
    LOW_EVIDENCE_LABEL,
    LabelStore,
    agreement_matrix,
    cohens_kappa,
    exact_agreement,
    export_csv,
    export_jsonl,
    import_csv,
    import_jsonl,
    vocabulary,
)
from .audits import build_audit_report, write_audit_csvs
from .config import ConfigError, load_grid_config, load_project_config
from .corpus import (
    READY,
    WindowInventory,
    build_inventory,
    build_sampling_plan,
    discover_corpus,
    make_windows,
    open_source,
    probe_video,
)
from .evaluation import clean_eval_pairs, evaluate, recurring_confusions, write_confusion_csvs
from .features import embfile
from .features.encoders import EndpointEncoder, HashProjectionEncoder, PrecomputedEmbeddings, build_registry
from .features.extract import FeatureSpec, FusedSpec, extract_features, extract_frame_embeddings
from .features.flow import FLOW_PRESETS
from .features.fusion import FusionStats, fit_fusion
from .grid import run_experiment_grid
from .models import TrainConfig, load_model, save_model, train_softmax, video_level_split
from .timeline import generate_timeline, model_file_hash, read_timeline_jsonl, write_timeline_jsonl


class UsageError(ValueError):
    pass


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_store(path: str | Path) -> LabelStore:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"label file not found: {path}")
    if path.suffix == ".jsonl":
        return import_jsonl(path)
    return import_csv(path)


def _corpus_sources(root: Path, window_length_s: float):
    uris = discover_corpus(root)
    if not uris:
        raise UsageError(f"no videos found under {root}")
    sources = {}
    windows = []
    records = []
    for uri in uris:
        record = probe_video(uri)
        if record.readiness != READY:
            continue
        source = open_source(uri)
        sources[record.video_id] = source
        records.append(record)
        windows.extend(make_windows(record, window_length_s))
    if not sources:
        raise UsageError(f"no READY videos under {root}")
    return records, sources, windows


def _build_encoder_from_args(args) -> tuple[str, dict]:
    encoder_id = args.encoder
    if args.encoder_file:
        return encoder_id, {encoder_id: PrecomputedEmbeddings(args.encoder_file, encoder_id=encoder_id)}
    if args.encoder_url:
        if not args.encoder_dim:
            raise UsageError("--encoder-url requires --encoder-dim")
        return encoder_id, {encoder_id: EndpointEncoder(encoder_id, args.encoder_url, args.encoder_dim)}
    if args.encoder_dim:
        return encoder_id, {encoder_id: HashProjectionEncoder(encoder_id, dim=args.encoder_dim)}
    return encoder_id, {}


# -- handlers -----------------------------------------------------------------


def cmd_probe(args) -> int:
    _emit(probe_video(args.uri).to_dict(), args.out)
    return 0


def cmd_windows(args) -> int:
    if args.corpus:
        records, _, _ = _corpus_sources(Path(args.uri), args.L)
        inventory = build_inventory(records, args.L)
        _emit(inventory.to_dict(), args.out)
        return 0
    record = probe_video(args.uri)
    if record.readiness != READY:
        raise UsageError(f"video is not READY: {record.readiness}")
    windows = make_windows(record, args.L)
    _emit({"video": record.to_dict(), "windows": [w.to_dict() for w in windows]}, args.out)
    return 0


def cmd_sample_plan(args) -> int:
    root = Path(args.uri)
    if root.is_dir() and not (root / "manifest.json").exists():
        records, _, _ = _corpus_sources(root, args.L)
        plans = {}
        for record in records:
            windows = make_windows(record, args.L)
            plans[record.video_id] = build_sampling_plan(windows, args.kcov, args.krand, args.seed).to_dict()
        _emit(plans, args.out)
        return 0
    record = probe_video(args.uri)
    if record.readiness != READY:
        raise UsageError(f"video is not READY: {record.readiness}")
    windows = make_windows(record, args.L)
    plan = build_sampling_plan(windows, args.kcov, args.krand, args.seed)
    _emit(plan.to_dict(), args.out)
    return 0


def cmd_audit(args) -> int:
    store = _load_store(args.labels)
    inventory = WindowInventory.load(args.inventory)
    report = build_audit_report(store, inventory, pass_id=args.pass_id)
    _emit(report.to_dict(), args.out)
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "audit_report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        write_audit_csvs(report, outdir)
        from .plots import save_audit_figures

        save_audit_figures(report, outdir)
    return 0


def cmd_agreement(args) -> int:
    store = _load_store(args.labels)
    pass1 = store.pass_map(args.p1)
    pass2 = store.pass_map(args.p2)
    axes = AXES if args.axis == "both" else (args.axis,)
    result = {}
    for axis in axes:
        matrix = agreement_matrix(pass1, pass2, axis)
        normalized = agreement_matrix(pass1, pass2, axis, row_normalize=True)
        try:
            kappa = cohens_kappa(pass1, pass2, axis)
        except ValueError:
            kappa = None  # degenerate p_e = 1 with imperfect agreement
        result[axis] = {
            "exact_agreement": exact_agreement(pass1, pass2, axis),
            "kappa": kappa,
            "labels": list(vocabulary(axis)),
            "matrix_raw": matrix.astype(int).tolist(),
            "matrix_normalized": normalized.tolist(),
            "n_items": int(matrix.sum()),
        }
    _emit(result, args.out)
    if args.outdir:
        from .plots import save_matrix_heatmap

        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        for axis in axes:
            labels = result[axis]["labels"]
            save_matrix_heatmap(
                result[axis]["matrix_normalized"],
                labels,
                outdir / f"agreement_{axis}.png",
                title=f"{axis} agreement (pass {args.p1} vs {args.p2})",
                normalized=True,
            )
            with open(outdir / f"agreement_{axis}.csv", "w", encoding="utf-8", newline="\n") as fh:
                fh.write("pass1\\pass2," + ",".join(labels) + "\n")
                for label, row in zip(labels, result[axis]["matrix_raw"]):
                    fh.write(label + "," + ",".join(str(v) for v in row) + "\n")
    return 0


def cmd_features(args) -> int:
    _, sources, windows = _corpus_sources(Path(args.corpus), args.L)
    encoder_id, registry = _build_encoder_from_args(args)

    if args.kind == "flow":
        preset = args.flow_preset or "F4"
        if preset not in FLOW_PRESETS:
            raise UsageError(f"unknown flow preset {preset!r}")
        k = args.K or FLOW_PRESETS[preset].k
        if args.K and args.flow_preset and args.K != FLOW_PRESETS[preset].k:
            raise UsageError(f"preset {preset} prescribes K={FLOW_PRESETS[preset].k}")
        spec: FeatureSpec | FusedSpec = FeatureSpec(kind="flow", k=k, flow_preset=preset)
    elif args.kind in ("clip", "clip_delta"):
        spec = FeatureSpec(kind=args.kind, k=args.K or 10, pooling=args.pool, encoder_id=encoder_id)
    elif args.kind == "fused":
        preset = args.flow_preset or "F4"
        if preset not in FLOW_PRESETS:
            raise UsageError(f"unknown flow preset {preset!r}")
        spec = FusedSpec(
            appearance=FeatureSpec(
                kind="clip_delta", k=args.K or 10, pooling=args.pool, encoder_id=encoder_id
            ),
            flow=FeatureSpec(kind="flow", k=FLOW_PRESETS[preset].k, flow_preset=preset),
        )
    else:
        raise UsageError(f"unknown feature kind {args.kind!r}")

    table = extract_features(sources, windows, spec, registry)
    spec_dict = spec.to_dict()
    if isinstance(spec, FusedSpec):
        spec_dict["appearance_dim"] = int(table.matrix.shape[1]) - 12
    embfile.write_features(args.out, table.matrix.astype(np.float32), table.keys, table.layout, spec_dict)

    if args.frames_out:
        if args.kind not in ("clip", "clip_delta", "fused"):
            raise UsageError("--frames-out only applies to appearance kinds")
        from .features.encoders import resolve_encoder

        encoder = resolve_encoder(encoder_id, registry)
        k = spec.appearance.k if isinstance(spec, FusedSpec) else spec.k
        matrix, mapping = extract_frame_embeddings(sources, windows, encoder, k)
        embfile.write_embeddings(args.frames_out, matrix.astype(np.float32), mapping)

    _emit(
        {
            "out": str(args.out),
            "rows": len(table.keys),
            "dim": int(table.matrix.shape[1]) if table.matrix.size else 0,
            "layout": table.layout,
            "skipped_keys": table.skipped_keys,
        },
        None,
    )
    return 0


def _split_fused_blocks(matrix: np.ndarray, spec_dict: dict) -> tuple[np.ndarray, np.ndarray]:
    appearance_dim = spec_dict.get("appearance_dim")
    if appearance_dim is None:
        appearance_dim = matrix.shape[1] - 12
    return matrix[:, :appearance_dim], matrix[:, appearance_dim:]


def cmd_train(args) -> int:
    matrix, keys, layout, spec_dict = embfile.read_features(args.features)
    if spec_dict is None:
        raise UsageError("feature file sidecar is missing its spec")
    store = _load_store(args.labels)
    axis = "context" if args.task == "context" else "activity"
    labels_by_key = {a.key: a for a in store.pass_rows(args.pass_id)}

    rows = []
    for i, key in enumerate(keys):
        ann = labels_by_key.get(key)
        if ann is None:
            continue
        if not args.include_transitions and ann.has_transition():
            continue
        rows.append((i, key, ann.label(axis)))
    if not rows:
        raise UsageError("no labeled rows to train on")

    train_rows, holdout_rows = rows, []
    split = None
    if args.test_fraction:
        from .corpus import parse_window_key

        video_ids = sorted({parse_window_key(key)[0] for _, key, _ in rows})
        split = video_level_split(video_ids, args.test_fraction, args.split_seed)
        train_rows = [r for r in rows if parse_window_key(r[1])[0] in split.train_video_ids]
        holdout_rows = [r for r in rows if parse_window_key(r[1])[0] in split.test_video_ids]
        if not train_rows:
            raise UsageError("split left no training rows")

    config = TrainConfig(
        l2_lambda=args.l2,
        max_iters=args.max_iters,
        grad_tolerance=args.tol,
        seed=args.split_seed,
        balance=args.balance,
    )
    class_order = list(vocabulary(axis))
    fusion_stats = None
    X_train = matrix[[i for i, _, _ in train_rows]].astype(np.float64)
    if spec_dict.get("kind") == "fused":
        app, flow = _split_fused_blocks(X_train, spec_dict)
        X_train, fusion_stats = fit_fusion(app, flow)
    y_train = [lab for _, _, lab in train_rows]
    clf = train_softmax(X_train, y_train, config, class_order=class_order)

    save_model(
        args.out,
        clf,
        feature_spec=spec_dict,
        feature_layout=layout,
        encoder_id=spec_dict.get("encoder_id") or (spec_dict.get("appearance") or {}).get("encoder_id"),
        fusion_stats=fusion_stats.to_dict() if fusion_stats else None,
    )

    summary = {
        "model": str(args.out),
        "task": args.task,
        "n_train": len(train_rows),
        "train_report": clf.train_report,
    }
    if holdout_rows:
        X_hold = matrix[[i for i, _, _ in holdout_rows]].astype(np.float64)
        if fusion_stats is not None:
            app, flow = _split_fused_blocks(X_hold, spec_dict)
            X_hold = fusion_stats.transform(app, flow)
        preds = clf.predict(X_hold)
        fallback = LOW_EVIDENCE_LABEL[axis]
        y_pred = [p.thresholded(args.tau, fallback) for p in preds]
        report = evaluate([lab for _, _, lab in holdout_rows], y_pred, class_order)
        summary["holdout"] = {"accuracy": report.accuracy, "macro_f1": report.macro_f1, "n_test": report.n_test}
        summary["split"] = split.to_dict()
    _emit(summary, None)
    return 0


def cmd_predict(args) -> int:
    bundle = load_model(args.model)
    matrix, keys, _, spec_dict = embfile.read_features(args.features)
    X = matrix.astype(np.float64)
    if bundle.feature_spec.get("kind") == "fused":
        if bundle.fusion_stats is None:
            raise UsageError("fused model lacks fusion stats")
        app, flow = _split_fused_blocks(X, spec_dict or bundle.feature_spec)
        X = FusionStats.from_dict(bundle.fusion_stats).transform(app, flow)
    axis = "context" if set(bundle.classifier.class_order) == set(CONTEXT_LABELS) else "activity"
    fallback = LOW_EVIDENCE_LABEL[axis]
    lines = []
    for key, pred in zip(keys, bundle.classifier.predict(X)):
        lines.append(
            json.dumps(
                {
                    "key": key,
                    "label": pred.label,
                    "score": round(pred.score, 4),
                    "thresholded_label": pred.thresholded(args.tau, fallback),
                },
                sort_keys=True,
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_timeline(args) -> int:
    record = probe_video(args.video)
    if record.readiness != READY:
        raise UsageError(f"video is not READY: {record.readiness}")
    source = open_source(args.video)
    ctx_bundle = load_model(args.ctx_model)
    act_bundle = load_model(args.act_model)
    registry = build_registry(json.loads(Path(args.encoders).read_text()) if args.encoders else {})
    records = generate_timeline(
        source,
        ctx_bundle,
        act_bundle,
        tau_ctx=args.tau_ctx,
        tau_act=args.tau_act,
        window_length_s=args.L,
        encoders=registry,
    )
    hashes = {"context": model_file_hash(args.ctx_model), "activity": model_file_hash(args.act_model)}
    out = args.out or f"{record.video_id}.timeline.jsonl"
    write_timeline_jsonl(out, records, record.video_id, args.L, run_id=args.run_id, model_hashes=hashes)
    _emit({"out": str(out), "records": len(records)}, None)
    return 0


def cmd_evaluate(args) -> int:
    store = _load_store(args.labels)
    axis = args.axis
    if args.timeline:
        _, records = read_timeline_jsonl(args.timeline)
        predictions = {r.window_id: (r.context if axis == "context" else r.activity) for r in records}
    elif args.pred:
        predictions = {}
        for line in Path(args.pred).read_text(encoding="utf-8").splitlines():
            if line.strip():
                obj = json.loads(line)
                predictions[obj["key"]] = obj["thresholded_label"]
    else:
        raise UsageError("evaluate needs --timeline or --pred")
    y_true, y_pred, excluded = clean_eval_pairs(store, predictions, axis, pass_id=args.pass_id)
    if not y_true:
        raise UsageError("no clean labeled windows overlap the predictions")
    report = evaluate(y_true, y_pred, vocabulary(axis), excluded_transition_windows=excluded)
    _emit(report.to_dict(), args.out)
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        write_confusion_csvs(report, outdir)
        from .plots import save_matrix_heatmap

        save_matrix_heatmap(
            report.confusion_normalized,
            report.label_space,
            outdir / "confusion.png",
            title=f"{axis} confusion (row-normalized)",
            xlabel="predicted",
            ylabel="true",
            normalized=True,
        )
    return 0


def cmd_grid(args) -> int:
    cfg = load_grid_config(args.config)
    _, sources, windows = _corpus_sources(cfg.corpus_root, cfg.window_length_s)
    store = _load_store(cfg.labels_path)
    registry = build_registry(cfg.encoders)
    train_config = TrainConfig(**cfg.train) if cfg.train else TrainConfig()
    results = run_experiment_grid(
        cfg.runs,
        sources,
        windows,
        store,
        split_seed=cfg.split_seed,
        test_fraction=cfg.test_fraction,
        encoders=registry,
        train_config=train_config,
        thresholds={"tau_ctx": cfg.tau_ctx, "tau_act": cfg.tau_act},
        out_dir=cfg.out_dir,
        include_transitions=cfg.include_transitions,
    )
    from .plots import save_matrix_heatmap, save_recurring_confusions

    summary = []
    for result in results:
        report = result.report
        summary.append(
            {
                "run_id": result.run_id,
                "task": report.extra["task"],
                "representation": report.extra["representation"],
                "accuracy": report.accuracy,
                "macro_f1": report.macro_f1,
                "n_test": report.n_test,
            }
        )
        save_matrix_heatmap(
            report.confusion_normalized,
            report.label_space,
            Path(cfg.out_dir) / result.run_id / "confusion.png",
            title=f"{result.run_id} confusion (row-normalized)",
            xlabel="predicted",
            ylabel="true",
            normalized=True,
        )
    for task in ("context", "activity"):
        task_reports = [r.report for r in results if r.report.extra["task"] == task]
        if len(task_reports) >= 1:
            ranked = recurring_confusions(task_reports)
            (Path(cfg.out_dir) / f"recurring_confusions_{task}.json").write_text(
                json.dumps(ranked, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            if ranked:
                save_recurring_confusions(
                    ranked,
                    Path(cfg.out_dir) / f"recurring_confusions_{task}.png",
                    title=f"recurring {task} confusions across runs",
                )
    (Path(cfg.out_dir) / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _emit(summary, args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = load_project_config(args.config)
    app = create_app(cfg)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_export(args) -> int:
    store = _load_store(args.labels)
    out = Path(args.out)
    if out.suffix == ".jsonl":
        export_jsonl(store, out)
    elif out.suffix == ".csv":
        export_csv(store, out)
    else:
        raise UsageError("export target must end in .csv or .jsonl")
    _emit({"out": str(out), "rows": len(store)}, None)
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vtimeline", description=__doc__)
    parser.add_argument("--version", action="version", version=f"vtimeline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", help="readiness-probe one video")
    p.add_argument("uri")
    p.add_argument("--out")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("windows", help="partition a video (or corpus) into fixed windows")
    p.add_argument("uri")
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--corpus", action="store_true", help="treat URI as a corpus root; emit a window inventory")
    p.add_argument("--out")
    p.set_defaults(func=cmd_windows)

    p = sub.add_parser("sample-plan", help="build the labeling sampling plan")
    p.add_argument("uri")
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--kcov", type=int, required=True)
    p.add_argument("--krand", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample_plan)

    p = sub.add_parser("audit", help="run the dataset audit suite over a label store")
    p.add_argument("--labels", required=True)
    p.add_argument("--inventory", required=True)
    p.add_argument("--pass", dest="pass_id", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--outdir", help="also write report.json, CSV tables, and figures here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("agreement", help="inter-pass agreement statistics")
    p.add_argument("--labels", required=True)
    p.add_argument("--p1", type=int, default=1)
    p.add_argument("--p2", type=int, default=2)
    p.add_argument("--axis", choices=["context", "activity", "both"], default="both")
    p.add_argument("--out")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("features", help="extract per-window feature files")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", choices=["clip", "clip_delta", "flow", "fused"], required=True)
    p.add_argument("--K", type=int)
    p.add_argument("--pool", choices=["mean", "max"], default="mean")
    p.add_argument("--flow-preset", choices=sorted(FLOW_PRESETS))
    p.add_argument("--encoder", default="test-hash-64")
    p.add_argument("--encoder-dim", type=int)
    p.add_argument("--encoder-file", help="EMB1 file of precomputed frame embeddings")
    p.add_argument("--encoder-url", help="HTTP encoder sidecar endpoint")
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.add_argument("--frames-out", help="also dump raw per-frame embeddings (EMB1)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train a context or activity classifier")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--task", choices=["context", "activity"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pass", dest="pass_id", type=int, default=1)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--balance", choices=["NONE", "INVERSE_FREQ"], default="NONE")
    p.add_argument("--include-transitions", action="store_true")
    p.add_argument("--test-fraction", type=float, help="hold out videos and report metrics")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=0.0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a model to a feature file")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("timeline", help="generate the window-level visual timeline")
    p.add_argument("--video", required=True)
    p.add_argument("--ctx-model", required=True)
    p.add_argument("--act-model", required=True)
    p.add_argument("--tau-ctx", type=float, default=0.0)
    p.add_argument("--tau-act", type=float, default=0.0)
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--run-id")
    p.add_argument("--encoders", help="JSON file mapping encoder ids to registry specs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_timeline)

    p = sub.add_parser("evaluate", help="score predictions against clean labeled windows")
    p.add_argument("--labels", required=True)
    p.add_argument("--timeline", help="timeline JSONL to evaluate")
    p.add_argument("--pred", help="predictions JSONL from `predict`")
    p.add_argument("--axis", choices=["context", "activity"], required=True)
    p.add_argument("--pass", dest="pass_id", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid", help="run the experiment grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("serve", help="start the annotation/review HTTP service")
    p.add_argument("--config", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="canonical label-store export (.csv or .jsonl)")
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 1
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
