"""Command-line interface: ``polyroof-eval <analyze|split|evaluate|histogram>``.

Exit codes are a stable contract: 0 on success, 2 for usage/parse problems,
3 for domain/validation failures. Outputs are deterministic: summary CSVs
round to 2 decimals, JSON files carry full precision, and reruns with
identical inputs and flags are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from statistics import fmean

import numpy as np

from . import complexity, metrics
from .errors import PolyroofError, SceneParseError
from .sceneio import SceneDocument, parse_scene

SUMMARY_FEATURE_COLUMNS = [
    "Num. Vertices",
    "Point Degree",
    "Convexity",
    "Compactness",
    "PCA Score",
]
EVAL_SUMMARY_COLUMNS = [
    "Configuration",
    "Scenes",
    "Point Pos. Acc.",
    "Line Dist. Acc.",
    "Building F1-Score",
    "Roof F1-Score",
    "Recon Score",
    "Recon Score (Macro)",
]
BUILDING_CSV_COLUMNS = [
    "scene_id",
    "building_id",
    "num_vertices",
    "point_degree",
    "convexity",
    "compactness",
    "pca_score",
    "dataset",
]


def _fail(code: int, message: str) -> int:
    print(f"polyroof-eval: error: {message}", file=sys.stderr)
    return code


def _scene_paths(raw: str) -> list[Path]:
    p = Path(raw)
    if p.is_dir():
        return sorted(p.glob("*.json"))
    if p.is_file():
        return [p]
    raise SceneParseError(raw, "no such file or directory")


def _load_scenes(paths: list[str]) -> list[SceneDocument]:
    docs = []
    seen: dict[str, str] = {}
    for raw in paths:
        for path in _scene_paths(raw):
            doc = parse_scene(path)
            if doc.scene_id in seen:
                raise SceneParseError(
                    str(path), f"duplicate scene_id '{doc.scene_id}' (already in {seen[doc.scene_id]})"
                )
            seen[doc.scene_id] = str(path)
            docs.append(doc)
    return docs


def _json_dump(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------- analyze


def _cmd_analyze(args) -> int:
    groups: list[tuple[str, list[str]]] = []
    if args.inputs:
        groups.append((args.label, args.inputs))
    for spec in args.set or []:
        label, _, paths = spec.partition("=")
        if not label or not paths:
            return _fail(2, f"--set expects LABEL=PATH[,PATH...], got {spec!r}")
        groups.append((label, paths.split(",")))
    if not groups:
        return _fail(2, "no inputs given (positional paths or --set LABEL=PATH)")

    records_by_label: dict[str, list[complexity.ComplexityRecord]] = {}
    for label, paths in groups:
        bucket = records_by_label.setdefault(label, [])
        for doc in _load_scenes(paths):
            wf = doc.to_wireframe()
            for building in doc.to_buildings():
                bucket.append(complexity.featurize(building, wf, scene_id=doc.scene_id))

    models: dict[str, complexity.PcaModel] = {}
    if args.fit_pca:
        if args.pca_scope == "joint":
            model = complexity.fit_pca([r for rs in records_by_label.values() for r in rs])
            models = {label: model for label in records_by_label}
        else:
            models = {label: complexity.fit_pca(rs) for label, rs in records_by_label.items()}
        records_by_label = {
            label: complexity.score_records(models[label], rs)
            for label, rs in records_by_label.items()
        }

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for label in sorted(records_by_label):
        for r in sorted(records_by_label[label], key=lambda r: (r.scene_id, r.building_id)):
            rows.append(
                [
                    r.scene_id,
                    r.building_id,
                    r.num_vertices,
                    repr(r.point_degree),
                    repr(r.convexity),
                    repr(r.compactness),
                    "" if r.pca_score is None else repr(r.pca_score),
                    label,
                ]
            )
    _write_csv(out_dir / "complexity_buildings.csv", BUILDING_CSV_COLUMNS, rows)

    summary_rows = []
    for label in sorted(records_by_label):
        rs = records_by_label[label]
        summary_rows.append(
            [
                label,
                f"{fmean(r.num_vertices for r in rs):.2f}",
                f"{fmean(r.point_degree for r in rs):.2f}",
                f"{fmean(r.convexity for r in rs):.2f}",
                f"{fmean(r.compactness for r in rs):.2f}",
                f"{fmean(r.pca_score for r in rs):.2f}" if args.fit_pca else "",
            ]
        )
    _write_csv(
        out_dir / "complexity_summary.csv", ["dataset"] + SUMMARY_FEATURE_COLUMNS, summary_rows
    )

    if args.fit_pca:
        payload = {label: model.to_dict() for label, model in models.items()}
        if args.pca_scope == "joint":
            payload = {"scope": "joint", "model": next(iter(models.values())).to_dict()}
        else:
            payload = {"scope": "per-dataset", "models": payload}
        _json_dump(payload, out_dir / "pca_model.json")

    n = sum(len(rs) for rs in records_by_label.values())
    print(f"analyzed {n} buildings across {len(records_by_label)} dataset(s) -> {out_dir}")
    return 0


# ---------------------------------------------------------------- split


def _read_analysis_csv(path: str) -> list[dict]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise SceneParseError(path, "empty analysis file")
            rows = list(reader)
    except OSError as exc:
        raise SceneParseError(path, str(exc)) from exc
    if not rows:
        raise SceneParseError(path, "analysis file has no rows")
    return rows


def _records_from_rows(rows: list[dict], path: str) -> list[complexity.ComplexityRecord]:
    required = set(BUILDING_CSV_COLUMNS[:7])
    missing = required - set(rows[0])
    if missing:
        raise SceneParseError(path, f"analysis file is missing columns: {sorted(missing)}")
    records = []
    for row in rows:
        if not row["pca_score"]:
            raise SceneParseError(
                path, "analysis file is not scored (empty pca_score); rerun analyze with --fit-pca"
            )
        records.append(
            complexity.ComplexityRecord(
                scene_id=row["scene_id"],
                building_id=row["building_id"],
                num_vertices=int(row["num_vertices"]),
                point_degree=float(row["point_degree"]),
                convexity=float(row["convexity"]),
                compactness=float(row["compactness"]),
                pca_score=float(row["pca_score"]),
            )
        )
    return records


def _ratios_arg(raw: str) -> tuple[float, float, float]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated ratios (train,val,test), got {len(parts)}"
        )
    try:
        ratios = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return ratios  # validated further by stratified_split


def _cmd_split(args) -> int:
    rows = _read_analysis_csv(args.analysis)
    records = _records_from_rows(rows, args.analysis)
    manifest = complexity.stratified_split(
        records, ratios=args.ratios, bins=args.bins, seed=args.seed
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _json_dump(manifest.to_dict(), out)
    print(
        f"split {len(manifest.train) + len(manifest.val) + len(manifest.test)} scenes -> "
        f"{len(manifest.train)}/{len(manifest.val)}/{len(manifest.test)} ({out})"
    )
    return 0


# ---------------------------------------------------------------- evaluate


def _fmt2(value) -> str:
    return "" if value is None else f"{value:.2f}"


def _cmd_evaluate(args) -> int:
    gt_docs = {d.scene_id: d for d in _load_scenes(args.gt)}
    pred_docs = {d.scene_id: d for d in _load_scenes(args.pred)}
    missing_pred = sorted(set(gt_docs) - set(pred_docs))
    missing_gt = sorted(set(pred_docs) - set(gt_docs))
    if missing_pred or missing_gt:
        parts = []
        if missing_pred:
            parts.append(f"scene_ids missing from --pred: {', '.join(missing_pred)}")
        if missing_gt:
            parts.append(f"scene_ids missing from --gt: {', '.join(missing_gt)}")
        return _fail(2, "; ".join(parts))

    cfg = metrics.EvalConfig(
        iou_threshold=args.iou_threshold,
        point_radius=args.point_radius,
        densify_step=args.densify,
    )
    scene_ids = sorted(gt_docs)

    def run(scene_id: str) -> metrics.EvalReport:
        return metrics.evaluate_scene(
            gt_docs[scene_id].to_buildings(),
            pred_docs[scene_id].to_buildings(),
            cfg,
            scene_id=scene_id,
        )

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(run, scene_ids))
    else:
        reports = [run(s) for s in scene_ids]

    out_dir = Path(args.out_dir)
    report_dir = out_dir / "reports"
    report_dir.mkdir(parents=True, exist_ok=True)
    for report in reports:
        _json_dump(report.to_dict(), report_dir / f"{report.scene_id}.json")

    summary = metrics.aggregate_reports(reports)
    _json_dump(
        {"configuration": args.label, "config": vars(cfg).copy(), **summary},
        out_dir / "summary.json",
    )
    micro, macro = summary["micro"], summary["macro"]
    _write_csv(
        out_dir / "summary.csv",
        EVAL_SUMMARY_COLUMNS,
        [
            [
                args.label,
                summary["n_scenes"],
                _fmt2(micro["point_pos_acc"]),
                _fmt2(micro["line_dist_acc"]),
                _fmt2(micro["building_f1"]),
                _fmt2(micro["roof_f1"]),
                _fmt2(micro["reconstruction_score"]),
                _fmt2(macro["reconstruction_score"]),
            ]
        ],
    )
    print(
        f"evaluated {summary['n_scenes']} scenes: "
        f"point {_fmt2(micro['point_pos_acc'])} px, "
        f"line {_fmt2(micro['line_dist_acc']) or 'n/a'} px, "
        f"building F1 {_fmt2(micro['building_f1'])}, roof F1 {_fmt2(micro['roof_f1'])}, "
        f"recon {_fmt2(micro['reconstruction_score'])} -> {out_dir}"
    )
    return 0


# ---------------------------------------------------------------- histogram


def _cmd_histogram(args) -> int:
    rows = _read_analysis_csv(args.analysis)
    if "pca_score" not in rows[0]:
        raise SceneParseError(args.analysis, "analysis file has no pca_score column")
    label_col = "dataset" if "dataset" in rows[0] else None

    by_label: dict[str, list[float]] = {}
    for row in rows:
        if not row["pca_score"]:
            continue
        label = row[label_col] if label_col else "all"
        by_label.setdefault(label, []).append(float(row["pca_score"]))
    if not by_label:
        raise PolyroofError("analysis file has no scored rows")

    if args.per_scene:
        for label, _ in list(by_label.items()):
            per_scene: dict[str, list[float]] = {}
            for row in rows:
                if row["pca_score"] and (not label_col or row[label_col] == label):
                    per_scene.setdefault(row["scene_id"], []).append(float(row["pca_score"]))
            by_label[label] = [sum(v) / len(v) for _, v in sorted(per_scene.items())]

    labels = sorted(by_label)
    lo = min(min(v) for v in by_label.values())
    hi = max(max(v) for v in by_label.values())
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, args.bins + 1)
    table_rows = []
    counts = {
        label: np.histogram(np.asarray(by_label[label]), bins=edges)[0] for label in labels
    }
    for k in range(args.bins):
        table_rows.append(
            [repr(float(edges[k])), repr(float(edges[k + 1]))]
            + [int(counts[label][k]) for label in labels]
        )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, ["bin_lo", "bin_hi"] + labels, table_rows)
    print(f"histogram of {sum(len(v) for v in by_label.values())} scores -> {out}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyroof-eval",
        description="Geometric complexity analysis and evaluation metrics for roof-vector predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="per-building complexity features and PCA scores")
    p.add_argument("inputs", nargs="*", help="scene JSON files or directories")
    p.add_argument("--label", default="all", help="dataset label for the positional inputs")
    p.add_argument(
        "--set",
        action="append",
        metavar="LABEL=PATH[,PATH...]",
        help="additional labeled dataset (repeatable)",
    )
    p.add_argument("--fit-pca", action="store_true", help="fit the PCA and emit scores")
    p.add_argument("--pca-scope", choices=["joint", "per-dataset"], default="joint")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("split", help="PCA-balanced train/val/test split of analyzed scenes")
    p.add_argument("analysis", help="complexity_buildings.csv from analyze --fit-pca")
    p.add_argument("--ratios", type=_ratios_arg, default=(0.7, 0.15, 0.15))
    p.add_argument("--bins", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default="split_manifest.json")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("evaluate", help="score predicted scenes against ground truth")
    p.add_argument("--gt", nargs="+", required=True, help="ground-truth scene files/dirs")
    p.add_argument("--pred", nargs="+", required=True, help="predicted scene files/dirs")
    p.add_argument("--iou-threshold", type=float, default=0.5)
    p.add_argument("--point-radius", type=float, default=5.0)
    p.add_argument("--densify", type=float, default=None, metavar="STEP_PX")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--label", default="evaluation", help="configuration label in the summary")
    p.add_argument("--out-dir", "--out", dest="out_dir", default=".")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("histogram", help="PCA-score histogram CSV for plotting")
    p.add_argument("analysis", help="complexity_buildings.csv with pca_score column")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--per-scene", action="store_true", help="histogram scene means, not buildings")
    p.add_argument("--out", default="histogram.csv")
    p.set_defaults(func=_cmd_histogram)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SceneParseError as exc:
        return _fail(2, str(exc))
    except PolyroofError as exc:
        return _fail(3, str(exc))


if __name__ == "__main__":
    sys.exit(main())
