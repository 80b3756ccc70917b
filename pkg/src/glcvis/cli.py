"""Command-line interface: every library operation, scriptable.

Conventions: `--json` switches stdout to machine-readable JSON (sorted keys,
so output is byte-reproducible); `--out` writes the primary artifact (SVG,
model JSON, image) to a file. Operation failures exit 1 with a structured
message on stderr; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import coords, cpcr, glcl, jl, rules
from .config import Config, load_config
from .dataset import (
    Dataset,
    DatasetError,
    denormalize,
    load_csv,
    normalize,
    serialize_csv,
)
from .render import RenderSpec, render_arrow_field, render_glc_l, render_graphs, render_rule_overlay

KNOWN_ERRORS = (
    DatasetError,
    coords.CoordsError,
    glcl.ModelError,
    rules.RuleError,
    jl.BoundsError,
    cpcr.CpcrError,
)


def _emit(obj: dict, args: argparse.Namespace, human: str | None = None) -> None:
    if getattr(args, "json", False):
        print(json.dumps(obj, sort_keys=True))
    else:
        print(human if human is not None else json.dumps(obj, sort_keys=True, indent=2))


def _write_out(args: argparse.Namespace, content: str) -> None:
    if args.out:
        Path(args.out).write_text(content)


def _load(args: argparse.Namespace) -> Dataset:
    label: str | int = args.label_column
    if isinstance(label, str) and label.lstrip("-").isdigit():
        label = int(label)
    return load_csv(Path(args.input), label_column=label, delimiter=args.delimiter)


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--label-column", default="class", help="label column name or index")
    p.add_argument("--delimiter", default=",")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", default=None, help="write the primary artifact here")
    p.add_argument("--json", action="store_true", help="machine output on stdout")


def _parse_pairing(text: str | None):
    if not text:
        return None
    return tuple(
        tuple(int(v) for v in chunk.split(",")) for chunk in text.split(";") if chunk
    )


def _parse_offsets(text: str | None):
    if not text:
        return None
    rows = [chunk.split(",") for chunk in text.split(";") if chunk]
    if all(len(r) == 2 for r in rows):
        return np.array([[float(a), float(b)] for a, b in rows])
    return np.array([float(v) for row in rows for v in row])


def _seed_of(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    cfg = load_config(args.config) if args.config else Config()
    return cfg.default_seed


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args: argparse.Namespace) -> int:
    d = _load(args)
    norm, spec = normalize(d)
    summary = {
        "attributes": [
            {"name": a.name, "min": a.observed_min, "max": a.observed_max}
            for a in d.attributes
        ],
        "n_rows": d.n_rows,
        "classes": list(d.class_set),
        "class_counts": d.class_counts(),
        "dropped_rows": d.dropped_rows,
        "normalization": spec.to_json(),
    }
    _write_out(args, serialize_csv(d))
    human = (
        f"{d.n_rows} rows, {d.n_attributes} attributes, "
        f"classes {list(d.class_set)}; dropped {d.dropped_rows} rows with missing cells"
    )
    _emit(summary, args, human)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    d = _load(args)
    working = d
    if not args.raw:
        working, _ = normalize(d)
    if args.system == "glcl":
        model = glcl.LinearModel.from_json(json.loads(Path(args.model).read_text()))
        svg = render_glc_l(working, model)
    else:
        pairing = _parse_pairing(args.pairing)
        offsets = _parse_offsets(args.offsets)
        angles = (
            np.array([float(v) for v in args.angles.split(",")])
            if args.angles
            else None
        )
        graphs = [
            coords.encode(args.system, row, pairing=pairing, offsets=offsets, angles=angles)
            for row in working.rows
        ]
        svg = render_graphs(graphs, list(working.labels))
        if args.rule:
            rule = rules.RectRule.from_json(json.loads(Path(args.rule).read_text())["rule"])
            svg = render_rule_overlay(svg, rule)
    _write_out(args, svg)
    if not args.out:
        print(svg)
    elif args.json:
        print(json.dumps({"out": args.out, "bytes": len(svg)}, sort_keys=True))
    return 0


def cmd_train_glcl(args: argparse.Namespace) -> int:
    d = _load(args)
    norm, _ = normalize(d)
    cfg = glcl.TrainConfig(
        restarts=args.restarts, max_iters=args.max_iters, seed=_seed_of(args)
    )
    result = glcl.train(
        norm,
        positive_class=args.positive_class,
        negative_class=args.negative_class,
        cfg=cfg,
    )
    payload = {"model": result.model.to_json(), "accuracy": result.accuracy}
    _write_out(args, json.dumps(payload["model"], sort_keys=True, indent=2))
    _emit(
        payload,
        args,
        f"training accuracy {result.accuracy:.4f} "
        f"(positive {result.model.positive_class!r}, threshold {result.model.threshold:.6f})",
    )
    return 0


def cmd_prune(args: argparse.Namespace) -> int:
    d = _load(args)
    norm, _ = normalize(d)
    model = glcl.LinearModel.from_json(json.loads(Path(args.model).read_text()))
    cfg = glcl.TrainConfig(
        restarts=args.restarts, max_iters=args.max_iters, seed=_seed_of(args)
    )
    pruned, report = glcl.prune_and_refit(model, norm, eps=args.eps, cfg=cfg)
    payload = {"model": pruned.to_json(), "report": report.to_json()}
    _write_out(args, json.dumps(payload["model"], sort_keys=True, indent=2))
    _emit(
        payload,
        args,
        f"removed {list(report.removed)}; accuracy {report.accuracy_before:.4f} "
        f"-> {report.accuracy_after:.4f}",
    )
    return 0


def cmd_fsp(args: argparse.Namespace) -> int:
    d = _load(args)
    norm, spec = normalize(d)
    cfg = rules.FspConfig(
        seed=_seed_of(args),
        max_pairings=args.max_pairings,
        keep=args.keep,
        quantiles=args.quantiles,
        max_clauses=args.max_clauses,
    )
    result = rules.fsp_search(norm, cfg)
    payload = {
        "pairing": [list(p) for p in result.pairing],
        "rule": result.rule.to_json(),
        "accuracy": result.report.accuracy,
        "report": result.report.to_json(),
        "text": result.rule.describe(norm.attribute_names, result.pairing),
    }
    _write_out(
        args,
        json.dumps(
            {"rule": payload["rule"], "pairing": payload["pairing"]},
            sort_keys=True,
            indent=2,
        ),
    )
    _emit(
        payload,
        args,
        f"{payload['text']}\naccuracy {result.report.accuracy:.4f} "
        f"({result.report.correct}/{result.report.total})",
    )
    return 0


def cmd_steps(args: argparse.Namespace) -> int:
    boundary = (args.a, args.b, args.c)
    domain = (args.domain[0], args.domain[1])
    rule = rules.linear_to_steps(
        boundary,
        domain,
        args.resolution,
        class_pos=args.class_pos,
        class_neg=args.class_neg,
    )
    payload: dict = {"rule": rule.to_json()}
    human_lines = []
    if isinstance(rule, rules.StepRuleSet):
        for s in rule.steps:
            closer = "<=" if s.closed_right else "<"
            human_lines.append(
                f"if {s.lo:g} <= x1 {closer} {s.hi:g}: boundary height {s.height:g}"
            )
        sensitivity = rules.sensitivity_report(rule, args.unit_x, args.unit_y)
        payload["sensitivity"] = [s.to_json() for s in sensitivity]
        if args.unit_x or args.unit_y:
            for i, s in enumerate(sensitivity):
                human_lines.append(
                    f"step {i}: length {s.step_length:g}"
                    + (f" = {s.length_units:g} units" if s.length_units is not None else "")
                    + f", riser {s.riser_height:g}"
                    + (f" = {s.height_units:g} units" if s.height_units is not None else "")
                )
    if args.case:
        case = (args.case[0], args.case[1])
        case_rule = rules.rule_for_case(
            case, boundary, domain, args.resolution, args.class_pos, args.class_neg
        )
        payload["case"] = {"predicted": case_rule.predicted, "text": case_rule.text}
        human_lines.append(case_rule.text)
    _write_out(args, json.dumps(payload, sort_keys=True, indent=2))
    _emit(payload, args, "\n".join(human_lines) or json.dumps(payload, indent=2))
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    d = _load(args)
    norm, _ = normalize(d)
    model = glcl.LinearModel.from_json(json.loads(Path(args.model).read_text()))
    diff = glcl.explain_misclassified(
        norm.rows[args.row], norm.labels[args.row], norm, model, k=args.k
    )
    payload = {"diff": diff.to_json()}
    changed_attrs = [
        [d.attributes[i].name for i, c in enumerate(row) if c]
        for row in diff.changed
    ]
    _write_out(args, json.dumps(payload, sort_keys=True, indent=2))
    _emit(
        payload,
        args,
        f"row {args.row} predicted {diff.predicted_class!r}, true {diff.true_class!r}; "
        f"nearest correct rows {list(diff.neighbor_rows)}; changed attributes {changed_attrs}",
    )
    return 0


def cmd_jl(args: argparse.Namespace) -> int:
    if args.jl_op == "min-dim":
        est = jl.min_dimension(args.m, args.eps)
        _emit({"k_min": est.k_min}, args, f"k_min = {est.k_min}")
        return 0
    if args.jl_op == "max-points":
        m = jl.max_points(args.k, args.eps)
        _emit({"max_points": m}, args, f"max points = {m}")
        return 0
    if args.jl_op == "table":
        ms = [int(v) for v in args.m.split(",")]
        epss = [float(v) for v in args.eps.split(",")]
        rows = [
            jl.min_dimension(m, eps).to_json() for m in ms for eps in epss
        ]
        lines = ["      m     eps    k_min"]
        lines += [f"{r['m']:7d} {r['epsilon']:7.3f} {r['k_min']:8d}" for r in rows]
        _emit({"table": rows}, args, "\n".join(lines))
        return 0
    # verify
    d = load_csv(Path(args.input), label_column=args.label_column) if args.label_column else None
    if d is not None:
        points = d.rows
    else:
        rows = [
            [float(v) for v in line.split(",")]
            for line in Path(args.input).read_text().strip().splitlines()[1:]
        ]
        points = np.array(rows)
    report = jl.verify_random_projection(
        points, eps=args.eps, trials=args.trials, seed=_seed_of(args), k=args.k
    )
    payload = report.to_json()
    _write_out(args, json.dumps(payload, sort_keys=True, indent=2))
    _emit(
        payload,
        args,
        f"k_used={report.k_used} success={report.success} "
        f"best deviation {min(report.max_deviation_per_trial):.4f} (eps={args.eps})",
    )
    return 0


def cmd_cpcr(args: argparse.Namespace) -> int:
    if args.cpcr_op == "encode":
        levels = [int(v) for v in args.point.split(",")]
        img = cpcr.encode_cpcr(levels, grid_size=args.grid, cell_size=args.cell_size)
        if args.out:
            out = Path(args.out)
            if out.suffix == ".png":
                cpcr.write_png(cpcr.display_gray(img), out)
            else:
                cpcr.write_pgm(cpcr.display_gray(img), out)
            cpcr.write_sidecar(img, out.with_suffix(out.suffix + ".json"))
        _emit(
            img.to_json(),
            args,
            f"{img.pair_count} cells on a {img.grid_size}x{img.grid_size} grid; "
            f"{len(img.collisions)} collision(s)",
        )
        return 0
    if args.cpcr_op == "decode":
        img = cpcr.read_sidecar(Path(args.sidecar))
        vector = cpcr.decode_cpcr(img)
        payload = {"vector": [float(v) for v in vector]}
        _emit(payload, args, ",".join(f"{v:g}" for v in vector))
        return 0
    if args.cpcr_op == "export":
        d = _load(args)
        manifest = cpcr.export_dataset(
            d,
            args.out or "./cpcr-images",
            grid_size=args.grid,
            cell_size=args.cell_size,
            image_format=args.format,
        )
        counts = {cls: len(paths) for cls, paths in manifest.items()}
        _emit(
            {"out": args.out or "./cpcr-images", "counts": counts},
            args,
            f"wrote {sum(counts.values())} images: {counts}",
        )
        return 0
    # composite
    d = _load(args)
    classes = tuple(args.classes.split(","))
    if len(classes) != 2:
        raise cpcr.CpcrError("composite needs exactly two classes, comma-separated")
    composite = cpcr.mean_class_composite(
        d,
        classes,  # type: ignore[arg-type]
        grid_size=args.grid,
        target_row=args.target_row,
        gutter=args.gutter,
    )
    if args.out:
        out = Path(args.out)
        rgb = composite.rgb()
        if out.suffix == ".png":
            cpcr.write_png(rgb, out)
        else:
            cpcr.write_ppm(rgb, out)
    _emit(
        {
            "left_class": composite.left_class,
            "right_class": composite.right_class,
            "width_cells": 2 * composite.grid_size + composite.gutter,
        },
        args,
        f"composite {composite.left_class} | {composite.right_class} written",
    )
    return 0


def cmd_distortion(args: argparse.Namespace) -> int:
    def load_matrix(path: str) -> np.ndarray:
        lines = Path(path).read_text().strip().splitlines()
        return np.array(
            [[float(v) for v in line.split(",")] for line in lines[1:]]
        )

    report = coords.mapping_distortion(load_matrix(args.high), load_matrix(args.low))
    payload = report.to_json()
    _write_out(args, json.dumps(payload, sort_keys=True, indent=2))
    _emit(
        payload,
        args,
        f"ratio range [{report.min_ratio:.6f}, {report.max_ratio:.6f}], "
        f"stress {report.mean_stress:.6f} over {report.pair_count} pairs",
    )
    return 0


def cmd_arrows(args: argparse.Namespace) -> int:
    lines = Path(args.input).read_text().strip().splitlines()
    series = [tuple(float(v) for v in line.split(",")[:2]) for line in lines[1:]]
    field = rules.build_arrow_field(series)
    grid = rules.arrow_dominance(
        field,
        cell_size=(args.cell_size, args.cell_size),
        threshold=args.threshold,
    )
    payload = {"field": field.to_json(), "dominance": grid.to_json()}
    if args.out:
        svg = render_arrow_field(
            field,
            flagged_cells=grid.flagged,
            origin=grid.origin,
            cell_size=grid.cell_size,
        )
        Path(args.out).write_text(svg)
    _emit(
        payload,
        args,
        f"{len(field.arrows)} arrows; flagged cells {[list(c) for c in grid.flagged]}",
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    overrides = {
        "host": args.host,
        "port": args.port,
        "sessions_dir": args.sessions_dir,
        "default_seed": args.seed,
    }
    config = load_config(args.config, overrides={k: v for k, v in overrides.items() if v is not None})
    serve(config)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glcvis",
        description="lossless multidimensional visualization and rule discovery",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, validate and summarize a CSV")
    _add_dataset_args(p)
    _add_common(p)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("render", help="render a dataset in a coordinate system")
    _add_dataset_args(p)
    _add_common(p)
    p.add_argument("--system", required=True, choices=list(coords.SYSTEMS) + ["glcl"])
    p.add_argument("--pairing", default=None, help='e.g. "0,1;2,3;4,5"')
    p.add_argument("--offsets", default=None, help='spc "x,y;x,y" or inline "x;x;x"')
    p.add_argument("--angles", default=None, help='stars, radians "a,a,a"')
    p.add_argument("--model", default=None, help="model JSON (for --system glcl)")
    p.add_argument("--rule", default=None, help="rule JSON to overlay (spc)")
    p.add_argument("--raw", action="store_true", help="skip normalization")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("train-glcl", help="fit the stacked-vector linear classifier")
    _add_dataset_args(p)
    _add_common(p)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=60)
    p.add_argument("--positive-class", default=None)
    p.add_argument("--negative-class", default=None)
    p.set_defaults(fn=cmd_train_glcl)

    p = sub.add_parser("prune", help="drop weak attributes and refit")
    _add_dataset_args(p)
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=60)
    p.set_defaults(fn=cmd_prune)

    p = sub.add_parser("fsp", help="search rectangle rules over pair planes")
    _add_dataset_args(p)
    _add_common(p)
    p.add_argument("--max-pairings", type=int, default=1000)
    p.add_argument("--keep", type=int, default=12)
    p.add_argument("--quantiles", type=int, default=10)
    p.add_argument("--max-clauses", type=int, default=3)
    p.set_defaults(fn=cmd_fsp)

    p = sub.add_parser("steps", help="interpolate a 2-D linear boundary by interval rules")
    _add_common(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--domain", type=float, nargs=2, required=True)
    p.add_argument("--resolution", type=float, required=True)
    p.add_argument("--case", type=float, nargs=2, default=None)
    p.add_argument("--class-pos", default="class1")
    p.add_argument("--class-neg", default="class2")
    p.add_argument("--unit-x", type=float, default=None, help="insensitivity unit, first attribute")
    p.add_argument("--unit-y", type=float, default=None, help="insensitivity unit, second attribute")
    p.set_defaults(fn=cmd_steps)

    p = sub.add_parser("explain", help="nearest correct cases for a misclassified row")
    _add_dataset_args(p)
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("jl", help="distance-preservation dimension bounds")
    jl_sub = p.add_subparsers(dest="jl_op", required=True)
    q = jl_sub.add_parser("min-dim")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    _add_common(q)
    q.set_defaults(fn=cmd_jl)
    q = jl_sub.add_parser("max-points")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    _add_common(q)
    q.set_defaults(fn=cmd_jl)
    q = jl_sub.add_parser("table")
    q.add_argument("--m", required=True, help='comma list, e.g. "10,300"')
    q.add_argument("--eps", required=True, help='comma list, e.g. "0.3,0.5"')
    _add_common(q)
    q.set_defaults(fn=cmd_jl)
    q = jl_sub.add_parser("verify")
    q.add_argument("--input", required=True)
    q.add_argument("--label-column", default=None)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--trials", type=int, default=20)
    q.add_argument("--k", type=int, default=None)
    _add_common(q)
    q.set_defaults(fn=cmd_jl)

    p = sub.add_parser("cpcr", help="order-encoded cell images")
    cp_sub = p.add_subparsers(dest="cpcr_op", required=True)
    q = cp_sub.add_parser("encode")
    q.add_argument("--point", required=True, help='integer levels "8,10,10,..."')
    q.add_argument("--grid", type=int, default=10)
    q.add_argument("--cell-size", type=int, default=1)
    _add_common(q)
    q.set_defaults(fn=cmd_cpcr)
    q = cp_sub.add_parser("decode")
    q.add_argument("--sidecar", required=True)
    _add_common(q)
    q.set_defaults(fn=cmd_cpcr)
    q = cp_sub.add_parser("export")
    _add_dataset_args(q)
    q.add_argument("--grid", type=int, default=10)
    q.add_argument("--cell-size", type=int, default=1)
    q.add_argument("--format", choices=["pgm", "png"], default="pgm")
    _add_common(q)
    q.set_defaults(fn=cmd_cpcr)
    q = cp_sub.add_parser("composite")
    _add_dataset_args(q)
    q.add_argument("--classes", required=True, help='two classes "benign,malignant"')
    q.add_argument("--grid", type=int, default=10)
    q.add_argument("--target-row", type=int, default=None)
    q.add_argument("--gutter", type=int, default=1)
    _add_common(q)
    q.set_defaults(fn=cmd_cpcr)

    p = sub.add_parser("distortion", help="squared-distance ratios of a mapping")
    p.add_argument("--high", required=True, help="CSV of original points (header row)")
    p.add_argument("--low", required=True, help="CSV of mapped points (header row)")
    _add_common(p)
    p.set_defaults(fn=cmd_distortion)

    p = sub.add_parser("arrows", help="time-series arrow field and cell dominance")
    p.add_argument("--input", required=True, help="CSV with state,outcome columns")
    p.add_argument("--cell-size", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.9)
    _add_common(p)
    p.set_defaults(fn=cmd_arrows)

    p = sub.add_parser("serve", help="start the HTTP JSON service")
    _add_common(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--sessions-dir", default=None)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except KNOWN_ERRORS as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1
    except FileNotFoundError as exc:
        sys.stderr.write(
            json.dumps({"error": "FileNotFoundError", "message": str(exc)}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
