"""Command-line front end.

Subcommands: gen-data, cluster, voronoi, quantize, experiment.
Exit codes: 0 success, 2 usage error, 3 domain/data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import evaluation, quantization, voronoi
from .dataset import PointSet, save_assignments_csv
from .errors import DomainError, NumericalError
from .generators import GENERATOR_NAMES, Generator, make_generator
from .evaluation import METHODS


def _parse_bbox(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("bbox must be x_lo,x_hi,y_lo,y_hi")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bbox is not numeric: {text!r}") from None


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("size must be WIDTHxHEIGHT, e.g. 512x512")
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"size is not numeric: {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("size must be at least 1x1")
    return w, h


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers: {text!r}") from None


def _load_spec(path: str | None, seed: int | None) -> evaluation.SyntheticSpec:
    if path is None:
        return evaluation.default_synthetic_spec(seed=seed if seed is not None else 0)
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: spec must be a JSON object")
    clusters = raw.get("clusters")
    if not isinstance(clusters, list) or not clusters:
        raise ValueError(f"{path}: field 'clusters' must be a nonempty list")
    parsed = []
    for i, c in enumerate(clusters):
        for fieldname in ("mean", "sigma", "count"):
            if not isinstance(c, dict) or fieldname not in c:
                raise ValueError(f"{path}: clusters[{i}] is missing field '{fieldname}'")
        try:
            parsed.append(
                evaluation.ClusterSpec(
                    mean=tuple(float(v) for v in c["mean"]),
                    sigma=tuple(float(v) for v in c["sigma"]),
                    count=int(c["count"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}: clusters[{i}] is malformed: {exc}") from None
    spec_seed = raw.get("seed", 0)
    if not isinstance(spec_seed, int):
        raise ValueError(f"{path}: field 'seed' must be an integer")
    if seed is not None:
        spec_seed = seed
    return evaluation.SyntheticSpec(clusters=tuple(parsed), seed=spec_seed)


def _default_bbox(g: Generator, sites: np.ndarray, strict: bool) -> tuple[float, float, float, float]:
    lo = sites.min(axis=0)
    hi = sites.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    b_lo = lo - 0.25 * span
    b_hi = hi + 0.25 * span
    d_lo, d_hi = g.domain
    edge = d_lo + 1e-6 * span if strict else np.full(2, d_lo)
    b_lo = np.maximum(b_lo, edge)
    b_hi = np.minimum(b_hi, d_hi)
    return float(b_lo[0]), float(b_hi[0]), float(b_lo[1]), float(b_hi[1])


def _load_points(path: str) -> PointSet:
    return PointSet.from_csv(path)


def _domain_error_with_row(exc: DomainError) -> str:
    # embedding a (n, K) array reports (row, column); translate to a CSV row
    if isinstance(exc.index, tuple) and len(exc.index) == 2:
        return f"{exc} (data row {int(exc.index[0]) + 1})"
    return str(exc)


# --- subcommands ---------------------------------------------------------------

def _cmd_gen_data(args) -> int:
    spec = _load_spec(args.spec, args.seed)
    data = evaluation.generate_dataset(spec)
    data.to_csv(args.out)
    print(f"wrote {data.n} points to {args.out}")
    return 0


def _cmd_cluster(args) -> int:
    data = _load_points(getattr(args, "in"))
    g = make_generator(args.metric)
    result = evaluation.run_method(
        args.method, data.points, g, args.k, args.seed,
        linkage=args.linkage or "ward",
        consolidate=not args.no_consolidate,
        standardize=args.standardize,
    )
    out = Path(args.out)
    payload = result.to_dict()
    if data.labels is not None:
        report = evaluation.evaluate_result(result, data.labels, args.seed)
        payload["evaluation"] = report.to_dict()
    out.with_suffix(".json").write_text(json.dumps(payload, indent=2) + "\n")
    save_assignments_csv(out.with_suffix(".csv"), data.points, result.assignments, data.labels)
    written = [str(out.with_suffix(".json")), str(out.with_suffix(".csv"))]
    if data.dim == 2:
        from . import plots

        plots.save_cluster_scatter(
            out.with_suffix(".png"), data.points, result.assignments, result.centers,
            title=f"{args.method} / {args.metric}",
        )
        written.append(str(out.with_suffix(".png")))
    print("wrote " + ", ".join(written))
    return 0


def _cmd_voronoi(args) -> int:
    sites_data = _load_points(args.sites_file)
    if sites_data.dim != 2:
        raise ValueError("voronoi rendering requires 2-D sites")
    g = make_generator(args.metric)
    sites = voronoi.SiteSet(sites=sites_data.points, generator=g)
    out = Path(args.out)
    suffix = out.suffix.lower()
    bbox = args.bbox or _default_bbox(g, sites.sites, strict=args.exact)
    if args.exact:
        if suffix != ".svg":
            raise ValueError("exact cell export writes SVG; use an .svg output path")
        cells = voronoi.exact_riemann_cells(sites, bbox)
        voronoi.cells_to_svg(cells, sites, bbox, out)
        print(f"wrote {out}")
        return 0
    raster = voronoi.rasterize(sites, args.flavor, bbox, *args.size)
    if suffix == ".pgm":
        voronoi.raster_to_pgm(raster, out)
    elif suffix == ".svg":
        voronoi.raster_to_svg(raster, out)
    elif suffix == ".png":
        from . import plots

        plots.save_raster_png(out, raster, sites.sites,
                              title=f"{args.flavor} / {args.metric}")
    else:
        raise ValueError(f"unsupported output format {suffix!r}; use .pgm, .svg or .png")
    print(f"wrote {out}")
    return 0


def _cmd_quantize(args) -> int:
    data = _load_points(getattr(args, "in"))
    g = make_generator(args.metric)
    report = quantization.lloyd(data.points, g, args.rate, seed=args.seed)
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    print(f"wrote {args.out} (distortion {report.distortion:.6g}, "
          f"{report.iterations} iterations)")
    return 0


def _cmd_experiment(args) -> int:
    spec = _load_spec(args.spec, None)
    methods = list(METHODS) if args.methods == ["all"] else args.methods
    metrics = list(GENERATOR_NAMES) if args.metrics == ["all"] else args.metrics
    out_dir = Path(args.out_dir)
    (out_dir / "runs").mkdir(parents=True, exist_ok=True)

    reports, results = evaluation.run_experiment(
        spec, methods, metrics, args.k, args.seeds,
        linkage=args.linkage, consolidate=not args.no_consolidate,
        standardize=args.standardize, return_results=True,
    )
    data = evaluation.generate_dataset(spec)
    data.to_csv(out_dir / "dataset.csv")

    with open(out_dir / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        dim = data.dim
        header = ["method", "metric", "seed", "k", "accuracy", "ari", "nmi"]
        header += [f"size_{c + 1}" for c in range(args.k)]
        header += [f"center{c + 1}_x{j + 1}" for c in range(args.k) for j in range(dim)]
        writer.writerow(header)
        for r in reports:
            row = [r.method, r.generator, r.seed, r.k,
                   f"{r.accuracy:.6f}", f"{r.adjusted_rand_index:.6f}",
                   f"{r.normalized_mutual_information:.6f}"]
            row += [str(int(s)) for s in r.sizes]
            row += [f"{v:.6f}" for v in np.asarray(r.centers).ravel()]
            writer.writerow(row)

    for report, result in zip(reports, results):
        name = f"{report.method}_{report.generator}_seed{report.seed}.json"
        payload = result.to_dict()
        payload["evaluation"] = report.to_dict()
        (out_dir / "runs" / name).write_text(json.dumps(payload, indent=2) + "\n")

    true_sizes = np.bincount(data.labels, minlength=args.k) if data.labels is not None else None
    summary = "".join(
        evaluation.summary_table(reports, m, true_sizes=true_sizes) + "\n" for m in methods
    )
    (out_dir / "summary.txt").write_text(summary)

    if not args.no_figures and data.dim == 2:
        from . import plots

        fig_dir = out_dir / "figures"
        fig_dir.mkdir(exist_ok=True)
        plots.save_cluster_scatter(fig_dir / "dataset.png", data.points, data.labels,
                                   title="groundtruth")
        first_seed = args.seeds[0]
        for report, result in zip(reports, results):
            if report.seed == first_seed:
                plots.save_cluster_scatter(
                    fig_dir / f"{report.method}_{report.generator}.png",
                    data.points, result.assignments, result.centers,
                    title=f"{report.method} / {report.generator} "
                          f"(acc {report.accuracy:.3f})",
                )
    print(f"wrote {len(reports)} runs to {out_dir} "
          f"(report.csv, summary.txt, runs/, figures/)")
    print(summary, end="")
    return 0


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riembreg",
        description="Geometry, Voronoi diagrams, quantization and clustering "
                    "for metrics induced by separable Bregman generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate the synthetic labeled dataset as CSV")
    p.add_argument("--spec", help="JSON file with {seed, clusters:[{mean,sigma,count}]}")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("cluster", help="cluster a CSV point set under a metric")
    p.add_argument("--in", required=True, help="input CSV (x1,x2,...[,label])")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--metric", required=True, choices=GENERATOR_NAMES)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--linkage", choices=("single", "average", "complete", "ward"),
                   help="HAC linkage (hac only)")
    p.add_argument("--no-consolidate", action="store_true",
                   help="skip the k-means consolidation step (hcpc only)")
    p.add_argument("--standardize", action="store_true",
                   help="z-score embedded coordinates before clustering")
    p.add_argument("--out", required=True,
                   help="output prefix; writes <out>.json, <out>.csv and <out>.png")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("voronoi", help="render a Voronoi diagram (PGM/SVG/PNG)")
    p.add_argument("--sites-file", required=True, help="CSV of sites (x1,x2)")
    p.add_argument("--metric", required=True, choices=GENERATOR_NAMES)
    p.add_argument("--flavor", default="riemann", choices=voronoi.FLAVORS)
    p.add_argument("--bbox", type=_parse_bbox,
                   help="x_lo,x_hi,y_lo,y_hi (default: sites plus a 25%% margin)")
    p.add_argument("--size", type=_parse_size, default=(512, 512), help="WIDTHxHEIGHT")
    p.add_argument("--exact", action="store_true",
                   help="export exact pulled-back cell walls instead of a raster")
    p.add_argument("--out", required=True, help="output path (.pgm, .svg or .png)")
    p.set_defaults(func=_cmd_voronoi)

    p = sub.add_parser("quantize", help="fit a fixed-rate codebook by Lloyd iteration")
    p.add_argument("--in", required=True, help="input CSV (x1,...,xK[,label])")
    p.add_argument("--metric", required=True, choices=GENERATOR_NAMES)
    p.add_argument("--rate", required=True, type=int, help="codebook size N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(func=_cmd_quantize)

    p = sub.add_parser("experiment", help="run the full method x metric x seed grid")
    p.add_argument("--spec", help="JSON synthetic spec (default: built-in four clouds)")
    p.add_argument("--methods", type=lambda s: s.split(","), default=["all"],
                   help="comma list from {kmeans,em,hcpc,hac} or 'all'")
    p.add_argument("--metrics", type=lambda s: s.split(","), default=["all"],
                   help="comma list of generator names or 'all'")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seeds", type=_parse_seeds, default=list(range(10)),
                   help="comma list of seeds (default 0..9)")
    p.add_argument("--linkage", default="ward",
                   choices=("single", "average", "complete", "ward"))
    p.add_argument("--no-consolidate", action="store_true")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_experiment)
    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command == "cluster":
        if args.linkage and args.method != "hac":
            parser.error("--linkage applies to --method hac only")
        if args.no_consolidate and args.method != "hcpc":
            parser.error("--no-consolidate applies to --method hcpc only")
        if args.k < 1:
            parser.error("--k must be >= 1")
    elif args.command == "quantize":
        if args.rate < 1:
            parser.error("--rate must be >= 1")
    elif args.command == "experiment":
        if args.k < 1:
            parser.error("--k must be >= 1")
        if not args.seeds:
            parser.error("--seeds must name at least one seed")
        unknown = [m for m in args.methods if m != "all" and m not in METHODS]
        if unknown:
            parser.error(f"unknown methods: {', '.join(unknown)}")
        unknown = [m for m in args.metrics if m != "all" and m not in GENERATOR_NAMES]
        if unknown:
            parser.error(f"unknown metrics: {', '.join(unknown)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {_domain_error_with_row(exc)}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())
