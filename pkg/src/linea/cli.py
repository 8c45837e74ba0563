"""Command-line front end: ``linea stats|recognize|bench|eval|gen|rules check``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io as lio
from .config import Config, load_config
from .evaluation import (
    Dataset,
    SyntheticSpec,
    benchmark,
    dataset_stats,
    e_rate,
    generate_synthetic,
    precision_recall,
    scaling_spec,
    write_csv,
)
from .evaluation.bench import REFERENCE_SIZES
from .exceptions import ConfigError, EmptyDataset, FormatError, InvalidSpec, LineaError, ParseError
from .pipeline import build_kg, recognize_linear_patterns
from .proximity import rng_build
from .rule_engine import parse, to_text
from .rules import rule_text, substitute

log = logging.getLogger("linea")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_INTERNAL = 4


class UsageError(LineaError):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _sizes(text: str) -> list[int]:
    if text == "reference":
        return list(REFERENCE_SIZES)
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be comma-separated integers or 'reference'") from None
    if not sizes or any(s < 3 for s in sizes):
        raise argparse.ArgumentTypeError("every size must be >= 3")
    return sizes


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration (overrides the config file)")
    g.add_argument("--config", help="JSON config file (default: $LINEA_CONFIG)")
    for name in ("delta1", "delta2", "delta3", "eta1", "eta2", "eta3", "td"):
        g.add_argument(f"--{name}", type=float, default=None)
    g.add_argument("--map-scale", type=int, default=None, help="scale denominator; sets td when td is not given")
    g.add_argument("--schema", choices=("A", "B"), default=None)
    g.add_argument("--mode", choices=("engine", "direct"), default=None)
    g.add_argument("--align-rule", choices=("listing", "outer_edges"), default=None)
    g.add_argument("--rng-metric", choices=("footprint", "centroid"), default=None)
    g.add_argument("--fr-combine", choices=("max", "min"), default=None)
    g.add_argument("--exact-rng", action="store_true", default=None, help="check every RNG witness (slow)")
    return p


def _resolve_config(args: argparse.Namespace) -> Config:
    cfg = load_config(getattr(args, "config", None))
    over = {}
    for name in ("delta1", "delta2", "delta3", "eta1", "eta2", "eta3", "td", "map_scale", "schema", "mode",
                 "align_rule", "rng_metric", "fr_combine", "exact_rng", "criterion", "tau"):
        if hasattr(args, name):
            key = {"criterion": "match_criterion", "tau": "jaccard_tau"}.get(name, name)
            over[key] = getattr(args, name)
    return cfg.with_overrides(**over)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- commands --------------------------------------------------------------


def cmd_stats(args: argparse.Namespace) -> int:
    buildings, _ = lio.read_buildings(args.input)
    if not buildings:
        raise EmptyDataset(f"{args.input}: no building polygons")
    _emit(_dumps(dataset_stats(buildings).as_dict()), args.out)
    return EXIT_OK


def cmd_recognize(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    t = cfg.to_thresholds()
    buildings, roads = lio.read_buildings(args.input)
    if args.roads:
        _, _, extra = lio.read_features(args.roads)
        roads = roads + extra
    if not buildings:
        raise EmptyDataset(f"{args.input}: no building polygons")
    edges = rng_build(buildings, roads, exact=cfg.exact_rng, metric=cfg.rng_metric, fr_combine=cfg.fr_combine)
    kg = build_kg(buildings, t=t, schema=cfg.schema, edges=edges)
    patterns = recognize_linear_patterns(kg, t, mode=cfg.mode, align_rule=cfg.align_rule)
    doc = lio.patterns_geojson(patterns, buildings)
    if args.crs_note:
        doc["crs_note"] = args.crs_note
    _emit(_dumps(doc), args.out)
    if args.svg:
        Path(args.svg).write_text(lio.render_svg(buildings, patterns, roads), encoding="utf-8")
    log.info("%d buildings, %d proximity edges, %d patterns", len(buildings), len(edges), len(patterns))
    return EXIT_OK


def _bench_rows(ds: Dataset, cfg: Config, runs: int, methods: Sequence[str]):
    t = cfg.to_thresholds()
    reps = {m: benchmark(ds, m, runs, cfg.schema, t) for m in methods}
    rate = e_rate(reps["baseline"], reps["engine"]) if len(reps) == 2 else None
    return [(reps[m], rate) for m in methods]


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    t = cfg.to_thresholds()
    methods = ("engine", "baseline") if args.method == "both" else (args.method,)
    rng_kw = dict(exact=cfg.exact_rng, metric=cfg.rng_metric, fr_combine=cfg.fr_combine)
    datasets: list[Dataset] = []
    if args.sizes:
        for n in args.sizes:
            buildings, _ = generate_synthetic(scaling_spec(n, seed=args.seed), t)
            datasets.append(Dataset.from_buildings(f"synthetic_{n}", buildings, **rng_kw))
    elif args.gen:
        spec = SyntheticSpec.from_dict(_read_spec(args.gen))
        buildings, _ = generate_synthetic(spec, t)
        datasets.append(Dataset.from_buildings(Path(args.gen).stem, buildings, **rng_kw))
    elif args.input:
        buildings, roads = lio.read_buildings(args.input)
        if not buildings:
            raise EmptyDataset(f"{args.input}: no building polygons")
        datasets.append(Dataset.from_buildings(Path(args.input).stem, buildings, roads, **rng_kw))
    else:
        raise UsageError("bench needs an input file, --gen SPEC or --sizes")
    rows = []
    for ds in datasets:
        rows.extend(_bench_rows(ds, cfg, args.runs, methods))
        log.info("benchmarked %s", ds.name)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fp:
            write_csv(rows, fp)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    detected = lio.read_detected(args.detected)
    truth = lio.read_truth(args.truth)
    rep = precision_recall(detected, truth, match=cfg.match_criterion, tau=cfg.jaccard_tau)
    _emit(_dumps(rep.as_dict()), args.out)
    return EXIT_OK


def _read_spec(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: spec must be a JSON object")
    return data


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    spec = SyntheticSpec.from_dict(_read_spec(args.spec))
    buildings, truth = generate_synthetic(spec, cfg.to_thresholds())
    lio.write_json(lio.buildings_geojson(buildings), args.out)
    if args.truth:
        lio.write_json(lio.truth_json(truth), args.truth)
    log.info("wrote %d buildings, %d truth patterns", len(buildings), len(truth))
    return EXIT_OK


def cmd_rules_check(args: argparse.Namespace) -> int:
    """Parse a rule script (file path or bundled name) and report its statements."""
    source = args.script
    if Path(source).is_file():
        text = Path(source).read_text(encoding="utf-8")
    else:
        try:
            text = rule_text(source)
        except FileNotFoundError:
            raise FormatError(f"no such script file or bundled rule: {source}") from None
    cfg = _resolve_config(args)
    if "${" in text:
        try:
            text = substitute(text, cfg.to_thresholds())
        except (KeyError, ValueError) as exc:
            raise FormatError(f"unknown or malformed template placeholder: {exc}") from None
    script = parse(text)
    if to_text(parse(to_text(script))) != to_text(script):
        raise FormatError("script does not round-trip through the printer")
    if args.print:
        sys.stdout.write(to_text(script) + "\n")
    else:
        print(f"ok: {len(script.statements)} statements")
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linea", description="Linear building pattern recognition.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    cfg = _config_parent()

    p = sub.add_parser("stats", help="dataset statistics as JSON")
    p.add_argument("input", help="GeoJSON FeatureCollection")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("recognize", parents=[cfg], help="recognize linear patterns")
    p.add_argument("input", help="GeoJSON FeatureCollection of building polygons (and roads)")
    p.add_argument("--roads", help="extra GeoJSON file with road LineStrings")
    p.add_argument("-o", "--out", help="patterns GeoJSON (default: stdout)")
    p.add_argument("--svg", help="write an SVG overlay of footprints and patterns")
    p.add_argument("--crs-note", help="free-text note on the planar CRS, copied to the output")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("bench", parents=[cfg], help="time the rule engine against the traversal baseline")
    src = p.add_mutually_exclusive_group()
    src.add_argument("input", nargs="?", help="GeoJSON dataset")
    src.add_argument("--gen", metavar="SPEC", help="synthetic spec JSON")
    src.add_argument("--sizes", type=_sizes, help="size sweep: comma-separated counts or 'reference'")
    p.add_argument("--runs", type=_positive_int, default=10)
    p.add_argument("--method", choices=("both", "engine", "baseline"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="CSV output (default: stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval", parents=[cfg], help="precision and recall against a truth file")
    p.add_argument("detected", help="patterns GeoJSON written by 'recognize'")
    p.add_argument("truth", help="truth JSON (list of id lists or {'patterns': [...]})")
    p.add_argument("--criterion", choices=("exact", "jaccard"), default=None)
    p.add_argument("--tau", type=float, default=None, help="Jaccard threshold")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", parents=[cfg], help="generate a synthetic dataset with truth")
    p.add_argument("spec", help="spec JSON {rows, cols, spacing, jitter, rotation, decoys, seed}")
    p.add_argument("-o", "--out", required=True, help="buildings GeoJSON")
    p.add_argument("--truth", help="truth JSON")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("rules", help="rule script utilities")
    rsub = p.add_subparsers(dest="rules_command", required=True)
    c = rsub.add_parser("check", parents=[cfg], help="parse-validate a script file")
    c.add_argument("script", help="script path or bundled rule name")
    c.add_argument("--print", action="store_true", help="print the normalized script")
    c.set_defaults(func=cmd_rules_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"linea: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, EmptyDataset, ParseError, InvalidSpec, OSError) as exc:
        print(f"linea: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except Exception as exc:  # noqa: BLE001 - last-resort handler for the exit code contract
        log.debug("internal error", exc_info=True)
        print(f"linea: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
