"""Command-line entry points.

Subcommands: ``parse`` (detection files -> reaction JSON), ``eval``
(hard/soft scoring), ``plan`` (print the routing plan), ``render``
(annotated SVG), ``fingerprint`` (debug: counts and fingerprint of a
SMILES) and ``score-edge`` (debug: the three channel scores plus the
fused score for an entity pair). Exit codes: 0 all ok, 2 some documents
failed, 3 configuration error, 4 nothing succeeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .agents import FixtureMissingError
from .chem import atom_count_vector, fingerprint, formal_charge_sum, parse_smiles
from .config import ConfigError, ReasoningConfig
from .entities import load_document
from .evaluation import CorpusDocument, report_table, score_corpus
from .pipeline import (
    EXIT_CONFIG,
    EXIT_FAILED,
    EXIT_OK,
    PipelineConfig,
    load_pipeline_weights,
    make_client,
    run_batch,
    run_document,
)
from .planner import extract_features, plan_to_json, route
from .reactions import boxed_reactions_from_json
from .reasoning import (
    FusionWeights,
    build_chem_graph,
    build_spatial_graph,
    fuse_score,
    propagate,
)
from .render import render_svg

_REASONING_FLAGS = (
    ("k-nn", int),
    ("radius", float),
    ("layers", int),
    ("dim", int),
    ("beta", float),
    ("tau-chem", float),
    ("tau-cluster", float),
    ("tau-fuse", float),
    ("alpha-space", float),
    ("alpha-chem", float),
    ("alpha-init", float),
    ("exact-search-limit", int),
    ("conservation-penalty", float),
)


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="pipeline config JSON file")
    parser.add_argument("--fixtures-dir", help="mock agent fixture directory")
    parser.add_argument("--weights-file", help="spatial weights JSON file")
    parser.add_argument("--lexicon-file", help="synonym lexicon JSON file")
    parser.add_argument("--output-dir", help="where outputs are written")
    parser.add_argument("--backend", choices=["mock", "live"])
    parser.add_argument("--endpoint")
    parser.add_argument("--model")
    parser.add_argument("--query")
    parser.add_argument("--max-workers", type=int)
    for flag, kind in _REASONING_FLAGS:
        parser.add_argument(f"--{flag}", type=kind, dest=flag.replace("-", "_"))


def _build_config(args) -> PipelineConfig:
    overrides = {}
    for key in (
        "fixtures_dir",
        "weights_file",
        "lexicon_file",
        "output_dir",
        "backend",
        "endpoint",
        "model",
        "query",
        "max_workers",
    ):
        overrides[key] = getattr(args, key, None)
    for flag, _ in _REASONING_FLAGS:
        key = flag.replace("-", "_")
        overrides[key] = getattr(args, key, None)
    if args.config:
        return PipelineConfig.from_file(args.config, overrides)
    return PipelineConfig.from_dict({}, overrides)


def _cmd_parse(args) -> int:
    config = _build_config(args)
    manifest = run_batch(args.inputs, config)
    manifest_path = Path(config.output_dir) / "manifest.json"
    manifest_path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    for doc in manifest.documents:
        print(f"{doc.status:<8} {doc.source}" + (f"  ({doc.error})" if doc.error else ""))
    print(f"manifest: {manifest_path}")
    return manifest.exit_code


def _load_eval_file(path) -> list[CorpusDocument]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, list) and (not data or "reactants" in data[0]):
        # bare reaction array: one anonymous document
        return [
            CorpusDocument(
                doc_id="<single>",
                reactions=tuple(boxed_reactions_from_json(json.dumps(data))),
            )
        ]
    if not isinstance(data, list):
        raise ValueError("eval file must be a JSON array")
    docs = []
    for obj in data:
        docs.append(
            CorpusDocument(
                doc_id=str(obj["id"]),
                reactions=tuple(boxed_reactions_from_json(json.dumps(obj["reactions"]))),
                layout=obj.get("layout"),
            )
        )
    return docs


def _cmd_eval(args) -> int:
    gt = _load_eval_file(args.gt)
    pred = _load_eval_file(args.pred)
    criteria = [args.criterion] if args.criterion else ["hard", "soft"]
    reports = []
    for criterion in criteria:
        report = score_corpus(gt, pred, criterion, args.iou, polygon=not args.axis_iou)
        if not args.per_layout:
            report = dataclasses.replace(report, per_layout=None)
        reports.append(report)
    table = report_table(reports)
    print(table)
    if args.out:
        payload = [r.to_dict() for r in reports]
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        Path(args.out).with_suffix(".txt").write_text(table + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_plan(args) -> int:
    doc = load_document(Path(args.input).read_bytes())
    features = extract_features(doc)
    plan = route(args.query, features)
    print(plan_to_json(plan))
    return EXIT_OK


def _cmd_render(args) -> int:
    config = _build_config(args)
    doc = load_document(Path(args.input).read_bytes())
    client = make_client(config)
    outcome = run_document(doc, config, client)
    svg = render_svg(doc, outcome.reactions)
    out = Path(args.out or (Path(config.output_dir) / (Path(args.input).stem + ".svg")))
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    print(out)
    return EXIT_OK


def _cmd_fingerprint(args) -> int:
    mol = parse_smiles(args.smiles)
    config = ReasoningConfig().fingerprint
    fp = fingerprint(mol, config)
    print(
        json.dumps(
            {
                "smiles": args.smiles,
                "atom_counts": atom_count_vector(mol).as_dict(),
                "formal_charge": formal_charge_sum(mol),
                "fingerprint": {
                    "tag": fp.algorithm_tag,
                    "width": fp.width,
                    "popcount": fp.popcount,
                    "bits": fp.active_bits()[:32],
                },
            },
            indent=2,
        )
    )
    return EXIT_OK


def _cmd_score_edge(args) -> int:
    config = _build_config(args)
    doc = load_document(Path(args.input).read_bytes())
    reasoning = config.reasoning
    spatial = propagate(build_spatial_graph(doc, reasoning, load_pipeline_weights(config)))
    chem = build_chem_graph(doc, reasoning)
    pair = (min(args.a, args.b), max(args.a, args.b))
    s_space = spatial.score_by_ids().get(pair, 0.5)
    s_chem = chem.score(*pair)
    s_chem = 0.5 if s_chem is None else s_chem
    weights = FusionWeights(*reasoning.alphas)
    print(
        json.dumps(
            {
                "pair": list(pair),
                "s_space": s_space,
                "s_chem": s_chem,
                "s_fuse_without_hypothesis": fuse_score(s_space, s_chem, 0.0, weights),
                "s_fuse_with_unit_hypothesis": fuse_score(s_space, s_chem, 1.0, weights),
                "tau_fuse": reasoning.tau_fuse,
            },
            indent=2,
        )
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rxnparse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse detection files into reaction JSON")
    p.add_argument("inputs", nargs="+")
    _add_config_options(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--criterion", choices=["hard", "soft"])
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--per-layout", action="store_true")
    p.add_argument("--axis-iou", action="store_true", help="match arrows by axis-aligned hulls")
    p.add_argument("--out", help="write the JSON report here (and a .txt table)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("plan", help="print the routing plan for a document and query")
    p.add_argument("input")
    p.add_argument("--query", default="extract all reactions")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("render", help="render a parsed document to SVG")
    p.add_argument("input")
    p.add_argument("--out")
    _add_config_options(p)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("fingerprint", help="debug: counts, charge and fingerprint of a SMILES")
    p.add_argument("smiles")
    p.set_defaults(func=_cmd_fingerprint)

    p = sub.add_parser("score-edge", help="debug: channel scores for an entity pair")
    p.add_argument("input")
    p.add_argument("a")
    p.add_argument("b")
    _add_config_options(p)
    p.set_defaults(func=_cmd_score_edge)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FixtureMissingError as exc:
        print(f"fixture missing: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as exc:  # surface anything else as a total failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
