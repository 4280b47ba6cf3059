"""End-to-end orchestration: plan, ingest, reason, post-process, emit.

A batch run maps every detection file to a reaction JSON file and
yields a manifest recording per-document status (ok / partial / failed
with the error class), stage timings and output paths. Documents are
isolated: one failure never aborts the batch. With the mock agent
backend the whole run is a pure function of (inputs, config, fixtures),
so two runs produce byte-identical reaction output.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .agents import AgentClient, LiveAgentClient, LiveBackendConfig, MockAgentClient
from .config import ConfigError, ReasoningConfig
from .entities import ReactionDocument, load_document
from .planner import AgentPlan, PlanningContext, extract_features, route
from .reactions import Reaction, reactions_to_json
from .reasoning import (
    build_chem_graph,
    build_spatial_graph,
    cluster_entities,
    collect_hypotheses,
    fuse,
    FusionWeights,
    infer_reactions,
    load_weights,
    post_process,
    propagate,
    random_weights,
)
from .reasoning.spatial import EDGE_DIMS, SpatialWeights
from .textnorm import Lexicon, default_lexicon

log = logging.getLogger(__name__)

DEFAULT_QUERY = "extract all reactions"

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_CONFIG = 3
EXIT_FAILED = 4


@dataclass(frozen=True)
class PipelineConfig:
    reasoning: ReasoningConfig = field(default_factory=ReasoningConfig)
    backend: str = "mock"  # "mock" | "live"
    fixtures_dir: str | None = None
    endpoint: str | None = None
    model: str | None = None
    weights_file: str | None = None
    lexicon_file: str | None = None
    output_dir: str = "out"
    iou_threshold: float = 0.5
    criterion: str = "hard"
    polygon_iou: bool = True
    max_workers: int = 1
    cluster_workers: int = 1
    query: str = DEFAULT_QUERY
    planner_policy: str = "rule"  # "rule" | "vlm"
    plan_fallback: bool = False  # fall back to the rule policy on bad VLM plans

    def __post_init__(self):
        if self.backend not in ("mock", "live"):
            raise ConfigError(f"backend must be 'mock' or 'live', got {self.backend!r}")
        if self.backend == "mock" and not self.fixtures_dir:
            raise ConfigError("mock backend needs fixtures_dir")
        if self.backend == "live" and not (self.endpoint and self.model):
            raise ConfigError("live backend needs endpoint and model")
        if not 0.0 <= self.iou_threshold <= 1.0:
            raise ConfigError("iou_threshold must lie in [0, 1]")
        if self.criterion not in ("hard", "soft"):
            raise ConfigError(f"criterion must be 'hard' or 'soft', got {self.criterion!r}")
        if self.planner_policy not in ("rule", "vlm"):
            raise ConfigError(f"planner_policy must be 'rule' or 'vlm', got {self.planner_policy!r}")
        for name in ("fixtures_dir", "weights_file", "lexicon_file"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{name} does not exist: {value}")

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        return cls.from_dict(data, overrides)

    @classmethod
    def from_dict(cls, data: dict, overrides: dict | None = None) -> "PipelineConfig":
        data = dict(data)
        if overrides:
            # command-line flags win over file values
            for key, value in overrides.items():
                if value is None:
                    continue
                if key in ReasoningConfig.__dataclass_fields__:
                    data.setdefault("reasoning", {})
                    if isinstance(data["reasoning"], dict):
                        data["reasoning"][key] = value
                else:
                    data[key] = value
        reasoning = data.pop("reasoning", {})
        if isinstance(reasoning, dict):
            reasoning = ReasoningConfig.from_dict(reasoning)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(reasoning=reasoning, **data)

    def to_dict(self) -> dict:
        return {
            "reasoning": self.reasoning.to_dict(),
            "backend": self.backend,
            "fixtures_dir": self.fixtures_dir,
            "endpoint": self.endpoint,
            "model": self.model,
            "weights_file": self.weights_file,
            "lexicon_file": self.lexicon_file,
            "output_dir": self.output_dir,
            "iou_threshold": self.iou_threshold,
            "criterion": self.criterion,
            "polygon_iou": self.polygon_iou,
            "max_workers": self.max_workers,
            "cluster_workers": self.cluster_workers,
            "query": self.query,
            "planner_policy": self.planner_policy,
            "plan_fallback": self.plan_fallback,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def make_client(config: PipelineConfig) -> AgentClient:
    if config.backend == "mock":
        return MockAgentClient(config.fixtures_dir)
    backend = LiveBackendConfig(
        endpoint=config.endpoint,
        model=config.model,
        api_key=os.environ.get("RXNPARSE_API_KEY"),
    )
    return LiveAgentClient(backend)


def load_pipeline_weights(config: PipelineConfig) -> SpatialWeights:
    if config.weights_file:
        return load_weights(config.weights_file)
    return random_weights(
        config.reasoning.layers,
        config.reasoning.dim,
        EDGE_DIMS,
        seed=config.reasoning.weights_seed,
    )


def load_pipeline_lexicon(config: PipelineConfig) -> Lexicon:
    if config.lexicon_file:
        return Lexicon.from_file(config.lexicon_file)
    return default_lexicon()


@dataclass
class DocumentResult:
    source: str
    status: str = "ok"  # ok | partial | failed
    error: str | None = None
    stages: dict = field(default_factory=dict)  # stage -> seconds
    outputs: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass
class RunManifest:
    config_hash: str
    documents: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "documents": [
                {
                    "source": d.source,
                    "status": d.status,
                    "error": d.error,
                    "stages": d.stages,
                    "outputs": d.outputs,
                    "warnings": d.warnings,
                }
                for d in self.documents
            ],
        }

    @property
    def exit_code(self) -> int:
        statuses = [d.status for d in self.documents]
        if not statuses or all(s == "failed" for s in statuses):
            return EXIT_FAILED if statuses else EXIT_OK
        if any(s != "ok" for s in statuses):
            return EXIT_PARTIAL
        return EXIT_OK


@dataclass
class ReasoningOutcome:
    plan: AgentPlan
    reactions: list[Reaction]
    document: ReactionDocument
    warnings: tuple[str, ...] = ()


def run_document(
    doc: ReactionDocument,
    config: PipelineConfig,
    client: AgentClient,
    weights: SpatialWeights | None = None,
    timings: dict | None = None,
) -> ReasoningOutcome:
    """Full single-document pass: plan, reason, post-process."""
    timings = timings if timings is not None else {}
    reasoning = config.reasoning

    started = time.perf_counter()
    features = extract_features(doc, reasoning.tau_cluster)
    ctx = PlanningContext(query=config.query)
    policy = client if config.planner_policy == "vlm" else "rule"
    plan = route(config.query, features, ctx, policy, fallback_to_rule=config.plan_fallback)
    timings["plan"] = time.perf_counter() - started

    warnings: tuple[str, ...] = ()
    reactions: list[Reaction] = []
    for role in plan.steps:
        if role == "molecule_expert":
            parsed = sum(1 for e in doc.entities if e.molecule is not None)
            ctx.mark_complete(role, entities=features.kind_counts["molecule"], parsed=parsed)
        elif role == "arrow_expert":
            ctx.mark_complete(role, entities=features.kind_counts["arrow"])
        elif role == "text_expert":
            ctx.mark_complete(role, entities=features.kind_counts["text"])
        elif role == "reaction_expert":
            started = time.perf_counter()
            if weights is None:
                weights = load_pipeline_weights(config)
            spatial = propagate(build_spatial_graph(doc, reasoning, weights))
            chem = build_chem_graph(doc, reasoning)
            clusters = cluster_entities(doc, reasoning)
            hypotheses = collect_hypotheses(
                clusters, client, doc, reasoning, max_workers=config.cluster_workers
            )
            fused = fuse(
                spatial,
                chem,
                hypotheses,
                FusionWeights(*reasoning.alphas),
                reasoning.tau_fuse,
            )
            timings["reason"] = time.perf_counter() - started

            started = time.perf_counter()
            inferred = infer_reactions(fused, doc, reasoning)
            reactions = post_process(inferred, doc, reasoning)
            ctx.mark_complete(role, reactions=len(reactions))
            timings["post"] = time.perf_counter() - started
            warnings = hypotheses.warnings

    return ReasoningOutcome(plan=plan, reactions=reactions, document=doc, warnings=warnings)


def run_batch(inputs, config: PipelineConfig, client: AgentClient | None = None) -> RunManifest:
    """Process detection files into reaction JSON files plus a manifest."""
    client = client or make_client(config)
    lexicon = load_pipeline_lexicon(config)
    weights = load_pipeline_weights(config)
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config_hash=config.config_hash())

    def process(path) -> DocumentResult:
        path = Path(path)
        result = DocumentResult(source=str(path))
        try:
            started = time.perf_counter()
            doc = load_document(path.read_bytes(), lexicon)
            result.stages["load"] = time.perf_counter() - started
            outcome = run_document(doc, config, client, weights, result.stages)
            started = time.perf_counter()
            out_path = output_dir / f"{path.stem}.reactions.json"
            out_path.write_text(
                reactions_to_json(outcome.reactions, doc) + "\n", encoding="utf-8"
            )
            result.stages["emit"] = time.perf_counter() - started
            result.outputs.append(str(out_path))
            result.warnings.extend(doc.warnings)
            result.warnings.extend(outcome.warnings)
            if outcome.warnings:
                result.status = "partial"
        except Exception as exc:  # per-document isolation
            log.exception("document %s failed", path)
            result.status = "failed"
            result.error = f"{type(exc).__name__}: {exc}"
        return result

    paths = list(inputs)
    if config.max_workers > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            results = list(pool.map(process, paths))
    else:
        results = [process(p) for p in paths]
    manifest.documents.extend(results)
    return manifest
