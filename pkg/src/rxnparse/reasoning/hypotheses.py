"""Hypothesis graph: directed, typed reaction relations from a VLM.

Each entity cluster is sent independently to the reaction-combiner
agent along with a JSON rendering of its local subgraph. The agent
answers in the reaction wire format; each answered reaction is unpacked
into typed edges (reactant->arrow, arrow->product, reactant->condition,
condition->product, and reactant->product when no arrow is present)
with the response-supplied confidence, defaulting to 1.0. Edges that
name entities outside their own cluster are dropped with a warning. A
malformed response spoils only its own cluster; agent transport errors
propagate.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..agents import AgentClient
from ..entities import ReactionDocument, entity_to_json
from ..geometry import center_distance_normalized
from ..reactions import (
    ConstraintError,
    Reaction,
    ResolutionError,
    ResponseFormatError,
    parse_combiner_response,
)
from ..config import ReasoningConfig
from .relations import EdgeRelation

log = logging.getLogger(__name__)

COMBINER_ROLE = "reaction_combiner"


@dataclass(frozen=True)
class HypothesisEdge:
    source: str
    target: str
    relation: EdgeRelation
    confidence: float = 1.0


@dataclass(frozen=True)
class HypothesisGraph:
    """Cluster partition plus per-cluster directed typed edges."""

    clusters: tuple[tuple[str, ...], ...]
    edges: tuple[HypothesisEdge, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        for edge in self.edges:
            if edge.relation == EdgeRelation.NO_EDGE:
                raise ValueError("hypothesis edges must carry a real relation")


def cluster_prompt_variables(cluster, doc: ReactionDocument, config: ReasoningConfig) -> dict:
    """Deterministic prompt variables for one cluster.

    The subgraph JSON lists the cluster's entities and their proximity
    links (weight = 1 - normalized distance), which is all the evidence
    available before fusion.
    """
    ids = list(cluster)
    nodes = [entity_to_json(doc.entity(i)) for i in ids]
    edges = []
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            d = center_distance_normalized(
                doc.entity(ids[a]).region, doc.entity(ids[b]).region, doc.diagram_bounds
            )
            if d < config.tau_cluster:
                edges.append(
                    {
                        "source": ids[a],
                        "target": ids[b],
                        "relation": int(EdgeRelation.NO_EDGE),
                        "weight": round(1.0 - d, 6),
                    }
                )
    graph = {"nodes": nodes, "edges": edges}
    return {"graph_json": json.dumps(graph, sort_keys=True)}


def edges_from_reactions(reactions, cluster) -> tuple[list[HypothesisEdge], list[str]]:
    """Unpack combiner reactions into typed edges, dropping cross-cluster ones."""
    members = set(cluster)
    edges: list[HypothesisEdge] = []
    warnings: list[str] = []

    def add(source: str, target: str, relation: EdgeRelation, confidence: float) -> None:
        if source not in members or target not in members:
            warnings.append(
                f"dropped {relation.name} edge {source}->{target}: outside cluster"
            )
            return
        edges.append(HypothesisEdge(source, target, relation, confidence))

    for reaction in reactions:
        conf = reaction.score
        if reaction.arrows:
            for arrow in reaction.arrows:
                for reactant in reaction.reactants:
                    add(reactant, arrow, EdgeRelation.REACTANT_TO_ARROW, conf)
                for product in reaction.products:
                    add(arrow, product, EdgeRelation.ARROW_TO_PRODUCT, conf)
        else:
            for reactant in reaction.reactants:
                for product in reaction.products:
                    add(reactant, product, EdgeRelation.REACTANT_TO_PRODUCT, conf)
        for condition in reaction.conditions:
            for reactant in reaction.reactants:
                add(reactant, condition, EdgeRelation.REACTANT_TO_COND, conf)
            for product in reaction.products:
                add(condition, product, EdgeRelation.COND_TO_PRODUCT, conf)
    return edges, warnings


def collect_hypotheses(
    clusters,
    client: AgentClient,
    doc: ReactionDocument,
    config: ReasoningConfig,
    max_workers: int = 1,
) -> HypothesisGraph:
    """Query the combiner agent per cluster and merge typed edges.

    Results merge in cluster order regardless of worker count, so
    concurrency never changes the output.
    """

    def run_cluster(cluster) -> tuple[list[HypothesisEdge], list[str]]:
        variables = cluster_prompt_variables(cluster, doc, config)
        raw = client.request(COMBINER_ROLE, variables)
        try:
            reactions: list[Reaction] = parse_combiner_response(raw, doc)
        except (ResponseFormatError, ConstraintError, ResolutionError) as exc:
            message = f"cluster {cluster[0]}...: discarded response ({exc})"
            log.warning(message)
            return [], [message]
        return edges_from_reactions(reactions, cluster)

    if max_workers > 1 and len(clusters) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run_cluster, clusters))
    else:
        results = [run_cluster(c) for c in clusters]

    edges: list[HypothesisEdge] = []
    warnings: list[str] = []
    for cluster_edges, cluster_warnings in results:
        edges.extend(cluster_edges)
        warnings.extend(cluster_warnings)
    return HypothesisGraph(clusters=tuple(clusters), edges=tuple(edges), warnings=tuple(warnings))
