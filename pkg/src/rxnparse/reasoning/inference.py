"""Global reaction inference over the pruned fused graph.

Candidates are enumerated per connected component. Inside a component,
every arrow seeds one candidate reaction, and each non-arrow entity may
support at most one arrow; the chosen entity-to-arrow assignment is the
one maximizing the summed fused scores of the edges it includes. Small
components are solved by exhaustive enumeration, larger ones greedily
(for this separable objective the two coincide, and the exhaustive
search doubles as the correctness oracle in tests).

Roles come from the typed edges where available and from geometry
otherwise: an untyped neighbour is projected onto the arrow's
tail-to-head axis; behind the tail means reactant, past the head means
product, and over the arrow span means condition. Condition entities
also attach through typed reactant->condition / condition->product
edges. Components with no arrow fall back to reactant->product
hypothesis edges alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..config import ReasoningConfig
from ..entities import EntityKind, ReactionDocument
from ..geometry import axis_parameter, principal_axis
from ..reactions import ConstraintError, Reaction
from .fusion import FusedEdge, FusedGraph
from .relations import EdgeRelation


@dataclass(frozen=True)
class ArrowAssignment:
    """One component's entity-to-arrow assignment and its total support."""

    assigned: dict  # entity id -> arrow id
    total: float


def connected_components(fused: FusedGraph) -> list[list[str]]:
    """Components of the retained edge set, in reading order of first node."""
    adjacency: dict[str, set[str]] = {}
    for edge in fused.edges:
        adjacency.setdefault(edge.source, set()).add(edge.target)
        adjacency.setdefault(edge.target, set()).add(edge.source)
    seen: set[str] = set()
    components: list[list[str]] = []
    for node in fused.node_ids:
        if node not in adjacency or node in seen:
            continue
        stack, members = [node], []
        seen.add(node)
        while stack:
            current = stack.pop()
            members.append(current)
            for neighbor in adjacency[current]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    stack.append(neighbor)
        members.sort()
        components.append(members)
    return components


def _arrow_affinities(component, fused: FusedGraph, doc: ReactionDocument):
    """affinity[entity][arrow] = sum of fused scores between the two."""
    members = set(component)
    arrows = sorted(
        e for e in component if doc.entity(e).kind == EntityKind.ARROW
    )
    affinity: dict[str, dict[str, float]] = {}
    edges_by_pair: dict[tuple[str, str], list[FusedEdge]] = {}
    for edge in fused.edges:
        if edge.source not in members or edge.target not in members:
            continue
        for entity, arrow in ((edge.source, edge.target), (edge.target, edge.source)):
            if arrow in arrows and entity not in arrows:
                affinity.setdefault(entity, {})
                affinity[entity][arrow] = affinity[entity].get(arrow, 0.0) + edge.score
                edges_by_pair.setdefault((entity, arrow), []).append(edge)
    return arrows, affinity, edges_by_pair


def assign_entities_to_arrows(
    component,
    fused: FusedGraph,
    doc: ReactionDocument,
    config: ReasoningConfig,
) -> ArrowAssignment:
    """Pick the support-maximizing entity-to-arrow assignment.

    Exhaustive over the full assignment space when the component is
    within ``exact_search_limit``, greedy per entity otherwise.
    """
    arrows, affinity, _ = _arrow_affinities(component, fused, doc)
    entities = sorted(affinity)
    if not arrows or not entities:
        return ArrowAssignment(assigned={}, total=0.0)

    if len(component) <= config.exact_search_limit:
        options = [sorted(affinity[e]) for e in entities]
        best: dict | None = None
        best_total = float("-inf")
        for combo in itertools.product(*options):
            total = sum(affinity[e][a] for e, a in zip(entities, combo))
            if total > best_total:
                best_total = total
                best = dict(zip(entities, combo))
        return ArrowAssignment(assigned=best or {}, total=max(best_total, 0.0))

    assigned = {}
    total = 0.0
    for entity in entities:
        arrow = max(sorted(affinity[entity]), key=lambda a: affinity[entity][a])
        assigned[entity] = arrow
        total += affinity[entity][arrow]
    return ArrowAssignment(assigned=assigned, total=total)


def _role_for(entity_id: str, arrow_id: str, edges, doc: ReactionDocument) -> str:
    """reactant / product / condition for an entity supporting an arrow."""
    reactant_w = 0.0
    product_w = 0.0
    untyped = False
    for edge in edges:
        if edge.relation == EdgeRelation.REACTANT_TO_ARROW and edge.source == entity_id:
            reactant_w += edge.score
        elif edge.relation == EdgeRelation.ARROW_TO_PRODUCT and edge.target == entity_id:
            product_w += edge.score
        elif edge.relation == EdgeRelation.NO_EDGE:
            untyped = True
    if reactant_w > 0.0 or product_w > 0.0:
        return "reactant" if reactant_w >= product_w else "product"
    if untyped:
        arrow = doc.entity(arrow_id)
        tail, head = principal_axis(arrow.region)
        t = axis_parameter(doc.entity(entity_id).centroid, tail, head)
        if t < 0.0:
            return "reactant"
        if t > 1.0:
            return "product"
        return "condition"
    return "condition"


def _reading_key(entity_id: str, doc: ReactionDocument):
    cx, cy = doc.entity(entity_id).centroid
    return (cy, cx, entity_id)


def infer_reactions(fused: FusedGraph, doc: ReactionDocument, config: ReasoningConfig) -> list[Reaction]:
    """Turn the fused graph into candidate reactions, one pass, deterministic."""
    reactions: list[Reaction] = []
    for component in connected_components(fused):
        members = set(component)
        arrows, affinity, edges_by_pair = _arrow_affinities(component, fused, doc)
        if arrows:
            assignment = assign_entities_to_arrows(component, fused, doc, config)
            per_arrow: dict[str, dict[str, list[str]]] = {
                a: {"reactant": [], "product": [], "condition": []} for a in arrows
            }
            per_arrow_score: dict[str, float] = {a: 0.0 for a in arrows}
            for entity_id in sorted(assignment.assigned, key=lambda e: _reading_key(e, doc)):
                arrow_id = assignment.assigned[entity_id]
                role = _role_for(entity_id, arrow_id, edges_by_pair[(entity_id, arrow_id)], doc)
                per_arrow[arrow_id][role].append(entity_id)
                per_arrow_score[arrow_id] += affinity[entity_id][arrow_id]
            for arrow_id in arrows:
                roles = per_arrow[arrow_id]
                candidate = _finalize_candidate(
                    roles["reactant"],
                    roles["product"],
                    roles["condition"],
                    [arrow_id],
                    per_arrow_score[arrow_id],
                    component,
                    fused,
                    doc,
                )
                if candidate is not None:
                    reactions.append(candidate)
        else:
            reactions.extend(_arrowless_candidates(component, fused, doc))
    reactions.sort(key=lambda r: (-r.score, _reading_key(r.reactants[0], doc)))
    return reactions


def _finalize_candidate(
    reactants, products, conditions, arrows, score, component, fused, doc
) -> Reaction | None:
    """Attach typed-condition entities, validate, and build the reaction."""
    conditions = list(conditions)
    reactant_set = set(reactants)
    product_set = set(products)
    for edge in fused.edges:
        if edge.source not in component or edge.target not in component:
            continue
        if edge.relation == EdgeRelation.REACTANT_TO_COND and edge.source in reactant_set:
            candidate = edge.target
        elif edge.relation == EdgeRelation.COND_TO_PRODUCT and edge.target in product_set:
            candidate = edge.source
        else:
            continue
        if candidate in reactant_set or candidate in product_set or candidate in conditions:
            continue
        if doc.entity(candidate).kind == EntityKind.ARROW:
            continue
        conditions.append(candidate)
        score += edge.score
    if not reactants or not products:
        return None
    condition_molecules = any(
        doc.entity(c).kind == EntityKind.MOLECULE for c in conditions
    )
    try:
        return Reaction(
            reactants=tuple(reactants),
            products=tuple(products),
            conditions=tuple(conditions),
            arrows=tuple(arrows),
            score=score,
            condition_molecules=condition_molecules,
        )
    except ConstraintError:
        return None


def _arrowless_candidates(component, fused: FusedGraph, doc: ReactionDocument) -> list[Reaction]:
    """Candidates from reactant->product hypothesis edges alone.

    Edges group when they share a source or share a target (parallel
    chains stay separate reactions).
    """
    members = set(component)
    r2p = [
        e
        for e in fused.edges
        if e.relation == EdgeRelation.REACTANT_TO_PRODUCT
        and e.source in members
        and e.target in members
    ]
    if not r2p:
        return []
    parent = list(range(len(r2p)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(len(r2p)):
        for j in range(i + 1, len(r2p)):
            if r2p[i].source == r2p[j].source or r2p[i].target == r2p[j].target:
                parent[find(i)] = find(j)

    groups: dict[int, list[FusedEdge]] = {}
    for i, edge in enumerate(r2p):
        groups.setdefault(find(i), []).append(edge)

    reactions = []
    for edges in groups.values():
        sources: list[str] = []
        targets: list[str] = []
        score = 0.0
        for edge in sorted(edges, key=lambda e: (e.source, e.target)):
            if edge.source not in sources:
                sources.append(edge.source)
            if edge.target not in targets:
                targets.append(edge.target)
            score += edge.score
        # an entity acting as source and target within one group stays a reactant
        targets = [t for t in targets if t not in sources]
        candidate = _finalize_candidate(sources, targets, [], [], score, component, fused, doc)
        if candidate is not None:
            reactions.append(candidate)
    return reactions
