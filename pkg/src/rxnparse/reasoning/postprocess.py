"""Combiner-style post-processing of inferred reactions.

Four refinements, in order: merge pairs of collinear adjacent arrows
with nothing drawn between them (one long arrow split by the detector),
drop structurally invalid candidates, replace identifiers by the
molecules they resolve to (removing the duplicate representation), and
flag conservation: reactions whose sides both consist of parsed
molecules get their element/charge residual computed, and unbalanced
ones are kept but score-penalized for ranking.
"""

from __future__ import annotations

import math
from dataclasses import replace

from ..chem import conservation_residual
from ..config import ReasoningConfig
from ..entities import EntityKind, ReactionDocument
from ..geometry import axis_parameter, lateral_distance, principal_axis
from ..reactions import Conservation, ConstraintError, Reaction

# geometric tolerances for the arrow-merge heuristic, as fractions of the
# diagram diagonal (gap / lateral) or an angle bound
_MERGE_MAX_ANGLE_DEG = 15.0
_MERGE_MAX_GAP = 0.20
_MERGE_MAX_LATERAL = 0.05
_GAP_BAND = 0.08


def post_process(reactions, doc: ReactionDocument, config: ReasoningConfig) -> list[Reaction]:
    merged = _merge_collinear_arrows(list(reactions), doc)
    substituted = [_substitute_identifiers(r, doc) for r in merged]
    valid = [r for r in substituted if r is not None]
    flagged = [_flag_conservation(r, doc, config) for r in valid]
    flagged.sort(key=lambda r: (-r.score, _reading_key(r.reactants[0], doc)))
    return flagged


def _reading_key(entity_id: str, doc: ReactionDocument):
    cx, cy = doc.entity(entity_id).centroid
    return (cy, cx, entity_id)


def _merge_collinear_arrows(reactions: list[Reaction], doc: ReactionDocument) -> list[Reaction]:
    changed = True
    while changed:
        changed = False
        for i in range(len(reactions)):
            for j in range(len(reactions)):
                if i == j:
                    continue
                merged = _try_merge(reactions[i], reactions[j], doc)
                if merged is not None:
                    keep = [r for k, r in enumerate(reactions) if k not in (i, j)]
                    reactions = keep + [merged]
                    changed = True
                    break
            if changed:
                break
    return reactions


def _try_merge(first: Reaction, second: Reaction, doc: ReactionDocument) -> Reaction | None:
    if len(first.arrows) != 1 or len(second.arrows) != 1:
        return None
    a1 = doc.entity(first.arrows[0])
    a2 = doc.entity(second.arrows[0])
    tail1, head1 = principal_axis(a1.region)
    tail2, head2 = principal_axis(a2.region)
    diag = doc.diagram_bounds.diagonal or 1.0

    v1 = (head1[0] - tail1[0], head1[1] - tail1[1])
    v2 = (head2[0] - tail2[0], head2[1] - tail2[1])
    n1 = math.hypot(*v1)
    n2 = math.hypot(*v2)
    if n1 == 0.0 or n2 == 0.0:
        return None
    cos_angle = abs((v1[0] * v2[0] + v1[1] * v2[1]) / (n1 * n2))
    if cos_angle < math.cos(math.radians(_MERGE_MAX_ANGLE_DEG)):
        return None

    # second arrow must sit ahead of the first along the shared axis
    t2 = axis_parameter(a2.centroid, tail1, head1)
    if t2 <= 1.0:
        return None
    if math.dist(head1, tail2) / diag > _MERGE_MAX_GAP:
        return None
    if lateral_distance(a2.centroid, tail1, head1) / diag > _MERGE_MAX_LATERAL:
        return None

    # the gap must be empty: no non-arrow entity projected strictly inside it
    t_gap_start = axis_parameter(head1, tail1, head1)
    t_gap_end = axis_parameter(tail2, tail1, head1)
    lo, hi = min(t_gap_start, t_gap_end), max(t_gap_start, t_gap_end)
    for entity in doc.entities:
        if entity.kind == EntityKind.ARROW:
            continue
        t = axis_parameter(entity.centroid, tail1, head1)
        if lo < t < hi and lateral_distance(entity.centroid, tail1, head1) / diag < _GAP_BAND:
            return None

    def union(a, b):
        out = list(a)
        for item in b:
            if item not in out:
                out.append(item)
        return out

    reactants = union(first.reactants, second.reactants)
    products = [p for p in union(first.products, second.products) if p not in reactants]
    conditions = [
        c for c in union(first.conditions, second.conditions)
        if c not in reactants and c not in products
    ]
    if not reactants or not products:
        return None
    try:
        return Reaction(
            reactants=tuple(reactants),
            products=tuple(products),
            conditions=tuple(conditions),
            arrows=tuple(union(first.arrows, second.arrows)),
            score=first.score + second.score,
            condition_molecules=first.condition_molecules or second.condition_molecules,
        )
    except ConstraintError:
        return None


def _substitute_identifiers(reaction: Reaction, doc: ReactionDocument) -> Reaction | None:
    def resolve(ids):
        out = []
        for entity_id in ids:
            entity = doc.entity(entity_id)
            replacement = entity_id
            if (
                entity.kind == EntityKind.IDENTIFIER
                and entity.resolves_to is not None
                and doc.has_entity(entity.resolves_to)
                and doc.entity(entity.resolves_to).kind == EntityKind.MOLECULE
            ):
                replacement = entity.resolves_to
            if replacement not in out:
                out.append(replacement)
        return out

    reactants = resolve(reaction.reactants)
    products = [p for p in resolve(reaction.products) if p not in reactants]
    conditions = [c for c in resolve(reaction.conditions) if c not in reactants and c not in products]
    if not reactants or not products:
        return None
    try:
        return replace(
            reaction,
            reactants=tuple(reactants),
            products=tuple(products),
            conditions=tuple(conditions),
        )
    except ConstraintError:
        return None


def _flag_conservation(reaction: Reaction, doc: ReactionDocument, config: ReasoningConfig) -> Reaction:
    sides = []
    for ids in (reaction.reactants, reaction.products):
        molecules = []
        for entity_id in ids:
            entity = doc.entity(entity_id)
            if entity.kind != EntityKind.MOLECULE or entity.molecule is None:
                return replace(reaction, conservation=Conservation.UNKNOWN, residual=None)
            molecules.append(entity.molecule)
        sides.append(molecules)
    residual = conservation_residual(sides[0], sides[1])
    if residual[0].is_zero and residual[1] == 0:
        return replace(reaction, conservation=Conservation.BALANCED, residual=residual)
    return replace(
        reaction,
        conservation=Conservation.UNBALANCED,
        residual=residual,
        score=reaction.score * config.conservation_penalty,
    )
