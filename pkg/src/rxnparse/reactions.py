"""Reactions and their JSON wire format.

The output format is a JSON array of objects with exactly the keys
``reactants``, ``products``, ``conditions``, ``arrow`` (in that order),
each holding ``{"label": ..., "bbox": [...]}`` items; boxes are
4-number arrays, arrow boxes 8-number arrays, and integer coordinates
stay integers. ``reactants`` and ``products`` must not be empty;
``conditions`` and ``arrow`` may be.

Inside the pipeline a reaction references document entities by id; the
serializer materializes labels and boxes from the document, and
:func:`parse_combiner_response` resolves boxes coming back from an
agent to document entities by best IoU.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

from .chem import ElementCounts
from .entities import Entity, EntityKind, ReactionDocument
from .geometry import Region, region_from_array, region_iou, region_to_array


class ResponseFormatError(ValueError):
    """Agent response is not the expected JSON reaction array."""


class ConstraintError(ValueError):
    """A structurally invalid reaction (empty reactants/products, ...)."""


class ResolutionError(ValueError):
    """A response bbox matches no document entity at the required IoU."""


class Conservation(str, Enum):
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"
    UNKNOWN = "unknown"


RESOLVE_IOU = 0.9


@dataclass(frozen=True)
class Reaction:
    """One parsed reaction: entity-id lists plus bookkeeping.

    Reactants and products may hold molecule, identifier or text
    entities; ``arrows`` only arrow entities. ``score`` accumulates the
    fused evidence supporting the reaction. ``condition_molecules``
    flags reactions whose condition set contains molecule-kind entities
    (species drawn above the arrow).
    """

    reactants: tuple[str, ...]
    products: tuple[str, ...]
    conditions: tuple[str, ...] = ()
    arrows: tuple[str, ...] = ()
    score: float = 1.0
    conservation: Conservation = Conservation.UNKNOWN
    residual: tuple[ElementCounts, int] | None = None
    condition_molecules: bool = False

    def __post_init__(self):
        if not self.reactants or not self.products:
            raise ConstraintError("reactants and products must not be empty")
        overlap = set(self.reactants) & set(self.products)
        if overlap:
            raise ConstraintError(f"entities on both sides of one reaction: {sorted(overlap)}")
        for role in (self.reactants, self.products, self.conditions, self.arrows):
            if len(set(role)) != len(role):
                raise ConstraintError("duplicate entity within one role")

    def member_ids(self) -> tuple[str, ...]:
        return self.reactants + self.products + self.conditions + self.arrows


def _role_to_json(ids, doc: ReactionDocument) -> list[dict]:
    items = []
    for entity_id in ids:
        entity = doc.entity(entity_id)
        items.append({"label": entity.kind.value, "bbox": region_to_array(entity.region)})
    return items


def reaction_to_json(reaction: Reaction, doc: ReactionDocument) -> dict:
    return {
        "reactants": _role_to_json(reaction.reactants, doc),
        "products": _role_to_json(reaction.products, doc),
        "conditions": _role_to_json(reaction.conditions, doc),
        "arrow": _role_to_json(reaction.arrows, doc),
    }


def reactions_to_json(reactions, doc: ReactionDocument, pretty: bool = True) -> str:
    payload = [reaction_to_json(r, doc) for r in reactions]
    if pretty:
        return json.dumps(payload, indent=2)
    return json.dumps(payload, separators=(", ", ": "))


def _resolve_region(kind: EntityKind, region: Region, doc: ReactionDocument) -> Entity:
    best: Entity | None = None
    best_iou = 0.0
    for entity in doc.entities:
        if entity.kind != kind:
            continue
        iou = region_iou(entity.region, region)
        if best is None or iou > best_iou or (iou == best_iou and entity.id < best.id):
            best, best_iou = entity, iou
    if best is None or best_iou < RESOLVE_IOU:
        raise ResolutionError(
            f"no {kind.value} entity matches bbox {region_to_array(region)} "
            f"at IoU >= {RESOLVE_IOU} (best {best_iou:.3f})"
        )
    return best


def _parse_role(items, kind_field: str, doc: ReactionDocument, allow_kinds) -> tuple[str, ...]:
    if not isinstance(items, list):
        raise ResponseFormatError(f"{kind_field} must be an array")
    resolved = []
    for item in items:
        if not isinstance(item, dict) or "label" not in item or "bbox" not in item:
            raise ResponseFormatError(f"{kind_field} items need 'label' and 'bbox'")
        try:
            kind = EntityKind(item["label"])
        except ValueError:
            raise ResponseFormatError(f"unknown label {item['label']!r}") from None
        if kind not in allow_kinds:
            raise ResponseFormatError(f"label {kind.value!r} not allowed in {kind_field}")
        bbox = item["bbox"]
        expected = 8 if kind == EntityKind.ARROW else 4
        if not isinstance(bbox, list) or len(bbox) != expected:
            raise ResponseFormatError(
                f"{kind.value} bbox must have {expected} numbers, got {bbox!r}"
            )
        try:
            region = region_from_array(bbox)
        except (TypeError, ValueError) as exc:
            raise ResponseFormatError(f"bad bbox {bbox!r}: {exc}") from None
        entity = _resolve_region(kind, region, doc)
        if entity.id not in resolved:
            resolved.append(entity.id)
    return tuple(resolved)


_MEMBER_KINDS = (EntityKind.MOLECULE, EntityKind.IDENTIFIER, EntityKind.TEXT)
_REQUIRED_KEYS = ("reactants", "products", "conditions", "arrow")


def parse_combiner_response(raw: str, doc: ReactionDocument) -> list[Reaction]:
    """Parse an agent's reaction array against a document.

    Boxes are matched to document entities of the same kind by best IoU
    (>= 0.9, tolerating slightly perturbed echoes). Raises
    :class:`ResponseFormatError` for malformed JSON or shapes,
    :class:`ConstraintError` for empty reactants/products, and
    :class:`ResolutionError` when a box cannot be grounded.
    """
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ResponseFormatError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise ResponseFormatError("response must be a JSON array of reactions")

    reactions = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise ResponseFormatError(f"reaction {i} is not an object")
        missing = [k for k in _REQUIRED_KEYS if k not in obj]
        if missing:
            raise ResponseFormatError(f"reaction {i} is missing keys {missing}")
        reactants = _parse_role(obj["reactants"], "reactants", doc, _MEMBER_KINDS)
        products = _parse_role(obj["products"], "products", doc, _MEMBER_KINDS)
        conditions = _parse_role(obj["conditions"], "conditions", doc, _MEMBER_KINDS)
        arrows = _parse_role(obj["arrow"], "arrow", doc, (EntityKind.ARROW,))
        if not reactants or not products:
            raise ConstraintError(f"reaction {i}: reactants and products must not be empty")
        confidence = obj.get("confidence", 1.0)
        if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
            raise ResponseFormatError(f"reaction {i}: confidence must be a number")
        try:
            reactions.append(
                Reaction(
                    reactants=reactants,
                    products=products,
                    conditions=conditions,
                    arrows=arrows,
                    score=float(confidence),
                )
            )
        except ConstraintError as exc:
            raise ConstraintError(f"reaction {i}: {exc}") from None
    return reactions


# --- region-level view used by the evaluation harness ---------------------


@dataclass(frozen=True)
class BoxedMember:
    kind: EntityKind
    region: Region


@dataclass(frozen=True)
class BoxedReaction:
    """A reaction as bare (kind, region) members, no document needed."""

    reactants: tuple[BoxedMember, ...]
    products: tuple[BoxedMember, ...]
    conditions: tuple[BoxedMember, ...] = ()
    arrows: tuple[BoxedMember, ...] = ()


def _boxed_role(items) -> tuple[BoxedMember, ...]:
    members = []
    for item in items:
        if not isinstance(item, dict) or "label" not in item or "bbox" not in item:
            raise ResponseFormatError("reaction items need 'label' and 'bbox'")
        try:
            kind = EntityKind(item["label"])
        except ValueError:
            raise ResponseFormatError(f"unknown label {item['label']!r}") from None
        members.append(BoxedMember(kind=kind, region=region_from_array(item["bbox"])))
    return tuple(members)


def boxed_reaction_from_json(obj: dict) -> BoxedReaction:
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise ResponseFormatError(f"reaction is missing keys {missing}")
    return BoxedReaction(
        reactants=_boxed_role(obj["reactants"]),
        products=_boxed_role(obj["products"]),
        conditions=_boxed_role(obj["conditions"]),
        arrows=_boxed_role(obj["arrow"]),
    )


def boxed_reactions_from_json(text: str) -> list[BoxedReaction]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResponseFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise ResponseFormatError("expected a JSON array of reactions")
    return [boxed_reaction_from_json(obj) for obj in data]


def boxed_view(reaction: Reaction, doc: ReactionDocument) -> BoxedReaction:
    def role(ids):
        return tuple(
            BoxedMember(kind=doc.entity(i).kind, region=doc.entity(i).region) for i in ids
        )

    return BoxedReaction(
        reactants=role(reaction.reactants),
        products=role(reaction.products),
        conditions=role(reaction.conditions),
        arrows=role(reaction.arrows),
    )


def with_score(reaction: Reaction, score: float) -> Reaction:
    return replace(reaction, score=score)
