"""Detected diagram entities and the documents that hold them.

The detection file is a JSON object::

    {
      "image": str?, "width": number, "height": number, "layout": str?,
      "entities": [
        {"id": str, "label": "molecule"|"arrow"|"text"|"identifier",
         "bbox": [4 or 8 numbers],
         "smiles": str?, "text": str?,
         "direction": "forward"|"reversible"|"resonance"?,
         "resolves_to": str?}
      ]
    }

Arrows carry 8-number oriented boxes, everything else 4-number axis
boxes. A SMILES payload that fails to parse does not reject the entity:
it enters the pipeline unparsed (recorded as a document warning) and the
chemistry channel falls back to a neutral score for it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

from .chem import Molecule, SmilesSyntaxError, ValenceError, parse_smiles
from .geometry import (
    AxisBox,
    OrientedQuad,
    Region,
    centroid_of,
    principal_axis,
    region_from_array,
    region_to_array,
)
from .textnorm import Lexicon, normalize_text


class SchemaError(ValueError):
    """Detection file violates the schema; carries a JSON-pointer path."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer


class PayloadError(ValueError):
    """A semantic payload (SMILES) could not be interpreted."""


class EntityKind(str, Enum):
    MOLECULE = "molecule"
    ARROW = "arrow"
    TEXT = "text"
    IDENTIFIER = "identifier"


class ArrowDirection(str, Enum):
    FORWARD = "forward"
    REVERSIBLE = "reversible"
    RESONANCE = "resonance"


LAYOUT_CLASSES = ("single_line", "multiple_line", "tree", "graph")


@dataclass(frozen=True)
class Entity:
    """One detected diagram element: region, kind, semantic payload."""

    id: str
    kind: EntityKind
    region: Region
    smiles: str | None = None
    molecule: Molecule | None = None
    parse_error: str | None = None
    text: str | None = None
    tokens: tuple[str, ...] = ()
    direction: ArrowDirection | None = None
    resolves_to: str | None = None

    def __post_init__(self):
        is_quad = isinstance(self.region, OrientedQuad)
        if (self.kind == EntityKind.ARROW) != is_quad:
            raise ValueError(
                f"entity {self.id!r}: kind {self.kind.value} requires "
                f"{'an oriented quad' if self.kind == EntityKind.ARROW else 'an axis box'}"
            )

    @property
    def centroid(self):
        return centroid_of(self.region)

    @property
    def arrow_axis(self):
        """(tail, head) anchor points along an arrow's long axis.

        The head is the endpoint later in reading order; reversible and
        resonance arrows are symmetric, so the orientation is a
        convention rather than chemistry.
        """
        if self.kind != EntityKind.ARROW:
            raise ValueError(f"entity {self.id!r} is not an arrow")
        return principal_axis(self.region)


@dataclass(frozen=True)
class ReactionDocument:
    """Entity set of one diagram, sorted by reading order (y, then x)."""

    diagram_bounds: AxisBox
    entities: tuple[Entity, ...]
    image_ref: str | None = None
    layout_class: str | None = None
    warnings: tuple[str, ...] = ()
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for entity in self.entities:
            if entity.id in index:
                raise ValueError(f"duplicate entity id {entity.id!r}")
            index[entity.id] = entity
        object.__setattr__(self, "_index", index)

    @property
    def id(self) -> str:
        return self.image_ref or "<document>"

    def entity(self, entity_id: str) -> Entity:
        return self._index[entity_id]

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._index

    def by_kind(self, kind: EntityKind) -> tuple[Entity, ...]:
        return tuple(e for e in self.entities if e.kind == kind)


def _require(condition: bool, message: str, pointer: str) -> None:
    if not condition:
        raise SchemaError(message, pointer)


def _number(value, pointer: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), "expected a number", pointer)
    return float(value)


def load_document(source: bytes | str | dict, lexicon: Lexicon | None = None) -> ReactionDocument:
    """Parse a detection file into a :class:`ReactionDocument`.

    Entities are sorted by region centroid (y, x); regions falling
    outside the diagram bounds are clamped with a warning; SMILES
    payloads are pre-parsed, failures recorded rather than raised.
    """
    if isinstance(source, (bytes, str)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", "") from exc
    else:
        data = source
    _require(isinstance(data, dict), "detection file must be a JSON object", "")

    width = _number(data.get("width"), "/width")
    height = _number(data.get("height"), "/height")
    _require(width > 0 and height > 0, "width and height must be positive", "/width")
    bounds = AxisBox(0.0, 0.0, width, height)

    image_ref = data.get("image")
    _require(image_ref is None or isinstance(image_ref, str), "image must be a string", "/image")
    layout = data.get("layout")
    _require(
        layout is None or layout in LAYOUT_CLASSES,
        f"layout must be one of {LAYOUT_CLASSES}",
        "/layout",
    )

    raw_entities = data.get("entities", [])
    _require(isinstance(raw_entities, list), "entities must be an array", "/entities")

    warnings: list[str] = []
    seen_ids: set[str] = set()
    entities: list[Entity] = []
    for i, raw in enumerate(raw_entities):
        pointer = f"/entities/{i}"
        _require(isinstance(raw, dict), "entity must be an object", pointer)
        entity_id = raw.get("id")
        _require(isinstance(entity_id, str) and entity_id, "entity id must be a non-empty string", f"{pointer}/id")
        _require(entity_id not in seen_ids, f"duplicate entity id {entity_id!r}", f"{pointer}/id")
        seen_ids.add(entity_id)

        label = raw.get("label")
        try:
            kind = EntityKind(label)
        except ValueError:
            raise SchemaError(f"unknown label {label!r}", f"{pointer}/label") from None

        bbox = raw.get("bbox")
        _require(isinstance(bbox, list), "bbox must be an array", f"{pointer}/bbox")
        expected = 8 if kind == EntityKind.ARROW else 4
        _require(
            len(bbox) == expected,
            f"{kind.value} entities need a {expected}-number bbox",
            f"{pointer}/bbox",
        )
        try:
            region = region_from_array([_number(v, f"{pointer}/bbox") for v in bbox])
        except ValueError as exc:
            raise SchemaError(str(exc), f"{pointer}/bbox") from None

        clamped = region.clamped_to(bounds)
        if clamped != region:
            warnings.append(f"entity {entity_id!r}: region clamped to diagram bounds")
            region = clamped

        smiles = raw.get("smiles")
        _require(smiles is None or isinstance(smiles, str), "smiles must be a string", f"{pointer}/smiles")
        text = raw.get("text")
        _require(text is None or isinstance(text, str), "text must be a string", f"{pointer}/text")
        direction_raw = raw.get("direction")
        direction = None
        if direction_raw is not None:
            _require(kind == EntityKind.ARROW, "direction is only valid on arrows", f"{pointer}/direction")
            try:
                direction = ArrowDirection(direction_raw)
            except ValueError:
                raise SchemaError(f"unknown direction {direction_raw!r}", f"{pointer}/direction") from None
        resolves_to = raw.get("resolves_to")
        _require(
            resolves_to is None or isinstance(resolves_to, str),
            "resolves_to must be an entity id string",
            f"{pointer}/resolves_to",
        )

        molecule = None
        parse_error = None
        if smiles is not None:
            try:
                molecule = parse_smiles(smiles)
            except (SmilesSyntaxError, ValenceError) as exc:
                parse_error = str(PayloadError(f"unparseable SMILES {smiles!r}: {exc}"))
                warnings.append(f"entity {entity_id!r}: {parse_error}")

        tokens: tuple[str, ...] = ()
        if text is not None and kind in (EntityKind.TEXT, EntityKind.IDENTIFIER):
            tokens = tuple(normalize_text(text, lexicon))

        try:
            entities.append(
                Entity(
                    id=entity_id,
                    kind=kind,
                    region=region,
                    smiles=smiles,
                    molecule=molecule,
                    parse_error=parse_error,
                    text=text,
                    tokens=tokens,
                    direction=direction,
                    resolves_to=resolves_to,
                )
            )
        except ValueError as exc:
            raise SchemaError(str(exc), pointer) from None

    entities.sort(key=lambda e: (e.centroid[1], e.centroid[0], e.id))
    for entity in entities:
        if entity.resolves_to is not None and entity.resolves_to not in seen_ids:
            warnings.append(
                f"entity {entity.id!r}: resolves_to references unknown entity {entity.resolves_to!r}"
            )

    return ReactionDocument(
        diagram_bounds=bounds,
        entities=tuple(entities),
        image_ref=image_ref,
        layout_class=layout,
        warnings=tuple(warnings),
    )


def entity_to_json(entity: Entity) -> dict:
    obj: dict = {
        "id": entity.id,
        "label": entity.kind.value,
        "bbox": region_to_array(entity.region),
    }
    if entity.smiles is not None:
        obj["smiles"] = entity.smiles
    if entity.text is not None:
        obj["text"] = entity.text
    if entity.direction is not None:
        obj["direction"] = entity.direction.value
    if entity.resolves_to is not None:
        obj["resolves_to"] = entity.resolves_to
    return obj


def document_to_json(doc: ReactionDocument) -> dict:
    """Inverse of :func:`load_document`; load(serialize(load(x))) == load(x)."""
    obj: dict = {
        "width": doc.diagram_bounds.x_max - doc.diagram_bounds.x_min,
        "height": doc.diagram_bounds.y_max - doc.diagram_bounds.y_min,
    }
    if doc.image_ref is not None:
        obj["image"] = doc.image_ref
    if doc.layout_class is not None:
        obj["layout"] = doc.layout_class
    obj["entities"] = [entity_to_json(e) for e in doc.entities]
    return obj


def with_entities(doc: ReactionDocument, entities) -> ReactionDocument:
    """Copy of the document with a replaced entity tuple."""
    return replace(doc, entities=tuple(entities))
