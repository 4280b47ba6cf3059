"""Spatial-semantic graph: construction and message passing.

Nodes are the document's entities; edges join k-nearest neighbours (by
centroid distance normalized to the diagram diagonal) plus every pair
within a radius. Each node update sums, over its neighbours, a linear
transform of the neighbour state and a linear transform of the edge
feature, through a ReLU:

    h_i <- relu( sum_j ( W1 @ h_j + W2 @ e_ij ) )

A node with no neighbours therefore lands exactly on the zero vector.
After the configured number of layers, each edge is scored by shifted
cosine similarity of its endpoint embeddings, mapped into [0, 1]; a
zero embedding on either end scores the neutral 0.5.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from ..chem import bit_sketch, fingerprint
from ..config import ConfigError, ReasoningConfig
from ..entities import EntityKind, ReactionDocument
from ..geometry import center_distance_normalized, centroid_of

_KINDS = (EntityKind.MOLECULE, EntityKind.ARROW, EntityKind.TEXT, EntityKind.IDENTIFIER)
_KIND_INDEX = {kind: i for i, kind in enumerate(_KINDS)}

SKETCH_DIMS = 16
BASE_NODE_DIMS = 4 + 4 + SKETCH_DIMS  # kind one-hot + box geometry + fp sketch
EDGE_DIMS = 2 + 1 + 1 + 16  # offset + distance + size ratio + kind-pair one-hot


@dataclass(frozen=True)
class SpatialWeights:
    """Per-layer (W1, W2) pairs; loaded from file, never learned here."""

    w1: tuple[np.ndarray, ...]
    w2: tuple[np.ndarray, ...]

    @property
    def layers(self) -> int:
        return len(self.w1)

    @property
    def dim(self) -> int:
        return self.w1[0].shape[0]

    @property
    def edge_dim(self) -> int:
        return self.w2[0].shape[1]

    def validate(self) -> None:
        if len(self.w1) != len(self.w2) or not self.w1:
            raise ConfigError("weights need matching, non-empty W1/W2 lists")
        d = self.w1[0].shape[0]
        e = self.w2[0].shape[1]
        for a, b in zip(self.w1, self.w2):
            if a.shape != (d, d):
                raise ConfigError(f"W1 must be {d}x{d}, got {a.shape}")
            if b.shape != (d, e):
                raise ConfigError(f"W2 must be {d}x{e}, got {b.shape}")


def random_weights(layers: int, dim: int, edge_dim: int = EDGE_DIMS, seed: int = 7) -> SpatialWeights:
    """Seeded fallback weights for offline runs and tests."""
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(dim)
    w1 = tuple(rng.normal(0.0, scale, size=(dim, dim)) for _ in range(layers))
    w2 = tuple(rng.normal(0.0, scale, size=(dim, edge_dim)) for _ in range(layers))
    return SpatialWeights(w1=w1, w2=w2)


def save_weights(weights: SpatialWeights, path) -> None:
    payload = {
        "layers": weights.layers,
        "dim": weights.dim,
        "edge_dim": weights.edge_dim,
        "weights": [
            {"W1": a.tolist(), "W2": b.tolist()} for a, b in zip(weights.w1, weights.w2)
        ],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)


def load_weights(path) -> SpatialWeights:
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    try:
        w1 = tuple(np.asarray(layer["W1"], dtype=float) for layer in payload["weights"])
        w2 = tuple(np.asarray(layer["W2"], dtype=float) for layer in payload["weights"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed weights file {path}: {exc}") from exc
    weights = SpatialWeights(w1=w1, w2=w2)
    weights.validate()
    if weights.layers != payload.get("layers") or weights.dim != payload.get("dim"):
        raise ConfigError(f"weights file {path} disagrees with its own shape header")
    return weights


@dataclass(frozen=True)
class SpatialGraph:
    """Entity graph with node embeddings and per-edge spatial scores."""

    node_ids: tuple[str, ...]
    features: np.ndarray  # (n, dim)
    edges: tuple[tuple[int, int], ...]  # undirected, i < j
    edge_features: dict  # (i, j) ordered pair -> np.ndarray(EDGE_DIMS)
    weights: SpatialWeights
    scores: dict | None = None  # (i, j) i < j -> float, set by propagate

    def neighbor_lists(self) -> list[list[int]]:
        adjacency: list[list[int]] = [[] for _ in self.node_ids]
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        return adjacency

    def score_by_ids(self) -> dict:
        """Edge scores keyed by (entity_id, entity_id), smaller id first."""
        if self.scores is None:
            return {}
        out = {}
        for (i, j), value in self.scores.items():
            a, b = self.node_ids[i], self.node_ids[j]
            out[(min(a, b), max(a, b))] = value
        return out


def _node_features(doc: ReactionDocument, config: ReasoningConfig) -> np.ndarray:
    if config.dim < BASE_NODE_DIMS:
        raise ConfigError(f"dim must be >= {BASE_NODE_DIMS}, got {config.dim}")
    bounds = doc.diagram_bounds
    width = bounds.width or 1.0
    height = bounds.height or 1.0
    rows = []
    for entity in doc.entities:
        kind_onehot = [0.0] * 4
        kind_onehot[_KIND_INDEX[entity.kind]] = 1.0
        cx, cy = entity.centroid
        box = entity.region if hasattr(entity.region, "width") else entity.region.bounding_box()
        geometry = [cx / width, cy / height, box.width / width, box.height / height]
        sketch = [0.0] * SKETCH_DIMS
        if entity.molecule is not None:
            sketch = bit_sketch(fingerprint(entity.molecule, config.fingerprint), SKETCH_DIMS)
        row = kind_onehot + geometry + sketch
        row.extend([0.0] * (config.dim - len(row)))
        rows.append(row)
    return np.asarray(rows, dtype=float) if rows else np.zeros((0, config.dim))


def _edge_feature(doc: ReactionDocument, i: int, j: int) -> np.ndarray:
    a, b = doc.entities[i], doc.entities[j]
    diag = doc.diagram_bounds.diagonal or 1.0
    ax, ay = a.centroid
    bx, by = b.centroid
    offset = [(bx - ax) / diag, (by - ay) / diag]
    distance = center_distance_normalized(a.region, b.region, doc.diagram_bounds)
    total = a.region.area + b.region.area
    ratio = a.region.area / total if total > 0 else 0.5
    pair_onehot = [0.0] * 16
    pair_onehot[_KIND_INDEX[a.kind] * 4 + _KIND_INDEX[b.kind]] = 1.0
    return np.asarray(offset + [distance, ratio] + pair_onehot, dtype=float)


def build_spatial_graph(
    doc: ReactionDocument,
    config: ReasoningConfig,
    weights: SpatialWeights | None = None,
) -> SpatialGraph:
    """Assemble nodes, kNN/radius edges and initial features."""
    if weights is None:
        weights = random_weights(config.layers, config.dim, EDGE_DIMS, seed=config.weights_seed)
    weights.validate()
    if weights.dim != config.dim:
        raise ConfigError(f"weights dim {weights.dim} != config dim {config.dim}")
    if weights.edge_dim != EDGE_DIMS:
        raise ConfigError(f"weights edge dim {weights.edge_dim} != {EDGE_DIMS}")

    n = len(doc.entities)
    node_ids = tuple(e.id for e in doc.entities)
    features = _node_features(doc, config)

    distances = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = center_distance_normalized(
                doc.entities[i].region, doc.entities[j].region, doc.diagram_bounds
            )
            distances[i, j] = distances[j, i] = d

    edge_set: set[tuple[int, int]] = set()
    for i in range(n):
        order = sorted(range(n), key=lambda j: (distances[i, j], j))
        neighbors = [j for j in order if j != i][: config.k_nn]
        for j in neighbors:
            edge_set.add((min(i, j), max(i, j)))
    for i in range(n):
        for j in range(i + 1, n):
            if distances[i, j] <= config.radius:
                edge_set.add((i, j))

    edges = tuple(sorted(edge_set))
    edge_features = {}
    for i, j in edges:
        edge_features[(i, j)] = _edge_feature(doc, i, j)
        edge_features[(j, i)] = _edge_feature(doc, j, i)

    return SpatialGraph(
        node_ids=node_ids,
        features=features,
        edges=edges,
        edge_features=edge_features,
        weights=weights,
    )


def propagate(graph: SpatialGraph, layers: int | None = None) -> SpatialGraph:
    """Run message passing and score edges; returns a new graph."""
    n = len(graph.node_ids)
    steps = graph.weights.layers if layers is None else layers
    h = np.array(graph.features, dtype=float)
    adjacency = graph.neighbor_lists()

    for layer in range(steps):
        w1 = graph.weights.w1[layer % graph.weights.layers]
        w2 = graph.weights.w2[layer % graph.weights.layers]
        new_h = np.zeros_like(h)
        for i in range(n):
            total = np.zeros(h.shape[1])
            for j in adjacency[i]:
                total += w1 @ h[j] + w2 @ graph.edge_features[(i, j)]
            new_h[i] = np.maximum(total, 0.0)
        h = new_h

    scores = {}
    for i, j in graph.edges:
        scores[(i, j)] = _shifted_cosine(h[i], h[j])
    return replace(graph, features=h, scores=scores)


def _shifted_cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.5
    cosine = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(0.0, (1.0 + cosine) / 2.0))
