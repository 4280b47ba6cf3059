"""Single-link entity clustering.

Clusters are the connected components of the proximity graph whose
edges join entities closer (normalized to the diagram diagonal) than
``tau_cluster``. Localizing the hypothesis agent to one cluster at a
time keeps its context small and stops unrelated reaction steps from
being conflated.
"""

from __future__ import annotations

from ..config import ReasoningConfig
from ..entities import ReactionDocument
from ..geometry import center_distance_normalized


def cluster_entities(doc: ReactionDocument, config: ReasoningConfig) -> tuple[tuple[str, ...], ...]:
    """Partition entity ids; clusters ordered by their top-left-most member."""
    n = len(doc.entities)
    if n == 0:
        return ()
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            d = center_distance_normalized(
                doc.entities[i].region, doc.entities[j].region, doc.diagram_bounds
            )
            if d < config.tau_cluster:
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    def reading_key(idx: int):
        cx, cy = doc.entities[idx].centroid
        return (cy, cx, doc.entities[idx].id)

    for members in groups.values():
        members.sort(key=reading_key)
    ordered = sorted(groups.values(), key=lambda members: reading_key(members[0]))
    return tuple(tuple(doc.entities[i].id for i in members) for members in ordered)
