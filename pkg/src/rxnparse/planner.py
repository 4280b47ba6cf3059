"""Context-conditioned agent routing.

The router maps (query, diagram features, evolving context) to an
ordered plan over the four expert roles. The default policy is a
deterministic keyword rule set so the pipeline runs offline; a VLM
policy delegates the decision to the planner agent and parses its JSON
plan. Either way the emitted plan is canonical: perception roles in
fixed order, ``reaction_expert`` always last.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .agents import AgentClient
from .entities import EntityKind, ReactionDocument
from .geometry import center_distance_normalized

ROLES = ("molecule_expert", "arrow_expert", "text_expert", "reaction_expert")
PERCEPTION_ROLES = ROLES[:3]

_FULL_KEYWORDS = ("reaction", "pathway", "parse")
_MOLECULE_KEYWORDS = ("smiles", "structure only")
_TEXT_KEYWORDS = ("condition", "text")


class PlanParseError(ValueError):
    """A VLM plan response violates the expected JSON structure."""


@dataclass(frozen=True)
class DiagramFeatures:
    """Cheap per-diagram statistics the router conditions on."""

    kind_counts: dict
    arrow_directions: dict
    complexity: float  # entities per proximity component
    text_density: float  # text area / diagram area

    @property
    def total_entities(self) -> int:
        return sum(self.kind_counts.values())


@dataclass(frozen=True)
class AgentPlan:
    steps: tuple[str, ...]
    provenance: str = "rule-policy"

    def __post_init__(self):
        if not self.steps:
            raise ValueError("a plan must contain at least one role")
        if len(set(self.steps)) != len(self.steps):
            raise ValueError("duplicate roles in plan")
        for step in self.steps:
            if step not in ROLES:
                raise ValueError(f"unknown role {step!r}")
        if "reaction_expert" in self.steps and self.steps[-1] != "reaction_expert":
            raise ValueError("reaction_expert must come last")

    @classmethod
    def from_roles(cls, roles, provenance: str = "rule-policy") -> "AgentPlan":
        """Canonical plan for a role set: fixed perception order, reaction last."""
        chosen = set(roles)
        ordered = tuple(role for role in ROLES if role in chosen)
        return cls(steps=ordered, provenance=provenance)


@dataclass
class PlanningContext:
    """Evolving per-document state the router may consult between steps."""

    query: str = ""
    completed: dict = field(default_factory=dict)  # role -> summary stats

    @property
    def step_index(self) -> int:
        return len(self.completed)

    def mark_complete(self, role: str, **stats) -> None:
        self.completed[role] = dict(stats)


def extract_features(doc: ReactionDocument, proximity_threshold: float = 0.35) -> DiagramFeatures:
    """Entity-kind counts, arrow-class histogram, layout complexity, text density."""
    kind_counts = {kind.value: 0 for kind in EntityKind}
    arrow_directions: dict = {}
    text_area = 0.0
    for entity in doc.entities:
        kind_counts[entity.kind.value] += 1
        if entity.kind == EntityKind.ARROW and entity.direction is not None:
            key = entity.direction.value
            arrow_directions[key] = arrow_directions.get(key, 0) + 1
        if entity.kind == EntityKind.TEXT:
            text_area += entity.region.area

    n = len(doc.entities)
    if n == 0:
        complexity = 0.0
    else:
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(n):
            for j in range(i + 1, n):
                d = center_distance_normalized(
                    doc.entities[i].region, doc.entities[j].region, doc.diagram_bounds
                )
                if d < proximity_threshold:
                    parent[find(i)] = find(j)
        components = len({find(i) for i in range(n)})
        complexity = n / components

    diagram_area = doc.diagram_bounds.area
    density = text_area / diagram_area if diagram_area > 0 else 0.0
    return DiagramFeatures(
        kind_counts=kind_counts,
        arrow_directions=arrow_directions,
        complexity=complexity,
        text_density=density,
    )


def _rule_roles(query: str) -> set[str]:
    q = query.lower()
    if any(k in q for k in _FULL_KEYWORDS):
        return set(ROLES)
    roles: set[str] = set()
    if any(k in q for k in _MOLECULE_KEYWORDS):
        roles.add("molecule_expert")
    if any(k in q for k in _TEXT_KEYWORDS):
        roles.add("text_expert")
    if not roles:
        return set(ROLES)  # unknown query: run everything
    return roles


def route(
    query: str,
    features: DiagramFeatures,
    ctx: PlanningContext | None = None,
    policy: str | AgentClient = "rule",
    fallback_to_rule: bool = False,
) -> AgentPlan:
    """Produce an agent plan for a query over a diagram.

    ``policy`` is either the string ``"rule"`` or an
    :class:`~rxnparse.agents.AgentClient` whose planner role answers with
    the plan JSON. A malformed VLM plan raises :class:`PlanParseError`
    unless ``fallback_to_rule`` is set.

    Re-planning hook: when ``ctx`` records completed roles, they are
    dropped from the emitted plan, so calling ``route`` between steps
    yields the remaining schedule.
    """
    if not query:
        raise ValueError("query must be non-empty")
    if isinstance(policy, AgentClient):
        raw = policy.request("planner", {"query": query})
        try:
            plan = plan_from_json(raw, provenance="vlm-policy")
        except PlanParseError:
            if not fallback_to_rule:
                raise
            plan = AgentPlan.from_roles(_rule_roles(query))
        roles = plan.steps
        provenance = plan.provenance
    elif policy == "rule":
        roles = tuple(_rule_roles(query))
        provenance = "rule-policy"
    else:
        raise ValueError(f"unknown policy {policy!r}")

    if ctx is not None and ctx.completed:
        remaining = [r for r in roles if r not in ctx.completed]
        if not remaining:
            raise ValueError("all planned roles already completed")
        roles = remaining
    return AgentPlan.from_roles(roles, provenance=provenance)


def plan_to_json(plan: AgentPlan) -> str:
    flags = {role: role in plan.steps for role in ROLES}
    return json.dumps({"plan": flags}, separators=(",", ":"))


def plan_from_json(text: str, provenance: str = "vlm-policy") -> AgentPlan:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanParseError(f"plan is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("plan"), dict):
        raise PlanParseError('expected {"plan": {...}}')
    flags = data["plan"]
    unknown = set(flags) - set(ROLES)
    if unknown:
        raise PlanParseError(f"unknown roles in plan: {sorted(unknown)}")
    enabled = []
    for role in ROLES:
        value = flags.get(role, False)
        if not isinstance(value, bool):
            raise PlanParseError(f"plan flag {role} must be a boolean")
        if value:
            enabled.append(role)
    if not enabled:
        raise PlanParseError("plan enables no roles")
    return AgentPlan.from_roles(enabled, provenance=provenance)
