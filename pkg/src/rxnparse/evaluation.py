"""Hard/Soft-match evaluation of predicted reactions against ground truth.

Two entities match when their IoU strictly exceeds the threshold
(default 0.5) and their kinds agree. A predicted reaction hard-matches
a ground-truth reaction when its reactant, condition and product sets
each admit a perfect one-to-one matching (equal cardinalities, every
member paired); the soft criterion restricts both sides to
molecule-kind reactants and products and ignores conditions entirely,
so every hard match is also a soft match. Reaction sets are then
aligned by maximum bipartite matching, which makes the score invariant
to reaction ordering; precision, recall and F1 follow, with the
conventions P=1 when nothing was predicted and nothing matched (and
recall likewise for empty ground truth).
"""

from __future__ import annotations

from dataclasses import dataclass

from .reactions import BoxedMember, BoxedReaction
from .entities import EntityKind
from .geometry import region_iou


class AlignmentError(ValueError):
    """Corpus document ids do not line up between ground truth and predictions."""


@dataclass(frozen=True)
class MatchReport:
    criterion: str
    precision: float
    recall: float
    f1: float
    matched_pairs: tuple[tuple[int, int], ...]
    gt_count: int
    pred_count: int
    matched: int
    per_layout: dict | None = None

    def to_dict(self) -> dict:
        data = {
            "criterion": self.criterion,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "counts": {"gt": self.gt_count, "pred": self.pred_count, "matched": self.matched},
            "matched_pairs": [list(p) for p in self.matched_pairs],
        }
        if self.per_layout is not None:
            data["per_layout"] = {
                layout: {"precision": p, "recall": r, "f1": f, "counts": dict(c)}
                for layout, (p, r, f, c) in self.per_layout.items()
            }
        return data


def entities_match(a, b, threshold: float = 0.5, polygon: bool = True) -> bool:
    """IoU strictly above the threshold; exactly at the threshold is a miss."""
    return region_iou(a, b, polygon=polygon) > threshold


def _kuhn_max_matching(n_left: int, n_right: int, adjacency) -> dict[int, int]:
    """Maximum bipartite matching; returns left -> right assignment."""
    match_right: dict[int, int] = {}

    def try_assign(left: int, seen: set[int]) -> bool:
        for right in adjacency[left]:
            if right in seen:
                continue
            seen.add(right)
            if right not in match_right or try_assign(match_right[right], seen):
                match_right[right] = left
                return True
        return False

    for left in range(n_left):
        try_assign(left, set())
    return {left: right for right, left in match_right.items()}


def _role_saturating_match(pred_members, gt_members, threshold: float, polygon: bool) -> bool:
    """Perfect one-to-one matchability of two member sets."""
    if len(pred_members) != len(gt_members):
        return False
    if not pred_members:
        return True
    adjacency = []
    for p in pred_members:
        row = [
            g
            for g in range(len(gt_members))
            if p.kind == gt_members[g].kind
            and entities_match(p.region, gt_members[g].region, threshold, polygon)
        ]
        adjacency.append(row)
    matching = _kuhn_max_matching(len(pred_members), len(gt_members), adjacency)
    return len(matching) == len(pred_members)


def reaction_matches_hard(
    pred: BoxedReaction, gt: BoxedReaction, threshold: float = 0.5, polygon: bool = True
) -> bool:
    """All reactants, conditions and products must match one-to-one."""
    return (
        _role_saturating_match(pred.reactants, gt.reactants, threshold, polygon)
        and _role_saturating_match(pred.conditions, gt.conditions, threshold, polygon)
        and _role_saturating_match(pred.products, gt.products, threshold, polygon)
    )


def _molecules_only(members) -> tuple[BoxedMember, ...]:
    return tuple(m for m in members if m.kind == EntityKind.MOLECULE)


def reaction_matches_soft(
    pred: BoxedReaction, gt: BoxedReaction, threshold: float = 0.5, polygon: bool = True
) -> bool:
    """Molecule-kind reactants and products only; text and conditions ignored."""
    return _role_saturating_match(
        _molecules_only(pred.reactants), _molecules_only(gt.reactants), threshold, polygon
    ) and _role_saturating_match(
        _molecules_only(pred.products), _molecules_only(gt.products), threshold, polygon
    )


_CRITERIA = {"hard": reaction_matches_hard, "soft": reaction_matches_soft}


def _prf(gt_count: int, pred_count: int, matched: int) -> tuple[float, float, float]:
    precision = 1.0 if pred_count == 0 and matched == 0 else matched / pred_count
    recall = 1.0 if gt_count == 0 and matched == 0 else matched / gt_count
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def _lexicographic_matching(n_gt: int, n_pred: int, adjacency) -> list[tuple[int, int]]:
    """A maximum matching whose pair list is lexicographically smallest."""

    def max_size(rows, banned_right) -> int:
        adj = [[r for r in rows[i] if r not in banned_right] for i in range(len(rows))]
        return len(_kuhn_max_matching(len(rows), n_pred, adj))

    target = max_size(adjacency, set())
    pairs: list[tuple[int, int]] = []
    used_right: set[int] = set()
    remaining = list(range(n_gt))
    for gt_index in range(n_gt):
        remaining = [i for i in remaining if i != gt_index]
        chosen = None
        for pred_index in adjacency[gt_index]:
            if pred_index in used_right:
                continue
            rest_rows = [adjacency[i] for i in remaining]
            rest = max_size(rest_rows, used_right | {pred_index})
            if len(pairs) + 1 + rest == target:
                chosen = pred_index
                break
        if chosen is not None:
            pairs.append((gt_index, chosen))
            used_right.add(chosen)
        else:
            rest_rows = [adjacency[i] for i in remaining]
            # skipping this gt must still reach the target
            assert len(pairs) + max_size(rest_rows, used_right) == target
    return pairs


def score(
    gt,
    pred,
    criterion: str = "hard",
    threshold: float = 0.5,
    polygon: bool = True,
) -> MatchReport:
    """Score one document's predictions against its ground truth."""
    predicate = _CRITERIA[criterion]
    adjacency = [
        [p for p in range(len(pred)) if predicate(pred[p], gt[g], threshold, polygon)]
        for g in range(len(gt))
    ]
    pairs = _lexicographic_matching(len(gt), len(pred), adjacency)
    matched = len(pairs)
    precision, recall, f1 = _prf(len(gt), len(pred), matched)
    return MatchReport(
        criterion=criterion,
        precision=precision,
        recall=recall,
        f1=f1,
        matched_pairs=tuple(pairs),
        gt_count=len(gt),
        pred_count=len(pred),
        matched=matched,
    )


@dataclass(frozen=True)
class CorpusDocument:
    """One document's reactions plus the metadata the report breaks down on."""

    doc_id: str
    reactions: tuple[BoxedReaction, ...]
    layout: str | None = None


def score_corpus(
    gt_docs,
    pred_docs,
    criterion: str = "hard",
    threshold: float = 0.5,
    polygon: bool = True,
) -> MatchReport:
    """Micro-averaged corpus scores with a per-layout breakdown.

    Documents pair by position and must carry identical ids.
    """
    if len(gt_docs) != len(pred_docs):
        raise AlignmentError(f"{len(gt_docs)} ground-truth vs {len(pred_docs)} predicted documents")
    totals = {"gt": 0, "pred": 0, "matched": 0}
    by_layout: dict[str, dict[str, int]] = {}
    pairs: list[tuple[int, int]] = []
    for gt_doc, pred_doc in zip(gt_docs, pred_docs):
        if gt_doc.doc_id != pred_doc.doc_id:
            raise AlignmentError(f"document id mismatch: {gt_doc.doc_id!r} vs {pred_doc.doc_id!r}")
        report = score(gt_doc.reactions, pred_doc.reactions, criterion, threshold, polygon)
        totals["gt"] += report.gt_count
        totals["pred"] += report.pred_count
        totals["matched"] += report.matched
        pairs.extend(report.matched_pairs)
        if gt_doc.layout is not None:
            bucket = by_layout.setdefault(gt_doc.layout, {"gt": 0, "pred": 0, "matched": 0})
            bucket["gt"] += report.gt_count
            bucket["pred"] += report.pred_count
            bucket["matched"] += report.matched

    precision, recall, f1 = _prf(totals["gt"], totals["pred"], totals["matched"])
    per_layout = {}
    for layout in sorted(by_layout):
        bucket = by_layout[layout]
        p, r, f = _prf(bucket["gt"], bucket["pred"], bucket["matched"])
        per_layout[layout] = (p, r, f, bucket)
    return MatchReport(
        criterion=criterion,
        precision=precision,
        recall=recall,
        f1=f1,
        matched_pairs=tuple(pairs),
        gt_count=totals["gt"],
        pred_count=totals["pred"],
        matched=totals["matched"],
        per_layout=per_layout or None,
    )


def report_table(reports) -> str:
    """Fixed-width text table, one row per report (plus layout rows)."""
    lines = [f"{'Scope':<18} {'Criterion':<10} {'Prec.':>7} {'Recall':>7} {'F1':>7}"]
    lines.append("-" * len(lines[0]))
    for report in reports:
        lines.append(
            f"{'overall':<18} {report.criterion:<10} "
            f"{report.precision * 100:>6.1f} {report.recall * 100:>7.1f} {report.f1 * 100:>7.1f}"
        )
        for layout, (p, r, f, _counts) in (report.per_layout or {}).items():
            lines.append(
                f"{layout:<18} {report.criterion:<10} {p * 100:>6.1f} {r * 100:>7.1f} {f * 100:>7.1f}"
            )
    return "\n".join(lines)
