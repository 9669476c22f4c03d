"""ACL prediction from labelled untrusted contacts and a community cover."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .community import CommunityCover
from .graph import AttributedGraph


class AclError(ValueError):
    pass


def select_untrusted(g: AttributedGraph, attribute: str, value: str, n: int) -> frozenset[int]:
    """The ``n`` highest-degree nodes holding ``attribute=value``; ties go to the lower id."""
    if n < 1:
        raise AclError("n must be at least 1")
    matching = g.nodes_with(attribute, value)
    if len(matching) < n:
        raise AclError(
            f"only {len(matching)} nodes hold {attribute}={value}, {n} requested "
            f"(short by {n - len(matching)})"
        )
    ranked = sorted(matching, key=lambda v: (-g.degree(v), v))
    return frozenset(ranked[:n])


def best_fit_cluster(cover: CommunityCover, untrusted: Iterable[int]) -> frozenset[int]:
    """Cluster holding the most untrusted seeds; ties prefer the smaller cluster, then the lower min id."""
    seeds = set(untrusted)
    if not len(cover):
        raise AclError("empty cover")
    best = min(cover.clusters, key=lambda c: (-len(c & seeds), len(c), min(c)))
    if not best & seeds:
        raise AclError("no candidate community")
    return best


def evaluate_acl(acl: Iterable[int], ground_truth: Iterable[int]) -> tuple[float, float, float]:
    """(precision, recall, F1) of ``acl`` against ``ground_truth``; F1 is the harmonic mean."""
    acl, gt = set(acl), set(ground_truth)
    if not acl:
        raise AclError("empty ACL")
    if not gt:
        raise AclError("empty ground truth")
    hit = len(acl & gt)
    precision = hit / len(acl)
    recall = hit / len(gt)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


@dataclass(frozen=True)
class AclPrediction:
    method: str | None
    untrusted_seeds: frozenset[int]
    acl: frozenset[int]
    ground_truth: frozenset[int]
    precision: float
    recall: float
    f1: float
    cluster_count: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "untrustedSeeds": sorted(self.untrusted_seeds),
            "acl": sorted(self.acl),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "aclSize": len(self.acl),
            "clusterCount": self.cluster_count,
        }


def predict_acl(
    g: AttributedGraph, cover: CommunityCover, attribute: str, value: str, n: int
) -> AclPrediction:
    seeds = select_untrusted(g, attribute, value, n)
    acl = best_fit_cluster(cover, seeds)
    gt = frozenset(g.nodes_with(attribute, value))
    p, r, f = evaluate_acl(acl, gt)
    return AclPrediction(
        cover.method.value if cover.method else None, seeds, acl, gt, p, r, f, len(cover)
    )


def save_acl(pred: AclPrediction, path: str | Path) -> None:
    Path(path).write_text(json.dumps(pred.to_dict()) + "\n", encoding="utf-8")


def load_acl(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
