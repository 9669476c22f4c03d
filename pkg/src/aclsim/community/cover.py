from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from ..graph import AttributedGraph


class Method(str, Enum):
    MC = "MC"
    LE = "LE"
    LIC = "LiC"

    @classmethod
    def parse(cls, name: str) -> "Method":
        for m in cls:
            if m.value.lower() == str(name).lower():
                return m
        raise ValueError(f"unknown method {name!r}; choose from MC, LE, LiC")


class CoverError(ValueError):
    pass


def _sort_key(cluster: frozenset[int]) -> tuple[int, int]:
    return (-len(cluster), min(cluster))


@dataclass(frozen=True)
class CommunityCover:
    """Node clusters produced by one detection method.

    Clusters are stored sorted by size (descending) then smallest node id.
    """

    clusters: tuple[frozenset[int], ...]
    overlapping: bool
    method: Method | None = None

    @classmethod
    def build(
        cls, clusters: Iterable[Iterable[int]], overlapping: bool = False, method: Method | None = None
    ) -> "CommunityCover":
        cs = [frozenset(c) for c in clusters]
        if any(not c for c in cs):
            raise CoverError("empty cluster")
        if overlapping:
            # identical node sets from different link clusters collapse to one
            cs = list(dict.fromkeys(cs))
        return cls(tuple(sorted(cs, key=_sort_key)), overlapping, method)

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def nodes(self) -> set[int]:
        out: set[int] = set()
        for c in self.clusters:
            out |= c
        return out

    def membership(self) -> dict[int, int]:
        """Node -> cluster index; only meaningful for partitions."""
        if self.overlapping:
            raise CoverError("membership is undefined for overlapping covers")
        return {n: i for i, c in enumerate(self.clusters) for n in c}

    def is_partition_of(self, g: AttributedGraph) -> bool:
        total = sum(len(c) for c in self.clusters)
        nodes = self.nodes()
        return total == len(nodes) and nodes == set(g.nodes)

    def covers(self, g: AttributedGraph) -> bool:
        return self.nodes() == set(g.nodes)

    def to_dict(self) -> dict:
        return {
            "method": self.method.value if self.method else None,
            "overlapping": self.overlapping,
            "clusters": [sorted(c) for c in self.clusters],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CommunityCover":
        method = Method.parse(data["method"]) if data.get("method") else None
        return cls.build(data["clusters"], bool(data["overlapping"]), method)


def save_cover(cover: CommunityCover, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cover.to_dict()) + "\n", encoding="utf-8")


def load_cover(path: str | Path) -> CommunityCover:
    return CommunityCover.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
