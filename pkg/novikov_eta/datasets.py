"""Spectral-sequence datasets shared by the Novikov, motivic and chart layers."""

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from novikov_eta.grading import MultiDegree


@dataclass(frozen=True, order=True)
class SSClass:
    """One basis class of a page."""

    degree: MultiDegree
    name: str = ""
    tower: bool = False

    @property
    def stem(self) -> int:
        return self.degree.stem


@dataclass(frozen=True, order=True)
class SSArrow:
    """A differential or multiplicative structure line between two classes."""

    kind: str
    source: MultiDegree
    target: MultiDegree
    label: str = ""


@dataclass
class SSDataset:
    """A page of a spectral sequence: classes, arrows and free-form metadata."""

    name: str
    context: str
    page: str
    classes: list[SSClass] = field(default_factory=list)
    arrows: list[SSArrow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, degree: MultiDegree, name: str = "", tower: bool = False) -> SSClass:
        item = SSClass(degree, name, tower)
        self.classes.append(item)
        return item

    def add_arrow(self, kind: str, source: MultiDegree, target: MultiDegree, label: str = "") -> SSArrow:
        arrow = SSArrow(kind, source, target, label)
        self.arrows.append(arrow)
        return arrow

    def extend(self, classes: Iterable[SSClass]) -> None:
        self.classes.extend(classes)

    def dimension_table(self, key: Optional[Callable[[MultiDegree], tuple]] = None) -> Counter:
        """Number of classes per key(degree); the key defaults to (s, t, u, w)."""
        key = key or (lambda d: (d.s, d.t, d.u, d.w))
        return Counter(key(item.degree) for item in self.classes)

    def stem_weight_table(self) -> Counter:
        return self.dimension_table(lambda d: (d.stem, d.w))

    def filter(self, predicate: Callable[[SSClass], bool]) -> "SSDataset":
        return SSDataset(
            name=self.name,
            context=self.context,
            page=self.page,
            classes=[item for item in self.classes if predicate(item)],
            arrows=list(self.arrows),
            metadata=dict(self.metadata),
        )

    def sorted_classes(self) -> list[SSClass]:
        return sorted(self.classes, key=lambda item: (item.degree.u, item.degree.s, item.degree.t, item.name))

    def __len__(self) -> int:
        return len(self.classes)
