from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator


@dataclass(frozen=True)
class GradedBasis:
    """An ordered basis of labelled, homogeneous elements.

    The order is the canonical order used for every matrix built on the basis.

    Parameters
    ----------
    entries
        ``(label, degree)`` pairs. Degrees are lower (homological) degrees.
    """

    entries: tuple[tuple[str, int], ...] = ()
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {label: i for i, (label, _) in enumerate(self.entries)}
        if len(index) != len(self.entries):
            counts = Counter(label for label, _ in self.entries)
            duplicates = sorted(label for label, n in counts.items() if n > 1)
            raise ValueError(f"duplicate basis labels {duplicates}")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.entries)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        return self._index[label]

    def label(self, i: int) -> str:
        return self.entries[i][0]

    def degree(self, i: int) -> int:
        return self.entries[i][1]

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]

    @property
    def degrees(self) -> list[int]:
        return [degree for _, degree in self.entries]
