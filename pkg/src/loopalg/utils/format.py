from typing import Mapping, Sequence

import pandas as pd

from loopalg.linalg.scalars import Scalar


def degree(n: int, shift: int = 0) -> str:
    """A degree, with the loop homology shift spelled out when there is one."""
    if shift:
        return f"{n} (H_{n + shift})"
    return str(n)


def scalar(value: Scalar) -> str:
    return str(value)


def betti_table(betti: Mapping[int, int], title: str = "betti", shift: int = 0) -> str:
    """One row per degree."""
    if not betti:
        return "(empty window)"
    frame = pd.DataFrame(
        {"degree": list(betti), title: list(betti.values())},
    )
    if shift:
        frame.insert(1, f"H_*+{shift}", [n + shift for n in betti])
    return frame.to_string(index=False)


def table(rows: Sequence[Sequence[object]], columns: Sequence[str]) -> str:
    if not rows:
        return "(none)"
    frame = pd.DataFrame([[str(cell) for cell in row] for row in rows], columns=list(columns))
    return frame.to_string(index=False)


def label_chain(chain: Mapping[str, Scalar]) -> str:
    """``2*h1_0 + v^2`` style text for a combination of class labels."""
    if not chain:
        return "0"
    terms = []
    for label, value in chain.items():
        if value == 1:
            terms.append(label)
        elif value == -1:
            terms.append(f"-{label}")
        else:
            terms.append(f"{value}*{label}")
    return " + ".join(terms)
