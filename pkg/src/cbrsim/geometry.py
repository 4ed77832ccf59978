"""2-D positions and the unit-disk radio predicate."""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Position:
    x: float
    y: float


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def in_range(a: Position, b: Position, radio_range: float) -> bool:
    # Inclusive boundary: a link exists at exactly the radio range.
    return distance(a, b) <= radio_range
