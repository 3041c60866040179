"""Richardson extrapolation of parametrized limits."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from ..exceptions import InvalidParameters

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Extrapolation:
    """Extrapolated limit of a sequence v(h) as h -> 0, with its diagnostics."""

    limit: float
    order: float
    last_value: float
    steps: Sequence[float]
    values: Sequence[float]


def richardson(steps: Sequence[float], values: Sequence[float], order: float = 1.0) -> float:
    """
    Eliminate the leading h**order error term using the two smallest steps.

    Args:
        steps: Parameter values h_i, ordered from coarse to fine
        values: v(h_i)
        order: Assumed order of the leading error term

    Returns:
        Extrapolated limit
    """
    if len(steps) != len(values) or len(steps) < 2:
        raise InvalidParameters("richardson needs at least two (step, value) pairs")
    h1, h2 = float(steps[-2]), float(steps[-1])
    v1, v2 = float(values[-2]), float(values[-1])
    if h1 == h2:
        raise InvalidParameters("richardson needs distinct steps")
    w1, w2 = h1**order, h2**order
    return (w1 * v2 - w2 * v1) / (w1 - w2)


def empirical_order(
    steps: Sequence[float], values: Sequence[float], limit: Optional[float] = None
) -> float:
    """
    Estimate the convergence order from the finest part of a sequence.

    With a known limit the order comes from the last two errors; otherwise it
    comes from the last two successive differences.

    Returns:
        Estimated order, or nan when the errors are at round-off level
    """
    if limit is not None:
        if len(steps) < 2:
            return float("nan")
        e1 = abs(values[-2] - limit)
        e2 = abs(values[-1] - limit)
        h1, h2 = steps[-2], steps[-1]
    else:
        if len(steps) < 3:
            return float("nan")
        e1 = abs(values[-2] - values[-3])
        e2 = abs(values[-1] - values[-2])
        h1, h2 = steps[-3], steps[-2]
    if e1 <= 0.0 or e2 <= 0.0 or h1 == h2:
        return float("nan")
    return math.log(e1 / e2) / math.log(h1 / h2)


def extrapolate(
    steps: Sequence[float], values: Sequence[float], order: float = 1.0
) -> Extrapolation:
    """First-order Richardson limit together with the estimated order."""
    limit = richardson(steps, values, order)
    measured = empirical_order(steps, values)
    logger.debug(f"Extrapolated {list(values)} -> {limit:.12g} (order {measured:.3g})")
    return Extrapolation(
        limit=limit,
        order=measured,
        last_value=float(values[-1]),
        steps=tuple(float(h) for h in steps),
        values=tuple(float(v) for v in values),
    )
