"""Pure postprocessing of released vectors.

Aggregates noisy table bases into complete shells and drops groups without
total-population counts. Nothing here reads microdata, draws randomness, or
charges the budget ledger, so these steps cannot affect the privacy
guarantee.
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from dptab.domain import (
    SHELL_ROWS,
    PopulationGroup,
    T01001Counts,
    TableVariant,
    basis_size,
)


@dataclass(frozen=True)
class TableShell:
    """A complete table: ordered (cell label, value) rows including marginals.

    Every marginal row equals the exact integer sum of its basis children.
    """

    variant: TableVariant
    rows: Tuple[Tuple[str, int], ...]


def build_shell(variant: TableVariant, basis: Sequence[int]) -> TableShell:
    """Expands a basis vector into the full shell of `variant`.

    Marginal cells (including Total) are integer sums over the noisy basis;
    they are never re-noised.

    Raises:
        ValueError: If `basis` does not have exactly basis_size(variant)
            components.
    """
    if len(basis) != basis_size(variant):
        raise ValueError(
            f"{variant.value} basis has {basis_size(variant)} cells, "
            f"got {len(basis)}"
        )
    values = [int(v) for v in basis]
    rows = tuple(
        (label, sum(values[i] for i in indices))
        for label, indices in SHELL_ROWS[variant]
    )
    return TableShell(variant=variant, rows=rows)


def apply_t01001_suppression(
    universe: Iterable[PopulationGroup],
    t01001: T01001Counts,
) -> List[PopulationGroup]:
    """Keeps only population groups present in the total-population input.

    Groups without a count receive no statistics at all; the result is
    deterministic with respect to a fixed count input.
    """
    return [group for group in universe if group in t01001]
