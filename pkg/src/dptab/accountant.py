"""Privacy-loss accounting under zero-concentrated differential privacy.

Each noisy release is recorded as a charge of (L2 sensitivity, mechanism
rho); the effective cost of a release is sensitivity^2 * rho, and total
loss composes additively. The ledger is the single gatekeeper: a charge
that would exceed the declared total raises before any noise is drawn.
"""

import math
import threading
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from dptab.domain import TableClass

BUDGET_SLACK = 1e-12
"""Absolute comparison slack absorbing decimal-representation error."""


class NeighborModel(Enum):
    """How neighboring datasets differ.

    Unbounded: one record added or removed. Bounded: one record arbitrarily
    changed, which doubles the effective cost of every charge.
    """

    UNBOUNDED = "unbounded"
    BOUNDED = "bounded"


class BudgetExceededError(Exception):
    """A release was requested beyond the declared privacy-loss budget."""


@dataclass(frozen=True)
class Charge:
    """One recorded release: its sensitivity and mechanism parameter.

    `l2_sensitivity` is the ledger model's bound on the released query
    (sqrt(s) unbounded, sqrt(2s) bounded, for stability s) and
    `rho_parameter` is the rho passed to the noise mechanism.
    """

    level_index: int
    table_class: TableClass
    l2_sensitivity: float
    rho_parameter: float

    @property
    def effective_cost(self) -> float:
        return self.l2_sensitivity**2 * self.rho_parameter


class BudgetLedger:
    """Serialized record of charges against a declared total budget.

    Charges are applied one at a time under a lock; concurrent level
    computations must funnel their charges through this object.
    """

    def __init__(self, declared_total: float, neighbor_model: NeighborModel):
        if declared_total <= 0:
            raise ValueError("declared total budget must be positive")
        self._declared_total = float(declared_total)
        self._neighbor_model = neighbor_model
        self._charges: List[Charge] = []
        self._lock = threading.Lock()

    @property
    def declared_total(self) -> float:
        return self._declared_total

    @property
    def neighbor_model(self) -> NeighborModel:
        return self._neighbor_model

    @property
    def charges(self) -> Tuple[Charge, ...]:
        return tuple(self._charges)

    def charge(
        self,
        level_index: int,
        table_class: TableClass,
        s: int,
        rho: float,
    ) -> Charge:
        """Records one level/table-class release of budget `rho` at stability `s`.

        The mechanism parameter is rho/s and the query sensitivity is
        sqrt(s) (unbounded) or sqrt(2s) (bounded), so the effective cost is
        rho or 2*rho respectively.

        Raises:
            BudgetExceededError: If the charge would exceed the declared
                total; nothing is recorded and no noise may be drawn.
            ValueError: On rho <= 0 or s < 1.
        """
        rho = float(rho)
        if rho <= 0:
            raise ValueError("rho must be positive")
        if s < 1:
            raise ValueError("stability must be at least 1")
        sensitivity = (
            math.sqrt(s)
            if self._neighbor_model is NeighborModel.UNBOUNDED
            else math.sqrt(2 * s)
        )
        entry = Charge(
            level_index=level_index,
            table_class=table_class,
            l2_sensitivity=sensitivity,
            rho_parameter=rho / s,
        )
        with self._lock:
            spent = sum(c.effective_cost for c in self._charges)
            if spent + entry.effective_cost > self._declared_total + BUDGET_SLACK:
                raise BudgetExceededError(
                    f"charging level {level_index} {table_class.value} would "
                    f"spend {spent + entry.effective_cost:.6g} of declared "
                    f"total {self._declared_total:.6g}"
                )
            self._charges.append(entry)
        return entry

    def total_loss(self) -> float:
        """Sum of effective costs under this ledger's neighbor model."""
        with self._lock:
            return sum(c.effective_cost for c in self._charges)

    def report(self) -> dict:
        """Machine-readable accounting: per-charge rows and both totals.

        Bounded loss is exactly double unbounded loss for every charge, so
        both totals are derived from the same charge list regardless of the
        ledger's own model.
        """
        with self._lock:
            charges = list(self._charges)
        model_factor = 2.0 if self._neighbor_model is NeighborModel.BOUNDED else 1.0
        rows = []
        for c in charges:
            unbounded = c.effective_cost / model_factor
            rows.append(
                {
                    "level_index": c.level_index,
                    "table_class": c.table_class.value,
                    "l2_sensitivity": c.l2_sensitivity,
                    "mechanism_rho": c.rho_parameter,
                    "effective_cost_unbounded": unbounded,
                    "effective_cost_bounded": 2.0 * unbounded,
                }
            )
        total_unbounded = sum(r["effective_cost_unbounded"] for r in rows)
        return {
            "neighbor_model": self._neighbor_model.value,
            "declared_total": self._declared_total,
            "charges": rows,
            "total_loss_unbounded": total_unbounded,
            "total_loss_bounded": 2.0 * total_unbounded,
        }
