"""Records produced by the privacy accountant."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class ConversionForm(Enum):
    """How an RDP curve is turned into an (ε, δ) guarantee."""
    STANDARD = "standard"  # ε(α) + log(1/δ)/(α−1)
    SHIFTED = "shifted"    # ε(α−1) + log(1/δ)/(α−1), one order lower

    @property
    def other(self) -> "ConversionForm":
        return ConversionForm.STANDARD if self == ConversionForm.SHIFTED else ConversionForm.SHIFTED


@dataclass(frozen=True)
class RdpCurve:
    """Rényi-DP ε(α) on a finite grid of integer orders ≥ 2."""
    orders: Tuple[int, ...]
    epsilons: Tuple[float, ...]

    def __post_init__(self):
        if len(self.orders) == 0:
            raise ValueError("RDP curve needs at least one order")
        if len(self.orders) != len(self.epsilons):
            raise ValueError(
                f"orders and epsilons differ in length: {len(self.orders)} != {len(self.epsilons)}"
            )
        for alpha in self.orders:
            if int(alpha) != alpha or alpha < 2:
                raise ValueError(f"RDP orders must be integers >= 2, got {alpha}")
        if any(b <= a for a, b in zip(self.orders, self.orders[1:])):
            raise ValueError("RDP orders must be strictly increasing")
        for eps in self.epsilons:
            if not np.isfinite(eps) or eps < 0:
                raise ValueError(f"RDP epsilons must be finite and non-negative, got {eps}")

    @classmethod
    def from_arrays(cls, orders, epsilons) -> "RdpCurve":
        return cls(
            orders=tuple(int(a) for a in orders),
            epsilons=tuple(float(e) for e in epsilons),
        )

    def at(self, alpha: int) -> float:
        """ε at one grid order."""
        try:
            return self.epsilons[self.orders.index(int(alpha))]
        except ValueError:
            raise ValueError(f"order {alpha} is not on the curve grid {self.orders[0]}..{self.orders[-1]}")

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.orders, dtype=np.int64), np.asarray(self.epsilons, dtype=np.float64)


@dataclass(frozen=True)
class DpGuarantee:
    """(ε, δ)-DP statement and the order that achieved it."""
    epsilon: float
    delta: float
    optimal_order: Optional[int] = None
    form: ConversionForm = ConversionForm.STANDARD
