from __future__ import annotations

from dataclasses import dataclass

from scipy.stats import binomtest


@dataclass(frozen=True)
class Proportion:
    """Estimated rate k/n with a Wilson score interval."""

    k: int
    n: int
    lo: float
    hi: float

    @property
    def p(self) -> float:
        return self.k / self.n if self.n else 0.0

    def below(self, other: "Proportion") -> bool:
        """True when this interval lies entirely under ``other``'s."""
        return self.hi < other.lo


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> Proportion:
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    ci = binomtest(int(k), int(n)).proportion_ci(confidence_level=confidence, method="wilson")
    return Proportion(int(k), int(n), float(ci.low), float(ci.high))
