"""Decision outcomes with checkable evidence.

Every decision procedure in this package returns a Verdict carrying
either a positive certificate (explicit maps that recompose to the
tested map) or a negative certificate (a witness map plus the rank gap
proving it cannot be produced).  Certificates are meant to be re-checked
by the caller; `Verdict` enforces that exactly one side is present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence


@dataclass
class Factorization:
    """f = alpha . beta through `through` (a module or complex)."""

    through: Any
    beta: Any
    alpha: Any


@dataclass
class RankEvidence:
    """`witness` is not in the tested subspace: adding it raises the rank."""

    witness: Any
    subspace_rank: int
    extended_rank: int

    def gap(self) -> int:
        return self.extended_rank - self.subspace_rank


@dataclass
class HomotopyEvidence:
    """A homotopy family with per-degree factorizations through projectives."""

    homotopy: Any
    factorizations: dict


@dataclass
class Verdict:
    holds: bool
    positive_cert: Optional[Any] = None
    negative_cert: Optional[Any] = None

    def __post_init__(self):
        if self.holds and (self.positive_cert is None or self.negative_cert is not None):
            raise ValueError("positive verdict must carry exactly the positive certificate")
        if not self.holds and (self.negative_cert is None or self.positive_cert is not None):
            raise ValueError("negative verdict must carry exactly the negative certificate")

    def __bool__(self) -> bool:
        return self.holds


class InternalConsistencyError(AssertionError):
    """Two independent computation routes disagreed (a bug, never expected)."""
