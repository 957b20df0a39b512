from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class BuildFailure:
    """Negative outcome of a builder. Falsy, so ``if result:`` reads naturally."""

    step: str
    reason: str
    where: object = None
    audits: dict = field(default_factory=dict)

    def __bool__(self):
        return False

    def __str__(self):
        loc = f" at {self.where}" if self.where is not None else ""
        return f"{self.step}{loc}: {self.reason}"


class ScopeError(ValueError):
    pass
