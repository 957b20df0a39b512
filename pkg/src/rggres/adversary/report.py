from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..graph import SubgraphMask


@dataclass
class AttackReport:
    """Outcome of one edge-deletion strategy.

    ``found`` is False when a witness-based strategy found no witness; the
    mask is then the unchanged base graph.
    """

    strategy: str
    mask: SubgraphMask
    achieved_alpha: float
    disconnected: bool
    component_sizes: list
    witness: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int | None = None
    found: bool = True

    @property
    def max_component(self) -> int:
        return max(self.component_sizes) if self.component_sizes else 0

    def to_text(self) -> str:
        lines = [f"strategy {self.strategy}"]
        for k, v in sorted(self.params.items()):
            lines.append(f"param {k}={v}")
        lines.append(f"seed {self.seed}")
        lines.append(f"found {int(self.found)}")
        lines.append(f"achieved_alpha {self.achieved_alpha!r}")
        lines.append(f"disconnected {int(self.disconnected)}")
        hist = Counter(self.component_sizes)
        lines.append("components " + " ".join(f"{s}:{c}" for s, c in sorted(hist.items())))
        for k, v in sorted(self.witness.items()):
            if isinstance(v, np.ndarray):
                v = " ".join(repr(float(x)) for x in v)
            elif isinstance(v, (list, tuple)):
                v = " ".join(str(x) for x in v)
            lines.append(f"witness {k}={v}")
        return "\n".join(lines) + "\n"


def make_report(strategy: str, base, keep, witness=None, params=None, seed=None, found=True) -> AttackReport:
    mask = SubgraphMask(base, keep)
    lab = mask.kept.components()
    sizes = sorted(np.bincount(lab).tolist(), reverse=True) if len(lab) else []
    return AttackReport(
        strategy=strategy,
        mask=mask,
        achieved_alpha=mask.achieved_alpha(),
        disconnected=len(sizes) > 1,
        component_sizes=sizes,
        witness=dict(witness or {}),
        params=dict(params or {}),
        seed=seed,
        found=found,
    )
