"""Central-finite-difference verification of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np


@dataclass
class GradCheckReport:
    per_tensor: Dict[str, float]  # max relative error per parameter tensor
    tolerance: float

    @property
    def max_error(self) -> float:
        return max(self.per_tensor.values()) if self.per_tensor else 0.0

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance

    def __str__(self):
        lines = [
            f"{'PASS' if err < self.tolerance else 'FAIL'} {name}: {err:.3e}"
            for name, err in sorted(self.per_tensor.items())
        ]
        lines.append(f"overall: max {self.max_error:.3e} vs tolerance {self.tolerance:.1e}")
        return "\n".join(lines)


def finite_difference_check(
    loss_fn: Callable[[], float],
    params,
    tolerance: float = 1e-4,
    h: float = 1e-5,
    max_entries_per_tensor: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> GradCheckReport:
    """Compare Param.grad (already accumulated) with central differences.

    loss_fn must recompute the full forward pass and loss from the current
    parameter values without touching Param.grad. Entries may be
    subsampled per tensor to bound runtime on larger networks.
    """
    params = list(params)
    if rng is None:
        rng = np.random.default_rng(0)
    per_tensor = {}
    for name, p in params:
        flat = p.value.reshape(-1)
        grad = p.grad.reshape(-1)
        idx = np.arange(flat.size)
        if max_entries_per_tensor is not None and flat.size > max_entries_per_tensor:
            idx = rng.choice(flat.size, size=max_entries_per_tensor, replace=False)
        def entry_error(k, step):
            orig = flat[k]
            flat[k] = orig + step
            up = loss_fn()
            flat[k] = orig - step
            down = loss_fn()
            flat[k] = orig
            numeric = (up - down) / (2 * step)
            # The floor keeps the ratio well defined for parameters whose
            # true gradient is exactly zero (e.g. a linear bias feeding
            # straight into batch norm): there both sides are pure roundoff
            # noise on the order of 1e-11.
            denom = max(abs(numeric), abs(grad[k]), 1e-6)
            return abs(numeric - grad[k]) / denom

        worst = 0.0
        for k in idx:
            # Large steps suffer from curvature and kink straddling, small
            # ones from roundoff; an entry passes if any step size agrees.
            err = entry_error(k, h)
            for smaller in (h / 10.0, h / 100.0):
                if err < tolerance:
                    break
                err = min(err, entry_error(k, smaller))
            worst = max(worst, err)
        per_tensor[name] = worst
    return GradCheckReport(per_tensor, tolerance)
