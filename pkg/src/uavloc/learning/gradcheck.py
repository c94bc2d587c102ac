"""Finite-difference validation of the reverse-mode gradients."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from .autodiff import mse_loss
from .nn import Module


def grad_check(model: Module, sample, epsilon: float = 1e-6, floor: float = 1e-6,
               max_per_param: int | None = None, seed: int = 0) -> float:
    """Largest relative gap between analytic and central-difference gradients.

    ``sample`` is an ``(inputs, targets)`` pair scored with the MSE loss. The
    relative error of each entry is ``|a - n| / max(|a| + |n|, floor)``; the
    floor absorbs finite-difference round-off on near-zero gradients.
    ``max_per_param`` subsamples entries of large parameter arrays.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ParameterError("epsilon must lie in [1e-7, 1e-3]")
    x, y = sample
    rng = np.random.default_rng(seed)

    def loss() -> float:
        return float(mse_loss(model.forward(x), y).data)

    model.zero_grad()
    mse_loss(model.forward(x), y).backward()
    worst = 0.0
    for p in model.parameters().values():
        analytic = p.grad.copy()
        flat = p.data.reshape(-1)
        idx = np.arange(flat.size)
        if max_per_param is not None and flat.size > max_per_param:
            idx = rng.choice(flat.size, size=max_per_param, replace=False)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + epsilon
            up = loss()
            flat[i] = orig - epsilon
            down = loss()
            flat[i] = orig
            numeric = (up - down) / (2 * epsilon)
            a = analytic.reshape(-1)[i]
            worst = max(worst, abs(a - numeric) / max(abs(a) + abs(numeric), floor))
    return worst
