"""Learning-rate schedules"""

import math


def cosine_lr(step: int, total_steps: int, lr_max: float, lr_min: float = 0.0) -> float:
    """Cosine annealing from ``lr_max`` at step 0 to ``lr_min`` at ``total_steps``, no restarts.

    lr = lr_min + ½·(lr_max − lr_min)·(1 + cos(π·step / total_steps))

    Raises:
        ValueError: if ``total_steps < 1`` or ``step`` is outside ``[0, total_steps]``
    """
    if total_steps < 1:
        raise ValueError(f"total steps must be at least 1, got {total_steps}")
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    if step == 0:
        return float(lr_max)
    if step == total_steps:
        return float(lr_min)
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + math.cos(math.pi * step / total_steps))
