"""Derivative-free minimizers over point configurations.

Two engines shared by the membership, ratio, and Hessian searches:

* ``minimize_configs``: random-restart adaptive random-walk descent, run in
  lockstep across restarts so a whole budget advances with batched numpy
  calls.  Restart r draws every sample from its own generator seeded by
  (seed material..., r), so results are reproducible and restarts could be
  sharded without changing the outcome (merge rule: lowest value, then
  lowest restart index).
* ``coordinate_polish``: deterministic greedy descent trying +-step and
  +-i*step on every coordinate, halving the step when no move improves.
  Monotone by construction.

Configurations are (k, n) complex arrays.  In sphere mode every point is
normalized to the unit sphere (the right domain for bihomogeneous inputs,
whose Gram forms are scale-covariant); otherwise points are kept inside a
ball of the given radius.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

_TINY = 1e-300


@dataclass(frozen=True)
class SearchBudget:
    """Knobs for the stochastic searches.

    restarts x steps is the work per class level; the defaults keep the
    built-in family reproductions at m <= 3 in the seconds range.
    """

    restarts: int = 64
    steps: int = 400
    polish_sweeps: int = 80
    radius: float = 2.0

    def __post_init__(self):
        if self.restarts < 1 or self.steps < 0 or self.polish_sweeps < 0:
            raise ValueError("budget fields must be positive")
        if self.radius <= 0:
            raise ValueError("sampling radius must be positive")


DEFAULT_BUDGET = SearchBudget()


def _project(configs: np.ndarray, sphere: bool, radius: float) -> np.ndarray:
    norms = np.linalg.norm(configs, axis=-1, keepdims=True)
    if sphere:
        return configs / np.maximum(norms, _TINY)
    factor = np.minimum(1.0, radius / np.maximum(norms, _TINY))
    return configs * factor


def _sample_start(gen, k: int, n: int, sphere: bool, radius: float) -> np.ndarray:
    pts = gen.standard_normal((k, n)) + 1j * gen.standard_normal((k, n))
    pts /= np.maximum(np.linalg.norm(pts, axis=-1, keepdims=True), _TINY)
    if sphere:
        return pts
    # uniform radii in the ball of the given radius
    r = radius * gen.random(k) ** (1.0 / (2 * n))
    return pts * r[:, None]


def minimize_configs(
    objective: Callable[[np.ndarray], np.ndarray],
    k: int,
    n: int,
    *,
    budget: SearchBudget = DEFAULT_BUDGET,
    seed_key: Sequence[int],
    sphere: bool,
    certify: Optional[Callable[[np.ndarray], bool]] = None,
    certify_every: int = 25,
) -> Tuple[float, np.ndarray]:
    """Minimize objective((B, k, n)) -> (B,) over configurations.

    When ``certify`` is given, the current best configuration is checked
    every ``certify_every`` steps and the search returns early once the
    callback accepts it.  Returns (best value, best configuration).
    """
    base = [int(s) for s in seed_key]
    gens = [np.random.default_rng(base + [r]) for r in range(budget.restarts)]
    x = np.stack([_sample_start(g, k, n, sphere, budget.radius) for g in gens])
    noise = np.stack([g.standard_normal((budget.steps, k, n, 2)) for g in gens])
    noise = noise[..., 0] + 1j * noise[..., 1]
    val = np.asarray(objective(x), dtype=float)
    step = np.full(budget.restarts, 0.25 * (1.0 if sphere else budget.radius))
    for s in range(budget.steps):
        prop = _project(x + step[:, None, None] * noise[:, s], sphere, budget.radius)
        pv = np.asarray(objective(prop), dtype=float)
        acc = pv < val
        x[acc] = prop[acc]
        val[acc] = pv[acc]
        step = np.where(acc, np.minimum(step * 1.4, 1.0), step * 0.67)
        if certify is not None and (s + 1) % certify_every == 0:
            b = int(np.argmin(val))
            if np.isfinite(val[b]) and val[b] < 0 and certify(x[b]):
                return float(val[b]), x[b].copy()
        if float(step.max()) < 1e-10:
            break
    b = int(np.argmin(val))
    return float(val[b]), x[b].copy()


def coordinate_polish(
    objective: Callable[[np.ndarray], np.ndarray],
    config: np.ndarray,
    *,
    sweeps: int,
    sphere: bool,
    radius: float,
    init_step: float = 0.1,
) -> Tuple[float, np.ndarray]:
    """Deterministic coordinate-wise descent; never increases the objective.

    Each sweep evaluates the four complex cardinal moves on every coordinate
    (batched into one objective call) and takes the best improving one; the
    step halves when a sweep fails, stopping below 1e-9.
    """
    cur = np.array(config, dtype=complex)
    k, n = cur.shape
    cur_val = float(np.asarray(objective(cur[None]))[0])
    directions = np.array([1.0, -1.0, 1j, -1j])
    step = float(init_step)
    moves = 4 * k * n
    for _ in range(sweeps):
        cands = np.repeat(cur[None], moves, axis=0)
        t = 0
        for i in range(k):
            for d in range(n):
                for direction in directions:
                    cands[t, i, d] += step * direction
                    t += 1
        cands = _project(cands, sphere, radius)
        vals = np.asarray(objective(cands), dtype=float)
        b = int(np.argmin(vals))
        if vals[b] < cur_val:
            cur = cands[b]
            cur_val = float(vals[b])
        else:
            step *= 0.5
            if step < 1e-9:
                break
    return cur_val, cur
