"""Discrete error norms over all grid nodes.

The l2 norms carry the h^2 area weight and include boundary nodes; the
successive-refinement norms compare a solution against the restriction of
the next finer one to the coarse nodes.
"""

from __future__ import annotations

import numpy as np

__all__ = ["grid_l2", "grid_linf", "relative_l2", "successive_norms", "exact_on_grid"]


def grid_l2(values: np.ndarray, h: float) -> float:
    return float(np.sqrt(h * h * np.sum(np.asarray(values) ** 2)))


def grid_linf(values: np.ndarray) -> float:
    return float(np.max(np.abs(values)))


def relative_l2(u_h: np.ndarray, u_exact: np.ndarray, h: float) -> float:
    denom = grid_l2(u_exact, h)
    if denom == 0.0:
        raise ZeroDivisionError("exact solution vanishes on the grid")
    return grid_l2(u_h - u_exact, h) / denom


def successive_norms(u_h: np.ndarray, u_fine: np.ndarray, h: float) -> tuple[float, float]:
    """(l2, linf) of u_h minus the finer solution at the coincident nodes."""
    n1, n2 = u_h.shape[0] - 1, u_h.shape[1] - 1
    if u_fine.shape != (2 * n1 + 1, 2 * n2 + 1):
        raise ValueError(f"fine grid shape {u_fine.shape} does not refine {u_h.shape}")
    diff = u_h - u_fine[::2, ::2]
    return grid_l2(diff, h), grid_linf(diff)


def exact_on_grid(problem, grid) -> np.ndarray:
    """Exact solution sampled at the nodes, by side of the interface."""
    if problem.exact_plus is None or problem.exact_minus is None:
        raise ValueError("problem has no exact solution")
    X, Y = grid.meshgrid()
    plus = np.asarray(problem.psi(X, Y)) >= 0.0
    return np.where(plus, problem.exact_plus(X, Y), problem.exact_minus(X, Y))
