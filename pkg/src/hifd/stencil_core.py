"""Shared machinery for stencil generation.

Every scheme here determines coefficient polynomials C_o(h) = sum_i
c_{o,i} h^i at a set of grid offsets o by zeroing the coefficients of
h^0..h^{M+1} in expressions of the form sum_o C_o(h) * phi(offset, h),
where phi is a polynomial weight produced by the basis reduction.  This
module builds those h-power moment rows and solves the pinned linear
systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["StencilError", "StencilTemplate", "moment_rows", "solve_pinned"]


class StencilError(RuntimeError):
    """Stencil generation failed (singular or inconsistent pinned system)."""


@dataclass
class StencilTemplate:
    """One grid point's discrete equation.

    ``coeff_polys[o, i]`` is the coefficient of h^i in C_o(h) for offset
    ``offsets[o]``; ``coeff_values`` are the C_o(h) at the concrete h.
    Right-hand-side weight vectors pair with *normalized* jet coefficients
    of the named data: ``rhs_f`` maps a side name ("plus"/"minus") to
    weights over the source index set, ``rhs_g`` maps a datum name
    ("g1".."g4", "gD", "gN") to its weight vector.  Dirichlet rows carry
    ``rhs_const`` instead.
    """

    offsets: tuple
    coeff_polys: np.ndarray
    h: float
    order: int
    M: int
    v0: float = 0.0
    w0: float = 0.0
    rhs_f: dict = field(default_factory=dict)
    rhs_g: dict = field(default_factory=dict)
    rhs_const: float | None = None

    @property
    def coeff_values(self) -> np.ndarray:
        powers = self.h ** np.arange(self.coeff_polys.shape[1])
        return self.coeff_polys @ powers

    def power_sums(self) -> np.ndarray:
        """Sum of c_{o,i} over offsets, per power i (zero for consistent schemes)."""
        return self.coeff_polys.sum(axis=0)


def moment_rows(phi: np.ndarray, lows) -> np.ndarray:
    """Moment matrix rows from per-family h-weight tables.

    ``phi`` has shape (F, n_off, P) with P = M+2 powers; family f
    contributes rows for h^p, p = lows[f]..P-1, with entries
    A[row, o*(P) + i] = phi[f, o, p - i].
    """
    F, n_off, P = phi.shape
    rows = []
    for f in range(F):
        for p in range(lows[f], P):
            row = np.zeros(n_off * P)
            for o in range(n_off):
                lo = max(0, p - P + 1)
                row[o * P + lo: o * P + p + 1] = phi[f, o, p - lo:: -1][: p + 1 - lo]
            rows.append(row)
    return np.asarray(rows)


def solve_pinned(A: np.ndarray, pins: dict, ncol: int, rtol: float = 1e-9) -> np.ndarray:
    """Solve A x = 0 with prescribed entries, checking consistency.

    ``pins`` maps flat column index -> value (one normalization entry plus
    zeros).  Pinned entries are substituted exactly; the remaining least
    squares problem must reproduce the moment system to ``rtol``.
    """
    pinned_cols = sorted(pins)
    vals = np.array([pins[c] for c in pinned_cols])
    free = np.setdiff1d(np.arange(ncol), pinned_cols)
    rhs = -A[:, pinned_cols] @ vals
    sol, _, rank, _ = np.linalg.lstsq(A[:, free], rhs, rcond=None)
    x = np.zeros(ncol)
    x[free] = sol
    x[pinned_cols] = vals
    scale = max(1.0, np.linalg.norm(A, ord="fro") * np.linalg.norm(x))
    res = np.linalg.norm(A @ x) / scale
    if res > rtol:
        raise StencilError(
            f"pinned moment system inconsistent (relative residual {res:.2e}); "
            "the basis reduction or pin set is broken for this configuration")
    if np.linalg.norm(x) < 1e-12:
        raise StencilError("pinned moment system produced a trivial stencil")
    return x
