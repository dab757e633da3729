"""Sixth-order 9-point stencil for interior points away from the interface."""

from __future__ import annotations

import numpy as np

from .basis import BasisReduction
from .stencil_core import StencilError, StencilTemplate, moment_rows, solve_pinned

__all__ = ["OFFSETS9", "REGULAR_PINS", "build_regular_stencil"]

OFFSETS9 = tuple((k, l) for k in (-1, 0, 1) for l in (-1, 0, 1))

# Normalization c_{-1,-1,0} = 1 plus the published list of zeroed
# coefficients; together they pin the 24-parameter family of sixth-order
# schemes to a unique member.
REGULAR_PINS = [((-1, -1), 0, 1.0)] + [
    ((k, l), i, 0.0)
    for (k, l), powers in [
        ((-1, 0), (7,)),
        ((0, -1), (7,)),
        ((0, 0), (6, 7)),
        ((-1, 1), (1, 6, 7)),
        ((0, 1), (5, 6, 7)),
        ((1, -1), (5, 6, 7)),
        ((1, 0), (4, 5, 6, 7)),
        ((1, 1), (2, 3, 4, 5, 6, 7)),
    ]
    for i in powers
]


def _flat(offsets, npow, k, l, i):
    return offsets.index((k, l)) * npow + i


def build_regular_stencil(reduction: BasisReduction, h: float) -> StencilTemplate:
    """Sixth-order compact stencil from a V-reduction at the center (M = 6).

    The coefficient polynomials zero every h-power through h^7 of
    sum_o C_o(h) G_b(o h) for all thin-basis polynomials G_b, and the
    source weights are C_{f,c} = sum_o C_o(h) Q_c(o h).
    """
    M = reduction.M
    if M != 6 or reduction.orientation != "V":
        raise ValueError("regular stencils use a V-oriented reduction with M = 6")
    npow = M + 2
    gh = reduction.g_h_polys(np.array(OFFSETS9, dtype=float))  # (9, 2M+3, M+2)
    phi = np.transpose(gh, (1, 0, 2))
    lows = [m + n for (m, n) in reduction.basis]
    A = moment_rows(phi, lows)
    pins = {_flat(OFFSETS9, npow, k, l, i): v for ((k, l), i, v) in REGULAR_PINS}
    x = solve_pinned(A, pins, 9 * npow)
    coeff_polys = x.reshape(9, npow)

    cvals = coeff_polys @ h ** np.arange(npow)
    pts = np.array(OFFSETS9, dtype=float) * h
    rhs_f = cvals @ reduction.q_values(pts)
    return StencilTemplate(
        offsets=OFFSETS9, coeff_polys=coeff_polys, h=h, order=6, M=M,
        rhs_f={"own": rhs_f})
