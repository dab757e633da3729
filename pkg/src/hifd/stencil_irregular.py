"""Fifth-order 13-point stencils at irregular points (and the third-order
9-point comparison variant), built from a homogeneous moment system.

The coefficient unknowns of all stencil points are stacked into one
vector X; requiring every h-power through h^{M+1} of the transmitted
expansion to vanish yields A X = 0, with plus-side blocks from the
plus-side basis polynomials and minus-side blocks mixed through the
transmission matrix.  For the 13-point scheme A is 36 x 78, reduced to
30 x 72 with the sum-zero identity before solving.

The moment system leaves many degrees of freedom.  Among its null
vectors, the returned stencil pins the center h^0 coefficient and
minimizes the h-weighted tail of the scheme polynomial (the powers
beyond h^{M+1} that the moment conditions do not control); under high
coefficient contrast the transmission entries reach the contrast ratio,
and an uncontrolled tail would inflate the truncation constant by that
factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisReduction, lam, lam_thin
from .interface_geometry import CurveChart, TransmissionTable
from .stencil_core import StencilError, StencilTemplate, moment_rows

__all__ = [
    "IrregularAssembly",
    "OFFSETS13",
    "OFFSETS9",
    "assemble_interface_system",
    "build_irregular_stencil",
    "build_irregular_rhs",
    "build_lone_corner_stencil",
    "lone_corner_special_case",
    "solve_nullspace",
]

# canonical stacking order: nine compact offsets, then the four extensions
OFFSETS13 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1),
             (1, -1), (1, 0), (1, 1), (-2, 0), (2, 0), (0, -2), (0, 2))
OFFSETS9 = OFFSETS13[:9]


@dataclass(frozen=True)
class IrregularAssembly:
    """Stacked homogeneous system for one irregular node."""

    M: int
    offsets: tuple
    sides: tuple           # +1 / -1 per offset
    v0: float
    w0: float
    phi: np.ndarray        # (n_off, 2M+3, M+2) side-resolved h-weight tables
    A: np.ndarray          # full stacked system
    A_reduced: np.ndarray  # after the sum-zero elimination (13-point only)
    eliminated: int        # index of the offset removed by the identity (-1 if none)


def assemble_interface_system(chart: CurveChart, trans: TransmissionTable,
                              red_plus: BasisReduction, red_minus: BasisReduction,
                              sides: dict, offsets=OFFSETS13) -> IrregularAssembly:
    """Stack the moment system A X = 0 for a split stencil.

    ``sides`` maps each offset to +1 (plus region) or -1; plus offsets
    contribute their own basis weights, minus offsets the transmission-
    mixed minus-side weights.
    """
    M = trans.M
    if red_plus.M != M or red_minus.M != M:
        raise ValueError("reduction order must match the transmission order")
    npow = M + 2
    offs = np.array(offsets, dtype=float)
    gh_p = red_plus.g_h_polys(offs, chart.v0, chart.w0)
    gh_m = red_minus.g_h_polys(offs, chart.v0, chart.w0)
    gh_m_mixed = np.einsum("obd,bc->ocd", gh_m, trans.Tu)
    side_vec = np.array([sides[o] for o in offsets])
    phi = np.where((side_vec > 0)[:, None, None], gh_p, gh_m_mixed)
    phi_f = np.transpose(phi, (1, 0, 2))  # (families, offsets, powers)
    lows = [m + n for (m, n) in lam_thin(M + 1, "V")]
    A = moment_rows(phi_f, lows)

    if len(offsets) == 13:
        # the (0,0) family rows restate the per-power sum-zero identity;
        # drop them and eliminate the trailing offset's unknowns
        A_red = A[npow:, :].copy()
        last = (len(offsets) - 1) * npow
        for o in range(len(offsets) - 1):
            A_red[:, o * npow: (o + 1) * npow] -= A_red[:, last: last + npow]
        A_red = A_red[:, :last]
        eliminated = len(offsets) - 1
    else:
        A_red = A
        eliminated = -1
    return IrregularAssembly(M, tuple(offsets), tuple(int(s) for s in side_vec),
                             chart.v0, chart.w0, phi, A, A_red, eliminated)


def _tail_matrix(phi: np.ndarray, M: int, h: float) -> np.ndarray:
    """Rows of the scheme-polynomial powers h^{M+2}..h^{2M+2}, scaled
    relative to h^{M+1} so lower tail powers dominate the minimization."""
    n_off, nb, npow = phi.shape
    rows = []
    for c in range(nb):
        for p in range(M + 2, 2 * M + 3):
            row = np.zeros(n_off * npow)
            w = h ** (p - (M + 1))
            lo = p - (M + 1)  # lowest unknown power contributing; always >= 1 here
            for o in range(n_off):
                row[o * npow + lo: o * npow + npow] = w * phi[o, c, M + 1: lo - 1: -1]
            rows.append(row)
    return np.asarray(rows)


def solve_nullspace(assembly: IrregularAssembly, h: float,
                    h0_abs_sum: float | None = None) -> np.ndarray:
    """Deterministic stencil coefficients from the moment nullspace.

    Pins the center h^0 coefficient to one and minimizes the h-weighted
    tail of the scheme polynomial (the powers beyond h^{M+1} that the
    moment conditions do not control) over the remaining freedom; under
    high coefficient contrast an uncontrolled tail inflates the
    truncation constant by the contrast ratio.  The sum-zero identity is
    re-imposed exactly and the result normalized (unit length, positive
    largest entry, optional h^0 magnitude matching the regular stencils).
    """
    M = assembly.M
    npow = M + 2
    n_off = len(assembly.offsets)
    A_red = assembly.A_reduced
    ncol_red = A_red.shape[1]
    center = assembly.offsets.index((0, 0)) * npow

    s = np.linalg.svd(A_red, compute_uv=False)
    rank = int(np.sum(s > 1e-11 * s[0]))
    N = np.linalg.svd(A_red)[2][rank:].T
    if N.shape[1] == 0:
        raise StencilError("irregular moment system has no nullspace")

    T = _tail_matrix(assembly.phi, M, h)
    e_center = np.zeros(n_off * npow)
    e_center[center] = 1.0
    if assembly.eliminated >= 0:
        last = (n_off - 1) * npow
        T = T[:, :last] - np.tile(T[:, last:], n_off - 1)
        e_center = e_center[:last] - np.tile(e_center[last:], n_off - 1)

    c_vec = N.T @ e_center
    cc = c_vec @ c_vec
    if cc < 1e-24:
        raise StencilError("irregular stencil center pin unattainable; degenerate split")
    y_pin = c_vec / cc
    proj = np.eye(N.shape[1]) - np.outer(c_vec, c_vec) / cc
    TN = T @ N
    w, *_ = np.linalg.lstsq(TN @ proj, -TN @ y_pin, rcond=None)
    x_red = N @ (y_pin + proj @ w)

    if assembly.eliminated >= 0:
        x = np.zeros(n_off * npow)
        x[: ncol_red] = x_red
        # re-impose the sum-zero identity exactly for the eliminated offset
        x[ncol_red:] = -x_red.reshape(n_off - 1, npow).sum(axis=0)
    else:
        x = x_red
    full_res = np.linalg.norm(assembly.A @ x) / max(
        1.0, np.linalg.norm(assembly.A) * np.linalg.norm(x))
    if full_res > 1e-9:
        raise StencilError(f"irregular stencil residual {full_res:.2e} on the full system")

    x = x / np.linalg.norm(x)
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    if h0_abs_sum is not None:
        cur = np.abs(x.reshape(n_off, npow)[:, 0]).sum()
        if cur > 1e-13:
            x = x * (h0_abs_sum / cur)
    return x.reshape(n_off, npow)


def build_irregular_rhs(coeff_polys: np.ndarray, chart: CurveChart,
                        trans: TransmissionTable, red_plus: BasisReduction,
                        red_minus: BasisReduction, sides: tuple, offsets,
                        h: float) -> dict:
    """Right-hand-side weight vectors for a solved irregular stencil.

    Own-side source weights use each side's source polynomials; the
    minus-side accumulation through the transmission adds the jump-data
    and cross-source couplings.  All weights pair with normalized jet
    coefficients at the base point.
    """
    M = trans.M
    npow = M + 2
    cvals = coeff_polys @ h ** np.arange(npow)
    pts = (np.array(offsets, dtype=float) + np.array([chart.v0, chart.w0])) * h
    plus = np.array([s > 0 for s in sides], dtype=float)
    g_minus = red_minus.g_values(pts)
    i_minus = ((1.0 - plus) * cvals) @ g_minus
    j_plus = (plus * cvals) @ red_plus.q_values(pts) + i_minus @ trans.Tfp
    j_minus = ((1.0 - plus) * cvals) @ red_minus.q_values(pts) + i_minus @ trans.Tfm
    return {
        "plus": j_plus,
        "minus": j_minus,
        "gD": i_minus @ trans.TgD,
        "gN": i_minus @ trans.TgN,
    }


def build_irregular_stencil(chart: CurveChart, trans: TransmissionTable,
                            red_plus: BasisReduction, red_minus: BasisReduction,
                            sides: dict, h: float, offsets=OFFSETS13,
                            h0_abs_sum: float | None = None) -> StencilTemplate:
    """Full pipeline: assemble, solve, and attach right-hand-side weights."""
    asm = assemble_interface_system(chart, trans, red_plus, red_minus, sides, offsets)
    coeff_polys = solve_nullspace(asm, h, h0_abs_sum)
    rhs = build_irregular_rhs(coeff_polys, chart, trans, red_plus, red_minus,
                              asm.sides, offsets, h)
    return StencilTemplate(
        offsets=tuple(offsets), coeff_polys=coeff_polys, h=h,
        order=5 if len(offsets) == 13 else 3, M=trans.M,
        v0=chart.v0, w0=chart.w0,
        rhs_f={"plus": rhs["plus"], "minus": rhs["minus"]},
        rhs_g={"gD": rhs["gD"], "gN": rhs["gN"]})


LONE_DIAGONALS = ((-1, -1), (-1, 1), (1, -1), (1, 1))


def lone_corner_special_case(info) -> tuple | None:
    """Detect the split with a single cross-side diagonal point.

    Returns (lone_offset, majority_plus) when exactly one of the four
    diagonal compact offsets lies across the interface and the remaining
    twelve points (including the center) lie on one side; None otherwise.
    """
    for minority, majority_plus in ((info.d_minus + info.e_minus, True),
                                    (info.d_plus + info.e_plus, False)):
        if len(minority) == 1 and minority[0] in LONE_DIAGONALS:
            return minority[0], majority_plus
    return None


def build_lone_corner_stencil(reduction: BasisReduction, lone_offset, h: float,
                              h0_abs_sum: float | None = None) -> StencilTemplate:
    """Sixth-order one-sided 12-point stencil for the lone-corner split.

    The cross-side point is dropped (zero coefficient) and the usual
    one-sided moment conditions with M = 5 are imposed at the node itself
    on the remaining twelve points of the 13-point set; the tail powers
    are minimized as for the interface stencils.
    """
    M = reduction.M
    if M != 5 or reduction.orientation != "V":
        raise ValueError("lone-corner stencils use a V-reduction with M = 5")
    npow = M + 2
    offsets = tuple(o for o in OFFSETS13 if o != tuple(lone_offset))
    if len(offsets) != 12:
        raise ValueError(f"offset {lone_offset} is not one of the 13 stencil points")
    gh = reduction.g_h_polys(np.array(offsets, dtype=float))
    phi = np.transpose(gh, (1, 0, 2))
    lows = [m + n for (m, n) in reduction.basis]
    A = moment_rows(phi, lows)

    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > 1e-11 * s[0]))
    N = np.linalg.svd(A)[2][rank:].T
    center = offsets.index((0, 0)) * npow
    c_vec = N[center, :]
    cc = c_vec @ c_vec
    if cc < 1e-24:
        raise StencilError("lone-corner center pin unattainable")
    y_pin = c_vec / cc
    proj = np.eye(len(c_vec)) - np.outer(c_vec, c_vec) / cc
    T = _tail_matrix(gh, M, h)
    TN = T @ N
    w, *_ = np.linalg.lstsq(TN @ proj, -TN @ y_pin, rcond=None)
    x = N @ (y_pin + proj @ w)
    res = np.linalg.norm(A @ x) / max(1.0, np.linalg.norm(A) * np.linalg.norm(x))
    if res > 1e-9:
        raise StencilError(f"lone-corner moment system unsolvable (residual {res:.2e})")
    x = x / np.linalg.norm(x)
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    if h0_abs_sum is not None:
        cur = np.abs(x.reshape(12, npow)[:, 0]).sum()
        if cur > 1e-13:
            x = x * (h0_abs_sum / cur)
    coeff_polys = x.reshape(12, npow)

    cvals = coeff_polys @ h ** np.arange(npow)
    pts = np.array(offsets, dtype=float) * h
    rhs_f = cvals @ reduction.q_values(pts)
    return StencilTemplate(
        offsets=offsets, coeff_polys=coeff_polys, h=h, order=6, M=M,
        rhs_f={"own": rhs_f})
