"""Vectorized generation of regular-point rows for whole grids at once.

The per-node pipeline (coefficient jet -> basis reduction -> pinned
moment solve -> source weights) is repeated verbatim here with a leading
batch axis: jets evaluate on coordinate arrays, the reduction recurrence
runs on stacked tables, and the pinned systems are solved by batched QR.
Results match the scalar pipeline to roundoff; tests compare both.
"""

from __future__ import annotations

import numpy as np

from .basis import lam, lam_size, lam_thin
from .stencil_core import StencilError
from .stencil_regular import OFFSETS9, REGULAR_PINS

__all__ = ["build_reduction_batch", "regular_rows_batch"]

_M = 6
_NPOW = _M + 2
_NB = 2 * _M + 3


def build_reduction_batch(a_coeffs: np.ndarray, M: int):
    """Stacked reduction tables for a batch of coefficient jets.

    ``a_coeffs`` has shape (B, D+1, D+1) with D >= M (normalized jet
    coefficients).  Returns (u_weights, f_weights) of shapes
    (B, |lam(M+1)|, 2M+3) and (B, |lam(M+1)|, |lam(M-1)|).
    """
    B = a_coeffs.shape[0]
    indices = lam(M + 1)
    basis = lam_thin(M + 1, "V")
    f_idx = lam(M - 1)
    pos = {idx: i for i, idx in enumerate(indices)}
    fpos = {idx: i for i, idx in enumerate(f_idx)}
    bpos = {idx: i for i, idx in enumerate(basis)}

    A = np.zeros((B, M + 3, M + 3))
    d0 = min(a_coeffs.shape[1] - 1, M + 2)
    A[:, : d0 + 1, : d0 + 1] = a_coeffs[:, : d0 + 1, : d0 + 1]
    a00 = A[:, 0, 0]

    uw = np.zeros((B, len(indices), len(basis)))
    fw = np.zeros((B, len(indices), len(f_idx)))
    for idx in basis:
        uw[:, pos[idx], bpos[idx]] = 1.0

    for d in range(2, M + 2):
        for m in range(2, d + 1):
            n = d - m
            p, q = m - 2, n
            row_u = np.zeros((B, len(basis)))
            row_f = np.zeros((B, len(f_idx)))
            row_f[:, fpos[(p, q)]] = -1.0
            for i in range(p + 1):
                for j in range(q + 1):
                    terms = [
                        (A[:, i, j] * ((q - j + 2) * (q - j + 1)), (p - i, q - j + 2)),
                        (A[:, i + 1, j] * ((i + 1) * (p - i + 1)), (p - i + 1, q - j)),
                        (A[:, i, j + 1] * ((j + 1) * (q - j + 1)), (p - i, q - j + 1)),
                    ]
                    if (i, j) != (0, 0):
                        terms.append((A[:, i, j] * ((p - i + 2) * (p - i + 1)), (p - i + 2, q - j)))
                    for w, rs in terms:
                        if not np.any(w):
                            continue
                        r = pos[rs]
                        row_u -= w[:, None] * uw[:, r, :]
                        row_f -= w[:, None] * fw[:, r, :]
            piv = (a00 * (m * (m - 1)))[:, None]
            uw[:, pos[(m, n)], :] = row_u / piv
            fw[:, pos[(m, n)], :] = row_f / piv
    return uw, fw


def _monomials(offsets, M):
    pts = np.asarray(offsets, dtype=float)
    idx = np.array(lam(M + 1))
    return pts[:, 0:1] ** idx[:, 0][None, :] * pts[:, 1:2] ** idx[:, 1][None, :]


def regular_rows_batch(a_field, f_source, xs: np.ndarray, ys: np.ndarray, h: float):
    """Coefficients and right-hand sides of regular rows for many nodes.

    Returns (coeff_values (B, 9), rhs (B,), h0_mass (B,)) for the
    sixth-order compact scheme at each node, with offsets in the OFFSETS9
    order; h0_mass is the absolute sum of the h^0 coefficients, used to
    scale interface rows commensurately.
    """
    B = len(xs)
    a_jets = a_field.jet(xs, ys, _M)
    uw, fw = build_reduction_batch(a_jets.coeffs, _M)

    mono = _monomials(OFFSETS9, _M)  # (9, n_all)
    degs = np.array([m + n for (m, n) in lam(_M + 1)])
    phi = np.zeros((B, _NB, 9, _NPOW))
    for d in range(_NPOW):
        mask = degs == d
        phi[..., d] = np.swapaxes(mono[:, mask] @ uw[:, mask, :], 1, 2)

    lows = [m + n for (m, n) in lam_thin(_M + 1, "V")]
    nrows = sum(_NPOW - lo for lo in lows)
    ncol = 9 * _NPOW
    pin_cols = {}
    for (k, l), i, v in REGULAR_PINS:
        pin_cols[OFFSETS9.index((k, l)) * _NPOW + i] = v
    pinned = sorted(pin_cols)
    vals = np.array([pin_cols[c] for c in pinned])
    free = np.setdiff1d(np.arange(ncol), pinned)
    colpos = {c: k for k, c in enumerate(free)}

    Af = np.zeros((B, nrows, len(free)))
    rhs = np.zeros((B, nrows))
    r = 0
    for c, lo in enumerate(lows):
        for p in range(lo, _NPOW):
            for o in range(9):
                base = o * _NPOW
                for i in range(p + 1):
                    col = base + i
                    if col in pin_cols:
                        if pin_cols[col] != 0.0:
                            rhs[:, r] -= pin_cols[col] * phi[:, c, o, p - i]
                    else:
                        Af[:, r, colpos[col]] = phi[:, c, o, p - i]
            r += 1

    # the pinned systems are consistent with full column rank, so normal
    # equations solve them; accuracy is validated against the scalar path
    # in the tests
    AfT = np.swapaxes(Af, 1, 2)
    G = AfT @ Af
    b = (AfT @ rhs[:, :, None])
    x_free = np.linalg.solve(G, b)[:, :, 0]
    res = (Af @ x_free[:, :, None])[:, :, 0] - rhs
    rel = np.linalg.norm(res, axis=1) / np.maximum(1.0, np.linalg.norm(rhs, axis=1))
    if np.max(rel) > 1e-8:
        raise StencilError(
            f"batched regular moment systems inconsistent (worst residual {np.max(rel):.2e})")
    x = np.zeros((B, ncol))
    x[:, free] = x_free
    x[:, pinned] = vals

    coeff_polys = x.reshape(B, 9, _NPOW)
    cvals = coeff_polys @ (h ** np.arange(_NPOW))

    qmono = _monomials(np.array(OFFSETS9, dtype=float) * h, _M)
    f_jets = f_source.jet(xs, ys, _M - 1)
    f_hat = np.stack([f_jets.coeffs[:, m, n] for (m, n) in lam(_M - 1)], axis=1)
    qv = qmono @ fw  # (B, 9, nf)
    rhs_val = np.sum((cvals[:, None, :] @ qv)[:, 0, :] * f_hat, axis=1)
    h0_mass = np.abs(coeff_polys[:, :, 0]).sum(axis=1)
    return cvals, rhs_val, h0_mass
