"""Sixth-order 6-point side stencils and 4-point corner stencils for
Dirichlet/Neumann/Robin boundary conditions on the rectangle edges.

Side schemes substitute the boundary-condition derivative tower into the
thin-basis expansion and zero the resulting h-power families.  Corner
schemes impose both side towers on the thin basis simultaneously; the
moment conditions then act on the admissible-jet nullspace of that
constraint system, and a frozen-coefficient companion system guides the
selection so the constant-coefficient limits reproduce the published
closed forms exactly.
"""

from __future__ import annotations

import numpy as np

from .basis import BasisReduction, build_reduction
from .jets import Jet1, Jet2
from .stencil_core import StencilError, StencilTemplate, moment_rows, solve_pinned

__all__ = [
    "SIDE_GEOMETRY",
    "build_corner_stencil",
    "build_side_stencil",
    "dirichlet_row",
]

M_SIDE = 5
NPOW = M_SIDE + 2


def _canon_side_offsets():
    return [(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]


# Pin set on the canonical left-side geometry.  It is the published pin
# list with the (1,0)-offset powers {3,4} replaced by (0,1) powers {3,4}:
# as printed, those pins contradict the published constant-coefficient
# closed forms (which carry h^3 and h^4 terms at offset (1,0)); with the
# replacement the unique pinned solution *is* the closed form.
SIDE_PINS_CANON = [((1, 1), 0, 1.0)] + [
    ((k, l), i, 0.0)
    for (k, l), powers in [
        ((0, 0), (6,)),
        ((0, 1), (3, 4, 5, 6)),
        ((1, -1), (1, 4, 5, 6)),
        ((1, 0), (5, 6)),
        ((1, 1), (2, 3, 4, 5, 6)),
    ]
    for i in powers
]


class SideGeometry:
    """Offsets, orientation, and sign conventions for one rectangle side.

    ``relation_sign`` (s) and ``data_sign`` (t) encode the normalized
    derivative tower  u_hat[first-order index] = s * (alpha tower) + t * g_hat
    implied by du/dn + alpha u = g with the outward normal of that side.
    ``transform`` maps the canonical left-side offsets onto this side.
    """

    def __init__(self, name, orientation, relation_sign, data_sign, transform, interior_step):
        self.name = name
        self.orientation = orientation
        self.relation_sign = relation_sign
        self.data_sign = data_sign
        self.transform = transform
        self.interior_step = interior_step  # unit offset into the domain

    @property
    def offsets(self):
        return tuple(self.transform(k, l) for (k, l) in _canon_side_offsets())

    @property
    def pins(self):
        return [((self.transform(k, l)), i, v) for ((k, l), i, v) in SIDE_PINS_CANON]


SIDE_GEOMETRY = {
    "g1": SideGeometry("g1", "V", +1.0, -1.0, lambda k, l: (k, l), (1, 0)),
    "g2": SideGeometry("g2", "V", -1.0, +1.0, lambda k, l: (-k, l), (-1, 0)),
    "g3": SideGeometry("g3", "H", +1.0, -1.0, lambda k, l: (l, k), (0, 1)),
    "g4": SideGeometry("g4", "H", -1.0, +1.0, lambda k, l: (l, -k), (0, -1)),
}


def _flat(offsets, k, l, i):
    return offsets.index((k, l)) * NPOW + i


def _side_phi(reduction: BasisReduction, offsets, alpha_hat: np.ndarray, sign: float):
    """Combined h-weight families after substituting the boundary tower.

    Family n pairs with the free tangential coefficient of order n:
    phi_n = Ghat_{0th-block, n} + sign * sum_{i>=n} alpha_hat[i-n] *
    Ghat_{1st-block, i}; the highest family (n = M+1) has no tower term.
    """
    M = reduction.M
    gh = reduction.g_h_polys(np.array(offsets, dtype=float))  # (n_off, 2M+3, M+2)
    fams = np.empty((M + 2, len(offsets), M + 2))
    for n in range(M + 2):
        phi = gh[:, n, :].copy()
        if n <= M:
            for i in range(n, M + 1):
                phi += sign * alpha_hat[i - n] * gh[:, (M + 2) + i, :]
        fams[n] = phi
    return fams, gh


def build_side_stencil(side: str, reduction: BasisReduction, alpha_jet: Jet1 | None,
                       h: float) -> StencilTemplate:
    """Sixth-order 6-point stencil for a Neumann or Robin side point.

    ``reduction`` must be oriented V for g1/g2 and H for g3/g4 (M = 5) at
    the side node; ``alpha_jet`` is the Robin coefficient jet along the
    side (None for Neumann).
    """
    geom = SIDE_GEOMETRY[side]
    if reduction.M != M_SIDE or reduction.orientation != geom.orientation:
        raise ValueError(f"side {side} needs a {geom.orientation}-reduction with M = {M_SIDE}")
    alpha_hat = np.zeros(M_SIDE + 1) if alpha_jet is None else alpha_jet.coeffs[: M_SIDE + 1]
    offsets = geom.offsets
    fams, gh = _side_phi(reduction, offsets, alpha_hat, geom.relation_sign)
    A = moment_rows(fams, list(range(M_SIDE + 2)))
    pins = {_flat(offsets, k, l, i): v for ((k, l), i, v) in geom.pins}
    x = solve_pinned(A, pins, 6 * NPOW)
    coeff_polys = x.reshape(6, NPOW)

    cvals = coeff_polys @ h ** np.arange(NPOW)
    pts = np.array(offsets, dtype=float) * h
    rhs_f = cvals @ reduction.q_values(pts)
    # weights pairing with the normalized side-datum jet
    g_block = reduction.g_values(pts)[:, M_SIDE + 2:]  # first-order thin-basis block
    rhs_g = geom.data_sign * (cvals @ g_block)
    return StencilTemplate(
        offsets=offsets, coeff_polys=coeff_polys, h=h, order=6, M=M_SIDE,
        rhs_f={"own": rhs_f}, rhs_g={side: rhs_g})


# -- corners -----------------------------------------------------------------

# Pin sets on canonical corner geometries, taken from the zero patterns of
# the published constant-coefficient corner tables.
CORNER_PINS_RN = [((1, 1), 0, 1.0)] + [
    ((k, l), i, 0.0)
    for (k, l), powers in [
        ((0, 0), (6,)), ((0, 1), (3, 4, 5, 6)), ((1, 0), (5, 6)), ((1, 1), (1, 2, 3, 4, 5, 6)),
    ]
    for i in powers
]
CORNER_PINS_RR = [((1, 1), 0, 1.0)] + [
    ((k, l), i, 0.0)
    for (k, l), powers in [
        ((0, 1), (3, 6)), ((0, 0), (5, 6)), ((1, 1), (1, 2, 3, 5, 6)), ((1, 0), (4, 5, 6)),
    ]
    for i in powers
]


def _corner_constraints(red_v: BasisReduction, alpha_hat, s_x, beta_hat, s_y):
    """Both boundary towers as homogeneous rows over the V thin basis.

    Returns (rows_u, rows_f): the y-side rows eliminate mixed derivatives
    through the reduction, so they carry source weights that must move to
    the data side.
    """
    M = red_v.M
    nb = 2 * M + 3
    bpos = {b: i for i, b in enumerate(red_v.basis)}
    pos = {idx: i for i, idx in enumerate(red_v.all_indices)}
    rows_u = np.zeros((2 * M + 2, nb))
    rows_f = np.zeros((2 * M + 2, red_v.f_weights.shape[1]))
    for n in range(M + 1):
        rows_u[n, bpos[(1, n)]] = 1.0
        for i in range(n + 1):
            rows_u[n, bpos[(0, i)]] -= s_x * alpha_hat[n - i]
    for m in range(M + 1):
        ru = red_v.u_weights[pos[(m, 1)]].copy()
        rf = red_v.f_weights[pos[(m, 1)]].copy()
        for i in range(m + 1):
            ru -= s_y * beta_hat[m - i] * red_v.u_weights[pos[(i, 0)]]
            rf -= s_y * beta_hat[m - i] * red_v.f_weights[pos[(i, 0)]]
        rows_u[M + 1 + m] = ru
        rows_f[M + 1 + m] = rf
    return rows_u, rows_f


def _corner_moments(red_v: BasisReduction, offsets, rows_u, sv_rtol=1e-9):
    """Moment rows over the admissible-jet nullspace of the towers."""
    M = red_v.M
    gh = red_v.g_h_polys(np.array(offsets, dtype=float))
    s = np.linalg.svd(rows_u, compute_uv=False)
    rank = int(np.sum(s > sv_rtol * s[0]))
    N = np.linalg.svd(rows_u)[2][rank:].T
    rows = []
    for c in range(N.shape[1]):
        phi = np.einsum("obd,b->od", gh, N[:, c])[None, :, :]
        rows.append(moment_rows(phi, [0]))
    A = np.vstack(rows) if rows else np.zeros((0, len(offsets) * (M + 2)))
    norms = np.linalg.norm(A, axis=1)
    keep = norms > 1e-11 * max(1.0, norms.max() if len(norms) else 1.0)
    return A[keep]


def build_corner_stencil(x_side: str, y_side: str, red_v: BasisReduction,
                         alpha_jet: Jet1 | None, beta_jet: Jet1 | None,
                         h: float) -> StencilTemplate:
    """Sixth-order 4-point stencil at a non-Dirichlet corner.

    ``x_side`` is g1 or g2, ``y_side`` g3 or g4; ``red_v`` the V-reduction
    (M = 5) at the corner node; alpha/beta the Robin coefficient jets of
    the two sides (None for Neumann).  The variable-coefficient moment
    conditions are enforced exactly; among their solutions, the stencil
    closest to the frozen-coefficient family (which contains the published
    closed forms) is selected.
    """
    gx, gy = SIDE_GEOMETRY[x_side], SIDE_GEOMETRY[y_side]
    if red_v.M != M_SIDE or red_v.orientation != "V":
        raise ValueError(f"corner stencils need a V-reduction with M = {M_SIDE}")
    kx = 1 if x_side == "g1" else -1
    ly = 1 if y_side == "g3" else -1
    offsets = tuple((k, l) for k in (0, kx) for l in (0, ly))
    alpha_hat = np.zeros(M_SIDE + 1) if alpha_jet is None else alpha_jet.coeffs[: M_SIDE + 1]
    beta_hat = np.zeros(M_SIDE + 1) if beta_jet is None else beta_jet.coeffs[: M_SIDE + 1]

    both_robin = alpha_jet is not None and beta_jet is not None
    variable = bool(np.any(alpha_hat[1:]) or np.any(beta_hat[1:])
                    or np.any(red_v.a_jet.coeffs.ravel()[1:]))
    if both_robin and variable and abs(alpha_hat[0] - beta_hat[0]) < 1e-8:
        raise StencilError(
            f"Robin-Robin corner ({x_side} x {y_side}) with equal coefficient values "
            "and non-constant data is unsupported (the corner jet family degenerates)")

    rows_u, rows_f = _corner_constraints(red_v, alpha_hat, gx.relation_sign,
                                         beta_hat, gy.relation_sign)
    A_var = _corner_moments(red_v, offsets, rows_u)

    # frozen-coefficient guide: constant a, alpha, beta at the corner
    a_const = Jet2.constant(red_v.a_jet.value, M_SIDE, red_v.a_jet.center)
    red_c = build_reduction(a_const, M_SIDE, "V")
    al_c = np.zeros(M_SIDE + 1); al_c[0] = alpha_hat[0]
    be_c = np.zeros(M_SIDE + 1); be_c[0] = beta_hat[0]
    rows_u_c, _ = _corner_constraints(red_c, al_c, gx.relation_sign, be_c, gy.relation_sign)
    A_frozen = _corner_moments(red_c, offsets, rows_u_c)

    neumann_y = beta_jet is None and y_side in ("g3", "g4")
    robin_x = alpha_jet is not None
    canon = CORNER_PINS_RN if (robin_x and neumann_y) else CORNER_PINS_RR

    def tf(k, l):
        return (k * kx, l * ly)

    pins = [((tf(k, l)), i, v) for ((k, l), i, v) in canon]
    ncol = 4 * NPOW

    # exact variable moments via their nullspace, then least-squares fit of
    # the frozen system and the pin pattern
    if A_var.size:
        U, s, Vt = np.linalg.svd(A_var)
        rank = int(np.sum(s > 1e-9 * s[0]))
        Nv = Vt[rank:].T
    else:
        Nv = np.eye(ncol)
    P = np.zeros((len(pins), ncol))
    pv = np.zeros(len(pins))
    for r, ((k, l), i, v) in enumerate(pins):
        P[r, _flat(offsets, k, l, i)] = 1.0
        pv[r] = v
    stack = np.vstack([A_frozen, P]) @ Nv
    rhs = np.concatenate([np.zeros(A_frozen.shape[0]), pv])
    y, *_ = np.linalg.lstsq(stack, rhs, rcond=None)
    x = Nv @ y
    norm_col = _flat(offsets, kx, ly, 0)
    if abs(x[norm_col]) < 1e-8 * max(np.abs(x).max(), 1e-30):
        raise StencilError(f"corner stencil normalization degenerate at {x_side} x {y_side}")
    x = x / x[norm_col]
    if A_var.size:
        res = np.linalg.norm(A_var @ x) / max(1.0, np.linalg.norm(A_var) * np.linalg.norm(x))
        if res > 1e-8:
            raise StencilError(f"corner moment residual {res:.2e} at {x_side} x {y_side}")
    coeff_polys = x.reshape(4, NPOW)

    # data maps: rows_u @ u_basis = D_gx gxhat + D_gy gyhat + D_f fhat
    nrows = rows_u.shape[0]
    nf = red_v.f_weights.shape[1]
    D_gx = np.zeros((nrows, M_SIDE + 1))
    D_gy = np.zeros((nrows, M_SIDE + 1))
    for n in range(M_SIDE + 1):
        D_gx[n, n] = gx.data_sign
        D_gy[M_SIDE + 1 + n, n] = gy.data_sign
    D_f = np.vstack([np.zeros((M_SIDE + 1, nf)), -rows_f[M_SIDE + 1:]])
    part = np.linalg.pinv(rows_u)

    cvals = coeff_polys @ h ** np.arange(NPOW)
    pts = np.array(offsets, dtype=float) * h
    CG = cvals @ red_v.g_values(pts)
    CQ = cvals @ red_v.q_values(pts)
    rhs_f = CG @ (part @ D_f) + CQ
    rhs_gx = CG @ (part @ D_gx)
    rhs_gy = CG @ (part @ D_gy)
    return StencilTemplate(
        offsets=offsets, coeff_polys=coeff_polys, h=h, order=6, M=M_SIDE,
        rhs_f={"own": rhs_f}, rhs_g={x_side: rhs_gx, y_side: rhs_gy})


def dirichlet_row(g_value: float) -> StencilTemplate:
    """Identity equation u = g at a Dirichlet boundary node."""
    return StencilTemplate(
        offsets=((0, 0),), coeff_polys=np.array([[1.0]]), h=1.0, order=6, M=0,
        rhs_const=float(g_value))
