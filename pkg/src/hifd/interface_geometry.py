"""Interface geometry: base points on the curve, local parametrization jets,
and the transmission tables linking the two sides' Taylor data.

At each irregular node a base point is placed on the interface inside the
node's open h-square.  The curve is parametrized there as
(x, y) = (x* + r(t), y* + s(t)) with jet coefficients solved from the
level set, and the two jump identities (in u and in the conormal flux),
differentiated along the curve, determine the minus-side thin-basis
coefficients from plus-side coefficients, sources, and jump data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisReduction, lam, lam_size, lam_thin
from .jets import Jet1, Jet2

__all__ = [
    "CurveChart",
    "GeometryError",
    "TransmissionTable",
    "build_chart",
    "build_transmission",
    "find_base_point",
]


class GeometryError(RuntimeError):
    """Interface geometry could not be resolved at a node."""


def find_base_point(node, psi, h: float):
    """Point on {psi = 0} strictly inside the open h-square around node.

    Newton iteration along the level-set gradient, falling back to
    bisection toward the nearest sign-changing compact neighbor.  Level
    sets may provide their own ``base_point_near`` hook (piecewise curves
    do, to route around corners of the interface).
    """
    xi, yj = node
    hook = getattr(psi, "base_point_near", None)
    if hook is not None:
        bx, by = hook(node, h)
        return _finish_base_point(node, (bx, by), psi, h)

    scale = max(abs(float(psi(xi, yj))), 1e-30)
    p = np.array([xi, yj], dtype=float)
    for _ in range(60):
        v = float(psi(p[0], p[1]))
        if abs(v) <= 1e-14 * max(scale, 1.0) and np.max(np.abs(p - node)) < h:
            break
        j = psi.jet(p[0], p[1], 1)
        g = np.array([j.coeff(1, 0), j.coeff(0, 1)])
        g2 = g @ g
        if g2 < 1e-20:
            break
        p = p - v * g / g2
        if np.max(np.abs(p - node)) >= h:
            break
    else:
        p = np.array([np.inf, np.inf])

    if not (abs(float(psi(p[0], p[1]))) <= 1e-12 * max(scale, 1.0)
            and np.max(np.abs(p - node)) < h):
        p = _bisect_base_point(node, psi, h)
    return _finish_base_point(node, (float(p[0]), float(p[1])), psi, h)


def _bisect_base_point(node, psi, h: float) -> np.ndarray:
    xi, yj = node
    v0 = float(psi(xi, yj))
    best = None
    for k in (-1, 0, 1):
        for l in (-1, 0, 1):
            if k == l == 0:
                continue
            q = np.array([xi + k * h, yj + l * h])
            vq = float(psi(q[0], q[1]))
            if (v0 >= 0) != (vq >= 0):
                d = np.hypot(k, l)
                if best is None or d < best[0]:
                    best = (d, q, vq)
    if best is None:
        raise GeometryError(f"node {node} has no sign change in its compact neighborhood")
    a = np.array([xi, yj], dtype=float)
    b = best[1]
    va = v0
    for _ in range(200):
        m = 0.5 * (a + b)
        vm = float(psi(m[0], m[1]))
        if (va >= 0) != (vm >= 0):
            b = m
        else:
            a, va = m, vm
    return 0.5 * (a + b)


def _finish_base_point(node, point, psi, h: float):
    xi, yj = node
    bx, by = point
    scale = max(abs(float(psi(xi, yj))), 1.0)
    if abs(float(psi(bx, by))) > 1e-10 * scale:
        raise GeometryError(f"base-point search failed near node {node}")
    v0 = (xi - bx) / h
    w0 = (yj - by) / h
    if not (abs(v0) < 1.0 and abs(w0) < 1.0):
        raise GeometryError(f"base point {point} left the open square of node {node}")
    return (bx, by), (v0, w0)


@dataclass(frozen=True)
class CurveChart:
    """Local parametrization of the interface at a base point.

    r_jet and s_jet are displacement jets with r(0) = s(0) = 0 and
    (r'(0), s'(0)) != 0; sigma orients (s'(0), -r'(0)) toward the plus
    region.  psi_jet is the level-set jet at the base point.
    """

    base: tuple
    v0: float
    w0: float
    r_jet: Jet1
    s_jet: Jet1
    psi_jet: Jet2
    sigma: float

    def residual(self) -> float:
        """Max coefficient of psi composed with the parametrization."""
        return float(np.abs(self.psi_jet.compose(self.r_jet, self.s_jet).coeffs).max())


def build_chart(base, offsets, psi_jet: Jet2, M: int) -> CurveChart:
    """Solve the curve jets at a base point, through degree M+1.

    The coordinate with the smaller level-set partial becomes the running
    parameter; the other coordinate's jet is solved order by order from
    psi(x* + r(t), y* + s(t)) = 0.
    """
    px, py = psi_jet.coeff(1, 0), psi_jet.coeff(0, 1)
    if px * px + py * py < 1e-20:
        raise GeometryError(f"degenerate level-set gradient at base point {base}")
    D = M + 1
    t = Jet1.variable(0.0, D)
    if abs(px) >= abs(py):
        r = Jet1(np.zeros(D + 1), D)
        for k in range(1, D + 1):
            F = psi_jet.compose(r, t)
            r = Jet1(r.coeffs - np.eye(D + 1)[k] * (F.coeff(k) / px), D)
        r_jet, s_jet = r, t
    else:
        s = Jet1(np.zeros(D + 1), D)
        for k in range(1, D + 1):
            F = psi_jet.compose(t, s)
            s = Jet1(s.coeffs - np.eye(D + 1)[k] * (F.coeff(k) / py), D)
        r_jet, s_jet = t, s
    tangent_normal = np.array([s_jet.coeff(1), -r_jet.coeff(1)])
    sigma = 1.0 if tangent_normal @ np.array([px, py]) >= 0 else -1.0
    chart = CurveChart(tuple(base), float(offsets[0]), float(offsets[1]),
                       r_jet, s_jet, psi_jet, sigma)
    scale = max(np.abs(psi_jet.coeffs).max(), 1e-30)
    if chart.residual() > 1e-9 * scale:
        raise GeometryError(f"curve parametrization inaccurate at {base}")
    return chart


@dataclass(frozen=True)
class TransmissionTable:
    """Linear map from plus-side data to minus-side thin-basis coefficients.

    All matrices pair with normalized jet coefficients:

        x_minus = Tu x_plus + Tfp fhat_plus + Tfm fhat_minus
                + TgD gDhat + TgN gNhat

    Tu is block-triangular in total order and its (0,0) column is the
    (0,0) coordinate vector; same-order blocks depend only on the curve
    jets and the coefficient values (not derivatives) at the base point.
    """

    M: int
    Tu: np.ndarray   # (2M+3, 2M+3)
    Tfp: np.ndarray  # (2M+3, |lam(M-1)|)
    Tfm: np.ndarray
    TgD: np.ndarray  # (2M+3, |lam(M+1)|)
    TgN: np.ndarray  # (2M+3, |lam(M)|)

    @property
    def basis(self):
        return lam_thin(self.M + 1, "V")


def _poly_jet(weights_col: np.ndarray, M1: int) -> Jet2:
    c = np.zeros((M1 + 1, M1 + 1))
    for i, (m, n) in enumerate(lam(M1)):
        c[m, n] = weights_col[i]
    return Jet2(c, M1)


def build_transmission(chart: CurveChart, red_plus: BasisReduction,
                       red_minus: BasisReduction, M: int) -> TransmissionTable:
    """Assemble the transmission table at a chart's base point.

    Differentiates [u] = g_D through order M+1 and [a grad u . n] = g_N
    through order M along the curve, expresses both sides through their
    reductions, and solves for the minus-side basis.  The normal direction
    is grad(psi)/|grad(psi)| composed along the curve.
    """
    if red_plus.M != M or red_minus.M != M:
        raise ValueError("reduction order must match the transmission order")
    if red_plus.orientation != "V" or red_minus.orientation != "V":
        raise ValueError("transmission tables use V-oriented reductions")
    nb = 2 * M + 3
    r, s = chart.r_jet, chart.s_jet
    gx, gy = chart.psi_jet.dx(), chart.psi_jet.dy()
    gxt, gyt = gx.compose(r, s), gy.compose(r, s)
    nrm = (gxt * gxt + gyt * gyt).sqrt()
    n1, n2 = gxt / nrm, gyt / nrm

    def side_columns(red: BasisReduction):
        a_t = red.a_jet.compose(r, s)
        P = np.zeros((M + 2, nb))
        N = np.zeros((M + 1, nb))
        for b in range(nb):
            Gb = _poly_jet(red.u_weights[:, b], M + 1)
            P[:, b] = Gb.compose(r, s).coeffs[: M + 2]
            flux = a_t * (Gb.dx().compose(r, s) * n1 + Gb.dy().compose(r, s) * n2)
            N[:, b] = flux.coeffs[: M + 1]
        nf = red.f_weights.shape[1]
        FD = np.zeros((M + 2, nf))
        FN = np.zeros((M + 1, nf))
        for c in range(nf):
            Qc = _poly_jet(red.f_weights[:, c], M + 1)
            FD[:, c] = Qc.compose(r, s).coeffs[: M + 2]
            flux = a_t * (Qc.dx().compose(r, s) * n1 + Qc.dy().compose(r, s) * n2)
            FN[:, c] = flux.coeffs[: M + 1]
        return np.vstack([P, N]), np.vstack([FD, FN])

    L_plus, F_plus = side_columns(red_plus)
    L_minus, F_minus = side_columns(red_minus)

    DD = np.zeros((M + 2, lam_size(M + 1)))
    for c, (m, n) in enumerate(lam(M + 1)):
        mono = np.zeros((M + 2, M + 2))
        mono[m, n] = 1.0
        DD[:, c] = Jet2(mono, M + 1).compose(r, s).coeffs[: M + 2]
    DN = np.zeros((M + 1, lam_size(M)))
    for c, (m, n) in enumerate(lam(M)):
        mono = np.zeros((M + 1, M + 1))
        mono[m, n] = 1.0
        DN[:, c] = Jet2(mono, M).compose(r, s).coeffs[: M + 1]

    try:
        Lm_inv = np.linalg.inv(L_minus)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"singular transmission system at {chart.base}") from exc
    cond = np.linalg.cond(L_minus)
    if not np.isfinite(cond) or cond > 1e13:
        raise GeometryError(
            f"ill-conditioned transmission system at {chart.base} (cond ~ {cond:.1e})")

    Tu = Lm_inv @ L_plus
    Tfp = Lm_inv @ F_plus
    Tfm = -(Lm_inv @ F_minus)
    TgD = -(Lm_inv @ np.vstack([DD, np.zeros((M + 1, DD.shape[1]))]))
    TgN = -(Lm_inv @ np.vstack([np.zeros((M + 2, DN.shape[1])), DN]))

    # enforce the structural zeros exactly after checking they hold
    basis = lam_thin(M + 1, "V")
    scale = max(np.abs(Tu).max(), 1.0)
    for i, (mi, ni) in enumerate(basis):
        for j, (mj, nj) in enumerate(basis):
            if mj + nj > mi + ni:
                if abs(Tu[i, j]) > 1e-8 * scale:
                    raise GeometryError(
                        f"transmission triangularity violated at {chart.base}: "
                        f"Tu[{(mi, ni)},{(mj, nj)}] = {Tu[i, j]:.3e}")
                Tu[i, j] = 0.0
    e0 = np.zeros(nb)
    e0[0] = 1.0
    if np.abs(Tu[:, 0] - e0).max() > 1e-8 * scale:
        raise GeometryError(f"transmission (0,0) column malformed at {chart.base}")
    Tu[:, 0] = e0
    return TransmissionTable(M, Tu, Tfp, Tfm, TgD, TgN)
