"""Scratch 6: transmission table + 13-point irregular stencil, end to end."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction, lam, lam_size

np.set_printoptions(precision=6, suppress=True, linewidth=220)

M = 4
NB = 2 * M + 3
OFFSETS13 = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1),
             (-2, 0), (2, 0), (0, -2), (0, 2)]


def jet2_of(fn, x0, y0, D):
    return fn(Jet2.variable_x(x0, y0, D), Jet2.variable_y(x0, y0, D))


def table_jet(weights_col, M1):
    """Jet2 of a polynomial given by normalized coefficients over lam(M1)."""
    c = np.zeros((M1 + 1, M1 + 1))
    for i, (m, n) in enumerate(lam(M1)):
        c[m, n] = weights_col[i]
    return Jet2(c, M1)


# ---------- geometry: circle psi = x^2 + y^2 - 2 ----------
def psi_fn(x, y):
    return x * x + y * y - 2


theta = 0.35
bx, by = np.sqrt(2) * np.cos(theta), np.sqrt(2) * np.sin(theta)
psiJ = jet2_of(psi_fn, bx, by, M + 2)

# chart: |psi_x| vs |psi_y| at base
px, py = psiJ.coeff(1, 0), psiJ.coeff(0, 1)
par_by_y = abs(px) >= abs(py)
D = M + 1
t = Jet1.variable(0.0, D)
zero = Jet1.constant(0.0, D)
if par_by_y:
    # x = r(t), y = t
    r = Jet1(np.zeros(D + 1), D)
    for k in range(1, D + 1):
        F = psiJ.compose(r, t)
        r = Jet1(r.coeffs - np.eye(D + 1)[k] * F.coeff(k) / px, D)
    rJet, sJet = r, t
else:
    s = Jet1(np.zeros(D + 1), D)
    for k in range(1, D + 1):
        F = psiJ.compose(t, s)
        s = Jet1(s.coeffs - np.eye(D + 1)[k] * F.coeff(k) / py, D)
    rJet, sJet = t, s
chk = psiJ.compose(rJet, sJet)
print("chart residual coeffs:", np.abs(chk.coeffs).max())

# ---------- manufactured two-sided data ----------
ap_fn = lambda x, y: 1e3 * (2 + (x + y).sin()) if isinstance(x, Jet2) else 1e3 * (2 + np.sin(x + y))
am_fn = lambda x, y: 1e-3 * (2 + (x + y).sin()) if isinstance(x, Jet2) else 1e-3 * (2 + np.sin(x + y))
up_fn = lambda x, y: 1e-3 * (4 * (x - y)).cos() * (x * x + y * y - 2) if isinstance(x, Jet2) else 1e-3 * np.cos(4 * (x - y)) * (x**2 + y**2 - 2)
um_fn = lambda x, y: 1e3 * (4 * (x - y)).cos() * (x * x + y * y - 2) + 1e3 if isinstance(x, Jet2) else 1e3 * np.cos(4 * (x - y)) * (x**2 + y**2 - 2) + 1e3

apJ = jet2_of(ap_fn, bx, by, M + 2)
amJ = jet2_of(am_fn, bx, by, M + 2)
upJ = jet2_of(up_fn, bx, by, M + 3)
umJ = jet2_of(um_fn, bx, by, M + 3)
fpJ = -(apJ.dx() * upJ.dx() + apJ.dy() * upJ.dy() + apJ * (upJ.dx().dx() + upJ.dy().dy())).truncate(M - 1)
fmJ = -(amJ.dx() * umJ.dx() + amJ.dy() * umJ.dy() + amJ * (umJ.dx().dx() + umJ.dy().dy())).truncate(M - 1)
gDJ = (upJ - umJ).truncate(M + 1)
gx, gy = psiJ.dx(), psiJ.dy()
nrm = (gx * gx + gy * gy).sqrt()
n1J, n2J = gx / nrm, gy / nrm
gNJ = ((apJ * upJ.dx() - amJ * umJ.dx()) * n1J + (apJ * upJ.dy() - amJ * umJ.dy()) * n2J).truncate(M)

redP = build_reduction(apJ.truncate(M), M, "V")
redM = build_reduction(amJ.truncate(M), M, "V")

# ---------- transmission ----------
def build_transmission(redP, redM, rJet, sJet, psiJ, M):
    NB = 2 * M + 3
    nrows = 2 * M + 3
    gx, gy = psiJ.dx(), psiJ.dy()
    gxt, gyt = gx.compose(rJet, sJet), gy.compose(rJet, sJet)
    nn = (gxt * gxt + gyt * gyt).sqrt()
    n1, n2 = gxt / nn, gyt / nn
    aP = redP.a_jet
    aM_ = redM.a_jet
    aPt, aMt = aP.compose(rJet, sJet), aM_.compose(rJet, sJet)

    def cols(red, a_t):
        P = np.zeros((M + 2, NB))
        N = np.zeros((M + 1, NB))
        for b in range(NB):
            Gb = table_jet(red.u_weights[:, b], M + 1)
            d = Gb.compose(rJet, sJet)
            P[:, b] = d.coeffs[: M + 2]
            fl = a_t * (Gb.dx().compose(rJet, sJet) * n1 + Gb.dy().compose(rJet, sJet) * n2)
            N[:, b] = fl.coeffs[: M + 1]
        nf = red.f_weights.shape[1]
        FD = np.zeros((M + 2, nf))
        FN = np.zeros((M + 1, nf))
        for c in range(nf):
            Qc = table_jet(red.f_weights[:, c], M + 1)
            FD[:, c] = Qc.compose(rJet, sJet).coeffs[: M + 2]
            fl = a_t * (Qc.dx().compose(rJet, sJet) * n1 + Qc.dy().compose(rJet, sJet) * n2)
            FN[:, c] = fl.coeffs[: M + 1]
        return np.vstack([P, np.zeros((M + 1, NB))]) * 0, P, N, FD, FN

    _, Pp, Np, FDp, FNp = cols(redP, aPt)
    _, Pm, Nm, FDm, FNm = cols(redM, aMt)
    Lm = np.vstack([Pm, Nm])
    Lp = np.vstack([Pp, Np])
    Ffp = np.vstack([FDp, FNp])
    Ffm = np.vstack([FDm, FNm])
    # jump-data columns: monomial tables
    DD = np.zeros((M + 2, lam_size(M + 1)))
    for c, (m, n) in enumerate(lam(M + 1)):
        mono = np.zeros((M + 2, M + 2)); mono[m, n] = 1.0
        DD[:, c] = Jet2(mono, M + 1).compose(rJet, sJet).coeffs[: M + 2]
    DN = np.zeros((M + 1, lam_size(M)))
    for c, (m, n) in enumerate(lam(M)):
        mono = np.zeros((M + 1, M + 1)); mono[m, n] = 1.0
        DN[:, c] = Jet2(mono, M).compose(rJet, sJet).coeffs[: M + 1]
    Lminv = np.linalg.solve(Lm, np.eye(NB))
    Tu = Lminv @ Lp
    Tfp = Lminv @ Ffp
    Tfm = -(Lminv @ Ffm)
    TgD = -(Lminv @ np.vstack([DD, np.zeros((M + 1, DD.shape[1]))]))
    TgN = -(Lminv @ np.vstack([np.zeros((M + 2, DN.shape[1])), DN]))
    return Tu, Tfp, Tfm, TgD, TgN


Tu, Tfp, Tfm, TgD, TgN = build_transmission(redP, redM, rJet, sJet, psiJ, M)
basis = redP.basis
# structural checks
tri_bad = max(abs(Tu[i, j]) for i, (mi, ni) in enumerate(basis) for j, (mj, nj) in enumerate(basis)
              if mj + nj > mi + ni) if True else 0
print("Tu max |entry| above diagonal order (should be ~0):", tri_bad)
print("Tu column (0,0):", Tu[:, 0])

# manufactured transmission closure
xp = np.array([upJ.coeff(m, n) for (m, n) in basis])
xm = np.array([umJ.coeff(m, n) for (m, n) in basis])
fp = np.array([fpJ.coeff(m, n) for (m, n) in lam(M - 1)])
fm = np.array([fmJ.coeff(m, n) for (m, n) in lam(M - 1)])
gD = np.array([gDJ.coeff(m, n) for (m, n) in lam(M + 1)])
gN = np.array([gNJ.coeff(m, n) for (m, n) in lam(M)])
pred = Tu @ xp + Tfp @ fp + Tfm @ fm + TgD @ gD + TgN @ gN
rel = np.abs(pred - xm) / np.maximum(1e-30, np.abs(xm))
print("transmission closure: max rel err =", rel.max())

# ---------- 13-point assembly at an irregular node ----------
def assemble_and_solve(redP, redM, Tu, v0, w0, side_of, offsets, M):
    """side_of: dict offset -> +1/-1. Returns X (n_off, M+2) coeff array."""
    n_off = len(offsets)
    ghP = redP.g_h_polys(np.array(offsets, float), v0, w0)  # (n_off, NB, M+2)
    ghM = redM.g_h_polys(np.array(offsets, float), v0, w0)
    ghMmix = np.einsum("obd,bc->ocd", ghM, Tu)
    phi = np.where(np.array([side_of[o] > 0 for o in offsets])[:, None, None], ghP, ghMmix)
    basis = redP.basis
    rows = []
    for c, (m, n) in enumerate(basis):
        for p in range(m + n, M + 2):
            row = np.zeros(n_off * (M + 2))
            for o in range(n_off):
                for i in range(p + 1):
                    if p - i <= M + 1:
                        row[o * (M + 2) + i] = phi[o, c, p - i]
            rows.append(row)
    A = np.array(rows)
    # reduce: drop the 6 rows of the (0,0) family; eliminate the last offset (0,2)
    A_red = A[M + 2:, :].copy()
    ncol = n_off * (M + 2)
    last = (n_off - 1) * (M + 2)
    for o in range(n_off - 1):
        A_red[:, o * (M + 2): o * (M + 2) + M + 2] -= A_red[:, last: last + M + 2]
    A_red = A_red[:, :last]
    # min-norm with pinned center h^0 coefficient
    c00 = offsets.index((0, 0)) * (M + 2)
    pin = np.zeros(last); pin[c00] = 1.0
    stack = np.vstack([A_red, pin])
    rhs = np.zeros(stack.shape[0]); rhs[-1] = 1.0
    Xr, *_ = np.linalg.lstsq(stack, rhs, rcond=None)
    mres = np.linalg.norm(A_red @ Xr) / max(1.0, np.linalg.norm(A_red) * np.linalg.norm(Xr))
    X = np.zeros(ncol)
    X[:last] = Xr
    X[last:] = -Xr.reshape(n_off - 1, M + 2).sum(axis=0)
    full_res = np.linalg.norm(A @ X) / max(1.0, np.linalg.norm(A) * np.linalg.norm(X))
    return X.reshape(n_off, M + 2), A.shape, A_red.shape, mres, full_res


# irregular node near the base point: fixed (v0, w0)
v0, w0 = 0.3, -0.2
hs = [1 / 8, 1 / 16, 1 / 32]
res = []
for h in hs:
    node = (bx + v0 * h, by + w0 * h)
    side_of = {}
    for (k, l) in OFFSETS13:
        side_of[(k, l)] = 1 if psi_fn(node[0] + k * h, node[1] + l * h) >= 0 else -1
    if len({s for s in side_of.values()}) < 2:
        print("h =", h, ": not actually split, skip")
        continue
    X, shA, shAr, mres, fres = assemble_and_solve(redP, redM, Tu, v0, w0, side_of, OFFSETS13, M)
    # rhs functionals at concrete h
    Cvals = np.array([np.polynomial.polynomial.polyval(h, X[o]) for o in range(13)])
    pts = (np.array(OFFSETS13, float) + np.array([v0, w0])) * h
    gP = redP.g_values(pts); gMv = redM.g_values(pts)
    qP = redP.q_values(pts); qM = redM.q_values(pts)
    plus_mask = np.array([side_of[o] > 0 for o in OFFSETS13], dtype=float)
    Iminus = ((1 - plus_mask) * Cvals) @ gMv          # (NB,)
    Jp0 = ((plus_mask) * Cvals) @ qP
    Jm0 = ((1 - plus_mask) * Cvals) @ qM
    Jp = Jp0 + Iminus @ Tfp
    Jm = Jm0 + Iminus @ Tfm
    JgD = Iminus @ TgD
    JgN = Iminus @ TgN
    lhs = 0.0
    for o, (k, l) in enumerate(OFFSETS13):
        xx, yy = node[0] + k * h, node[1] + l * h
        lhs += Cvals[o] * (up_fn(xx, yy) if side_of[(k, l)] > 0 else um_fn(xx, yy))
    rhs_val = Jp @ fp + Jm @ fm + JgD @ gD + JgN @ gN
    res.append(abs(lhs - rhs_val))
    print(f"h={h}: A {shA} -> {shAr}, mres {mres:.1e}, full res {fres:.1e}, local residual {res[-1]:.3e}")
print("fits:", [np.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)] if len(res) > 1 else "n/a")
