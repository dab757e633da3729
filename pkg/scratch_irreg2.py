"""Scratch 7: exactness probe for the 13-point scheme (polynomial data, straight interface)."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction, lam, lam_size
from scratch_irreg import table_jet, build_transmission, assemble_and_solve, OFFSETS13

np.set_printoptions(precision=6, suppress=True, linewidth=220)
M = 4

# straight interface x + 2y = 0.1, base point on it
def psi_fn(x, y):
    return x + 2 * y - 0.1

bx = 0.1 - 2 * 0.15
by = 0.15


def jet2_of(fn, x0, y0, D):
    return fn(Jet2.variable_x(x0, y0, D), Jet2.variable_y(x0, y0, D))


psiJ = jet2_of(psi_fn, bx, by, M + 2)
px, py = psiJ.coeff(1, 0), psiJ.coeff(0, 1)
D = M + 1
t = Jet1.variable(0.0, D)
# |px| < |py| -> parametrize x = t, solve y = s(t)
s = Jet1(np.zeros(D + 1), D)
for k in range(1, D + 1):
    F = psiJ.compose(t, s)
    s = Jet1(s.coeffs - np.eye(D + 1)[k] * F.coeff(k) / py, D)
rJet, sJet = t, s
print("chart residual:", np.abs(psiJ.compose(rJet, sJet).coeffs).max())

# polynomial data: degree <= 5 solutions, constant coefficients
ap_v, am_v = 7.0, 0.003
up_fn = lambda x, y: x**3 * y + 2 * x * y - y**4 + 0.5 * x * x if isinstance(x, (int, float, np.floating)) else \
    x.powi(3) * y + 2 * x * y - y.powi(4) + 0.5 * x * x
um_fn = lambda x, y: x**4 - x * y**3 + 3 * x * x * y * y + x - 2 * y + 1 if isinstance(x, (int, float, np.floating)) else \
    x.powi(4) - x * y.powi(3) + 3 * x * x * y * y + x - 2 * y + 1

apJ = Jet2.constant(ap_v, M + 2, (bx, by))
amJ = Jet2.constant(am_v, M + 2, (bx, by))
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
Tu, Tfp, Tfm, TgD, TgN = build_transmission(redP, redM, rJet, sJet, psiJ, M)

basis = redP.basis
xp = np.array([upJ.coeff(m, n) for (m, n) in basis])
xm = np.array([umJ.coeff(m, n) for (m, n) in basis])
fp = np.array([fpJ.coeff(m, n) for (m, n) in lam(M - 1)])
fm = np.array([fmJ.coeff(m, n) for (m, n) in lam(M - 1)])
gD = np.array([gDJ.coeff(m, n) for (m, n) in lam(M + 1)])
gN = np.array([gNJ.coeff(m, n) for (m, n) in lam(M)])
pred = Tu @ xp + Tfp @ fp + Tfm @ fm + TgD @ gD + TgN @ gN
print("closure err:", np.abs(pred - xm).max())

v0, w0 = 0.3, -0.2
for h in (0.125, 0.0625):
    node = (bx + v0 * h, by + w0 * h)
    side_of = {(k, l): (1 if psi_fn(node[0] + k * h, node[1] + l * h) >= 0 else -1) for (k, l) in OFFSETS13}
    X, shA, shAr, mres, fres = assemble_and_solve(redP, redM, Tu, v0, w0, side_of, OFFSETS13, M)
    Cvals = np.array([np.polynomial.polynomial.polyval(h, X[o]) for o in range(13)])
    pts = (np.array(OFFSETS13, float) + np.array([v0, w0])) * h
    gPv = redP.g_values(pts); gMv = redM.g_values(pts)
    qPv = redP.q_values(pts); qMv = redM.q_values(pts)
    plus_mask = np.array([side_of[o] > 0 for o in OFFSETS13], dtype=float)
    Iminus = ((1 - plus_mask) * Cvals) @ gMv
    Jp = ((plus_mask) * Cvals) @ qPv + Iminus @ Tfp
    Jm = ((1 - plus_mask) * Cvals) @ qMv + Iminus @ Tfm
    JgD = Iminus @ TgD
    JgN = Iminus @ TgN
    lhs = 0.0
    for o, (k, l) in enumerate(OFFSETS13):
        xx, yy = node[0] + k * h, node[1] + l * h
        lhs += Cvals[o] * (up_fn(xx, yy) if side_of[(k, l)] > 0 else um_fn(xx, yy))
    rhs_val = Jp @ fp + Jm @ fm + JgD @ gD + JgN @ gN
    print(f"h={h}: split {int(plus_mask.sum())}+/{13-int(plus_mask.sum())}-, residual {abs(lhs-rhs_val):.3e} (want ~1e-12)")

# --- circle retest: fixed split pattern, moderate scales ---
print("\n--- circle, fixed pattern, moderate scale ---")
def psi_c(x, y):
    return x * x + y * y - 2

th = 0.35
cbx, cby = np.sqrt(2) * np.cos(th), np.sqrt(2) * np.sin(th)
psiJc = jet2_of(psi_c, cbx, cby, M + 2)
pxc, pyc = psiJc.coeff(1, 0), psiJc.coeff(0, 1)
rc = Jet1(np.zeros(D + 1), D)
tc = Jet1.variable(0.0, D)
for k in range(1, D + 1):
    F = psiJc.compose(rc, tc)
    rc = Jet1(rc.coeffs - np.eye(D + 1)[k] * F.coeff(k) / pxc, D)
ap2 = lambda x, y: 10.0 * (2 + (x + y).sin()) if isinstance(x, Jet2) else 10.0 * (2 + np.sin(x + y))
am2 = lambda x, y: 0.1 * (2 + (x + y).sin()) if isinstance(x, Jet2) else 0.1 * (2 + np.sin(x + y))
up2 = lambda x, y: (2 * (x - y)).cos() * (x * x + y * y - 2) if isinstance(x, Jet2) else np.cos(2 * (x - y)) * (x**2 + y**2 - 2)
um2 = lambda x, y: 3 * (2 * (x - y)).cos() * (x * x + y * y - 2) + 1 if isinstance(x, Jet2) else 3 * np.cos(2 * (x - y)) * (x**2 + y**2 - 2) + 1

apJ2 = jet2_of(ap2, cbx, cby, M + 2); amJ2 = jet2_of(am2, cbx, cby, M + 2)
upJ2 = jet2_of(up2, cbx, cby, M + 3); umJ2 = jet2_of(um2, cbx, cby, M + 3)
fpJ2 = -(apJ2.dx() * upJ2.dx() + apJ2.dy() * upJ2.dy() + apJ2 * (upJ2.dx().dx() + upJ2.dy().dy())).truncate(M - 1)
fmJ2 = -(amJ2.dx() * umJ2.dx() + amJ2.dy() * umJ2.dy() + amJ2 * (umJ2.dx().dx() + umJ2.dy().dy())).truncate(M - 1)
gDJ2 = (upJ2 - umJ2).truncate(M + 1)
gx2, gy2 = psiJc.dx(), psiJc.dy()
nrm2 = (gx2 * gx2 + gy2 * gy2).sqrt()
gNJ2 = ((apJ2 * upJ2.dx() - amJ2 * umJ2.dx()) * (gx2 / nrm2) + (apJ2 * upJ2.dy() - amJ2 * umJ2.dy()) * (gy2 / nrm2)).truncate(M)
redP2 = build_reduction(apJ2.truncate(M), M, "V")
redM2 = build_reduction(amJ2.truncate(M), M, "V")
Tu2, Tfp2, Tfm2, TgD2, TgN2 = build_transmission(redP2, redM2, rc, tc, psiJc, M)
xp2 = np.array([upJ2.coeff(m, n) for (m, n) in redP2.basis])
fp2 = np.array([fpJ2.coeff(m, n) for (m, n) in lam(M - 1)])
fm2 = np.array([fmJ2.coeff(m, n) for (m, n) in lam(M - 1)])
gD2 = np.array([gDJ2.coeff(m, n) for (m, n) in lam(M + 1)])
gN2 = np.array([gNJ2.coeff(m, n) for (m, n) in lam(M)])

v0, w0 = 0.3, -0.2
h0 = 1 / 8
node0 = (cbx + v0 * h0, cby + w0 * h0)
pattern = {(k, l): (1 if psi_c(node0[0] + k * h0, node0[1] + l * h0) >= 0 else -1) for (k, l) in OFFSETS13}
res = []
hs = [1 / 8, 1 / 16, 1 / 32]
for h in hs:
    node = (cbx + v0 * h, cby + w0 * h)
    X, shA, shAr, mres, fres = assemble_and_solve(redP2, redM2, Tu2, v0, w0, pattern, OFFSETS13, M)
    Cvals = np.array([np.polynomial.polynomial.polyval(h, X[o]) for o in range(13)])
    pts = (np.array(OFFSETS13, float) + np.array([v0, w0])) * h
    gPv = redP2.g_values(pts); gMv = redM2.g_values(pts)
    qPv = redP2.q_values(pts); qMv = redM2.q_values(pts)
    plus_mask = np.array([pattern[o] > 0 for o in OFFSETS13], dtype=float)
    Iminus = ((1 - plus_mask) * Cvals) @ gMv
    Jp = (plus_mask * Cvals) @ qPv + Iminus @ Tfp2
    Jm = ((1 - plus_mask) * Cvals) @ qMv + Iminus @ Tfm2
    lhs = 0.0
    for o, (k, l) in enumerate(OFFSETS13):
        xx, yy = node[0] + k * h, node[1] + l * h
        lhs += Cvals[o] * (up2(xx, yy) if pattern[(k, l)] > 0 else um2(xx, yy))
    rhs_val = Jp @ fp2 + Jm @ fm2 + (Iminus @ TgD2) @ gD2 + (Iminus @ TgN2) @ gN2
    res.append(abs(lhs - rhs_val))
print("residuals:", res)
print("fits:", [np.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)])
