"""Scratch 5: full side/corner pipeline with rhs weights + truncation fits."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction
from scratch_stencil import moment_matrix, side_families, solve_pinned, col, rankof
from scratch_corner import corner_constraints

np.set_printoptions(precision=6, suppress=True, linewidth=220)
M = 5
NB = 2 * M + 3

PINS_SIDE = [((1, 1), 0, 1.0)] + [((k, l), i, 0.0) for (k, l), ii in [
    ((0, 0), (6,)), ((0, 1), (3, 4, 5, 6)), ((1, -1), (1, 4, 5, 6)),
    ((1, 0), (5, 6)), ((1, 1), (2, 3, 4, 5, 6))] for i in ii]
PINS_R2 = [((1, -1), 0, 1.0)] + [((k, l), i, 0.0) for (k, l), ii in [
    ((0, -1), (3, 6)), ((0, 0), (5, 6)), ((1, -1), (1, 2, 3, 5, 6)), ((1, 0), (4, 5, 6))] for i in ii]


def jet2_of(fn, x0, y0, D):
    return fn(Jet2.variable_x(x0, y0, D), Jet2.variable_y(x0, y0, D))


afun = lambda x, y: 2 + x.sin() * y.sin() if isinstance(x, Jet2) else 2 + np.sin(x) * np.sin(y)
ufun = lambda x, y: (2 * x).sin() * y.cos() + x * x * y if isinstance(x, Jet2) else np.sin(2 * x) * np.cos(y) + x * x * y
alpha_f = lambda t: t.sin() if isinstance(t, Jet1) else np.sin(t)
beta_f = lambda t: t.cos() if isinstance(t, Jet1) else np.cos(t)

x0, y0 = -1.0, 0.5  # node on the left side

# ---- side B1 truncation test ----
print("=== side B1, variable a & alpha: truncation fit ===")
res = []
hs = [0.25, 0.125, 0.0625]
offsets6 = [(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
aJ = jet2_of(afun, x0, y0, M)
uJ = jet2_of(ufun, x0, y0, M + 2)
fJ = -(jet2_of(afun, x0, y0, M + 2).dx() * uJ.dx() + jet2_of(afun, x0, y0, M + 2).dy() * uJ.dy()
       + jet2_of(afun, x0, y0, M + 2) * (uJ.dx().dx() + uJ.dy().dy())).truncate(M - 1)
alphaJ = alpha_f(Jet1.variable(y0, M))
red = build_reduction(aJ, M, "V")
fams = side_families(red, offsets6, alphaJ.coeffs, +1.0)
A = moment_matrix(fams, offsets6, M)
pins = {col(offsets6, M, k, l, i): v for ((k, l), i, v) in PINS_SIDE}
x, mres, *_ = solve_pinned(A, pins, A.shape[1])
ghat = np.array([-uJ.coeff(1, n) + sum(alphaJ.coeff(n - i) * uJ.coeff(0, i) for i in range(n + 1))
                 for n in range(M + 1)])
fhat = np.array([fJ.coeff(m, n) for (m, n) in red.f_indices])
for h in hs:
    C = {kl: np.polynomial.polynomial.polyval(h, x[col(offsets6, M, kl[0], kl[1], 0): col(offsets6, M, kl[0], kl[1], 0) + M + 2]) for kl in offsets6}
    pts = np.array(offsets6, float) * h
    gv = red.g_values(pts)
    qv = red.q_values(pts)
    Cvec = np.array([C[kl] for kl in offsets6])
    Cf = Cvec @ qv
    Cg = -(Cvec @ gv[:, M + 2:])  # thin-basis (1, n) block, t = -1
    lhs = sum(C[kl] * ufun(x0 + kl[0] * h, y0 + kl[1] * h) for kl in offsets6)
    rhs = Cf @ fhat + Cg @ ghat
    res.append(abs(lhs - rhs))
print("residuals:", res, " fits:", [np.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)])

# ---- corner R2-style with variable coefficients ----
print("\n=== corner R2 (Robin x Robin), variable everything, top-left corner ===")
cx, cy = -1.0, 1.0
offsets4b = [(0, -1), (0, 0), (1, -1), (1, 0)]
aJ = jet2_of(afun, cx, cy, M)
uJ = jet2_of(ufun, cx, cy, M + 2)
aJ2 = jet2_of(afun, cx, cy, M + 2)
fJ = -(aJ2.dx() * uJ.dx() + aJ2.dy() * uJ.dy() + aJ2 * (uJ.dx().dx() + uJ.dy().dy())).truncate(M - 1)
alphaJ = alpha_f(Jet1.variable(cy, M))   # alpha(y) on the x-side
betaJ = beta_f(Jet1.variable(cx, M))     # beta(x) on the y-side (top: +u_y + beta u)
redV = build_reduction(aJ, M, "V")

s_x, t_x = +1.0, -1.0   # -u_x + alpha u = g1
s_y, t_y = -1.0, +1.0   # +u_y + beta u = g4
Cu, Cf_rows = corner_constraints(redV, alphaJ.coeffs, s_x, betaJ.coeffs, s_y)

# data maps: Cu @ u_basis = D_g1 g1hat + D_gy gyhat + D_f fhat
nf = redV.f_weights.shape[1]
D_g1 = np.zeros((2 * M + 2, M + 1)); D_gy = np.zeros((2 * M + 2, M + 1)); D_f = np.zeros((2 * M + 2, nf))
for n in range(M + 1):
    D_g1[n, n] = t_x
for m in range(M + 1):
    D_gy[M + 1 + m, m] = t_y
D_f[M + 1:, :] = -Cf_rows[M + 1:, :]

# frozen-constant guide system
a_const = Jet2.constant(aJ.value, M)
redV_c = build_reduction(a_const, M, "V")
al_c = np.zeros(M + 1); al_c[0] = alphaJ.value
be_c = np.zeros(M + 1); be_c[0] = betaJ.value
Cu_c, _ = corner_constraints(redV_c, al_c, s_x, be_c, s_y)


def corner_moments(red, Cu_mat, offsets):
    gh = red.g_h_polys(np.array(offsets, float))
    U, s, Vt = np.linalg.svd(Cu_mat)
    rank = int(np.sum(s > 1e-9 * s[0]))
    N = Vt[rank:].T
    rows = []
    for c in range(N.shape[1]):
        phi = np.einsum("obd,b->od", gh, N[:, c])
        for p in range(M + 2):
            row = np.zeros(len(offsets) * (M + 2))
            for o in range(len(offsets)):
                for i in range(p + 1):
                    row[o * (M + 2) + i] = phi[o, p - i]
            rows.append(row)
    A = np.array(rows)
    nrm = np.linalg.norm(A, axis=1)
    return A[nrm > 1e-11 * max(nrm.max(), 1.0)]


A_var = corner_moments(redV, Cu, offsets4b)
A_frz = corner_moments(redV_c, Cu_c, offsets4b)
print("A_var:", A_var.shape, " A_frz:", A_frz.shape)

# solve: X in null(A_var), min ||[A_frz; pins] X - [0; vals]||
U, s, Vt = np.linalg.svd(A_var)
rank = int(np.sum(s > 1e-9 * s[0])) if len(s) else 0
Nv = Vt[rank:].T
npins = len(PINS_R2)
P = np.zeros((npins, 4 * (M + 2))); pv = np.zeros(npins)
for r, ((k, l), i, v) in enumerate(PINS_R2):
    P[r, col(offsets4b, M, k, l, i)] = 1.0
    pv[r] = v
stack = np.vstack([A_frz, P]) @ Nv
rhsv = np.concatenate([np.zeros(A_frz.shape[0]), pv])
y, *_ = np.linalg.lstsq(stack, rhsv, rcond=None)
X = Nv @ y
X = X / X[col(offsets4b, M, 1, -1, 0)]
print("moment residual |A_var X|:", np.linalg.norm(A_var @ X))
for kl in offsets4b:
    print("  C", kl, np.round(X[col(offsets4b, M, kl[0], kl[1], 0): col(offsets4b, M, kl[0], kl[1], 0) + 7], 5))

# rhs weights and truncation test
Ppart = np.linalg.pinv(Cu)
ghat1 = np.array([-uJ.coeff(1, n) + sum(alphaJ.coeff(n - i) * uJ.coeff(0, i) for i in range(n + 1))
                  for n in range(M + 1)])
ghaty = np.array([uJ.coeff(m, 1) + sum(betaJ.coeff(m - i) * uJ.coeff(i, 0) for i in range(m + 1))
                  for m in range(M + 1)])
fhat = np.array([fJ.coeff(m, n) for (m, n) in redV.f_indices])
res = []
for h in hs:
    Cvals = np.array([np.polynomial.polynomial.polyval(h, X[col(offsets4b, M, k, l, 0): col(offsets4b, M, k, l, 0) + M + 2]) for (k, l) in offsets4b])
    pts = np.array(offsets4b, float) * h
    gv = redV.g_values(pts)   # (4, NB)
    qv = redV.q_values(pts)
    CG = Cvals @ gv           # (NB,)
    CQ = Cvals @ qv
    Cf_w = CG @ (Ppart @ D_f) + CQ
    Cg1_w = CG @ (Ppart @ D_g1)
    Cgy_w = CG @ (Ppart @ D_gy)
    lhs = sum(Cvals[o] * ufun(cx + offsets4b[o][0] * h, cy + offsets4b[o][1] * h) for o in range(4))
    rhs = Cf_w @ fhat + Cg1_w @ ghat1 + Cgy_w @ ghaty
    res.append(abs(lhs - rhs))
print("corner residuals:", res, " fits:", [np.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)])
