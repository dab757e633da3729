"""Scratch 4: corner pins -> closed forms; variable case; rhs weights; truncation."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction
from scratch_stencil import col, rankof
from scratch_corner import corner_constraints, corner_moment_matrix

np.set_printoptions(precision=6, suppress=True, linewidth=220)
M = 5
NB = 2 * M + 3

PINS_R1 = [((1, 1), 0, 1.0)] + [((k, l), i, 0.0) for (k, l), ii in [
    ((0, 0), (6,)), ((0, 1), (3, 4, 5, 6)), ((1, 0), (5, 6)), ((1, 1), (1, 2, 3, 4, 5, 6))] for i in ii]
PINS_R2 = [((1, -1), 0, 1.0)] + [((k, l), i, 0.0) for (k, l), ii in [
    ((0, -1), (3, 6)), ((0, 0), (5, 6)), ((1, -1), (1, 2, 3, 5, 6)), ((1, 0), (4, 5, 6))] for i in ii]


def solve_pinned_ls(A, pins, ncol):
    free = [c for c in range(ncol) if c not in pins]
    pc = sorted(pins)
    rhs = -A[:, pc] @ np.array([pins[c] for c in pc])
    sol, *_ = np.linalg.lstsq(A[:, free], rhs, rcond=None)
    x = np.zeros(ncol)
    x[free] = sol
    for c, v in pins.items():
        x[c] = v
    return x, np.linalg.norm(A @ x) / max(1.0, np.linalg.norm(A) * np.linalg.norm(x))


alpha = 2.0
beta = 0.7
alpha_hat = np.zeros(M + 1); alpha_hat[0] = alpha
offsets4 = [(0, 0), (0, 1), (1, 0), (1, 1)]
offsets4b = [(0, -1), (0, 0), (1, -1), (1, 0)]
redV = build_reduction(Jet2.constant(1.0, M), M, "V")

# R1 pins -> closed form?
Cu, Cf = corner_constraints(redV, alpha_hat, +1.0, np.zeros(M + 1), +1.0)
A, N = corner_moment_matrix(redV, offsets4, Cu)
pins = {col(offsets4, M, k, l, i): v for ((k, l), i, v) in PINS_R1}
x, res = solve_pinned_ls(A, pins, A.shape[1])
CR1 = {
    (0, 0): np.array([-5, -17 * alpha / 5, -4 * alpha**2 / 25, 8 * alpha**3 / 225, -8 * alpha**4 / 675, 4 * alpha**5 / 675, 0]),
    (0, 1): np.array([2, alpha / 5, alpha**2 / 75, 0, 0, 0, 0]),
    (1, 0): np.array([2, alpha / 5, -4 * alpha**2 / 75, 4 * alpha**3 / 225, -4 * alpha**4 / 675, 0, 0]),
    (1, 1): np.array([1., 0, 0, 0, 0, 0, 0]),
}
xcf = np.zeros(A.shape[1])
for (k, l), cs in CR1.items():
    for i, c in enumerate(cs):
        xcf[col(offsets4, M, k, l, i)] = c
print(f"R1 pinned: residual {res:.2e}, equals closed form: {np.abs(x - xcf).max():.2e}")

# R2 pins -> closed form? (general alpha != beta)
beta_hat = np.zeros(M + 1); beta_hat[0] = beta
Cu2, Cf2 = corner_constraints(redV, alpha_hat, +1.0, beta_hat, -1.0)
A2, N2 = corner_moment_matrix(redV, offsets4b, Cu2)
pins2 = {col(offsets4b, M, k, l, i): v for ((k, l), i, v) in PINS_R2}
x2, res2 = solve_pinned_ls(A2, pins2, A2.shape[1])
a_, b_ = alpha, beta
CR2 = {
    (0, -1): np.array([2, (135 * b_ + 135 * a_) / 675, (9 * a_**2 + 63 * a_ * b_ - 36 * b_**2) / 675, 0,
                       (4 * a_**4 - 6 * a_**3 * b_ + 6 * a_**2 * b_**2 - 4 * a_ * b_**3) / 675,
                       (4 * a_**5 - 6 * a_**4 * b_ + 6 * a_**3 * b_**2 - 4 * a_**2 * b_**3) / 675, 0]),
    (0, 0): np.array([-5, (-765 * a_ - 765 * b_) / 225, (-36 * a_**2 - 357 * a_ * b_ - 36 * b_**2) / 225,
                      (8 * a_**3 - 18 * a_**2 * b_ - 30 * a_ * b_**2 + 16 * b_**3) / 225,
                      (-4 * a_**4 + 6 * a_**3 * b_ - 6 * a_**2 * b_**2 + 4 * a_ * b_**3) / 225, 0, 0]),
    (1, -1): np.array([1, 0, 0, 0, (-4 * a_**4 + 6 * a_**3 * b_ - 6 * a_**2 * b_**2 + 4 * a_ * b_**3) / 675, 0, 0]),
    (1, 0): np.array([2, (45 * b_ + 45 * a_) / 225, (-12 * a_**2 + 21 * a_ * b_ + 3 * b_**2) / 225,
                      (4 * a_**3 - 6 * a_**2 * b_ + 6 * a_ * b_**2 - 4 * b_**3) / 225, 0, 0, 0]),
}
xcf2 = np.zeros(A2.shape[1])
for (k, l), cs in CR2.items():
    for i, c in enumerate(cs):
        xcf2[col(offsets4b, M, k, l, i)] = c
print(f"R2 pinned: residual {res2:.2e}, equals closed form: {np.abs(x2 - xcf2).max():.2e}")

# alpha == beta degeneration via the same pins
beta_eq = np.zeros(M + 1); beta_eq[0] = alpha
Cu3, _ = corner_constraints(redV, alpha_hat, +1.0, beta_eq, -1.0)
A3, _ = corner_moment_matrix(redV, offsets4b, Cu3)
x3, res3 = solve_pinned_ls(A3, pins2, A3.shape[1])
want_od = np.array([2, 2 * alpha / 5, 4 * alpha**2 / 75, 0, 0, 0, 0])
got_od = x3[col(offsets4b, M, 0, -1, 0): col(offsets4b, M, 0, -1, 0) + 7]
got_10 = x3[col(offsets4b, M, 1, 0, 0): col(offsets4b, M, 1, 0, 0) + 7]
got_1m1 = x3[col(offsets4b, M, 1, -1, 0): col(offsets4b, M, 1, -1, 0) + 7]
print(f"R2 alpha==beta: residual {res3:.2e}")
print("  C_0,-1 err:", np.abs(got_od - want_od).max(), " C_1,0 err:", np.abs(got_10 - want_od).max(),
      " C_1,-1 err:", np.abs(got_1m1 - np.array([1, 0, 0, 0, 0, 0, 0])).max())

# variable-coefficient corner: diagnose
print("\n--- variable coefficients ---")
aV = (lambda x_, y_: 2 + x_.sin() * y_.sin())(Jet2.variable_x(-2.5, 2.5, M), Jet2.variable_y(-2.5, 2.5, M))
redVv = build_reduction(aV, M, "V")
alpha_v = Jet1.variable(2.5, M).sin().coeffs
beta_v = Jet1.variable(-2.5, M).cos().coeffs
Cu4, Cf4 = corner_constraints(redVv, alpha_v, +1.0, beta_v, -1.0)
r4, s4 = rankof(Cu4)
print("constraint sv:", s4)
A4, N4 = corner_moment_matrix(redVv, offsets4b, Cu4)
print("N4 shape:", N4.shape, " A4 shape:", A4.shape)
sA = np.linalg.svd(A4, compute_uv=False)
print("moment sv:", sA[:10])
x4, res4 = solve_pinned_ls(A4, pins2, A4.shape[1])
print(f"variable R2 pinned: residual {res4:.2e}")
print("C table:")
for kl in offsets4b:
    print("  ", kl, np.round(x4[col(offsets4b, M, kl[0], kl[1], 0): col(offsets4b, M, kl[0], kl[1], 0) + 7], 6))
