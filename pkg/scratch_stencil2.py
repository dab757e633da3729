"""Scratch 2: repaired pin sets for sides; corner nullspaces R1/R2."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction, lam, lam_thin
from scratch_stencil import moment_matrix, side_families, solve_pinned, col, rankof

np.set_printoptions(precision=8, suppress=True, linewidth=200)
M = 5

# Canonical pin set on the B1 geometry (k in {0,1}, l in {-1,0,1}), repaired:
# paper's (1,0,{3,4}) pins conflict with the printed closed forms; use (0,1,{3,4}).
PINS_SIDE = [((1, 1), 0, 1.0)] + [((k, l), i, 0.0) for (k, l), ii in [
    ((0, 0), (6,)), ((0, 1), (3, 4, 5, 6)), ((1, -1), (1, 4, 5, 6)),
    ((1, 0), (5, 6)), ((1, 1), (2, 3, 4, 5, 6))] for i in ii]

offsets6 = [(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]


def closed_B1(alpha):
    C = {
        (0, 1): np.array([2, alpha / 5, alpha**2 / 75, 0, 0, 0, 0], float),
        (0, 0): np.array([-10, -34 * alpha / 5, -8 * alpha**2 / 25, 16 * alpha**3 / 225,
                          -16 * alpha**4 / 675, 8 * alpha**5 / 675, 0], float),
        (1, 1): np.array([1, 0, 0, 0, 0, 0, 0], float),
        (1, 0): np.array([4, 2 * alpha / 5, -8 * alpha**2 / 75, 8 * alpha**3 / 225,
                          -8 * alpha**4 / 675, 0, 0], float),
    }
    C[(0, -1)] = C[(0, 1)]
    C[(1, -1)] = C[(1, 1)]
    return C


def build_A_B1(ajet, alpha_hat):
    red = build_reduction(ajet, M, "V")
    fams = side_families(red, offsets6, alpha_hat, +1.0)
    return moment_matrix(fams, offsets6, M)


print("=== B1 with repaired pins ===")
alpha = 2.0
alpha_hat = np.zeros(M + 1); alpha_hat[0] = alpha
A = build_A_B1(Jet2.constant(1.0, M), alpha_hat)
pins = {col(offsets6, M, k, l, i): v for ((k, l), i, v) in PINS_SIDE}
x, mres, rank, nfree = solve_pinned(A, pins, A.shape[1])
CB1 = closed_B1(alpha)
xcf = np.zeros(A.shape[1])
for (k, l), coefs in CB1.items():
    for i, c in enumerate(coefs):
        xcf[col(offsets6, M, k, l, i)] = c
print(f"const: residual {mres:.2e}, rank {rank}/{nfree}, equals closed form: {np.abs(x - xcf).max():.2e}")

# variable a and alpha
aj = (lambda x_, y_: 2 + x_.sin() * y_.sin())(Jet2.variable_x(0.3, 0.2, M), Jet2.variable_y(0.3, 0.2, M))
t = Jet1.variable(0.2, M)
alpha_var = t.sin().coeffs  # normalized jet of sin(y) at y0=0.2
Av = build_A_B1(aj, alpha_var)
rv, _ = rankof(Av)
xv, mresv, rankv, nfreev = solve_pinned(Av, pins, Av.shape[1])
print(f"variable: moment rank {rv} (nullity {Av.shape[1]-rv}), pinned residual {mresv:.2e}, lstsq rank {rankv}/{nfreev}")

# high contrast constant (like 1e3): closed form should still hold (a-independent)
A3 = build_A_B1(Jet2.constant(1000.0, M), alpha_hat)
x3, mres3, _, _ = solve_pinned(A3, pins, A3.shape[1])
print(f"a=1000 const: residual {mres3:.2e}, matches closed form: {np.abs(x3 - xcf).max():.2e}")

# ======= corner R1: B1 (Robin, V) x B3 (Neumann, H) at (x0, y0) =======
print("\n=== corner R1 ===")
offsets4 = [(0, 0), (0, 1), (1, 0), (1, 1)]


def corner_families(aV, aH, alpha_hat, beta_hat, sV, sH):
    redV = build_reduction(aV, M, "V")
    redH = build_reduction(aH, M, "H")
    famsV = side_families(redV, offsets4, alpha_hat, sV)
    famsH = side_families(redH, offsets4, beta_hat, sH)
    return famsV + famsH


alpha = 2.0
alpha_hat = np.zeros(M + 1); alpha_hat[0] = alpha
beta0_hat = np.zeros(M + 1)  # Neumann on the bottom side
fams = corner_families(Jet2.constant(1.0, M), Jet2.constant(1.0, M), alpha_hat, beta0_hat, +1.0, +1.0)
A = moment_matrix(fams, offsets4, M)
r, s = rankof(A)
print(f"R1 moment matrix {A.shape}, rank {r}, nullity {A.shape[1]-r}")
print("singular values tail:", s[-6:])

CR1 = {
    (0, 0): np.array([-5, -17 * alpha / 5, -4 * alpha**2 / 25, 8 * alpha**3 / 225,
                      -8 * alpha**4 / 675, 4 * alpha**5 / 675, 0], float),
    (0, 1): np.array([2, alpha / 5, alpha**2 / 75, 0, 0, 0, 0], float),
    (1, 0): np.array([2, alpha / 5, -4 * alpha**2 / 75, 4 * alpha**3 / 225,
                      -4 * alpha**4 / 675, 0, 0], float),
    (1, 1): np.array([1, 0, 0, 0, 0, 0, 0], float),
}
xcf = np.zeros(A.shape[1])
for (k, l), coefs in CR1.items():
    for i, c in enumerate(coefs):
        xcf[col(offsets4, M, k, l, i)] = c
print("closed form moment residual:", np.linalg.norm(A @ xcf) / (np.linalg.norm(A) * np.linalg.norm(xcf)))
if A.shape[1] - r == 1:
    _, _, Vt = np.linalg.svd(A)
    null = Vt[-1]
    null = null / null[col(offsets4, M, 1, 1, 0)]
    print("1-d nullspace; normalized == closed form:", np.abs(null - xcf).max())

# variable coefficient corner rank
aV = (lambda x_, y_: 2 + x_.sin() * y_.sin())(Jet2.variable_x(-2.5, -2.5, M), Jet2.variable_y(-2.5, -2.5, M))
t = Jet1.variable(-2.5, M)
alpha_var = t.sin().coeffs
fams = corner_families(aV, aV, alpha_var, beta0_hat, +1.0, +1.0)
Avar = moment_matrix(fams, offsets4, M)
rvar, svar = rankof(Avar)
print(f"R1 variable: rank {rvar}, nullity {Avar.shape[1]-rvar}, sv tail {svar[-3:]}")

# ======= corner R2: B1 (Robin, V) x B4 (Robin, H, top) =======
print("\n=== corner R2 ===")
offsets4b = [(0, -1), (0, 0), (1, -1), (1, 0)]
beta = 0.7
beta_hat = np.zeros(M + 1); beta_hat[0] = beta
fams = []
redV = build_reduction(Jet2.constant(1.0, M), M, "V")
redH = build_reduction(Jet2.constant(1.0, M), M, "H")
fams = side_families(redV, offsets4b, alpha_hat, +1.0) + side_families(redH, offsets4b, beta_hat, -1.0)
A = moment_matrix(fams, offsets4b, M)
r, s = rankof(A)
print(f"R2 moment matrix {A.shape}, rank {r}, nullity {A.shape[1]-r}, sv tail {s[-3:]}")

a_, b_ = alpha, beta
CR2 = {
    (0, -1): np.array([2, (135 * b_ + 135 * a_) / 675, (9 * a_**2 + 63 * a_ * b_ - 36 * b_**2) / 675, 0,
                       (4 * a_**4 - 6 * a_**3 * b_ + 6 * a_**2 * b_**2 - 4 * a_ * b_**3) / 675,
                       (4 * a_**5 - 6 * a_**4 * b_ + 6 * a_**3 * b_**2 - 4 * a_**2 * b_**3) / 675, 0], float),
    (0, 0): np.array([-5, (-765 * a_ - 765 * b_) / 225, (-36 * a_**2 - 357 * a_ * b_ - 36 * b_**2) / 225,
                      (8 * a_**3 - 18 * a_**2 * b_ - 30 * a_ * b_**2 + 16 * b_**3) / 225,
                      (-4 * a_**4 + 6 * a_**3 * b_ - 6 * a_**2 * b_**2 + 4 * a_ * b_**3) / 225, 0, 0], float),
    (1, -1): np.array([1, 0, 0, 0, (-4 * a_**4 + 6 * a_**3 * b_ - 6 * a_**2 * b_**2 + 4 * a_ * b_**3) / 675, 0, 0], float),
    (1, 0): np.array([2, (45 * b_ + 45 * a_) / 225, (-12 * a_**2 + 21 * a_ * b_ + 3 * b_**2) / 225,
                      (4 * a_**3 - 6 * a_**2 * b_ + 6 * a_ * b_**2 - 4 * b_**3) / 225, 0, 0, 0], float),
}
xcf = np.zeros(A.shape[1])
for (k, l), coefs in CR2.items():
    for i, c in enumerate(coefs):
        xcf[col(offsets4b, M, k, l, i)] = c
print("R2 closed form moment residual:", np.linalg.norm(A @ xcf) / (np.linalg.norm(A) * np.linalg.norm(xcf)))
if A.shape[1] - r == 1:
    _, _, Vt = np.linalg.svd(A)
    null = Vt[-1]
    null = null / null[col(offsets4b, M, 1, -1, 0)]
    print("1-d nullspace; normalized == closed form:", np.abs(null - xcf).max())

# alpha == beta degeneration
beta_eq = np.zeros(M + 1); beta_eq[0] = alpha
fams = side_families(redV, offsets4b, alpha_hat, +1.0) + side_families(redH, offsets4b, beta_eq, -1.0)
Aeq = moment_matrix(fams, offsets4b, M)
req, seq = rankof(Aeq)
print(f"R2 alpha==beta: rank {req}, nullity {Aeq.shape[1]-req}, sv tail {seq[-4:]}")
b_ = alpha
want_od = np.array([2, 2 * b_ / 5, 4 * b_**2 / 75, 0, 0, 0, 0])
if Aeq.shape[1] - req == 1:
    _, _, Vt = np.linalg.svd(Aeq)
    null = Vt[-1] / Vt[-1][col(offsets4b, M, 1, -1, 0)]
    print("degenerate C_{0,-1}:", null[col(offsets4b, M, 0, -1, 0):col(offsets4b, M, 0, -1, 0) + 7])
    print("want:", want_od)
    print("degenerate C_{1,0}:", null[col(offsets4b, M, 1, 0, 0):col(offsets4b, M, 1, 0, 0) + 7])
