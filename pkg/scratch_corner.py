"""Scratch 3: corner stencil via constraint-nullspace formulation."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction, lam, lam_thin
from scratch_stencil import col, rankof

np.set_printoptions(precision=8, suppress=True, linewidth=220)
M = 5
NB = 2 * M + 3


def corner_constraints(redV, alpha_hat, s_x, beta_hat, s_y):
    """Homogeneous constraint rows over the V-thin basis for a corner.

    x-side relation: uh[(1,n)] = s_x * sum_i alpha_hat[n-i] uh[(0,i)] + t ghat
    y-side relation: uh[(m,1)] = s_y * sum_i beta_hat[m-i] uh[(i,0)] + t ghat,
    with uh[(m,1)], uh[(i,0)] expressed through V-reduction rows.
    Returns (rows_u (2M+2, NB), rows_f (2M+2, nf)) for the homogeneous parts
    (data moved to the right-hand side separately).
    """
    basis = redV.basis
    bpos = {b: i for i, b in enumerate(basis)}
    pos = {idx: i for i, idx in enumerate(redV.all_indices)}
    rows_u, rows_f = [], []
    # x-side (B1-style): n = 0..M
    for n in range(M + 1):
        ru = np.zeros(NB)
        ru[bpos[(1, n)]] = 1.0
        for i in range(n + 1):
            ru[bpos[(0, i)]] -= s_x * alpha_hat[n - i]
        rows_u.append(ru)
        rows_f.append(np.zeros(redV.f_weights.shape[1]))
    # y-side: m = 0..M, using reduction rows for (m,1) and (i,0)
    for m in range(M + 1):
        ru = redV.u_weights[pos[(m, 1)]].copy()
        rf = redV.f_weights[pos[(m, 1)]].copy()
        for i in range(m + 1):
            ru -= s_y * beta_hat[m - i] * redV.u_weights[pos[(i, 0)]]
            rf -= s_y * beta_hat[m - i] * redV.f_weights[pos[(i, 0)]]
        rows_u.append(ru)
        rows_f.append(rf)
    return np.array(rows_u), np.array(rows_f)


def corner_moment_matrix(redV, offsets, Cu):
    """Rows: for each nullspace column of the constraints, powers 0..M+1 of
    sum_o C_o(h) * (Ghat(offset*h) @ ncol)."""
    gh = redV.g_h_polys(np.array(offsets, float))  # (n_off, NB, M+2)
    U, s, Vt = np.linalg.svd(Cu)
    rank = int(np.sum(s > 1e-10 * s[0]))
    N = Vt[rank:].T  # (NB, q)
    q = N.shape[1]
    ncol = len(offsets) * (M + 2)
    rows = []
    for c in range(q):
        phi = np.einsum("obd,b->od", gh, N[:, c])  # (n_off, M+2)
        for p in range(M + 2):
            row = np.zeros(ncol)
            for o in range(len(offsets)):
                for i in range(0, p + 1):
                    row[o * (M + 2) + i] = phi[o, p - i]
            rows.append(row)
    A = np.array(rows)
    keep = np.linalg.norm(A, axis=1) > 0
    return A[keep], N


# ===== R1: Robin(alpha) x Neumann =====
alpha = 2.0
alpha_hat = np.zeros(M + 1); alpha_hat[0] = alpha
beta_hat = np.zeros(M + 1)
offsets4 = [(0, 0), (0, 1), (1, 0), (1, 1)]
redV = build_reduction(Jet2.constant(1.0, M), M, "V")
Cu, Cf = corner_constraints(redV, alpha_hat, +1.0, beta_hat, +1.0)
print("constraint rank:", rankof(Cu)[0], "of", Cu.shape)
A, N = corner_moment_matrix(redV, offsets4, Cu)
r, s = rankof(A)
print(f"R1 moment {A.shape}, rank {r}, nullity {A.shape[1]-r}, sv tail {s[-3:]}")

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
print("R1 closed-form residual:", np.linalg.norm(A @ xcf) / (np.linalg.norm(A) * np.linalg.norm(xcf)))
if A.shape[1] - r == 1:
    _, _, Vt = np.linalg.svd(A)
    null = Vt[-1] / Vt[-1][col(offsets4, M, 1, 1, 0)]
    print("R1 nullvec == closed form:", np.abs(null - xcf).max())

# ===== R2: Robin(alpha) x Robin(beta), top-left corner =====
beta = 0.7
beta_hat2 = np.zeros(M + 1); beta_hat2[0] = beta
offsets4b = [(0, -1), (0, 0), (1, -1), (1, 0)]
Cu2, Cf2 = corner_constraints(redV, alpha_hat, +1.0, beta_hat2, -1.0)
print("\nR2 constraint rank:", rankof(Cu2)[0], "of", Cu2.shape)
A2, N2 = corner_moment_matrix(redV, offsets4b, Cu2)
r2, s2 = rankof(A2)
print(f"R2 moment {A2.shape}, rank {r2}, nullity {A2.shape[1]-r2}, sv tail {s2[-3:]}")
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
xcf2 = np.zeros(A2.shape[1])
for (k, l), coefs in CR2.items():
    for i, c in enumerate(coefs):
        xcf2[col(offsets4b, M, k, l, i)] = c
print("R2 closed-form residual:", np.linalg.norm(A2 @ xcf2) / (np.linalg.norm(A2) * np.linalg.norm(xcf2)))
if A2.shape[1] - r2 == 1:
    _, _, Vt = np.linalg.svd(A2)
    null = Vt[-1] / Vt[-1][col(offsets4b, M, 1, -1, 0)]
    print("R2 nullvec == closed form:", np.abs(null - xcf2).max())

# alpha == beta degeneration
beta_eq = np.zeros(M + 1); beta_eq[0] = alpha
Cu3, _ = corner_constraints(redV, alpha_hat, +1.0, beta_eq, -1.0)
A3, N3 = corner_moment_matrix(redV, offsets4b, Cu3)
r3, s3 = rankof(A3)
print(f"\nR2 (alpha==beta) moment {A3.shape}, rank {r3}, nullity {A3.shape[1]-r3}")
want_od = np.array([2, 2 * alpha / 5, 4 * alpha**2 / 75, 0, 0, 0, 0])
if A3.shape[1] - r3 >= 1:
    _, _, Vt = np.linalg.svd(A3)
    nulls = Vt[r3:]
    print("null dim:", nulls.shape[0])
    null = Vt[-1] / Vt[-1][col(offsets4b, M, 1, -1, 0)]
    print("C_{0,-1}:", null[col(offsets4b, M, 0, -1, 0): col(offsets4b, M, 0, -1, 0) + 7], "want", want_od)
    print("C_{1,0} :", null[col(offsets4b, M, 1, 0, 0): col(offsets4b, M, 1, 0, 0) + 7])
    print("C_{1,-1}:", null[col(offsets4b, M, 1, -1, 0): col(offsets4b, M, 1, -1, 0) + 7])

# variable alpha/beta corner (like example registries): nullity check
aV = (lambda x_, y_: 2 + x_.sin() * y_.sin())(Jet2.variable_x(-2.5, 2.5, M), Jet2.variable_y(-2.5, 2.5, M))
redVv = build_reduction(aV, M, "V")
ty = Jet1.variable(2.5, M)
tx = Jet1.variable(-2.5, M)
alpha_v = ty.sin().coeffs
beta_v = tx.cos().coeffs
Cu4, _ = corner_constraints(redVv, alpha_v, +1.0, beta_v, -1.0)
A4, N4 = corner_moment_matrix(redVv, offsets4b, Cu4)
r4, s4 = rankof(A4)
print(f"\nR2 variable-coeff moment {A4.shape}, rank {r4}, nullity {A4.shape[1]-r4}, sv tail {s4[-3:]}")
