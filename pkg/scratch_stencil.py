"""Scratch: moment systems for regular/side/corner stencils; rank + pinning study."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction, lam, lam_thin, lam_size

np.set_printoptions(precision=8, suppress=True, linewidth=200)


def moment_matrix(families, offsets, M):
    """families: list of (low_power, phi) with phi (n_off, M+2) h-coeff arrays."""
    ncol = len(offsets) * (M + 2)
    rows = []
    for low, phi in families:
        for p in range(low, M + 2):
            row = np.zeros(ncol)
            for o in range(len(offsets)):
                for i in range(0, p + 1):
                    d = p - i
                    if d <= M + 1:
                        row[o * (M + 2) + i] = phi[o, d]
            rows.append(row)
    return np.array(rows)


def side_families(red, offsets, alpha_hat, sign):
    """Combined boundary families for a V-side (or H via the H-ordered reduction)."""
    M = red.M
    gh = red.g_h_polys(np.array(offsets, float))  # (n_off, 2M+3, M+2)
    fams = []
    for n in range(M + 2):
        phi = gh[:, n, :].copy()  # (0,n) block (V) / (n,0) block (H): position n
        if n <= M:
            for i in range(n, M + 1):
                phi += sign * alpha_hat[i - n] * gh[:, (M + 2) + i, :]
        fams.append((n, phi))
    return fams


def solve_pinned(A, pins, ncol):
    pinned_cols = sorted(pins)
    vals = np.array([pins[c] for c in pinned_cols])
    free = [c for c in range(ncol) if c not in pins]
    rhs = -A[:, pinned_cols] @ vals
    sol, res, rank, sv = np.linalg.lstsq(A[:, free], rhs, rcond=None)
    x = np.zeros(ncol)
    x[free] = sol
    for c, v in pins.items():
        x[c] = v
    moment_res = np.linalg.norm(A @ x) / max(1.0, np.linalg.norm(A) * np.linalg.norm(x))
    return x, moment_res, rank, len(free)


def col(offsets, M, k, l, i):
    return offsets.index((k, l)) * (M + 2) + i


def rankof(A, tol=1e-9):
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * s[0])), s


# ======== REGULAR M=6 ========
print("=== regular stencil, M=6 ===")
M = 6
offsets9 = [(k, l) for k in (-1, 0, 1) for l in (-1, 0, 1)]
for aname, ajet in [("const", Jet2.constant(3.7, M)),
                    ("var", (lambda x, y: 2 + x.sin() * y.sin())(Jet2.variable_x(0.3, 0.2, M), Jet2.variable_y(0.3, 0.2, M)))]:
    red = build_reduction(ajet, M, "V")
    gh = red.g_h_polys(np.array(offsets9, float))
    fams = [(m + n, gh[:, b, :]) for b, (m, n) in enumerate(red.basis)]
    A = moment_matrix(fams, offsets9, M)
    r, s = rankof(A)
    print(f"a={aname}: moment matrix {A.shape}, rank {r}, nullity {A.shape[1]-r}")

# paper pinning for the regular stencil
pins = {col(offsets9, M, -1, -1, 0): 1.0}
for (k, l, ii) in [(-1, 0, (7,)), (0, -1, (7,)), (0, 0, (6, 7)),
                   (-1, 1, (1, 6, 7)), (0, 1, (5, 6, 7)), (1, -1, (5, 6, 7)),
                   (1, 0, (4, 5, 6, 7)), (1, 1, (2, 3, 4, 5, 6, 7))]:
    for i in ii:
        pins[col(offsets9, M, k, l, i)] = 0.0
print("n pins:", len(pins))
x, mres, rank, nfree = solve_pinned(A, pins, A.shape[1])
print(f"variable a: pinned solve: moment residual {mres:.2e}, lstsq rank {rank}/{nfree}")
C = {(k, l): x[col(offsets9, M, k, l, 0):col(offsets9, M, k, l, 0) + M + 2] for (k, l) in offsets9}
red_c = build_reduction(Jet2.constant(3.7, M), M, "V")
gh_c = red_c.g_h_polys(np.array(offsets9, float))
fams_c = [(m + n, gh_c[:, b, :]) for b, (m, n) in enumerate(red_c.basis)]
Ac = moment_matrix(fams_c, offsets9, M)
xc, mresc, rankc, nfreec = solve_pinned(Ac, pins, Ac.shape[1])
print(f"const a: pinned solve: residual {mresc:.2e}, rank {rankc}/{nfreec}")
Cc = {(k, l): xc[col(offsets9, M, k, l, 0):col(offsets9, M, k, l, 0) + M + 2] for (k, l) in offsets9}
print("const-a C h^0 coeffs:", {kl: round(v[0], 6) for kl, v in Cc.items()})
print("const-a higher-power mass:", max(np.abs(v[1:]).max() for v in Cc.values()))

# ======== SIDE B1 (Robin, V) M=5 ========
print("\n=== side stencil B1 (Robin on left side), M=5, const a, const alpha ===")
M = 5
alpha = 2.0
offsets6 = [(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
red = build_reduction(Jet2.constant(1.0, M), M, "V")
alpha_hat = np.zeros(M + 1); alpha_hat[0] = alpha
fams = side_families(red, offsets6, alpha_hat, +1.0)
A = moment_matrix(fams, offsets6, M)
r, s = rankof(A)
print(f"moment matrix {A.shape}, rank {r}, nullity {A.shape[1]-r}")

# closed forms from the printed constant-coefficient solution
h = 1.0  # treat as polynomial coefficients in h
CB1 = {
    (0, 1): np.array([2, alpha / 5, alpha**2 / 75, 0, 0, 0, 0], float),
    (0, 0): np.array([-10, -34 * alpha / 5, -8 * alpha**2 / 25, 16 * alpha**3 / 225,
                      -16 * alpha**4 / 675, 8 * alpha**5 / 675, 0], float),
    (1, 1): np.array([1, 0, 0, 0, 0, 0, 0], float),
    (1, 0): np.array([4, 2 * alpha / 5, -8 * alpha**2 / 75, 8 * alpha**3 / 225,
                      -8 * alpha**4 / 675, 0, 0], float),
}
CB1[(0, -1)] = CB1[(0, 1)]
CB1[(1, -1)] = CB1[(1, 1)]
xcf = np.zeros(A.shape[1])
for (k, l), coefs in CB1.items():
    for i, c in enumerate(coefs):
        xcf[col(offsets6, M, k, l, i)] = c
print("closed form satisfies moments?  |A x|/|A||x| =",
      np.linalg.norm(A @ xcf) / (np.linalg.norm(A) * np.linalg.norm(xcf)))

# paper pin list for B1
pinsB1 = {col(offsets6, M, 1, 1, 0): 1.0}
for (k, l, ii) in [(0, 0, (6,)), (0, 1, (5, 6)), (1, -1, (1, 4, 5, 6)),
                   (1, 0, (3, 4, 5, 6)), (1, 1, (2, 3, 4, 5, 6))]:
    for i in ii:
        pinsB1[col(offsets6, M, k, l, i)] = 0.0
print("paper pins:", len(pinsB1))
xp, mres, rank, nfree = solve_pinned(A, pinsB1, A.shape[1])
print(f"pinned solve: residual {mres:.2e}, lstsq rank {rank}/{nfree}")
# does pinned solution equal closed form?
print("pinned == closed form?", np.allclose(xp, xcf, atol=1e-9))
if not np.allclose(xp, xcf, atol=1e-9):
    CP = {(k, l): xp[col(offsets6, M, k, l, 0):col(offsets6, M, k, l, 0) + M + 2] for (k, l) in offsets6}
    for kl in offsets6:
        print(" ", kl, "pinned:", np.round(CP[kl], 8), " closed:", np.round(CB1[kl], 8))
