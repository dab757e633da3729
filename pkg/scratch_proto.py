"""Scratch prototype: validate reduction + explore stencil moment systems."""
import sys
sys.path.insert(0, "src")
import numpy as np
from hifd.jets import Jet1, Jet2
from hifd.basis import build_reduction, lam, lam_thin, lam_size

np.set_printoptions(precision=6, suppress=True, linewidth=150)


def jet_of(fn, x0, y0, D):
    return fn(Jet2.variable_x(x0, y0, D), Jet2.variable_y(x0, y0, D))


# --- 1. jets sanity ---
j = jet_of(lambda x, y: x.sin() * y.sin(), 0.0, 0.0, 3)
print("sin(x)sin(y) @0: c[1,1] =", j.coeff(1, 1), " c[0,0] =", j.coeff(0, 0), " c[2,0] =", j.coeff(2, 0))

# --- 2. reduction: constant a ---
red = build_reduction(Jet2.constant(1.0, 6), 2, "V")
print("basis:", red.basis)
# normalized G_{0,2}: expect y^2 - x^2  => weights row of (2,0) on (0,2) = -1
from hifd.basis import _index_pos
pos = _index_pos(3)
print("u_weights[(2,0) row]:", red.u_weights[pos[(2, 0)]])
print("eval_g((0,2),(x,y)) at (1,1):", red.eval_g((0, 2), (1.0, 1.0)), "expect 0 (y^2/2-x^2/2)")
print("eval_g((0,2),(0,2)):", red.eval_g((0, 2), (0.0, 2.0)), "expect 2")
print("eval_q((0,0),(1,0)):", red.eval_q((0, 0), (1.0, 0.0)), "expect -1/2")

# --- 3. manufactured reconstruction oracle: variable a ---
def afun(x, y):
    return 1e3 * (2 + x.sin() * y.sin()) if isinstance(x, Jet2) else 1e3 * (2 + np.sin(x) * np.sin(y))

def ufun(x, y):
    return (x * x * y).sin() + (x + 2 * y).cos() if isinstance(x, Jet2) else np.sin(x**2 * y) + np.cos(x + 2 * y)

M = 4
x0, y0 = 0.3, -0.2
aJ = jet_of(afun, x0, y0, M + 2)
uJ = jet_of(ufun, x0, y0, M + 3)
# f = -(a_x u_x + a_y u_y + a (u_xx + u_yy)), truncated
fJ = -(aJ.dx() * uJ.dx() + aJ.dy() * uJ.dy() + aJ * (uJ.dx().dx() + uJ.dy().dy()))
fJ = fJ.truncate(M - 1)

for orient in ("V", "H"):
    red = build_reduction(aJ.truncate(M), M, orient)
    basis_vec = np.array([uJ.coeff(m, n) for (m, n) in red.basis])
    f_vec = np.array([fJ.coeff(m, n) for (m, n) in red.f_indices])
    recon = red.u_weights @ basis_vec + red.f_weights @ f_vec
    truth = np.array([uJ.coeff(m, n) for (m, n) in red.all_indices])
    err = np.max(np.abs(recon - truth)) / np.max(np.abs(truth))
    print(f"reduction {orient}: max rel reconstruction err = {err:.3e}")
