"""Index sets and the PDE reduction of Taylor coefficients to a thin basis.

For the operator -div(a grad u) = f, every Taylor coefficient of u at a
point can be rewritten in terms of the coefficients with x-order <= 1
(orientation "V") or y-order <= 1 (orientation "H") plus Taylor
coefficients of f, by repeatedly differentiating the PDE and solving for
the highest derivative.  The resulting linear tables are the engine
behind every stencil in this package: evaluating a table column as a
polynomial produces, for each basis coefficient, the polynomial weight it
carries in the local expansion of the solution.

Conventions: all tables act on *normalized* Taylor coefficients
(derivative / (m! n!)), matching :class:`hifd.jets.Jet2` storage.  The
``eval_g``/``eval_q`` helpers convert to the pairing with raw derivatives
for cross-checking against closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jets import Jet2

__all__ = [
    "BasisReduction",
    "build_reduction",
    "lam",
    "lam_size",
    "lam_thin",
]


@lru_cache(maxsize=None)
def lam(k: int) -> tuple[tuple[int, int], ...]:
    """All index pairs of total degree <= k, ordered by degree then x-order."""
    if k < 0:
        return ()
    return tuple((m, d - m) for d in range(k + 1) for m in range(d + 1))


def lam_size(k: int) -> int:
    return (k + 1) * (k + 2) // 2 if k >= 0 else 0


@lru_cache(maxsize=None)
def lam_thin(m1: int, orientation: str = "V") -> tuple[tuple[int, int], ...]:
    """Thin basis of size 2*m1+1: x-order <= 1 (V) or y-order <= 1 (H).

    For V the order is (0,0)...(0,m1), (1,0)...(1,m1-1); H swaps coordinates.
    """
    if orientation == "V":
        return tuple((0, n) for n in range(m1 + 1)) + tuple((1, n) for n in range(m1))
    if orientation == "H":
        return tuple((n, 0) for n in range(m1 + 1)) + tuple((n, 1) for n in range(m1))
    raise ValueError(f"orientation must be 'V' or 'H', got {orientation!r}")


@lru_cache(maxsize=None)
def _index_pos(k: int) -> dict[tuple[int, int], int]:
    return {idx: i for i, idx in enumerate(lam(k))}


@dataclass(frozen=True)
class BasisReduction:
    """Linear reduction of all Taylor coefficients onto the thin basis.

    For each (m, n) with m+n <= M+1 the normalized solution coefficient
    satisfies

        u_hat[(m,n)] = sum_b u_weights[row(m,n), col(b)] * u_hat[b]
                     + sum_c f_weights[row(m,n), col(c)] * f_hat[c]

    with b over the thin basis (size 2M+3) and c over indices of total
    degree <= M-1.  Rows of basis indices are coordinate deltas, and
    u_weights[(m,n), b] = 0 whenever the total order of b exceeds m+n.
    """

    orientation: str
    M: int
    a_jet: Jet2
    u_weights: np.ndarray  # (|lam(M+1)|, 2M+3)
    f_weights: np.ndarray  # (|lam(M+1)|, |lam(M-1)|)

    @property
    def all_indices(self) -> tuple[tuple[int, int], ...]:
        return lam(self.M + 1)

    @property
    def basis(self) -> tuple[tuple[int, int], ...]:
        return lam_thin(self.M + 1, self.orientation)

    @property
    def f_indices(self) -> tuple[tuple[int, int], ...]:
        return lam(self.M - 1)

    # -- polynomial views ----------------------------------------------------

    def monomials(self, points) -> np.ndarray:
        """Matrix of x^m y^n over lam(M+1) at the given (P, 2) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.array(self.all_indices)
        return pts[:, 0:1] ** idx[:, 0][None, :] * pts[:, 1:2] ** idx[:, 1][None, :]

    def g_values(self, points) -> np.ndarray:
        """Basis polynomials (normalized pairing) evaluated at points: (P, 2M+3)."""
        return self.monomials(points) @ self.u_weights

    def q_values(self, points) -> np.ndarray:
        """Source polynomials (normalized pairing) at points: (P, |lam(M-1)|)."""
        return self.monomials(points) @ self.f_weights

    def g_h_polys(self, offsets, v0: float = 0.0, w0: float = 0.0) -> np.ndarray:
        """Grid-size expansion of the basis polynomials at scaled offsets.

        Entry [o, b, d] is the coefficient of h^d in basis polynomial b
        evaluated at ((k+v0) h, (l+w0) h) for offset o = (k, l).  By the
        triangular structure of the table it vanishes for d below the
        total order of b.
        """
        return self._h_polys(self.u_weights, offsets, v0, w0)

    def q_h_polys(self, offsets, v0: float = 0.0, w0: float = 0.0) -> np.ndarray:
        return self._h_polys(self.f_weights, offsets, v0, w0)

    def _h_polys(self, weights, offsets, v0, w0) -> np.ndarray:
        offs = np.atleast_2d(np.asarray(offsets, dtype=float))
        mono = self.monomials(offs + np.array([v0, w0]))
        out = np.zeros((len(offs), weights.shape[1], self.M + 2))
        degs = np.array([m + n for (m, n) in self.all_indices])
        for d in range(self.M + 2):
            mask = degs == d
            out[:, :, d] = mono[:, mask] @ weights[mask, :]
        return out

    # -- derivative-pairing (un-normalized) evaluation -------------------------

    def eval_g(self, index, point) -> float:
        """Basis polynomial paired with the raw derivative of the given index."""
        b = self.basis.index(tuple(index))
        m, n = index
        val = self.g_values(np.array([point]))[0, b]
        return float(val) / (math.factorial(m) * math.factorial(n))

    def eval_q(self, index, point) -> float:
        c = self.f_indices.index(tuple(index))
        m, n = index
        val = self.q_values(np.array([point]))[0, c]
        return float(val) / (math.factorial(m) * math.factorial(n))

    def eval_g_h_poly(self, index, offset, v0: float = 0.0, w0: float = 0.0) -> np.ndarray:
        """h-polynomial of one basis function at one offset (derivative pairing)."""
        b = self.basis.index(tuple(index))
        m, n = index
        table = self.g_h_polys(np.array([offset], dtype=float), v0, w0)
        return table[0, b, :] / (math.factorial(m) * math.factorial(n))


def build_reduction(a_jet: Jet2, M: int, orientation: str = "V") -> BasisReduction:
    """Construct the reduction tables for a diffusion-coefficient jet.

    ``a_jet`` must have degree >= M and a strictly positive constant term.
    Indices are processed by increasing total degree, then increasing
    order in the eliminated coordinate, so each elimination only refers
    to rows that are already reduced.
    """
    if a_jet.degree < M:
        raise ValueError(f"coefficient jet degree {a_jet.degree} < M={M}")
    if not a_jet.value >= 1e-14:
        raise ValueError("diffusion coefficient must be positive at the base point")
    if orientation == "H":
        red_v = _build_reduction_v(a_jet.transpose(), M)
        return _transpose_reduction(red_v, a_jet)
    if orientation != "V":
        raise ValueError(f"orientation must be 'V' or 'H', got {orientation!r}")
    return _build_reduction_v(a_jet, M)


def _build_reduction_v(a_jet: Jet2, M: int) -> BasisReduction:
    indices = lam(M + 1)
    basis = lam_thin(M + 1, "V")
    f_idx = lam(M - 1)
    pos = _index_pos(M + 1)
    fpos = {idx: i for i, idx in enumerate(f_idx)}
    bpos = {idx: i for i, idx in enumerate(basis)}

    uw = np.zeros((len(indices), len(basis)))
    fw = np.zeros((len(indices), len(f_idx)))
    for idx in basis:
        uw[pos[idx], bpos[idx]] = 1.0

    # normalized coefficient jet, zero-padded so A[i, j] is safe for i+j <= M+1
    A = np.zeros((M + 3, M + 3))
    d0 = min(a_jet.degree, M + 2)
    A[: d0 + 1, : d0 + 1] = a_jet.coeffs[: d0 + 1, : d0 + 1]
    a00 = A[0, 0]

    # Differentiating a*(u_xx + u_yy) + a_x*u_x + a_y*u_y = -f by (p, q) and
    # expressing everything in normalized coefficients gives
    #   sum_{i<=p, j<=q} A[i,j] * ( (p-i+2)(p-i+1) uh[p-i+2, q-j]
    #                             + (q-j+2)(q-j+1) uh[p-i, q-j+2] )
    # + sum A[i+1,j] (i+1)(p-i+1) uh[p-i+1, q-j]
    # + sum A[i,j+1] (j+1)(q-j+1) uh[p-i, q-j+1]  =  -fh[p, q];
    # the pivot (i = j = 0 in the first group) carries uh[m, n] = uh[p+2, q].
    for d in range(2, M + 2):
        for m in range(2, d + 1):
            n = d - m
            p, q = m - 2, n
            row_u = np.zeros(len(basis))
            row_f = np.zeros(len(f_idx))
            row_f[fpos[(p, q)]] = -1.0
            for i in range(p + 1):
                for j in range(q + 1):
                    terms = [
                        (A[i, j] * (q - j + 2) * (q - j + 1), (p - i, q - j + 2)),
                        (A[i + 1, j] * (i + 1) * (p - i + 1), (p - i + 1, q - j)),
                        (A[i, j + 1] * (j + 1) * (q - j + 1), (p - i, q - j + 1)),
                    ]
                    if (i, j) != (0, 0):
                        terms.append((A[i, j] * (p - i + 2) * (p - i + 1), (p - i + 2, q - j)))
                    for w, rs in terms:
                        if w != 0.0:
                            r = pos[rs]
                            row_u -= w * uw[r]
                            row_f -= w * fw[r]
            piv = a00 * m * (m - 1)
            uw[pos[(m, n)]] = row_u / piv
            fw[pos[(m, n)]] = row_f / piv
    return BasisReduction("V", M, a_jet, uw, fw)


def _transpose_reduction(red_v: BasisReduction, a_jet: Jet2) -> BasisReduction:
    """Relabel a V-reduction of the transposed coefficient as an H-reduction.

    Row (m, n) of the H table is row (n, m) of the V table of a(y, x); the
    thin-basis column orders correspond one-to-one under the swap, while
    source columns need the same index swap applied.
    """
    M = red_v.M
    pos = _index_pos(M + 1)
    perm_rows = np.array([pos[(n, m)] for (m, n) in lam(M + 1)])
    fpos = {idx: i for i, idx in enumerate(lam(M - 1))}
    uw = red_v.u_weights[perm_rows, :]
    fw = red_v.f_weights[perm_rows, :]
    if M >= 1:
        perm_f = np.array([fpos[(n, m)] for (m, n) in lam(M - 1)])
        fw = fw[:, perm_f]
    return BasisReduction("H", M, a_jet, uw, fw)
