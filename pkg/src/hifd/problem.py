"""Problem data model: domain, grid, level sets, boundary conditions, and
grid-point classification for interface problems on a rectangle.

The domain is (l1, l2) x (l3, l4) with l4 - l3 = n0 * (l2 - l1); a level
set psi splits it into the plus region (psi >= 0) and the minus region
(psi < 0), separated by the interface curve {psi = 0}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .fields import Field1D, Field2D, manufactured_f
from .jets import Jet1, Jet2

__all__ = [
    "BCKind",
    "BoundaryOperator",
    "Classification",
    "ClassificationError",
    "ConvexPolygonLevelSet",
    "DomainRect",
    "GridSpec",
    "IrregularInfo",
    "PointCategory",
    "ProblemSpec",
    "SIDES",
    "classify_points",
    "jump_jets",
    "percent_irregular",
]

SIDES = ("g1", "g2", "g3", "g4")  # x = l1, x = l2, y = l3, y = l4

COMPACT_OFFSETS = tuple((k, l) for k in (-1, 0, 1) for l in (-1, 0, 1))
EXTENDED_OFFSETS = ((-2, 0), (0, -2), (0, 2), (2, 0))


class ClassificationError(ValueError):
    """Grid/interface configuration the scheme does not support."""


@dataclass(frozen=True)
class DomainRect:
    l1: float
    l2: float
    l3: float
    l4: float
    n0: int = 1

    def __post_init__(self):
        if not (self.l1 < self.l2 and self.l3 < self.l4):
            raise ValueError("domain must satisfy l1 < l2 and l3 < l4")
        if self.n0 < 1:
            raise ValueError("aspect factor n0 must be a positive integer")
        w = self.l2 - self.l1
        if abs((self.l4 - self.l3) - self.n0 * w) > 1e-12 * max(1.0, abs(w)):
            raise ValueError("height must equal n0 * width for a uniform square grid")


@dataclass(frozen=True)
class GridSpec:
    domain: DomainRect
    J: int

    def __post_init__(self):
        if self.J < 2:
            raise ValueError("refinement level J must be >= 2")
        # node coordinates are computed as l1 + i*h (never accumulated), so
        # the far edges land exactly; spot-check anyway
        if abs(self.x(self.n1) - self.domain.l2) > 1e-12 * (self.domain.l2 - self.domain.l1):
            raise ValueError("grid does not reach the right edge")

    @property
    def n1(self) -> int:
        return 2 ** self.J

    @property
    def n2(self) -> int:
        return self.domain.n0 * self.n1

    @property
    def h(self) -> float:
        return (self.domain.l2 - self.domain.l1) / self.n1

    def x(self, i: int) -> float:
        return self.domain.l1 + i * self.h

    def y(self, j: int) -> float:
        return self.domain.l3 + j * self.h

    @property
    def xs(self) -> np.ndarray:
        return self.domain.l1 + np.arange(self.n1 + 1) * self.h

    @property
    def ys(self) -> np.ndarray:
        return self.domain.l3 + np.arange(self.n2 + 1) * self.h

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1 + 1, self.n2 + 1)

    def meshgrid(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")


class BCKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


@dataclass(frozen=True)
class BoundaryOperator:
    """One side's boundary condition: u, du/dn, or du/dn + alpha*u.

    ``g`` is the side datum as a 1D field of the coordinate running along
    the side; ``alpha`` is the Robin coefficient (None unless Robin).
    """

    kind: BCKind
    g: Field1D
    alpha: Field1D | None = None

    def __post_init__(self):
        if (self.alpha is not None) != (self.kind is BCKind.ROBIN):
            raise ValueError("alpha must be present exactly for Robin conditions")

    def alpha_jet(self, t0: float, degree: int) -> Jet1:
        if self.alpha is None:
            return Jet1.constant(0.0, degree, t0)
        return self.alpha.jet(t0, degree)


class ConvexPolygonLevelSet:
    """Piecewise-affine level set of a convex polygon, negative inside.

    value(p) = max_e  n_e . (p - v_e)  over edges with outward unit
    normals n_e.  Jets are the active edge's affine function, so base
    points must lie on open edges, never on polygon corners; the
    ``base_point_near`` hook routes nearby stencils onto the closest edge
    segment.
    """

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.shape[0] < 3:
            raise ValueError("need at least three vertices")
        self.vertices = v
        nv = len(v)
        normals = []
        for i in range(nv):
            a, b = v[i], v[(i + 1) % nv]
            t = b - a
            n = np.array([t[1], -t[0]])
            n /= np.hypot(*n)
            # orient outward: positive on the far side of the centroid
            if n @ (a - v.mean(axis=0)) < 0:
                n = -n
            normals.append(n)
        self.normals = np.array(normals)

    def __call__(self, x, y):
        p = np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float)), axis=-1)
        vals = np.einsum("ed,...d->...e", self.normals, p) - \
            np.einsum("ed,ed->e", self.normals, self.vertices)
        out = vals.max(axis=-1)
        return float(out) if np.isscalar(x) and np.isscalar(y) else out

    def _active_edge(self, x0: float, y0: float) -> int:
        vals = self.normals @ np.array([x0, y0]) - np.einsum("ed,ed->e", self.normals, self.vertices)
        return int(np.argmax(vals))

    def jet(self, x0: float, y0: float, degree: int) -> Jet2:
        e = self._active_edge(x0, y0)
        n = self.normals[e]
        c = np.zeros((degree + 1, degree + 1))
        c[0, 0] = n @ (np.array([x0, y0]) - self.vertices[e])
        if degree >= 1:
            c[1, 0] = n[0]
            c[0, 1] = n[1]
        return Jet2(c, degree, (x0, y0))

    def base_point_near(self, node, h: float):
        """Closest point on an edge segment within the open h-square."""
        p = np.asarray(node, dtype=float)
        nv = len(self.vertices)
        best = None
        margin = 1e-9
        for i in range(nv):
            a, b = self.vertices[i], self.vertices[(i + 1) % nv]
            t = b - a
            L2 = t @ t
            s = float(np.clip((p - a) @ t / L2, margin, 1.0 - margin))
            q = a + s * t
            if np.max(np.abs(q - p)) < h * (1 - 1e-12):
                d = np.hypot(*(q - p))
                if best is None or d < best[0]:
                    best = (d, q)
        if best is None:
            raise ClassificationError(
                f"no interface edge point found inside the open square of node {tuple(p)}")
        return tuple(best[1])


@dataclass
class ProblemSpec:
    """Full description of one interface problem.

    ``psi`` is the level set (plus region where psi >= 0); ``a_plus`` /
    ``a_minus`` the diffusion coefficients; ``f_plus`` / ``f_minus`` the
    sources (any object with ``.jet(x, y, degree)``); ``g_d`` / ``g_n``
    the jump data as 2D fields near the interface, or None to derive them
    from the exact solutions; ``boundary`` maps side names g1..g4 to
    operators.  ``exact_plus`` / ``exact_minus`` enable error measurement.
    """

    domain: DomainRect
    psi: object
    a_plus: Field2D
    a_minus: Field2D
    f_plus: object
    f_minus: object
    boundary: dict
    g_d: Field2D | None = None
    g_n: Field2D | None = None
    exact_plus: Field2D | None = None
    exact_minus: Field2D | None = None
    name: str = ""

    def __post_init__(self):
        missing = [s for s in SIDES if s not in self.boundary]
        if missing:
            raise ValueError(f"boundary operators missing for sides {missing}")
        if self.g_d is None and self.exact_plus is None:
            raise ValueError("need either g_d data or exact solutions")

    def a_field(self, plus: bool) -> Field2D:
        return self.a_plus if plus else self.a_minus

    def f_source(self, plus: bool):
        return self.f_plus if plus else self.f_minus

    def exact(self, plus: bool) -> Field2D | None:
        return self.exact_plus if plus else self.exact_minus

    def check_coefficient_positive(self, grid: GridSpec) -> None:
        X, Y = grid.meshgrid()
        for fld in (self.a_plus, self.a_minus):
            if np.min(fld(X, Y)) <= 0.0:
                raise ValueError("diffusion coefficient must be positive on the closed domain")


def jump_jets(problem: ProblemSpec, base_point, deg_d: int = 5, deg_n: int = 4):
    """Jets of the solution jump and flux jump at an interface point.

    Supplied jump fields take precedence (the problem data); otherwise the
    jumps are manufactured from the exact solutions, with the normal
    direction grad(psi)/|grad(psi)| extended off the curve by jets.
    """
    x0, y0 = base_point
    if problem.g_d is not None:
        gd = problem.g_d.jet(x0, y0, deg_d)
    else:
        gd = (problem.exact_plus.jet(x0, y0, deg_d) -
              problem.exact_minus.jet(x0, y0, deg_d))
    if problem.g_n is not None:
        gn = problem.g_n.jet(x0, y0, deg_n)
    else:
        psi = problem.psi.jet(x0, y0, deg_n + 2)
        gx, gy = psi.dx(), psi.dy()
        norm2 = gx * gx + gy * gy
        if norm2.value < 1e-20:
            raise ValueError(f"degenerate level-set gradient at {base_point}")
        n1 = gx / norm2.sqrt()
        n2 = gy / norm2.sqrt()
        ap = problem.a_plus.jet(x0, y0, deg_n + 1)
        am = problem.a_minus.jet(x0, y0, deg_n + 1)
        up = problem.exact_plus.jet(x0, y0, deg_n + 2)
        um = problem.exact_minus.jet(x0, y0, deg_n + 2)
        gn = ((ap * up.dx() - am * um.dx()) * n1 +
              (ap * up.dy() - am * um.dy()) * n2).truncate(deg_n)
    return gd, gn


class PointCategory(enum.IntEnum):
    INTERIOR_REGULAR_PLUS = 1
    INTERIOR_REGULAR_MINUS = 2
    INTERIOR_IRREGULAR = 3
    SIDE_G1 = 4
    SIDE_G2 = 5
    SIDE_G3 = 6
    SIDE_G4 = 7
    CORNER = 8


@dataclass(frozen=True)
class IrregularInfo:
    """Split pattern of the 13-point neighborhood of an irregular node."""

    d_plus: tuple
    d_minus: tuple
    e_plus: tuple
    e_minus: tuple

    @property
    def sides(self) -> dict:
        out = {o: +1 for o in self.d_plus + self.e_plus}
        out.update({o: -1 for o in self.d_minus + self.e_minus})
        return out


CORNER_SIDES = {
    (0, 0): ("g1", "g3"),
    (1, 0): ("g2", "g3"),
    (0, 1): ("g1", "g4"),
    (1, 1): ("g2", "g4"),
}


@dataclass(frozen=True)
class Classification:
    grid: GridSpec
    categories: np.ndarray    # (n1+1, n2+1) of PointCategory values
    irregular: dict           # (i, j) -> IrregularInfo
    curve_contacts: dict      # (i, j) -> tuple of compact offsets lying on the curve

    def category(self, i: int, j: int) -> PointCategory:
        return PointCategory(int(self.categories[i, j]))

    def counts(self) -> dict:
        vals, cnt = np.unique(self.categories, return_counts=True)
        return {PointCategory(int(v)): int(c) for v, c in zip(vals, cnt)}

    def corner_sides(self, i: int, j: int):
        key = (0 if i == 0 else 1, 0 if j == 0 else 1)
        return CORNER_SIDES[key]


def classify_points(grid: GridSpec, psi) -> Classification:
    """Classify every node as regular (by side), irregular, side, or corner.

    A node belongs to the plus side when psi >= 0 there.  An interior
    node is irregular when its compact 3x3 neighborhood carries strictly
    positive and strictly negative values.  A neighborhood that touches
    the curve only at nodes lying exactly on it (psi = 0 to rounding)
    stays regular on its strict side; those contact offsets are recorded
    so assembly can move the known jump values to the right-hand side.
    Irregular nodes within 2h of the boundary are rejected (the 13-point
    stencil would leave the domain), as are boundary nodes whose compact
    neighborhood is crossed by the interface.
    """
    n1, n2 = grid.n1, grid.n2
    X, Y = grid.meshgrid()
    vals = np.asarray(psi(X, Y), dtype=float)
    zero_tol = 1e-12 * max(np.abs(vals).max(), 1e-300)
    pos = vals > zero_tol
    neg = vals < -zero_tol
    on_curve = ~pos & ~neg
    sign_plus = vals >= 0.0

    cat = np.zeros((n1 + 1, n2 + 1), dtype=np.int8)
    any_pos = np.zeros((n1 - 1, n2 - 1), dtype=bool)
    any_neg = np.zeros_like(any_pos)
    any_zero = np.zeros_like(any_pos)
    for dk in (-1, 0, 1):
        for dl in (-1, 0, 1):
            any_pos |= pos[1 + dk: n1 + dk, 1 + dl: n2 + dl]
            any_neg |= neg[1 + dk: n1 + dk, 1 + dl: n2 + dl]
            any_zero |= on_curve[1 + dk: n1 + dk, 1 + dl: n2 + dl]
    if np.any(~any_pos & ~any_neg):
        raise ClassificationError("level set vanishes on a whole compact neighborhood")
    interior = np.where(
        any_pos & any_neg, PointCategory.INTERIOR_IRREGULAR,
        np.where(any_pos, PointCategory.INTERIOR_REGULAR_PLUS,
                 PointCategory.INTERIOR_REGULAR_MINUS))
    cat[1:n1, 1:n2] = interior

    # boundary nodes
    cat[0, :] = PointCategory.SIDE_G1
    cat[n1, :] = PointCategory.SIDE_G2
    cat[1:n1, 0] = PointCategory.SIDE_G3
    cat[1:n1, n2] = PointCategory.SIDE_G4
    for (i, j) in ((0, 0), (n1, 0), (0, n2), (n1, n2)):
        cat[i, j] = PointCategory.CORNER

    # boundary nodes too close to the interface: mixed strict signs in the
    # in-domain part of the compact window
    edge_mask = np.zeros(vals.shape, dtype=bool)
    edge_mask[0, :] = edge_mask[-1, :] = True
    edge_mask[:, 0] = edge_mask[:, -1] = True
    bad = []
    for i, j in np.argwhere(edge_mask):
        wp = pos[max(i - 1, 0): i + 2, max(j - 1, 0): j + 2]
        wn = neg[max(i - 1, 0): i + 2, max(j - 1, 0): j + 2]
        if wp.any() and wn.any():
            bad.append((int(i), int(j)))
    if bad:
        raise ClassificationError(
            f"interface crosses the compact neighborhood of boundary nodes {bad[:4]}"
            f"{'...' if len(bad) > 4 else ''}; the boundary schemes assume a one-sided boundary")

    irregular: dict = {}
    for i, j in np.argwhere(cat == PointCategory.INTERIOR_IRREGULAR):
        i, j = int(i), int(j)
        if i < 2 or j < 2 or i > n1 - 2 or j > n2 - 2:
            raise ClassificationError(
                f"irregular node ({i},{j}) within 2h of the boundary; refine the grid")
        dp, dm, ep, em = [], [], [], []
        for (k, l) in COMPACT_OFFSETS:
            (dp if sign_plus[i + k, j + l] else dm).append((k, l))
        for (k, l) in EXTENDED_OFFSETS:
            (ep if sign_plus[i + k, j + l] else em).append((k, l))
        irregular[(i, j)] = IrregularInfo(tuple(dp), tuple(dm), tuple(ep), tuple(em))

    contacts: dict = {}
    if np.any(any_zero & ~(any_pos & any_neg)):
        for i, j in np.argwhere(any_zero & ~(any_pos & any_neg)):
            i, j = int(i) + 1, int(j) + 1
            offs = tuple((k, l) for (k, l) in COMPACT_OFFSETS if on_curve[i + k, j + l])
            contacts[(i, j)] = offs

    return Classification(grid, cat, irregular, contacts)


def percent_irregular(classification: Classification) -> float:
    """Fraction of all grid nodes that are interior irregular."""
    total = classification.categories.size
    return len(classification.irregular) / total
