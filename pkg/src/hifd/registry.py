"""Built-in interface problems: the ten benchmark configurations.

Five problems carry manufactured exact solutions (keys ex1..ex5, with
high-contrast coefficients, constant or non-constant jumps, one
sharp-edged interface); five prescribe data only (u1..u5).  Domains,
coefficients, solutions, jumps, and boundary conditions follow the
published benchmark set verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Field1D, Field2D, ManufacturedSource, constant1d, constant2d
from .jets import Jet1, Jet2, jet_cos as cos, jet_sin as sin
from .problem import BCKind, BoundaryOperator, ConvexPolygonLevelSet, DomainRect, ProblemSpec

__all__ = ["EXAMPLES", "ExampleDef", "BoundaryRestriction", "build_problem", "example_keys"]

PI = math.pi


class BoundaryRestriction(Field1D):
    """Side datum (B u)|side manufactured from an exact solution."""

    def __init__(self, u_field: Field2D, domain: DomainRect, side: str,
                 kind: BCKind, alpha: Field1D | None = None):
        super().__init__(None, name=f"{side} from exact u")
        self.u_field = u_field
        self.side = side
        self.kind = kind
        self.alpha = alpha
        self.coord = {"g1": domain.l1, "g2": domain.l2,
                      "g3": domain.l3, "g4": domain.l4}[side]
        self.normal_sign = {"g1": -1.0, "g2": +1.0, "g3": -1.0, "g4": +1.0}[side]

    def _point(self, t):
        if self.side in ("g1", "g2"):
            return self.coord, t
        return t, self.coord

    def jet(self, t0: float, degree: int) -> Jet1:
        x0, y0 = self._point(t0)
        uj = self.u_field.jet(x0, y0, degree + 1)
        tangential_first = self.side in ("g1", "g2")
        if self.kind is BCKind.DIRICHLET:
            c = np.array([uj.coeff(0, n) if tangential_first else uj.coeff(n, 0)
                          for n in range(degree + 1)])
            return Jet1(c, degree, t0)
        dn = np.array([uj.coeff(1, n) if tangential_first else uj.coeff(n, 1)
                       for n in range(degree + 1)]) * self.normal_sign
        if self.kind is BCKind.ROBIN:
            a_hat = self.alpha.jet(t0, degree).coeffs
            u_hat = np.array([uj.coeff(0, n) if tangential_first else uj.coeff(n, 0)
                              for n in range(degree + 1)])
            dn = dn + np.array([
                sum(a_hat[n - i] * u_hat[i] for i in range(n + 1))
                for n in range(degree + 1)])
        return Jet1(dn, degree, t0)

    def __call__(self, t):
        if np.isscalar(t):
            return self.jet(float(t), 0).value
        return np.array([self.jet(float(v), 0).value for v in np.ravel(t)]).reshape(np.shape(t))


@dataclass(frozen=True)
class ExampleDef:
    """Registry entry: problem factory plus run defaults."""

    key: str
    description: str
    build: callable
    default_levels: tuple
    known_u: bool
    expected_order_hybrid: float = 6.0
    expected_order_compact9: float = 3.5


def _dirichlet(u_field, domain, side):
    return BoundaryOperator(BCKind.DIRICHLET, BoundaryRestriction(u_field, domain, side, BCKind.DIRICHLET))


def _manufactured_boundary(u_field, domain, kinds_alphas):
    out = {}
    for side, (kind, alpha) in kinds_alphas.items():
        out[side] = BoundaryOperator(
            kind, BoundaryRestriction(u_field, domain, side, kind, alpha), alpha)
    return out


def _mixed_kinds(domain, u_field):
    """The Robin/Dirichlet/Neumann/Robin arrangement used by ex1 and ex2."""
    alpha = Field1D(lambda y: sin(y), "sin(y)")
    beta = Field1D(lambda x: cos(x), "cos(x)")
    return _manufactured_boundary(u_field, domain, {
        "g1": (BCKind.ROBIN, alpha),
        "g2": (BCKind.DIRICHLET, None),
        "g3": (BCKind.NEUMANN, None),
        "g4": (BCKind.ROBIN, beta),
    })


def _ex3() -> ProblemSpec:
    dom = DomainRect(-1.5, 1.5, -1.5, 1.5)
    psi = Field2D(lambda x, y: y * y + 2 * x * x / (x * x + 1) - 1, "oval")
    a_p = Field2D(lambda x, y: 1e3 * (2 + sin(x) * sin(y)))
    a_m = Field2D(lambda x, y: 1e-3 * (2 + sin(x) * sin(y)))
    u_p = Field2D(lambda x, y: 1e-3 * sin(4 * x) * sin(4 * y) * (y * y * (x * x + 1) + x * x - 1))
    u_m = Field2D(lambda x, y: 1e3 * sin(4 * x) * sin(4 * y) * (y * y * (x * x + 1) + x * x - 1) + 200)
    boundary = {s: _dirichlet(u_p, dom, s) for s in ("g1", "g2", "g3", "g4")}
    return ProblemSpec(
        domain=dom, psi=psi, a_plus=a_p, a_minus=a_m,
        f_plus=ManufacturedSource(a_p, u_p), f_minus=ManufacturedSource(a_m, u_m),
        g_d=constant2d(-200.0), g_n=constant2d(0.0),
        boundary=boundary, exact_plus=u_p, exact_minus=u_m, name="ex3")


def _ex5() -> ProblemSpec:
    dom = DomainRect(-4.5, 4.5, -4.5, 4.5)
    psi = ConvexPolygonLevelSet([(2.0, 0.0), (0.0, 2.0), (-2.0, 0.0), (0.0, -2.0)])
    a_p = constant2d(1e-3)
    a_m = constant2d(1e3)
    u_p = Field2D(lambda x, y: 1e3 * sin(x - y))
    u_m = Field2D(lambda x, y: 1e-3 * cos(x) * cos(y) + 1000)
    g_d = Field2D(lambda x, y: 1e3 * sin(x - y) - (1e-3 * cos(x) * cos(y) + 1000))
    boundary = {s: _dirichlet(u_p, dom, s) for s in ("g1", "g2", "g3", "g4")}
    return ProblemSpec(
        domain=dom, psi=psi, a_plus=a_p, a_minus=a_m,
        f_plus=ManufacturedSource(a_p, u_p), f_minus=ManufacturedSource(a_m, u_m),
        g_d=g_d, g_n=None,
        boundary=boundary, exact_plus=u_p, exact_minus=u_m, name="ex5")


def _ex1() -> ProblemSpec:
    dom = DomainRect(-2.5, 2.5, -2.5, 2.5)
    psi = Field2D(lambda x, y: x ** 4 + 2 * y ** 4 - 2, "quartic")
    a_p = Field2D(lambda x, y: 1e-3 * (2 + sin(x) * sin(y)))
    a_m = Field2D(lambda x, y: 1e3 * (2 + sin(x) * sin(y)))
    u_p = Field2D(lambda x, y: 1e3 * sin(4 * PI * x) * sin(4 * PI * y) * (x ** 4 + 2 * y ** 4 - 2))
    u_m = Field2D(lambda x, y: 1e-3 * sin(4 * PI * x) * sin(4 * PI * y) * (x ** 4 + 2 * y ** 4 - 2) + 1e5)
    return ProblemSpec(
        domain=dom, psi=psi, a_plus=a_p, a_minus=a_m,
        f_plus=ManufacturedSource(a_p, u_p), f_minus=ManufacturedSource(a_m, u_m),
        g_d=constant2d(-1e5), g_n=constant2d(0.0),
        boundary=_mixed_kinds(dom, u_p), exact_plus=u_p, exact_minus=u_m, name="ex1")


def _ex2() -> ProblemSpec:
    dom = DomainRect(-2.0, 2.0, -2.0, 2.0)
    psi = Field2D(lambda x, y: x * x + y * y - 2, "circle")
    a_p = Field2D(lambda x, y: 1e3 * (2 + sin(x + y)))
    a_m = Field2D(lambda x, y: 1e-3 * (2 + sin(x + y)))
    u_p = Field2D(lambda x, y: 1e-3 * cos(4 * (x - y)) * (x * x + y * y - 2))
    u_m = Field2D(lambda x, y: 1e3 * cos(4 * (x - y)) * (x * x + y * y - 2) + 1e3)
    return ProblemSpec(
        domain=dom, psi=psi, a_plus=a_p, a_minus=a_m,
        f_plus=ManufacturedSource(a_p, u_p), f_minus=ManufacturedSource(a_m, u_m),
        g_d=constant2d(-1e3), g_n=constant2d(0.0),
        boundary=_mixed_kinds(dom, u_p), exact_plus=u_p, exact_minus=u_m, name="ex2")


def _ex4() -> ProblemSpec:
    dom = DomainRect(-2.5, 2.5, -2.5, 2.5)
    psi = Field2D(lambda x, y: y * y - 2 * x * x + x ** 4 - 0.25, "peanut")
    a_p = Field2D(lambda x, y: 1e-3 * (2 + sin(x - y)))
    a_m = Field2D(lambda x, y: 1e3 * (2 + sin(x - y)))
    u_p = Field2D(lambda x, y: 1e3 * sin(16 * (x + y)) * (y * y - 2 * x * x + x ** 4 - 0.25))
    u_m = Field2D(lambda x, y: 1e-3 * sin(16 * (x + y)) * (y * y - 2 * x * x + x ** 4 - 0.25) + 1.5e4)
    boundary = {s: _dirichlet(u_p, dom, s) for s in ("g1", "g2", "g3", "g4")}
    return ProblemSpec(
        domain=dom, psi=psi, a_plus=a_p, a_minus=a_m,
        f_plus=ManufacturedSource(a_p, u_p), f_minus=ManufacturedSource(a_m, u_m),
        g_d=constant2d(-1.5e4), g_n=constant2d(0.0),
        boundary=boundary, exact_plus=u_p, exact_minus=u_m, name="ex4")


def _zero_dirichlet():
    return BoundaryOperator(BCKind.DIRICHLET, constant1d(0.0))


def _u1() -> ProblemSpec:
    dom = DomainRect(-2.5, 2.5, -2.5, 2.5)
    psi = Field2D(lambda x, y: x ** 4 + 2 * y ** 4 - 2)
    return ProblemSpec(
        domain=dom, psi=psi,
        a_plus=Field2D(lambda x, y: 2 + cos(x) * cos(y)),
        a_minus=Field2D(lambda x, y: 1e3 * (2 + sin(x) * sin(y))),
        f_plus=Field2D(lambda x, y: sin(4 * PI * x) * sin(4 * PI * y)),
        f_minus=Field2D(lambda x, y: cos(4 * PI * x) * cos(4 * PI * y)),
        g_d=Field2D(lambda x, y: sin(x) * sin(y) - 1),
        g_n=Field2D(lambda x, y: cos(x) * cos(y)),
        boundary={s: _zero_dirichlet() for s in ("g1", "g2", "g3", "g4")},
        name="u1")


def _u2() -> ProblemSpec:
    dom = DomainRect(-PI, PI, -PI, PI)
    psi = Field2D(lambda x, y: x * x + y * y - 2)
    boundary = {s: _zero_dirichlet() for s in ("g2", "g3", "g4")}
    boundary["g1"] = BoundaryOperator(
        BCKind.ROBIN, Field1D(lambda y: cos(y) + 1), Field1D(lambda y: cos(y)))
    return ProblemSpec(
        domain=dom, psi=psi,
        a_plus=Field2D(lambda x, y: 2 + cos(x - y)),
        a_minus=Field2D(lambda x, y: 1e3 * (2 + cos(x - y))),
        f_plus=Field2D(lambda x, y: sin(8 * x) * sin(8 * y)),
        f_minus=Field2D(lambda x, y: cos(8 * x) * cos(8 * y)),
        g_d=Field2D(lambda x, y: sin(x - y) - 2),
        g_n=Field2D(lambda x, y: cos(x + y)),
        boundary=boundary, name="u2")


def _u3() -> ProblemSpec:
    dom = DomainRect(-PI / 2, PI / 2, -PI / 2, PI / 2)
    psi = Field2D(lambda x, y: y * y + 2 * x * x / (x * x + 1) - 1)
    boundary = {s: _zero_dirichlet() for s in ("g2", "g3", "g4")}
    boundary["g1"] = BoundaryOperator(
        BCKind.ROBIN, Field1D(lambda y: sin(y + PI / 2) * (y - PI / 2)),
        Field1D(lambda y: cos(y)))
    return ProblemSpec(
        domain=dom, psi=psi,
        a_plus=Field2D(lambda x, y: 1e3 * (2 + sin(x + y))),
        a_minus=Field2D(lambda x, y: 1e-3 * (2 + cos(x - y))),
        f_plus=Field2D(lambda x, y: sin(6 * x) * sin(6 * y)),
        f_minus=Field2D(lambda x, y: cos(6 * x) * cos(6 * y)),
        g_d=Field2D(lambda x, y: sin(x) * cos(y) - 2),
        g_n=Field2D(lambda x, y: cos(x + y)),
        boundary=boundary, name="u3")


def _u4() -> ProblemSpec:
    dom = DomainRect(-2.5, 2.5, -2.5, 2.5)
    psi = Field2D(lambda x, y: y * y - 2 * x * x + x ** 4 - 0.25)
    return ProblemSpec(
        domain=dom, psi=psi,
        a_plus=Field2D(lambda x, y: 1e3 * (10 + cos(x) * cos(y))),
        a_minus=Field2D(lambda x, y: 1e-3 * (10 + sin(x) * sin(y))),
        f_plus=Field2D(lambda x, y: sin(4 * PI * x) * sin(4 * PI * y)),
        f_minus=Field2D(lambda x, y: cos(4 * PI * x) * cos(4 * PI * y)),
        g_d=Field2D(lambda x, y: sin(x) - 2),
        g_n=Field2D(lambda x, y: cos(y)),
        boundary={s: _zero_dirichlet() for s in ("g1", "g2", "g3", "g4")},
        name="u4")


def _u5() -> ProblemSpec:
    dom = DomainRect(-PI, PI, -PI, PI)
    psi = Field2D(lambda x, y: x * x + y * y - 4)
    boundary = {
        "g1": BoundaryOperator(BCKind.ROBIN, Field1D(lambda y: cos(y)),
                               Field1D(lambda y: sin(y))),
        "g2": _zero_dirichlet(),
        "g3": BoundaryOperator(BCKind.NEUMANN, Field1D(lambda x: sin(x - PI))),
        "g4": BoundaryOperator(BCKind.ROBIN, Field1D(lambda x: cos(x) + 1),
                               Field1D(lambda x: cos(x))),
    }
    return ProblemSpec(
        domain=dom, psi=psi,
        a_plus=Field2D(lambda x, y: 10 * (2 + cos(x - y))),
        a_minus=Field2D(lambda x, y: 1e-6 * (2 + sin(x) * sin(y))),
        f_plus=Field2D(lambda x, y: sin(6 * x) * sin(6 * y)),
        f_minus=Field2D(lambda x, y: cos(6 * x) * cos(6 * y)),
        g_d=Field2D(lambda x, y: sin(y) - 10),
        g_n=Field2D(lambda x, y: cos(x)),
        boundary=boundary, name="u5")


EXAMPLES = {
    "ex3": ExampleDef("ex3", "4-side Dirichlet, smooth oval interface, contrast 1e6, "
                      "constant jumps, known u", _ex3, (4, 6), True),
    "ex5": ExampleDef("ex5", "4-side Dirichlet, sharp-edged square interface, contrast 1e6, "
                      "non-constant jumps, known u", _ex5, (4, 6), True),
    "ex1": ExampleDef("ex1", "Robin/Dirichlet/Neumann/Robin sides, quartic interface, "
                      "contrast 1e6, known u", _ex1, (5, 7), True),
    "ex2": ExampleDef("ex2", "Robin/Dirichlet/Neumann/Robin sides, circle interface, "
                      "contrast 1e6, known u", _ex2, (4, 6), True),
    "ex4": ExampleDef("ex4", "4-side Dirichlet, peanut interface, contrast 1e6, known u",
                      _ex4, (5, 7), True),
    "u1": ExampleDef("u1", "4-side Dirichlet, quartic interface, contrast ~1e3, unknown u",
                     _u1, (4, 6), False),
    "u2": ExampleDef("u2", "1-side Robin + 3-side Dirichlet, circle interface, contrast 1e3, "
                     "unknown u", _u2, (4, 6), False),
    "u3": ExampleDef("u3", "1-side Robin + 3-side Dirichlet, oval interface, contrast ~1e6, "
                     "unknown u", _u3, (5, 7), False),
    "u4": ExampleDef("u4", "4-side Dirichlet, peanut interface, contrast ~1e6, unknown u",
                     _u4, (5, 7), False),
    "u5": ExampleDef("u5", "Robin/Dirichlet/Neumann/Robin sides, circle interface, "
                     "contrast ~1e7, unknown u", _u5, (4, 6), False),
}


def example_keys():
    return list(EXAMPLES)


def build_problem(key: str) -> ProblemSpec:
    if key not in EXAMPLES:
        raise KeyError(f"unknown example {key!r}; choose from {', '.join(EXAMPLES)}")
    return EXAMPLES[key].build()
