"""Scalar fields with analytic jets.

Fields are plain callables written against a closed operation set
(+, -, *, /, integer powers, sin, cos, exp, sqrt).  Evaluating them on
floats or numpy arrays gives values; evaluating them on jet seeds gives
exact truncated Taylor expansions.  Every coefficient, source, solution,
level-set and boundary function used by the solver is expressed this way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet1, Jet2, numeric_jet2

__all__ = [
    "Field1D",
    "Field2D",
    "ManufacturedSource",
    "constant1d",
    "constant2d",
    "manufactured_f",
]


class Field2D:
    """Scalar field of two variables backed by a jet-capable expression.

    ``fn`` must accept either floats/arrays or a pair of :class:`Jet2`
    seeds and use only jet-closed operations.
    """

    def __init__(self, fn, name: str = ""):
        self._fn = fn
        self.name = name

    def __call__(self, x, y):
        out = self._fn(x, y)
        if np.isscalar(out) and not (np.isscalar(x) and np.isscalar(y)):
            out = np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y).shape).copy()
        return out

    def jet(self, x0: float, y0: float, degree: int) -> Jet2:
        out = self._fn(Jet2.variable_x(x0, y0, degree), Jet2.variable_y(x0, y0, degree))
        if not isinstance(out, Jet2):
            out = Jet2.constant(float(out), degree, (x0, y0))
        return out

    def __repr__(self):
        return f"Field2D({self.name or self._fn!r})"


class Field1D:
    """Scalar field of one variable with jets, for boundary data."""

    def __init__(self, fn, name: str = ""):
        self._fn = fn
        self.name = name

    def __call__(self, t):
        out = self._fn(t)
        if np.isscalar(out) and not np.isscalar(t):
            out = np.broadcast_to(np.asarray(out, dtype=float), np.shape(t)).copy()
        return out

    def jet(self, t0: float, degree: int) -> Jet1:
        out = self._fn(Jet1.variable(t0, degree))
        if not isinstance(out, Jet1):
            out = Jet1.constant(float(out), degree, t0)
        return out

    def __repr__(self):
        return f"Field1D({self.name or self._fn!r})"


def constant2d(value: float, name: str = "") -> Field2D:
    return _Const2D(value, name)


class _Const2D(Field2D):
    def __init__(self, value: float, name: str = ""):
        self.value = float(value)
        super().__init__(lambda x, y: self.value, name or f"const({value})")

    def __call__(self, x, y):
        if np.isscalar(x) and np.isscalar(y):
            return self.value
        return np.full(np.broadcast(x, y).shape, self.value)

    def jet(self, x0, y0, degree):
        shape = np.broadcast(np.asarray(x0), np.asarray(y0)).shape
        value = np.full(shape, self.value) if shape else self.value
        return Jet2.constant(value, degree, (x0, y0))


class _Const1D(Field1D):
    def __init__(self, value: float, name: str = ""):
        self.value = float(value)
        super().__init__(lambda t: self.value, name or f"const({value})")

    def __call__(self, t):
        if np.isscalar(t):
            return self.value
        return np.full(np.shape(t), self.value)

    def jet(self, t0, degree):
        return Jet1.constant(self.value, degree, t0)


def constant1d(value: float, name: str = "") -> Field1D:
    return _Const1D(value, name)


class BlackBoxField2D(Field2D):
    """Field without analytic jets; derivatives from central differences.

    Lower accuracy than expression-backed fields; not used by the built-in
    problem registry.
    """

    def __init__(self, fn, step: float = 1e-3, name: str = ""):
        super().__init__(fn, name)
        self.step = step

    def jet(self, x0, y0, degree):
        return numeric_jet2(self._fn, x0, y0, degree, max(self.step, 1e-3))


def manufactured_f(a_jet: Jet2, u_jet: Jet2, degree: int) -> Jet2:
    """Jet of -div(a grad u) to the given degree.

    Requires a_jet.degree >= degree + 1 and u_jet.degree >= degree + 2 so
    the truncation is exact.
    """
    if a_jet.degree < degree + 1 or u_jet.degree < degree + 2:
        raise ValueError(
            f"need a-jet degree >= {degree + 1} and u-jet degree >= {degree + 2}, "
            f"got {a_jet.degree} and {u_jet.degree}")
    ux, uy = u_jet.dx(), u_jet.dy()
    out = -(a_jet.dx() * ux + a_jet.dy() * uy + a_jet * (ux.dx() + uy.dy()))
    return out.truncate(degree)


class ManufacturedSource:
    """Source field derived from an exact solution: f = -div(a grad u)."""

    def __init__(self, a_field: Field2D, u_field: Field2D):
        self.a_field = a_field
        self.u_field = u_field

    def jet(self, x0: float, y0: float, degree: int) -> Jet2:
        a = self.a_field.jet(x0, y0, degree + 1)
        u = self.u_field.jet(x0, y0, degree + 2)
        return manufactured_f(a, u, degree)

    def __call__(self, x, y):
        # pointwise evaluation through a local jet; fine for plotting/tests
        if np.isscalar(x) and np.isscalar(y):
            return self.jet(float(x), float(y), 0).value
        xs = np.broadcast_to(x, np.broadcast(x, y).shape)
        ys = np.broadcast_to(y, np.broadcast(x, y).shape)
        return np.array([self.jet(float(a), float(b), 0).value
                         for a, b in zip(xs.ravel(), ys.ravel())]).reshape(xs.shape)
