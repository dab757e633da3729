"""Truncated Taylor-series (jet) arithmetic in one and two variables.

A jet stores the normalized Taylor coefficients of a scalar field at a
fixed center: the entry for multi-index (m, n) is
``d^{m+n} g / dx^m dy^n (x0, y0) / (m! n!)``, so that

    g(x0 + x, y0 + y)  ~  sum_{m+n <= D} c[m, n] x^m y^n.

All operations are exact truncations of the corresponding operations on
power series.  Jets are immutable value objects; every operation returns
a new jet truncated to the smaller degree of its operands.

Bivariate jets may carry a leading batch axis (coefficients of shape
(..., D+1, D+1)); all arithmetic then applies elementwise over the batch,
which is how whole grids of expansions are produced in one sweep.
Composition (curve and affine substitution) is scalar-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Jet1",
    "Jet2",
    "JetError",
    "jet_sin",
    "jet_cos",
    "jet_exp",
    "jet_sqrt",
    "numeric_jet2",
]

_DIV_FLOOR = 1e-300  # constant terms below this magnitude are treated as singular


class JetError(ValueError):
    """Raised for contract violations in jet arithmetic (singular division, ...)."""


def _tri_mask(degree: int) -> np.ndarray:
    m, n = np.indices((degree + 1, degree + 1))
    return m + n <= degree


def _as_jet2(other, like: "Jet2") -> "Jet2 | None":
    if isinstance(other, Jet2):
        return other
    if isinstance(other, (int, float, np.floating, np.integer)) or isinstance(other, np.ndarray):
        return Jet2.constant(other, like.degree, like.center)
    return None


@dataclass(frozen=True)
class Jet2:
    """Bivariate jet: normalized Taylor coefficients on the triangle m+n <= degree.

    ``coeffs`` has shape (..., degree+1, degree+1); entries with
    m+n > degree are kept identically zero.
    """

    coeffs: np.ndarray
    degree: int
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim < 2 or c.shape[-2:] != (self.degree + 1, self.degree + 1):
            raise JetError(f"coefficient shape {c.shape} does not match degree {self.degree}")
        c = np.where(_tri_mask(self.degree), c, 0.0)
        if not np.all(np.isfinite(c)):
            raise JetError("non-finite jet coefficients")
        object.__setattr__(self, "coeffs", c)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value, degree: int, center=(0.0, 0.0)) -> "Jet2":
        v = np.asarray(value, dtype=float)
        c = np.zeros(v.shape + (degree + 1, degree + 1))
        c[..., 0, 0] = v
        return Jet2(c, degree, center)

    @staticmethod
    def variable_x(x0, y0, degree: int) -> "Jet2":
        """Jet of the coordinate function x at (x0, y0); x0, y0 may be arrays."""
        shape = np.broadcast(np.asarray(x0), np.asarray(y0)).shape
        c = np.zeros(shape + (degree + 1, degree + 1))
        c[..., 0, 0] = x0
        if degree >= 1:
            c[..., 1, 0] = 1.0
        return Jet2(c, degree, (x0, y0))

    @staticmethod
    def variable_y(x0, y0, degree: int) -> "Jet2":
        shape = np.broadcast(np.asarray(x0), np.asarray(y0)).shape
        c = np.zeros(shape + (degree + 1, degree + 1))
        c[..., 0, 0] = y0
        if degree >= 1:
            c[..., 0, 1] = 1.0
        return Jet2(c, degree, (x0, y0))

    # -- accessors ---------------------------------------------------------

    @property
    def is_scalar(self) -> bool:
        return self.coeffs.ndim == 2

    def coeff(self, m: int, n: int):
        """Normalized coefficient of x^m y^n (the derivative over m! n!)."""
        if m + n > self.degree:
            raise JetError(f"index ({m},{n}) beyond degree {self.degree}")
        out = self.coeffs[..., m, n]
        return float(out) if self.is_scalar else out

    def derivative(self, m: int, n: int):
        """Un-normalized partial derivative of order (m, n) at the center."""
        return self.coeff(m, n) * math.factorial(m) * math.factorial(n)

    @property
    def value(self):
        out = self.coeffs[..., 0, 0]
        return float(out) if self.is_scalar else out

    def truncate(self, degree: int) -> "Jet2":
        if degree > self.degree:
            raise JetError(f"cannot extend jet of degree {self.degree} to {degree}")
        return Jet2(self.coeffs[..., : degree + 1, : degree + 1].copy(), degree, self.center)

    # -- ring operations ---------------------------------------------------

    def _binary(self, other, op):
        o = _as_jet2(other, self)
        if o is None:
            return NotImplemented
        d = min(self.degree, o.degree)
        a = self.coeffs[..., : d + 1, : d + 1]
        b = o.coeffs[..., : d + 1, : d + 1]
        return Jet2(op(a, b), d, self.center)

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Jet2(-self.coeffs, self.degree, self.center)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet2(self.coeffs * float(other), self.degree, self.center)
        if isinstance(other, np.ndarray) and not isinstance(other, Jet2):
            return Jet2(self.coeffs * other[..., None, None], self.degree, self.center)
        if not isinstance(other, Jet2):
            return NotImplemented
        d = min(self.degree, other.degree)
        a = self.coeffs
        b = other.coeffs[..., : d + 1, : d + 1]
        shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
        out = np.zeros(shape + (d + 1, d + 1))
        for m in range(d + 1):
            for n in range(d + 1 - m):
                amn = a[..., m, n]
                if not np.any(amn):
                    continue
                out[..., m:, n:][..., : d + 1 - m, : d + 1 - m - n] += (
                    amn[..., None, None] * b[..., : d + 1 - m, : d + 1 - m - n]
                )
        return Jet2(out, d, self.center)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        if isinstance(other, np.ndarray) and not isinstance(other, Jet2):
            return self * (1.0 / other)
        if not isinstance(other, Jet2):
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def powi(self, k: int) -> "Jet2":
        """Integer power by repeated truncated multiplication."""
        if k < 0:
            return self.reciprocal().powi(-k)
        out = Jet2.constant(np.ones(self.coeffs.shape[:-2]), self.degree, self.center) \
            if not self.is_scalar else Jet2.constant(1.0, self.degree, self.center)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            return self.powi(int(k))
        return NotImplemented

    # -- analytic functions via series composition --------------------------

    def _compose_series(self, series) -> "Jet2":
        """Evaluate sum_k series[k] * (self - value)^k by Horner."""
        tilde = self - self.value
        out = _as_jet2(series[-1], self)
        for k in range(len(series) - 2, -1, -1):
            out = out * tilde + series[k]
        return out

    def reciprocal(self) -> "Jet2":
        c0 = self.value
        if np.min(np.abs(c0)) < _DIV_FLOOR:
            raise JetError("division by jet with (near-)zero constant term")
        series = [(-1.0) ** k / c0 ** (k + 1) for k in range(self.degree + 1)]
        return self._compose_series(series)

    def sqrt(self) -> "Jet2":
        c0 = self.value
        if np.min(c0) <= 0.0:
            raise JetError("jet sqrt requires a positive constant term")
        series = [np.sqrt(c0)]
        for k in range(1, self.degree + 1):
            series.append(series[-1] * (1.5 / k - 1.0) / c0)
        return self._compose_series(series)

    def exp(self) -> "Jet2":
        e0 = np.exp(self.value)
        series = [e0 / math.factorial(k) for k in range(self.degree + 1)]
        return self._compose_series(series)

    def sin(self) -> "Jet2":
        s0, c0 = np.sin(self.value), np.cos(self.value)
        cycle = [s0, c0, -s0, -c0]
        series = [cycle[k % 4] / math.factorial(k) for k in range(self.degree + 1)]
        return self._compose_series(series)

    def cos(self) -> "Jet2":
        s0, c0 = np.sin(self.value), np.cos(self.value)
        cycle = [c0, -s0, -c0, s0]
        series = [cycle[k % 4] / math.factorial(k) for k in range(self.degree + 1)]
        return self._compose_series(series)

    def log(self) -> "Jet2":
        c0 = self.value
        if np.min(c0) <= 0.0:
            raise JetError("jet log requires a positive constant term")
        series = [np.log(c0)]
        for k in range(1, self.degree + 1):
            series.append((-1.0) ** (k + 1) / (k * c0 ** k))
        return self._compose_series(series)

    # -- calculus ------------------------------------------------------------

    def dx(self) -> "Jet2":
        """Jet of the x-derivative (degree drops by one)."""
        d = self.degree - 1
        if d < 0:
            raise JetError("cannot differentiate a degree-0 jet")
        mult = np.arange(1, d + 2)[:, None]
        return Jet2(self.coeffs[..., 1:, : d + 1] * mult, d, self.center)

    def dy(self) -> "Jet2":
        d = self.degree - 1
        if d < 0:
            raise JetError("cannot differentiate a degree-0 jet")
        mult = np.arange(1, d + 2)[None, :]
        return Jet2(self.coeffs[..., : d + 1, 1:] * mult, d, self.center)

    # -- composition -----------------------------------------------------------

    def compose(self, u: "Jet1", v: "Jet1") -> "Jet1":
        """Jet of t -> P(u(t), v(t)) for the Taylor polynomial P of this jet.

        u and v are displacement jets in the local coordinates of this
        jet's center (curve charts pass jets with zero constant term).
        Scalar jets only.
        """
        if not self.is_scalar:
            raise JetError("compose is defined for scalar jets only")
        d = min(self.degree, u.degree, v.degree)
        ut, vt = u.truncate(d), v.truncate(d)
        upow = [Jet1.constant(1.0, d, ut.center)]
        vpow = [Jet1.constant(1.0, d, vt.center)]
        for _ in range(d):
            upow.append(upow[-1] * ut)
            vpow.append(vpow[-1] * vt)
        out = Jet1.constant(0.0, d, ut.center)
        for m in range(d + 1):
            for n in range(d + 1 - m):
                c = self.coeffs[m, n]
                if c != 0.0:
                    out = out + (upow[m] * vpow[n]) * c
        return out

    def compose2(self, u: "Jet2", v: "Jet2") -> "Jet2":
        """Bivariate substitution P(u(x,y), v(x,y)) for displacement jets u, v.

        Exact for affine u, v (recentring / rotating the expansion).
        """
        if not self.is_scalar:
            raise JetError("compose2 is defined for scalar jets only")
        d = min(self.degree, u.degree, v.degree)
        ut, vt = u.truncate(d), v.truncate(d)
        upow = [Jet2.constant(1.0, d, ut.center)]
        vpow = [Jet2.constant(1.0, d, vt.center)]
        for _ in range(d):
            upow.append(upow[-1] * ut)
            vpow.append(vpow[-1] * vt)
        out = Jet2.constant(0.0, d, ut.center)
        for m in range(d + 1):
            for n in range(d + 1 - m):
                c = self.coeffs[m, n]
                if c != 0.0:
                    out = out + (upow[m] * vpow[n]) * c
        return out

    def transpose(self) -> "Jet2":
        """Swap the roles of x and y."""
        c = np.swapaxes(self.coeffs, -1, -2).copy()
        ctr = (self.center[1], self.center[0]) if len(self.center) == 2 else self.center
        return Jet2(c, self.degree, ctr)

    def __call__(self, x: float, y: float):
        """Evaluate the Taylor polynomial at local coordinates (x, y)."""
        xm = x ** np.arange(self.degree + 1)
        yn = y ** np.arange(self.degree + 1)
        out = np.einsum("m,...mn,n->...", xm, self.coeffs, yn)
        return float(out) if self.is_scalar else out


def _as_jet1(other, like: "Jet1") -> "Jet1 | None":
    if isinstance(other, Jet1):
        return other
    if isinstance(other, (int, float, np.floating, np.integer)):
        return Jet1.constant(float(other), like.degree, like.center)
    return None


@dataclass(frozen=True)
class Jet1:
    """Univariate jet: normalized Taylor coefficients c[k] = g^(k)(t0)/k!."""

    coeffs: np.ndarray
    degree: int
    center: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.degree + 1,):
            raise JetError(f"coefficient shape {c.shape} does not match degree {self.degree}")
        if not np.all(np.isfinite(c)):
            raise JetError("non-finite jet coefficients")
        object.__setattr__(self, "coeffs", c)

    @staticmethod
    def constant(value: float, degree: int, center: float = 0.0) -> "Jet1":
        c = np.zeros(degree + 1)
        c[0] = value
        return Jet1(c, degree, center)

    @staticmethod
    def variable(t0: float, degree: int) -> "Jet1":
        c = np.zeros(degree + 1)
        c[0] = t0
        if degree >= 1:
            c[1] = 1.0
        return Jet1(c, degree, t0)

    def coeff(self, k: int) -> float:
        if k > self.degree:
            raise JetError(f"index {k} beyond degree {self.degree}")
        return float(self.coeffs[k])

    def derivative(self, k: int) -> float:
        return self.coeff(k) * math.factorial(k)

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def truncate(self, degree: int) -> "Jet1":
        if degree > self.degree:
            raise JetError(f"cannot extend jet of degree {self.degree} to {degree}")
        return Jet1(self.coeffs[: degree + 1].copy(), degree, self.center)

    def _binary(self, other, op):
        o = _as_jet1(other, self)
        if o is None:
            return NotImplemented
        d = min(self.degree, o.degree)
        return Jet1(op(self.coeffs[: d + 1], o.coeffs[: d + 1]), d, self.center)

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Jet1(-self.coeffs, self.degree, self.center)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet1(self.coeffs * float(other), self.degree, self.center)
        if not isinstance(other, Jet1):
            return NotImplemented
        d = min(self.degree, other.degree)
        out = np.zeros(d + 1)
        for k in range(d + 1):
            if self.coeffs[k] != 0.0:
                out[k:] += self.coeffs[k] * other.coeffs[: d + 1 - k]
        return Jet1(out, d, self.center)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        if not isinstance(other, Jet1):
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def powi(self, k: int) -> "Jet1":
        if k < 0:
            return self.reciprocal().powi(-k)
        out = Jet1.constant(1.0, self.degree, self.center)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            return self.powi(int(k))
        return NotImplemented

    def _compose_series(self, series: np.ndarray) -> "Jet1":
        tilde = self - self.value
        out = Jet1.constant(float(series[-1]), self.degree, self.center)
        for k in range(len(series) - 2, -1, -1):
            out = out * tilde + float(series[k])
        return out

    def reciprocal(self) -> "Jet1":
        c0 = self.value
        if abs(c0) < _DIV_FLOOR:
            raise JetError("division by jet with (near-)zero constant term")
        series = np.array([(-1.0) ** k / c0 ** (k + 1) for k in range(self.degree + 1)])
        return self._compose_series(series)

    def sqrt(self) -> "Jet1":
        c0 = self.value
        if c0 <= 0.0:
            raise JetError("jet sqrt requires a positive constant term")
        series = np.empty(self.degree + 1)
        series[0] = math.sqrt(c0)
        for k in range(1, self.degree + 1):
            series[k] = series[k - 1] * (1.5 / k - 1.0) / c0
        return self._compose_series(series)

    def exp(self) -> "Jet1":
        e0 = math.exp(self.value)
        series = np.array([e0 / math.factorial(k) for k in range(self.degree + 1)])
        return self._compose_series(series)

    def sin(self) -> "Jet1":
        s0, c0 = math.sin(self.value), math.cos(self.value)
        cycle = [s0, c0, -s0, -c0]
        series = np.array([cycle[k % 4] / math.factorial(k) for k in range(self.degree + 1)])
        return self._compose_series(series)

    def cos(self) -> "Jet1":
        s0, c0 = math.sin(self.value), math.cos(self.value)
        cycle = [c0, -s0, -c0, s0]
        series = np.array([cycle[k % 4] / math.factorial(k) for k in range(self.degree + 1)])
        return self._compose_series(series)

    def log(self) -> "Jet1":
        c0 = self.value
        if c0 <= 0.0:
            raise JetError("jet log requires a positive constant term")
        series = np.empty(self.degree + 1)
        series[0] = math.log(c0)
        for k in range(1, self.degree + 1):
            series[k] = (-1.0) ** (k + 1) / (k * c0 ** k)
        return self._compose_series(series)

    def deriv(self) -> "Jet1":
        d = self.degree - 1
        if d < 0:
            raise JetError("cannot differentiate a degree-0 jet")
        return Jet1(self.coeffs[1:] * np.arange(1, d + 2), d, self.center)

    def shift(self, a: float, b: float) -> "Jet1":
        """Jet of t -> g(a*t + b) around the same expansion point (exact affine)."""
        if self.degree == 0:
            return Jet1.constant(self.value, 0, self.center)
        lin_c = np.zeros(self.degree + 1)
        lin_c[0] = b
        lin_c[1] = a
        lin = Jet1(lin_c, self.degree, self.center)
        out = Jet1.constant(float(self.coeffs[-1]), self.degree, self.center)
        for k in range(self.degree - 1, -1, -1):
            out = out * lin + float(self.coeffs[k])
        return out

    def __call__(self, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.coeffs))


# -- generic math helpers that accept jets or numbers/arrays -----------------


def jet_sin(v):
    return v.sin() if isinstance(v, (Jet1, Jet2)) else np.sin(v)


def jet_cos(v):
    return v.cos() if isinstance(v, (Jet1, Jet2)) else np.cos(v)


def jet_exp(v):
    return v.exp() if isinstance(v, (Jet1, Jet2)) else np.exp(v)


def jet_sqrt(v):
    return v.sqrt() if isinstance(v, (Jet1, Jet2)) else np.sqrt(v)


# -- numeric fallback for black-box fields ------------------------------------


def _fd_weights(deriv_order: int, offsets: np.ndarray) -> np.ndarray:
    """Finite-difference weights for d^k/dt^k at 0 on the given offsets."""
    n = len(offsets)
    A = np.vander(offsets, n, increasing=True).T
    b = np.zeros(n)
    b[deriv_order] = math.factorial(deriv_order)
    return np.linalg.solve(A, b)


def numeric_jet2(fn, x0: float, y0: float, degree: int, step: float = 1e-3) -> Jet2:
    """Approximate jet of a black-box field by tensor central differences.

    Low-accuracy fallback for fields without analytic jets; expect roughly
    sqrt(eps)-level relative error on the higher coefficients.
    """
    npts = degree + 1 + (degree % 2 == 0)  # odd, symmetric point count
    half = npts // 2
    offs = np.arange(-half, half + 1) * step
    vals = np.array([[fn(x0 + dx, y0 + dy) for dy in offs] for dx in offs])
    c = np.zeros((degree + 1, degree + 1))
    for m in range(degree + 1):
        wx = _fd_weights(m, offs)
        for n in range(degree + 1 - m):
            wy = _fd_weights(n, offs)
            c[m, n] = wx @ vals @ wy / (math.factorial(m) * math.factorial(n))
    return Jet2(c, degree, (x0, y0))
