"""Closed-form stencil oracles: generated coefficients versus the published
constant-coefficient tables for every boundary configuration.

These checks anchor the whole generation pipeline: for constant diffusion
and constant Robin coefficients the side and corner stencils admit exact
closed forms, and the generators must reproduce them to 1e-10.
"""

from __future__ import annotations

import numpy as np

from .basis import build_reduction
from .jets import Jet1, Jet2
from .stencil_boundary import build_corner_stencil, build_side_stencil
from .stencil_regular import build_regular_stencil

__all__ = ["closed_form_side_g1", "closed_form_side_g3", "closed_form_side_g4",
           "closed_form_corner_rn", "closed_form_corner_rr",
           "closed_form_corner_rr_equal", "run_all_checks"]

_POW = np.arange(7)


def _poly(*coeffs) -> np.ndarray:
    out = np.zeros(7)
    out[: len(coeffs)] = coeffs
    return out


def robin_side_table(al: float) -> dict:
    """Published 6-point coefficients for a Robin left side, constant data."""
    return {
        (0, 1): _poly(2, al / 5, al ** 2 / 75),
        (0, -1): _poly(2, al / 5, al ** 2 / 75),
        (0, 0): _poly(-10, -34 * al / 5, -8 * al ** 2 / 25, 16 * al ** 3 / 225,
                      -16 * al ** 4 / 675, 8 * al ** 5 / 675),
        (1, 1): _poly(1),
        (1, -1): _poly(1),
        (1, 0): _poly(4, 2 * al / 5, -8 * al ** 2 / 75, 8 * al ** 3 / 225,
                      -8 * al ** 4 / 675),
    }


def neumann_bottom_table() -> dict:
    """Published 6-point coefficients for a Neumann bottom side."""
    return {(1, 0): _poly(2), (1, 1): _poly(1), (0, 0): _poly(-10), (0, 1): _poly(4),
            (-1, 0): _poly(2), (-1, 1): _poly(1)}


def robin_top_table(be: float) -> dict:
    """Published 6-point coefficients for a Robin top side."""
    return {
        (1, -1): _poly(1),
        (-1, -1): _poly(1),
        (0, -1): _poly(4, 2 * be / 5, -8 * be ** 2 / 75, 8 * be ** 3 / 225,
                       -8 * be ** 4 / 675),
        (1, 0): _poly(2, be / 5, be ** 2 / 75),
        (-1, 0): _poly(2, be / 5, be ** 2 / 75),
        (0, 0): _poly(-10, -34 * be / 5, -8 * be ** 2 / 25, 16 * be ** 3 / 225,
                      -16 * be ** 4 / 675, 8 * be ** 5 / 675),
    }


def corner_rn_table(al: float) -> dict:
    """Published 4-point coefficients: Robin left x Neumann bottom corner."""
    return {
        (0, 0): _poly(-5, -17 * al / 5, -4 * al ** 2 / 25, 8 * al ** 3 / 225,
                      -8 * al ** 4 / 675, 4 * al ** 5 / 675),
        (0, 1): _poly(2, al / 5, al ** 2 / 75),
        (1, 0): _poly(2, al / 5, -4 * al ** 2 / 75, 4 * al ** 3 / 225, -4 * al ** 4 / 675),
        (1, 1): _poly(1),
    }


def corner_rr_table(al: float, be: float) -> dict:
    """Published 4-point coefficients: Robin left x Robin top corner."""
    a, b = al, be
    return {
        (0, -1): _poly(2, (135 * b + 135 * a) / 675,
                       (9 * a ** 2 + 63 * a * b - 36 * b ** 2) / 675, 0,
                       (4 * a ** 4 - 6 * a ** 3 * b + 6 * a ** 2 * b ** 2 - 4 * a * b ** 3) / 675,
                       (4 * a ** 5 - 6 * a ** 4 * b + 6 * a ** 3 * b ** 2 - 4 * a ** 2 * b ** 3) / 675),
        (0, 0): _poly(-5, (-765 * a - 765 * b) / 225,
                      (-36 * a ** 2 - 357 * a * b - 36 * b ** 2) / 225,
                      (8 * a ** 3 - 18 * a ** 2 * b - 30 * a * b ** 2 + 16 * b ** 3) / 225,
                      (-4 * a ** 4 + 6 * a ** 3 * b - 6 * a ** 2 * b ** 2 + 4 * a * b ** 3) / 225),
        (1, -1): _poly(1, 0, 0, 0,
                       (-4 * a ** 4 + 6 * a ** 3 * b - 6 * a ** 2 * b ** 2 + 4 * a * b ** 3) / 675),
        (1, 0): _poly(2, (45 * b + 45 * a) / 225,
                      (-12 * a ** 2 + 21 * a * b + 3 * b ** 2) / 225,
                      (4 * a ** 3 - 6 * a ** 2 * b + 6 * a * b ** 2 - 4 * b ** 3) / 225),
    }


def _compare(template, table, rtol=1e-10):
    worst = 0.0
    for o, want in table.items():
        got = template.coeff_polys[template.offsets.index(o)]
        scale = max(1.0, np.abs(want).max())
        worst = max(worst, np.abs(got - want).max() / scale)
    return worst


def _const_jets(a_val: float, c_val: float | None):
    red = build_reduction(Jet2.constant(a_val, 5), 5, "V")
    cjet = None if c_val is None else Jet1.constant(c_val, 5)
    return red, cjet


def closed_form_side_g1(a_val=7.0, al=2.0, h=0.1):
    red, ajet = _const_jets(a_val, al)
    st = build_side_stencil("g1", red, ajet, h)
    return _compare(st, robin_side_table(al))


def closed_form_side_g3(a_val=3.0, h=0.1):
    red = build_reduction(Jet2.constant(a_val, 5), 5, "H")
    st = build_side_stencil("g3", red, None, h)
    return _compare(st, neumann_bottom_table())


def closed_form_side_g4(a_val=0.4, be=0.7, h=0.1):
    red = build_reduction(Jet2.constant(a_val, 5), 5, "H")
    st = build_side_stencil("g4", red, Jet1.constant(be, 5), h)
    return _compare(st, robin_top_table(be))


def closed_form_corner_rn(a_val=2.5, al=2.0, h=0.1):
    red, ajet = _const_jets(a_val, al)
    st = build_corner_stencil("g1", "g3", red, ajet, None, h)
    return _compare(st, corner_rn_table(al))


def closed_form_corner_rr(a_val=1.0, al=2.0, be=0.7, h=0.1):
    red, ajet = _const_jets(a_val, al)
    st = build_corner_stencil("g1", "g4", red, ajet, Jet1.constant(be, 5), h)
    return _compare(st, corner_rr_table(al, be))


def closed_form_corner_rr_equal(a_val=1.0, be=0.9, h=0.1):
    """Equal Robin coefficients degenerate to a short closed form."""
    red, ajet = _const_jets(a_val, be)
    st = build_corner_stencil("g1", "g4", red, ajet, Jet1.constant(be, 5), h)
    want = {
        (0, -1): _poly(2, 2 * be / 5, 4 * be ** 2 / 75),
        (1, 0): _poly(2, 2 * be / 5, 4 * be ** 2 / 75),
        (1, -1): _poly(1),
    }
    return _compare(st, want)


def regular_constant_table(a_val=5.0, h=0.05):
    """The constant-coefficient interior stencil: corner 1, edge 4, center -20."""
    red = build_reduction(Jet2.constant(a_val, 6), 6, "V")
    st = build_regular_stencil(red, h)
    want = {(k, l): np.zeros(8) for k in (-1, 0, 1) for l in (-1, 0, 1)}
    for (k, l) in want:
        want[(k, l)][0] = {2: 1.0, 1: 4.0, 0: -20.0}[abs(k) + abs(l)]
    worst = 0.0
    for o, w in want.items():
        got = st.coeff_polys[st.offsets.index(o)]
        worst = max(worst, np.abs(got - w).max() / 20.0)
    return worst


CHECKS = [
    ("side g1 Robin closed form", closed_form_side_g1),
    ("side g3 Neumann closed form", closed_form_side_g3),
    ("side g4 Robin closed form", closed_form_side_g4),
    ("corner Robin x Neumann closed form", closed_form_corner_rn),
    ("corner Robin x Robin closed form", closed_form_corner_rr),
    ("corner Robin x Robin, equal coefficients", closed_form_corner_rr_equal),
    ("interior constant-coefficient stencil", regular_constant_table),
]


def run_all_checks(tol: float = 1e-10):
    """Run every closed-form oracle; returns a list of (name, error, ok)."""
    results = []
    for name, fn in CHECKS:
        err = fn()
        results.append((name, err, err <= tol))
    return results
