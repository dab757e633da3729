"""hifd: hybrid high-order finite differences for elliptic interface problems.

Solves -div(a grad u) = f on a rectangle with a discontinuous, possibly
high-contrast coefficient across an immersed interface, prescribed jumps
[u] and [a grad u . n], and Dirichlet/Neumann/Robin boundary conditions.
Interior regular points use a sixth-order compact 9-point scheme, side
and corner points sixth-order 6-/4-point schemes, and irregular points
near the interface a fifth-order 13-point scheme (or a third-order
9-point one in the comparison mode).
"""

from .assembly import LinearSystem, SolveReport, assemble, dump_system, solve
from .basis import BasisReduction, build_reduction, lam, lam_thin
from .convergence import ConvergenceReport, emit_outputs, run_convergence, solve_example
from .fields import Field1D, Field2D, ManufacturedSource, constant1d, constant2d, manufactured_f
from .interface_geometry import (CurveChart, TransmissionTable, build_chart,
                                 build_transmission, find_base_point)
from .jets import Jet1, Jet2, JetError, numeric_jet2
from .norms import exact_on_grid, grid_l2, grid_linf, relative_l2, successive_norms
from .problem import (BCKind, BoundaryOperator, Classification, ConvexPolygonLevelSet,
                      DomainRect, GridSpec, PointCategory, ProblemSpec,
                      classify_points, jump_jets, percent_irregular)
from .registry import EXAMPLES, build_problem, example_keys
from .stencil_boundary import build_corner_stencil, build_side_stencil, dirichlet_row
from .stencil_core import StencilError, StencilTemplate
from .stencil_irregular import (OFFSETS9, OFFSETS13, assemble_interface_system,
                                build_irregular_rhs, build_irregular_stencil,
                                build_lone_corner_stencil, lone_corner_special_case,
                                solve_nullspace)
from .stencil_regular import build_regular_stencil

__version__ = "0.1.0"
