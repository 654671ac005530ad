"""Local solvability certificates for degenerate second-order operators.

The operators handled here have the form

    P = sum_j X_j^* f_j X_j + i X_0 + X_{N+1} + a_0

with real first-order vector fields X_j, real weights f_j and a complex
zeroth-order term a_0.  The package checks the sign/commutation/bracket
conditions that make P L^2 to L^2 locally solvable, builds the auxiliary
second-order symbol used in the a priori estimate, and cross-checks the
estimate on finite-difference grids.
"""

__version__ = "0.1.0"

from .expr import (
    UnboundOpaqueSymbol,
    ZeroStatus,
    ZeroTestResult,
    canonicalize,
    differentiate,
    evaluate,
    opaque,
    variables,
    zero_test,
)
from .symbols import (
    DegreeOverflow,
    FirstOrderOp,
    PolySymbol,
    UnsupportedCoefficient,
    commutator,
    formal_adjoint,
    poisson_bracket,
    quantize_apply,
    subprincipal,
    symbol_of,
    weyl_product,
)
from .operator import OperatorSpec, Region
from .forms import DegreeViolation, FormMatrix, NotPSD, assemble, dominate, min_eig_sweep
from .grid import Grid
from .conditions import (
    Certificate,
    GardingResult,
    NoAdmissibleDelta1,
    Settings,
    Status,
    Verdict,
    build_pprime,
    certify,
    check_h1,
    check_h2,
    check_h3,
    fp_lower_bound,
    garding_boundary,
    garding_classify,
)
from .estimator import (
    ConvergenceFailure,
    DegenerateField,
    DiscreteOperator,
    GridTooCoarse,
    discretize,
    poincare_constant,
    quadform_bound,
    sigma_min,
)
from .specfile import ParseError, ValidationError, parse_spec, render_spec
from .report import Report, emit_report, load_report, run_check

import types as _types

__all__ = [n for n, v in list(globals().items()) if not n.startswith("_") and not isinstance(v, _types.ModuleType)]
