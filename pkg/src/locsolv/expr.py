"""Coefficient expressions: the smooth functions f_j, a_k(x), a_0.

Expressions are plain sympy trees built from rationals, real variables,
``+ - * /``, integer powers, ``sin``/``cos``/``exp`` and *opaque* smooth
functions.  An opaque function is an undefined real sympy function applied
to exactly its declared dependency variables, so differentiating it with
respect to any other variable gives zero for free.

The functions here are the only entry points the rest of the package uses
to differentiate, canonicalize, evaluate and zero-test coefficients.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

Expr = sp.Expr

#: Elementary functions accepted in coefficients.
ELEMENTARY = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp}


class UnboundOpaqueSymbol(LookupError):
    """An opaque function has no numeric instantiation."""

    def __init__(self, name: str):
        super().__init__(f"opaque symbol {name!r} has no binding")
        self.name = name


def variables(names: str | Sequence[str]) -> tuple[sp.Symbol, ...]:
    """Real variables with the given names (``"x1 x2 t"`` or a list)."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return tuple(sp.Symbol(n, real=True) for n in names)


def opaque(name: str, deps: Sequence[sp.Symbol]) -> Expr:
    """An arbitrary real smooth function of ``deps`` only."""
    return sp.Function(name, real=True)(*deps)


def canonicalize(e) -> Expr:
    """Expanded normal form; unique on the polynomial fragment."""
    return sp.expand(sp.sympify(e))


def differentiate(e, var: sp.Symbol) -> Expr:
    return canonicalize(sp.diff(sp.sympify(e), var))


def split(e) -> tuple[Expr, Expr]:
    """Real and imaginary parts, assuming every atom is real-valued."""
    c = canonicalize(e)
    return c.coeff(sp.I, 0), c.coeff(sp.I, 1)


def conjugate(e) -> Expr:
    re, im = split(e)
    return canonicalize(re - sp.I * im)


def is_real(e) -> bool:
    return split(e)[1] == 0


def opaque_names(e) -> set[str]:
    return {a.func.__name__ for a in sp.sympify(e).atoms(AppliedUndef)}


def instantiate(e, bindings: Mapping[str, Expr] | None) -> Expr:
    """Replace every opaque function by its binding and resolve derivatives."""
    e = sp.sympify(e)
    apps = e.atoms(AppliedUndef)
    if not apps:
        return e
    bindings = bindings or {}
    subs = {}
    for app in apps:
        name = app.func.__name__
        if name not in bindings:
            raise UnboundOpaqueSymbol(name)
        subs[app] = sp.sympify(bindings[name])
    return e.subs(subs).doit()


def evaluate(e, point: Mapping[sp.Symbol, object], bindings=None) -> complex:
    """Numeric value of ``e`` at ``point`` (a variable -> value mapping)."""
    e = instantiate(e, bindings)
    val = e.subs({k: sp.sympify(v) for k, v in point.items()})
    return complex(sp.N(val, 30))


def vectorize(e, vars_: Sequence[sp.Symbol], bindings=None) -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``e`` into a numpy function of an ``(M, n)`` point array."""
    inst = instantiate(e, bindings)
    f = sp.lambdify(list(vars_), inst, modules="numpy")
    complex_valued = not is_real(inst)

    def call(points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = f(*points.T)
        out = np.broadcast_to(np.asarray(out), points.shape[:1])
        return np.array(out, dtype=complex if complex_valued else float)

    return call


# -- zero testing -----------------------------------------------------------


class ZeroStatus(enum.Enum):
    ZERO = "Zero"
    NONZERO = "NonZero"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ZeroTestResult:
    status: ZeroStatus
    witness: dict | None = None

    def __bool__(self):  # truthy only for a proven zero
        return self.status is ZeroStatus.ZERO


def _trial_points(vars_, rng: random.Random, trials: int):
    yield {v: sp.Integer(2) for v in vars_}
    for _ in range(trials - 1):
        yield {v: sp.Rational(rng.randint(-30, 30), rng.randint(1, 9)) for v in vars_}


def zero_test(e, seed: int = 0, trials: int = 8) -> ZeroTestResult:
    """Decide whether ``e`` is identically zero.

    ``ZERO`` only when the canonical form, or failing that the simplified
    form once all samples vanish, is literally 0.  ``NONZERO``
    carries a rational witness point where ``e`` evaluates to a nonzero
    number.  Opaque functions, or a run of vanishing samples, give
    ``UNKNOWN``.
    """
    c = canonicalize(e)
    if c == 0:
        return ZeroTestResult(ZeroStatus.ZERO)
    if c.atoms(AppliedUndef):
        return ZeroTestResult(ZeroStatus.UNKNOWN)
    vars_ = sorted(c.free_symbols, key=lambda s: s.name)
    rng = random.Random(seed)
    for pt in _trial_points(vars_, rng, trials):
        val = c.subs(pt)
        if val.is_Rational:
            nonzero = val != 0
        else:
            try:
                nonzero = abs(complex(sp.N(val, 50))) > 1e-30
            except (TypeError, ValueError):  # pole at this point
                continue
        if nonzero:
            return ZeroTestResult(ZeroStatus.NONZERO, {v.name: pt[v] for v in vars_})
    # every sample vanished: worth the cost of a full simplification
    if sp.simplify(c) == 0:
        return ZeroTestResult(ZeroStatus.ZERO)
    return ZeroTestResult(ZeroStatus.UNKNOWN)


# -- structural sign recognition ---------------------------------------------


def _nonneg(e: Expr) -> bool:
    if e.is_Number:
        return bool(e >= 0)
    if isinstance(e, sp.exp):
        return True
    if e.is_Pow:
        b, k = e.args
        if k.is_Integer and k % 2 == 0:
            return is_real(b)
        return k.is_Integer and _nonneg(b)
    if e.is_Mul or e.is_Add:
        return all(_nonneg(a) for a in e.args)
    return False


def _positive(e: Expr) -> bool:
    if e.is_Number:
        return bool(e > 0)
    if isinstance(e, sp.exp):
        return True
    if e.is_Pow:
        return e.args[1].is_Integer and _positive(e.args[0])
    if e.is_Mul:
        return all(_positive(a) for a in e.args)
    if e.is_Add:
        return all(_nonneg(a) for a in e.args) and any(_positive(a) for a in e.args)
    return False


def structurally_nonneg(e) -> bool:
    """Sound but incomplete test for ``e >= 0`` on all real points.

    Recognises even powers, ``exp``, nonnegative constants and sums/products
    of those, in either the given or the expanded form.
    """
    e = sp.sympify(e)
    if not is_real(e):
        return False
    return _nonneg(e) or _nonneg(canonicalize(e))


def structurally_positive(e) -> bool:
    e = sp.sympify(e)
    if not is_real(e):
        return False
    return _positive(e) or _positive(canonicalize(e))
