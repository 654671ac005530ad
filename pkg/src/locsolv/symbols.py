"""First-order operators and xi-polynomial symbols.

Conventions: ``D_k = -i d/dx_k``, so the first-order operator
``X = sum_k a_k(x) D_k + b(x)`` has total symbol ``sum_k a_k(x) xi_k + b(x)``.
The Poisson bracket is

    {p, q} = sum_k (d_xi_k p)(d_x_k q) - (d_x_k p)(d_xi_k q)

and ``p # q`` is the Weyl (Moyal) composition, a finite sum here because
every symbol is a polynomial in xi.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.polys.domains import QQ_I
from sympy.polys.rings import ring

from .expr import canonicalize, conjugate, split

#: Largest total xi-degree a PolySymbol may carry.
MAX_DEGREE = 4


class DegreeOverflow(ValueError):
    pass


class UnsupportedCoefficient(ValueError):
    pass


def xi_symbols(n: int) -> tuple[sp.Symbol, ...]:
    return tuple(sp.Symbol(f"xi{k + 1}", real=True) for k in range(n))


def _multi_indices(n: int, max_total: int):
    for alpha in itertools.product(range(max_total + 1), repeat=n):
        if sum(alpha) <= max_total:
            yield alpha


def _factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


class PolySymbol:
    """A polynomial in xi whose coefficients are functions of x.

    Stored sparsely as ``{alpha: coeff}`` with canonical (expanded) nonzero
    coefficients, so two symbols are equal iff their maps are equal.
    Coefficients may be complex; ``real()``/``imag()`` split them.
    """

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Sequence[sp.Symbol], terms: Mapping[tuple, object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        raw: dict = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n:
                raise ValueError(f"multi-index {alpha} does not match dimension {n}")
            raw[alpha] = raw.get(alpha, 0) + c
        clean = {}
        for alpha, c in sorted(raw.items()):
            c = canonicalize(c)
            if c == 0:
                continue
            if sum(alpha) > MAX_DEGREE:
                raise DegreeOverflow(f"xi-degree {sum(alpha)} exceeds {MAX_DEGREE}")
            clean[alpha] = c
        self._terms = clean

    # -- construction ----------------------------------------------------
    @classmethod
    def constant(cls, variables, c) -> PolySymbol:
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def from_expr(cls, expr, variables) -> PolySymbol:
        """Read a symbol written with ``xi1..xin``."""
        xis = xi_symbols(len(variables))
        poly = sp.Poly(canonicalize(expr), *xis)
        return cls(variables, {m: c for m, c in poly.terms()})

    # -- inspection ------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coeff(self, alpha) -> sp.Expr:
        return self._terms.get(tuple(alpha), sp.Integer(0))

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def homogeneous_part(self, d: int) -> PolySymbol:
        return PolySymbol(self.variables, {a: c for a, c in self._terms.items() if sum(a) == d})

    def linear_coeffs(self) -> tuple[sp.Expr, ...]:
        """Coefficients of xi_1..xi_n."""
        unit = [tuple(int(j == k) for j in range(self.n)) for k in range(self.n)]
        return tuple(self.coeff(e) for e in unit)

    def to_expr(self) -> sp.Expr:
        xis = xi_symbols(self.n)
        return sp.Add(*[c * sp.Mul(*[x**a for x, a in zip(xis, alpha)]) for alpha, c in self._terms.items()])

    # -- algebra ---------------------------------------------------------
    def _check(self, other: PolySymbol):
        if other.variables != self.variables:
            raise ValueError("symbols live on different variable sets")

    def _lift(self, other) -> PolySymbol:
        if isinstance(other, PolySymbol):
            self._check(other)
            return other
        return PolySymbol.constant(self.variables, other)

    def __add__(self, other) -> PolySymbol:
        other = self._lift(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out.get(a, 0) + c
        return PolySymbol(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> PolySymbol:
        return PolySymbol(self.variables, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> PolySymbol:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> PolySymbol:
        return self._lift(other) - self

    def __mul__(self, other) -> PolySymbol:
        """Pointwise product of symbols (not the Weyl product)."""
        other = self._lift(other)
        out: dict = {}
        for (a, c), (b, d) in itertools.product(self._terms.items(), other._terms.items()):
            ab = tuple(i + j for i, j in zip(a, b))
            out[ab] = out.get(ab, 0) + c * d
        return PolySymbol(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> PolySymbol:
        out = PolySymbol.constant(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def d_xi(self, k: int) -> PolySymbol:
        out = {}
        for a, c in self._terms.items():
            if a[k]:
                b = list(a)
                b[k] -= 1
                out[tuple(b)] = a[k] * c
        return PolySymbol(self.variables, out)

    def d_x(self, k: int) -> PolySymbol:
        v = self.variables[k]
        return PolySymbol(self.variables, {a: sp.diff(c, v) for a, c in self._terms.items()})

    def conj(self) -> PolySymbol:
        return PolySymbol(self.variables, {a: conjugate(c) for a, c in self._terms.items()})

    def real(self) -> PolySymbol:
        return PolySymbol(self.variables, {a: split(c)[0] for a, c in self._terms.items()})

    def imag(self) -> PolySymbol:
        return PolySymbol(self.variables, {a: split(c)[1] for a, c in self._terms.items()})

    def subs(self, mapping) -> PolySymbol:
        return PolySymbol(self.variables, {a: c.subs(mapping) for a, c in self._terms.items()})

    # -- dunder ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, PolySymbol):
            return self.variables == other.variables and self._terms == other._terms
        if not isinstance(other, sp.Basic) and not isinstance(other, (int, float, complex)):
            return NotImplemented
        return self == self._lift(other)

    def __hash__(self):
        return hash((self.variables, tuple(self._terms.items())))

    def __repr__(self):
        return f"PolySymbol({self.to_expr()})"

    def __str__(self):
        return str(self.to_expr())


@dataclass(frozen=True)
class FirstOrderOp:
    """``sum_k coeffs[k] * D_k + zeroth`` on the given variables."""

    variables: tuple
    coeffs: tuple
    zeroth: sp.Expr = sp.Integer(0)

    def __post_init__(self):
        vars_ = tuple(self.variables)
        coeffs = tuple(canonicalize(c) for c in self.coeffs)
        if len(coeffs) != len(vars_):
            raise ValueError(f"expected {len(vars_)} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "variables", vars_)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "zeroth", canonicalize(self.zeroth))

    @classmethod
    def zero(cls, variables) -> FirstOrderOp:
        return cls(tuple(variables), (0,) * len(variables))

    @property
    def n(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs) and self.zeroth == 0

    def apply(self, u) -> sp.Expr:
        """Act on an expression in the same variables."""
        u = sp.sympify(u)
        out = self.zeroth * u
        for a, v in zip(self.coeffs, self.variables):
            out += a * (-sp.I) * sp.diff(u, v)
        return canonicalize(out)

    def derivation(self, f) -> sp.Expr:
        """The vector field ``iX`` acting on a function: ``sum_k a_k d_k f``."""
        return canonicalize(sum(a * sp.diff(f, v) for a, v in zip(self.coeffs, self.variables)))

    def __add__(self, other: FirstOrderOp) -> FirstOrderOp:
        return FirstOrderOp(
            self.variables,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            self.zeroth + other.zeroth,
        )

    def __neg__(self) -> FirstOrderOp:
        return FirstOrderOp(self.variables, tuple(-a for a in self.coeffs), -self.zeroth)

    def __sub__(self, other: FirstOrderOp) -> FirstOrderOp:
        return self + (-other)

    def scale(self, c) -> FirstOrderOp:
        return FirstOrderOp(self.variables, tuple(c * a for a in self.coeffs), c * self.zeroth)

    def __str__(self):
        parts = [f"({c})*D{k + 1}" for k, c in enumerate(self.coeffs) if c != 0]
        if self.zeroth != 0:
            parts.append(f"({self.zeroth})")
        return " + ".join(parts) or "0"


def symbol_of(op: FirstOrderOp) -> PolySymbol:
    n = op.n
    terms = {tuple(int(j == k) for j in range(n)): a for k, a in enumerate(op.coeffs)}
    terms[(0,) * n] = op.zeroth
    return PolySymbol(op.variables, terms)


def formal_adjoint(op: FirstOrderOp) -> FirstOrderOp:
    """``X^* = X - i div(a)`` for real first-order coefficients ``a``.

    Complex first-order coefficients are conjugated and moved through the
    derivative in the same way, so the result is the formal L^2 adjoint in
    general.
    """
    coeffs = tuple(conjugate(a) for a in op.coeffs)
    div = sum(sp.diff(a, v) for a, v in zip(coeffs, op.variables))
    return FirstOrderOp(op.variables, coeffs, conjugate(op.zeroth) - sp.I * div)


def commutator(a: FirstOrderOp, b: FirstOrderOp) -> FirstOrderOp:
    """``[A, B] = AB - BA``, again a first-order operator."""
    if a.variables != b.variables:
        raise ValueError("operators live on different variable sets")
    lin_a = FirstOrderOp(a.variables, a.coeffs)
    lin_b = FirstOrderOp(b.variables, b.coeffs)
    coeffs = tuple(lin_a.apply(bk) - lin_b.apply(ak) for ak, bk in zip(a.coeffs, b.coeffs))
    return FirstOrderOp(a.variables, coeffs, lin_a.apply(b.zeroth) - lin_b.apply(a.zeroth))


def poisson_bracket(p: PolySymbol, q: PolySymbol) -> PolySymbol:
    p._check(q)
    out = PolySymbol(p.variables)
    for k in range(p.n):
        out = out + p.d_xi(k) * q.d_x(k) - p.d_x(k) * q.d_xi(k)
    return out


def _d_xi_multi(p: PolySymbol, alpha) -> PolySymbol:
    for k, a in enumerate(alpha):
        for _ in range(a):
            p = p.d_xi(k)
    return p


def _d_x_multi(p: PolySymbol, beta) -> PolySymbol:
    for k, b in enumerate(beta):
        for _ in range(b):
            p = p.d_x(k)
    return p


def weyl_product(p: PolySymbol, q: PolySymbol) -> PolySymbol:
    """Moyal composition ``p # q`` (symbol of ``Op^w(p) Op^w(q)``).

    ``sum_{alpha, beta} (1/2i)^{|alpha|+|beta|} (-1)^{|beta|} / (alpha! beta!)
    * (d_xi^alpha d_x^beta p) (d_x^alpha d_xi^beta q)``; ``alpha`` is bounded
    by the xi-degree of ``p`` and ``beta`` by that of ``q``.
    """
    p._check(q)
    if p.degree + q.degree > MAX_DEGREE:
        raise DegreeOverflow(f"combined xi-degree {p.degree + q.degree} exceeds {MAX_DEGREE}")
    n = p.n
    half_over_i = 1 / (2 * sp.I)
    raw: dict = {}  # canonicalized once at the end
    for alpha in _multi_indices(n, p.degree):
        pa = _d_xi_multi(p, alpha)
        if pa.is_zero():
            continue
        qa = _d_x_multi(q, alpha)
        for beta in _multi_indices(n, q.degree):
            qb = _d_xi_multi(qa, beta)
            if qb.is_zero():
                continue
            k = sum(alpha) + sum(beta)
            w = half_over_i**k * (-1) ** sum(beta) / (_factorial(alpha) * _factorial(beta))
            left = _d_x_multi(pa, beta)
            for (a, c), (b, d) in itertools.product(left.terms.items(), qb.terms.items()):
                ab = tuple(i + j for i, j in zip(a, b))
                raw[ab] = raw.get(ab, 0) + w * c * d
    return PolySymbol(p.variables, raw)


def _check_polynomial(c, variables):
    if c.atoms(AppliedUndef) or not c.is_polynomial(*variables):
        raise UnsupportedCoefficient(f"coefficient {c} is not a polynomial in {variables}")


def _apply_D(alpha, f, variables):
    for k, a in enumerate(alpha):
        for _ in range(a):
            f = -sp.I * sp.diff(f, variables[k])
    return f


def quantize_apply(p: PolySymbol, u) -> sp.Expr:
    """Apply the Weyl quantization of an x-polynomial symbol to ``u``.

    Works from the kernel formula: for ``a = x^gamma xi^alpha``,
    ``Op^w(a) u = 2^{-|gamma|} sum_{mu <= gamma} C(gamma, mu) x^mu D^alpha(x^{gamma-mu} u)``.
    Nothing here goes through ``weyl_product``.  Polynomial ``u`` is
    handled in sparse polynomial arithmetic, anything else symbolically.
    """
    vs = p.variables
    u = sp.sympify(u)
    for c in p.terms.values():
        _check_polynomial(c, vs)
    if u.is_polynomial(*vs) and not u.atoms(AppliedUndef):
        return _quantize_apply_poly(p, u)
    out = sp.Integer(0)
    for alpha, c in p.terms.items():
        for gamma, kappa in sp.Poly(c, *vs).terms():
            scale = kappa / sp.Integer(2) ** sum(gamma)
            for mu in itertools.product(*(range(g + 1) for g in gamma)):
                nu = tuple(g - m for g, m in zip(gamma, mu))
                binom = math.prod(math.comb(g, m) for g, m in zip(gamma, mu))
                x_mu = sp.Mul(*[v**m for v, m in zip(vs, mu)])
                x_nu = sp.Mul(*[v**m for v, m in zip(vs, nu)])
                out += scale * binom * x_mu * _apply_D(alpha, x_nu * u, vs)
    return canonicalize(out)


def _quantize_apply_poly(p: PolySymbol, u) -> sp.Expr:
    vs = p.variables
    R, *gens = ring(vs, QQ_I)
    U = R.from_expr(u) if u != 0 else R.zero
    out = R.zero
    for alpha, c in p.terms.items():
        phase = QQ_I.from_sympy((-sp.I) ** sum(alpha))
        for gamma, kappa in R.from_expr(c).terms():
            scale = phase * kappa / QQ_I(2 ** sum(gamma))
            for mu in itertools.product(*(range(g + 1) for g in gamma)):
                nu = tuple(g - m for g, m in zip(gamma, mu))
                f = R({nu: QQ_I.one}) * U
                for k, a in enumerate(alpha):
                    for _ in range(a):
                        f = f.diff(gens[k])
                binom = math.prod(math.comb(g, m) for g, m in zip(gamma, mu))
                out += R({mu: scale * QQ_I(binom)}) * f
    return canonicalize(out.as_expr())


def subprincipal(P) -> PolySymbol:
    """``i X_0(x, xi) + X_{N+1}(x, xi)`` for an operator spec."""
    return symbol_of(P.X0) * sp.I + symbol_of(P.XN1)


def iter_multi_indices(n: int, max_total: int) -> Iterable[tuple]:
    return _multi_indices(n, max_total)
