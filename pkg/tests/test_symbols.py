import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import X2, random_field, random_poly, random_symbol
from locsolv.expr import opaque, variables
from locsolv.symbols import (
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
    xi_symbols,
)
from locsolv.corpus import load

x1, x2 = X2
xi1, xi2 = xi_symbols(2)


def S(expr, vs=X2):
    return PolySymbol.from_expr(expr, vs)


def D(k, coeff=1, vs=X2):
    return FirstOrderOp(vs, tuple(coeff if j == k else 0 for j in range(len(vs))))


class TestSymbolOf:
    def test_basic(self):
        assert symbol_of(D(0)) == S(xi1)
        assert symbol_of(D(0, x2)) == S(x2 * xi1)
        assert symbol_of(D(0) - D(1)) == S(xi1 - xi2)


class TestAdjoint:
    def test_constant(self):
        assert formal_adjoint(D(0)) == D(0)

    def test_divergence_term(self):
        a = formal_adjoint(D(0, x1))
        assert a.coeffs == (x1, 0)
        assert a.zeroth == -sp.I

    def test_divergence_free(self):
        assert formal_adjoint(D(0, x2)) == D(0, x2)


class TestCommutator:
    def test_constant_fields(self):
        assert commutator(D(0), D(1)).is_zero()

    def test_d1_x1d1(self):
        c = commutator(D(0), D(0, x1))
        assert c == D(0, -sp.I)

    def test_d1_x1d1_on_monomials(self):
        X, Y = D(0), D(0, x1)
        c = commutator(X, Y)
        for m in range(5):
            u = x1**m
            assert sp.expand(X.apply(Y.apply(u)) - Y.apply(X.apply(u)) - c.apply(u)) == 0

    def test_opaque_dependency(self):
        x1_, x2_, t = variables("x1 x2 t")
        vs = (x1_, x2_, t)
        g = opaque("g", [x1_])
        Dt = FirstOrderOp(vs, (0, 0, 1))
        Y = FirstOrderOp(vs, (g, 1, 0))
        assert commutator(Dt, Y).is_zero()

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(st.integers(0, 10**6))
    def test_consistency_with_composition(self, seed):
        rng = random.Random(seed)
        X, Y = random_field(rng), random_field(rng)
        u = random_poly(rng, X2, 3, density=0.7) + x1**2 * x2
        c = commutator(X, Y)
        assert sp.expand(X.apply(Y.apply(u)) - Y.apply(X.apply(u)) - c.apply(u)) == 0


class TestPoisson:
    def test_examples(self):
        p = S(x1 * xi2 + x2**2)
        assert poisson_bracket(p, p).is_zero()
        assert poisson_bracket(S(xi1 - xi2), S(x2 * xi1)) == S(-xi1)
        assert poisson_bracket(S(xi1), S(x1 * xi1)) == S(xi1)

    @settings(max_examples=25, deadline=None, derandomize=True)
    @given(st.integers(0, 10**6))
    def test_antisymmetry(self, seed):
        rng = random.Random(seed)
        p, q = random_symbol(rng, xi_deg=2), random_symbol(rng, xi_deg=2)
        assert poisson_bracket(p, q) == -poisson_bracket(q, p)

    @settings(max_examples=15, deadline=None, derandomize=True)
    @given(st.integers(0, 10**6))
    def test_jacobi(self, seed):
        rng = random.Random(seed)
        p, q, r = (random_symbol(rng, xi_deg=1) for _ in range(3))
        pb = poisson_bracket
        total = pb(p, pb(q, r)) + pb(q, pb(r, p)) + pb(r, pb(p, q))
        assert total.is_zero()


class TestWeyl:
    def test_unit(self):
        p = S(x1 * xi1**2 + x2 * xi2)
        assert weyl_product(p, PolySymbol.constant(X2, 1)) == p

    def test_first_correction(self):
        assert weyl_product(S(xi1), S(x1)) == S(x1 * xi1 - sp.I / 2)

    def test_sandwich(self):
        assert weyl_product(weyl_product(S(xi1), S(x1)), S(xi1)) == S(x1 * xi1**2)

    def test_quantize_simple(self):
        assert sp.expand(quantize_apply(S(xi1), x1**2) + 2 * sp.I * x1) == 0
        assert quantize_apply(PolySymbol.constant(X2, 1), x1 * x2**3) == x1 * x2**3

    def test_d1x1d1(self):
        u = x1**3
        direct = D(0).apply(x1 * D(0).apply(u))
        via = quantize_apply(weyl_product(S(xi1), weyl_product(S(x1), S(xi1))), u)
        assert sp.expand(direct - via) == 0
        assert sp.expand(direct + 9 * x1**2) == 0

    def test_degree_overflow(self):
        with pytest.raises(DegreeOverflow):
            weyl_product(S(xi1**3), S(xi2**2))

    def test_opaque_coefficients_rejected(self):
        g = opaque("g", [x1])
        with pytest.raises(UnsupportedCoefficient):
            quantize_apply(S(g * xi1), x1)

    @settings(max_examples=12, deadline=None, derandomize=True)
    @given(st.integers(0, 10**6))
    def test_associativity(self, seed):
        rng = random.Random(seed)
        p, q, r = (random_symbol(rng, xi_deg=1) for _ in range(3))
        assert weyl_product(weyl_product(p, q), r) == weyl_product(p, weyl_product(q, r))


class TestSubprincipal:
    def test_example4(self):
        P = load("example4")
        assert subprincipal(P) == S(sp.I * (xi1 - xi2) + x2 * xi1)

    def test_example2(self):
        P = load("example2")
        x1_, x2_, t = P.variables
        _, _, tau = xi_symbols(3)
        expected = sp.I * (1 + t**2) * tau + opaque("g1", [x1_, x2_]) * xi1 + opaque("g2", [x1_, x2_]) * xi2
        assert subprincipal(P) == PolySymbol.from_expr(expected, P.variables)

    def test_zero_xn1(self):
        X0 = D(0) - D(1)
        P = load("h1_degenerate_control")
        assert subprincipal(P) == symbol_of(P.X0) * sp.I
        assert X0 != P.X0
