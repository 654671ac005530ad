import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from locsolv.expr import variables
from locsolv.forms import (
    DegreeViolation,
    NotPSD,
    assemble,
    dominate,
    dominate_batch,
    min_eig_2x2,
    min_eig_sweep,
    min_eigs,
)
from locsolv.grid import Grid
from locsolv.symbols import PolySymbol, xi_symbols

x1, x2 = variables("x1 x2")
xi1, xi2 = xi_symbols(2)


def test_assemble_example4_form():
    Q, residue = assemble(PolySymbol.from_expr(xi1**2 + xi2**2 + (xi1 - xi2) ** 2, (x1, x2)))
    assert Q.entries == sp.Matrix([[2, -1], [-1, 2]])
    assert residue.is_zero()


def test_assemble_symmetrizes():
    Q, _ = assemble(PolySymbol.from_expr(xi1 * xi2, (x1, x2)))
    assert Q.entries == sp.Matrix([[0, sp.Rational(1, 2)], [sp.Rational(1, 2), 0]])


def test_assemble_time_direction():
    y1, y2, t = variables("x1 x2 t")
    _, _, tau = xi_symbols(3)
    f = 1 + t**2
    Q, _ = assemble(PolySymbol.from_expr(f**2 * tau**2, (y1, y2, t)))
    assert Q.entries == sp.diag(0, 0, sp.expand(f**2))


def test_assemble_residue_and_degree():
    Q, residue = assemble(PolySymbol.from_expr(x1 * xi1**2 + 3 * xi2 + x2, (x1, x2)))
    assert Q.entries[0, 0] == x1
    assert residue == PolySymbol.from_expr(3 * xi2 + x2, (x1, x2))
    with pytest.raises(DegreeViolation):
        assemble(PolySymbol.from_expr(xi1**3, (x1, x2)))


def test_dominate_examples():
    d = dominate([-1, 0], [[2, -1], [-1, 2]])
    assert abs(d.C - 2 / 3) < 1e-12
    assert dominate([0, 0], [[2, -1], [-1, 2]]).C == 0
    fail = dominate([0, 1], [[1, 0], [0, 0]])
    assert not fail.holds
    np.testing.assert_allclose(np.abs(fail.direction), [0, 1], atol=1e-12)


def test_dominate_rejects_indefinite():
    with pytest.raises(NotPSD):
        dominate([1, 0], [[1, 0], [0, -1]])


def test_min_eig_closed_form():
    M = np.array([[1.9, -1.0], [-1.0, 2.0]])
    assert abs(min_eigs(M[None])[0] - (3.9 - np.sqrt(4.01)) / 2) < 1e-12
    Q, _ = assemble(PolySymbol.from_expr((2 - sp.Rational(8, 5)) * xi1**2 - 2 * xi1 * xi2 + 2 * xi2**2, (x1, x2)))
    lam, _ = min_eig_sweep(Q, Grid(((-1, 1), (-1, 1)), 5))
    assert lam < 0


def test_min_eig_sweep_degenerate():
    y, t = variables("x1 t")
    _, tau = xi_symbols(2)
    Q, _ = assemble(PolySymbol.from_expr(tau**2, (y, t)))
    lam, _ = min_eig_sweep(Q, Grid(((-1, 1), (-1, 1)), 5))
    assert lam == 0


def test_min_eig_sweep_reports_location():
    Q, _ = assemble(PolySymbol.from_expr(x1 * xi1**2 + xi2**2, (x1, x2)))
    lam, where = min_eig_sweep(Q, Grid(((-1, 1), (-1, 1)), 5))
    assert lam == -1 and where[0] == -1


@settings(max_examples=200, derandomize=True)
@given(arrays(np.float64, (2, 2), elements=st.floats(-10, 10)))
def test_closed_form_2x2_matches_eigvalsh(A):
    M = A + A.T
    assert abs(min_eig_2x2(M) - np.linalg.eigvalsh(M)[0]) <= 1e-9 * max(1.0, np.abs(M).max())


@settings(max_examples=100, derandomize=True)
@given(
    arrays(np.float64, (3, 3), elements=st.floats(-3, 3)),
    arrays(np.float64, 3, elements=st.floats(-3, 3)),
)
def test_domination_constant_is_tight(B, v):
    # C = v^T M^+ v is attained at xi = M^+ v and never exceeded
    M = B @ B.T + 0.1 * np.eye(3)
    C, ok, _ = dominate_batch(v[None], M[None])
    assert ok[0]
    xi = np.linalg.solve(M, v)
    if np.linalg.norm(v) > 1e-8:
        assert abs((v @ xi) ** 2 / (xi @ M @ xi) - C[0]) <= 1e-8 * max(1.0, C[0])
    rng = np.random.default_rng(0)
    for z in rng.standard_normal((20, 3)):
        assert (v @ z) ** 2 <= C[0] * (z @ M @ z) * (1 + 1e-9) + 1e-12
