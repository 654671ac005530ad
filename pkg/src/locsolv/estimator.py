"""Finite-difference evidence for the solvability estimate ``||P* phi|| >= C ||phi||``.

Unknowns are values at interior grid nodes, extended by zero to the
boundary.  Second-order parts ``D_k c_kl D_l`` are assembled in divergence
form: diagonal terms as edge fluxes ``E_k^T diag(c at half-points) E_k``,
mixed terms with centered differences.  First-order terms use centered
differences.

Two trial spaces are available for ``sigma_min``.  ``"full"`` is every
interior grid function.  ``"resolved"`` is the image of piecewise linear
prolongation from the grid with every other node; it excludes the
grid-scale oscillations on which centered stencils lose the first-order
terms, and is the default for ``P*``.

A first-order field on its own is discretized through its Gram operator
``X* X`` in the same divergence form, so that ``||X phi||^2 = phi^H G phi``.
This avoids the null vectors of the centered first difference on grids
with an odd interior count.

All numbers produced here are discrete evidence, not continuum bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla
import sympy as sp

from .expr import canonicalize, conjugate, vectorize
from .grid import Grid
from .operator import OperatorSpec
from .symbols import FirstOrderOp, PolySymbol

#: Largest trial dimension handled by dense factorizations.
DENSE_LIMIT = 1100
ITER_TOL = 1e-8
ITER_MAXITER = 10_000
TRIAL_SPACES = ("resolved", "full")


class GridTooCoarse(ValueError):
    pass


class DegenerateField(ValueError):
    pass


class ConvergenceFailure(ArithmeticError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(f"shift-invert iteration stalled at backward error {residual:.3e} ({iterations} steps allowed)")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class DiscreteOperator:
    """A square matrix on interior grid values.

    ``kind == "operator"``: ``matrix`` is the operator itself.
    ``kind == "gram"``: ``matrix`` is ``A^H A`` for an implicit ``A``.
    ``trial`` (optional, interior x m) spans the trial functions; ``None``
    means all interior grid functions.  ``columns`` selects a subset of the
    trial basis (functions supported in a sub-box); rows are never dropped.
    """

    matrix: sps.csr_matrix
    grid: Grid | None
    kind: str = "operator"
    scheme: str = "divergence"
    meta: dict = field(default_factory=dict)
    trial: sps.csr_matrix | None = None
    columns: np.ndarray | None = None

    def __post_init__(self):
        r, c = self.matrix.shape
        if r != c:
            raise ValueError(f"discrete operators are square, got {r} x {c}")
        if self.matrix.nnz and not np.all(np.isfinite(self.matrix.data)):
            raise ValueError("non-finite matrix entries")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def trial_dim(self) -> int:
        if self.columns is not None:
            return len(self.columns)
        return self.shape[1] if self.trial is None else self.trial.shape[1]

    def basis(self) -> sps.csr_matrix:
        """Trial basis as an interior x m sparse matrix."""
        B = self.trial if self.trial is not None else sps.identity(self.shape[1], format="csr")
        return B if self.columns is None else B[:, self.columns]

    def restrict(self, sub: Grid) -> DiscreteOperator:
        """Trial functions supported in the interior of a sub-box on the same lattice."""
        inside = np.zeros(self.shape[1], dtype=bool)
        inside[sub_columns(self.grid, sub)] = True
        B = sps.csc_matrix(self.trial if self.trial is not None else sps.identity(self.shape[1], format="csr"))
        outside = np.asarray(abs(B[~inside]).sum(axis=0)).ravel()
        keep = np.flatnonzero(outside == 0)
        if self.columns is not None:
            keep = np.intersect1d(keep, self.columns)
        return replace(self, columns=keep, meta={**self.meta, "restricted_to": [list(b) for b in sub.box]})

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


# -- lattice plumbing ----------------------------------------------------


def _check(grid: Grid):
    if any(m < 3 for m in grid.interior_shape):
        raise GridTooCoarse(f"interior shape {grid.interior_shape}: need >= 3 interior points per axis")


def sub_columns(grid: Grid, sub: Grid) -> np.ndarray:
    """Flat interior indices of ``grid`` that are interior nodes of ``sub``."""
    offsets = [int(round((slo - lo) / h)) for (lo, _), (slo, _), h in zip(grid.box, sub.box, grid.spacing)]
    ranges = [np.arange(o, o + p - 2) for o, p in zip(offsets, sub.points)]
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.ravel_multi_index([m.ravel() for m in mesh], grid.interior_shape)


def _kron_axis(mats_1d: dict, shape: tuple) -> sps.csr_matrix:
    """Kronecker product with ``mats_1d[k]`` on axis ``k`` and identity elsewhere."""
    out = None
    for k, m in enumerate(shape):
        factor = mats_1d.get(k, sps.identity(m, format="csr"))
        out = factor if out is None else sps.kron(out, factor, format="csr")
    return out


def _forward_1d(m: int, h: float) -> sps.csr_matrix:
    """Interior values -> the ``m + 1`` edges around them, zero boundary values."""
    return ((sps.eye(m + 1, m, k=0) - sps.eye(m + 1, m, k=-1)) / h).tocsr()


def _centered_1d(m: int, h: float) -> sps.csr_matrix:
    return sps.diags([-np.ones(m - 1), np.ones(m - 1)], [-1, 1], shape=(m, m), format="csr") / (2 * h)


def _prolong_1d(m: int) -> sps.csr_matrix:
    """Linear interpolation from the odd-indexed interior nodes (0-based) to all of them."""
    coarse = np.arange(1, m, 2)
    rows, cols, vals = [], [], []
    for c, j in enumerate(coarse):
        rows.append(j), cols.append(c), vals.append(1.0)
        for nb in (j - 1, j + 1):
            if 0 <= nb < m and nb % 2 == 0:
                rows.append(nb), cols.append(c), vals.append(0.5)
    return sps.csr_matrix((vals, (rows, cols)), shape=(m, len(coarse)))


def prolongation(grid: Grid) -> sps.csr_matrix:
    """Basis of the resolved trial space on ``grid``."""
    out = None
    for m in grid.interior_shape:
        f = _prolong_1d(m)
        out = f if out is None else sps.kron(out, f, format="csr")
    return out


def _edge_points(grid: Grid, k: int) -> np.ndarray:
    axes = [a[1:-1] for a in grid.axes]
    a = grid.axes[k]
    axes[k] = 0.5 * (a[:-1] + a[1:])
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _sample(expr, variables, pts, bindings) -> np.ndarray:
    expr = canonicalize(expr)
    if expr == 0:
        return np.zeros(len(pts))
    return vectorize(expr, variables, bindings)(pts)


def _edge_op(grid: Grid, k: int) -> sps.csr_matrix:
    return _kron_axis({k: _forward_1d(grid.interior_shape[k], grid.spacing[k])}, grid.interior_shape)


def _centered_op(grid: Grid, k: int) -> sps.csr_matrix:
    return _kron_axis({k: _centered_1d(grid.interior_shape[k], grid.spacing[k])}, grid.interior_shape)


def _second_order(C, variables, grid: Grid, bindings) -> sps.csr_matrix:
    """``sum_kl D_k c_kl D_l`` for a Hermitian coefficient matrix ``C``."""
    n = grid.ndim
    N = grid.n_interior
    nodes = grid.interior_nodes()
    out = sps.csr_matrix((N, N), dtype=complex)
    for k in range(n):
        if canonicalize(C[k][k]) != 0:
            E = _edge_op(grid, k)
            c = _sample(C[k][k], variables, _edge_points(grid, k), bindings)
            out = out + E.T @ sps.diags(c) @ E
        for l in range(n):
            if l == k or canonicalize(C[k][l]) == 0:
                continue
            c = _sample(C[k][l], variables, nodes, bindings)
            out = out + _centered_op(grid, k).T @ sps.diags(c) @ _centered_op(grid, l)
    return out.tocsr()


def _first_order(coeffs, variables, grid: Grid, bindings, right: bool = False) -> sps.csr_matrix:
    """``sum_k diag(a_k) D_k`` (or ``sum_k D_k diag(a_k)``) with centered ``D_k = -i d_k``."""
    N = grid.n_interior
    nodes = grid.interior_nodes()
    out = sps.csr_matrix((N, N), dtype=complex)
    for k, a in enumerate(coeffs):
        if canonicalize(a) == 0:
            continue
        A = sps.diags(_sample(a, variables, nodes, bindings))
        D = -1j * _centered_op(grid, k)
        out = out + (D @ A if right else A @ D)
    return out.tocsr()


def _zeroth(b, variables, grid: Grid, bindings) -> sps.csr_matrix:
    return sps.diags(_sample(b, variables, grid.interior_nodes(), bindings).astype(complex)).tocsr()


# -- discretize ----------------------------------------------------------


def discretize(
    obj,
    grid: Grid,
    bindings=None,
    *,
    scheme: str | None = None,
    adjoint: bool = True,
    trial: str = "resolved",
) -> DiscreteOperator:
    """Finite-difference matrix on interior values of ``grid``.

    * ``FirstOrderOp``: ``scheme="gram"`` (default) gives ``X* X`` in
      divergence form; ``scheme="centered"`` gives the centered matrix of
      ``X`` itself.
    * ``PolySymbol`` of xi-degree <= 2: its Weyl quantization, using
      ``Op^w(sum Q_kl xi_k xi_l) = sum D_k Q_kl D_l - 1/4 sum d_k d_l Q_kl``.
    * ``OperatorSpec``: ``P*`` (or ``P`` with ``adjoint=False``), with the
      trial space named by ``trial``.
    """
    _check(grid)
    if isinstance(obj, FirstOrderOp):
        return _discretize_field(obj, grid, bindings, scheme or "gram")
    if isinstance(obj, PolySymbol):
        return _discretize_symbol(obj, grid, bindings)
    if isinstance(obj, OperatorSpec):
        if trial not in TRIAL_SPACES:
            raise ValueError(f"trial space must be one of {TRIAL_SPACES}")
        merged = {**obj.bindings, **(bindings or {})}
        A = _discretize_spec(obj, grid, merged, adjoint)
        if trial == "resolved":
            A = replace(A, trial=prolongation(grid), meta={**A.meta, "trial": "resolved"})
        return A
    raise TypeError(f"cannot discretize {type(obj).__name__}")


def _discretize_field(X: FirstOrderOp, grid, bindings, scheme) -> DiscreteOperator:
    vs = X.variables
    if scheme == "centered":
        A = _first_order(X.coeffs, vs, grid, bindings) + _zeroth(X.zeroth, vs, grid, bindings)
        return DiscreteOperator(A.tocsr(), grid, "operator", "centered", {"order": 2})
    if scheme != "gram":
        raise ValueError(f"unknown scheme {scheme!r}")
    n = X.n
    a = X.coeffs
    C = [[canonicalize(conjugate(a[k]) * a[l]) for l in range(n)] for k in range(n)]
    G = _second_order(C, vs, grid, bindings)
    if X.zeroth != 0:
        lin = _first_order(a, vs, grid, bindings)
        B = _zeroth(X.zeroth, vs, grid, bindings)
        G = G + lin.getH() @ B + B.getH() @ lin + B.getH() @ B
    return DiscreteOperator(G.tocsr(), grid, "gram", "divergence", {"order": 2})


def _unit(n, *ks) -> tuple:
    return tuple(sum(int(j == k) for k in ks) for j in range(n))


def _discretize_symbol(s: PolySymbol, grid, bindings) -> DiscreteOperator:
    if s.degree > 2:
        raise ValueError(f"xi-degree {s.degree} > 2")
    n, vs = s.n, s.variables
    Q = [[s.coeff(_unit(n, k, l)) * (1 if k == l else sp.Rational(1, 2)) for l in range(n)] for k in range(n)]
    A = _second_order(Q, vs, grid, bindings)
    lin = [s.coeff(_unit(n, k)) for k in range(n)]
    A = A + 0.5 * (_first_order(lin, vs, grid, bindings) + _first_order(lin, vs, grid, bindings, right=True))
    correction = sum(sp.diff(Q[k][l], vs[k], vs[l]) for k in range(n) for l in range(n)) / 4
    A = A + _zeroth(s.coeff((0,) * n) - correction, vs, grid, bindings)
    return DiscreteOperator(A.tocsr(), grid, "operator", "divergence", {"order": 2, "weyl": True})


def _discretize_spec(P: OperatorSpec, grid, bindings, adjoint) -> DiscreteOperator:
    n, vs = P.n, P.variables
    C = [[sp.Integer(0)] * n for _ in range(n)]
    for X, f in P.pairs:
        for k in range(n):
            for l in range(n):
                C[k][l] = C[k][l] + f * X.coeffs[k] * X.coeffs[l]
    A = _second_order(C, vs, grid, bindings)
    first = [sp.I * a + b for a, b in zip(P.X0.coeffs, P.XN1.coeffs)]
    A = A + _first_order(first, vs, grid, bindings) + _zeroth(P.a0, vs, grid, bindings)
    if adjoint:
        A = A.getH()
    return DiscreteOperator(A.tocsr(), grid, "operator", "divergence", {"order": 2, "adjoint": adjoint})


# -- spectral estimates --------------------------------------------------


def _lower_bound(K: sps.spmatrix, M: sps.spmatrix | None, seed: int) -> float:
    """A number strictly below the spectrum of the pencil ``(K, M)`` (Gershgorin on ``K``)."""
    K = sps.csr_matrix(K)
    diag = K.diagonal().real
    off = np.asarray(abs(K).sum(axis=1)).ravel() - np.abs(diag)
    g = float(min((diag - off).min(), 0.0))
    if M is not None and g < 0:
        g /= _smallest_eig(M, None, seed)
    return g - 1.0 - 1e-3 * abs(g)


def _smallest_eig(K: sps.spmatrix, M: sps.spmatrix | None, seed: int, psd: bool = True) -> float:
    """Smallest eigenvalue of the Hermitian pencil ``(K, M)``, ``M`` positive definite.

    For ``psd`` pencils the shift-invert target is 0, otherwise a Gershgorin bound below the spectrum.
    """
    n = K.shape[0]
    if n <= DENSE_LIMIT:
        Md = None if M is None else M.toarray()
        return float(sla.eigh(K.toarray(), Md, eigvals_only=True, subset_by_index=[0, 0])[0])
    shift = 0.0 if psd else _lower_bound(K, M, seed)
    v0 = np.random.default_rng(seed).standard_normal(n).astype(K.dtype)
    try:
        vals, vecs = spla.eigsh(
            K.tocsc(), k=1, M=None if M is None else M.tocsc(), sigma=shift, which="LM", v0=v0, maxiter=ITER_MAXITER
        )
    except RuntimeError:  # exactly singular K: the shift hits an eigenvalue
        if psd:
            return 0.0
        raise
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(np.inf, ITER_MAXITER) from exc
    lam, x = float(vals[0]), vecs[:, 0]
    Mx = x if M is None else M @ x
    # normwise backward error of the pair
    scale = spla.norm(K, 1) + abs(lam) * (1.0 if M is None else spla.norm(M, 1))
    res = np.linalg.norm(K @ x - lam * Mx) / (scale * np.linalg.norm(x))
    if res > ITER_TOL:
        raise ConvergenceFailure(float(res), ITER_MAXITER)
    return lam


def sigma_min(A, seed: int = 0) -> float:
    """Smallest singular value over the trial space: the best discrete ``C`` in ``||A phi|| >= C ||phi||``.

    Dense SVD/eigensolvers up to ``DENSE_LIMIT`` trial functions,
    shift-invert Lanczos (inverse iteration) beyond.
    """
    if not isinstance(A, DiscreteOperator):
        M = np.atleast_2d(np.asarray(A))
        if M.shape[0] != M.shape[1] or M.shape[1] <= DENSE_LIMIT:
            return float(sla.svdvals(M).min())
        A = DiscreteOperator(sps.csr_matrix(M), None)
    B = A.basis()
    if A.kind == "gram":
        K = (B.getH() @ A.matrix @ B) if (A.trial is not None or A.columns is not None) else A.matrix
        M = None if A.trial is None else B.getH() @ B
        return float(np.sqrt(max(_smallest_eig(K, M, seed), 0.0)))
    if A.trial_dim <= DENSE_LIMIT and A.shape[0] <= 4 * DENSE_LIMIT:
        AB = (A.matrix @ B).toarray()
        if A.trial is not None:
            AB = AB @ np.linalg.inv(np.linalg.cholesky(B.T.conj().toarray() @ B.toarray()).conj().T)
        return float(sla.svdvals(AB).min())
    AB = A.matrix @ B
    M = None if A.trial is None else (B.getH() @ B)
    return float(np.sqrt(max(_smallest_eig(AB.getH() @ AB, M, seed), 0.0)))


def poincare_constant(X0: FirstOrderOp, grid: Grid, bindings=None, tol: float = 1e-12) -> float:
    """Discrete constant ``c`` in ``||X_0 phi|| >= c ||phi||`` on the box."""
    _check(grid)
    norm2 = sum(conjugate(a) * a for a in X0.coeffs)
    vals = np.real(_sample(norm2, X0.variables, grid.nodes(), bindings))
    if vals.min() <= tol:
        i = int(np.argmin(vals))
        raise DegenerateField(f"X0 vanishes near {tuple(float(c) for c in grid.nodes()[i])}")
    return sigma_min(discretize(X0, grid, bindings))


def min_hermitian_eig(A: DiscreteOperator, seed: int = 0) -> float:
    """Smallest eigenvalue of ``(A + A^H) / 2`` over the trial space."""
    H = 0.5 * (A.matrix + A.matrix.getH())
    B = A.basis()
    if A.trial is None and A.columns is None:
        return _smallest_eig(H, None, seed, psd=False)
    return _smallest_eig(B.getH() @ H @ B, None if A.trial is None else B.getH() @ B, seed, psd=False)


def quadform_bound(P: OperatorSpec, delta1, grid: Grid, bindings=None, seed: int = 0) -> float:
    """Lower bound ``-C`` in ``(P' phi, phi) >= -C ||phi||^2`` over all interior grid functions.

    ``P'`` is the Weyl quantization of the real symbol from ``build_pprime``.
    """
    from .conditions import build_pprime

    merged = {**P.bindings, **(bindings or {})}
    return min_hermitian_eig(discretize(build_pprime(P, delta1), grid, merged), seed)


@dataclass(frozen=True)
class ShrinkSweep:
    """Estimates on nested boxes around the center, level 0 being the full grid."""

    boxes: list
    sigma_min: list
    poincare: list

    def to_dict(self) -> dict:
        return {
            "boxes": [[list(b) for b in box] for box in self.boxes],
            "sigma_min": list(self.sigma_min),
            "poincare": list(self.poincare),
        }


def shrink_sweep(P: OperatorSpec, grid: Grid, levels: int, seed: int = 0, trial: str = "resolved") -> ShrinkSweep:
    """``sigma_min(P*)`` and the Poincare constant of ``X_0`` on shrinking boxes.

    Every level reuses the level-0 matrices restricted to trial functions
    supported in the smaller box, so both sequences are nondecreasing
    exactly (minimization over nested subspaces).
    """
    A = discretize(P, grid, trial=trial)
    G = discretize(P.X0, grid, P.bindings)
    boxes, sig, poi = [], [], []
    for sub in grid.shrink_levels(P.region.center, levels):
        As, Gs = A.restrict(sub), G.restrict(sub)
        if As.trial_dim == 0 or Gs.trial_dim == 0:
            break
        boxes.append(sub.box)
        sig.append(sigma_min(As, seed))
        poi.append(sigma_min(Gs, seed))
    return ShrinkSweep(boxes, sig, poi)


__all__ = [
    "ConvergenceFailure",
    "DegenerateField",
    "DiscreteOperator",
    "GridTooCoarse",
    "ShrinkSweep",
    "discretize",
    "min_hermitian_eig",
    "poincare_constant",
    "prolongation",
    "quadform_bound",
    "shrink_sweep",
    "sigma_min",
    "sub_columns",
]
