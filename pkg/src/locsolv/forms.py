"""Quadratic forms in xi parameterized by x.

A real symbol that is homogeneous of degree 2 in xi is ``xi^T Q(x) xi`` for a
symmetric matrix ``Q(x)``.  Everything the condition checks need from such
forms is here: assembly from a symbol, batched instantiation on a grid,
smallest eigenvalues, and the rank-one domination test
``(v . xi)^2 <= C xi^T M xi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .expr import split, vectorize
from .grid import Grid
from .symbols import PolySymbol

PSD_TOL = 1e-9
PINV_CUTOFF = 1e-10
RANGE_TOL = 1e-8


class DegreeViolation(ValueError):
    pass


class NotPSD(ValueError):
    def __init__(self, min_eig: float, where=None):
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
        self.min_eig = min_eig
        self.where = where


@dataclass(frozen=True)
class FormMatrix:
    """Symmetric matrix of coefficient expressions, ``xi^T Q xi``."""

    entries: sp.ImmutableMatrix
    variables: tuple
    source: str = ""

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: FormMatrix) -> FormMatrix:
        return FormMatrix(sp.ImmutableMatrix((self.entries + other.entries).applyfunc(sp.expand)), self.variables)

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        diff = (self.entries - other.entries).applyfunc(sp.expand)
        return self.variables == other.variables and diff.is_zero_matrix

    __hash__ = None

    def instantiate(self, points: np.ndarray, bindings=None) -> np.ndarray:
        """Numeric matrices at each of the ``(M, n_vars)`` points: ``(M, n, n)``."""
        points = np.asarray(points, dtype=float)
        out = np.empty((points.shape[0], self.n, self.n))
        cache = {}
        for j in range(self.n):
            for k in range(j, self.n):
                e = self.entries[j, k]
                if e not in cache:
                    cache[e] = np.real(vectorize(e, self.variables, bindings)(points))
                out[:, j, k] = out[:, k, j] = cache[e]
        return out


def assemble(s: PolySymbol, source: str = "") -> tuple[FormMatrix, PolySymbol]:
    """Split ``s`` into its quadratic form and the lower-degree residue."""
    if s.degree > 2:
        raise DegreeViolation(f"symbol has xi-degree {s.degree}; forms need degree <= 2")
    n = s.n
    Q = sp.zeros(n, n)
    for alpha, c in s.terms.items():
        if sum(alpha) != 2:
            continue
        re, im = split(c)
        if im != 0:
            raise DegreeViolation(f"quadratic coefficient {c} is not real")
        idx = [k for k, a in enumerate(alpha) for _ in range(a)]
        j, k = idx
        if j == k:
            Q[j, j] += re
        else:
            Q[j, k] += re / 2
            Q[k, j] += re / 2
    residue = PolySymbol(s.variables, {a: c for a, c in s.terms.items() if sum(a) < 2})
    return FormMatrix(sp.ImmutableMatrix(Q.applyfunc(sp.expand)), s.variables, source), residue


def min_eig_2x2(M: np.ndarray) -> np.ndarray:
    a, b, d = M[..., 0, 0], M[..., 0, 1], M[..., 1, 1]
    return 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + b * b)


def min_eigs(Ms: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each symmetric matrix in a stack."""
    n = Ms.shape[-1]
    if n == 1:
        return Ms[..., 0, 0].copy()
    if n == 2:
        return min_eig_2x2(Ms)
    return np.linalg.eigvalsh(Ms)[..., 0]


def min_eig_sweep(Q: FormMatrix, grid: Grid | np.ndarray, bindings=None) -> tuple[float, tuple]:
    """Minimum over the grid of the smallest eigenvalue of ``Q(x)``.

    Ties go to the first node in lexicographic index order.
    """
    pts = grid.nodes() if isinstance(grid, Grid) else np.asarray(grid, dtype=float)
    lam = min_eigs(Q.instantiate(pts, bindings))
    i = int(np.argmin(lam))
    return float(lam[i]), tuple(float(c) for c in pts[i])


@dataclass(frozen=True)
class Domination:
    """Outcome of the rank-one domination test at one point."""

    C: float | None
    direction: np.ndarray | None = None

    @property
    def holds(self) -> bool:
        return self.C is not None


def dominate_batch(V: np.ndarray, Ms: np.ndarray, cutoff=PINV_CUTOFF, range_tol=RANGE_TOL, psd_tol=PSD_TOL):
    """Vectorized domination over a stack of points.

    Returns ``(C, ok, direction)``: ``C[i] = v^T M^+ v`` where ``v`` lies in
    the range of ``M``; otherwise ``ok[i]`` is False and ``direction[i]`` is
    a unit vector in the null space of ``M`` with ``v . direction != 0``.
    """
    V = np.asarray(V, dtype=float)
    Ms = np.asarray(Ms, dtype=float)
    w, U = np.linalg.eigh(Ms)
    scale = np.maximum(np.abs(w).max(axis=-1), 0.0)
    if np.any(w[..., 0] < -psd_tol * np.maximum(scale, 1.0)):
        i = int(np.argmin(w[..., 0]))
        raise NotPSD(float(w[i, 0]), where=i)
    coef = np.einsum("mji,mj->mi", U, V)  # components of v in the eigenbasis
    live = w > cutoff * scale[:, None]
    C = np.where(live, coef**2 / np.where(live, w, 1.0), 0.0).sum(axis=-1)
    resid = np.where(live, 0.0, coef)
    res_norm = np.linalg.norm(resid, axis=-1)
    ok = res_norm <= range_tol * np.maximum(1.0, np.linalg.norm(V, axis=-1))
    direction = np.einsum("mij,mj->mi", U, resid)
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = direction / res_norm[:, None]
    direction[ok] = 0.0
    return C, ok, direction


def dominate(v, M, cutoff=PINV_CUTOFF, range_tol=RANGE_TOL, psd_tol=PSD_TOL) -> Domination:
    """Minimal ``C`` with ``(v . xi)^2 <= C xi^T M xi`` for all ``xi``."""
    v = np.asarray(v, dtype=float)
    M = np.asarray(M, dtype=float)
    C, ok, d = dominate_batch(v[None], M[None], cutoff, range_tol, psd_tol)
    if ok[0]:
        return Domination(float(C[0]))
    return Domination(None, d[0])
