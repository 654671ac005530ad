"""The operator ``P = sum_j X_j^* f_j X_j + i X_0 + X_{N+1} + a_0``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import sympy as sp

from .expr import canonicalize, conjugate, is_real
from .symbols import FirstOrderOp, formal_adjoint


@dataclass(frozen=True)
class Region:
    """Axis-aligned box ``prod [lo_k, hi_k]`` with a distinguished point."""

    box: tuple
    center: tuple

    def __post_init__(self):
        box = tuple((sp.nsimplify(lo), sp.nsimplify(hi)) for lo, hi in self.box)
        center = tuple(sp.nsimplify(c) for c in self.center)
        for (lo, hi), c in zip(box, center):
            if not lo < hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            if not lo <= c <= hi:
                raise ValueError(f"center coordinate {c} outside [{lo}, {hi}]")
        if len(box) != len(center):
            raise ValueError("center and box dimensions differ")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "center", center)

    @classmethod
    def cube(cls, n: int, lo=-1, hi=1) -> Region:
        return cls(((lo, hi),) * n, ((sp.nsimplify(lo) + sp.nsimplify(hi)) / 2,) * n)

    @property
    def float_box(self) -> tuple[tuple[float, float], ...]:
        return tuple((float(lo), float(hi)) for lo, hi in self.box)


@dataclass(frozen=True)
class OperatorSpec:
    variables: tuple
    pairs: tuple  # ((X_j, f_j), ...)
    X0: FirstOrderOp
    XN1: FirstOrderOp
    a0: sp.Expr
    region: Region
    opaques: Mapping[str, tuple] = field(default_factory=dict)  # name -> dependency names
    bindings: Mapping[str, sp.Expr] = field(default_factory=dict)
    name: str = "operator"
    options: Mapping[str, object] = field(default_factory=dict)  # grid / tolerance overrides

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "pairs", tuple((X, canonicalize(f)) for X, f in self.pairs))
        object.__setattr__(self, "a0", canonicalize(self.a0))
        object.__setattr__(self, "opaques", dict(self.opaques))
        object.__setattr__(self, "bindings", {k: canonicalize(v) for k, v in self.bindings.items()})
        object.__setattr__(self, "options", dict(self.options))

    def __hash__(self):
        return hash((self.name, self.variables, self.pairs, self.X0, self.XN1, self.a0))

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def N(self) -> int:
        return len(self.pairs)

    def problems(self) -> list[str]:
        """Violations of the standing assumptions (real fields and weights)."""
        out = []
        named = [("X0", self.X0), ("XN1", self.XN1)] + [(f"pair {j + 1} X", X) for j, (X, _) in enumerate(self.pairs)]
        for label, X in named:
            if X.n != self.n:
                out.append(f"{label}: {X.n} coefficients, expected {self.n}")
            elif not all(is_real(c) for c in X.coeffs):
                out.append(f"{label}: field coefficients must be real")
            elif X.zeroth != 0:
                out.append(f"{label}: fields must be homogeneous (no zeroth-order part)")
        for j, (_, f) in enumerate(self.pairs):
            if not is_real(f):
                out.append(f"pair {j + 1} f: weight must be real")
        if len(self.region.box) != self.n:
            out.append(f"region: {len(self.region.box)} intervals, expected {self.n}")
        return out

    def adjoint_parts(self):
        """First-order and zeroth-order parts of ``P^*``.

        Returns ``(first, zeroth)`` with ``P^* = sum_j X_j^* f_j X_j + first + zeroth``;
        here ``(iX_0)^* = -i X_0^*``.
        """
        ix0_star = formal_adjoint(self.X0.scale(sp.I))
        xn1_star = formal_adjoint(self.XN1)
        first = FirstOrderOp(self.variables, tuple(a + b for a, b in zip(ix0_star.coeffs, xn1_star.coeffs)))
        zeroth = canonicalize(ix0_star.zeroth + xn1_star.zeroth + conjugate(self.a0))
        return first, zeroth
