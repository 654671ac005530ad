"""Hypothesis checks, the auxiliary symbol p', and the solvability grade.

For ``P = sum_j X_j^* f_j X_j + i X_0 + X_{N+1} + a_0`` the checks are

* H1: ``X_0`` never vanishes on the region and ``i X_0 f_j >= 0``;
* H2: ``[X_0, X_j] = 0`` for every pair;
* H3: ``{X_0, X_{N+1}}^2 <= C (sum_j (i X_0 f_j) X_j^2 + X_0^2)``.

Passing all three gives L^2 -> L^2 local solvability.  If in addition

    p' = sum_j ({X_0, f_j} X_j^2 + 2 f_j {X_0, X_j} X_j) + X_0^2 - delta1 {X_0, X_{N+1}}^2

is uniformly positive definite in xi for some ``delta1`` in (0, 1], the
Garding inequality upgrades this to H^-1 -> L^2.

Grid sweeps never produce ``Proven``; only exact symbolic arguments do.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import sympy as sp

from .expr import (
    UnboundOpaqueSymbol,
    ZeroStatus,
    opaque_names,
    structurally_nonneg,
    structurally_positive,
    vectorize,
    zero_test,
)
from .forms import NotPSD, assemble, dominate_batch, min_eigs
from .grid import Grid
from .symbols import PolySymbol, commutator, poisson_bracket, symbol_of

DELTA1_GRID = tuple(2.0**-k for k in range(21))
BISECTION_TOL = 1e-7
MODES = ("symbolic", "numeric", "auto")


class Status(str, enum.Enum):
    PROVEN = "Proven"
    NUMERICALLY_SUPPORTED = "NumericallySupported"
    VIOLATED = "Violated"
    UNKNOWN = "Unknown"

    @property
    def ok(self) -> bool:
        return self in (Status.PROVEN, Status.NUMERICALLY_SUPPORTED)


_SEVERITY = {Status.PROVEN: 0, Status.NUMERICALLY_SUPPORTED: 1, Status.UNKNOWN: 2, Status.VIOLATED: 3}


class NoAdmissibleDelta1(ArithmeticError):
    def __init__(self, delta1: float, min_eig: float, witness: dict):
        super().__init__(
            f"p' is not bounded below on the region for any delta1 >= {delta1:g} "
            f"(min eigenvalue {min_eig:.4g})"
        )
        self.delta1 = delta1
        self.min_eig = min_eig
        self.witness = witness


@dataclass(frozen=True)
class Settings:
    grid_points: int = 33
    mode: str = "auto"
    seed: int = 0
    psd_tol: float = 1e-9
    pinv_cutoff: float = 1e-10
    range_tol: float = 1e-8
    degeneracy_tol: float = 1e-12
    zero_trials: int = 8
    delta1: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.grid_points < 2:
            raise ValueError("grid needs at least 2 points per axis")
        if self.delta1 is not None and not 0 < self.delta1 <= 1:
            raise ValueError("delta1 must lie in (0, 1]")

    @classmethod
    def for_spec(cls, P, **overrides) -> Settings:
        """Defaults, then the spec file's options, then explicit overrides."""
        merged = {k: v for k, v in P.options.items() if k in cls.__dataclass_fields__}
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**merged)

    @property
    def symbolic(self) -> bool:
        return self.mode != "numeric"

    @property
    def numeric(self) -> bool:
        return self.mode != "symbolic"

    def grid_for(self, P) -> Grid:
        return Grid(P.region.float_box, self.grid_points)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Verdict:
    status: Status
    constant: float | None = None
    witness: dict | None = None
    diagnostics: str = ""
    grid: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        if self.status is Status.VIOLATED and self.witness is None:
            raise ValueError("a Violated verdict needs a witness")
        if self.status is Status.NUMERICALLY_SUPPORTED and self.grid is None:
            raise ValueError("a NumericallySupported verdict needs its grid")

    @property
    def ok(self) -> bool:
        return self.status.ok

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "constant": self.constant,
            "witness": self.witness,
            "diagnostics": self.diagnostics,
            "grid": self.grid,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Verdict:
        return cls(Status(d["status"]), d.get("constant"), d.get("witness"), d.get("diagnostics", ""), d.get("grid"))


@dataclass(frozen=True)
class GardingResult:
    holds: bool
    max_delta1: float | None = None
    c: float | None = None
    boundary: float | None = None
    diagnostics: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> GardingResult:
        return cls(**d)


NOT_IMPLEMENTED = {
    "melin": "not implemented (would grade (-1/2, 0))",
    "rothschild_stein": "not implemented (would grade (-1/r, 0))",
}


@dataclass(frozen=True)
class Certificate:
    h1_nondegenerate: Verdict
    h1_sign: Verdict
    h2: Verdict
    h3: Verdict
    fp: Verdict
    delta1: float | None
    fp_bound: float | None
    garding: GardingResult
    grade: tuple | None
    other_classifiers: dict = field(default_factory=lambda: dict(NOT_IMPLEMENTED))

    @property
    def verdicts(self) -> dict[str, Verdict]:
        return {"H1-nondegenerate": self.h1_nondegenerate, "H1-sign": self.h1_sign, "H2": self.h2, "H3": self.h3}

    def failing(self) -> list[str]:
        return [k for k, v in self.verdicts.items() if not v.ok]

    def to_dict(self) -> dict:
        return {
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "fp": self.fp.to_dict(),
            "delta1": self.delta1,
            "fp_bound": self.fp_bound,
            "garding": self.garding.to_dict(),
            "grade": list(self.grade) if self.grade is not None else None,
            "other_classifiers": dict(self.other_classifiers),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Certificate:
        v = {k: Verdict.from_dict(x) for k, x in d["verdicts"].items()}
        return cls(
            v["H1-nondegenerate"],
            v["H1-sign"],
            v["H2"],
            v["H3"],
            Verdict.from_dict(d["fp"]),
            d["delta1"],
            d["fp_bound"],
            GardingResult.from_dict(d["garding"]),
            tuple(d["grade"]) if d["grade"] is not None else None,
            dict(d["other_classifiers"]),
        )


# -- helpers -----------------------------------------------------------------


def _grid_info(grid: Grid) -> dict:
    return {"box": [list(b) for b in grid.box], "points": list(grid.points)}


def _point(P, x) -> dict:
    return {v.name: float(c) for v, c in zip(P.variables, x)}


def _center(P) -> dict:
    return _point(P, P.region.center)


def _combine(parts: list[Verdict]) -> Verdict:
    worst = max(parts, key=lambda v: _SEVERITY[v.status])
    diag = "; ".join(v.diagnostics for v in parts if v.diagnostics)
    if worst.status is Status.NUMERICALLY_SUPPORTED:
        consts = [v.constant for v in parts if v.constant is not None]
        return replace(worst, diagnostics=diag, constant=min(consts) if consts else None)
    return replace(worst, diagnostics=diag)


def _settings(P, settings):
    return settings if settings is not None else Settings.for_spec(P)


def _grid(P, settings, grid):
    return grid if grid is not None else settings.grid_for(P)


def _sample(expr, P, grid, settings):
    """Values on the grid, or None when an opaque binding is missing in auto mode."""
    try:
        return vectorize(expr, P.variables, P.bindings)(grid.nodes())
    except UnboundOpaqueSymbol:
        if settings.mode == "numeric":
            raise
        return None


def _unbound(expr, P) -> str:
    missing = sorted(opaque_names(expr) - set(P.bindings))
    return f"no binding for {', '.join(missing)}"


# -- H1 ----------------------------------------------------------------------


def check_h1(P, settings: Settings | None = None, grid: Grid | None = None) -> tuple[Verdict, Verdict]:
    """Nondegeneracy of ``X_0`` and the sign of ``i X_0 f_j``."""
    settings = _settings(P, settings)
    grid = _grid(P, settings, grid)
    return _h1_nondegenerate(P, settings, grid), _h1_sign(P, settings, grid)


def _h1_nondegenerate(P, settings, grid) -> Verdict:
    coeffs = P.X0.coeffs
    if all(c == 0 for c in coeffs):
        return Verdict(Status.VIOLATED, witness=_center(P), diagnostics="X0 is identically zero")
    if settings.symbolic:
        for k, c in enumerate(coeffs):
            if structurally_positive(c) or structurally_positive(-c):
                return Verdict(Status.PROVEN, diagnostics=f"coefficient of D{k + 1} ({c}) never vanishes")
    if not settings.numeric:
        return Verdict(Status.UNKNOWN, diagnostics="nonvanishing of X0 needs a grid check")
    norm2 = sp.Add(*[c**2 for c in coeffs])
    vals = _sample(norm2, P, grid, settings)
    if vals is None:
        return Verdict(Status.UNKNOWN, diagnostics=_unbound(norm2, P))
    i = int(np.argmin(vals))
    pts = grid.nodes()
    if vals[i] <= settings.degeneracy_tol:
        return Verdict(
            Status.VIOLATED,
            constant=float(vals[i]),
            witness=_point(P, pts[i]),
            diagnostics="X0 vanishes on the region",
            grid=_grid_info(grid),
        )
    return Verdict(
        Status.NUMERICALLY_SUPPORTED,
        constant=float(vals[i]),
        diagnostics=f"min |X0|^2 = {vals[i]:.4g} on grid",
        grid=_grid_info(grid),
    )


def _h1_sign(P, settings, grid) -> Verdict:
    parts = []
    for j, (_, f) in enumerate(P.pairs, start=1):
        w = P.X0.derivation(f)
        label = f"iX0 f{j} = {w}"
        if settings.symbolic and w.is_Number and w < 0:
            parts.append(Verdict(Status.VIOLATED, constant=float(w), witness=_center(P), diagnostics=f"{label} < 0"))
            continue
        if settings.symbolic and (w == 0 or structurally_nonneg(w)):
            parts.append(Verdict(Status.PROVEN, diagnostics=f"{label} >= 0 structurally"))
            continue
        if not settings.numeric:
            parts.append(Verdict(Status.UNKNOWN, diagnostics=f"{label}: sign needs a grid check"))
            continue
        vals = _sample(w, P, grid, settings)
        if vals is None:
            parts.append(Verdict(Status.UNKNOWN, diagnostics=f"{label}: {_unbound(w, P)}"))
            continue
        i = int(np.argmin(vals))
        if vals[i] < -settings.psd_tol:
            parts.append(
                Verdict(
                    Status.VIOLATED,
                    constant=float(vals[i]),
                    witness=_point(P, grid.nodes()[i]),
                    diagnostics=f"{label} = {vals[i]:.4g} < 0",
                    grid=_grid_info(grid),
                )
            )
        else:
            parts.append(
                Verdict(
                    Status.NUMERICALLY_SUPPORTED,
                    constant=float(vals[i]),
                    diagnostics=f"{label}: min {vals[i]:.4g} on grid",
                    grid=_grid_info(grid),
                )
            )
    if not parts:
        return Verdict(Status.PROVEN, diagnostics="no (X_j, f_j) pairs")
    return _combine(parts)


# -- H2 ----------------------------------------------------------------------


def check_h2(P, settings: Settings | None = None, grid: Grid | None = None) -> Verdict:
    """``[X_0, X_j] = 0`` for every pair, decided exactly where possible."""
    settings = _settings(P, settings)
    grid = _grid(P, settings, grid)
    parts = []
    for j, (X, _) in enumerate(P.pairs, start=1):
        C = commutator(P.X0, X)
        label = f"[X0, X{j}] = {C}"
        pieces = list(C.coeffs) + [C.zeroth]
        results = [zero_test(c, seed=settings.seed, trials=settings.zero_trials) for c in pieces]
        if all(r.status is ZeroStatus.ZERO for r in results):
            parts.append(Verdict(Status.PROVEN, diagnostics=f"[X0, X{j}] = 0"))
            continue
        bad = next((k for k, r in enumerate(results) if r.status is ZeroStatus.NONZERO), None)
        if bad is not None:
            parts.append(Verdict(Status.VIOLATED, witness=_h2_witness(P, pieces[bad], results[bad], grid), diagnostics=label))
            continue
        # opaque coefficients block the exact test
        if not settings.numeric:
            parts.append(Verdict(Status.UNKNOWN, diagnostics=f"{label}: opaque symbols block the zero test"))
            continue
        unknown = [c for c, r in zip(pieces, results) if r.status is not ZeroStatus.ZERO]
        try:
            vals = [np.abs(vectorize(c, P.variables, P.bindings)(grid.nodes())) for c in unknown]
        except UnboundOpaqueSymbol:
            if settings.mode == "numeric":
                raise
            parts.append(Verdict(Status.UNKNOWN, diagnostics=f"{label}: opaque symbols block the zero test"))
            continue
        peak = np.max(vals, axis=0)
        i = int(np.argmax(peak))
        if peak[i] > settings.psd_tol:
            parts.append(
                Verdict(
                    Status.VIOLATED,
                    constant=float(peak[i]),
                    witness=_point(P, grid.nodes()[i]),
                    diagnostics=label,
                    grid=_grid_info(grid),
                )
            )
        else:
            parts.append(
                Verdict(
                    Status.NUMERICALLY_SUPPORTED,
                    constant=float(peak[i]),
                    diagnostics=f"{label} vanishes on grid",
                    grid=_grid_info(grid),
                )
            )
    if not parts:
        return Verdict(Status.PROVEN, diagnostics="no (X_j, f_j) pairs")
    return _combine(parts)


def _h2_witness(P, piece, result, grid) -> dict:
    """A point of the region where the commutator coefficient is nonzero."""
    try:
        vals = np.abs(vectorize(piece, P.variables, P.bindings)(grid.nodes()))
        i = int(np.argmax(vals))
        if vals[i] > 0:
            return _point(P, grid.nodes()[i])
    except UnboundOpaqueSymbol:
        pass
    pt = _center(P)
    pt.update({k: float(v) for k, v in (result.witness or {}).items()})
    return pt


# -- H3 ----------------------------------------------------------------------


def bracket_symbol(P) -> PolySymbol:
    """``q = {X_0, X_{N+1}}``."""
    return poisson_bracket(symbol_of(P.X0), symbol_of(P.XN1))


def h3_rhs(P) -> PolySymbol:
    """``sum_j (i X_0 f_j) X_j^2 + X_0^2``."""
    p0 = symbol_of(P.X0)
    out = p0 * p0
    for X, f in P.pairs:
        pj = symbol_of(X)
        out = out + pj * pj * P.X0.derivation(f)
    return out


def check_h3(P, settings: Settings | None = None, grid: Grid | None = None, h1_sign: Verdict | None = None) -> Verdict:
    """Domination of ``{X_0, X_{N+1}}^2`` by the H1 weights, on region x unit sphere."""
    settings = _settings(P, settings)
    grid = _grid(P, settings, grid)
    q = bracket_symbol(P)
    if q.is_zero():
        return Verdict(Status.PROVEN, constant=0.0, diagnostics="{X0, XN1} = 0")
    if h1_sign is not None and h1_sign.status is Status.VIOLATED:
        return Verdict(Status.UNKNOWN, diagnostics="skipped: H1 sign condition fails, right side is not PSD")
    if not settings.numeric:
        return Verdict(Status.UNKNOWN, diagnostics=f"{{X0, XN1}} = {q}: domination needs a grid check")
    M_form, _ = assemble(h3_rhs(P), "H3 right side")
    pts = grid.nodes()
    try:
        Ms = M_form.instantiate(pts, P.bindings)
        V = np.stack([np.real(vectorize(c, P.variables, P.bindings)(pts)) for c in q.linear_coeffs()], axis=-1)
    except UnboundOpaqueSymbol as exc:
        if settings.mode == "numeric":
            raise
        return Verdict(Status.UNKNOWN, diagnostics=f"H3: no binding for {exc.name}")
    C, ok, direction = dominate_batch(V, Ms, settings.pinv_cutoff, settings.range_tol, settings.psd_tol)
    if not ok.all():
        i = int(np.argmin(ok))
        witness = _point(P, pts[i])
        witness["xi"] = [float(d) for d in direction[i]]
        return Verdict(
            Status.VIOLATED,
            witness=witness,
            diagnostics=f"{{X0, XN1}} = {q} is not dominated: xi direction outside the range of the right side",
            grid=_grid_info(grid),
        )
    i = int(np.argmax(C))
    return Verdict(
        Status.NUMERICALLY_SUPPORTED,
        constant=float(C[i]),
        witness=_point(P, pts[i]),
        diagnostics=f"{{X0, XN1}} = {q}; sup C = {C[i]:.6g}",
        grid=_grid_info(grid),
    )


# -- p' ----------------------------------------------------------------------


def _exact(delta):
    if isinstance(delta, float):
        return sp.Rational(repr(delta))
    return sp.sympify(delta)


def pprime_parts(P) -> tuple[PolySymbol, PolySymbol]:
    """``(base, q)`` with ``p' = base - delta1 * q^2``."""
    p0 = symbol_of(P.X0)
    base = p0 * p0
    for X, f in P.pairs:
        pj = symbol_of(X)
        fs = PolySymbol.constant(P.variables, f)
        base = base + poisson_bracket(p0, fs) * pj * pj + fs * poisson_bracket(p0, pj) * pj * 2
    return base, bracket_symbol(P)


def build_pprime(P, delta1) -> PolySymbol:
    """The real symbol of ``P'``; ``delta1`` may be a number or a sympy symbol."""
    d = _exact(delta1)
    if d.is_number and not 0 < d <= 1:
        raise ValueError("delta1 must lie in (0, 1]")
    base, q = pprime_parts(P)
    return base - q * q * d


class _PPrimeSweep:
    """Form matrices of ``p'`` on a grid as ``B(x) - delta1 v(x) v(x)^T``."""

    def __init__(self, P, grid: Grid, settings: Settings):
        base, q = pprime_parts(P)
        form, residue = assemble(base, "p' at delta1 = 0")
        if not residue.is_zero():
            raise ValueError(f"p' has lower-order part {residue}")
        self.pts = grid.nodes()
        self.B = form.instantiate(self.pts, P.bindings)
        if q.is_zero():
            self.V = np.zeros(self.pts.shape)
        else:
            self.V = np.stack([np.real(vectorize(c, P.variables, P.bindings)(self.pts)) for c in q.linear_coeffs()], axis=-1)
        self.trivial_q = not np.any(self.V)

    def matrices(self, delta: float) -> np.ndarray:
        return self.B - delta * np.einsum("mi,mj->mij", self.V, self.V)

    def min_eig(self, delta: float) -> tuple[float, int]:
        lam = min_eigs(self.matrices(delta))
        i = int(np.argmin(lam))
        return float(lam[i]), i

    def direction(self, delta: float, i: int) -> list[float]:
        w, U = np.linalg.eigh(self.matrices(delta)[i])
        return [float(c) for c in U[:, 0]]


def fp_lower_bound(P, settings: Settings | None = None, grid: Grid | None = None, sweep=None):
    """Largest ``delta1`` on the dyadic grid for which ``p'`` is bounded below.

    A quadratic form in xi is bounded below iff it is positive semidefinite,
    in which case the bound is 0.  Returns ``(delta1, c, verdict)`` with
    ``p' >= -c``.
    """
    settings = _settings(P, settings)
    grid = _grid(P, settings, grid)
    candidates = (settings.delta1,) if settings.delta1 is not None else DELTA1_GRID
    base, q = pprime_parts(P)
    if settings.symbolic and q.is_zero() and structurally_nonneg(base.to_expr()):
        return candidates[0], 0.0, Verdict(Status.PROVEN, constant=0.0, diagnostics=f"p' = {base} >= 0 structurally")
    if not settings.numeric:
        return None, None, Verdict(Status.UNKNOWN, diagnostics="lower bound for p' needs a grid check")
    try:
        sweep = sweep or _PPrimeSweep(P, grid, settings)
    except UnboundOpaqueSymbol as exc:
        if settings.mode == "numeric":
            raise
        return None, None, Verdict(Status.UNKNOWN, diagnostics=f"p': no binding for {exc.name}")
    for d in candidates:
        lam, i = sweep.min_eig(d)
        if lam >= -settings.psd_tol:
            return d, 0.0, Verdict(
                Status.NUMERICALLY_SUPPORTED,
                constant=lam,
                witness=_point(P, sweep.pts[i]),
                diagnostics=f"p' >= {lam:.4g} |xi|^2 on grid at delta1 = {d:g}",
                grid=_grid_info(grid),
            )
    witness = _point(P, sweep.pts[i])
    witness["xi"] = sweep.direction(d, i)
    raise NoAdmissibleDelta1(d, lam, witness)


def garding_boundary(P, settings: Settings | None = None, grid: Grid | None = None, sweep=None) -> float | None:
    """Supremum of the ``delta1 > 0`` making ``p'`` uniformly positive definite.

    Not restricted to (0, 1].  ``None`` if no positive ``delta1`` works,
    ``inf`` if the bracket term vanishes identically.
    """
    settings = _settings(P, settings)
    grid = _grid(P, settings, grid)
    sweep = sweep or _PPrimeSweep(P, grid, settings)
    tol = settings.psd_tol
    lo = DELTA1_GRID[-1]
    if sweep.min_eig(lo)[0] <= tol:
        return None
    if sweep.trivial_q:
        return math.inf
    hi = 1.0
    while sweep.min_eig(hi)[0] > tol:
        lo, hi = hi, 2 * hi
        if hi > 2.0**40:
            return math.inf
    return _bisect(sweep, lo, hi, tol)


def _bisect(sweep, lo, hi, tol) -> float:
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if sweep.min_eig(mid)[0] > tol:
            lo = mid
        else:
            hi = mid
    return lo


def garding_classify(P, settings: Settings | None = None, grid: Grid | None = None, sweep=None) -> GardingResult:
    """Uniform positive definiteness of ``p'`` for some ``delta1`` in (0, 1]."""
    settings = _settings(P, settings)
    grid = _grid(P, settings, grid)
    if not settings.numeric:
        return GardingResult(False, diagnostics="needs a grid check")
    try:
        sweep = sweep or _PPrimeSweep(P, grid, settings)
    except UnboundOpaqueSymbol as exc:
        if settings.mode == "numeric":
            raise
        return GardingResult(False, diagnostics=f"no binding for {exc.name}")
    tol = settings.psd_tol
    lo = DELTA1_GRID[-1]
    lam, i = sweep.min_eig(lo)
    if lam <= tol:
        where = _point(P, sweep.pts[i])
        return GardingResult(False, diagnostics=f"form degenerate at {where} (min eigenvalue {lam:.3g})")
    boundary = garding_boundary(P, settings, grid, sweep)
    lam1, _ = sweep.min_eig(1.0)
    if lam1 > tol:
        best = 1.0
    else:
        best = _bisect(sweep, lo, 1.0, tol)
    c, _ = sweep.min_eig(best)
    return GardingResult(True, best, c, boundary, diagnostics=f"min eigenvalue {c:.6g} at delta1 = {best:.6g}")


# -- certificate -------------------------------------------------------------


def certify(P, settings: Settings | None = None) -> Certificate:
    settings = _settings(P, settings)
    grid = settings.grid_for(P)
    h1n, h1s = check_h1(P, settings, grid)
    h2 = check_h2(P, settings, grid)
    try:
        h3 = check_h3(P, settings, grid, h1_sign=h1s)
    except NotPSD as exc:
        h3 = Verdict(Status.UNKNOWN, diagnostics=f"H3 right side indefinite: {exc}")

    sweep = None
    if settings.numeric:
        try:
            sweep = _PPrimeSweep(P, grid, settings)
        except UnboundOpaqueSymbol:
            if settings.mode == "numeric":
                raise
    try:
        delta1, c, fp = fp_lower_bound(P, settings, grid, sweep)
    except NoAdmissibleDelta1 as exc:
        delta1, c = None, None
        fp = Verdict(Status.VIOLATED, constant=exc.min_eig, witness=exc.witness, diagnostics=str(exc), grid=_grid_info(grid))
    garding = garding_classify(P, settings, grid, sweep) if sweep is not None else GardingResult(False, diagnostics="needs a grid check")

    ok = all(v.ok for v in (h1n, h1s, h2, h3)) and fp.ok
    if ok and garding.holds:
        grade = (-1, 0)
    elif ok:
        grade = (0, 0)
    else:
        grade = None
    return Certificate(h1n, h1s, h2, h3, fp, delta1, 0.0 - c if c is not None else None, garding, grade)


__all__ = [
    "Certificate",
    "GardingResult",
    "NoAdmissibleDelta1",
    "Settings",
    "Status",
    "Verdict",
    "bracket_symbol",
    "build_pprime",
    "certify",
    "check_h1",
    "check_h2",
    "check_h3",
    "fp_lower_bound",
    "garding_boundary",
    "garding_classify",
    "h3_rhs",
    "pprime_parts",
]
