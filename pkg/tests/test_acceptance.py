"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import json
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import sympy as sp
from numpy.polynomial.legendre import leggauss

sys.path.insert(0, str(Path(__file__).parent))

from conftest import X2, random_poly, random_symbol  # noqa: E402
from locsolv.cli import main  # noqa: E402
from locsolv.conditions import (  # noqa: E402
    Status,
    bracket_symbol,
    build_pprime,
    certify,
    check_h3,
    garding_boundary,
    h3_rhs,
)
from locsolv.corpus import bundled, load, manifest  # noqa: E402
from locsolv.estimator import discretize, poincare_constant, shrink_sweep, sigma_min  # noqa: E402
from locsolv.expr import ZeroStatus, variables, zero_test  # noqa: E402
from locsolv.forms import assemble, dominate_batch  # noqa: E402
from locsolv.grid import Grid  # noqa: E402
from locsolv.report import emit_report, run_check  # noqa: E402
from locsolv.specfile import parse_spec, render_spec  # noqa: E402
from locsolv.symbols import (  # noqa: E402
    FirstOrderOp,
    PolySymbol,
    formal_adjoint,
    poisson_bracket,
    quantize_apply,
    weyl_product,
    xi_symbols,
)

RESULTS: list[str] = []


def _record(n: int, title: str, failures: list[str], started: float):
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {n} {status} ({time.perf_counter() - started:.1f}s): {title}"
    if failures:
        line += " | " + "; ".join(failures)
    RESULTS.append(line)
    print(line)
    assert not failures, line


# -- 1 ----------------------------------------------------------------------


def test_criterion_1_corpus_goldens():
    t0 = time.perf_counter()
    failures = []
    for entry in manifest():
        if entry["kind"] != "example":
            continue
        grade = certify(load(entry["file"])).grade
        want = tuple(entry["expected_grade"])
        if entry["or_better"]:
            ok = grade is not None and grade[0] <= want[0]
        else:
            ok = grade == want
        if not ok:
            failures.append(f"{entry['file']} graded {grade}, expected {want}{' or better' if entry['or_better'] else ''}")
    _record(1, "corpus examples reach their documented grades", failures, t0)


# -- 2 ----------------------------------------------------------------------


def test_criterion_2_symbolic_goldens():
    t0 = time.perf_counter()
    failures = []
    d = sp.Symbol("delta1")
    xi1, xi2 = xi_symbols(2)
    for name, expr in [
        ("example4", xi1**2 + xi2**2 + (xi1 - xi2) ** 2 - d * xi1**2),
        ("example4_variant", 2 * xi1**2 + 2 * xi2**2 + (xi1 - xi2) ** 2 - d * xi1**2),
    ]:
        P = load(name)
        if build_pprime(P, d) != PolySymbol.from_expr(expr, P.variables):
            failures.append(f"p' of {name} is {build_pprime(P, d)}")
    b = garding_boundary(load("example4"))
    if b is None or abs(b - 1.5) > 1e-6:
        failures.append(f"Garding boundary {b}")
    _record(2, "p' goldens and Garding boundary 3/2", failures, t0)


# -- 3 ----------------------------------------------------------------------


def test_criterion_3_h3_constant():
    t0 = time.perf_counter()
    failures = []
    P = load("example4")
    grid = Grid(((-1, 1), (-1, 1)), 33)
    v = check_h3(P, grid=grid)
    if v.status is not Status.NUMERICALLY_SUPPORTED or abs(v.constant - 2 / 3) > 1e-9:
        failures.append(f"verdict {v.status.value} with C = {v.constant}")
    Q, _ = assemble(h3_rhs(P))
    pts = grid.nodes()
    lin = bracket_symbol(P).linear_coeffs()
    V = np.stack([np.broadcast_to(np.real(complex(c)) if c.is_number else 0.0, len(pts)) for c in lin], axis=-1)
    C, ok, _ = dominate_batch(V, Q.instantiate(pts, P.bindings))
    if not ok.all() or np.abs(C - 2 / 3).max() > 1e-9:
        failures.append(f"pointwise C deviates by {np.abs(C - 2 / 3).max():.2e}")
    _record(3, "Example 4 H3 constant 2/3 uniformly on 33^2", failures, t0)


# -- 4 ----------------------------------------------------------------------


def test_criterion_4_weyl_oracle():
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(20240)
    x1, x2 = X2
    for k in range(100):
        p, q = random_symbol(rng), random_symbol(rng)
        u = random_poly(rng, X2, 3, density=0.6) + x1**3 - 2 * x2
        lhs = quantize_apply(weyl_product(p, q), u)
        rhs = quantize_apply(p, quantize_apply(q, u))
        if sp.expand(lhs - rhs) != 0:
            failures.append(f"pair {k}: {p} , {q}")
    xi1, _ = xi_symbols(2)
    s_xi, s_x = PolySymbol.from_expr(xi1, X2), PolySymbol.from_expr(x1, X2)
    sandwich = weyl_product(weyl_product(s_xi, s_x), s_xi)
    if sandwich != PolySymbol.from_expr(x1 * xi1**2, X2):
        failures.append(f"xi1 # x1 # xi1 = {sandwich}")
    D1 = FirstOrderOp(X2, (1, 0))
    for m in range(1, 6):
        u = x1**m * (1 + x2)
        if sp.expand(quantize_apply(sandwich, u) - D1.apply(x1 * D1.apply(u))) != 0:
            failures.append(f"D1 x1 D1 on x1^{m}")
    _record(4, "Weyl product matches composition on 100 random pairs", failures, t0)


# -- 5 ----------------------------------------------------------------------

_NODES, _WEIGHTS = leggauss(24)


def _integrate(f):
    """Exact (to rounding) for polynomials of degree < 48 per axis on [-1, 1]^2."""
    X, Y = np.meshgrid(_NODES, _NODES, indexing="ij")
    W = np.outer(_WEIGHTS, _WEIGHTS)
    return np.sum(W * f(X, Y))


def test_criterion_5_adjoint_oracle():
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(5)
    x1, x2 = X2
    cut = (1 - x1**2) ** 3 * (1 - x2**2) ** 3
    for k in range(20):
        X = FirstOrderOp(X2, (random_poly(rng, X2, 2), random_poly(rng, X2, 2)), random_poly(rng, X2, 1))
        Xs = formal_adjoint(X)
        div = sum(sp.diff(a, v) for a, v in zip(X.coeffs, X2))
        if sp.expand(Xs.zeroth - (sp.conjugate(X.zeroth) - sp.I * div)) != 0:
            failures.append(f"field {k}: d != -i div(iX)")
        u = cut * (random_poly(rng, X2, 2) + 1 + sp.I * random_poly(rng, X2, 1))
        v = cut * (random_poly(rng, X2, 2) - 1)
        f1 = sp.lambdify(X2, X.apply(u) * sp.conjugate(v), "numpy")
        f2 = sp.lambdify(X2, u * sp.conjugate(Xs.apply(v)), "numpy")
        a, b = _integrate(f1), _integrate(f2)
        if abs(a - b) > 1e-8 * max(1.0, abs(a)):
            failures.append(f"field {k}: <Xu,v> = {a:.6g}, <u,X*v> = {b:.6g}")
    _record(5, "formal adjoint agrees with quadrature on 20 random fields", failures, t0)


# -- 6 ----------------------------------------------------------------------


def test_criterion_6_calibration():
    t0 = time.perf_counter()
    failures = []
    (x,) = variables("x1")
    iD1 = FirstOrderOp((x,), (sp.I,))
    s = {n: sigma_min(discretize(iD1, Grid(((0, 1),), n))) for n in (33, 65, 129)}
    if abs(s[129] - math.pi) > 0.1 * math.pi:
        failures.append(f"sigma_min at 129 = {s[129]:.6g}")
    err = [abs(s[n] - math.pi) for n in (33, 65, 129)]
    orders = [math.log2(err[i] / err[i + 1]) for i in range(2)]
    if min(orders) < 1.8:
        failures.append(f"observed orders {orders}")
    D1 = FirstOrderOp((x,), (1,))
    wide = poincare_constant(D1, Grid(((0, 1),), 129))
    narrow = poincare_constant(D1, Grid(((0, 0.5),), 129))
    if abs(narrow / wide - 2) > 0.2:
        failures.append(f"Poincare ratio {narrow / wide:.4g}")
    _record(6, f"iD1 calibration (orders {orders[0]:.2f}, {orders[1]:.2f}) and Poincare scaling", failures, t0)


# -- 7 ----------------------------------------------------------------------


def test_criterion_7_estimate_chain():
    t0 = time.perf_counter()
    failures = []
    P = load("example4")
    box = ((-0.5, 0.5), (-0.5, 0.5))
    s33 = sigma_min(discretize(P, Grid(box, 33)))
    s65 = sigma_min(discretize(P, Grid(box, 65)))
    if not (s33 > 0 and s65 > 0):
        failures.append(f"sigma_min {s33:.3g}, {s65:.3g}")
    elif abs(s65 - s33) >= 0.25 * s33:
        failures.append(f"sigma_min changes {s33:.4g} -> {s65:.4g}")
    sweep = shrink_sweep(P, Grid(box, 33), 3)
    for name, seq in (("sigma_min", sweep.sigma_min), ("poincare", sweep.poincare)):
        if any(b < a for a, b in zip(seq, seq[1:])):
            failures.append(f"{name} not monotone: {seq}")
    _record(7, f"Example 4 sigma_min(P*) {s33:.4g} (33^2) vs {s65:.4g} (65^2), monotone shrink", failures, t0)


# -- 8 ----------------------------------------------------------------------


def test_criterion_8_negative_controls(capsys):
    t0 = time.perf_counter()
    failures = []
    expectations = {
        "kannai_control.spec": ("H1-sign", "iX0 f1 = -1 < 0"),
        "h2_control.spec": ("H2", "[X0, X1] = (-I)*D2"),
    }
    for name, (key, diag) in expectations.items():
        code = main(["check", str(bundled(name)), "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        v = report["certificate"]["verdicts"][key]
        if code != 2:
            failures.append(f"{name} exit {code}")
        if v["status"] != "Violated" or not v["witness"] or diag not in v["diagnostics"]:
            failures.append(f"{name} {key}: {v['status']} {v['diagnostics']!r}")
        if report["certificate"]["grade"] is not None:
            failures.append(f"{name} graded {report['certificate']['grade']}")
    _record(8, "H1 and H2 controls fail with witnesses and exit code 2", failures, t0)


# -- 9 ----------------------------------------------------------------------


def test_criterion_9_property_suites():
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(9)
    pb = poisson_bracket
    for k in range(20):
        p, q, r = (random_symbol(rng) for _ in range(3))
        if pb(p, q) != -pb(q, p):
            failures.append(f"antisymmetry {k}")
        if k < 8 and not (pb(p, pb(q, r)) + pb(q, pb(r, p)) + pb(r, pb(p, q))).is_zero():
            failures.append(f"Jacobi {k}")
    x1, x2 = X2
    for k in range(100):
        e = random_poly(rng, X2, 3)
        res = zero_test(e, seed=k)
        if res.status is ZeroStatus.ZERO and e != 0:
            failures.append(f"zero_test claims {e} = 0")
        if res.status is ZeroStatus.NONZERO and e.subs({x1: res.witness.get("x1", 0), x2: res.witness.get("x2", 0)}) == 0:
            failures.append(f"bad witness for {e}")
        if e != 0 and res.status is not ZeroStatus.NONZERO:
            failures.append(f"missed nonzero {e}")
    for k, name in enumerate(("example3.spec", "example4.spec", "h3_control.spec")):
        a = emit_report(run_check(bundled(name), seed=k), "json")
        b = emit_report(run_check(bundled(name), seed=k), "json")
        if a != b:
            failures.append(f"report for {name} not byte-identical")
    for entry in manifest():
        P = load(entry["file"])
        text = render_spec(P)
        if parse_spec(text) != P or render_spec(parse_spec(text)) != text:
            failures.append(f"round trip {entry['file']}")
    _record(9, "bracket, zero-test, determinism and round-trip properties", failures, t0)


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
