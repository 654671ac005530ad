"""Reports: certificate plus optional grid estimates, serialized deterministically."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .conditions import Certificate, Settings, Status, certify
from .estimator import DegenerateField, poincare_constant, quadform_bound, shrink_sweep, sigma_min, discretize
from .specfile import parse_spec

SCHEMA_VERSION = 1
CAVEAT = "discrete evidence: grid constants approximate, never certify, continuum constants"

EXIT_CERTIFIED = 0
EXIT_VIOLATED = 2
EXIT_UNKNOWN = 3
EXIT_INPUT = 4
EXIT_NUMERIC = 5
EXIT_VALIDATION = 6


def _encode(x):
    """JSON-safe floats: infinities become strings."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    return x


def _decode(x):
    if x in ("inf", "-inf"):
        return float(x)
    if isinstance(x, dict):
        return {k: _decode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decode(v) for v in x]
    return x


@dataclass(frozen=True)
class Report:
    spec_name: str
    spec_sha256: str
    parameters: dict
    certificate: Certificate
    estimates: dict | None = None
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    @property
    def grade(self):
        return self.certificate.grade

    @property
    def exit_code(self) -> int:
        c = self.certificate
        if c.grade is not None:
            return EXIT_CERTIFIED
        if any(v.status is Status.VIOLATED for v in (*c.verdicts.values(), c.fp)):
            return EXIT_VIOLATED
        return EXIT_UNKNOWN

    def to_dict(self) -> dict:
        return _encode(
            {
                "schema_version": self.schema_version,
                "tool_version": self.tool_version,
                "spec": {"name": self.spec_name, "sha256": self.spec_sha256},
                "parameters": dict(self.parameters),
                "certificate": self.certificate.to_dict(),
                "estimates": self.estimates,
                "exit_code": self.exit_code,
                **({"extra": self.extra} if self.extra else {}),
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        d = _decode(d)
        if d["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d['schema_version']}")
        return cls(
            spec_name=d["spec"]["name"],
            spec_sha256=d["spec"]["sha256"],
            parameters=d["parameters"],
            certificate=Certificate.from_dict(d["certificate"]),
            estimates=d["estimates"],
            tool_version=d["tool_version"],
            schema_version=d["schema_version"],
            extra=d.get("extra", {}),
        )


def _fmt(x, spec=".6g") -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return format(x, spec)
    return str(x)


def _witness(w) -> str:
    if not w:
        return ""
    parts = []
    for k, v in w.items():
        if isinstance(v, list):
            parts.append(f"{k}=({', '.join(format(c, '.4g') for c in v)})")
        else:
            parts.append(f"{k}={v:.4g}")
    return " at " + ", ".join(parts)


def _text(r: Report) -> str:
    c = r.certificate
    lines = [
        f"locsolv {r.tool_version}: {r.spec_name} (sha256 {r.spec_sha256[:16]})",
        f"grade: {tuple(c.grade) if c.grade is not None else 'None'}",
    ]
    for name, v in c.verdicts.items():
        line = f"  {name:<17} {v.status.value}"
        if v.constant is not None:
            line += f"  constant {v.constant:.6g}"
        if v.status is Status.VIOLATED:
            line += _witness(v.witness)
        lines.append(line)
        if v.diagnostics:
            lines.append(f"      {v.diagnostics}")
    h3 = c.h3
    if h3.constant is not None:
        lines.append(f"H3.C = {h3.constant:.4f} ± 5e-05")
    lines.append(f"  {'FP':<17} {c.fp.status.value}  delta1 {_fmt(c.delta1)}  bound {_fmt(c.fp_bound)}")
    if c.fp.status is Status.VIOLATED:
        lines.append(f"      {c.fp.diagnostics}{_witness(c.fp.witness)}")
    g = c.garding
    if g.holds:
        lines.append(
            f"  {'Garding':<17} holds  max delta1 {_fmt(g.max_delta1)}  c {_fmt(g.c)}  boundary {_fmt(g.boundary)}"
        )
    else:
        lines.append(f"  {'Garding':<17} fails  {g.diagnostics}")
    for k, v in c.other_classifiers.items():
        lines.append(f"  {k:<17} {v}")
    if r.estimates:
        e = r.estimates
        lines.append(f"estimates ({e['caveat']})")
        lines.append(f"  grid {e['grid']}  sigma_min(P*) {_fmt(e['sigma_min'])}")
        lines.append(f"  poincare(X0) {_fmt(e['poincare'])}")
        lines.append(f"  quadform bound {_fmt(e['quadform_bound'])} at delta1 {_fmt(e['quadform_delta1'])}")
        if e.get("shrink"):
            s = e["shrink"]
            for lvl, (box, sig, poi) in enumerate(zip(s["boxes"], s["sigma_min"], s["poincare"])):
                width = max(hi - lo for lo, hi in box)
                lines.append(f"  shrink {lvl}: width {width:.4g}  sigma_min {sig:.6g}  poincare {poi:.6g}")
    p = r.parameters
    lines.append("parameters: " + ", ".join(f"{k}={p[k]}" for k in sorted(p)))
    return "\n".join(lines) + "\n"


def emit_report(r: Report, fmt: str = "json") -> bytes:
    """Stable bytes: sorted keys, fixed float repr, trailing newline."""
    if fmt == "json":
        return (json.dumps(r.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n").encode()
    if fmt == "text":
        return _text(r).encode()
    raise ValueError(f"unknown format {fmt!r}")


def load_report(data: bytes | str) -> Report:
    return Report.from_dict(json.loads(data))


def estimate(P, settings: Settings, delta1, shrink: int = 0) -> dict:
    """Grid estimates for the estimate chain on the region box."""
    grid = settings.grid_for(P)
    out = {"caveat": CAVEAT, "grid": list(grid.points)}
    out["sigma_min"] = sigma_min(discretize(P, grid), settings.seed)
    try:
        out["poincare"] = poincare_constant(P.X0, grid, P.bindings, settings.degeneracy_tol)
    except DegenerateField as exc:
        out["poincare"] = None
        out["poincare_error"] = str(exc)
    out["quadform_delta1"] = delta1
    out["quadform_bound"] = quadform_bound(P, delta1, grid, seed=settings.seed) if delta1 is not None else None
    if shrink:
        out["shrink"] = shrink_sweep(P, grid, shrink, settings.seed).to_dict()
    return out


def _read_spec(path: Path) -> bytes:
    if not path.exists() and path.parent == Path("."):
        from .corpus import bundled

        found = bundled(path.name)
        if found is not None:
            return found.read_bytes()
    return path.read_bytes()


def run_check(
    path,
    *,
    grid: int | None = None,
    mode: str | None = None,
    estimate_: bool = False,
    shrink: int = 0,
    delta1: float | None = None,
    seed: int | None = None,
) -> Report:
    """Parse, certify and optionally estimate; raises on input or numeric errors.

    A path that does not exist but names a bundled corpus file
    (``example4.spec``) reads that file.
    """
    raw = _read_spec(Path(path))
    P = parse_spec(raw.decode())
    settings = Settings.for_spec(P, grid_points=grid, mode=mode, delta1=delta1, seed=seed)
    cert = certify(P, settings)
    params = settings.to_dict()
    params.update({"estimate": bool(estimate_), "shrink": int(shrink)})
    est = estimate(P, settings, cert.delta1, shrink) if estimate_ or shrink else None
    return Report(P.name, hashlib.sha256(raw).hexdigest(), params, cert, est)


__all__ = [
    "CAVEAT",
    "EXIT_CERTIFIED",
    "EXIT_INPUT",
    "EXIT_NUMERIC",
    "EXIT_UNKNOWN",
    "EXIT_VALIDATION",
    "EXIT_VIOLATED",
    "Report",
    "emit_report",
    "estimate",
    "load_report",
    "run_check",
]
