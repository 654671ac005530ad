"""The bundled corpus of worked examples and negative controls."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .conditions import Settings, certify
from .specfile import parse_spec


def _root():
    return resources.files("locsolv") / "corpus"


def manifest() -> list[dict]:
    return json.loads((_root() / "manifest.json").read_text())["entries"]


def spec_text(name: str) -> str:
    """Text of a bundled spec, by file name with or without ``.spec``."""
    fname = name if name.endswith(".spec") else f"{name}.spec"
    return (_root() / fname).read_text()


def bundled(name: str):
    """Resource handle of a bundled spec, or None."""
    fname = name if name.endswith(".spec") else f"{name}.spec"
    f = _root() / fname
    return f if f.is_file() else None


def load(name: str):
    return parse_spec(spec_text(name))


def _better_or_equal(got, want) -> bool:
    # (-1, 0) is a stronger grade than (0, 0)
    return got is not None and tuple(got)[0] <= tuple(want)[0]


@dataclass(frozen=True)
class Outcome:
    entry: dict
    grade: tuple | None
    failing: list
    ok: bool

    @property
    def name(self) -> str:
        return self.entry["file"]

    def line(self) -> str:
        want = self.entry["expected_grade"]
        tag = "ok  " if self.ok else "FAIL"
        got = tuple(self.grade) if self.grade is not None else None
        exp = tuple(want) if want is not None else None
        detail = f"grade {got} (expected {exp}{' or better' if self.entry.get('or_better') else ''})"
        if self.entry["kind"] == "control":
            detail += f"; failing {self.failing} (expected {self.entry['expected_failing']})"
        return f"{tag} {self.name:<28} {detail}"


def check_entry(entry: dict, settings_overrides: dict | None = None) -> Outcome:
    P = load(entry["file"])
    cert = certify(P, Settings.for_spec(P, **(settings_overrides or {})))
    failing = cert.failing()
    want = entry["expected_grade"]
    if entry["kind"] == "control":
        ok = cert.grade is None and sorted(failing) == sorted(entry["expected_failing"])
    elif entry.get("or_better"):
        ok = _better_or_equal(cert.grade, want)
    else:
        ok = cert.grade is not None and tuple(cert.grade) == tuple(want)
    return Outcome(entry, cert.grade, failing, ok)


def run_corpus(name_filter: str | None = None, settings_overrides: dict | None = None) -> list[Outcome]:
    entries = [e for e in manifest() if not name_filter or name_filter in e["file"]]
    return [check_entry(e, settings_overrides) for e in entries]
