"""Reader and writer for operator spec files.

A spec file is line oriented.  Blank lines and ``#`` comments are ignored.
Top-level lines are ``key = value``; each ``[pair]`` header opens a block
holding one ``X = [...]`` and one ``f = ...`` line.  See the README for the
full grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import sympy as sp
from sympy.printing.precedence import PRECEDENCE
from sympy.printing.str import StrPrinter

from .expr import ELEMENTARY, canonicalize, is_real, opaque, opaque_names
from .operator import OperatorSpec, Region
from .symbols import FirstOrderOp

#: spec-file option key -> Settings field
OPTION_KEYS = {
    "grid": "grid_points",
    "tol_psd": "psd_tol",
    "tol_pinv": "pinv_cutoff",
    "tol_range": "range_tol",
}

_TOP_KEYS = {"name", "dim", "vars", "X0", "XN1", "a0", "region", "center", *OPTION_KEYS}
_PAIR_KEYS = {"X", "f"}


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class ValidationError(ValueError):
    def __init__(self, block: str, message: str):
        super().__init__(f"{block}: {message}")
        self.block = block
        self.message = message


# -- tokens ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),\[\]]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | end
    text: str
    col: int  # 1-based


def tokenize(text: str, line: int, col0: int = 1) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(line, col0 + bad, f"unexpected character {text[bad]!r}")
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), col0 + m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text)))
    return out


class _Parser:
    """Recursive descent over one line's value."""

    def __init__(self, tokens, line, scope):
        self.toks = tokens
        self.i = 0
        self.line = line
        self.scope = scope  # name -> Symbol, plus opaque declarations

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(self.line, tok.col, msg)

    def take(self, text=None, kind=None) -> Token:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text else kind
            found = repr(t.text) if t.kind != "end" else "end of line"
            raise self.error(f"expected {want}, found {found}")
        self.i += 1
        return t

    def at(self, text) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def done(self):
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")

    # expr := term (('+'|'-') term)*
    def expr(self):
        out = self.term()
        while self.at("+") or self.at("-"):
            op = self.take().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    # term := unary (('*'|'/') unary)*
    def term(self):
        out = self.unary()
        while self.at("*") or self.at("/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "/":
                if rhs == 0:
                    raise self.error("division by zero", op)
                out = out / rhs
            else:
                out = out * rhs
        return out

    # unary := ('-'|'+') unary | power
    def unary(self):
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    # power := atom ('^' unary)?
    def power(self):
        base = self.atom()
        if self.at("^"):
            op = self.take()
            k = self.unary()
            if not (k.is_Integer):
                raise self.error("exponent must be an integer", op)
            if base == 0 and k < 0:
                raise self.error("division by zero", op)
            return base**k
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return sp.Rational(t.text)
        if self.at("("):
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if t.kind == "name":
            self.take()
            if self.at("("):
                return self.call(t)
            if t.text == "i":
                return sp.I
            if t.text in self.scope["vars"]:
                return self.scope["vars"][t.text]
            if t.text in self.scope["opaques"]:
                raise self.error(f"opaque symbol {t.text!r} must be called with its arguments", t)
            raise self.error(f"unknown name {t.text!r}", t)
        found = repr(t.text) if t.kind != "end" else "end of line"
        raise self.error(f"expected an expression, found {found}")

    def call(self, name: Token):
        self.take("(")
        args = [self.expr()]
        while self.at(","):
            self.take()
            args.append(self.expr())
        close = self.take(")")
        fn = name.text
        if fn in ELEMENTARY:
            if len(args) != 1:
                raise self.error(f"{fn} takes one argument", name)
            return ELEMENTARY[fn](args[0])
        if fn in self.scope["opaques"]:
            deps = self.scope["opaques"][fn]
            want = [self.scope["vars"][d] for d in deps]
            if list(args) != want:
                raise self.error(f"{fn} is declared as {fn}({', '.join(deps)})", close)
            return opaque(fn, want)
        raise self.error(f"unknown function {fn!r}", name)

    def vector(self):
        self.take("[")
        items = []
        if not self.at("]"):
            items.append(self.expr())
            while self.at(","):
                self.take()
                items.append(self.expr())
        self.take("]")
        return items

    def number(self):
        e = self.expr()
        if not e.is_real or not e.is_number:
            raise self.error("expected a real number")
        return e

    def intervals(self):
        self.take("[")
        out = [self.interval()]
        while self.at(","):
            self.take()
            out.append(self.interval())
        self.take("]")
        return out

    def interval(self):
        start = self.tok
        self.take("[")
        lo = self.number()
        self.take(",")
        hi = self.number()
        self.take("]")
        if not lo < hi:
            raise self.error(f"empty interval [{lo}, {hi}]", start)
        return (lo, hi)

    def numbers(self):
        items = self.vector()
        for e in items:
            if not e.is_number or not e.is_real:
                raise self.error("expected real numbers")
        return items


_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")
_OPAQUE = re.compile(r"opaque\s+(?P<name>[A-Za-z_][A-Za-z_0-9]*)\s*\((?P<deps>[^)]*)\)\s*$")
_BIND = re.compile(r"bind\s+(?P<name>[A-Za-z_][A-Za-z_0-9]*)\s*=")
_RESERVED = {"i", *ELEMENTARY}


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def parse_spec(text: str) -> OperatorSpec:
    """Parse and validate a spec document."""
    scope = {"vars": {}, "opaques": {}}
    top: dict = {}
    pairs: list[dict] = []
    binds: dict = {}
    block = None  # None at top level, else the current pair dict

    def parser_for(value, lineno, col):
        return _Parser(tokenize(value, lineno, col), lineno, scope)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        if body.startswith("["):
            if body != "[pair]":
                raise ParseError(lineno, indent + 1, f"unknown block header {body!r}")
            block = {"_line": lineno}
            pairs.append(block)
            continue
        m = _OPAQUE.match(body)
        if m:
            if block is not None:
                raise ParseError(lineno, indent + 1, "opaque declarations belong at top level")
            _declare_opaque(m, scope, lineno, indent)
            continue
        m = _BIND.match(body)
        if m:
            if block is not None:
                raise ParseError(lineno, indent + 1, "bindings belong at top level")
            name = m.group("name")
            if name not in scope["opaques"]:
                raise ParseError(lineno, indent + 1 + m.start("name"), f"bind for undeclared opaque {name!r}")
            if name in binds:
                raise ParseError(lineno, indent + 1, f"duplicate bind for {name!r}")
            p = parser_for(body[m.end():], lineno, indent + 1 + m.end())
            e = p.expr()
            p.done()
            if opaque_names(e):
                raise ParseError(lineno, indent + 1 + m.end(), "a binding may not use opaque symbols")
            binds[name] = e
            continue
        if "=" not in body:
            raise ParseError(lineno, indent + 1, "expected 'key = value'")
        key, value = body.split("=", 1)
        key = key.strip()
        vcol = indent + 1 + body.index("=") + 1
        target = top if block is None else block
        allowed = _TOP_KEYS if block is None else _PAIR_KEYS
        if key not in allowed:
            where = "top level" if block is None else "a [pair] block"
            raise ParseError(lineno, indent + 1, f"unknown key {key!r} at {where}")
        if key in target:
            raise ParseError(lineno, indent + 1, f"duplicate key {key!r}")
        target[key] = _parse_value(key, value, lineno, vcol, scope, parser_for)
        if key == "vars":
            scope["vars"] = {v.name: v for v in target[key]}
    return _build(top, pairs, binds, scope)


def _declare_opaque(m, scope, lineno, indent):
    name = m.group("name")
    col = indent + 1 + m.start("name")
    if not scope["vars"]:
        raise ParseError(lineno, col, "declare vars before opaque symbols")
    if name in scope["opaques"] or name in scope["vars"] or name in _RESERVED:
        raise ParseError(lineno, col, f"name {name!r} already in use")
    deps = [d.strip() for d in m.group("deps").split(",") if d.strip()]
    for d in deps:
        if d not in scope["vars"]:
            raise ParseError(lineno, indent + 1 + m.start("deps"), f"unknown variable {d!r}")
    if len(set(deps)) != len(deps) or not deps:
        raise ParseError(lineno, indent + 1 + m.start("deps"), "dependencies must be distinct and nonempty")
    scope["opaques"][name] = tuple(deps)


def _parse_value(key, value, lineno, col, scope, parser_for):
    stripped = value.strip()
    vcol = col + len(value) - len(value.lstrip())
    if key == "name":
        if not stripped:
            raise ParseError(lineno, vcol, "empty name")
        return stripped
    if key == "vars":
        if scope["vars"]:
            raise ParseError(lineno, vcol, "vars already declared")
        names = [n.strip() for n in stripped.split(",")]
        for n in names:
            if not _NAME.match(n) or n in _RESERVED:
                raise ParseError(lineno, vcol, f"invalid variable name {n!r}")
        if len(set(names)) != len(names):
            raise ParseError(lineno, vcol, "duplicate variable name")
        return tuple(sp.Symbol(n, real=True) for n in names)
    if key in ("dim", "grid"):
        if not stripped.isdigit():
            raise ParseError(lineno, vcol, f"{key} must be a positive integer")
        return int(stripped)
    if key.startswith("tol_"):
        try:
            v = float(stripped)
        except ValueError:
            raise ParseError(lineno, vcol, f"{key} must be a number") from None
        if not v > 0:
            raise ParseError(lineno, vcol, f"{key} must be positive")
        return v
    if key in ("X0", "XN1", "X", "f", "a0") and not scope["vars"]:
        raise ParseError(lineno, vcol, "declare vars first")
    p = parser_for(value, lineno, col)
    if key in ("X0", "XN1", "X"):
        out = p.vector()
    elif key == "region":
        out = p.intervals()
    elif key == "center":
        out = p.numbers()
    else:
        out = p.expr()
    p.done()
    return out


def _field(block: str, coeffs, variables) -> FirstOrderOp:
    n = len(variables)
    if len(coeffs) == 0:
        return FirstOrderOp.zero(variables)
    if len(coeffs) != n:
        raise ValidationError(block, f"{len(coeffs)} coefficients, expected {n}")
    op = FirstOrderOp(variables, tuple(coeffs))
    for c in op.coeffs:
        if not is_real(c):
            raise ValidationError(block, f"field coefficients must be real, got {c}")
    return op


def _build(top, pairs, binds, scope) -> OperatorSpec:
    if "vars" not in top:
        raise ValidationError("vars", "missing")
    variables = top["vars"]
    n = len(variables)
    if "dim" in top and top["dim"] != n:
        raise ValidationError("dim", f"dim = {top['dim']} but {n} variables declared")
    if "X0" not in top:
        raise ValidationError("X0", "missing")
    X0 = _field("X0", top["X0"], variables)
    XN1 = _field("XN1", top.get("XN1", []), variables)
    built = []
    for j, blk in enumerate(pairs, start=1):
        label = f"pair {j} (line {blk['_line']})"
        for k in ("X", "f"):
            if k not in blk:
                raise ValidationError(label, f"missing {k}")
        X = _field(label, blk["X"], variables)
        f = canonicalize(blk["f"])
        if not is_real(f):
            raise ValidationError(label, f"weight f must be real, got {f}")
        built.append((X, f))
    if "region" in top:
        box = top["region"]
        if len(box) != n:
            raise ValidationError("region", f"{len(box)} intervals, expected {n}")
    else:
        box = [(-1, 1)] * n
    if "center" in top:
        center = top["center"]
        if len(center) != n:
            raise ValidationError("center", f"{len(center)} coordinates, expected {n}")
    else:
        center = [(lo + hi) / 2 for lo, hi in box]
    try:
        region = Region(tuple(box), tuple(center))
    except ValueError as exc:
        raise ValidationError("center", str(exc)) from None
    options = {OPTION_KEYS[k]: top[k] for k in OPTION_KEYS if k in top}
    P = OperatorSpec(
        variables=variables,
        pairs=tuple(built),
        X0=X0,
        XN1=XN1,
        a0=top.get("a0", sp.Integer(0)),
        region=region,
        opaques=dict(scope["opaques"]),
        bindings=binds,
        name=top.get("name", "operator"),
        options=options,
    )
    for msg in P.problems():
        block, _, detail = msg.partition(": ")
        raise ValidationError(block, detail)
    return P


# -- rendering ---------------------------------------------------------------


class _SpecPrinter(StrPrinter):
    def _print_Pow(self, expr, rational=False):
        b, e = expr.args
        if e.is_Integer and e < 0:
            if e == -1:
                return f"1/{self.parenthesize(b, PRECEDENCE['Pow'])}"
            return f"1/{self.parenthesize(b, PRECEDENCE['Pow'])}^{-e}"
        return f"{self.parenthesize(b, PRECEDENCE['Pow'])}^{self._print(e)}"

    def _print_ImaginaryUnit(self, expr):
        return "i"

    def _print_Exp1(self, expr):
        return "exp(1)"

    def _print_Function(self, expr):
        return f"{expr.func.__name__}({', '.join(self._print(a) for a in expr.args)})"


_PRINTER = _SpecPrinter({"order": "lex"})


def render_expr(e) -> str:
    return _PRINTER.doprint(sp.sympify(e))


def _vec(items) -> str:
    return "[" + ", ".join(render_expr(c) for c in items) + "]"


def render_spec(P: OperatorSpec) -> str:
    """Canonical text for ``P``; ``parse_spec(render_spec(P)) == P``."""
    lines = [f"name = {P.name}", f"dim = {P.n}", "vars = " + ", ".join(v.name for v in P.variables)]
    for name, deps in P.opaques.items():
        lines.append(f"opaque {name}({', '.join(deps)})")
    lines.append(f"X0 = {_vec(P.X0.coeffs)}")
    lines.append(f"XN1 = {_vec(P.XN1.coeffs) if not P.XN1.is_zero() else '[]'}")
    lines.append(f"a0 = {render_expr(P.a0)}")
    lines.append("region = [" + ", ".join(f"[{render_expr(lo)}, {render_expr(hi)}]" for lo, hi in P.region.box) + "]")
    lines.append(f"center = {_vec(P.region.center)}")
    for name, e in P.bindings.items():
        lines.append(f"bind {name} = {render_expr(e)}")
    inverse = {v: k for k, v in OPTION_KEYS.items()}
    for field_name, value in P.options.items():
        lines.append(f"{inverse[field_name]} = {value!r}")
    for X, f in P.pairs:
        lines += ["", "[pair]", f"X = {_vec(X.coeffs)}", f"f = {render_expr(f)}"]
    return "\n".join(lines) + "\n"


__all__ = ["OPTION_KEYS", "ParseError", "Token", "ValidationError", "parse_spec", "render_expr", "render_spec", "tokenize"]
