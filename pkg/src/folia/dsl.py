"""The `.fol` input language: lexer, parser, and canonical printer.

A file declares one foliation: variables, optional nonzero parameters, the
field components, a domain, and optional declared data (invariant
hypersurfaces, separatrix curves, factorizations, query points, a linear
change of coordinates, an `assume ncp;` flag).  Parsing is two-phase: a
recursive-descent pass builds untyped expression trees, then a semantic
pass resolves names against the declared context and produces exact
polynomials.  `print_foliation_file` emits a canonical form whose re-parse
equals the original parse.

Failures are structured: LexError and ParseError carry line/column and a
caret snippet, semantic problems raise SemanticError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .context import (
    ParamValue,
    Point,
    PointValue,
    SideCondition,
    VarContext,
    check_point,
    format_point,
    value_str,
)
from .errors import FoliaError, LexError, ParseError, SemanticError
from .factor import PreparedFactorization, prepare_factorization
from .foliation import Domain, VectorField
from .gaussian import GaussianRational
from .polynomial import Polynomial

_KEYWORDS = (
    "foliation", "vars", "params", "field", "domain", "polydisc", "affine",
    "invariant", "separatrix", "at", "factor", "query", "assume", "ncp",
    "change",
)
_MAX_DEPTH = 100
_MAX_EXPONENT = 64


# --- tokens ------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "number" | "string" | "punct" | "eof"
    text: str
    line: int
    col: int
    value: Fraction | None = None


_PUNCT2 = ("->", "!=")
_PUNCT1 = "{}()[]:;,+-*^="


def _shown(t: "Token") -> str:
    return "end of input" if t.kind == "eof" else repr(t.text)


def _snippet(lines: Sequence[str], line: int, col: int) -> str:
    if 1 <= line <= len(lines):
        src = lines[line - 1]
        return f"\n  {src}\n  " + " " * (col - 1) + "^"
    return ""


def tokenize(text: str) -> list[Token]:
    lines = text.splitlines()
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith(("->", "!="), i):
            toks.append(Token("punct", text[i : i + 2], line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT1:
            toks.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                raise LexError(
                    "unterminated string" + _snippet(lines, line, col), line, col
                )
            toks.append(Token("string", text[i + 1 : j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            num = int(text[i:j])
            den = 1
            if j < n and text[j] == "/" and j + 1 < n and text[j + 1].isdigit():
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                den = int(text[j + 1 : k])
                j = k
            if den == 0:
                raise LexError(
                    "rational literal with zero denominator"
                    + _snippet(lines, line, col),
                    line,
                    col,
                )
            toks.append(
                Token("number", text[i:j], line, col, value=Fraction(num, den))
            )
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise LexError(
            f"unexpected character {ch!r}" + _snippet(lines, line, col), line, col
        )
    toks.append(Token("eof", "", line, col))
    return toks


# --- expression trees ---------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    line: int
    col: int


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction


@dataclass(frozen=True)
class Imag(Expr):
    pass


@dataclass(frozen=True)
class Name(Expr):
    text: str


@dataclass(frozen=True)
class Neg(Expr):
    inner: Expr


@dataclass(frozen=True)
class Bin(Expr):
    op: str  # "+" | "-" | "*"
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


# --- raw declarations (syntax only) -------------------------------------------

@dataclass(frozen=True)
class _RawDecl:
    kind: str
    payload: tuple
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.toks = tokenize(text)
        self.pos = 0

    # -- plumbing --

    def peek(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(
            message + _snippet(self.lines, tok.line, tok.col), tok.line, tok.col
        )

    def expect_punct(self, text: str) -> Token:
        t = self.peek()
        if t.kind != "punct" or t.text != text:
            raise self.fail(f"expected {text!r}, found {_shown(t)}")
        return self.advance()

    def expect_ident(self, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != "ident" or (text is not None and t.text != text):
            want = f"{text!r}" if text else "a name"
            raise self.fail(f"expected {want}, found {_shown(t)}")
        return self.advance()

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text == text

    # -- expressions --

    def parse_expr(self, depth: int = 0) -> Expr:
        if depth > _MAX_DEPTH:
            raise self.fail("expression nests too deeply")
        node = self.parse_term(depth)
        while self.at_punct("+") or self.at_punct("-"):
            op = self.advance()
            rhs = self.parse_term(depth)
            node = Bin(op.line, op.col, op.text, node, rhs)
        return node

    def parse_term(self, depth: int) -> Expr:
        node = self.parse_unary(depth)
        while self.at_punct("*"):
            op = self.advance()
            rhs = self.parse_unary(depth)
            node = Bin(op.line, op.col, "*", node, rhs)
        return node

    def parse_unary(self, depth: int) -> Expr:
        if self.at_punct("-"):
            t = self.advance()
            return Neg(t.line, t.col, self.parse_unary(depth))
        if self.at_punct("+"):
            self.advance()
            return self.parse_unary(depth)
        return self.parse_power(depth)

    def parse_power(self, depth: int) -> Expr:
        base = self.parse_atom(depth)
        if self.at_punct("^"):
            t = self.advance()
            num = self.peek()
            if num.kind != "number" or num.value.denominator != 1:
                raise self.fail("exponent must be a nonnegative integer")
            self.advance()
            e = int(num.value)
            if e > _MAX_EXPONENT:
                raise self.fail(f"exponent exceeds the cap {_MAX_EXPONENT}", num)
            if self.at_punct("^"):
                raise self.fail("chained '^' needs parentheses")
            return Pow(t.line, t.col, base, e)
        return base

    def parse_atom(self, depth: int) -> Expr:
        t = self.peek()
        if t.kind == "number":
            self.advance()
            return Num(t.line, t.col, t.value)
        if t.kind == "ident":
            self.advance()
            if t.text == "i":
                return Imag(t.line, t.col)
            return Name(t.line, t.col, t.text)
        if self.at_punct("("):
            self.advance()
            node = self.parse_expr(depth + 1)
            self.expect_punct(")")
            return node
        raise self.fail(f"expected a value, found {_shown(t)}")

    # -- structure --

    def parse_file_raw(self) -> tuple[str, list[_RawDecl]]:
        self.expect_ident("foliation")
        name_tok = self.peek()
        if name_tok.kind != "string":
            raise self.fail("expected the foliation name as a quoted string")
        self.advance()
        self.expect_punct("{")
        decls: list[_RawDecl] = []
        while not self.at_punct("}"):
            if self.peek().kind == "eof":
                raise self.fail("unterminated foliation block")
            decls.append(self.parse_decl())
        self.expect_punct("}")
        t = self.peek()
        if t.kind != "eof":
            raise self.fail("trailing input after the closing '}'")
        return name_tok.text, decls

    def parse_decl(self) -> _RawDecl:
        t = self.peek()
        if t.kind != "ident":
            raise self.fail(f"expected a declaration, found {t.text!r}")
        handler = {
            "vars": self._decl_vars,
            "params": self._decl_params,
            "field": self._decl_field,
            "domain": self._decl_domain,
            "invariant": self._decl_invariant,
            "separatrix": self._decl_separatrix,
            "factor": self._decl_factor,
            "query": self._decl_query,
            "assume": self._decl_assume,
            "change": self._decl_change,
        }.get(t.text)
        if handler is None:
            raise self.fail(f"unknown declaration {t.text!r}")
        return handler()

    def _ident_list(self) -> list[Token]:
        out = [self.expect_ident()]
        while self.at_punct(","):
            self.advance()
            out.append(self.expect_ident())
        return out

    def _decl_vars(self) -> _RawDecl:
        t = self.advance()
        self.expect_punct(":")
        names = self._ident_list()
        self.expect_punct(";")
        return _RawDecl("vars", tuple(names), t.line, t.col)

    def _decl_params(self) -> _RawDecl:
        t = self.advance()
        self.expect_punct(":")
        entries = []
        while True:
            name = self.expect_ident()
            bounds = []
            while self.at_punct("!="):
                self.advance()
                bounds.append(self.parse_expr())
            entries.append((name, tuple(bounds)))
            if not self.at_punct(","):
                break
            self.advance()
        self.expect_punct(";")
        return _RawDecl("params", tuple(entries), t.line, t.col)

    def _decl_field(self) -> _RawDecl:
        t = self.advance()
        self.expect_punct("{")
        comps = []
        while not self.at_punct("}"):
            name = self.expect_ident()
            self.expect_punct(":")
            comps.append((name, self.parse_expr()))
            self.expect_punct(";")
        self.expect_punct("}")
        if not comps:
            raise self.fail("a field block needs at least one component", t)
        return _RawDecl("field", tuple(comps), t.line, t.col)

    def _decl_domain(self) -> _RawDecl:
        t = self.advance()
        self.expect_punct(":")
        kind = self.expect_ident()
        if kind.text == "affine":
            payload: tuple = ("affine", None)
        elif kind.text == "polydisc":
            num = self.peek()
            if num.kind != "number":
                raise self.fail("polydisc needs a radius literal")
            self.advance()
            payload = ("polydisc", num.value)
        else:
            raise self.fail("domain is 'affine' or 'polydisc RADIUS'", kind)
        self.expect_punct(";")
        return _RawDecl("domain", payload, t.line, t.col)

    def _decl_invariant(self) -> _RawDecl:
        t = self.advance()
        self.expect_punct(":")
        e = self.parse_expr()
        self.expect_punct(";")
        return _RawDecl("invariant", (e,), t.line, t.col)

    def _point_exprs(self) -> tuple[Expr, ...]:
        self.expect_punct("(")
        vals = [self.parse_expr()]
        while self.at_punct(","):
            self.advance()
            vals.append(self.parse_expr())
        self.expect_punct(")")
        return tuple(vals)

    def _decl_separatrix(self) -> _RawDecl:
        t = self.advance()
        self.expect_ident("at")
        base = self._point_exprs()
        self.expect_punct(":")
        param = self.expect_ident()
        self.expect_punct("->")
        curve = self._point_exprs()
        self.expect_punct(";")
        return _RawDecl("separatrix", (base, param.text, curve), t.line, t.col)

    def _decl_factor(self) -> _RawDecl:
        t = self.advance()
        lhs = self.parse_expr()
        self.expect_punct("=")
        rhs = self.parse_expr()
        self.expect_punct(";")
        factors: list[Expr] = []

        def flatten(node: Expr) -> None:
            if isinstance(node, Bin) and node.op == "*":
                flatten(node.lhs)
                flatten(node.rhs)
            else:
                factors.append(node)

        flatten(rhs)
        return _RawDecl("factor", (lhs, tuple(factors)), t.line, t.col)

    def _decl_query(self) -> _RawDecl:
        t = self.advance()
        values = self._point_exprs()
        self.expect_punct(";")
        return _RawDecl("query", values, t.line, t.col)

    def _decl_assume(self) -> _RawDecl:
        t = self.advance()
        self.expect_ident("ncp")
        self.expect_punct(";")
        return _RawDecl("assume", (), t.line, t.col)

    def _decl_change(self) -> _RawDecl:
        t = self.advance()
        self.expect_punct("[")
        rows = []
        while True:
            self.expect_punct("[")
            row = [self.parse_expr()]
            while self.at_punct(","):
                self.advance()
                row.append(self.parse_expr())
            self.expect_punct("]")
            rows.append(tuple(row))
            if not self.at_punct(","):
                break
            self.advance()
        self.expect_punct("]")
        self.expect_punct(";")
        return _RawDecl("change", tuple(rows), t.line, t.col)


# --- semantic phase -----------------------------------------------------------

@dataclass(frozen=True)
class SeparatrixDecl:
    """A declared candidate curve t -> gamma(t) anchored at a point."""

    base: Point
    curve: tuple[Polynomial, ...]  # over the one-variable curve context
    param: str = "t"

    def __str__(self) -> str:
        curve = ", ".join(str(c) for c in self.curve)
        return f"at {format_point(self.base)}: {self.param} -> ({curve})"


Matrix = tuple[tuple[GaussianRational, ...], ...]


@dataclass(frozen=True)
class FoliationFile:
    """Everything a `.fol` file declares, resolved to exact objects."""

    name: str
    ctx: VarContext
    field: VectorField
    domain: Domain
    invariants: tuple[Polynomial, ...] = ()
    separatrices: tuple[SeparatrixDecl, ...] = ()
    factorizations: tuple[PreparedFactorization, ...] = ()
    queries: tuple[Point, ...] = ()
    changes: tuple[Matrix, ...] = ()
    ncp_assumed: bool = False


def _expr_to_poly(node: Expr, ctx: VarContext) -> Polynomial:
    if isinstance(node, Num):
        return Polynomial.constant(ctx, node.value)
    if isinstance(node, Imag):
        return Polynomial.constant(ctx, GaussianRational(0, 1))
    if isinstance(node, Name):
        try:
            return Polynomial.variable(ctx, node.text)
        except FoliaError:
            raise SemanticError(
                f"{node.line}:{node.col}: unknown variable {node.text!r}"
            ) from None
    if isinstance(node, Neg):
        return -_expr_to_poly(node.inner, ctx)
    if isinstance(node, Pow):
        base = _expr_to_poly(node.base, ctx)
        out = Polynomial.one(ctx)
        for _ in range(node.exponent):
            out = out * base
        return out
    assert isinstance(node, Bin)
    lhs = _expr_to_poly(node.lhs, ctx)
    rhs = _expr_to_poly(node.rhs, ctx)
    if node.op == "+":
        return lhs + rhs
    if node.op == "-":
        return lhs - rhs
    return lhs * rhs


def _expr_to_constant(node: Expr, ctx: VarContext, what: str) -> GaussianRational:
    p = _expr_to_poly(node, ctx)
    if not p.is_constant:
        raise SemanticError(f"{node.line}:{node.col}: {what} must be a constant")
    return p.constant_value()


def _expr_to_value(node: Expr, ctx: VarContext) -> PointValue:
    """A point coordinate: rational constant or a bare parameter name."""
    if isinstance(node, Name) and node.text in ctx.params:
        return ParamValue(node.text)
    p = _expr_to_poly(node, ctx)
    if p.is_constant:
        return p.constant_value()
    raise SemanticError(
        f"{node.line}:{node.col}: point coordinates must be rational constants"
        " or bare parameters"
    )


def _build_file(name: str, decls: Sequence[_RawDecl]) -> FoliationFile:
    def only(kind: str) -> _RawDecl | None:
        found = [d for d in decls if d.kind == kind]
        if len(found) > 1:
            d = found[1]
            raise SemanticError(f"{d.line}:{d.col}: duplicate {kind} declaration")
        return found[0] if found else None

    vars_decl = only("vars")
    if vars_decl is None:
        raise SemanticError("missing vars declaration")
    var_names = tuple(t.text for t in vars_decl.payload)
    if len(var_names) < 2:
        raise SemanticError(
            f"{vars_decl.line}:{vars_decl.col}: declare at least two variables"
        )

    params_decl = only("params")
    param_names: tuple[str, ...] = ()
    conditions: list[SideCondition] = []
    if params_decl is not None:
        param_names = tuple(tok.text for tok, _ in params_decl.payload)
        if len(set(param_names)) != len(param_names):
            raise SemanticError(
                f"{params_decl.line}:{params_decl.col}: duplicate parameter name"
            )

    # a bare context first, so != bounds can be evaluated as constants
    try:
        ctx = VarContext(var_names, param_names)
    except FoliaError as exc:
        raise SemanticError(f"{vars_decl.line}:{vars_decl.col}: {exc}") from None
    if params_decl is not None:
        for tok, bounds in params_decl.payload:
            for bound in bounds:
                conditions.append(
                    SideCondition(
                        tok.text, _expr_to_constant(bound, ctx, "excluded value")
                    )
                )
    try:
        ctx = VarContext(var_names, param_names, tuple(conditions))
    except FoliaError as exc:
        raise SemanticError(str(exc)) from None

    field_decl = only("field")
    if field_decl is None:
        raise SemanticError("missing field block")
    comps: dict[str, Polynomial] = {}
    for name_tok, expr in field_decl.payload:
        if name_tok.text not in ctx.vars:
            raise SemanticError(
                f"{name_tok.line}:{name_tok.col}: field component for unknown"
                f" variable {name_tok.text!r}"
            )
        if name_tok.text in comps:
            raise SemanticError(
                f"{name_tok.line}:{name_tok.col}: duplicate field component"
                f" {name_tok.text!r}"
            )
        comps[name_tok.text] = _expr_to_poly(expr, ctx)
    components = tuple(
        comps.get(v, Polynomial.zero(ctx)) for v in ctx.vars
    )
    try:
        field = VectorField(ctx, components)
    except FoliaError as exc:
        raise SemanticError(str(exc)) from None

    domain_decl = only("domain")
    if domain_decl is None:
        domain = Domain("affine")
    else:
        kind, radius = domain_decl.payload
        try:
            domain = Domain(kind, radius)
        except FoliaError as exc:
            raise SemanticError(
                f"{domain_decl.line}:{domain_decl.col}: {exc}"
            ) from None

    invariants = tuple(
        _expr_to_poly(d.payload[0], ctx) for d in decls if d.kind == "invariant"
    )

    separatrices: list[SeparatrixDecl] = []
    for d in (x for x in decls if x.kind == "separatrix"):
        base_exprs, pname, curve_exprs = d.payload
        base = tuple(_expr_to_value(e, ctx) for e in base_exprs)
        try:
            check_point(base, ctx)
        except FoliaError as exc:
            raise SemanticError(f"{d.line}:{d.col}: {exc}") from None
        if len(curve_exprs) != ctx.nvars:
            raise SemanticError(
                f"{d.line}:{d.col}: curve has {len(curve_exprs)} components,"
                f" expected {ctx.nvars}"
            )
        try:
            tctx = VarContext((pname,), ctx.params, ctx.side_conditions)
        except FoliaError as exc:
            raise SemanticError(f"{d.line}:{d.col}: {exc}") from None
        curve = tuple(_expr_to_poly(e, tctx) for e in curve_exprs)
        separatrices.append(SeparatrixDecl(base, curve, pname))

    factorizations: list[PreparedFactorization] = []
    for d in (x for x in decls if x.kind == "factor"):
        lhs_expr, factor_exprs = d.payload
        lhs = _expr_to_poly(lhs_expr, ctx)
        fs = [_expr_to_poly(e, ctx) for e in factor_exprs]
        try:
            factorizations.append(prepare_factorization(lhs, fs))
        except FoliaError as exc:
            raise SemanticError(f"{d.line}:{d.col}: {exc}") from None

    queries: list[Point] = []
    for d in (x for x in decls if x.kind == "query"):
        p = tuple(_expr_to_value(e, ctx) for e in d.payload)
        try:
            check_point(p, ctx)
        except FoliaError as exc:
            raise SemanticError(f"{d.line}:{d.col}: {exc}") from None
        queries.append(p)

    changes: list[Matrix] = []
    for d in (x for x in decls if x.kind == "change"):
        rows = d.payload
        if len(rows) != ctx.nvars or any(len(r) != ctx.nvars for r in rows):
            raise SemanticError(
                f"{d.line}:{d.col}: change matrix must be"
                f" {ctx.nvars}x{ctx.nvars}"
            )
        changes.append(
            tuple(
                tuple(_expr_to_constant(e, ctx, "matrix entry") for e in row)
                for row in rows
            )
        )

    ncp = any(d.kind == "assume" for d in decls)
    return FoliationFile(
        name, ctx, field, domain, invariants, tuple(separatrices),
        tuple(factorizations), tuple(queries), tuple(changes), ncp,
    )


def parse_foliation_file(text: str) -> FoliationFile:
    parser = _Parser(text)
    name, decls = parser.parse_file_raw()
    return _build_file(name, decls)


# --- canonical printer ---------------------------------------------------------

def print_foliation_file(f: FoliationFile) -> str:
    out = [f'foliation "{f.name}" {{']
    out.append("  vars: " + ", ".join(f.ctx.vars) + ";")
    if f.ctx.params:
        entries = []
        for p in f.ctx.params:
            bounds = sorted(
                (sc.excluded for sc in f.ctx.side_conditions if sc.param == p),
                key=lambda g: (g.re, g.im),
            )
            entry = p
            for b in bounds:
                entry += f" != {b}"
            entries.append(entry)
        out.append("  params: " + ", ".join(entries) + ";")
    out.append("  field {")
    for v, comp in zip(f.ctx.vars, f.field.components):
        out.append(f"    {v}: {comp};")
    out.append("  }")
    out.append(f"  domain: {f.domain};")
    for inv in f.invariants:
        out.append(f"  invariant: {inv};")
    for s in f.separatrices:
        curve = ", ".join(str(c) for c in s.curve)
        out.append(
            f"  separatrix at {format_point(s.base)}:"
            f" {s.param} -> ({curve});"
        )
    for fac in f.factorizations:
        rhs = " * ".join(f"({p})" for p in fac.declared_polys)
        out.append(f"  factor {fac.product} = {rhs};")
    for q in f.queries:
        out.append(f"  query {format_point(q)};")
    if f.ncp_assumed:
        out.append("  assume ncp;")
    for m in f.changes:
        rows = ", ".join(
            "[" + ", ".join(str(e) for e in row) + "]" for row in m
        )
        out.append(f"  change [{rows}];")
    out.append("}")
    return "\n".join(out) + "\n"


# --- standalone fragments (for command-line arguments) ----------------------


def parse_point_text(text: str, ctx: VarContext) -> Point:
    """Parse a bare point literal like ``(0, 1/2, c)`` against a context."""
    parser = _Parser(text)
    exprs = parser._point_exprs()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise parser.fail(f"unexpected trailing input {_shown(trailing)}")
    try:
        p = tuple(_expr_to_value(e, ctx) for e in exprs)
        check_point(p, ctx)
    except FoliaError as exc:
        raise SemanticError(str(exc)) from exc
    return p


def parse_slice_text(text: str, ctx: VarContext):
    """Parse a slice spec like ``x=0, w=1/2`` (braces optional)."""
    from .variety import Slice

    parser = _Parser(text)
    braced = parser.at_punct("{")
    if braced:
        parser.advance()
    mapping: dict[str, PointValue] = {}
    while True:
        name = parser.expect_ident()
        if name.text in mapping:
            raise parser.fail(f"coordinate {name.text!r} frozen twice", name)
        parser.expect_punct("=")
        mapping[name.text] = _expr_to_value(parser.parse_expr(), ctx)
        if parser.at_punct(","):
            parser.advance()
            continue
        break
    if braced:
        parser.expect_punct("}")
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise parser.fail(f"unexpected trailing input {_shown(trailing)}")
    try:
        return Slice.of(ctx, mapping)
    except FoliaError as exc:
        raise SemanticError(str(exc)) from exc
