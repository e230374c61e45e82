"""ODE model DSL: parsing, validation and canonical printing.

A model file holds one statement per line::

    # Goodwin oscillator
    x1' = -b*x1 + 1/(c + x4)
    x2' = α*x1 - β*x2
    ...
    y = x1

``name' = expr`` defines a state equation, ``name = expr`` an output and
``in: u1, u2`` declares input functions.  Every other symbol occurring in a
state equation is a constant parameter.  A trailing backslash continues a
statement on the next line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algebra import Ring
from .expr import (BinOp, Expr, ExprError, ExprParser, ascii_alias, to_rational,
                   to_text, tokenize)

AUX_NAME = "z_aux"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int | None = None
    col: int | None = None

    def __str__(self):
        if self.line is None:
            return self.message
        where = f"line {self.line}" + (f":{self.col}" if self.col else "")
        return f"{where}: {self.message}"


class ModelError(ValueError):
    """Raised when a model cannot be parsed or fails validation."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class OdeModel:
    """A parsed ODE model ``x' = f(x, mu, u)``, ``y = g(x, mu, u)``.

    Initial conditions are implicit unknowns, one per state.
    """

    states: tuple[str, ...]
    params: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[tuple[str, Expr], ...]
    equations: tuple[tuple[str, Expr], ...]
    name: str = field(default="", compare=False)

    @property
    def rhs(self) -> dict[str, Expr]:
        return dict(self.equations)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.outputs)

    def alias(self, name: str) -> str:
        return ascii_alias(name)

    def substitute(self, values: dict[str, object]) -> "OdeModel":
        """Replace parameters by numeric constants in every equation."""
        from fractions import Fraction

        from .expr import Const, Neg, Pow, Sym

        unknown = set(values) - set(self.params)
        if unknown:
            raise KeyError(f"not parameters of the model: {sorted(unknown)}")
        table = {k: Const(Fraction(v)) for k, v in values.items()}

        def walk(e: Expr) -> Expr:
            if isinstance(e, Sym):
                return table.get(e.name, e)
            if isinstance(e, Neg):
                return Neg(walk(e.operand))
            if isinstance(e, Pow):
                return Pow(walk(e.base), e.exponent)
            if isinstance(e, BinOp):
                return BinOp(e.op, walk(e.left), walk(e.right))
            return e

        return OdeModel(
            states=self.states,
            params=tuple(p for p in self.params if p not in values),
            inputs=self.inputs,
            outputs=tuple((n, walk(e)) for n, e in self.outputs),
            equations=tuple((s, walk(e)) for s, e in self.equations),
            name=self.name,
        )


_STATEMENT = re.compile(r"^\s*in\s*:", re.UNICODE)


def _split_names(text: str, line: int) -> list[str]:
    names = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        toks = [t for t in tokenize(chunk, line) if t.kind != "end"]
        if len(toks) != 1 or toks[0].kind != "name":
            raise ExprError(f"malformed input name {chunk!r}", line)
        names.append(toks[0].text)
    return names


def _logical_lines(text: str):
    buf, start = "", None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if start is None:
            start = no
        if line.endswith("\\"):
            buf += line[:-1] + " "
            continue
        buf += line
        if buf.strip():
            yield start, buf
        buf, start = "", None
    if buf.strip():
        yield start, buf


def parse_model(text: str, *, name: str = "", validate_model: bool = True) -> OdeModel:
    """Parse DSL source into an :class:`OdeModel`.

    Raises :class:`ModelError` carrying every diagnostic found; no other
    exception escapes for string input.
    """
    try:
        return _parse(text, name, validate_model)
    except ModelError:
        raise
    except ExprError as exc:
        raise ModelError([Diagnostic("syntax", exc.message, exc.line, exc.col)]) from None
    except RecursionError:
        raise ModelError([Diagnostic("syntax", "expression nested too deeply")]) from None


def _parse(text: str, name: str, validate_model: bool) -> OdeModel:
    if not isinstance(text, str):
        raise ModelError([Diagnostic("syntax", "model source must be text")])
    inputs: list[str] = []
    equations: list[tuple[str, Expr]] = []
    outputs: list[tuple[str, Expr]] = []
    lines: dict[tuple[str, str], int] = {}
    for lineno, line in _logical_lines(text):
        if _STATEMENT.match(line):
            inputs.extend(_split_names(line.split(":", 1)[1], lineno))
            continue
        tokens = list(tokenize(line, lineno))
        head = tokens[0]
        if head.kind != "name":
            raise ExprError("statement must start with a name", head.line, head.col)
        pos = 1
        is_state = False
        if tokens[pos].kind == "op" and tokens[pos].text == "'":
            is_state = True
            pos += 1
        eq = tokens[pos]
        if eq.kind != "op" or eq.text != "=":
            raise ExprError(f"expected '=', found {eq.text or 'end of line'!r}", eq.line, eq.col)
        parser = ExprParser(tokens[pos + 1:])
        expr = parser.parse_expr()
        if parser.tok.kind != "end":
            t = parser.tok
            raise ExprError(f"unexpected {t.text!r}", t.line, t.col)
        if is_state:
            equations.append((head.text, expr))
            lines.setdefault(("eq", head.text), lineno)
        else:
            outputs.append((head.text, expr))
            lines.setdefault(("out", head.text), lineno)

    states: list[str] = []
    for s, _ in equations:
        if s not in states:
            states.append(s)
    skip = set(states) | set(inputs) | {n for n, _ in outputs}
    params: list[str] = []
    for _, e in equations:
        for sym in _ordered_symbols(e):
            if sym not in skip and sym not in params:
                params.append(sym)
    model = OdeModel(tuple(states), tuple(params), tuple(inputs), tuple(outputs),
                     tuple(equations), name=name)
    if validate_model:
        diags = validate(model, _lines=lines)
        if diags:
            raise ModelError(diags)
    return model


def _ordered_symbols(e: Expr) -> list[str]:
    from .expr import Sym

    out: list[str] = []

    def walk(node):
        if isinstance(node, Sym):
            if node.name not in out:
                out.append(node.name)
        for child in node.children():
            walk(child)

    walk(e)
    return out


_JET_SUFFIX = re.compile(r"^(.*)_(\d+)$")


def validate(model: OdeModel, _lines: dict | None = None) -> list[Diagnostic]:
    """Check the model invariants; returns one diagnostic per violation."""
    lines = _lines or {}
    diags: list[Diagnostic] = []
    if not model.equations:
        diags.append(Diagnostic("no-states", "model has no state equations"))
    if not model.outputs:
        diags.append(Diagnostic("no-outputs", "model has no outputs"))

    seen: set[str] = set()
    for s, _ in model.equations:
        if s in seen:
            diags.append(Diagnostic("duplicate-equation", f'duplicate equation "{s}"',
                                    lines.get(("eq", s))))
        seen.add(s)
    for s in model.states:
        if s not in seen:
            diags.append(Diagnostic("missing-equation", f'state "{s}" has no equation'))

    outs_seen: set[str] = set()
    for n, _ in model.outputs:
        if n in outs_seen:
            diags.append(Diagnostic("duplicate-output", f'duplicate output "{n}"',
                                    lines.get(("out", n))))
        outs_seen.add(n)
        if n in model.states or n in model.params or n in model.inputs:
            diags.append(Diagnostic("name-clash", f'output "{n}" reuses a declared name'))

    known = set(model.states) | set(model.params) | set(model.inputs)
    reported: set[str] = set()
    for kind, items in (("eq", model.equations), ("out", model.outputs)):
        for n, e in items:
            for sym in _ordered_symbols(e):
                if sym not in known and sym not in reported:
                    reported.add(sym)
                    diags.append(Diagnostic("unknown-symbol", f'unknown symbol "{sym}"',
                                            lines.get((kind, n))))
    for s in set(model.inputs) & set(model.states):
        diags.append(Diagnostic("name-clash", f'"{s}" is both an input and a state'))

    # ascii aliases must stay distinct, and must not collide with jet names
    names = list(model.states) + list(model.params) + list(model.inputs) + list(model.output_names)
    by_alias: dict[str, str] = {}
    for n in names:
        a = ascii_alias(n)
        if a in by_alias and by_alias[a] != n:
            diags.append(Diagnostic("name-clash", f'"{n}" and "{by_alias[a]}" share the alias "{a}"'))
        by_alias.setdefault(a, n)
    dynamic = {ascii_alias(n) for n in list(model.states) + list(model.inputs) + list(model.output_names)}
    for p in model.params:
        a = ascii_alias(p)
        m = _JET_SUFFIX.match(a)
        if a == AUX_NAME or (m and m.group(1) in dynamic):
            diags.append(Diagnostic("name-clash", f'parameter "{p}" collides with a generated variable name'))

    diags.extend(_denominator_checks(model, lines))
    return diags


def _denominator_checks(model: OdeModel, lines) -> list[Diagnostic]:
    names = sorted({s for _, e in model.equations + model.outputs for s in e.symbols()})
    ring = Ring(names)
    out = []
    for kind, items in (("eq", model.equations), ("out", model.outputs)):
        for n, e in items:
            for node in _walk(e):
                if isinstance(node, BinOp) and node.op == "/":
                    try:
                        zero = not to_rational(node.right, ring).num
                    except (ExprError, ZeroDivisionError):
                        zero = True
                    if zero:
                        out.append(Diagnostic("zero-denominator",
                                              f'denominator is identically zero in "{n}"',
                                              lines.get((kind, n))))
    return out


def _walk(e: Expr):
    yield e
    for c in e.children():
        yield from _walk(c)


def format_model(model: OdeModel) -> str:
    """Canonical DSL text; parsing it yields an equal model."""
    out = []
    if model.inputs:
        out.append("in: " + ", ".join(model.inputs))
    for s, e in model.equations:
        out.append(f"{s}' = {to_text(e)}")
    for n, e in model.outputs:
        out.append(f"{n} = {to_text(e)}")
    return "\n".join(out) + "\n"


def load_model(path: str | Path) -> OdeModel:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), name=path.stem)


BUNDLED_MODELS = ("ssaair", "qwwc", "siraqj", "goodwin", "seir", "hiv")


def bundled_model_path(name: str) -> Path:
    ref = resources.files("identforge") / "models" / f"{name}.ode"
    return Path(str(ref))


def load_bundled(name: str) -> OdeModel:
    """Load one of the shipped fixture models by file stem."""
    path = bundled_model_path(name)
    if not path.exists():
        raise FileNotFoundError(f"no bundled model named {name!r}")
    return load_model(path)
