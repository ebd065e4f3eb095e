"""Polynomial expressions and problem files.

Expression grammar::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | base ('^' INT)?
    base   := REAL | VAR | '(' expr ')'
    VAR    := 'x' INT          (1 <= INT <= dimension)

Unary minus binds looser than ``^``, so ``-x1^2`` is ``-(x1^2)``.

Problem files::

    dim 2
    name: optional label
    objective: (x1^2 - x2^2)^2 - x2^3
    constraint: 1 - x1^2 - x2^2        # read as  expr <= 0

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path

from .errors import InputError, ParseError, ResourceError
from .polynomial import Polynomial

DEFAULT_TERM_CAP = 100_000

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<var>x\d+)
  | (?P<real>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "var", "real", "op", "end"
    text: str
    column: int  # 1-based


def _tokenize(src: str, line, column_offset, source) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {src[pos]!r}",
                line=line, column=pos + 1 + column_offset, source=source,
            )
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(0), pos + 1 + column_offset))
        pos = m.end()
    tokens.append(_Token("end", "", len(src) + 1 + column_offset))
    return tokens


class _ExpressionParser:
    def __init__(self, src, dimension, term_cap, line, column_offset, source):
        self.dimension = dimension
        self.term_cap = term_cap
        self.line = line
        self.source = source
        self.tokens = _tokenize(src, line, column_offset, source)
        self.pos = 0

    def error(self, message, token=None):
        token = token or self.tokens[self.pos]
        return ParseError(message, line=self.line, column=token.column, source=self.source)

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, op) -> bool:
        return self.current.kind == "op" and self.current.text == op

    def capped(self, p: Polynomial, token) -> Polynomial:
        if len(p) > self.term_cap:
            raise ResourceError(
                f"expansion produced {len(p)} terms, above the cap of {self.term_cap}"
                + (f" (line {self.line}, column {token.column})" if self.line else "")
            )
        return p

    def parse(self) -> Polynomial:
        if self.current.kind == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.at_op("+") or self.at_op("-"):
            tok = self.advance()
            q = self.term()
            p = self.capped(p + q if tok.text == "+" else p - q, tok)
        return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.at_op("*"):
            tok = self.advance()
            q = self.factor()
            p = self.capped(p * q, tok)
        return p

    def factor(self) -> Polynomial:
        if self.at_op("-"):
            self.advance()
            return -self.factor()
        p = self.base()
        if self.at_op("^"):
            caret = self.advance()
            tok = self.current
            if tok.kind == "op" and tok.text == "-":
                raise self.error("negative exponents are not allowed", tok)
            if tok.kind != "real":
                raise self.error("expected a non-negative integer exponent after '^'", tok)
            if not tok.text.isdigit():
                raise self.error(f"exponent {tok.text!r} is not a non-negative integer", tok)
            self.advance()
            k = int(tok.text)
            result = Polynomial.constant(1.0, self.dimension)
            for _ in range(k):
                result = self.capped(result * p, caret)
            p = result
        return p

    def base(self) -> Polynomial:
        tok = self.current
        if tok.kind == "real":
            self.advance()
            return Polynomial.constant(float(tok.text), self.dimension)
        if tok.kind == "var":
            self.advance()
            idx = int(tok.text[1:])
            if not 1 <= idx <= self.dimension:
                raise self.error(
                    f"variable {tok.text} is out of range for dimension {self.dimension}", tok
                )
            return Polynomial.variable(idx, self.dimension)
        if self.at_op("("):
            self.advance()
            p = self.expr()
            if not self.at_op(")"):
                raise self.error("expected ')'")
            self.advance()
            return p
        if tok.kind == "end":
            raise self.error("unexpected end of expression", tok)
        raise self.error(f"unexpected {tok.text!r}", tok)


def parse_expression(src: str, dimension: int, *, term_cap: int = DEFAULT_TERM_CAP,
                     line: int | None = None, column_offset: int = 0,
                     source: str | None = None) -> Polynomial:
    """Parse and fully expand a polynomial expression in ``x1..x{dimension}``.

    ``line``/``column_offset``/``source`` only affect error locations.
    Raises :class:`ParseError` on malformed input and :class:`ResourceError`
    when an intermediate expansion has more than ``term_cap`` terms.
    """
    if not isinstance(dimension, int) or dimension < 1:
        raise InputError(f"dimension must be a positive integer, got {dimension!r}")
    return _ExpressionParser(src, dimension, term_cap, line, column_offset, source).parse()


@dataclass(frozen=True)
class Problem:
    """``minimize objective(x)  s.t.  constraints[i](x) <= 0``."""

    dimension: int
    objective: Polynomial
    constraints: tuple[Polynomial, ...] = ()
    name: str | None = None
    sources: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for i, g in enumerate(self.polynomials):
            if g.dimension != self.dimension:
                raise InputError(
                    f"polynomial g{i} has dimension {g.dimension}, problem has {self.dimension}"
                )

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def polynomials(self) -> tuple[Polynomial, ...]:
        """``(g0, g1, ..., gm)`` with ``g0`` the objective."""
        return (self.objective,) + self.constraints

    def to_text(self) -> str:
        lines = [f"dim {self.dimension}"]
        if self.name:
            lines.append(f"name: {self.name}")
        lines.append(f"objective: {self.objective}")
        lines.extend(f"constraint: {g}" for g in self.constraints)
        return "\n".join(lines) + "\n"


_KEYED = re.compile(r"^(objective|constraint|name)\s*:(.*)$")
_DIM = re.compile(r"^dim\s+(\S+)\s*$")


def parse_problem(src: str, *, source: str | None = None,
                  term_cap: int = DEFAULT_TERM_CAP) -> Problem:
    """Parse the text of a problem file."""
    dimension = None
    objective = None
    name = None
    constraints: list[Polynomial] = []
    texts: list[str] = []
    pending: list[tuple[str, str, int, int]] = []

    for lineno, raw in enumerate(src.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        m = _DIM.match(stripped)
        if m:
            if dimension is not None:
                raise ParseError("duplicate 'dim' line", line=lineno, source=source)
            if pending or name is not None:
                raise ParseError("'dim' must come before all other entries",
                                 line=lineno, source=source)
            try:
                dimension = int(m.group(1))
            except ValueError:
                raise ParseError(f"dimension {m.group(1)!r} is not an integer",
                                 line=lineno, source=source) from None
            if dimension < 1:
                raise ParseError("dimension must be at least 1", line=lineno, source=source)
            continue
        m = _KEYED.match(stripped)
        if not m:
            raise ParseError(f"unrecognized line {stripped!r}", line=lineno, source=source)
        key, body = m.group(1), m.group(2)
        if dimension is None:
            raise ParseError("missing 'dim <n>' before first entry", line=lineno, source=source)
        if key == "name":
            if name is not None:
                raise ParseError("duplicate 'name' line", line=lineno, source=source)
            name = body.strip()
            continue
        if key == "objective" and any(k == "objective" for k, *_ in pending):
            raise ParseError("duplicate 'objective' line", line=lineno, source=source)
        column_offset = indent + stripped.index(":") + 1
        pending.append((key, body, lineno, column_offset))

    if dimension is None:
        raise ParseError("missing 'dim <n>' line", source=source)
    for key, body, lineno, offset in pending:
        p = parse_expression(body, dimension, term_cap=term_cap, line=lineno,
                             column_offset=offset, source=source)
        if key == "objective":
            objective = p
        else:
            constraints.append(p)
        texts.append(body.strip())
    if objective is None:
        raise ParseError("missing 'objective:' line", source=source)
    # keep the objective's source text first
    obj_pos = next(i for i, (k, *_) in enumerate(pending) if k == "objective")
    texts.insert(0, texts.pop(obj_pos))
    return Problem(dimension, objective, tuple(constraints), name, tuple(texts))


def load_problem(path: str | PathLike, *, term_cap: int = DEFAULT_TERM_CAP) -> Problem:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read problem file {path}: {exc.strerror}") from exc
    return parse_problem(text, source=str(path), term_cap=term_cap)
