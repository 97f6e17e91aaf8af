"""Sorted string/int/bool component language: expressions, total evaluation, parsing.

Programs are parenthesized prefix terms over a fixed component inventory,
e.g. ``(concat (substr x 0 2) ",")``.  Evaluation is total: every
well-sorted expression produces a value on every environment, using the
usual string-theory conventions for out-of-range operations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Union

Value = Union[str, int, bool]
Env = dict[str, Value]


class Sort(Enum):
    STRING = "string"
    INT = "int"
    BOOL = "bool"

    def __repr__(self):
        return f"Sort.{self.name}"


class DslError(Exception):
    """Base class for language-level errors."""


class SortError(DslError):
    """Expression construction with mismatched sorts."""


class StructureError(DslError):
    """Conditional placed where the shape rules forbid it."""


@dataclass(frozen=True)
class Component:
    """A function symbol: fixed arity, sorted arguments, one unit of size."""

    name: str
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort
    fn: Callable[..., Value]

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self):
        return f"Component({self.name})"


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class Lit:
    value: Value

    @property
    def sort(self) -> Sort:
        return Sort.STRING if isinstance(self.value, str) else Sort.INT

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, (str, int)):
            raise SortError(f"literals must be strings or integers, got {self.value!r}")


@dataclass(frozen=True)
class App:
    comp: Component
    args: tuple["Expr", ...]

    def __post_init__(self):
        if len(self.args) != self.comp.arity:
            raise SortError(
                f"{self.comp.name} expects {self.comp.arity} arguments, got {len(self.args)}"
            )
        for i, (arg, want) in enumerate(zip(self.args, self.comp.arg_sorts)):
            if arg.sort is not want:
                raise SortError(
                    f"argument {i} of {self.comp.name} must be {want.value}, got {arg.sort.value}"
                )
            if condition_count(arg):
                raise StructureError("conditionals may only appear at the top level")

    @property
    def sort(self) -> Sort:
        return self.comp.result_sort


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"

    def __post_init__(self):
        if self.cond.sort is not Sort.BOOL:
            raise SortError("condition must be boolean-sorted")
        if self.then.sort is not self.orelse.sort:
            raise SortError("branches of a conditional must share a sort")
        if condition_count(self.cond) or condition_count(self.then):
            raise StructureError("only the else branch of a conditional may nest")
        if condition_count(self.orelse) > 1:
            raise StructureError("conditional nesting is limited to depth 2")

    @property
    def sort(self) -> Sort:
        return self.then.sort


Expr = Union[Var, Lit, App, If]


def component_size(e: Expr) -> int:
    """Number of non-conditional nodes; the enumeration layer index."""
    if isinstance(e, (Var, Lit)):
        return 1
    if isinstance(e, App):
        return 1 + sum(component_size(a) for a in e.args)
    return component_size(e.cond) + component_size(e.then) + component_size(e.orelse)


def condition_count(e: Expr) -> int:
    if isinstance(e, If):
        return 1 + condition_count(e.orelse)
    return 0


def evaluate(e: Expr, env: Env) -> Value:
    """Total evaluation; never raises on a well-sorted expression."""
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, App):
        return e.comp.fn(*(evaluate(a, env) for a in e.args))
    if evaluate(e.cond, env):
        return evaluate(e.then, env)
    return evaluate(e.orelse, env)


# Total semantics for the fixed inventory.  Out-of-range string operations
# return "" and failed integer conversions return -1 so that every program
# has a defined value vector.

def _substr(s: str, start: int, length: int) -> str:
    if start < 0 or length < 0:
        return ""
    return s[start : start + length]


def _at(s: str, i: int) -> str:
    if 0 <= i < len(s):
        return s[i]
    return ""


def _replace(s: str, old: str, new: str) -> str:
    if old == "":
        return new + s
    return s.replace(old, new, 1)


def _indexof(s: str, t: str, start: int) -> int:
    if start < 0 or start > len(s):
        return -1
    return s.find(t, start)


def _str_to_int(s: str) -> int:
    if s and all("0" <= c <= "9" for c in s):
        return int(s)
    return -1


def _int_to_str(i: int) -> str:
    return str(i) if i >= 0 else ""


_S, _I, _B = Sort.STRING, Sort.INT, Sort.BOOL

FUNCTIONS: dict[str, Component] = {
    c.name: c
    for c in [
        Component("concat", (_S, _S), _S, lambda a, b: a + b),
        Component("replace", (_S, _S, _S), _S, _replace),
        Component("at", (_S, _I), _S, _at),
        Component("substr", (_S, _I, _I), _S, _substr),
        Component("int_to_str", (_I,), _S, _int_to_str),
        Component("+", (_I, _I), _I, lambda a, b: a + b),
        Component("-", (_I, _I), _I, lambda a, b: a - b),
        Component("length", (_S,), _I, len),
        Component("str_to_int", (_S,), _I, _str_to_int),
        Component("indexof", (_S, _S, _I), _I, _indexof),
        Component("=", (_S, _S), _B, lambda a, b: a == b),
        Component("<=", (_I, _I), _B, lambda a, b: a <= b),
        Component("prefixof", (_S, _S), _B, lambda p, s: s.startswith(p)),
        Component("suffixof", (_S, _S), _B, lambda p, s: s.endswith(p)),
        Component("contains", (_S, _S), _B, lambda s, t: t in s),
    ]
}


@dataclass(frozen=True)
class ComponentSet:
    """Leaves (inputs and constants) plus the enabled function components."""

    leaves: tuple[Expr, ...]
    functions: tuple[Component, ...]

    def leaves_of(self, sort: Sort) -> list[Expr]:
        return [l for l in self.leaves if l.sort is sort]


def default_component_set(
    signature: Iterable[tuple[str, Sort]],
    string_constants: Iterable[str] = (),
    int_constants: Iterable[int] = (),
    enabled: Iterable[str] | None = None,
) -> ComponentSet:
    """Assemble the fixed inventory for a task.

    Integer constants always include 0 and 1.  ``enabled`` restricts the
    function components by name; leaves are always retained.
    """
    signature = list(signature)
    if not signature:
        raise ValueError("task has no inputs")
    leaves: list[Expr] = [Var(name, sort) for name, sort in signature]
    seen_s: set[str] = set()
    for c in string_constants:
        if c not in seen_s:
            seen_s.add(c)
            leaves.append(Lit(c))
    ints: list[int] = [0, 1]
    for i in int_constants:
        if i not in ints:
            ints.append(i)
    leaves.extend(Lit(i) for i in ints)
    if enabled is None:
        funcs = tuple(FUNCTIONS.values())
    else:
        enabled = list(enabled)
        unknown = [n for n in enabled if n not in FUNCTIONS]
        if unknown:
            raise ValueError(f"unknown components: {unknown}")
        funcs = tuple(FUNCTIONS[n] for n in FUNCTIONS if n in set(enabled))
    return ComponentSet(tuple(leaves), funcs)


_ESCAPES = {'"': '\\"', "\\": "\\\\"}


def _quote(s: str) -> str:
    return '"' + "".join(_ESCAPES.get(c, c) for c in s) + '"'


def pretty(e: Expr) -> str:
    """Render as a parenthesized prefix term; inverse of parse_expr."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return _quote(e.value) if isinstance(e.value, str) else str(e.value)
    if isinstance(e, App):
        return "(" + " ".join([e.comp.name] + [pretty(a) for a in e.args]) + ")"
    return f"(if {pretty(e.cond)} {pretty(e.then)} {pretty(e.orelse)})"


class ParseError(DslError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownComponentError(ParseError):
    pass


class ArityMismatchError(ParseError):
    pass


class SortMismatchError(ParseError):
    pass


_TOKEN = re.compile(r'\(|\)|"(?:[^"\\]|\\.)*"|[^\s()"]+')
_INT = re.compile(r"-?\d+$")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    for m in _TOKEN.finditer(text):
        between = text[pos : m.start()]
        if between.strip():
            raise ParseError(f"unexpected character {between.strip()[0]!r}", pos)
        tokens.append((m.group(), m.start()))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
    return tokens


def _unquote(tok: str, pos: int) -> str:
    body = tok[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            if i + 1 >= len(body) or body[i + 1] not in '"\\':
                raise ParseError("invalid escape sequence", pos + i + 1)
            out.append(body[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def parse_expr(text: str, signature: Iterable[tuple[str, Sort]]) -> Expr:
    """Parse a prefix term; rejects unknown names, bad arity, and ill-sorted terms."""
    sig = dict(signature)
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)

    def parse(at: int) -> tuple[Expr, int]:
        tok, pos = tokens[at]
        if tok == ")":
            raise ParseError("unexpected ')'", pos)
        if tok != "(":
            return atom(tok, pos), at + 1
        if at + 1 >= len(tokens):
            raise ParseError("unterminated '('", pos)
        head, head_pos = tokens[at + 1]
        args: list[Expr] = []
        arg_pos: list[int] = []
        i = at + 2
        while True:
            if i >= len(tokens):
                raise ParseError("unterminated '('", pos)
            if tokens[i][0] == ")":
                break
            arg_pos.append(tokens[i][1])
            arg, i = parse(i)
            args.append(arg)
        return build(head, head_pos, args, arg_pos), i + 1

    def atom(tok: str, pos: int) -> Expr:
        if tok.startswith('"'):
            return Lit(_unquote(tok, pos))
        if _INT.match(tok):
            return Lit(int(tok))
        if tok in sig:
            return Var(tok, sig[tok])
        raise UnknownComponentError(f"unknown identifier {tok!r}", pos)

    def build(head: str, head_pos: int, args: list[Expr], arg_pos: list[int]) -> Expr:
        if head == "if":
            if len(args) != 3:
                raise ArityMismatchError(f"if expects 3 arguments, got {len(args)}", head_pos)
            try:
                return If(args[0], args[1], args[2])
            except (SortError, StructureError) as err:
                raise SortMismatchError(str(err), head_pos) from err
        comp = FUNCTIONS.get(head)
        if comp is None:
            raise UnknownComponentError(f"unknown component {head!r}", head_pos)
        if len(args) != comp.arity:
            raise ArityMismatchError(
                f"{head} expects {comp.arity} arguments, got {len(args)}", head_pos
            )
        for i, (arg, want) in enumerate(zip(args, comp.arg_sorts)):
            if arg.sort is not want:
                raise SortMismatchError(
                    f"argument {i} of {head} must be {want.value}, got {arg.sort.value}",
                    arg_pos[i],
                )
        try:
            return App(comp, tuple(args))
        except StructureError as err:
            raise SortMismatchError(str(err), head_pos) from err

    expr, end = parse(0)
    if end != len(tokens):
        raise ParseError("trailing tokens after expression", tokens[end][1])
    return expr
