"""Core syntax: types and expressions with holes, cursors, paths, text format.

Expressions carry two kinds of holes: empty holes (a missing subterm) and
non-empty holes (a wrapper quarantining a subterm whose type does not fit its
position). Both are named so that later stages can address them individually.
Everything here is an immutable tree; all operations are pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, TypeAlias, Union

__all__ = [
    "Num", "Arrow", "THole", "HTyp",
    "Var", "Lam", "Ap", "NumLit", "Plus", "Asc", "EHole", "NEHole", "HExp",
    "HoleName", "Path", "Node", "ZExp",
    "KernelError", "InvalidPath", "ParseError",
    "HoleNamer", "is_identifier",
    "child_count", "get_child", "with_child", "node_at", "replace_at",
    "all_paths", "place_cursor", "erase_cursor", "cursor_node",
    "holes_of", "max_hole_name", "hole_names", "free_vars",
    "serialize", "serialize_type", "serialize_zexp",
    "parse", "parse_type", "TokenStream",
]


class KernelError(Exception):
    """Base for every error the kernel reports through the protocol."""

    code = "E_INTERNAL"


class InvalidPath(KernelError):
    code = "E_PATH"


class ParseError(KernelError):
    """Carries a 1-based position and the set of tokens that were expected."""

    code = "E_PARSE"

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"{line}:{col}: {message}")


_IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Num:
    """The number type."""


@dataclass(frozen=True)
class Arrow:
    """Function type."""

    domain: "HTyp"
    codomain: "HTyp"


@dataclass(frozen=True)
class THole:
    """The unknown type; consistent with every type."""


HTyp: TypeAlias = Union[Num, Arrow, THole]


# ---------------------------------------------------------------------------
# Expressions

HoleName: TypeAlias = int  # non-negative, unique within one program


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not is_identifier(self.name):
            raise ValueError(f"bad identifier: {self.name!r}")


@dataclass(frozen=True)
class Lam:
    binder: str
    body: "HExp"

    def __post_init__(self):
        if not is_identifier(self.binder):
            raise ValueError(f"bad identifier: {self.binder!r}")


@dataclass(frozen=True)
class Ap:
    fn: "HExp"
    arg: "HExp"


@dataclass(frozen=True)
class NumLit:
    n: int


@dataclass(frozen=True)
class Plus:
    left: "HExp"
    right: "HExp"


@dataclass(frozen=True)
class Asc:
    """Type ascription; the annotation is an editable subtree of its own."""

    subject: "HExp"
    ann: HTyp


@dataclass(frozen=True)
class EHole:
    u: HoleName

    def __post_init__(self):
        if self.u < 0:
            raise ValueError("hole names are non-negative")


@dataclass(frozen=True)
class NEHole:
    """A subterm kept under a mark because its type does not fit its position."""

    u: HoleName
    subject: "HExp"

    def __post_init__(self):
        if self.u < 0:
            raise ValueError("hole names are non-negative")


HExp: TypeAlias = Union[Var, Lam, Ap, NumLit, Plus, Asc, EHole, NEHole]

Path: TypeAlias = tuple[int, ...]
Node: TypeAlias = Union[HExp, HTyp]


class HoleNamer:
    """Monotone hole-name allocator; names are never reused within a session."""

    def __init__(self, next_name: HoleName = 0):
        self.next_name = next_name

    def fresh(self) -> HoleName:
        u = self.next_name
        self.next_name = u + 1
        return u


# ---------------------------------------------------------------------------
# Paths and child access
#
# Child arity: Lam=1, Ap=2, Plus=2, NEHole=1, Arrow=2, leaves=0.
# Asc has its subject at step 0; step 1 is reserved for the type annotation,
# so a cursor can rest on a subterm of the annotation.


def child_count(node: Node) -> int:
    match node:
        case Lam() | NEHole():
            return 1
        case Ap() | Plus() | Arrow() | Asc():
            return 2
        case _:
            return 0


def get_child(node: Node, k: int) -> Node:
    match node, k:
        case Lam(_, body), 0:
            return body
        case Ap(fn, _), 0:
            return fn
        case Ap(_, arg), 1:
            return arg
        case Plus(left, _), 0:
            return left
        case Plus(_, right), 1:
            return right
        case Asc(subject, _), 0:
            return subject
        case Asc(_, ann), 1:
            return ann
        case NEHole(_, subject), 0:
            return subject
        case Arrow(domain, _), 0:
            return domain
        case Arrow(_, codomain), 1:
            return codomain
    raise InvalidPath(f"no child {k} at {type(node).__name__}")


def with_child(node: Node, k: int, new: Node) -> Node:
    slot = get_child(node, k)
    if isinstance(slot, (Num, Arrow, THole)) != isinstance(new, (Num, Arrow, THole)):
        raise InvalidPath("replacement does not match the slot's sort")
    match node, k:
        case Lam(binder, _), 0:
            return Lam(binder, new)
        case Ap(_, arg), 0:
            return Ap(new, arg)
        case Ap(fn, _), 1:
            return Ap(fn, new)
        case Plus(_, right), 0:
            return Plus(new, right)
        case Plus(left, _), 1:
            return Plus(left, new)
        case Asc(_, ann), 0:
            return Asc(new, ann)
        case Asc(subject, _), 1:
            return Asc(subject, new)
        case NEHole(u, _), 0:
            return NEHole(u, new)
        case Arrow(_, codomain), 0:
            return Arrow(new, codomain)
        case Arrow(domain, _), 1:
            return Arrow(domain, new)
    raise InvalidPath(f"no child {k} at {type(node).__name__}")


def node_at(root: Node, path: Path) -> Node:
    node = root
    for step in path:
        node = get_child(node, step)
    return node


def replace_at(root: Node, path: Path, new: Node) -> Node:
    if not path:
        if isinstance(root, (Num, Arrow, THole)) != isinstance(new, (Num, Arrow, THole)):
            raise InvalidPath("replacement does not match the slot's sort")
        return new
    head, rest = path[0], path[1:]
    return with_child(root, head, replace_at(get_child(root, head), rest, new))


def all_paths(root: Node) -> list[Path]:
    """Every valid cursor path in pre-order, including annotation subtrees."""

    out: list[Path] = []

    def walk(node: Node, prefix: Path):
        out.append(prefix)
        for k in range(child_count(node)):
            walk(get_child(node, k), prefix + (k,))

    walk(root, ())
    return out


# ---------------------------------------------------------------------------
# Edit states


@dataclass(frozen=True)
class ZExp:
    """An expression with exactly one cursor, held as the cursor's path."""

    root: HExp
    path: Path


def place_cursor(e: HExp, p: Path) -> ZExp:
    node_at(e, tuple(p))  # raises InvalidPath on a bad step
    return ZExp(e, tuple(p))


def erase_cursor(z: ZExp) -> HExp:
    return z.root


def cursor_node(z: ZExp) -> Node:
    return node_at(z.root, z.path)


# ---------------------------------------------------------------------------
# Hole inventory


def holes_of(e: HExp) -> list[tuple[HoleName, Path, str]]:
    """All holes in pre-order; each entry is (name, path, "empty"|"nonempty")."""

    out: list[tuple[HoleName, Path, str]] = []

    def walk(node: HExp, prefix: Path):
        match node:
            case EHole(u):
                out.append((u, prefix, "empty"))
            case NEHole(u, subject):
                out.append((u, prefix, "nonempty"))
                walk(subject, prefix + (0,))
            case Lam(_, body):
                walk(body, prefix + (0,))
            case Ap(fn, arg) | Plus(fn, arg):
                walk(fn, prefix + (0,))
                walk(arg, prefix + (1,))
            case Asc(subject, _):
                walk(subject, prefix + (0,))
            case _:
                pass

    walk(e, ())
    return out


def hole_names(e: HExp) -> set[HoleName]:
    return {u for u, _, _ in holes_of(e)}


def max_hole_name(e: HExp) -> HoleName | None:
    names = hole_names(e)
    return max(names) if names else None


def free_vars(e: HExp) -> set[str]:
    match e:
        case Var(name):
            return {name}
        case Lam(binder, body):
            return free_vars(body) - {binder}
        case Ap(fn, arg) | Plus(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case Asc(subject, _) | NEHole(_, subject):
            return free_vars(subject)
        case _:
            return set()


# ---------------------------------------------------------------------------
# Text format
#
#   t ::= num | thole | (arrow t t)
#   e ::= (var id) | (lam id e) | (ap e e) | (num int) | (plus e e)
#       | (asc e t) | (hole nat) | (nehole nat e)


def serialize_type(t: HTyp) -> str:
    match t:
        case Num():
            return "num"
        case THole():
            return "thole"
        case Arrow(domain, codomain):
            return f"(arrow {serialize_type(domain)} {serialize_type(codomain)})"
    raise TypeError(f"not a type: {t!r}")


def serialize(e: HExp) -> str:
    match e:
        case Var(name):
            return f"(var {name})"
        case Lam(binder, body):
            return f"(lam {binder} {serialize(body)})"
        case Ap(fn, arg):
            return f"(ap {serialize(fn)} {serialize(arg)})"
        case NumLit(n):
            return f"(num {n})"
        case Plus(left, right):
            return f"(plus {serialize(left)} {serialize(right)})"
        case Asc(subject, ann):
            return f"(asc {serialize(subject)} {serialize_type(ann)})"
        case EHole(u):
            return f"(hole {u})"
        case NEHole(u, subject):
            return f"(nehole {u} {serialize(subject)})"
    raise TypeError(f"not an expression: {e!r}")


def serialize_zexp(z: ZExp) -> str:
    """Render an edit state with the node at the cursor wrapped in (cursor …)."""

    def render(node: Node, path: Path) -> str:
        if path == z.path:
            return f"(cursor {_serialize_node(node, path, render)})"
        return _serialize_node(node, path, render)

    return render(z.root, ())


def _serialize_node(node: Node, path: Path, render) -> str:
    match node:
        case Var(name):
            return f"(var {name})"
        case Lam(binder, body):
            return f"(lam {binder} {render(body, path + (0,))})"
        case Ap(fn, arg):
            return f"(ap {render(fn, path + (0,))} {render(arg, path + (1,))})"
        case NumLit(n):
            return f"(num {n})"
        case Plus(left, right):
            return f"(plus {render(left, path + (0,))} {render(right, path + (1,))})"
        case Asc(subject, ann):
            return f"(asc {render(subject, path + (0,))} {render(ann, path + (1,))})"
        case EHole(u):
            return f"(hole {u})"
        case NEHole(u, subject):
            return f"(nehole {u} {render(subject, path + (0,))})"
        case Num():
            return "num"
        case THole():
            return "thole"
        case Arrow(domain, codomain):
            return f"(arrow {render(domain, path + (0,))} {render(codomain, path + (1,))})"
    raise TypeError(f"not a node: {node!r}")


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


class TokenStream:
    """Whitespace-separated tokens with parens split out; tracks 1-based positions."""

    def __init__(self, text: str):
        self.tokens: list[_Token] = []
        line, col = 1, 1
        i = 0
        while i < len(text):
            ch = text[i]
            if ch == "\n":
                line, col = line + 1, 1
                i += 1
            elif ch in " \t\r":
                col += 1
                i += 1
            elif ch in "()":
                self.tokens.append(_Token(ch, line, col))
                col += 1
                i += 1
            else:
                j = i
                while j < len(text) and text[j] not in " \t\r\n()":
                    j += 1
                self.tokens.append(_Token(text[i:j], line, col))
                col += j - i
                i = j
        self.end_line, self.end_col = line, col
        self.pos = 0

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> _Token | None:
        return None if self.at_end() else self.tokens[self.pos]

    def next(self, expected: tuple[str, ...]) -> _Token:
        if self.at_end():
            raise self.error(expected)
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, literal: str) -> _Token:
        tok = self.next((literal,))
        if tok.text != literal:
            raise ParseError(f"expected {literal!r}, found {tok.text!r}",
                             tok.line, tok.col, (literal,))
        return tok

    def error(self, expected: tuple[str, ...], found: _Token | None = None) -> ParseError:
        if found is None:
            found = self.peek()
        if found is None:
            return ParseError(f"unexpected end of input, expected one of {expected}",
                              self.end_line, self.end_col, expected)
        return ParseError(f"unexpected {found.text!r}, expected one of {expected}",
                          found.line, found.col, expected)


_EXPR_HEADS = ("var", "lam", "ap", "num", "plus", "asc", "hole", "nehole")
_INT_RE = re.compile(r"-?[0-9]+\Z")
_NAT_RE = re.compile(r"[0-9]+\Z")


def _read_ident(ts: TokenStream) -> str:
    tok = ts.next(("identifier",))
    if tok.text in "()" or not is_identifier(tok.text):
        raise ts.error(("identifier",), tok)
    return tok.text


def _read_int(ts: TokenStream) -> int:
    tok = ts.next(("integer",))
    if not _INT_RE.match(tok.text):
        raise ts.error(("integer",), tok)
    return int(tok.text)


def _read_hole_name(ts: TokenStream, seen: set[HoleName]) -> HoleName:
    tok = ts.next(("hole name",))
    if not _NAT_RE.match(tok.text):
        raise ts.error(("hole name",), tok)
    u = int(tok.text)
    if u in seen:
        raise ParseError(f"duplicate hole name {u}", tok.line, tok.col)
    seen.add(u)
    return u


def parse_type_from(ts: TokenStream) -> HTyp:
    tok = ts.next(("num", "thole", "("))
    if tok.text == "num":
        return Num()
    if tok.text == "thole":
        return THole()
    if tok.text == "(":
        head = ts.next(("arrow",))
        if head.text != "arrow":
            raise ts.error(("arrow",), head)
        domain = parse_type_from(ts)
        codomain = parse_type_from(ts)
        ts.expect(")")
        return Arrow(domain, codomain)
    raise ts.error(("num", "thole", "("), tok)


def parse_expr_from(ts: TokenStream, seen_holes: set[HoleName] | None = None) -> HExp:
    seen = set() if seen_holes is None else seen_holes
    tok = ts.next(("(",))
    if tok.text != "(":
        raise ts.error(("(",), tok)
    head = ts.next(_EXPR_HEADS)
    match head.text:
        case "var":
            e: HExp = Var(_read_ident(ts))
        case "lam":
            binder = _read_ident(ts)
            e = Lam(binder, parse_expr_from(ts, seen))
        case "ap":
            e = Ap(parse_expr_from(ts, seen), parse_expr_from(ts, seen))
        case "num":
            e = NumLit(_read_int(ts))
        case "plus":
            e = Plus(parse_expr_from(ts, seen), parse_expr_from(ts, seen))
        case "asc":
            e = Asc(parse_expr_from(ts, seen), parse_type_from(ts))
        case "hole":
            e = EHole(_read_hole_name(ts, seen))
        case "nehole":
            u = _read_hole_name(ts, seen)
            e = NEHole(u, parse_expr_from(ts, seen))
        case _:
            raise ts.error(_EXPR_HEADS, head)
    ts.expect(")")
    return e


def _finish(ts: TokenStream, value):
    if not ts.at_end():
        raise ts.error(("end of input",))
    return value


def parse(text: str) -> HExp:
    ts = TokenStream(text)
    return _finish(ts, parse_expr_from(ts))


def parse_type(text: str) -> HTyp:
    ts = TokenStream(text)
    return _finish(ts, parse_type_from(ts))
