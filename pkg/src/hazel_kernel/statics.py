"""Bidirectional statics for incomplete programs.

Synthesis computes a type from an expression; analysis checks an expression
against an expected type. Holes synthesize the unknown type, which is
consistent with everything, so every well-formed edit state can be checked.
Contexts are plain dicts treated as immutable; later bindings shadow earlier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .syntax import (
    Ap, Arrow, Asc, EHole, HExp, HTyp, Lam, NEHole, Num, NumLit, Plus, THole,
    Var, ZExp, KernelError, serialize_type,
)

__all__ = [
    "TypeCtx", "CursorInfo", "StaticError", "UnboundVariable", "NoSynthRule",
    "InconsistentTypes", "NotAFunction", "LamAgainstNonArrow",
    "consistent", "matched_arrow", "synthesize", "analyze", "cursor_info",
]

TypeCtx = Mapping[str, HTyp]


class StaticError(KernelError):
    code = "E_STATIC"


class UnboundVariable(StaticError):
    code = "E_UNBOUND"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name}")


class NoSynthRule(StaticError):
    """A bare unannotated lambda cannot synthesize a type."""

    code = "E_NO_SYNTH"


class InconsistentTypes(StaticError):
    code = "E_INCONSISTENT"

    def __init__(self, expected: HTyp, found: HTyp):
        self.expected = expected
        self.found = found
        super().__init__(
            f"expected type consistent with {serialize_type(expected)}, "
            f"found {serialize_type(found)}")


class NotAFunction(StaticError):
    code = "E_NOT_FUNCTION"

    def __init__(self, found: HTyp):
        self.found = found
        super().__init__(f"cannot apply a value of type {serialize_type(found)}")


class LamAgainstNonArrow(StaticError):
    code = "E_LAM_NON_ARROW"

    def __init__(self, expected: HTyp):
        self.expected = expected
        super().__init__(
            f"lambda checked against non-arrow type {serialize_type(expected)}")


def consistent(t1: HTyp, t2: HTyp) -> bool:
    """Type compatibility: reflexive, symmetric, deliberately not transitive."""
    match t1, t2:
        case (THole(), _) | (_, THole()):
            return True
        case Num(), Num():
            return True
        case Arrow(d1, c1), Arrow(d2, c2):
            return consistent(d1, d2) and consistent(c1, c2)
        case _:
            return False


def matched_arrow(t: HTyp) -> tuple[HTyp, HTyp] | None:
    """The arrow structure a type presents for application, if any."""
    match t:
        case Arrow(domain, codomain):
            return (domain, codomain)
        case THole():
            return (THole(), THole())
        case _:
            return None


def synthesize(ctx: TypeCtx, e: HExp) -> HTyp:
    match e:
        #  x : t in ctx
        #  -------------
        #  ctx |- x => t
        case Var(name):
            if name not in ctx:
                raise UnboundVariable(name)
            return ctx[name]

        #  ctx |- e <= t
        #  -------------------
        #  ctx |- (e : t) => t
        case Asc(subject, ann):
            analyze(ctx, subject, ann)
            return ann

        case NumLit(_):
            return Num()

        #  ctx |- l <= num   ctx |- r <= num
        #  ---------------------------------
        #  ctx |- l + r => num
        case Plus(left, right):
            analyze(ctx, left, Num())
            analyze(ctx, right, Num())
            return Num()

        #  ctx |- f => t   t |> t1 -> t2   ctx |- a <= t1
        #  ----------------------------------------------
        #  ctx |- f a => t2
        case Ap(fn, arg):
            tf = synthesize(ctx, fn)
            arrow = matched_arrow(tf)
            if arrow is None:
                raise NotAFunction(tf)
            analyze(ctx, arg, arrow[0])
            return arrow[1]

        case EHole(_):
            return THole()

        # The marked subterm must itself synthesize; the mark quarantines a
        # type inconsistency with the position, not arbitrary breakage.
        case NEHole(_, subject):
            synthesize(ctx, subject)
            return THole()

        case Lam(_, _):
            raise NoSynthRule("unannotated lambda in synthetic position")

    raise TypeError(f"not an expression: {e!r}")


def analyze(ctx: TypeCtx, e: HExp, t: HTyp) -> None:
    match e:
        #  t |> t1 -> t2   ctx, x:t1 |- body <= t2
        #  ---------------------------------------
        #  ctx |- \x. body <= t
        case Lam(binder, body):
            arrow = matched_arrow(t)
            if arrow is None:
                raise LamAgainstNonArrow(t)
            analyze({**ctx, binder: arrow[0]}, body, arrow[1])

        #  ctx |- e => t'   t' ~ t      (subsumption)
        #  ----------------------------
        #  ctx |- e <= t
        case _:
            found = synthesize(ctx, e)
            if not consistent(t, found):
                raise InconsistentTypes(t, found)


@dataclass(frozen=True)
class CursorInfo:
    """What the inspector shows: the cursor's typing mode and in-scope bindings.

    mode is "synthesized" (type holds the synthesized type),
    "analyzed_against" (type holds the expected type), or "type_position"
    (cursor inside an ascription annotation; type is None).
    """

    mode: str
    type: HTyp | None
    ctx: dict[str, HTyp]


def cursor_info(ctx: TypeCtx, z: ZExp) -> CursorInfo:
    """Typing mode, type, and context at the cursor of a meaningful state."""
    synthesize(ctx, z.root)  # the root must be meaningful; errors propagate
    scope = dict(ctx)
    node: HExp = z.root
    goal: HTyp | None = None  # expected type when in an analytic position
    analytic = False
    for step in z.path:
        if analytic and isinstance(node, Lam):
            arrow = matched_arrow(goal)  # root check guarantees a match
            scope = {**scope, node.binder: arrow[0]}
            node, goal, analytic = node.body, arrow[1], True
            continue
        # Everything else distributes modes by its synthesis rule, whether it
        # sits in synthetic position or under subsumption.
        match node:
            case Ap(fn, arg):
                if step == 0:
                    node, goal, analytic = fn, None, False
                else:
                    domain = matched_arrow(synthesize(scope, fn))[0]
                    node, goal, analytic = arg, domain, True
            case Plus(left, right):
                node, goal, analytic = (left if step == 0 else right), Num(), True
            case Asc(subject, ann):
                if step == 0:
                    node, goal, analytic = subject, ann, True
                else:
                    return CursorInfo("type_position", None, scope)
            case NEHole(_, subject):
                node, goal, analytic = subject, None, False
            case _:
                raise TypeError(f"path descends into a leaf: {node!r}")
    if analytic:
        return CursorInfo("analyzed_against", goal, scope)
    return CursorInfo("synthesized", synthesize(scope, node), scope)
