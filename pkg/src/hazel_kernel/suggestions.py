"""Action suggestions: enumerate what is valid at the cursor, rank by a
trained categorical model that cannot give weight to invalid actions.

The model is deliberately small: counts of (cursor context, action class)
pairs with additive smoothing. Everything interesting lives in the guarantee
that scoring starts from enumerate_valid, so invalid actions get zero mass
by construction rather than by training luck.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

from .actions import (
    Action, Child, Construct, Del, Finish, InvalidAction, Move, NextHole,
    Parent, PrevHole, SAp, SArrow, SAsc, SLam, SNEHole, SNum, SNumLit, SPlus,
    SVar, apply_action, format_action,
)
from .statics import StaticError, TypeCtx, cursor_info
from .syntax import (
    Ap, Arrow, Asc, EHole, HTyp, KernelError, Lam, NEHole, Num, NumLit,
    Plus, THole, Var, ZExp, cursor_node, node_at,
)

__all__ = [
    "SuggestionContext", "SuggestionModel", "Suggestion", "MalformedTrace",
    "context_of", "action_class", "action_alphabet", "enumerate_valid",
    "train", "rank", "save_model", "load_model",
]


class MalformedTrace(KernelError):
    code = "E_MALFORMED_TRACE"


@dataclass(frozen=True)
class SuggestionContext:
    """What the model conditions on: how the cursor position is typed and
    what sits at and above it. No hole names, no depths: traces recorded on
    one program transfer to any other."""

    mode: str    # synthesized | analyzed_against | type_position
    goal: str    # num | arrow | hole | n/a
    node: str    # constructor name at the cursor
    parent: str  # constructor name above it, or "root"


@dataclass(frozen=True)
class Suggestion:
    action: Action
    probability: float


@dataclass
class SuggestionModel:
    counts: dict[tuple[SuggestionContext, str], int] = field(
        default_factory=dict)
    alpha: float = 1.0


_CTOR_NAMES = {
    Var: "var", Lam: "lam", Ap: "ap", NumLit: "num", Plus: "plus",
    Asc: "asc", EHole: "ehole", NEHole: "nehole",
    Num: "numtype", Arrow: "arrow", THole: "thole",
}


def _type_ctor(t: HTyp) -> str:
    return {Num: "num", Arrow: "arrow", THole: "hole"}[type(t)]


def context_of(ctx: TypeCtx, z: ZExp) -> SuggestionContext:
    info = cursor_info(ctx, z)
    goal = "n/a" if info.mode == "type_position" else _type_ctor(info.type)
    node = _CTOR_NAMES[type(cursor_node(z))]
    parent = "root" if not z.path else \
        _CTOR_NAMES[type(node_at(z.root, z.path[:-1]))]
    return SuggestionContext(info.mode, goal, node, parent)


def action_class(a: Action) -> str:
    match a:
        case Move(Child(_)):
            return "move-child"
        case Move(Parent()):
            return "move-parent"
        case Move(NextHole()):
            return "move-nexthole"
        case Move(PrevHole()):
            return "move-prevhole"
        case Del():
            return "del"
        case Finish():
            return "finish"
        case Construct(shape):
            return {
                SAsc: "construct-asc", SVar: "construct-var",
                SLam: "construct-lam", SAp: "construct-ap",
                SNumLit: "construct-num", SPlus: "construct-plus",
                SNEHole: "construct-nehole", SArrow: "construct-arrow",
                SNum: "construct-numtype",
            }[type(shape)]
    raise TypeError(f"not an action: {a!r}")


def action_alphabet(ctx: TypeCtx, z: ZExp) -> list[Action]:
    """The finite pool suggestions are drawn from: every move, both hole
    edits, and one representative per shape (literal 0, binder x), plus one
    variable shape per name in scope at the cursor."""
    info = cursor_info(ctx, z)
    alphabet: list[Action] = [
        Move(Child(0)), Move(Child(1)), Move(Parent()),
        Move(NextHole()), Move(PrevHole()),
        Del(), Finish(),
        Construct(SAsc()), Construct(SLam("x")), Construct(SAp()),
        Construct(SNumLit(0)), Construct(SPlus()), Construct(SNEHole()),
        Construct(SArrow()), Construct(SNum()),
    ]
    alphabet += [Construct(SVar(name)) for name in sorted(info.ctx)]
    return alphabet


def enumerate_valid(ctx: TypeCtx, z: ZExp) -> list[Action]:
    valid = []
    for a in action_alphabet(ctx, z):
        try:
            apply_action(ctx, z, a)
        except InvalidAction:
            continue
        valid.append(a)
    return valid


def train(traces: Iterable[tuple[TypeCtx, ZExp, list[Action]]],
          alpha: float = 1.0) -> SuggestionModel:
    """Count (context, action-class) pairs over replayed traces.

    Each trace is (typing context, starting state, actions); replay both
    derives the per-step context and checks the trace is real. Counting
    uses the state before each action."""
    counts: dict[tuple[SuggestionContext, str], int] = {}
    for n, (tctx, start, actions) in enumerate(traces):
        z = start
        for a in actions:
            try:
                c = context_of(tctx, z)
                z = apply_action(tctx, z, a)
            except (InvalidAction, StaticError) as err:
                raise MalformedTrace(
                    f"trace {n}: {format_action(a)} failed: {err}") from err
            key = (c, action_class(a))
            counts[key] = counts.get(key, 0) + 1
    return SuggestionModel(counts, alpha)


def rank(model: SuggestionModel, ctx: TypeCtx, z: ZExp,
         k: int) -> list[Suggestion]:
    """Top-k valid actions by smoothed probability.

    P(a) = (count(context, class(a)) + alpha) / sum over the valid set, so
    the full valid set always carries total mass 1 and anything invalid
    carries none. Ties break on the action text, ascending."""
    if k < 1:
        raise ValueError("k must be at least 1")
    valid = enumerate_valid(ctx, z)
    if not valid:
        return []
    c = context_of(ctx, z)
    weights = [model.counts.get((c, action_class(a)), 0) + model.alpha
               for a in valid]
    total = sum(weights)
    scored = [Suggestion(a, w / total) for a, w in zip(valid, weights)]
    scored.sort(key=lambda s: (-s.probability, format_action(s.action)))
    return scored[:k]


# --------------------------------------------------------------------------
# Persistence: a flat table, one row per (context, class) cell


def save_model(model: SuggestionModel, fp: IO[str]) -> None:
    fp.write(f"alpha\t{model.alpha!r}\n")
    rows = sorted(
        (",".join((c.mode, c.goal, c.node, c.parent)), cls, n)
        for (c, cls), n in model.counts.items())
    for ctx_text, cls, n in rows:
        fp.write(f"{ctx_text}\t{cls}\t{n}\n")


def load_model(fp: IO[str]) -> SuggestionModel:
    lines = [line.rstrip("\n") for line in fp if line.strip()]
    if not lines or not lines[0].startswith("alpha\t"):
        raise MalformedTrace("model file must start with an alpha row")
    try:
        alpha = float(lines[0].split("\t", 1)[1])
    except ValueError as err:
        raise MalformedTrace(f"bad alpha: {lines[0]!r}") from err
    if alpha <= 0:
        raise MalformedTrace("alpha must be positive")
    counts: dict[tuple[SuggestionContext, str], int] = {}
    for line in lines[1:]:
        parts = line.split("\t")
        ctx_parts = parts[0].split(",") if parts else []
        if len(parts) != 3 or len(ctx_parts) != 4 or not parts[2].isdigit():
            raise MalformedTrace(f"bad model row: {line!r}")
        counts[(SuggestionContext(*ctx_parts), parts[1])] = int(parts[2])
    return SuggestionModel(counts, alpha)
