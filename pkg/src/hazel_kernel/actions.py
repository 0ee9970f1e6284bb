"""The calculus of edit actions: movement, construction, deletion, finishing.

Every action application either fails (InvalidAction, state unchanged) or
produces a successor whose erasure is statically meaningful again. The
construction rules never reject an edit the user can meaningfully make:
when the constructed form would not fit its position, the inconsistent part
is quarantined inside a fresh non-empty hole instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .statics import (
    StaticError, TypeCtx, analyze, consistent, cursor_info, matched_arrow,
    synthesize,
)
from .syntax import (
    Ap, Arrow, Asc, EHole, HExp, HoleNamer, HTyp, KernelError, Lam, NEHole,
    Num, NumLit, ParseError, Path, Plus, THole, Var, ZExp, cursor_node,
    child_count, holes_of, is_identifier, max_hole_name, replace_at,
)

__all__ = [
    "Child", "Parent", "NextHole", "PrevHole", "Direction",
    "SAsc", "SVar", "SLam", "SAp", "SNumLit", "SPlus", "SNEHole", "SArrow",
    "SNum", "Shape",
    "Move", "Construct", "Del", "Finish", "Action",
    "Prim", "Seq", "Repeat", "OrElse", "Macro",
    "InvalidAction", "BudgetExhausted", "NotWellTyped",
    "apply_action", "run_macro", "construct_script",
    "format_action", "parse_action", "format_macro", "parse_macro",
]


class InvalidAction(KernelError):
    code = "E_INVALID_ACTION"


class BudgetExhausted(KernelError):
    code = "E_BUDGET"


class NotWellTyped(KernelError):
    code = "E_NOT_WELL_TYPED"


# --------------------------------------------------------------------------
# Actions


@dataclass(frozen=True)
class Child:
    k: int


@dataclass(frozen=True)
class Parent:
    pass


@dataclass(frozen=True)
class NextHole:
    pass


@dataclass(frozen=True)
class PrevHole:
    pass


Direction = Child | Parent | NextHole | PrevHole


@dataclass(frozen=True)
class SAsc:
    pass


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SLam:
    binder: str


@dataclass(frozen=True)
class SAp:
    pass


@dataclass(frozen=True)
class SNumLit:
    n: int


@dataclass(frozen=True)
class SPlus:
    pass


@dataclass(frozen=True)
class SNEHole:
    pass


@dataclass(frozen=True)
class SArrow:
    pass


@dataclass(frozen=True)
class SNum:
    pass


Shape = SAsc | SVar | SLam | SAp | SNumLit | SPlus | SNEHole | SArrow | SNum


@dataclass(frozen=True)
class Move:
    direction: Direction


@dataclass(frozen=True)
class Construct:
    shape: Shape


@dataclass(frozen=True)
class Del:
    pass


@dataclass(frozen=True)
class Finish:
    pass


Action = Move | Construct | Del | Finish


# --------------------------------------------------------------------------
# Text encoding (used by the protocol, trace files, and rank tie-breaking)


def format_action(a: Action) -> str:
    match a:
        case Move(Child(k)):
            return f"move child {k}"
        case Move(Parent()):
            return "move parent"
        case Move(NextHole()):
            return "move nexthole"
        case Move(PrevHole()):
            return "move prevhole"
        case Construct(SAsc()):
            return "construct asc"
        case Construct(SVar(name)):
            return f"construct var {name}"
        case Construct(SLam(binder)):
            return f"construct lam {binder}"
        case Construct(SAp()):
            return "construct ap"
        case Construct(SNumLit(n)):
            return f"construct num {n}"
        case Construct(SPlus()):
            return "construct plus"
        case Construct(SNEHole()):
            return "construct nehole"
        case Construct(SArrow()):
            return "construct arrow"
        case Construct(SNum()):
            return "construct numtype"
        case Del():
            return "del"
        case Finish():
            return "finish"
    raise TypeError(f"not an action: {a!r}")


def _bad_action(text: str) -> ParseError:
    return ParseError(f"bad action text: {text!r}", 1, 1)


def parse_action(text: str) -> Action:
    words = text.split()
    match words:
        case ["move", "child", k] if k.isdigit():
            return Move(Child(int(k)))
        case ["move", "parent"]:
            return Move(Parent())
        case ["move", "nexthole"]:
            return Move(NextHole())
        case ["move", "prevhole"]:
            return Move(PrevHole())
        case ["construct", "asc"]:
            return Construct(SAsc())
        case ["construct", "var", name] if is_identifier(name):
            return Construct(SVar(name))
        case ["construct", "lam", binder] if is_identifier(binder):
            return Construct(SLam(binder))
        case ["construct", "ap"]:
            return Construct(SAp())
        case ["construct", "num", n] if n.lstrip("-").isdigit():
            return Construct(SNumLit(int(n)))
        case ["construct", "plus"]:
            return Construct(SPlus())
        case ["construct", "nehole"]:
            return Construct(SNEHole())
        case ["construct", "arrow"]:
            return Construct(SArrow())
        case ["construct", "numtype"]:
            return Construct(SNum())
        case ["del"]:
            return Del()
        case ["finish"]:
            return Finish()
    raise _bad_action(text)


# --------------------------------------------------------------------------
# Application


def _derived_namer(z: ZExp) -> HoleNamer:
    top = max_hole_name(z.root)
    return HoleNamer(0 if top is None else top + 1)


def apply_action(ctx: TypeCtx, z: ZExp, a: Action,
                 namer: HoleNamer | None = None) -> ZExp:
    """One checked edit step; fresh hole names come from namer when given.

    Without a namer, fresh names are derived from the largest name present,
    which keeps speculative application (e.g. validity enumeration) from
    consuming session names.
    """
    if namer is None:
        namer = _derived_namer(z)
    match a:
        case Move(direction):
            return _move(z, direction)
        case Del():
            return _construct_replacement(ctx, z, namer)
        case Finish():
            return _finish(ctx, z)
        case Construct(shape):
            return _construct(ctx, z, shape, namer)
    raise TypeError(f"not an action: {a!r}")


def _move(z: ZExp, direction: Direction) -> ZExp:
    match direction:
        case Child(k):
            node = cursor_node(z)
            if not 0 <= k < child_count(node):
                raise InvalidAction(f"no child {k} at cursor")
            return ZExp(z.root, z.path + (k,))
        case Parent():
            if not z.path:
                raise InvalidAction("cursor already at root")
            return ZExp(z.root, z.path[:-1])
        case NextHole():
            return _hole_move(z, forward=True)
        case PrevHole():
            return _hole_move(z, forward=False)
    raise TypeError(f"not a direction: {direction!r}")


def _hole_move(z: ZExp, forward: bool) -> ZExp:
    # Pre-order document order coincides with tuple order on paths.
    holes = [p for _, p, _ in holes_of(z.root)]
    if not holes:
        raise InvalidAction("no holes to move to")
    if forward:
        after = [p for p in holes if p > z.path]
        return ZExp(z.root, after[0] if after else holes[0])
    before = [p for p in holes if p < z.path]
    return ZExp(z.root, before[-1] if before else holes[-1])


def _validated(ctx: TypeCtx, root: HExp, path: Path, reason: str) -> ZExp:
    try:
        synthesize(ctx, root)
    except StaticError as err:
        raise InvalidAction(f"{reason}: {err}") from err
    return ZExp(root, path)


def _construct_replacement(ctx: TypeCtx, z: ZExp, namer: HoleNamer) -> ZExp:
    """Del: a fresh empty hole in expression position, THole in type position."""
    node = cursor_node(z)
    if isinstance(node, (Num, Arrow, THole)):
        new: HExp | HTyp = THole()
    else:
        new = EHole(namer.fresh())
    root = replace_at(z.root, z.path, new)
    return _validated(ctx, root, z.path, "deletion breaks the program")


def _finish(ctx: TypeCtx, z: ZExp) -> ZExp:
    node = cursor_node(z)
    if not isinstance(node, NEHole):
        raise InvalidAction("finish requires the cursor on a non-empty hole")
    # the mark is only discharged once its subject synthesizes a type that
    # fits the position; a subject that merely analyzes does not qualify
    try:
        info = cursor_info(ctx, z)
        synthesize(info.ctx, node.subject)
    except StaticError as err:
        raise InvalidAction(f"subject does not synthesize: {err}") from err
    root = replace_at(z.root, z.path, node.subject)
    return _validated(ctx, root, z.path, "subject still inconsistent here")


def _construct(ctx: TypeCtx, z: ZExp, shape: Shape, namer: HoleNamer) -> ZExp:
    node = cursor_node(z)
    in_type = isinstance(node, (Num, Arrow, THole))

    if isinstance(shape, (SArrow, SNum)):
        if not in_type:
            raise InvalidAction("type shapes need the cursor in a type annotation")
        if isinstance(shape, SNum):
            new: HTyp = Num()
            rel: Path = ()
        else:
            # wrap the current type as the domain; edit continues at the codomain
            new = Arrow(node, THole())
            rel = (1,)
        root = replace_at(z.root, z.path, new)
        return _validated(ctx, root, z.path + rel,
                          "type edit breaks the ascribed subject")
    if in_type:
        raise InvalidAction("expression shapes need the cursor on an expression")

    info = cursor_info(ctx, z)
    goal = info.type if info.mode == "analyzed_against" else None
    scope = info.ctx
    candidate, rel = _candidate(scope, node, shape, goal, namer)

    # A candidate that will not fit an analytic position is quarantined whole.
    # Bare lambdas skip the check: they were built to analyze against goal.
    if goal is not None and not isinstance(candidate, Lam):
        if not consistent(synthesize(scope, candidate), goal):
            candidate = NEHole(namer.fresh(), candidate)
            rel = (0,) + rel
    root = replace_at(z.root, z.path, candidate)
    return _validated(ctx, root, z.path + rel, "construction breaks the program")


def _synthesizable(scope: TypeCtx, e: HExp) -> HExp:
    """e itself when it synthesizes; otherwise (a bare lambda) ascribe it."""
    try:
        synthesize(scope, e)
        return e
    except StaticError:
        return Asc(e, THole())


def _candidate(scope: TypeCtx, node: HExp, shape: Shape, goal: HTyp | None,
               namer: HoleNamer) -> tuple[HExp, Path]:
    """The replacement term for the cursor node plus the cursor's new position
    relative to it. Leaf and lambda shapes fill empty holes; the rest wrap."""
    match shape:
        case SVar(name):
            if not isinstance(node, EHole):
                raise InvalidAction("variables fill empty holes")
            if name not in scope:
                raise InvalidAction(f"variable {name} is not in scope")
            return Var(name), ()
        case SNumLit(n):
            if not isinstance(node, EHole):
                raise InvalidAction("literals fill empty holes")
            return NumLit(n), ()
        case SLam(binder):
            if not isinstance(node, EHole):
                raise InvalidAction("lambdas fill empty holes")
            if not is_identifier(binder):
                raise InvalidAction(f"bad binder {binder!r}")
            body = EHole(namer.fresh())
            if goal is not None:
                if matched_arrow(goal) is not None:
                    return Lam(binder, body), (0,)
                # no arrow to match: mark an ascribed lambda so the state
                # stays meaningful at this position
                return NEHole(namer.fresh(),
                              Asc(Lam(binder, body), THole())), (0, 0, 0)
            # synthetic position: bare lambdas do not synthesize, so route
            # through an ascription announcing a function
            return Asc(Lam(binder, body), Arrow(THole(), THole())), (0, 0)
        case SAsc():
            return Asc(node, THole()), (1,)
        case SAp():
            head = _synthesizable(scope, node)
            if matched_arrow(synthesize(scope, head)) is None:
                head = NEHole(namer.fresh(), head)
            return Ap(head, EHole(namer.fresh())), (1,)
        case SPlus():
            try:
                analyze(scope, node, Num())
                left = node
            except StaticError:
                left = NEHole(namer.fresh(), _synthesizable(scope, node))
            return Plus(left, EHole(namer.fresh())), (1,)
        case SNEHole():
            return NEHole(namer.fresh(), _synthesizable(scope, node)), ()
    raise TypeError(f"not an expression shape: {shape!r}")


# --------------------------------------------------------------------------
# Macros


@dataclass(frozen=True)
class Prim:
    action: Action


@dataclass(frozen=True)
class Seq:
    first: "Macro"
    second: "Macro"


@dataclass(frozen=True)
class Repeat:
    """Repeat the body until it fails or revisits an earlier state."""

    body: "Macro"


@dataclass(frozen=True)
class OrElse:
    first: "Macro"
    second: "Macro"


Macro = Prim | Seq | Repeat | OrElse


def run_macro(ctx: TypeCtx, z: ZExp, m: Macro, budget: int = 1000,
              namer: HoleNamer | None = None) -> tuple[ZExp, list[Action]]:
    """Execute a macro; returns the final state and the primitive trace.

    The trace replays to the same final state. Repeat stops at the first
    failing iteration, or rolls back an iteration that lands on a state seen
    before (cyclic hole navigation would otherwise never fail).
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if namer is None:
        namer = _derived_namer(z)
    spent = 0

    def prim(state: ZExp, a: Action) -> ZExp:
        nonlocal spent
        spent += 1
        if spent > budget:
            raise BudgetExhausted(f"macro exceeded {budget} primitive steps")
        return apply_action(ctx, state, a, namer)

    def go(state: ZExp, macro: Macro) -> tuple[ZExp, list[Action]]:
        match macro:
            case Prim(action):
                return prim(state, action), [action]
            case Seq(first, second):
                state1, trace1 = go(state, first)
                state2, trace2 = go(state1, second)
                return state2, trace1 + trace2
            case OrElse(first, second):
                try:
                    return go(state, first)
                except InvalidAction:
                    return go(state, second)
            case Repeat(body):
                seen = {state}
                trace: list[Action] = []
                while True:
                    try:
                        nxt, t = go(state, body)
                    except InvalidAction:
                        return state, trace
                    if nxt in seen:
                        return state, trace
                    seen.add(nxt)
                    state, trace = nxt, trace + t
        raise TypeError(f"not a macro: {macro!r}")

    return go(z, m)


def format_macro(m: Macro) -> str:
    match m:
        case Prim(action):
            return f"(prim {format_action(action)})"
        case Seq(first, second):
            return f"(seq {format_macro(first)} {format_macro(second)})"
        case Repeat(body):
            return f"(repeat {format_macro(body)})"
        case OrElse(first, second):
            return f"(orelse {format_macro(first)} {format_macro(second)})"
    raise TypeError(f"not a macro: {m!r}")


def parse_macro(text: str) -> Macro:
    from .syntax import TokenStream

    ts = TokenStream(text)

    def read() -> Macro:
        tok = ts.next(("(",))
        if tok.text != "(":
            raise ts.error(("(",), tok)
        head = ts.next(("prim", "seq", "repeat", "orelse"))
        match head.text:
            case "prim":
                words = []
                while ts.peek() is not None and ts.peek().text != ")":
                    words.append(ts.next(("action",)).text)
                m: Macro = Prim(parse_action(" ".join(words)))
            case "seq":
                m = Seq(read(), read())
            case "repeat":
                m = Repeat(read())
            case "orelse":
                m = OrElse(read(), read())
            case _:
                raise ts.error(("prim", "seq", "repeat", "orelse"), head)
        ts.expect(")")
        return m

    m = read()
    if not ts.at_end():
        raise ts.error(("end of input",))
    return m


# --------------------------------------------------------------------------
# Expressivity


def construct_script(e: HExp) -> list[Action]:
    """An action sequence that rebuilds e from a single empty hole.

    Replaying it from a fresh hole yields an erasure equal to e up to hole
    naming (names come from whatever allocator the replay uses)."""
    try:
        synthesize({}, e)
    except StaticError as err:
        raise NotWellTyped(str(err)) from err

    namer = HoleNamer()
    state = ZExp(EHole(namer.fresh()), ())
    script: list[Action] = []

    def do(a: Action):
        nonlocal state
        state = apply_action({}, state, a, namer)
        script.append(a)

    def into_child(k: int, build, target):
        do(Move(Parent()))
        do(Move(Child(k)))
        build(target)
        do(Move(Parent()))

    def build(target: HExp):
        # invariant: cursor on an empty hole; afterwards, cursor on the
        # root of the constructed copy of target
        match target:
            case EHole(_):
                pass
            case NumLit(n):
                do(Construct(SNumLit(n)))
            case Var(name):
                do(Construct(SVar(name)))
            case Lam(binder, body):
                do(Construct(SLam(binder)))  # cursor lands on the body hole
                build(body)
                do(Move(Parent()))
            case Plus(left, right):
                do(Construct(SPlus()))  # wraps the hole; cursor on right hole
                build(right)
                into_child(0, build, left)
            case Ap(fn, arg):
                do(Construct(SAp()))  # wraps the hole as head; cursor on arg
                build(arg)
                into_child(0, build, fn)
            case Asc(subject, ann):
                do(Construct(SAsc()))  # cursor lands on the annotation
                build_type(ann)
                into_child(0, build, subject)
            case NEHole(_, subject):
                do(Construct(SNEHole()))  # cursor stays on the new mark
                do(Move(Child(0)))
                build(subject)
                do(Move(Parent()))

    def build_type(target: HTyp):
        match target:
            case THole():
                pass
            case Num():
                do(Construct(SNum()))
            case Arrow(domain, codomain):
                do(Construct(SArrow()))  # wraps as domain; cursor on codomain
                build_type(codomain)
                into_child(0, build_type, domain)

    build(e)
    return script
