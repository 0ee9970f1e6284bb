"""Evaluation of incomplete programs.

Expressions evaluate to values or to indeterminate results: holes do not
block the rest of the program, they turn into hole closures recording the
environment they were reached in. Filling a hole later can therefore resume
evaluation inside those closures instead of starting over.
"""

from __future__ import annotations

from dataclasses import dataclass

from .statics import StaticError, TypeCtx, cursor_info, analyze, synthesize
from .syntax import (
    Ap, Asc, EHole, HExp, HoleName, KernelError, Lam, NEHole, NumLit, Plus,
    THole, TokenStream, Var, ZExp, hole_names, holes_of, parse_expr_from,
    replace_at, serialize,
)

__all__ = [
    "VNum", "VClosure", "IHole", "INEHole", "IAp", "IPlus", "Result",
    "Environment",
    "EvalBudgetExceeded", "UnknownHole", "IllTypedFiller",
    "DuplicateHoleName",
    "DEFAULT_FUEL", "evaluate", "fill", "resume",
    "MachineState", "initial_state", "step", "run_machine",
    "serialize_result", "parse_result",
]


class EvalBudgetExceeded(KernelError):
    code = "E_EVAL_BUDGET"


class UnknownHole(KernelError):
    code = "E_UNKNOWN_HOLE"


class IllTypedFiller(KernelError):
    code = "E_ILL_TYPED_FILLER"


class DuplicateHoleName(KernelError):
    code = "E_DUP_HOLE"


# --------------------------------------------------------------------------
# Results

Environment = dict[str, "Result"]


@dataclass(frozen=True)
class VNum:
    n: int


@dataclass(frozen=True)
class VClosure:
    binder: str
    body: HExp
    env: Environment


@dataclass(frozen=True)
class IHole:
    """An empty hole reached during evaluation, with its environment."""

    u: HoleName
    env: Environment


@dataclass(frozen=True)
class INEHole:
    """A mark whose subject evaluated underneath it; the mark persists."""

    u: HoleName
    inner: "Result"
    env: Environment


@dataclass(frozen=True)
class IAp:
    """An application whose function part never became a closure."""

    fn: "Result"
    arg: "Result"


@dataclass(frozen=True)
class IPlus:
    """An addition whose operands never became two numbers."""

    left: "Result"
    right: "Result"


Result = VNum | VClosure | IHole | INEHole | IAp | IPlus


# Enough for anything the generators build; the type hole admits genuinely
# diverging self-application, so evaluation cannot be fuel-free.
DEFAULT_FUEL = 100_000


# --------------------------------------------------------------------------
# Big-step evaluation


def evaluate(e: HExp, env: Environment | None = None,
             fuel: int = DEFAULT_FUEL) -> Result:
    """Evaluate under env (empty by default), left to right, call by value.

    Every hole the evaluator reaches is recorded with the environment in
    force at that point, so results around holes stay inspectable and
    resumable. Raises EvalBudgetExceeded after fuel recursion steps.
    """
    remaining = fuel

    def go(e: HExp, env: Environment) -> Result:
        nonlocal remaining
        remaining -= 1
        if remaining < 0:
            raise EvalBudgetExceeded(f"evaluation exceeded {fuel} steps")
        match e:
            case Var(name):
                return env[name]
            case NumLit(n):
                return VNum(n)
            case Lam(binder, body):
                return VClosure(binder, body, dict(env))
            case Asc(subject, _):
                return go(subject, env)
            case EHole(u):
                return IHole(u, dict(env))
            case NEHole(u, subject):
                return INEHole(u, go(subject, env), dict(env))
            case Plus(left, right):
                lv, rv = go(left, env), go(right, env)
                if isinstance(lv, VNum) and isinstance(rv, VNum):
                    return VNum(lv.n + rv.n)
                return IPlus(lv, rv)
            case Ap(fn, arg):
                fv, av = go(fn, env), go(arg, env)
                if isinstance(fv, VClosure):
                    return go(fv.body, {**fv.env, fv.binder: av})
                return IAp(fv, av)
        raise TypeError(f"not an expression: {e!r}")

    return go(e, {} if env is None else env)


# --------------------------------------------------------------------------
# Small-step machine

# One focus plus a stack of pending frames; each transition is a single
# deterministic step, so agreement with evaluate checks normal-form
# uniqueness from an independent angle.


@dataclass(frozen=True)
class _FApArg:
    arg: HExp
    env: Environment


@dataclass(frozen=True)
class _FApCall:
    fn: Result


@dataclass(frozen=True)
class _FPlusRight:
    right: HExp
    env: Environment


@dataclass(frozen=True)
class _FPlusAdd:
    left: Result


@dataclass(frozen=True)
class _FMark:
    u: HoleName
    env: Environment


_Frame = _FApArg | _FApCall | _FPlusRight | _FPlusAdd | _FMark


@dataclass(frozen=True)
class MachineState:
    focus: HExp | Result
    env: Environment          # meaningful only while focus is an HExp
    returning: bool
    stack: tuple[_Frame, ...]


def initial_state(e: HExp, env: Environment | None = None) -> MachineState:
    return MachineState(e, {} if env is None else env, False, ())


def step(state: MachineState) -> MachineState | None:
    """One transition, or None when the state is final."""
    if not state.returning:
        e, env, stack = state.focus, state.env, state.stack
        match e:
            case Var(name):
                return MachineState(env[name], {}, True, stack)
            case NumLit(n):
                return MachineState(VNum(n), {}, True, stack)
            case Lam(binder, body):
                return MachineState(VClosure(binder, body, dict(env)), {},
                                    True, stack)
            case Asc(subject, _):
                return MachineState(subject, env, False, stack)
            case EHole(u):
                return MachineState(IHole(u, dict(env)), {}, True, stack)
            case NEHole(u, subject):
                return MachineState(subject, env, False,
                                    (_FMark(u, dict(env)),) + stack)
            case Plus(left, right):
                return MachineState(left, env, False,
                                    (_FPlusRight(right, env),) + stack)
            case Ap(fn, arg):
                return MachineState(fn, env, False,
                                    (_FApArg(arg, env),) + stack)
        raise TypeError(f"not an expression: {e!r}")

    if not state.stack:
        return None
    r, (frame, *rest) = state.focus, state.stack
    rest = tuple(rest)
    match frame:
        case _FApArg(arg, env):
            return MachineState(arg, env, False, (_FApCall(r),) + rest)
        case _FApCall(fn):
            if isinstance(fn, VClosure):
                return MachineState(fn.body, {**fn.env, fn.binder: r},
                                    False, rest)
            return MachineState(IAp(fn, r), {}, True, rest)
        case _FPlusRight(right, env):
            return MachineState(right, env, False, (_FPlusAdd(r),) + rest)
        case _FPlusAdd(left):
            if isinstance(left, VNum) and isinstance(r, VNum):
                return MachineState(VNum(left.n + r.n), {}, True, rest)
            return MachineState(IPlus(left, r), {}, True, rest)
        case _FMark(u, env):
            return MachineState(INEHole(u, r, env), {}, True, rest)
    raise TypeError(f"not a frame: {frame!r}")


def run_machine(e: HExp, env: Environment | None = None,
                fuel: int = DEFAULT_FUEL) -> Result:
    state = initial_state(e, env)
    for _ in range(fuel):
        nxt = step(state)
        if nxt is None:
            assert state.returning
            return state.focus
        state = nxt
    raise EvalBudgetExceeded(f"machine exceeded {fuel} steps")


# --------------------------------------------------------------------------
# Fill and resume


def fill(e: HExp, u: HoleName, filler: HExp, ctx: TypeCtx | None = None,
         ) -> HExp:
    """Replace the empty hole named u by filler.

    The filler is checked against the type and scope the hole position
    expects; it may mention variables bound around the hole (deliberate
    capture: that is what makes the recorded environments useful). Hole
    names inside the filler must not clash with names remaining in e.
    """
    ctx = {} if ctx is None else ctx
    path = None
    for name, p, kind in holes_of(e):
        if name == u and kind == "empty":
            path = p
            break
    if path is None:
        raise UnknownHole(f"no empty hole named {u}")

    info = cursor_info(ctx, ZExp(e, path))
    expected = info.type if info.mode == "analyzed_against" else THole()
    try:
        analyze(info.ctx, filler, expected)
    except StaticError as err:
        raise IllTypedFiller(f"filler does not fit hole {u}: {err}") from err

    clashes = hole_names(filler) & (hole_names(e) - {u})
    if clashes:
        raise DuplicateHoleName(
            f"filler reuses hole names {sorted(clashes)}")

    filled = replace_at(e, path, filler)
    # a filler that only analyzes (a bare lambda) can still break a
    # synthetic hole position; the whole program is the final word
    try:
        synthesize(ctx, filled)
    except StaticError as err:
        raise IllTypedFiller(f"filler does not fit hole {u}: {err}") from err
    return filled


def _fill_everywhere(e: HExp, u: HoleName, filler: HExp) -> HExp:
    """Unchecked textual fill, for closure bodies during resume."""
    match e:
        case EHole(name) if name == u:
            return filler
        case Lam(binder, body):
            return Lam(binder, _fill_everywhere(body, u, filler))
        case Ap(fn, arg):
            return Ap(_fill_everywhere(fn, u, filler),
                      _fill_everywhere(arg, u, filler))
        case Plus(left, right):
            return Plus(_fill_everywhere(left, u, filler),
                        _fill_everywhere(right, u, filler))
        case Asc(subject, ann):
            return Asc(_fill_everywhere(subject, u, filler), ann)
        case NEHole(name, subject):
            return NEHole(name, _fill_everywhere(subject, u, filler))
    return e


def resume(r: Result, u: HoleName, filler: HExp,
           fuel: int = DEFAULT_FUEL) -> Result:
    """Continue evaluation where it stopped at hole u.

    Every hole closure named u evaluates the filler in its recorded
    environment; enclosing indeterminate forms re-normalize (an application
    whose head became a closure now reduces, an addition whose operands
    became numbers now adds). Results not mentioning u come back unchanged,
    so resuming after an already-eliminated hole is harmless.
    resume(evaluate(e), u, f) equals evaluate(fill(e, u, f)).
    """

    def through_env(env: Environment) -> Environment:
        return {name: go(v) for name, v in env.items()}

    def go(r: Result) -> Result:
        match r:
            case VNum(_):
                return r
            case VClosure(binder, body, env):
                return VClosure(binder, _fill_everywhere(body, u, filler),
                                through_env(env))
            case IHole(name, env):
                env = through_env(env)
                if name == u:
                    return evaluate(filler, env, fuel)
                return IHole(name, env)
            case INEHole(name, inner, env):
                return INEHole(name, go(inner), through_env(env))
            case IAp(fn, arg):
                fn, arg = go(fn), go(arg)
                if isinstance(fn, VClosure):
                    return evaluate(fn.body, {**fn.env, fn.binder: arg}, fuel)
                return IAp(fn, arg)
            case IPlus(left, right):
                left, right = go(left), go(right)
                if isinstance(left, VNum) and isinstance(right, VNum):
                    return VNum(left.n + right.n)
                return IPlus(left, right)
        raise TypeError(f"not a result: {r!r}")

    return go(r)


# --------------------------------------------------------------------------
# Serialization


def serialize_env(env: Environment) -> str:
    entries = " ".join(f"({name} {serialize_result(env[name])})"
                       for name in sorted(env))
    return f"({entries})" if entries else "()"


def serialize_result(r: Result) -> str:
    match r:
        case VNum(n):
            return f"(num {n})"
        case VClosure(binder, body, env):
            return f"(vclosure {binder} {serialize(body)} {serialize_env(env)})"
        case IHole(u, env):
            return f"(ihole {u} {serialize_env(env)})"
        case INEHole(u, inner, env):
            return f"(inehole {u} {serialize_result(inner)} {serialize_env(env)})"
        case IAp(fn, arg):
            return f"(ap {serialize_result(fn)} {serialize_result(arg)})"
        case IPlus(left, right):
            return f"(plus {serialize_result(left)} {serialize_result(right)})"
    raise TypeError(f"not a result: {r!r}")


def _parse_env_from(ts: TokenStream) -> Environment:
    ts.expect("(")
    env: Environment = {}
    while True:
        tok = ts.peek()
        if tok is None:
            raise ts.error(("(", ")"))
        if tok.text == ")":
            ts.expect(")")
            return env
        ts.expect("(")
        name_tok = ts.next(("identifier",))
        env[name_tok.text] = _parse_result_from(ts)
        ts.expect(")")


def _parse_nat(ts: TokenStream) -> int:
    tok = ts.next(("hole name",))
    if not tok.text.isdigit():
        raise ts.error(("hole name",), tok)
    return int(tok.text)


def _parse_result_from(ts: TokenStream) -> Result:
    ts.expect("(")
    head = ts.next(("num", "vclosure", "ihole", "inehole", "ap", "plus"))
    match head.text:
        case "num":
            tok = ts.next(("integer",))
            if not tok.text.lstrip("-").isdigit():
                raise ts.error(("integer",), tok)
            r: Result = VNum(int(tok.text))
        case "vclosure":
            binder = ts.next(("identifier",)).text
            body = parse_expr_from(ts)
            r = VClosure(binder, body, _parse_env_from(ts))
        case "ihole":
            r = IHole(_parse_nat(ts), _parse_env_from(ts))
        case "inehole":
            u = _parse_nat(ts)
            inner = _parse_result_from(ts)
            r = INEHole(u, inner, _parse_env_from(ts))
        case "ap":
            r = IAp(_parse_result_from(ts), _parse_result_from(ts))
        case "plus":
            r = IPlus(_parse_result_from(ts), _parse_result_from(ts))
        case _:
            raise ts.error(("num", "vclosure", "ihole", "inehole", "ap",
                            "plus"), head)
    ts.expect(")")
    return r


def parse_result(text: str) -> Result:
    ts = TokenStream(text)
    r = _parse_result_from(ts)
    if not ts.at_end():
        raise ts.error(("end of input",))
    return r
