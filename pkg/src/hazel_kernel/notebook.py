"""The live notebook: ordered named cells, each a single binding, with
results kept current under edits.

Editing a cell re-evaluates that cell and exactly the cells that reach it
through free-variable references; everything else keeps its cached result.
A cell with a static error stays quarantined: it contributes neither a type
nor a value, and only its dependents feel it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .actions import Action, Macro, apply_action, run_macro
from .dynamics import (
    DuplicateHoleName, EvalBudgetExceeded, IllTypedFiller, Result,
    UnknownHole, evaluate, fill, resume,
)
from .statics import StaticError, TypeCtx, synthesize
from .syntax import (
    EHole, HExp, HoleName, HoleNamer, HTyp, InvalidPath, KernelError,
    ParseError, ZExp, erase_cursor, free_vars, hole_names, holes_of,
    is_identifier, parse_expr_from, place_cursor, serialize, TokenStream,
)

__all__ = [
    "Cell", "Notebook", "UnknownCell",
    "edit_cell", "run_macro_in_cell", "fill_and_resume_cell", "save", "load",
]


class UnknownCell(KernelError):
    code = "E_UNKNOWN_CELL"


@dataclass
class Cell:
    id: str
    name: str
    edit_state: ZExp
    cached_result: Result | None = None
    type: HTyp | None = None
    error: str | None = None


_ID_RE = re.compile(r"[A-Za-z0-9_.-]+\Z")


class Notebook:
    """Cells in order plus the session's hole-name allocator."""

    def __init__(self) -> None:
        self.cells: list[Cell] = []
        self.namer = HoleNamer()
        self._next_id = 1

    def cell(self, cell_id: str) -> Cell:
        for cell in self.cells:
            if cell.id == cell_id:
                return cell
        raise UnknownCell(f"no cell {cell_id}")

    def add_cell(self, name: str) -> Cell:
        if not is_identifier(name):
            raise ValueError(f"bad cell name: {name!r}")
        if any(c.name == name for c in self.cells):
            raise ValueError(f"duplicate cell name: {name!r}")
        cell = Cell(f"c{self._next_id}", name,
                    ZExp(EHole(self.namer.fresh()), ()))
        self._next_id += 1
        self.cells.append(cell)
        _recompute(self, {cell.id})
        return cell

    def context_before(self, cell_id: str) -> TypeCtx:
        """Types of the well-typed cells strictly before cell_id."""
        ctx: dict[str, HTyp] = {}
        for cell in self.cells:
            if cell.id == cell_id:
                return ctx
            if cell.type is not None:
                ctx[cell.name] = cell.type
        raise UnknownCell(f"no cell {cell_id}")


def _dependent_closure(nb: Notebook, cell_id: str) -> list[str]:
    """cell_id plus every later cell reaching it through free variables."""
    dirty_ids = []
    dirty_names: set[str] = set()
    seen_start = False
    for cell in nb.cells:
        if cell.id == cell_id:
            seen_start = True
            dirty_ids.append(cell.id)
            dirty_names.add(cell.name)
        elif seen_start and \
                free_vars(erase_cursor(cell.edit_state)) & dirty_names:
            dirty_ids.append(cell.id)
            dirty_names.add(cell.name)
    return dirty_ids


def _recompute(nb: Notebook, dirty: set[str],
               resume_with: tuple[HoleName, HExp] | None = None) -> list[str]:
    """One pass over the notebook, evaluating only the dirty cells.

    Evaluation seeds each cell with bindings for its free variables only;
    that is what makes the dependent closure exactly the set whose results
    can change. With resume_with, a dirty cell that still types and has a
    cached result resumes it instead of starting over.
    """
    ctx: dict[str, HTyp] = {}
    results: dict[str, Result] = {}
    recomputed = []
    for cell in nb.cells:
        body = erase_cursor(cell.edit_state)
        try:
            cell.type = synthesize(ctx, body)
        except StaticError as err:
            cell.type = None
            cell.error = str(err)
            cell.cached_result = None
        else:
            if cell.id in dirty:
                try:
                    if resume_with and cell.cached_result is not None:
                        cell.cached_result = resume(cell.cached_result,
                                                    *resume_with)
                    else:
                        env = {name: results[name]
                               for name in free_vars(body)}
                        cell.cached_result = evaluate(body, env)
                    cell.error = None
                except (EvalBudgetExceeded, KeyError) as err:
                    cell.cached_result = None
                    cell.error = f"evaluation failed: {err}"
        if cell.id in dirty:
            recomputed.append(cell.id)
        if cell.type is not None:
            ctx[cell.name] = cell.type
        if cell.cached_result is not None:
            results[cell.name] = cell.cached_result
    return recomputed


def edit_cell(nb: Notebook, cell_id: str,
              a: Action) -> tuple[Notebook, list[str]]:
    """Apply one action to a cell; returns the ids re-evaluated, in order."""
    cell = nb.cell(cell_id)
    ctx = nb.context_before(cell_id)
    cell.edit_state = apply_action(ctx, cell.edit_state, a, nb.namer)
    return nb, _recompute(nb, set(_dependent_closure(nb, cell_id)))


def run_macro_in_cell(nb: Notebook, cell_id: str, m: Macro,
                      budget: int = 1000) -> tuple[Notebook, list[str]]:
    """Run a macro against one cell, then recompute as for a single edit."""
    cell = nb.cell(cell_id)
    ctx = nb.context_before(cell_id)
    cell.edit_state, _ = run_macro(ctx, cell.edit_state, m, budget, nb.namer)
    return nb, _recompute(nb, set(_dependent_closure(nb, cell_id)))


def fill_and_resume_cell(nb: Notebook, cell_id: str, u: HoleName,
                         filler: HExp) -> tuple[Notebook, list[str]]:
    """Fill hole u of one cell and resume cached results downstream."""
    cell = nb.cell(cell_id)
    ctx = nb.context_before(cell_id)
    body = erase_cursor(cell.edit_state)
    if not any(name == u and kind == "empty"
               for name, _, kind in holes_of(body)):
        raise UnknownHole(f"cell {cell_id} has no empty hole {u}")
    # names must stay unique across the whole notebook, not just this cell
    elsewhere = set().union(*(hole_names(erase_cursor(c.edit_state))
                              for c in nb.cells)) - {u}
    clashes = hole_names(filler) & elsewhere
    if clashes:
        raise DuplicateHoleName(f"filler reuses hole names {sorted(clashes)}")
    try:
        filled = fill(body, u, filler, ctx)
    except StaticError as err:  # a cell that no longer types cannot be filled
        raise IllTypedFiller(str(err)) from err
    top = max(hole_names(filler), default=-1)
    while nb.namer.next_name <= top:
        nb.namer.fresh()
    cell.edit_state = ZExp(filled, cell.edit_state.path)
    dirty = set(_dependent_closure(nb, cell_id))
    return nb, _recompute(nb, dirty, resume_with=(u, filler))


# --------------------------------------------------------------------------
# Persistence


_HEADER = "#hazelnb 1"


def save(nb: Notebook) -> str:
    lines = [_HEADER, f"allocator {nb.namer.next_name}"]
    for cell in nb.cells:
        head = f"cell {cell.id} {cell.name}"
        if cell.edit_state.path:
            head += " " + ".".join(str(k) for k in cell.edit_state.path)
        lines.append(head)
        lines.append(serialize(erase_cursor(cell.edit_state)))
    return "\n".join(lines) + "\n"


def _parse_cell_head(line: str, lineno: int) -> tuple[str, str, tuple[int, ...]]:
    words = line.split()
    if len(words) not in (3, 4) or words[0] != "cell":
        raise ParseError(f"expected a cell header, got {line!r}", lineno, 1)
    _, cell_id, name, *rest = words
    if not _ID_RE.match(cell_id):
        raise ParseError(f"bad cell id {cell_id!r}", lineno, 1)
    if not is_identifier(name):
        raise ParseError(f"bad cell name {name!r}", lineno, 1)
    path: tuple[int, ...] = ()
    if rest:
        try:
            path = tuple(int(k) for k in rest[0].split("."))
        except ValueError:
            raise ParseError(f"bad cursor path {rest[0]!r}", lineno, 1)
    return cell_id, name, path


def load(text: str) -> Notebook:
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise ParseError(f"expected {_HEADER!r} on the first line", 1, 1)
    nb = Notebook()
    i = 1
    allocator: int | None = None
    if i < len(lines) and lines[i].startswith("allocator "):
        try:
            allocator = int(lines[i].split()[1])
        except (IndexError, ValueError):
            raise ParseError(f"bad allocator line {lines[i]!r}", i + 1, 1)
        i += 1
    seen_holes: set[HoleName] = set()
    index = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        index += 1
        cell_id, name, path = _parse_cell_head(lines[i], i + 1)
        if any(c.id == cell_id for c in nb.cells):
            raise ParseError(f"cell {index}: duplicate id {cell_id!r}",
                             i + 1, 1)
        if any(c.name == name for c in nb.cells):
            raise ParseError(f"cell {index}: duplicate name {name!r}",
                             i + 1, 1)
        if i + 1 >= len(lines):
            raise ParseError(f"cell {index}: missing expression line",
                             i + 1, 1)
        ts = TokenStream(lines[i + 1])
        try:
            e = parse_expr_from(ts, seen_holes)
            if not ts.at_end():
                raise ts.error(("end of line",))
            z = place_cursor(e, path)
        except ParseError as err:
            raise ParseError(f"cell {index}: {err}", i + 2, 1) from err
        except InvalidPath as err:
            raise ParseError(f"cell {index}: bad cursor path: {err}",
                             i + 1, 1) from err
        nb.cells.append(Cell(cell_id, name, z))
        i += 2
    floor = max(seen_holes, default=-1) + 1
    nb.namer = HoleNamer(max(allocator or 0, floor))
    taken = [int(m.group(1)) for c in nb.cells
             if (m := re.match(r"c(\d+)\Z", c.id))]
    nb._next_id = max(taken, default=0) + 1
    _recompute(nb, {c.id for c in nb.cells})
    return nb
