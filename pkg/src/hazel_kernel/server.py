"""Line protocol over notebook sessions: one request per line, one response
per line, every payload in the same s-expression grammar the kernel already
serializes.

Requests:

    new [name ...]              fresh notebook, one hole cell per name
    load <path>                 read a notebook file
    save <path>                 write the current notebook
    cells                       ids, names, and types
    action <cell> <action...>   apply one edit action
    macro <cell> <macro sexp>   run a composite action
    fill <cell> <hole> <expr>   fill a hole and resume cached results
    cursor-info <cell>          typing mode, type, and scope at the cursor
    result <cell>               the cell's current result
    suggest <cell> <k>          top-k ranked actions with probabilities

Responses are `ok <payload>` or `error <CODE> <message>`. Edit-state
payloads mark the cursor with a `(cursor ...)` wrapper. Only `new`, `load`,
`action`, `macro`, and `fill` may change session state.
"""

from __future__ import annotations

import os
import socketserver
import sys
from typing import IO

from .actions import format_action, parse_action, parse_macro
from .dynamics import serialize_result
from .notebook import (
    Notebook, edit_cell, fill_and_resume_cell, load, run_macro_in_cell, save,
)
from .statics import cursor_info
from .suggestions import SuggestionModel, rank
from .syntax import (
    KernelError, parse, serialize_type, serialize_zexp,
)

__all__ = ["Session", "handle", "repl", "make_server", "serve"]

OPS = ("new", "load", "save", "cells", "action", "macro", "fill",
       "cursor-info", "result", "suggest")


class Session:
    """One client's notebook plus the suggestion model used to rank."""

    def __init__(self, model: SuggestionModel | None = None):
        self.notebook: Notebook | None = None
        self.model = model if model is not None else SuggestionModel()


class _Reject(Exception):
    """Protocol-level refusal that never reaches the kernel modules."""

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message


def handle(session: Session, line: str) -> str:
    """Answer one request line; state changes only on the mutating ops."""
    try:
        return _dispatch(session, line)
    except _Reject as r:
        return f"error {r.code} {_flat(r.message)}"
    except KernelError as err:
        return f"error {err.code} {_flat(str(err))}"


def _flat(message: str) -> str:
    return " ".join(message.split()) or "unspecified"


def _dispatch(session: Session, line: str) -> str:
    words = line.split()
    if not words:
        raise _Reject("E_PARSE", "empty request")
    op, args = words[0], words[1:]

    if op == "new":
        nb = Notebook()
        try:
            for name in args:
                nb.add_cell(name)
        except ValueError as err:
            raise _Reject("E_PARSE", str(err)) from err
        session.notebook = nb
        return _cells_response(nb)

    if op == "load":
        _arity(op, args, exactly=1)
        nb = load(_read_file(args[0]))
        session.notebook = nb
        return _cells_response(nb)

    nb = session.notebook
    if nb is None:
        raise _Reject("E_PARSE", "no notebook; send new or load first")

    if op == "save":
        _arity(op, args, exactly=1)
        _write_file(args[0], save(nb))
        return "ok (saved)"
    if op == "cells":
        _arity(op, args, exactly=0)
        return _cells_response(nb)
    if op == "action":
        _arity(op, args, at_least=2)
        _, recomputed = edit_cell(nb, args[0],
                                  parse_action(" ".join(args[1:])))
        return _edited_response(nb, args[0], recomputed)
    if op == "macro":
        _arity(op, args, at_least=2)
        _, recomputed = run_macro_in_cell(nb, args[0],
                                          parse_macro(" ".join(args[1:])))
        return _edited_response(nb, args[0], recomputed)
    if op == "fill":
        _arity(op, args, at_least=3)
        u = _nat(args[1])
        filler = parse(" ".join(args[2:]))
        _, recomputed = fill_and_resume_cell(nb, args[0], u, filler)
        return _edited_response(nb, args[0], recomputed)
    if op == "cursor-info":
        _arity(op, args, exactly=1)
        cell = nb.cell(args[0])
        info = cursor_info(nb.context_before(cell.id), cell.edit_state)
        scope = "(ctx" + "".join(
            f" ({name} {serialize_type(t)})"
            for name, t in sorted(info.ctx.items())) + ")"
        if info.type is None:
            return f"ok (cursor-info {info.mode} {scope})"
        return (f"ok (cursor-info {info.mode} "
                f"{serialize_type(info.type)} {scope})")
    if op == "result":
        _arity(op, args, exactly=1)
        cell = nb.cell(args[0])
        if cell.cached_result is None:
            raise _Reject("E_CELL", cell.error or "cell has no result")
        return f"ok (result {serialize_result(cell.cached_result)})"
    if op == "suggest":
        _arity(op, args, exactly=2)
        cell = nb.cell(args[0])
        k = _nat(args[1])
        if k < 1:
            raise _Reject("E_PARSE", "k must be at least 1")
        ranked = rank(session.model, nb.context_before(cell.id),
                      cell.edit_state, k)
        rows = "".join(
            f" ({s.probability:.6f} ({format_action(s.action)}))"
            for s in ranked)
        return f"ok (suggestions{rows})"

    raise _Reject("E_PARSE", f"unknown op {op!r}; expected one of "
                  + "|".join(OPS))


def _arity(op: str, args: list[str], exactly: int | None = None,
           at_least: int | None = None) -> None:
    if exactly is not None and len(args) != exactly:
        raise _Reject("E_PARSE", f"{op} takes {exactly} argument(s)")
    if at_least is not None and len(args) < at_least:
        raise _Reject("E_PARSE", f"{op} takes at least {at_least} arguments")


def _nat(text: str) -> int:
    if not text.isdigit():
        raise _Reject("E_PARSE", f"expected a number, found {text!r}")
    return int(text)


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            return fp.read()
    except OSError as err:
        raise _Reject("E_IO", str(err)) from err


def _write_file(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(text)
    except OSError as err:
        raise _Reject("E_IO", str(err)) from err


def _cells_response(nb: Notebook) -> str:
    rows = "".join(
        f" ({c.id} {c.name} "
        + (serialize_type(c.type) if c.type is not None else "error") + ")"
        for c in nb.cells)
    return f"ok (cells{rows})"


def _edited_response(nb: Notebook, cell_id: str,
                     recomputed: list[str]) -> str:
    cell = nb.cell(cell_id)
    rows = []
    for cid in recomputed:
        c = nb.cell(cid)
        if c.cached_result is None:
            rows.append(f" ({cid} error)")
        else:
            rows.append(f" ({cid} {serialize_result(c.cached_result)})")
    return (f"ok (edited (cell {cell.id} {cell.name} "
            f"{serialize_zexp(cell.edit_state)}) "
            f"(recomputed{''.join(rows)}))")


# ---------------------------------------------------------------------------
# Transports


def repl(inp: IO[str], out: IO[str],
         model: SuggestionModel | None = None) -> int:
    """Serve requests from a stream until it ends; one session throughout."""
    session = Session(model)
    try:
        for line in inp:
            out.write(handle(session, line.rstrip("\n")) + "\n")
            out.flush()
    except OSError:
        return 1
    return 0


def make_server(spec: str, model: SuggestionModel | None = None):
    """Bind a threading socket server: digits mean a local TCP port,
    anything else a unix socket path. Each connection gets its own session.
    Returns the server and a printable address."""

    class Handler(socketserver.StreamRequestHandler):
        def handle(self) -> None:
            session = Session(model)
            for raw in self.rfile:
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError:
                    response = "error E_PARSE request is not valid utf-8"
                else:
                    response = handle(session, line.rstrip("\r\n"))
                try:
                    self.wfile.write((response + "\n").encode("utf-8"))
                    self.wfile.flush()
                except OSError:
                    return

    if spec.isdigit():
        class TCP(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        server = TCP(("127.0.0.1", int(spec)), Handler)
        return server, "127.0.0.1:%d" % server.server_address[1]

    class UDS(socketserver.ThreadingUnixStreamServer):
        daemon_threads = True

    if os.path.exists(spec):
        os.unlink(spec)
    return UDS(spec, Handler), spec


def serve(spec: str, model: SuggestionModel | None = None,
          out: IO[str] = sys.stdout) -> int:
    try:
        server, where = make_server(spec, model)
    except OSError as err:
        print(f"cannot bind {spec}: {err}", file=sys.stderr)
        return 1
    with server:
        print(f"listening on {where}", file=out, flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
    return 0
