"""Command-line front door: the interactive protocol, a socket server, and
batch check/eval/replay over files.

Exit codes: 0 success, 1 unreadable input or socket trouble, 2 a static or
evaluation error found while processing file contents.
"""

from __future__ import annotations

import argparse
import io
import sys

from . import server
from .actions import apply_action, parse_action, parse_macro, run_macro
from .dynamics import evaluate, serialize_result
from .notebook import load as load_notebook
from .statics import synthesize
from .suggestions import SuggestionModel, load_model
from .syntax import (
    EHole, HoleNamer, KernelError, erase_cursor, max_hole_name, parse,
    place_cursor, serialize, serialize_type,
)

__all__ = ["main"]


class _Abort(Exception):
    def __init__(self, code: int):
        self.code = code


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.run(args)
    except _Abort as err:
        return err.code


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hazel-kernel",
        description="Structure-editor kernel: typed holes, checked edit "
                    "actions, evaluation around holes, live cells.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repl", help="serve the line protocol on stdin/stdout")
    p.add_argument("--model", metavar="TSV",
                   help="suggestion model file for the suggest op")
    p.set_defaults(run=_cmd_repl)

    p = sub.add_parser("serve", help="serve the line protocol on a socket")
    p.add_argument("--socket", required=True, metavar="PATH-OR-PORT",
                   help="digits bind a local TCP port (0 picks one); "
                        "anything else is a unix socket path")
    p.add_argument("--model", metavar="TSV")
    p.set_defaults(run=_cmd_serve)

    p = sub.add_parser("check", help="type-check a notebook or expression "
                                     "file and report")
    p.add_argument("file")
    p.set_defaults(run=_cmd_check)

    p = sub.add_parser("eval", help="evaluate a notebook or expression file")
    p.add_argument("file")
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("script", help="replay a file of action lines and "
                                      "print the final expression")
    p.add_argument("trace")
    p.add_argument("--input", metavar="FILE",
                   help="starting expression (default: a single hole)")
    p.set_defaults(run=_cmd_script)
    return parser


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            return fp.read()
    except OSError as err:
        print(f"cannot read {path}: {err}", file=sys.stderr)
        raise _Abort(1) from err


def _model_from(args: argparse.Namespace) -> SuggestionModel | None:
    if not args.model:
        return None
    text = _read(args.model)
    try:
        return load_model(io.StringIO(text))
    except KernelError as err:
        print(f"bad model file: {err}", file=sys.stderr)
        raise _Abort(1) from err


def _cmd_repl(args: argparse.Namespace) -> int:
    return server.repl(sys.stdin, sys.stdout, _model_from(args))


def _cmd_serve(args: argparse.Namespace) -> int:
    return server.serve(args.socket, _model_from(args))


def _cmd_check(args: argparse.Namespace) -> int:
    text = _read(args.file)
    try:
        if text.startswith("#hazelnb"):
            nb = load_notebook(text)
            broken = 0
            for cell in nb.cells:
                if cell.type is None:
                    print(f"{cell.id} {cell.name} error {cell.error}")
                    broken += 1
                else:
                    print(f"{cell.id} {cell.name} ok "
                          f"{serialize_type(cell.type)}")
            return 2 if broken else 0
        print(serialize_type(synthesize({}, parse(text))))
        return 0
    except KernelError as err:
        print(f"error {err.code} {err}", file=sys.stderr)
        return 2


def _cmd_eval(args: argparse.Namespace) -> int:
    text = _read(args.file)
    try:
        if text.startswith("#hazelnb"):
            nb = load_notebook(text)
            broken = 0
            for cell in nb.cells:
                if cell.cached_result is None:
                    print(f"{cell.id} {cell.name} error {cell.error}")
                    broken += 1
                else:
                    print(f"{cell.id} {cell.name} "
                          f"{serialize_result(cell.cached_result)}")
            return 2 if broken else 0
        e = parse(text)
        synthesize({}, e)
        print(serialize_result(evaluate(e)))
        return 0
    except KernelError as err:
        print(f"error {err.code} {err}", file=sys.stderr)
        return 2


def _cmd_script(args: argparse.Namespace) -> int:
    trace = _read(args.trace)
    try:
        if args.input:
            root = parse(_read(args.input))
            top = max_hole_name(root)
            namer = HoleNamer(0 if top is None else top + 1)
        else:
            root = EHole(0)
            namer = HoleNamer(1)
        z = place_cursor(root, ())
        for line in trace.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("("):
                z, _ = run_macro({}, z, parse_macro(line), namer=namer)
            else:
                z = apply_action({}, z, parse_action(line), namer)
        print(serialize(erase_cursor(z)))
        return 0
    except KernelError as err:
        print(f"error {err.code} {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
