"""Command-line entry point: ``hybridkit check <file>``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .frontend.runner import INPUT_ERROR, Options, error_report, render, run_text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridkit",
                                 description="Check bisimulations and refinements of hybridised logics.")
    sub = ap.add_subparsers(dest="action", required=True)
    chk = sub.add_parser("check", help="run the commands of a .hyb file")
    chk.add_argument("file", help="specification file ('-' reads stdin)")
    chk.add_argument("--cmd", help="commands to run instead of the file's own")
    chk.add_argument("--json", action="store_true", help="one JSON report per command, one per line")
    chk.add_argument("--depth", type=int, default=3, help="default sentence depth for verify (default 3)")
    chk.add_argument("--trace", action="store_true", help="include the fixpoint deletion trace")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.depth < 0:
        print("hybridkit: --depth must be non-negative", file=sys.stderr)
        return INPUT_ERROR
    base_dir = None
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            path = Path(args.file)
            base_dir = path.parent
            text = path.read_bytes().decode("utf-8")
    except (OSError, UnicodeDecodeError) as e:
        sys.stdout.write(render([error_report(e)], args.json))
        return INPUT_ERROR
    status, reports = run_text(text, args.cmd, Options(args.depth, args.trace), base_dir)
    sys.stdout.write(render(reports, args.json))
    return status


if __name__ == "__main__":
    sys.exit(main())
