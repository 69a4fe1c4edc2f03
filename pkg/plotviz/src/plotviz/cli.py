"""The ``render`` command: JSON figure spec in, labeled image out."""

from __future__ import annotations

import argparse
import json
import sys

from .render import FigureSpec, SpecError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a sweep-CSV figure from a JSON spec.")
    parser.add_argument("--spec", required=True, help="FigureSpec JSON file")
    parser.add_argument("--out", default=".", help="output directory")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        with open(args.spec) as fh:
            raw = json.load(fh)
        spec = FigureSpec.from_dict(raw)
        out_path = render(spec, args.out)
    except (SpecError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out_path)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
