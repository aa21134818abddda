"""Command line: plotkit <kind> --in PATH [--in PATH2] --out PATH.png [--logx] [--logy]"""

import argparse
import sys

from .figures import KINDS, FigureSpec, PlotkitError, render


def dispatch(argv) -> int:
    parser = argparse.ArgumentParser(prog="plotkit")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="PATH")
    parser.add_argument("--out", required=True, metavar="PATH.png")
    parser.add_argument("--logx", action="store_true")
    parser.add_argument("--logy", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          output=args.out, logx=args.logx, logy=args.logy)
        out = render(spec)
    except PlotkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
