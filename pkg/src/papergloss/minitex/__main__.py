"""Command line front end: compile .tex to .pdf, rasterize .pdf to .png pages.

Mirrors the calling conventions of a classic TeX toolchain closely enough to
sit behind the pipeline's subprocess contracts: `compile` exits nonzero on
any input error and leaves a .log file next to the output; `raster` writes
one zero-padded PNG per page.
"""

import argparse
import sys
from pathlib import Path

from .layout import MinitexError, compile_tex
from .pdf import write_pdf
from .raster import RasterizeError, rasterize_pdf, write_pages


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="minitex")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="typeset a .tex file to PDF")
    c.add_argument("tex")
    c.add_argument("-o", "--output", required=True)

    r = sub.add_parser("raster", help="render a PDF to page images")
    r.add_argument("pdf")
    r.add_argument("-o", "--output-prefix", required=True)
    r.add_argument("--dpi", type=int, default=150)

    args = parser.parse_args(argv)

    if args.command == "compile":
        out = Path(args.output)
        log = out.with_suffix(".log")
        try:
            source = Path(args.tex).read_text()
            result = compile_tex(source)
        except (MinitexError, OSError) as exc:
            log.parent.mkdir(parents=True, exist_ok=True)
            log.write_text(f"! {exc}\n")
            print(f"minitex: {exc}", file=sys.stderr)
            return 1
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(write_pdf(result))
        log.write_text(f"Output written on {out.name} ({result.pages} pages).\n")
        return 0

    try:
        pdf = Path(args.pdf).read_bytes()
        pages = rasterize_pdf(pdf, dpi=args.dpi)
        write_pages(pages, args.output_prefix)
    except (RasterizeError, OSError, ValueError) as exc:
        print(f"minitex: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
