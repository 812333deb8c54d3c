"""Command line front end.

    papergloss build --source paper/ --out out/ [--stages scan,parse]
    papergloss validate out/manifest.json

Environment variables PAPERGLOSS_COMPILER and PAPERGLOSS_RASTERIZER override
the subprocess command templates (shell-style strings with {tex}, {pdf},
{prefix}, {dpi} placeholders), so a real TeX installation can be dropped in
without code changes.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys

from .config import LocateConfig, PipelineConfig
from .manifest import FormatError, load_manifest, validate_manifest
from .pipeline import STAGES, StageError, paper_id_for, run_pipeline


def _parse_stages(value: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in value.split(",") if part.strip())
    unknown = [n for n in names if n not in STAGES]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown stage(s) {unknown}; choose from {', '.join(STAGES)}"
        )
    if len(names) == 1:
        # a single name means "run everything up to and including it"
        return STAGES[: STAGES.index(names[0]) + 1]
    if names != STAGES[: len(names)]:
        raise argparse.ArgumentTypeError(
            f"stages must form a prefix of {','.join(STAGES)}"
        )
    return names


def _locate_config(args) -> LocateConfig:
    kwargs = {}
    compiler = os.environ.get("PAPERGLOSS_COMPILER")
    rasterizer = os.environ.get("PAPERGLOSS_RASTERIZER")
    if compiler:
        kwargs["compiler_cmd"] = tuple(shlex.split(compiler))
    if rasterizer:
        kwargs["rasterizer_cmd"] = tuple(shlex.split(rasterizer))
    return LocateConfig(
        dpi=args.dpi,
        color_capacity=args.colors,
        worker_limit=args.workers,
        **kwargs,
    )


def _cmd_build(args) -> int:
    config = PipelineConfig(
        source_dir=args.source,
        main=args.main,
        out_dir=args.out,
        stages=args.stages,
        expand_macros=not args.no_macro_expand,
        paper_id=args.paper_id,
        locate=_locate_config(args),
    )
    try:
        state = run_pipeline(config)
    except StageError as exc:
        print(exc, file=sys.stderr)
        return 2
    ran = ", ".join(config.stages)
    print(f"completed stages: {ran} (out: {config.out_dir})")
    if state.report is not None:
        localized = sum(1 for b in state.report.boxes.values() if b)
        print(
            f"localized {localized}/{len(state.report.boxes)} targets "
            f"in {state.report.compile_count} compiles"
        )
    if args.serve:
        if state.manifest is None:
            print("--serve needs the manifest stage", file=sys.stderr)
            return 2
        from .serve import serve_manifest

        manifest_path = os.path.join(config.out_dir, "manifest.json")
        print(f"serving {manifest_path} on http://{args.host}:{args.port}")
        serve_manifest(
            manifest_path,
            paper_id=paper_id_for(config),
            host=args.host,
            port=args.port,
        )
    return 0


def _cmd_validate(args) -> int:
    try:
        manifest = load_manifest(args.manifest)
    except FormatError as exc:
        print(f"unreadable manifest: {exc}", file=sys.stderr)
        return 1
    problems = validate_manifest(manifest)
    data = manifest.data
    total = 0
    localized = 0
    for entity in data["entities"]:
        for occ in entity["occurrences"]:
            total += 1
            localized += 1 if occ["boxes"] else 0
    definition_count = sum(len(v) for v in data["definitions"].values())
    fraction = (100.0 * localized / total) if total else 0.0
    print(f"paper: {data['paper']['id']}")
    print(
        f"entities: {len(data['entities'])}  "
        f"sentences: {len(data['sentences'])}  "
        f"equations: {len(data['equations'])}  "
        f"definitions: {definition_count}"
    )
    print(f"localized occurrences: {localized}/{total} ({fraction:.1f}%)")
    if problems:
        for problem in problems:
            print(f"problem: {problem}", file=sys.stderr)
        print(f"invalid: {len(problems)} problem(s)", file=sys.stderr)
        return 1
    print("manifest valid")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papergloss",
        description="Locate, define, and serve the symbols of a TeX paper.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="run the pipeline over a TeX source tree")
    build.add_argument("--source", default=".", help="directory with the TeX sources")
    build.add_argument("--main", default="main.tex", help="entry file name")
    build.add_argument("--out", default="out", help="artifact directory")
    build.add_argument(
        "--stages",
        type=_parse_stages,
        default=STAGES,
        help="comma-separated stage prefix, or one stage name to stop after",
    )
    build.add_argument("--dpi", type=int, default=150)
    build.add_argument("--colors", type=int, default=100, help="colors per batch")
    build.add_argument("--workers", type=int, default=4)
    build.add_argument(
        "--no-macro-expand",
        action="store_true",
        help="keep user-defined macros unexpanded",
    )
    build.add_argument("--paper-id", default="", help="override the manifest paper id")
    build.add_argument("--serve", action="store_true", help="serve the manifest after building")
    build.add_argument("--host", default="127.0.0.1")
    build.add_argument("--port", type=int, default=8077)
    build.set_defaults(func=_cmd_build)

    validate = sub.add_parser("validate", help="check a manifest file")
    validate.add_argument("manifest", help="path to manifest.json")
    validate.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
