"""``slidecast`` command line interface."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .audio import read_wav
from .config import Config, load_config
from .errors import EXIT_OK, EXIT_RENDER, EXIT_VALIDATION, SlidecastError
from .model import VoiceSpec, load_manifest
from .render import ffmpeg_capabilities, stitch

KIND_NAMES = {"muxers": "muxer", "vcodecs": "video_codec", "acodecs": "audio_codec"}
DEFAULT_VOICES = {"offline": "OfflineA", "polly": "Joanna"}
FLAG_LETTERS = {"decode": "D", "encode": "E", "demux": "D", "mux": "E",
                "intra_only": "I", "lossy": "L", "lossless": "S"}


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", required=True, help="output video path")
    p.add_argument("--engine", choices=["offline", "polly"], help="speech synthesizer")
    p.add_argument("--voice", help="voice id, e.g. Joanna, Brian or OfflineA")
    p.add_argument("--no-subtitles", action="store_true", help="skip the .srt file")
    p.add_argument("--pad", type=float, help="seconds of silence after each slide")
    p.add_argument("--lexicon", type=Path, help="JSON pronunciation lexicon")
    p.add_argument("--cache-dir", type=Path, help="synthesized audio cache")
    p.add_argument("--keep-temps", action="store_true", help="keep intermediate files")
    p.add_argument("--concurrency", type=int, help="parallel synthesis requests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slidecast",
        description="Turn slides and narration scripts into narrated videos with subtitles.",
    )
    parser.add_argument("--config", type=Path, help="slidecast.toml or .json file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stitch", help="combine images with existing WAV narration")
    p.add_argument("--images", nargs="+", required=True, type=Path)
    p.add_argument("--audio", nargs="+", required=True, type=Path)
    p.add_argument("-o", "--output", required=True, type=Path)

    p = sub.add_parser("spin", help="narrate a JSON deck manifest")
    p.add_argument("--manifest", required=True, type=Path)
    _add_run_options(p)

    p = sub.add_parser("narrate", help="narrate a Markdown deck with HTML-comment scripts")
    p.add_argument("markdown", type=Path)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--images-dir", type=Path, help="pre-rendered slide images")
    src.add_argument("--renderer", help="command invoked once per slide")
    _add_run_options(p)

    p = sub.add_parser("pptx", help="narrate a PowerPoint file from its speaker notes")
    p.add_argument("pptx", type=Path)
    p.add_argument("--dpi", type=int, default=300)
    _add_run_options(p)

    p = sub.add_parser("gslides", help="narrate a link-shared Google Slides deck")
    p.add_argument("doc_id")
    p.add_argument("--dpi", type=int, default=300)
    _add_run_options(p)

    p = sub.add_parser("voices", help="list the voices of an engine")
    p.add_argument("--engine", choices=["offline", "polly"], default="offline")

    sub.add_parser("doctor", help="check external tools and credentials")

    p = sub.add_parser("capabilities", help="list FFmpeg muxers or codecs")
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="muxers")
    return parser


def _run_options(args, config: Config, manifest_voice: VoiceSpec | None = None):
    from .pipeline import RunOptions

    engine = args.engine or (manifest_voice.engine if manifest_voice else None) \
        or config.engine or "polly"
    voice_id = args.voice or (manifest_voice.voice_id if manifest_voice
                              and manifest_voice.engine == engine else None) \
        or config.voice or DEFAULT_VOICES[engine]
    opts = dict(config.options)
    if args.pad is not None:
        opts["pad_seconds"] = args.pad
    if args.no_subtitles:
        opts["subtitles"] = False
    if args.lexicon:
        opts["lexicon_path"] = args.lexicon
    if args.keep_temps:
        opts["keep_temps"] = True
    if args.concurrency:
        opts["tts_concurrency"] = args.concurrency
    opts["cache_dir"] = args.cache_dir or opts.get("cache_dir") or config.resolved_cache_dir()
    if opts.get("lexicon_path"):
        opts["lexicon_path"] = Path(opts["lexicon_path"])
    return RunOptions(voice=VoiceSpec(engine, voice_id), preset=config.render_preset(), **opts)


def _report(result) -> int:
    print(f"outfile: {result.outfile}")
    if result.subtitle_path:
        print(f"subtitles: {result.subtitle_path}")
    return EXIT_OK if result.success else EXIT_RENDER


def dispatch(args, config: Config) -> int:
    from . import pipeline

    cmd = args.command
    if cmd == "stitch":
        audios = [read_wav(p) for p in args.audio]
        return _report(stitch(args.images, audios, config.render_preset(), args.output,
                              tools=config.toolchain()))
    if cmd == "spin":
        deck = load_manifest(args.manifest)
        options = _run_options(args, config, deck.default_voice)
        return _report(pipeline.spin(deck, options, args.output, config=config))
    if cmd == "narrate":
        options = _run_options(args, config)
        images = pipeline.list_images(args.images_dir) if args.images_dir else None
        renderer = args.renderer or (None if images else config.renderer)
        return _report(pipeline.narrate(args.markdown, images, renderer, options,
                                        args.output, config=config))
    if cmd == "pptx":
        options = _run_options(args, config)
        return _report(pipeline.spin_pptx(args.pptx, options, args.output, args.dpi,
                                          config=config))
    if cmd == "gslides":
        options = _run_options(args, config)
        return _report(pipeline.spin_gslides(args.doc_id, options, args.output, args.dpi,
                                             config=config))
    if cmd == "voices":
        from .tts import get_engine

        engine = get_engine(args.engine, **(config.engine_settings() if args.engine == "polly" else {}))
        for v in engine.list_voices():
            print(f"{v.voice_id:<16} {v.language_tag:<8} {v.gender_label}")
        return EXIT_OK
    if cmd == "doctor":
        print(pipeline.doctor(config).format())
        return EXIT_OK
    if cmd == "capabilities":
        for c in ffmpeg_capabilities(KIND_NAMES[args.kind], config.toolchain()):
            flags = "".join(FLAG_LETTERS[k] if on else "." for k, on in c.flags.items())
            print(f"{c.name:<20} {flags:<6} {c.description}")
        return EXIT_OK
    raise AssertionError(cmd)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        return dispatch(args, config)
    except SlidecastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
