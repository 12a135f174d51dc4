import json
import sys
import textwrap
from pathlib import Path

import pytest

from helpers import (
    LECTURE_NOTES,
    TEST_KEY,
    TEST_SECRET,
    MockServer,
    build_pptx,
    install_polly,
    write_png,
)
from slidecast.config import Config, load_config
from slidecast.errors import (
    CountMismatch,
    EmptyScript,
    ProviderError,
    RendererFailed,
    ValidationError,
)
from slidecast.model import Deck, Slide, TimingManifest, VoiceSpec
from slidecast.pipeline import (
    AudioCache,
    RunOptions,
    cache_key,
    doctor,
    list_images,
    markdown_deck,
    narrate,
    spin,
    spin_pptx,
)
from slidecast.render import probe_media
from slidecast.subtitles import parse_srt
from slidecast.tools import Toolchain
from slidecast.tts.offline import OfflineSynthesizer, synthesize_offline

DATA = Path(__file__).parent / "data"
OFFLINE = VoiceSpec("offline", "OfflineA")


def opts(tmp_path, **kw):
    return RunOptions(voice=OFFLINE, cache_dir=tmp_path / "cache", **kw)


def test_run_options_validation(tmp_path):
    with pytest.raises(ValidationError):
        RunOptions(pad_seconds=-1)
    with pytest.raises(ValidationError):
        RunOptions(tts_concurrency=0)


def test_audio_cache_round_trip(tmp_path):
    cache = AudioCache(tmp_path / "c")
    assert cache.get("k") is None
    audio = synthesize_offline("hello")
    cache.put("k", audio)
    assert cache.get("k") == audio
    assert list((tmp_path / "c").iterdir()) == [tmp_path / "c" / "k.wav"]
    (tmp_path / "c" / "bad.wav").write_bytes(b"junk")
    assert cache.get("bad") is None


@pytest.mark.ffmpeg
def test_spin_writes_video_srt_and_timings(tmp_path, make_images, counting_engine):
    imgs = make_images(2)
    deck = Deck.from_pairs(imgs, ["Welcome to the course. " * 3, "[[pause 0.8]]"])
    out = tmp_path / "out" / "talk.mp4"
    result = spin(deck, opts(tmp_path), out, engine=counting_engine)
    assert result.success and out.is_file()
    assert counting_engine.calls == 1  # pause slides never reach the synthesizer
    timings = TimingManifest.from_json((tmp_path / "out" / "talk.timings.json").read_text())
    speech = synthesize_offline("Welcome to the course. " * 3).duration
    assert timings.slides[0].speech == pytest.approx(speech, abs=1e-6)
    assert timings.slides[0].duration == pytest.approx(speech + 0.5, abs=1e-6)
    assert timings.slides[1].duration == pytest.approx(1.3, abs=1e-6)
    assert abs(probe_media(out).duration - timings.total) < 0.25
    cues = parse_srt(result.subtitle_path.read_text())
    assert cues[-1].end_ms == round(speech * 1000)
    assert b"\r\n" not in result.subtitle_path.read_bytes()


@pytest.mark.ffmpeg
def test_cache_and_determinism(tmp_path, make_images, counting_engine):
    deck = Deck.from_pairs(make_images(3), ["one two three", "four five", "six"])
    o = opts(tmp_path)
    spin(deck, o, tmp_path / "a.mp4", engine=counting_engine)
    assert counting_engine.calls == 3
    spin(deck, o, tmp_path / "b.mp4", engine=counting_engine)
    assert counting_engine.calls == 3
    for suffix in (".srt", ".timings.json"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


@pytest.mark.ffmpeg
def test_lexicon_changes_spoken_text_only(tmp_path, make_images, counting_engine):
    lex = tmp_path / "lex.json"
    lex.write_text(json.dumps([{"display": "ggplot2", "spoken": "gee gee plot two"}]))
    deck = Deck.from_pairs(make_images(1), ["Use ggplot2"])
    result = spin(deck, opts(tmp_path, lexicon_path=lex), tmp_path / "v.mp4", engine=counting_engine)
    assert result.timings.slides[0].cache_key == cache_key("offline", "OfflineA", "Use gee gee plot two")
    assert parse_srt(result.subtitle_path.read_text())[0].text == "Use ggplot2"
    # five spoken words -> 2.0 s of tone
    assert result.timings.slides[0].speech == pytest.approx(2.0)


class Exploding(OfflineSynthesizer):
    def synthesize_chunk(self, text, voice, output_rate=22050):
        if "boom" in text:
            raise ProviderError(500, "synthesis failed")
        return super().synthesize_chunk(text, voice, output_rate)


def recorder_ffmpeg(tmp_path) -> Path:
    marker = tmp_path / "ffmpeg-ran"
    exe = tmp_path / "ffmpeg-recorder"
    exe.write_text(f"#!/bin/sh\ntouch '{marker}'\nexit 1\n")
    exe.chmod(0o755)
    return exe


def test_failed_synthesis_aborts_before_encoding(tmp_path, make_images):
    exe = recorder_ffmpeg(tmp_path)
    deck = Deck.from_pairs(make_images(3), ["fine", "boom", "also fine"])
    with pytest.raises(ProviderError):
        spin(deck, opts(tmp_path, tts_concurrency=1), tmp_path / "v.mp4",
             engine=Exploding(), tools=Toolchain(ffmpeg=str(exe), ffprobe=str(exe)))
    assert not (tmp_path / "ffmpeg-ran").exists()
    assert not (tmp_path / "v.mp4").exists()


def test_invalid_deck_aborts_before_synthesis(tmp_path, make_images, counting_engine):
    deck = Deck((Slide(0, make_images(1)[0], "   "),))
    with pytest.raises(EmptyScript):
        spin(deck, opts(tmp_path), tmp_path / "v.mp4", engine=counting_engine)
    assert counting_engine.calls == 0


def test_list_images_natural_order(tmp_path):
    for name in ["slide10.png", "slide2.png", "slide1.PNG", "notes.txt"]:
        (tmp_path / name).write_bytes(b"x")
    assert [p.name for p in list_images(tmp_path)] == ["slide1.PNG", "slide2.png", "slide10.png"]
    with pytest.raises(ValidationError):
        list_images(tmp_path / "missing")


def test_markdown_deck_with_images(make_images):
    deck = markdown_deck(DATA / "comments_deck.Rmd", make_images(4))
    assert deck.title == "Narrated Slides"
    assert deck.scripts[-1] == "Thank you for watching this video and good luck using Ari!"
    with pytest.raises(CountMismatch):
        markdown_deck(DATA / "comments_deck.Rmd", make_images(3))


def renderer_script(tmp_path, fail_on=None) -> str:
    script = tmp_path / "render.py"
    helpers = Path(__file__).parent
    script.write_text(textwrap.dedent(f"""
        import argparse, sys
        sys.path.insert(0, {str(helpers)!r})
        from helpers import write_png
        p = argparse.ArgumentParser()
        p.add_argument("--input"); p.add_argument("--slide", type=int); p.add_argument("--out")
        a = p.parse_args()
        if a.slide == {fail_on!r}:
            sys.exit("cannot render slide")
        write_png(a.out, 64, 36)
    """))
    return f"{sys.executable} {script}"


def test_markdown_renderer_hook(tmp_path):
    deck = markdown_deck(DATA / "comments_deck.Rmd", None, renderer_script(tmp_path), tmp_path / "w")
    assert [p.name for p in deck.images] == [f"slide-{k:04d}.png" for k in range(1, 5)]


def test_markdown_renderer_failure(tmp_path):
    with pytest.raises(RendererFailed) as e:
        markdown_deck(DATA / "comments_deck.Rmd", None, renderer_script(tmp_path, 2), tmp_path / "w")
    assert e.value.slide == 2 and "cannot render" in e.value.stderr


def test_markdown_callable_renderer(tmp_path):
    def render(md, count, workdir):
        return [write_png(workdir / f"{k}.png") for k in range(count)]

    deck = markdown_deck(DATA / "comments_deck.Rmd", None, render, tmp_path / "w")
    assert len(deck.slides) == 4


@pytest.mark.ffmpeg
def test_narrate_end_to_end(tmp_path, make_images, counting_engine):
    result = narrate(DATA / "comments_deck.Rmd", make_images(4), None, opts(tmp_path),
                     tmp_path / "md.mp4", engine=counting_engine)
    assert result.success and len(parse_srt(result.subtitle_path.read_text())) >= 4


@pytest.mark.ffmpeg
def test_spin_pptx(tmp_path, fake_tools, counting_engine):
    pptx = build_pptx(tmp_path / "talk.pptx", LECTURE_NOTES)
    result = spin_pptx(pptx, opts(tmp_path), tmp_path / "pptx.mp4", 72, tools=fake_tools,
                       engine=counting_engine)
    assert result.success
    (v,) = probe_media(result.outfile).of_kind("video")
    assert v.width % 2 == 0 and v.height % 2 == 0
    assert parse_srt(result.subtitle_path.read_text())[0].text == (
        "Sometimes it's hard for an instructor to")


def test_workdir_kept_on_failure(tmp_path, fake_tools, monkeypatch, caplog):
    monkeypatch.setattr("tempfile.tempdir", str(tmp_path / "tmp"))
    (tmp_path / "tmp").mkdir()
    pptx = build_pptx(tmp_path / "talk.pptx", ["a", None])
    with pytest.raises(EmptyScript):
        spin_pptx(pptx, opts(tmp_path), tmp_path / "x.mp4", 72, tools=fake_tools)
    kept = list((tmp_path / "tmp").glob("slidecast-run-*"))
    assert len(kept) == 1 and any(kept[0].rglob("*.png"))


@pytest.mark.ffmpeg
def test_workdir_removed_on_success(tmp_path, fake_tools, monkeypatch, counting_engine):
    monkeypatch.setattr("tempfile.tempdir", str(tmp_path / "tmp"))
    (tmp_path / "tmp").mkdir()
    pptx = build_pptx(tmp_path / "talk.pptx", ["a b c"])
    spin_pptx(pptx, opts(tmp_path), tmp_path / "x.mp4", 72, tools=fake_tools, engine=counting_engine)
    assert not list((tmp_path / "tmp").glob("slidecast-run-*"))


@pytest.mark.ffmpeg
def test_spin_with_polly_mock(tmp_path, make_images, monkeypatch):
    monkeypatch.setenv("AWS_ACCESS_KEY_ID", TEST_KEY)
    monkeypatch.setenv("AWS_SECRET_ACCESS_KEY", TEST_SECRET)
    with install_polly(MockServer()) as srv:
        o = RunOptions(voice=VoiceSpec("polly", "Joanna"), cache_dir=tmp_path / "c")
        result = spin(Deck.from_pairs(make_images(1), ["Hello"]), o, tmp_path / "p.mp4",
                      config=Config(polly_endpoint=srv.url))
    assert result.timings.slides[0].speech == pytest.approx(1.0, abs=0.01)


def test_doctor_reports_without_raising(tmp_path):
    report = doctor(Config(cache_dir=str(tmp_path / "c"), soffice_path=str(tmp_path / "none")),
                    env={})
    assert not report["pptx converter"].ok and "LibreOffice" in report["pptx converter"].remedy
    auth = report["cloud auth (polly)"]
    assert not auth.ok and "AWS_ACCESS_KEY_ID" in auth.detail and auth.remedy
    assert report["cache dir"].ok and report["offline engine"].ok
    text = report.format()
    assert "[FAIL] cloud auth (polly)" in text and "fix:" in text
    missing_ffmpeg = doctor(Config(ffmpeg_path=str(tmp_path / "nope"), cache_dir=str(tmp_path)), env={})
    assert not missing_ffmpeg["ffmpeg"].ok and "install FFmpeg" in missing_ffmpeg["ffmpeg"].remedy
    assert not missing_ffmpeg.ok


def test_doctor_with_doubles(tmp_path, fake_tools):
    report = doctor(Config(soffice_path=fake_tools.soffice, pdftoppm_path=fake_tools.pdftoppm,
                           cache_dir=str(tmp_path)), env={})
    assert report["pptx converter"].ok and report["pdf rasterizer"].ok


def test_config_file_and_env(tmp_path):
    (tmp_path / "slidecast.toml").write_text(
        'engine = "offline"\ncache_dir = "/tmp/x"\n[preset]\nfps = 30\nbitrate = "1M"\n'
        "[options]\npad_seconds = 0.25\n")
    cfg = load_config(cwd=tmp_path, env={"SLIDECAST_VOICE": "OfflineB"})
    assert (cfg.engine, cfg.voice, cfg.options["pad_seconds"]) == ("offline", "OfflineB", 0.25)
    preset = cfg.render_preset()
    assert preset.fps == 30 and preset.bitrate == "1M" and preset.quality is None
    (tmp_path / "bad.json").write_text('{"colour": "red"}')
    with pytest.raises(ValidationError):
        load_config(tmp_path / "bad.json", env={})
    with pytest.raises(ValidationError):
        Config(preset={"speed": 2}).render_preset()
    assert load_config(env={}, cwd=tmp_path / "nowhere") == Config()
