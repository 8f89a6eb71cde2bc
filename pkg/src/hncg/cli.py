"""Command-line interface.

Subcommands: semantic, render-partial, synthesize, blend, run, ablate,
metrics retention, metrics fid, demo.  Exit codes: 0 success, 2 validation
error, 3 external plug failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import imgio, metrics, pipeline
from .demo import write_demo_scene
from .errors import HncgError
from .raster import SemanticImage, colorize_semantic, rasterize_semantic
from .render import render_partial
from .scene import load_scene


def _add_scene_flags(p: argparse.ArgumentParser, need_out: bool = True):
    p.add_argument("--scene", required=True, help="scene document (JSON)")
    p.add_argument("--out", required=need_out, default=None, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--synth", default="stub", help="stub | plug:CMD (CMD with {in}/{out})")
    p.add_argument("--segment", default="stub", help="stub | plug:CMD")
    p.add_argument("--blend", default="alpha",
                   choices=["alpha", "pyramid", "gp-classical", "gan-plug"],
                   dest="blend_mode", help="blend mode")
    p.add_argument("--blend-plug", default=None, help="command template for gan-plug mode")
    p.add_argument("--levels", type=int, default=4, help="pyramid depth")
    p.add_argument("--noise-amp", type=float, default=0.05, help="stub synthesizer noise amplitude")
    p.add_argument("--real-features", default=None,
                   help="HNCGFEAT file (or PNG directory) of real images for FID")
    p.add_argument("--frames", type=int, default=None, help="frame count (run/ablate)")


def _config(args) -> pipeline.PipelineConfig:
    kwargs = dict(
        synth=args.synth,
        segment=args.segment,
        blend_mode=args.blend_mode,
        blend_plug=args.blend_plug,
        levels=args.levels,
        noise_amp=args.noise_amp,
        seed=args.seed,
    )
    if getattr(args, "frames", None):
        kwargs["ablation_frames"] = args.frames
    return pipeline.PipelineConfig(**kwargs)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_semantic(args) -> int:
    scene = load_scene(args.scene)
    out = _out_dir(args)
    m, _ = rasterize_semantic(scene)
    imgio.write_png_gray(out / "frame_0_semantic.png", m.ids)
    imgio.write_png_rgb(out / "frame_0_semantic_color.png", colorize_semantic(m, scene.palette))
    print(f"wrote {out}/frame_0_semantic.png ({m.width}x{m.height})")
    return 0


def _cmd_render_partial(args) -> int:
    scene = load_scene(args.scene)
    out = _out_dir(args)
    pr = render_partial(scene)
    imgio.write_render_rgba(out / "frame_0_partial.png", pr.rgb, pr.alpha)
    imgio.write_png_gray(out / "frame_0_partial_ids.png", pr.ids)
    print(f"wrote {out}/frame_0_partial.png (coverage {int(pr.alpha.sum())} px)")
    return 0


def _cmd_synthesize(args) -> int:
    scene = load_scene(args.scene)
    config = _config(args)
    out = _out_dir(args)
    m, _ = rasterize_semantic(scene)
    img = pipeline._synthesize(m, scene, config, config.seed)
    imgio.write_png_rgb(out / "frame_0_synthesized.png", img)
    print(f"wrote {out}/frame_0_synthesized.png")
    return 0


def _cmd_blend(args) -> int:
    scene = load_scene(args.scene)
    config = _config(args)
    out = _out_dir(args)
    result = pipeline.run_frame(scene, config, frame_index=0, out_dir=out)
    print(f"wrote {out}/frame_0_hybrid.png (blend {config.blend_mode}, "
          f"retention {result.metrics['retention']:.6f})")
    return 0


def _cmd_run(args) -> int:
    scene = load_scene(args.scene)
    config = _config(args)
    out = _out_dir(args)
    frames = args.frames or 1
    results = [pipeline.run_frame(scene, config, frame_index=k, out_dir=out)
               for k in range(frames)]
    retention = float(np.mean([r.metrics["retention"] for r in results]))
    fid = None
    if args.real_features and len(results) >= 2:
        real = metrics.load_feature_source(args.real_features)
        fake = metrics.features_of_images(r.hybrid for r in results)
        fid = metrics.fid_between_sets(real, fake)
    method = {"alpha": "alpha-blend", "pyramid": "pyramid-blend",
              "gp-classical": "gp-classical", "gan-plug": "gan-blend"}[config.blend_mode]
    rows = [pipeline.AblationRow(method, retention, fid)]
    pipeline.write_report(rows, config, out)
    fid_str = f"{fid:.6f}" if fid is not None else "-"
    print(f"frames {frames}  retention {retention:.6f}  fid {fid_str}")
    print(f"report at {out}/report.json")
    return 0


def _cmd_ablate(args) -> int:
    scene = load_scene(args.scene)
    config = _config(args)
    out = _out_dir(args)
    real = metrics.load_feature_source(args.real_features) if args.real_features else None
    rows = pipeline.run_ablation(scene, config, real_features=real, out_dir=out)
    pipeline.write_report(rows, config, out)
    for row in rows:
        fid_str = f"{row.fid:.6f}" if row.fid is not None else "-"
        print(f"{row.method:16} retention {row.retention:.6f}  fid {fid_str}")
    print(f"report at {out}/report.json")
    return 0


def _cmd_metrics_retention(args) -> int:
    layout = SemanticImage(imgio.read_png_gray(args.layout))
    predicted = SemanticImage(imgio.read_png_gray(args.pred))
    ignore = [int(t) for t in args.ignore.split(",")] if args.ignore else [0]
    value = metrics.semantic_retention(layout, predicted, ignore_ids=ignore)
    print(f"{value:.6f}")
    return 0


def _cmd_metrics_fid(args) -> int:
    real = metrics.load_feature_source(args.real)
    fake = metrics.load_feature_source(args.fake)
    if args.save_real:
        metrics.write_features(args.save_real, real)
    if args.save_fake:
        metrics.write_features(args.save_fake, fake)
    print(f"{metrics.fid_between_sets(real, fake):.6f}")
    return 0


def _cmd_demo(args) -> int:
    path = write_demo_scene(args.out)
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hncg",
        description="Hybrid neural computer graphics pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("semantic", help="rasterize the semantic layout")
    _add_scene_flags(p)
    p.set_defaults(func=_cmd_semantic)

    p = sub.add_parser("render-partial", help="render the objects of interest")
    _add_scene_flags(p)
    p.set_defaults(func=_cmd_render_partial)

    p = sub.add_parser("synthesize", help="synthesize RGB from the semantic layout")
    _add_scene_flags(p)
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("blend", help="run one frame and write the hybrid image")
    _add_scene_flags(p)
    p.set_defaults(func=_cmd_blend)

    p = sub.add_parser("run", help="full pipeline with report")
    _add_scene_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("ablate", help="six-way method ablation with report")
    _add_scene_flags(p)
    p.set_defaults(func=_cmd_ablate)

    pm = sub.add_parser("metrics", help="standalone metric computations")
    msub = pm.add_subparsers(dest="metric", required=True)
    p = msub.add_parser("retention", help="top-1 mask accuracy between two id images")
    p.add_argument("--layout", required=True, help="ground-truth id PNG")
    p.add_argument("--pred", required=True, help="predicted id PNG")
    p.add_argument("--ignore", default="0", help="comma-separated ids to ignore")
    p.set_defaults(func=_cmd_metrics_retention)
    p = msub.add_parser("fid", help="Fréchet distance between two feature sources")
    p.add_argument("--real", required=True, help="HNCGFEAT file or PNG directory")
    p.add_argument("--fake", required=True, help="HNCGFEAT file or PNG directory")
    p.add_argument("--save-real", default=None, help="write real features to this HNCGFEAT file")
    p.add_argument("--save-fake", default=None, help="write fake features to this HNCGFEAT file")
    p.set_defaults(func=_cmd_metrics_fid)

    p = sub.add_parser("demo", help="write the bundled demo scene")
    p.add_argument("--out", required=True, help="target directory")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HncgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
