"""Command-line surface: cohort, simulate, dataset, segment, tsne, baseline, plot."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import kinematics, pipeline, plots, radar, segmentation, spectrogram
from .cohort import CohortSpec, cohort_from_json, cohort_to_json, generate_cohort
from .tsne import TsneConfig, tsne
from .radar import RadarConfig


def _parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file with parameter overrides")
    p.add_argument("--out-dir", type=Path, default=Path("."))
    return p


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    return json.loads(args.config.read_text())


def _cmd_cohort(args) -> int:
    cfg = _load_config(args)
    if args.preset == "paper":
        spec = CohortSpec.paper_preset(seed=args.seed)
    else:
        spec = CohortSpec(count=args.count, female_count=args.females,
                          bmi_range=(args.bmi_min, args.bmi_max), seed=args.seed,
                          rcs_bmi_exponent=cfg.get("rcs_bmi_exponent", 1.0))
    profiles = generate_cohort(spec)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    out.write_text(cohort_to_json(profiles, spec))
    print(f"wrote {out} ({len(profiles)} subjects)")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    profiles = cohort_from_json(Path(args.cohort).read_text())
    profile = next(p for p in profiles if p.id == args.subject)
    rcfg = RadarConfig(reference_snr_db=cfg.get("reference_snr_db", args.snr))
    style = pipeline.subject_style(args.seed, profile.id)
    params = kinematics.gait_parameters(profile, args.speed, style)
    traj = kinematics.simulate_trajectories(
        profile, params, args.mode, duration=args.duration,
        sample_rate=rcfg.slow_time_rate, style=style)
    signal = radar.synthesize(traj, profile.segments, rcfg, subject_id=profile.id)
    signal = radar.apply_snr(signal, args.range, rcfg, seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / f"subject{profile.id:02d}_baseband.bin"
    radar.write_baseband(signal, out)
    if args.dump_trajectories:
        kinematics.dump_trajectories_csv(traj, str(args.out_dir / "trajectories.csv"))
    print(f"wrote {out}")
    return 0


def _conditions(args, cfg: dict) -> list[pipeline.Condition]:
    if args.preset == "paper-highsnr":
        return [pipeline.Condition(3.0, cfg.get("reference_snr_db", 30.0))]
    if args.preset == "paper-mixed":
        snr = cfg.get("reference_snr_db", 30.0)
        return [pipeline.Condition(3.0, snr), pipeline.Condition(10.0, snr)]
    return [pipeline.Condition(r, cfg.get("reference_snr_db", args.snr))
            for r in args.ranges]


def _cmd_dataset(args) -> int:
    cfg = _load_config(args)
    if "cohort" in cfg:
        c = cfg["cohort"]
        spec = CohortSpec(
            count=c["count"], female_count=c.get("female_count", 0),
            bmis=tuple(c["bmis"]) if c.get("bmis") else None,
            bmi_range=tuple(c["bmi_range"]) if c.get("bmi_range") else None,
            seed=c.get("seed", 0),
            rcs_bmi_exponent=c.get("rcs_bmi_exponent", 1.0),
            height_window=c.get("height_window", 0.10))
    else:
        spec = CohortSpec.paper_preset(seed=cfg.get("cohort_seed", 0))
    manifest = pipeline.generate_dataset(
        spec, _conditions(args, cfg), args.out_dir, seed=args.seed,
        duration=cfg.get("duration_s", args.duration),
        speed=cfg.get("speed_mps", args.speed),
        dataset_id=args.preset or "custom")
    if args.test_seed is not None:
        manifest = pipeline.fresh_session_split(manifest, args.out_dir,
                                                args.test_seed)
    print(f"wrote {args.out_dir / 'manifest.json'} ({len(manifest.records)} images)")
    return 0


def _cmd_segment(args) -> int:
    signal = radar.read_baseband(args.baseband)
    spec = spectrogram.micro_doppler(signal, RadarConfig())
    seg = segmentation.segment(spec)
    spans = segmentation.slice_half_gaits(spec, seg)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    out.write_text(segmentation.segmentation_report(seg, spans))
    print(f"wrote {out} ({len(spans)} slices, period {seg.half_gait_period:.3f} s)")
    return 0


def _cmd_tsne(args) -> int:
    cfg = _load_config(args)
    manifest = pipeline.read_manifest(args.manifest)
    base_dir = Path(args.manifest).parent
    if args.features:
        x = pipeline.load_latents(args.features, manifest)
    else:
        x = pipeline.image_features(manifest, base_dir)
    tcfg = TsneConfig(perplexity=cfg.get("perplexity", args.perplexity),
                      iterations=cfg.get("iterations", args.iterations),
                      seed=args.seed)
    y, trace = tsne(x, tcfg)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    pipeline.write_embedding_csv(y, manifest, out)
    print(f"wrote {out} (final KL {trace[-1]:.4f})")
    return 0


def _cmd_baseline(args) -> int:
    manifest = pipeline.read_manifest(args.manifest)
    base_dir = Path(args.manifest).parent
    features = None
    if args.features:
        features = pipeline.load_latents(args.features, manifest)
    report = pipeline.knn_baseline(manifest, base_dir, k=args.k, features=features)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    out.write_text(report.to_json())
    if args.confusion_png:
        plots.plot_confusion(report, args.out_dir / args.confusion_png)
    print(f"wrote {out} (accuracy {report.overall_accuracy:.4f})")
    return 0


def _cmd_plot(args) -> int:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    if args.embedding:
        plots.plot_embedding(args.embedding, out, color_by=args.color_by)
    elif args.report:
        report = pipeline.EvaluationReport.from_json(Path(args.report).read_text())
        plots.plot_confusion(report, out)
    else:
        raise ValueError("one of --embedding or --report is required")
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaitradar",
                                     description="Radar micro-Doppler gait toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _parent()

    p = sub.add_parser("cohort", parents=[parent])
    p.add_argument("--preset", choices=["paper"], default=None)
    p.add_argument("--count", type=int, default=22)
    p.add_argument("--females", type=int, default=5)
    p.add_argument("--bmi-min", type=float, default=18.5)
    p.add_argument("--bmi-max", type=float, default=30.0)
    p.add_argument("--out", default="cohort.json")
    p.set_defaults(func=_cmd_cohort)

    p = sub.add_parser("simulate", parents=[parent])
    p.add_argument("--cohort", required=True)
    p.add_argument("--subject", type=int, required=True)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--speed", type=float, default=1.6)
    p.add_argument("--mode", choices=["treadmill", "free_walk"], default="treadmill")
    p.add_argument("--snr", type=float, default=30.0)
    p.add_argument("--range", type=float, default=3.0)
    p.add_argument("--dump-trajectories", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("dataset", parents=[parent])
    p.add_argument("--preset", choices=["paper-highsnr", "paper-mixed"], default=None)
    p.add_argument("--ranges", type=float, nargs="+", default=[3.0])
    p.add_argument("--snr", type=float, default=30.0)
    p.add_argument("--duration", type=float, default=pipeline.DEFAULT_DURATION)
    p.add_argument("--speed", type=float, default=pipeline.DEFAULT_SPEED)
    p.add_argument("--test-seed", type=int, default=None,
                   help="also generate a fresh test session with this seed")
    p.set_defaults(func=_cmd_dataset)

    p = sub.add_parser("segment", parents=[parent])
    p.add_argument("--baseband", required=True)
    p.add_argument("--out", default="segmentation.json")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("tsne", parents=[parent])
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", default=None)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--out", default="embedding.csv")
    p.set_defaults(func=_cmd_tsne)

    p = sub.add_parser("baseline", parents=[parent])
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", default=None)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", default="report.json")
    p.add_argument("--confusion-png", default=None)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("plot", parents=[parent])
    p.add_argument("--embedding", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--color-by", choices=["subject", "bmi"], default="subject")
    p.add_argument("--out", default="plot.png")
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single-line machine-parsable diagnostic
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
