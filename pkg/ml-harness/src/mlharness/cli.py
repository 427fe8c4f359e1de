"""Command-line surface: train-cae, export-latents, train-identifier."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import torch

from .cae import ConvAutoencoder
from .data import load_manifest
from .train import export_latents, train_cae, train_identifier


def _cmd_train_cae(args) -> int:
    manifest = load_manifest(args.manifest)
    model, trace = train_cae(manifest, epochs=args.epochs, seed=args.seed,
                             batch_size=args.batch_size, limit=args.limit)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "cae.pt"
    torch.save(model.state_dict(), out)
    print(f"wrote {out} (held-out MSE {trace[0]:.6f} -> {trace[-1]:.6f})")
    return 0


def _cmd_export_latents(args) -> int:
    manifest = load_manifest(args.manifest)
    model = ConvAutoencoder()
    model.load_state_dict(torch.load(args.weights, map_location="cpu"))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    latents = export_latents(model, manifest, out, batch_size=args.batch_size)
    print(f"wrote {out} ({latents.shape[0]} x {latents.shape[1]})")
    return 0


def _cmd_train_identifier(args) -> int:
    manifest = load_manifest(args.manifest)
    model, report, latency = train_identifier(
        manifest, epochs=args.epochs, seed=args.seed,
        batch_size=args.batch_size)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), args.out_dir / "resnet50.pt")
    out = args.out_dir / "report.json"
    out.write_text(report)
    print(f"wrote {out} (single-image latency {latency * 1e3:.0f} ms)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlharness")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", required=True)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--batch-size", type=int, default=32)
    common.add_argument("--out-dir", type=Path, default=Path("."))

    p = sub.add_parser("train-cae", parents=[common])
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=_cmd_train_cae)

    p = sub.add_parser("export-latents", parents=[common])
    p.add_argument("--weights", required=True)
    p.add_argument("--out", default="latents.bin")
    p.set_defaults(func=_cmd_export_latents)

    p = sub.add_parser("train-identifier", parents=[common])
    p.add_argument("--epochs", type=int, default=10)
    p.set_defaults(func=_cmd_train_identifier)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
