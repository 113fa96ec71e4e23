"""sigsal-export: dump model activations or reference micronet bundles."""

import argparse
import glob
import json
import sys


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sigsal-export",
        description="Export torchvision activations / reference micronet bundles "
                    "into the sigsal interchange formats.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export-acts", help="dump one layer's activations per image")
    p.add_argument("--model", default="resnet18")
    p.add_argument("--layer", default="layer4")
    p.add_argument("--images", required=True, help="glob of input images")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--size", type=int, default=224)
    p.add_argument("--seed", type=int, default=0,
                   help="weight seed when pretrained weights are unavailable")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("export-micronet", help="write a seeded reference bundle + trace")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    from sigsal_exporter.activations import ExportJob, ImageError, LayerNotFound, export_activations
    from sigsal_exporter.micronet import export_micronet

    try:
        if args.command == "export-acts":
            paths = sorted(glob.glob(args.images))
            if not paths:
                print(f"sigsal-export: no images match {args.images!r}", file=sys.stderr)
                return 2
            manifest = export_activations(ExportJob(
                model=args.model, layer=args.layer, images=paths,
                outdir=args.out, size=args.size, seed=args.seed))
            if args.json:
                print(json.dumps({"command": "export-acts", "manifest": str(manifest)}))
        else:
            outdir = export_micronet(args.seed, args.out)
            if args.json:
                print(json.dumps({"command": "export-micronet", "model_dir": str(outdir)}))
    except (LayerNotFound, ImageError, OSError) as exc:
        print(f"sigsal-export: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
