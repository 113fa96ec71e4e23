"""Command-line front end: one subcommand per pipeline, file in / file out.

Every subcommand is deterministic given its flags (seeds are explicit).
Exit codes: 0 success, 1 engine error (diagnostic on stderr), 2 usage error.
SIGSAL_THREADS caps numeric-library parallelism and must therefore be
applied before numpy is first imported, which is why the heavy imports
happen inside main().
"""

import argparse
import json
import os
import sys


class UsageError(Exception):
    """Usage error discovered after argparse (exit code 2)."""


def _cap_threads():
    cap = os.environ.get("SIGSAL_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def _bilateral_args(parser):
    parser.add_argument("--sigma-spatial", type=float, default=3.0)
    parser.add_argument("--sigma-range", type=float, default=0.1)
    parser.add_argument("--radius", type=int, default=6)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sigsal",
        description="DCT-signature saliency engine: transforms, activation maps, "
                    "WSOL scoring, randomization sanity checks, sparse-recovery trials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dct", help="forward/inverse orthonormal DCT of an NPY tensor")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("suppress", help="background suppression of a grayscale image")
    p.add_argument("--image", required=True, help="PGM (P5) or rank-2 NPY")
    p.add_argument("--out", required=True, help="output map (NPY)")
    p.add_argument("--pgm", help="also write the map as quantized PGM")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("map", help="saliency map from an activation stack")
    p.add_argument("--activations", required=True, help="rank-3 NPY [channels, h, w]")
    p.add_argument("--out", required=True, help="output map (NPY)")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--method", choices=("signature", "eigen"), default="signature")
    _bilateral_args(p)
    p.add_argument("--pgm", help="also write the map as quantized PGM")
    p.add_argument("--image", help="grayscale image for --overlay")
    p.add_argument("--overlay", help="write jet overlay as PPM (needs --image)")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("boxes", help="bounding boxes from a saliency map")
    p.add_argument("--in", dest="src", required=True, help="map NPY in [0,1]")
    p.add_argument("--count", type=int, required=True, help="target box count")
    p.add_argument("--out", help="write boxes JSON")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("wsol", help="evaluate a manifest of maps against ground truth")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="write report JSON")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sanity", help="layer-randomization checks for the map")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--image", required=True, help="PGM or NPY input image")
    p.add_argument("--layer", required=True, help="tapped convolutional layer")
    p.add_argument("--mode", choices=("cascading", "independent"), default="cascading")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    _bilateral_args(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("theorem", help="sparse-recovery Monte Carlo estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fg", type=int, required=True)
    p.add_argument("--bg", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="per-trial similarities CSV")
    p.add_argument("--summary", help="summary JSON file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("infer", help="forward pass of a micronet model")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True, help="PGM or NPY input")
    p.add_argument("--dump-layer", help="also write this layer's activations")
    p.add_argument("--out", help="NPY path for --dump-layer")
    p.add_argument("--json", action="store_true")

    return parser


def _load_image(path):
    from sigsal.tensorio import read_gray_image, read_tensor

    if str(path).endswith(".pgm"):
        return read_gray_image(path)
    return read_tensor(path)


def _emit(args, payload):
    if args.json:
        print(json.dumps(payload, sort_keys=True))


def cmd_dct(args):
    from sigsal.spectral import dct1, dct2, idct1, idct2
    from sigsal.tensorio import read_tensor, write_tensor

    x = read_tensor(args.src)
    if args.inverse:
        out = idct1(x) if x.ndim == 1 else idct2(x)
    else:
        out = (dct1(x) if x.ndim == 1 else dct2(x)).coefficients
    write_tensor(out, args.out)
    _emit(args, {"command": "dct", "inverse": args.inverse, "shape": list(out.shape),
                 "out": args.out})
    return 0


def cmd_suppress(args):
    from sigsal.saliency import suppress_background
    from sigsal.tensorio import write_gray_image, write_tensor

    result = suppress_background(_load_image(args.image))
    write_tensor(result, args.out)
    if args.pgm:
        write_gray_image(result, args.pgm)
    _emit(args, {"command": "suppress", "shape": list(result.shape), "out": args.out})
    return 0


def cmd_map(args):
    from sigsal.saliency import (
        BilateralParams,
        eigen_cam_map,
        render_overlay,
        signature_activation_map,
    )
    from sigsal.tensorio import read_tensor, write_gray_image, write_rgb_image, write_tensor

    acts = read_tensor(args.activations)
    if args.method == "signature":
        params = BilateralParams(args.sigma_spatial, args.sigma_range, args.radius)
        saliency = signature_activation_map(acts, args.height, args.width, params)
    else:
        saliency = eigen_cam_map(acts, args.height, args.width)
    write_tensor(saliency.values, args.out)
    if args.pgm:
        write_gray_image(saliency.values, args.pgm)
    if args.overlay:
        if not args.image:
            raise UsageError("--overlay requires --image")
        write_rgb_image(render_overlay(_load_image(args.image), saliency, args.alpha),
                        args.overlay)
    _emit(args, {"command": "map", "method": args.method,
                 "shape": [saliency.height, saliency.width], "out": args.out})
    return 0


def cmd_boxes(args):
    from sigsal.tensorio import read_tensor
    from sigsal.wsol import boxes_from_map

    threshold, boxes = boxes_from_map(read_tensor(args.src), args.count)
    payload = {"command": "boxes", "threshold": threshold,
               "boxes": [list(b) for b in boxes]}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    _emit(args, payload)
    return 0


def cmd_wsol(args):
    from sigsal.wsol import evaluate, load_manifest, report_to_dict

    report = report_to_dict(evaluate(load_manifest(args.manifest)))
    report["command"] = "wsol"
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    _emit(args, report)
    return 0


def cmd_sanity(args):
    from sigsal.micronet import load_model
    from sigsal.saliency import BilateralParams
    from sigsal.sanity import run_sanity, write_run

    params = BilateralParams(args.sigma_spatial, args.sigma_range, args.radius)
    run = run_sanity(load_model(args.model), _load_image(args.image), args.layer,
                     args.mode, args.seed, params)
    write_run(run, args.out)
    _emit(args, {
        "command": "sanity",
        "mode": run.mode,
        "tap_layer": run.tap_layer,
        "stages": [
            {"layer": s.layer, "upstream_flag": s.upstream_of_tap,
             "spearman": s.spearman_to_original, "max_abs_diff": s.max_abs_diff}
            for s in run.stages
        ],
        "out": args.out,
    })
    return 0


def cmd_theorem(args):
    from sigsal.theorem import SparseMixSpec, estimate_bound

    spec = SparseMixSpec(n=args.n, fg_support=args.fg, bg_support=args.bg, seed=args.seed)
    est = estimate_bound(spec, args.trials)
    summary = {
        "command": "theorem",
        "n": args.n,
        "fg_support": args.fg,
        "bg_support": args.bg,
        "trials": est.trials,
        "seed": args.seed,
        "mean": est.mean_similarity,
        "stderr": est.std_error,
        "in_theorem": spec.in_theorem,
    }
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write("trial,similarity\n")
            for i, sim in enumerate(est.similarities):
                fh.write(f"{i},{sim:.17g}\n")
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    _emit(args, summary)
    return 0


def cmd_infer(args):
    from sigsal.micronet import forward, load_model
    from sigsal.tensorio import write_tensor

    trace = forward(load_model(args.model), _load_image(args.image))
    if args.dump_layer:
        if not args.out:
            raise UsageError("--dump-layer requires --out")
        if args.dump_layer not in trace.outputs:
            from sigsal.errors import UnknownLayer

            raise UnknownLayer(f"no layer named {args.dump_layer!r}")
        write_tensor(trace.outputs[args.dump_layer], args.out)
    payload = {"command": "infer"}
    if trace.probabilities is not None:
        payload["probabilities"] = [float(p) for p in trace.probabilities]
    _emit(args, payload)
    return 0


_HANDLERS = {
    "dct": cmd_dct,
    "suppress": cmd_suppress,
    "map": cmd_map,
    "boxes": cmd_boxes,
    "wsol": cmd_wsol,
    "sanity": cmd_sanity,
    "theorem": cmd_theorem,
    "infer": cmd_infer,
}


def main(argv=None):
    _cap_threads()
    args = build_parser().parse_args(argv)
    from sigsal.errors import SigsalError

    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"sigsal {args.command}: {exc}", file=sys.stderr)
        return 2
    except (SigsalError, OSError) as exc:
        print(f"sigsal {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
