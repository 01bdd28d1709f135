"""Command-line front end.

Subcommands: fuse (pair -> fused image + report), decompose (dump component
images), validate (synthetic self-checks), version.  All diagnostics go to
stderr; machine-readable output lands only in files.  Exit codes: 0 ok,
1 processing error, 2 argument error.

Outputs are byte-identical for any --threads value: BLAS is pinned to one
thread and worker parallelism runs over a fixed column chunking.
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .config import FusionConfig, load_config
from .decomposition import decompose
from .fusion import fuse_components
from .image_io import ColorImage, load_image, replace_luminance, rgb_to_ycbcr, \
    save_image, ycbcr_to_rgb
from .metrics import build_report
from .patches import PatchMatrix, assemble_image
from .synthetic import run_validation_checks


def _log(msg):
    print(msg, file=sys.stderr)


def _read_config(path) -> FusionConfig:
    if path is None:
        return FusionConfig()
    return load_config(Path(path).read_text())


def _load_pair(path1, path2):
    """Load two inputs; at most one may be color.  Returns (gray1, gray2,
    color, color_first) where gray images are the fusion operands."""
    img1 = load_image(path1)
    img2 = load_image(path2)
    if isinstance(img1, ColorImage) and isinstance(img2, ColorImage):
        raise _ArgumentError("at most one color input is supported")
    shape1 = (img1.height, img1.width) if isinstance(img1, ColorImage) else img1.shape
    shape2 = (img2.height, img2.width) if isinstance(img2, ColorImage) else img2.shape
    if shape1 != shape2:
        raise _ArgumentError(
            f"input sizes differ: {path1} is {shape1[0]}x{shape1[1]}, "
            f"{path2} is {shape2[0]}x{shape2[1]}"
        )
    return img1, img2


class _ArgumentError(Exception):
    pass


def _atom_mosaic(D, patch_dim):
    """Tile dictionary atoms (each min-max normalized) into a square-ish
    grid image with 1px separators."""
    side = math.isqrt(patch_dim)
    n = D.shape[1]
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    tile = np.zeros((rows * (side + 1) + 1, cols * (side + 1) + 1))
    for t in range(n):
        atom = D[:, t].reshape(side, side, order="F")
        lo, hi = atom.min(), atom.max()
        if hi - lo > 1e-15:
            atom = (atom - lo) / (hi - lo)
        else:
            atom = np.full((side, side), 0.5)
        r, c = divmod(t, cols)
        rr, cc = r * (side + 1) + 1, c * (side + 1) + 1
        tile[rr : rr + side, cc : cc + side] = atom
    return tile


def _affine_to_unit(img):
    """Map a signed image affinely onto [0,1]; returns (mapped, lo, hi)."""
    lo, hi = float(img.min()), float(img.max())
    if hi - lo < 1e-15:
        return np.full_like(img, 0.5), lo, hi
    return (img - lo) / (hi - lo), lo, hi


def _run_pipeline(args, want_components):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = _read_config(args.config)
    img1, img2 = _load_pair(args.inputs[0], args.inputs[1])

    # the color input (if any) is the functional modality: fuse on its
    # luminance, pass its chroma through
    color = None
    if isinstance(img1, ColorImage):
        color, gray1 = img1, rgb_to_ycbcr(img1).data[..., 0]
    else:
        gray1 = img1
    if isinstance(img2, ColorImage):
        color, gray2 = img2, rgb_to_ycbcr(img2).data[..., 0]
    else:
        gray2 = img2

    t0 = time.perf_counter()
    result = decompose(gray1, gray2, cfg, args.threads)
    XF = fuse_components(result)
    fused = assemble_image(PatchMatrix(XF, result.geom))
    runtime = time.perf_counter() - t0
    _log(f"decomposed + fused in {runtime:.2f}s "
         f"(grid {result.geom.count} patches of {cfg.patch_dim}px)")

    report = json.loads(build_report(fused, result, runtime).to_json())

    if want_components:
        names = ("Z1", "Z2", "E1", "E2", "res1", "res2")
        parts = (result.Z1, result.Z2, result.E1, result.E2,
                 result.residual1, result.residual2)
        for name, part in zip(names, parts):
            img = assemble_image(PatchMatrix(part, result.geom), clip=False)
            if name.startswith("Z"):
                save_image(np.clip(img, 0.0, 1.0), outdir / f"{name}.png")
            else:
                # signed components: record the affine view so it inverts
                mapped, lo, hi = _affine_to_unit(img)
                save_image(mapped, outdir / f"{name}.png")
                report[f"{name}_viz_min"] = lo
                report[f"{name}_viz_max"] = hi
        _log(f"wrote component images to {outdir}")

    if args.dump_dicts:
        for name, D in (("D1", result.D1), ("D2", result.D2)):
            save_image(_atom_mosaic(D, cfg.patch_dim), outdir / f"{name}.png")
        _log(f"wrote dictionary mosaics to {outdir}")

    out_img = fused
    if color is not None:
        ycc = rgb_to_ycbcr(color)
        out_img = ycbcr_to_rgb(replace_luminance(ycc, fused))
    save_image(out_img, outdir / "fused.png")
    (outdir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    _log(f"wrote {outdir / 'fused.png'} and {outdir / 'report.json'}")
    return 0


def cmd_fuse(args):
    return _run_pipeline(args, want_components=args.dump_components)


def cmd_decompose(args):
    return _run_pipeline(args, want_components=True)


def cmd_validate(args):
    checks = run_validation_checks(args.seed, args.quick, args.threads)
    width = max(len(name) for name, *_ in checks)
    failed = 0
    for name, ok, detail, secs in checks:
        status = "PASS" if ok else "FAIL"
        failed += 0 if ok else 1
        _log(f"  {name:<{width}}  {status}  {detail}  [{secs:.1f}s]")
    _log(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cdlfuse",
        description="Multimodal image fusion via coupled dictionary learning",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_io(p, components_flag):
        p.add_argument("inputs", nargs=2, metavar="IMAGE",
                       help="two co-registered 8-bit PNGs of equal size "
                            "(at most one color)")
        p.add_argument("-o", "--out", default=".", help="output directory")
        p.add_argument("-c", "--config", default=None,
                       help="key=value config file")
        p.add_argument("--dump-dicts", action="store_true",
                       help="also write dictionary atom mosaics")
        if components_flag:
            p.add_argument("--dump-components", action="store_true",
                           help="also write component images Z/E/res")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (output is identical for any N)")

    p = sub.add_parser("fuse", help="fuse an image pair")
    add_io(p, components_flag=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("decompose", help="decompose a pair and dump components")
    add_io(p, components_flag=False)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("validate", help="run synthetic self-checks")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--quick", action="store_true", help="reduced sizes")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("version", help="print version")
    p.set_defaults(func=lambda args: (print(__version__), 0)[1])

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        # BLAS pinned to one thread: reproducibility across --threads values
        with threadpool_limits(limits=1):
            return args.func(args)
    except _ArgumentError as e:
        _log(f"error: {e}")
        return 2
    except ValueError as e:
        _log(f"error: {e}")
        return 2
    except Exception as e:  # processing failure
        _log(f"error: {type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
