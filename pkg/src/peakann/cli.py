"""Command-line front end: full pipeline, exact reference mode, scoring, and
the synthetic dataset generator.

Exit codes: 0 success, 2 usage/config/input-format errors, 1 runtime errors.
Metrics and timings go to stdout as key=value lines.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return parse


def _add_common_pipeline_flags(sp, exact: bool):
    sp.add_argument("--input", help="vector file (fvecs or f32bin)")
    sp.add_argument("--input-format", choices=["auto", "fvecs", "f32bin"], default="auto")
    sp.add_argument("--k", type=_positive(int), default=16, help="neighbors per point for densities")
    sp.add_argument("--Ld", type=_positive(int), default=None,
                    help="initial width of the dependent-point doubling search (default 2k)")
    if exact:
        sp.set_defaults(index="bruteforce", threshold=0)
    else:
        sp.add_argument("--index", choices=["vamana", "bruteforce"], default="vamana")
        sp.add_argument("--L", type=_positive(int), default=32, help="query beam width")
        sp.add_argument("--L-build", type=_positive(int), default=None, help="build beam width (default: L)")
        sp.add_argument("--R", type=_positive(int), default=32, help="graph degree bound")
        sp.add_argument("--alpha", type=float, default=1.1, help="pruning slack, >= 1")
        sp.add_argument("--num-starts", type=_positive(int), default=None,
                        help="sampled search starts (default ceil(sqrt(n)))")
        sp.add_argument("--medoid-start", action="store_true", help="single centroid-nearest start")
        sp.add_argument("--threshold", type=int, default=300,
                        help="unresolved-point count below which the doubling search stops")
    sp.add_argument("--density", choices=["kth", "kth_normalized", "exp_sum", "sum_exp", "sum"], default="kth")
    sp.add_argument("--center", choices=["threshold", "product", "local"], default="product")
    sp.add_argument("--delta-min", type=float, default=None, help="threshold center parameter")
    sp.add_argument("--nc", type=_positive(int), default=None, help="product center cluster count")
    sp.add_argument("--rho-min", type=float, default=0.0, help="noise density cutoff")
    sp.add_argument("--threads", type=_positive(int), default=None)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--output", help="write one canonical label per line")
    sp.add_argument("--sidecar", help="write center/noise ids as JSON")
    sp.add_argument("--truth", help="ground-truth labels; prints ari/homogeneity/completeness")
    sp.add_argument("--state-out", help="dump per-point state (npz) for later re-clustering")
    sp.add_argument("--state-in", help="reuse a dumped state: skip index/kNN, re-run policies only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peakann", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("cluster", help="run the clustering pipeline")
    _add_common_pipeline_flags(sp, exact=False)
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("exact", help="reference run: exact kNN everywhere")
    _add_common_pipeline_flags(sp, exact=True)
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("score", help="compare two label files")
    sp.add_argument("pred")
    sp.add_argument("truth")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("gen", help="generate a Gaussian-mixture dataset")
    sp.add_argument("--n", type=_positive(int), required=True)
    sp.add_argument("--c", type=_positive(int), required=True)
    sp.add_argument("--d", type=_positive(int), default=128)
    sp.add_argument("--variance", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--format", choices=["fvecs", "f32bin"], default="fvecs")
    sp.add_argument("--out", required=True, help="path prefix; writes <out>.fvecs/.f32bin and <out>.labels")
    sp.set_defaults(func=cmd_gen)

    return parser


def _center_policy(args, parser):
    from .cluster import LocalCenter, ProductCenter, ThresholdCenter

    if args.center == "threshold":
        if args.delta_min is None:
            parser.error("--center threshold requires --delta-min")
        return ThresholdCenter(delta_min=args.delta_min)
    if args.center == "product":
        if args.nc is None:
            parser.error("--center product requires --nc")
        return ProductCenter(n_clusters=args.nc)
    return LocalCenter()


def _dump_state(state, path):
    np.savez(
        path,
        rho=state.rho,
        lam=state.lam,
        delta=state.delta,
        neighbor_ids=state.neighbors.ids if state.neighbors is not None else np.empty((0, 0), np.int64),
        neighbor_dists=state.neighbors.dists if state.neighbors is not None else np.empty((0, 0), np.float64),
    )


def _load_state(path):
    from .cluster import DpcState
    from .dependent import Dependents
    from .index import Neighborhoods

    with np.load(path) as z:
        neighbors = None
        if z["neighbor_ids"].size > 0:
            neighbors = Neighborhoods(z["neighbor_ids"], z["neighbor_dists"])
        return DpcState(rho=z["rho"], dependents=Dependents(z["lam"], z["delta"]), neighbors=neighbors)


def cmd_cluster(args, parser) -> int:
    from .cluster import (
        BruteForceConfig,
        NoisePolicy,
        VamanaConfig,
        reapply_policies,
        run_pipeline,
    )
    from .data import read_labels, read_vectors, write_clustering
    from .dependent import DoublingParams
    from .metrics import ari, homogeneity_completeness

    center = _center_policy(args, parser)
    noise = NoisePolicy(rho_min=args.rho_min)

    if args.state_in:
        if not os.path.exists(args.state_in):
            parser.error(f"state file not found: {args.state_in}")
        state = _load_state(args.state_in)
        clustering = reapply_policies(state, center, noise)
        timings = {}
    else:
        if not args.input:
            parser.error("--input is required (or --state-in for reapply mode)")
        if not os.path.exists(args.input):
            parser.error(f"input file not found: {args.input}")
        points = read_vectors(args.input, args.input_format)
        ld = args.Ld if args.Ld is not None else 2 * args.k
        if ld <= args.k:
            parser.error(f"--Ld must be > --k, got Ld={ld}, k={args.k}")
        if args.index == "vamana":
            if args.alpha < 1.0:
                parser.error(f"--alpha must be >= 1, got {args.alpha}")
            if args.L < args.k:
                parser.error(f"--L must be >= --k, got L={args.L}, k={args.k}")
            config = VamanaConfig(
                R=args.R,
                L_build=args.L_build if args.L_build is not None else args.L,
                L=args.L,
                alpha=args.alpha,
                num_starts=args.num_starts,
                seed=args.seed,
                medoid_start=args.medoid_start,
            )
        else:
            config = BruteForceConfig()
        result = run_pipeline(
            points,
            config,
            k=args.k,
            density_kind=args.density,
            center_policy=center,
            noise_policy=noise,
            doubling_params=DoublingParams(initial_k=ld, threshold=args.threshold),
        )
        clustering, state, timings = result.clustering, result.state, result.timings
        if args.state_out:
            _dump_state(state, args.state_out)

    if args.output:
        write_clustering(clustering, args.output, sidecar=args.sidecar)

    print(f"n_clusters={clustering.n_clusters}")
    print(f"n_centers={clustering.centers.shape[0]}")
    print(f"n_noise={clustering.noise.shape[0]}")
    total = sum(timings.values())
    if total > 0:
        for name in ("index", "density", "dependent", "unionfind"):
            print(f"stage_{name}_s={timings[name]:.6f}")
            print(f"stage_{name}_pct={100.0 * timings[name] / total:.2f}")
        print(f"total_s={total:.6f}")
    if args.truth:
        if not os.path.exists(args.truth):
            parser.error(f"truth file not found: {args.truth}")
        truth = read_labels(args.truth)
        if truth.shape[0] != clustering.labels.shape[0]:
            parser.error(f"truth has {truth.shape[0]} labels, clustering has {clustering.labels.shape[0]}")
        h, c = homogeneity_completeness(clustering.labels, truth)
        print(f"ari={ari(clustering.labels, truth)}")
        print(f"homogeneity={h}")
        print(f"completeness={c}")
    return 0


def cmd_score(args, parser) -> int:
    from .data import read_labels
    from .metrics import ari, homogeneity_completeness

    for path in (args.pred, args.truth):
        if not os.path.exists(path):
            parser.error(f"label file not found: {path}")
    pred = read_labels(args.pred)
    truth = read_labels(args.truth)
    if pred.shape[0] != truth.shape[0]:
        parser.error(f"label files differ in length: {pred.shape[0]} vs {truth.shape[0]}")
    h, c = homogeneity_completeness(pred, truth)
    print(f"ari={ari(pred, truth)}")
    print(f"homogeneity={h}")
    print(f"completeness={c}")
    return 0


def cmd_gen(args, parser) -> int:
    from .data import GaussianSpec, generate_gaussian, write_f32bin, write_fvecs, write_labels

    if args.c > args.n:
        parser.error(f"--c must be <= --n, got c={args.c}, n={args.n}")
    points, labels = generate_gaussian(
        GaussianSpec(n=args.n, c=args.c, d=args.d, variance=args.variance, seed=args.seed)
    )
    if args.format == "fvecs":
        vec_path = f"{args.out}.fvecs"
        write_fvecs(points, vec_path)
    else:
        vec_path = f"{args.out}.f32bin"
        write_f32bin(points, vec_path)
    write_labels(labels, f"{args.out}.labels")
    print(f"vectors={vec_path}")
    print(f"labels={args.out}.labels")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = getattr(args, "threads", None)
    if threads is not None:
        # the numba thread cap is frozen at import; raise it first if possible
        os.environ.setdefault("NUMBA_NUM_THREADS", str(threads))
    from ._config import set_num_threads

    if threads is not None:
        set_num_threads(threads)
    try:
        return args.func(args, parser)
    except SystemExit:
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        from .data import DataFormatError

        return 2 if isinstance(exc, (DataFormatError, FileNotFoundError)) else 1


if __name__ == "__main__":
    sys.exit(main())
