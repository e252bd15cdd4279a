"""Command-line interface.

Subcommands::

    manifold-mds embed INPUT --out DIR        embed a CSV matrix or JSON point file
    manifold-mds trajectory --out DIR         embed a synthetic SO(q) walk in R^3
    manifold-mds gen KIND --out FILE          write a bundled or synthetic dataset
    manifold-mds distances INPUT --out FILE   write the distance matrix only
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import datasets
from .errors import DatasetError, ManifoldMDSError
from .io import load_dataset, read_coords_csv, save_dataset, write_coords_csv, write_matrix_csv
from .manifolds import ManifoldKind
from .report import run_embedding, run_trajectory, write_outputs
from .solver import GivenInit, RandomInit, SolverConfig

log = logging.getLogger("manifold_mds")

SCHEMES = ("kruskal", "sammon", "dkm")
GEN_KINDS = ("cities", "planar", "sphere", "so", "spd", "su")


def _solver_args(parser, dim_default):
    parser.add_argument("--scheme", choices=SCHEMES, default="dkm")
    parser.add_argument("--dim", type=int, choices=(1, 2, 3), default=dim_default)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outer-max", type=int, default=500)
    parser.add_argument("--tol", type=float, default=1e-9, help="relative stress-decrease threshold")
    parser.add_argument("--restarts", type=int, default=1)
    parser.add_argument("--workers", type=int, default=None, help="threads for pairwise distances")
    parser.add_argument("--out", required=True, help="output directory")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="manifold-mds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", parents=[common], help="embed a dataset and write coordinates, trace and figure")
    p.add_argument("input")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    _solver_args(p, 2)
    p.add_argument("--init", choices=("random", "file"), default="random")
    p.add_argument("--init-file", help="coordinates CSV used with --init file")
    p.add_argument("--init-perturb", type=float, default=0.0,
                   help="std of Gaussian noise added to the --init-file coordinates")

    p = sub.add_parser("trajectory", parents=[common], help="embed a geodesic random walk on SO(q)")
    p.add_argument("--q", type=int, default=9)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--keep", type=int, default=20, help="points kept after down-sampling")
    p.add_argument("--step-scale", type=float, default=0.3)
    p.add_argument("--decay", type=float, default=0.97)
    _solver_args(p, 3)

    p = sub.add_parser("gen", parents=[common], help="write a dataset file")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("distances", parents=[common], help="write the pairwise distance matrix of a dataset")
    p.add_argument("input")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    return parser


def _config(args, init):
    return SolverConfig(p=args.dim, outer_max=args.outer_max, outer_tol=args.tol,
                        init=init, restarts=args.restarts)


def run_embed_command(args):
    dataset = load_dataset(args.input, args.format)
    if args.init == "file":
        if not args.init_file:
            raise DatasetError("--init file needs --init-file")
        _, Z0 = read_coords_csv(args.init_file)
        if args.init_perturb:
            rng = np.random.default_rng(args.seed)
            Z0 = Z0 + args.init_perturb * rng.standard_normal(Z0.shape)
        init = GivenInit(Z0)
    else:
        init = RandomInit(args.seed)
    report, result = run_embedding(dataset, args.scheme, _config(args, init), workers=args.workers)
    paths = write_outputs(report, args.out)
    log.info("%d iterations, final stress %.6g (%s)", result.outer_iterations,
             result.stress, result.termination.value)
    return report, paths


def run_trajectory_command(args):
    cfg = _config(args, RandomInit(args.seed))
    report, result = run_trajectory(args.q, args.steps, args.keep, args.step_scale,
                                    args.decay, args.seed, args.scheme, cfg, args.workers)
    paths = write_outputs(report, args.out)
    log.info("%d iterations, final stress %.6g", result.outer_iterations, result.stress)
    return report, paths


def run_gen_command(args):
    out = Path(args.out)
    kind = args.kind
    if kind == "cities":
        save_dataset(datasets.cities(), out, "csv")
    elif kind == "planar":
        dataset, X = datasets.planar(args.n or 10, args.seed)
        save_dataset(dataset, out, "csv")
        write_coords_csv(out.with_name(out.stem + "_points.csv"), dataset.labels, X)
    elif kind == "sphere":
        save_dataset(datasets.sphere(args.n or 15, args.q, args.seed), out, "json")
    else:
        make = {"so": ManifoldKind.special_orthogonal, "spd": ManifoldKind.spd,
                "su": ManifoldKind.special_unitary}[kind]
        save_dataset(datasets.random_points(make(args.q), args.n or 10, args.seed), out, "json")
    return out


def run_distances_command(args):
    dataset = load_dataset(args.input, args.format)
    D = dataset.distances(workers=args.workers)
    write_matrix_csv(args.out, dataset.labels, D.values)
    return D


COMMANDS = {
    "embed": run_embed_command,
    "trajectory": run_trajectory_command,
    "gen": run_gen_command,
    "distances": run_distances_command,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ManifoldMDSError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
