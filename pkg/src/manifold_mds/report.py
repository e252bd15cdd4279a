"""End-to-end runs: dataset in, coordinates, trace, matrices and figure out."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import datasets
from .io import write_coords_csv, write_matrix_csv, write_trace_csv
from .solver import SolverConfig, embed
from .stress import DistanceMatrix, StressTrace, embedded_distances, make_weights
from .svg import emit_svg

OUTPUT_FILES = ("coords.csv", "trace.csv", "dist_in.csv", "dist_out.csv", "figure.svg")


@dataclass(frozen=True, eq=False)
class RunReport:
    labels: tuple
    Z: np.ndarray
    trace: StressTrace
    D_in: DistanceMatrix
    D_out: np.ndarray
    connect: bool = False

    @classmethod
    def from_result(cls, labels, result, D_in, connect=False):
        D_out = embedded_distances(result.Z)
        return cls(tuple(labels), result.Z, result.trace, D_in, D_out, connect)


def run_embedding(dataset, scheme="dkm", cfg=None, workers=None, connect=False):
    """Distances (computed if needed), weights and embedding of ``dataset``."""
    D = dataset.distances(workers=workers)
    S = make_weights(scheme, D)
    result = embed(D, S, cfg or SolverConfig())
    return RunReport.from_result(dataset.labels, result, D, connect=connect), result


def run_trajectory(q=9, steps=200, keep=20, step_scale=0.3, decay=0.97, seed=0,
                   scheme="dkm", cfg=None, workers=None):
    dataset = datasets.trajectory(q, steps, keep, step_scale, decay, seed)
    cfg = cfg or SolverConfig(p=3)
    return run_embedding(dataset, scheme, cfg, workers=workers, connect=True)


def write_outputs(report, outdir):
    """Write the five output files into ``outdir``; returns their paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {name: outdir / name for name in OUTPUT_FILES}
    write_coords_csv(paths["coords.csv"], report.labels, report.Z)
    write_trace_csv(paths["trace.csv"], report.trace)
    write_matrix_csv(paths["dist_in.csv"], report.labels, report.D_in.values)
    write_matrix_csv(paths["dist_out.csv"], report.labels, report.D_out)
    emit_svg(report, paths["figure.svg"])
    return paths
