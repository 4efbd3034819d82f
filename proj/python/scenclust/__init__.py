"""Scenario time-series clustering and representation evaluation.

Arrays are NumPy float64 with one record per row. Structured results are
returned as plain dictionaries.
"""

import json

import numpy as np

from . import _core
from ._core import (
    Error,
    adjusted_rand_index,
    affinities,
    combined_index,
    consensus_index,
    default_perplexity,
    distance,
    distance_matrix,
    fidelity,
    haar_coefficients,
    load_csv,
    within_index,
)

__version__ = _core.__version__

__all__ = [
    "Error",
    "adjusted_rand_index",
    "affinities",
    "combined_index",
    "consensus_index",
    "default_perplexity",
    "distance",
    "distance_matrix",
    "evaluate_pipeline",
    "fidelity",
    "generate_synthetic",
    "group_experiment",
    "haar_coefficients",
    "kmedoids",
    "kmedoids_restarts",
    "load_csv",
    "transform",
    "within_index",
]


def generate_synthetic(**config):
    """Synthetic dataset with planted structure; keyword names match the config file keys."""
    return _core.generate_synthetic(json.dumps(config))


def transform(values, kind, alpha=0.95, level=4, threads=0):
    """Return (features, sidecar) for a representation kind such as 'haar_energy' or 'pca'."""
    features, sidecar = _core.transform(np.asarray(values, dtype=float), kind, alpha, level, threads)
    return features, json.loads(sidecar)


def kmedoids(d, k, seed=0, init="plus_plus"):
    return json.loads(_core.kmedoids(np.asarray(d, dtype=float), k, seed, init))


def kmedoids_restarts(d, k, runs=5, seed=0, init="plus_plus", threads=0):
    return json.loads(_core.kmedoids_restarts(np.asarray(d, dtype=float), k, runs, seed, init, threads))


def evaluate_pipeline(values, pipeline="MLPC", reference="mlpc", **options):
    """Index report of one standard pipeline (mean, L2, Fourier95, Haar95, PCA95, MLPC, DTW)."""
    return json.loads(
        _core.evaluate_pipeline(np.asarray(values, dtype=float), pipeline=pipeline, reference=reference, **options)
    )


def group_experiment(values, scenario_ids, location_ids, **options):
    return json.loads(_core.group_experiment(np.asarray(values, dtype=float), scenario_ids, location_ids, **options))
