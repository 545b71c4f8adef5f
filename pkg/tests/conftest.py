import numpy as np
import pytest

import circleflow as cf


def random_family(rng, intervals=None, horizon=1.0, with_haar=True):
    """A valid family with random knots, drift, and atom measures."""
    m = intervals if intervals is not None else int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(0.15, 0.85, m - 1)) * horizon
    knots = np.concatenate([[0.0], cuts, [horizon]])
    alpha = np.concatenate([[0.0], np.cumsum(rng.normal(0.0, 0.3, m))])
    measures = []
    for _ in range(m):
        atoms = [(rng.uniform(0.0, 2.0 * np.pi), rng.uniform(0.02, 0.3))
                 for _ in range(int(rng.integers(1, 4)))]
        measure = cf.CircleMeasure.from_atoms(atoms)
        if with_haar and rng.random() < 0.3:
            measure = measure + cf.CircleMeasure.haar(rng.uniform(0.05, 0.2))
        measures.append(measure)
    return cf.GeneratingFamily(knots, alpha, measures)


def random_measure(rng, max_atoms=4):
    atoms = [(rng.uniform(0.0, 2.0 * np.pi), rng.uniform(0.0, 1.0))
             for _ in range(int(rng.integers(1, max_atoms + 1)))]
    return cf.CircleMeasure.from_atoms(atoms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
