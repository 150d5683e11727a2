"""Regenerate the data files shipped in this directory.

Run from the repository root:

    python3 data/make_fixtures.py
"""

from pathlib import Path

import numpy as np

from missgraph import MechanismSpec, simulate_dataset, write_csv

HERE = Path(__file__).parent


def mnar_example():
    # one MNAR-masked variable plus a correlated covariate: the analysis
    # should flag the self arc with the covariate as witness
    cov = np.array([[1.0, 0.6], [0.6, 1.0]])
    spec = MechanismSpec(kind="MNAR", target="lab_value", rate=0.3, slope=1.5)
    dataset, truth = simulate_dataset(
        np.linalg.inv(cov),
        n=2000,
        names=["lab_value", "vital_sign"],
        specs=[spec],
        seed=20240817,
    )
    write_csv(dataset, HERE / "mnar_example.csv")
    print("wrote", HERE / "mnar_example.csv")
    return truth


def mcar_example():
    spec = MechanismSpec(kind="MCAR", target="lab_value", rate=0.25)
    dataset, _ = simulate_dataset(
        np.eye(2),
        n=1000,
        names=["lab_value", "vital_sign"],
        specs=[spec],
        seed=7,
    )
    write_csv(dataset, HERE / "mcar_example.csv")
    print("wrote", HERE / "mcar_example.csv")


if __name__ == "__main__":
    mnar_example()
    mcar_example()
