import csv

import pytest

COLUMNS = [
    "n", "a", "b", "alpha", "method", "replicate", "seed",
    "error", "exact", "runtime_seconds", "iterations",
]


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in COLUMNS])
    return path


def phase_rows():
    """Two methods on a 3x2 (a, alpha) grid, 4 replicates each.

    dbm is exact except one replicate at the smallest a; sbm never is.
    """
    rows = []
    for a in (14.0, 16.0, 18.0):
        for alpha in (0.4, 0.8):
            for rep in range(4):
                dbm_exact = not (a == 14.0 and rep == 0)
                rows.append(dict(
                    n=1000, a=a, b=10.0, alpha=alpha, method="dbm",
                    replicate=rep, seed=rep, error=0.0 if dbm_exact else 0.25,
                    exact=int(dbm_exact), runtime_seconds=0.02, iterations=1,
                ))
                rows.append(dict(
                    n=1000, a=a, b=10.0, alpha=alpha, method="sbm",
                    replicate=rep, seed=rep, error=0.1 * (rep + 1),
                    exact=0, runtime_seconds=0.01, iterations=1,
                ))
    return rows


def scaling_rows():
    rows = []
    for n in (10, 100, 1000):
        for method in ("dbm", "sbm"):
            for rep in range(3):
                exact = int(method == "dbm" and n >= 100)
                rows.append(dict(
                    n=n, a=20.77, b=10.0, alpha=0.3, method=method,
                    replicate=rep, seed=rep,
                    error=0.0 if exact else 0.2 / (rep + 1),
                    exact=exact, runtime_seconds=1e-4 * n, iterations=1,
                ))
    return rows


@pytest.fixture
def phase_csv(tmp_path):
    return write_csv(tmp_path / "phase.csv", phase_rows())


@pytest.fixture
def scaling_csv(tmp_path):
    return write_csv(tmp_path / "scaling.csv", scaling_rows())


@pytest.fixture
def empty_csv(tmp_path):
    return write_csv(tmp_path / "empty.csv", [])


@pytest.fixture
def missing_column_csv(tmp_path):
    path = tmp_path / "broken.csv"
    cols = [c for c in COLUMNS if c != "alpha"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        writer.writerow([1000, 14.0, 10.0, "dbm", 0, 0, 0.0, 1, 0.02, 1])
    return path
