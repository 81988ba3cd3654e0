"""Reference datasets with known answers.

``grant_dataset`` builds the two-group recidivism example at its expected
counts: professionals reoffend 90% of the time and amateurs 10%, group G1
holds 100 professionals and 10 amateurs, G2 the reverse. Professionals get a
0.9 risk score and a positive prediction, amateurs 0.1 and a negative one.

``selection_dataset`` builds two groups with given selection rates, e.g. the
admissions figures of 44.3% of men and 34.6% of women.

Run as a module to regenerate the CSV copies shipped under ``data/fixtures``.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .core import AuditDataset, AuditRecord


def _block(group, n, reoffend, predicted, score):
    return [AuditRecord(true_outcome=int(i < reoffend), group=group, predicted_outcome=predicted, score=score)
            for i in range(n)]


def grant_dataset() -> AuditDataset:
    recs = []
    recs += _block("G1", 100, 90, 1, 0.9)
    recs += _block("G1", 10, 1, 0, 0.1)
    recs += _block("G2", 10, 9, 1, 0.9)
    recs += _block("G2", 100, 10, 0, 0.1)
    return AuditDataset(tuple(recs))


def selection_dataset(selected: dict[str, int], size: int = 1000) -> AuditDataset:
    """Groups of ``size`` applicants each; the first ``selected[g]`` are selected.

    True outcomes mirror the selection, so every prediction is correct.
    """
    recs = []
    for g, k in selected.items():
        recs += [AuditRecord(true_outcome=int(i < k), group=g, predicted_outcome=int(i < k)) for i in range(size)]
    return AuditDataset(tuple(recs))


def berkeley_dataset() -> AuditDataset:
    return selection_dataset({"men": 443, "women": 346})


def symmetric_dataset(copies: int = 2) -> AuditDataset:
    """Two groups with identical records: every group metric is at parity."""
    base = [(1, 1, 0.9), (1, 0, 0.4), (0, 1, 0.6), (0, 0, 0.1)] * copies
    recs = [AuditRecord(true_outcome=y, group=g, predicted_outcome=p, score=s)
            for g in ("A", "B") for (y, p, s) in base]
    return AuditDataset(tuple(recs))


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("fairaudit").joinpath(f"data/fixtures/{name}")))


if __name__ == "__main__":
    from .report import write_dataset_csv

    out = Path(__file__).parent / "data" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    for name, ds in (("grant.csv", grant_dataset()), ("berkeley.csv", berkeley_dataset()),
                     ("symmetric.csv", symmetric_dataset())):
        write_dataset_csv(ds, out / name)
        print(out / name)
