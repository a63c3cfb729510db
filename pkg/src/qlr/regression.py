"""Least-squares regression reduced to a square linear system.

A dataset ``{y_i, x_i1..x_ip}`` becomes the normal equations
``X^T X beta = X^T y``. The classical Gaussian-elimination solve is kept here
as the reference every quantum run is checked against.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from . import numerics


class DatasetParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class RankDeficientError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    y: np.ndarray
    X: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] < 1:
            raise ValueError("dataset needs at least one row")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("response length does not match row count")
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature name count does not match column count")

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def with_intercept(self, name: str = "intercept") -> Dataset:
        ones = np.ones((self.n_rows, 1))
        return Dataset(self.y, np.hstack([ones, self.X]), (name, *self.feature_names))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y", *self.feature_names])
        for yi, row in zip(self.y, self.X):
            w.writerow([repr(float(yi)), *(repr(float(v)) for v in row)])
        return buf.getvalue()


@dataclass(frozen=True)
class NormalEquations:
    A: np.ndarray
    b: np.ndarray
    column_order: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.b.shape != (n,):
            raise ValueError(f"inconsistent system shapes {self.A.shape} and {self.b.shape}")
        if not self.column_order:
            object.__setattr__(self, "column_order", tuple(f"x{i + 1}" for i in range(n)))
        elif len(self.column_order) != n:
            raise ValueError("column_order length does not match system size")

    def to_json(self) -> dict:
        return {
            "A": numerics.matrix_to_json(self.A),
            "b": numerics.vector_to_json(self.b),
            "column_order": list(self.column_order),
        }

    @classmethod
    def from_json(cls, obj: dict) -> NormalEquations:
        try:
            a = numerics.matrix_from_json(obj["A"])
            b = numerics.vector_from_json(obj["b"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"system JSON needs 'A' and 'b': {exc}") from None
        if np.iscomplexobj(b):
            if np.max(np.abs(b.imag)) > 0:
                raise ValueError("right-hand side must be real")
            b = b.real
        return cls(a, b, tuple(obj.get("column_order", ())))


@dataclass(frozen=True)
class ClassicalSolution:
    beta_hat: np.ndarray
    residual_norm: float


def load_dataset(source: IO[str] | str) -> Dataset:
    """Parse a CSV with header ``y,<feature>,...`` and a numeric body."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    header = None
    rows: list[list[float]] = []
    for line_no, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        cells = [c.strip() for c in cells]
        if header is None:
            if cells[0].lower() != "y" or len(cells) < 2:
                raise DatasetParseError("header must be 'y,<feature>,...'", line_no)
            header = cells
            continue
        if len(cells) != len(header):
            raise DatasetParseError(
                f"expected {len(header)} cells, found {len(cells)}", line_no
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise DatasetParseError(f"non-numeric cell ({exc})", line_no) from None
        if not all(math.isfinite(v) for v in vals):
            raise DatasetParseError("non-finite value", line_no)
        rows.append(vals)
    if header is None:
        raise DatasetParseError("empty file")
    if not rows:
        raise DatasetParseError("no data rows", line_no)
    data = np.array(rows)
    return Dataset(data[:, 0].copy(), data[:, 1:].copy(), tuple(header[1:]))


def build_normal_equations(d: Dataset) -> NormalEquations:
    X = d.X
    return NormalEquations((X.T @ X).astype(complex), X.T @ d.y, d.feature_names)


def solve_least_squares_classical(ne: NormalEquations) -> ClassicalSolution:
    """Solve ``A beta = b`` by Gaussian elimination with partial pivoting."""
    A = np.real_if_close(ne.A, tol=1000)
    if np.iscomplexobj(A):
        raise ValueError("classical solver expects a real normal-equations matrix")
    m = np.array(A, dtype=float)
    rhs = np.array(ne.b, dtype=float)
    n = m.shape[0]
    scale = np.max(np.abs(m))
    if scale == 0:
        raise RankDeficientError("rank-deficient normal equations: zero matrix")
    for k in range(n):
        piv = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[piv, k]) < 1e-12 * scale:
            raise RankDeficientError(
                f"rank-deficient normal equations: pivot {abs(m[piv, k]):.3e} in column {k}"
            )
        if piv != k:
            m[[k, piv]] = m[[piv, k]]
            rhs[[k, piv]] = rhs[[piv, k]]
        f = m[k + 1 :, k] / m[k, k]
        m[k + 1 :, k:] -= np.outer(f, m[k, k:])
        rhs[k + 1 :] -= f * rhs[k]
    beta = np.zeros(n)
    for k in range(n - 1, -1, -1):
        beta[k] = (rhs[k] - m[k, k + 1 :] @ beta[k + 1 :]) / m[k, k]
    resid = float(np.linalg.norm(np.real(ne.A) @ beta - ne.b))
    return ClassicalSolution(beta, resid)


@dataclass(frozen=True)
class ConditioningReport:
    kappa: float
    well_conditioned: bool


def validate_conditioning(ne: NormalEquations, bound: float = 16.0) -> ConditioningReport:
    kappa = numerics.condition_number(ne.A)
    return ConditioningReport(kappa, kappa <= bound)


# -- the worked example -------------------------------------------------------------

SQRT2 = math.sqrt(2.0)

# Column order of the published design matrix: (beta1, beta0, beta2, beta3).
PAPER_COLUMN_ORDER = ("beta1", "beta0", "beta2", "beta3")

PAPER_DESIGN = np.array(
    [
        [-SQRT2, 1.0, 1 / SQRT2, -0.5],
        [-SQRT2, 1.0, -1 / SQRT2, 0.5],
        [-SQRT2, -1.0, 1 / SQRT2, 0.5],
        [SQRT2, 1.0, 1 / SQRT2, 0.5],
    ]
)
PAPER_RESPONSE = np.array(
    [
        -1 / 8 + 1 / (8 * SQRT2),
        3 / 8 - 3 / (8 * SQRT2),
        1 / 8 + 1 / (8 * SQRT2),
        3 / 8 + 3 / (8 * SQRT2),
    ]
)

PAPER_A = np.array(
    [[15, 9, 5, -3], [9, 15, 3, -5], [5, 3, 15, -9], [-3, -5, -9, 15]], dtype=float
) / 4.0
PAPER_B = np.full(4, 0.5)
PAPER_SOLUTION = np.array([-1.0, 7.0, 11.0, 13.0]) / 32.0


def paper_dataset() -> Dataset:
    """The four published data rows, in the published column order."""
    return Dataset(PAPER_RESPONSE.copy(), PAPER_DESIGN.copy(), PAPER_COLUMN_ORDER)


def paper_system() -> NormalEquations:
    """The 4x4 system the 7-qubit circuit is designed around (eigenvalues 1, 2, 4, 8)."""
    return NormalEquations(PAPER_A.astype(complex), PAPER_B.copy(), PAPER_COLUMN_ORDER)


def dataset_for_system(ne: NormalEquations, names: Sequence[str] | None = None) -> Dataset:
    """A square dataset whose normal equations are exactly ``ne``.

    Uses ``X = A^(1/2)`` and ``y = A^(-1/2) b``; requires ``A`` positive definite.
    """
    es = numerics.eigh(ne.A)
    if es.eigenvalues.min() <= 0:
        raise ValueError("system matrix must be positive definite")
    v = es.eigenvectors
    root = np.real((v * np.sqrt(es.eigenvalues)) @ v.conj().T)
    inv_root = np.real((v / np.sqrt(es.eigenvalues)) @ v.conj().T)
    return Dataset(inv_root @ ne.b, root, tuple(names or ne.column_order))


def dump_system(ne: NormalEquations, fp: IO[str]) -> None:
    json.dump(ne.to_json(), fp, indent=1)
    fp.write("\n")


def load_system(fp: IO[str]) -> NormalEquations:
    return NormalEquations.from_json(json.load(fp))
