"""Algebraic multigrid setup and Krylov solves for sparse SPD systems."""

from ._core import (
    REPORT_SCHEMA_VERSION,
    ClamgError,
    DimensionError,
    Hierarchy,
    NotSpdError,
    generate,
    run,
)

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "ClamgError",
    "DimensionError",
    "Hierarchy",
    "NotSpdError",
    "generate",
    "run",
    "hierarchy_from_csr",
]


def hierarchy_from_csr(matrix, **options):
    """Build a Hierarchy from any object with indptr/indices/data/shape (e.g. scipy.sparse.csr_matrix)."""
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionError(f"square matrix expected, got {rows}x{cols}")
    return Hierarchy(matrix.indptr, matrix.indices, matrix.data, rows, **options)
