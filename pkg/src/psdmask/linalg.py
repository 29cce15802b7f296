"""Dense complex Hermitian matrix machinery.

Matrices are plain ``numpy.ndarray`` values of dtype complex128 whose
storage is made *exactly* conjugate-symmetric by ``symmetrize`` (the lower
triangle mirrors the upper one bit-for-bit and diagonals carry a zero
imaginary part).  Every function here is pure; index sets in the Python API
are 0-based, only the JSON wire format uses human-friendly conventions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricInputError,
    DimensionMismatchError,
    EigFailure,
    InvalidPermutationError,
    NonFiniteEntryError,
    NonSquareError,
    SingularBlockError,
)

# Full eigendecompositions are only contracted up to this dimension.
EIG_DIM_CAP = 64

# Relative tolerance for accepting almost-Hermitian input (JSON round-trip noise).
ASYM_TOL = 1e-8

# Default relative tolerance of the PSD test.
DEFAULT_PSD_TOL = 1e-9


@dataclass(frozen=True)
class PsdReport:
    """Outcome of a positive-semidefiniteness test.

    ``is_psd`` holds iff ``min_eig >= -tol_used * max(1, |max_eig|)``.
    """

    min_eig: float
    max_eig: float
    is_psd: bool
    tol_used: float

    def to_json(self) -> dict:
        return {
            "min_eig": self.min_eig,
            "max_eig": self.max_eig,
            "is_psd": self.is_psd,
            "tol_used": self.tol_used,
        }


def _as_square_grid(raw) -> np.ndarray:
    A = np.asarray(raw, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise NonSquareError(f"expected a nonempty square grid, got shape {A.shape}")
    if not (np.all(np.isfinite(A.real)) and np.all(np.isfinite(A.imag))):
        raise NonFiniteEntryError("matrix entries must be finite")
    return A


def exact_hermitian(H: np.ndarray) -> np.ndarray:
    """Force exactly conjugate-symmetric storage (mirror upper triangle, real diagonal)."""
    H = np.array(H, dtype=np.complex128)
    lower = np.tril_indices(H.shape[0], -1)
    H[lower] = np.conj(H.T[lower])
    np.fill_diagonal(H, H.diagonal().real)
    return H


def symmetrize(raw, asym_tol: float = ASYM_TOL) -> np.ndarray:
    """Return (raw + raw*)/2 with exactly conjugate-symmetric storage.

    Rejects input whose asymmetry exceeds ``asym_tol`` relative to
    ``max(1, largest entry modulus)``.
    """
    A = _as_square_grid(raw)
    scale = max(1.0, float(np.abs(A).max()))
    gap = float(np.abs(A - A.conj().T).max())
    if gap > asym_tol * scale:
        raise AsymmetricInputError(
            f"asymmetry {gap:.3e} exceeds {asym_tol:.1e} * {scale:.3e}"
        )
    return exact_hermitian((A + A.conj().T) / 2.0)


def eig_extremes(M: np.ndarray) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian matrix."""
    M = np.asarray(M, dtype=np.complex128)
    n = M.shape[0]
    if n > EIG_DIM_CAP:
        raise EigFailure(f"dimension {n} exceeds the eigensolver cap {EIG_DIM_CAP}")
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    return float(w[0]), float(w[-1])


def is_psd(M: np.ndarray, tol: float = DEFAULT_PSD_TOL) -> PsdReport:
    """Relative-tolerance PSD test: min_eig >= -tol * max(1, |max_eig|)."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    lo, hi = eig_extremes(M)
    return PsdReport(min_eig=lo, max_eig=hi, is_psd=lo >= -tol * max(1.0, abs(hi)), tol_used=tol)


def schur_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Entrywise (Hadamard) product of two same-sized Hermitian matrices."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shapes {A.shape} and {B.shape} differ")
    return exact_hermitian(A * B)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product; Hermitian when both factors are."""
    return exact_hermitian(np.kron(np.asarray(A, dtype=np.complex128), np.asarray(B, dtype=np.complex128)))


def schur_complement(M: np.ndarray, block) -> np.ndarray:
    """Complement M[rest,rest] - M[rest,block] M[block,block]^{-1} M[block,rest].

    ``block`` is a set of 0-based indices; its principal submatrix must be
    invertible (smallest singular value above 1e-12 times the spectral scale
    of M), otherwise ``SingularBlockError`` is raised.
    """
    M = _as_square_grid(M)
    n = M.shape[0]
    blk = sorted(set(int(i) for i in block))
    if not blk or any(i < 0 or i >= n for i in blk):
        raise ValueError(f"block must be a nonempty subset of range({n})")
    rest = [i for i in range(n) if i not in set(blk)]
    if not rest:
        raise ValueError("block must be a proper subset (nonempty complement)")
    lo, hi = eig_extremes(M)
    scale = max(abs(lo), abs(hi))
    P = M[np.ix_(blk, blk)]
    smin = float(np.linalg.svd(P, compute_uv=False)[-1])
    if smin <= 1e-12 * scale or smin == 0.0:
        raise SingularBlockError(
            f"pivot block min singular value {smin:.3e} <= 1e-12 * {scale:.3e}"
        )
    C = M[np.ix_(rest, rest)] - M[np.ix_(rest, blk)] @ np.linalg.solve(P, M[np.ix_(blk, rest)])
    return exact_hermitian((C + C.conj().T) / 2.0)


def permute_conjugate(M: np.ndarray, sigma) -> np.ndarray:
    """Conjugate by the permutation matrix of sigma: output[p][q] = M[sigma[p]][sigma[q]]."""
    M = _as_square_grid(M)
    n = M.shape[0]
    s = [int(i) for i in sigma]
    if sorted(s) != list(range(n)):
        raise InvalidPermutationError(f"not a permutation of range({n}): {sigma}")
    return M[np.ix_(s, s)].copy()


def all_ones(n: int) -> np.ndarray:
    """The n x n matrix of ones (rank one, spectrum {0,...,0,n})."""
    return np.ones((n, n), dtype=np.complex128)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


# -- JSON wire format ----------------------------------------------------------
#
# {"n": int, "entries": [[[re, im], ...], ...]} row-major; cells of real
# matrices may be bare numbers, parsed as [re, 0].

def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {
        "n": int(M.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }


def _cell_to_complex(cell) -> complex:
    if isinstance(cell, (int, float)):
        return complex(cell, 0.0)
    if isinstance(cell, (list, tuple)) and len(cell) == 2:
        return complex(float(cell[0]), float(cell[1]))
    raise ValueError(f"matrix cell must be a number or [re, im], got {cell!r}")


def matrix_from_json(data: dict) -> np.ndarray:
    n = int(data["n"])
    rows = data["entries"]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise NonSquareError(f"entries do not form an {n} x {n} grid")
    raw = np.array([[_cell_to_complex(c) for c in row] for row in rows], dtype=np.complex128)
    return symmetrize(raw)
