"""Explicit PSD witness constructors and the embeddings that lift them.

Each constructor returns a ``Witness`` (matrix + provenance tag + params)
and asserts that the matrix is PSD with entries inside the requested domain.
``pad_embed`` lifts a witness by zero-padding (domains containing 0);
``corner_extend`` appends a positively-weighted row-sum border instead, which
keeps every entry strictly positive for the (0, rho) domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainLacksZeroError,
    EpsTooLargeError,
    NonPositiveEntriesError,
    OutOfDomainError,
    ZeroVectorError,
)
from .functions import Domain, PreserverFunction
from .linalg import exact_hermitian, is_psd, kron, permute_conjugate
from .operators import OperatorSpec, apply
from .patterns import normalize

WITNESS_PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Witness:
    """A constructed PSD input matrix with its provenance tag and parameters."""

    matrix: np.ndarray
    provenance: str
    params: dict

    def to_json(self) -> dict:
        from .linalg import matrix_to_json

        return {
            "provenance": self.provenance,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "matrix": matrix_to_json(self.matrix),
        }


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _assert_witness(M: np.ndarray, domain: Domain | None, provenance: str) -> None:
    report = is_psd(M, WITNESS_PSD_TOL)
    if not report.is_psd:
        raise ArithmeticError(
            f"witness {provenance} is not PSD (min_eig={report.min_eig:.3e}); invalid parameters"
        )
    if domain is not None and not domain.contains_array(M).all():
        raise OutOfDomainError(f"witness {provenance} has entries outside the domain")


def rank_one_gram(v, domain: Domain | None = None) -> Witness:
    """The rank-one Gram matrix v v* of a nonzero vector."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    if not np.any(v != 0):
        raise ZeroVectorError("v must be nonzero")
    M = exact_hermitian(np.outer(v, np.conj(v)))
    w = Witness(M, "rank_one_gram", {"v": [complex(x) for x in v]})
    _assert_witness(M, domain, w.provenance)
    return w


def duplicated_pair_gram(w, z, domain: Domain) -> Witness:
    """Rank-one Gram of (z, w, w)/sqrt(|w|): the last two coordinates coincide.

    Entries are |z|^2/|w|, z1 = z conj(w)/|w|, and |w|; requires 0 < |w|
    inside the domain and |z| <= |w| so every entry stays inside it.
    """
    w = complex(w)
    z = complex(z)
    aw = abs(w)
    if aw == 0.0:
        raise ZeroVectorError("w must be nonzero")
    if not domain.contains(w):
        raise OutOfDomainError(f"w={w} is outside the domain")
    if abs(z) > aw:
        raise OutOfDomainError(f"|z|={abs(z)} exceeds |w|={aw}")
    z1 = z * w.conjugate() / aw
    M = exact_hermitian(np.array(
        [
            [abs(z) ** 2 / aw, z1, z1],
            [z1.conjugate(), aw, aw],
            [z1.conjugate(), aw, aw],
        ],
        dtype=np.complex128,
    ))
    wit = Witness(M, "duplicated_pair_gram", {"w": w, "z": z})
    _assert_witness(M, domain, wit.provenance)
    return wit


def overlap_probe(r, z, domain: Domain) -> Witness:
    """The matrix with rows (r, z, z), (conj z, r, r), (conj z, r, r).

    PSD whenever r > 0 and |z| <= r (two identical rows, 2x2 minor
    r^2 - |z|^2); its image under an operator with two blocks sharing the
    middle index has determinant -g(r) |f(z) - g(z)|^2.
    """
    r = float(r)
    z = complex(z)
    if not (r > 0.0 and domain.contains(r)):
        raise OutOfDomainError(f"r={r} must be a positive real inside the domain")
    if abs(z) > r:
        raise OutOfDomainError(f"|z|={abs(z)} exceeds r={r}")
    M = exact_hermitian(np.array(
        [
            [r, z, z],
            [z.conjugate(), r, r],
            [z.conjugate(), r, r],
        ],
        dtype=np.complex128,
    ))
    wit = Witness(M, "overlap_probe", {"r": r, "z": z})
    _assert_witness(M, domain, wit.provenance)
    return wit


def tail_gram(w, t, domain: Domain) -> Witness:
    """Rank-one Gram of (w, |w|, t)/sqrt(t) for 0 < |w| <= t.

    Its image under a single-pair-block operator carries f(w), f(|w|) and
    f(t) in the last column, which propagates positivity of f along [|w|, rho).
    """
    w = complex(w)
    t = float(t)
    aw = abs(w)
    if aw == 0.0:
        raise ZeroVectorError("w must be nonzero")
    if not (t >= aw and domain.contains(t) and domain.contains(w)):
        raise OutOfDomainError(f"need |w| <= t with both inside the domain; got w={w}, t={t}")
    M = exact_hermitian(np.array(
        [
            [aw * aw / t, w * aw / t, w],
            [(w * aw / t).conjugate(), aw * aw / t, aw],
            [w.conjugate(), aw, t],
        ],
        dtype=np.complex128,
    ))
    wit = Witness(M, "tail_gram", {"w": w, "t": t})
    _assert_witness(M, domain, wit.provenance)
    return wit


def tail_image(w, t, g: PreserverFunction, f: PreserverFunction, domain: Domain) -> np.ndarray:
    """Image of ``tail_gram`` under the operator with the single block {0, 1}.

    Returned raw (not as a ``Witness``): for general (g, f) its PSD status is
    the question being probed, not a guarantee.
    """
    base = tail_gram(w, t, domain)
    spec = OperatorSpec(f=f, pattern=normalize([{0, 1}], 3), domain=domain, g=g)
    return apply(spec, base.matrix)


def all_ones_witness(x, n: int, domain: Domain) -> Witness:
    """x times the all-ones matrix (rank one, spectrum {0, ..., 0, n x})."""
    x = float(x)
    if n < 1:
        raise ValueError("n must be >= 1")
    if x < 0.0 or not domain.contains(x):
        raise OutOfDomainError(f"x={x} must be a nonnegative real inside the domain")
    M = exact_hermitian(np.full((n, n), x, dtype=np.complex128))
    wit = Witness(M, "all_ones", {"x": x, "n": n})
    _assert_witness(M, domain, wit.provenance)
    return wit


def tensor_blowup(m: int, A: np.ndarray) -> Witness:
    """Kronecker product of the m x m all-ones matrix with a PSD matrix A.

    The entries of the output are exactly the entries of A, so domain
    membership is preserved; eigenvalues are those of A scaled by m plus zeros.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    A = np.asarray(A, dtype=np.complex128)
    if not is_psd(A, WITNESS_PSD_TOL).is_psd:
        raise ValueError("A must be PSD")
    M = kron(np.ones((m, m), dtype=np.complex128), A)
    return Witness(M, "tensor_blowup", {"m": m, "n": int(A.shape[0])})


def pad_embed(A: np.ndarray, N: int, sigma=None, domain: Domain | None = None) -> np.ndarray:
    """Zero-pad A to N x N and conjugate by the permutation sigma.

    Padding introduces zero entries, so the domain (when given) must contain 0
    unless N equals the original dimension.
    """
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    if N < n:
        raise ValueError(f"N={N} must be >= the original dimension {n}")
    if N > n and domain is not None and not domain.has_zero:
        raise DomainLacksZeroError("zero-padding is unavailable on (0, rho); use corner_extend")
    M = np.zeros((N, N), dtype=np.complex128)
    M[:n, :n] = A
    if sigma is not None:
        M = permute_conjugate(M, sigma)
    return M


def corner_extend(A: np.ndarray, eps: float, domain: Domain | None = None) -> np.ndarray:
    """Border a positive-entried PSD matrix with eps-weighted row sums.

    Output is [[A, eps A 1], [eps (A 1)^T, eps sum(A)]]; PSD for eps in (0, 1]
    and strictly positive everywhere.  Raises EpsTooLargeError when the output
    fails the PSD check or leaves the domain.
    """
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    if np.any(A.imag != 0.0) or np.any(A.real <= 0.0):
        raise NonPositiveEntriesError("A must have strictly positive real entries")
    if domain is not None and not domain.contains_array(A).all():
        raise OutOfDomainError("A has entries outside the domain")
    eps = float(eps)
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    row_sums = A.real.sum(axis=1)
    M = np.zeros((n + 1, n + 1), dtype=np.complex128)
    M[:n, :n] = A
    M[:n, n] = eps * row_sums
    M[n, :n] = eps * row_sums
    M[n, n] = eps * A.real.sum()
    M = exact_hermitian(M)
    if not is_psd(M, WITNESS_PSD_TOL).is_psd:
        raise EpsTooLargeError(f"eps={eps} breaks positive semidefiniteness")
    if domain is not None and not domain.contains_array(M).all():
        raise EpsTooLargeError(f"eps={eps} pushes entries outside the domain")
    return M


def corner_extend_auto(A: np.ndarray, domain: Domain | None = None) -> tuple[np.ndarray, float]:
    """Corner extension with the largest eps in {2^-1, ..., 2^-30} that passes."""
    last_error = None
    for p in range(1, 31):
        eps = 2.0 ** -p
        try:
            return corner_extend(A, eps, domain), eps
        except EpsTooLargeError as exc:
            last_error = exc
    raise EpsTooLargeError(f"no eps in 2^-1..2^-30 works: {last_error}")


def embed_at(W: np.ndarray, n: int, coords, domain: Domain) -> np.ndarray:
    """Place a small witness at the given coordinates of an n x n PSD matrix.

    Zero-pads when the domain contains 0, otherwise grows the matrix by
    repeated corner extensions; then permutes so that W lands exactly on the
    principal submatrix indexed by ``coords``.
    """
    W = np.asarray(W, dtype=np.complex128)
    d = W.shape[0]
    coords = [int(c) for c in coords]
    if len(coords) != d or len(set(coords)) != d or any(c < 0 or c >= n for c in coords):
        raise ValueError(f"coords must be {d} distinct indices below {n}")
    if domain.has_zero:
        big = pad_embed(W, n, domain=domain)
    else:
        big = W
        while big.shape[0] < n:
            big, _ = corner_extend_auto(big, domain)
    sigma = [-1] * n
    for p, c in enumerate(coords):
        sigma[c] = p
    spare = iter(range(d, n))
    for q in range(n):
        if sigma[q] < 0:
            sigma[q] = next(spare)
    return permute_conjugate(big, sigma)
