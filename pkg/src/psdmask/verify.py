"""Desk-scale preservation verification.

``verify_preservation`` fires a deterministic witness battery (scaled
all-ones matrices, the 3x3 rank-one constructions embedded at every
size->=2-block and overlap position of the materialized patterns, tensor
blowups) and then a seeded randomized battery.  The first output matrix that
fails the PSD check yields a Refuted verdict carrying the witness; battery
order is the priority order, so the reported counterexample is reproducible.

Sample streams are split per (family, n) from the master seed as
``default_rng([seed, family_id, n])``, which makes every battery stage
independent of execution order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    CNotOutsideError,
    NonHermitianOutputError,
    RegimeMismatchError,
)
from .functions import (
    DISC,
    OPEN_POS,
    OPEN_SYM,
    Domain,
    PreserverFunction,
    conjugate_equivariance_check,
    scaled_identity,
)
from .linalg import (
    eig_extremes,
    exact_hermitian,
    identity,
    is_psd,
    matrix_to_json,
)
from .operators import OperatorSpec, apply
from .patterns import (
    R3A_PARTITION_ALL,
    BlockPattern,
    PatternRule,
    classify_sequence,
    normalize,
    validate_rule,
)
from .witnesses import (
    _jsonable,
    all_ones_witness,
    duplicated_pair_gram,
    embed_at,
    overlap_probe,
    tail_gram,
    tensor_blowup,
)

OUTCOME_PRESERVED = "PreservedWithinBudget"
OUTCOME_REFUTED = "Refuted"

_FAMILY_IDS = {
    "all_ones": 1,
    "duplicated_pair_gram": 2,
    "tail_gram": 3,
    "overlap_probe": 4,
    "tensor_blowup": 5,
    "random_gram": 6,
}


@dataclass(frozen=True)
class VerifyConfig:
    max_n: int = 8
    samples_per_n: int = 500
    seed: int = 0
    tol: float = 1e-8
    probe_N: int = 12
    rank_one_only: bool = False

    def __post_init__(self):
        if self.max_n < 1:
            raise ValueError("max_n must be >= 1")
        if self.samples_per_n < 0:
            raise ValueError("samples_per_n must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.probe_N < 3:
            raise ValueError("probe_N must be >= 3")

    def to_json(self) -> dict:
        return {
            "max_n": self.max_n,
            "samples_per_n": self.samples_per_n,
            "seed": self.seed,
            "tol": self.tol,
            "probe_N": self.probe_N,
            "rank_one_only": self.rank_one_only,
        }


@dataclass(frozen=True, eq=False)
class CounterExample:
    family: str
    params: dict
    n: int
    matrix: np.ndarray
    min_eig: float

    def to_json(self) -> dict:
        return {
            "provenance": self.family,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "n": self.n,
            "matrix": matrix_to_json(self.matrix),
            "min_eig": self.min_eig,
        }


@dataclass(frozen=True, eq=False)
class Verdict:
    outcome: str
    counterexample: CounterExample | None
    stats: dict

    @property
    def refuted(self) -> bool:
        return self.outcome == OUTCOME_REFUTED

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
            "stats": self.stats,
        }


def _rng(seed: int, family: str, n: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), _FAMILY_IDS[family], int(n)])


def sample_psd(rng: np.random.Generator, n: int, domain: Domain, rank: int | None = None) -> np.ndarray:
    """A seeded PSD sample with entries inside the domain.

    Gram of an n x rank factor: complex Gaussian over the disc, real Gaussian
    over (-rho, rho), absolute values (shifted strictly positive for (0, rho))
    otherwise; scaled to 0.95 rho for finite rho.
    """
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    if domain.kind == DISC:
        B = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    elif domain.kind == OPEN_SYM:
        B = rng.standard_normal((n, rank))
    else:
        B = np.abs(rng.standard_normal((n, rank)))
        if domain.kind == OPEN_POS:
            B = B + 0.01
    M = exact_hermitian(B @ B.conj().T)
    if math.isfinite(domain.rho):
        peak = float(np.abs(M).max())
        if peak > 0.0:
            M = exact_hermitian(M * (0.95 * domain.rho / peak))
    return M


def sample_correlation(rng: np.random.Generator, n: int) -> np.ndarray:
    """A random real correlation matrix: Gram of unit-norm rows."""
    B = rng.standard_normal((n, n + 2))
    B /= np.sqrt((B ** 2).sum(axis=1))[:, None]
    C = exact_hermitian(B @ B.T)
    np.fill_diagonal(C, 1.0)
    return C


# -- deterministic parameter grids ----------------------------------------------


def _positive_grid(domain: Domain) -> list[float]:
    r0 = domain.reference_radius()
    vals = [f * r0 for f in (0.1, 0.25, 0.5, 0.75, 0.9)]
    if math.isinf(domain.rho):
        vals += [1.5, 3.0]
    return vals


def _all_ones_grid(domain: Domain) -> list[float]:
    return ([0.0] if domain.has_zero else []) + _positive_grid(domain)


def _pair_zs(w: float, domain: Domain) -> list[complex]:
    """Values z with |z| <= w whose witness entries stay inside the domain."""
    if domain.kind == DISC:
        return [0.0, 0.5 * w, -0.5 * w, w, 0.5j * w, 0.9 * w * complex(0.6, 0.8)]
    if domain.kind == OPEN_SYM:
        return [0.0, 0.5 * w, -0.5 * w, w, -w]
    if domain.kind == OPEN_POS:
        return [0.5 * w, w]
    return [0.0, 0.5 * w, w]


def _anchor_positions(pattern: BlockPattern) -> dict:
    """Index triples (i, j, l) anchored at size->=2 blocks and at overlaps."""
    pairs = []
    for u in pattern.blocks:
        if len(u) < 2:
            continue
        i, j = sorted(u)[:2]
        thirds = []
        uncovered = sorted(set(range(pattern.n)) - set().union(*pattern.blocks))
        if uncovered:
            thirds.append(uncovered[0])
        for v in pattern.blocks:
            if v is u:
                continue
            rest = sorted(v - {i, j})
            if rest:
                thirds.append(rest[0])
        for l in sorted(set(thirds)):
            if l not in (i, j):
                pairs.append((i, j, l))
    overlaps = []
    for a, u in enumerate(pattern.blocks):
        for v in pattern.blocks[a + 1:]:
            shared = u & v
            if not shared:
                continue
            j = min(shared)
            left = sorted(u - v)
            right = sorted(v - u)
            if left and right:
                overlaps.append((left[0], j, right[0]))
    return {"pairs": sorted(set(pairs)), "overlaps": sorted(set(overlaps))}


def _deterministic_battery(domain: Domain, patterns: dict[int, BlockPattern], max_n: int):
    """Yield (witness matrix, n, family, params) in refutation priority order."""
    r0 = domain.reference_radius()
    for n in range(1, max_n + 1):
        for x in _all_ones_grid(domain):
            wit = all_ones_witness(x, n, domain)
            yield wit.matrix, n, "all_ones", {"x": x, "n": n}
    w_grid = [f * r0 for f in (0.3, 0.6, 0.9)]
    t_top = 0.95 * r0
    for n in range(3, max_n + 1):
        anchors = _anchor_positions(patterns[n])
        for coords in anchors["pairs"]:
            for w in w_grid:
                for z in _pair_zs(w, domain):
                    wit = duplicated_pair_gram(w, z, domain)
                    yield (
                        embed_at(wit.matrix, n, coords, domain),
                        n,
                        "duplicated_pair_gram",
                        {"w": w, "z": z, "coords": coords},
                    )
                for t in sorted({w, (w + t_top) / 2.0, t_top}):
                    if t < w:
                        continue
                    wit = tail_gram(w, t, domain)
                    yield (
                        embed_at(wit.matrix, n, coords, domain),
                        n,
                        "tail_gram",
                        {"w": w, "t": t, "coords": coords},
                    )
        for coords in anchors["overlaps"]:
            for r in w_grid:
                for z in _pair_zs(r, domain):
                    wit = overlap_probe(r, z, domain)
                    yield (
                        embed_at(wit.matrix, n, coords, domain),
                        n,
                        "overlap_probe",
                        {"r": r, "z": z, "coords": coords},
                    )
    for base_n in (2, 3):
        for m in range(2, 5):
            N = m * base_n
            if N > max_n:
                continue
            seeds = [all_ones_witness(0.5 * r0, base_n, domain).matrix]
            if base_n == 3:
                seeds.append(duplicated_pair_gram(0.6 * r0, 0.3 * r0, domain).matrix)
            for idx, A0 in enumerate(seeds):
                wit = tensor_blowup(m, A0)
                yield wit.matrix, N, "tensor_blowup", {"m": m, "base_n": base_n, "seed_index": idx}


def verify_preservation(g: PreserverFunction, f: PreserverFunction, rule: PatternRule,
                        domain: Domain, cfg: VerifyConfig | None = None) -> Verdict:
    """Decide, within budget, whether (g, f) preserves PSD under the rule.

    Deterministic battery first, then ``samples_per_n`` seeded random PSD
    samples per dimension (rank-one weighted 50%).  The first failing output
    is reported; otherwise the verdict is PreservedWithinBudget.
    """
    cfg = cfg or VerifyConfig()
    probes = domain.probe_points()
    for fn, tag in ((g, "g"), (f, "f")):
        if not conjugate_equivariance_check(fn, probes):
            raise NonHermitianOutputError(
                f"{tag} fails conjugate equivariance on the domain probe set; "
                "its entrywise images cannot stay Hermitian"
            )
    evidence = validate_rule(rule, cfg.probe_N)
    if (evidence["big_block"] or evidence["overlap"]) and cfg.max_n < 3:
        raise ValueError("max_n must be >= 3 for rules with blocks of size >= 2")
    patterns = {n: rule.pattern(n) for n in range(1, cfg.max_n + 1)}
    stats: dict = {
        "families": {},
        "checked": 0,
        "truncated_at_n": cfg.max_n,
        "samples_per_n": cfg.samples_per_n,
        "seed": cfg.seed,
    }

    def check(W: np.ndarray, n: int, family: str, params: dict) -> CounterExample | None:
        fam = stats["families"].setdefault(family, {})
        key = str(n)
        fam[key] = fam.get(key, 0) + 1
        stats["checked"] += 1
        spec = OperatorSpec(f=f, pattern=patterns[n], domain=domain, g=g)
        report = is_psd(apply(spec, W), cfg.tol)
        if report.is_psd:
            return None
        if not is_psd(W, 1e-10).is_psd:
            raise ArithmeticError(f"battery produced a non-PSD input in family {family}")
        return CounterExample(family=family, params=params, n=n, matrix=W, min_eig=report.min_eig)

    for W, n, family, params in _deterministic_battery(domain, patterns, cfg.max_n):
        ce = check(W, n, family, params)
        if ce is not None:
            return Verdict(OUTCOME_REFUTED, ce, stats)

    for n in range(1, cfg.max_n + 1):
        rng = _rng(cfg.seed, "random_gram", n)
        for s in range(cfg.samples_per_n):
            rank = 1 if (cfg.rank_one_only or s % 2 == 0) else int(rng.integers(1, n + 1))
            W = sample_psd(rng, n, domain, rank)
            ce = check(W, n, "random_gram", {"sample_index": s, "rank": rank})
            if ce is not None:
                return Verdict(OUTCOME_REFUTED, ce, stats)

    return Verdict(OUTCOME_PRESERVED, None, stats)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(float(c))


def refute_scalar_outside_interval(rule: PatternRule, K, c, domain: Domain,
                                   x: float | None = None,
                                   cfg: VerifyConfig | None = None) -> Verdict:
    """Refute f(z) = c z for a partition-of-all rule when c leaves [-1/(K-1), 1].

    Uses the scaled all-ones witness at the first dimension whose pattern has
    K blocks; the reported eigenvalue is the negative one of the K x K
    principal submatrix taken at one representative index per block, i.e.
    (1 + (K-1)c) x or (1 - c) x.
    """
    cfg = cfg or VerifyConfig()
    regime = classify_sequence(rule, cfg.probe_N)
    if regime != R3A_PARTITION_ALL:
        raise RegimeMismatchError(f"rule is in regime {regime}, not a partition-of-all sequence")
    K = int(K)
    if not (math.isfinite(rule.flags.max_block_count) and int(rule.flags.max_block_count) == K):
        raise RegimeMismatchError(
            f"K={K} differs from the rule's declared max block count {rule.flags.max_block_count}"
        )
    c_frac = _as_fraction(c)
    lo = Fraction(-1, K - 1)
    if lo <= c_frac <= 1:
        raise CNotOutsideError(f"c={c_frac} lies inside [{lo}, 1]")
    target_n = None
    for n in range(1, max(cfg.probe_N, K + 2) + 1):
        if len(rule.pattern(n).blocks) == K:
            target_n = n
            break
    if target_n is None:
        raise RegimeMismatchError(f"no dimension up to {max(cfg.probe_N, K + 2)} realizes {K} blocks")
    if x is None:
        x = 0.5 * domain.reference_radius()
    witness = all_ones_witness(x, target_n, domain)
    pattern = rule.pattern(target_n)
    spec = OperatorSpec(f=scaled_identity(float(c_frac)), pattern=pattern, domain=domain)
    image = apply(spec, witness.matrix)
    reps = sorted(min(b) for b in pattern.blocks)
    sub_min, _ = eig_extremes(image[np.ix_(reps, reps)])
    ce = CounterExample(
        family="all_ones",
        params={"x": x, "n": target_n, "c": str(c_frac), "representative_indices": reps},
        n=target_n,
        matrix=witness.matrix,
        min_eig=sub_min,
    )
    stats = {"families": {"all_ones": {str(target_n): 1}}, "checked": 1, "K": K}
    return Verdict(OUTCOME_REFUTED, ce, stats)


def correlation_bound_check(n: int, samples, tol: float = 1e-8) -> bool:
    """Check n Id - C is PSD for correlation matrices C, via both proof routes.

    Spectral route: min_eig(n Id - C) >= -tol because lambda_max(C) <= tr(C) = n.
    Gershgorin route: n Id - C is diagonally dominant row by row.
    """
    eye = identity(n)
    for C in samples:
        C = np.asarray(C, dtype=np.complex128)
        lo, _ = eig_extremes(n * eye - C)
        if lo < -tol:
            return False
        _, lam_max = eig_extremes(C)
        trace = float(np.trace(C).real)
        if abs(trace - n) > tol * n or lam_max > trace + tol:
            return False
        D = n * eye - C
        for i in range(n):
            off = float(np.abs(D[i]).sum() - abs(D[i, i]))
            if float(D[i, i].real) - off < -tol:
                return False
    return True


def reduce_scalar(c):
    """The contraction c -> c/(1+c) used when peeling one block off a partition."""
    if isinstance(c, Fraction):
        return c / (1 + c)
    return float(c) / (1.0 + float(c))


def induction_step_check(c, k: int, A: np.ndarray, block_sizes, tol: float = 1e-12) -> bool:
    """Numerically verify the peel-one-block recursion on a positive definite sample.

    With A' the leading principal part holding the first k of k+1 contiguous
    blocks, (f_T[A'] - c^2 A') / (1 - c^2) must equal the same pattern map
    with scalar c' = c/(1+c) entrywise, and c in [-1/k, 0) must map onto
    c' in [-1/(k-1), 0).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    sizes = [int(s) for s in block_sizes]
    if len(sizes) != k + 1 or any(s < 1 for s in sizes):
        raise ValueError(f"block_sizes must be {k + 1} positive integers")
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    if sum(sizes) != n:
        raise ValueError(f"block sizes sum to {sum(sizes)}, matrix is {n} x {n}")
    lo, _ = eig_extremes(A)
    if lo <= 0:
        raise ValueError("A must be positive definite")
    c_frac = _as_fraction(c)
    if not (Fraction(-1, k) <= c_frac < 0):
        raise ValueError(f"c={c_frac} must lie in [-1/{k}, 0)")
    cf = float(c_frac)
    m = n - sizes[-1]
    blocks, start = [], 0
    for s in sizes[:-1]:
        blocks.append(set(range(start, start + s)))
        start += s
    pattern = normalize(blocks, m)
    dom = Domain.disc(math.inf)
    A1 = exact_hermitian(A[:m, :m])
    img = apply(OperatorSpec(f=scaled_identity(cf), pattern=pattern, domain=dom), A1)
    lhs = (img - cf * cf * A1) / (1.0 - cf * cf)
    c_next = reduce_scalar(cf)
    rhs = apply(OperatorSpec(f=scaled_identity(c_next), pattern=pattern, domain=dom), A1)
    gap = float(np.abs(lhs - rhs).max())
    entrywise_ok = gap <= tol * max(1.0, float(np.abs(A1).max()))
    next_frac = reduce_scalar(c_frac)
    interval_ok = (Fraction(-1, k) <= c_frac < 0) == (Fraction(-1, k - 1) <= next_frac < 0)
    return bool(entrywise_ok and interval_ok and Fraction(-1, k - 1) <= next_frac < 0)


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, no whitespace, NaN/Inf rejected."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)
