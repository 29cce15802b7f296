"""Forbidden-block patterns and pattern-sequence rules.

A ``BlockPattern`` is a normalized family of pairwise-incomparable subsets of
range(n): the positions where the diagonal-block function g acts instead of
the everywhere function f.  A ``PatternRule`` generates one pattern per
dimension together with declared global flags; the flags carry the properties
of the whole sequence that no finite probe can decide (max block count,
"partition of range(n) for every n", ...), and are validated against the
materialized patterns wherever possible.

Indices are 0-based in Python; the JSON wire format is 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BlockOutOfRangeError,
    FlagMismatchError,
    RejectedFullBlockError,
)

# Pattern kinds (single pattern).
EMPTY = "Empty"
SINGLETONS_ONLY = "SingletonsOnly"
SUBPARTITION_WITH_BIG_BLOCK = "SubpartitionWithBigBlock"
PARTITION_OF_ALL = "PartitionOfAll"
OVERLAPPING = "Overlapping"

# Sequence regimes (whole rule).
R1_EMPTY = "R1-Empty"
R2_SINGLETONS = "R2-Singletons"
R3A_PARTITION_ALL = "R3a-PartitionAll-FiniteK"
R3B_SUBPARTITION_OTHER = "R3b-Subpartition-Other"
R4_OVERLAPPING = "R4-Overlapping"

DEFAULT_PROBE_N = 12


@dataclass(frozen=True)
class BlockPattern:
    """Normalized block pattern on range(n); build with ``normalize``."""

    n: int
    blocks: tuple[frozenset[int], ...]

    def covered(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.blocks:
            out |= b
        return frozenset(out)

    def max_block_size(self) -> int:
        return max((len(b) for b in self.blocks), default=0)

    def is_full_block(self) -> bool:
        return len(self.blocks) == 1 and self.blocks[0] == frozenset(range(self.n))

    def is_partition_of_all(self) -> bool:
        total = sum(len(b) for b in self.blocks)
        return total == self.n and self.covered() == frozenset(range(self.n))

    def has_overlap(self) -> bool:
        for i, u in enumerate(self.blocks):
            for v in self.blocks[i + 1:]:
                if u & v:
                    return True
        return False


def normalize(blocks, n: int) -> BlockPattern:
    """Drop empty sets, drop subsets contained in another block, order canonically."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    sets = set()
    for b in blocks:
        fs = frozenset(int(i) for i in b)
        if any(i < 0 or i >= n for i in fs):
            raise BlockOutOfRangeError(f"block {sorted(fs)} not inside range({n})")
        if fs:
            sets.add(fs)
    kept = [u for u in sets if not any(u < v for v in sets)]
    kept.sort(key=lambda u: (min(u), len(u), sorted(u)))
    return BlockPattern(n=n, blocks=tuple(kept))


@dataclass(frozen=True)
class PatternClass:
    kind: str
    block_count: int
    covers_all: bool
    max_block_size: int


def classify_pattern(pattern: BlockPattern) -> PatternClass:
    """Assign exactly one kind to a normalized pattern.

    Precedence: Empty, SingletonsOnly, Overlapping, PartitionOfAll,
    SubpartitionWithBigBlock (disjoint blocks, at least one of size >= 2,
    union possibly proper).
    """
    covers = pattern.covered() == frozenset(range(pattern.n))
    count = len(pattern.blocks)
    size = pattern.max_block_size()
    if count == 0:
        kind = EMPTY
    elif size == 1:
        kind = SINGLETONS_ONLY
    elif pattern.has_overlap():
        kind = OVERLAPPING
    elif covers:
        kind = PARTITION_OF_ALL
    else:
        kind = SUBPARTITION_WITH_BIG_BLOCK
    return PatternClass(kind=kind, block_count=count, covers_all=covers, max_block_size=size)


def mask_matrix(pattern: BlockPattern) -> np.ndarray:
    """Boolean grid: True where some block contains both indices (g-territory)."""
    mask = np.zeros((pattern.n, pattern.n), dtype=bool)
    for b in pattern.blocks:
        idx = sorted(b)
        mask[np.ix_(idx, idx)] = True
    return mask


# -- rule sequences -----------------------------------------------------------


@dataclass(frozen=True)
class RuleFlags:
    """Declared global properties of a pattern sequence.

    ``max_block_count`` is max over n of the number of blocks in T_n
    (``math.inf`` when unbounded).  ``has_block_ge2_at``/``overlap_at`` name a
    dimension witnessing a size->=2 block / an overlapping pair, so the
    classifier does not depend on the probe depth reaching them.
    """

    eventually_nonempty: bool
    all_singletons: bool
    covers_all_n: bool
    max_block_count: int | float
    has_block_ge2_at: int | None = None
    overlap_at: int | None = None


@dataclass(frozen=True)
class PatternRule:
    name: str
    generator: Callable[[int], BlockPattern]
    flags: RuleFlags
    params: dict = field(default_factory=dict)

    def pattern(self, n: int) -> BlockPattern:
        p = self.generator(n)
        if n >= 2 and p.is_full_block():
            raise RejectedFullBlockError(
                f"rule {self.name!r} materializes the full block at n={n}"
            )
        return p


def _contiguous_split(count: int, parts: int) -> list[list[int]]:
    """Split range(count) into ``parts`` contiguous runs with balanced sizes."""
    parts = min(parts, count)
    if parts <= 0:
        return []
    base, extra = divmod(count, parts)
    runs, start = [], 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        runs.append(list(range(start, start + size)))
        start += size
    return runs


def empty_rule() -> PatternRule:
    return PatternRule(
        name="empty",
        generator=lambda n: normalize([], n),
        flags=RuleFlags(
            eventually_nonempty=False,
            all_singletons=True,
            covers_all_n=False,
            max_block_count=0,
        ),
    )


def all_singletons_rule() -> PatternRule:
    return PatternRule(
        name="all_singletons",
        generator=lambda n: normalize([{j} for j in range(n)], n),
        flags=RuleFlags(
            eventually_nonempty=True,
            all_singletons=True,
            covers_all_n=True,
            max_block_count=math.inf,
        ),
    )


def single_block_rule(block) -> PatternRule:
    """T_n = { block } wherever block fits in range(n) without being all of it."""
    blk = frozenset(int(i) for i in block)
    if not blk or any(i < 0 for i in blk):
        raise ValueError("block must be a nonempty set of indices >= 0")

    def gen(n: int) -> BlockPattern:
        if blk <= frozenset(range(n)) and not (n >= 2 and blk == frozenset(range(n))):
            return normalize([blk], n)
        return normalize([], n)

    first_n = max(blk) + 1
    if blk == frozenset(range(first_n)) and first_n >= 2:
        first_n += 1
    return PatternRule(
        name="single_block",
        generator=gen,
        flags=RuleFlags(
            eventually_nonempty=True,
            all_singletons=len(blk) == 1,
            covers_all_n=False,
            max_block_count=1,
            has_block_ge2_at=first_n if len(blk) >= 2 else None,
        ),
        params={"block": sorted(i + 1 for i in blk)},
    )


def contiguous_partition_rule(k: int) -> PatternRule:
    """Partition of range(n) into min(n, k) contiguous blocks, for every n."""
    if k < 2:
        raise ValueError("k must be >= 2 (k = 1 would be the rejected full block)")
    return PatternRule(
        name="contiguous_partition",
        generator=lambda n: normalize(_contiguous_split(n, k), n),
        flags=RuleFlags(
            eventually_nonempty=True,
            all_singletons=False,
            covers_all_n=True,
            max_block_count=k,
            has_block_ge2_at=k + 1,
        ),
        params={"k": k},
    )


def proper_subpartition_rule(k: int) -> PatternRule:
    """Partition of range(n-1) into min(n-1, k) contiguous blocks; index n-1 stays free."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return PatternRule(
        name="proper_subpartition",
        generator=lambda n: normalize(_contiguous_split(n - 1, k), n),
        flags=RuleFlags(
            eventually_nonempty=True,
            all_singletons=False,
            covers_all_n=False,
            max_block_count=k,
            has_block_ge2_at=k + 2,
        ),
        params={"k": k},
    )


def overlapping_chain_rule() -> PatternRule:
    """T_n = {{0,1},{1,2}} for n >= 3 (two blocks sharing index 1), empty below."""
    return PatternRule(
        name="overlapping_chain",
        generator=lambda n: normalize([{0, 1}, {1, 2}] if n >= 3 else [], n),
        flags=RuleFlags(
            eventually_nonempty=True,
            all_singletons=False,
            covers_all_n=False,
            max_block_count=2,
            has_block_ge2_at=3,
            overlap_at=3,
        ),
    )


def explicit_rule(patterns: dict[int, BlockPattern], flags: RuleFlags, name: str = "explicit") -> PatternRule:
    """Rule from explicitly listed patterns.

    For an unlisted dimension the pattern of the largest listed n' <= n is
    reused (its blocks still fit in range(n)); below the smallest listed n the
    pattern is empty.
    """
    if not patterns:
        raise ValueError("at least one pattern must be listed")
    listed = dict(sorted(patterns.items()))
    levels = list(listed)

    def gen(n: int) -> BlockPattern:
        best = None
        for m in levels:
            if m <= n:
                best = m
        if best is None:
            return normalize([], n)
        return normalize(listed[best].blocks, n)

    return PatternRule(
        name=name,
        generator=gen,
        flags=flags,
        params={"patterns": {m: p for m, p in listed.items()}},
    )


def validate_rule(rule: PatternRule, probe_N: int = DEFAULT_PROBE_N) -> dict:
    """Check declared flags against T_1..T_probe_N; return the probed evidence.

    Raises FlagMismatchError on any contradiction and RejectedFullBlockError
    if the rule materializes the full block at some n >= 2.
    """
    if probe_N < 3:
        raise ValueError("probe_N must be >= 3")
    flags = rule.flags
    probed_nonempty = False
    probed_big = False
    probed_overlap = False
    for n in range(1, probe_N + 1):
        p = rule.pattern(n)
        cls = classify_pattern(p)
        if n >= 2 and cls.block_count > 0:
            probed_nonempty = True
        if cls.max_block_size >= 2:
            probed_big = True
        if cls.kind == OVERLAPPING:
            probed_overlap = True
        if flags.all_singletons and cls.max_block_size >= 2:
            raise FlagMismatchError(f"all_singletons declared but T_{n} has a block of size >= 2")
        if not flags.eventually_nonempty and n >= 2 and cls.block_count > 0:
            raise FlagMismatchError(f"eventually_nonempty=False but T_{n} is nonempty")
        if flags.covers_all_n and not p.is_partition_of_all():
            raise FlagMismatchError(f"covers_all_n declared but T_{n} is not a partition of range({n})")
        if math.isfinite(flags.max_block_count) and cls.block_count > flags.max_block_count:
            raise FlagMismatchError(
                f"T_{n} has {cls.block_count} blocks, above the declared maximum {flags.max_block_count}"
            )
    if flags.has_block_ge2_at is not None:
        at = rule.pattern(flags.has_block_ge2_at)
        if at.max_block_size() < 2:
            raise FlagMismatchError(
                f"has_block_ge2_at={flags.has_block_ge2_at} but that pattern has no block of size >= 2"
            )
    if flags.overlap_at is not None:
        at = rule.pattern(flags.overlap_at)
        if not at.has_overlap():
            raise FlagMismatchError(f"overlap_at={flags.overlap_at} but that pattern has no overlap")
    declared_big = flags.has_block_ge2_at is not None or flags.overlap_at is not None
    if not flags.all_singletons and not probed_big and not declared_big:
        raise FlagMismatchError(
            "all_singletons=False requires a probed block of size >= 2 or a declared location"
        )
    return {
        "nonempty": probed_nonempty or flags.eventually_nonempty,
        "big_block": probed_big or flags.has_block_ge2_at is not None,
        "overlap": probed_overlap or flags.overlap_at is not None,
    }


def classify_sequence(rule: PatternRule, probe_N: int = DEFAULT_PROBE_N) -> str:
    """Map a rule to its sequence regime.

    Precedence: overlap anywhere -> R4; else any block of size >= 2 ->
    R3a (partition of range(n) for all n with finite max block count) or R3b
    (proper subpartition somewhere, or unbounded block count); else nonempty
    -> R2; else R1.
    """
    ev = validate_rule(rule, probe_N)
    if ev["overlap"]:
        return R4_OVERLAPPING
    if ev["big_block"]:
        K = rule.flags.max_block_count
        if rule.flags.covers_all_n and math.isfinite(K):
            if int(K) < 2:
                raise FlagMismatchError("a partition of range(n) for all n needs max_block_count >= 2")
            return R3A_PARTITION_ALL
        return R3B_SUBPARTITION_OTHER
    if ev["nonempty"]:
        return R2_SINGLETONS
    return R1_EMPTY


# -- JSON wire format ----------------------------------------------------------
#
# Pattern: {"n": int, "blocks": [[int, ...], ...]} with 1-based indices.
# Rule:    {"kind": str, "params": {...}, "flags": {...}} where flags use
#          "inf" for an unbounded max_block_count.


def pattern_to_json(pattern: BlockPattern) -> dict:
    return {
        "n": pattern.n,
        "blocks": [sorted(i + 1 for i in b) for b in pattern.blocks],
    }


def pattern_from_json(data: dict) -> BlockPattern:
    n = int(data["n"])
    blocks = [[int(i) - 1 for i in b] for b in data.get("blocks", [])]
    return normalize(blocks, n)


def flags_to_json(flags: RuleFlags) -> dict:
    K = flags.max_block_count
    return {
        "eventually_nonempty": flags.eventually_nonempty,
        "all_singletons": flags.all_singletons,
        "covers_all_n": flags.covers_all_n,
        "max_block_count": "inf" if K == math.inf else int(K),
        "has_block_ge2_at": flags.has_block_ge2_at,
        "overlap_at": flags.overlap_at,
    }


def flags_from_json(data: dict) -> RuleFlags:
    K = data["max_block_count"]
    return RuleFlags(
        eventually_nonempty=bool(data["eventually_nonempty"]),
        all_singletons=bool(data["all_singletons"]),
        covers_all_n=bool(data["covers_all_n"]),
        max_block_count=math.inf if K in ("inf", None) else int(K),
        has_block_ge2_at=data.get("has_block_ge2_at"),
        overlap_at=data.get("overlap_at"),
    )


def rule_to_json(rule: PatternRule) -> dict:
    params = dict(rule.params)
    if rule.name == "explicit":
        params = {
            "patterns": [pattern_to_json(p) for _, p in sorted(rule.params["patterns"].items())]
        }
    return {"kind": rule.name, "params": params, "flags": flags_to_json(rule.flags)}


def rule_from_json(data: dict) -> PatternRule:
    kind = data["kind"]
    params = data.get("params", {})
    if kind == "empty":
        return empty_rule()
    if kind == "all_singletons":
        return all_singletons_rule()
    if kind == "single_block":
        return single_block_rule([int(i) - 1 for i in params["block"]])
    if kind == "contiguous_partition":
        return contiguous_partition_rule(int(params["k"]))
    if kind == "proper_subpartition":
        return proper_subpartition_rule(int(params["k"]))
    if kind == "overlapping_chain":
        return overlapping_chain_rule()
    if kind == "explicit":
        pats = {}
        for entry in params["patterns"]:
            p = pattern_from_json(entry)
            pats[p.n] = p
        return explicit_rule(pats, flags_from_json(data["flags"]))
    raise ValueError(f"unknown rule kind {kind!r}")
