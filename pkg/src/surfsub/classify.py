"""Relator classification: the surface criterion and its filters.

A rank-n relator w is a surface witness if some index-k subgroup of
G_n(w) has first Betti number above 1 + k(n - 2); the double of the
free group over w then contains a surface subgroup.  Relators whose
quotient is obviously free (a generator occurring once, a primitive
relator) or visibly a free factor (a generator absent) are filtered out
first, since their doubles are not one-ended and the question does not
apply.  When no witness appears up to the index bound, subgroup-count
fingerprints refine the failure into "looks free" or "matches a
Baumslag-Solitar free product".
"""

from __future__ import annotations

import json
from functools import lru_cache
import time
from dataclasses import dataclass, replace

from importlib import resources

from .abelian import AbelianInvariants, IntMatrix, betti, invariants
from .lowindex import (
    DEFAULT_NODE_BUDGET,
    BudgetExhausted,
    CosetTable,
    class_counts,
    format_table,
    low_index_subgroups,
)
from .presentations import (
    Presentation,
    absent_generator_reduction,
    absent_generators,
    bs,
    free_product_with_free,
    one_relator,
)
from .rewrite import abelianized_relation_matrix, schreier_rank, subgroup_presentation
from .words import (
    cyclic_reduce,
    exponent_sums,
    is_primitive,
    occurrence_profile,
    word_to_text,
)

SURFACE_DETECTED = "surface_detected"
TRIVIALLY_FREE = "trivially_free"
RANK_REDUCIBLE = "rank_reducible"
PRIMITIVE_RELATOR = "primitive_relator"
LOOKS_LIKE_FREE = "looks_like_free"
BS_CANDIDATES = "baumslag_candidates"
UNRESOLVED = "unresolved"

RESOLVED_KINDS = frozenset(
    {
        SURFACE_DETECTED,
        TRIVIALLY_FREE,
        RANK_REDUCIBLE,
        PRIMITIVE_RELATOR,
        LOOKS_LIKE_FREE,
        BS_CANDIDATES,
    }
)

BS_POWER_BOUND = 16  # Nielsen moves preserve top powers, so n + m < 16


@dataclass(frozen=True)
class SurfaceCriterion:
    """Betti threshold for one (rank, index) pair."""

    rank: int
    index: int

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError(f"rank must be >= 2, got {self.rank}")
        if self.index < 1:
            raise ValueError(f"index must be >= 1, got {self.index}")

    @property
    def threshold(self) -> int:
        return 1 + self.index * (self.rank - 2)

    def holds_for(self, betti_number: int) -> bool:
        return betti_number > self.threshold


def surface_condition(rank: int, index: int, betti_number: int) -> bool:
    """True iff betti_number > 1 + index*(rank - 2)."""
    return SurfaceCriterion(rank, index).holds_for(betti_number)


@dataclass(frozen=True)
class ClassifyOptions:
    occurrence_filter: bool = True
    rank_reduction: bool = True
    recurse_on_rank_reduction: bool = True
    primitivity_filter: bool = True
    fingerprint: bool = True
    bs_scan: bool = True
    node_budget: int = DEFAULT_NODE_BUDGET
    min_repeats: int = 3

    def to_dict(self) -> dict:
        return {
            "occurrence_filter": self.occurrence_filter,
            "rank_reduction": self.rank_reduction,
            "recurse_on_rank_reduction": self.recurse_on_rank_reduction,
            "primitivity_filter": self.primitivity_filter,
            "fingerprint": self.fingerprint,
            "bs_scan": self.bs_scan,
            "node_budget": self.node_budget,
            "min_repeats": self.min_repeats,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifyOptions":
        return cls(**d)


@dataclass(frozen=True)
class IndexAudit:
    """What the enumeration saw at one index level."""

    index: int
    class_count: int
    max_betti: int | None
    torsion_free: bool
    free_betti_profile: bool
    elapsed: float
    exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "class_count": self.class_count,
            "max_betti": self.max_betti,
            "torsion_free": self.torsion_free,
            "free_betti_profile": self.free_betti_profile,
            "elapsed": self.elapsed,
            "exhausted": self.exhausted,
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of classifying one relator; exactly one kind applies.

    The audit covers every index that was actually enumerated.  For
    surface_detected the witness table is kept so the claim can be
    rechecked from the record alone.
    """

    kind: str
    audit: tuple[IndexAudit, ...] = ()
    index: int | None = None
    betti: int | None = None
    table_ordinal: int | None = None
    witness_table: CosetTable | None = None
    single_occurrence_generator: int | None = None
    absent_generators: tuple[int, ...] | None = None
    sub_verdict: "Verdict | None" = None
    checked_up_to_index: int | None = None
    pairs: tuple[tuple[int, int], ...] | None = None
    max_index_reached: int | None = None

    @property
    def resolved(self) -> bool:
        return self.kind in RESOLVED_KINDS

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "audit": [a.to_dict() for a in self.audit]}
        if self.kind == SURFACE_DETECTED:
            d["index"] = self.index
            d["betti"] = self.betti
            d["table_ordinal"] = self.table_ordinal
            d["witness_table"] = format_table(self.witness_table)
        elif self.kind == TRIVIALLY_FREE:
            d["single_occurrence_generator"] = self.single_occurrence_generator
        elif self.kind == RANK_REDUCIBLE:
            d["absent_generators"] = list(self.absent_generators)
            d["sub_verdict"] = self.sub_verdict.to_dict() if self.sub_verdict else None
        elif self.kind == LOOKS_LIKE_FREE:
            d["checked_up_to_index"] = self.checked_up_to_index
        elif self.kind == BS_CANDIDATES:
            d["pairs"] = [list(p) for p in self.pairs]
        elif self.kind == UNRESOLVED:
            d["max_index_reached"] = self.max_index_reached
        return d


# ---------------------------------------------------------------------------
# Free-group fingerprint

@lru_cache(maxsize=None)
def _stored_free_counts() -> dict[int, tuple[int, ...]]:
    raw = resources.files("surfsub.data").joinpath("free_class_counts.json").read_text()
    return {int(k): tuple(v) for k, v in json.loads(raw).items()}


def free_class_count_table(free_rank: int, up_to: int) -> tuple[int, ...]:
    """Stored class counts of the rank-r free group for indices 1..up_to.

    Rank 1 is Z, which has one subgroup of every index; higher ranks come
    from the shipped table.  Raises ValueError past the stored depth.
    """
    if free_rank == 1:
        return (1,) * up_to
    table = _stored_free_counts().get(free_rank)
    if table is None:
        raise ValueError(f"no stored class counts for free rank {free_rank}")
    if up_to > len(table):
        raise ValueError(
            f"stored counts for free rank {free_rank} stop at index {len(table)}"
        )
    return table[:up_to]


def free_fingerprint(counts, rank: int, up_to: int) -> bool:
    """Do the class counts match the free group F_(rank-1) on 1..up_to?

    A count match is evidence, not proof: the caller should also check
    the audited subgroups are torsion-free with the free Betti profile.
    """
    seq = tuple(counts[i] for i in range(up_to))
    return seq == free_class_count_table(rank - 1, up_to)


# ---------------------------------------------------------------------------
# Baumslag-Solitar candidate scan

@dataclass(frozen=True)
class BsScanResult:
    candidates: tuple[tuple[int, int], ...]
    note: str | None = None


# counts are budget-independent once computed, so cache per (n, m) and
# extend lazily; candidates usually diverge from the target at index 2
# or 3, so deep enumerations are rare
_bs_counts_cache: dict[tuple[int, int], tuple[int, ...]] = {}


def _bs_product_counts(n: int, m: int, depth: int, budget: int) -> tuple[int, ...]:
    have = _bs_counts_cache.get((n, m), ())
    if len(have) < depth:
        q = free_product_with_free(bs(n, m), 1)
        have = tuple(class_counts(q, depth, budget).counts)
        _bs_counts_cache[(n, m)] = have
    return have[:depth]


def _bs_matches(n: int, m: int, target, budget: int) -> bool:
    for i in range(1, len(target) + 1):
        if _bs_product_counts(n, m, i, budget)[i - 1] != target[i - 1]:
            return False
    return True


def bs_candidate_pairs(d: int) -> tuple[tuple[int, int], ...]:
    """All (n, m) with |n - m| = d, n, m >= 1 and n + m < 16."""
    pairs = set()
    for n in range(1, BS_POWER_BOUND):
        for m in (n - d, n + d) if d else (n,):
            if m >= 1 and n + m < BS_POWER_BOUND:
                pairs.add((n, m))
    return tuple(sorted(pairs))


def bs_candidate_scan(
    g_invariants: AbelianInvariants,
    g_counts,
    rank: int,
    up_to: int,
    node_budget: int | None = None,
) -> BsScanResult:
    """Which F1 * BS(n, m) have the same abelianization and the same
    subgroup class counts as the audited group?

    F1 * BS(n, m) abelianizes to Z^2 (+) Z/|n - m| (with Z/0 = Z), so the
    torsion coefficient pins |n - m| and n + m < 16 bounds the rest.
    Count comparison runs to min(6, up_to).
    """
    if rank != 3:
        raise ValueError("the F1 * BS shape analysis is specific to rank 3")
    budget = DEFAULT_NODE_BUDGET if node_budget is None else node_budget
    if len(g_invariants.torsion) >= 2:
        return BsScanResult((), "more than one torsion coefficient; not F1 * BS")
    if g_invariants.free_rank == 2:
        d = g_invariants.torsion[0] if g_invariants.torsion else 1
    elif g_invariants.free_rank == 3 and not g_invariants.torsion:
        d = 0
    else:
        return BsScanResult(
            (), f"free rank {g_invariants.free_rank} does not fit Z^2 (+) Z/d"
        )
    pairs = bs_candidate_pairs(d)
    depth = min(6, up_to)
    target = tuple(g_counts[i] for i in range(depth))
    survivors = tuple(
        (n, m) for n, m in pairs if _bs_matches(n, m, target, budget)
    )
    return BsScanResult(survivors)


# ---------------------------------------------------------------------------
# Descent on repeated torsion

def descend_on_repeated_torsion(
    p: Presentation, tables, min_repeats: int = 3
) -> Presentation | None:
    """First audited subgroup whose abelianization repeats a torsion
    coefficient at least min_repeats times, rewritten as a presentation
    in its own right; None when no subgroup qualifies."""
    if min_repeats < 2:
        raise ValueError(f"min_repeats must be >= 2, got {min_repeats}")
    for t in tables:
        inv = invariants(abelianized_relation_matrix(t, p), schreier_rank(t))
        torsion = inv.torsion
        for value in set(torsion):
            if torsion.count(value) >= min_repeats:
                return subgroup_presentation(t, p)
    return None


# ---------------------------------------------------------------------------
# The pipeline

def _group_invariants(w, rank: int) -> AbelianInvariants:
    # abelianization of the one-relator group itself
    return invariants(IntMatrix.from_rows([exponent_sums(w, rank)], rank), rank)


def classify_relator(
    w, rank: int, max_index: int, options: ClassifyOptions | None = None
) -> Verdict:
    """Classify one cyclically reduced relator.

    Filters run first (cheapest to dearest): single-occurrence
    generator, absent generator, primitivity.  Then subgroups are
    enumerated index by index, Betti numbers computed per conjugacy
    class, and the first witness of the surface condition wins.  With no
    witness, the count fingerprint and the BS scan refine the failure.
    """
    opts = options or ClassifyOptions()
    w = tuple(w)
    if not w or cyclic_reduce(w) != w:
        raise ValueError(f"relator {word_to_text(w)!r} is not cyclically reduced and nonempty")
    if max_index < 1:
        raise ValueError(f"max_index must be >= 1, got {max_index}")

    if opts.occurrence_filter:
        profile = occurrence_profile(w, rank)
        for g, count in enumerate(profile, start=1):
            if count == 1:
                return Verdict(TRIVIALLY_FREE, single_occurrence_generator=g)

    pres = one_relator(rank, w)

    if opts.rank_reduction:
        absent = absent_generators(pres)
        if absent:
            reduced, _ = absent_generator_reduction(pres)
            sub = None
            if opts.recurse_on_rank_reduction and reduced.rank >= 2:
                sub = classify_relator(reduced.relators[0], reduced.rank, max_index, opts)
            return Verdict(RANK_REDUCIBLE, absent_generators=absent, sub_verdict=sub)

    if opts.primitivity_filter and is_primitive(w, rank):
        return Verdict(PRIMITIVE_RELATOR)

    audit: list[IndexAudit] = []
    for i in range(1, max_index + 1):
        t0 = time.perf_counter()
        try:
            tables = low_index_subgroups(pres, i, opts.node_budget)
        except BudgetExhausted:
            audit.append(
                IndexAudit(i, 0, None, True, True, time.perf_counter() - t0, exhausted=True)
            )
            return Verdict(UNRESOLVED, audit=tuple(audit), max_index_reached=i - 1)
        expected_free_betti = i * (rank - 2) + 1
        max_betti: int | None = None
        torsion_free = True
        free_profile = True
        for ordinal, t in enumerate(tables, start=1):
            inv = invariants(abelianized_relation_matrix(t, pres), schreier_rank(t))
            b = betti(inv)
            if max_betti is None or b > max_betti:
                max_betti = b
            torsion_free = torsion_free and inv.is_torsion_free
            free_profile = free_profile and b == expected_free_betti
            if surface_condition(rank, i, b):
                audit.append(
                    IndexAudit(
                        i, len(tables), max_betti, torsion_free, free_profile,
                        time.perf_counter() - t0,
                    )
                )
                return Verdict(
                    SURFACE_DETECTED,
                    audit=tuple(audit),
                    index=i,
                    betti=b,
                    table_ordinal=ordinal,
                    witness_table=t,
                )
        audit.append(
            IndexAudit(
                i, len(tables), max_betti, torsion_free, free_profile,
                time.perf_counter() - t0,
            )
        )

    counts = [a.class_count for a in audit]

    if opts.fingerprint and all(a.torsion_free and a.free_betti_profile for a in audit):
        # compare only as deep as the stored table goes
        if rank - 1 == 1:
            stored_depth = max_index
        else:
            stored_depth = min(max_index, len(_stored_free_counts().get(rank - 1, ())))
        if stored_depth >= 1 and free_fingerprint(counts, rank, stored_depth):
            return Verdict(
                LOOKS_LIKE_FREE, audit=tuple(audit), checked_up_to_index=stored_depth
            )

    if opts.bs_scan and rank == 3:
        scan = bs_candidate_scan(
            _group_invariants(w, rank), counts, rank, max_index, opts.node_budget
        )
        if scan.candidates:
            return Verdict(BS_CANDIDATES, audit=tuple(audit), pairs=scan.candidates)

    return Verdict(UNRESOLVED, audit=tuple(audit), max_index_reached=max_index)


def classify_options_with(base: ClassifyOptions | None = None, **overrides) -> ClassifyOptions:
    return replace(base or ClassifyOptions(), **overrides)
