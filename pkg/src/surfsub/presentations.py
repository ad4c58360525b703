"""Finitely presented group values.

A Presentation is an immutable (rank, relators) pair.  Relators are
stored cyclically reduced; empty relators are dropped on construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import (
    Word,
    check_letters,
    cyclic_reduce,
    word_from_text,
    word_to_text,
)


@dataclass(frozen=True)
class Presentation:
    rank: int
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be positive, got {self.rank}")
        cleaned = []
        for rel in self.relators:
            check_letters(rel, self.rank)
            rel = cyclic_reduce(rel)
            if rel:
                cleaned.append(rel)
        object.__setattr__(self, "relators", tuple(cleaned))

    def __str__(self):
        return format_presentation(self)


def one_relator(rank: int, w) -> Presentation:
    """The quotient of the rank-r free group by one cyclically reduced word."""
    w = cyclic_reduce(w)
    if not w:
        raise ValueError("one_relator requires a nonempty relator")
    return Presentation(rank, (tuple(w),))


def bs(n: int, m: int) -> Presentation:
    """Baumslag-Solitar group BS(n, m) = <a, b | b^-1 a^n b a^-m>."""
    if n == 0 or m == 0:
        raise ValueError("BS(n, m) needs nonzero n and m")
    a_n = [1 if n > 0 else -1] * abs(n)
    a_mi = [-1 if m > 0 else 1] * abs(m)
    return Presentation(2, (tuple([-2] + a_n + [2] + a_mi),))


def free_product_with_free(p: Presentation, extra_rank: int) -> Presentation:
    """p * F_extra_rank; generator indices of p are preserved."""
    if extra_rank < 0:
        raise ValueError("extra_rank must be nonnegative")
    return Presentation(p.rank + extra_rank, p.relators)


def absent_generator_reduction(p: Presentation) -> tuple[Presentation, int]:
    """Strip generators that do not occur in the relator.

    For a one-relator presentation, returns (q, extra) where q uses only
    the occurring generators (densely reindexed, order preserved) and
    free_product_with_free(q, extra) presents the same group.
    """
    if len(p.relators) != 1:
        raise ValueError("absent_generator_reduction expects one relator")
    rel = p.relators[0]
    present = sorted({abs(x) for x in rel})
    extra = p.rank - len(present)
    if extra == 0:
        return p, 0
    new_index = {g: i + 1 for i, g in enumerate(present)}
    renamed = tuple(new_index[abs(x)] * (1 if x > 0 else -1) for x in rel)
    return Presentation(len(present), (renamed,)), extra


def absent_generators(p: Presentation) -> tuple[int, ...]:
    """Generators missing from every relator, in ascending order."""
    used = {abs(x) for rel in p.relators for x in rel}
    return tuple(g for g in range(1, p.rank + 1) if g not in used)


# ---------------------------------------------------------------------------
# Text format: "rank=3; relators=bACBaBBABAc,abAB"

def format_presentation(p: Presentation) -> str:
    rels = ",".join(word_to_text(rel) for rel in p.relators)
    return f"rank={p.rank}; relators={rels}"


def parse_presentation(text: str) -> Presentation:
    fields = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad presentation field {part!r}")
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    if "rank" not in fields:
        raise ValueError("presentation text needs a rank field")
    rank = int(fields["rank"])
    relators = []
    for chunk in fields.get("relators", "").split(","):
        chunk = chunk.strip()
        if chunk:
            relators.append(word_from_text(chunk, rank))
    return Presentation(rank, tuple(relators))
