"""Low-index subgroup enumeration by coset-table backtracking.

One conjugacy class of index-n subgroups corresponds to one transitive
action of the group on cosets 1..n, taken up to relabeling.  The search
fills a partial coset table cell by cell in row-major order (coset 1
first, columns a, a^-1, b, b^-1, ...), always trying the lowest existing
coset first and a brand-new coset last, so every complete table comes
out standardized with respect to coset 1.  Forced deductions from
relator traces close cells early and prune dead branches.  A completed
table is emitted only if it is the lexicographic minimum among its
rebasings at every coset (first-in-class), which yields exactly one
canonical table per conjugacy class, matching the counting convention of
the usual computer algebra systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .presentations import Presentation

DEFAULT_NODE_BUDGET = 10**9


class BudgetExhausted(Exception):
    """The enumeration ran out of its table-cell assignment budget.

    Distinct from an empty result: nothing can be concluded about the
    part of the search that was not visited.
    """

    def __init__(self, budget: int, max_degree: int):
        self.budget = budget
        self.max_degree = max_degree
        super().__init__(
            f"assignment budget {budget} exhausted enumerating degree <= {max_degree}"
        )


@dataclass(frozen=True)
class CosetTable:
    """Action of the generators on cosets 1..degree; coset 1 is the
    subgroup.  images[g-1][c-1] is the image of coset c under generator g;
    each generator acts as a permutation."""

    degree: int
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be positive")
        for row in self.images:
            if len(row) != self.degree or sorted(row) != list(range(1, self.degree + 1)):
                raise ValueError(f"generator image {row} is not a permutation of 1..{self.degree}")

    @property
    def rank(self) -> int:
        return len(self.images)

    @cached_property
    def inverse_images(self) -> tuple[tuple[int, ...], ...]:
        inv = []
        for row in self.images:
            back = [0] * self.degree
            for c, img in enumerate(row, start=1):
                back[img - 1] = c
            inv.append(tuple(back))
        return tuple(inv)

    def follow(self, coset: int, letter: int) -> int:
        """Image of a coset under one signed letter."""
        if letter > 0:
            return self.images[letter - 1][coset - 1]
        return self.inverse_images[-letter - 1][coset - 1]

    def trace(self, coset: int, word) -> int:
        for x in word:
            coset = self.follow(coset, x)
        return coset


@dataclass(frozen=True)
class ClassCountVector:
    """counts[i-1] = number of conjugacy classes of index-i subgroups."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if self.counts and self.counts[0] != 1:
            raise ValueError("every group has exactly one index-1 subgroup class")

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, i):
        return self.counts[i]


def _relator_rotations(p: Presentation, nc: int):
    """Cyclic rotations of every relator, as column sequences, bucketed
    by first column.  Duplicate rotations (proper powers) are dropped."""
    buckets: list[list[tuple[int, ...]]] = [[] for _ in range(nc)]
    seen = set()
    for rel in p.relators:
        cols = [2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1 for x in rel]
        n = len(cols)
        for s in range(n):
            rot = tuple(cols[s:] + cols[:s])
            if rot not in seen:
                seen.add(rot)
                buckets[rot[0]].append(rot)
    return buckets


def _first_in_class(tab, n: int, nc: int) -> bool:
    """True iff the complete standardized table is lexicographically <=
    each of its rebasings at cosets 2..n."""
    for alpha in range(1, n):
        new_of = [-1] * n
        old_of = [0] * n
        new_of[alpha] = 0
        old_of[0] = alpha
        cnt = 1
        worse = False
        for newc in range(n):
            base_old = old_of[newc] * nc
            base_new = newc * nc
            for col in range(nc):
                img = tab[base_old + col]
                v = new_of[img]
                if v < 0:
                    v = cnt
                    new_of[img] = cnt
                    old_of[cnt] = img
                    cnt += 1
                ref = tab[base_new + col]
                if v != ref:
                    if v < ref:
                        return False
                    worse = True
                    break
            if worse:
                break
    return True


def _search(p: Presentation, max_degree: int, budget: int, collect: bool):
    """Backtracking core.  Returns (per_degree_counts, tables) where
    tables is a list of (degree, flat_table) if collect else empty."""
    rank = p.rank
    nc = 2 * rank
    rot_by_col = _relator_rotations(p, nc)
    tab = [-1] * (max_degree * nc)
    trail: list[int] = []
    dq: list[tuple[int, int]] = []
    counts = [0] * (max_degree + 1)
    tables: list[tuple[int, tuple[int, ...]]] = []
    used = 0

    def define(a: int, col: int, b: int) -> bool:
        nonlocal used
        used += 1
        if used > budget:
            raise BudgetExhausted(budget, max_degree)
        c1 = a * nc + col
        v = tab[c1]
        if v >= 0:
            return v == b
        c2 = b * nc + (col ^ 1)
        v2 = tab[c2]
        if v2 >= 0 and v2 != a:
            return False
        tab[c1] = b
        trail.append(c1)
        dq.append((a, col))
        if v2 < 0:
            tab[c2] = a
            trail.append(c2)
            dq.append((b, col ^ 1))
        return True

    def scan(rot, start: int) -> bool:
        # trace the rotated relator from `start`; it must come back to
        # `start`, deducing the last missing cell when only one is open
        nterm = len(rot)
        f = start
        i = 0
        while i < nterm:
            nxt = tab[f * nc + rot[i]]
            if nxt < 0:
                break
            f = nxt
            i += 1
        if i == nterm:
            return f == start
        b = start
        j = nterm
        while j > i + 1:
            prv = tab[b * nc + (rot[j - 1] ^ 1)]
            if prv < 0:
                break
            b = prv
            j -= 1
        if j == i + 1:
            return define(f, rot[i], b)
        return True

    def propagate() -> bool:
        while dq:
            a, col = dq.pop()
            for rot in rot_by_col[col]:
                if not scan(rot, a):
                    return False
        return True

    def recurse(hint: int, n: int):
        limit = n * nc
        c = hint
        while c < limit and tab[c] >= 0:
            c += 1
        if c == limit:
            if _first_in_class(tab, n, nc):
                counts[n] += 1
                if collect:
                    tables.append((n, tuple(tab[:limit])))
            return
        a, col = divmod(c, nc)
        icol = col ^ 1
        candidates = [b for b in range(n) if tab[b * nc + icol] < 0]
        if n < max_degree:
            candidates.append(n)
        for b in candidates:
            mark = len(trail)
            del dq[:]
            if define(a, col, b) and propagate():
                recurse(c + 1, n + 1 if b == n else n)
            while len(trail) > mark:
                tab[trail.pop()] = -1

    recurse(0, 1)
    return counts, tables


def _table_from_flat(flat, n: int, rank: int) -> CosetTable:
    nc = 2 * rank
    images = tuple(
        tuple(flat[c * nc + 2 * g] + 1 for c in range(n)) for g in range(rank)
    )
    return CosetTable(n, images)


def low_index_subgroups(
    p: Presentation, index: int, node_budget: int | None = None
) -> tuple[CosetTable, ...]:
    """One canonical coset table per conjugacy class of subgroups of
    index exactly `index`, in lexicographic order of the tables.

    Raises BudgetExhausted when the assignment budget runs out; that is
    not the same as returning no tables.
    """
    if index < 1:
        raise ValueError(f"index must be positive, got {index}")
    budget = DEFAULT_NODE_BUDGET if node_budget is None else node_budget
    _, tables = _search(p, index, budget, collect=True)
    flats = sorted(flat for n, flat in tables if n == index)
    return tuple(_table_from_flat(flat, index, p.rank) for flat in flats)


def class_counts(
    p: Presentation, up_to: int, node_budget: int | None = None
) -> ClassCountVector:
    """Conjugacy-class counts of subgroups of index 1..up_to."""
    if up_to < 1:
        raise ValueError(f"up_to must be positive, got {up_to}")
    budget = DEFAULT_NODE_BUDGET if node_budget is None else node_budget
    counts, _ = _search(p, up_to, budget, collect=False)
    return ClassCountVector(tuple(counts[1 : up_to + 1]))


def validate_table(t: CosetTable, p: Presentation) -> None:
    """Raise ValueError unless t is a transitive, relator-closed table
    for p (every relator traces back to every coset)."""
    if t.rank != p.rank:
        raise ValueError(f"table has rank {t.rank}, presentation {p.rank}")
    reached = {1}
    frontier = [1]
    while frontier:
        c = frontier.pop()
        for g in range(1, p.rank + 1):
            for nxt in (t.follow(c, g), t.follow(c, -g)):
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
    if len(reached) != t.degree:
        raise ValueError("table action is not transitive")
    for rel in p.relators:
        for c in range(1, t.degree + 1):
            if t.trace(c, rel) != c:
                raise ValueError(f"relator {rel} does not close at coset {c}")


def _flatten(t: CosetTable) -> list[int]:
    nc = 2 * t.rank
    flat = [0] * (t.degree * nc)
    for g in range(t.rank):
        fwd = t.images[g]
        bwd = t.inverse_images[g]
        for c in range(t.degree):
            flat[c * nc + 2 * g] = fwd[c] - 1
            flat[c * nc + 2 * g + 1] = bwd[c] - 1
    return flat


def _standardize_from(flat, n: int, nc: int, alpha: int) -> tuple[int, ...]:
    new_of = [-1] * n
    old_of = [0] * n
    new_of[alpha] = 0
    old_of[0] = alpha
    cnt = 1
    out = []
    for newc in range(n):
        base = old_of[newc] * nc
        for col in range(nc):
            img = flat[base + col]
            v = new_of[img]
            if v < 0:
                v = cnt
                new_of[img] = cnt
                old_of[cnt] = img
                cnt += 1
            out.append(v)
    return tuple(out)


def canonical_form(t: CosetTable) -> CosetTable:
    """The canonical representative of t's conjugacy class: the lex-least
    standardization over all choices of base coset."""
    nc = 2 * t.rank
    flat = _flatten(t)
    best = min(_standardize_from(flat, t.degree, nc, a) for a in range(t.degree))
    return _table_from_flat(best, t.degree, t.rank)


# ---------------------------------------------------------------------------
# Dump format: one table per line, one comma-separated image list per
# generator, generators joined by ';'.  "2,1;1,2" is the degree-2 table
# where a swaps the cosets and b fixes them.

def format_table(t: CosetTable) -> str:
    return ";".join(",".join(str(i) for i in row) for row in t.images)


def parse_table(text: str) -> CosetTable:
    rows = []
    for chunk in text.strip().split(";"):
        rows.append(tuple(int(v) for v in chunk.split(",")))
    if not rows or not rows[0]:
        raise ValueError(f"bad table dump {text!r}")
    return CosetTable(len(rows[0]), tuple(rows))
