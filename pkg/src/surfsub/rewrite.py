"""Reidemeister-Schreier rewriting of finite-index subgroups.

From a coset table one reads off a generating set for the subgroup: one
Schreier generator per (coset, generator) cell outside a spanning tree
of the coset graph.  Tracing each relator from each coset and recording
the non-tree cells crossed gives the subgroup's relators over those
generators; the tree cells are exactly the trivial generators, so
skipping them performs the tree-generator elimination.

The spanning tree is grown breadth-first from coset 1, visiting columns
in generator order (a, a^-1, b, b^-1, ...), which keeps coset
representatives shortest and the output deterministic.
"""

from __future__ import annotations

from collections import deque

from .abelian import IntMatrix
from .lowindex import CosetTable, validate_table
from .presentations import Presentation


def _schreier_data(t: CosetTable):
    """(tree, sgen) for t: tree is the set of signed tree cells
    (coset, letter), sgen maps each non-tree positive cell (coset, g) to
    its 0-based Schreier generator index in scan order."""
    tree: set[tuple[int, int]] = set()
    seen = [False] * (t.degree + 1)
    seen[1] = True
    queue = deque([1])
    letters = [s * g for g in range(1, t.rank + 1) for s in (1, -1)]
    while queue:
        c = queue.popleft()
        for x in letters:
            img = t.follow(c, x)
            if not seen[img]:
                seen[img] = True
                tree.add((c, x))
                tree.add((img, -x))
                queue.append(img)
    sgen: dict[tuple[int, int], int] = {}
    for c in range(1, t.degree + 1):
        for g in range(1, t.rank + 1):
            if (c, g) not in tree:
                sgen[(c, g)] = len(sgen)
    return tree, sgen


def _rewrite_from(t: CosetTable, start: int, word, tree, sgen) -> list[int]:
    """Trace `word` from coset `start`, emitting signed 1-based Schreier
    letters for the non-tree cells crossed."""
    out: list[int] = []
    c = start
    for x in word:
        if x > 0:
            if (c, x) not in tree:
                out.append(sgen[(c, x)] + 1)
            c = t.follow(c, x)
        else:
            nxt = t.follow(c, x)
            if (nxt, -x) not in tree:
                out.append(-(sgen[(nxt, -x)] + 1))
            c = nxt
    return out


def schreier_rank(t: CosetTable) -> int:
    """Number of Schreier generators: degree*(rank - 1) + 1."""
    return t.degree * (t.rank - 1) + 1


def abelianized_relation_matrix(t: CosetTable, p: Presentation) -> IntMatrix:
    """Relation matrix of the subgroup's abelianization.

    One row per (coset, relator) pair, one column per Schreier
    generator; each entry is the signed crossing count of that generator
    in the rewritten relator trace.  The cokernel over the ambient
    columns is the subgroup's abelianization.
    """
    validate_table(t, p)
    tree, sgen = _schreier_data(t)
    cols = len(sgen)
    rows = []
    for c in range(1, t.degree + 1):
        for rel in p.relators:
            row = [0] * cols
            for letter in _rewrite_from(t, c, rel, tree, sgen):
                row[abs(letter) - 1] += 1 if letter > 0 else -1
            rows.append(tuple(row))
    return IntMatrix(len(rows), cols, tuple(rows))


def subgroup_presentation(t: CosetTable, p: Presentation) -> Presentation:
    """Presentation of the subgroup on its Schreier generators.

    Only the tree generators are eliminated; no further simplification
    is attempted.  The abelianization agrees with the cokernel of
    abelianized_relation_matrix by construction.
    """
    validate_table(t, p)
    tree, sgen = _schreier_data(t)
    relators = []
    for c in range(1, t.degree + 1):
        for rel in p.relators:
            relators.append(tuple(_rewrite_from(t, c, rel, tree, sgen)))
    return Presentation(len(sgen), tuple(relators))
