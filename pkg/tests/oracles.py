"""Independent brute-force oracles shared by the test modules.

Everything here recomputes results by exhaustive enumeration or first
principles, deliberately avoiding the code paths under test.
"""

from itertools import combinations, permutations

from surfsub.words import free_reduce


# ---------------------------------------------------------------------------
# Subgroup class counts by raw permutation enumeration

def _act(perms, inv_perms, point, word):
    for x in word:
        point = perms[x - 1][point] if x > 0 else inv_perms[-x - 1][point]
    return point


def _invert(perm):
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v] = i
    return tuple(inv)


def _is_transitive(perms, degree):
    seen = {0}
    frontier = [0]
    while frontier:
        p = frontier.pop()
        for perm in perms:
            for q in (perm[p], perm.index(p)):
                if q not in seen:
                    seen.add(q)
                    frontier.append(q)
    return len(seen) == degree


def brute_force_class_count(p, degree: int) -> int:
    """Conjugacy classes of index-`degree` subgroups, counted by listing
    every assignment of generators to permutations, keeping transitive
    relator-satisfying ones, and quotienting by simultaneous conjugation."""
    perms = list(permutations(range(degree)))
    valid = set()
    for combo in _assignments(perms, p.rank):
        if not _is_transitive(combo, degree):
            continue
        inv = tuple(_invert(g) for g in combo)
        if all(
            _act(combo, inv, c, rel) == c
            for rel in p.relators
            for c in range(degree)
        ):
            valid.add(combo)
    classes = 0
    while valid:
        rep = next(iter(valid))
        orbit = set()
        for sigma in perms:
            inv_sigma = _invert(sigma)
            conj = tuple(
                tuple(sigma[g[inv_sigma[i]]] for i in range(degree)) for g in rep
            )
            orbit.add(conj)
        valid -= orbit
        classes += 1
    return classes


def _assignments(perms, rank):
    if rank == 1:
        for g in perms:
            yield (g,)
    elif rank == 2:
        for g in perms:
            for h in perms:
                yield (g, h)
    else:
        raise ValueError("oracle only covers rank <= 2")


# ---------------------------------------------------------------------------
# Integer determinants and gcd-of-minors Smith diagonal

def int_det(rows) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    sign = 1
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        total += sign * rows[0][j] * int_det(minor)
        sign = -sign
    return total


def _gcd_of_minors(entries, rows, cols, k) -> int:
    from math import gcd

    g = 0
    for rsel in combinations(range(rows), k):
        for csel in combinations(range(cols), k):
            sub = [[entries[i][j] for j in csel] for i in rsel]
            g = gcd(g, int_det(sub))
            if g == 1:
                return 1
    return g


def smith_diagonal_by_minors(entries, rows, cols) -> tuple[int, ...]:
    """d_k = gcd(k x k minors) / gcd((k-1) x (k-1) minors), the textbook
    definition of the invariant factors."""
    k = min(rows, cols)
    out = []
    prev = 1
    for i in range(1, k + 1):
        g = _gcd_of_minors(entries, rows, cols, i)
        if g == 0:
            out.extend([0] * (k - len(out)))
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


# ---------------------------------------------------------------------------
# Whitehead-orbit primitivity by breadth-first closure

def primitive_by_orbit_search(w, rank: int, max_len: int | None = None) -> bool:
    """Exhaustive closure of w under non-length-increasing Whitehead
    moves; primitive iff some single letter is reached.  Moves are
    applied through an independent generator-image substitution."""
    if max_len is None:
        max_len = len(w)
    moves = []
    signed = [s * g for g in range(1, rank + 1) for s in (1, -1)]
    for v in signed:
        rest = [x for x in signed if abs(x) != abs(v)]
        for mask in range(1 << len(rest)):
            y = {v} | {rest[i] for i in range(len(rest)) if mask >> i & 1}
            images = {}
            for g in range(1, rank + 1):
                if g == abs(v):
                    images[g] = (g,)
                else:
                    img = []
                    if -g in y:
                        img.append(-v)
                    img.append(g)
                    if g in y:
                        img.append(v)
                    images[g] = tuple(img)
            moves.append(images)

    def substitute(word, images):
        out = []
        for x in word:
            if x > 0:
                out.extend(images[x])
            else:
                out.extend(-c for c in reversed(images[-x]))
        return _cyclic(free_reduce(out))

    def _cyclic(word):
        lo, hi = 0, len(word)
        while hi - lo >= 2 and word[lo] == -word[hi - 1]:
            lo += 1
            hi -= 1
        return word[lo:hi]

    start = _cyclic(free_reduce(w))
    seen = {start}
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        if len(cur) == 1:
            return True
        for images in moves:
            img = substitute(cur, images)
            if len(img) <= max_len and img not in seen:
                seen.add(img)
                frontier.append(img)
    return any(len(u) == 1 for u in seen)
