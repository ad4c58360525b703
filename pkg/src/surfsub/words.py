"""Free-group word arithmetic.

A word in the free group of rank r is a sequence of nonzero integers:
+i stands for the i-th generator, -i for its inverse.  Words are kept as
plain tuples so they hash, compare, and copy for free; every operation
here is a pure function.

Text form: the i-th lowercase letter is generator i, the matching
uppercase letter its inverse, so "aBc" is a * b^-1 * c.  A verbose
"a^-1*b" style is also accepted on input.
"""

from __future__ import annotations

import random
import string
from math import gcd

Word = tuple[int, ...]


def check_letters(letters, rank: int) -> None:
    """Raise ValueError unless every letter is a signed index in 1..rank."""
    if rank < 1:
        raise ValueError(f"rank must be positive, got {rank}")
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise ValueError(f"letter {x} outside rank {rank}")


def free_reduce(letters) -> Word:
    """Cancel adjacent mutually inverse letters until none remain.

    Accepts any iterable of signed letters and returns the freely
    reduced word equal to it in the free group.
    """
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_freely_reduced(w) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w) -> bool:
    if not is_freely_reduced(w):
        return False
    return len(w) < 2 or w[0] != -w[-1]


def cyclic_reduce(w) -> Word:
    """Freely reduce, then strip mutually inverse first/last letters.

    The result is conjugate to the input and every cyclic rotation of it
    is freely reduced.
    """
    w = free_reduce(w)
    lo, hi = 0, len(w)
    while hi - lo >= 2 and w[lo] == -w[hi - 1]:
        lo += 1
        hi -= 1
    return w[lo:hi]


def inverse(w) -> Word:
    return tuple(-x for x in reversed(w))


def random_relator(rank: int, raw_length: int, rng: random.Random) -> Word:
    """Draw raw_length letters uniformly from all 2*rank signed letters,
    then freely and cyclically reduce.  The result has length <= raw_length.
    """
    if rank < 2:
        raise ValueError(f"rank must be >= 2, got {rank}")
    if raw_length < 1:
        raise ValueError(f"raw_length must be >= 1, got {raw_length}")
    raw = []
    for _ in range(raw_length):
        j = rng.randrange(2 * rank)
        g = j // 2 + 1
        raw.append(g if j % 2 == 0 else -g)
    return cyclic_reduce(raw)


def occurrence_profile(w, rank: int) -> tuple[int, ...]:
    """Per-generator occurrence count, ignoring sign."""
    check_letters(w, rank)
    counts = [0] * rank
    for x in w:
        counts[abs(x) - 1] += 1
    return tuple(counts)


def exponent_sums(w, rank: int) -> tuple[int, ...]:
    """Per-generator signed exponent sum (the abelianized word)."""
    check_letters(w, rank)
    sums = [0] * rank
    for x in w:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


# ---------------------------------------------------------------------------
# Text format

_LOWER = string.ascii_lowercase
_UPPER = string.ascii_uppercase


def word_to_text(w) -> str:
    """Compact text form: lowercase = generator, uppercase = inverse."""
    if any(x == 0 or abs(x) > 26 for x in w):
        raise ValueError("compact text form only covers ranks up to 26")
    return "".join(_LOWER[x - 1] if x > 0 else _UPPER[-x - 1] for x in w)


def word_from_text(text: str, rank: int | None = None) -> Word:
    """Parse a word; inverse of word_to_text.

    Also accepts the verbose style "a^-1*b^2" (whitespace and '*' are
    separators, '^' takes an integer exponent).  If rank is given it is
    enforced; otherwise it is inferred as the largest generator used.
    Parse failures report the offending column.
    """
    letters: list[int] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t*":
            i += 1
            continue
        if ch in _LOWER:
            g = _LOWER.index(ch) + 1
        elif ch in _UPPER:
            g = -(_UPPER.index(ch) + 1)
        else:
            raise ValueError(f"bad character {ch!r} at column {i + 1}")
        i += 1
        exp = 1
        if i < n and text[i] == "^":
            i += 1
            j = i
            if j < n and text[j] in "+-":
                j += 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i or not text[i:j].lstrip("+-"):
                raise ValueError(f"bad exponent at column {i + 1}")
            exp = int(text[i:j])
            i = j
        if exp >= 0:
            letters.extend([g] * exp)
        else:
            letters.extend([-g] * (-exp))
    if rank is None:
        rank = max((abs(x) for x in letters), default=1)
    check_letters(letters, rank)
    return tuple(letters)


# ---------------------------------------------------------------------------
# Primitivity via Whitehead's algorithm
#
# A cyclically reduced word is primitive (part of a free basis) iff its
# cyclic word can be carried to a single letter by automorphisms, and by
# Whitehead's peak reduction theorem it suffices to greedily apply
# Whitehead moves of the second kind as long as they shorten the word.
# The minimum length over the automorphism orbit is reached by that
# descent, so the word is primitive iff the descent bottoms out at
# length 1.

def _letter_key(x: int) -> tuple[int, int]:
    # orders a < A < b < B < ...
    return (abs(x), 0 if x > 0 else 1)


def whitehead_moves(rank: int):
    """All Whitehead moves of the second kind, in a fixed deterministic
    order.  A move is a pair (v, Y): v is the multiplier letter, Y a set
    of signed letters with v in Y and -v not in Y; it maps each letter
    x with |x| != |v| to  (v^-1 if -x in Y) * x * (v if x in Y)  and
    fixes v.  Identity moves (Y = {v}) are skipped.
    """
    signed = sorted(
        [g for g in range(1, rank + 1)] + [-g for g in range(1, rank + 1)],
        key=_letter_key,
    )
    moves = []
    for v in signed:
        others = [x for x in signed if abs(x) != abs(v)]
        for mask in range(1, 1 << len(others)):
            y = frozenset(
                [v] + [others[i] for i in range(len(others)) if mask >> i & 1]
            )
            moves.append((v, y))
    moves.sort(key=lambda m: (_letter_key(m[0]), sorted(_letter_key(x) for x in m[1])))
    return moves


def apply_whitehead_move(w, move) -> Word:
    """Image of the cyclic word w under the move, cyclically reduced."""
    v, y = move
    out: list[int] = []
    for x in w:
        if abs(x) == abs(v):
            out.append(x)
            continue
        if -x in y:
            out.append(-v)
        out.append(x)
        if x in y:
            out.append(v)
    return cyclic_reduce(out)


def is_primitive(w, rank: int) -> bool:
    """True iff w belongs to some free basis of the rank-r free group.

    Greedy Whitehead descent: repeatedly apply the move giving the
    largest length drop (ties: the first move in the fixed order) until
    no move shortens the word, then primitive iff length 1.
    """
    w = cyclic_reduce(w)
    if not w:
        raise ValueError("the empty word is not a candidate for primitivity")
    check_letters(w, rank)
    moves = whitehead_moves(rank)
    cur = w
    while len(cur) > 1:
        best = None
        best_len = len(cur)
        for move in moves:
            img = apply_whitehead_move(cur, move)
            if len(img) < best_len:
                best = img
                best_len = len(img)
        if best is None:
            return False
        cur = best
    return True


def exponent_gcd(w, rank: int) -> int:
    """gcd of the exponent sums; primitive words always have gcd 1."""
    return gcd(*exponent_sums(w, rank)) if w else 0
