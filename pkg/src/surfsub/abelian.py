"""Integer Smith normal form and abelian invariants.

Everything runs on Python ints, so intermediate entry growth during
elimination can never overflow.  The diagonal is produced directly in
invariant-factor form d1 | d2 | ... with nonnegative entries.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError(f"expected {self.cols} cols, got {len(r)}")

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not rows:
                raise ValueError("cols is required for matrices with no rows")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)


@dataclass(frozen=True)
class AbelianInvariants:
    """Cokernel shape Z^free_rank (+) Z/torsion[0] (+) ... with the
    torsion entries >= 2 and forming a divisibility chain."""

    torsion: tuple[int, ...]
    free_rank: int

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative")
        for i, t in enumerate(self.torsion):
            if t < 2:
                raise ValueError(f"torsion entry {t} (must be >= 2)")
            if i and self.torsion[i] % self.torsion[i - 1]:
                raise ValueError(f"torsion {self.torsion} breaks divisibility")

    @property
    def is_torsion_free(self) -> bool:
        return not self.torsion


def _pivot(a, rows, cols, t):
    """Smallest nonzero |entry| in the submatrix a[t:, t:]; ties go to the
    lowest row, then lowest column.  None when the submatrix is zero."""
    best = None
    best_abs = None
    for i in range(t, rows):
        ai = a[i]
        for j in range(t, cols):
            v = ai[j]
            if v and (best_abs is None or abs(v) < best_abs):
                best_abs = abs(v)
                best = (i, j)
                if best_abs == 1:
                    return best
    return best


def smith_diagonal(m: IntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith normal form of m: min(rows, cols) entries,
    nonnegative, each dividing the next (trailing zeros allowed)."""
    rows, cols = m.rows, m.cols
    k = min(rows, cols)
    if k == 0:
        return ()
    a = [list(r) for r in m.entries]
    diag: list[int] = []
    for t in range(k):
        while True:
            pos = _pivot(a, rows, cols, t)
            if pos is None:
                diag.extend([0] * (k - t))
                return tuple(diag)
            pi, pj = pos
            if pi != t:
                a[t], a[pi] = a[pi], a[t]
            if pj != t:
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
            p = a[t][t]
            # clear the pivot column; leftover remainders re-enter the
            # pivot hunt with strictly smaller absolute value
            dirty = False
            for i in range(t + 1, rows):
                v = a[i][t]
                if v:
                    q = v // p
                    if q:
                        at = a[t]
                        ai = a[i]
                        for j in range(t, cols):
                            ai[j] -= q * at[j]
                    if a[i][t]:
                        dirty = True
            if dirty:
                continue
            # clear the pivot row
            for j in range(t + 1, cols):
                v = a[t][j]
                if v:
                    q = v // p
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        dirty = True
            if dirty:
                continue
            # force divisibility: fold in the first bad interior entry
            bad = None
            for i in range(t + 1, rows):
                ai = a[i]
                for j in range(t + 1, cols):
                    if ai[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            at = a[t]
            arow = a[bad]
            for j in range(t, cols):
                at[j] += arow[j]
        diag.append(abs(a[t][t]))
    return tuple(diag)


def invariants(m: IntMatrix, ambient_cols: int) -> AbelianInvariants:
    """Cokernel of m acting on Z^ambient_cols as an AbelianInvariants.

    free_rank counts the ambient columns not consumed by a nonzero
    invariant factor; factors of 1 are dropped, factors >= 2 are the
    torsion coefficients.
    """
    if m.cols != ambient_cols:
        raise ValueError(f"matrix has {m.cols} cols, ambient says {ambient_cols}")
    diag = smith_diagonal(m)
    nonzero = [d for d in diag if d]
    return AbelianInvariants(
        torsion=tuple(d for d in nonzero if d >= 2),
        free_rank=ambient_cols - len(nonzero),
    )


def betti(inv: AbelianInvariants) -> int:
    """First Betti number: the free rank of the abelianization."""
    return inv.free_rank
