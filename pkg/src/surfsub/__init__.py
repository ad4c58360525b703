"""Surface subgroup detection in doubles of free groups.

Given a word w in a free group F_n, the double F_n *_<w> F_n contains a
surface subgroup as soon as the one-relator quotient G_n(w) = F_n/<<w>> has
an index-k subgroup whose first Betti number exceeds 1 + k(n - 2).  This
package enumerates low-index subgroups of G_n(w), computes their Betti
numbers by Reidemeister-Schreier rewriting and Smith normal form, and
classifies relators by that criterion, with filters for the degenerate
free and Baumslag-Solitar shapes.
"""

__version__ = "0.1.0"

from .words import free_reduce, cyclic_reduce, word_from_text, word_to_text
from .presentations import Presentation, one_relator, bs
from .lowindex import CosetTable, low_index_subgroups, class_counts, BudgetExhausted
from .abelian import IntMatrix, AbelianInvariants, smith_diagonal, invariants, betti
from .classify import Verdict, ClassifyOptions, classify_relator, surface_condition

__all__ = [
    "free_reduce",
    "cyclic_reduce",
    "word_from_text",
    "word_to_text",
    "Presentation",
    "one_relator",
    "bs",
    "CosetTable",
    "low_index_subgroups",
    "class_counts",
    "BudgetExhausted",
    "IntMatrix",
    "AbelianInvariants",
    "smith_diagonal",
    "invariants",
    "betti",
    "Verdict",
    "ClassifyOptions",
    "classify_relator",
    "surface_condition",
]
