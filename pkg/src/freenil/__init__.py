"""freenil: exact computations in free nilpotent quotients of free groups.

Word calculus, Magnus embedding into truncated noncommutative integer power
series, normal-closure layer lattices, lower-central-series invariants of
one-relator quotients, and a layerwise conjugacy decision procedure.
"""

from freenil.words import (
    Word,
    Endomorphism,
    ParseError,
    apply_endomorphism,
    check_hypothesis_type2,
    check_hypothesis_type3,
    commutator,
    conjugate,
    cyclic_length,
    cyclic_reduce,
    format_word,
    free_reduce,
    is_proper_power,
    parse_word,
    surface_relator,
    word_length,
)

__version__ = "0.1.0"
