"""Magnus embedding into truncated noncommutative integer power series.

A series over rank ``k`` truncated at class ``c`` keeps the degrees
``0..c-1``; two words are equal in the class-``c`` free nilpotent quotient
iff their series agree.  Coefficients live in ``levels``, one sparse dict
per degree, with a degree-``d`` monomial encoded as an integer in base ``k``
(most significant digit first, digit = generator index - 1).  Within a
level, integer order on keys is exactly lexicographic order on monomials,
and the repo-wide monomial order is degree-then-lex.

The module also owns the layer machinery built on that grading: Lyndon
word bases of the free Lie ring layers, Witt ranks, bracket expansions,
and Mal'cev coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from freenil.words import Word, commutator

_WITNESS_CAP = 4096  # letters; witness words are opportunistic, never required


def encode_monomial(indices, k: int) -> int:
    m = 0
    for i in indices:
        m = m * k + (i - 1)
    return m


def decode_monomial(m: int, k: int, degree: int) -> tuple[int, ...]:
    out = []
    for _ in range(degree):
        m, digit = divmod(m, k)
        out.append(digit + 1)
    return tuple(reversed(out))


def _mul_levels(a, b, k: int, c: int):
    out = [{} for _ in range(c)]
    shifts = [k ** d for d in range(c)]
    for d1, lvl1 in enumerate(a):
        if not lvl1:
            continue
        for d2 in range(c - d1):
            lvl2 = b[d2]
            if not lvl2:
                continue
            tgt = out[d1 + d2]
            shift = shifts[d2]
            for m1, c1 in lvl1.items():
                base = m1 * shift
                for m2, c2 in lvl2.items():
                    key = base + m2
                    val = tgt.get(key, 0) + c1 * c2
                    if val:
                        tgt[key] = val
                    elif key in tgt:
                        del tgt[key]
    return out


class NilElement:
    """An element of the class-``c`` free nilpotent group on ``k`` generators,
    represented as its Magnus series (constant term always 1).

    The optional ``witness`` is a Word that embeds to this series; it is
    carried opportunistically and dropped when products grow too long.
    """

    __slots__ = ("k", "c", "levels", "witness")

    def __init__(self, k: int, c: int, levels, witness: Word | None = None):
        if c < 2:
            raise ValueError(f"truncation class must be at least 2, got {c}")
        if k < 1:
            raise ValueError(f"rank must be at least 1, got {k}")
        if len(levels) != c or levels[0] != {0: 1}:
            raise ValueError("levels must span degrees 0..c-1 with constant term 1")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "witness", witness)

    def __setattr__(self, name, value):
        raise AttributeError("NilElement is immutable")

    @classmethod
    def identity(cls, k: int, c: int) -> NilElement:
        return cls(k, c, [{0: 1}] + [{} for _ in range(c - 1)], Word.identity(k))

    @property
    def is_identity(self) -> bool:
        return all(not lvl for lvl in self.levels[1:])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NilElement)
            and self.k == other.k
            and self.c == other.c
            and self.levels == other.levels
        )

    def __repr__(self) -> str:
        terms = sum(len(lvl) for lvl in self.levels)
        return f"<nil element k={self.k} c={self.c} weight={self.weight()} terms={terms}>"

    def weight(self) -> int | None:
        """Least positive degree with a nonzero coefficient; None if trivial."""
        for d in range(1, self.c):
            if self.levels[d]:
                return d
        return None

    def lie_component(self, j: int) -> list[int]:
        return lie_component(self, j)

    def truncated(self, c2: int) -> NilElement:
        """The image in the class-``c2`` quotient, c2 <= c."""
        if not 2 <= c2 <= self.c:
            raise ValueError(f"target class {c2} outside 2..{self.c}")
        return NilElement(self.k, c2, [dict(l) for l in self.levels[:c2]], self.witness)


def _same_context(u: NilElement, v: NilElement) -> None:
    if u.k != v.k or u.c != v.c:
        raise ValueError(
            f"context mismatch: (k={u.k}, c={u.c}) vs (k={v.k}, c={v.c})"
        )


def _combine_witness(a: Word | None, b: Word | None) -> Word | None:
    if a is None or b is None:
        return None
    if len(a) + len(b) > _WITNESS_CAP:
        return None
    return a * b


def nil_mul(u: NilElement, v: NilElement) -> NilElement:
    _same_context(u, v)
    return NilElement(
        u.k, u.c, _mul_levels(u.levels, v.levels, u.k, u.c),
        _combine_witness(u.witness, v.witness),
    )


def nil_inv(u: NilElement) -> NilElement:
    """Inverse via the finite Neumann series of (1 - u)."""
    c = u.c
    n = [dict(l) for l in u.levels]
    n[0] = {}  # n = u - 1, supported in degrees >= 1
    acc = [{0: 1}] + [{} for _ in range(c - 1)]
    power = [{0: 1}] + [{} for _ in range(c - 1)]
    for m in range(1, c):
        power = _mul_levels(power, n, u.k, c)
        sign = -1 if m % 2 else 1
        for d in range(c):
            for key, val in power[d].items():
                new = acc[d].get(key, 0) + sign * val
                if new:
                    acc[d][key] = new
                elif key in acc[d]:
                    del acc[d][key]
    witness = u.witness.inverse() if u.witness is not None else None
    return NilElement(u.k, u.c, acc, witness)


def nil_pow(u: NilElement, n: int) -> NilElement:
    if n < 0:
        return nil_pow(nil_inv(u), -n)
    out = NilElement.identity(u.k, u.c)
    base = u
    while n:
        if n & 1:
            out = nil_mul(out, base)
        base = nil_mul(base, base) if n > 1 else base
        n >>= 1
    return out


def nil_commutator(u: NilElement, v: NilElement) -> NilElement:
    """[u, v] = u v u^-1 v^-1."""
    return nil_mul(nil_mul(u, v), nil_mul(nil_inv(u), nil_inv(v)))


@lru_cache(maxsize=None)
def _letter_levels(x: int, k: int, c: int):
    # a_i  -> 1 + x_i;  a_i^-1 -> sum_m (-x_i)^m truncated
    i = abs(x) - 1
    levels = [{0: 1}]
    if x > 0:
        levels.append({i: 1})
        levels.extend({} for _ in range(c - 2))
    else:
        m = 0
        for d in range(1, c):
            m = m * k + i
            levels.append({m: 1 if d % 2 == 0 else -1})
    return levels


def embed_word(w: Word, k: int, c: int) -> NilElement:
    """Magnus embedding of a free-group word into the class-``c`` quotient."""
    if c < 2:
        raise ValueError(f"truncation class must be at least 2, got {c}")
    if w.rank > k:
        raise ValueError(f"word alphabet rank {w.rank} exceeds context rank {k}")
    levels = [{0: 1}] + [{} for _ in range(c - 1)]
    for x in w.letters:
        levels = _mul_levels(levels, _letter_levels(x, k, c), k, c)
    return NilElement(k, c, levels, Word(w.letters, k))


def weight(x: NilElement) -> int | None:
    return x.weight()


def lie_component(x: NilElement, j: int) -> list[int]:
    """Degree-``j`` coefficient vector in Z^(k^j), ambient monomial coordinates.

    Defined when the element has weight >= j (a Lie element by Magnus'
    criterion) or is trivial (zero vector).
    """
    if not 1 <= j < x.c:
        raise ValueError(f"degree {j} outside 1..{x.c - 1}")
    w = x.weight()
    if w is not None and w < j:
        raise ValueError(f"element has weight {w} < requested degree {j}")
    out = [0] * (x.k ** j)
    for m, coeff in x.levels[j].items():
        out[m] = coeff
    return out


# --- Lyndon words and the free Lie ring layers -------------------------------


@lru_cache(maxsize=None)
def lyndon_words(k: int, j: int) -> tuple[tuple[int, ...], ...]:
    """All Lyndon words of length ``j`` over 1..k, lexicographically ordered.

    Duval's generation: extend the current word periodically, then increment
    the last non-maximal letter.
    """
    if k < 1 or j < 1:
        raise ValueError("rank and degree must be positive")
    out = []
    w = [1]
    while True:
        if len(w) == j:
            out.append(tuple(w))
        w = [w[i % len(w)] for i in range(j)]
        while w and w[-1] == k:
            w.pop()
        if not w:
            return tuple(out)
        w[-1] += 1


def _mobius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def witt_rank(k: int, j: int) -> int:
    """Rank of the degree-``j`` layer of the free Lie ring on ``k`` generators:
    (1/j) * sum over d | j of mu(d) * k^(j/d)."""
    if k < 1 or j < 1:
        raise ValueError("rank and degree must be positive")
    total = sum(_mobius(d) * k ** (j // d) for d in range(1, j + 1) if j % d == 0)
    return total // j


def is_lyndon(word: tuple[int, ...]) -> bool:
    n = len(word)
    if n == 0:
        return False
    return all(word < word[i:] + word[:i] for i in range(1, n))


def _standard_split(word: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # standard factorization: the right factor is the smallest proper suffix
    best_i = 1
    for i in range(2, len(word)):
        if word[i:] < word[best_i:]:
            best_i = i
    return word[:best_i], word[best_i:]


def _require_lyndon(word) -> tuple[int, ...]:
    word = tuple(word)
    if not is_lyndon(word):
        raise ValueError(f"{word} is not a Lyndon word")
    return word


def bracket_word(word, k: int) -> Word:
    """Group commutator realizing the standard bracketing of a Lyndon word."""
    word = _require_lyndon(word)
    return _bracket_word_rec(word, k)


def _bracket_word_rec(word, k: int) -> Word:
    if len(word) == 1:
        return Word.generator(word[0], k)
    u, v = _standard_split(word)
    return commutator(_bracket_word_rec(u, k), _bracket_word_rec(v, k))


def bracket_vector(word, k: int) -> list[int]:
    """Expansion of the standard bracketing in Z^(k^j), j = len(word).

    The coefficient at the monomial ``word`` itself is 1 and every other
    monomial in the support is lexicographically larger (the triangularity
    that makes Lyndon coordinates solvable by forward elimination).
    """
    word = _require_lyndon(word)
    sparse = _bracket_sparse(word, k)
    out = [0] * (k ** len(word))
    for m, coeff in sparse.items():
        out[m] = coeff
    return out


@lru_cache(maxsize=None)
def _bracket_sparse(word: tuple[int, ...], k: int) -> dict:
    if len(word) == 1:
        return {word[0] - 1: 1}
    u, v = _standard_split(word)
    a = _bracket_sparse(u, k)
    b = _bracket_sparse(v, k)
    sa = k ** len(v)
    sb = k ** len(u)
    out: dict[int, int] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            for key, val in ((ma * sa + mb, ca * cb), (mb * sb + ma, -ca * cb)):
                new = out.get(key, 0) + val
                if new:
                    out[key] = new
                elif key in out:
                    del out[key]
    return out


@dataclass(frozen=True)
class LyndonDatum:
    """One Lyndon basis element of a layer: the word, its bracket expansion,
    and the group commutator word realizing it."""

    word: tuple[int, ...]
    vector: tuple[int, ...]
    bracket: Word


@lru_cache(maxsize=None)
def lyndon_basis(k: int, j: int) -> tuple[LyndonDatum, ...]:
    return tuple(
        LyndonDatum(word=w, vector=tuple(bracket_vector(w, k)), bracket=bracket_word(w, k))
        for w in lyndon_words(k, j)
    )


def to_lyndon_coords(v, k: int, j: int) -> list[int]:
    """Coordinates of a degree-``j`` Lie vector over the Lyndon bracket basis.

    Forward elimination on the anchor monomials; raises if ``v`` is not in
    the span (a non-Lie vector, signalling an upstream precondition bug).
    """
    if len(v) != k ** j:
        raise ValueError(f"vector has length {len(v)}, expected {k ** j}")
    work = list(v)
    coords = []
    for datum in lyndon_basis(k, j):
        anchor = encode_monomial(datum.word, k)
        coeff = work[anchor]
        coords.append(coeff)
        if coeff:
            for m, val in enumerate(datum.vector):
                if val:
                    work[m] -= coeff * val
    if any(work):
        raise ValueError("vector is not in the degree-%d Lyndon bracket span" % j)
    return coords


# --- Mal'cev coordinates ------------------------------------------------------


@dataclass(frozen=True)
class MalcevCoordinates:
    """Exponents over the Lyndon bracket basis, ordered by (degree, lex)."""

    k: int
    c: int
    exponents: tuple[int, ...]


def malcev_layout(k: int, c: int) -> list[tuple[int, tuple[int, ...]]]:
    """The (degree, Lyndon word) positions backing MalcevCoordinates."""
    return [(j, w) for j in range(1, c) for w in lyndon_words(k, j)]


@lru_cache(maxsize=None)
def _bracket_embed(word: tuple[int, ...], k: int, c: int) -> NilElement:
    return embed_word(bracket_word(word, k), k, c)


def malcev_coordinates(x: NilElement) -> MalcevCoordinates:
    """Peel layer by layer: read Lyndon coordinates of the current lowest
    degree, divide off the ordered bracket-power product, recurse."""
    k, c = x.k, x.c
    y = x
    exps: list[int] = []
    for j in range(1, c):
        coords = to_lyndon_coords(lie_component(y, j), k, j)
        exps.extend(coords)
        if any(coords):
            block = NilElement.identity(k, c)
            for datum, e in zip(lyndon_basis(k, j), coords):
                if e:
                    block = nil_mul(block, nil_pow(_bracket_embed(datum.word, k, c), e))
            y = nil_mul(nil_inv(block), y)
    if not y.is_identity:
        raise AssertionError("Mal'cev peeling left a nontrivial residue")
    return MalcevCoordinates(k=k, c=c, exponents=tuple(exps))


def from_malcev(coords: MalcevCoordinates, k: int | None = None, c: int | None = None) -> NilElement:
    """Ordered product of bracket powers prod embed(bracket(l))^e_l."""
    k = coords.k if k is None else k
    c = coords.c if c is None else c
    layout = malcev_layout(k, c)
    if len(coords.exponents) != len(layout):
        raise ValueError(
            f"coordinate length {len(coords.exponents)} != layout size {len(layout)}"
        )
    out = NilElement.identity(k, c)
    for (j, word), e in zip(layout, coords.exponents):
        if e:
            out = nil_mul(out, nil_pow(_bracket_embed(word, k, c), e))
    return out
