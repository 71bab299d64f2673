import random
from itertools import product

import pytest

from freenil.magnus import (
    LyndonDatum,
    MalcevCoordinates,
    NilElement,
    bracket_vector,
    bracket_word,
    decode_monomial,
    embed_word,
    encode_monomial,
    from_malcev,
    is_lyndon,
    lie_component,
    lyndon_basis,
    lyndon_words,
    malcev_coordinates,
    malcev_layout,
    nil_commutator,
    nil_inv,
    nil_mul,
    nil_pow,
    to_lyndon_coords,
    weight,
    witt_rank,
)
from freenil.words import Word, commutator, parse_word, surface_relator


def random_word(rng, k, length):
    return Word(tuple(rng.choice([-1, 1]) * rng.randint(1, k) for _ in range(length)), k)


# --- independent dense-polynomial oracle --------------------------------------
#
# Truncated noncommutative polynomials as dense per-degree arrays over explicit
# monomial tuples; multiplication is the naive full double loop.  This shares
# nothing with the sparse packed-integer path it checks.


class DensePoly:
    def __init__(self, k, c):
        self.k = k
        self.c = c
        self.coeffs = [dict() for _ in range(c)]  # tuple monomial -> int

    @classmethod
    def one(cls, k, c):
        p = cls(k, c)
        p.coeffs[0][()] = 1
        return p

    @classmethod
    def letter(cls, x, k, c):
        p = cls.one(k, c)
        if x > 0:
            p.coeffs[1][(x,)] = 1
        else:
            for d in range(1, c):
                p.coeffs[d][(-x,) * d] = (-1) ** d
        return p

    def mul(self, other):
        out = DensePoly(self.k, self.c)
        for d1, lvl1 in enumerate(self.coeffs):
            for d2, lvl2 in enumerate(other.coeffs):
                if d1 + d2 >= self.c:
                    continue
                for m1, c1 in lvl1.items():
                    for m2, c2 in lvl2.items():
                        key = m1 + m2
                        out.coeffs[d1 + d2][key] = out.coeffs[d1 + d2].get(key, 0) + c1 * c2
        return out


def dense_embed(w, k, c):
    p = DensePoly.one(k, c)
    for x in w.letters:
        p = p.mul(DensePoly.letter(x, k, c))
    return p


def assert_matches_dense(x, p):
    assert x.k == p.k and x.c == p.c
    for d in range(x.c):
        dense = {m: v for m, v in p.coeffs[d].items() if v}
        sparse = {decode_monomial(m, x.k, d): v for m, v in x.levels[d].items()}
        assert sparse == dense, f"degree {d}: {sparse} != {dense}"


# --- embedding ----------------------------------------------------------------


def test_embed_empty_word_is_one():
    x = embed_word(Word.identity(2), 2, 3)
    assert x.is_identity
    assert x.levels[0] == {0: 1}


def test_embed_commutator_degree_two():
    x = embed_word(parse_word("[a1,a2]", 2), 2, 3)
    assert x.levels[1] == {}
    assert x.levels[2] == {encode_monomial((1, 2), 2): 1, encode_monomial((2, 1), 2): -1}


def test_embed_times_inverse_is_one():
    x = embed_word(parse_word("a1", 2), 2, 4)
    y = embed_word(parse_word("A1", 2), 2, 4)
    assert nil_mul(x, y).is_identity
    assert nil_inv(x) == y


def test_embed_matches_dense_oracle():
    rng = random.Random(31)
    for _ in range(40):
        k = rng.randint(1, 3)
        c = rng.randint(2, 4)
        w = random_word(rng, k, rng.randint(0, 10))
        assert_matches_dense(embed_word(w, k, c), dense_embed(w, k, c))


def test_embed_is_homomorphism():
    rng = random.Random(37)
    for _ in range(100):
        k = rng.randint(2, 4)
        c = rng.randint(2, 5)
        u = random_word(rng, k, rng.randint(0, 12))
        v = random_word(rng, k, rng.randint(0, 12))
        assert nil_mul(embed_word(u, k, c), embed_word(v, k, c)) == embed_word(u * v, k, c)
        assert nil_inv(embed_word(u, k, c)) == embed_word(u.inverse(), k, c)


def test_embed_rejects_bad_context():
    with pytest.raises(ValueError):
        embed_word(Word.identity(2), 2, 1)
    with pytest.raises(ValueError):
        embed_word(Word((3,), 3), 2, 3)
    with pytest.raises(ValueError):
        nil_mul(NilElement.identity(2, 3), NilElement.identity(2, 4))
    with pytest.raises(ValueError):
        nil_mul(NilElement.identity(2, 3), NilElement.identity(3, 3))


def test_nil_pow_matches_repeated_multiplication():
    x = embed_word(parse_word("a1*a2", 2), 2, 4)
    acc = NilElement.identity(2, 4)
    for n in range(5):
        assert nil_pow(x, n) == acc
        acc = nil_mul(acc, x)
    assert nil_pow(x, -3) == nil_inv(nil_pow(x, 3))


def test_witness_round_trip():
    w = parse_word("[a1,a2]*a1^2", 2)
    x = embed_word(w, 2, 4)
    assert x.witness == w
    y = nil_mul(x, nil_inv(x))
    assert y.witness == Word.identity(2)
    assert embed_word(y.witness, 2, 4) == y


# --- weight -------------------------------------------------------------------


def test_weight_examples():
    assert weight(embed_word(parse_word("[a1,a2]", 2), 2, 4)) == 2
    assert weight(embed_word(parse_word("[[a1,a2],a1]", 2), 2, 4)) == 3
    assert weight(embed_word(parse_word("a1", 2), 2, 4)) == 1
    assert weight(NilElement.identity(2, 4)) is None


def test_weight_superadditive_on_commutators():
    rng = random.Random(41)
    for _ in range(60):
        k, c = 2, 5
        u = random_word(rng, k, rng.randint(1, 8))
        v = random_word(rng, k, rng.randint(1, 8))
        xu, xv = embed_word(u, k, c), embed_word(v, k, c)
        wu, wv = weight(xu), weight(xv)
        if wu is None or wv is None:
            continue
        wc = weight(nil_commutator(xu, xv))
        assert wc is None or wc >= min(wu + wv, c)


# --- lie components -----------------------------------------------------------


def test_lie_component_of_commutator():
    x = embed_word(parse_word("[a1,a2]", 2), 2, 3)
    assert lie_component(x, 2) == [0, 1, -1, 0]


def test_lie_component_of_identity_is_zero():
    x = NilElement.identity(2, 4)
    for j in range(1, 4):
        assert lie_component(x, j) == [0] * 2 ** j


def test_lie_component_additive():
    rng = random.Random(43)
    count = 0
    while count < 40:
        u = random_word(rng, 2, rng.randint(1, 8))
        v = random_word(rng, 2, rng.randint(1, 8))
        xu, xv = embed_word(u, 2, 4), embed_word(v, 2, 4)
        wu, wv = weight(xu), weight(xv)
        if wu is None or wv is None or wu != wv:
            continue
        count += 1
        j = wu
        got = lie_component(nil_mul(xu, xv), j) if weight(nil_mul(xu, xv)) in (None, j) else None
        if got is not None:
            assert got == [a + b for a, b in zip(lie_component(xu, j), lie_component(xv, j))]


def test_lie_component_precondition():
    x = embed_word(parse_word("a1", 2), 2, 3)
    with pytest.raises(ValueError):
        lie_component(x, 2)
    with pytest.raises(ValueError):
        lie_component(x, 0)


# --- Lyndon words and Witt ranks ------------------------------------------------


def test_lyndon_words_examples():
    assert lyndon_words(2, 1) == ((1,), (2,))
    assert lyndon_words(2, 2) == ((1, 2),)
    assert lyndon_words(2, 3) == ((1, 1, 2), (1, 2, 2))


def test_lyndon_words_against_rotation_oracle():
    # Oracle: a word is Lyndon iff strictly smaller than all proper rotations;
    # enumerate every string.
    for k, j in [(2, 3), (2, 4), (3, 3)]:
        expected = tuple(
            w
            for w in product(range(1, k + 1), repeat=j)
            if all(w < w[i:] + w[:i] for i in range(1, j))
        )
        assert lyndon_words(k, j) == expected


def test_witt_rank_examples():
    assert witt_rank(2, 2) == 1
    assert witt_rank(2, 3) == 2
    assert witt_rank(4, 2) == 6
    assert witt_rank(4, 3) == 20
    assert witt_rank(1, 1) == 1 and witt_rank(1, 2) == 0 and witt_rank(1, 3) == 0


def test_lyndon_count_equals_witt_rank():
    for k in range(1, 4):
        for j in range(1, 7):
            assert len(lyndon_words(k, j)) == witt_rank(k, j)


# --- bracket expansions ---------------------------------------------------------


def test_bracket_degree_two():
    assert bracket_word((1, 2), 2) == parse_word("[a1,a2]", 2)
    v = bracket_vector((1, 2), 2)
    assert v[encode_monomial((1, 2), 2)] == 1
    assert v[encode_monomial((2, 1), 2)] == -1
    assert sum(map(abs, v)) == 2


def test_bracket_112_standard_factorization():
    # 112 factors as 1 . 12, so the bracketing is [a1, [a1, a2]]
    expected = commutator(Word.generator(1, 2), parse_word("[a1,a2]", 2))
    assert bracket_word((1, 1, 2), 2) == expected
    v = bracket_vector((1, 1, 2), 2)
    assert v[encode_monomial((1, 1, 2), 2)] == 1
    assert v[encode_monomial((1, 2, 1), 2)] == -2
    assert v[encode_monomial((2, 1, 1), 2)] == 1


def test_bracket_anchor_coefficient_and_triangularity():
    for k, jmax in [(2, 6), (3, 4), (4, 3)]:
        for j in range(1, jmax + 1):
            for word in lyndon_words(k, j):
                v = bracket_vector(word, k)
                anchor = encode_monomial(word, k)
                assert v[anchor] == 1
                assert all(m >= anchor for m, coeff in enumerate(v) if coeff)


def test_bracket_word_embeds_to_bracket_vector():
    # Ties the group side to the Lie side: the lowest-degree component of the
    # embedded commutator word is exactly the bracket expansion.
    for k, jmax in [(2, 5), (3, 3)]:
        for j in range(1, jmax + 1):
            for word in lyndon_words(k, j):
                x = embed_word(bracket_word(word, k), k, j + 1)
                assert weight(x) == j or (j == 1 and weight(x) == 1)
                assert lie_component(x, j) == bracket_vector(word, k)


def test_bracket_rejects_non_lyndon():
    assert not is_lyndon((2, 1))
    with pytest.raises(ValueError):
        bracket_word((2, 1), 2)
    with pytest.raises(ValueError):
        bracket_vector((1, 2, 1, 2), 2)


# --- Lyndon coordinates -----------------------------------------------------------


def test_to_lyndon_coords_unit_vectors():
    for word in lyndon_words(2, 3):
        coords = to_lyndon_coords(bracket_vector(word, 2), 2, 3)
        expected = [1 if w == word else 0 for w in lyndon_words(2, 3)]
        assert coords == expected
    assert to_lyndon_coords([0] * 8, 2, 3) == [0, 0]


def test_to_lyndon_coords_nested_commutator():
    # [[x1,x2],x1] = -[x1,[x1,x2]], so coordinates over ([112], [122]) are (-1, 0)
    x = embed_word(parse_word("[[a1,a2],a1]", 2), 2, 4)
    assert to_lyndon_coords(lie_component(x, 3), 2, 3) == [-1, 0]


def test_to_lyndon_coords_rejects_non_lie_vector():
    v = [0] * 4
    v[encode_monomial((1, 1), 2)] = 1  # x1*x1 alone is not a Lie element
    with pytest.raises(ValueError):
        to_lyndon_coords(v, 2, 2)


def test_to_lyndon_coords_random_combinations():
    rng = random.Random(47)
    basis = lyndon_basis(3, 3)
    for _ in range(30):
        coeffs = [rng.randint(-5, 5) for _ in basis]
        v = [0] * 27
        for coeff, datum in zip(coeffs, basis):
            for m, val in enumerate(datum.vector):
                v[m] += coeff * val
        assert to_lyndon_coords(v, 3, 3) == coeffs


# --- Mal'cev coordinates ------------------------------------------------------------


def test_malcev_identity_and_generator():
    assert malcev_coordinates(NilElement.identity(2, 4)).exponents == (0,) * 5
    x = embed_word(parse_word("a1", 2), 2, 4)
    coords = malcev_coordinates(x)
    assert coords.exponents[0] == 1
    assert all(e == 0 for e in coords.exponents[1:])


def test_malcev_layout_length():
    layout = malcev_layout(2, 4)
    assert [w for _, w in layout] == [(1,), (2,), (1, 2), (1, 1, 2), (1, 2, 2)]


def test_malcev_round_trip():
    rng = random.Random(53)
    for _ in range(60):
        w = random_word(rng, 2, rng.randint(0, 10))
        x = embed_word(w, 2, 4)
        coords = malcev_coordinates(x)
        assert from_malcev(coords) == x


def test_malcev_bracket_multiplication_touches_only_deeper_positions():
    rng = random.Random(59)
    layout = malcev_layout(2, 5)
    for _ in range(20):
        w = random_word(rng, 2, rng.randint(0, 8))
        x = embed_word(w, 2, 5)
        for word in [(1, 2), (1, 1, 2)]:
            y = nil_mul(x, embed_word(bracket_word(word, 2), 2, 5))
            cx = malcev_coordinates(x).exponents
            cy = malcev_coordinates(y).exponents
            for (j, _), a, b in zip(layout, cx, cy):
                if j < len(word):
                    assert a == b
