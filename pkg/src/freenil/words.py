"""Free-group words: parsing, reduction, commutator calculus, endomorphisms.

A word is a freely reduced sequence of signed 1-based generator indices:
``3`` stands for the generator ``a3`` and ``-3`` for its inverse ``A3``.

Conventions, used consistently across the whole package:

    commutator    [u, v] = u * v * u^-1 * v^-1
    conjugation   u ^ v  = v^-1 * u * v

The commutator convention matters: under the opposite convention
``u^-1 v^-1 u v`` the word ``w * [w, g w g^-1]`` collapses to a plain
conjugate of ``w``, which degenerates every length/cyclic-reduction
hypothesis built from it.  See README for the full discussion.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    """Word-grammar syntax error, carrying the 0-based offset in ``position``."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _free_reduce(letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class Word:
    """A freely reduced word over the rank-``rank`` free group.

    Words are immutable values; reduction happens at construction.

    >>> Word((1, 2, -2, 3), 3)
    a1*a3
    >>> Word((1, 2), 2) * Word((-2, -1), 2)
    1
    """

    __slots__ = ("letters", "rank")

    def __init__(self, letters, rank: int):
        if rank < 0:
            raise ValueError(f"alphabet rank must be nonnegative, got {rank}")
        reduced = _free_reduce(letters)
        for x in reduced:
            if not isinstance(x, int) or x == 0:
                raise ValueError(f"letters must be nonzero integers, got {x!r}")
            if abs(x) > rank:
                raise ValueError(f"generator index {abs(x)} exceeds alphabet rank {rank}")
        object.__setattr__(self, "letters", reduced)
        object.__setattr__(self, "rank", rank)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def identity(cls, rank: int) -> Word:
        return cls((), rank)

    @classmethod
    def generator(cls, index: int, rank: int) -> Word:
        return cls((index,), rank)

    def __mul__(self, other: Word) -> Word:
        if self.rank != other.rank:
            raise ValueError(f"alphabet rank mismatch: {self.rank} vs {other.rank}")
        return Word(self.letters + other.letters, self.rank)

    def inverse(self) -> Word:
        return Word(tuple(-x for x in reversed(self.letters)), self.rank)

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        out = Word.identity(self.rank)
        for _ in range(abs(n)):
            out = out * base
        return out

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Word)
            and self.letters == other.letters
            and self.rank == other.rank
        )

    def __hash__(self) -> int:
        return hash((self.letters, self.rank))

    def __repr__(self) -> str:
        return format_word(self)

    def exponent_sum(self, index: int) -> int:
        """Net exponent of generator ``index`` (occurrences minus inverses)."""
        return sum(1 if x == index else -1 if x == -index else 0 for x in self.letters)

    def abelianization(self) -> tuple[int, ...]:
        return tuple(self.exponent_sum(i) for i in range(1, self.rank + 1))

    @property
    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]


def free_reduce(letters, rank: int) -> Word:
    """Freely reduce a raw letter sequence into a :class:`Word`."""
    return Word(tuple(letters), rank)


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u v u^-1 v^-1."""
    return u * v * u.inverse() * v.inverse()


def conjugate(u: Word, v: Word) -> Word:
    """u^v = v^-1 u v."""
    return v.inverse() * u * v


def word_length(w: Word) -> int:
    return len(w.letters)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w = conjugator * core * conjugator^-1`` with ``core`` cyclically reduced.

    >>> cyclic_reduce(Word((1, 2, 3, -2, -3, -1), 3))
    (a2*a3*A2*A3, a1)
    """
    letters = w.letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    core = Word(letters[i:j], w.rank)
    conjugator = Word(letters[:i], w.rank)
    return core, conjugator


def cyclic_length(w: Word) -> int:
    return len(cyclic_reduce(w)[0])


def surface_relator(g: int) -> Word:
    """The genus-``g`` surface relator [a1,a2]...[a_{2g-1},a_{2g}] over rank 2g.

    >>> surface_relator(1)
    a1*a2*A1*A2
    """
    if g < 1:
        raise ValueError(f"genus must be at least 1, got {g}")
    rank = 2 * g
    w = Word.identity(rank)
    for i in range(1, rank, 2):
        w = w * commutator(Word.generator(i, rank), Word.generator(i + 1, rank))
    return w


def is_proper_power(w: Word) -> tuple[Word, int] | None:
    """Return ``(root, n)`` with ``w = root^n`` and ``n >= 2`` maximal, else None.

    A cyclically reduced word is a proper power iff it is a literal one, so the
    test is a periodicity scan of the cyclic core.
    """
    if not w:
        raise ValueError("the empty word is excluded from proper-power testing")
    core, conj = cyclic_reduce(w)
    n = len(core)
    for d in range(1, n // 2 + 1):
        if n % d:
            continue
        if core.letters == core.letters[:d] * (n // d):
            root = conj * Word(core.letters[:d], w.rank) * conj.inverse()
            return root, n // d
    return None


# --- endomorphisms ----------------------------------------------------------


class Endomorphism:
    """An endomorphism of the rank-``k`` free group, given by generator images."""

    __slots__ = ("rank", "images")

    def __init__(self, images):
        images = tuple(images)
        if not images:
            raise ValueError("an endomorphism needs at least one generator image")
        rank = len(images)
        for im in images:
            if not isinstance(im, Word):
                raise TypeError(f"generator images must be Words, got {type(im).__name__}")
            if im.rank != rank:
                raise ValueError(
                    f"image alphabet rank {im.rank} differs from generator count {rank}"
                )
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Endomorphism is immutable")

    @classmethod
    def identity(cls, rank: int) -> Endomorphism:
        return cls(Word.generator(i, rank) for i in range(1, rank + 1))

    def __call__(self, w: Word) -> Word:
        return apply_endomorphism(self, w)

    def __repr__(self) -> str:
        ims = ", ".join(f"a{i + 1} -> {im!r}" for i, im in enumerate(self.images))
        return f"<endomorphism {ims}>"


def apply_endomorphism(e: Endomorphism, w: Word) -> Word:
    """Substitute generator images letterwise and freely reduce."""
    if w.rank != e.rank:
        raise ValueError(f"alphabet rank mismatch: word {w.rank}, endomorphism {e.rank}")
    out: list[int] = []
    for x in w.letters:
        image = e.images[abs(x) - 1]
        out.extend(image.letters if x > 0 else image.inverse().letters)
    return Word(tuple(out), e.rank)


# --- relator hypothesis checks ---------------------------------------------


@dataclass(frozen=True)
class Type2Report:
    """Outcome of the length/cyclic-reduction hypothesis for w*[w, g w g^-1]."""

    k: int
    gamma: Word
    base: Word
    relator: Word
    relator_cyclically_reduced: bool
    relator_length: int
    base_length: int
    passed: bool


@dataclass(frozen=True)
class Type3Report:
    """Outcome of the hypothesis for the twisted relator [a1*delta, a2]."""

    k: int
    delta: Word
    commutator_word: Word
    relator: Word
    cyclically_reduced: bool
    length: int
    base_length: int
    delta_in_commutator_subgroup: bool
    passed: bool


def _require_even_rank(k: int) -> None:
    if k <= 2 or k % 2:
        raise ValueError(f"rank must be even and greater than 2, got {k}")


def check_hypothesis_type2(k: int, gamma: Word) -> Type2Report:
    """Check that w*[w, gamma w gamma^-1] is cyclically reduced with length != |w|."""
    _require_even_rank(k)
    if gamma.rank != k:
        raise ValueError(f"gamma has alphabet rank {gamma.rank}, expected {k}")
    w = surface_relator(k // 2)
    twisted = gamma * w * gamma.inverse()
    relator = w * commutator(w, twisted)
    cyc = relator.is_cyclically_reduced
    passed = cyc and len(relator) != len(w)
    return Type2Report(
        k=k,
        gamma=gamma,
        base=w,
        relator=relator,
        relator_cyclically_reduced=cyc,
        relator_length=len(relator),
        base_length=len(w),
        passed=passed,
    )


def check_hypothesis_type3(k: int, delta: Word) -> Type3Report:
    """Check [a1*delta, a2]: cyclically reduced, length != 4, delta a commutator element."""
    _require_even_rank(k)
    if delta.rank != k:
        raise ValueError(f"delta has alphabet rank {delta.rank}, expected {k}")
    a1 = Word.generator(1, k)
    a2 = Word.generator(2, k)
    head = commutator(a1 * delta, a2)
    relator = head
    for i in range(3, k, 2):
        relator = relator * commutator(Word.generator(i, k), Word.generator(i + 1, k))
    cyc = head.is_cyclically_reduced
    in_commutator = all(s == 0 for s in delta.abelianization())
    passed = cyc and len(head) != 4 and in_commutator
    return Type3Report(
        k=k,
        delta=delta,
        commutator_word=head,
        relator=relator,
        cyclically_reduced=cyc,
        length=len(head),
        base_length=4,
        delta_in_commutator_subgroup=in_commutator,
        passed=passed,
    )


# --- grammar ----------------------------------------------------------------
#
# expr      = factor , { [ "*" ] , factor } ;
# factor    = atom , { "^" , exponent } ;
# exponent  = integer | atom ;              integer power, or conjugation u^v
# atom      = generator | "1" | "(" , expr , ")" | "[" , expr , "," , expr , "]" ;
# generator = ( "a" | "A" ) , digits ;      A<i> is the inverse of a<i>
# integer   = [ "-" | "+" ] , digits ;


class _Parser:
    def __init__(self, text: str, k: int):
        self.text = text
        self.k = k
        self.pos = 0

    def error(self, message: str, position: int | None = None):
        raise ParseError(message, self.pos if position is None else position)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Word:
        self.skip_ws()
        if self.pos == len(self.text):
            self.error("empty expression")
        w = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected character {self.peek()!r}")
        return w

    def expr(self) -> Word:
        w = self.factor()
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                w = w * self.factor()
            elif ch and (ch.isalpha() or ch in "([1"):
                w = w * self.factor()
            else:
                return w

    def factor(self) -> Word:
        w = self.atom()
        while True:
            self.skip_ws()
            if self.peek() != "^":
                return w
            self.pos += 1
            self.skip_ws()
            ch = self.peek()
            if ch in "+-" or ch.isdigit():
                w = w ** self.integer()
            else:
                v = self.atom()
                w = conjugate(w, v)

    def integer(self) -> int:
        start = self.pos
        if self.peek() in "+-":
            self.pos += 1
        digits = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if self.pos == digits:
            self.error("expected an integer exponent", start)
        return int(self.text[start:self.pos])

    def atom(self) -> Word:
        self.skip_ws()
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            w = self.expr()
            self.expect(")")
            return w
        if ch == "[":
            self.pos += 1
            u = self.expr()
            self.expect(",")
            v = self.expr()
            self.expect("]")
            return commutator(u, v)
        if ch == "1":
            self.pos += 1
            return Word.identity(self.k)
        if ch.isalpha():
            if ch not in "aA":
                self.error(f"unknown generator letter {ch!r}")
            start = self.pos
            self.pos += 1
            digits = self.pos
            while self.peek().isdigit():
                self.pos += 1
            if self.pos == digits:
                self.error("expected a generator index", start)
            index = int(self.text[digits:self.pos])
            if not 1 <= index <= self.k:
                self.error(f"generator index {index} outside 1..{self.k}", start)
            return Word((index if ch == "a" else -index,), self.k)
        self.error("expected a generator, '1', '(' or '['")


def parse_word(text: str, k: int) -> Word:
    """Parse a word expression over the rank-``k`` alphabet ``a1..a<k>``.

    >>> parse_word("[a1,a2]", 2)
    a1*a2*A1*A2
    >>> parse_word("a1*A1", 2)
    1
    >>> parse_word("a1^-2", 2)
    A1^2
    """
    if k < 1:
        raise ValueError(f"alphabet rank must be at least 1, got {k}")
    return _Parser(text, k).parse()


def format_word(w: Word) -> str:
    """Render a word in the same grammar ``parse_word`` accepts ('1' if empty)."""
    if not w.letters:
        return "1"
    parts = []
    letters = w.letters
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        sym = f"a{letters[i]}" if letters[i] > 0 else f"A{-letters[i]}"
        parts.append(sym if j - i == 1 else f"{sym}^{j - i}")
        i = j
    return "*".join(parts)
