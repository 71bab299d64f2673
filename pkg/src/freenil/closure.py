"""Normal closures inside free nilpotent quotients.

The closure of a relator r in the class-c quotient is represented by one
integer lattice per degree j < c: the degree-j layer M_j of the graded
ideal the closure generates, in ambient monomial coordinates.  A worklist
seeds with the embedded relator and keeps commutating inserted elements
with the generators; an element whose layer component already lies in M_j
is divided by the matching witness product, which strictly raises its
weight, and is requeued.  Integer lattices satisfy the ascending chain
condition, so the process terminates, and a final re-pass over all stored
witnesses confirms saturation.

Each lattice runs with transform tracking (see intlat.EchelonLattice), so
basis rows stay explicit integer combinations of pristine witness elements
and every membership verdict ships a reconstructible trace.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from freenil.budget import Deadline
from freenil.intlat import EchelonLattice, HermiteBasis, hnf, quotient_invariants, snf
from freenil.magnus import (
    NilElement,
    embed_word,
    lie_component,
    nil_commutator,
    nil_inv,
    nil_mul,
    nil_pow,
    to_lyndon_coords,
    witt_rank,
)
from freenil.words import Endomorphism, Word, apply_endomorphism, surface_relator


class LayerLattice:
    """Degree-``j`` layer lattice of a normal closure, with witnesses."""

    def __init__(self, k: int, c: int, degree: int):
        self.k = k
        self.c = c
        self.degree = degree
        self.ech = EchelonLattice(k ** degree, track=True)
        self.witnesses: list[NilElement] = []

    @property
    def rank(self) -> int:
        return self.ech.rank

    def reduce(self, vec) -> tuple[list[int], list[int] | None]:
        """(remainder, witness coefficients); coefficients only when remainder is 0."""
        rem, row_coeffs = self.ech.reduce(vec)
        if any(rem):
            return rem, None
        return rem, self.ech.witness_coefficients(row_coeffs)

    def insert(self, vec, witness: NilElement) -> tuple[bool, list[int] | None]:
        self.witnesses.append(witness)
        return self.ech.add(vec)

    def witness_product(self, coeffs) -> NilElement:
        out = NilElement.identity(self.k, self.c)
        for w, e in zip(self.witnesses, coeffs):
            if e:
                out = nil_mul(out, nil_pow(w, e))
        return out

    def row_witness(self, i: int) -> NilElement:
        """A closure element whose degree-``degree`` component is basis row ``i``."""
        return self.witness_product(self.ech.trans[i])

    def hermite(self) -> HermiteBasis:
        return self.ech.hermite()


@dataclass
class NormalClosureData:
    """Layer lattices of <<r>> inside the class-``c`` quotient, with witnesses."""

    relator: Word
    k: int
    c: int
    layers: dict[int, LayerLattice] = field(repr=False)

    def layer_ranks(self) -> dict[int, int]:
        return {j: layer.rank for j, layer in self.layers.items()}


@dataclass(frozen=True)
class Membership:
    """Membership verdict with its reduction trace.

    ``trace`` lists, per visited layer, the witness coefficients divided off;
    multiplying those witness powers back together reproduces the element,
    which is what certifies a positive verdict.
    """

    member: bool
    obstructed_layer: int | None
    trace: tuple[tuple[int, tuple[int, ...]], ...]

    def __bool__(self) -> bool:
        return self.member


_closure_cache: dict[tuple, NormalClosureData] = {}


def normal_closure(
    r: Word, k: int, c: int, deadline: Deadline | None = None
) -> NormalClosureData:
    """Compute the layer lattices of the normal closure of ``r`` in F_{k,c}."""
    if not r:
        raise ValueError("the normal closure of the empty relator is trivial")
    if c < 2:
        raise ValueError(f"truncation class must be at least 2, got {c}")
    key = (r.letters, k, c)
    cached = _closure_cache.get(key)
    if cached is not None:
        return cached
    deadline = deadline or Deadline(None)

    layers = {j: LayerLattice(k, c, j) for j in range(1, c)}
    gens = [embed_word(Word.generator(s * i, k), k, c) for i in range(1, k + 1) for s in (1, -1)]
    queue: deque[NilElement] = deque([embed_word(r, k, c)])

    def process(u: NilElement) -> bool:
        # returns True when the lattices changed
        j = u.weight()
        if j is None:
            return False
        layer = layers[j]
        vec = lie_component(u, j)
        rem, coeffs = layer.reduce(vec)
        if coeffs is not None:
            # layer component already present: divide off, requeue deeper part
            carried = nil_mul(u, nil_inv(layer.witness_product(coeffs)))
            queue.append(carried)
            return False
        changed, relation = layer.insert(vec, u)
        if relation is not None:
            queue.append(layer.witness_product(relation))
        for g in gens:
            queue.append(nil_commutator(u, g))
        return changed

    while True:
        while queue:
            deadline.check()
            process(queue.popleft())
        # saturation re-pass: feeding every stored witness back through the
        # generator commutators must not change anything
        stable = True
        for layer in layers.values():
            for w in list(layer.witnesses):
                for g in gens:
                    deadline.check()
                    if process(nil_commutator(w, g)):
                        stable = False
        while queue:
            deadline.check()
            if process(queue.popleft()):
                stable = False
        if stable:
            break

    data = NormalClosureData(relator=r, k=k, c=c, layers=layers)
    _closure_cache[key] = data
    return data


def member_element(x: NilElement, data: NormalClosureData) -> Membership:
    """Decide membership of an embedded element in the closure."""
    if x.k != data.k or x.c != data.c:
        raise ValueError(
            f"context mismatch: element (k={x.k}, c={x.c}), closure (k={data.k}, c={data.c})"
        )
    trace: list[tuple[int, tuple[int, ...]]] = []
    u = x
    while True:
        j = u.weight()
        if j is None:
            return Membership(member=True, obstructed_layer=None, trace=tuple(trace))
        rem, coeffs = data.layers[j].reduce(lie_component(u, j))
        if coeffs is None:
            return Membership(member=False, obstructed_layer=j, trace=tuple(trace))
        trace.append((j, tuple(coeffs)))
        u = nil_mul(u, nil_inv(data.layers[j].witness_product(coeffs)))


def member(x: Word, data: NormalClosureData) -> Membership:
    """Decide whether the word lies in the closure inside F_{k,c}."""
    return member_element(embed_word(x, data.k, data.c), data)


def closures_equal(
    r1: Word, r2: Word, k: int, c: int, deadline: Deadline | None = None
) -> bool:
    """Whether <<r1>> and <<r2>> coincide inside F_{k,c}.

    Normal subgroups are determined by generator membership, so mutual
    membership of the relators decides equality.
    """
    if not r1 or not r2:
        raise ValueError("closure equality needs nontrivial relators")
    n1 = normal_closure(r1, k, c, deadline)
    n2 = normal_closure(r2, k, c, deadline)
    return bool(member(r1, n2)) and bool(member(r2, n1))


# --- layer invariants ---------------------------------------------------------


@dataclass(frozen=True)
class LayerData:
    degree: int
    free_rank: int
    factors: tuple[int, ...]
    witt: int

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(f for f in self.factors if f > 1)


@dataclass(frozen=True)
class LayerInvariants:
    """Per-degree structure of the lower-central layers of F/<<r>>."""

    k: int
    c: int
    layers: tuple[LayerData, ...]

    @property
    def torsion_free(self) -> bool:
        return all(not layer.torsion for layer in self.layers)

    def free_ranks(self) -> tuple[int, ...]:
        return tuple(layer.free_rank for layer in self.layers)


def layer_invariants(data: NormalClosureData) -> LayerInvariants:
    """Quotient invariants L_j / M_j per degree, in Lyndon coordinates.

    This is the abelian structure of the degree-j lower-central layer of the
    one-relator quotient, since each layer of the quotient group is the image
    of the corresponding free layer.
    """
    out = []
    for j in range(1, data.c):
        rank = witt_rank(data.k, j)
        rows = [
            to_lyndon_coords(list(row), data.k, j)
            for row in data.layers[j].hermite().rows
        ]
        ambient = hnf([[1 if a == b else 0 for b in range(rank)] for a in range(rank)], n=rank)
        free_rank, factors = quotient_invariants(ambient, hnf(rows, n=rank))
        out.append(LayerData(degree=j, free_rank=free_rank, factors=factors, witt=rank))
    return LayerInvariants(k=data.k, c=data.c, layers=tuple(out))


def lcs_rank_table(r: Word, k: int, c: int, deadline: Deadline | None = None) -> LayerInvariants:
    """Lower-central layer table (free rank, torsion, free-group baseline)."""
    return layer_invariants(normal_closure(r, k, c, deadline))


# --- endomorphism certificates --------------------------------------------------


def abelianization_matrix(e: Endomorphism) -> list[list[int]]:
    """Row i = exponent sums of the image of generator i."""
    return [list(im.abelianization()) for im in e.images]


def is_unimodular_endomorphism(e: Endomorphism) -> bool:
    form = snf(abelianization_matrix(e))
    return form.rank == e.rank and all(f == 1 for f in form.invariant_factors)


@dataclass(frozen=True)
class ParasurfaceReport:
    """Certificate that F/<<r>> shares lower-central quotients with the
    genus-``genus`` surface group through class ``c``.

    The certificate goes through the explicit endomorphism: a unimodular
    abelianization makes it an automorphism of each nilpotent quotient
    (generation plus Hopficity), and closure equality of the mapped surface
    relator with ``r`` then transports the quotient isomorphism.  The layer
    comparison is a redundant cross-check, reported but never the sole
    grounds for an isomorphism claim.
    """

    genus: int
    c: int
    relator: Word
    mapped_relator: Word
    ab_matrix: list[list[int]]
    unimodular: bool
    closure_equal: bool
    layers_relator: LayerInvariants
    layers_surface: LayerInvariants
    layers_match: bool
    torsion_free: bool

    @property
    def passed(self) -> bool:
        return self.unimodular and self.closure_equal and self.layers_match


def parasurface_certificate(
    r: Word, e: Endomorphism, g: int, c: int, deadline: Deadline | None = None
) -> ParasurfaceReport:
    if r.rank != 2 * g or e.rank != 2 * g:
        raise ValueError(
            f"alphabet mismatch: relator rank {r.rank}, endomorphism rank {e.rank}, "
            f"expected {2 * g}"
        )
    w = surface_relator(g)
    mapped = apply_endomorphism(e, w)
    ab = abelianization_matrix(e)
    unimodular = is_unimodular_endomorphism(e)
    equal = closures_equal(mapped, r, 2 * g, c, deadline)
    layers_r = layer_invariants(normal_closure(r, 2 * g, c, deadline))
    layers_w = layer_invariants(normal_closure(w, 2 * g, c, deadline))
    match = layers_r.layers == layers_w.layers
    return ParasurfaceReport(
        genus=g,
        c=c,
        relator=r,
        mapped_relator=mapped,
        ab_matrix=ab,
        unimodular=unimodular,
        closure_equal=equal,
        layers_relator=layers_r,
        layers_surface=layers_w,
        layers_match=match,
        torsion_free=layers_r.torsion_free and layers_w.torsion_free,
    )
