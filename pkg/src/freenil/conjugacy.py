"""Conjugacy decisions in free nilpotent quotients by layerwise lifting.

Write x^t for t^-1 x t.  The loop maintains a conjugator t with x^t = y
below the current degree j, plus an approximation of the centralizer: a
generating list of elements u whose correction c_u = [x^t^-1, u^-1]
(so that x^{tu} = x^t * c_u) has weight at least j.  The correction is
additive on the layer, so the degree-j defect is repaired by an exact
integer solve over the generator images; an unsolvable system is a
certified obstruction at that layer.  The kernel of the image map,
together with the bracket elements whose corrections start deeper, yields
the next level's generators.

Every Conjugate verdict re-verifies its witness through the embedding
before being returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from freenil.budget import Deadline
from freenil.closure import closures_equal
from freenil.intlat import kernel_basis, solve_in_image
from freenil.magnus import (
    NilElement,
    bracket_word,
    embed_word,
    lie_component,
    lyndon_words,
    nil_inv,
    nil_mul,
    nil_pow,
    weight,
)
from freenil.words import Word


@dataclass(frozen=True)
class ConjugacyVerdict:
    """Equal | Conjugate(witness) | NotConjugate(obstructed layer)."""

    kind: str  # "equal" | "conjugate" | "not_conjugate"
    witness: Word | None = None
    obstructed_layer: int | None = None

    @property
    def is_conjugate(self) -> bool:
        return self.kind in ("equal", "conjugate")

    def __repr__(self) -> str:
        if self.kind == "equal":
            return "Equal"
        if self.kind == "conjugate":
            return f"Conjugate({self.witness!r})"
        return f"NotConjugate(layer {self.obstructed_layer})"


@dataclass
class CentralizerApprox:
    """Level-``level`` centralizer data: elements whose corrections against
    the current conjugated x start at weight >= level."""

    level: int
    generators: list[tuple[Word, NilElement, int]]  # (word, series, weight)


def _correction(xt: NilElement, u: NilElement, upto: int) -> NilElement:
    # c_u with x^u = x * c_u, i.e. [x^-1, u^-1], truncated to class ``upto``
    xt = xt.truncated(upto)
    u = u.truncated(upto)
    return nil_mul(nil_mul(nil_inv(xt), nil_inv(u)), nil_mul(xt, u))


def _initial_generators(k: int, c: int) -> list[tuple[Word, NilElement, int]]:
    gens = []
    for i in range(1, k + 1):
        w = Word.generator(i, k)
        gens.append((w, embed_word(w, k, c), 1))
    for d in range(2, c):
        for word in lyndon_words(k, d):
            w = bracket_word(word, k)
            gens.append((w, embed_word(w, k, c), d))
    return gens


def decide_conjugacy(
    x: Word, y: Word, k: int, c: int, deadline: Deadline | None = None
) -> ConjugacyVerdict:
    """Decide conjugacy of the images of ``x`` and ``y`` in F_{k,c}."""
    if c < 2:
        raise ValueError(f"truncation class must be at least 2, got {c}")
    deadline = deadline or Deadline(None)
    big_x = embed_word(x, k, c)
    big_y = embed_word(y, k, c)
    if big_x == big_y:
        return ConjugacyVerdict(kind="equal")
    wx = weight(big_x)
    if wx is None or weight(big_y) is None:
        # one side trivial: conjugation cannot help
        defect = nil_mul(big_x, nil_inv(big_y))
        return ConjugacyVerdict(kind="not_conjugate", obstructed_layer=weight(defect))

    t = Word.identity(k)
    xt = big_x
    approx = CentralizerApprox(level=1, generators=_initial_generators(k, c))

    for j in range(1, c):
        deadline.check()
        defect = nil_mul(xt, nil_inv(big_y))
        if defect.is_identity:
            break
        jd = weight(defect)

        def images_of(active):
            out = []
            for _, series, _ in active:
                corr = _correction(xt, series, j + 1)
                wc = weight(corr)
                if wc is not None and wc < j:
                    raise AssertionError(
                        f"centralizer generator disturbs settled layer {wc} < {j}"
                    )
                out.append(lie_component(corr, j))
            return out

        active, dormant = [], []
        for gen in approx.generators:
            (active if wx + gen[2] <= j else dormant).append(gen)

        if jd == j:
            kappa = lie_component(defect, j)
            target = [-v for v in kappa]
            solution = solve_in_image(images_of(active), target)
            if solution is None:
                return ConjugacyVerdict(kind="not_conjugate", obstructed_layer=j)
            adj_word = Word.identity(k)
            adj = NilElement.identity(k, c)
            for (gw, gs, _), e in zip(active, solution):
                if e:
                    adj_word = adj_word * gw ** e
                    adj = nil_mul(adj, nil_pow(gs, e))
            t = t * adj_word
            xt = nil_mul(nil_mul(nil_inv(adj), xt), adj)
            new_defect_weight = weight(nil_mul(xt, nil_inv(big_y)))
            if new_defect_weight is not None and new_defect_weight <= j:
                raise AssertionError("layer defect survived its own repair")

        if j + 1 < c and active:
            # kernel of the layer action gives the next level's combinations
            images = images_of(active)
            kernel = kernel_basis(images)
            new_gens = []
            for row in kernel.rows:
                word = Word.identity(k)
                series = NilElement.identity(k, c)
                for (gw, gs, _), e in zip(active, row):
                    if e:
                        word = word * gw ** e
                        series = nil_mul(series, nil_pow(gs, e))
                gw_weight = weight(series)
                if gw_weight is not None:
                    new_gens.append((word, series, gw_weight))
            approx = CentralizerApprox(level=j + 1, generators=new_gens + dormant)

    defect = nil_mul(xt, nil_inv(big_y))
    if not defect.is_identity:
        return ConjugacyVerdict(kind="not_conjugate", obstructed_layer=weight(defect))
    verified = embed_word(t, k, c)
    if nil_mul(nil_mul(nil_inv(verified), big_x), verified) != big_y:
        raise AssertionError("conjugacy witness failed re-verification")
    return ConjugacyVerdict(kind="conjugate", witness=t)


@dataclass(frozen=True)
class ScanRow:
    c: int
    verdict: ConjugacyVerdict
    closure_equal: bool | None
    duration_ms: float


def conjugacy_scan(
    x: Word,
    y: Word,
    k: int,
    c_min: int,
    c_max: int,
    deadline: Deadline | None = None,
) -> list[ScanRow]:
    """Per-class conjugacy verdicts, with closure equality alongside.

    The closure column exhibits the contrast the scan exists for: closures
    can agree at every class while the elements themselves stop being
    conjugate.
    """
    if not 2 <= c_min <= c_max:
        raise ValueError(f"need 2 <= c_min <= c_max, got {c_min}..{c_max}")
    deadline = deadline or Deadline(None)
    rows = []
    for c in range(c_min, c_max + 1):
        start = time.monotonic()
        verdict = decide_conjugacy(x, y, k, c, deadline)
        equal = closures_equal(x, y, k, c, deadline) if x and y else None
        rows.append(
            ScanRow(
                c=c,
                verdict=verdict,
                closure_equal=equal,
                duration_ms=(time.monotonic() - start) * 1000.0,
            )
        )
    return rows
