"""Exact integer matrix and lattice arithmetic.

Everything runs on plain Python ints (arbitrary precision); coefficients in
Magnus expansions and Hermite intermediates grow quickly, so fixed-width
arithmetic is never used.  Matrices are lists of row lists.

Row lattices are kept in Hermite echelon form with one convention repo-wide:
pivot columns strictly increasing, pivots positive, entries above a pivot
reduced into [0, pivot).  Column order is whatever ambient coordinate order
the caller supplies, which fixes canonical forms everywhere.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass

IntMatrix = list  # list[list[int]], rectangular

_SNF_VERIFY_LIMIT = 4_000_000  # skip the U*A*V recheck above this m*m*n cost


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # g = x*a + y*b with g = gcd(a, b) >= 0
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        return -g, -x, -y
    return g, x, y


def _check_rect(a: IntMatrix) -> tuple[int, int]:
    rows = len(a)
    cols = len(a[0]) if rows else 0
    for row in a:
        if len(row) != cols:
            raise ValueError("matrix is not rectangular")
    return rows, cols


class EchelonLattice:
    """Mutable integer row lattice in echelon form, with optional transform.

    When ``track`` is set, every basis row is maintained as an explicit
    integer combination of the vectors passed to :meth:`add`, and dependent
    adds report the discovered relation.  That is all the machinery needed
    for kernels, preimages, and the witness bookkeeping in the closure code.
    """

    def __init__(self, n: int, track: bool = False):
        self.n = n
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []          # pivot column of rows[i], strictly increasing
        self.track = track
        self.trans: list[list[int]] = []     # rows[i] == trans[i] . added_vectors
        self.added = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _pivot_index(self, col: int) -> int | None:
        # pivots is sorted; linear scan is fine at these sizes
        for i, p in enumerate(self.pivots):
            if p == col:
                return i
            if p > col:
                return None
        return None

    def reduce(self, v) -> tuple[list[int], list[int]]:
        """Reduce ``v`` against the basis: (canonical remainder, row coefficients).

        The remainder is zero iff ``v`` is in the lattice; its entries at
        pivot columns are floor-reduced into [0, pivot).
        """
        if len(v) != self.n:
            raise ValueError(f"dimension mismatch: vector {len(v)}, ambient {self.n}")
        rem = list(v)
        coeffs = [0] * len(self.rows)
        for i, p in enumerate(self.pivots):
            q = rem[p] // self.rows[i][p]
            if q:
                coeffs[i] = q
                row = self.rows[i]
                for j in range(p, self.n):
                    rem[j] -= q * row[j]
        return rem, coeffs

    def contains(self, v) -> bool:
        rem, _ = self.reduce(v)
        return not any(rem)

    def _reduce_row_at_pivot(self, r: int, i: int) -> None:
        # Floor-reduce rows[r] at rows[i]'s pivot into [0, pivot).
        p = self.pivots[i]
        row = self.rows[i]
        q = self.rows[r][p] // row[p]
        if q:
            target = self.rows[r]
            for j in range(p, self.n):
                target[j] -= q * row[j]
            if self.track:
                ti, tr = self.trans[i], self.trans[r]
                for j in range(self.added):
                    tr[j] -= q * ti[j]

    def _normalize_rows_against(self, i: int) -> None:
        # Restore the canonical form after rows[i] changed.  Rows below i have
        # larger pivots and stay zero at pivot i, so only rows r <= i need
        # work; each reduction at a pivot can disturb entries at later pivots,
        # so sweep pivots in ascending order per row.  The q == 0 fast path in
        # _reduce_row_at_pivot keeps untouched pairs cheap.
        for r in range(i + 1):
            for s in range(max(r + 1, i), len(self.rows)):
                self._reduce_row_at_pivot(r, s)

    def add(self, v) -> tuple[bool, list[int] | None]:
        """Add ``v`` to the lattice.

        Returns ``(changed, relation)``.  ``changed`` is False iff ``v`` was
        already in the lattice.  ``relation`` (only with ``track``) is a
        coefficient vector over all added vectors summing to zero whenever the
        elimination drove the working vector to zero; the incoming vector is
        its last coordinate.
        """
        if len(v) != self.n:
            raise ValueError(f"dimension mismatch: vector {len(v)}, ambient {self.n}")
        vec = list(v)
        if self.track:
            for t in self.trans:
                t.append(0)
            tvec = [0] * self.added + [1]
        else:
            tvec = []
        self.added += 1

        changed = False
        col = 0
        while True:
            while col < self.n and not vec[col]:
                col += 1
            if col == self.n:
                relation = tvec if self.track else None
                return changed, relation
            i = self._pivot_index(col)
            if i is None:
                # vec becomes a new basis row
                if vec[col] < 0:
                    vec = [-x for x in vec]
                    tvec = [-x for x in tvec]
                where = len([p for p in self.pivots if p < col])
                self.rows.insert(where, vec)
                if self.track:
                    self.trans.insert(where, tvec)
                insort(self.pivots, col)
                self._normalize_rows_against(where)
                return True, None
            row = self.rows[i]
            a, b = row[col], vec[col]
            if b % a == 0:
                q = b // a
                for j in range(col, self.n):
                    vec[j] -= q * row[j]
                if self.track:
                    ti = self.trans[i]
                    for j in range(self.added):
                        tvec[j] -= q * ti[j]
            else:
                # unimodular 2x2 op: (row, vec) <- (x*row + y*vec, (a/g)*vec - (b/g)*row)
                g, x, y = _xgcd(a, b)
                ag, bg = a // g, b // g
                for j in range(col, self.n):
                    rj, vj = row[j], vec[j]
                    row[j] = x * rj + y * vj
                    vec[j] = ag * vj - bg * rj
                if self.track:
                    ti = self.trans[i]
                    for j in range(self.added):
                        tj, vj = ti[j], tvec[j]
                        ti[j] = x * tj + y * vj
                        tvec[j] = ag * vj - bg * tj
                changed = True
                self._normalize_rows_against(i)
            # both branches zero vec[col] exactly
            col += 1

    def witness_coefficients(self, row_coeffs) -> list[int]:
        """Map coefficients over basis rows to coefficients over added vectors."""
        if not self.track:
            raise ValueError("lattice was built without transform tracking")
        out = [0] * self.added
        for i, c in enumerate(row_coeffs):
            if c:
                ti = self.trans[i]
                for j in range(self.added):
                    out[j] += c * ti[j]
        return out

    def hermite(self) -> HermiteBasis:
        return HermiteBasis(
            n=self.n,
            rows=tuple(tuple(r) for r in self.rows),
            pivots=tuple(self.pivots),
        )


@dataclass(frozen=True)
class HermiteBasis:
    """Canonical Hermite form of an integer row lattice."""

    n: int
    rows: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _echelon(self) -> EchelonLattice:
        e = EchelonLattice(self.n)
        e.rows = [list(r) for r in self.rows]
        e.pivots = list(self.pivots)
        e.added = len(self.rows)
        return e


def hnf(a: IntMatrix, n: int | None = None) -> HermiteBasis:
    """Hermite basis of the lattice spanned by the rows of ``a``.

    Canonical: two inputs spanning the same lattice give identical bases.
    ``n`` is only needed when ``a`` has no rows.
    """
    rows, cols = _check_rect(a)
    if rows:
        n = cols
    elif n is None:
        raise ValueError("ambient dimension required for an empty matrix")
    e = EchelonLattice(n)
    for row in a:
        e.add(row)
    return e.hermite()


def lattice_reduce(basis: HermiteBasis, v) -> tuple[list[int], list[int]]:
    """Canonical remainder of ``v`` modulo the lattice, with basis coefficients."""
    return basis._echelon().reduce(v)


def lattice_insert(basis: HermiteBasis, v) -> tuple[HermiteBasis, bool]:
    """Extend the lattice by ``v``; ``changed`` is False iff ``v`` was a member."""
    e = basis._echelon()
    changed, _ = e.add(v)
    return e.hermite(), changed


def kernel_basis(a: IntMatrix) -> HermiteBasis:
    """Hermite basis of the left integer kernel {x : x . a = 0}."""
    rows, cols = _check_rect(a)
    e = EchelonLattice(cols, track=True)
    relations = []
    for row in a:
        _, relation = e.add(row)
        if relation is not None:
            relations.append(relation + [0] * (rows - len(relation)))
    return hnf(relations, n=rows)


def solve_in_image(generators: IntMatrix, target) -> list[int] | None:
    """Coefficients with coefficients . generators == target, or None."""
    rows, cols = _check_rect(generators)
    if len(target) != cols and rows:
        raise ValueError(f"dimension mismatch: target {len(target)}, generators {cols}")
    e = EchelonLattice(cols if rows else len(target), track=True)
    for row in generators:
        e.add(row)
    rem, coeffs = e.reduce(target)
    if any(rem):
        return None
    sol = e.witness_coefficients(coeffs)
    return sol + [0] * (rows - len(sol))


# --- Smith normal form -------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """U . A . V == D, U and V unimodular, D diagonal with d1 | d2 | ..."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix
    rank: int

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(self.d[i][i] for i in range(self.rank))


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix shapes do not compose")
    return [
        [sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]) if b else 0)]
        for i in range(len(a))
    ]


def snf(a: IntMatrix, verify: bool | None = None) -> SmithForm:
    """Smith normal form with explicit unimodular transforms.

    ``verify=None`` rechecks U.A.V == D exactly unless the matrix is large;
    pass True/False to force.
    """
    rows, cols = _check_rect(a)
    m = [row[:] for row in a]
    u = _identity(rows)
    v = _identity(cols)

    def row_op(i, r, q):  # row_i -= q * row_r
        mi, mr = m[i], m[r]
        for j in range(cols):
            mi[j] -= q * mr[j]
        ui, ur = u[i], u[r]
        for j in range(rows):
            ui[j] -= q * ur[j]

    def col_op(j, c, q):  # col_j -= q * col_c
        for i in range(rows):
            m[i][j] -= q * m[i][c]
        for i in range(cols):
            v[i][j] -= q * v[i][c]

    s = 0
    while True:
        # locate the smallest nonzero entry of the trailing block
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != s:
            m[s], m[bi] = m[bi], m[s]
            u[s], u[bi] = u[bi], u[s]
        if bj != s:
            for row in m:
                row[s], row[bj] = row[bj], row[s]
            for row in v:
                row[s], row[bj] = row[bj], row[s]

        dirty = True
        while dirty:
            dirty = False
            for i in range(s + 1, rows):
                if m[i][s]:
                    row_op(i, s, m[i][s] // m[s][s])
                    if m[i][s]:  # nonzero remainder became the new smaller pivot
                        m[s], m[i] = m[i], m[s]
                        u[s], u[i] = u[i], u[s]
                        dirty = True
            for j in range(s + 1, cols):
                if m[s][j]:
                    col_op(j, s, m[s][j] // m[s][s])
                    if m[s][j]:
                        for row in m:
                            row[s], row[j] = row[j], row[s]
                        for row in v:
                            row[s], row[j] = row[j], row[s]
                        dirty = True
            if not dirty:
                # enforce divisibility of the trailing block by the pivot
                d = m[s][s]
                stop = False
                for i in range(s + 1, rows):
                    for j in range(s + 1, cols):
                        if m[i][j] % d:
                            row_op(s, i, -1)  # add row i to row s, then re-clear
                            dirty = True
                            stop = True
                            break
                    if stop:
                        break
        if m[s][s] < 0:
            for j in range(cols):
                m[s][j] = -m[s][j]
            for j in range(rows):
                u[s][j] = -u[s][j]
        s += 1
        if s == min(rows, cols):
            break

    rank = sum(1 for i in range(min(rows, cols)) if m[i][i])
    form = SmithForm(u=u, d=m, v=v, rank=rank)
    if verify is None:
        verify = rows * rows * cols <= _SNF_VERIFY_LIMIT
    if verify and mat_mul(mat_mul(u, a), v) != m:
        raise ArithmeticError("Smith form verification failed: U.A.V != D")
    return form


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Invariant factors d1 | d2 | ... of the integer matrix ``a``."""
    return snf(a).invariant_factors


def quotient_invariants(ambient: HermiteBasis, sub: HermiteBasis) -> tuple[int, tuple[int, ...]]:
    """Structure of lattice(ambient)/lattice(sub): (free rank, invariant factors).

    ``sub`` must be contained in ``ambient``; each sub row is rewritten in
    ambient coordinates and the Smith form of the coefficient matrix read off.
    """
    if ambient.n != sub.n:
        raise ValueError(f"ambient dimension mismatch: {ambient.n} vs {sub.n}")
    coeff_rows = []
    for row in sub.rows:
        rem, coeffs = lattice_reduce(ambient, list(row))
        if any(rem):
            raise ValueError("sub-lattice is not contained in the ambient lattice")
        coeff_rows.append(coeffs)
    if not coeff_rows:
        return ambient.rank, ()
    factors = invariant_factors(coeff_rows)
    return ambient.rank - len(factors), factors


def is_unimodular(a: IntMatrix) -> bool:
    """True iff ``a`` is square of full rank with all invariant factors 1."""
    rows, cols = _check_rect(a)
    if rows != cols:
        return False
    if rows == 0:
        return True
    factors = invariant_factors(a)
    return len(factors) == rows and all(f == 1 for f in factors)
