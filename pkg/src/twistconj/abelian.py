"""Finitely generated abelian groups, integer-matrix endomorphisms and the
Smith normal form.

Coordinates are column vectors with the free part first.  In an abelian
group the phi-class of ``x`` is the coset ``x + Im(phi - id)``, so the
Reidemeister number is the order of ``coker(phi - id)`` taken modulo the
torsion relations.  All arithmetic uses Python integers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence

from twistconj.errors import InfiniteReidemeister, InvalidGroup, NotBijective
from twistconj.groups import Automorphism, FiniteGroup, build_cayley, perm_inv
from twistconj.twisted import INFINITE, ReidemeisterCount

Matrix = list  # list of rows of ints


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def matvec(A: Matrix, v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def determinant(A: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U A V = D`` with ``U``, ``V`` unimodular and ``D`` diagonal,
    ``d_1 | d_2 | ...``, all ``d_i >= 0``."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d != 0]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form by row and column reduction with the smallest
    nonzero entry as pivot, followed by a divisibility fix-up."""
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(v) for v in row] for row in A]
    U = identity_matrix(m)
    V = identity_matrix(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):   # row_dst += q * row_src
        for M in (D, U):
            rs, rd = M[src], M[dst]
            for k in range(len(rd)):
                rd[k] += q * rs[k]

    def add_col(src, dst, q):   # col_dst += q * col_src
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (pivot is None or abs(D[i][j]) < abs(D[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // p))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // p))
                    if D[t][j]:
                        done = False
            if not done:
                continue
            # divisibility: pull a non-multiple into row t and reduce again
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if t < m and t < n and D[t][t] < 0:
            for M in (D, U):
                M[t] = [-v for v in M[t]]
    return SmithDecomposition(U, D, V)


# --------------------------------------------------------------------------
# groups and endomorphisms


@dataclass(frozen=True)
class FgAbelianGroup:
    """``Z^rank + Z/d_1 + ... + Z/d_k`` with ``d_i | d_{i+1}``, ``d_i >= 2``."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise InvalidGroup("rank must be nonnegative")
        if any(d < 2 for d in self.torsion):
            raise InvalidGroup("torsion invariants must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InvalidGroup(f"invariant factors must divide: {a} does not divide {b}")

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate modulus, 0 for free coordinates."""
        return (0,) * self.rank + self.torsion

    def order(self) -> ReidemeisterCount:
        return INFINITE if self.rank else math.prod(self.torsion)

    def relations(self) -> Matrix:
        """Columns spanning the relation lattice ``d_i e_{rank+i}``."""
        n = self.ngens
        cols = [[d if r == self.rank + i else 0 for r in range(n)]
                for i, d in enumerate(self.torsion)]
        return [[c[r] for c in cols] for r in range(n)]

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % m if m else x for x, m in zip(v, self.moduli))

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        if not parts:
            return "1"
        if self.rank > 1 and not self.torsion:
            return f"Z^{self.rank}"
        return " + ".join(parts)


def cokernel(A: Sequence[Sequence[int]], rows: int | None = None) -> FgAbelianGroup:
    """``Z^m / (column span of A)``; pass ``rows`` when ``A`` has no columns."""
    m = len(A) if rows is None else rows
    if m == 0:
        return FgAbelianGroup(0)
    if not A or not A[0]:
        return FgAbelianGroup(m)
    snf = smith_normal_form(A)
    diag = snf.diagonal
    nonzero = [d for d in diag if d]
    return FgAbelianGroup(m - len(nonzero), tuple(d for d in nonzero if d > 1))


def _hstack(A: Matrix, B: Matrix) -> Matrix:
    return [list(a) + list(b) for a, b in zip(A, B)]


@dataclass(frozen=True)
class AbelianEndo:
    """Endomorphism given by an integer matrix acting on coordinate columns."""

    group: FgAbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        M = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", M)
        G = self.group
        n = G.ngens
        if len(M) != n or any(len(row) != n for row in M):
            raise InvalidGroup(f"matrix must be {n}x{n}")
        for j in range(G.rank, n):
            for i in range(G.rank):
                if M[i][j]:
                    raise InvalidGroup(
                        f"torsion generator {j} mapped into free coordinate {i}")
            dj = G.moduli[j]
            for i in range(G.rank, n):
                if (dj * M[i][j]) % G.moduli[i]:
                    raise InvalidGroup(
                        f"entry ({i}, {j}) incompatible with orders {dj} and {G.moduli[i]}")

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.group.reduce(matvec(self.matrix, v))

    def minus_identity(self) -> Matrix:
        n = self.group.ngens
        return [[self.matrix[i][j] - (i == j) for j in range(n)] for i in range(n)]

    @cached_property
    def is_automorphism(self) -> bool:
        G = self.group
        if cokernel(_hstack([list(r) for r in self.matrix], G.relations()) if G.torsion
                    else [list(r) for r in self.matrix], rows=G.ngens).order() != 1:
            return False
        # injectivity on the finite torsion subgroup
        if G.torsion:
            seen = set()
            for t in itertools.product(*(range(d) for d in G.torsion)):
                v = (0,) * G.rank + t
                seen.add(self(v))
            if len(seen) != math.prod(G.torsion):
                return False
        return True

    def require_automorphism(self) -> "AbelianEndo":
        if not self.is_automorphism:
            raise NotBijective("matrix does not define an automorphism")
        return self


def _twist_relation_matrix(phi: AbelianEndo) -> Matrix:
    G = phi.group
    A = phi.minus_identity()
    return _hstack(A, G.relations()) if G.torsion else A


def reidemeister_number_abelian(G: FgAbelianGroup, phi: AbelianEndo) -> ReidemeisterCount:
    """``|coker(phi - id)|``, or ``INFINITE``."""
    if phi.group != G:
        raise InvalidGroup("endomorphism belongs to a different group")
    if G.ngens == 0:
        return 1
    return cokernel(_twist_relation_matrix(phi), rows=G.ngens).order()


# --------------------------------------------------------------------------
# separation


@dataclass(frozen=True)
class AbelianWitness:
    """``g`` with ``x - y = (phi - id) g``, i.e. ``y = g + x - phi(g)``."""

    g: tuple[int, ...]


@dataclass(frozen=True)
class AbelianQuotient:
    """The reduction ``G -> G / eG`` with the induced endomorphism.

    ``moduli[i]`` is the order of coordinate ``i`` in the quotient.
    """

    group: FgAbelianGroup
    moduli: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    x: tuple[int, ...]
    y: tuple[int, ...]

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(a % m for a, m in zip(v, self.moduli))

    def induced(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.reduce(matvec(self.matrix, v))

    def to_finite_group(self) -> tuple[FiniteGroup, Automorphism, dict]:
        """Materialize ``K`` with ``phi_K``; also returns coordinates -> index."""
        elems = list(itertools.product(*(range(m) for m in self.moduli)))
        pos = {e: i for i, e in enumerate(elems)}
        table = [[pos[self.reduce([p + q for p, q in zip(a, b)])] for b in elems]
                 for a in elems]
        K = build_cayley(len(elems), table, associativity_bound=0,
                         labels=[" ".join(map(str, e)) for e in elems])
        imgs = tuple(pos[self.induced(e)] for e in elems)
        if len(set(imgs)) != len(imgs):
            raise NotBijective("induced map on the quotient is not bijective")
        return K, Automorphism(K, imgs, perm_inv(imgs)), pos


def solve_twisted(phi: AbelianEndo, x: Sequence[int], y: Sequence[int]
                  ) -> tuple[int, ...] | None:
    """Solve ``(phi - id) g = x - y`` in ``G``; ``None`` when unsolvable."""
    G = phi.group
    n = G.ngens
    b = [a - c for a, c in zip(x, y)]
    A = _twist_relation_matrix(phi)
    snf = smith_normal_form(A)
    Ub = matvec(snf.U, b)
    ncols = len(A[0])
    w = [0] * ncols
    for i in range(n):
        d = snf.D[i][i] if i < ncols else 0
        if d == 0:
            if Ub[i] != 0:
                return None
        else:
            if Ub[i] % d:
                return None
            w[i] = Ub[i] // d
    z = matvec(snf.V, w)
    return G.reduce(z[:n])


def separate_abelian(G: FgAbelianGroup, phi: AbelianEndo, x: Sequence[int],
                     y: Sequence[int]) -> AbelianWitness | AbelianQuotient:
    """Either a conjugator ``g`` or a finite quotient respecting phi in
    which ``x`` and ``y`` stay in different classes.

    The quotient is ``G / eG`` with ``e`` the exponent of
    ``coker(phi - id)``: since ``eG`` lies inside ``Im(phi - id)`` the
    classes survive the reduction.
    """
    R = reidemeister_number_abelian(G, phi)
    if R == INFINITE:
        raise InfiniteReidemeister("coker(phi - id) is infinite; separation is not guaranteed")
    x, y = G.reduce(x), G.reduce(y)
    g = solve_twisted(phi, x, y)
    if g is not None:
        return AbelianWitness(g)
    coker = cokernel(_twist_relation_matrix(phi), rows=G.ngens)
    e = coker.torsion[-1] if coker.torsion else 1
    moduli = tuple(e if m == 0 else math.gcd(e, m) for m in G.moduli)
    return AbelianQuotient(G, moduli, phi.matrix, x, y)


def twisted_add(phi: AbelianEndo, g: Sequence[int], x: Sequence[int]) -> tuple[int, ...]:
    """``g + x - phi(g)``."""
    pg = matvec(phi.matrix, g)
    return phi.group.reduce([a + b - c for a, b, c in zip(g, x, pg)])


def gcd_of_entries(A: Sequence[Sequence[int]]) -> int:
    return reduce(math.gcd, (abs(v) for row in A for v in row), 0)
