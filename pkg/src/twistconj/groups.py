"""Concrete finite groups on a dense index space, permutation groups,
homomorphisms and verified automorphisms.

Elements of a :class:`FiniteGroup` are the integers ``0 .. order-1`` and
multiplication is a table lookup.  Permutations are tuples ``p`` with
``p[i]`` the image of ``i``; the product ``p * q`` is the composition
``p o q`` (apply ``q`` first), which makes left-regular representations
into homomorphisms.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from twistconj.errors import (
    BudgetExceededError,
    ClosureBudgetExceeded,
    NoIdentity,
    NoInverse,
    NotAPermutation,
    NotAssociative,
    NotBijective,
    NotMultiplicative,
    InvalidGroup,
)

Perm = tuple

# Documented defaults; callers may override per call.
ASSOCIATIVITY_CHECK_BOUND = 256
AUTOMORPHISM_ENUMERATION_BOUND = 24
CLOSURE_CAP = 10**6


# --------------------------------------------------------------------------
# permutations


def perm_identity(degree: int) -> Perm:
    return tuple(range(degree))


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Composition ``p o q``: apply ``q`` first, then ``p``."""
    return tuple(p[i] for i in q)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def is_permutation(p: Sequence[int], degree: int | None = None) -> bool:
    n = len(p) if degree is None else degree
    return len(p) == n and sorted(p) == list(range(n))


def cycle_type(p: Perm) -> tuple[int, ...]:
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if not seen[i]:
            k = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                k += 1
            lengths.append(k)
    return tuple(sorted(lengths))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Perm:
    """Parse cycle notation such as ``(0 1)(2 3)``; ``()`` is the identity."""
    text = text.strip()
    stripped = _CYCLE_RE.sub("", text).strip()
    if stripped:
        raise NotAPermutation(f"cannot parse cycle notation {text!r}")
    img = list(range(degree))
    touched = set()
    for body in _CYCLE_RE.findall(text):
        items = body.replace(",", " ").split()
        if not items:
            continue
        try:
            pts = [int(s) for s in items]
        except ValueError:
            raise NotAPermutation(f"non-integer point in cycle ({body})") from None
        for a in pts:
            if not 0 <= a < degree:
                raise NotAPermutation(f"point {a} outside 0..{degree - 1}")
            if a in touched:
                raise NotAPermutation(f"point {a} repeated in {text!r}")
            touched.add(a)
        # cycles act right to left like composition: (0 1)(1 2) = (0 1) o (1 2)
        step = list(range(degree))
        for a, b in zip(pts, pts[1:] + pts[:1]):
            step[a] = b
        img = [step[i] for i in img]
    return tuple(img)


def format_cycles(p: Perm) -> str:
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


# --------------------------------------------------------------------------
# finite groups


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A validated finite group on the indices ``0 .. order-1``.

    Construct through :func:`build_cayley` or :meth:`PermGroup.to_finite_group`;
    the raw constructor performs no validation.
    """

    table: tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple[int, ...]
    labels: tuple[str, ...] | None = None
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def __repr__(self) -> str:
        name = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{name} of order {self.order}>"

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def prod(self, elements: Iterable[int]) -> int:
        out = self.identity
        for x in elements:
            out = self.table[out][x]
        return out

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inverses[a], -n
        out = self.identity
        for _ in range(n):
            out = self.table[out][a]
        return out

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.table[self.table[g][x]][self.inverses[g]]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels is not None else str(a)

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        return tuple(self.element_order(a) for a in range(self.order))

    @cached_property
    def is_abelian(self) -> bool:
        t = np.asarray(self.table)
        return bool((t == t.T).all())

    def closure(self, gens: Iterable[int]) -> list[int]:
        """Subgroup generated by ``gens``, breadth-first from the identity."""
        gens = list(gens)
        seen = {self.identity}
        out = [self.identity]
        queue = deque(out)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    queue.append(y)
        return out

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        if self.identity not in s:
            return False
        return all(self.table[a][self.inverses[b]] in s for a in s for b in s)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """Greedy generating set: repeatedly add the smallest element not yet
        in the subgroup generated so far."""
        gens: list[int] = []
        current = {self.identity}
        for x in range(self.order):
            if x not in current:
                gens.append(x)
                current = set(self.closure(gens))
                if len(current) == self.order:
                    break
        return tuple(gens)

    @cached_property
    def schreier_tree(self) -> tuple[tuple[int, int], ...]:
        """For each element ``x != e`` a pair ``(parent, j)`` with
        ``x = parent * generators[j]``; breadth-first, generators in order.
        The identity maps to ``(-1, -1)``."""
        tree = [(-2, -2)] * self.order
        tree[self.identity] = (-1, -1)
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for j, g in enumerate(self.generators):
                y = self.table[x][g]
                if tree[y] == (-2, -2):
                    tree[y] = (x, j)
                    queue.append(y)
        return tuple(tree)

    @cached_property
    def words(self) -> tuple[tuple[int, ...], ...]:
        """Shortest positive word (generator positions) for every element."""
        out: list[tuple[int, ...] | None] = [None] * self.order
        out[self.identity] = ()
        tree = self.schreier_tree
        for x in self._bfs_order:
            if x != self.identity:
                p, j = tree[x]
                out[x] = out[p] + (j,)
        return tuple(out)  # type: ignore[arg-type]

    @cached_property
    def _bfs_order(self) -> tuple[int, ...]:
        return tuple(self.closure(self.generators))

    @cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        classes = []
        seen: set[int] = set()
        for x in range(self.order):
            if x in seen:
                continue
            cls = sorted({self.conj(g, x) for g in range(self.order)})
            seen.update(cls)
            classes.append(tuple(cls))
        return tuple(classes)


def build_cayley(order: int, table: Sequence[Sequence[int]], *,
                 associativity_bound: int = ASSOCIATIVITY_CHECK_BOUND,
                 labels: Sequence[str] | None = None,
                 name: str = "") -> FiniteGroup:
    """Validate a Cayley table and return the group it defines.

    Associativity is checked exhaustively when ``order <= associativity_bound``.
    """
    if order < 1:
        raise InvalidGroup("order must be positive")
    if len(table) != order or any(len(row) != order for row in table):
        raise InvalidGroup(f"table must be {order}x{order}")
    t = np.asarray(table, dtype=np.int64)
    if t.min() < 0 or t.max() >= order:
        bad = np.argwhere((t < 0) | (t >= order))[0]
        raise InvalidGroup(f"entry at ({bad[0]}, {bad[1]}) out of range")
    ar = np.arange(order)
    identity = None
    for e in range(order):
        if (t[e] == ar).all() and (t[:, e] == ar).all():
            identity = e
            break
    if identity is None:
        raise NoIdentity()
    inverses = []
    for x in range(order):
        ys = np.nonzero(t[x] == identity)[0]
        y = next((int(y) for y in ys if t[y, x] == identity), None)
        if y is None:
            raise NoInverse(x)
        inverses.append(y)
    if order <= associativity_bound:
        for a in range(order):
            lhs = t[t[a]]            # lhs[b, c] = (a b) c
            rhs = t[a][t]            # rhs[b, c] = a (b c)
            if not np.array_equal(lhs, rhs):
                b, c = np.argwhere(lhs != rhs)[0]
                raise NotAssociative(a, int(b), int(c))
    return FiniteGroup(
        table=tuple(tuple(int(v) for v in row) for row in t),
        identity=identity,
        inverses=tuple(inverses),
        labels=tuple(labels) if labels is not None else None,
        name=name,
    )


def subgroup_as_group(G: FiniteGroup, subset: Iterable[int], name: str = ""
                      ) -> tuple[FiniteGroup, tuple[int, ...]]:
    """Re-index a subgroup of ``G`` as a group in its own right.

    Returns ``(H, embedding)`` with ``embedding[i]`` the element of ``G``
    that index ``i`` of ``H`` stands for.  Ordering follows ``subset``.
    """
    elems = tuple(dict.fromkeys(subset))
    pos = {x: i for i, x in enumerate(elems)}
    try:
        table = [[pos[G.mul(a, b)] for b in elems] for a in elems]
    except KeyError:
        raise InvalidGroup("subset is not closed under multiplication") from None
    labels = tuple(G.label(x) for x in elems) if G.labels is not None else None
    return build_cayley(len(elems), table, labels=labels, name=name), elems


def direct_product(groups: Sequence[FiniteGroup], name: str = "") -> FiniteGroup:
    sizes = [g.order for g in groups]
    elems = list(itertools.product(*(range(n) for n in sizes)))
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[tuple(g.mul(x, y) for g, x, y in zip(groups, a, b))] for b in elems]
             for a in elems]
    return build_cayley(len(elems), table, associativity_bound=0, name=name)


# --------------------------------------------------------------------------
# permutation groups


@dataclass(frozen=True, eq=False)
class PermGroup:
    """Group generated by permutations of ``0 .. degree-1``."""

    degree: int
    generators: tuple[Perm, ...]
    cap: int = CLOSURE_CAP

    @cached_property
    def elements(self) -> tuple[Perm, ...]:
        """Breadth-first closure from the identity, generators applied on
        the right in the given order."""
        ident = perm_identity(self.degree)
        seen = {ident}
        out = [ident]
        queue = deque(out)
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = perm_mul(x, g)
                if y not in seen:
                    if len(out) >= self.cap:
                        raise ClosureBudgetExceeded(
                            f"closure exceeds {self.cap} elements")
                    seen.add(y)
                    out.append(y)
                    queue.append(y)
        return tuple(out)

    @cached_property
    def index(self) -> dict[Perm, int]:
        return {p: i for i, p in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.index

    def to_finite_group(self, name: str = "") -> FiniteGroup:
        idx = self.index
        els = self.elements
        table = [[idx[perm_mul(a, b)] for b in els] for a in els]
        labels = [format_cycles(p) for p in els]
        # closure of permutations is associative by construction
        return build_cayley(len(els), table, associativity_bound=0,
                            labels=labels, name=name)


def perm_closure(degree: int, generators: Iterable[Sequence[int]],
                 cap: int = CLOSURE_CAP) -> PermGroup:
    gens = []
    for g in generators:
        g = tuple(int(v) for v in g)
        if not is_permutation(g, degree):
            raise NotAPermutation(f"{list(g)} is not a permutation of 0..{degree - 1}")
        gens.append(g)
    group = PermGroup(degree, tuple(gens), cap)
    group.elements  # materialize eagerly so budget errors surface here
    return group


# --------------------------------------------------------------------------
# endomorphisms and automorphisms


@dataclass(frozen=True, eq=False)
class Endomorphism:
    """A verified multiplicative self-map of a finite group."""

    group: FiniteGroup
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Endomorphism) and other.group is self.group
                and other.images == self.images)

    def __hash__(self) -> int:
        return hash((id(self.group), self.images))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.images)})"

    @property
    def is_identity(self) -> bool:
        return self.images == tuple(range(self.group.order))


@dataclass(frozen=True, eq=False, repr=False)
class Automorphism(Endomorphism):
    inverse_images: tuple[int, ...] = field(default=())

    def inverse(self) -> "Automorphism":
        return Automorphism(self.group, self.inverse_images, self.images)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``."""
        imgs = tuple(self.images[other.images[x]] for x in range(self.group.order))
        return Automorphism(self.group, imgs, perm_inv(imgs))

    def power(self, n: int) -> "Automorphism":
        base = self if n >= 0 else self.inverse()
        out = identity_automorphism(self.group)
        for _ in range(abs(n)):
            out = base.compose(out)
        return out

    @cached_property
    def order(self) -> int:
        ident = tuple(range(self.group.order))
        k, imgs = 1, self.images
        while imgs != ident:
            imgs = tuple(self.images[x] for x in imgs)
            k += 1
        return k


def identity_automorphism(G: FiniteGroup) -> Automorphism:
    ident = tuple(range(G.order))
    return Automorphism(G, ident, ident)


def check_endomorphism(G: FiniteGroup, images: Sequence[int]) -> Endomorphism:
    images = tuple(int(v) for v in images)
    n = G.order
    if len(images) != n or any(not 0 <= v < n for v in images):
        raise NotBijective(f"map must send 0..{n - 1} into 0..{n - 1}")
    t = G.table
    for x in range(n):
        ix = images[x]
        row = t[x]
        irow = t[ix]
        for y in range(n):
            if images[row[y]] != irow[images[y]]:
                raise NotMultiplicative(x, y)
    return Endomorphism(G, images)


def check_automorphism(G: FiniteGroup, a: Sequence[int]) -> Automorphism:
    a = tuple(int(v) for v in a)
    if not is_permutation(a, G.order):
        raise NotBijective(f"{list(a)} is not a permutation of the {G.order} elements")
    check_endomorphism(G, a)
    return Automorphism(G, a, perm_inv(a))


def inner_automorphism(G: FiniteGroup, g: int) -> Automorphism:
    """``x -> g x g^-1``."""
    if not 0 <= g < G.order:
        raise IndexError(f"element {g} out of range")
    gi = G.inv(g)
    imgs = tuple(G.conj(g, x) for x in range(G.order))
    inv = tuple(G.conj(gi, x) for x in range(G.order))
    return Automorphism(G, imgs, inv)


def _extend_from_generators(G: FiniteGroup, gen_images: Sequence[int],
                            target: FiniteGroup | None = None) -> tuple[int, ...] | None:
    """Extend generator images along the Schreier tree and test that the
    result is a homomorphism; ``None`` if it is not."""
    K = G if target is None else target
    tree = G.schreier_tree
    imgs = [-1] * G.order
    imgs[G.identity] = K.identity
    for x in G._bfs_order:
        if x != G.identity:
            p, j = tree[x]
            imgs[x] = K.mul(imgs[p], gen_images[j])
    for x in range(G.order):
        row = G.table[x]
        for j, g in enumerate(G.generators):
            if imgs[row[g]] != K.mul(imgs[x], gen_images[j]):
                return None
    return tuple(imgs)


def enumerate_automorphisms(G: FiniteGroup,
                            bound: int = AUTOMORPHISM_ENUMERATION_BOUND
                            ) -> list[Automorphism]:
    """All automorphisms of ``G`` by brute force over images of the greedy
    generating set, in lexicographic order of those images."""
    if G.order > bound:
        raise BudgetExceededError(
            f"automorphism enumeration limited to order <= {bound} (got {G.order})")
    gens = G.generators
    orders = G.element_orders
    candidates = [[y for y in range(G.order) if orders[y] == orders[g]] for g in gens]
    out = []
    for choice in itertools.product(*candidates):
        imgs = _extend_from_generators(G, choice)
        if imgs is not None and len(set(imgs)) == G.order:
            out.append(Automorphism(G, imgs, perm_inv(imgs)))
    return out


# --------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class GroupHom:
    """Homomorphism into a finite group.

    For a :class:`FiniteGroup` source ``images`` lists the image of every
    element.  For a presented source (anything with ``generators`` names
    and a ``relators`` attribute) ``images`` lists the image of each
    generator and words are evaluated letter by letter.
    """

    source: object
    target: FiniteGroup
    images: tuple[int, ...]

    @property
    def finite_source(self) -> bool:
        return isinstance(self.source, FiniteGroup)

    def __call__(self, x) -> int:
        if self.finite_source:
            return self.images[x]
        return self.evaluate(x)

    def evaluate(self, word) -> int:
        K = self.target
        out = K.identity
        for g, e in word:
            img = self.images[g]
            out = K.mul(out, img if e > 0 else K.inv(img))
        return out

    def image(self) -> list[int]:
        if self.finite_source:
            return sorted(set(self.images))
        return self.target.closure(self.images)

    def verify(self) -> None:
        """Raise :class:`NotMultiplicative` unless the defining data is
        respected (all pairs, or all relators)."""
        K = self.target
        if self.finite_source:
            G = self.source
            for x in range(G.order):
                for y in range(G.order):
                    if self.images[G.mul(x, y)] != K.mul(self.images[x], self.images[y]):
                        raise NotMultiplicative(x, y)
            return
        for r in self.source.relators:
            if self.evaluate(r) != K.identity:
                raise NotMultiplicative(r, None)
