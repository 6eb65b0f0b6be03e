"""Twisted conjugacy classes and Reidemeister numbers of finite groups.

Two elements are ``phi``-conjugate when ``y = g x phi(g)^-1`` for some
``g``.  All orbits here are computed by sweeping every ``g`` in the group,
which records a witness for each member at no extra cost.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Union

from twistconj.errors import (
    BurnsideMismatch,
    NotATransversal,
    NotInvariantSubgroup,
    TwistConjError,
)
from twistconj.groups import Automorphism, Endomorphism, FiniteGroup, identity_automorphism

log = logging.getLogger(__name__)


class Infinite:
    """The infinite Reidemeister number.  Use the singleton :data:`INFINITE`."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __str__(self) -> str:
        return "infinite"

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinite)

    def __hash__(self) -> int:
        return hash("Infinite")


INFINITE = Infinite()

ReidemeisterCount = Union[int, Infinite]


@dataclass(frozen=True)
class TwistedClass:
    """One orbit; ``witnesses[y]`` is a ``g`` with ``g x phi(g)^-1 = y``."""

    element: int
    members: tuple[int, ...]
    witnesses: dict

    def __contains__(self, y) -> bool:
        return y in self.witnesses


def twist(G: FiniteGroup, phi: Endomorphism, g: int, x: int) -> int:
    """``g x phi(g)^-1``."""
    return G.mul(G.mul(g, x), G.inv(phi(g)))


def twisted_class_of(G: FiniteGroup, phi: Endomorphism, x: int) -> TwistedClass:
    witnesses: dict[int, int] = {}
    t = G.table
    inv = G.inverses
    imgs = phi.images
    for g in range(G.order):
        y = t[t[g][x]][inv[imgs[g]]]
        if y not in witnesses:
            witnesses[y] = g
    return TwistedClass(x, tuple(sorted(witnesses)), witnesses)


@dataclass(frozen=True, eq=False)
class TwistedClassPartition:
    group: FiniteGroup
    automorphism: Endomorphism
    classes: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    class_index: tuple[int, ...]
    witness: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.classes)

    def same_class(self, x: int, y: int) -> bool:
        return self.class_index[x] == self.class_index[y]

    def class_of(self, x: int) -> tuple[int, ...]:
        return self.classes[self.class_index[x]]

    def verify(self) -> None:
        """Check disjointness, coverage, witnesses and phi-closure; raise on
        the first violation."""
        G, phi = self.group, self.automorphism
        seen: set[int] = set()
        for i, cls in enumerate(self.classes):
            if seen & set(cls):
                raise TwistConjError(f"class {i} overlaps an earlier class")
            seen.update(cls)
            if self.representatives[i] != min(cls):
                raise TwistConjError(f"class {i} representative is not minimal")
        if seen != set(range(G.order)):
            raise TwistConjError("classes do not cover the group")
        for x in range(G.order):
            rep = self.representatives[self.class_index[x]]
            if twist(G, phi, self.witness[x], rep) != x:
                raise TwistConjError(f"witness for element {x} fails")
            if self.class_index[phi(x)] != self.class_index[x]:
                raise TwistConjError(f"phi({x}) leaves the class of {x}")


def twisted_partition(G: FiniteGroup, phi: Endomorphism) -> TwistedClassPartition:
    """Partition into phi-conjugacy classes, sorted by representative
    (the smallest member)."""
    n = G.order
    class_index = [-1] * n
    witness = [-1] * n
    classes = []
    reps = []
    for x in range(n):
        if class_index[x] >= 0:
            continue
        cls = twisted_class_of(G, phi, x)
        k = len(classes)
        for y, g in cls.witnesses.items():
            class_index[y] = k
            witness[y] = g
        classes.append(cls.members)
        reps.append(x)
    return TwistedClassPartition(G, phi, tuple(classes), tuple(reps),
                                 tuple(class_index), tuple(witness))


def reidemeister_number_finite(G: FiniteGroup, phi: Endomorphism) -> int:
    return len(twisted_partition(G, phi))


def count_phi_fixed_ordinary_classes(G: FiniteGroup, phi: Endomorphism) -> int:
    """Number of ordinary conjugacy classes mapped onto themselves by phi."""
    count = 0
    for cls in G.conjugacy_classes:
        if {phi(x) for x in cls} == set(cls):
            count += 1
    return count


@dataclass(frozen=True)
class BurnsideReport:
    R: int
    S: int
    equal: bool


def verify_burnside_finite(G: FiniteGroup, phi: Endomorphism, *,
                           strict: bool = True) -> BurnsideReport:
    """Compare R(phi) with the number of phi-fixed ordinary classes.

    The fixed-class count stands in for the number of phi-fixed
    irreducible representations.  A mismatch raises
    :class:`BurnsideMismatch` unless ``strict`` is false.
    """
    R = reidemeister_number_finite(G, phi)
    S = count_phi_fixed_ordinary_classes(G, phi)
    report = BurnsideReport(R, S, R == S)
    if not report.equal:
        log.error("Burnside check failed on %r with %r: R=%d S=%d", G, phi, R, S)
        if strict:
            raise BurnsideMismatch(f"R={R} but S={S} for {G!r}, {phi!r}")
    return report


# --------------------------------------------------------------------------
# finite-index decomposition


@dataclass(frozen=True)
class DecompositionPiece:
    """``{e}_psi . translator`` where ``psi = tau_translator o phi|H``."""

    coset_rep: int
    translator: int
    class_in_subgroup: tuple[int, ...]
    members: tuple[int, ...]


def _right_transversal_check(G: FiniteGroup, H: Sequence[int], reps: Sequence[int]) -> None:
    covered: dict[int, int] = {}
    for r in reps:
        for h in H:
            y = G.mul(h, r)
            if y in covered:
                raise NotATransversal(
                    f"cosets H*{covered[y]} and H*{r} overlap at element {y}")
            covered[y] = r
    if len(covered) != G.order:
        raise NotATransversal("coset representatives do not cover the group")


def decompose_over_subgroup(G: FiniteGroup, phi: Endomorphism, g: int,
                            H: Sequence[int], coset_reps: Sequence[int]
                            ) -> list[DecompositionPiece]:
    """Split the phi-class of ``g`` along the right cosets ``H x_i``.

    With ``g_i = x_i g phi(x_i)^-1`` each piece is the class of the
    identity of ``H`` under ``h -> g_i phi(h) g_i^-1``, translated on the
    right by ``g_i``.  ``H`` must be normal and phi-invariant.
    """
    H = sorted(set(H))
    hs = set(H)
    if not G.is_subgroup(hs):
        raise NotInvariantSubgroup("H is not a subgroup")
    if {phi(h) for h in H} != hs:
        raise NotInvariantSubgroup("phi(H) != H")
    if any(G.conj(x, h) not in hs for x in range(G.order) for h in H):
        raise NotInvariantSubgroup("H is not normal")
    _right_transversal_check(G, H, coset_reps)
    pieces = []
    for x in coset_reps:
        gi = G.mul(G.mul(x, g), G.inv(phi(x)))
        # class of e in H under psi(h) = gi phi(h) gi^-1
        cls = sorted({G.mul(h, G.inv(G.conj(gi, phi(h)))) for h in H})
        members = tuple(sorted(G.mul(c, gi) for c in cls))
        pieces.append(DecompositionPiece(x, gi, tuple(cls), members))
    return pieces


# --------------------------------------------------------------------------
# translation bookkeeping


def twisted_automorphism(G: FiniteGroup, phi: Endomorphism, g: int) -> Endomorphism:
    """``tau_g o phi``: ``x -> g phi(x) g^-1``."""
    imgs = tuple(G.conj(g, phi(x)) for x in range(G.order))
    if isinstance(phi, Automorphism):
        gi = G.inv(g)
        inv = tuple(phi.inverse_images[G.conj(gi, x)] for x in range(G.order))
        return Automorphism(G, imgs, inv)
    return Endomorphism(G, imgs)


@dataclass(frozen=True, eq=False)
class TranslationBijection:
    source: TwistedClassPartition   # classes under tau_g o phi
    target: TwistedClassPartition   # classes under phi
    mapping: tuple[int, ...]        # source class index -> target class index


def twisted_class_permutation_under_translation(G: FiniteGroup, phi: Endomorphism,
                                                g: int) -> TranslationBijection:
    """Right translation by ``g`` carries (tau_g o phi)-classes onto
    phi-classes; returns the induced bijection after checking it is
    well defined and bijective."""
    psi = twisted_automorphism(G, phi, g)
    src = twisted_partition(G, psi)
    dst = twisted_partition(G, phi)
    mapping = []
    for cls in src.classes:
        targets = {dst.class_index[G.mul(x, g)] for x in cls}
        if len(targets) != 1:
            raise TwistConjError("translation does not respect the class partition")
        mapping.append(targets.pop())
    if sorted(mapping) != list(range(len(dst))):
        raise TwistConjError("translation is not a bijection of class partitions")
    return TranslationBijection(src, dst, tuple(mapping))


def ordinary_partition(G: FiniteGroup) -> TwistedClassPartition:
    return twisted_partition(G, identity_automorphism(G))
