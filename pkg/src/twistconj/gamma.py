"""The semidirect product ``Gamma = G x|_phi Z`` over a finite group.

An element ``(g, n)`` stands for ``g t^n``; multiplication follows from
``t g t^-1 = phi(g)``.  Conjugation by ``t^m`` acts on ``G`` through
``phi^m`` only, so searches over ``t``-exponents need only run over one
period of ``phi``.

Finite quotients are carried as :class:`Quotient` objects: a homomorphism
``F: G -> K`` onto a finite group together with an automorphism
``phi_K`` of ``K`` satisfying ``F o phi = phi_K o F``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

from twistconj.errors import NotMultiplicative, SquareDoesNotCommute, TwistConjError
from twistconj.groups import (
    Automorphism,
    FiniteGroup,
    GroupHom,
    _extend_from_generators,
    build_cayley,
    perm_inv,
    subgroup_as_group,
)
from twistconj.twisted import twisted_partition


class GammaElement(NamedTuple):
    g: int
    n: int


@dataclass(frozen=True, eq=False)
class GammaGroup:
    base: FiniteGroup
    phi: Automorphism

    @cached_property
    def period(self) -> int:
        """Multiplicative order of phi."""
        return self.phi.order

    @cached_property
    def _powers(self) -> tuple[tuple[int, ...], ...]:
        out = [tuple(range(self.base.order))]
        for _ in range(self.period - 1):
            out.append(tuple(self.phi(x) for x in out[-1]))
        return tuple(out)

    def phi_power(self, n: int) -> tuple[int, ...]:
        """Images of ``phi^n``; negative ``n`` allowed."""
        return self._powers[n % self.period]

    @property
    def identity(self) -> GammaElement:
        return GammaElement(self.base.identity, 0)

    def t(self, n: int = 1) -> GammaElement:
        return GammaElement(self.base.identity, n)

    def mul(self, a: GammaElement, b: GammaElement) -> GammaElement:
        return gamma_mul(self, a, b)

    def inv(self, a: GammaElement) -> GammaElement:
        G = self.base
        return GammaElement(self.phi_power(-a.n)[G.inv(a.g)], -a.n)

    def conj(self, c: GammaElement, x: GammaElement) -> GammaElement:
        """``c x c^-1``."""
        return self.mul(self.mul(c, x), self.inv(c))


def gamma_mul(gamma: GammaGroup, a: GammaElement, b: GammaElement) -> GammaElement:
    """``(g, n)(h, m) = (g phi^n(h), n + m)``."""
    return GammaElement(gamma.base.mul(a.g, gamma.phi_power(a.n)[b.g]), a.n + b.n)


@dataclass(frozen=True)
class CosetCheck:
    ok: bool
    samples: tuple[tuple[GammaElement, GammaElement], ...]


def conjugacy_class_stays_in_coset(gamma: GammaGroup, x: GammaElement,
                                   window: int | None = None) -> CosetCheck:
    """Conjugate ``x`` by every ``(h, m)`` with ``|m| <= window`` and check
    the ``t``-exponent never moves.  The sample log lists
    ``(conjugator, conjugate)`` pairs."""
    window = gamma.period if window is None else window
    samples = []
    ok = True
    for m in range(-window, window + 1):
        for h in range(gamma.base.order):
            c = GammaElement(h, m)
            y = gamma.conj(c, x)
            samples.append((c, y))
            if y.n != x.n:
                ok = False
    return CosetCheck(ok, tuple(samples))


def coset_t_class(gamma: GammaGroup, x: int) -> dict[int, GammaElement]:
    """Conjugacy class of ``x t`` in Gamma, as ``{y: conjugator}`` for the
    elements ``y t`` it contains.  Conjugators ``(h, m)`` with
    ``0 <= m < period`` suffice."""
    G = gamma.base
    xt = GammaElement(x, 1)
    out: dict[int, GammaElement] = {}
    for m in range(gamma.period):
        for h in range(G.order):
            c = GammaElement(h, m)
            y = gamma.conj(c, xt)
            if y.g not in out:
                out[y.g] = c
    return out


def conjugate_in_coset_t(gamma: GammaGroup, x: int, y: int) -> GammaElement | None:
    """A verified ``c`` with ``c (x t) c^-1 = y t``, or ``None`` when
    ``x t`` and ``y t`` are not conjugate in Gamma."""
    xt, yt = GammaElement(x, 1), GammaElement(y, 1)
    for m in range(gamma.period):
        for h in range(gamma.base.order):
            c = GammaElement(h, m)
            if gamma.conj(c, xt) == yt:
                return c
    return None


@dataclass(frozen=True)
class CosetBijectionReport:
    pairs_checked: int
    twisted_classes: int
    gamma_classes: int


def coset_bijection_check(G: FiniteGroup, phi: Automorphism) -> CosetBijectionReport:
    """Twisted conjugacy of ``x, y`` in ``G`` against conjugacy of ``x t``,
    ``y t`` in Gamma, for every pair.  Any disagreement raises."""
    gamma = GammaGroup(G, phi)
    part = twisted_partition(G, phi)
    gamma_classes = set()
    pairs = 0
    for x in range(G.order):
        cls = coset_t_class(gamma, x)
        gamma_classes.add(frozenset(cls))
        for y in range(G.order):
            pairs += 1
            if (y in cls) != part.same_class(x, y):
                raise TwistConjError(
                    f"Gamma conjugacy and twisted conjugacy disagree on ({x}, {y})")
            if y in cls and gamma.conj(cls[y], GammaElement(x, 1)) != GammaElement(y, 1):
                raise TwistConjError(f"bad Gamma conjugator for ({x}, {y})")
    if len(gamma_classes) != len(part):
        raise TwistConjError("class counts differ")
    return CosetBijectionReport(pairs, len(part), len(gamma_classes))


# --------------------------------------------------------------------------
# quotients respecting phi


@dataclass(frozen=True, eq=False)
class Quotient:
    """``F: G -> K`` onto ``K`` with ``phi_K`` making the square commute."""

    hom: GroupHom
    aut: Automorphism

    @property
    def target(self) -> FiniteGroup:
        return self.hom.target

    def separates(self, x, y) -> bool:
        """Whether ``F(x)`` and ``F(y)`` lie in different phi_K-classes."""
        part = self._partition
        return not part.same_class(self.hom(x), self.hom(y))

    @cached_property
    def _partition(self):
        return twisted_partition(self.target, self.aut)

    def check_square(self, phi) -> None:
        """``F o phi == phi_K o F`` on all elements (finite source) or on
        the generators (presented source)."""
        F = self.hom
        if F.finite_source:
            for g in range(F.source.order):
                if F(phi(g)) != self.aut(F(g)):
                    raise SquareDoesNotCommute(f"square fails at element {g}")
            return
        for j in range(F.source.ngens):
            g = ((j, 1),)
            if F.evaluate(phi.apply(g)) != self.aut(F.evaluate(g)):
                raise SquareDoesNotCommute(f"square fails at generator {F.source.generators[j]}")


@dataclass(frozen=True, eq=False)
class GammaHom:
    """A homomorphism ``Gamma -> K`` given by the images of the generators
    of ``G`` and of ``t``.  For a finite ``G`` the generators are
    ``G.generators``; for a presentation they are its generators."""

    base: object
    phi: object
    target: FiniteGroup
    gen_images: tuple[int, ...]
    t_image: int

    def element_images(self) -> tuple[int, ...]:
        G = self.base
        imgs = _extend_from_generators(G, self.gen_images, self.target)
        if imgs is None:
            raise NotMultiplicative("generator images do not extend to G", None)
        return imgs


def restrict_quotient(F: GammaHom) -> Quotient:
    """Restrict ``F`` to ``G``, shrink the target to the image, and take
    ``phi_K`` to be conjugation by ``F(t)`` on that image."""
    K = F.target
    s = F.t_image
    if isinstance(F.base, FiniteGroup):
        G = F.base
        imgs = F.element_images()
        for g in range(G.order):
            if imgs[F.phi(g)] != K.conj(s, imgs[g]):
                raise SquareDoesNotCommute(f"F(phi({g})) != F(t) F({g}) F(t)^-1")
        image = K.closure(imgs[g] for g in G.generators)
    else:
        P = F.base
        whole = GroupHom(P, K, F.gen_images)
        whole.verify()
        for j in range(P.ngens):
            g = ((j, 1),)
            if whole.evaluate(F.phi.apply(g)) != K.conj(s, F.gen_images[j]):
                raise SquareDoesNotCommute(
                    f"F(phi({P.generators[j]})) != F(t) F({P.generators[j]}) F(t)^-1")
        image = K.closure(F.gen_images)
    H, emb = subgroup_as_group(K, image)
    pos = {k: i for i, k in enumerate(emb)}
    try:
        aut_imgs = tuple(pos[K.conj(s, k)] for k in emb)
    except KeyError:
        raise SquareDoesNotCommute("conjugation by F(t) does not preserve the image") from None
    phi_K = Automorphism(H, aut_imgs, perm_inv(aut_imgs))
    if isinstance(F.base, FiniteGroup):
        hom = GroupHom(F.base, H, tuple(pos[k] for k in imgs))
    else:
        hom = GroupHom(F.base, H, tuple(pos[k] for k in F.gen_images))
    q = Quotient(hom, phi_K)
    q.check_square(F.phi)
    return q


def combine_quotients(quotients: Sequence[Quotient]) -> Quotient:
    """Diagonal map into the product of the targets, shrunk to its image."""
    if not quotients:
        raise ValueError("need at least one quotient")
    source = quotients[0].hom.source
    if any(q.hom.source is not source for q in quotients):
        raise ValueError("quotients must share the same source group")
    finite = isinstance(source, FiniteGroup)
    if finite:
        gens = [tuple(q.hom(g) for q in quotients) for g in source.generators]
    else:
        gens = [tuple(q.hom.images[j] for q in quotients) for j in range(source.ngens)]
    ident = tuple(q.target.identity for q in quotients)

    def mul(a, b):
        return tuple(q.target.mul(x, y) for q, x, y in zip(quotients, a, b))

    elems = [ident]
    seen = {ident}
    queue = deque(elems)
    while queue:
        a = queue.popleft()
        for g in gens:
            b = mul(a, g)
            if b not in seen:
                seen.add(b)
                elems.append(b)
                queue.append(b)
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[mul(a, b)] for b in elems] for a in elems]
    K = build_cayley(len(elems), table, associativity_bound=0)
    aut_imgs = tuple(pos[tuple(q.aut(x) for q, x in zip(quotients, e))] for e in elems)
    phi_K = Automorphism(K, aut_imgs, perm_inv(aut_imgs))
    if finite:
        images = tuple(pos[tuple(q.hom(x) for q in quotients)] for x in range(source.order))
    else:
        images = tuple(pos[g] for g in gens)
    return Quotient(GroupHom(source, K, images), phi_K)


def pullback_reproduces_partition(q: Quotient, G: FiniteGroup, phi: Automorphism) -> bool:
    """Whether every phi-class of ``G`` is the full preimage of its image,
    i.e. class indicator functions factor through ``q``."""
    part = twisted_partition(G, phi)
    owner: dict[int, int] = {}
    for i, cls in enumerate(part.classes):
        for x in cls:
            k = q.hom(x)
            if owner.setdefault(k, i) != i:
                return False
    return True
