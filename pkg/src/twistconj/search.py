"""Twisted conjugacy decision procedure.

Given ``x, y`` in ``G`` and an automorphism ``phi``, two searches are
interleaved one step at a time:

* procedure A looks for a conjugator ``g`` with ``y = g x phi(g)^-1``,
  walking balls of increasing radius (or all elements of a finite group);
* procedure B enumerates homomorphisms from ``Gamma = G x|_phi Z`` into the
  symmetric groups ``S_n`` (degree ascending, then permutation tuples in
  lexicographic order) and stops at one where the images of ``x t`` and
  ``y t`` are not conjugate inside the image subgroup.

Either outcome is returned as a certificate that :func:`verify_certificate`
re-checks from scratch.  Restricting a quotient of Gamma to ``G`` gives a
finite quotient of ``G`` respecting ``phi`` (see :func:`restrict_quotient`),
so the search never has to look for commuting squares directly.

For finite base groups procedure A runs out of candidates after ``|G|``
steps, which proves non-conjugacy; the certificate is then the left-regular
representation of ``G x| Z/k`` with ``k`` the order of ``phi``.

Polycyclic-by-finite groups are strongly twisted conjugacy separable, so
for pc input one of the two searches terminates in principle; budgets and
the degree cap bound what actually runs.  For finitely presented input
with relators equality is undecidable in general and procedure A refuses
to run unless the free-reduction heuristic is enabled explicitly.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Iterator, Sequence, Union

from twistconj.errors import (
    ClosureBudgetExceeded,
    DegreeCapReached,
    EqualityUndecidable,
    PresentationSyntaxError,
    TwistConjError,
)
from twistconj.gamma import GammaHom, Quotient, combine_quotients, restrict_quotient
from twistconj.groups import (
    Automorphism,
    FiniteGroup,
    GroupHom,
    Perm,
    build_cayley,
    cycle_type,
    format_cycles,
    parse_cycles,
    perm_closure,
    perm_identity,
    perm_inv,
    perm_mul,
)
from twistconj.presentations import (
    FpPresentation,
    PcPresentation,
    Word,
    ball_stream,
    cayley_presentation,
    finite_automorphism_as_pres,
    free_ball_stream,
    free_reduce,
    gamma_presentation,
    invert,
    pc_to_finite_group,
    shift_word,
)
from twistconj.twisted import twisted_partition

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**5
DEFAULT_DEGREE_CAP = 6
IMAGE_CAP = 10**5


# --------------------------------------------------------------------------
# queries and certificates


@dataclass(frozen=True, eq=False)
class DecisionQuery:
    """Is ``y = X x phi(X)^-1`` solvable?

    ``group`` is a :class:`FiniteGroup` (then ``x``, ``y`` are element
    indices and ``phi`` an :class:`Automorphism`) or a presentation (then
    ``x``, ``y`` are words and ``phi`` a :class:`PresAutomorphism`).
    ``budget`` counts candidates per procedure.
    """

    group: object
    phi: object
    x: object
    y: object
    budget: int = DEFAULT_BUDGET
    degree_cap: int = DEFAULT_DEGREE_CAP
    heuristic: bool = False
    image_cap: int = IMAGE_CAP

    @cached_property
    def context(self) -> "_Context":
        return _Context(self)


class _Context:
    """Everything derived deterministically from a query."""

    def __init__(self, q: DecisionQuery):
        G = q.group
        if isinstance(G, FiniteGroup):
            self.kind = "finite"
            P, words = cayley_presentation(G)
            self.base = P
            self.words = words
            self.pres_phi = finite_automorphism_as_pres(P, words, G, q.phi)
            self.x_word = words[q.x]
            self.y_word = words[q.y]
        elif isinstance(G, PcPresentation):
            self.kind = "pc"
            self.base = G
            self.pres_phi = q.phi
            self.x_word = tuple(q.x)
            self.y_word = tuple(q.y)
        elif isinstance(G, FpPresentation):
            self.kind = "fp"
            self.base = G
            self.pres_phi = q.phi
            self.x_word = free_reduce(q.x)
            self.y_word = free_reduce(q.y)
        else:
            raise TypeError(f"unsupported group type {type(G).__name__}")
        self.gamma = gamma_presentation(self.base, self.pres_phi)
        self.relators = tuple(self.gamma.relators)
        t = ((0, 1),)
        self.xt = shift_word(self.x_word, 1) + t
        self.yt = shift_word(self.y_word, 1) + t
        if self.kind == "pc":
            self.y_nf = G.collect(self.y_word)

    @cached_property
    def finite_model(self):
        """``(group, generator elements, phi images)`` when G is finite."""
        q = self.query
        if self.kind == "finite":
            G = q.group
            return G, tuple(G.generators), tuple(q.phi.images)
        if self.kind == "pc" and self.base.is_finite:
            P = self.base
            Gf, elems = pc_to_finite_group(P)
            pos = {e: i for i, e in enumerate(elems)}
            gens = tuple(pos[P.collect(((i, 1),))] for i in range(P.ngens))
            imgs = tuple(pos[P.collect(self.pres_phi.apply(P.to_word(e)))] for e in elems)
            return Gf, gens, imgs
        return None


def _attach(q: DecisionQuery) -> _Context:
    ctx = q.context
    ctx.query = q
    return ctx


@dataclass(frozen=True)
class ConjugatorWitness:
    """``word`` (in the generators of G) is a conjugator."""

    word: Word
    step: int = 0


@dataclass(frozen=True)
class SeparatingQuotient:
    """Images of the Gamma generators (``t`` first) in ``S_degree``."""

    degree: int
    images: tuple[Perm, ...]
    x_image: Perm = ()
    y_image: Perm = ()
    image_order: int = 0
    step: int = 0
    regular: bool = False


@dataclass
class ConjugatorSearchState:
    steps: int = 0
    exhausted: bool = False


@dataclass
class QuotientSearchState:
    degree: int = 1
    cursor: int = 0
    steps: int = 0
    found: int = 0
    rejected: int = 0
    exhausted: bool = False


@dataclass
class SearchState:
    a: ConjugatorSearchState = field(default_factory=ConjugatorSearchState)
    b: QuotientSearchState = field(default_factory=QuotientSearchState)
    _stream: Iterator | None = field(default=None, repr=False, compare=False)
    _stream_pos: int = field(default=0, repr=False, compare=False)

    def copy(self) -> "SearchState":
        return SearchState(ConjugatorSearchState(**asdict(self.a)),
                           QuotientSearchState(**asdict(self.b)))

    def to_json(self) -> str:
        return json.dumps({"a": asdict(self.a), "b": asdict(self.b)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SearchState":
        d = json.loads(text)
        return cls(ConjugatorSearchState(**d["a"]), QuotientSearchState(**d["b"]))


@dataclass(frozen=True)
class BudgetExceeded:
    state: SearchState
    reason: str = "budget exhausted"


Certificate = Union[ConjugatorWitness, SeparatingQuotient, BudgetExceeded]


# --------------------------------------------------------------------------
# procedure A


def _candidates(ctx: _Context) -> Iterator:
    if ctx.kind == "finite":
        return iter(ctx.query.group._bfs_order)
    if ctx.kind == "pc":
        return ball_stream(ctx.base)
    return free_ball_stream(ctx.base.ngens)


def _test_candidate(ctx: _Context, g) -> Word | None:
    q = ctx.query
    if ctx.kind == "finite":
        G = q.group
        if G.mul(G.mul(g, q.x), G.inv(q.phi(g))) == q.y:
            return ctx.words[g]
        return None
    if ctx.kind == "pc":
        # syllable arithmetic keeps long powers like a^k at O(1) cost
        P = ctx.base
        phig = P.image_vec(ctx.pres_phi.images, g)
        lhs = P.multiply(P.multiply(g, ctx.x_word), invert(P.to_syllables(phig)))
        return P.to_word(g) if lhs == ctx.y_nf else None
    w = g
    lhs = free_reduce(w + ctx.x_word + invert(ctx.pres_phi.apply(w)))
    return w if lhs == ctx.y_word else None


def procedure_a_step(state: SearchState, query: DecisionQuery) -> ConjugatorWitness | None:
    """Test the next conjugator candidate.  Returns a witness or ``None``;
    sets ``state.a.exhausted`` when a finite group has no candidates left."""
    ctx = _attach(query)
    if ctx.kind == "fp" and not ctx.base.is_free and not query.heuristic:
        raise EqualityUndecidable(
            "equality in a finitely presented group with relators is undecidable; "
            "enable the free-reduction heuristic (incomplete) to search anyway")
    if state._stream is None or state._stream_pos != state.a.steps:
        state._stream = _candidates(ctx)
        for _ in range(state.a.steps):
            next(state._stream, None)
        state._stream_pos = state.a.steps
    try:
        g = next(state._stream)
    except StopIteration:
        state.a.exhausted = True
        return None
    state.a.steps += 1
    state._stream_pos += 1
    w = _test_candidate(ctx, g)
    if w is not None:
        return ConjugatorWitness(tuple(w), state.a.steps)
    return None


# --------------------------------------------------------------------------
# procedure B


_PERMS: dict[int, list[Perm]] = {}


def _perms(n: int) -> list[Perm]:
    if n not in _PERMS:
        _PERMS[n] = list(itertools.permutations(range(n)))
    return _PERMS[n]


def evaluate_perm_word(images: Sequence[Perm], inverses: Sequence[Perm], word: Word,
                       degree: int) -> Perm:
    p = perm_identity(degree)
    for g, e in word:
        p = perm_mul(p, images[g] if e > 0 else inverses[g])
    return p


def _conjugate_within(X: Perm, Y: Perm, elements) -> Perm | None:
    for c in elements:
        # c X c^-1 == Y  <=>  c X == Y c
        if perm_mul(c, X) == perm_mul(Y, c):
            return c
    return None


def _separates(images, ctx: _Context, degree: int, cap: int):
    """``(X, Y, image_order)`` if the images of ``x t`` and ``y t`` are
    non-conjugate in the generated subgroup, else ``None``."""
    inverses = [perm_inv(p) for p in images]
    X = evaluate_perm_word(images, inverses, ctx.xt, degree)
    Y = evaluate_perm_word(images, inverses, ctx.yt, degree)
    if X == Y:
        return None
    if cycle_type(X) != cycle_type(Y):
        return X, Y, None
    group = perm_closure(degree, images, cap=cap)
    if _conjugate_within(X, Y, group.elements) is None:
        return X, Y, group.order
    return None


def _is_hom(images, inverses, relators, degree) -> bool:
    ident = perm_identity(degree)
    for r in relators:
        if evaluate_perm_word(images, inverses, r, degree) != ident:
            return False
    return True


def procedure_b_step(state: SearchState, query: DecisionQuery) -> SeparatingQuotient | None:
    """Test the next tuple of permutations.  Raises :class:`DegreeCapReached`
    once every degree up to the cap has been enumerated."""
    ctx = _attach(query)
    b = state.b
    k = ctx.gamma.ngens
    while True:
        if b.degree > query.degree_cap:
            b.exhausted = True
            raise DegreeCapReached(f"all degrees up to {query.degree_cap} enumerated")
        perms = _perms(b.degree)
        if b.cursor < len(perms) ** k:
            break
        b.degree += 1
        b.cursor = 0
    n = b.degree
    digits = []
    c = b.cursor
    for _ in range(k):
        c, r = divmod(c, len(perms))
        digits.append(r)
    images = tuple(perms[d] for d in reversed(digits))
    b.cursor += 1
    b.steps += 1
    inverses = [perm_inv(p) for p in images]
    if not _is_hom(images, inverses, ctx.relators, n):
        b.rejected += 1
        return None
    b.found += 1
    sep = _separates(images, ctx, n, query.image_cap)
    if sep is None:
        return None
    X, Y, order = sep
    if order is None:
        order = perm_closure(n, images, cap=query.image_cap).order
    return SeparatingQuotient(n, images, X, Y, order, b.steps)


def regular_quotient(query: DecisionQuery, step: int = 0) -> SeparatingQuotient | None:
    """Left-regular representation of ``G x| Z/k`` for finite ``G``;
    separates ``x t``, ``y t`` exactly when they are not conjugate."""
    ctx = _attach(query)
    model = ctx.finite_model
    if model is None:
        return None
    G, gens, phi_imgs = model
    k = 1
    cur = phi_imgs
    ident = tuple(range(G.order))
    while cur != ident:
        cur = tuple(phi_imgs[v] for v in cur)
        k += 1
    powers = [ident]
    for _ in range(k - 1):
        powers.append(tuple(phi_imgs[v] for v in powers[-1]))
    n = G.order * k

    def left(a, b):
        # (a, b) . (h, m) = (a phi^b(h), b + m)
        return tuple(G.mul(a, powers[b % k][h]) * k + (b + m) % k
                     for h in range(G.order) for m in range(k))

    images = (left(G.identity, 1),) + tuple(left(g, 0) for g in gens)
    sep = _separates(images, ctx, n, max(query.image_cap, n))
    if sep is None:
        return None
    X, Y, order = sep
    return SeparatingQuotient(n, images, X, Y, order or n, step, regular=True)


# --------------------------------------------------------------------------
# the decision loop


def decide(query: DecisionQuery, state: SearchState | None = None) -> Certificate:
    """Alternate one A step and one B step until a certificate appears or
    each procedure has used ``query.budget`` further steps.  Passing the
    ``state`` of a :class:`BudgetExceeded` resumes the run exactly."""
    state = state if state is not None else SearchState()
    limit_a = state.a.steps + query.budget
    limit_b = state.b.steps + query.budget
    while True:
        progressed = False
        if not state.a.exhausted and state.a.steps < limit_a:
            progressed = True
            w = procedure_a_step(state, query)
            if w is not None:
                return w
            if state.a.exhausted:
                cert = regular_quotient(query, state.b.steps)
                if cert is not None:
                    return cert
        if not state.b.exhausted and state.b.steps < limit_b:
            progressed = True
            try:
                cert = procedure_b_step(state, query)
            except DegreeCapReached:
                log.info("quotient search reached degree cap %d", query.degree_cap)
                cert = None
            if cert is not None:
                return cert
        if not progressed:
            reasons = []
            if state.b.exhausted:
                reasons.append(f"degree cap {query.degree_cap} reached")
            if state.a.steps >= limit_a or state.b.steps >= limit_b:
                reasons.append("budget exhausted")
            return BudgetExceeded(state, "; ".join(reasons) or "budget exhausted")


def resume(query: DecisionQuery, state: SearchState) -> Certificate:
    return decide(query, state)


def decide_parallel(query: DecisionQuery, state: SearchState | None = None) -> Certificate:
    """Run A and B in two threads.  The certificate is the one the
    sequential loop would return: an A result at step ``i`` sits at
    position ``2i - 1`` of the interleaving, a B result at step ``j`` at
    ``2j``, and the earliest position wins."""
    state = state if state is not None else SearchState()
    start_a, start_b = state.a.steps, state.b.steps
    limit_a = start_a + query.budget
    limit_b = start_b + query.budget
    lock = threading.Lock()
    best: list = [math.inf, None]
    b_stopped: list = [None]

    def offer(pos, cert):
        with lock:
            if pos < best[0]:
                best[0], best[1] = pos, cert

    def position_a(steps):       # round r = steps - start_a; A acts first in a round
        return 2 * (steps - start_a) - 1

    def position_b(steps):
        return 2 * (steps - start_b)

    def run_a():
        while not state.a.exhausted and state.a.steps < limit_a:
            if position_a(state.a.steps + 1) > best[0]:
                return
            w = procedure_a_step(state, query)
            if w is not None:
                offer(position_a(state.a.steps), w)
                return
            if state.a.exhausted:
                cert = regular_quotient(query)
                if cert is not None:
                    offer(position_a(state.a.steps + 1), cert)
                return

    def run_b():
        while not state.b.exhausted and state.b.steps < limit_b:
            if position_b(state.b.steps + 1) > best[0]:
                return
            try:
                cert = procedure_b_step(state, query)
            except DegreeCapReached:
                b_stopped[0] = state.b.steps
                return
            if cert is not None:
                offer(position_b(state.b.steps), cert)
                return

    with ThreadPoolExecutor(max_workers=2) as pool:
        fa = pool.submit(run_a)
        fb = pool.submit(run_b)
        fa.result()
        fb.result()
    cert = best[1]
    if cert is None:
        return BudgetExceeded(state, "budget exhausted")
    if isinstance(cert, SeparatingQuotient) and cert.regular:
        # stamp the B progress the sequential loop would have reached
        step = min(start_b + state.a.steps - start_a, limit_b)
        if b_stopped[0] is not None:
            step = min(step, b_stopped[0])
        cert = SeparatingQuotient(cert.degree, cert.images, cert.x_image, cert.y_image,
                                  cert.image_order, step, True)
    return cert


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Verification:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(query: DecisionQuery, cert) -> Verification:
    """Re-check a certificate against the query without trusting the search."""
    q = query
    G = q.group
    if isinstance(cert, ConjugatorWitness):
        if isinstance(G, FiniteGroup):
            gens = G.generators
            try:
                g = G.prod(gens[j] if e > 0 else G.inv(gens[j]) for j, e in cert.word)
            except IndexError:
                return Verification(False, "witness uses an unknown generator")
            ok = G.mul(G.mul(g, q.x), G.inv(q.phi(g))) == q.y
        elif isinstance(G, PcPresentation):
            w = tuple(cert.word)
            ok = G.collect(w + tuple(q.x) + invert(q.phi.apply(w))) == G.collect(tuple(q.y))
        else:
            w = tuple(cert.word)
            lhs = free_reduce(w + tuple(q.x) + invert(q.phi.apply(w)))
            ok = lhs == free_reduce(q.y)
            if not ok and not G.is_free:
                return Verification(False, "conjugation identity fails under free reduction "
                                           "(equality undecidable for this presentation)")
        return Verification(ok, "" if ok else "conjugation identity fails")
    if isinstance(cert, SeparatingQuotient):
        ctx = _attach(q)
        n = cert.degree
        if len(cert.images) != ctx.gamma.ngens:
            return Verification(False, f"expected {ctx.gamma.ngens} generator images")
        for p in cert.images:
            if sorted(p) != list(range(n)):
                return Verification(False, f"{list(p)} is not a permutation of degree {n}")
        images = tuple(tuple(p) for p in cert.images)
        inverses = [perm_inv(p) for p in images]
        ident = perm_identity(n)
        for r in ctx.relators:
            if evaluate_perm_word(images, inverses, r, n) != ident:
                return Verification(False, f"relator {ctx.gamma.format_word(r)} is not satisfied")
        X = evaluate_perm_word(images, inverses, ctx.xt, n)
        Y = evaluate_perm_word(images, inverses, ctx.yt, n)
        try:
            group = perm_closure(n, images, cap=max(q.image_cap, n))
        except ClosureBudgetExceeded:
            return Verification(False, "image subgroup exceeds the closure cap")
        c = _conjugate_within(X, Y, group.elements)
        if c is not None:
            return Verification(False, f"images are conjugate in the quotient by {format_cycles(c)}")
        return Verification(True)
    if isinstance(cert, BudgetExceeded):
        return Verification(False, "budget exhausted; nothing to verify")
    return Verification(False, f"unknown certificate type {type(cert).__name__}")


# --------------------------------------------------------------------------
# text format


def certificate_to_text(query: DecisionQuery, cert) -> str:
    ctx = _attach(query)
    if isinstance(cert, ConjugatorWitness):
        return f"witness {ctx.base.format_word(cert.word)}\n"
    if isinstance(cert, SeparatingQuotient):
        lines = [f"quotient degree={cert.degree}"]
        for name, p in zip(ctx.gamma.generators, cert.images):
            lines.append(f"image {name} = {format_cycles(p)}")
        return "\n".join(lines) + "\n"
    raise TypeError("only witnesses and quotients have a text form")


def certificate_from_text(query: DecisionQuery, text: str):
    ctx = _attach(query)
    lines = [(k + 1, l.split("#", 1)[0].strip()) for k, l in enumerate(text.splitlines())]
    lines = [(k, l) for k, l in lines if l]
    if not lines:
        raise PresentationSyntaxError("empty certificate", 1, 1)
    ln, head = lines[0]
    if head.startswith("witness"):
        word = ctx.base.parse_word(head[len("witness"):], ln)
        return ConjugatorWitness(word)
    if head.startswith("quotient"):
        try:
            degree = int(head.split("degree=", 1)[1].split()[0])
        except (IndexError, ValueError):
            raise PresentationSyntaxError("expected 'quotient degree=<n>'", ln, 1) from None
        names = ctx.gamma.generators
        images: dict[str, Perm] = {}
        for ln, line in lines[1:]:
            if not line.startswith("image"):
                raise PresentationSyntaxError("expected 'image <gen> = <permutation>'", ln, 1)
            lhs, eq, rhs = line[len("image"):].partition("=")
            name = lhs.strip()
            if not eq or name not in names:
                raise PresentationSyntaxError(f"unknown generator {name!r}", ln, 7)
            try:
                images[name] = parse_cycles(rhs, degree)
            except TwistConjError as exc:
                raise PresentationSyntaxError(str(exc), ln, line.index("=") + 2) from None
        missing = [n for n in names if n not in images]
        if missing:
            raise PresentationSyntaxError(f"missing images for {', '.join(missing)}",
                                          lines[-1][0], 1)
        return SeparatingQuotient(degree, tuple(images[n] for n in names))
    raise PresentationSyntaxError("certificate must start with 'witness' or 'quotient'", ln, 1)


# --------------------------------------------------------------------------
# a single quotient for the whole partition


def gamma_hom_from_certificate(query: DecisionQuery, cert: SeparatingQuotient) -> GammaHom:
    """Materialize the image of Gamma and express the certificate as a
    :class:`GammaHom` on the finite base group."""
    G = query.group
    if not isinstance(G, FiniteGroup):
        raise TypeError("only finite base groups are materialized")
    pg = perm_closure(cert.degree, cert.images, cap=max(query.image_cap, cert.degree))
    K = pg.to_finite_group()
    idx = pg.index
    return GammaHom(G, query.phi, K, tuple(idx[p] for p in cert.images[1:]),
                    idx[cert.images[0]])


def separate_reidemeister_partition(G: FiniteGroup, phi: Automorphism, *,
                                    budget: int = DEFAULT_BUDGET,
                                    degree_cap: int = DEFAULT_DEGREE_CAP) -> Quotient:
    """One finite quotient respecting phi in which all phi-classes of ``G``
    stay apart: separate class representatives pairwise, restrict each
    quotient of Gamma to ``G``, and combine them diagonally.  Pairs already
    kept apart by an earlier quotient are skipped."""
    part = twisted_partition(G, phi)
    reps = part.representatives
    quotients: list[Quotient] = []
    for i, j in itertools.combinations(range(len(reps)), 2):
        x, y = reps[i], reps[j]
        if any(q.separates(x, y) for q in quotients):
            continue
        query = DecisionQuery(G, phi, x, y, budget=budget, degree_cap=degree_cap)
        cert = decide(query)
        if not isinstance(cert, SeparatingQuotient):
            raise TwistConjError(f"could not separate class representatives {x} and {y}: {cert}")
        if not verify_certificate(query, cert):
            raise TwistConjError("separating certificate failed verification")
        q = restrict_quotient(gamma_hom_from_certificate(query, cert))
        if not q.separates(x, y):
            raise TwistConjError("restricted quotient does not separate the pair")
        quotients.append(q)
    if not quotients:
        trivial = build_cayley(1, [[0]], name="1")
        return Quotient(GroupHom(G, trivial, (0,) * G.order),
                        Automorphism(trivial, (0,), (0,)))
    return combine_quotients(quotients)
