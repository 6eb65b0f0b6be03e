"""Finitely presented and polycyclic groups.

A word is a tuple of letters ``(generator_index, +1 | -1)``.  Polycyclic
presentations use the convention ``x^y = y^-1 x y``; a relation
``conj a ^ b = w`` therefore states ``b^-1 a b = w``.  Elements of a
polycyclic group are represented by exponent vectors (collected words).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from twistconj.errors import (
    BadGeneratorIndexOrder,
    BudgetExceededError,
    CollectionBudgetExceeded,
    InconsistentPresentation,
    NotBijective,
    PresentationSyntaxError,
)
from twistconj.groups import FiniteGroup, build_cayley

Word = tuple
CollectedWord = tuple

COLLECTION_BUDGET = 10**6
BALL_BUDGET = 10**6
CONSISTENCY_WORD_LENGTH = 3


# --------------------------------------------------------------------------
# words


def free_reduce(word: Iterable[tuple[int, int]]) -> Word:
    out: list[tuple[int, int]] = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def invert(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def letter_power(g: int, n: int) -> Word:
    return ((g, 1 if n > 0 else -1),) * abs(n)


def word_power(word: Word, n: int) -> Word:
    base = word if n >= 0 else invert(word)
    return tuple(base) * abs(n)


def shift_word(word: Word, k: int) -> Word:
    return tuple((g + k, e) for g, e in word)


def syllables(word: Word) -> list[tuple[int, int]]:
    out: list[list[int]] = []
    for g, e in word:
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return [(g, e) for g, e in out]


def format_word(word: Word, names: Sequence[str]) -> str:
    parts = []
    for g, e in syllables(word):
        parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
    return " ".join(parts) or "1"


_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<int>-?\d+)|(?P<op>[()^*]))")


def _tokenize(text: str, line: int | None, col0: int = 0):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationSyntaxError(f"unexpected character {text[pos]!r}",
                                          line, col0 + pos + 1)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), col0 + m.start(kind) + 1))
        pos = m.end()
    return toks


def parse_word(text: str, names: Sequence[str], line: int | None = None,
               col: int = 0) -> Word:
    """Parse ``a b^-1 (a b)^2``; ``1`` denotes the empty word."""
    index = {n: i for i, n in enumerate(names)}
    toks = _tokenize(text, line, col)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None, col + len(text) + 1)

    def parse_seq(depth):
        nonlocal pos
        out: list[tuple[int, int]] = []
        while pos < len(toks):
            kind, val, c = toks[pos]
            if kind == "op" and val == ")":
                if depth == 0:
                    raise PresentationSyntaxError("unbalanced ')'", line, c)
                break
            if kind == "op" and val == "*":
                pos += 1
                continue
            if kind == "op" and val == "(":
                pos += 1
                inner = parse_seq(depth + 1)
                k, v, c2 = peek()
                if v != ")":
                    raise PresentationSyntaxError("missing ')'", line, c2)
                pos += 1
                atom = inner
            elif kind == "name":
                if val not in index:
                    raise PresentationSyntaxError(f"unknown generator {val!r}", line, c)
                pos += 1
                atom = ((index[val], 1),)
            elif kind == "int" and val == "1":
                pos += 1
                atom = ()
            else:
                raise PresentationSyntaxError(f"unexpected token {val!r}", line, c)
            k, v, c2 = peek()
            if v == "^":
                pos += 1
                k, v, c3 = peek()
                if k != "int":
                    raise PresentationSyntaxError("exponent must be an integer", line, c3)
                pos += 1
                atom = word_power(atom, int(v))
            out.extend(atom)
        return tuple(out)

    word = parse_seq(0)
    if pos != len(toks):
        raise PresentationSyntaxError("unbalanced ')'", line, toks[pos][2])
    return free_reduce(word)


# --------------------------------------------------------------------------
# finitely presented groups


@dataclass(frozen=True, eq=False)
class FpPresentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise PresentationSyntaxError("generator names must be unique")
        rels = []
        for r in self.relators:
            r = free_reduce(r)
            if r and r not in rels:
                rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def is_free(self) -> bool:
        return not self.relators

    def format_word(self, word: Word) -> str:
        return format_word(word, self.generators)

    def parse_word(self, text: str, line: int | None = None) -> Word:
        return parse_word(text, self.generators, line)

    def normal_form(self, word: Word) -> Word:
        """Free reduction; a normal form only when the group is free."""
        return free_reduce(word)

    def to_text(self) -> str:
        lines = ["kind fp", "gens " + " ".join(self.generators)]
        lines += ["rel " + self.format_word(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        rels = ", ".join(self.format_word(r) for r in self.relators)
        return f"<{', '.join(self.generators)} | {rels}>"


# --------------------------------------------------------------------------
# polycyclic presentations


@dataclass(frozen=True, eq=False)
class PcPresentation:
    """Polycyclic presentation on ``g_0 .. g_{n-1}``.

    ``orders[i]`` is the relative order or ``None`` for infinite.
    ``powers[i]`` is the right-hand side of ``g_i^{r_i}``; ``conj[(i, j)]``
    of ``g_j^{g_i}`` and ``conj_inv[(i, j)]`` of ``g_j^{g_i^-1}`` for
    ``i < j``.  Missing conjugation relations mean the generators commute.
    """

    generators: tuple[str, ...]
    orders: tuple[int | None, ...]
    powers: dict = field(default_factory=dict)
    conj: dict = field(default_factory=dict)
    conj_inv: dict = field(default_factory=dict)
    budget: int = COLLECTION_BUDGET

    def __post_init__(self):
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise PresentationSyntaxError("generator names must be unique")
        if len(self.orders) != n:
            raise PresentationSyntaxError("one relative order per generator")
        for r in self.orders:
            if r is not None and r < 2:
                raise PresentationSyntaxError("relative orders must be >= 2 or infinite")
        for i, w in self.powers.items():
            if self.orders[i] is None:
                raise PresentationSyntaxError(
                    f"power relation given for infinite generator {self.generators[i]}")
            self._check_tail(w, i, f"power relation of {self.generators[i]}")
        for table in (self.conj, self.conj_inv):
            for (i, j), w in table.items():
                if not i < j:
                    raise BadGeneratorIndexOrder(
                        f"conjugation {self.generators[j]}^{self.generators[i]} "
                        "must conjugate a later generator by an earlier one")
                self._check_tail(w, i, f"conjugation {self.generators[j]}^{self.generators[i]}")
        for (i, j), w in self.conj.items():
            if self.orders[i] is None and (i, j) not in self.conj_inv \
                    and free_reduce(w) != ((j, 1),):
                raise PresentationSyntaxError(
                    f"infinite generator {self.generators[i]} needs an explicit inverse "
                    f"conjugation relation for {self.generators[j]}")

    def _check_tail(self, w, i, what):
        for g, _ in w:
            if g <= i:
                raise BadGeneratorIndexOrder(
                    f"{what} uses {self.generators[g]}, which does not come after "
                    f"{self.generators[i]}")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def is_finite(self) -> bool:
        return all(r is not None for r in self.orders)

    def group_order(self) -> int | None:
        if not self.is_finite:
            return None
        out = 1
        for r in self.orders:
            out *= r
        return out

    def _conj_word(self, i: int, j: int, sign: int) -> Word:
        table = self.conj if sign > 0 else self.conj_inv
        return table.get((i, j), ((j, 1),))

    def _commutes(self, i: int) -> bool:
        n = self.ngens
        return all((i, j) not in self.conj and (i, j) not in self.conj_inv
                   for j in range(i + 1, n))

    @cached_property
    def _trivial_conj(self) -> tuple[bool, ...]:
        return tuple(self._commutes(i) for i in range(self.ngens))

    # -- collection -------------------------------------------------------

    def multiply(self, vec: Sequence[int], word: Word, budget: int | None = None
                 ) -> CollectedWord:
        """Collected form of ``vec * word``, processing letters left to right."""
        v = list(vec)
        counter = [budget if budget is not None else self.budget]
        self._mul_word(v, word, counter)
        return tuple(v)

    def collect(self, word: Word, budget: int | None = None) -> CollectedWord:
        return self.multiply((0,) * self.ngens, word, budget)

    def _mul_word(self, v, word, counter):
        """Entries of ``word`` may be letters ``(g, +-1)`` or syllables
        ``(g, e)``; runs of equal letters are merged into syllables."""
        k, n = 0, len(word)
        while k < n:
            g, e = word[k]
            m = k + 1
            if e in (1, -1):
                while m < n and word[m] == (g, e):
                    m += 1
                e *= m - k
            if e not in (1, -1) and self._mul_syllable(v, g, e, counter):
                k = m
                continue
            step = 1 if e > 0 else -1
            for _ in range(abs(e)):
                self._mul_letter(v, g, step, counter)
            k = m

    def _mul_syllable(self, v, i, e, counter) -> bool:
        """Absorb ``g_i^e`` in one step when nothing to the right of ``i``
        has to move past it and no power relation fires."""
        if not (self._trivial_conj[i] or not any(v[i + 1:])):
            return False
        r = self.orders[i]
        if r is not None and not 0 <= v[i] + e < r:
            return False
        counter[0] -= 1
        if counter[0] < 0:
            raise CollectionBudgetExceeded("collection step budget exhausted")
        v[i] += e
        return True

    def _mul_letter(self, v, i, eps, counter):
        counter[0] -= 1
        if counter[0] < 0:
            raise CollectionBudgetExceeded("collection step budget exhausted")
        r = self.orders[i]
        n = self.ngens
        if eps < 0 and r is not None:
            # g_i^-1 = g_i^(r-1) w_i^-1
            for _ in range(r - 1):
                self._mul_letter(v, i, 1, counter)
            self._mul_word(v, invert(self.powers.get(i, ())), counter)
            return
        if self._trivial_conj[i] or not any(v[i + 1:]):
            tail = None
        else:
            tail = v[i + 1:]
            for k in range(i + 1, n):
                v[k] = 0
        if tail is None:
            # tail commutes with g_i: add to exponent i, then reduce
            if r is None or v[i] + eps < r:
                v[i] += eps
                return
            saved = v[i + 1:]
            for k in range(i + 1, n):
                v[k] = 0
            v[i] = 0
            self._mul_word(v, self.powers.get(i, ()), counter)
            self._mul_vec(v, i + 1, saved, counter)
            return
        v[i] += eps
        if r is not None and v[i] == r:
            v[i] = 0
            self._mul_word(v, self.powers.get(i, ()), counter)
        # multiply by tail^(g_i^eps) = prod_j conj(g_j)^e_j
        for off, e in enumerate(tail):
            if e:
                j = i + 1 + off
                w = self._conj_word(i, j, eps)
                if len(w) == 1:
                    self._mul_word(v, ((w[0][0], w[0][1] * e),), counter)
                else:
                    self._mul_word(v, word_power(w, e), counter)

    def _mul_vec(self, v, start, saved, counter):
        for off, e in enumerate(saved):
            if e:
                self._mul_word(v, ((start + off, e),), counter)

    def to_syllables(self, vec: Sequence[int]) -> Word:
        """``vec`` as a syllable sequence ``((i, e_i), ...)``; accepted by
        :meth:`multiply` and :meth:`collect` but not by word utilities."""
        return tuple((i, e) for i, e in enumerate(vec) if e)

    def image_vec(self, images: Sequence[Word], vec: Sequence[int]) -> CollectedWord:
        """Collected image of ``vec`` under the substitution ``g_i -> images[i]``."""
        out: list[tuple[int, int]] = []
        for i, e in enumerate(vec):
            if e:
                img = images[i]
                if len(img) == 1:
                    out.append((img[0][0], img[0][1] * e))
                else:
                    out.extend(word_power(img, e))
        return self.collect(tuple(out))

    def to_word(self, vec: Sequence[int]) -> Word:
        out: list[tuple[int, int]] = []
        for i, e in enumerate(vec):
            out.extend(letter_power(i, e))
        return tuple(out)

    def identity(self) -> CollectedWord:
        return (0,) * self.ngens

    def inverse(self, vec: Sequence[int]) -> CollectedWord:
        return self.collect(invert(self.to_word(vec)))

    def equal(self, u: Word, v: Word) -> bool:
        return self.collect(u) == self.collect(v)

    def format_word(self, word: Word) -> str:
        return format_word(word, self.generators)

    def format_vec(self, vec: Sequence[int]) -> str:
        return format_word(self.to_word(vec), self.generators)

    def parse_word(self, text: str, line: int | None = None) -> Word:
        return parse_word(text, self.generators, line)

    def normal_form(self, word: Word) -> Word:
        return self.to_word(self.collect(word))

    # -- relators and consistency ------------------------------------------

    @cached_property
    def relators(self) -> tuple[Word, ...]:
        """Defining relators: powers, and conjugation relations in both
        directions where an inverse relation is part of the presentation."""
        rels = []
        for i, r in enumerate(self.orders):
            if r is not None:
                rels.append(letter_power(i, r) + invert(self.powers.get(i, ())))
        for i in range(self.ngens):
            for j in range(i + 1, self.ngens):
                w = self._conj_word(i, j, 1)
                rels.append(((i, -1), (j, 1), (i, 1)) + invert(w))
                if self.orders[i] is None:
                    w = self._conj_word(i, j, -1)
                    rels.append(((i, 1), (j, 1), (i, -1)) + invert(w))
        out = []
        for r in rels:
            r = free_reduce(r)
            if r and r not in out:
                out.append(r)
        return tuple(out)

    def check_consistency(self, length: int = CONSISTENCY_WORD_LENGTH) -> None:
        """Bounded overlap test: ``(u v) w == u (v w)`` for all words over
        generators and inverses up to total length ``length``, plus the
        power overlaps ``g^r`` against single letters.

        Passing is a soundness assumption, not a confluence proof.
        """
        n = self.ngens
        letters = [(i, e) for i in range(n) for e in (1, -1)]

        def assoc(u, v, w):
            left = self.multiply(self.collect(u + v), w)
            right = self.multiply(self.collect(u), self.to_word(self.collect(v + w)))
            if left != right:
                raise InconsistentPresentation(
                    f"overlap {self.format_word(u)} | {self.format_word(v)} | "
                    f"{self.format_word(w)} collects to {self.format_vec(left)} "
                    f"and {self.format_vec(right)}")

        for k in range(3, length + 1):
            for combo in itertools.product(letters, repeat=k):
                for a in range(1, k - 1):
                    for b in range(a + 1, k):
                        assoc(combo[:a], combo[a:b], combo[b:])
        if length < 3:
            for combo in itertools.product(letters, repeat=3):
                assoc(combo[:1], combo[1:2], combo[2:])
        for i, r in enumerate(self.orders):
            if r is None:
                continue
            gi = ((i, 1),)
            powr = letter_power(i, r - 1)
            for letter in letters:
                x = (letter,)
                assoc(powr, gi, x)
                assoc(x, powr, gi)
            assoc(powr, gi, gi)

    def to_text(self) -> str:
        names = self.generators
        lines = ["kind pc"]
        for name, r in zip(names, self.orders):
            lines.append(f"gen {name} order {'inf' if r is None else r}")
        for i in sorted(self.powers):
            lines.append(f"pow {names[i]} = {self.format_word(self.powers[i])}")
        for (i, j) in sorted(self.conj):
            lines.append(f"conj {names[j]} ^ {names[i]} = {self.format_word(self.conj[(i, j)])}")
        for (i, j) in sorted(self.conj_inv):
            lines.append(f"conj {names[j]} ^ {names[i]}^-1 = "
                         f"{self.format_word(self.conj_inv[(i, j)])}")
        return "\n".join(lines) + "\n"


def collect(P: PcPresentation, word: Word) -> CollectedWord:
    return P.collect(word)


def pc_equal(P: PcPresentation, u: Word, v: Word) -> bool:
    return P.equal(u, v)


def pc_to_finite_group(P: PcPresentation) -> tuple[FiniteGroup, list[CollectedWord]]:
    """Multiplication table of a finite pc group; elements in exponent order."""
    if not P.is_finite:
        raise ValueError("presentation has a generator of infinite order")
    elems = list(itertools.product(*(range(r) for r in P.orders)))
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[P.multiply(a, P.to_word(b))] for b in elems] for a in elems]
    labels = [P.format_vec(e) for e in elems]
    return build_cayley(len(elems), table, labels=labels), elems


# --------------------------------------------------------------------------
# parsing


_INLINE_RE = re.compile(r"^\s*<(?P<gens>[^|>]*)\|(?P<rels>[^>]*)>\s*$", re.S)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_presentation(text: str, *, check: bool = True) -> FpPresentation | PcPresentation:
    """Parse ``<a, b | rel, ...>`` or the line-oriented ``kind fp`` /
    ``kind pc`` formats.  ``aut`` lines are ignored here.  Pc inputs go
    through the bounded overlap check unless ``check`` is false."""
    m = _INLINE_RE.match(text)
    if m:
        gens = tuple(g.strip() for g in m.group("gens").split(",") if g.strip())
        for g in gens:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", g):
                raise PresentationSyntaxError(f"bad generator name {g!r}", 1, None)
        rel_text = m.group("rels")
        col0 = m.start("rels")
        rels = []
        for piece in rel_text.split(","):
            if piece.strip():
                rels.append(parse_word(piece, gens, 1, col0))
            col0 += len(piece) + 1
        return FpPresentation(gens, tuple(rels))
    lines = [(k + 1, _strip_comment(l)) for k, l in enumerate(text.splitlines())]
    lines = [(k, l) for k, l in lines if l.strip()]
    if not lines or lines[0][1].split()[:1] != ["kind"]:
        raise PresentationSyntaxError("expected 'kind fp' or 'kind pc'",
                                      lines[0][0] if lines else 1, 1)
    kind = lines[0][1].split()[1] if len(lines[0][1].split()) > 1 else ""
    body = lines[1:]
    if kind == "fp":
        return _parse_fp(body)
    if kind == "pc":
        P = _parse_pc(body)
        if check:
            P.check_consistency()
        return P
    raise PresentationSyntaxError(f"unknown presentation kind {kind!r}", lines[0][0], 6)


def _parse_fp(body) -> FpPresentation:
    gens: tuple[str, ...] | None = None
    rels = []
    for ln, line in body:
        head, _, rest = line.strip().partition(" ")
        col = len(line) - len(line.lstrip()) + len(head) + 1
        if head == "gens":
            gens = tuple(rest.split())
        elif head == "rel":
            if gens is None:
                raise PresentationSyntaxError("'rel' before 'gens'", ln, 1)
            rels.append(parse_word(rest, gens, ln, col))
        elif head == "aut":
            continue
        else:
            raise PresentationSyntaxError(f"unknown directive {head!r}", ln, 1)
    if gens is None:
        raise PresentationSyntaxError("missing 'gens' line", body[0][0] if body else 1, 1)
    return FpPresentation(gens, tuple(rels))


_CONJ_RE = re.compile(r"^\s*(?P<j>\S+)\s*\^\s*(?P<i>[A-Za-z_][A-Za-z0-9_']*)\s*"
                      r"(?P<inv>\^\s*-1)?\s*=\s*(?P<rhs>.*)$")


def _parse_pc(body) -> PcPresentation:
    names: list[str] = []
    orders: list[int | None] = []
    pending = []
    for ln, line in body:
        head, _, rest = line.strip().partition(" ")
        if head == "gen":
            parts = rest.split()
            if len(parts) != 3 or parts[1] != "order":
                raise PresentationSyntaxError("expected 'gen <name> order <r|inf>'", ln, 1)
            names.append(parts[0])
            if parts[2] in ("inf", "infinity", "0"):
                orders.append(None)
            else:
                try:
                    orders.append(int(parts[2]))
                except ValueError:
                    raise PresentationSyntaxError(f"bad order {parts[2]!r}", ln,
                                                  line.index(parts[2]) + 1) from None
        elif head in ("pow", "conj"):
            pending.append((ln, line, head, rest))
        elif head == "aut":
            continue
        else:
            raise PresentationSyntaxError(f"unknown directive {head!r}", ln, 1)
    index = {n: i for i, n in enumerate(names)}
    powers, conj, conj_inv = {}, {}, {}
    for ln, line, head, rest in pending:
        rest_col = line.index(rest) if rest else len(line)
        if head == "pow":
            lhs, eq, rhs = rest.partition("=")
            name = lhs.strip()
            if not eq or name not in index:
                raise PresentationSyntaxError("expected 'pow <name> = <word>'", ln, rest_col + 1)
            i = index[name]
            w = parse_word(rhs, names, ln, rest_col + len(lhs) + 1)
            _check_order(w, i, names, ln, f"power relation of {name}")
            powers[i] = w
        else:
            m = _CONJ_RE.match(rest)
            if not m:
                raise PresentationSyntaxError(
                    "expected 'conj <g_j> ^ <g_i> = <word>' or 'conj <g_j> ^ <g_i>^-1 = <word>'",
                    ln, rest_col + 1)
            gj, gi = m.group("j"), m.group("i")
            for g in (gj, gi):
                if g not in index:
                    raise PresentationSyntaxError(f"unknown generator {g!r}", ln,
                                                  rest_col + rest.index(g) + 1)
            i, j = index[gi], index[gj]
            if not i < j:
                raise BadGeneratorIndexOrder(
                    f"conjugation {gj}^{gi}: {gj} must come after {gi}", ln,
                    rest_col + 1)
            w = parse_word(m.group("rhs"), names, ln, rest_col + m.start("rhs"))
            _check_order(w, i, names, ln, f"conjugation {gj}^{gi}")
            (conj_inv if m.group("inv") else conj)[(i, j)] = w
    return PcPresentation(tuple(names), tuple(orders), powers, conj, conj_inv)


def _check_order(word, i, names, ln, what):
    for g, _ in word:
        if g <= i:
            raise BadGeneratorIndexOrder(
                f"{what} references {names[g]}, which does not come after {names[i]}", ln, None)


# --------------------------------------------------------------------------
# automorphisms given by generator images


@dataclass(frozen=True, eq=False)
class PresAutomorphism:
    presentation: object
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]
    verified: bool = True

    def apply(self, word: Word) -> Word:
        return _substitute(self.presentation, self.images, word)

    def apply_inverse(self, word: Word) -> Word:
        return _substitute(self.presentation, self.inverse_images, word)

    def inverse(self) -> "PresAutomorphism":
        return PresAutomorphism(self.presentation, self.inverse_images, self.images,
                                self.verified)

    @property
    def is_identity(self) -> bool:
        P = self.presentation
        return all(P.normal_form(w) == P.normal_form(((i, 1),))
                   for i, w in enumerate(self.images))


def _substitute(P, images, word: Word) -> Word:
    out: list[tuple[int, int]] = []
    for g, e in word:
        out.extend(images[g] if e > 0 else invert(images[g]))
    return P.normal_form(tuple(out))


def apply_automorphism(P, phi: PresAutomorphism, word: Word) -> Word:
    """Substitute generator images, then collect (pc) or freely reduce (fp)."""
    return phi.apply(word)


def _pc_find_preimages(P: PcPresentation, images: Sequence[Word], radius: int) -> tuple[Word, ...]:
    targets = {P.collect(((i, 1),)): i for i in range(P.ngens)}
    found: dict[int, Word] = {}
    for vec in ball_enumerate(P, radius):
        word = P.to_word(vec)
        img = P.collect(_flat(images, word))
        if img in targets and targets[img] not in found:
            found[targets[img]] = word
            if len(found) == P.ngens:
                break
    if len(found) != P.ngens:
        raise NotBijective(f"no preimage found within radius {radius}; give 'aut inverse'")
    return tuple(found[i] for i in range(P.ngens))


def _flat(images, word):
    out = []
    for g, e in word:
        out.extend(images[g] if e > 0 else invert(images[g]))
    return tuple(out)


def make_automorphism(P, images: Sequence[Word], inverse_images: Sequence[Word] | None = None,
                      *, search_radius: int = 6) -> PresAutomorphism:
    """Validate generator images as an automorphism.

    For pc presentations relator images must collect to the identity and
    both composites must fix every generator; a missing inverse is found
    by a bounded ball search.  For fp presentations only relator images
    that freely reduce to a cyclic conjugate of a relator (or to nothing)
    can be confirmed; otherwise the result is flagged ``verified=False``.
    """
    images = tuple(free_reduce(w) for w in images)
    if len(images) != P.ngens:
        raise NotBijective(f"expected {P.ngens} generator images, got {len(images)}")
    if isinstance(P, PcPresentation):
        for r in P.relators:
            if any(P.collect(_flat(images, r))):
                raise NotBijective(f"relator {P.format_word(r)} does not map to the identity")
        if inverse_images is None:
            inverse_images = _pc_find_preimages(P, images, search_radius)
        inverse_images = tuple(free_reduce(w) for w in inverse_images)
        for i in range(P.ngens):
            gi = P.collect(((i, 1),))
            if P.collect(_flat(images, inverse_images[i])) != gi or \
                    P.collect(_flat(inverse_images, images[i])) != gi:
                raise NotBijective(f"inverse images do not invert generator {P.generators[i]}")
        return PresAutomorphism(P, images, inverse_images, True)
    verified = all(_fp_relator_ok(P, _flat(images, r)) for r in P.relators)
    if inverse_images is None:
        if all(len(w) == 1 for w in images) and \
                sorted(g for w in images for g, _ in w) == list(range(P.ngens)):
            inv = [None] * P.ngens
            for i, w in enumerate(images):
                g, e = w[0]
                inv[g] = ((i, e),)
            inverse_images = tuple(inv)
        else:
            raise NotBijective("fp automorphisms need explicit inverse images "
                               "unless they permute generators up to sign")
    inverse_images = tuple(free_reduce(w) for w in inverse_images)
    verified = verified and all(_fp_relator_ok(P, _flat(inverse_images, r)) for r in P.relators)
    for i in range(P.ngens):
        back = free_reduce(_flat(images, inverse_images[i]))
        forth = free_reduce(_flat(inverse_images, images[i]))
        if back != ((i, 1),) or forth != ((i, 1),):
            if P.is_free:
                raise NotBijective(f"inverse images do not invert generator {P.generators[i]}")
            verified = False
    return PresAutomorphism(P, images, inverse_images, verified)


def _cyclic_reduce(w: Word) -> Word:
    w = free_reduce(w)
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return w


def _fp_relator_ok(P: FpPresentation, w: Word) -> bool:
    w = _cyclic_reduce(w)
    if not w:
        return True
    for r in P.relators:
        for rr in (r, invert(r)):
            rr = _cyclic_reduce(rr)
            if len(rr) == len(w) and any(rr[k:] + rr[:k] == w for k in range(len(rr))):
                return True
    return False


def identity_pres_automorphism(P) -> PresAutomorphism:
    gens = tuple(((i, 1),) for i in range(P.ngens))
    return PresAutomorphism(P, gens, gens, True)


# --------------------------------------------------------------------------
# semidirect product with Z


def _fresh_name(base: str, taken: Sequence[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def gamma_presentation(P, phi: PresAutomorphism):
    """Presentation of ``G x|_phi Z`` with the new generator ``t`` first
    and relations ``t g t^-1 = phi(g)``; pc inputs also get
    ``t^-1 g t = phi^-1(g)`` and stay polycyclic."""
    t = _fresh_name("t", P.generators)
    gens = (t,) + tuple(P.generators)
    if isinstance(P, PcPresentation):
        powers = {i + 1: shift_word(w, 1) for i, w in P.powers.items()}
        conj = {(i + 1, j + 1): shift_word(w, 1) for (i, j), w in P.conj.items()}
        conj_inv = {(i + 1, j + 1): shift_word(w, 1) for (i, j), w in P.conj_inv.items()}
        for j in range(P.ngens):
            g = ((j, 1),)
            down, up = phi.apply_inverse(g), phi.apply(g)
            if down == g and up == g:
                continue
            conj[(0, j + 1)] = shift_word(down, 1)
            conj_inv[(0, j + 1)] = shift_word(up, 1)
        return PcPresentation(gens, (None,) + tuple(P.orders), powers, conj, conj_inv, P.budget)
    rels = [shift_word(r, 1) for r in P.relators]
    for j in range(P.ngens):
        rels.append(((0, 1), (j + 1, 1), (0, -1)) + invert(shift_word(phi.images[j], 1)))
    return FpPresentation(gens, tuple(rels))


# --------------------------------------------------------------------------
# balls


def ball_stream(P: PcPresentation, budget: int = BALL_BUDGET) -> Iterator[CollectedWord]:
    """Distinct normal forms in breadth-first order of word length;
    generators by index, each positive letter before its inverse.  Ends
    when a whole layer adds nothing (the group is then finite)."""
    start = P.identity()
    seen = {start}
    yield start
    layer = [start]
    letters = [((i, e),) for i in range(P.ngens) for e in (1, -1)]
    while layer:
        nxt = []
        for vec in layer:
            for letter in letters:
                w = P.multiply(vec, letter)
                if w not in seen:
                    if len(seen) >= budget:
                        raise BudgetExceededError(f"ball exceeds {budget} elements")
                    seen.add(w)
                    nxt.append(w)
                    yield w
        layer = nxt


def ball_enumerate(P: PcPresentation, radius: int, budget: int = BALL_BUDGET
                   ) -> Iterator[CollectedWord]:
    """Normal forms of all words of length at most ``radius``."""
    start = P.identity()
    seen = {start}
    yield start
    layer = [start]
    letters = [((i, e),) for i in range(P.ngens) for e in (1, -1)]
    for _ in range(radius):
        nxt = []
        for vec in layer:
            for letter in letters:
                w = P.multiply(vec, letter)
                if w not in seen:
                    if len(seen) >= budget:
                        raise BudgetExceededError(f"ball exceeds {budget} elements")
                    seen.add(w)
                    nxt.append(w)
                    yield w
        layer = nxt
        if not layer:
            break


def free_ball_stream(ngens: int) -> Iterator[Word]:
    """Freely reduced words in shortlex order of generation (breadth-first)."""
    yield ()
    layer: list[Word] = [()]
    letters = [(i, e) for i in range(ngens) for e in (1, -1)]
    while layer and ngens:
        nxt = []
        for w in layer:
            for a in letters:
                if w and w[-1] == (a[0], -a[1]):
                    continue
                u = w + (a,)
                nxt.append(u)
                yield u
        layer = nxt


# --------------------------------------------------------------------------
# conversions


def cayley_presentation(G: FiniteGroup) -> tuple[FpPresentation, tuple[Word, ...]]:
    """Presentation of a finite group on its greedy generators, with one
    relator ``w(x) g w(xg)^-1`` per Cayley-graph edge off the Schreier tree.
    Also returns a word for every element."""
    names = tuple(f"g{k}" for k in range(len(G.generators)))
    words = tuple(tuple((j, 1) for j in w) for w in G.words)
    rels = []
    for x in range(G.order):
        for j, g in enumerate(G.generators):
            r = free_reduce(words[x] + ((j, 1),) + invert(words[G.mul(x, g)]))
            if r:
                rels.append(r)
    return FpPresentation(names, tuple(rels)), words


def finite_automorphism_as_pres(P: FpPresentation, words, G: FiniteGroup, phi
                                ) -> PresAutomorphism:
    images = tuple(words[phi(g)] for g in G.generators)
    inv = tuple(words[phi.inverse_images[g]] for g in G.generators)
    return PresAutomorphism(P, images, inv, True)


def abelian_to_pc(G, phi=None):
    """Polycyclic presentation of a finitely generated abelian group (free
    generators ``x1..`` then torsion generators ``y1..``) and, when given,
    the matching automorphism."""
    names = tuple([f"x{k + 1}" for k in range(G.rank)] +
                  [f"y{k + 1}" for k in range(len(G.torsion))])
    orders = (None,) * G.rank + tuple(G.torsion)
    P = PcPresentation(names, orders)
    if phi is None:
        return P, None
    n = G.ngens
    images = []
    for j in range(n):
        w: list[tuple[int, int]] = []
        for i in range(n):
            w.extend(letter_power(i, phi.matrix[i][j]))
        images.append(P.normal_form(tuple(w)))
    return P, make_automorphism(P, images)
