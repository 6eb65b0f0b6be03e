"""Line-oriented input files: groups, automorphisms, elements, matrices.

Group files start with ``kind <cayley|perm|abelian|fp|pc>``.  Automorphism
lines (``aut ...``) may sit in the group file or in a separate file; every
error carries ``path:line:col`` provenance.

    kind cayley            kind perm              kind abelian
    order 2                degree 3               rank 1
    0 1                    gen (0 1)              torsion 2
    1 0                    gen (0 1 2)            aut matrix
    aut perm 0 1           aut perm 0 1 2 3 4 5   -1 0
                                                  0 1

Automorphism forms:

* ``aut perm i_0 i_1 ...``: element images of a finite group (indices);
* ``aut gens <perm>, <perm>, ...``: images of the ``gen`` lines of a
  ``kind perm`` group;
* ``aut inner <element>``: conjugation ``x -> g x g^-1`` (finite groups);
* ``aut images <word> <word> ...``: generator images of a presentation
  (commas optional), with an optional ``aut inverse ...`` line;
* ``aut matrix`` followed by integer rows: abelian groups, columns are
  images of the coordinate generators.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from twistconj.abelian import AbelianEndo, FgAbelianGroup
from twistconj.errors import PresentationSyntaxError, TwistConjError
from twistconj.groups import (
    Automorphism,
    FiniteGroup,
    PermGroup,
    build_cayley,
    check_automorphism,
    format_cycles,
    identity_automorphism,
    inner_automorphism,
    parse_cycles,
    perm_closure,
    perm_identity,
    perm_mul,
)
from twistconj.presentations import (
    identity_pres_automorphism,
    make_automorphism,
    parse_presentation,
    parse_word,
)

Lines = list[tuple[int, str]]


def _lines(text: str) -> Lines:
    out = []
    for k, raw in enumerate(text.splitlines()):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            out.append((k + 1, line))
    return out


@dataclass
class GroupFile:
    """A parsed group file.  ``group`` is a :class:`FiniteGroup`,
    :class:`FgAbelianGroup`, :class:`PcPresentation` or
    :class:`FpPresentation`."""

    kind: str
    group: object
    path: str | None = None
    perm_model: PermGroup | None = None
    aut_lines: Lines = field(default_factory=list)

    @property
    def is_finite_table(self) -> bool:
        return isinstance(self.group, FiniteGroup)


def _err(msg, ln, col, path):
    return PresentationSyntaxError(msg, ln, col, path)


def _ints(text: str, ln: int, path, col0: int = 1) -> list[int]:
    out = []
    for m in re.finditer(r"\S+", text.replace(",", " ")):
        try:
            out.append(int(m.group()))
        except ValueError:
            raise _err(f"expected an integer, got {m.group()!r}", ln, col0 + m.start(), path) from None
    return out


def parse_group(text: str, path: str | None = None) -> GroupFile:
    lines = _lines(text)
    if not lines:
        raise _err("empty group file", 1, 1, path)
    ln, first = lines[0]
    head = first.split()
    if head[0] != "kind" or len(head) != 2:
        raise _err("expected 'kind <cayley|perm|abelian|fp|pc>'", ln, 1, path)
    kind = head[1]
    body = lines[1:]
    if kind == "cayley":
        return GroupFile(kind, _parse_cayley(body, path), path, None, _aut_block(body))
    if kind == "perm":
        P = _parse_perm(body, path)
        name = " ".join(format_cycles(g) for g in P.generators)
        return GroupFile(kind, P.to_finite_group(f"<{name}>"), path, P, _aut_block(body))
    if kind == "abelian":
        return GroupFile(kind, _parse_abelian(body, path), path, None, _aut_block(body))
    if kind in ("fp", "pc"):
        try:
            G = parse_presentation(text)
        except PresentationSyntaxError as exc:
            raise exc.with_path(path) from None
        except TwistConjError as exc:
            raise _err(str(exc), ln, None, path) from None
        return GroupFile(kind, G, path, None, _aut_block(body))
    raise _err(f"unknown group kind {kind!r}", ln, 6, path)


def _is_matrix_row(line: str) -> bool:
    return bool(re.fullmatch(r"[\s\d,+-]+", line))


def _aut_block(body: Lines) -> Lines:
    """``aut`` lines plus the integer rows following ``aut matrix``."""
    out: Lines = []
    in_matrix = False
    for ln, line in body:
        word = line.split()[0]
        if word == "aut":
            out.append((ln, line))
            in_matrix = line.split()[1:2] == ["matrix"]
        elif in_matrix and _is_matrix_row(line):
            out.append((ln, line))
        else:
            in_matrix = False
    return out


def _parse_cayley(body: Lines, path) -> FiniteGroup:
    order = None
    rows = []
    for ln, line in body:
        word = line.split()[0]
        if word == "order":
            vals = _ints(line.split(None, 1)[1] if len(line.split()) > 1 else "", ln, path)
            if len(vals) != 1 or vals[0] < 1:
                raise _err("expected 'order N' with N >= 1", ln, 1, path)
            order = vals[0]
        elif word == "aut":
            break
        elif word in ("name", "labels"):
            continue
        else:
            if order is None:
                raise _err("table rows before 'order'", ln, 1, path)
            row = _ints(line, ln, path)
            if len(row) != order:
                raise _err(f"row has {len(row)} entries, expected {order}", ln, 1, path)
            for v in row:
                if not 0 <= v < order:
                    raise _err(f"entry {v} outside 0..{order - 1}", ln, line.find(str(v)) + 1, path)
            rows.append((ln, row))
    if order is None:
        raise _err("missing 'order' line", body[0][0] if body else 1, 1, path)
    if len(rows) != order:
        ln = rows[-1][0] if rows else (body[0][0] if body else 1)
        raise _err(f"expected {order} table rows, found {len(rows)}", ln, 1, path)
    labels = None
    name = ""
    for ln, line in body:
        parts = line.split(None, 1)
        if parts[0] == "labels" and len(parts) == 2:
            labels = parts[1].split()
            if len(labels) != order:
                raise _err(f"expected {order} labels", ln, 1, path)
        elif parts[0] == "name" and len(parts) == 2:
            name = parts[1].strip()
    try:
        return build_cayley(order, [r for _, r in rows], labels=labels, name=name)
    except TwistConjError as exc:
        raise _err(f"invalid Cayley table: {exc}", rows[0][0], 1, path) from None


def _parse_perm(body: Lines, path) -> PermGroup:
    degree = None
    gens = []
    for ln, line in body:
        parts = line.split(None, 1)
        if parts[0] == "degree":
            vals = _ints(parts[1] if len(parts) > 1 else "", ln, path)
            if len(vals) != 1 or vals[0] < 1:
                raise _err("expected 'degree N' with N >= 1", ln, 1, path)
            degree = vals[0]
        elif parts[0] == "gen":
            if degree is None:
                raise _err("'gen' before 'degree'", ln, 1, path)
            try:
                gens.append(parse_cycles(parts[1] if len(parts) > 1 else "()", degree))
            except TwistConjError as exc:
                raise _err(str(exc), ln, 5, path) from None
        elif parts[0] == "aut":
            continue
        elif parts[0] == "name":
            continue
        elif not _is_matrix_row(line):
            raise _err(f"unknown directive {parts[0]!r}", ln, 1, path)
    if degree is None:
        raise _err("missing 'degree' line", body[0][0] if body else 1, 1, path)
    try:
        return perm_closure(degree, gens)
    except TwistConjError as exc:
        raise _err(str(exc), body[0][0], 1, path) from None


def _parse_abelian(body: Lines, path) -> FgAbelianGroup:
    rank = 0
    torsion: list[int] = []
    seen_rank = False
    for ln, line in body:
        parts = line.split(None, 1)
        if parts[0] == "rank":
            vals = _ints(parts[1] if len(parts) > 1 else "", ln, path, 6)
            if len(vals) != 1 or vals[0] < 0:
                raise _err("expected 'rank r' with r >= 0", ln, 1, path)
            rank = vals[0]
            seen_rank = True
        elif parts[0] == "torsion":
            torsion = _ints(parts[1] if len(parts) > 1 else "", ln, path, 9)
        elif parts[0] == "aut" or _is_matrix_row(line):
            continue
        else:
            raise _err(f"unknown directive {parts[0]!r}", ln, 1, path)
    if not seen_rank and not torsion:
        raise _err("missing 'rank' line", body[0][0] if body else 1, 1, path)
    try:
        return FgAbelianGroup(rank, tuple(torsion))
    except TwistConjError as exc:
        raise _err(str(exc), body[0][0] if body else 1, 1, path) from None


def load_group(path: str | Path) -> GroupFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise _err(f"cannot read group file: {exc.strerror}", None, None, str(p)) from None
    return parse_group(text, str(p))


# --------------------------------------------------------------------------
# automorphisms


def parse_automorphism(gf: GroupFile, lines: Lines, path: str | None = None):
    """Automorphism of ``gf.group`` from ``aut`` lines; the identity when
    there are none."""
    G = gf.group
    path = path if path is not None else gf.path
    auts = [(ln, l) for ln, l in lines if l.split()[0] == "aut"]
    if not auts:
        if isinstance(G, FiniteGroup):
            return identity_automorphism(G)
        if isinstance(G, FgAbelianGroup):
            n = G.ngens
            return AbelianEndo(G, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
        return identity_pres_automorphism(G)
    ln, line = auts[0]
    parts = line.split(None, 2)
    form = parts[1] if len(parts) > 1 else ""
    rest = parts[2] if len(parts) > 2 else ""
    col = line.find(rest) + 1 if rest else len(line) + 1
    try:
        if isinstance(G, FiniteGroup):
            return _finite_aut(gf, form, rest, ln, col, path)
        if isinstance(G, FgAbelianGroup):
            if form != "matrix":
                raise _err("abelian groups take 'aut matrix' followed by rows", ln, 5, path)
            rows = []
            for k, l in lines:
                if k > ln and l.split()[0] != "aut":
                    rows.append(_ints(l, k, path))
            if len(rows) != G.ngens or any(len(r) != G.ngens for r in rows):
                raise _err(f"expected a {G.ngens}x{G.ngens} matrix", ln, 1, path)
            return AbelianEndo(G, tuple(tuple(r) for r in rows)).require_automorphism()
        if form != "images":
            raise _err("presentations take 'aut images <word> ...'", ln, 5, path)
        images = _word_list(rest, G.generators, ln, col, path)
        inverse = None
        for k, l in auts[1:]:
            p2 = l.split(None, 2)
            if p2[1:2] == ["inverse"]:
                r2 = p2[2] if len(p2) > 2 else ""
                inverse = _word_list(r2, G.generators, k, l.find(r2) + 1, path)
        return make_automorphism(G, images, inverse)
    except PresentationSyntaxError as exc:
        raise exc if exc.path else exc.with_path(path) from None
    except TwistConjError as exc:
        raise _err(f"invalid automorphism: {exc}", ln, None, path) from None


def _word_list(text: str, names, ln, col, path):
    pieces = [p for p in re.split(r",", text)] if "," in text else text.split()
    out = []
    offset = 0
    for p in pieces:
        start = text.find(p, offset)
        out.append(parse_word(p, names, ln, col - 1 + start))
        offset = start + len(p)
    if len(out) != len(names):
        raise _err(f"expected {len(names)} generator images, got {len(out)}", ln, col, path)
    return out


def _finite_aut(gf: GroupFile, form, rest, ln, col, path) -> Automorphism:
    G = gf.group
    if form == "perm":
        imgs = _ints(rest, ln, path, col)
        if len(imgs) != G.order:
            raise _err(f"expected {G.order} images, got {len(imgs)}", ln, col, path)
        for v in imgs:
            if not 0 <= v < G.order:
                raise _err(f"image {v} outside 0..{G.order - 1}", ln, col, path)
        return check_automorphism(G, imgs)
    if form == "inner":
        return inner_automorphism(G, parse_element(gf, rest, ln=ln, path=path))
    if form == "gens":
        if gf.perm_model is None:
            raise _err("'aut gens' needs a 'kind perm' group", ln, 5, path)
        P = gf.perm_model
        pieces = [p for p in rest.split(",")] if "," in rest else re.findall(r"(?:\([^)]*\))+", rest)
        try:
            images = [parse_cycles(p, P.degree) for p in pieces]
        except TwistConjError as exc:
            raise _err(str(exc), ln, col, path) from None
        if len(images) != len(P.generators):
            raise _err(f"expected {len(P.generators)} images, got {len(images)}", ln, col, path)
        return check_automorphism(G, _extend_perm_images(P, images))
    raise _err(f"unknown automorphism form {form!r} for a finite group", ln, 5, path)


def _extend_perm_images(P: PermGroup, images) -> list[int]:
    idx = P.index
    ident = perm_identity(P.degree)
    img = {ident: ident}
    queue = deque([ident])
    while queue:
        a = queue.popleft()
        for g, h in zip(P.generators, images):
            b, c = perm_mul(a, g), perm_mul(img[a], h)
            if b not in img:
                img[b] = c
                queue.append(b)
            elif img[b] != c:
                raise TwistConjError("generator images do not define a homomorphism")
    out = []
    for e in P.elements:
        if img[e] not in idx:
            raise TwistConjError(f"image {format_cycles(img[e])} lies outside the group")
        out.append(idx[img[e]])
    return out


def load_automorphism(gf: GroupFile, path: str | Path | None = None):
    if path is None:
        return parse_automorphism(gf, gf.aut_lines, gf.path)
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise _err(f"cannot read automorphism file: {exc.strerror}", None, None, str(p)) from None
    lines = _lines(text)
    if lines and lines[0][1].split()[0] != "aut":
        raise _err("expected an 'aut' line", lines[0][0], 1, str(p))
    return parse_automorphism(gf, lines, str(p))


# --------------------------------------------------------------------------
# elements and matrices


def parse_element(gf: GroupFile, text: str, *, ln: int | None = None, path=None,
                  what: str = "element"):
    """Element index (finite), coordinate tuple (abelian) or word."""
    G = gf.group
    text = text.strip()
    where = path if path is not None else f"--{what}" if what in ("x", "y") else None
    if isinstance(G, FiniteGroup):
        if re.fullmatch(r"-?\d+", text):
            v = int(text)
            if not 0 <= v < G.order:
                raise _err(f"element index {v} outside 0..{G.order - 1}", ln, 1, where)
            return v
        if gf.perm_model is not None:
            try:
                p = parse_cycles(text, gf.perm_model.degree)
            except TwistConjError as exc:
                raise _err(str(exc), ln, 1, where) from None
            if p not in gf.perm_model.index:
                raise _err(f"{text} is not in the group", ln, 1, where)
            return gf.perm_model.index[p]
        labels = list(G.labels) if G.labels else []
        if text in labels:
            return labels.index(text)
        raise _err(f"unknown element {text!r}", ln, 1, where)
    if isinstance(G, FgAbelianGroup):
        v = _ints(text, ln or 1, where)
        if len(v) != G.ngens:
            raise _err(f"expected {G.ngens} coordinates", ln, 1, where)
        return G.reduce(v)
    try:
        return G.parse_word(text, ln)
    except PresentationSyntaxError as exc:
        raise exc.with_path(where) from None


def format_element(gf: GroupFile, e) -> str:
    G = gf.group
    if isinstance(G, FiniteGroup):
        return G.label(e)
    if isinstance(G, FgAbelianGroup):
        return "(" + ", ".join(str(v) for v in e) + ")"
    return G.format_word(e)


def parse_matrix(text: str, path: str | None = None) -> list[list[int]]:
    rows = []
    for ln, line in _lines(text):
        if line.split()[0] in ("matrix", "aut"):
            continue
        rows.append((ln, _ints(line, ln, path)))
    if not rows:
        raise _err("no matrix rows", 1, 1, path)
    width = len(rows[0][1])
    for ln, r in rows:
        if len(r) != width:
            raise _err(f"row has {len(r)} entries, expected {width}", ln, 1, path)
    return [r for _, r in rows]


def load_matrix(path: str | Path) -> list[list[int]]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise _err(f"cannot read matrix file: {exc.strerror}", None, None, str(p)) from None
    return parse_matrix(text, str(p))
