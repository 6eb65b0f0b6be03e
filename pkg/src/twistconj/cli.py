"""Command line interface.

Exit codes: 0 success, 1 no affirmative result (budget exhausted, or a
certificate that fails verification), 2 input error.  ``--format
structured`` prints sorted-key JSON with no timestamps.

Structured schema.  Every object has ``command``; the other keys are

* info: ``kind`` and ``order`` (null when infinite or unknown).  Finite
  groups add ``generators``, ``automorphism`` (element indices),
  ``abelian``, ``automorphism_order``, ``conjugacy_classes``.  Abelian
  groups add ``group``, ``rank``, ``torsion``, ``matrix``.  Presentations
  add ``generators``, ``automorphism`` (image words), ``verified``, and
  fp ones ``relators``.
* twisted-classes: ``reidemeister`` and ``classes``, a list of
  ``{"representative", "members"}`` with element labels.
* reidemeister: ``reidemeister`` (null when infinite) and ``infinite``.
* decide: ``verdict`` (conjugate, not conjugate, unknown).  Decided runs
  add ``certificate`` (its text form) and ``step``; quotients add
  ``degree`` and ``image_order``; unknown adds ``reason`` and ``state``.
* separate: ``quotient_order``, ``images`` (element images), ``phi_K``;
  pair queries add ``verdict``, ``x_image``, ``y_image``.  Abelian pairs
  report ``moduli`` instead; infinite presented groups report as decide.
* gamma: ``presentation`` in the presentation file format.
* verify-burnside: ``results``, a list of ``{"R", "S", "ok"}``.
* snf: ``U``, ``D``, ``V``, ``diagonal``.
* verify-cert: ``ok`` and ``reason``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from twistconj.abelian import (
    AbelianQuotient,
    AbelianWitness,
    FgAbelianGroup,
    reidemeister_number_abelian,
    separate_abelian,
    smith_normal_form,
)
from twistconj.errors import (
    BudgetExceededError,
    EqualityUndecidable,
    TwistConjError,
)
from twistconj.formats import (
    GroupFile,
    format_element,
    load_automorphism,
    load_group,
    load_matrix,
    parse_element,
)
from twistconj.gamma import restrict_quotient
from twistconj.groups import FiniteGroup, check_automorphism, enumerate_automorphisms
from twistconj.presentations import (
    FpPresentation,
    PcPresentation,
    abelian_to_pc,
    cayley_presentation,
    finite_automorphism_as_pres,
    gamma_presentation,
    letter_power,
    pc_to_finite_group,
)
from twistconj.search import (
    BudgetExceeded,
    ConjugatorWitness,
    DecisionQuery,
    SearchState,
    certificate_from_text,
    certificate_to_text,
    decide,
    decide_parallel,
    gamma_hom_from_certificate,
    separate_reidemeister_partition,
    verify_certificate,
)
from twistconj.twisted import (
    INFINITE,
    twisted_partition,
    verify_burnside_finite,
)

log = logging.getLogger("twistconj")


class UsageError(Exception):
    pass


class Report:
    """Collects text lines and a structured payload side by side."""

    def __init__(self, command: str):
        self.lines: list[str] = []
        self.data: dict = {"command": command}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            return json.dumps(self.data, sort_keys=True, indent=2) + "\n"
        return "\n".join(self.lines) + ("\n" if self.lines else "")


# --------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--figure", metavar="PATH",
                        help="also write a figure (twisted-classes, verify-burnside)")
    common.add_argument("-v", "--verbose", action="store_true")

    grp = argparse.ArgumentParser(add_help=False)
    grp.add_argument("--group", required=True, metavar="PATH")
    grp.add_argument("--aut", metavar="PATH",
                     help="automorphism file; defaults to 'aut' lines in the group file, else identity")

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--x", metavar="ELEMENT")
    pair.add_argument("--y", metavar="ELEMENT")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--budget", type=_positive, default=10**5,
                        help="steps per procedure (default 100000)")
    search.add_argument("--degree-cap", type=_positive, default=6)
    search.add_argument("--heuristic", action="store_true",
                        help="allow free-reduction equality for presentations with relators (incomplete)")

    p = argparse.ArgumentParser(prog="twistconj",
                                description="Twisted conjugacy classes and Reidemeister numbers.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common, grp], help="describe a group and automorphism")
    sub.add_parser("twisted-classes", parents=[common, grp], help="list twisted classes")
    sub.add_parser("reidemeister", parents=[common, grp], help="Reidemeister number")
    d = sub.add_parser("decide", parents=[common, grp, pair, search],
                       help="decide twisted conjugacy with a certificate")
    d.add_argument("--state", metavar="PATH", help="resume from / save search state")
    d.add_argument("--parallel", action="store_true")
    s = sub.add_parser("separate", parents=[common, grp, pair, search],
                       help="finite quotient respecting phi separating x, y (or all classes)")
    s.add_argument("--parallel", action="store_true")
    sub.add_parser("gamma", parents=[common, grp], help="presentation of G x|_phi Z")
    b = sub.add_parser("verify-burnside", parents=[common, grp],
                       help="R(phi) against phi-fixed conjugacy classes")
    b.add_argument("--all", action="store_true", help="every automorphism of the group")
    n = sub.add_parser("snf", parents=[common], help="Smith normal form of an integer matrix")
    n.add_argument("matrix", metavar="PATH")
    v = sub.add_parser("verify-cert", parents=[common, grp, pair, search],
                       help="re-check a decide certificate")
    v.add_argument("cert", metavar="PATH")
    return p


# --------------------------------------------------------------------------
# helpers


def _load(args) -> tuple[GroupFile, object]:
    gf = load_group(args.group)
    phi = load_automorphism(gf, args.aut)
    return gf, phi


def _as_finite(gf: GroupFile, phi):
    """``(G, phi, label, to_index)`` for inputs describing a finite group,
    else None.  ``to_index`` maps a parsed element of ``gf`` into ``G``."""
    G = gf.group
    if isinstance(G, FiniteGroup):
        return G, phi, G.label, lambda e: e
    P = None
    if isinstance(G, FgAbelianGroup):
        if G.rank:
            return None
        P, pphi = abelian_to_pc(G, phi)
    elif isinstance(G, PcPresentation) and G.is_finite:
        P, pphi = G, phi
    if P is None:
        return None
    F, elems = pc_to_finite_group(P)
    pos = {e: i for i, e in enumerate(elems)}
    imgs = [pos[P.collect(pphi.apply(P.to_word(e)))] for e in elems]
    if isinstance(G, FgAbelianGroup):
        def to_index(v):
            return pos[P.collect(tuple(l for i, c in enumerate(v) for l in letter_power(i, c)))]
    else:
        def to_index(w):
            return pos[P.collect(w)]
    return F, check_automorphism(F, imgs), F.label, to_index


def _search_target(gf: GroupFile, phi, args, what=("x", "y")):
    """Group, automorphism and x, y in the form the search expects."""
    G = gf.group
    xs = []
    for name in what:
        text = getattr(args, name)
        if text is None:
            raise UsageError(f"--{name} is required")
        xs.append(parse_element(gf, text, what=name))
    if isinstance(G, FgAbelianGroup):
        P, pphi = abelian_to_pc(G, phi)
        words = [tuple(l for i, c in enumerate(v) for l in letter_power(i, c)) for v in xs]
        return P, pphi, words[0], words[1]
    return G, phi, xs[0], xs[1]


# --------------------------------------------------------------------------
# commands


def cmd_info(args, rep: Report) -> int:
    gf, phi = _load(args)
    G = gf.group
    rep.data["kind"] = gf.kind
    rep.line(f"kind: {gf.kind}")
    if isinstance(G, FiniteGroup):
        gens = [G.label(g) for g in G.generators]
        rep.line(f"order: {G.order}")
        rep.line(f"abelian: {'yes' if G.is_abelian else 'no'}")
        rep.line(f"conjugacy classes: {len(G.conjugacy_classes)}")
        rep.line("generators: " + ", ".join(f"g{k} = {s}" for k, s in enumerate(gens)))
        rep.line(f"automorphism order: {phi.order}")
        rep.line("automorphism: " + " ".join(G.label(phi(x)) for x in range(G.order)))
        rep.data.update(order=G.order, abelian=G.is_abelian,
                        conjugacy_classes=len(G.conjugacy_classes), generators=gens,
                        automorphism=list(phi.images), automorphism_order=phi.order)
    elif isinstance(G, FgAbelianGroup):
        rep.line(f"group: {G}")
        rep.line("matrix: " + "; ".join(" ".join(map(str, r)) for r in phi.matrix))
        order = G.order()
        rep.data.update(group=str(G), rank=G.rank, torsion=list(G.torsion),
                        order=None if order == INFINITE else order,
                        matrix=[list(r) for r in phi.matrix])
    else:
        rep.line(f"generators: {' '.join(G.generators)}")
        if isinstance(G, PcPresentation):
            order = G.group_order()
            rep.line(f"order: {order if order is not None else 'infinite'}")
            rep.data["order"] = order
        else:
            rep.line(f"relators: {len(G.relators)}")
            rep.data["relators"] = [G.format_word(r) for r in G.relators]
        imgs = [G.format_word(w) for w in phi.images]
        rep.line("automorphism: " + ", ".join(f"{g} -> {w}" for g, w in zip(G.generators, imgs)))
        if not phi.verified:
            rep.line("warning: automorphism could not be fully verified for this presentation")
        rep.data.update(generators=list(G.generators), automorphism=imgs,
                        verified=phi.verified)
    return 0


def cmd_twisted_classes(args, rep: Report) -> int:
    gf, phi = _load(args)
    fin = _as_finite(gf, phi)
    if fin is None:
        raise UsageError("twisted-classes needs a finite group")
    G, phi, label, _ = fin
    part = twisted_partition(G, phi)
    part.verify()
    classes = []
    for rep_el, cls in zip(part.representatives, part.classes):
        members = sorted(cls)
        rep.line(f"class {label(rep_el)}: {' '.join(label(m) for m in members)}")
        classes.append({"representative": label(rep_el), "members": [label(m) for m in members]})
    rep.line(f"R(phi) = {len(part)}")
    rep.data.update(classes=classes, reidemeister=len(part))
    if args.figure:
        from twistconj.plotting import class_size_chart
        class_size_chart([label(r) for r in part.representatives],
                         [len(c) for c in part.classes], args.figure)
    return 0


def cmd_reidemeister(args, rep: Report) -> int:
    gf, phi = _load(args)
    if isinstance(gf.group, FgAbelianGroup):
        R = reidemeister_number_abelian(gf.group, phi)
    else:
        fin = _as_finite(gf, phi)
        if fin is None:
            raise UsageError("Reidemeister numbers of infinite presented groups are not computed; "
                             "use an abelian description or decide pairs")
        R = len(twisted_partition(fin[0], fin[1]))
    text = "infinite" if R == INFINITE else str(R)
    rep.line(f"R(phi) = {text}")
    rep.data["reidemeister"] = None if R == INFINITE else R
    rep.data["infinite"] = R == INFINITE
    return 0


def _query(gf, phi, args, x_name="x", y_name="y"):
    G, ph, x, y = _search_target(gf, phi, args, (x_name, y_name))
    if isinstance(G, FpPresentation) and not G.is_free and not args.heuristic:
        raise EqualityUndecidable(
            "presentation has relators, so equality is undecidable; pass --heuristic "
            "to search with free reduction (incomplete)")
    return DecisionQuery(G, ph, x, y, budget=args.budget, degree_cap=args.degree_cap,
                         heuristic=args.heuristic)


def _describe(query, cert, rep: Report) -> None:
    text = certificate_to_text(query, cert)
    rep.lines.extend(text.rstrip("\n").splitlines())
    rep.data["certificate"] = text
    if isinstance(cert, ConjugatorWitness):
        rep.line("# verdict: twisted conjugate")
        rep.data.update(verdict="conjugate", step=cert.step)
    else:
        rep.line(f"# verdict: not twisted conjugate (image order {cert.image_order})")
        rep.data.update(verdict="not conjugate", step=cert.step, degree=cert.degree,
                        image_order=cert.image_order)


def cmd_decide(args, rep: Report) -> int:
    gf, phi = _load(args)
    query = _query(gf, phi, args)
    state = None
    if args.state and Path(args.state).exists():
        try:
            state = SearchState.from_json(Path(args.state).read_text(encoding="utf-8"))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{args.state}:1: cannot read search state ({exc})") from None
    cert = (decide_parallel if args.parallel else decide)(query, state)
    if isinstance(cert, BudgetExceeded):
        st = cert.state
        rep.line(f"budget exceeded: {cert.reason}")
        rep.line(f"conjugator candidates tested: {st.a.steps}")
        rep.line(f"permutation tuples tested: {st.b.steps} "
                 f"(degree {st.b.degree}, homomorphisms {st.b.found})")
        rep.data.update(verdict="unknown", reason=cert.reason, state=json.loads(st.to_json()))
        if args.state:
            Path(args.state).write_text(st.to_json() + "\n", encoding="utf-8")
            rep.line(f"state saved to {args.state}")
        return 1
    if args.state and Path(args.state).exists():
        Path(args.state).unlink()
    _describe(query, cert, rep)
    return 0


def _quotient_lines(q, rep: Report) -> None:
    K = q.target
    rep.line(f"quotient order: {K.order}")
    rep.line("images: " + " ".join(str(v) for v in q.hom.images))
    rep.line("phi_K: " + " ".join(str(q.aut(k)) for k in range(K.order)))
    rep.data.update(quotient_order=K.order, images=list(q.hom.images),
                    phi_K=list(q.aut.images))


def cmd_separate(args, rep: Report) -> int:
    gf, phi = _load(args)
    G = gf.group
    if isinstance(G, FgAbelianGroup) and args.x is not None:
        if args.y is None:
            raise UsageError("--y is required with --x")
        x = parse_element(gf, args.x, what="x")
        y = parse_element(gf, args.y, what="y")
        res = separate_abelian(G, phi, x, y)
        if isinstance(res, AbelianWitness):
            rep.line(f"twisted conjugate: g = {format_element(gf, res.g)}")
            rep.data.update(verdict="conjugate", g=list(res.g))
            return 0
        assert isinstance(res, AbelianQuotient)
        rep.line("quotient moduli: " + " ".join(map(str, res.moduli)))
        rep.line(f"x -> {format_element(gf, res.reduce(res.x))}, y -> {format_element(gf, res.reduce(res.y))}")
        rep.data.update(verdict="not conjugate", moduli=list(res.moduli),
                        x_image=list(res.reduce(res.x)), y_image=list(res.reduce(res.y)))
        return 0
    fin = _as_finite(gf, phi)
    if fin is None and args.x is not None and args.y is not None:
        # infinite presented group: the certificate itself is the quotient of Gamma
        query = _query(gf, phi, args)
        cert = (decide_parallel if args.parallel else decide)(query)
        if isinstance(cert, BudgetExceeded):
            rep.line(f"budget exceeded: {cert.reason}")
            rep.data.update(verdict="unknown", reason=cert.reason)
            return 1
        _describe(query, cert, rep)
        return 0
    if fin is None:
        raise UsageError("separate needs --x and --y unless the group is finite")
    F, fphi, _, to_index = fin
    if args.x is None:
        q = separate_reidemeister_partition(F, fphi, budget=args.budget, degree_cap=args.degree_cap)
        rep.line(f"separates all {len(twisted_partition(F, fphi))} twisted classes")
        _quotient_lines(q, rep)
        return 0
    if args.y is None:
        raise UsageError("--y is required with --x")
    x = to_index(parse_element(gf, args.x, what="x"))
    y = to_index(parse_element(gf, args.y, what="y"))
    query = DecisionQuery(F, fphi, x, y, budget=args.budget, degree_cap=args.degree_cap)
    cert = (decide_parallel if args.parallel else decide)(query)
    if isinstance(cert, BudgetExceeded):
        rep.line(f"budget exceeded: {cert.reason}")
        rep.data.update(verdict="unknown", reason=cert.reason)
        return 1
    if isinstance(cert, ConjugatorWitness):
        _describe(query, cert, rep)
        return 0
    q = restrict_quotient(gamma_hom_from_certificate(query, cert))
    rep.line(f"x -> {q.hom(x)}, y -> {q.hom(y)} (different phi_K-classes)")
    rep.data.update(verdict="not conjugate", x_image=q.hom(x), y_image=q.hom(y))
    _quotient_lines(q, rep)
    return 0


def cmd_gamma(args, rep: Report) -> int:
    gf, phi = _load(args)
    G = gf.group
    if isinstance(G, FiniteGroup):
        P, words = cayley_presentation(G)
        phi = finite_automorphism_as_pres(P, words, G, phi)
        G = P
    elif isinstance(G, FgAbelianGroup):
        G, phi = abelian_to_pc(G, phi)
    gamma = gamma_presentation(G, phi)
    text = gamma.to_text()
    rep.lines.extend(text.rstrip("\n").splitlines())
    rep.data["presentation"] = text
    return 0


def cmd_verify_burnside(args, rep: Report) -> int:
    gf, phi = _load(args)
    fin = _as_finite(gf, phi)
    if fin is None:
        raise UsageError("verify-burnside needs a finite group")
    G, phi, _, _ = fin
    auts = enumerate_automorphisms(G) if args.all else [phi]
    rows = []
    ok = True
    for a in auts:
        r = verify_burnside_finite(G, a, strict=False)
        ok &= r.equal
        rows.append({"R": r.R, "S": r.S, "ok": r.equal})
        rep.line(f"R={r.R} S={r.S} {'OK' if r.equal else 'MISMATCH'}")
    rep.data["results"] = rows
    if args.figure:
        from twistconj.plotting import burnside_scatter
        burnside_scatter([r["R"] for r in rows], [r["S"] for r in rows], args.figure)
    return 0 if ok else 1


def _fmt_matrix(M) -> list[str]:
    if not M or not M[0]:
        return ["  []"]
    w = max(len(str(v)) for r in M for v in r)
    return ["  [" + " ".join(str(v).rjust(w) for v in r) + "]" for r in M]


def cmd_snf(args, rep: Report) -> int:
    A = load_matrix(args.matrix)
    s = smith_normal_form(A)
    diag = s.diagonal
    rep.line(f"D = diag({', '.join(map(str, diag))})")
    rep.line("U =")
    rep.lines.extend(_fmt_matrix(s.U))
    rep.line("V =")
    rep.lines.extend(_fmt_matrix(s.V))
    rep.data.update(diagonal=diag, U=[list(r) for r in s.U], V=[list(r) for r in s.V],
                    D=[list(r) for r in s.D])
    return 0


def cmd_verify_cert(args, rep: Report) -> int:
    gf, phi = _load(args)
    query = _query(gf, phi, args)
    path = Path(args.cert)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: cannot read certificate ({exc.strerror})") from None
    try:
        cert = certificate_from_text(query, text)
    except TwistConjError as exc:
        raise exc.with_path(str(path)) if hasattr(exc, "with_path") else exc
    res = verify_certificate(query, cert)
    rep.line("OK" if res.ok else f"INVALID: {res.reason}")
    rep.data.update(ok=res.ok, reason=res.reason)
    return 0 if res.ok else 1


COMMANDS = {
    "info": cmd_info,
    "twisted-classes": cmd_twisted_classes,
    "reidemeister": cmd_reidemeister,
    "decide": cmd_decide,
    "separate": cmd_separate,
    "gamma": cmd_gamma,
    "verify-burnside": cmd_verify_burnside,
    "snf": cmd_snf,
    "verify-cert": cmd_verify_cert,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    rep = Report(args.command)
    try:
        code = COMMANDS[args.command](args, rep)
    except (UsageError, EqualityUndecidable) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=stderr)
        return 1
    except TwistConjError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    stdout.write(rep.render(args.format))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
