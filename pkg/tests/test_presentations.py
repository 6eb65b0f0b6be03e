import pytest
from hypothesis import given
from hypothesis import strategies as st

import dihedral_oracle as dih
from twistconj.errors import (
    BadGeneratorIndexOrder,
    InconsistentPresentation,
    NotBijective,
    PresentationSyntaxError,
)
from twistconj.fixtures import quaternion, symmetric
from twistconj.groups import enumerate_automorphisms
from twistconj.presentations import (
    FpPresentation,
    PcPresentation,
    abelian_to_pc,
    apply_automorphism,
    ball_enumerate,
    cayley_presentation,
    collect,
    finite_automorphism_as_pres,
    free_reduce,
    gamma_presentation,
    identity_pres_automorphism,
    invert,
    make_automorphism,
    parse_presentation,
    pc_equal,
)
from twistconj.abelian import AbelianEndo, FgAbelianGroup

DINF = parse_presentation(
    "kind pc\ngen b order 2\ngen a order inf\nconj a ^ b = a^-1\nconj a ^ b^-1 = a^-1\n")
Z = parse_presentation("kind pc\ngen a order inf\n")
Z2 = parse_presentation("kind pc\ngen a order inf\ngen b order inf\n")

letters = st.sampled_from([(0, 1), (0, -1), (1, 1), (1, -1)])
words = st.lists(letters, max_size=14).map(tuple)


def _dinf_word_text(w):
    return " ".join(f"{'ba'[g]}^{e}" for g, e in w) or "1"


# -- parsing -----------------------------------------------------------------

def test_inline_presentations():
    F = parse_presentation("<a | >")
    assert isinstance(F, FpPresentation) and F.ngens == 1 and F.is_free
    D = parse_presentation("<a, b | b^2, b a b^-1 a>")
    assert D.relators == (((1, 1), (1, 1)), ((1, 1), (0, 1), (1, -1), (0, 1)))
    assert D.parse_word("(a b)^2") == ((0, 1), (1, 1), (0, 1), (1, 1))


def test_word_syntax_errors_have_positions():
    with pytest.raises(PresentationSyntaxError) as ei:
        parse_presentation("<a, b | a c>")
    assert ei.value.line == 1 and ei.value.col is not None
    with pytest.raises(PresentationSyntaxError) as ei:
        parse_presentation("kind fp\ngens a b\nrel a b^x\n")
    assert ei.value.line == 3
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("kind zz\n")
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("kind pc\ngen a order one\n")


def test_pc_index_order_enforced():
    with pytest.raises(BadGeneratorIndexOrder):
        parse_presentation("kind pc\ngen a order 2\ngen b order 3\nconj a ^ b = a\n")
    with pytest.raises(BadGeneratorIndexOrder):
        parse_presentation("kind pc\ngen a order 2\ngen b order 3\nconj b ^ a = a b\n")


def test_inconsistent_pc_rejected():
    # an automorphism of order 2 cannot come from a generator of order 3
    text = "kind pc\ngen a order 3\ngen b order 3\nconj b ^ a = b^2\n"
    with pytest.raises(InconsistentPresentation):
        parse_presentation(text)
    assert parse_presentation(text, check=False).ngens == 2


def test_infinite_generator_needs_inverse_relation():
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("kind pc\ngen a order inf\ngen b order inf\nconj b ^ a = b^-1\n")


def test_to_text_round_trip():
    for P in (DINF, Z, Z2):
        Q = parse_presentation(P.to_text())
        assert Q.to_text() == P.to_text()


# -- collection ----------------------------------------------------------------

def test_collection_examples():
    assert collect(DINF, ()) == (0, 0)
    assert collect(DINF, DINF.parse_word("a b a")) == (1, 0)
    assert collect(DINF, ((0, 1),)) == (1, 0)
    assert pc_equal(DINF, DINF.parse_word("b a b^-1"), DINF.parse_word("a^-1"))
    assert pc_equal(Z2, Z2.parse_word("a b"), Z2.parse_word("b a"))


@given(words)
def test_collection_matches_dihedral_oracle(w):
    s, k = collect(DINF, w)
    assert dih.from_word(_dinf_word_text(w)) == (s, k)


@given(words, words)
def test_collection_is_a_normal_form(u, v):
    P = DINF
    cu = collect(P, u)
    assert collect(P, P.to_word(cu)) == cu
    assert collect(P, u + v) == P.multiply(cu, P.to_word(collect(P, v)))
    # syllables are a shortcut for the same product
    assert P.multiply(cu, P.to_syllables(collect(P, v))) == collect(P, u + v)
    assert collect(P, u + invert(u)) == (0, 0)


def test_free_reduce():
    assert free_reduce(((0, 1), (1, 1), (1, -1), (0, -1))) == ()
    assert free_reduce(((0, 1), (0, 1))) == ((0, 1), (0, 1))


# -- automorphisms ---------------------------------------------------------------

def test_apply_automorphism_examples():
    neg = make_automorphism(Z, [Z.parse_word("a^-1")])
    assert apply_automorphism(Z, neg, Z.parse_word("a^3")) == Z.parse_word("a^-3")
    ident = identity_pres_automorphism(DINF)
    w = DINF.parse_word("a b a^2")
    assert apply_automorphism(DINF, ident, w) == DINF.normal_form(w)
    twist = make_automorphism(DINF, [DINF.parse_word("b"), DINF.parse_word("a^-1")])
    for r in DINF.relators:
        assert not any(collect(DINF, twist.apply(r)))
    assert twist.inverse_images == twist.images


def test_bad_automorphisms_rejected():
    with pytest.raises(NotBijective):
        make_automorphism(Z, [Z.parse_word("a^2")])
    with pytest.raises(NotBijective):
        # b must go to an element of order dividing 2
        make_automorphism(DINF, [DINF.parse_word("a"), DINF.parse_word("a")])
    with pytest.raises(NotBijective):
        make_automorphism(Z, [])
    F2 = parse_presentation("<a, b | >")
    with pytest.raises(NotBijective):
        make_automorphism(F2, [F2.parse_word("a b"), F2.parse_word("b")])


def test_fp_automorphism_verification_flag():
    F2 = parse_presentation("<a, b | >")
    swap = make_automorphism(F2, [F2.parse_word("b"), F2.parse_word("a")])
    assert swap.verified
    T = parse_presentation("<a, b | a b a^-1 b^-1>")
    mixed = make_automorphism(T, [T.parse_word("a b"), T.parse_word("b")],
                              [T.parse_word("a b^-1"), T.parse_word("b")])
    assert mixed.verified


# -- Gamma and balls ---------------------------------------------------------------

def test_gamma_presentations():
    neg = make_automorphism(Z, [Z.parse_word("a^-1")])
    K = gamma_presentation(Z, neg)
    assert isinstance(K, PcPresentation) and K.generators == ("t", "a")
    assert pc_equal(K, K.parse_word("t a t^-1"), K.parse_word("a^-1"))
    K.check_consistency()
    F = parse_presentation("<a | >")
    KF = gamma_presentation(F, make_automorphism(F, [F.parse_word("a^-1")]))
    assert KF.relators == (((0, 1), (1, 1), (0, -1), (1, 1)),)
    D = gamma_presentation(DINF, identity_pres_automorphism(DINF))
    # identity twist: t commutes with everything
    assert D.conj == {(i + 1, j + 1): tuple((g + 1, e) for g, e in w)
                      for (i, j), w in DINF.conj.items()}
    assert pc_equal(D, D.parse_word("t a"), D.parse_word("a t"))


def test_gamma_of_twisted_dihedral_is_consistent():
    twist = make_automorphism(DINF, [DINF.parse_word("b"), DINF.parse_word("a^-1")])
    K = gamma_presentation(DINF, twist)
    K.check_consistency()
    assert parse_presentation(K.to_text()).to_text() == K.to_text()


def test_ball_sizes():
    assert list(ball_enumerate(Z, 0)) == [(0,)]
    assert sorted(ball_enumerate(Z, 2)) == [(-2,), (-1,), (0,), (1,), (2,)]
    assert list(ball_enumerate(DINF, 1)) == [(0, 0), (1, 0), (0, 1), (0, -1)]
    for r in range(4):
        assert set(ball_enumerate(DINF, r)) == dih.ball(r)
    sizes = [len(list(ball_enumerate(DINF, r))) for r in range(5)]
    assert sizes == sorted(sizes)


def test_cayley_presentation_relators_hold():
    for G in (symmetric(3), quaternion()):
        P, words = cayley_presentation(G)
        for r in P.relators:
            assert G.prod(G.generators[g] if e > 0 else G.inv(G.generators[g]) for g, e in r) \
                == G.identity
        for phi in enumerate_automorphisms(G)[:4]:
            pa = finite_automorphism_as_pres(P, words, G, phi)
            assert len(pa.images) == P.ngens


def test_abelian_to_pc():
    G = FgAbelianGroup(1, (4,))
    P, phi = abelian_to_pc(G, AbelianEndo(G, ((-1, 0), (0, 3))))
    assert P.generators == ("x1", "y1")
    assert collect(P, phi.apply(P.parse_word("x1 y1"))) == (-1, 3)
