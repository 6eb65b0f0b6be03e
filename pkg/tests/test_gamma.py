import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from twistconj.errors import SquareDoesNotCommute
from twistconj.fixtures import cyclic, dihedral, sweep_groups, symmetric
from twistconj.gamma import (
    GammaElement,
    GammaGroup,
    GammaHom,
    combine_quotients,
    conjugacy_class_stays_in_coset,
    conjugate_in_coset_t,
    coset_bijection_check,
    coset_t_class,
    pullback_reproduces_partition,
    restrict_quotient,
)
from twistconj.groups import check_automorphism, enumerate_automorphisms, identity_automorphism
from twistconj.twisted import twisted_partition

SWEEP = [G for G in sweep_groups() if G.order <= 12]
AUTS = {G.name: enumerate_automorphisms(G) for G in SWEEP}


@st.composite
def gamma_and_elems(draw, k=3):
    G = draw(st.sampled_from(SWEEP))
    phi = draw(st.sampled_from(AUTS[G.name]))
    gamma = GammaGroup(G, phi)
    elems = [GammaElement(draw(st.integers(0, G.order - 1)), draw(st.integers(-4, 4)))
             for _ in range(k)]
    return gamma, elems


@given(gamma_and_elems())
def test_gamma_is_a_group(ge):
    gamma, (a, b, c) = ge
    assert gamma.mul(gamma.mul(a, b), c) == gamma.mul(a, gamma.mul(b, c))
    assert gamma.mul(a, gamma.inv(a)) == gamma.identity
    assert gamma.mul(gamma.identity, b) == b


@given(gamma_and_elems(k=1))
def test_t_acts_by_phi(ge):
    gamma, (a,) = ge
    g = GammaElement(a.g, 0)
    assert gamma.conj(gamma.t(), g) == GammaElement(gamma.phi(a.g), 0)
    assert conjugacy_class_stays_in_coset(gamma, a, window=2).ok


def test_coset_classes_match_twisted_classes():
    S3 = symmetric(3)
    for phi in AUTS["S_3"]:
        gamma = GammaGroup(S3, phi)
        expect = oracles.twisted_classes(S3.table, phi.images)
        got = {frozenset(coset_t_class(gamma, x)) for x in range(6)}
        assert got == set(expect)
        for x in range(6):
            for y in range(6):
                c = conjugate_in_coset_t(gamma, x, y)
                same = any(x in cls and y in cls for cls in expect)
                assert (c is not None) == same
                if c is not None:
                    assert gamma.conj(c, GammaElement(x, 1)) == GammaElement(y, 1)


def test_coset_bijection_report_on_cyclic():
    Z6 = cyclic(6)
    neg = check_automorphism(Z6, [(-x) % 6 for x in range(6)])
    rep = coset_bijection_check(Z6, neg)
    assert (rep.pairs_checked, rep.twisted_classes, rep.gamma_classes) == (36, 2, 2)


def test_phi_power_period():
    D4 = dihedral(4)
    for phi in AUTS["D_4"]:
        gamma = GammaGroup(D4, phi)
        assert gamma.phi_power(gamma.period) == tuple(range(8))
        assert gamma.phi_power(-1) == phi.inverse_images


def test_restrict_quotient_detects_bad_square():
    # with phi = id, t must centralize the image, and (0 1) does not
    S3 = symmetric(3)
    Z6 = cyclic(6)
    ident = identity_automorphism(Z6)
    gen_img = [S3.labels.index("(0 1 2)")]
    t_img = S3.labels.index("(0 1)")
    with pytest.raises(SquareDoesNotCommute):
        restrict_quotient(GammaHom(Z6, ident, S3, tuple(gen_img * len(Z6.generators)), t_img))


def test_restrict_quotient_identity_map():
    S3 = symmetric(3)
    for phi in AUTS["S_3"]:
        # phi of S_3 is inner, so t can go to the conjugating element
        s = next(c for c in range(6) if all(S3.conj(c, g) == phi(g) for g in range(6)))
        q = restrict_quotient(GammaHom(S3, phi, S3, tuple(S3.generators), s))
        q.check_square(phi)
        assert q.target.order == 6
        assert pullback_reproduces_partition(q, S3, phi)


def test_combine_quotients_separates_more():
    Z6 = cyclic(6)
    ident = identity_automorphism(Z6)
    Z2, Z3 = cyclic(2), cyclic(3)
    q2 = restrict_quotient(GammaHom(Z6, ident, Z2, (1,), 0))
    q3 = restrict_quotient(GammaHom(Z6, ident, Z3, (1,), 0))
    assert not pullback_reproduces_partition(q2, Z6, ident)
    both = combine_quotients([q2, q3])
    assert both.target.order == 6
    assert pullback_reproduces_partition(both, Z6, ident)
    part = twisted_partition(Z6, ident)
    assert len(part) == 6
    with pytest.raises(ValueError):
        combine_quotients([])
