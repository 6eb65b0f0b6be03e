import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from twistconj.errors import BurnsideMismatch, NotATransversal, NotInvariantSubgroup
from twistconj.fixtures import cyclic, dihedral, quaternion, sweep_groups, symmetric
from twistconj.groups import (
    check_automorphism,
    check_endomorphism,
    enumerate_automorphisms,
    identity_automorphism,
    inner_automorphism,
)
from twistconj.twisted import (
    count_phi_fixed_ordinary_classes,
    decompose_over_subgroup,
    ordinary_partition,
    reidemeister_number_finite,
    twist,
    twisted_class_of,
    twisted_class_permutation_under_translation,
    twisted_partition,
    verify_burnside_finite,
)

SWEEP = sweep_groups()
AUTS = {G.name: enumerate_automorphisms(G) for G in SWEEP}


@st.composite
def group_aut(draw):
    G = draw(st.sampled_from(SWEEP))
    return G, draw(st.sampled_from(AUTS[G.name]))


def test_identity_gives_ordinary_classes():
    S3 = symmetric(3)
    part = ordinary_partition(S3)
    assert len(part) == 3
    assert sorted(len(c) for c in part.classes) == [1, 2, 3]


@pytest.mark.parametrize("n", range(2, 13))
def test_inversion_on_cyclic(n):
    # x ~ y iff x - y lies in 2Z/n, so R = gcd(2, n)
    G = cyclic(n)
    neg = check_automorphism(G, [(-x) % n for x in range(n)])
    assert reidemeister_number_finite(G, neg) == math.gcd(2, n)
    assert reidemeister_number_finite(G, identity_automorphism(G)) == n


def test_inner_automorphisms_shift_classes():
    # R(tau_g o phi) = R(phi)
    Q = quaternion()
    for phi in AUTS["Q_8"]:
        for g in range(8):
            psi = inner_automorphism(Q, g).compose(phi)
            assert reidemeister_number_finite(Q, psi) == reidemeister_number_finite(Q, phi)


@given(group_aut(), st.data())
def test_class_matches_bruteforce(ga, data):
    G, phi = ga
    x = data.draw(st.integers(0, G.order - 1))
    cls = twisted_class_of(G, phi, x)
    expect = next(c for c in oracles.twisted_classes(G.table, phi.images) if x in c)
    assert set(cls.members) == expect
    for y, g in cls.witnesses.items():
        assert twist(G, phi, g, x) == y
    assert phi(x) in cls


@given(group_aut())
def test_partition_invariants(ga):
    G, phi = ga
    part = twisted_partition(G, phi)
    part.verify()
    assert sum(len(c) for c in part.classes) == G.order
    assert len(part) == oracles.fixed_class_count(G.table, phi.images)
    rep = verify_burnside_finite(G, phi)
    assert rep.equal and rep.R == len(part)


@given(group_aut(), st.data())
def test_translation_permutes_classes(ga, data):
    G, phi = ga
    g = data.draw(st.integers(0, G.order - 1))
    tb = twisted_class_permutation_under_translation(G, phi, g)
    assert len(tb.source) == len(tb.target)
    assert sorted(tb.mapping) == list(range(len(tb.target)))


def test_burnside_surrogate_needs_bijectivity():
    # the sign map of S_3 onto {e, (0 1)} is an endomorphism where R != S
    S3 = symmetric(3)
    sign = [0 if S3.element_order(x) != 2 else S3.labels.index("(0 1)") for x in range(6)]
    phi = check_endomorphism(S3, sign)
    rep = verify_burnside_finite(S3, phi, strict=False)
    assert (rep.R, rep.S, rep.equal) == (2, 1, False)
    assert count_phi_fixed_ordinary_classes(S3, phi) == 1
    with pytest.raises(BurnsideMismatch):
        verify_burnside_finite(S3, phi)


def _reps(G, H):
    return sorted({min(G.mul(h, x) for h in H) for x in range(G.order)})


def test_decomposition_reconstructs_class():
    D4 = dihedral(4)
    centre = [z for z in range(8) if all(D4.mul(z, g) == D4.mul(g, z) for g in range(8))]
    for phi in AUTS["D_4"]:
        for g in range(8):
            pieces = decompose_over_subgroup(D4, phi, g, centre, _reps(D4, centre))
            assert set().union(*(p.members for p in pieces)) == set(twisted_class_of(D4, phi, g).members)
            for p in pieces:
                assert all(D4.mul(D4.inv(p.translator), m) in centre for m in p.members)


def test_decomposition_rejects_bad_input():
    S3 = symmetric(3)
    ident = identity_automorphism(S3)
    t = S3.labels.index("(0 1)")
    H = [0, t]
    with pytest.raises(NotInvariantSubgroup):
        decompose_over_subgroup(S3, ident, 0, H, _reps(S3, H))
    A3 = [x for x in range(6) if S3.element_order(x) != 2]
    with pytest.raises(NotATransversal):
        decompose_over_subgroup(S3, ident, 0, A3, [0, A3[1]])
    with pytest.raises(NotInvariantSubgroup):
        decompose_over_subgroup(S3, ident, 0, [0, 1, 2], [0, 3])
