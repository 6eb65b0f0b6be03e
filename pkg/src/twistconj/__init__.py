"""Twisted conjugacy classes, Reidemeister numbers and the twisted
conjugacy problem for finite, abelian and polycyclic groups."""

from twistconj.abelian import (
    AbelianEndo,
    FgAbelianGroup,
    reidemeister_number_abelian,
    separate_abelian,
    smith_normal_form,
)
from twistconj.errors import TwistConjError
from twistconj.gamma import GammaGroup, Quotient, combine_quotients, restrict_quotient
from twistconj.groups import (
    Automorphism,
    Endomorphism,
    FiniteGroup,
    GroupHom,
    PermGroup,
    build_cayley,
    check_automorphism,
    enumerate_automorphisms,
    inner_automorphism,
    perm_closure,
)
from twistconj.presentations import (
    FpPresentation,
    PcPresentation,
    gamma_presentation,
    make_automorphism,
    parse_presentation,
)
from twistconj.search import (
    BudgetExceeded,
    ConjugatorWitness,
    DecisionQuery,
    SearchState,
    SeparatingQuotient,
    decide,
    decide_parallel,
    resume,
    separate_reidemeister_partition,
    verify_certificate,
)
from twistconj.twisted import (
    INFINITE,
    Infinite,
    TwistedClassPartition,
    reidemeister_number_finite,
    twisted_class_of,
    twisted_partition,
    verify_burnside_finite,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITE",
    "AbelianEndo",
    "Automorphism",
    "BudgetExceeded",
    "ConjugatorWitness",
    "DecisionQuery",
    "Endomorphism",
    "FgAbelianGroup",
    "FiniteGroup",
    "FpPresentation",
    "GammaGroup",
    "GroupHom",
    "Infinite",
    "PcPresentation",
    "PermGroup",
    "Quotient",
    "SearchState",
    "SeparatingQuotient",
    "TwistConjError",
    "TwistedClassPartition",
    "build_cayley",
    "check_automorphism",
    "combine_quotients",
    "decide",
    "decide_parallel",
    "enumerate_automorphisms",
    "gamma_presentation",
    "inner_automorphism",
    "make_automorphism",
    "parse_presentation",
    "perm_closure",
    "reidemeister_number_abelian",
    "reidemeister_number_finite",
    "restrict_quotient",
    "resume",
    "separate_abelian",
    "separate_reidemeister_partition",
    "smith_normal_form",
    "twisted_class_of",
    "twisted_partition",
    "verify_burnside_finite",
    "verify_certificate",
]
