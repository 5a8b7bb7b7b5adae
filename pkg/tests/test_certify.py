from dataclasses import replace

import pytest

from milnork.algebra import AlgebraSpec, build_algebra
from milnork.certify import (
    CheckState,
    RewriteStep,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    check_step,
    crosscheck_dlog,
    default_precision,
    splitting_certificate,
    vanishing_certificate,
)
from milnork.errors import (
    NonUnitC,
    PositionInvalid,
    PrecisionInsufficient,
    SideConditionFailed,
)
from milnork.laurent import (
    LaurentEntry,
    LaurentPolynomial,
    LaurentState,
    LaurentSymbol,
)


def alg(variables, relations):
    return build_algebra(AlgebraSpec(tuple(variables), tuple(relations)))


@pytest.fixture(scope="module")
def Q():
    return alg([], [])


@pytest.fixture(scope="module")
def t2():
    return alg(["t"], ["t^2"])


def _state(A, *terms):
    return LaurentState(A, 2, list(terms))


def _entry(A, *atoms):
    return LaurentEntry(A, list(atoms))


def test_steinberg_step_spec_example(Q):
    # {-c s^(n+1), 1 + c s^(n+1)} dies by the Steinberg rule (c = 2, n = 1)
    c = Q.element(2)
    minus = LaurentPolynomial(Q, {2: -c})
    w = LaurentPolynomial.constant(Q, 1) + LaurentPolynomial(Q, {2: c})
    sym = LaurentSymbol((_entry(Q, (minus, 1)), _entry(Q, (w, 1))))
    state = _state(Q, (1, sym))
    out = check_step(CheckState(state, "laurent", None),
                     RewriteStep("steinberg", {"term": 0}, {"mode": "remove"}))
    assert not out.state


def test_steinberg_rejects_bad_pair(Q):
    two = LaurentPolynomial.constant(Q, 2)
    three = LaurentPolynomial.constant(Q, 3)
    sym = LaurentSymbol((_entry(Q, (two, 1)), _entry(Q, (three, 1))))
    with pytest.raises(SideConditionFailed):
        check_step(CheckState(_state(Q, (1, sym)), "laurent", None),
                   RewriteStep("steinberg", {"term": 0}, {"mode": "remove"}))


def test_entry_identity_step_spec_example(Q):
    # 1 - s - c s^(n+2) + c s^(n+1)  ==  (1-s)(1+c s^(n+1))   (c = 2, n = 1)
    c = Q.element(2)
    one = LaurentPolynomial.constant(Q, 1)
    sig = LaurentPolynomial.sigma(Q)
    w = one + LaurentPolynomial(Q, {2: c})
    combined = one - sig - LaurentPolynomial(Q, {3: c}) + LaurentPolynomial(Q, {2: c})
    sym = LaurentSymbol((_entry(Q, (combined, 1)), _entry(Q, (sig, 1))))
    out = check_step(CheckState(_state(Q, (1, sym)), "laurent", None),
                     RewriteStep("entry_identity", {"term": 0, "slot": 0},
                                 {"atoms": [(one - sig, 1), (w, 1)]}))
    got = out.state.terms[0][1].entries[0]
    assert [exp for _, exp in got.atoms] == [1, 1]


def test_entry_identity_rejects_wrong_value(Q):
    one = LaurentPolynomial.constant(Q, 1)
    sig = LaurentPolynomial.sigma(Q)
    sym = LaurentSymbol((_entry(Q, (one - sig, 1)), _entry(Q, (sig, 1))))
    with pytest.raises(SideConditionFailed):
        check_step(CheckState(_state(Q, (1, sym)), "laurent", None),
                   RewriteStep("entry_identity", {"term": 0, "slot": 0},
                               {"atoms": [(one + sig, 1)]}))


def test_bilinearity_split_spec_example(Q):
    one = LaurentPolynomial.constant(Q, 1)
    sig = LaurentPolynomial.sigma(Q)
    w = one + LaurentPolynomial(Q, {2: Q.element(2)})
    sym = LaurentSymbol((_entry(Q, (one - sig, 1), (w, 1)), _entry(Q, (sig, 1))))
    out = check_step(CheckState(_state(Q, (1, sym)), "laurent", None),
                     RewriteStep("bilinearity", {"term": 0, "slot": 0},
                                 {"mode": "split", "at": 1}))
    assert len(out.state.terms) == 2
    firsts = sorted(str(s.entries[0]) for _, s in out.state.terms)
    assert firsts == ["(-sigma + 1)", "(2*sigma^2 + 1)"]


def test_position_guards(Q):
    one = LaurentPolynomial.constant(Q, 1)
    sig = LaurentPolynomial.sigma(Q)
    sym = LaurentSymbol((_entry(Q, (one - sig, 1)), _entry(Q, (sig, 1))))
    state = _state(Q, (1, sym))
    with pytest.raises(PositionInvalid):
        check_step(CheckState(state, "laurent", None),
                   RewriteStep("steinberg", {"term": 5}, {"mode": "remove"}))
    with pytest.raises(PositionInvalid):
        check_step(CheckState(state, "laurent", None),
                   RewriteStep("nonsense", {"term": 0}, {}))


def test_projection_requires_order_zero_atoms(Q):
    sig = LaurentPolynomial.sigma(Q)
    one = LaurentPolynomial.constant(Q, 1)
    sym = LaurentSymbol((_entry(Q, (sig, 1), ((one - sig), 1)), _entry(Q, (one - sig, 1))))
    with pytest.raises(SideConditionFailed):
        check_step(CheckState(_state(Q, (1, sym)), "laurent", None),
                   RewriteStep("projection", {}, {"order": 2}))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_splitting_certificate_grid(Q, t2, n):
    for A, c in ((Q, Q.element(2)), (t2, t2.element("1+t"))):
        cert = splitting_certificate(A, c, n)
        verdict = check_certificate(cert)
        assert verdict.valid and verdict.claim_ok
        assert len(cert.steps) == 12


def test_splitting_rejects_non_unit_c(Q, t2):
    with pytest.raises(NonUnitC):
        splitting_certificate(Q, 0, 1)
    with pytest.raises(NonUnitC):
        vanishing_certificate(t2, t2.element("t"), 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_vanishing_certificate_grid(Q, t2, n):
    for A, c in ((Q, Q.element(1)), (t2, t2.element("1+t"))):
        cert = vanishing_certificate(A, c, n)
        verdict = check_certificate(cert)
        assert verdict.valid and verdict.claim_ok
        # the final claim carries 1 - (n+1) c s^n
        claim_entry = cert.claim_lhs.terms[0][1].entries[1]
        poly = claim_entry.atoms[0][0]
        assert poly.coeffs[n] == -(n + 1) * c


def test_vanishing_claim_matches_spec_binomial(Q):
    cert = vanishing_certificate(Q, 1, 1)
    assert str(cert.goal) == "1*{(-sigma + 1), (-2*sigma + 1)}"


def test_crosscheck_agreement(Q, t2):
    for A, c, n in ((Q, 2, 1), (t2, "1+t", 2), (t2, 1, 1)):
        cert = vanishing_certificate(A, A.element(c), n)
        rep = crosscheck_dlog(cert)
        assert rep.all_agree
        assert rep.final_realization_zero
        assert rep.precision == default_precision(n)


def test_crosscheck_tracks_laurent_only_chain(Q):
    cert = splitting_certificate(Q, 2, 1)
    rep = crosscheck_dlog(cert)
    assert rep.all_agree
    assert len(rep.steps) == len(cert.steps)


def test_corrupted_certificate_rejected_at_exact_step(Q):
    cert = vanishing_certificate(Q, 1, 1)
    idx = next(i for i, s in enumerate(cert.steps) if s.rule == "entry_identity")
    step = cert.steps[idx]
    bad_atoms = [(poly + LaurentPolynomial.constant(Q, 1), exp)
                 for poly, exp in step.payload["atoms"]]
    bad = replace(cert, steps=tuple(
        RewriteStep(s.rule, s.position, {**s.payload, "atoms": bad_atoms}) if i == idx else s
        for i, s in enumerate(cert.steps)))
    verdict = check_certificate(bad)
    assert not verdict.valid
    assert verdict.failure_index == idx
    assert verdict.steps[idx].ok is False
    rep = crosscheck_dlog(bad)
    assert not rep.all_agree
    assert rep.steps[-1][0] == idx and rep.steps[-1][2] is False


def test_precision_insufficient(Q):
    cert = vanishing_certificate(Q, 1, 2)
    with pytest.raises(PrecisionInsufficient):
        crosscheck_dlog(cert, precision=3)


def test_certificate_json_round_trip(t2):
    cert = vanishing_certificate(t2, t2.element("1+t"), 2)
    text = certificate_to_json(cert)
    loaded = certificate_from_json(text)
    assert certificate_to_json(loaded) == text
    verdict = check_certificate(loaded)
    assert verdict.valid
    assert crosscheck_dlog(loaded).all_agree


def test_certificate_annotations_mention_projection_assumption(Q):
    cert = vanishing_certificate(Q, 1, 1)
    assert any("Kerz" in note for note in cert.annotations)
    assert any("factorization" in note for note in cert.annotations)


def test_verdict_records_deterministic(t2):
    cert = vanishing_certificate(t2, t2.element("1+t"), 2)
    assert check_certificate(cert).record() == check_certificate(cert).record()
    assert crosscheck_dlog(cert).record() == crosscheck_dlog(cert).record()


def test_minus_one_coefficient(Q, t2):
    # c = -1 must not collide with the sign-helper term in the chain
    for A, c in ((Q, -1), (t2, "-1"), (t2, "-1-t")):
        cert = vanishing_certificate(A, A.element(c), 1)
        assert check_certificate(cert).valid
        assert crosscheck_dlog(cert).all_agree


def test_binomial_identity_instance(t2):
    # (1 - s^2)^3 = 1 - 3 s^2 mod s^3 drives the n = 2, c = 1 chain
    cert = vanishing_certificate(t2, 1, 2)
    assert check_certificate(cert).valid
    poly = cert.goal.terms[0][1].entries[1].atoms[0][0]
    assert poly.coeffs[2] == t2.element(-3)
    assert crosscheck_dlog(cert).final_realization_zero
