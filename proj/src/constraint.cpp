#include "qref/constraint.hpp"

#include "qref/errors.hpp"

namespace qref {

ConstraintSpec::ConstraintSpec(SignaturePtr s, NCPolynomial c, std::vector<GenId> cand)
    : sig(std::move(s)), constraint(std::move(c)), candidates(std::move(cand)) {
    if (!is_hermitian(constraint)) {
        throw AlgebraError("constraint polynomial is not hermitian: " + render(constraint));
    }
    for (GenId z : candidates) {
        const auto& d = sig->decl(z);
        if (d.kind != GenKind::Position) {
            throw AlgebraError("candidate reference '" + d.name + "' is not a position generator");
        }
    }
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Valid: return "valid";
        case Verdict::ValidOnInvertibilityDomain: return "valid-on-invertibility-domain";
        default: return "invalid";
    }
}

std::string to_string(ClockClass c) {
    switch (c) {
        case ClockClass::Ideal: return "ideal";
        case ClockClass::Good: return "good";
        default: return "non-uniform";
    }
}

NCPolynomial compute_lapse(const ConstraintSpec& C, GenId Z) {
    const auto& zd = C.sig->decl(Z);
    if (zd.kind != GenKind::Position || zd.partner < 0) {
        throw AlgebraError("reference '" + zd.name + "' has no conjugate momentum");
    }
    GenId E = zd.partner;
    if (degree_in(C.constraint, E) > 1) {
        throw NotLinearInMomentum("constraint is quadratic or higher in '" +
                                  C.sig->decl(E).name + "'");
    }
    NCPolynomial zpoly = NCPolynomial::gen(C.sig, Z);
    NCPolynomial bracket = commutator(zpoly, C.constraint);
    return scalar_multiply(Scalar::i_hbar().inverse(), bracket);
}

namespace {

std::optional<NCPolynomial> invert_lapse(const NCPolynomial& N) {
    if (auto u = invert_composite(N)) return u;
    return invert_monomial(N);
}

} // namespace

ReferenceReport attempt_factorization(const ConstraintSpec& C, GenId Z) {
    ReferenceReport rep;
    rep.candidate = Z;
    rep.lapse = compute_lapse(C, Z);
    const NCPolynomial& N = rep.lapse;

    rep.obstruction = commutator(N, C.constraint);
    rep.lapse_hermitian = is_hermitian(N);
    rep.lapse_commutes_with_reference =
        commutator(N, NCPolynomial::gen(C.sig, Z)).is_zero();

    bool trivial_lapse = N == NCPolynomial::one(C.sig);
    if (trivial_lapse) {
        rep.right_factor = C.constraint;
    } else if (auto inv = invert_lapse(N)) {
        rep.right_factor = multiply(*inv, C.constraint);
    } else if (rep.obstruction.is_zero()) {
        // Consistent factorization exists but the right factor cannot be
        // formed without dividing by the lapse.
        throw LapseNotInvertible("lapse " + render(N) + " is not declared invertible");
    } else {
        rep.notes.push_back("right factor undefined: lapse is not declared invertible");
    }

    if (rep.right_factor) {
        rep.lapse_commutes_with_right_factor = commutator(N, *rep.right_factor).is_zero();
        rep.right_factor_hermitian = is_hermitian(*rep.right_factor);
        // Invariant of the construction, not an assumption.
        if (!(multiply(N, *rep.right_factor) == C.constraint)) {
            throw AlgebraError("factorization does not reproduce the constraint");
        }
    }

    bool flags = rep.lapse_hermitian && rep.lapse_commutes_with_right_factor &&
                 rep.lapse_commutes_with_reference && rep.right_factor_hermitian;
    if (flags && rep.obstruction.is_zero()) {
        rep.verdict = trivial_lapse ? Verdict::Valid : Verdict::ValidOnInvertibilityDomain;
    } else {
        rep.verdict = Verdict::Invalid;
    }

    if (rep.verdict == Verdict::ValidOnInvertibilityDomain) {
        rep.notes.push_back("valid on the domain where " + render(N) + " is invertible");
        if (rep.lapse_commutes_with_right_factor) {
            rep.notes.push_back("lapse commutes with the right factor, so invertibility is preserved by the gauge flow");
        }
    }
    return rep;
}

ClockReport classify_clock(const SignaturePtr& sig, GenId U, const NCPolynomial& C_H) {
    ClockReport rep;
    rep.clock = U;
    NCPolynomial bracket = commutator(NCPolynomial::gen(sig, U), C_H);
    if (bracket.is_zero()) {
        throw FrozenClock("clock '" + sig->decl(U).name + "' commutes with the right factor");
    }
    rep.rate = scalar_multiply(Scalar::i_hbar().inverse(), bracket);
    rep.rate_is_constant_of_motion = commutator(rep.rate, C_H).is_zero();
    if (auto s = rep.rate.as_scalar(); s && s->is_real()) {
        rep.classification = ClockClass::Ideal;
        rep.ideal_rate = *s;
    } else if (rep.rate_is_constant_of_motion) {
        rep.classification = ClockClass::Good;
    } else {
        rep.classification = ClockClass::NonUniform;
    }
    return rep;
}

} // namespace qref
