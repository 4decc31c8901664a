#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qref/polynomial.hpp"

namespace qref {

// A hermitian constraint together with the candidate reference letters to
// analyze. Construction rejects non-hermitian input.
struct ConstraintSpec {
    ConstraintSpec(SignaturePtr sig, NCPolynomial constraint, std::vector<GenId> candidates);

    SignaturePtr sig;
    NCPolynomial constraint;
    std::vector<GenId> candidates;
};

enum class Verdict { Valid, ValidOnInvertibilityDomain, Invalid };
std::string to_string(Verdict v);

// Outcome of trying to write C = N * C_H with the lapse on the left.
// The verdict is Valid (or ValidOnInvertibilityDomain when N != 1) exactly
// when all four flags hold and the obstruction [N, C] vanishes.
struct ReferenceReport {
    GenId candidate = -1;
    NCPolynomial lapse;
    std::optional<NCPolynomial> right_factor;  // absent when the lapse cannot be inverted
    bool lapse_hermitian = false;
    bool lapse_commutes_with_right_factor = false;
    bool lapse_commutes_with_reference = false;
    bool right_factor_hermitian = false;
    NCPolynomial obstruction;  // [N, C]
    Verdict verdict = Verdict::Invalid;
    std::vector<std::string> notes;
};

// N = (1/i hbar) [Z, C] for constraints at most linear in the momentum
// conjugate to Z. Throws NotLinearInMomentum otherwise.
NCPolynomial compute_lapse(const ConstraintSpec& C, GenId Z);

// Full factorization attempt. When the lapse is not invertible the report is
// still produced as long as the obstruction is nonzero (the obstruction alone
// settles the verdict); a vanishing obstruction with a non-invertible lapse
// raises LapseNotInvertible since the right factor would be needed.
ReferenceReport attempt_factorization(const ConstraintSpec& C, GenId Z);

enum class ClockClass { Ideal, Good, NonUniform };
std::string to_string(ClockClass c);

// rate = [U, C_H]/(i hbar). Ideal when the rate is a real multiple of the
// identity; good when the rate is a nonconstant constant of motion.
struct ClockReport {
    GenId clock = -1;
    NCPolynomial rate;
    ClockClass classification = ClockClass::NonUniform;
    bool rate_is_constant_of_motion = false;
    std::optional<Scalar> ideal_rate;
};

// Throws FrozenClock when [U, C_H] = 0.
ClockReport classify_clock(const SignaturePtr& sig, GenId U, const NCPolynomial& C_H);

} // namespace qref
