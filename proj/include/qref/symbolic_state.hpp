#pragma once

#include "qref/polynomial.hpp"

namespace qref {

// Valuation of words into exact scalars for a generic state: the reference
// value is an indeterminate t, moments of commutant words are opaque symbols,
// and the two defining conditions are applied as rewrite rules. Everything
// derived from it is an identity in t, hbar and the opaque moments rather
// than a numerical check.
class SymbolicMomentState {
  public:
    // Generic algebra: a reference pair, one system pair, and an opaque
    // hermitian hamiltonian h commuting with the reference letter. The
    // constraint is E + h.
    SymbolicMomentState();

    const SignaturePtr& signature() const { return sig_; }
    GenId reference() const { return z_; }
    GenId momentum() const { return e_; }
    GenId system_q() const { return q_; }
    GenId system_p() const { return p_; }
    GenId hamiltonian_letter() const { return h_; }
    const NCPolynomial& constraint() const { return constraint_; }

    Scalar value(const NCPolynomial& poly) const;
    Scalar value_word(const Word& w) const;

  private:
    SignaturePtr sig_;
    GenId z_, e_, q_, p_, h_;
    NCPolynomial constraint_;
};

struct SymbolicIdentity {
    std::string name;
    Scalar expected;
    Scalar actual;
    bool holds = false;
};

// The structural consequences of the defining conditions, each computed from
// the generic valuation and compared exactly against its closed form:
// vanishing reference variance and reference covariances, the forced
// imaginary reference-momentum covariance, saturation of the uncertainty
// product, the nonpositivity witness, and factorization of reference powers.
std::vector<SymbolicIdentity> verify_structural_identities();

} // namespace qref
