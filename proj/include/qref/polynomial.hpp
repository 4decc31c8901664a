#pragma once

#include <optional>

#include "qref/algebra.hpp"

namespace qref {

// Words compare by length first so constants render before high-degree terms.
struct WordLess {
    bool operator()(const Word& a, const Word& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

// Finite sum of normal-ordered words with exact coefficients. Normal order:
// letter keys (family, role, id) ascend left to right and no adjacent pair
// matches a product rule (inverse cancellation or composite compression).
// Zero coefficients are never stored; the zero polynomial is the empty map.
class NCPolynomial {
  public:
    NCPolynomial() = default;
    explicit NCPolynomial(SignaturePtr sig) : sig_(std::move(sig)) {}

    static NCPolynomial zero(SignaturePtr sig) { return NCPolynomial(std::move(sig)); }
    static NCPolynomial one(SignaturePtr sig);
    static NCPolynomial scalar(SignaturePtr sig, const Scalar& s);
    static NCPolynomial gen(SignaturePtr sig, GenId id);
    static NCPolynomial gen(SignaturePtr sig, const std::string& name);
    // Single-word monomial; the word must already be in normal order.
    static NCPolynomial word(SignaturePtr sig, const Word& w, const Scalar& c = Scalar::one());

    const SignaturePtr& signature() const { return sig_; }
    const std::map<Word, Scalar, WordLess>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Coefficient of the empty word when that is the only term (else nullopt;
    // zero polynomial yields Scalar::zero()).
    std::optional<Scalar> as_scalar() const;

    Scalar coefficient(const Word& w) const;

    int degree() const;  // max word length, -1 for zero

    friend bool operator==(const NCPolynomial& a, const NCPolynomial& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const NCPolynomial& a, const NCPolynomial& b) { return !(a == b); }

    // Used by the engine only; terms must already be normal-ordered.
    void set_term(const Word& w, Scalar c);

  private:
    SignaturePtr sig_;
    std::map<Word, Scalar, WordLess> terms_;
};

struct RewriteLimits {
    long long max_steps = 2'000'000;
    int max_comm_depth = 48;
    // Inverse-pair rewrites grow words by two letters per pass; a cap turns a
    // provably divergent rewrite into a fast failure instead of a slow one.
    size_t max_word_length = 512;
};

// Rewrites an arbitrary word combination into normal order. Throws
// NonClosedCommutator when a needed commutator has no declared expansion or
// the rewriting provably cannot terminate (cyclic inverse commutators) or
// exhausts the step budget.
NCPolynomial normal_form(const SignaturePtr& sig, const RawPoly& input,
                         const RewriteLimits& limits = {});

// [g_a, g_b] for single letters, derived from the declared tables.
NCPolynomial generator_commutator(const SignaturePtr& sig, GenId a, GenId b);

NCPolynomial add(const NCPolynomial& a, const NCPolynomial& b);
NCPolynomial sub(const NCPolynomial& a, const NCPolynomial& b);
NCPolynomial scalar_multiply(const Scalar& s, const NCPolynomial& a);
NCPolynomial multiply(const NCPolynomial& a, const NCPolynomial& b);
NCPolynomial commutator(const NCPolynomial& a, const NCPolynomial& b);

// Reverses each word, conjugates coefficients, flips sign per anti-hermitian
// letter, then re-normalizes.
NCPolynomial adjoint(const NCPolynomial& a);
bool is_hermitian(const NCPolynomial& a);

NCPolynomial operator+(const NCPolynomial& a, const NCPolynomial& b);
NCPolynomial operator-(const NCPolynomial& a, const NCPolynomial& b);
NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b);
NCPolynomial operator*(const Scalar& s, const NCPolynomial& a);
NCPolynomial operator-(const NCPolynomial& a);

// Occurrences of the letter (not counting other letters) in the longest word.
int degree_in(const NCPolynomial& p, GenId id);
bool contains_generator(const NCPolynomial& p, GenId id);

// Replaces every occurrence of one letter by a polynomial and re-normalizes.
NCPolynomial substitute_generator(const NCPolynomial& p, GenId id,
                                  const NCPolynomial& replacement);

// Inverse of a single-term polynomial c*w whose letters are all invertible:
// c^-1 * reversed inverses of w. Nullopt when that recipe does not apply.
std::optional<NCPolynomial> invert_monomial(const NCPolynomial& p);

// Matches p against declared composite inverses (c0 + c1*base); returns the
// inverse letter as a polynomial when it matches.
std::optional<NCPolynomial> invert_composite(const NCPolynomial& p);

std::string render(const NCPolynomial& p);
std::string render_word(const AlgebraSignature& sig, const Word& w);

} // namespace qref
