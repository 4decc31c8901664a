#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <map>
#include <string>

#include "qref/errors.hpp"

namespace qref {

using Rational = boost::multiprecision::cpp_rational;

// Complex number with exact rational real and imaginary parts.
struct CRat {
    Rational re{0};
    Rational im{0};

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    CRat conj() const { return {re, -im}; }

    friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
    friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
    friend CRat operator-(const CRat& a) { return {-a.re, -a.im}; }
    friend CRat operator*(const CRat& a, const CRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend CRat operator/(const CRat& a, const CRat& b);
    friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }

    std::complex<double> to_complex() const {
        return {re.convert_to<double>(), im.convert_to<double>()};
    }
};

// Product of formal commuting symbols with integer (possibly negative) exponents.
// All symbols are real under conjugation: hbar, model parameters, masses.
using SymbolMonomial = std::map<std::string, int>;

// Exact coefficient ring: Laurent polynomials in the formal symbols over CRat.
// A single (monomial, CRat) entry is one scalar coefficient term; sums of them
// arise as soon as parameters mix (e.g. lambda1 - lambda2).
class Scalar {
  public:
    Scalar() = default;

    static Scalar zero() { return {}; }
    static Scalar one() { return from_crat({Rational(1), Rational(0)}); }
    static Scalar i() { return from_crat({Rational(0), Rational(1)}); }
    static Scalar integer(long n) { return from_crat({Rational(n), Rational(0)}); }
    static Scalar rational(const Rational& r) { return from_crat({r, Rational(0)}); }
    static Scalar from_crat(const CRat& c);
    static Scalar symbol(const std::string& name, int exponent = 1);
    static Scalar hbar(int exponent = 1) { return symbol("hbar", exponent); }
    // i * hbar, the ubiquitous commutator unit.
    static Scalar i_hbar();

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const { return *this == one(); }
    // True when the value is c*1 with no symbol content.
    bool is_pure_number() const;
    // Real under conjugation (symbols are all real, so this inspects CRat parts).
    bool is_real() const;
    bool is_single_term() const { return terms_.size() == 1; }

    const std::map<SymbolMonomial, CRat>& terms() const { return terms_; }

    Scalar conj() const;
    // Multiplicative inverse; defined only for single-term scalars.
    Scalar inverse() const;
    Scalar pow(int n) const;

    std::complex<double> evaluate(const std::map<std::string, double>& env) const;

    std::string render() const;

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar& operator+=(const Scalar& o) { *this = *this + o; return *this; }
    Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }

  private:
    void add_term(const SymbolMonomial& m, const CRat& c);
    std::map<SymbolMonomial, CRat> terms_;
};

// Renders one CRat as a re-parseable factor, e.g. "3/2", "-i", "(1+1/2*i)".
std::string render_crat(const CRat& c);

} // namespace qref
