#include "qref/scalar.hpp"

#include <sstream>

namespace qref {

CRat operator/(const CRat& a, const CRat& b) {
    if (b.is_zero()) throw AlgebraError("division by zero coefficient");
    Rational n = b.re * b.re + b.im * b.im;
    CRat num = a * b.conj();
    return {num.re / n, num.im / n};
}

Scalar Scalar::from_crat(const CRat& c) {
    Scalar s;
    if (!c.is_zero()) s.terms_[SymbolMonomial{}] = c;
    return s;
}

Scalar Scalar::symbol(const std::string& name, int exponent) {
    if (exponent == 0) return one();
    Scalar s;
    SymbolMonomial m;
    m[name] = exponent;
    s.terms_[m] = CRat{Rational(1), Rational(0)};
    return s;
}

Scalar Scalar::i_hbar() {
    Scalar s = hbar();
    return i() * s;
}

bool Scalar::is_pure_number() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first.empty();
}

bool Scalar::is_real() const {
    for (const auto& [m, c] : terms_)
        if (!c.is_real()) return false;
    return true;
}

void Scalar::add_term(const SymbolMonomial& m, const CRat& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (!c.is_zero()) terms_.emplace(m, c);
        return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
}

Scalar Scalar::conj() const {
    Scalar r;
    for (const auto& [m, c] : terms_) r.terms_[m] = c.conj();
    return r;
}

Scalar Scalar::inverse() const {
    if (terms_.empty()) throw AlgebraError("inverse of zero scalar");
    if (terms_.size() != 1)
        throw AlgebraError("scalar inverse defined only for single-term coefficients");
    const auto& [m, c] = *terms_.begin();
    SymbolMonomial inv;
    for (const auto& [name, e] : m) inv[name] = -e;
    Scalar r;
    r.terms_[inv] = CRat{Rational(1), Rational(0)} / c;
    return r;
}

Scalar Scalar::pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    Scalar r = one();
    for (int k = 0; k < n; ++k) r = r * *this;
    return r;
}

std::complex<double> Scalar::evaluate(const std::map<std::string, double>& env) const {
    std::complex<double> total{0.0, 0.0};
    for (const auto& [m, c] : terms_) {
        std::complex<double> v = c.to_complex();
        for (const auto& [name, e] : m) {
            auto it = env.find(name);
            if (it == env.end())
                throw BadParameter("no numeric value for symbol '" + name + "'");
            v *= std::pow(std::complex<double>(it->second, 0.0), e);
        }
        total += v;
    }
    return total;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
    Scalar r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    Scalar r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
}

Scalar operator-(const Scalar& a) {
    Scalar r;
    for (const auto& [m, c] : a.terms_) r.terms_[m] = -c;
    return r;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar r;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            SymbolMonomial m = ma;
            for (const auto& [name, e] : mb) {
                int& slot = m[name];
                slot += e;
                if (slot == 0) m.erase(name);
            }
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

namespace {

std::string render_rational(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

std::string render_monomial(const SymbolMonomial& m) {
    std::string out;
    for (const auto& [name, e] : m) {
        if (!out.empty()) out += "*";
        out += name;
        if (e != 1) out += "^" + std::to_string(e);
    }
    return out;
}

} // namespace

std::string render_crat(const CRat& c) {
    if (c.im == 0) return render_rational(c.re);
    std::string imag;
    if (c.im == 1) imag = "i";
    else if (c.im == -1) imag = "-i";
    else imag = render_rational(c.im) + "*i";
    if (c.re == 0) return imag;
    std::string out = "(" + render_rational(c.re);
    out += (c.im > 0) ? "+" : "-";
    if (c.im == 1 || c.im == -1) out += "i";
    else out += render_rational(abs(c.im)) + "*i";
    return out + ")";
}

std::string Scalar::render() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        std::string mono = render_monomial(m);
        // Pull a purely real negative coefficient out as a leading minus.
        bool neg = c.is_real() && c.re < 0;
        CRat shown = neg ? -c : c;
        std::string coef = render_crat(shown);
        std::string term;
        if (mono.empty()) term = coef;
        else if (shown == CRat{Rational(1), Rational(0)}) term = mono;
        else term = coef + "*" + mono;
        if (first) {
            out += neg ? "-" + term : term;
            first = false;
        } else {
            out += neg ? " - " + term : " + " + term;
        }
    }
    return out;
}

} // namespace qref
