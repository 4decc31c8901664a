#include "qref/symbolic_state.hpp"

#include "qref/errors.hpp"

namespace qref {

SymbolicMomentState::SymbolicMomentState() {
    auto s = std::make_shared<AlgebraSignature>();
    auto [z, e] = s->add_pair("z", "e");
    auto [q, p] = s->add_pair("q", "p");
    GenId h = s->add_formal("h", false, {"q"});
    sig_ = s;
    z_ = z;
    e_ = e;
    q_ = q;
    p_ = p;
    h_ = h;
    constraint_ = normal_form(sig_, RawPoly{{Scalar::one(), {e_}}, {Scalar::one(), {h_}}});
}

Scalar SymbolicMomentState::value(const NCPolynomial& poly) const {
    Scalar acc = Scalar::zero();
    for (const auto& [w, c] : poly.terms()) acc += c * value_word(w);
    return acc;
}

Scalar SymbolicMomentState::value_word(const Word& w) const {
    if (w.empty()) return Scalar::one();

    int k = 0;
    Word rest;
    rest.reserve(w.size());
    for (GenId g : w) {
        if (g == z_)
            ++k;
        else
            rest.push_back(g);
    }
    Scalar tk = k == 0 ? Scalar::one() : Scalar::symbol("t", k);

    int m = 0;
    size_t epos = 0;
    for (size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == e_) {
            ++m;
            epos = i;
        }
    }
    if (m >= 2) {
        throw DegreeOverflow("cannot value " + render_word(*sig_, w) +
                             ": two factors of the conjugate momentum");
    }
    if (m == 1) {
        for (size_t i = epos + 1; i < rest.size(); ++i) {
            if (!generator_commutator(sig_, rest[i], e_).is_zero()) {
                throw DegreeOverflow(
                    "cannot value " + render_word(*sig_, w) +
                    ": letters to the right of the momentum do not commute with it");
            }
        }
        Word a(rest.begin(), rest.begin() + epos);
        a.insert(a.end(), rest.begin() + epos + 1, rest.end());
        return -(tk * value(multiply(NCPolynomial::word(sig_, a), NCPolynomial::gen(sig_, h_))));
    }
    if (rest.empty()) return tk;
    return tk * Scalar::symbol("w[" + render_word(*sig_, rest) + "]");
}

namespace {

Scalar sym_covariance(const SymbolicMomentState& st, const NCPolynomial& A,
                      const NCPolynomial& B) {
    const Scalar half = Scalar::rational(Rational(1, 2));
    Scalar sym = half * st.value(add(multiply(A, B), multiply(B, A)));
    return sym - st.value(A) * st.value(B);
}

} // namespace

std::vector<SymbolicIdentity> verify_structural_identities() {
    SymbolicMomentState st;
    const SignaturePtr& s = st.signature();
    auto Z = NCPolynomial::gen(s, st.reference());
    auto E = NCPolynomial::gen(s, st.momentum());
    auto C = st.constraint();
    // generic hermitian commutant elements, one involving the opaque
    // hamiltonian letter and one from the conjugate side of the system pair
    auto A = add(NCPolynomial::word(s, Word{st.system_q(), st.system_q(),
                                            st.hamiltonian_letter()}),
                 NCPolynomial::gen(s, st.system_q()));
    auto B = add(NCPolynomial::word(s, Word{st.system_p(), st.system_p()}),
                 NCPolynomial::gen(s, st.system_p()));

    std::vector<SymbolicIdentity> out;
    auto push = [&out](std::string name, Scalar expected, Scalar actual) {
        bool holds = (actual - expected).is_zero();
        out.push_back({std::move(name), std::move(expected), std::move(actual), holds});
    };

    push("constraint expectation vanishes", Scalar::zero(), st.value(C));
    push("constraint annihilated by a position-side word", Scalar::zero(),
         st.value(multiply(A, C)));
    push("constraint annihilated by a momentum-side word", Scalar::zero(),
         st.value(multiply(B, C)));
    push("reference variance vanishes", Scalar::zero(), sym_covariance(st, Z, Z));
    push("reference decorrelates from position-side words", Scalar::zero(),
         sym_covariance(st, Z, A));
    push("reference decorrelates from momentum-side words", Scalar::zero(),
         sym_covariance(st, Z, B));
    push("reference-momentum covariance is -i*hbar/2",
         Scalar::rational(Rational(-1, 2)) * Scalar::i_hbar(), sym_covariance(st, Z, E));
    {
        // (dZ)^2 (dE)^2 - cov^2: the first factor vanishes identically, so
        // the product is -cov^2 no matter what multiplies the zero.
        Scalar cov = sym_covariance(st, Z, E);
        push("uncertainty product saturates at hbar^2/4",
             Scalar::rational(Rational(1, 4)) * Scalar::hbar(2), -(cov * cov));
    }
    push("nonpositivity witness is -i*hbar/2",
         Scalar::rational(Rational(-1, 2)) * Scalar::i_hbar(),
         Scalar::rational(Rational(1, 2)) * st.value(add(multiply(C, Z), multiply(Z, C))));
    for (int k = 1; k <= 4; ++k) {
        Word zk(static_cast<size_t>(k), st.reference());
        push("reference power " + std::to_string(k) + " factors out",
             Scalar::symbol("t", k) * st.value(A),
             st.value(multiply(NCPolynomial::word(s, zk), A)));
    }
    return out;
}

} // namespace qref
