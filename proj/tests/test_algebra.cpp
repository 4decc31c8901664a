#include <doctest.h>

#include "qref/polynomial.hpp"

using namespace qref;

namespace {

struct CanonicalFixture {
    std::shared_ptr<AlgebraSignature> raw = std::make_shared<AlgebraSignature>();
    SignaturePtr sig;
    GenId q, p, f, fp, lam;

    CanonicalFixture() {
        std::tie(q, p) = raw->add_pair("q", "p");
        f = raw->add_function("f", "q", "f_prime");
        fp = raw->find("f_prime");
        lam = raw->add_formal("lam");
        sig = raw;
    }

    NCPolynomial G(GenId id) const { return NCPolynomial::gen(sig, id); }
};

} // namespace

TEST_CASE("canonical pair and normal ordering") {
    CanonicalFixture fx;
    auto q = fx.G(fx.q), p = fx.G(fx.p);
    Scalar ih = Scalar::i_hbar();

    CHECK(generator_commutator(fx.sig, fx.q, fx.p) == NCPolynomial::scalar(fx.sig, ih));
    CHECK(generator_commutator(fx.sig, fx.p, fx.q) == NCPolynomial::scalar(fx.sig, -ih));

    // p*q reorders to q*p - i*hbar
    auto pq = p * q;
    CHECK(pq.coefficient(Word{fx.q, fx.p}) == Scalar::one());
    CHECK(pq.coefficient(Word{}) == -ih);
    CHECK(pq.terms().size() == 2);

    // p^2 q^2 = q^2 p^2 - 4 i hbar q p - 2 hbar^2 (checked against the
    // Schrodinger representation p = -i hbar d/dx acting on test functions)
    auto lhs = p * p * q * q;
    NCPolynomial rhs(fx.sig);
    rhs.set_term(Word{fx.q, fx.q, fx.p, fx.p}, Scalar::one());
    rhs.set_term(Word{fx.q, fx.p}, Scalar::integer(-4) * ih);
    rhs.set_term(Word{}, Scalar::integer(-2) * Scalar::hbar(2));
    CHECK(lhs == rhs);
    CHECK(render(lhs) == "-2*hbar^2 - 4*i*hbar*q*p + q^2*p^2");

    CHECK(lhs.degree() == 4);
    CHECK(degree_in(lhs, fx.q) == 2);
    CHECK(contains_generator(lhs, fx.p));
}

TEST_CASE("function letters obey the chain rule") {
    CanonicalFixture fx;
    Scalar ih = Scalar::i_hbar();
    CHECK(generator_commutator(fx.sig, fx.f, fx.p) == ih * fx.G(fx.fp));
    CHECK(generator_commutator(fx.sig, fx.p, fx.f) == -ih * fx.G(fx.fp));
    CHECK(generator_commutator(fx.sig, fx.f, fx.q).is_zero());
    CHECK(generator_commutator(fx.sig, fx.f, fx.fp).is_zero());
}

TEST_CASE("dependency-disjoint letters commute by default") {
    CanonicalFixture fx;
    CHECK(generator_commutator(fx.sig, fx.lam, fx.q).is_zero());
    CHECK(generator_commutator(fx.sig, fx.lam, fx.p).is_zero());
    CHECK(generator_commutator(fx.sig, fx.lam, fx.f).is_zero());
}

TEST_CASE("conjugate overlap without a declaration is an error") {
    auto raw = std::make_shared<AlgebraSignature>();
    raw->add_pair("q", "p");
    raw->add_formal("g", false, {"q"});
    raw->add_formal("g0", false, {"q"});
    raw->declare_commutator("g0", "p", {});  // declared to vanish
    SignaturePtr sig = raw;

    CHECK_THROWS_AS(generator_commutator(sig, sig->find("g"), sig->find("p")),
                    NonClosedCommutator);
    CHECK(generator_commutator(sig, sig->find("g0"), sig->find("p")).is_zero());
    CHECK(generator_commutator(sig, sig->find("g"), sig->find("g0")).is_zero());
    CHECK_THROWS_AS(sig->find("nope"), UnknownGenerator);
}

TEST_CASE("declared commutators carry orientation") {
    auto raw = std::make_shared<AlgebraSignature>();
    raw->add_pair("q", "p");
    GenId g = raw->add_formal("g", true, {"q"});
    raw->declare_commutator("g", "p", {{Scalar::symbol("kappa"), {}}});
    SignaturePtr sig = raw;
    GenId p = sig->find("p");
    GenId gi = sig->decl(g).inverse_id;
    REQUIRE(gi >= 0);

    Scalar kappa = Scalar::symbol("kappa");
    CHECK(generator_commutator(sig, g, p) == NCPolynomial::scalar(sig, kappa));
    CHECK(generator_commutator(sig, p, g) == NCPolynomial::scalar(sig, -kappa));

    // [g^-1, p] = -g^-1 [g, p] g^-1 = -kappa g^-2
    NCPolynomial expect(sig);
    expect.set_term(Word{gi, gi}, -kappa);
    CHECK(generator_commutator(sig, gi, p) == expect);

    // cancellation fires anywhere in a word
    CHECK(NCPolynomial::gen(sig, g) * NCPolynomial::gen(sig, gi) == NCPolynomial::one(sig));
    auto mixed = normal_form(sig, {{Scalar::one(), Word{g, gi, p}}});
    CHECK(mixed == NCPolynomial::gen(sig, p));

    auto inv = invert_monomial(Scalar::integer(2) * NCPolynomial::gen(sig, g));
    REQUIRE(inv.has_value());
    CHECK(*inv == Scalar::rational(Rational(1, 2)) * NCPolynomial::gen(sig, gi));
    CHECK(*inv * (Scalar::integer(2) * NCPolynomial::gen(sig, g)) == NCPolynomial::one(sig));
    CHECK(!invert_monomial(NCPolynomial::gen(sig, "q")).has_value());
    CHECK(!invert_monomial(NCPolynomial::gen(sig, "q") + NCPolynomial::one(sig)).has_value());
}

TEST_CASE("adjoint and hermiticity") {
    CanonicalFixture fx;
    auto q = fx.G(fx.q), p = fx.G(fx.p);
    Scalar ih = Scalar::i_hbar();

    CHECK(adjoint(q * p) == q * p - NCPolynomial::scalar(fx.sig, ih));
    CHECK(is_hermitian(q * q + p * p));
    CHECK(!is_hermitian(q * p));
    Scalar half = Scalar::rational(Rational(1, 2));
    CHECK(is_hermitian(half * (q * p + p * q)));
    CHECK(is_hermitian(ih * (q * p - p * q)));

    auto raw = std::make_shared<AlgebraSignature>();
    raw->add_pair("q", "p");
    GenId k = raw->add_formal("kap", false, {}, Star::AntiHermitian);
    SignaturePtr sig = raw;
    CHECK(adjoint(NCPolynomial::gen(sig, k)) == -NCPolynomial::gen(sig, k));
    CHECK(!is_hermitian(NCPolynomial::gen(sig, k)));
    CHECK(is_hermitian(Scalar::i() * NCPolynomial::gen(sig, k)));
}

TEST_CASE("composite inverse compresses exactly") {
    auto raw = std::make_shared<AlgebraSignature>();
    auto [Q, P] = raw->add_pair("Q", "P");
    Scalar lam = Scalar::symbol("lambda");
    GenId u = raw->add_composite_inverse("u", "P", Scalar::one(), lam);
    SignaturePtr sig = raw;

    auto one = NCPolynomial::one(sig);
    auto affine = one + lam * NCPolynomial::gen(sig, P);
    auto U = NCPolynomial::gen(sig, u);

    CHECK(affine * U == one);
    CHECK(U * affine == one);

    // [u, Q] = [P, Q] u' = (-i hbar)(-lambda u^2)
    NCPolynomial expect(sig);
    expect.set_term(Word{u, u}, Scalar::i_hbar() * lam);
    CHECK(generator_commutator(sig, u, Q) == expect);

    auto found = invert_composite(affine);
    REQUIRE(found.has_value());
    CHECK(*found == U);
    CHECK(!invert_composite(one + NCPolynomial::gen(sig, Q)).has_value());

    // u commutes with its own base
    CHECK(commutator(NCPolynomial::gen(sig, P), U).is_zero());
}

TEST_CASE("mixed noncommuting inverses fail to normal-order") {
    auto raw = std::make_shared<AlgebraSignature>();
    raw->add_pair("q", "p");
    GenId g = raw->add_formal("g", true, {"q"});
    GenId w = raw->add_formal("w", true, {"q"});
    raw->declare_commutator("g", "w", {{Scalar::symbol("kappa"), {}}});
    SignaturePtr sig = raw;
    GenId gi = sig->decl(g).inverse_id;
    GenId wi = sig->decl(w).inverse_id;

    // single inverses against the ordinary letters are fine...
    // [g^-1, w] = -g^-1 [g, w] g^-1 = -kappa g^-2
    NCPolynomial expect(sig);
    expect.set_term(Word{gi, gi}, -Scalar::symbol("kappa"));
    CHECK(generator_commutator(sig, gi, w) == expect);
    // ...but words mixing the two inverses grow without bound
    CHECK_THROWS_AS(generator_commutator(sig, gi, wi), NonClosedCommutator);
    CHECK_THROWS_AS(normal_form(sig, {{Scalar::one(), Word{wi, gi}}}), NonClosedCommutator);
}

TEST_CASE("substitution replaces letters and renormalizes") {
    CanonicalFixture fx;
    auto q = fx.G(fx.q), p = fx.G(fx.p), one = NCPolynomial::one(fx.sig);
    auto qp = q * p;
    CHECK(substitute_generator(qp, fx.q, q + one) == qp + p);
    CHECK(substitute_generator(qp, fx.lam, p) == qp);
    // p -> 0 kills every word containing p
    CHECK(substitute_generator(qp, fx.p, NCPolynomial::zero(fx.sig)).is_zero());
}
