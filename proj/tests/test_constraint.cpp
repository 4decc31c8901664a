#include <doctest.h>

#include <memory>
#include <random>

#include "qref/constraint.hpp"
#include "qref/errors.hpp"

using namespace qref;

namespace {

std::shared_ptr<AlgebraSignature> toy_sig(bool invertible_q1) {
    auto s = std::make_shared<AlgebraSignature>();
    s->add_pair("q0", "p0");
    s->add_pair("q1", "p1");
    if (invertible_q1) s->declare_invertible("q1");
    return s;
}

// q1*p0 + (q1*p1 + p1*q1)/2, symmetrized so it is hermitian.
NCPolynomial toy_constraint(const SignaturePtr& s) {
    GenId q1 = s->find("q1"), p0 = s->find("p0"), p1 = s->find("p1");
    RawPoly raw{{Scalar::one(), {q1, p0}},
                {Scalar::rational(Rational(1, 2)), {q1, p1}},
                {Scalar::rational(Rational(1, 2)), {p1, q1}}};
    return normal_form(s, raw);
}

} // namespace

TEST_CASE("position-times-momentum constraint fails factorization with exact obstruction") {
    auto s = toy_sig(true);
    auto C = toy_constraint(s);
    ConstraintSpec spec(s, C, {s->find("q0")});

    GenId q0 = s->find("q0"), q1 = s->find("q1");
    GenId p0 = s->find("p0"), p1 = s->find("p1");
    GenId iq1 = s->decl(q1).inverse_id;

    CHECK(compute_lapse(spec, q0) == NCPolynomial::gen(s, q1));

    auto rep = attempt_factorization(spec, q0);
    CHECK(rep.lapse == NCPolynomial::gen(s, q1));

    // Right factor p0 + p1 - (i hbar/2) q1^-1.
    NCPolynomial expected = normal_form(
        s, RawPoly{{Scalar::one(), {p0}},
                   {Scalar::one(), {p1}},
                   {Scalar::i_hbar() * Scalar::rational(Rational(-1, 2)), {iq1}}});
    REQUIRE(rep.right_factor.has_value());
    CHECK(*rep.right_factor == expected);

    CHECK(rep.obstruction == scalar_multiply(Scalar::i_hbar(), NCPolynomial::gen(s, q1)));
    CHECK(rep.lapse_hermitian);
    CHECK_FALSE(rep.lapse_commutes_with_right_factor);
    CHECK(rep.lapse_commutes_with_reference);
    CHECK_FALSE(rep.right_factor_hermitian);
    CHECK(rep.verdict == Verdict::Invalid);
}

TEST_CASE("factorization degree and invertibility diagnostics") {
    auto s = toy_sig(false);
    GenId q0 = s->find("q0"), p0 = s->find("p0"), q1 = s->find("q1");

    SUBCASE("quadratic in the conjugate momentum") {
        auto C = normal_form(s, RawPoly{{Scalar::one(), {p0, p0}}});
        ConstraintSpec spec(s, C, {q0});
        CHECK_THROWS_AS((void)attempt_factorization(spec, q0), NotLinearInMomentum);
    }
    SUBCASE("consistent factorization blocked by a non-invertible lapse") {
        auto C = normal_form(s, RawPoly{{Scalar::one(), {q1, p0}}});
        ConstraintSpec spec(s, C, {q0});
        CHECK_THROWS_AS((void)attempt_factorization(spec, q0), LapseNotInvertible);
    }
    SUBCASE("non-hermitian constraints are rejected up front") {
        auto bad = normal_form(s, RawPoly{{Scalar::one(), {q1, s->find("p1")}}});
        CHECK_THROWS_AS(ConstraintSpec(s, bad, {q0}), AlgebraError);
    }
    SUBCASE("momentum candidates are rejected") {
        auto C = normal_form(s, RawPoly{{Scalar::one(), {p0}}});
        CHECK_THROWS_AS(ConstraintSpec(s, C, {p0}), AlgebraError);
    }
}

TEST_CASE("two ideal clocks and one non-uniform clock") {
    auto s = std::make_shared<AlgebraSignature>();
    s->add_pair("q0", "p0");
    s->add_pair("q1", "p1");
    s->add_pair("q2", "p2");
    GenId q0 = s->find("q0"), q1 = s->find("q1"), q2 = s->find("q2");
    GenId p0 = s->find("p0"), p1 = s->find("p1"), p2 = s->find("p2");
    auto half = Scalar::rational(Rational(1, 2));
    auto C = normal_form(s, RawPoly{{Scalar::one(), {p0}},
                                    {Scalar::one(), {p1}},
                                    {half, {q2, q2}},
                                    {half, {p2, p2}}});
    ConstraintSpec spec(s, C, {q0, q1});

    auto rep = attempt_factorization(spec, q0);
    CHECK(rep.lapse == NCPolynomial::one(s));
    CHECK(rep.verdict == Verdict::Valid);
    REQUIRE(rep.right_factor.has_value());
    CHECK(*rep.right_factor == C);

    auto clk1 = classify_clock(s, q1, *rep.right_factor);
    CHECK(clk1.classification == ClockClass::Ideal);
    CHECK(clk1.rate == NCPolynomial::one(s));
    CHECK(clk1.ideal_rate.value() == Scalar::one());
    CHECK(clk1.rate_is_constant_of_motion);

    // The mirrored factorization swaps the roles of the two ideal clocks.
    auto rep1 = attempt_factorization(spec, q1);
    CHECK(rep1.verdict == Verdict::Valid);
    auto clk0 = classify_clock(s, q0, *rep1.right_factor);
    CHECK(clk0.classification == ClockClass::Ideal);

    auto clk2 = classify_clock(s, q2, *rep.right_factor);
    CHECK(clk2.classification == ClockClass::NonUniform);
    CHECK(clk2.rate == NCPolynomial::gen(s, p2));
    CHECK_FALSE(clk2.rate_is_constant_of_motion);

    CHECK_THROWS_AS((void)classify_clock(s, p1, *rep.right_factor), FrozenClock);
}

namespace {

struct NetworkFixture {
    std::shared_ptr<AlgebraSignature> s;
    GenId qA, pA, qB, pB, qC, pC, fA, fAp;
    Scalar l1 = Scalar::symbol("lambda1");
    Scalar l2 = Scalar::symbol("lambda2");
    NCPolynomial C1;

    NetworkFixture() {
        s = std::make_shared<AlgebraSignature>();
        std::tie(qA, pA) = s->add_pair("q_A", "p_A");
        std::tie(qB, pB) = s->add_pair("q_B", "p_B");
        std::tie(qC, pC) = s->add_pair("q_C", "p_C");
        fA = s->add_function("f_A", "q_A", "f_A_prime");
        fAp = s->find("f_A_prime");
        s->add_composite_inverse("u_A", "p_B", Scalar::one(), l1);
        C1 = normal_form(s, RawPoly{{Scalar::one(), {pA}},
                                    {Scalar::one(), {pB}},
                                    {Scalar::one(), {pC}},
                                    {l1, {pA, pB}},
                                    {Scalar::one(), {fA}},
                                    {l2, {fA, pB}}});
    }
};

} // namespace

TEST_CASE("three-clock network with unequal couplings") {
    NetworkFixture fx;
    ConstraintSpec spec(fx.s, fx.C1, {fx.qA, fx.qB, fx.qC});

    SUBCASE("frame A is valid on the invertibility domain") {
        auto rep = attempt_factorization(spec, fx.qA);
        NCPolynomial expectedN = normal_form(
            fx.s, RawPoly{{Scalar::one(), {}}, {fx.l1, {fx.pB}}});
        CHECK(rep.lapse == expectedN);
        CHECK(rep.verdict == Verdict::ValidOnInvertibilityDomain);
        CHECK(rep.lapse_hermitian);
        CHECK(rep.right_factor_hermitian);
        CHECK(rep.lapse_commutes_with_right_factor);
        REQUIRE(rep.right_factor.has_value());
    }
    SUBCASE("frame B fails with the coupling-mismatch obstruction") {
        auto rep = attempt_factorization(spec, fx.qB);
        NCPolynomial expectedN = normal_form(
            fx.s, RawPoly{{Scalar::one(), {}}, {fx.l1, {fx.pA}}, {fx.l2, {fx.fA}}});
        CHECK(rep.lapse == expectedN);
        CHECK(rep.verdict == Verdict::Invalid);
        CHECK_FALSE(rep.right_factor.has_value());

        // (lambda1 - lambda2) [p_A, f_A] = -i hbar (lambda1 - lambda2) f_A'.
        auto bracket = commutator(NCPolynomial::gen(fx.s, fx.pA),
                                  NCPolynomial::gen(fx.s, fx.fA));
        CHECK(rep.obstruction == scalar_multiply(fx.l1 - fx.l2, bracket));
        CHECK(rep.obstruction ==
              scalar_multiply(Scalar::i_hbar() * (fx.l2 - fx.l1),
                              NCPolynomial::gen(fx.s, fx.fAp)));
        CHECK(rep.lapse_hermitian);
        CHECK(rep.lapse_commutes_with_reference);
    }
    SUBCASE("frame C sees a trivial lapse") {
        auto rep = attempt_factorization(spec, fx.qC);
        CHECK(rep.lapse == NCPolynomial::one(fx.s));
        CHECK(rep.verdict == Verdict::Valid);
        CHECK(*rep.right_factor == fx.C1);
    }
}

namespace {

struct SimplifiedNetworkFixture {
    std::shared_ptr<AlgebraSignature> s;
    GenId qA, pAp, qB, pB, qC, pC, uA, uB;
    Scalar lam = Scalar::symbol("lambda");
    NCPolynomial C1;

    SimplifiedNetworkFixture() {
        s = std::make_shared<AlgebraSignature>();
        std::tie(qA, pAp) = s->add_pair("q_A", "p_A_prime");
        std::tie(qB, pB) = s->add_pair("q_B", "p_B");
        std::tie(qC, pC) = s->add_pair("q_C", "p_C");
        uA = s->add_composite_inverse("u_A", "p_B", Scalar::one(), lam);
        uB = s->add_composite_inverse("u_B", "p_A_prime", Scalar::one(), lam);
        C1 = normal_form(s, RawPoly{{Scalar::one(), {pAp}},
                                    {Scalar::one(), {pB}},
                                    {Scalar::one(), {pC}},
                                    {lam, {pAp, pB}}});
    }
};

} // namespace

TEST_CASE("equal couplings absorb the interaction into redefined momenta") {
    SimplifiedNetworkFixture fx;
    ConstraintSpec spec(fx.s, fx.C1, {fx.qA, fx.qB, fx.qC});
    Scalar ilam = fx.lam.inverse();

    auto repA = attempt_factorization(spec, fx.qA);
    CHECK(repA.verdict == Verdict::ValidOnInvertibilityDomain);
    NCPolynomial expectedA = normal_form(
        fx.s, RawPoly{{ilam, {}},
                      {Scalar::one(), {fx.pAp}},
                      {Scalar::integer(-1) * ilam, {fx.uA}},
                      {Scalar::one(), {fx.pC, fx.uA}}});
    CHECK(*repA.right_factor == expectedA);
    CHECK(repA.lapse_commutes_with_right_factor);

    auto repB = attempt_factorization(spec, fx.qB);
    CHECK(repB.verdict == Verdict::ValidOnInvertibilityDomain);
    NCPolynomial expectedB = normal_form(
        fx.s, RawPoly{{ilam, {}},
                      {Scalar::one(), {fx.pB}},
                      {Scalar::integer(-1) * ilam, {fx.uB}},
                      {Scalar::one(), {fx.pC, fx.uB}}});
    CHECK(*repB.right_factor == expectedB);

    auto repC = attempt_factorization(spec, fx.qC);
    CHECK(repC.verdict == Verdict::Valid);

    // In frame C the clock q_A ticks at the operator rate 1 + lambda p_B,
    // which is itself a constant of motion.
    auto clk = classify_clock(fx.s, fx.qA, *repC.right_factor);
    CHECK(clk.classification == ClockClass::Good);
    NCPolynomial expectedRate = normal_form(
        fx.s, RawPoly{{Scalar::one(), {}}, {fx.lam, {fx.pB}}});
    CHECK(clk.rate == expectedRate);
    CHECK(clk.rate_is_constant_of_motion);
    CHECK_FALSE(clk.ideal_rate.has_value());
}

TEST_CASE("deparameterized constraints always factor with a trivial lapse") {
    auto s = std::make_shared<AlgebraSignature>();
    s->add_pair("z", "e");
    s->add_pair("q", "p");
    GenId z = s->find("z"), e = s->find("e");
    GenId q = s->find("q"), p = s->find("p");

    std::mt19937 rng(20240817u);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> len(0, 3);
    std::uniform_int_distribution<int> pick(0, 1);
    std::uniform_int_distribution<int> nterms(1, 4);

    int checked = 0;
    for (int iter = 0; iter < 200; ++iter) {
        RawPoly raw;
        int terms = nterms(rng);
        for (int t = 0; t < terms; ++t) {
            Word w;
            int L = len(rng);
            for (int k = 0; k < L; ++k) w.push_back(pick(rng) ? q : p);
            Scalar c = Scalar::integer(coeff(rng)) + Scalar::i() * Scalar::integer(coeff(rng));
            raw.push_back({c, w});
        }
        auto X = normal_form(s, raw);
        auto H = X + adjoint(X);  // hermitian by construction
        auto C = NCPolynomial::gen(s, e) + H;
        ConstraintSpec spec(s, C, {z});
        auto rep = attempt_factorization(spec, z);
        REQUIRE(rep.lapse == NCPolynomial::one(s));
        REQUIRE(rep.verdict == Verdict::Valid);
        REQUIRE(*rep.right_factor == C);
        REQUIRE(rep.obstruction.is_zero());
        ++checked;
    }
    CHECK(checked == 200);
}
