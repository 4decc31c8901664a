#include <doctest.h>

#include <cmath>
#include <memory>

#include "qref/errors.hpp"
#include "qref/flow.hpp"

using namespace qref;
using doctest::Approx;

namespace {

constexpr double kHbar = 1.0;

struct OscillatorSetup {
    SignaturePtr sig;
    GenId z, e, q, p;
    BasisPtr basis;
    NCPolynomial constraint;

    OscillatorSetup() {
        auto s = std::make_shared<AlgebraSignature>();
        s->add_pair("z", "e");
        s->add_pair("q", "p");
        sig = s;
        z = s->find("z");
        e = s->find("e");
        q = s->find("q");
        p = s->find("p");
        basis = enumerate_commutant_basis(sig, z, 4);
        auto half = Scalar::rational(Rational(1, 2));
        constraint = normal_form(sig, RawPoly{{Scalar::one(), {e}}, {half, {q, q}}, {half, {p, p}}});
    }

    MomentState state(const GaussianSpec& g, double t0) const {
        auto reduced = gaussian_pair_moments(g, kHbar, 4);
        return MomentState::extend_from_reduced(basis, reduced, t0, constraint, {{"hbar", kHbar}});
    }
};

} // namespace

TEST_CASE("compiled valuation matches the state valuation") {
    OscillatorSetup o;
    auto st = o.state({o.q, o.p, 0.4, -0.3, 0.6, 0.1, 0.8}, 0.25);
    auto slice = zfree_slice(o.basis);
    std::vector<Cplx> m(slice.words.size());
    for (size_t i = 0; i < m.size(); ++i) m[i] = st.value_word(slice.words[i]);

    SUBCASE("on polynomials with reference and momentum letters") {
        auto check_poly = [&](const NCPolynomial& poly) {
            auto plan = compile_valuation(slice, poly, st.hamiltonian(), st.env());
            CHECK(plan.dropped == 0);
            Cplx direct = st.value(poly);
            Cplx compiled = evaluate_plan(plan, st.t_Z(), m);
            CHECK(std::abs(direct - compiled) < 1e-12);
        };
        check_poly(NCPolynomial::gen(o.sig, o.e));
        check_poly(multiply(NCPolynomial::gen(o.sig, o.e), NCPolynomial::gen(o.sig, o.q)));
        check_poly(multiply(NCPolynomial::gen(o.sig, o.z),
                            multiply(NCPolynomial::gen(o.sig, o.z), NCPolynomial::gen(o.sig, o.p))));
        check_poly(o.constraint);
    }
    SUBCASE("flow right-hand sides agree with the direct bracket") {
        const Scalar inv_ihbar = Scalar::i_hbar().inverse();
        for (const Word& w : slice.words) {
            auto rhs = scalar_multiply(
                inv_ihbar, commutator(NCPolynomial::word(o.sig, w), st.constraint()));
            auto plan = compile_valuation(slice, rhs, st.hamiltonian(), st.env());
            CHECK(plan.dropped == 0);
            Cplx compiled = evaluate_plan(plan, st.t_Z(), m);
            CHECK(std::abs(compiled - gauge_flow_rhs(st, w)) < 1e-12);
        }
    }
}

TEST_CASE("oscillator flow reproduces the rotating closed form") {
    OscillatorSetup o;
    const double qb = 1.0, pb = 0.0, sqq = 0.7, sqp = 0.1, spp = 0.4;
    const double t0 = 0.2;
    auto st = o.state({o.q, o.p, qb, pb, sqq, sqp, spp}, t0);
    const double tau_end = M_PI / 2.0;
    auto tr = evolve(st, tau_end, 1e-3);

    CHECK(tr.warnings.empty());
    CHECK(tr.samples.size() >= 1000);
    CHECK(tr.samples.back().tau == tau_end);
    for (size_t i : {size_t(0), tr.samples.size() / 2, tr.samples.size() - 1}) {
        CHECK(tr.samples[i].t_Z == t0 + tr.samples[i].tau);
    }

    // means rotate and the covariance matrix conjugates by the same rotation
    auto closed = [&](double tau) {
        const double c = std::cos(tau), s = std::sin(tau);
        struct Vals {
            double q, p, sqq, sqp, spp;
        } v;
        v.q = c * qb + s * pb;
        v.p = c * pb - s * qb;
        v.sqq = c * c * sqq + 2 * c * s * sqp + s * s * spp;
        v.spp = s * s * sqq - 2 * c * s * sqp + c * c * spp;
        v.sqp = c * s * (spp - sqq) + (c * c - s * s) * sqp;
        return v;
    };

    for (size_t i : {tr.samples.size() / 3, tr.samples.size() - 1}) {
        auto sample = tr.samples[i];
        auto v = closed(sample.tau);
        auto at = state_at(tr, i);
        CHECK(at.value_word(Word{o.q}).real() == Approx(v.q).epsilon(1e-10).scale(1.0));
        CHECK(at.value_word(Word{o.p}).real() == Approx(v.p).epsilon(1e-10).scale(1.0));
        CHECK(at.value_word(Word{o.q, o.q}).real() ==
              Approx(v.sqq + v.q * v.q).epsilon(1e-9).scale(1.0));
        CHECK(at.value_word(Word{o.p, o.p}).real() ==
              Approx(v.spp + v.p * v.p).epsilon(1e-9).scale(1.0));
        auto qp = at.value_word(Word{o.q, o.p});
        CHECK(qp.real() == Approx(v.sqp + v.q * v.p).epsilon(1e-9).scale(1.0));
        CHECK(qp.imag() == Approx(0.5 * kHbar).epsilon(1e-10));
    }

    SUBCASE("the final state still satisfies the defining conditions") {
        auto fin = state_at(tr, tr.samples.size() - 1);
        CHECK(fin.t_Z() == t0 + tau_end);
        auto rep = check_almost_positive(fin, 1e-8);
        CHECK(rep.pass);
        auto u = uncertainty_product_check(fin, 1e-8);
        CHECK(u.saturated);
    }
    SUBCASE("rebuilding the initial sample reproduces the initial state") {
        auto back = state_at(tr, 0);
        for (const Word& w : tr.basis->words) CHECK(back.value_word(w) == st.value_word(w));
    }
    SUBCASE("finite differences of the samples match the flow rate") {
        int iq = -1;
        for (size_t i = 0; i < tr.words.size(); ++i) {
            if (tr.words[i] == Word{o.q}) iq = static_cast<int>(i);
        }
        REQUIRE(iq >= 0);
        const size_t mid = 700;
        const double dt = tr.samples[mid + 1].tau - tr.samples[mid].tau;
        Cplx fd = (tr.samples[mid + 1].moments[iq] - tr.samples[mid - 1].moments[iq]) / (2.0 * dt);
        Cplx rate = gauge_flow_rhs(state_at(tr, mid), Word{o.q});
        CHECK(std::abs(fd - rate) < 1e-5);
    }
}

TEST_CASE("free flow spreads the position variance quadratically") {
    auto s = std::make_shared<AlgebraSignature>();
    s->add_pair("z", "e");
    s->add_pair("q", "p");
    GenId z = s->find("z"), q = s->find("q"), p = s->find("p");
    auto basis = enumerate_commutant_basis(s, z, 4);
    auto C = normal_form(
        s, RawPoly{{Scalar::one(), {s->find("e")}}, {Scalar::rational(Rational(1, 2)), {p, p}}});
    const double qb = -0.3, pb = 0.5, sqq = 0.6, sqp = -0.05, spp = 0.5;
    auto reduced = gaussian_pair_moments({q, p, qb, pb, sqq, sqp, spp}, kHbar, 4);
    auto st = MomentState::extend_from_reduced(basis, reduced, 0.0, C, {{"hbar", kHbar}});

    const double tau = 1.0;
    auto tr = evolve(st, tau, 1e-3);
    CHECK(tr.warnings.empty());
    auto fin = state_at(tr, tr.samples.size() - 1);

    const double qf = qb + tau * pb;
    CHECK(fin.value_word(Word{q}).real() == Approx(qf).epsilon(1e-10));
    CHECK(fin.value_word(Word{p}).real() == Approx(pb).epsilon(1e-12));
    CHECK(covariance(fin, NCPolynomial::gen(s, q), NCPolynomial::gen(s, q)).real() ==
          Approx(sqq + 2 * tau * sqp + tau * tau * spp).epsilon(1e-9));
    CHECK(covariance(fin, NCPolynomial::gen(s, p), NCPolynomial::gen(s, p)).real() ==
          Approx(spp).epsilon(1e-12));
    CHECK(check_almost_positive(fin, 1e-8).pass);
}

TEST_CASE("flows that leave the stored degree are truncated with a warning") {
    auto s = std::make_shared<AlgebraSignature>();
    s->add_pair("z", "e");
    s->add_pair("q", "p");
    GenId z = s->find("z"), q = s->find("q"), p = s->find("p");
    auto basis = enumerate_commutant_basis(s, z, 4);
    auto C = normal_form(s, RawPoly{{Scalar::one(), {s->find("e")}},
                                    {Scalar::rational(Rational(1, 2)), {p, p}},
                                    {Scalar::rational(Rational(1, 3)), {q, q, q}}});
    auto reduced = gaussian_pair_moments({q, p, 0.1, 0.0, 0.6, 0.0, 0.5}, kHbar, 4);
    auto st = MomentState::extend_from_reduced(basis, reduced, 0.0, C, {{"hbar", kHbar}});

    auto tr = evolve(st, 0.05, 1e-3);
    REQUIRE(tr.warnings.size() == 1);
    CHECK(tr.warnings[0].find("truncated") != std::string::npos);
    CHECK(tr.samples.size() == 51);
}

TEST_CASE("first-moment rates against the classical equations") {
    OscillatorSetup o;
    SUBCASE("quadratic constraints give the classical rates identically") {
        auto st = o.state({o.q, o.p, 0.7, -0.2, 0.5, 0.1, 0.6}, 0.4);
        auto rows = classical_limit_check(st);
        REQUIRE(rows.size() == 3);  // z, q, p
        for (const auto& r : rows) CHECK(r.deviation < 1e-12);
        CHECK(rows[0].generator == o.z);
        CHECK(rows[0].quantum_rate.real() == Approx(1.0));
        CHECK(rows[1].quantum_rate.real() == Approx(-0.2));   // dq = w(p)
        CHECK(rows[2].quantum_rate.real() == Approx(-0.7));   // dp = -w(q)
    }
    SUBCASE("a cubic potential separates the two by the position variance") {
        auto C = normal_form(o.sig, RawPoly{{Scalar::one(), {o.e}},
                                            {Scalar::rational(Rational(1, 3)), {o.q, o.q, o.q}}});
        auto reduced = gaussian_pair_moments({o.q, o.p, 0.3, 0.0, 0.6, 0.0, 0.5}, kHbar, 4);
        auto st =
            MomentState::extend_from_reduced(o.basis, reduced, 0.0, C, {{"hbar", kHbar}});
        auto rows = classical_limit_check(st);
        double dev_p = -1.0;
        for (const auto& r : rows) {
            if (r.generator == o.p) dev_p = r.deviation;
        }
        // quantum: -w(q^2) = -(var + mean^2); classical: -mean^2
        CHECK(dev_p == Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("flow guards") {
    OscillatorSetup o;
    auto st = o.state({o.q, o.p, 0.0, 0.0, 0.5, 0.0, 0.5}, 0.0);
    CHECK_THROWS_AS((void)evolve(st, 1.0, 0.0), BadParameter);
    CHECK_THROWS_AS((void)evolve(st, 1.0, -1e-3), BadParameter);
    auto tr = evolve(st, 0.01, 1e-3);
    CHECK_THROWS_AS((void)state_at(tr, tr.samples.size()), BadParameter);
}
