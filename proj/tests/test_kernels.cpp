#include <doctest.h>

#include <memory>
#include <random>

#include "qref/kernels.hpp"

using namespace qref;
using doctest::Approx;

namespace {

struct Setup {
    SignaturePtr sig;
    GenId z, q, p;
    BasisPtr basis;
    NCPolynomial constraint;
    MomentState st;

    Setup()
        : st(make()) {}

    MomentState make() {
        auto s = std::make_shared<AlgebraSignature>();
        s->add_pair("z", "e");
        s->add_pair("q", "p");
        sig = s;
        z = s->find("z");
        q = s->find("q");
        p = s->find("p");
        basis = enumerate_commutant_basis(sig, z, 4);
        auto half = Scalar::rational(Rational(1, 2));
        constraint = normal_form(
            sig, RawPoly{{Scalar::one(), {s->find("e")}}, {half, {q, q}}, {half, {p, p}}});
        auto reduced = gaussian_pair_moments({q, p, 1.0, 0.0, 0.5, 0.0, 0.5}, 1.0, 4);
        return MomentState::extend_from_reduced(basis, reduced, 0.1, constraint, {{"hbar", 1.0}});
    }
};

} // namespace

TEST_CASE("matrix assembly agrees across policies down to the last bit") {
    Setup fx;
    auto serial = assemble_moment_matrix(fx.st, ExecutionPolicy::Serial);
    auto parallel = assemble_moment_matrix(fx.st, ExecutionPolicy::Parallel);

    CHECK(serial.slice.size() == 10);  // words of degree <= 2 over z, q, p
    REQUIRE(serial.entries.size() == parallel.entries.size());
    for (size_t r = 0; r < serial.entries.size(); ++r) {
        for (size_t c = 0; c < serial.entries.size(); ++c) {
            CHECK(serial.entries[r][c] == parallel.entries[r][c]);
        }
    }
    CHECK(serial.min_eigenvalue == parallel.min_eigenvalue);

    auto reference = moment_matrix(fx.st);
    CHECK(serial.min_eigenvalue == Approx(reference.min_eigenvalue).epsilon(1e-12));
    CHECK(serial.min_eigenvalue > -1e-10);
}

TEST_CASE("trajectory positivity scan") {
    Setup fx;
    auto tr = evolve(fx.st, M_PI / 2.0, 1e-3);
    REQUIRE(tr.samples.size() >= 1000);

    auto serial = scan_trajectory_positivity(tr, 1e-9, ExecutionPolicy::Serial);
    auto parallel = scan_trajectory_positivity(tr, 1e-9, ExecutionPolicy::Parallel);

    CHECK(serial.dimension == 10);
    CHECK(serial.min_eigenvalues.size() == tr.samples.size());
    CHECK(serial.pass);
    CHECK(serial.worst >= -1e-9);

    CHECK(serial.worst == parallel.worst);
    CHECK(serial.worst_sample == parallel.worst_sample);
    for (size_t i = 0; i < serial.min_eigenvalues.size(); ++i) {
        CHECK(serial.min_eigenvalues[i] == parallel.min_eigenvalues[i]);
    }

    // the compiled entries agree with the direct assembly at a sample
    auto direct = assemble_moment_matrix(state_at(tr, 0), ExecutionPolicy::Serial);
    CHECK(serial.min_eigenvalues[0] == Approx(direct.min_eigenvalue).epsilon(1e-10).scale(1.0));
}

TEST_CASE("random Cauchy-Schwarz margins are nonnegative on a positive state") {
    Setup fx;
    std::mt19937 rng(20240911u);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> len(0, 2);
    std::uniform_int_distribution<size_t> pick(0, 2);
    const GenId letters[3] = {fx.z, fx.q, fx.p};

    auto random_poly = [&]() {
        RawPoly raw;
        const int terms = 1 + len(rng);
        for (int t = 0; t < terms; ++t) {
            Word w;
            const int L = len(rng);
            for (int i = 0; i < L; ++i) w.push_back(letters[pick(rng)]);
            Scalar c = Scalar::integer(coeff(rng)) + Scalar::i() * Scalar::integer(coeff(rng));
            raw.push_back({c, w});
        }
        return normal_form(fx.sig, raw);
    };

    std::vector<std::pair<NCPolynomial, NCPolynomial>> pairs;
    for (int i = 0; i < 100; ++i) pairs.emplace_back(random_poly(), random_poly());

    auto serial = cauchy_schwarz_margins(fx.st, pairs, ExecutionPolicy::Serial);
    auto parallel = cauchy_schwarz_margins(fx.st, pairs, ExecutionPolicy::Parallel);
    REQUIRE(serial.size() == 100);
    for (size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i] >= -1e-9);
        CHECK(serial[i] == parallel[i]);
    }
}
