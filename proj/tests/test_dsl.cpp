#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <optional>

#include "qref/dsl.hpp"
#include "qref/models.hpp"

using namespace qref;

namespace {

std::optional<ParseError> parse_failure(const std::string& text) {
    try {
        parse_document(text);
    } catch (const ParseError& e) {
        return e;
    }
    return std::nullopt;
}

struct Rng {
    uint64_t s;
    uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    int uniform(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
};

}  // namespace

TEST_CASE("a bare document parses into the declared alphabet") {
    SourceDocument doc = parse_document(
        "pair q0 p0; pair q1 p1;\n"
        "constraint C = p0 + (1/2)*p1*p1;\n");
    CHECK(doc.sig->size() == 4);
    CHECK(doc.declarations.size() == 2);
    REQUIRE(doc.constraints.size() == 1);
    CHECK(doc.constraints[0].first == "C");

    NCPolynomial expected =
        add(NCPolynomial::gen(doc.sig, "p0"),
            scalar_multiply(Scalar::rational(Rational(1, 2)),
                            multiply(NCPolynomial::gen(doc.sig, "p1"),
                                     NCPolynomial::gen(doc.sig, "p1"))));
    CHECK(doc.constraints[0].second == expected);
    CHECK(*doc.constraint("C") == expected);
    CHECK(doc.constraint("missing") == nullptr);
    CHECK(render_expression(expected) == "p0 + 1/2*p1^2");
}

TEST_CASE("network constraint written with parameters matches the built-in model") {
    Model net = build_model("clock-network");
    SourceDocument doc = parse_document(
        "algebra {\n"
        "  pair q_A pp_A;\n"
        "  pair q_B p_B;\n"
        "  pair q_C p_C;\n"
        "  param lambda real;\n"
        "}\n"
        "constraint C1 = pp_A + p_B + p_C + lambda*pp_A*p_B;\n"
        "constraint R = inv(1 + lambda*p_B) + inv(1 + lambda*pp_A);\n");
    CHECK(doc.constraints[0].second == net.constraints[0]);

    GenId uA = net.sig->find("u_A");
    GenId uB = net.sig->find("u_B");
    NCPolynomial us = add(NCPolynomial::gen(net.sig, uA), NCPolynomial::gen(net.sig, uB));
    CHECK(doc.constraints[1].second == us);

    // The composite letter prints as the expression that declared it.
    CHECK(render_expression(NCPolynomial::gen(net.sig, uA)) == "inv(1 + lambda*p_B)");
    CHECK(parse_expression("inv(1 + lambda*p_B)", net.sig, net.params) ==
          NCPolynomial::gen(net.sig, uA));
}

TEST_CASE("parse errors carry the source position") {
    auto e = parse_failure("constraint = ;");
    REQUIRE(e.has_value());
    CHECK(e->line == 1);
    CHECK(e->column == 12);

    e = parse_failure("pair q p;\nconstraint C = waldo;");
    REQUIRE(e.has_value());
    CHECK(e->line == 2);
    CHECK(e->column == 16);
    CHECK(std::string(e->what()).find("unknown symbol") != std::string::npos);

    e = parse_failure("pair q p; pair q r;");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("duplicate") != std::string::npos);
    CHECK(e->column == 16);

    e = parse_failure("param hbar real;");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("reserved") != std::string::npos);

    e = parse_failure("pair q p;\nconstraint C = 0.5*q;");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("floating-point") != std::string::npos);

    e = parse_failure("pair q p;\nconstraint C = inv(q);");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("not declared invertible") != std::string::npos);

    e = parse_failure("pair q p;\nconstraint C = p/0;");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("divisor") != std::string::npos);

    e = parse_failure("pair q p;\nconstraint C = p;\npair r s;");
    REQUIRE(e.has_value());
    CHECK(e->line == 3);
    CHECK(std::string(e->what()).find("before constraints") != std::string::npos);

    e = parse_failure("pair q p; commutator [q, p] = q; ");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("already declared") != std::string::npos);

    e = parse_failure("pair z e;\nstate { reference: e; }");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("position letter") != std::string::npos);

    e = parse_failure("pair z e; pair q p;\nstate { reference: z; moments: p*q = 1; }");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("normal-ordered") != std::string::npos);

    e = parse_failure("pair z e; pair q p;\nstate { reference: z; moments: z*q = 1; }");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("reference letter") != std::string::npos);

    e = parse_failure("pair z e;\nstate { reference: z; }\nstate { reference: z; }");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("duplicate state") != std::string::npos);

    e = parse_failure("task { tau: 1; tau: 2; }");
    REQUIRE(e.has_value());
    CHECK(std::string(e->what()).find("duplicate task key") != std::string::npos);
}

TEST_CASE("documents round-trip through the pretty printer") {
    const std::string text =
        "algebra {\n"
        "  pair z e;\n"
        "  pair q p;\n"
        "  invertible q;\n"
        "  hermitian g invertible of q;\n"
        "  antihermitian kappa;\n"
        "  function f of q derivative fp;\n"
        "  commutator [g, p] = i*hbar*fp;\n"
        "  commutator [kappa, g] = 0;\n"
        "  param mu real;\n"
        "}\n"
        "constraint C = e + (1/2)*p^2 + mu*g + inv(1 + 2*q) - 3/4*inv(q);\n"
        "constraint D = f*p - i*hbar*kappa;\n"
        "state {\n"
        "  reference: z;\n"
        "  time: 0.25;\n"
        "  moments: q = 1;\n"
        "  moments: q^2 = 1.5;\n"
        "  moments: q*p = 0.5*i;\n"
        "  moments: p^2 = 1 - 0.5*i;\n"
        "}\n"
        "task {\n"
        "  candidates: z, q;\n"
        "  constraint: C;\n"
        "  tau: 0.5;\n"
        "  dt: 0.001;\n"
        "  degree: 4;\n"
        "}\n";
    SourceDocument doc = parse_document(text);
    CHECK(doc.declarations.size() == 9);
    CHECK(doc.constraints.size() == 2);
    REQUIRE(doc.state.has_value());
    CHECK(doc.state->reference == "z");
    CHECK(doc.state->time == 0.25);
    REQUIRE(doc.state->moments.size() == 4);
    CHECK(doc.state->moments[2].second == std::complex<double>(0.0, 0.5));
    CHECK(doc.state->moments[3].second == std::complex<double>(1.0, -0.5));
    REQUIRE(doc.task.has_value());
    CHECK(doc.task->number("tau") == 0.5);
    CHECK(doc.task->number("dt") == 0.001);
    CHECK(doc.task->idents("candidates") == std::vector<std::string>{"z", "q"});
    CHECK(doc.task->idents("constraint") == std::vector<std::string>{"C"});
    CHECK(doc.task->find("missing") == nullptr);
    CHECK_FALSE(doc.task->number("candidates").has_value());

    std::string printed = pretty_print(doc);
    SourceDocument again = parse_document(printed);
    CHECK(documents_equal(doc, again));
    CHECK(pretty_print(again) == printed);

    // The composite declared by inv(1 + 2*q) landed in the same slot on the
    // second parse, so the constraint polynomials agree letter for letter.
    CHECK(doc.constraints[0].second == again.constraints[0].second);

    // Expression mode resolves the existing composite but never declares one.
    CHECK(parse_expression("inv(1 + 2*q)", doc.sig) ==
          NCPolynomial::gen(doc.sig, doc.sig->find("inv(1 + 2*q)")));
    CHECK_THROWS_AS(parse_expression("inv(1 + 3*q)", doc.sig), ParseError);
}

TEST_CASE("model constraints and report polynomials re-parse from their rendering") {
    for (const auto& name : model_names()) {
        Model m = build_model(name);
        for (const auto& c : m.constraints) {
            CAPTURE(name);
            std::string s = render_expression(c);
            CHECK(parse_expression(s, m.sig, m.params) == c);
        }
        for (const auto& row : run_reference_report(m)) {
            if (!row.report.right_factor) continue;
            std::string s = render_expression(*row.report.right_factor);
            CHECK(parse_expression(s, m.sig, m.params) == *row.report.right_factor);
            std::string o = render_expression(row.report.obstruction);
            CHECK(parse_expression(o, m.sig, m.params) == row.report.obstruction);
        }
    }

    // A mixed symbolic and numeric coupling puts a two-term coefficient in
    // front of the obstruction, which must still survive the round trip.
    Model mixed = build_model("clock-network", {{"lambda1", "1"}});
    for (const auto& row : run_reference_report(mixed)) {
        std::string o = render_expression(row.report.obstruction);
        CHECK(parse_expression(o, mixed.sig, mixed.params) == row.report.obstruction);
    }
}

TEST_CASE("random exact expressions survive render and re-parse") {
    SourceDocument doc = parse_document(
        "pair q p; hermitian g; antihermitian k; param mu real;\n"
        "constraint C = q;\n");
    const SignaturePtr& sig = doc.sig;
    std::vector<GenId> letters = {sig->find("q"), sig->find("p"), sig->find("g"),
                                  sig->find("k")};

    Rng rng{0x9e3779b97f4a7c15ull};
    auto random_scalar = [&]() {
        Scalar s = Scalar::zero();
        int parts = 1 + rng.uniform(2);
        for (int t = 0; t < parts; ++t) {
            Scalar c = Scalar::rational(
                Rational(rng.uniform(9) - 4, 1 + rng.uniform(4)));
            if (c.is_zero()) c = Scalar::one();
            if (rng.uniform(2)) c = c * Scalar::i();
            if (rng.uniform(3) == 0) c = c * Scalar::hbar(1 + rng.uniform(2));
            if (rng.uniform(3) == 0) {
                int e = rng.uniform(4) - 2;
                c = c * Scalar::symbol("mu", e == 0 ? 1 : e);
            }
            s = s + c;
        }
        return s;
    };

    for (int cases = 0; cases < 200; ++cases) {
        NCPolynomial p(sig);
        int terms = 1 + rng.uniform(3);
        for (int t = 0; t < terms; ++t) {
            Word w;
            int len = rng.uniform(4);
            for (int k = 0; k < len; ++k) w.push_back(letters[rng.uniform(4)]);
            std::sort(w.begin(), w.end());
            p = add(p, NCPolynomial::word(sig, w, random_scalar()));
        }
        std::string s = render_expression(p);
        CAPTURE(s);
        CHECK(parse_expression(s, sig, doc.params) == p);
    }
}
