#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qref/polynomial.hpp"

namespace qref {

// One algebra declaration, kept in file order so the document can be printed
// back out and re-parsed into the same alphabet (ids depend on that order).
struct Declaration {
    enum class Kind { Pair, Formal, Function, Invertible, Commutator, Param };
    Kind kind = Kind::Formal;

    // Pair: {q, p}. Formal: {name}. Function: {name, base, derivative}.
    // Invertible: {name}. Commutator: {a, b}. Param: {name}.
    std::vector<std::string> names;

    Star star = Star::Hermitian;
    bool invertible = false;
    std::vector<std::string> depends;

    // Commutator declarations only; the zero polynomial declares [a, b] = 0.
    NCPolynomial rhs;
};

struct StateSection {
    std::string reference;
    GenId reference_id = -1;
    double time = 0.0;
    std::vector<std::pair<Word, std::complex<double>>> moments;  // file order
};

// Raw key/value settings. Values are either one number or an identifier list;
// interpretation is left to the caller, which merges them with its own flags.
struct TaskSection {
    struct Entry {
        std::string key;
        std::optional<double> number;
        std::vector<std::string> idents;
    };
    std::vector<Entry> entries;

    const Entry* find(const std::string& key) const;
    std::optional<double> number(const std::string& key) const;
    std::vector<std::string> idents(const std::string& key) const;
};

struct SourceDocument {
    SignaturePtr sig;
    std::vector<Declaration> declarations;
    std::map<std::string, Scalar> params;
    std::vector<std::pair<std::string, NCPolynomial>> constraints;
    std::optional<StateSection> state;
    std::optional<TaskSection> task;

    const NCPolynomial* constraint(const std::string& name) const;
};

// Parses a full document. Declarations may appear inside an `algebra { ... }`
// block or bare at the top level; `inv(c0 + c1*q)` over a canonical letter
// declares the needed composite inverse on first use. Throws ParseError with
// a 1-based source position on any syntax, duplicate-name, unknown-symbol or
// malformed-expression problem.
SourceDocument parse_document(const std::string& text);

// Parses one exact expression against an existing alphabet. No declarations
// are created, so the text may only mention letters (and composites) that
// already exist. Reports render through render_expression, which stays inside
// this grammar.
NCPolynomial parse_expression(const std::string& text, const SignaturePtr& sig,
                              const std::map<std::string, Scalar>& params = {});

// render() with composite inverse letters expanded back to inv(c0 + c1*base).
std::string render_expression(const NCPolynomial& p);

// Canonical layout; parse_document(pretty_print(doc)) reproduces doc exactly.
std::string pretty_print(const SourceDocument& doc);

bool documents_equal(const SourceDocument& a, const SourceDocument& b);

} // namespace qref
