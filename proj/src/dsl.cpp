#include "qref/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

namespace qref {

namespace {

struct Token {
    enum class Kind { Ident, Integer, Float, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    char punct = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { scan(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        scan();
        return t;
    }

  private:
    void scan() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        tok_ = Token{};
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= src_.size()) return;

        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '_'))
                take();
            tok_.kind = Token::Kind::Ident;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            bool is_float = false;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                take();
            if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                is_float = true;
                take();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    take();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                size_t e = pos_ + 1;
                if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
                if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
                    is_float = true;
                    while (pos_ < e) take();
                    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        take();
                }
            }
            tok_.kind = is_float ? Token::Kind::Float : Token::Kind::Integer;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::strchr("{}()[],;:=+-*/^", c)) {
            tok_.kind = Token::Kind::Punct;
            tok_.punct = c;
            tok_.text = std::string(1, c);
            take();
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void take() {
        ++pos_;
        ++col_;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

const std::set<std::string>& reserved_names() {
    static const std::set<std::string> words = {
        "algebra",    "constraint", "state",      "task",       "pair",
        "hermitian",  "antihermitian", "invertible", "function", "of",
        "derivative", "commutator", "param",      "real",       "reference",
        "time",       "moments",    "inv",        "i",          "hbar",
    };
    return words;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_complex(std::complex<double> v) {
    auto imag_part = [](double im) {
        if (im == 1.0) return std::string("i");
        if (im == -1.0) return std::string("-i");
        return format_double(im) + "*i";
    };
    if (v.imag() == 0.0) return format_double(v.real());
    if (v.real() == 0.0) return imag_part(v.imag());
    std::string out = format_double(v.real());
    out += (v.imag() < 0.0) ? " - " : " + ";
    double a = std::abs(v.imag());
    out += (a == 1.0) ? "i" : format_double(a) + "*i";
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

class Parser {
  public:
    // Document mode: the alphabet is built as declarations arrive.
    explicit Parser(const std::string& text) : lex_(text) {
        mut_ = std::make_shared<AlgebraSignature>();
        doc_.sig = mut_;
    }

    // Expression mode: a fixed alphabet, no new declarations.
    Parser(const std::string& text, SignaturePtr sig, std::map<std::string, Scalar> params)
        : lex_(text) {
        doc_.sig = std::move(sig);
        doc_.params = std::move(params);
    }

    SourceDocument parse_document() {
        while (lex_.peek().kind != Token::Kind::End) parse_toplevel();
        return std::move(doc_);
    }

    NCPolynomial parse_single_expression() {
        NCPolynomial p = parse_expr();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            fail(t, "unexpected trailing input after expression");
        return p;
    }

  private:
    [[noreturn]] void fail(const Token& at, const std::string& msg) {
        throw ParseError(msg, at.line, at.column);
    }

    Token expect_punct(char c, const std::string& what) {
        Token t = lex_.next();
        if (t.kind != Token::Kind::Punct || t.punct != c)
            fail(t, "expected '" + std::string(1, c) + "' " + what);
        return t;
    }

    Token expect_ident(const std::string& what) {
        Token t = lex_.next();
        if (t.kind != Token::Kind::Ident) fail(t, "expected " + what);
        return t;
    }

    bool accept_punct(char c) {
        if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().punct == c) {
            lex_.next();
            return true;
        }
        return false;
    }

    bool peek_punct(char c) const {
        return lex_.peek().kind == Token::Kind::Punct && lex_.peek().punct == c;
    }

    bool peek_ident(const std::string& kw) const {
        return lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == kw;
    }

    bool accept_ident(const std::string& kw) {
        if (peek_ident(kw)) {
            lex_.next();
            return true;
        }
        return false;
    }

    // ----- document structure -----

    static bool is_declaration_keyword(const std::string& s) {
        return s == "pair" || s == "hermitian" || s == "antihermitian" || s == "function" ||
               s == "invertible" || s == "commutator" || s == "param";
    }

    void parse_toplevel() {
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::Ident)
            fail(t, "expected a declaration, constraint, state or task section");
        if (t.text == "algebra") {
            Token kw = lex_.next();
            require_declarations_open(kw);
            expect_punct('{', "after 'algebra'");
            while (!accept_punct('}')) parse_declaration();
            return;
        }
        if (is_declaration_keyword(t.text)) {
            require_declarations_open(t);
            parse_declaration();
            return;
        }
        if (t.text == "constraint") {
            parse_constraint();
            return;
        }
        if (t.text == "state") {
            parse_state();
            return;
        }
        if (t.text == "task") {
            parse_task();
            return;
        }
        fail(t, "expected a declaration, constraint, state or task section");
    }

    // The alphabet freezes once the first constraint or section appears;
    // otherwise re-parsing a printed document would renumber the letters
    // created on the fly by inv(...).
    void require_declarations_open(const Token& at) {
        if (!doc_.constraints.empty() || doc_.state || doc_.task)
            fail(at, "algebra declarations must come before constraints, state and task");
    }

    void parse_declaration() {
        Token kw = lex_.next();
        if (kw.kind != Token::Kind::Ident) fail(kw, "expected an algebra declaration");
        if (kw.text == "pair")
            parse_pair();
        else if (kw.text == "hermitian")
            parse_formal(Star::Hermitian);
        else if (kw.text == "antihermitian")
            parse_formal(Star::AntiHermitian);
        else if (kw.text == "function")
            parse_function();
        else if (kw.text == "invertible")
            parse_invertible();
        else if (kw.text == "commutator")
            parse_commutator_decl();
        else if (kw.text == "param")
            parse_param();
        else
            fail(kw, "expected an algebra declaration");
    }

    Token fresh_name(const std::string& what) {
        Token t = expect_ident(what);
        if (reserved_names().count(t.text)) fail(t, "'" + t.text + "' is a reserved word");
        if (doc_.sig->find_optional(t.text) >= 0 || doc_.params.count(t.text))
            fail(t, "duplicate declaration of '" + t.text + "'");
        return t;
    }

    Token known_generator(const std::string& what) {
        Token t = expect_ident(what);
        if (doc_.sig->find_optional(t.text) < 0) fail(t, "unknown generator '" + t.text + "'");
        return t;
    }

    template <typename F>
    void apply_declared(const Token& at, F&& f) {
        try {
            f();
        } catch (const AlgebraError& e) {
            fail(at, e.what());
        }
    }

    void parse_pair() {
        Token q = fresh_name("a position name");
        Token p = fresh_name("a momentum name");
        if (q.text == p.text) fail(p, "duplicate declaration of '" + p.text + "'");
        expect_punct(';', "after declaration");
        apply_declared(q, [&] { mut_->add_pair(q.text, p.text); });
        doc_.declarations.push_back({Declaration::Kind::Pair, {q.text, p.text}, Star::Hermitian,
                                     false, {}, NCPolynomial()});
    }

    void parse_formal(Star star) {
        Token name = fresh_name("a generator name");
        bool invertible = accept_ident("invertible");
        std::vector<std::string> depends;
        if (accept_ident("of")) {
            do {
                Token d = known_generator("a generator name");
                depends.push_back(d.text);
            } while (accept_punct(','));
        }
        expect_punct(';', "after declaration");
        apply_declared(name, [&] { mut_->add_formal(name.text, invertible, depends, star); });
        doc_.declarations.push_back(
            {Declaration::Kind::Formal, {name.text}, star, invertible, depends, NCPolynomial()});
    }

    void parse_function() {
        Token name = fresh_name("a function name");
        if (!accept_ident("of")) fail(lex_.peek(), "expected 'of' in function declaration");
        Token base = known_generator("the function argument");
        if (!accept_ident("derivative"))
            fail(lex_.peek(), "expected 'derivative' in function declaration");
        Token deriv = expect_ident("the derivative name");
        if (reserved_names().count(deriv.text))
            fail(deriv, "'" + deriv.text + "' is a reserved word");
        bool invertible = accept_ident("invertible");
        expect_punct(';', "after declaration");
        apply_declared(name,
                       [&] { mut_->add_function(name.text, base.text, deriv.text, invertible); });
        doc_.declarations.push_back({Declaration::Kind::Function,
                                     {name.text, base.text, deriv.text},
                                     Star::Hermitian,
                                     invertible,
                                     {},
                                     NCPolynomial()});
    }

    void parse_invertible() {
        Token name = known_generator("a generator name");
        if (doc_.sig->decl(doc_.sig->find(name.text)).invertible)
            fail(name, "'" + name.text + "' is already invertible");
        expect_punct(';', "after declaration");
        apply_declared(name, [&] { mut_->declare_invertible(name.text); });
        doc_.declarations.push_back({Declaration::Kind::Invertible, {name.text}, Star::Hermitian,
                                     false, {}, NCPolynomial()});
    }

    void parse_commutator_decl() {
        expect_punct('[', "after 'commutator'");
        Token a = known_generator("a generator name");
        expect_punct(',', "between commutator arguments");
        Token b = known_generator("a generator name");
        expect_punct(']', "after commutator arguments");
        GenId ga = doc_.sig->find(a.text);
        GenId gb = doc_.sig->find(b.text);
        if (doc_.sig->decl(ga).partner == gb)
            fail(a, "commutator [" + a.text + ", " + b.text +
                        "] is already declared by the pair");
        auto key = std::minmax(ga, gb);
        if (!declared_comms_.insert({key.first, key.second}).second)
            fail(a, "commutator [" + a.text + ", " + b.text + "] is already declared");
        expect_punct('=', "in commutator declaration");
        Token at = lex_.peek();
        NCPolynomial rhs = parse_expr();
        expect_punct(';', "after declaration");
        RawPoly raw;
        for (const auto& [w, c] : rhs.terms()) raw.push_back({c, w});
        apply_declared(at, [&] { mut_->declare_commutator(a.text, b.text, raw); });
        doc_.declarations.push_back(
            {Declaration::Kind::Commutator, {a.text, b.text}, Star::Hermitian, false, {}, rhs});
    }

    void parse_param() {
        Token name = fresh_name("a parameter name");
        if (!accept_ident("real")) fail(lex_.peek(), "expected 'real' after the parameter name");
        expect_punct(';', "after declaration");
        doc_.params.emplace(name.text, Scalar::symbol(name.text));
        doc_.declarations.push_back(
            {Declaration::Kind::Param, {name.text}, Star::Hermitian, false, {}, NCPolynomial()});
    }

    void parse_constraint() {
        lex_.next();  // 'constraint'
        Token name = expect_ident("a constraint name");
        if (reserved_names().count(name.text)) fail(name, "'" + name.text + "' is a reserved word");
        for (const auto& [n, p] : doc_.constraints)
            if (n == name.text) fail(name, "duplicate constraint '" + name.text + "'");
        expect_punct('=', "after the constraint name");
        NCPolynomial rhs = parse_expr();
        expect_punct(';', "after the constraint");
        doc_.constraints.emplace_back(name.text, std::move(rhs));
    }

    void parse_state() {
        Token kw = lex_.next();  // 'state'
        if (doc_.state) fail(kw, "duplicate state section");
        expect_punct('{', "after 'state'");
        StateSection st;
        bool have_ref = false, have_time = false;
        std::vector<Token> moment_positions;
        std::set<Word> seen_words;
        while (!accept_punct('}')) {
            Token key = expect_ident("'reference', 'time' or 'moments'");
            expect_punct(':', "after '" + key.text + "'");
            if (key.text == "reference") {
                if (have_ref) fail(key, "duplicate reference entry");
                have_ref = true;
                Token name = known_generator("the reference letter");
                st.reference = name.text;
                st.reference_id = doc_.sig->find(name.text);
                if (doc_.sig->decl(st.reference_id).kind != GenKind::Position)
                    fail(name, "reference must be a canonical position letter");
            } else if (key.text == "time") {
                if (have_time) fail(key, "duplicate time entry");
                have_time = true;
                Token at = lex_.peek();
                std::complex<double> v = parse_numeric_expr();
                if (v.imag() != 0.0) fail(at, "time must be real");
                st.time = v.real();
            } else if (key.text == "moments") {
                Token at = lex_.peek();
                Word w = parse_word_key();
                if (!seen_words.insert(w).second) fail(at, "duplicate moment entry");
                expect_punct('=', "after the moment word");
                std::complex<double> v = parse_numeric_expr();
                st.moments.emplace_back(std::move(w), v);
                moment_positions.push_back(at);
            } else {
                fail(key, "expected 'reference', 'time' or 'moments'");
            }
            expect_punct(';', "after the entry");
        }
        if (!have_ref) fail(kw, "state section needs a reference entry");
        GenId partner = doc_.sig->decl(st.reference_id).partner;
        for (size_t k = 0; k < st.moments.size(); ++k)
            for (GenId g : st.moments[k].first)
                if (g == st.reference_id || g == partner)
                    fail(moment_positions[k],
                         "moment words must not involve the reference letter or its momentum");
        doc_.state = std::move(st);
    }

    void parse_task() {
        Token kw = lex_.next();  // 'task'
        if (doc_.task) fail(kw, "duplicate task section");
        expect_punct('{', "after 'task'");
        TaskSection ts;
        std::set<std::string> seen;
        while (!accept_punct('}')) {
            Token key = expect_ident("a task key");
            if (!seen.insert(key.text).second) fail(key, "duplicate task key '" + key.text + "'");
            expect_punct(':', "after '" + key.text + "'");
            TaskSection::Entry e;
            e.key = key.text;
            if (lex_.peek().kind == Token::Kind::Ident) {
                do {
                    e.idents.push_back(expect_ident("an identifier").text);
                } while (accept_punct(','));
            } else {
                Token at = lex_.peek();
                std::complex<double> v = parse_numeric_expr();
                if (v.imag() != 0.0) fail(at, "task values must be real numbers");
                e.number = v.real();
            }
            expect_punct(';', "after the entry");
            ts.entries.push_back(std::move(e));
        }
        doc_.task = std::move(ts);
    }

    Word parse_word_key() {
        Word w;
        Token first = lex_.peek();
        do {
            Token id = known_generator("a generator name");
            long n = 1;
            if (accept_punct('^')) {
                Token e = lex_.next();
                if (e.kind != Token::Kind::Integer) fail(e, "expected an integer exponent");
                n = std::strtol(e.text.c_str(), nullptr, 10);
                if (n < 1 || n > 64) fail(e, "exponent out of range");
            }
            GenId g = doc_.sig->find(id.text);
            w.insert(w.end(), static_cast<size_t>(n), g);
        } while (accept_punct('*'));
        NCPolynomial nf;
        try {
            nf = normal_form(doc_.sig, {{Scalar::one(), w}});
        } catch (const AlgebraError& e) {
            fail(first, e.what());
        }
        if (nf.terms().size() != 1 || nf.terms().begin()->first != w ||
            !nf.terms().begin()->second.is_one())
            fail(first, "moment key must be a normal-ordered word");
        return w;
    }

    // ----- exact expressions -----

    NCPolynomial parse_expr() {
        NCPolynomial v = parse_term();
        while (true) {
            if (accept_punct('+'))
                v = add(v, parse_term());
            else if (accept_punct('-'))
                v = sub(v, parse_term());
            else
                break;
        }
        return v;
    }

    NCPolynomial parse_term() {
        NCPolynomial v = parse_factor();
        while (true) {
            if (accept_punct('*')) {
                v = multiply(v, parse_factor());
            } else if (peek_punct('/')) {
                Token at = lex_.next();
                NCPolynomial d = parse_factor();
                auto s = d.as_scalar();
                if (!s || s->is_zero() || !s->is_single_term())
                    fail(at, "division needs a nonzero single-term scalar divisor");
                v = scalar_multiply(s->inverse(), v);
            } else {
                break;
            }
        }
        return v;
    }

    NCPolynomial parse_factor() {
        if (accept_punct('-')) return scalar_multiply(-Scalar::one(), parse_factor());
        NCPolynomial base = parse_primary();
        if (!accept_punct('^')) return base;
        bool neg = accept_punct('-');
        Token e = lex_.next();
        if (e.kind != Token::Kind::Integer) fail(e, "expected an integer exponent");
        long n = std::strtol(e.text.c_str(), nullptr, 10);
        if (n > 64) fail(e, "exponent out of range");
        if (neg) {
            auto s = base.as_scalar();
            if (!s || s->is_zero() || !s->is_single_term())
                fail(e, "negative powers need an invertible scalar base; use inv(...) for operators");
            return NCPolynomial::scalar(doc_.sig, s->pow(static_cast<int>(-n)));
        }
        if (n == 0) return NCPolynomial::one(doc_.sig);
        NCPolynomial v = base;
        for (long k = 1; k < n; ++k) v = multiply(v, base);
        return v;
    }

    NCPolynomial parse_primary() {
        Token t = lex_.next();
        switch (t.kind) {
            case Token::Kind::Integer:
                return NCPolynomial::scalar(doc_.sig, Scalar::rational(Rational(t.text)));
            case Token::Kind::Float:
                fail(t, "floating-point literals are only allowed in state and task values");
            case Token::Kind::Punct:
                if (t.punct == '(') {
                    NCPolynomial v = parse_expr();
                    expect_punct(')', "to close the group");
                    return v;
                }
                fail(t, "expected an expression");
            case Token::Kind::Ident: {
                if (t.text == "i") return NCPolynomial::scalar(doc_.sig, Scalar::i());
                if (t.text == "hbar") return NCPolynomial::scalar(doc_.sig, Scalar::hbar());
                if (t.text == "inv" && peek_punct('(')) return parse_inverse(t);
                auto it = doc_.params.find(t.text);
                if (it != doc_.params.end()) return NCPolynomial::scalar(doc_.sig, it->second);
                GenId g = doc_.sig->find_optional(t.text);
                if (g >= 0) return NCPolynomial::gen(doc_.sig, g);
                fail(t, "unknown symbol '" + t.text + "'");
            }
            default:
                fail(t, "expected an expression");
        }
    }

    NCPolynomial parse_inverse(const Token& at) {
        expect_punct('(', "after 'inv'");
        NCPolynomial inner = parse_expr();
        expect_punct(')', "to close inv(...)");
        if (auto m = invert_monomial(inner)) return *m;
        if (auto u = invert_composite(inner)) return *u;
        if (mut_) {
            // First use of an invertible affine combination declares its
            // composite letter; the letter's name is the expression itself so
            // rendered output re-parses to the same alphabet.
            const auto& ts = inner.terms();
            if (ts.size() == 2 && ts.begin()->first.empty() && ts.rbegin()->first.size() == 1) {
                Scalar c0 = ts.begin()->second;
                Scalar c1 = ts.rbegin()->second;
                GenId base = ts.rbegin()->first[0];
                const auto& d = doc_.sig->decl(base);
                if ((d.kind == GenKind::Position || d.kind == GenKind::Momentum) &&
                    c0.is_real() && c1.is_real() && !c0.is_zero()) {
                    std::string name = "inv(" + render_expression(inner) + ")";
                    GenId u = -1;
                    apply_declared(at,
                                   [&] { u = mut_->add_composite_inverse(name, d.name, c0, c1); });
                    return NCPolynomial::gen(doc_.sig, u);
                }
            }
        }
        fail(at, "expression under inv(...) is not declared invertible");
    }

    // ----- numeric expressions (state and task values) -----

    std::complex<double> parse_numeric_expr() {
        std::complex<double> v = parse_numeric_term();
        while (true) {
            if (accept_punct('+'))
                v += parse_numeric_term();
            else if (accept_punct('-'))
                v -= parse_numeric_term();
            else
                break;
        }
        return v;
    }

    std::complex<double> parse_numeric_term() {
        std::complex<double> v = parse_numeric_factor();
        while (true) {
            if (accept_punct('*')) {
                v *= parse_numeric_factor();
            } else if (peek_punct('/')) {
                Token at = lex_.next();
                std::complex<double> d = parse_numeric_factor();
                if (d == std::complex<double>(0.0, 0.0)) fail(at, "division by zero");
                v /= d;
            } else {
                break;
            }
        }
        return v;
    }

    std::complex<double> parse_numeric_factor() {
        if (accept_punct('-')) return -parse_numeric_factor();
        std::complex<double> base = parse_numeric_primary();
        if (!accept_punct('^')) return base;
        bool neg = accept_punct('-');
        Token e = lex_.next();
        if (e.kind != Token::Kind::Integer) fail(e, "expected an integer exponent");
        long n = std::strtol(e.text.c_str(), nullptr, 10);
        if (n > 64) fail(e, "exponent out of range");
        std::complex<double> v = 1.0;
        for (long k = 0; k < n; ++k) v *= base;
        if (neg) {
            if (v == std::complex<double>(0.0, 0.0)) fail(e, "division by zero");
            v = 1.0 / v;
        }
        return v;
    }

    std::complex<double> parse_numeric_primary() {
        Token t = lex_.next();
        switch (t.kind) {
            case Token::Kind::Integer:
            case Token::Kind::Float:
                return std::strtod(t.text.c_str(), nullptr);
            case Token::Kind::Punct:
                if (t.punct == '(') {
                    std::complex<double> v = parse_numeric_expr();
                    expect_punct(')', "to close the group");
                    return v;
                }
                fail(t, "expected a number");
            case Token::Kind::Ident:
                if (t.text == "i") return {0.0, 1.0};
                fail(t, "expected a number; state and task values are numeric");
            default:
                fail(t, "expected a number");
        }
    }

    Lexer lex_;
    SourceDocument doc_;
    std::shared_ptr<AlgebraSignature> mut_;
    std::set<std::pair<GenId, GenId>> declared_comms_;
};

std::string dsl_letter(const SignaturePtr& sig, GenId id) {
    for (const auto& c : sig->composites())
        if (c.u == id) {
            NCPolynomial affine = add(NCPolynomial::scalar(sig, c.c0),
                                      scalar_multiply(c.c1, NCPolynomial::gen(sig, c.base)));
            return "inv(" + render_expression(affine) + ")";
        }
    return sig->decl(id).name;
}

std::string dsl_word(const SignaturePtr& sig, const Word& w) {
    std::ostringstream os;
    for (size_t i = 0; i < w.size();) {
        size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        if (i > 0) os << "*";
        os << dsl_letter(sig, w[i]);
        if (j - i > 1) os << "^" << (j - i);
        i = j;
    }
    return os.str();
}

std::string declaration_line(const Declaration& d) {
    switch (d.kind) {
        case Declaration::Kind::Pair:
            return "pair " + d.names[0] + " " + d.names[1] + ";";
        case Declaration::Kind::Formal: {
            std::string out = (d.star == Star::AntiHermitian) ? "antihermitian " : "hermitian ";
            out += d.names[0];
            if (d.invertible) out += " invertible";
            if (!d.depends.empty()) out += " of " + join(d.depends, ", ");
            return out + ";";
        }
        case Declaration::Kind::Function: {
            std::string out =
                "function " + d.names[0] + " of " + d.names[1] + " derivative " + d.names[2];
            if (d.invertible) out += " invertible";
            return out + ";";
        }
        case Declaration::Kind::Invertible:
            return "invertible " + d.names[0] + ";";
        case Declaration::Kind::Commutator:
            return "commutator [" + d.names[0] + ", " + d.names[1] +
                   "] = " + render_expression(d.rhs) + ";";
        case Declaration::Kind::Param:
            return "param " + d.names[0] + " real;";
    }
    return ";";
}

}  // namespace

const TaskSection::Entry* TaskSection::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::optional<double> TaskSection::number(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->number : std::nullopt;
}

std::vector<std::string> TaskSection::idents(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->idents : std::vector<std::string>{};
}

const NCPolynomial* SourceDocument::constraint(const std::string& name) const {
    for (const auto& [n, p] : constraints)
        if (n == name) return &p;
    return nullptr;
}

SourceDocument parse_document(const std::string& text) {
    Parser p(text);
    return p.parse_document();
}

NCPolynomial parse_expression(const std::string& text, const SignaturePtr& sig,
                              const std::map<std::string, Scalar>& params) {
    Parser p(text, sig, params);
    return p.parse_single_expression();
}

std::string render_expression(const NCPolynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (const auto& [w, c] : p.terms()) {
        std::string term;
        if (w.empty()) {
            term = c.is_single_term() ? c.render() : "(" + c.render() + ")";
        } else {
            if (c.is_one()) {
            } else if (c == -Scalar::one()) {
                term = "-";
            } else if (c.is_single_term()) {
                term = c.render() + "*";
            } else {
                term = "(" + c.render() + ")*";
            }
            term += dsl_word(p.signature(), w);
        }
        if (out.empty())
            out = term;
        else if (term.front() == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out;
}

std::string pretty_print(const SourceDocument& doc) {
    std::ostringstream out;
    bool first_block = true;
    if (!doc.declarations.empty()) {
        out << "algebra {\n";
        for (const auto& d : doc.declarations) out << "  " << declaration_line(d) << "\n";
        out << "}\n";
        first_block = false;
    }
    if (!doc.constraints.empty()) {
        if (!first_block) out << "\n";
        for (const auto& [name, p] : doc.constraints)
            out << "constraint " << name << " = " << render_expression(p) << ";\n";
        first_block = false;
    }
    if (doc.state) {
        if (!first_block) out << "\n";
        out << "state {\n";
        out << "  reference: " << doc.state->reference << ";\n";
        out << "  time: " << format_double(doc.state->time) << ";\n";
        for (const auto& [w, v] : doc.state->moments)
            out << "  moments: " << dsl_word(doc.sig, w) << " = " << format_complex(v) << ";\n";
        out << "}\n";
        first_block = false;
    }
    if (doc.task) {
        if (!first_block) out << "\n";
        out << "task {\n";
        for (const auto& e : doc.task->entries) {
            out << "  " << e.key << ": ";
            if (e.number)
                out << format_double(*e.number);
            else
                out << join(e.idents, ", ");
            out << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

bool documents_equal(const SourceDocument& a, const SourceDocument& b) {
    if (a.declarations.size() != b.declarations.size()) return false;
    for (size_t k = 0; k < a.declarations.size(); ++k) {
        const auto& x = a.declarations[k];
        const auto& y = b.declarations[k];
        if (x.kind != y.kind || x.names != y.names || x.star != y.star ||
            x.invertible != y.invertible || x.depends != y.depends || x.rhs != y.rhs)
            return false;
    }
    auto names = [](const std::map<std::string, Scalar>& m) {
        std::vector<std::string> out;
        for (const auto& [k, v] : m) out.push_back(k);
        return out;
    };
    if (names(a.params) != names(b.params)) return false;
    if (a.constraints != b.constraints) return false;
    if (a.state.has_value() != b.state.has_value()) return false;
    if (a.state) {
        if (a.state->reference != b.state->reference || a.state->time != b.state->time ||
            a.state->moments != b.state->moments)
            return false;
    }
    if (a.task.has_value() != b.task.has_value()) return false;
    if (a.task) {
        if (a.task->entries.size() != b.task->entries.size()) return false;
        for (size_t k = 0; k < a.task->entries.size(); ++k) {
            const auto& x = a.task->entries[k];
            const auto& y = b.task->entries[k];
            if (x.key != y.key || x.number != y.number || x.idents != y.idents) return false;
        }
    }
    return true;
}

}  // namespace qref
