#include "qref/polynomial.hpp"

#include <algorithm>
#include <tuple>
#include <set>
#include <sstream>

#include "qref/errors.hpp"

namespace qref {

NCPolynomial NCPolynomial::one(SignaturePtr sig) {
    return scalar(std::move(sig), Scalar::one());
}

NCPolynomial NCPolynomial::scalar(SignaturePtr sig, const Scalar& s) {
    NCPolynomial p(std::move(sig));
    if (!s.is_zero()) p.terms_[Word{}] = s;
    return p;
}

NCPolynomial NCPolynomial::gen(SignaturePtr sig, GenId id) {
    sig->decl(id);  // range check
    NCPolynomial p(sig);
    p.terms_[Word{id}] = Scalar::one();
    return p;
}

NCPolynomial NCPolynomial::gen(SignaturePtr sig, const std::string& name) {
    GenId id = sig->find(name);
    return gen(std::move(sig), id);
}

NCPolynomial NCPolynomial::word(SignaturePtr sig, const Word& w, const Scalar& c) {
    NCPolynomial p(std::move(sig));
    if (!c.is_zero()) p.terms_[w] = c;
    return p;
}

std::optional<Scalar> NCPolynomial::as_scalar() const {
    if (terms_.empty()) return Scalar::zero();
    if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
    return std::nullopt;
}

Scalar NCPolynomial::coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Scalar::zero() : it->second;
}

int NCPolynomial::degree() const {
    if (terms_.empty()) return -1;
    // WordLess orders by length first, so the last term has the longest word.
    return static_cast<int>(std::prev(terms_.end())->first.size());
}

void NCPolynomial::set_term(const Word& w, Scalar c) {
    if (c.is_zero())
        terms_.erase(w);
    else
        terms_[w] = std::move(c);
}

namespace {

// One normal-ordering pass: a pool of pending terms keyed by word (merging
// coefficients early keeps product expansions from exploding) plus a shared
// step budget and a commutator cache.
class Rewriter {
  public:
    Rewriter(const AlgebraSignature& sig, const RewriteLimits& limits)
        : sig_(sig), limits_(limits), steps_(limits.max_steps) {}

    void feed(const RawTerm& t) { fold_pending(t.w, t.c); }

    std::map<Word, Scalar, WordLess> run() {
        while (!pending_.empty()) {
            auto it = std::prev(pending_.end());
            Word w = it->first;
            Scalar c = it->second;
            pending_.erase(it);
            if (c.is_zero()) continue;
            step_or_throw();

            // Cancellation and compression first: product rules strictly
            // shrink words, so they cannot feed a rewrite loop.
            bool rewrote = false;
            for (size_t i = 0; i + 1 < w.size(); ++i) {
                if (const RawPoly* rule = sig_.product_rule(w[i], w[i + 1])) {
                    splice(w, c, i, 2, *rule);
                    rewrote = true;
                    break;
                }
            }
            if (rewrote) continue;

            // Leftmost descending adjacent pair: a*b = b*a + [a, b].
            for (size_t i = 0; i + 1 < w.size(); ++i) {
                if (out_of_order(w[i], w[i + 1])) {
                    Word swapped = w;
                    std::swap(swapped[i], swapped[i + 1]);
                    fold_pending(swapped, c);
                    splice(w, c, i, 2, comm(w[i], w[i + 1], 0));
                    rewrote = true;
                    break;
                }
            }
            if (rewrote) continue;

            fold(result_, w, c);
        }
        return std::move(result_);
    }

  private:
    bool out_of_order(GenId a, GenId b) const {
        return letter_order_key(sig_, a) > letter_order_key(sig_, b);
    }

    void step_or_throw() {
        if (--steps_ < 0)
            throw NonClosedCommutator(
                "normal ordering exceeded the step budget of " +
                std::to_string(limits_.max_steps) +
                "; the rewrite does not terminate (mixed noncommuting inverses have no "
                "finite normal form)");
    }

    static void fold(std::map<Word, Scalar, WordLess>& into, const Word& w, const Scalar& c) {
        auto [it, fresh] = into.try_emplace(w, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) into.erase(it);
        }
    }

    void fold_pending(const Word& w, const Scalar& c) {
        if (c.is_zero()) return;
        if (w.size() > limits_.max_word_length)
            throw NonClosedCommutator(
                "a rewritten word grew past " + std::to_string(limits_.max_word_length) +
                " letters; the rewrite does not terminate (mixed noncommuting inverses have "
                "no finite normal form)");
        fold(pending_, w, c);
    }

    // Replaces w[at .. at+len) by each term of rule, scaled by c.
    void splice(const Word& w, const Scalar& c, size_t at, size_t len, const RawPoly& rule) {
        for (const auto& rt : rule) {
            Word nw;
            nw.reserve(w.size() - len + rt.w.size());
            nw.insert(nw.end(), w.begin(), w.begin() + at);
            nw.insert(nw.end(), rt.w.begin(), rt.w.end());
            nw.insert(nw.end(), w.begin() + at + len, w.end());
            fold_pending(nw, c * rt.c);
        }
    }

    // [a, b] as a raw polynomial. Resolution order: declared table, canonical
    // pair, inverse-letter recursion, derivative rule against the conjugate
    // letter, then the dependency default (disjoint canonical support commutes).
    const RawPoly& comm(GenId a, GenId b, int depth) {
        auto key = std::make_pair(a, b);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        if (depth > limits_.max_comm_depth)
            throw NonClosedCommutator("commutator recursion exceeded depth " +
                                      std::to_string(limits_.max_comm_depth) + " at [" +
                                      sig_.decl(a).name + ", " + sig_.decl(b).name + "]");
        auto vkey = std::make_pair(std::min(a, b), std::max(a, b));
        if (!visiting_.insert(vkey).second)
            throw NonClosedCommutator("cyclic commutator resolution at [" + sig_.decl(a).name +
                                      ", " + sig_.decl(b).name + "]");
        RawPoly out = resolve_comm(a, b, depth);
        visiting_.erase(vkey);
        return cache_.emplace(key, std::move(out)).first->second;
    }

    RawPoly resolve_comm(GenId a, GenId b, int depth) {
        if (a == b) return {};

        if (const RawPoly* dec = sig_.declared_commutator(a, b)) {
            RawPoly out = *dec;
            if (a > b)
                for (auto& t : out) t.c = -t.c;
            return out;
        }

        const GeneratorDecl& da = sig_.decl(a);
        const GeneratorDecl& db = sig_.decl(b);

        if (da.partner == b) {
            Scalar unit = da.kind == GenKind::Position ? Scalar::i_hbar() : -Scalar::i_hbar();
            return {{unit, Word{}}};
        }

        // [x^-1, b] = -x^-1 [x, b] x^-1 and the mirrored form.
        if (da.kind == GenKind::Inverse) {
            RawPoly inner = comm(da.inverse_of, b, depth + 1);
            RawPoly out;
            for (const auto& t : inner) {
                Word w;
                w.reserve(t.w.size() + 2);
                w.push_back(a);
                w.insert(w.end(), t.w.begin(), t.w.end());
                w.push_back(a);
                out.push_back({-t.c, std::move(w)});
            }
            return out;
        }
        if (db.kind == GenKind::Inverse) {
            RawPoly inner = comm(a, db.inverse_of, depth + 1);
            RawPoly out;
            for (const auto& t : inner) {
                Word w;
                w.reserve(t.w.size() + 2);
                w.push_back(b);
                w.insert(w.end(), t.w.begin(), t.w.end());
                w.push_back(b);
                out.push_back({-t.c, std::move(w)});
            }
            return out;
        }

        // Chain rule against the conjugate of the function's argument:
        // [f(x), y] = [x, y] f'(x) with [x, y] = +/- i*hbar.
        if (da.kind == GenKind::Function && sig_.decl(da.base).partner == b) {
            Scalar unit = sig_.decl(da.base).kind == GenKind::Position ? Scalar::i_hbar()
                                                                       : -Scalar::i_hbar();
            RawPoly out = *sig_.derivative_rule(a);
            for (auto& t : out) t.c = unit * t.c;
            return out;
        }
        if (db.kind == GenKind::Function && sig_.decl(db.base).partner == a) {
            Scalar unit = sig_.decl(db.base).kind == GenKind::Position ? Scalar::i_hbar()
                                                                       : -Scalar::i_hbar();
            RawPoly out = *sig_.derivative_rule(b);
            for (auto& t : out) t.c = -(unit * t.c);
            return out;
        }

        if (dependency_disjoint(a, b)) return {};

        throw NonClosedCommutator("[" + da.name + ", " + db.name +
                                  "] is not declared and the letters share a canonical pair");
    }

    // True when no canonical letter in a's support is conjugate to one in b's.
    // Shared support on the same side (two functions of one position, say)
    // still commutes; only a q/p overlap blocks the default.
    bool dependency_disjoint(GenId a, GenId b) {
        const auto& das = sig_.dependency_set(a);
        const auto& dbs = sig_.dependency_set(b);
        for (GenId x : das) {
            GenId px = sig_.decl(x).partner;
            if (px >= 0 && std::binary_search(dbs.begin(), dbs.end(), px)) return false;
        }
        return true;
    }

    const AlgebraSignature& sig_;
    const RewriteLimits& limits_;
    long long steps_;
    std::map<Word, Scalar, WordLess> pending_;
    std::map<Word, Scalar, WordLess> result_;
    std::map<std::pair<GenId, GenId>, RawPoly> cache_;
    std::set<std::pair<GenId, GenId>> visiting_;
};

const SignaturePtr& pick_sig(const NCPolynomial& a, const NCPolynomial& b) {
    if (a.signature() && b.signature() && a.signature() != b.signature())
        throw AlgebraError("operands built over different signatures");
    return a.signature() ? a.signature() : b.signature();
}

} // namespace

NCPolynomial normal_form(const SignaturePtr& sig, const RawPoly& input,
                         const RewriteLimits& limits) {
    Rewriter rw(*sig, limits);
    for (const auto& t : input) rw.feed(t);
    NCPolynomial out(sig);
    for (auto& [w, c] : rw.run()) out.set_term(w, std::move(c));
    return out;
}

NCPolynomial generator_commutator(const SignaturePtr& sig, GenId a, GenId b) {
    return normal_form(sig, {{Scalar::one(), Word{a, b}}, {-Scalar::one(), Word{b, a}}});
}

NCPolynomial add(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial out(pick_sig(a, b));
    for (const auto& [w, c] : a.terms()) out.set_term(w, c);
    for (const auto& [w, c] : b.terms()) out.set_term(w, out.coefficient(w) + c);
    return out;
}

NCPolynomial sub(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial out(pick_sig(a, b));
    for (const auto& [w, c] : a.terms()) out.set_term(w, c);
    for (const auto& [w, c] : b.terms()) out.set_term(w, out.coefficient(w) - c);
    return out;
}

NCPolynomial scalar_multiply(const Scalar& s, const NCPolynomial& a) {
    NCPolynomial out(a.signature());
    if (s.is_zero()) return out;
    for (const auto& [w, c] : a.terms()) out.set_term(w, s * c);
    return out;
}

NCPolynomial multiply(const NCPolynomial& a, const NCPolynomial& b) {
    const SignaturePtr& sig = pick_sig(a, b);
    RawPoly raw;
    raw.reserve(a.terms().size() * b.terms().size());
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) {
            Word w;
            w.reserve(wa.size() + wb.size());
            w.insert(w.end(), wa.begin(), wa.end());
            w.insert(w.end(), wb.begin(), wb.end());
            raw.push_back({ca * cb, std::move(w)});
        }
    if (!sig) {
        // Two scalar-only polynomials with no signature attached.
        NCPolynomial out;
        for (const auto& t : raw) out.set_term(t.w, out.coefficient(t.w) + t.c);
        return out;
    }
    return normal_form(sig, raw);
}

NCPolynomial commutator(const NCPolynomial& a, const NCPolynomial& b) {
    return sub(multiply(a, b), multiply(b, a));
}

NCPolynomial adjoint(const NCPolynomial& a) {
    const SignaturePtr& sig = a.signature();
    RawPoly raw;
    for (const auto& [w, c] : a.terms()) {
        Word rev(w.rbegin(), w.rend());
        Scalar coeff = c.conj();
        for (GenId g : rev)
            if (sig->decl(g).star == Star::AntiHermitian) coeff = -coeff;
        raw.push_back({std::move(coeff), std::move(rev)});
    }
    return normal_form(sig, raw);
}

bool is_hermitian(const NCPolynomial& a) { return adjoint(a) == a; }

NCPolynomial operator+(const NCPolynomial& a, const NCPolynomial& b) { return add(a, b); }
NCPolynomial operator-(const NCPolynomial& a, const NCPolynomial& b) { return sub(a, b); }
NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b) { return multiply(a, b); }
NCPolynomial operator*(const Scalar& s, const NCPolynomial& a) { return scalar_multiply(s, a); }
NCPolynomial operator-(const NCPolynomial& a) {
    return scalar_multiply(-Scalar::one(), a);
}

int degree_in(const NCPolynomial& p, GenId id) {
    int best = 0;
    for (const auto& [w, c] : p.terms())
        best = std::max(best, static_cast<int>(std::count(w.begin(), w.end(), id)));
    return best;
}

bool contains_generator(const NCPolynomial& p, GenId id) {
    for (const auto& [w, c] : p.terms())
        if (std::find(w.begin(), w.end(), id) != w.end()) return true;
    return false;
}

NCPolynomial substitute_generator(const NCPolynomial& p, GenId id,
                                  const NCPolynomial& replacement) {
    const SignaturePtr& sig = p.signature();
    RawPoly raw;
    for (const auto& [w, c] : p.terms()) {
        RawPoly acc{{c, Word{}}};
        for (GenId g : w) {
            if (g != id) {
                for (auto& t : acc) t.w.push_back(g);
            } else {
                RawPoly next;
                next.reserve(acc.size() * replacement.terms().size());
                for (const auto& t : acc)
                    for (const auto& [rw, rc] : replacement.terms()) {
                        Word nw = t.w;
                        nw.insert(nw.end(), rw.begin(), rw.end());
                        next.push_back({t.c * rc, std::move(nw)});
                    }
                acc = std::move(next);
            }
        }
        raw.insert(raw.end(), acc.begin(), acc.end());
    }
    return normal_form(sig, raw);
}

std::optional<NCPolynomial> invert_monomial(const NCPolynomial& p) {
    if (p.terms().size() != 1) return std::nullopt;
    const auto& [w, c] = *p.terms().begin();
    if (!c.is_single_term()) return std::nullopt;
    const SignaturePtr& sig = p.signature();

    // Per-letter inverses, multiplied in reverse order.
    RawPoly raw{{c.inverse(), Word{}}};
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        const GeneratorDecl& d = sig->decl(*it);
        RawPoly letter_inv;
        if (d.kind == GenKind::Inverse) {
            letter_inv = {{Scalar::one(), Word{d.inverse_of}}};
        } else if (d.inverse_id >= 0) {
            letter_inv = {{Scalar::one(), Word{d.inverse_id}}};
        } else {
            const CompositeInverse* ci = nullptr;
            for (const auto& comp : sig->composites())
                if (comp.u == *it) ci = &comp;
            if (!ci) return std::nullopt;
            letter_inv = {{ci->c0, Word{}}, {ci->c1, Word{ci->base}}};
        }
        RawPoly next;
        for (const auto& t : raw)
            for (const auto& li : letter_inv) {
                Word nw = t.w;
                nw.insert(nw.end(), li.w.begin(), li.w.end());
                next.push_back({t.c * li.c, std::move(nw)});
            }
        raw = std::move(next);
    }
    return normal_form(sig, raw);
}

std::optional<NCPolynomial> invert_composite(const NCPolynomial& p) {
    if (p.terms().empty() || p.terms().size() > 2) return std::nullopt;
    const SignaturePtr& sig = p.signature();
    for (const auto& ci : sig->composites()) {
        if (p.coefficient(Word{}) == ci.c0 && p.coefficient(Word{ci.base}) == ci.c1 &&
            p.terms().size() == (ci.c0.is_zero() ? 1u : 2u))
            return NCPolynomial::gen(sig, ci.u);
    }
    return std::nullopt;
}

std::string render_word(const AlgebraSignature& sig, const Word& w) {
    std::ostringstream os;
    for (size_t i = 0; i < w.size();) {
        size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        if (i > 0) os << "*";
        os << sig.decl(w[i]).name;
        if (j - i > 1) os << "^" << (j - i);
        i = j;
    }
    return os.str();
}

std::string render(const NCPolynomial& p) {
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
            term += render_word(*p.signature(), w);
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

} // namespace qref
