#include "qref/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qref/errors.hpp"

namespace qref {

namespace {

void enumerate_rec(const AlgebraSignature& sig, const std::vector<GenId>& gens, int depth,
                   size_t start, Word& cur, std::vector<Word>& out) {
    out.push_back(cur);
    if (depth == 0) return;
    for (size_t j = start; j < gens.size(); ++j) {
        if (!cur.empty() && sig.product_rule(cur.back(), gens[j])) continue;
        cur.push_back(gens[j]);
        enumerate_rec(sig, gens, depth - 1, j, cur, out);
        cur.pop_back();
    }
}

} // namespace

BasisPtr enumerate_commutant_basis(const SignaturePtr& sig, GenId Z, int degree) {
    if (degree < 0) throw BadParameter("basis degree must be nonnegative");
    auto b = std::make_shared<CommutantBasis>();
    b->sig = sig;
    b->reference = Z;
    b->degree = degree;
    const auto& zd = sig->decl(Z);
    if (zd.kind != GenKind::Position || zd.partner < 0) {
        throw AlgebraError("reference '" + zd.name + "' has no conjugate momentum");
    }
    b->momentum = zd.partner;

    for (GenId g = 0; g < sig->size(); ++g) {
        if (g == b->momentum) continue;
        if (g == Z) {
            b->generators.push_back(g);
            continue;
        }
        try {
            if (generator_commutator(sig, g, Z).is_zero()) b->generators.push_back(g);
        } catch (const NonClosedCommutator&) {
            // Not provably commuting, hence not usable commutant material.
        }
    }
    std::sort(b->generators.begin(), b->generators.end(), [&](GenId x, GenId y) {
        return letter_order_key(*sig, x) < letter_order_key(*sig, y);
    });

    Word cur;
    enumerate_rec(*sig, b->generators, degree, 0, cur, b->words);
    std::sort(b->words.begin(), b->words.end(), WordLess{});
    for (size_t i = 0; i < b->words.size(); ++i) b->index[b->words[i]] = static_cast<int>(i);
    return b;
}

MomentState::MomentState(BasisPtr basis, NCPolynomial constraint, NCPolynomial hamiltonian,
                         double t_Z, Env env)
    : basis_(std::move(basis)),
      constraint_(std::move(constraint)),
      hamiltonian_(std::move(hamiltonian)),
      t_Z_(t_Z),
      env_(std::move(env)) {
    auto it = env_.find("hbar");
    if (it == env_.end()) throw BadParameter("state environment must define hbar");
    hbar_ = it->second;
}

MomentState MomentState::extend_from_reduced(BasisPtr basis, const MomentMap& reduced,
                                             double t_Z, const NCPolynomial& constraint,
                                             Env env) {
    const SignaturePtr& sig = basis->sig;
    GenId Z = basis->reference;
    GenId E = basis->momentum;
    if (!(constraint.coefficient(Word{E}) == Scalar::one())) {
        throw HamiltonianNotInCommutant("constraint needs unit coefficient on '" +
                                        sig->decl(E).name + "'");
    }
    NCPolynomial H = constraint - NCPolynomial::gen(sig, E);
    if (contains_generator(H, E)) {
        throw HamiltonianNotInCommutant("constraint has extra factors of '" +
                                        sig->decl(E).name + "'");
    }
    bool commutes = false;
    try {
        commutes = commutator(H, NCPolynomial::gen(sig, Z)).is_zero();
    } catch (const NonClosedCommutator&) {
    }
    if (!commutes) {
        throw HamiltonianNotInCommutant("Hamiltonian part does not commute with '" +
                                        sig->decl(Z).name + "'");
    }

    MomentState st(basis, constraint, std::move(H), t_Z, std::move(env));
    for (const Word& w : basis->words) {
        int k = 0;
        Word rest;
        rest.reserve(w.size());
        for (GenId g : w) {
            if (g == Z)
                ++k;
            else
                rest.push_back(g);
        }
        Cplx base;
        auto it = reduced.find(rest);
        if (rest.empty()) {
            base = Cplx(1.0, 0.0);
            if (it != reduced.end() && std::abs(it->second - base) > 1e-12) {
                throw BadParameter("reduced moments are not normalized");
            }
        } else if (it == reduced.end()) {
            throw BadParameter("reduced moment missing for " + render_word(*sig, rest));
        } else {
            base = it->second;
        }
        st.stored_[w] = std::pow(t_Z, k) * base;
    }
    return st;
}

void MomentState::set_moment(const Word& w, Cplx v) {
    if (basis_->find(w) < 0) {
        throw BadParameter("word " + render_word(*basis_->sig, w) + " is not in the basis");
    }
    stored_[w] = v;
}

Cplx MomentState::value(const NCPolynomial& p) const {
    Cplx acc(0.0, 0.0);
    for (const auto& [w, c] : p.terms()) acc += c.evaluate(env_) * value_word(w);
    return acc;
}

Cplx MomentState::value_word(const Word& w) const {
    if (w.empty()) return Cplx(1.0, 0.0);
    if (auto it = stored_.find(w); it != stored_.end()) return it->second;

    const SignaturePtr& sig = basis_->sig;
    GenId Z = basis_->reference;
    GenId E = basis_->momentum;
    int k = 0;
    Word rest;
    rest.reserve(w.size());
    for (GenId g : w) {
        if (g == Z)
            ++k;
        else
            rest.push_back(g);
    }

    int m = 0;
    size_t epos = 0;
    for (size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == E) {
            ++m;
            epos = i;
        }
    }
    if (m >= 2) {
        throw DegreeOverflow("cannot value " + render_word(*sig, w) +
                             ": two factors of the conjugate momentum");
    }
    if (m == 1) {
        for (size_t i = epos + 1; i < rest.size(); ++i) {
            if (!generator_commutator(sig, rest[i], E).is_zero()) {
                throw DegreeOverflow("cannot value " + render_word(*sig, w) +
                                     ": letters to the right of the momentum do not commute with it");
            }
        }
        Word a(rest.begin(), rest.begin() + epos);
        a.insert(a.end(), rest.begin() + epos + 1, rest.end());
        Cplx v = -value(multiply(NCPolynomial::word(sig, a), hamiltonian_));
        return std::pow(t_Z_, k) * v;
    }
    if (k > 0) return std::pow(t_Z_, k) * value_word(rest);
    throw DegreeOverflow("moment of " + render_word(*sig, w) + " exceeds the stored degree " +
                         std::to_string(basis_->degree));
}

MomentMatrix moment_matrix(const MomentState& state) {
    const CommutantBasis& b = state.basis();
    const int half = b.degree / 2;
    MomentMatrix mm;
    for (const Word& w : b.words) {
        if (static_cast<int>(w.size()) <= half) mm.slice.push_back(w);
    }
    const size_t n = mm.slice.size();
    std::vector<NCPolynomial> adjoints;
    adjoints.reserve(n);
    for (const Word& w : mm.slice) adjoints.push_back(adjoint(NCPolynomial::word(b.sig, w)));

    mm.entries.assign(n, std::vector<Cplx>(n));
    Eigen::MatrixXcd M(n, n);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < n; ++c) {
            Cplx v = state.value(multiply(adjoints[r], NCPolynomial::word(b.sig, mm.slice[c])));
            mm.entries[r][c] = v;
            M(r, c) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    mm.min_eigenvalue = es.eigenvalues().minCoeff();
    return mm;
}

PositivityResult positivity_on_commutant(const MomentState& state, double tol) {
    MomentMatrix mm = moment_matrix(state);
    PositivityResult r;
    r.min_eigenvalue = mm.min_eigenvalue;
    r.dimension = static_cast<int>(mm.slice.size());
    r.pass = r.min_eigenvalue >= -tol;
    return r;
}

AlmostPositiveReport check_almost_positive(const MomentState& state, double tol) {
    const CommutantBasis& b = state.basis();
    const SignaturePtr& sig = b.sig;
    AlmostPositiveReport rep;

    const int deg_c = std::max(state.hamiltonian().degree(), 1);
    for (const Word& w : b.words) {
        if (static_cast<int>(w.size()) + deg_c > b.degree) continue;
        Cplx v = state.value(multiply(NCPolynomial::word(sig, w), state.constraint()));
        rep.constraint_residual = std::max(rep.constraint_residual, std::abs(v));
    }

    for (const Word& w : b.words) {
        int k = 0;
        Word rest;
        for (GenId g : w) {
            if (g == b.reference)
                ++k;
            else
                rest.push_back(g);
        }
        if (k == 0) continue;
        Cplx derived = std::pow(state.t_Z(), k) * state.value_word(rest);
        rep.parameterization_residual =
            std::max(rep.parameterization_residual, std::abs(state.stored().at(w) - derived));
    }

    for (const Word& w : b.words) {
        Cplx direct = state.value_word(w);
        Cplx reversed = state.value(adjoint(NCPolynomial::word(sig, w)));
        rep.reality_residual = std::max(rep.reality_residual, std::abs(reversed - std::conj(direct)));
    }

    rep.min_eigenvalue = moment_matrix(state).min_eigenvalue;
    rep.pass_constraint = rep.constraint_residual <= tol;
    rep.pass_parameterization = rep.parameterization_residual <= tol;
    rep.pass_positivity = rep.min_eigenvalue >= -tol && rep.reality_residual <= tol;
    rep.pass = rep.pass_constraint && rep.pass_parameterization && rep.pass_positivity;
    return rep;
}

Cplx nonpositivity_witness(const MomentState& state) {
    const SignaturePtr& sig = state.basis().sig;
    NCPolynomial z = NCPolynomial::gen(sig, state.basis().reference);
    NCPolynomial sym = multiply(state.constraint(), z) + multiply(z, state.constraint());
    return 0.5 * state.value(sym);
}

Cplx covariance(const MomentState& state, const NCPolynomial& A, const NCPolynomial& B) {
    Cplx sym = 0.5 * state.value(multiply(A, B) + multiply(B, A));
    return sym - state.value(A) * state.value(B);
}

UncertaintyProduct uncertainty_product_check(const MomentState& state, double tol) {
    const SignaturePtr& sig = state.basis().sig;
    NCPolynomial z = NCPolynomial::gen(sig, state.basis().reference);
    NCPolynomial e = NCPolynomial::gen(sig, state.basis().momentum);
    UncertaintyProduct u;
    u.reference_variance = covariance(state, z, z);
    u.mixed_covariance = covariance(state, z, e);
    u.bound = 0.25 * state.hbar() * state.hbar();
    if (std::abs(u.reference_variance) > 1e-12 * std::max(1.0, std::abs(state.t_Z()))) {
        // A nonzero reference variance would need the momentum variance,
        // which lies outside the closure; this throws DegreeOverflow.
        (void)state.value(multiply(e, e));
    }
    Cplx prod = -(u.mixed_covariance * u.mixed_covariance);
    u.product = prod.real();
    u.saturated = std::abs(u.product - u.bound) <= tol * std::max(1.0, u.bound) &&
                  std::abs(prod.imag()) <= tol;
    return u;
}

CauchySchwarzResult cauchy_schwarz_check(const MomentState& state,
                                         const std::vector<std::pair<NCPolynomial, NCPolynomial>>& pairs,
                                         double tol) {
    CauchySchwarzResult r;
    r.pairs = static_cast<int>(pairs.size());
    bool first = true;
    for (const auto& [A, B] : pairs) {
        double aa = state.value(multiply(adjoint(A), A)).real();
        double bb = state.value(multiply(adjoint(B), B)).real();
        double ab = std::abs(state.value(multiply(adjoint(A), B)));
        double margin = aa * bb - ab * ab;
        if (first || margin < r.worst_margin) r.worst_margin = margin;
        first = false;
    }
    r.pass = r.pairs == 0 || r.worst_margin >= -tol;
    return r;
}

FrameIncompatibilityReport frame_incompatibility_check(const MomentState& state, GenId other,
                                                       double tol) {
    const SignaturePtr& sig = state.basis().sig;
    GenId Z = state.basis().reference;
    GenId E = state.basis().momentum;
    FrameIncompatibilityReport rep;
    rep.frame_a = Z;
    rep.frame_b = other;
    rep.mixed_covariance = covariance(state, NCPolynomial::gen(sig, Z), NCPolynomial::gen(sig, E));
    rep.pair_in_other_commutant = generator_commutator(sig, Z, other).is_zero() &&
                                  generator_commutator(sig, E, other).is_zero();
    // Positivity on the other commutant would force the symmetrized
    // covariance of two hermitian members to be real.
    rep.compatible = !(rep.pair_in_other_commutant && std::abs(rep.mixed_covariance.imag()) > tol);
    return rep;
}

MomentMap gaussian_pair_moments(const GaussianSpec& g, double hbar, int degree) {
    if (degree < 0) throw BadParameter("degree must be nonnegative");
    const int N = degree + 1;
    auto idx = [N](int a, int b) { return a * N + b; };
    const Cplx I(0.0, 1.0);

    // log of the ordered characteristic function, a bivariate quadratic
    std::vector<Cplx> L(N * N, Cplx(0.0));
    if (degree >= 1) {
        L[idx(1, 0)] = I * g.mean_q;
        L[idx(0, 1)] = I * g.mean_p;
    }
    if (degree >= 2) {
        L[idx(2, 0)] = Cplx(-0.5 * g.var_q);
        L[idx(0, 2)] = Cplx(-0.5 * g.var_p);
        L[idx(1, 1)] = Cplx(-g.cov_qp) - 0.5 * I * hbar;
    }

    // exp(L) truncated at total degree; exact term by term since L has no
    // constant part.
    std::vector<Cplx> E(N * N, Cplx(0.0)), P(N * N, Cplx(0.0)), T(N * N);
    E[idx(0, 0)] = Cplx(1.0);
    P[idx(0, 0)] = Cplx(1.0);
    double fact = 1.0;
    for (int n = 1; n <= degree; ++n) {
        std::fill(T.begin(), T.end(), Cplx(0.0));
        for (int a1 = 0; a1 <= degree; ++a1) {
            for (int b1 = 0; a1 + b1 <= degree; ++b1) {
                Cplx pv = P[idx(a1, b1)];
                if (pv == Cplx(0.0)) continue;
                for (int a2 = 0; a2 <= 2; ++a2) {
                    for (int b2 = 0; a2 + b2 <= 2; ++b2) {
                        if (a1 + a2 + b1 + b2 > degree) continue;
                        Cplx lv = L[idx(a2, b2)];
                        if (lv == Cplx(0.0)) continue;
                        T[idx(a1 + a2, b1 + b2)] += pv * lv;
                    }
                }
            }
        }
        P.swap(T);
        fact *= n;
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) E[idx(a, b)] += P[idx(a, b)] / fact;
        }
    }

    static const Cplx minus_i_pow[4] = {Cplx(1, 0), Cplx(0, -1), Cplx(-1, 0), Cplx(0, 1)};
    MomentMap out;
    double fa = 1.0;
    for (int a = 0; a <= degree; ++a) {
        if (a > 0) fa *= a;
        double fb = 1.0;
        for (int b = 0; a + b <= degree; ++b) {
            if (b > 0) fb *= b;
            Word w;
            w.insert(w.end(), a, g.q);
            w.insert(w.end(), b, g.p);
            out[w] = minus_i_pow[(a + b) % 4] * fa * fb * E[idx(a, b)];
        }
    }
    return out;
}

MomentMap tensor_moments(const SignaturePtr& sig, const MomentMap& a, const MomentMap& b,
                         int degree) {
    auto key_less = [&](GenId x, GenId y) {
        return letter_order_key(*sig, x) < letter_order_key(*sig, y);
    };
    MomentMap out;
    for (const auto& [wa, va] : a) {
        for (const auto& [wb, vb] : b) {
            if (static_cast<int>(wa.size() + wb.size()) > degree) continue;
            Word merged(wa.size() + wb.size());
            std::merge(wa.begin(), wa.end(), wb.begin(), wb.end(), merged.begin(), key_less);
            out[merged] = va * vb;
        }
    }
    return out;
}

} // namespace qref
