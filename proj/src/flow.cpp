#include "qref/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "qref/errors.hpp"

namespace qref {

ZFreeSlice zfree_slice(BasisPtr basis) {
    ZFreeSlice s;
    s.basis = std::move(basis);
    for (const Word& w : s.basis->words) {
        if (std::find(w.begin(), w.end(), s.basis->reference) != w.end()) continue;
        s.index.emplace(w, static_cast<int>(s.words.size()));
        s.words.push_back(w);
    }
    return s;
}

namespace {

struct PendingWord {
    Word w;
    Cplx coeff;
    int zpow;
};

} // namespace

ValuationPlan compile_valuation(const ZFreeSlice& slice, const NCPolynomial& poly,
                                const NCPolynomial& hamiltonian, const Env& env) {
    const CommutantBasis& basis = *slice.basis;
    const SignaturePtr& sig = basis.sig;
    const GenId Z = basis.reference;
    const GenId E = basis.momentum;

    std::map<std::pair<int, int>, Cplx> acc;  // (zpow, target) -> coefficient
    ValuationPlan plan;

    std::deque<PendingWord> queue;
    for (const auto& [w, c] : poly.terms()) queue.push_back({w, c.evaluate(env), 0});

    while (!queue.empty()) {
        PendingWord cur = std::move(queue.front());
        queue.pop_front();

        Word rest;
        rest.reserve(cur.w.size());
        for (GenId g : cur.w) {
            if (g == Z)
                ++cur.zpow;
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
            throw DegreeOverflow("cannot compile " + render_word(*sig, cur.w) +
                                 ": two factors of the conjugate momentum");
        }
        if (m == 1) {
            for (size_t i = epos + 1; i < rest.size(); ++i) {
                if (!generator_commutator(sig, rest[i], E).is_zero()) {
                    throw DegreeOverflow(
                        "cannot compile " + render_word(*sig, cur.w) +
                        ": letters to the right of the momentum do not commute with it");
                }
            }
            Word a(rest.begin(), rest.begin() + epos);
            a.insert(a.end(), rest.begin() + epos + 1, rest.end());
            NCPolynomial repl = multiply(NCPolynomial::word(sig, a), hamiltonian);
            for (const auto& [w2, c2] : repl.terms()) {
                queue.push_back({w2, -cur.coeff * c2.evaluate(env), cur.zpow});
            }
            continue;
        }

        int idx = basis.find(rest);
        if (idx < 0) {
            if (static_cast<int>(rest.size()) > basis.degree) {
                ++plan.dropped;
                continue;
            }
            throw AlgebraError("word " + render_word(*sig, cur.w) +
                               " leaves the commutant of '" + sig->decl(Z).name + "'");
        }
        auto it = slice.index.find(rest);
        acc[{cur.zpow, it->second}] += cur.coeff;
    }

    for (const auto& [key, c] : acc) {
        if (c == Cplx(0.0, 0.0)) continue;
        plan.rows.push_back({key.first, key.second, c});
    }
    return plan;
}

Cplx evaluate_plan(const ValuationPlan& plan, double t_Z, const std::vector<Cplx>& moments) {
    Cplx acc(0.0, 0.0);
    for (const ValuationRow& r : plan.rows) {
        double t = 1.0;
        for (int i = 0; i < r.zpow; ++i) t *= t_Z;
        acc += r.coeff * t * moments[r.target];
    }
    return acc;
}

Cplx gauge_flow_rhs(const MomentState& state, const Word& A) {
    const SignaturePtr& sig = state.basis().sig;
    NCPolynomial bracket = commutator(NCPolynomial::word(sig, A), state.constraint());
    return state.value(bracket) / Cplx(0.0, state.hbar());
}

namespace {

struct CompiledFlow {
    ZFreeSlice slice;
    std::vector<ValuationPlan> plans;  // one per slice word
    int dropped = 0;
};

CompiledFlow compile_flow(const MomentState& st) {
    CompiledFlow f;
    f.slice = zfree_slice(st.basis_ptr());
    const SignaturePtr& sig = st.basis().sig;
    const Scalar inv_ihbar = Scalar::i_hbar().inverse();
    f.plans.reserve(f.slice.words.size());
    for (const Word& w : f.slice.words) {
        NCPolynomial rhs =
            scalar_multiply(inv_ihbar, commutator(NCPolynomial::word(sig, w), st.constraint()));
        f.plans.push_back(compile_valuation(f.slice, rhs, st.hamiltonian(), st.env()));
        f.dropped += f.plans.back().dropped;
    }
    return f;
}

void flow_rhs(const CompiledFlow& f, double t_Z, const std::vector<Cplx>& m,
              std::vector<Cplx>& out) {
    for (size_t a = 0; a < f.plans.size(); ++a) out[a] = evaluate_plan(f.plans[a], t_Z, m);
}

void rk4_step(const CompiledFlow& f, double t0, double tau, double h, std::vector<Cplx>& m,
              std::vector<Cplx>& k1, std::vector<Cplx>& k2, std::vector<Cplx>& k3,
              std::vector<Cplx>& k4, std::vector<Cplx>& tmp) {
    const size_t n = m.size();
    flow_rhs(f, t0 + tau, m, k1);
    for (size_t i = 0; i < n; ++i) tmp[i] = m[i] + 0.5 * h * k1[i];
    flow_rhs(f, t0 + tau + 0.5 * h, tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = m[i] + 0.5 * h * k2[i];
    flow_rhs(f, t0 + tau + 0.5 * h, tmp, k3);
    for (size_t i = 0; i < n; ++i) tmp[i] = m[i] + h * k3[i];
    flow_rhs(f, t0 + tau + h, tmp, k4);
    for (size_t i = 0; i < n; ++i) m[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace

Trajectory evolve(const MomentState& initial, double tau_end, double dt) {
    if (!(dt > 0.0)) throw BadParameter("gauge flow step must be positive");

    CompiledFlow f = compile_flow(initial);
    const double t0 = initial.t_Z();

    Trajectory tr{initial.basis_ptr(), f.slice.words, initial.constraint(), initial.env(), {}, {}};
    if (f.dropped > 0) {
        tr.warnings.push_back("flow closure truncated at degree " +
                              std::to_string(initial.basis().degree) + ": dropped " +
                              std::to_string(f.dropped) + " higher-degree terms");
    }

    const size_t n = tr.words.size();
    std::vector<Cplx> m(n);
    for (size_t i = 0; i < n; ++i) m[i] = initial.value_word(tr.words[i]);

    const double sdt = tau_end < 0.0 ? -dt : dt;
    const auto n_full = static_cast<long long>(std::floor(std::abs(tau_end) / dt + 1e-9));

    tr.samples.push_back({0.0, t0, m});
    std::vector<Cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (long long i = 0; i < n_full; ++i) {
        const double tau = static_cast<double>(i) * sdt;
        rk4_step(f, t0, tau, sdt, m, k1, k2, k3, k4, tmp);
        const double tau_next = static_cast<double>(i + 1) * sdt;
        tr.samples.push_back({tau_next, t0 + tau_next, m});
    }
    const double tau_last = static_cast<double>(n_full) * sdt;
    const double h = tau_end - tau_last;
    if (std::abs(h) > 1e-9 * dt) {
        rk4_step(f, t0, tau_last, h, m, k1, k2, k3, k4, tmp);
        tr.samples.push_back({tau_end, t0 + tau_end, m});
    }
    return tr;
}

MomentState state_at(const Trajectory& t, std::size_t sample_index) {
    if (sample_index >= t.samples.size()) throw BadParameter("trajectory sample out of range");
    const TrajectorySample& s = t.samples[sample_index];
    MomentMap reduced;
    for (size_t i = 0; i < t.words.size(); ++i) reduced[t.words[i]] = s.moments[i];
    return MomentState::extend_from_reduced(t.basis, reduced, s.t_Z, t.constraint, t.env);
}

namespace {

// Partial derivative of the polynomial with every letter treated as a
// commuting variable, evaluated at the first moments of the state.
Cplx gradient_at_means(const MomentState& st, const NCPolynomial& p, GenId target) {
    Cplx acc(0.0, 0.0);
    for (const auto& [w, c] : p.terms()) {
        const Cplx cv = c.evaluate(st.env());
        for (size_t j = 0; j < w.size(); ++j) {
            if (w[j] != target) continue;
            Cplx prod(1.0, 0.0);
            for (size_t l = 0; l < w.size(); ++l) {
                if (l != j) prod *= st.value_word(Word{w[l]});
            }
            acc += cv * prod;
        }
    }
    return acc;
}

} // namespace

std::vector<ClassicalComparison> classical_limit_check(const MomentState& state) {
    const CommutantBasis& b = state.basis();
    const SignaturePtr& sig = b.sig;
    std::vector<ClassicalComparison> out;
    for (GenId g : b.generators) {
        const GeneratorDecl& d = sig->decl(g);
        if (d.kind != GenKind::Position && d.kind != GenKind::Momentum) continue;
        if (d.partner < 0) continue;
        ClassicalComparison row;
        row.generator = g;
        row.quantum_rate = gauge_flow_rhs(state, Word{g});
        Cplx grad = gradient_at_means(state, state.constraint(), d.partner);
        row.classical_rate = d.kind == GenKind::Position ? grad : -grad;
        row.deviation = std::abs(row.quantum_rate - row.classical_rate);
        out.push_back(row);
    }
    return out;
}

} // namespace qref
