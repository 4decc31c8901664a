#include "qref/kernels.hpp"

#include <Eigen/Dense>

#include "qref/errors.hpp"

namespace qref {

namespace {

Eigen::MatrixXcd to_eigen(const std::vector<std::vector<Cplx>>& entries) {
    const auto n = static_cast<Eigen::Index>(entries.size());
    Eigen::MatrixXcd M(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) M(r, c) = entries[r][c];
    return M;
}

} // namespace

double min_eigenvalue(const std::vector<std::vector<Cplx>>& entries) {
    if (entries.empty()) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(entries),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

MomentMatrix assemble_moment_matrix(const MomentState& state, ExecutionPolicy policy) {
    const CommutantBasis& b = state.basis();
    MomentMatrix mm;
    for (const Word& w : b.words) {
        if (static_cast<int>(w.size()) <= b.degree / 2) mm.slice.push_back(w);
    }
    const auto n = static_cast<int>(mm.slice.size());
    std::vector<NCPolynomial> adjoints;
    adjoints.reserve(n);
    for (const Word& w : mm.slice) adjoints.push_back(adjoint(NCPolynomial::word(b.sig, w)));

    mm.entries.assign(n, std::vector<Cplx>(n));
    const bool par = policy == ExecutionPolicy::Parallel;
#pragma omp parallel for if (par) schedule(dynamic)
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            mm.entries[r][c] =
                state.value(multiply(adjoints[r], NCPolynomial::word(b.sig, mm.slice[c])));
        }
    }
    mm.min_eigenvalue = min_eigenvalue(mm.entries);
    return mm;
}

TrajectoryPositivity scan_trajectory_positivity(const Trajectory& tr, double tol,
                                                ExecutionPolicy policy) {
    if (tr.samples.empty()) throw BadParameter("trajectory has no samples");
    const CommutantBasis& b = *tr.basis;
    const MomentState st0 = state_at(tr, 0);

    std::vector<Word> slice;
    for (const Word& w : b.words) {
        if (static_cast<int>(w.size()) <= b.degree / 2) slice.push_back(w);
    }
    const auto n = static_cast<int>(slice.size());

    ZFreeSlice zf = zfree_slice(tr.basis);
    std::vector<ValuationPlan> plans;
    plans.reserve(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        NCPolynomial ar = adjoint(NCPolynomial::word(b.sig, slice[r]));
        for (int c = 0; c < n; ++c) {
            plans.push_back(compile_valuation(zf, multiply(ar, NCPolynomial::word(b.sig, slice[c])),
                                              st0.hamiltonian(), tr.env));
        }
    }

    TrajectoryPositivity res;
    res.dimension = static_cast<std::size_t>(n);
    const auto ns = static_cast<long long>(tr.samples.size());
    res.min_eigenvalues.assign(ns, 0.0);
    const bool par = policy == ExecutionPolicy::Parallel;
#pragma omp parallel for if (par) schedule(static)
    for (long long i = 0; i < ns; ++i) {
        const TrajectorySample& s = tr.samples[i];
        Eigen::MatrixXcd M(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                M(r, c) = evaluate_plan(plans[static_cast<size_t>(r) * n + c], s.t_Z, s.moments);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
        res.min_eigenvalues[i] = es.eigenvalues().minCoeff();
    }

    res.worst = res.min_eigenvalues[0];
    for (std::size_t i = 1; i < res.min_eigenvalues.size(); ++i) {
        if (res.min_eigenvalues[i] < res.worst) {
            res.worst = res.min_eigenvalues[i];
            res.worst_sample = i;
        }
    }
    res.pass = res.worst >= -tol;
    return res;
}

std::vector<double> cauchy_schwarz_margins(
    const MomentState& state, const std::vector<std::pair<NCPolynomial, NCPolynomial>>& pairs,
    ExecutionPolicy policy) {
    const auto n = static_cast<long long>(pairs.size());
    std::vector<double> margins(n, 0.0);
    std::string error;
    const bool par = policy == ExecutionPolicy::Parallel;
#pragma omp parallel for if (par) schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            const auto& [A, B] = pairs[i];
            Cplx aa = state.value(multiply(adjoint(A), A));
            Cplx bb = state.value(multiply(adjoint(B), B));
            Cplx ab = state.value(multiply(adjoint(A), B));
            margins[i] = aa.real() * bb.real() - std::norm(ab);
        } catch (const std::exception& e) {
#pragma omp critical
            error = e.what();
        }
    }
    if (!error.empty()) throw DegreeOverflow(error);
    return margins;
}

} // namespace qref
