#pragma once

#include "qref/flow.hpp"

namespace qref {

// Serial is the reference implementation; Parallel distributes independent
// entries (or samples, or pairs) across OpenMP threads. Every quantity is
// computed per-entry with a fixed summation order, so the two policies
// produce bitwise identical results.
enum class ExecutionPolicy { Serial, Parallel };

double min_eigenvalue(const std::vector<std::vector<Cplx>>& entries);

MomentMatrix assemble_moment_matrix(const MomentState& state, ExecutionPolicy policy);

struct TrajectoryPositivity {
    std::vector<double> min_eigenvalues;  // one per sample
    double worst = 0.0;
    std::size_t worst_sample = 0;
    std::size_t dimension = 0;
    bool pass = false;
};

// Moment-matrix positivity along a trajectory. The matrix entries are
// compiled once into linear forms on the sampled moments, then evaluated per
// sample, so the scan costs one small eigensolve per sample.
TrajectoryPositivity scan_trajectory_positivity(const Trajectory& tr, double tol,
                                                ExecutionPolicy policy);

// w(A*A) w(B*B) - |w(A*B)|^2 for each pair, nonnegative on positive states.
std::vector<double> cauchy_schwarz_margins(
    const MomentState& state, const std::vector<std::pair<NCPolynomial, NCPolynomial>>& pairs,
    ExecutionPolicy policy);

} // namespace qref
