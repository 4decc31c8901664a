#pragma once

#include "qref/moments.hpp"

namespace qref {

// The reference-free basis words: the dynamical variables of a gauge flow.
// Moments of words containing the reference letter are not evolved; they are
// recovered afterwards through the t_Z parameterization.
struct ZFreeSlice {
    BasisPtr basis;
    std::vector<Word> words;
    std::map<Word, int, WordLess> index;
};

ZFreeSlice zfree_slice(BasisPtr basis);

// One linear term of a compiled valuation: coeff * t_Z^zpow * m[target].
struct ValuationRow {
    int zpow = 0;
    int target = 0;
    Cplx coeff;
};

struct ValuationPlan {
    std::vector<ValuationRow> rows;
    int dropped = 0;  // words beyond the stored degree, omitted from the sum
};

// Expresses the expectation of a polynomial as a linear form on the
// reference-free moments with t_Z-dependent coefficients. Reference letters
// peel off as powers of t_Z; single factors of the conjugate momentum are
// eliminated through the Hamiltonian part exactly as in the state valuation.
// Words that land outside the stored degree are counted in `dropped`.
ValuationPlan compile_valuation(const ZFreeSlice& slice, const NCPolynomial& poly,
                                const NCPolynomial& hamiltonian, const Env& env);

Cplx evaluate_plan(const ValuationPlan& plan, double t_Z, const std::vector<Cplx>& moments);

// Right-hand side of the gauge flow for one basis word, evaluated directly on
// the state: w([A, C]) / (i hbar). Reference implementation for the compiled
// flow; the two must agree whenever nothing is dropped.
Cplx gauge_flow_rhs(const MomentState& state, const Word& A);

struct TrajectorySample {
    double tau = 0.0;
    double t_Z = 0.0;
    std::vector<Cplx> moments;  // aligned with Trajectory::words
};

struct Trajectory {
    BasisPtr basis;
    std::vector<Word> words;  // reference-free basis words
    NCPolynomial constraint;
    Env env;
    std::vector<TrajectorySample> samples;
    std::vector<std::string> warnings;
};

// Fourth-order Runge-Kutta integration of the compiled gauge flow from the
// given state through gauge parameter tau_end, sampling after every step
// (plus the initial state). A final partial step lands exactly on tau_end.
// When the Hamiltonian part has degree above two the flow does not close on
// the stored moments; the truncated terms are dropped and reported in
// `warnings`. Throws BadParameter unless dt > 0.
Trajectory evolve(const MomentState& initial, double tau_end, double dt);

// Rebuilds the full moment state at one sample, re-deriving the moments of
// reference-carrying words from the sampled t_Z.
MomentState state_at(const Trajectory& t, std::size_t sample_index);

// First-moment flow against the classical equations of motion: the rate of a
// canonical letter from the gauge flow next to the corresponding Hamilton
// equation evaluated at the first moments. The two agree identically when
// the constraint is at most quadratic.
struct ClassicalComparison {
    GenId generator = -1;
    Cplx quantum_rate;
    Cplx classical_rate;
    double deviation = 0.0;
};

std::vector<ClassicalComparison> classical_limit_check(const MomentState& state);

} // namespace qref
