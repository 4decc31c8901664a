#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qref/polynomial.hpp"

namespace qref {

using Cplx = std::complex<double>;
using MomentMap = std::map<Word, Cplx, WordLess>;
using Env = std::map<std::string, double>;

// All normal words of degree <= degree over the generators commuting with the
// reference letter. The conjugate momentum is excluded; the reference itself
// is a member of its own commutant.
struct CommutantBasis {
    SignaturePtr sig;
    GenId reference = -1;
    GenId momentum = -1;
    int degree = 0;
    std::vector<GenId> generators;
    std::vector<Word> words;
    std::map<Word, int, WordLess> index;

    int find(const Word& w) const {
        auto it = index.find(w);
        return it == index.end() ? -1 : it->second;
    }
};

using BasisPtr = std::shared_ptr<const CommutantBasis>;

BasisPtr enumerate_commutant_basis(const SignaturePtr& sig, GenId Z, int degree);

// Linear functional on the commutant, parameterized by the reference value
// t_Z. Stored moments cover every basis word; words with a single factor of
// the conjugate momentum are valued through the Hamiltonian part of the
// constraint, and reference letters peel off as powers of t_Z.
class MomentState {
  public:
    // constraint must have unit coefficient on the conjugate momentum and a
    // remainder that commutes with the reference (throws
    // HamiltonianNotInCommutant otherwise).
    static MomentState extend_from_reduced(BasisPtr basis, const MomentMap& reduced,
                                           double t_Z, const NCPolynomial& constraint,
                                           Env env);

    const CommutantBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const NCPolynomial& hamiltonian() const { return hamiltonian_; }
    const NCPolynomial& constraint() const { return constraint_; }
    double t_Z() const { return t_Z_; }
    double hbar() const { return hbar_; }
    const Env& env() const { return env_; }
    const MomentMap& stored() const { return stored_; }

    // Raw write into the stored table; deliberately able to break the
    // defining conditions so the diagnostics have something to catch.
    void set_moment(const Word& w, Cplx v);

    Cplx value(const NCPolynomial& p) const;
    Cplx value_word(const Word& w) const;

  private:
    MomentState(BasisPtr basis, NCPolynomial constraint, NCPolynomial hamiltonian,
                double t_Z, Env env);

    BasisPtr basis_;
    NCPolynomial constraint_;
    NCPolynomial hamiltonian_;
    double t_Z_ = 0.0;
    double hbar_ = 1.0;
    Env env_;
    MomentMap stored_;
};

struct MomentMatrix {
    std::vector<Word> slice;  // basis words of degree <= degree/2
    std::vector<std::vector<Cplx>> entries;
    double min_eigenvalue = 0.0;
};

MomentMatrix moment_matrix(const MomentState& state);

struct PositivityResult {
    double min_eigenvalue = 0.0;
    int dimension = 0;
    bool pass = false;
};

PositivityResult positivity_on_commutant(const MomentState& state, double tol);

// Residuals for the three defining conditions: the constraint annihilates the
// state from the right, reference letters factor out as t_Z, and the moment
// matrix on the commutant is positive semidefinite (with real expectations
// for hermitian words).
struct AlmostPositiveReport {
    double constraint_residual = 0.0;
    double parameterization_residual = 0.0;
    double reality_residual = 0.0;
    double min_eigenvalue = 0.0;
    bool pass_constraint = false;
    bool pass_parameterization = false;
    bool pass_positivity = false;
    bool pass = false;
};

AlmostPositiveReport check_almost_positive(const MomentState& state, double tol);

// (1/2) w(C Z + Z C): imaginary and nonzero on every state satisfying the
// defining conditions, which is why no positive extension off the commutant
// exists.
Cplx nonpositivity_witness(const MomentState& state);

Cplx covariance(const MomentState& state, const NCPolynomial& A, const NCPolynomial& B);

// (dZ)^2 (dE)^2 - (d_ZE)^2 for the reference pair. The reference variance
// vanishes identically, so the (undefined) momentum variance multiplies zero
// and the product reduces to -(d_ZE)^2 = hbar^2/4.
struct UncertaintyProduct {
    Cplx reference_variance;
    Cplx mixed_covariance;
    double product = 0.0;
    double bound = 0.0;
    bool saturated = false;
};

UncertaintyProduct uncertainty_product_check(const MomentState& state, double tol);

struct CauchySchwarzResult {
    double worst_margin = 0.0;
    int pairs = 0;
    bool pass = false;
};

CauchySchwarzResult cauchy_schwarz_check(const MomentState& state,
                                         const std::vector<std::pair<NCPolynomial, NCPolynomial>>& pairs,
                                         double tol);

// A state built over one reference cannot be almost-positive for a second
// independent reference: the mixed reference covariance is forced imaginary,
// while positivity on the other commutant would force it real.
struct FrameIncompatibilityReport {
    GenId frame_a = -1;
    GenId frame_b = -1;
    Cplx mixed_covariance;
    bool pair_in_other_commutant = false;
    bool compatible = true;
};

FrameIncompatibilityReport frame_incompatibility_check(const MomentState& state, GenId other,
                                                       double tol);

// Moments of a Gaussian with the given means and (symmetrized) covariances,
// for normal words q^a p^b with a + b <= degree.
struct GaussianSpec {
    GenId q = -1;
    GenId p = -1;
    double mean_q = 0.0;
    double mean_p = 0.0;
    double var_q = 0.5;
    double cov_qp = 0.0;
    double var_p = 0.5;
};

MomentMap gaussian_pair_moments(const GaussianSpec& g, double hbar, int degree);

// Product state over disjoint letter sets; words merge by the normal order.
MomentMap tensor_moments(const SignaturePtr& sig, const MomentMap& a, const MomentMap& b,
                         int degree);

} // namespace qref
