#pragma once

#include <optional>

#include "qref/constraint.hpp"

namespace qref {

// Exposed when a parameter choice makes a constraint rewritable in terms of a
// shifted canonical momentum. `redefined` lives on the general signature; the
// model itself is built on the simplified one.
struct MomentumRedefinition {
    SignaturePtr general_sig;
    NCPolynomial general_constraint;
    NCPolynomial position;
    NCPolynomial original_momentum;
    NCPolynomial redefined_momentum;
    bool canonical = false;  // [position, redefined momentum] == i hbar
};

struct Model {
    std::string name;
    std::string description;
    SignaturePtr sig;
    std::vector<NCPolynomial> constraints;
    std::vector<std::string> constraint_names;
    // candidate reference letter, index into constraints
    std::vector<std::pair<GenId, int>> candidates;
    // letters classified as clocks against each factorizable frame
    std::vector<GenId> clock_letters;
    std::map<std::string, Scalar> params;
    std::map<std::string, std::string> options;
    std::vector<std::string> notes;
    std::optional<MomentumRedefinition> redefinition;
};

const std::vector<std::string>& model_names();

// Parameters arrive as strings: exact rationals ("2", "-1/3") for numeric
// parameters, "formal" or "zero"/"0" for the commutator switch. Unknown model
// ids raise UnknownModel, malformed values BadParameter.
Model build_model(const std::string& id,
                  const std::map<std::string, std::string>& params = {});

struct ModelReferenceRow {
    std::string candidate;
    std::string constraint_name;
    ReferenceReport report;
};

std::vector<ModelReferenceRow> run_reference_report(const Model& m);

// Every candidate clock read against every frame that factorizes. A frozen
// clock (vanishing bracket with the frame generator) is reported as a note
// instead of a classification.
struct ModelClockRow {
    std::string clock;
    std::string frame;
    std::optional<ClockReport> report;
    std::string note;
};

std::vector<ModelClockRow> run_clock_report(const Model& m);

// Staged elimination of the relativistic-clock constraints. Stage 1 removes
// the total spatial momentum by passing to relative positions; stage 2
// factorizes the per-particle constraints; stage 3 factorizes the reduced
// overall constraint with respect to a clock reading. With the formal
// commutator switch the later stages fail and the report carries the
// obstructions; nothing throws.
struct StagedReduction {
    bool flag_zero = false;

    bool stage1_ok = false;
    std::vector<std::string> stage1_notes;

    // [inv(g), inv(w)] = inv(w) inv(g) [g, w] inv(g) inv(w), checked after
    // clearing the (invertible) outer factors.
    bool comm_identity_holds = false;

    struct Stage2Row {
        std::string constraint_name;
        NCPolynomial lapse;
        NCPolynomial right_factor;
        NCPolynomial reduced_hamiltonian;
        NCPolynomial obstruction;
        NCPolynomial hermiticity_defect;  // adjoint(right factor) - right factor
        bool right_factor_hermitian = false;
        bool obstruction_matches_commutator_flag = false;
        bool ok = false;
    };
    std::vector<Stage2Row> stage2;
    bool stage2_ok = false;

    NCPolynomial reduced_constraint;  // the overall constraint after stage 2
    bool reduced_constraint_hermitian = false;
    NCPolynomial lapse3;
    NCPolynomial lapse3_inverse;
    NCPolynomial right_factor3;
    bool right_factor3_hermitian = false;
    NCPolynomial obstruction3;  // [inv(lapse), reduced constraint]
    std::string obstruction3_note;
    bool lapse3_constant_of_motion = false;
    bool stage3_ok = false;

    bool constraints_commute = false;  // pairwise, full signature
    std::vector<std::string> notes;
    bool ok = false;
};

StagedReduction staged_reduction(const Model& m);

// Exact operator identities anchored in the worked models, rendered for
// display. Each one compares an engine computation against an independently
// entered closed form.
struct ModelAnchor {
    std::string name;
    std::string expected;
    std::string actual;
    bool holds = false;
};

std::vector<ModelAnchor> model_anchor_identities();

} // namespace qref
